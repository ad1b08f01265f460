#include "pbal/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pbal/mathutil.hpp"

namespace pbal {

std::string format_real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_spectrum_csv(const std::vector<SpectrumRow>& rows,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_spectrum_csv: cannot open " + path);
  out << "shape,k,H,G,log_eppf,multiplicity\n";
  for (const auto& row : rows) {
    out << row.shape.to_string() << ',' << row.k << ','
        << format_real(row.shannon) << ',' << format_real(row.gini_simpson)
        << ',' << format_real(row.log_eppf) << ',' << row.multiplicity << '\n';
  }
  if (!out) throw std::runtime_error("write_spectrum_csv: write failed");
}

void write_bseq_csv(const std::vector<std::pair<int, double>>& bs,
                    const BalanceClass& cls, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_bseq_csv: cannot open " + path);
  out << "s,B_s\n";
  for (const auto& [s, b] : bs) out << s << ',' << format_real(b) << '\n';
  out << "# class=" << to_string(cls.kind)
      << " verified_up_to=" << cls.verified_up_to << '\n';
  if (!out) throw std::runtime_error("write_bseq_csv: write failed");
}

void write_labels_csv(const SetPartition& partition, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_labels_csv: cannot open " + path);
  out << "record,cluster\n";
  for (int i = 0; i < partition.n(); ++i)
    out << (i + 1) << ',' << (partition.label(i) + 1) << '\n';
  if (!out) throw std::runtime_error("write_labels_csv: write failed");
}

SetPartition read_labels_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_labels_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("record,cluster", 0) != 0)
    throw std::runtime_error("read_labels_csv: missing header");
  std::vector<std::pair<int, int>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string a, b;
    if (!std::getline(is, a, ',') || !std::getline(is, b))
      throw std::runtime_error("read_labels_csv: bad row");
    rows.emplace_back(std::stoi(a), std::stoi(b));
  }
  if (rows.empty()) throw std::runtime_error("read_labels_csv: no rows");
  std::vector<int> labels(rows.size(), -1);
  for (const auto& [rec, lab] : rows) {
    if (rec < 1 || rec > static_cast<int>(rows.size()))
      throw std::runtime_error("read_labels_csv: record index out of range");
    labels[static_cast<size_t>(rec - 1)] = lab;
  }
  for (int l : labels)
    if (l == -1) throw std::runtime_error("read_labels_csv: missing record");
  return SetPartition(labels);
}

}  // namespace pbal
