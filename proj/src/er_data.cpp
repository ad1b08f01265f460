#include "pbal/er_data.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pbal/mathutil.hpp"
#include "pbal/rng.hpp"

namespace pbal::er {

void ERDataset::validate() const {
  if (n < 1 || L < 1) throw std::invalid_argument("ERDataset: empty");
  if (static_cast<int>(D.size()) != L || static_cast<int>(theta.size()) != L ||
      static_cast<int>(x.size()) != n)
    throw std::invalid_argument("ERDataset: inconsistent dimensions");
  for (int l = 0; l < L; ++l) {
    if (D[static_cast<size_t>(l)] < 1)
      throw std::invalid_argument("ERDataset: D must be positive");
    const auto& th = theta[static_cast<size_t>(l)];
    if (static_cast<int>(th.size()) != D[static_cast<size_t>(l)])
      throw std::invalid_argument("ERDataset: theta length mismatch");
    double total = 0.0;
    for (double t : th) {
      if (t < 0.0) throw std::invalid_argument("ERDataset: negative theta");
      total += t;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw std::invalid_argument("ERDataset: theta must sum to 1");
  }
  for (const auto& row : x) {
    if (static_cast<int>(row.size()) != L)
      throw std::invalid_argument("ERDataset: ragged record row");
    for (int l = 0; l < L; ++l) {
      const int v = row[static_cast<size_t>(l)];
      if (v < 0 || v >= D[static_cast<size_t>(l)])
        throw std::invalid_argument("ERDataset: category out of range");
    }
  }
  if (truth && truth->n() != n)
    throw std::invalid_argument("ERDataset: truth size mismatch");
}

std::vector<std::vector<double>> empirical_theta(const ERDataset& data) {
  std::vector<std::vector<double>> out(static_cast<size_t>(data.L));
  for (int l = 0; l < data.L; ++l) {
    std::vector<double> freq(static_cast<size_t>(data.D[static_cast<size_t>(l)]), 0.0);
    for (const auto& row : data.x) ++freq[static_cast<size_t>(row[static_cast<size_t>(l)])];
    for (double& f : freq) f /= data.n;
    out[static_cast<size_t>(l)] = std::move(freq);
  }
  return out;
}

SyntheticScenario SyntheticScenario::from_counts(std::vector<int> counts) {
  while (!counts.empty() && counts.back() == 0) counts.pop_back();
  bool any = false;
  for (int c : counts) {
    if (c < 0) throw std::invalid_argument("SyntheticScenario: negative count");
    if (c > 0) any = true;
  }
  if (!any)
    throw std::invalid_argument("SyntheticScenario: all size counts are zero");
  return SyntheticScenario{std::move(counts)};
}

SyntheticScenario SyntheticScenario::from_mu_times_100(const MuFamily& mu) {
  std::vector<int> counts;
  const int cap = mu.finite_support() ? mu.support_max() : 1000;
  for (int s = 1; s <= cap; ++s) {
    const int c = static_cast<int>(std::llround(100.0 * mu.pmf(s)));
    counts.push_back(c);
    // Stop once the rounded tail has died out (pmf tails here are monotone).
    if (!mu.finite_support() && s > 4 && c == 0 &&
        100.0 * mu.pmf(s + 1) < 0.5)
      break;
  }
  return from_counts(std::move(counts));
}

SyntheticScenario SyntheticScenario::builtin(int index) {
  switch (index) {
    case 1:
      return from_mu_times_100(MuFamily::zt_binomial(10, 0.5));
    case 2:
      return from_mu_times_100(MuFamily::zt_poisson(5.0));
    case 3:
      return from_mu_times_100(MuFamily::zt_neg_binomial(5.0, 0.5));
    default:
      throw std::invalid_argument("SyntheticScenario::builtin: index must be 1..3");
  }
}

int SyntheticScenario::total_clusters() const {
  int k = 0;
  for (int c : counts) k += c;
  return k;
}

int SyntheticScenario::total_records() const {
  int n = 0;
  for (size_t i = 0; i < counts.size(); ++i)
    n += static_cast<int>(i + 1) * counts[i];
  return n;
}

ERDataset generate_synthetic(const SyntheticScenario& scenario, int L,
                             const std::vector<int>& D,
                             const std::vector<std::vector<double>>& theta,
                             const std::vector<double>& beta_true,
                             uint64_t seed) {
  if (L < 1) throw std::invalid_argument("generate_synthetic: L < 1");
  if (static_cast<int>(D.size()) != L ||
      static_cast<int>(theta.size()) != L ||
      static_cast<int>(beta_true.size()) != L)
    throw std::invalid_argument("generate_synthetic: per-field sizes must match L");
  for (double b : beta_true)
    if (b < 0.0 || b >= 1.0)
      throw std::invalid_argument("generate_synthetic: beta must be in [0,1)");

  ERDataset data;
  data.L = L;
  data.D = D;
  data.theta = theta;
  data.n = scenario.total_records();

  Rng rng(seed);
  auto draw_cat = [&](int l) {
    return rng.categorical(theta[static_cast<size_t>(l)]);
  };

  // Latent entity per cluster, sizes in ascending size order.
  const int K = scenario.total_clusters();
  std::vector<std::vector<int>> y(static_cast<size_t>(K),
                                  std::vector<int>(static_cast<size_t>(L)));
  for (auto& row : y)
    for (int l = 0; l < L; ++l) row[static_cast<size_t>(l)] = draw_cat(l);

  std::vector<int> labels;
  labels.reserve(static_cast<size_t>(data.n));
  data.x.reserve(static_cast<size_t>(data.n));
  int cluster = 0;
  for (size_t sz = 0; sz < scenario.counts.size(); ++sz) {
    for (int rep = 0; rep < scenario.counts[sz]; ++rep) {
      for (size_t member = 0; member <= sz; ++member) {
        std::vector<int> row(static_cast<size_t>(L));
        for (int l = 0; l < L; ++l) {
          const bool distorted = rng.bernoulli(beta_true[static_cast<size_t>(l)]);
          row[static_cast<size_t>(l)] =
              distorted ? draw_cat(l)
                        : y[static_cast<size_t>(cluster)][static_cast<size_t>(l)];
        }
        data.x.push_back(std::move(row));
        labels.push_back(cluster);
      }
      ++cluster;
    }
  }
  data.truth = SetPartition(labels);
  data.validate();
  return data;
}

ERDataset generate_synthetic(const SyntheticScenario& scenario, int L, int D,
                             double beta_true, uint64_t seed) {
  std::vector<int> Dv(static_cast<size_t>(L), D);
  std::vector<std::vector<double>> theta(
      static_cast<size_t>(L),
      std::vector<double>(static_cast<size_t>(D), 1.0 / D));
  std::vector<double> beta(static_cast<size_t>(L), beta_true);
  return generate_synthetic(scenario, L, Dv, theta, beta, seed);
}

void write_dataset_csv(const ERDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_dataset_csv: cannot open " + path);
  for (int l = 0; l < data.L; ++l) {
    if (l) out << ',';
    out << 'f' << (l + 1);
  }
  if (data.truth) out << ",truth";
  out << '\n';
  for (int i = 0; i < data.n; ++i) {
    for (int l = 0; l < data.L; ++l) {
      if (l) out << ',';
      out << data.x[static_cast<size_t>(i)][static_cast<size_t>(l)] + 1;
    }
    if (data.truth) out << ',' << data.truth->label(i) + 1;
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_dataset_csv: write failed");
}

ERDataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_dataset_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("read_dataset_csv: empty file");
  // Header.
  std::vector<std::string> header;
  {
    std::istringstream is(line);
    std::string tok;
    while (std::getline(is, tok, ',')) header.push_back(tok);
  }
  bool has_truth = !header.empty() && header.back() == "truth";
  const int L = static_cast<int>(header.size()) - (has_truth ? 1 : 0);
  if (L < 1) throw std::runtime_error("read_dataset_csv: no field columns");

  std::vector<std::vector<int>> raw;
  std::vector<int> truth_labels;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string tok;
    std::vector<int> row;
    while (std::getline(is, tok, ',')) row.push_back(std::stoi(tok));
    if (static_cast<int>(row.size()) != L + (has_truth ? 1 : 0))
      throw std::runtime_error("read_dataset_csv: ragged row");
    if (has_truth) {
      truth_labels.push_back(row.back());
      row.pop_back();
    }
    raw.push_back(std::move(row));
  }
  if (raw.empty()) throw std::runtime_error("read_dataset_csv: no records");

  ERDataset data;
  data.n = static_cast<int>(raw.size());
  data.L = L;
  data.D.assign(static_cast<size_t>(L), 0);
  // Values are 1-based categories on disk; D_l is the max observed value.
  for (auto& row : raw)
    for (int l = 0; l < L; ++l) {
      if (row[static_cast<size_t>(l)] < 1)
        throw std::runtime_error("read_dataset_csv: categories must be >= 1");
      data.D[static_cast<size_t>(l)] =
          std::max(data.D[static_cast<size_t>(l)], row[static_cast<size_t>(l)]);
      --row[static_cast<size_t>(l)];
    }
  data.x = std::move(raw);
  data.theta = std::vector<std::vector<double>>();
  data.theta.reserve(static_cast<size_t>(L));
  for (int l = 0; l < L; ++l)
    data.theta.push_back(std::vector<double>(
        static_cast<size_t>(data.D[static_cast<size_t>(l)]), 0.0));
  // theta is fixed at the empirical distribution of the data.
  data.theta = empirical_theta(data);
  if (has_truth) data.truth = SetPartition(truth_labels);
  data.validate();
  return data;
}

}  // namespace pbal::er
