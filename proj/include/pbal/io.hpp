#pragma once

#include <string>
#include <vector>

#include "pbal/balance.hpp"
#include "pbal/gibbs.hpp"
#include "pbal/set_partition.hpp"

namespace pbal {

// Shortest decimal that round-trips a double (17 significant digits).
std::string format_real(double x);

// Spectrum table with header `shape,k,H,G,log_eppf,multiplicity`.
void write_spectrum_csv(const std::vector<SpectrumRow>& rows,
                        const std::string& path);

// B-sequence table `s,B_s` followed by a `#`-prefixed classification line.
void write_bseq_csv(const std::vector<std::pair<int, double>>& bs,
                    const BalanceClass& cls, const std::string& path);

// One `record,cluster` row per record, labels canonical and 1-based.
void write_labels_csv(const SetPartition& partition, const std::string& path);
SetPartition read_labels_csv(const std::string& path);

}  // namespace pbal
