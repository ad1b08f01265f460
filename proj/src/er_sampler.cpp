#include "pbal/er_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "pbal/mathutil.hpp"

namespace pbal::er {

void MCMCConfig::validate() const {
  if (iterations < 1) throw ConfigError("mcmc: iterations must be >= 1");
  if (burn_in < 0) throw ConfigError("mcmc: burn_in must be >= 0");
  if (thin < 1) throw ConfigError("mcmc: thin must be >= 1");
  if (iterations <= burn_in)
    throw ConfigError("mcmc: iterations must exceed burn_in");
  if (kept_samples() < 1)
    throw ConfigError("mcmc: no post-burn-in samples would be kept");
  if (beta_a <= 0.0 || beta_b <= 0.0)
    throw ConfigError("mcmc: beta hyperparameters must be positive");
}

void MCMCState::validate(const ERDataset& data,
                         const PartitionPrior& prior) const {
  const int n = data.n;
  if (static_cast<int>(z.size()) != n)
    throw std::logic_error("state: z size mismatch");
  const int k = kplus();
  if (static_cast<int>(y.size()) != k || static_cast<int>(members.size()) != k)
    throw std::logic_error("state: cluster row count mismatch");
  std::vector<int> recount(static_cast<size_t>(k), 0);
  for (int i = 0; i < n; ++i) {
    const int c = z[static_cast<size_t>(i)];
    if (c < 0 || c >= k) throw std::logic_error("state: label out of range");
    ++recount[static_cast<size_t>(c)];
  }
  for (int c = 0; c < k; ++c) {
    if (recount[static_cast<size_t>(c)] != cluster_sizes[static_cast<size_t>(c)])
      throw std::logic_error("state: cluster size drift");
    if (cluster_sizes[static_cast<size_t>(c)] < 1)
      throw std::logic_error("state: empty cluster not removed");
    if (cluster_sizes[static_cast<size_t>(c)] > prior.max_cluster_size())
      throw std::logic_error("state: cluster exceeds prior size cap");
    if (static_cast<int>(members[static_cast<size_t>(c)].size()) !=
        cluster_sizes[static_cast<size_t>(c)])
      throw std::logic_error("state: member list drift");
    for (int i : members[static_cast<size_t>(c)])
      if (z[static_cast<size_t>(i)] != c)
        throw std::logic_error("state: member list / labels disagree");
  }
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < data.L; ++l)
      if (w[static_cast<size_t>(i)][static_cast<size_t>(l)] == 0 &&
          data.x[static_cast<size_t>(i)][static_cast<size_t>(l)] !=
              y[static_cast<size_t>(z[static_cast<size_t>(i)])]
               [static_cast<size_t>(l)])
        throw std::logic_error("state: undistorted entry disagrees with entity");
}

// ---------------------------------------------------------------------------
// Workspace

void SamplerWorkspace::init(const ERDataset& data) {
  theta = empirical_theta(data);
  log_base.assign(static_cast<size_t>(data.n), 0.0);
  for (int i = 0; i < data.n; ++i) {
    double acc = 0.0;
    for (int l = 0; l < data.L; ++l)
      acc += std::log(
          theta[static_cast<size_t>(l)]
               [static_cast<size_t>(data.x[static_cast<size_t>(i)][static_cast<size_t>(l)])]);
    log_base[static_cast<size_t>(i)] = acc;
  }
  log_match.assign(static_cast<size_t>(data.n) * data.L, 0.0);
  log_mismatch.assign(static_cast<size_t>(data.n) * data.L, 0.0);
}

void SamplerWorkspace::refresh_beta(const ERDataset& data,
                                    const std::vector<double>& beta) {
  for (int i = 0; i < data.n; ++i) {
    for (int l = 0; l < data.L; ++l) {
      const double th =
          theta[static_cast<size_t>(l)]
               [static_cast<size_t>(data.x[static_cast<size_t>(i)][static_cast<size_t>(l)])];
      const double b = beta[static_cast<size_t>(l)];
      const size_t idx = static_cast<size_t>(i) * data.L + static_cast<size_t>(l);
      log_match[idx] = std::log1p(-b * (1.0 - th));  // (1-b) + b*th
      log_mismatch[idx] = b > 0.0 ? std::log(b * th) : kNegInf;
    }
  }
}

namespace {

// Record log likelihood against an entity row, distortion marginalized.
inline double record_loglik(const ERDataset& data, const SamplerWorkspace& ws,
                            int i, const std::vector<int>& yrow) {
  const int L = data.L;
  const size_t base = static_cast<size_t>(i) * L;
  double acc = 0.0;
  for (int l = 0; l < L; ++l) {
    acc += (data.x[static_cast<size_t>(i)][static_cast<size_t>(l)] ==
            yrow[static_cast<size_t>(l)])
               ? ws.log_match[base + static_cast<size_t>(l)]
               : ws.log_mismatch[base + static_cast<size_t>(l)];
  }
  return acc;
}

// Draw a y row for a fresh singleton cluster holding record i only:
// P(y_l = v) ~ theta_v * [(1-b) 1(x=v) + b theta_x].
std::vector<int> draw_singleton_entity(MCMCState& s, const ERDataset& data,
                                       const SamplerWorkspace& ws, int i) {
  std::vector<int> row(static_cast<size_t>(data.L));
  std::vector<double> wts;
  for (int l = 0; l < data.L; ++l) {
    const int x = data.x[static_cast<size_t>(i)][static_cast<size_t>(l)];
    const double b = s.beta[static_cast<size_t>(l)];
    const auto& th = ws.theta[static_cast<size_t>(l)];
    if (b == 0.0) {
      row[static_cast<size_t>(l)] = x;
      continue;
    }
    wts.assign(th.begin(), th.end());
    for (size_t v = 0; v < wts.size(); ++v)
      wts[v] *= b * th[static_cast<size_t>(x)];
    wts[static_cast<size_t>(x)] =
        th[static_cast<size_t>(x)] *
        ((1.0 - b) + b * th[static_cast<size_t>(x)]);
    row[static_cast<size_t>(l)] = s.rng.categorical(wts);
  }
  return row;
}

// Resample record i's distortion indicators given its (possibly new) entity.
void resample_w_row(MCMCState& s, const ERDataset& data,
                    const SamplerWorkspace& ws, int i) {
  const std::vector<int>& yrow = s.y[static_cast<size_t>(s.z[static_cast<size_t>(i)])];
  for (int l = 0; l < data.L; ++l) {
    const int x = data.x[static_cast<size_t>(i)][static_cast<size_t>(l)];
    if (x != yrow[static_cast<size_t>(l)]) {
      s.w[static_cast<size_t>(i)][static_cast<size_t>(l)] = 1;
      continue;
    }
    const double b = s.beta[static_cast<size_t>(l)];
    const double th = ws.theta[static_cast<size_t>(l)][static_cast<size_t>(x)];
    const double p1 = b * th;
    const double p0 = 1.0 - b;
    s.w[static_cast<size_t>(i)][static_cast<size_t>(l)] =
        s.rng.bernoulli(p1 / (p0 + p1)) ? 1 : 0;
  }
}

// Detach record i from its cluster, deleting the cluster if it was a
// singleton (swap-removal keeps labels compact).
void detach_record(MCMCState& s, int i) {
  const int c = s.z[static_cast<size_t>(i)];
  auto& mem = s.members[static_cast<size_t>(c)];
  auto it = std::find(mem.begin(), mem.end(), i);
  *it = mem.back();
  mem.pop_back();
  if (--s.cluster_sizes[static_cast<size_t>(c)] == 0) {
    const int last = s.kplus() - 1;
    if (c != last) {
      s.cluster_sizes[static_cast<size_t>(c)] = s.cluster_sizes[static_cast<size_t>(last)];
      s.members[static_cast<size_t>(c)] = std::move(s.members[static_cast<size_t>(last)]);
      s.y[static_cast<size_t>(c)] = std::move(s.y[static_cast<size_t>(last)]);
      for (int r : s.members[static_cast<size_t>(c)])
        s.z[static_cast<size_t>(r)] = c;
    }
    s.cluster_sizes.pop_back();
    s.members.pop_back();
    s.y.pop_back();
  }
  s.z[static_cast<size_t>(i)] = -1;
}

void attach_record(MCMCState& s, int i, int c) {
  s.z[static_cast<size_t>(i)] = c;
  s.members[static_cast<size_t>(c)].push_back(i);
  ++s.cluster_sizes[static_cast<size_t>(c)];
}

}  // namespace

double log_record_likelihood(const std::vector<int>& x,
                             const std::vector<int>& y,
                             const std::vector<double>& beta,
                             const std::vector<std::vector<double>>& theta) {
  if (x.size() != y.size() || x.size() != beta.size() ||
      x.size() != theta.size())
    throw std::invalid_argument("log_record_likelihood: dimension mismatch");
  double acc = 0.0;
  for (size_t l = 0; l < x.size(); ++l) {
    const double th = theta[l][static_cast<size_t>(x[l])];
    const double match = x[l] == y[l] ? 1.0 - beta[l] : 0.0;
    const double p = match + beta[l] * th;
    if (p <= 0.0) return kNegInf;
    acc += std::log(p);
  }
  return acc;
}

MCMCState init_state(const ERDataset& data, const std::vector<double>& beta0,
                     uint64_t seed, InitMode mode, int max_cluster_size) {
  MCMCState s(seed);
  const int n = data.n;
  s.z.resize(static_cast<size_t>(n));
  if (mode == InitMode::MatchGroups) {
    // Group identical records, splitting groups that would exceed the
    // prior's size cap.
    std::map<std::vector<int>, int> group;
    for (int i = 0; i < n; ++i) {
      const auto& row = data.x[static_cast<size_t>(i)];
      auto it = group.find(row);
      if (it != group.end() &&
          s.cluster_sizes[static_cast<size_t>(it->second)] < max_cluster_size) {
        s.z[static_cast<size_t>(i)] = it->second;
        ++s.cluster_sizes[static_cast<size_t>(it->second)];
        s.members[static_cast<size_t>(it->second)].push_back(i);
        continue;
      }
      const int c = s.kplus();
      group[row] = c;
      s.z[static_cast<size_t>(i)] = c;
      s.cluster_sizes.push_back(1);
      s.members.push_back({i});
      s.y.push_back(row);
    }
  } else {
    s.cluster_sizes.assign(static_cast<size_t>(n), 1);
    s.members.resize(static_cast<size_t>(n));
    s.y.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      s.z[static_cast<size_t>(i)] = i;
      s.members[static_cast<size_t>(i)] = {i};
      s.y[static_cast<size_t>(i)] = data.x[static_cast<size_t>(i)];
    }
  }
  s.w.assign(static_cast<size_t>(n),
             std::vector<uint8_t>(static_cast<size_t>(data.L), 0));
  s.beta = beta0;
  if (static_cast<int>(s.beta.size()) != data.L)
    throw std::invalid_argument("init_state: beta length mismatch");
  return s;
}

void gibbs_update_z(MCMCState& s, const ERDataset& data,
                    const PartitionPrior& prior, const SamplerWorkspace& ws,
                    int i) {
  detach_record(s, i);
  const int k = s.kplus();
  auto& lw = const_cast<SamplerWorkspace&>(ws).scratch;
  lw.assign(static_cast<size_t>(k) + 1, kNegInf);
  for (int j = 0; j < k; ++j) {
    const double lf = prior.log_existing_weight(s.cluster_sizes[static_cast<size_t>(j)]);
    if (lf == kNegInf) continue;
    lw[static_cast<size_t>(j)] = lf + record_loglik(data, ws, i, s.y[static_cast<size_t>(j)]);
  }
  lw[static_cast<size_t>(k)] =
      prior.log_new_weight(k, data.n) + ws.log_base[static_cast<size_t>(i)];
  const int pick = s.rng.categorical_log(lw);
  if (pick == k) {
    s.cluster_sizes.push_back(0);
    s.members.emplace_back();
    s.y.push_back(draw_singleton_entity(s, data, ws, i));
  }
  attach_record(s, i, pick);
  resample_w_row(s, data, ws, i);
}

namespace {

// Restricted reassignment of r between exactly the two clusters `ca`, `cb`
// (its current cluster is one of them; both contain a chaperone, so neither
// can empty).
void reassign_restricted(MCMCState& s, const ERDataset& data,
                         const PartitionPrior& prior,
                         const SamplerWorkspace& ws, int r, int ca, int cb) {
  const int c_old = s.z[static_cast<size_t>(r)];
  // Detach without deletion (guaranteed nonempty by the chaperone).
  {
    auto& mem = s.members[static_cast<size_t>(c_old)];
    auto it = std::find(mem.begin(), mem.end(), r);
    *it = mem.back();
    mem.pop_back();
    --s.cluster_sizes[static_cast<size_t>(c_old)];
  }
  double lwa = prior.log_existing_weight(s.cluster_sizes[static_cast<size_t>(ca)]);
  double lwb = prior.log_existing_weight(s.cluster_sizes[static_cast<size_t>(cb)]);
  if (lwa != kNegInf)
    lwa += record_loglik(data, ws, r, s.y[static_cast<size_t>(ca)]);
  if (lwb != kNegInf)
    lwb += record_loglik(data, ws, r, s.y[static_cast<size_t>(cb)]);
  const double pair[2] = {lwa, lwb};
  const int pick = s.rng.categorical_log(pair);
  attach_record(s, r, pick == 0 ? ca : cb);
  resample_w_row(s, data, ws, r);
}

}  // namespace

std::vector<double> agreement_pair_weights(const ERDataset& data) {
  const int n = data.n;
  std::vector<double> cum;
  cum.reserve(static_cast<size_t>(n) * (n - 1) / 2);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      int agree = 0;
      for (int l = 0; l < data.L; ++l)
        agree += data.x[static_cast<size_t>(i)][static_cast<size_t>(l)] ==
                 data.x[static_cast<size_t>(j)][static_cast<size_t>(l)];
      acc += agree + 1;
      cum.push_back(acc);
    }
  }
  return cum;
}

void chaperones_move(MCMCState& s, const ERDataset& data,
                     const PartitionPrior& prior, const SamplerWorkspace& ws,
                     const std::vector<double>* pair_weights) {
  const int n = data.n;
  if (n < 2) return;
  int a, b;
  if (pair_weights) {
    const double u = s.rng.uniform() * pair_weights->back();
    const size_t idx = static_cast<size_t>(
        std::lower_bound(pair_weights->begin(), pair_weights->end(), u) -
        pair_weights->begin());
    // Invert the flat (i, j) pair index.
    size_t rem = idx;
    a = 0;
    size_t row = static_cast<size_t>(n - 1);
    while (rem >= row) {
      rem -= row;
      ++a;
      --row;
    }
    b = a + 1 + static_cast<int>(rem);
  } else {
    a = static_cast<int>(s.rng.next_u64() % static_cast<uint64_t>(n));
    b = static_cast<int>(s.rng.next_u64() % static_cast<uint64_t>(n - 1));
    if (b >= a) ++b;
  }

  gibbs_update_z(s, data, prior, ws, a);
  gibbs_update_z(s, data, prior, ws, b);
  const int ca = s.z[static_cast<size_t>(a)];
  const int cb = s.z[static_cast<size_t>(b)];
  if (ca == cb) return;  // single candidate block, nothing to move
  for (int r = 0; r < n; ++r) {
    if (r == a || r == b) continue;
    const int c = s.z[static_cast<size_t>(r)];
    if (c == ca || c == cb)
      reassign_restricted(s, data, prior, ws, r, ca, cb);
  }
}

void update_y_w(MCMCState& s, const ERDataset& data,
                const SamplerWorkspace& ws) {
  const int L = data.L;
  std::vector<double> lw;
  for (int c = 0; c < s.kplus(); ++c) {
    const auto& mem = s.members[static_cast<size_t>(c)];
    for (int l = 0; l < L; ++l) {
      const double b = s.beta[static_cast<size_t>(l)];
      const auto& th = ws.theta[static_cast<size_t>(l)];
      if (b == 0.0) {
        // Undistorted field: the entity must equal every member entry.
        const int v =
            data.x[static_cast<size_t>(mem.front())][static_cast<size_t>(l)];
        for (int i : mem)
          if (data.x[static_cast<size_t>(i)][static_cast<size_t>(l)] != v)
            throw std::logic_error(
                "update_y_w: members disagree on a zero-distortion field");
        s.y[static_cast<size_t>(c)][static_cast<size_t>(l)] = v;
        continue;
      }
      lw.resize(th.size());
      for (size_t v = 0; v < th.size(); ++v)
        lw[v] = th[v] > 0.0 ? std::log(th[v]) : kNegInf;
      for (int i : mem) {
        const size_t base = static_cast<size_t>(i) * L;
        const int x = data.x[static_cast<size_t>(i)][static_cast<size_t>(l)];
        lw[static_cast<size_t>(x)] +=
            ws.log_match[base + static_cast<size_t>(l)] -
            ws.log_mismatch[base + static_cast<size_t>(l)];
      }
      s.y[static_cast<size_t>(c)][static_cast<size_t>(l)] =
          s.rng.categorical_log(lw);
    }
  }
  for (int i = 0; i < data.n; ++i) resample_w_row(s, data, ws, i);
}

void update_beta(MCMCState& s, const ERDataset& data, double a, double b) {
  for (int l = 0; l < data.L; ++l) {
    int distorted = 0;
    for (int i = 0; i < data.n; ++i)
      distorted += s.w[static_cast<size_t>(i)][static_cast<size_t>(l)];
    const double draw =
        s.rng.beta(a + distorted, b + data.n - distorted);
    s.beta[static_cast<size_t>(l)] = std::min(1.0 - 1e-12, std::max(1e-12, draw));
  }
}

ERResult run_mcmc(const ERDataset& data, PartitionPrior& prior,
                  const MCMCConfig& config) {
  config.validate();
  data.validate();

  std::vector<double> beta0 = config.beta_init;
  if (beta0.empty())
    beta0.assign(static_cast<size_t>(data.L),
                 config.beta_a / (config.beta_a + config.beta_b));
  if (static_cast<int>(beta0.size()) != data.L)
    throw ConfigError("mcmc: beta_init length must equal L");

  SamplerWorkspace ws;
  ws.init(data);
  MCMCState s = init_state(data, beta0, config.seed, config.init,
                           prior.max_cluster_size());

  ERResult out;
  out.n = data.n;
  out.L = data.L;
  out.config = config;
  out.theta_mu_names = prior.parameter_names();

  std::vector<double> pair_cum;
  const std::vector<double>* pair_weights = nullptr;
  if (config.use_chaperones && config.chaperones_agreement_weighted) {
    pair_cum = agreement_pair_weights(data);
    pair_weights = &pair_cum;
  }

  const int moves =
      config.chaperone_moves_per_iter > 0 ? config.chaperone_moves_per_iter
                                          : data.n;

  for (int t = 1; t <= config.iterations; ++t) {
    ws.refresh_beta(data, s.beta);
    if (config.use_chaperones) {
      for (int m = 0; m < moves; ++m)
        chaperones_move(s, data, prior, ws, pair_weights);
    } else {
      for (int i = 0; i < data.n; ++i) gibbs_update_z(s, data, prior, ws, i);
    }
    if (prior.has_parameters()) prior.update_parameters(s.cluster_sizes, s.rng);
    update_y_w(s, data, ws);
    if (config.update_beta) update_beta(s, data, config.beta_a, config.beta_b);

#ifndef NDEBUG
    s.validate(data, prior);
#endif

    if (t > config.burn_in && (t - config.burn_in) % config.thin == 0) {
      out.kplus.push_back(s.kplus());
      const int max_size =
          *std::max_element(s.cluster_sizes.begin(), s.cluster_sizes.end());
      std::vector<int> hist(static_cast<size_t>(max_size), 0);
      for (int sz : s.cluster_sizes) ++hist[static_cast<size_t>(sz - 1)];
      out.m_hist.push_back(std::move(hist));
      out.beta_samples.push_back(s.beta);
      if (prior.has_parameters())
        out.theta_mu_samples.push_back(prior.parameters());
      if (config.store_z) {
        std::vector<int> labels = s.z;
        canonicalize_labels(labels);
        out.z_samples.push_back(std::move(labels));
      }
    }
  }
  return out;
}

double ERResult::kplus_mean() const {
  if (kplus.empty()) return 0.0;
  double acc = 0.0;
  for (int k : kplus) acc += k;
  return acc / static_cast<double>(kplus.size());
}

double ERResult::kplus_sd() const {
  if (kplus.size() < 2) return 0.0;
  const double m = kplus_mean();
  double acc = 0.0;
  for (int k : kplus) acc += (k - m) * (k - m);
  return std::sqrt(acc / static_cast<double>(kplus.size() - 1));
}

}  // namespace pbal::er
