// pbal -- partition balancedness toolkit CLI.
//
// Subcommands: spectrum, bseq, classify, compare-lc, projectivity,
// er simulate|fit|eval. Exit codes: 0 success, 2 configuration error,
// 3 numerical-precision error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "pbal/balance.hpp"
#include "pbal/er_data.hpp"
#include "pbal/er_metrics.hpp"
#include "pbal/er_prior.hpp"
#include "pbal/er_sampler.hpp"
#include "pbal/esc.hpp"
#include "pbal/gibbs.hpp"
#include "pbal/io.hpp"
#include "pbal/mathutil.hpp"
#include "pbal/model_spec.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Config-file merging: a JSON object whose keys are the long option names.
// Unknown keys are rejected; command-line flags win over file values.

class ConfigFile {
 public:
  void load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw pbal::ConfigError("cannot open config file " + path);
    try {
      in >> data_;
    } catch (const std::exception& e) {
      throw pbal::ConfigError(std::string("config file parse error: ") + e.what());
    }
    if (!data_.is_object())
      throw pbal::ConfigError("config file must hold a JSON object");
  }

  void reject_unknown(const std::vector<std::string>& allowed) const {
    for (const auto& [key, value] : data_.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        throw pbal::ConfigError("unknown config key '" + key + "'");
    }
  }

  template <class T>
  void fill(const CLI::Option* opt, const std::string& key, T& target) const {
    if (opt->count() > 0) return;  // flag given on the command line wins
    if (!data_.contains(key)) return;
    try {
      target = data_.at(key).get<T>();
    } catch (const std::exception&) {
      throw pbal::ConfigError("config key '" + key + "' has the wrong type");
    }
  }

  bool has(const std::string& key) const { return data_.contains(key); }

 private:
  json data_ = json::object();
};

uint64_t resolve_seed(uint64_t seed_flag) {
  if (const char* env = std::getenv("PB_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw pbal::ConfigError("PB_SEED must be an unsigned integer");
    }
  }
  return seed_flag;
}

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const json& config, const std::vector<std::string>& outputs) {
  json manifest;
  manifest["command"] = command;
  manifest["version"] = kVersion;
  manifest["config"] = config;
  manifest["outputs"] = outputs;
  std::ofstream out(out_dir / "manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest.json");
  out << manifest.dump(2) << '\n';
}

fs::path prepare_out_dir(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

json balance_class_json(const pbal::BalanceClass& cls) {
  json j;
  j["class"] = pbal::to_string(cls.kind);
  j["verified_up_to"] = cls.verified_up_to;
  if (cls.averse_violation) j["averse_violation_s"] = *cls.averse_violation;
  if (cls.seeking_violation) j["seeking_violation_s"] = *cls.seeking_violation;
  return j;
}

// Shared model flags for the single-model commands.
struct ModelOptions {
  pbal::ModelFlags flags;
  CLI::Option *o_model, *o_theta, *o_sigma, *o_K, *o_gamma, *o_q, *o_mu;
  double theta = 0, sigma = 0, gamma = 0;
  int K = 0;

  void attach(CLI::App* cmd) {
    o_model = cmd->add_option("--model", flags.model,
                              "model family: crp|pyp|dirmult|coupon|neutral|mfm|esc");
    o_theta = cmd->add_option("--theta", theta, "concentration parameter");
    o_sigma = cmd->add_option("--sigma", sigma, "discount parameter");
    o_K = cmd->add_option("--K", K, "number of components");
    o_gamma = cmd->add_option("--gamma", gamma, "Dirichlet weight parameter");
    o_q = cmd->add_option("--q", flags.q,
                          "component-count spec, e.g. shifted-poisson:3");
    o_mu = cmd->add_option("--mu", flags.mu,
                           "cluster-size spec, e.g. ztpois:2 or ztbinom:5,0.3");
  }

  void merge(const ConfigFile& cfg) {
    cfg.fill(o_model, "model", flags.model);
    cfg.fill(o_theta, "theta", theta);
    cfg.fill(o_sigma, "sigma", sigma);
    cfg.fill(o_K, "K", K);
    cfg.fill(o_gamma, "gamma", gamma);
    cfg.fill(o_q, "q", flags.q);
    cfg.fill(o_mu, "mu", flags.mu);
    if (o_theta->count() || cfg.has("theta")) flags.theta = theta;
    if (o_sigma->count() || cfg.has("sigma")) flags.sigma = sigma;
    if (o_K->count() || cfg.has("K")) flags.K = K;
    if (o_gamma->count() || cfg.has("gamma")) flags.gamma = gamma;
    if (flags.model.empty())
      throw pbal::ConfigError("--model is required");
  }

  static std::vector<std::string> keys() {
    return {"model", "theta", "sigma", "K", "gamma", "q", "mu"};
  }

  json echo() const {
    json j;
    j["model"] = flags.model;
    if (flags.theta) j["theta"] = *flags.theta;
    if (flags.sigma) j["sigma"] = *flags.sigma;
    if (flags.K) j["K"] = *flags.K;
    if (flags.gamma) j["gamma"] = *flags.gamma;
    if (!flags.q.empty()) j["q"] = flags.q;
    if (!flags.mu.empty()) j["mu"] = flags.mu;
    j["spec"] = flags.compact();
    return j;
  }
};

// ---------------------------------------------------------------------------
// spectrum / bseq / classify / compare-lc / projectivity

int cmd_spectrum(const ModelOptions& mo, int n, const std::string& out) {
  if (n < 1 || n > pbal::kMaxSpectrumN)
    throw pbal::ConfigError("spectrum: --n must be in [1, 13]");
  const pbal::GibbsModel model = mo.flags.build();
  const auto rows = pbal::eppf_spectrum(model, n);
  const fs::path dir = prepare_out_dir(out);
  pbal::write_spectrum_csv(rows, (dir / "spectrum.csv").string());
  json config = mo.echo();
  config["n"] = n;
  config["out"] = out;
  write_manifest(dir, "spectrum", config, {"spectrum.csv"});
  std::cout << "spectrum: " << rows.size() << " shapes -> "
            << (dir / "spectrum.csv").string() << '\n';
  return 0;
}

int cmd_bseq(const ModelOptions& mo, int s_max, const std::string& out) {
  if (s_max < 3) throw pbal::ConfigError("bseq: --smax must be >= 3");
  const pbal::GibbsModel model = mo.flags.build();
  const pbal::WSequence& w = model.w();
  const int hi = w.finite_support() ? std::min(s_max, w.support_max()) : s_max;
  std::vector<std::pair<int, double>> rows;
  for (int s = 2; s <= hi; ++s) rows.emplace_back(s, pbal::b_sequence(w, s));
  const pbal::BalanceClass cls =
      pbal::classify_balance(w, std::max(3, hi + 1));
  const fs::path dir = prepare_out_dir(out);
  pbal::write_bseq_csv(rows, cls, (dir / "bseq.csv").string());
  json config = mo.echo();
  config["smax"] = s_max;
  config["out"] = out;
  write_manifest(dir, "bseq", config, {"bseq.csv"});
  std::cout << "bseq: class=" << pbal::to_string(cls.kind) << " rows="
            << rows.size() << " -> " << (dir / "bseq.csv").string() << '\n';
  return 0;
}

int cmd_classify(const ModelOptions& mo, int s_max, const std::string& out) {
  if (s_max < 3) throw pbal::ConfigError("classify: --smax must be >= 3");
  const pbal::GibbsModel model = mo.flags.build();
  const pbal::BalanceClass cls = pbal::classify_balance(model.w(), s_max);
  json result = balance_class_json(cls);
  result["model"] = model.label();
  std::cout << result.dump(2) << '\n';
  if (!out.empty()) {
    const fs::path dir = prepare_out_dir(out);
    std::ofstream f(dir / "classification.json");
    f << result.dump(2) << '\n';
    json config = mo.echo();
    config["smax"] = s_max;
    config["out"] = out;
    write_manifest(dir, "classify", config, {"classification.json"});
  }
  return 0;
}

int cmd_compare_lc(const std::string& left, const std::string& right,
                   int s_max, const std::string& out) {
  if (s_max < 2) throw pbal::ConfigError("compare-lc: --smax must be >= 2");
  const pbal::GibbsModel ml = pbal::parse_model(left);
  const pbal::GibbsModel mr = pbal::parse_model(right);
  const pbal::Order ord = pbal::lc_compare(ml.w(), mr.w(), s_max);
  json result;
  result["left"] = ml.label();
  result["right"] = mr.label();
  result["order"] = pbal::to_string(ord);
  result["meaning"] = "LESS means the left sequence is log-concave relative "
                      "to the right one (left is the more balanced model)";
  std::cout << result.dump(2) << '\n';
  if (!out.empty()) {
    const fs::path dir = prepare_out_dir(out);
    std::ofstream f(dir / "compare_lc.json");
    f << result.dump(2) << '\n';
    json config = {{"left", left}, {"right", right}, {"smax", s_max}, {"out", out}};
    write_manifest(dir, "compare-lc", config, {"compare_lc.json"});
  }
  return 0;
}

int cmd_projectivity(const ModelOptions& mo, int n_max, double tol,
                     const std::string& out) {
  if (n_max < 1 || n_max > 12)
    throw pbal::ConfigError("projectivity: --nmax must be in [1, 12]");
  if (!(tol > 0)) throw pbal::ConfigError("projectivity: --tol must be > 0");
  const pbal::GibbsModel model = mo.flags.build();
  const pbal::ProjectivityReport report =
      pbal::check_projectivity(model, n_max, tol);
  json result;
  result["model"] = model.label();
  result["projective"] = report.ok;
  result["worst_rel_err"] = report.worst_rel_err;
  if (report.first_failure)
    result["first_failure"] = report.first_failure->to_string();
  std::cout << result.dump(2) << '\n';
  if (!out.empty()) {
    const fs::path dir = prepare_out_dir(out);
    std::ofstream f(dir / "projectivity.json");
    f << result.dump(2) << '\n';
    json config = mo.echo();
    config["nmax"] = n_max;
    config["tol"] = tol;
    config["out"] = out;
    write_manifest(dir, "projectivity", config, {"projectivity.json"});
  }
  return 0;
}

// ---------------------------------------------------------------------------
// er simulate / fit / eval

int cmd_er_simulate(int scenario, const std::string& mu_spec, int L, int D,
                    double beta, uint64_t seed, const std::string& out) {
  if (L < 1) throw pbal::ConfigError("er simulate: --L must be >= 1");
  if (D < 2) throw pbal::ConfigError("er simulate: --D must be >= 2");
  if (beta < 0.0 || beta >= 1.0)
    throw pbal::ConfigError("er simulate: --beta must be in [0, 1)");
  if ((scenario == 0) == mu_spec.empty())
    throw pbal::ConfigError(
        "er simulate: give exactly one of --scenario or --mu");
  pbal::er::SyntheticScenario sc =
      scenario ? pbal::er::SyntheticScenario::builtin(scenario)
               : pbal::er::SyntheticScenario::from_mu_times_100(
                     pbal::parse_mu(mu_spec));
  const pbal::er::ERDataset data =
      pbal::er::generate_synthetic(sc, L, D, beta, seed);
  const fs::path dir = prepare_out_dir(out);
  pbal::er::write_dataset_csv(data, (dir / "dataset.csv").string());
  json config;
  if (scenario) config["scenario"] = scenario;
  if (!mu_spec.empty()) config["mu"] = mu_spec;
  config["L"] = L;
  config["D"] = D;
  config["beta"] = beta;
  config["seed"] = seed;
  config["out"] = out;
  write_manifest(dir, "er simulate", config, {"dataset.csv"});
  std::cout << "simulate: n=" << data.n << " K=" << sc.total_clusters()
            << " -> " << (dir / "dataset.csv").string() << '\n';
  return 0;
}


std::vector<double> prior_params_of(const pbal::MuFamily& mu) {
  std::vector<double> v;
  switch (mu.kind()) {
    case pbal::MuFamilyKind::ShiftedBinomial:
    case pbal::MuFamilyKind::ZtBinomial:
      v = {mu.params().at("N"), mu.params().at("p")};
      break;
    case pbal::MuFamilyKind::ZtPoisson:
      v = {mu.params().at("lambda")};
      break;
    case pbal::MuFamilyKind::ZtNegBinomial:
      v = {mu.params().at("r"), mu.params().at("p")};
      break;
    case pbal::MuFamilyKind::Logarithmic:
      v = {mu.params().at("p")};
      break;
  }
  return v;
}

double mean_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

double quantile_of(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const size_t lo = static_cast<size_t>(pos);
  const size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

void write_trace_csv(const pbal::er::ERResult& r, const pbal::er::MCMCConfig& cfg,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "iter,Kplus";
  for (int l = 1; l <= r.L; ++l) out << ",beta_" << l;
  for (const auto& name : r.theta_mu_names) out << ",theta_mu_" << name;
  out << '\n';
  for (size_t s = 0; s < r.kplus.size(); ++s) {
    const long long iter = cfg.burn_in + static_cast<long long>(s + 1) * cfg.thin;
    out << iter << ',' << r.kplus[s];
    for (double b : r.beta_samples[s]) out << ',' << pbal::format_real(b);
    if (!r.theta_mu_samples.empty())
      for (double t : r.theta_mu_samples[s]) out << ',' << pbal::format_real(t);
    out << '\n';
  }
}

// A fresh prior per chain: a size-distribution spec yields an ESC prior with
// sampled theta_mu; any other model spec yields that fixed Gibbs-form prior.
std::unique_ptr<pbal::er::PartitionPrior> make_prior(
    const std::string& prior_spec, bool fix_prior) {
  try {
    const pbal::MuFamily mu = pbal::parse_mu(prior_spec);
    return std::make_unique<pbal::er::EscPartitionPrior>(
        mu.kind(), prior_params_of(mu), !fix_prior);
  } catch (const pbal::ConfigError&) {
  }
  return std::make_unique<pbal::er::GibbsPartitionPrior>(
      pbal::parse_model(prior_spec));
}

int cmd_er_fit(const std::string& data_path, const std::string& prior_spec,
               int iterations, int burn_in, int thin, uint64_t seed,
               int chains, bool chaperones, bool chaperones_weighted,
               bool fix_prior, const std::string& out) {
  if (chains < 1) throw pbal::ConfigError("er fit: --chains must be >= 1");
  const pbal::er::ERDataset data = pbal::er::read_dataset_csv(data_path);
  make_prior(prior_spec, fix_prior);  // validate the spec before spawning

  pbal::er::MCMCConfig cfg;
  cfg.iterations = iterations;
  cfg.burn_in = burn_in;
  cfg.thin = thin;
  cfg.seed = seed;
  cfg.use_chaperones = chaperones;
  cfg.chaperones_agreement_weighted = chaperones_weighted;
  cfg.validate();

  // One chain per thread, each with its own prior instance and derived seed.
  std::vector<pbal::er::ERResult> results(static_cast<size_t>(chains));
  std::vector<std::string> errors(static_cast<size_t>(chains));
  {
    std::vector<std::thread> threads;
    for (int c = 0; c < chains; ++c) {
      threads.emplace_back([&, c]() {
        try {
          auto prior = make_prior(prior_spec, fix_prior);
          pbal::er::MCMCConfig chain_cfg = cfg;
          chain_cfg.seed = chains == 1
                               ? cfg.seed
                               : pbal::Rng::derive_seed(cfg.seed,
                                                        static_cast<uint64_t>(c));
          results[static_cast<size_t>(c)] =
              run_mcmc(data, *prior, chain_cfg);
        } catch (const std::exception& e) {
          errors[static_cast<size_t>(c)] = e.what();
        }
      });
    }
    for (auto& t : threads) t.join();
  }
  for (const auto& err : errors)
    if (!err.empty()) throw std::runtime_error("er fit chain failed: " + err);

  const fs::path dir = prepare_out_dir(out);
  std::vector<std::string> outputs;

  // Traces.
  for (int c = 0; c < chains; ++c) {
    const std::string name =
        chains == 1 ? "trace.csv" : "trace_chain" + std::to_string(c) + ".csv";
    write_trace_csv(results[static_cast<size_t>(c)], cfg, (dir / name).string());
    outputs.push_back(name);
  }

  // Pooled summaries.
  std::vector<double> kplus_all;
  std::vector<std::vector<int>> z_all;
  std::vector<std::vector<double>> beta_all;
  std::vector<std::vector<double>> theta_all;
  size_t max_size = 0;
  for (const auto& r : results) {
    for (int k : r.kplus) kplus_all.push_back(k);
    for (const auto& z : r.z_samples) z_all.push_back(z);
    for (const auto& b : r.beta_samples) beta_all.push_back(b);
    for (const auto& t : r.theta_mu_samples) theta_all.push_back(t);
    for (const auto& h : r.m_hist) max_size = std::max(max_size, h.size());
  }

  json summary;
  summary["n"] = data.n;
  summary["L"] = data.L;
  summary["samples"] = kplus_all.size();
  summary["Kplus"] = {{"mean", mean_of(kplus_all)}, {"sd", sd_of(kplus_all)}};

  // Cluster-size counts m_s: posterior quantiles per size.
  json msizes = json::object();
  for (size_t s = 0; s < max_size; ++s) {
    std::vector<double> counts;
    for (const auto& r : results)
      for (const auto& h : r.m_hist)
        counts.push_back(s < h.size() ? h[s] : 0);
    msizes[std::to_string(s + 1)] = {{"mean", mean_of(counts)},
                                     {"q025", quantile_of(counts, 0.025)},
                                     {"q50", quantile_of(counts, 0.5)},
                                     {"q975", quantile_of(counts, 0.975)}};
  }
  summary["m"] = msizes;

  json beta_summary = json::array();
  for (int l = 0; l < data.L; ++l) {
    std::vector<double> bl;
    for (const auto& b : beta_all) bl.push_back(b[static_cast<size_t>(l)]);
    beta_summary.push_back({{"mean", mean_of(bl)}, {"sd", sd_of(bl)}});
  }
  summary["beta"] = beta_summary;

  if (!theta_all.empty()) {
    json tj = json::object();
    const auto names = results.front().theta_mu_names;
    for (size_t p = 0; p < names.size(); ++p) {
      std::vector<double> tp;
      for (const auto& t : theta_all) tp.push_back(t[p]);
      tj[names[p]] = {{"mean", mean_of(tp)}, {"sd", sd_of(tp)}};
    }
    summary["theta_mu"] = tj;
  }

  // Point estimate and metrics against the truth, when present.
  if (!z_all.empty()) {
    const pbal::SetPartition point = pbal::er::dahl_point_estimate(z_all);
    pbal::write_labels_csv(point, (dir / "point_estimate.csv").string());
    outputs.push_back("point_estimate.csv");
    summary["point_estimate_Kplus"] = point.k();
    if (data.truth) {
      const pbal::er::PairCounts pc = pbal::er::fnr_fdr(*data.truth, point);
      summary["fnr"] = pc.fnr;
      summary["fdr"] = pc.fdr;
      summary["pairs"] = {{"correct", pc.correct},
                          {"missed", pc.missed},
                          {"wrong", pc.wrong}};
    }
  }

  {
    std::ofstream f(dir / "summary.json");
    f << summary.dump(2) << '\n';
    outputs.push_back("summary.json");
  }

  json config;
  config["data"] = data_path;
  config["prior"] = prior_spec;
  config["iterations"] = iterations;
  config["burn-in"] = burn_in;
  config["thin"] = thin;
  config["seed"] = seed;
  config["chains"] = chains;
  config["chaperones"] = chaperones;
  config["chaperones-weighted"] = chaperones_weighted;
  config["fix-prior"] = fix_prior;
  config["out"] = out;
  write_manifest(dir, "er fit", config, outputs);

  std::cout << "fit: Kplus mean=" << mean_of(kplus_all)
            << " sd=" << sd_of(kplus_all);
  if (summary.contains("fnr"))
    std::cout << " fnr=" << summary["fnr"].get<double>()
              << " fdr=" << summary["fdr"].get<double>();
  std::cout << " -> " << (dir / "summary.json").string() << '\n';
  return 0;
}

int cmd_er_eval(const std::string& truth_path, const std::string& estimate_path,
                const std::string& out) {
  const pbal::er::ERDataset data = pbal::er::read_dataset_csv(truth_path);
  if (!data.truth)
    throw pbal::ConfigError("er eval: dataset has no truth column");
  const pbal::SetPartition estimate = pbal::read_labels_csv(estimate_path);
  if (estimate.n() != data.n)
    throw pbal::ConfigError("er eval: estimate size differs from dataset");
  const pbal::er::PairCounts pc = pbal::er::fnr_fdr(*data.truth, estimate);
  json report;
  report["fnr"] = pc.fnr;
  report["fdr"] = pc.fdr;
  report["correct_pairs"] = pc.correct;
  report["missed_pairs"] = pc.missed;
  report["wrong_pairs"] = pc.wrong;
  report["truth_Kplus"] = data.truth->k();
  report["estimate_Kplus"] = estimate.k();
  std::cout << report.dump(2) << '\n';
  if (!out.empty()) {
    const fs::path dir = prepare_out_dir(out);
    std::ofstream f(dir / "report.json");
    f << report.dump(2) << '\n';
    json config = {{"truth", truth_path}, {"estimate", estimate_path}, {"out", out}};
    write_manifest(dir, "er eval", config, {"report.json"});
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"partition balancedness toolkit"};
  app.require_subcommand(1);

  std::string config_path;

  // --- spectrum
  auto* sp = app.add_subcommand("spectrum", "log-EPPF table over all shapes of n");
  ModelOptions sp_mo;
  sp_mo.attach(sp);
  int sp_n = 10;
  std::string sp_out = ".";
  auto* sp_n_opt = sp->add_option("--n", sp_n, "number of items (<= 13)");
  auto* sp_out_opt = sp->add_option("--out", sp_out, "output directory");
  auto* sp_cfg = sp->add_option("--config", config_path, "JSON config file");

  // --- bseq
  auto* bs = app.add_subcommand("bseq", "B-sequence export");
  ModelOptions bs_mo;
  bs_mo.attach(bs);
  int bs_smax = 50;
  std::string bs_out = ".";
  auto* bs_smax_opt = bs->add_option("--smax", bs_smax, "largest s to export");
  auto* bs_out_opt = bs->add_option("--out", bs_out, "output directory");
  auto* bs_cfg = bs->add_option("--config", config_path, "JSON config file");

  // --- classify
  auto* cl = app.add_subcommand("classify", "balancedness classification");
  ModelOptions cl_mo;
  cl_mo.attach(cl);
  int cl_smax = 200;
  std::string cl_out;
  auto* cl_smax_opt = cl->add_option("--smax", cl_smax, "verification horizon");
  auto* cl_out_opt = cl->add_option("--out", cl_out, "optional output directory");
  auto* cl_cfg = cl->add_option("--config", config_path, "JSON config file");

  // --- compare-lc
  auto* lc = app.add_subcommand("compare-lc",
                                "relative log-concavity comparison of two models");
  std::string lc_left, lc_right, lc_out;
  int lc_smax = 50;
  auto* lc_left_opt = lc->add_option("--left", lc_left, "compact model spec");
  auto* lc_right_opt = lc->add_option("--right", lc_right, "compact model spec");
  auto* lc_smax_opt = lc->add_option("--smax", lc_smax, "comparison horizon");
  auto* lc_out_opt = lc->add_option("--out", lc_out, "optional output directory");
  auto* lc_cfg = lc->add_option("--config", config_path, "JSON config file");

  // --- projectivity
  auto* pj = app.add_subcommand("projectivity", "addition-rule check");
  ModelOptions pj_mo;
  pj_mo.attach(pj);
  int pj_nmax = 8;
  double pj_tol = 1e-10;
  std::string pj_out;
  auto* pj_nmax_opt = pj->add_option("--nmax", pj_nmax, "largest n checked");
  auto* pj_tol_opt = pj->add_option("--tol", pj_tol, "relative tolerance");
  auto* pj_out_opt = pj->add_option("--out", pj_out, "optional output directory");
  auto* pj_cfg = pj->add_option("--config", config_path, "JSON config file");

  // --- er
  auto* er = app.add_subcommand("er", "entity-resolution pipeline");
  er->require_subcommand(1);

  auto* sim = er->add_subcommand("simulate", "synthetic dataset generator");
  int sim_scenario = 0, sim_L = 5, sim_D = 10;
  double sim_beta = 0.01;
  uint64_t sim_seed = 1;
  std::string sim_mu, sim_out = ".";
  auto* sim_sc_opt = sim->add_option("--scenario", sim_scenario,
                                     "built-in size profile 1..3");
  auto* sim_mu_opt = sim->add_option("--mu", sim_mu,
                                     "size distribution (counts = round(100 mu_s))");
  auto* sim_L_opt = sim->add_option("--L", sim_L, "number of fields");
  auto* sim_D_opt = sim->add_option("--D", sim_D, "categories per field");
  auto* sim_beta_opt = sim->add_option("--beta", sim_beta, "distortion probability");
  auto* sim_seed_opt = sim->add_option("--seed", sim_seed, "master seed");
  auto* sim_out_opt = sim->add_option("--out", sim_out, "output directory");
  auto* sim_cfg = sim->add_option("--config", config_path, "JSON config file");

  auto* fit = er->add_subcommand("fit", "MCMC posterior inference");
  std::string fit_data, fit_prior, fit_out = ".";
  int fit_iterations = 6000, fit_burnin = 2000, fit_thin = 1, fit_chains = 1;
  uint64_t fit_seed = 1;
  bool fit_chaperones = false, fit_chap_weighted = false, fit_fix_prior = false;
  auto* fit_data_opt = fit->add_option("--data", fit_data, "dataset CSV path");
  auto* fit_prior_opt = fit->add_option("--prior", fit_prior,
                                        "size-distribution prior spec (initial theta_mu)");
  auto* fit_iter_opt = fit->add_option("--iterations", fit_iterations, "MCMC iterations");
  auto* fit_burn_opt = fit->add_option("--burn-in", fit_burnin, "burn-in iterations");
  auto* fit_thin_opt = fit->add_option("--thin", fit_thin, "thinning stride");
  auto* fit_seed_opt = fit->add_option("--seed", fit_seed, "master seed");
  auto* fit_chains_opt = fit->add_option("--chains", fit_chains, "parallel chains");
  auto* fit_chap_opt = fit->add_flag("--chaperones", fit_chaperones,
                                     "use chaperone moves for the partition update");
  auto* fit_chapw_opt = fit->add_flag("--chaperones-weighted", fit_chap_weighted,
                                      "field-agreement-weighted pair proposal");
  auto* fit_fix_opt = fit->add_flag("--fix-prior", fit_fix_prior,
                                    "keep theta_mu fixed at its initial value");
  auto* fit_out_opt = fit->add_option("--out", fit_out, "output directory");
  auto* fit_cfg = fit->add_option("--config", config_path, "JSON config file");

  auto* ev = er->add_subcommand("eval", "FNR/FDR report");
  std::string ev_truth, ev_estimate, ev_out;
  auto* ev_truth_opt = ev->add_option("--truth", ev_truth,
                                      "dataset CSV with a truth column");
  auto* ev_est_opt = ev->add_option("--estimate", ev_estimate,
                                    "point-estimate labels CSV");
  auto* ev_out_opt = ev->add_option("--out", ev_out, "optional output directory");
  auto* ev_cfg = ev->add_option("--config", config_path, "JSON config file");

  try {
    app.parse(argc, argv);

    ConfigFile cfg;

    if (sp->parsed()) {
      if (sp_cfg->count()) cfg.load(config_path);
      auto keys = ModelOptions::keys();
      keys.insert(keys.end(), {"n", "out"});
      cfg.reject_unknown(keys);
      sp_mo.merge(cfg);
      cfg.fill(sp_n_opt, "n", sp_n);
      cfg.fill(sp_out_opt, "out", sp_out);
      return cmd_spectrum(sp_mo, sp_n, sp_out);
    }
    if (bs->parsed()) {
      if (bs_cfg->count()) cfg.load(config_path);
      auto keys = ModelOptions::keys();
      keys.insert(keys.end(), {"smax", "out"});
      cfg.reject_unknown(keys);
      bs_mo.merge(cfg);
      cfg.fill(bs_smax_opt, "smax", bs_smax);
      cfg.fill(bs_out_opt, "out", bs_out);
      return cmd_bseq(bs_mo, bs_smax, bs_out);
    }
    if (cl->parsed()) {
      if (cl_cfg->count()) cfg.load(config_path);
      auto keys = ModelOptions::keys();
      keys.insert(keys.end(), {"smax", "out"});
      cfg.reject_unknown(keys);
      cl_mo.merge(cfg);
      cfg.fill(cl_smax_opt, "smax", cl_smax);
      cfg.fill(cl_out_opt, "out", cl_out);
      return cmd_classify(cl_mo, cl_smax, cl_out);
    }
    if (lc->parsed()) {
      if (lc_cfg->count()) cfg.load(config_path);
      cfg.reject_unknown({"left", "right", "smax", "out"});
      cfg.fill(lc_left_opt, "left", lc_left);
      cfg.fill(lc_right_opt, "right", lc_right);
      cfg.fill(lc_smax_opt, "smax", lc_smax);
      cfg.fill(lc_out_opt, "out", lc_out);
      if (lc_left.empty() || lc_right.empty())
        throw pbal::ConfigError("compare-lc: --left and --right are required");
      return cmd_compare_lc(lc_left, lc_right, lc_smax, lc_out);
    }
    if (pj->parsed()) {
      if (pj_cfg->count()) cfg.load(config_path);
      auto keys = ModelOptions::keys();
      keys.insert(keys.end(), {"nmax", "tol", "out"});
      cfg.reject_unknown(keys);
      pj_mo.merge(cfg);
      cfg.fill(pj_nmax_opt, "nmax", pj_nmax);
      cfg.fill(pj_tol_opt, "tol", pj_tol);
      cfg.fill(pj_out_opt, "out", pj_out);
      return cmd_projectivity(pj_mo, pj_nmax, pj_tol, pj_out);
    }
    if (sim->parsed()) {
      if (sim_cfg->count()) cfg.load(config_path);
      cfg.reject_unknown({"scenario", "mu", "L", "D", "beta", "seed", "out"});
      cfg.fill(sim_sc_opt, "scenario", sim_scenario);
      cfg.fill(sim_mu_opt, "mu", sim_mu);
      cfg.fill(sim_L_opt, "L", sim_L);
      cfg.fill(sim_D_opt, "D", sim_D);
      cfg.fill(sim_beta_opt, "beta", sim_beta);
      cfg.fill(sim_seed_opt, "seed", sim_seed);
      cfg.fill(sim_out_opt, "out", sim_out);
      return cmd_er_simulate(sim_scenario, sim_mu, sim_L, sim_D, sim_beta,
                             resolve_seed(sim_seed), sim_out);
    }
    if (fit->parsed()) {
      if (fit_cfg->count()) cfg.load(config_path);
      cfg.reject_unknown({"data", "prior", "iterations", "burn-in", "thin",
                          "seed", "chains", "chaperones", "chaperones-weighted",
                          "fix-prior", "out"});
      cfg.fill(fit_data_opt, "data", fit_data);
      cfg.fill(fit_prior_opt, "prior", fit_prior);
      cfg.fill(fit_iter_opt, "iterations", fit_iterations);
      cfg.fill(fit_burn_opt, "burn-in", fit_burnin);
      cfg.fill(fit_thin_opt, "thin", fit_thin);
      cfg.fill(fit_seed_opt, "seed", fit_seed);
      cfg.fill(fit_chains_opt, "chains", fit_chains);
      cfg.fill(fit_chap_opt, "chaperones", fit_chaperones);
      cfg.fill(fit_chapw_opt, "chaperones-weighted", fit_chap_weighted);
      cfg.fill(fit_fix_opt, "fix-prior", fit_fix_prior);
      cfg.fill(fit_out_opt, "out", fit_out);
      if (fit_data.empty() || fit_prior.empty())
        throw pbal::ConfigError("er fit: --data and --prior are required");
      return cmd_er_fit(fit_data, fit_prior, fit_iterations, fit_burnin,
                        fit_thin, resolve_seed(fit_seed), fit_chains,
                        fit_chaperones, fit_chap_weighted, fit_fix_prior,
                        fit_out);
    }
    if (ev->parsed()) {
      if (ev_cfg->count()) cfg.load(config_path);
      cfg.reject_unknown({"truth", "estimate", "out"});
      cfg.fill(ev_truth_opt, "truth", ev_truth);
      cfg.fill(ev_est_opt, "estimate", ev_estimate);
      cfg.fill(ev_out_opt, "out", ev_out);
      if (ev_truth.empty() || ev_estimate.empty())
        throw pbal::ConfigError("er eval: --truth and --estimate are required");
      return cmd_er_eval(ev_truth, ev_estimate, ev_out);
    }
    throw pbal::ConfigError("no subcommand given");
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const pbal::PrecisionError& e) {
    std::cerr << "precision error: " << e.what() << '\n';
    return 3;
  } catch (const pbal::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
