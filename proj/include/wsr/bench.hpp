// SPDX-License-Identifier: Apache-2.0

#ifndef WSR_BENCH_HPP
#define WSR_BENCH_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wsr/mimo_solvers.hpp"
#include "wsr/miso_solvers.hpp"
#include "wsr/rng.hpp"
#include "wsr/scenario.hpp"

namespace wsr {

/// Configuration error carrying the JSON field path that failed validation.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), field_path(std::move(path)) {}
  std::string field_path;
};

struct SolverChoice {
  std::string algorithm;  // wmmse | fp | mm | mm_plus | fp_plus
  std::string variant;    // wmmse: l_m_w | m_l_w; fp: unconventional | conv_gamma_first | conv_phi_first
  std::string label() const { return variant.empty() ? algorithm : algorithm + ":" + variant; }
};

struct ExperimentConfig {
  std::string system = "miso";  // miso | mimo
  int num_users = 4;
  int num_antennas = 4;  // miso
  int tx_antennas = 4;   // mimo
  int rx_antennas = 4;
  int streams = 4;
  double power_dbm = 0.0;   // converted as P = 10^(dBm/10)
  double noise_power = 1.0;
  double weight = 1.0;
  GeometryConfig geometry;  // unit-gain defaults; seed field is overwritten per run
  std::vector<SolverChoice> solvers;
  std::uint64_t seed_base = 1;
  int seed_count = 1;
  double stop_epsilon = 1e-6;
  int max_iters = 20000;
  BisectionSettings bisection;
  std::string eta_mode = "frobenius";  // frobenius | exact
  std::string out_dir = "wsr_out";
  bool parallel = false;

  double power_linear() const { return std::pow(10.0, power_dbm / 10.0); }
  EtaMode eta() const {
    if (eta_mode == "frobenius") return EtaMode::FrobeniusBound;
    if (eta_mode == "exact") return EtaMode::ExactLambdaMax;
    throw ConfigError("eta_mode", "must be 'frobenius' or 'exact'");
  }
};

inline std::vector<SolverChoice> default_solver_set() {
  return {{"wmmse", "l_m_w"}, {"fp", "unconventional"}, {"mm", ""}, {"mm_plus", ""}, {"fp_plus", ""}};
}

inline ExperimentConfig default_experiment_config() {
  ExperimentConfig cfg;
  cfg.solvers = default_solver_set();
  cfg.seed_count = 100;
  return cfg;
}

// ---- JSON binding ----

inline nlohmann::json to_json(const GeometryConfig& g) {
  return nlohmann::json{{"tx_center", g.tx_center}, {"rx_center", g.rx_center},
                        {"cluster_radius", g.cluster_radius}, {"t0_db", g.t0_db},
                        {"d0", g.d0},                 {"pathloss_exp", g.pathloss_exp}};
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json solvers = nlohmann::json::array();
  for (const auto& s : c.solvers)
    solvers.push_back({{"algorithm", s.algorithm}, {"variant", s.variant}});
  return nlohmann::json{{"system", c.system},
                        {"num_users", c.num_users},
                        {"num_antennas", c.num_antennas},
                        {"tx_antennas", c.tx_antennas},
                        {"rx_antennas", c.rx_antennas},
                        {"streams", c.streams},
                        {"power_dbm", c.power_dbm},
                        {"noise_power", c.noise_power},
                        {"weight", c.weight},
                        {"geometry", to_json(c.geometry)},
                        {"solvers", solvers},
                        {"seed_base", c.seed_base},
                        {"seed_count", c.seed_count},
                        {"stop_epsilon", c.stop_epsilon},
                        {"max_iters", c.max_iters},
                        {"bisection",
                         {{"tol_power", c.bisection.tol_power},
                          {"tol_mu", c.bisection.tol_mu},
                          {"max_iter", c.bisection.max_iter}}},
                        {"eta_mode", c.eta_mode},
                        {"out_dir", c.out_dir},
                        {"parallel", c.parallel}};
}

namespace detail {

template <typename T>
T get_field(const nlohmann::json& j, const std::string& path, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.empty() ? key : path + "." + key, e.what());
  }
}

inline void validate_solver(const SolverChoice& s, const std::string& path,
                            const std::string& system) {
  static const std::map<std::string, std::vector<std::string>> kMisoVariants = {
      {"wmmse", {"", "l_m_w", "m_l_w"}},
      {"fp", {"", "unconventional", "conv_gamma_first", "conv_phi_first"}},
      {"mm", {""}},
      {"mm_plus", {""}},
      {"fp_plus", {""}}};
  auto it = kMisoVariants.find(s.algorithm);
  if (it == kMisoVariants.end())
    throw ConfigError(path + ".algorithm", "unknown algorithm '" + s.algorithm + "'");
  if (system == "mimo") {
    if (!s.variant.empty())
      throw ConfigError(path + ".variant", "mimo solvers do not take variants");
    return;
  }
  if (std::find(it->second.begin(), it->second.end(), s.variant) == it->second.end())
    throw ConfigError(path + ".variant",
                      "unknown variant '" + s.variant + "' for algorithm '" + s.algorithm + "'");
}

}  // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.system = detail::get_field<std::string>(j, "", "system", c.system);
  if (c.system != "miso" && c.system != "mimo")
    throw ConfigError("system", "must be 'miso' or 'mimo'");
  c.num_users = detail::get_field(j, "", "num_users", c.num_users);
  c.num_antennas = detail::get_field(j, "", "num_antennas", c.num_antennas);
  c.tx_antennas = detail::get_field(j, "", "tx_antennas", c.tx_antennas);
  c.rx_antennas = detail::get_field(j, "", "rx_antennas", c.rx_antennas);
  c.streams = detail::get_field(j, "", "streams", c.streams);
  if (c.num_users < 1) throw ConfigError("num_users", "must be positive");
  if (c.system == "miso" && c.num_antennas < 1) throw ConfigError("num_antennas", "must be positive");
  if (c.system == "mimo" &&
      (c.tx_antennas < 1 || c.rx_antennas < 1 || c.streams < 1 ||
       c.streams > std::min(c.tx_antennas, c.rx_antennas)))
    throw ConfigError("streams", "need 1 <= streams <= min(tx_antennas, rx_antennas)");
  c.power_dbm = detail::get_field(j, "", "power_dbm", c.power_dbm);
  c.noise_power = detail::get_field(j, "", "noise_power", c.noise_power);
  if (!(c.noise_power > 0.0)) throw ConfigError("noise_power", "must be positive");
  c.weight = detail::get_field(j, "", "weight", c.weight);
  if (c.weight < 0.0) throw ConfigError("weight", "must be nonnegative");
  if (j.contains("geometry")) {
    const auto& g = j.at("geometry");
    c.geometry.tx_center = detail::get_field(g, "geometry", "tx_center", c.geometry.tx_center);
    c.geometry.rx_center = detail::get_field(g, "geometry", "rx_center", c.geometry.rx_center);
    c.geometry.cluster_radius =
        detail::get_field(g, "geometry", "cluster_radius", c.geometry.cluster_radius);
    c.geometry.t0_db = detail::get_field(g, "geometry", "t0_db", c.geometry.t0_db);
    c.geometry.d0 = detail::get_field(g, "geometry", "d0", c.geometry.d0);
    c.geometry.pathloss_exp =
        detail::get_field(g, "geometry", "pathloss_exp", c.geometry.pathloss_exp);
    if (!(c.geometry.d0 > 0.0)) throw ConfigError("geometry.d0", "must be positive");
    if (c.geometry.cluster_radius < 0.0)
      throw ConfigError("geometry.cluster_radius", "must be nonnegative");
  }
  if (j.contains("solvers")) {
    c.solvers.clear();
    const auto& arr = j.at("solvers");
    if (!arr.is_array()) throw ConfigError("solvers", "must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = "solvers[" + std::to_string(i) + "]";
      SolverChoice s;
      s.algorithm = detail::get_field<std::string>(arr[i], path, "algorithm", "");
      s.variant = detail::get_field<std::string>(arr[i], path, "variant", "");
      detail::validate_solver(s, path, c.system);
      c.solvers.push_back(std::move(s));
    }
  } else {
    c.solvers = default_solver_set();
    if (c.system == "mimo")
      for (auto& s : c.solvers) s.variant.clear();
  }
  if (c.solvers.empty()) throw ConfigError("solvers", "need at least one solver");
  c.seed_base = detail::get_field<std::uint64_t>(j, "", "seed_base", c.seed_base);
  c.seed_count = detail::get_field(j, "", "seed_count", c.seed_count);
  if (c.seed_count < 1) throw ConfigError("seed_count", "need at least one seed");
  c.stop_epsilon = detail::get_field(j, "", "stop_epsilon", c.stop_epsilon);
  if (!(c.stop_epsilon > 0.0)) throw ConfigError("stop_epsilon", "must be positive");
  c.max_iters = detail::get_field(j, "", "max_iters", c.max_iters);
  if (c.max_iters < 1) throw ConfigError("max_iters", "must be positive");
  if (j.contains("bisection")) {
    const auto& b = j.at("bisection");
    c.bisection.tol_power = detail::get_field(b, "bisection", "tol_power", c.bisection.tol_power);
    c.bisection.tol_mu = detail::get_field(b, "bisection", "tol_mu", c.bisection.tol_mu);
    c.bisection.max_iter = detail::get_field(b, "bisection", "max_iter", c.bisection.max_iter);
    if (c.bisection.tol_power <= 0.0 && c.bisection.tol_mu <= 0.0)
      throw ConfigError("bisection", "at least one of tol_power/tol_mu must be positive");
  }
  c.eta_mode = detail::get_field<std::string>(j, "", "eta_mode", c.eta_mode);
  if (c.eta_mode != "frobenius" && c.eta_mode != "exact")
    throw ConfigError("eta_mode", "must be 'frobenius' or 'exact'");
  c.out_dir = detail::get_field<std::string>(j, "", "out_dir", c.out_dir);
  c.parallel = detail::get_field(j, "", "parallel", c.parallel);
  return c;
}

// ---- Scenario / solver plumbing ----

inline MisoScenario make_miso_scenario(const ExperimentConfig& cfg, std::uint64_t seed) {
  GeometryConfig geo = cfg.geometry;
  geo.seed = seed;
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(cfg.num_users, cfg.weight);
  const Eigen::VectorXd n = Eigen::VectorXd::Constant(cfg.num_users, cfg.noise_power);
  return generate_miso(geo, cfg.num_users, cfg.num_antennas, w, n, cfg.power_linear());
}

inline MimoScenario make_mimo_scenario(const ExperimentConfig& cfg, std::uint64_t seed) {
  GeometryConfig geo = cfg.geometry;
  geo.seed = seed;
  const int K = cfg.num_users;
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(K, cfg.weight);
  const Eigen::VectorXd n = Eigen::VectorXd::Constant(K, cfg.noise_power);
  const Eigen::VectorXd p = Eigen::VectorXd::Constant(K, cfg.power_linear());
  return generate_mimo(geo, K, Eigen::VectorXi::Constant(K, cfg.tx_antennas),
                       Eigen::VectorXi::Constant(K, cfg.rx_antennas),
                       Eigen::VectorXi::Constant(K, cfg.streams), w, n, p);
}

inline MisoSolverConfig miso_solver_config(const ExperimentConfig& cfg, const SolverChoice& s) {
  MisoSolverConfig sc;
  sc.stop_epsilon = cfg.stop_epsilon;
  sc.max_iters = cfg.max_iters;
  sc.bisection = cfg.bisection;
  sc.eta_mode = cfg.eta();
  if (s.algorithm == "wmmse") {
    sc.algorithm = MisoAlgorithm::Wmmse;
    sc.order = (s.variant == "m_l_w") ? WmmseOrder::WeightFirst : WmmseOrder::ReceiverFirst;
  } else if (s.algorithm == "fp") {
    sc.algorithm = MisoAlgorithm::Fp;
    if (s.variant == "conv_gamma_first")
      sc.fp_variant = FpVariant::ConventionalGammaFirst;
    else if (s.variant == "conv_phi_first")
      sc.fp_variant = FpVariant::ConventionalPhiFirst;
    else
      sc.fp_variant = FpVariant::Unconventional;
  } else if (s.algorithm == "mm") {
    sc.algorithm = MisoAlgorithm::Mm;
  } else if (s.algorithm == "mm_plus") {
    sc.algorithm = MisoAlgorithm::MmPlus;
  } else if (s.algorithm == "fp_plus") {
    sc.algorithm = MisoAlgorithm::FpPlus;
  } else {
    throw ConfigError("solvers", "unknown algorithm '" + s.algorithm + "'");
  }
  return sc;
}

inline MimoSolverConfig mimo_solver_config(const ExperimentConfig& cfg, const SolverChoice& s) {
  MimoSolverConfig sc;
  sc.stop_epsilon = cfg.stop_epsilon;
  sc.max_iters = cfg.max_iters;
  sc.bisection = cfg.bisection;
  sc.eta_mode = cfg.eta();
  if (s.algorithm == "wmmse")
    sc.algorithm = MimoAlgorithm::Wmmse;
  else if (s.algorithm == "fp")
    sc.algorithm = MimoAlgorithm::Fp;
  else if (s.algorithm == "mm")
    sc.algorithm = MimoAlgorithm::Mm;
  else if (s.algorithm == "mm_plus")
    sc.algorithm = MimoAlgorithm::MmPlus;
  else if (s.algorithm == "fp_plus")
    sc.algorithm = MimoAlgorithm::FpPlus;
  else
    throw ConfigError("solvers", "unknown algorithm '" + s.algorithm + "'");
  return sc;
}

// ---- Results, CSV, aggregation ----

struct SolverRun {
  std::uint64_t seed = 0;
  SolverChoice solver;
  std::vector<TrajectoryPoint> points;
  bool converged = false;
  std::string error;
};

struct ExperimentOutcome {
  ExperimentConfig config;
  std::vector<SolverRun> runs;  // ordered by (seed, solver index)
  bool all_ok = true;
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline const char* kCsvHeader = "seed,solver,variant,iter,wsr_nats,cum_seconds,mu_iters";

inline std::string run_to_csv(const SolverRun& run) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& p : run.points) {
    out += std::to_string(run.seed);
    out += ',';
    out += run.solver.algorithm;
    out += ',';
    out += run.solver.variant;
    out += ',';
    out += std::to_string(p.iter);
    out += ',';
    out += format_double(p.wsr);
    out += ',';
    out += format_double(p.cum_seconds);
    out += ',';
    out += std::to_string(p.mu_iters);
    out += '\n';
  }
  return out;
}

/// Per-seed work unit: shared initialization, every configured solver.
inline std::vector<SolverRun> run_single_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  std::vector<SolverRun> runs;
  if (cfg.system == "miso") {
    const MisoScenario scn = make_miso_scenario(cfg, seed);
    SplitMix64 init_rng(substream_seed(seed, 1));
    const MisoBeamformers init = random_miso_beamformers(scn, init_rng);
    for (const auto& s : cfg.solvers) {
      auto rr = run_miso(scn, miso_solver_config(cfg, s), init);
      runs.push_back({seed, s, std::move(rr.points), rr.converged, std::move(rr.error)});
    }
  } else {
    const MimoScenario scn = make_mimo_scenario(cfg, seed);
    SplitMix64 init_rng(substream_seed(seed, 1));
    const MimoBeamformers init = random_mimo_beamformers(scn, init_rng);
    for (const auto& s : cfg.solvers) {
      auto rr = run_mimo(scn, mimo_solver_config(cfg, s), init);
      runs.push_back({seed, s, std::move(rr.points), rr.converged, std::move(rr.error)});
    }
  }
  return runs;
}

inline ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
  ExperimentOutcome out;
  out.config = cfg;
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < cfg.seed_count; ++i) seeds.push_back(cfg.seed_base + static_cast<std::uint64_t>(i));
  std::vector<std::vector<SolverRun>> per_seed(seeds.size());
  if (cfg.parallel) {
    std::vector<std::future<std::vector<SolverRun>>> futures;
    futures.reserve(seeds.size());
    for (std::size_t i = 0; i < seeds.size(); ++i)
      futures.push_back(std::async(std::launch::async, run_single_seed, cfg, seeds[i]));
    for (std::size_t i = 0; i < seeds.size(); ++i) per_seed[i] = futures[i].get();
  } else {
    for (std::size_t i = 0; i < seeds.size(); ++i) per_seed[i] = run_single_seed(cfg, seeds[i]);
  }
  for (auto& batch : per_seed)
    for (auto& run : batch) {
      if (!run.error.empty()) out.all_ok = false;
      out.runs.push_back(std::move(run));
    }
  return out;
}

/// Iteration tables are padded by carrying the last value forward so means
/// over seeds stay well defined after individual runs have converged.
inline nlohmann::json aggregate_results(const ExperimentOutcome& outcome) {
  std::map<std::string, std::vector<const SolverRun*>> by_solver;
  for (const auto& run : outcome.runs) by_solver[run.solver.label()].push_back(&run);
  nlohmann::json solvers = nlohmann::json::object();
  for (const auto& [label, runs] : by_solver) {
    std::size_t max_len = 0;
    for (const auto* r : runs) max_len = std::max(max_len, r->points.size());
    std::vector<double> mean_wsr(max_len, 0.0), mean_time(max_len, 0.0);
    for (const auto* r : runs) {
      for (std::size_t i = 0; i < max_len; ++i) {
        const auto& p = i < r->points.size() ? r->points[i] : r->points.back();
        mean_wsr[i] += p.wsr;
        mean_time[i] += p.cum_seconds;
      }
    }
    for (auto& v : mean_wsr) v /= static_cast<double>(runs.size());
    for (auto& v : mean_time) v /= static_cast<double>(runs.size());
    std::vector<double> final_wsr, conv_seconds, iterations;
    for (const auto* r : runs) {
      final_wsr.push_back(r->points.back().wsr);
      conv_seconds.push_back(r->points.back().cum_seconds);
      iterations.push_back(static_cast<double>(r->points.size() - 1));
    }
    auto mean_of = [](const std::vector<double>& v) {
      double s = 0.0;
      for (double x : v) s += x;
      return v.empty() ? 0.0 : s / static_cast<double>(v.size());
    };
    const double tmean = mean_of(conv_seconds);
    double tvar = 0.0;
    for (double x : conv_seconds) tvar += (x - tmean) * (x - tmean);
    tvar = conv_seconds.size() > 1 ? tvar / static_cast<double>(conv_seconds.size() - 1) : 0.0;
    solvers[label] = nlohmann::json{
        {"mean_wsr_vs_iter", mean_wsr},
        {"mean_cum_seconds_vs_iter", mean_time},
        {"final_wsr_per_seed", final_wsr},
        {"mean_final_wsr", mean_of(final_wsr)},
        {"mean_iterations", mean_of(iterations)},
        {"convergence_seconds", {{"mean", tmean}, {"std", std::sqrt(tvar)}}}};
  }
  return nlohmann::json{{"system", outcome.config.system},
                        {"seed_count", outcome.config.seed_count},
                        {"solvers", solvers}};
}

inline std::string run_filename(const SolverRun& run) {
  std::string name = "run_s" + std::to_string(run.seed) + "_" + run.solver.algorithm;
  if (!run.solver.variant.empty()) name += "_" + run.solver.variant;
  return name + ".csv";
}

/// Writes per-run CSV files and the aggregate JSON under out_dir.
inline void write_outputs(const ExperimentOutcome& outcome, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  for (const auto& run : outcome.runs) {
    std::ofstream f(std::filesystem::path(out_dir) / run_filename(run), std::ios::binary);
    if (!f) throw std::runtime_error("cannot write run CSV under " + out_dir);
    f << run_to_csv(run);
  }
  nlohmann::json agg = aggregate_results(outcome);
  agg["config"] = to_json(outcome.config);
  std::ofstream f(std::filesystem::path(out_dir) / "aggregate.json", std::ios::binary);
  if (!f) throw std::runtime_error("cannot write aggregate.json under " + out_dir);
  f << agg.dump(2) << '\n';
}

// ---- Convergence-time sweep ----

struct SweepResult {
  std::string axis;
  std::vector<int> values;
  std::vector<double> mm_mean_seconds;
  std::vector<double> mm_plus_mean_seconds;
  std::vector<double> mm_mean_iterations;
  std::vector<double> mm_plus_mean_iterations;
};

inline nlohmann::json to_json(const SweepResult& r) {
  return nlohmann::json{{"axis", r.axis},
                        {"values", r.values},
                        {"mm_mean_seconds", r.mm_mean_seconds},
                        {"mm_plus_mean_seconds", r.mm_plus_mean_seconds},
                        {"mm_mean_iterations", r.mm_mean_iterations},
                        {"mm_plus_mean_iterations", r.mm_plus_mean_iterations}};
}

/// Mean convergence wall time of the minorize-maximize solver and its shifted
/// variant across an axis of problem sizes.
inline SweepResult sweep_experiment(const ExperimentConfig& base, const std::string& axis,
                                    const std::vector<int>& values) {
  if (values.empty()) throw ConfigError("values", "sweep needs at least one value");
  if (!std::is_sorted(values.begin(), values.end()))
    throw ConfigError("values", "sweep values must be sorted ascending");
  if (axis != "users" && axis != "antennas")
    throw ConfigError("axis", "must be 'users' or 'antennas'");
  SweepResult out;
  out.axis = axis;
  out.values = values;
  for (int value : values) {
    if (value < 1) throw ConfigError("values", "sweep values must be positive");
    ExperimentConfig cfg = base;
    if (axis == "users") {
      cfg.num_users = value;
    } else if (cfg.system == "miso") {
      cfg.num_antennas = value;
    } else {
      cfg.tx_antennas = cfg.rx_antennas = cfg.streams = value;
    }
    cfg.solvers = {{"mm", ""}, {"mm_plus", ""}};
    const ExperimentOutcome outcome = run_experiment(cfg);
    double mm_t = 0.0, mmp_t = 0.0, mm_i = 0.0, mmp_i = 0.0;
    int mm_n = 0, mmp_n = 0;
    for (const auto& run : outcome.runs) {
      const double secs = run.points.back().cum_seconds;
      const double iters = static_cast<double>(run.points.size() - 1);
      if (run.solver.algorithm == "mm") {
        mm_t += secs;
        mm_i += iters;
        ++mm_n;
      } else {
        mmp_t += secs;
        mmp_i += iters;
        ++mmp_n;
      }
    }
    out.mm_mean_seconds.push_back(mm_t / std::max(mm_n, 1));
    out.mm_plus_mean_seconds.push_back(mmp_t / std::max(mmp_n, 1));
    out.mm_mean_iterations.push_back(mm_i / std::max(mm_n, 1));
    out.mm_plus_mean_iterations.push_back(mmp_i / std::max(mmp_n, 1));
  }
  return out;
}

// ---- Relaxed multiplier-search study ----

struct RelaxedStudyResult {
  std::vector<int> thresholds;
  // runs labeled "mm_relaxed_<i>", plus "mm_exact" and "mm_plus" references
  std::vector<SolverRun> runs;
  nlohmann::json summary;
};

/// Reruns the minorize-maximize solver with the multiplier bisection stopped
/// once the bracket width falls below 2^-i, for each requested i, next to the
/// exact-tolerance run and the shifted solver as references.
inline RelaxedStudyResult relaxed_bisection_study(const ExperimentConfig& base,
                                                  const std::vector<int>& thresholds) {
  if (thresholds.empty()) throw ConfigError("thresholds", "need at least one threshold exponent");
  for (int i : thresholds)
    if (i < 0) throw ConfigError("thresholds", "threshold exponents must be nonnegative");
  RelaxedStudyResult out;
  out.thresholds = thresholds;

  auto run_with = [&](const SolverChoice& solver, const BisectionSettings& bis,
                      const std::string& label) {
    ExperimentConfig cfg = base;
    cfg.solvers = {solver};
    cfg.bisection = bis;
    ExperimentOutcome outcome = run_experiment(cfg);
    for (auto& r : outcome.runs) {
      r.solver.algorithm = label;
      out.runs.push_back(std::move(r));
    }
  };

  run_with({"mm", ""}, base.bisection, "mm_exact");
  run_with({"mm_plus", ""}, base.bisection, "mm_plus");
  for (int i : thresholds) {
    BisectionSettings bis;
    bis.tol_power = 0.0;  // width criterion only
    bis.tol_mu = std::pow(2.0, -i);
    bis.max_iter = std::max(base.bisection.max_iter, i + 80);
    run_with({"mm", ""}, bis, "mm_relaxed_" + std::to_string(i));
  }

  // Per-threshold summary: final objective, worst step decrement, and the
  // comparison against the exact run on the same seed.
  std::map<std::string, std::map<std::uint64_t, const SolverRun*>> by_label;
  for (const auto& r : out.runs) by_label[r.solver.algorithm][r.seed] = &r;
  nlohmann::json per_threshold = nlohmann::json::object();
  for (int i : thresholds) {
    const std::string label = "mm_relaxed_" + std::to_string(i);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [seed, run] : by_label[label]) {
      double worst_drop = 0.0;
      for (std::size_t t = 1; t < run->points.size(); ++t)
        worst_drop = std::min(worst_drop, run->points[t].wsr - run->points[t - 1].wsr);
      const double final_wsr = run->points.back().wsr;
      const double exact_final = by_label["mm_exact"][seed]->points.back().wsr;
      rows.push_back({{"seed", seed},
                      {"final_wsr", final_wsr},
                      {"exact_final_wsr", exact_final},
                      {"shortfall", exact_final - final_wsr},
                      {"worst_step_drop", -worst_drop}});
    }
    per_threshold[std::to_string(i)] = std::move(rows);
  }
  out.summary = nlohmann::json{{"thresholds", thresholds}, {"per_threshold", per_threshold}};
  return out;
}

}  // namespace wsr

#endif  // WSR_BENCH_HPP
