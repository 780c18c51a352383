#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "inertial/equilibrium.hpp"
#include "inertial/game.hpp"
#include "inertial/io.hpp"
#include "inertial/multiclass.hpp"
#include "inertial/rng.hpp"
#include "inertial/scenarios.hpp"
#include "inertial/solvers.hpp"

namespace {

using namespace inertial;

constexpr int kExitOk = 0;
constexpr int kExitNotInertial = 1;
constexpr int kExitInputError = 2;
constexpr int kExitNotConverged = 3;

std::uint64_t default_seed() {
  const char* env = std::getenv("INERTIAL_SEED");
  if (!env) return 0;
  std::string s(env);
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    throw ParseError("INERTIAL_SEED: cannot parse \"" + s + "\"");
  }
  if (used != s.size()) {
    throw ParseError("INERTIAL_SEED: trailing characters in \"" + s + "\"");
  }
  return v;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += io::fmt_g17(v[i]);
  }
  return out;
}

std::vector<double> point_values_from_arg(const std::string& arg) {
  if (std::filesystem::exists(arg)) return io::load_point(arg);
  return io::parse_number_list(arg);
}

StackedPoint stacked_from_arg(const std::string& arg,
                              const MultiClassGame& mc) {
  std::vector<std::vector<double>> rows;
  if (std::filesystem::exists(arg)) {
    rows = io::load_blocks(arg);
  } else {
    const std::vector<double> flat = io::parse_number_list(arg);
    if (static_cast<int>(flat.size()) != mc.num_classes * mc.n) {
      throw ParseError("inline stacked point needs A*n = " +
                       std::to_string(mc.num_classes * mc.n) +
                       " entries, got " + std::to_string(flat.size()));
    }
    rows.resize(static_cast<std::size_t>(mc.num_classes));
    for (int a = 0; a < mc.num_classes; ++a) {
      rows[static_cast<std::size_t>(a)].assign(
          flat.begin() + static_cast<std::ptrdiff_t>(a) * mc.n,
          flat.begin() + static_cast<std::ptrdiff_t>(a + 1) * mc.n);
    }
  }
  if (static_cast<int>(rows.size()) != mc.num_classes) {
    throw ParseError("stacked point has " + std::to_string(rows.size()) +
                     " blocks for A = " + std::to_string(mc.num_classes));
  }
  std::vector<SimplexPoint> blocks;
  blocks.reserve(rows.size());
  for (int a = 0; a < mc.num_classes; ++a) {
    blocks.emplace_back(rows[static_cast<std::size_t>(a)],
                        mc.gammas[static_cast<std::size_t>(a)]);
  }
  return StackedPoint(std::move(blocks));
}

struct VerifyArgs {
  std::string game_path;
  std::string point;
  double tol = kDefaultEnvyTol;
};

int run_verify(const VerifyArgs& args) {
  const std::string text = io::read_file(args.game_path);
  if (io::text_is_multiclass(text)) {
    const MultiClassGame mc = io::multiclass_from_json(text);
    const StackedPoint xs = stacked_from_arg(args.point, mc);
    const MultiInertialVerdict verdict =
        is_multiclass_inertial(mc, xs, args.tol);
    for (int a = 0; a < mc.num_classes; ++a) {
      const EnvyReport& report =
          verdict.reports[static_cast<std::size_t>(a)];
      std::cout << "class " << (a + 1) << " inertial: "
                << (report.all_empty() ? "true" : "false") << "\n";
      for (std::size_t i = 0; i < report.witnesses.size(); ++i) {
        for (const EnvyWitness& w : report.witnesses[i]) {
          std::cout << "class " << (a + 1) << " envy: " << (i + 1) << " -> "
                    << (w.target + 1) << " (" << io::fmt_g17(w.u_source)
                    << " < "
                    << io::fmt_g17(w.u_target - w.cost) << ")\n";
        }
      }
    }
    std::cout << "inertial: " << (verdict.inertial ? "true" : "false")
              << "\n";
    std::cout << "gap: " << io::fmt_g17(vi_gap_multi(mc, xs)) << "\n";
    return verdict.inertial ? kExitOk : kExitNotInertial;
  }

  const PopulationGame game = io::game_from_json(text);
  const SimplexPoint x(point_values_from_arg(args.point), game.gamma);
  const NashVerdict nash = is_nash(game, x, args.tol);
  const InertialVerdict inertial = is_inertial(game, x, args.tol);
  std::cout << "inertial: " << (inertial.inertial ? "true" : "false")
            << ", nash: " << (nash.nash ? "true" : "false") << "\n";
  if (nash.witness) {
    std::cout << "nash_witness: " << (nash.witness->action + 1)
              << " prefers " << (nash.witness->better + 1) << " ("
              << io::fmt_g17(nash.witness->u_action) << " < "
              << io::fmt_g17(nash.witness->u_better) << ")\n";
  }
  for (std::size_t i = 0; i < inertial.report.witnesses.size(); ++i) {
    for (const EnvyWitness& w : inertial.report.witnesses[i]) {
      std::cout << "witness " << (i + 1) << " -> " << (w.target + 1) << " ("
                << io::fmt_g17(w.u_source) << " < "
                << io::fmt_g17(w.u_target - w.cost) << ")\n";
    }
  }
  std::cout << "gap: " << io::fmt_g17(vi_gap(game, x)) << "\n";
  return inertial.inertial ? kExitOk : kExitNotInertial;
}

struct SolveArgs {
  std::string game_path;
  std::string algorithm = "projection";
  double rho = 0.0;
  double tau = 0.0;
  double epsilon = 0.0;
  bool have_rho = false;
  bool have_tau = false;
  bool have_epsilon = false;
  std::string policy = "equal-share";
  double tol = 1e-6;
  double envy_tol = kDefaultEnvyTol;
  std::int64_t max_iter = 1000000;
  int cycle_window = 64;
  std::string x0 = "uniform";
  std::uint64_t seed = 0;
  bool have_seed = false;
  std::string out_path;
  std::string trajectory_path;
  bool unsafe = false;
  bool async = false;
};

// Conservative multi-class defaults: the shared inflow cap uses the worst
// class on both sides, and tau is sized against the total mass so the
// feasibility precondition holds. Reduces to the single-class rule at A = 1.
RecommendedParams recommended_params_multi(const MultiClassGame& mc) {
  double c_min = std::numeric_limits<double>::infinity();
  double l_max = 0.0;
  double total_mass = 0.0;
  for (int a = 0; a < mc.num_classes; ++a) {
    const PopulationGame game = single_class(mc, a);
    c_min = std::min(c_min, game.costs.min_off_diagonal());
    l_max = std::max(l_max, lipschitz_bounds(game).global);
    total_mass += game.gamma;
  }
  if (!(c_min > 0.0)) {
    throw ZeroCMin("recommended parameters need a positive minimum "
                   "switching cost");
  }
  if (!(l_max > 0.0)) {
    throw ZeroLipschitz("recommended parameters need a positive utility "
                        "Lipschitz bound");
  }
  RecommendedParams rec;
  rec.rho = 1.0 / l_max;
  rec.tau = std::min(1.0, 0.9 * c_min / (l_max * total_mass));
  rec.epsilon = 0.1 * c_min / l_max;
  return rec;
}

RedistributionPolicy::Kind policy_kind(const std::string& name) {
  if (name == "equal-share") return RedistributionPolicy::Kind::EqualShare;
  if (name == "per-target") return RedistributionPolicy::Kind::PerTarget;
  if (name == "utility-weighted") {
    return RedistributionPolicy::Kind::UtilityWeighted;
  }
  throw ParseError("unknown policy \"" + name +
                   "\"; expected equal-share, per-target, or "
                   "utility-weighted");
}

template <class Result>
int finish_solve(const Result& result, const io::ResultMeta& meta,
                 const SolveArgs& args, const std::string& x_line) {
  std::cout << "status: " << to_string(result.status) << "\n";
  std::cout << "iterations: " << result.iterations << "\n";
  if (result.cycle_period) {
    std::cout << "cycle_period: " << *result.cycle_period << "\n";
  }
  std::cout << "gap: " << io::fmt_g17(result.gap_final) << "\n";
  std::cout << "verified_inertial: "
            << (result.verified_inertial ? "true" : "false") << "\n";
  if (!result.message.empty()) {
    std::cout << "message: " << result.message << "\n";
  }
  std::cout << x_line << "\n";
  if (!args.out_path.empty()) {
    io::write_file(args.out_path, io::result_to_json(result, meta));
  }
  if (!args.trajectory_path.empty()) {
    io::write_file(args.trajectory_path,
                   io::trajectory_to_csv(result.trajectory));
  }
  switch (result.status) {
    case SolveStatus::Converged: return kExitOk;
    case SolveStatus::PreconditionViolated: return kExitInputError;
    default: return kExitNotConverged;
  }
}

int run_solve_single(const PopulationGame& game, SolveArgs& args) {
  const std::uint64_t seed = args.have_seed ? args.seed : default_seed();
  SimplexPoint x0 = SimplexPoint::uniform(game.n, game.gamma);
  if (args.x0 == "random") {
    x0 = random_simplex_point(seed, game.n, game.gamma);
  } else if (args.x0 != "uniform") {
    x0 = SimplexPoint(point_values_from_arg(args.x0), game.gamma);
  }

  io::ResultMeta meta;
  meta.algorithm = args.algorithm;
  meta.config.emplace_back("tol", io::json_number(args.tol));
  meta.config.emplace_back("max_iter", io::json_int(args.max_iter));
  meta.config.emplace_back("x0", io::json_string(args.x0));
  if (args.x0 == "random") {
    meta.config.emplace_back("seed",
                             io::json_int(static_cast<long long>(seed)));
  }

  if (args.algorithm == "projection") {
    ProjectionConfig cfg;
    cfg.rho = args.have_rho ? args.rho : recommended_params(game).rho;
    cfg.tol = args.tol;
    cfg.max_iter = args.max_iter;
    cfg.enforce_guarantee = !args.unsafe;
    cfg.record_trajectory = !args.trajectory_path.empty();
    meta.config.emplace_back("rho", io::json_number(cfg.rho));
    meta.config.emplace_back("enforce_guarantee",
                             io::json_bool(cfg.enforce_guarantee));
    const SolveResult<SimplexPoint> result = projection_solve(game, x0, cfg);
    return finish_solve(result, meta, args,
                        "x_final: " + join_doubles(result.x_final.values()));
  }

  RedistributionPolicy policy;
  policy.kind = policy_kind(args.policy);
  BetterResponseConfig cfg;
  if (args.have_tau && args.have_epsilon) {
    policy.tau = args.tau;
    cfg.epsilon = args.epsilon;
  } else {
    const RecommendedParams rec = recommended_params(game);
    policy.tau = args.have_tau ? args.tau : rec.tau;
    cfg.epsilon = args.have_epsilon ? args.epsilon : rec.epsilon;
  }
  cfg.tol = args.tol;
  cfg.envy_tol = args.envy_tol;
  cfg.max_iter = args.max_iter;
  cfg.cycle_window = args.cycle_window;
  cfg.unsafe_allow_bound_violation = args.unsafe;
  cfg.record_trajectory = !args.trajectory_path.empty();
  cfg.async = args.async;
  cfg.async_seed = seed;
  meta.config.emplace_back("policy", io::json_string(args.policy));
  meta.config.emplace_back("tau", io::json_number(policy.tau));
  meta.config.emplace_back("epsilon", io::json_number(cfg.epsilon));
  meta.config.emplace_back("envy_tol", io::json_number(cfg.envy_tol));
  meta.config.emplace_back("cycle_window", io::json_int(cfg.cycle_window));
  meta.config.emplace_back("unsafe", io::json_bool(args.unsafe));
  meta.config.emplace_back("async", io::json_bool(args.async));
  const SolveResult<SimplexPoint> result =
      better_response_solve(game, x0, policy, cfg);
  return finish_solve(result, meta, args,
                      "x_final: " + join_doubles(result.x_final.values()));
}

int run_solve_multi(const MultiClassGame& mc, SolveArgs& args) {
  if (args.algorithm != "better-response") {
    throw InvalidSpec("multi-class games support --algorithm "
                      "better-response only");
  }
  const std::uint64_t seed = args.have_seed ? args.seed : default_seed();
  StackedPoint xs0;
  if (args.x0 == "uniform") {
    std::vector<SimplexPoint> blocks;
    for (int a = 0; a < mc.num_classes; ++a) {
      blocks.push_back(SimplexPoint::uniform(
          mc.n, mc.gammas[static_cast<std::size_t>(a)]));
    }
    xs0 = StackedPoint(std::move(blocks));
  } else if (args.x0 == "random") {
    Rng rng(seed);
    std::vector<SimplexPoint> blocks;
    for (int a = 0; a < mc.num_classes; ++a) {
      const double gamma = mc.gammas[static_cast<std::size_t>(a)];
      blocks.emplace_back(sample_simplex(rng, mc.n, gamma), gamma);
    }
    xs0 = StackedPoint(std::move(blocks));
  } else {
    xs0 = stacked_from_arg(args.x0, mc);
  }

  RedistributionPolicy policy;
  policy.kind = policy_kind(args.policy);
  BetterResponseConfig cfg;
  if (args.have_tau && args.have_epsilon) {
    policy.tau = args.tau;
    cfg.epsilon = args.epsilon;
  } else {
    const RecommendedParams rec = recommended_params_multi(mc);
    policy.tau = args.have_tau ? args.tau : rec.tau;
    cfg.epsilon = args.have_epsilon ? args.epsilon : rec.epsilon;
  }
  cfg.tol = args.tol;
  cfg.envy_tol = args.envy_tol;
  cfg.max_iter = args.max_iter;
  cfg.cycle_window = args.cycle_window;
  cfg.unsafe_allow_bound_violation = args.unsafe;
  cfg.record_trajectory = !args.trajectory_path.empty();

  io::ResultMeta meta;
  meta.algorithm = args.algorithm;
  meta.config.emplace_back("tol", io::json_number(args.tol));
  meta.config.emplace_back("max_iter", io::json_int(args.max_iter));
  meta.config.emplace_back("x0", io::json_string(args.x0));
  if (args.x0 == "random") {
    meta.config.emplace_back("seed",
                             io::json_int(static_cast<long long>(seed)));
  }
  meta.config.emplace_back("policy", io::json_string(args.policy));
  meta.config.emplace_back("tau", io::json_number(policy.tau));
  meta.config.emplace_back("epsilon", io::json_number(cfg.epsilon));
  meta.config.emplace_back("envy_tol", io::json_number(cfg.envy_tol));
  meta.config.emplace_back("cycle_window", io::json_int(cfg.cycle_window));
  meta.config.emplace_back("unsafe", io::json_bool(args.unsafe));

  const SolveResult<StackedPoint> result =
      better_response_multi_solve(mc, xs0, policy, cfg);
  std::string x_line = "x_final_blocks:";
  for (int a = 0; a < result.x_final.num_classes(); ++a) {
    x_line += " [" + join_doubles(result.x_final.block(a).values()) + "]";
  }
  return finish_solve(result, meta, args, x_line);
}

int run_solve(SolveArgs& args) {
  const std::string text = io::read_file(args.game_path);
  if (io::text_is_multiclass(text)) {
    const MultiClassGame mc = io::multiclass_from_json(text);
    return run_solve_multi(mc, args);
  }
  const PopulationGame game = io::game_from_json(text);
  return run_solve_single(game, args);
}

struct ProbeArgs {
  std::string game_path;
  std::string op = "F";
  int samples = 10000;
  std::uint64_t seed = 0;
  bool have_seed = false;
  double tol = 1e-9;
};

int run_probe(const ProbeArgs& args) {
  ProbeOperator which;
  if (args.op == "F") {
    which = ProbeOperator::InertialGap;
  } else if (args.op == "minus-u") {
    which = ProbeOperator::NegUtility;
  } else {
    throw ParseError("unknown operator \"" + args.op +
                     "\"; expected F or minus-u");
  }
  const std::uint64_t seed = args.have_seed ? args.seed : default_seed();
  const std::string text = io::read_file(args.game_path);
  ProbeReport report;
  if (io::text_is_multiclass(text)) {
    const MultiClassGame mc = io::multiclass_from_json(text);
    report = monotonicity_probe_multi(which, mc, seed, args.samples,
                                      args.tol);
  } else {
    const PopulationGame game = io::game_from_json(text);
    const auto violations = validate_game(game);
    if (!violations.empty()) {
      throw ParseError("probe: invalid game: " + violations.front().message);
    }
    report = monotonicity_probe(which, game, seed, args.samples, args.tol);
  }
  std::cout << "verdict: "
            << (report.verdict == ProbeVerdict::NotMonotone
                    ? "NotMonotone"
                    : "MonotoneUpToSampling")
            << "\n";
  std::cout << "worst_pairwise: " << io::fmt_g17(report.worst_pairwise)
            << "\n";
  std::cout << "worst_pair_x: " << join_doubles(report.worst_pair_x) << "\n";
  std::cout << "worst_pair_y: " << join_doubles(report.worst_pair_y) << "\n";
  if (std::isfinite(report.worst_eigenvalue)) {
    std::cout << "worst_eigenvalue: " << io::fmt_g17(report.worst_eigenvalue)
              << "\n";
    std::cout << "worst_eigen_x: " << join_doubles(report.worst_eigen_x)
              << "\n";
  } else {
    std::cout << "worst_eigenvalue: not sampled (domain too thin for the "
                 "interior stencil)\n";
  }
  return kExitOk;
}

struct ScenarioArgs {
  std::string config_path;
  std::string out_path;
};

int run_scenario(const ScenarioArgs& args) {
  const io::ScenarioConfig cfg = io::load_scenario(args.config_path);
  std::vector<std::string> warnings;
  const PopulationGame game =
      build_ridehailing(cfg.graph, cfg.gamma, &warnings);
  for (const std::string& w : warnings) {
    std::cout << "warning: " << w << "\n";
  }
  std::cout << "n: " << game.n << "\n";
  std::cout << "gamma: " << io::fmt_g17(game.gamma) << "\n";
  std::cout << "c_min: " << io::fmt_g17(game.costs.min_off_diagonal())
            << "\n";
  std::cout << "L: " << io::fmt_g17(lipschitz_bounds(game).global) << "\n";
  const RecommendedParams rec = recommended_params(game);
  std::cout << "recommended_rho: " << io::fmt_g17(rec.rho) << "\n";
  std::cout << "recommended_tau: " << io::fmt_g17(rec.tau) << "\n";
  std::cout << "recommended_epsilon: " << io::fmt_g17(rec.epsilon) << "\n";
  if (!args.out_path.empty()) {
    io::save_game(game, args.out_path);
    std::cout << "game written to " << args.out_path << "\n";
  }
  return kExitOk;
}

struct GenArgs {
  int n = 0;
  std::uint64_t seed = 0;
  bool have_seed = false;
  std::string family = "affine";
  GameSpec spec;
  std::string out_path;
};

int run_gen(GenArgs& args) {
  if (args.family == "affine") {
    args.spec.family = GameSpec::Family::Affine;
  } else if (args.family == "ridehailing") {
    args.spec.family = GameSpec::Family::RideHailing;
  } else {
    throw ParseError("unknown family \"" + args.family +
                     "\"; expected affine or ridehailing");
  }
  const std::uint64_t seed = args.have_seed ? args.seed : default_seed();
  const PopulationGame game = random_game(seed, args.n, args.spec);
  io::save_game(game, args.out_path);
  std::cout << "n: " << game.n << "\n";
  std::cout << "seed: " << seed << "\n";
  std::cout << "c_min: " << io::fmt_g17(game.costs.min_off_diagonal())
            << "\n";
  std::cout << "L: " << io::fmt_g17(lipschitz_bounds(game).global) << "\n";
  std::cout << "game written to " << args.out_path << "\n";
  return kExitOk;
}

struct ExperimentArgs {
  std::string game_path;
  int repetitions = 0;
  std::string algorithms = "both";
  bool have_algorithms = false;
  std::uint64_t seed = 0;
  bool have_seed = false;
  std::string out_path;
  double rho = 0.0;
  double tau = 0.0;
  double epsilon = 0.0;
  bool have_rho = false;
  bool have_tau = false;
  bool have_epsilon = false;
  std::string policy = "equal-share";
  double tol = 1e-6;
  std::int64_t max_iter = 1000000;
};

struct RunStats {
  std::vector<std::int64_t> iterations;
  bool all_converged = true;
};

void append_summary(std::string& csv, const std::string& algorithm,
                    const RunStats& stats) {
  double mean = 0.0;
  for (std::int64_t it : stats.iterations) {
    mean += static_cast<double>(it);
  }
  mean /= static_cast<double>(stats.iterations.size());
  double var = 0.0;
  for (std::int64_t it : stats.iterations) {
    const double d = static_cast<double>(it) - mean;
    var += d * d;
  }
  const double stddev =
      stats.iterations.size() > 1
          ? std::sqrt(var / static_cast<double>(stats.iterations.size() - 1))
          : 0.0;
  csv += algorithm + ",mean," + io::fmt_g17(mean) + ",\n";
  csv += algorithm + ",stddev," + io::fmt_g17(stddev) + ",\n";
}

int run_experiment(const ExperimentArgs& args) {
  if (args.repetitions < 1) {
    throw InvalidSpec("experiment: need --repetitions >= 1, got " +
                      std::to_string(args.repetitions));
  }
  const std::uint64_t seed = args.have_seed ? args.seed : default_seed();
  const std::string text = io::read_file(args.game_path);
  const bool multiclass = io::text_is_multiclass(text);
  if (multiclass && args.have_algorithms && args.algorithms != "better-response") {
    throw InvalidSpec("multi-class games support --algorithms "
                      "better-response only");
  }

  std::vector<std::string> algorithms;
  if (multiclass) {
    algorithms = {"better-response"};
  } else if (args.algorithms == "both") {
    algorithms = {"projection", "better-response"};
  } else if (args.algorithms == "projection" ||
             args.algorithms == "better-response") {
    algorithms = {args.algorithms};
  } else {
    throw ParseError("unknown algorithms selection \"" + args.algorithms +
                     "\"; expected projection, better-response, or both");
  }

  std::string csv = "algorithm,run,iterations,status\n";
  bool all_converged = true;

  if (multiclass) {
    const MultiClassGame mc = io::multiclass_from_json(text);
    RedistributionPolicy policy;
    policy.kind = policy_kind(args.policy);
    BetterResponseConfig cfg;
    if (args.have_tau && args.have_epsilon) {
      policy.tau = args.tau;
      cfg.epsilon = args.epsilon;
    } else {
      const RecommendedParams rec = recommended_params_multi(mc);
      policy.tau = args.have_tau ? args.tau : rec.tau;
      cfg.epsilon = args.have_epsilon ? args.epsilon : rec.epsilon;
    }
    cfg.tol = args.tol;
    cfg.max_iter = args.max_iter;
    RunStats stats;
    for (int run = 0; run < args.repetitions; ++run) {
      Rng rng(split_seed(seed, static_cast<std::uint64_t>(run)));
      std::vector<SimplexPoint> blocks;
      for (int a = 0; a < mc.num_classes; ++a) {
        const double gamma = mc.gammas[static_cast<std::size_t>(a)];
        blocks.emplace_back(sample_simplex(rng, mc.n, gamma), gamma);
      }
      const SolveResult<StackedPoint> result = better_response_multi_solve(
          mc, StackedPoint(std::move(blocks)), policy, cfg);
      stats.iterations.push_back(result.iterations);
      all_converged =
          all_converged && result.status == SolveStatus::Converged;
      csv += "better-response," + std::to_string(run + 1) + "," +
             std::to_string(result.iterations) + "," +
             to_string(result.status) + "\n";
    }
    append_summary(csv, "better-response", stats);
  } else {
    const PopulationGame game = io::game_from_json(text);
    std::optional<RecommendedParams> rec;
    const auto recommended = [&]() -> const RecommendedParams& {
      if (!rec) rec = recommended_params(game);
      return *rec;
    };
    for (std::size_t algo = 0; algo < algorithms.size(); ++algo) {
      const std::string& name = algorithms[algo];
      const std::uint64_t algo_base =
          static_cast<std::uint64_t>(name == "better-response" ? 1 : 0) << 32;
      RunStats stats;
      for (int run = 0; run < args.repetitions; ++run) {
        const std::uint64_t run_seed =
            split_seed(seed, algo_base | static_cast<std::uint64_t>(run));
        const SimplexPoint x0 =
            random_simplex_point(run_seed, game.n, game.gamma);
        SolveStatus status;
        std::int64_t iterations = 0;
        if (name == "projection") {
          ProjectionConfig cfg;
          cfg.rho = args.have_rho ? args.rho : recommended().rho;
          cfg.tol = args.tol;
          cfg.max_iter = args.max_iter;
          const SolveResult<SimplexPoint> result =
              projection_solve(game, x0, cfg);
          status = result.status;
          iterations = result.iterations;
        } else {
          RedistributionPolicy policy;
          policy.kind = policy_kind(args.policy);
          BetterResponseConfig cfg;
          if (args.have_tau && args.have_epsilon) {
            policy.tau = args.tau;
            cfg.epsilon = args.epsilon;
          } else {
            policy.tau = args.have_tau ? args.tau : recommended().tau;
            cfg.epsilon =
                args.have_epsilon ? args.epsilon : recommended().epsilon;
          }
          cfg.tol = args.tol;
          cfg.max_iter = args.max_iter;
          const SolveResult<SimplexPoint> result =
              better_response_solve(game, x0, policy, cfg);
          status = result.status;
          iterations = result.iterations;
        }
        if (status == SolveStatus::PreconditionViolated) {
          throw InvalidSpec("experiment: " + name +
                            " run rejected its configuration; pass explicit "
                            "parameters");
        }
        stats.iterations.push_back(iterations);
        all_converged = all_converged && status == SolveStatus::Converged;
        csv += name + "," + std::to_string(run + 1) + "," +
               std::to_string(iterations) + "," + to_string(status) + "\n";
      }
      append_summary(csv, name, stats);
    }
  }

  if (!args.out_path.empty()) {
    io::write_file(args.out_path, csv);
  } else {
    std::cout << csv;
  }
  return all_converged ? kExitOk : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"population games with switching costs: verification, "
               "solvers, probes, and scenario tooling"};
  app.require_subcommand(1);

  VerifyArgs verify_args;
  CLI::App* verify = app.add_subcommand(
      "verify", "check a point for Nash and inertial equilibrium");
  verify->add_option("--game", verify_args.game_path, "game file (JSON)")
      ->required();
  verify
      ->add_option("--point", verify_args.point,
                   "inline comma list or point/result file")
      ->required();
  verify->add_option("--tol", verify_args.tol, "comparison slack");

  SolveArgs solve_args;
  CLI::App* solve =
      app.add_subcommand("solve", "run a solver from an initial condition");
  solve->add_option("--game", solve_args.game_path, "game file (JSON)")
      ->required();
  solve->add_option("--algorithm", solve_args.algorithm,
                    "projection or better-response");
  CLI::Option* rho_opt = solve->add_option("--rho", solve_args.rho,
                                           "projection step size");
  CLI::Option* tau_opt =
      solve->add_option("--tau", solve_args.tau, "transfer fraction");
  CLI::Option* eps_opt = solve->add_option("--epsilon", solve_args.epsilon,
                                           "inflow cap slack");
  solve->add_option("--policy", solve_args.policy,
                    "equal-share, per-target, or utility-weighted");
  solve->add_option("--tol", solve_args.tol, "stopping displacement");
  solve->add_option("--envy-tol", solve_args.envy_tol, "envy comparison slack");
  solve->add_option("--max-iter", solve_args.max_iter, "iteration budget");
  solve->add_option("--cycle-window", solve_args.cycle_window,
                    "recurrence scan window");
  solve->add_option("--x0", solve_args.x0, "uniform, random, or a point file");
  CLI::Option* solve_seed =
      solve->add_option("--seed", solve_args.seed, "seed for random draws");
  solve->add_option("--out", solve_args.out_path, "write the result (JSON)");
  solve->add_option("--trajectory", solve_args.trajectory_path,
                    "write the trajectory (CSV)");
  solve->add_flag("--unsafe", solve_args.unsafe,
                  "skip the convergence-guarantee preconditions");
  solve->add_flag("--async", solve_args.async,
                  "sequential seed-shuffled sweeps instead of synchronous "
                  "steps");

  ProbeArgs probe_args;
  CLI::App* probe = app.add_subcommand(
      "probe", "sample an operator for monotonicity violations");
  probe->add_option("--game", probe_args.game_path, "game file (JSON)")
      ->required();
  probe->add_option("--operator", probe_args.op, "F or minus-u");
  probe->add_option("--samples", probe_args.samples,
                    "sample count per check");
  CLI::Option* probe_seed =
      probe->add_option("--seed", probe_args.seed, "sampling seed");
  probe->add_option("--tol", probe_args.tol, "violation threshold");

  ScenarioArgs scenario_args;
  CLI::App* scenario = app.add_subcommand(
      "scenario", "build the ride-hailing game from a scenario config");
  scenario
      ->add_option("--config", scenario_args.config_path,
                   "scenario config (JSON)")
      ->required();
  scenario->add_option("--out", scenario_args.out_path,
                       "write the built game (JSON)");

  GenArgs gen_args;
  CLI::App* gen =
      app.add_subcommand("gen", "generate a seeded random instance");
  gen->add_option("--n", gen_args.n, "action count")->required();
  CLI::Option* gen_seed =
      gen->add_option("--seed", gen_args.seed, "generator seed");
  gen->add_option("--family", gen_args.family, "affine or ridehailing");
  gen->add_option("--a-lo", gen_args.spec.a_range.first, "affine base low");
  gen->add_option("--a-hi", gen_args.spec.a_range.second, "affine base high");
  gen->add_option("--b-lo", gen_args.spec.b_range.first, "affine slope low");
  gen->add_option("--b-hi", gen_args.spec.b_range.second,
                  "affine slope high");
  gen->add_option("--alpha-lo", gen_args.spec.alpha_range.first,
                  "profit low");
  gen->add_option("--alpha-hi", gen_args.spec.alpha_range.second,
                  "profit high");
  gen->add_option("--p-lo", gen_args.spec.p_range.first, "demand low");
  gen->add_option("--p-hi", gen_args.spec.p_range.second, "demand high");
  gen->add_option("--beta", gen_args.spec.beta, "vacant operating cost");
  gen->add_option("--cost-lo", gen_args.spec.cost_range.first,
                  "switching cost low");
  gen->add_option("--cost-hi", gen_args.spec.cost_range.second,
                  "switching cost high");
  gen->add_option("--gamma", gen_args.spec.gamma, "total mass");
  gen->add_option("--out", gen_args.out_path, "write the game (JSON)")
      ->required();

  ExperimentArgs exp_args;
  CLI::App* experiment = app.add_subcommand(
      "experiment", "repeat solvers from seeded random starts");
  experiment->add_option("--game", exp_args.game_path, "game file (JSON)")
      ->required();
  experiment
      ->add_option("--repetitions", exp_args.repetitions, "runs per "
                   "algorithm")
      ->required();
  CLI::Option* exp_algos = experiment->add_option(
      "--algorithms", exp_args.algorithms,
      "projection, better-response, or both");
  CLI::Option* exp_seed =
      experiment->add_option("--seed", exp_args.seed, "base seed");
  experiment->add_option("--out", exp_args.out_path, "write the table (CSV)");
  CLI::Option* exp_rho =
      experiment->add_option("--rho", exp_args.rho, "projection step size");
  CLI::Option* exp_tau =
      experiment->add_option("--tau", exp_args.tau, "transfer fraction");
  CLI::Option* exp_eps = experiment->add_option("--epsilon", exp_args.epsilon,
                                                "inflow cap slack");
  experiment->add_option("--policy", exp_args.policy,
                         "equal-share, per-target, or utility-weighted");
  experiment->add_option("--tol", exp_args.tol, "stopping displacement");
  experiment->add_option("--max-iter", exp_args.max_iter, "iteration budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  solve_args.have_rho = rho_opt->count() > 0;
  solve_args.have_tau = tau_opt->count() > 0;
  solve_args.have_epsilon = eps_opt->count() > 0;
  solve_args.have_seed = solve_seed->count() > 0;
  probe_args.have_seed = probe_seed->count() > 0;
  gen_args.have_seed = gen_seed->count() > 0;
  exp_args.have_algorithms = exp_algos->count() > 0;
  exp_args.have_seed = exp_seed->count() > 0;
  exp_args.have_rho = exp_rho->count() > 0;
  exp_args.have_tau = exp_tau->count() > 0;
  exp_args.have_epsilon = exp_eps->count() > 0;

  try {
    if (verify->parsed()) return run_verify(verify_args);
    if (solve->parsed()) return run_solve(solve_args);
    if (probe->parsed()) return run_probe(probe_args);
    if (scenario->parsed()) return run_scenario(scenario_args);
    if (gen->parsed()) return run_gen(gen_args);
    if (experiment->parsed()) return run_experiment(exp_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
