// End-to-end acceptance run: eleven independent criteria, one line each.
// Exit code is the number of failed criteria.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "inertial/equilibrium.hpp"
#include "inertial/game.hpp"
#include "inertial/io.hpp"
#include "inertial/multiclass.hpp"
#include "inertial/rng.hpp"
#include "inertial/scenarios.hpp"
#include "inertial/solvers.hpp"

using namespace inertial;

namespace {

int failures = 0;

void report(int id, const char* description, bool ok,
            const std::string& reason) {
  if (ok) {
    std::printf("PASS  %2d. %s\n", id, description);
  } else {
    std::printf("FAIL  %2d. %s (%s)\n", id, description, reason.c_str());
    ++failures;
  }
}

// 1. Point battery on the reference three-action game.
bool point_battery(std::string& reason) {
  const auto game = testutil::example_game();
  const double tol = 1e-12;

  const SimplexPoint nash_point({0.4, 0.4, 0.2}, 1.0);
  if (!is_nash(game, nash_point, tol).nash ||
      !is_inertial(game, nash_point, tol).inertial) {
    reason = "[0.4,0.4,0.2] must be Nash and inertial";
    return false;
  }

  const SimplexPoint inertial_point({0.4, 0.3, 0.3}, 1.0);
  if (is_nash(game, inertial_point, tol).nash ||
      !is_inertial(game, inertial_point, tol).inertial) {
    reason = "[0.4,0.3,0.3] must be inertial but not Nash";
    return false;
  }

  const SimplexPoint envious_point({0.4, 0.2, 0.4}, 1.0);
  const auto verdict = is_inertial(game, envious_point, tol);
  if (is_nash(game, envious_point, tol).nash || verdict.inertial) {
    reason = "[0.4,0.2,0.4] must be neither Nash nor inertial";
    return false;
  }
  const auto& witnesses = verdict.report.witnesses[2];
  if (witnesses.size() != 1 || witnesses[0].target != 0) {
    reason = "expected the single envy witness 3 -> 1";
    return false;
  }
  const EnvyWitness& w = witnesses[0];
  const double margin = (w.u_target - w.cost) - w.u_source;
  if (!testutil::near(w.u_source, 0.6, tol) ||
      !testutil::near(w.u_target - w.cost, 0.7, tol) ||
      !testutil::near(margin, 0.1, tol)) {
    std::ostringstream oss;
    oss << "witness margin " << margin << ", expected 0.1";
    reason = oss.str();
    return false;
  }
  return true;
}

// 2. Grid sweep of the inertial region against the closed-form
// inequality system, independently derived from the utilities and costs.
bool region_oracle(std::string& reason) {
  const auto game = testutil::example_game();
  const double tol = kDefaultEnvyTol;
  long long checked = 0;

  for (int i = 0; i <= 200; ++i) {
    for (int j = 0; j + i <= 200; ++j) {
      const double x1 = 0.005 * i;
      const double x2 = 0.005 * j;
      const double x3 = std::max(0.0, 1.0 - x1 - x2);

      // Pairwise slack of staying put vs switching, one line per edge;
      // a pair binds only when its source action carries mass.
      const double m12 = x2 - x1 + 0.2;
      const double m13 = 1.5 - 2.0 * x1 - x2;
      const double m21 = x1 - x2 + 1.0;
      const double m23 = 2.0 - x1 - 2.0 * x2;
      const double m31 = 2.0 * x1 + x2 - 1.1;
      const double m32 = x1 + 2.0 * x2;
      bool expected = true;
      if (x1 > tol && (m12 < -tol || m13 < -tol)) expected = false;
      if (x2 > tol && (m21 < -tol || m23 < -tol)) expected = false;
      if (x3 > tol && (m31 < -tol || m32 < -tol)) expected = false;

      const SimplexPoint x({x1, x2, x3}, 1.0);
      const bool got = is_inertial(game, x).inertial;
      ++checked;
      if (got != expected) {
        std::ostringstream oss;
        oss << "disagreement at (" << x1 << ", " << x2 << "): library "
            << (got ? "inertial" : "envious") << ", oracle says the opposite";
        reason = oss.str();
        return false;
      }
    }
  }

  // The boundary segment from (0.1, 0.9) to (0, 1) sits inside the region.
  for (int i = 0; i <= 20; ++i) {
    const double x1 = 0.005 * i;
    const SimplexPoint x({x1, 1.0 - x1, 0.0}, 1.0);
    if (!is_inertial(game, x).inertial) {
      std::ostringstream oss;
      oss << "boundary point (" << x1 << ", " << (1.0 - x1)
          << ", 0) must be inertial";
      reason = oss.str();
      return false;
    }
  }

  if (checked != 20301) {
    reason = "grid enumeration is incomplete";
    return false;
  }
  return true;
}

// 3. Inertial verdicts coincide with a vanishing gap on random points.
bool gap_equivalence(std::string& reason) {
  std::vector<PopulationGame> games = {testutil::example_game()};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GameSpec spec;
    games.push_back(random_game(seed, 3 + static_cast<int>(seed % 6), spec));
  }

  long long disagreements = 0;
  for (std::size_t g = 0; g < games.size(); ++g) {
    const auto& game = games[g];
    Rng rng(split_seed(977, static_cast<std::uint64_t>(g)));
    for (int s = 0; s < 10000; ++s) {
      const SimplexPoint x(sample_simplex(rng, game.n, game.gamma),
                           game.gamma);
      const bool inertial = is_inertial(game, x).inertial;
      const bool zero_gap = vi_gap(game, x) <= 1e-9;
      if (inertial != zero_gap) ++disagreements;
    }
  }
  if (disagreements != 0) {
    std::ostringstream oss;
    oss << disagreements << " verdict/gap disagreements in 210000 points";
    reason = oss.str();
    return false;
  }
  return true;
}

// 4. Finite-difference Jacobian of the stacked operator at an interior
// state: symmetric part and its minimum eigenvalue.
bool jacobian_reproduction(std::string& reason) {
  const auto game = testutil::example_game();
  const auto jac = jacobian_fd(game, {0.2, 0.2, 0.6}, 1e-6);

  const double expected[3][3] = {
      {0.0, 0.0, -1.0}, {0.0, 0.0, 0.0}, {-1.0, 0.0, 2.0}};
  Eigen::Matrix3d sym;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      sym(r, c) = jac[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] +
                  jac[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];
      if (std::fabs(sym(r, c) - expected[r][c]) > 1e-6) {
        std::ostringstream oss;
        oss << "symmetrized entry (" << r + 1 << "," << c + 1 << ") = "
            << sym(r, c) << ", expected " << expected[r][c];
        reason = oss.str();
        return false;
      }
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eigen(sym);
  const double min_eig = eigen.eigenvalues().minCoeff();
  const double expected_eig = 1.0 - std::sqrt(2.0);
  if (std::fabs(min_eig - expected_eig) > 1e-6) {
    std::ostringstream oss;
    oss << "minimum eigenvalue " << min_eig << ", expected " << expected_eig;
    reason = oss.str();
    return false;
  }
  return true;
}

// 5. The sampling probe flags the switching operator and clears the
// negated-utility operator.
bool probe_classification(std::string& reason) {
  const auto game = testutil::example_game();

  const auto hostile =
      monotonicity_probe(ProbeOperator::InertialGap, game, 0, 10000, 1e-9);
  if (hostile.verdict != ProbeVerdict::NotMonotone) {
    reason = "switching operator was not flagged within 10000 samples";
    return false;
  }
  // Re-derive the reported witness from scratch.
  const auto fx = operator_f_values(game, hostile.worst_pair_x);
  const auto fy = operator_f_values(game, hostile.worst_pair_y);
  double pairing = 0.0;
  for (std::size_t k = 0; k < fx.size(); ++k) {
    pairing += (fx[k] - fy[k]) *
               (hostile.worst_pair_x[k] - hostile.worst_pair_y[k]);
  }
  if (!(pairing < -1e-9) ||
      !testutil::near(pairing, hostile.worst_pairwise, 1e-12)) {
    std::ostringstream oss;
    oss << "witness pairing " << pairing << " does not certify "
        << hostile.worst_pairwise;
    reason = oss.str();
    return false;
  }

  const auto benign =
      monotonicity_probe(ProbeOperator::NegUtility, game, 0, 10000, 1e-9);
  if (benign.verdict != ProbeVerdict::MonotoneUpToSampling) {
    std::ostringstream oss;
    oss << "negated utilities were flagged with pairing "
        << benign.worst_pairwise;
    reason = oss.str();
    return false;
  }
  return true;
}

// 6. Fixed-point map with unit step reaches the equilibrium in one
// iteration from anywhere.
bool one_step_convergence(std::string& reason) {
  const auto game = testutil::example_game();
  const std::vector<double> target = {0.4, 0.4, 0.2};
  ProjectionConfig cfg;
  cfg.rho = 1.0;

  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const SimplexPoint x0 = random_simplex_point(seed, 3, 1.0);
    const auto result = projection_solve(game, x0, cfg);
    if (result.status != SolveStatus::Converged || result.iterations != 1 ||
        testutil::linf(result.x_final.values(), target) > 1e-12) {
      std::ostringstream oss;
      oss << "seed " << seed << ": status " << to_string(result.status)
          << ", " << result.iterations << " iterations, deviation "
          << testutil::linf(result.x_final.values(), target);
      reason = oss.str();
      return false;
    }
  }
  return true;
}

// 7. Better-response dynamics with recommended parameters: convergence,
// empty envy sets, conserved mass, and a non-decreasing minimum utility.
bool better_response_convergence(std::string& reason) {
  GameSpec spec;
  spec.cost_range = {0.05, 0.5};
  spec.b_range = {1.0, 2.0};
  const RedistributionPolicy::Kind kinds[] = {
      RedistributionPolicy::Kind::EqualShare,
      RedistributionPolicy::Kind::PerTarget,
      RedistributionPolicy::Kind::UtilityWeighted};

  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const int n = 3 + static_cast<int>(seed % 8);
    const auto game = random_game(seed, n, spec);
    const auto rec = recommended_params(game);
    const SimplexPoint x0 =
        random_simplex_point(split_seed(4242, seed), n, game.gamma);

    for (const auto kind : kinds) {
      RedistributionPolicy policy;
      policy.kind = kind;
      policy.tau = rec.tau;
      BetterResponseConfig cfg;
      cfg.epsilon = rec.epsilon;
      cfg.record_trajectory = true;
      const auto result = better_response_solve(game, x0, policy, cfg);

      std::ostringstream oss;
      oss << "game seed " << seed << ", policy " << static_cast<int>(kind)
          << ": ";
      if (result.status != SolveStatus::Converged) {
        oss << "status " << to_string(result.status);
        reason = oss.str();
        return false;
      }
      if (!envy_sets(game, result.x_final).all_empty()) {
        oss << "envy sets are not empty at the final point";
        reason = oss.str();
        return false;
      }
      double mass = 0.0;
      for (double v : result.x_final.values()) mass += v;
      if (std::fabs(mass - game.gamma) > 1e-12) {
        oss << "final mass " << mass << " drifted from " << game.gamma;
        reason = oss.str();
        return false;
      }
      for (std::size_t k = 0; k + 1 < result.trajectory.size(); ++k) {
        if (result.trajectory[k + 1].min_utility <
            result.trajectory[k].min_utility - 1e-12) {
          oss << "minimum utility decreased at step "
              << result.trajectory[k + 1].k;
          reason = oss.str();
          return false;
        }
        double step_mass = 0.0;
        for (double v : result.trajectory[k].x.values()) step_mass += v;
        if (std::fabs(step_mass - game.gamma) > 1e-12) {
          oss << "mass drifted mid-run at step " << result.trajectory[k].k;
          reason = oss.str();
          return false;
        }
      }
    }
  }
  return true;
}

// 8. Oversized transfers cycle with period 2; compliant ones converge.
bool cycle_tightness(std::string& reason) {
  const auto game = testutil::two_action_game();
  const SimplexPoint x0({0.755, 0.245}, 1.0);

  RedistributionPolicy aggressive;
  aggressive.kind = RedistributionPolicy::Kind::EqualShare;
  aggressive.tau = 0.51 / 0.755;
  BetterResponseConfig unsafe_cfg;
  unsafe_cfg.epsilon = 0.01;
  unsafe_cfg.unsafe_allow_bound_violation = true;
  const auto cycling = better_response_solve(game, x0, aggressive, unsafe_cfg);
  if (cycling.status != SolveStatus::CycleDetected ||
      !cycling.cycle_period.has_value() || *cycling.cycle_period != 2 ||
      cycling.iterations > 10) {
    std::ostringstream oss;
    oss << "aggressive run: status " << to_string(cycling.status) << " after "
        << cycling.iterations << " iterations";
    reason = oss.str();
    return false;
  }

  RedistributionPolicy compliant;
  compliant.kind = RedistributionPolicy::Kind::EqualShare;
  compliant.tau = 0.45;
  BetterResponseConfig safe_cfg;
  safe_cfg.epsilon = 0.05;
  const auto settled = better_response_solve(game, x0, compliant, safe_cfg);
  if (settled.status != SolveStatus::Converged ||
      !is_inertial(game, settled.x_final).inertial) {
    std::ostringstream oss;
    oss << "compliant run: status " << to_string(settled.status);
    reason = oss.str();
    return false;
  }
  return true;
}

// Brute-force reference projection: enumerate every support set, solve the
// equality-constrained least squares on it, keep the feasible minimizer.
std::vector<double> oracle_projection(const std::vector<double>& v,
                                      double mass) {
  const std::size_t n = v.size();
  std::vector<double> best;
  double best_dist = 0.0;
  for (unsigned support = 1; support < (1u << n); ++support) {
    int count = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (support & (1u << i)) {
        ++count;
        sum += v[i];
      }
    }
    const double shift = (mass - sum) / count;
    std::vector<double> candidate(n, 0.0);
    bool feasible = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (support & (1u << i)) {
        candidate[i] = v[i] + shift;
        if (candidate[i] < -1e-12) feasible = false;
      }
    }
    if (!feasible) continue;
    double dist = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dist += (candidate[i] - v[i]) * (candidate[i] - v[i]);
    }
    if (best.empty() || dist < best_dist) {
      best = std::move(candidate);
      best_dist = dist;
    }
  }
  return best;
}

// 9. The projection routine matches the brute-force oracle.
bool projection_oracle(std::string& reason) {
  Rng rng(31415);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(7));
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& entry : v) entry = rng.uniform(-3.0, 3.0);
    const double mass = (trial % 2 == 0) ? 1.0 : rng.uniform(0.1, 3.0);

    const auto got = project_simplex(v, mass);
    const auto expected = oracle_projection(v, mass);
    const double deviation = testutil::linf(got.values(), expected);
    if (deviation > 1e-9) {
      std::ostringstream oss;
      oss << "trial " << trial << " (n = " << n << "): deviation "
          << deviation;
      reason = oss.str();
      return false;
    }
  }
  return true;
}

// 10. The stacked formulation collapses to the single-class one exactly,
// and identical twin classes reduce to a single-class equilibrium.
bool multiclass_reduction(std::string& reason) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GameSpec spec;
    spec.cost_range = {0.05, 0.5};
    spec.b_range = {1.0, 2.0};
    const int n = 3 + static_cast<int>(seed % 6);
    const auto game = random_game(seed, n, spec);
    const auto mc = as_multiclass(game);
    const auto rec = recommended_params(game);
    const SimplexPoint x0 =
        random_simplex_point(split_seed(606, seed), n, game.gamma);
    const StackedPoint xs0(std::vector<SimplexPoint>{x0});

    const auto f_single = operator_f_values(game, x0.values());
    const auto f_multi = operator_f_multi(mc, xs0);
    if (f_single != f_multi) {
      reason = "operator values differ between formulations";
      return false;
    }
    if (is_inertial(game, x0).inertial !=
        is_multiclass_inertial(mc, xs0).inertial) {
      reason = "inertial verdicts differ between formulations";
      return false;
    }

    RedistributionPolicy policy;
    policy.kind = RedistributionPolicy::Kind::EqualShare;
    policy.tau = rec.tau;
    BetterResponseConfig cfg;
    cfg.epsilon = rec.epsilon;
    cfg.record_trajectory = true;
    const auto single = better_response_solve(game, x0, policy, cfg);
    const auto multi = better_response_multi_solve(mc, xs0, policy, cfg);
    if (single.status != multi.status ||
        single.iterations != multi.iterations ||
        single.gap_final != multi.gap_final ||
        single.x_final.values() != multi.x_final.block(0).values() ||
        single.trajectory.size() != multi.trajectory.size()) {
      std::ostringstream oss;
      oss << "solver runs diverge on game seed " << seed;
      reason = oss.str();
      return false;
    }
    for (std::size_t k = 0; k < single.trajectory.size(); ++k) {
      const auto& a = single.trajectory[k];
      const auto& b = multi.trajectory[k];
      if (a.k != b.k || a.x.values() != b.x.block(0).values() ||
          a.min_utility != b.min_utility || a.gap != b.gap ||
          a.moved_mass != b.moved_mass) {
        std::ostringstream oss;
        oss << "trajectories diverge at step " << a.k << " on game seed "
            << seed;
        reason = oss.str();
        return false;
      }
    }
  }

  // Two identical classes sharing the reference game, half mass each.
  const auto game = testutil::example_game();
  MultiClassGame twins;
  twins.num_classes = 2;
  twins.n = 3;
  twins.gammas = {0.5, 0.5};
  twins.utilities = {game.utilities, game.utilities};
  twins.costs = {game.costs, game.costs};

  const SimplexPoint half({0.2, 0.1, 0.2}, 0.5);
  const StackedPoint xs0(std::vector<SimplexPoint>{half, half});
  RedistributionPolicy policy;
  policy.kind = RedistributionPolicy::Kind::EqualShare;
  policy.tau = 0.09;
  BetterResponseConfig cfg;
  cfg.epsilon = 0.01;
  const auto result = better_response_multi_solve(twins, xs0, policy, cfg);
  if (result.status != SolveStatus::Converged) {
    std::ostringstream oss;
    oss << "twin-class run: status " << to_string(result.status);
    reason = oss.str();
    return false;
  }
  const SimplexPoint reduced(reduce(result.x_final), 1.0);
  if (!is_inertial(game, reduced).inertial) {
    reason = "reduced twin-class point is not single-class inertial";
    return false;
  }
  return true;
}

// 11. Bundled 18-node scenario: both algorithms converge with recommended
// parameters and the final states verify inertial.
bool scenario_run(std::string& reason) {
  const auto config =
      io::load_scenario(std::string(INERTIAL_DATA_DIR) +
                        "/hk18_scenario.json");
  const auto game = build_ridehailing(config.graph, config.gamma);
  const auto rec = recommended_params(game);
  const SimplexPoint x0 = SimplexPoint::uniform(game.n, game.gamma);

  ProjectionConfig proj_cfg;
  proj_cfg.rho = rec.rho;
  proj_cfg.tol = 1e-6;
  proj_cfg.max_iter = 1000000;
  const auto projected = projection_solve(game, x0, proj_cfg);
  if (projected.status != SolveStatus::Converged ||
      !projected.verified_inertial) {
    std::ostringstream oss;
    oss << "projection: status " << to_string(projected.status) << " after "
        << projected.iterations << " iterations, verified_inertial "
        << (projected.verified_inertial ? "true" : "false");
    reason = oss.str();
    return false;
  }

  RedistributionPolicy policy;
  policy.kind = RedistributionPolicy::Kind::EqualShare;
  policy.tau = rec.tau;
  BetterResponseConfig br_cfg;
  br_cfg.epsilon = rec.epsilon;
  br_cfg.tol = 1e-6;
  br_cfg.max_iter = 1000000;
  const auto improved = better_response_solve(game, x0, policy, br_cfg);
  if (improved.status != SolveStatus::Converged ||
      !improved.verified_inertial) {
    std::ostringstream oss;
    oss << "better-response: status " << to_string(improved.status)
        << " after " << improved.iterations << " iterations, "
        << "verified_inertial "
        << (improved.verified_inertial ? "true" : "false");
    reason = oss.str();
    return false;
  }
  return true;
}

}  // namespace

int main() {
  std::string reason;

  reason.clear();
  report(1, "reference-game point battery (Nash and inertial verdicts)",
         point_battery(reason), reason);

  reason.clear();
  report(2, "inertial region grid sweep matches the inequality system",
         region_oracle(reason), reason);

  reason.clear();
  report(3, "inertial verdicts coincide with zero gap on random points",
         gap_equivalence(reason), reason);

  reason.clear();
  report(4, "finite-difference Jacobian symmetric part and eigenvalue",
         jacobian_reproduction(reason), reason);

  reason.clear();
  report(5, "monotonicity probe flags F and clears negated utilities",
         probe_classification(reason), reason);

  reason.clear();
  report(6, "unit-step projection converges in one iteration from 100 starts",
         one_step_convergence(reason), reason);

  reason.clear();
  report(7, "better-response converges on 50 seeded games, all policies",
         better_response_convergence(reason), reason);

  reason.clear();
  report(8, "oversized transfers cycle with period 2; compliant ones settle",
         cycle_tightness(reason), reason);

  reason.clear();
  report(9, "simplex projection matches the active-set oracle",
         projection_oracle(reason), reason);

  reason.clear();
  report(10, "multi-class formulation reduces exactly to single class",
         multiclass_reduction(reason), reason);

  reason.clear();
  report(11, "bundled 18-node scenario converges under both algorithms",
         scenario_run(reason), reason);

  if (failures == 0) {
    std::printf("all 11 criteria passed\n");
  } else {
    std::printf("%d criteria failed\n", failures);
  }
  return failures;
}
