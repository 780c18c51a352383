#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "inertial/equilibrium.hpp"
#include "inertial/game.hpp"

namespace inertial {

// Euclidean projection onto {x >= 0, sum x = mass} by sort-and-threshold,
// O(n log n). The result satisfies the KKT form x_i = max(v_i - theta, 0)
// for a single threshold theta.
SimplexPoint project_simplex(const std::vector<double>& v, double mass);

// Fixed-point iteration x(k+1) = Proj[x(k) + rho * u(x(k))]. Converges to
// the Nash set for separable non-increasing utilities whenever rho < 2/L;
// with enforce_guarantee the solver refuses other configurations instead of
// iterating without a guarantee.
struct ProjectionConfig {
  double rho = 0.0;
  double tol = 1e-6;          // stop when ||x(k+1) - x(k)||_2 <= tol
  std::int64_t max_iter = 1000000;
  bool enforce_guarantee = true;
  bool record_trajectory = false;
};

// tau is the transfer fraction owned by the policy (see
// RedistributionPolicy); the feasibility precondition couples it with
// epsilon as tau * gamma <= c_min/L - epsilon, which caps every action's
// per-step inflow below the level that could destroy the minimum utility's
// monotone ascent. envy_tol is the envy comparison slack used throughout
// the run.
struct BetterResponseConfig {
  double epsilon = 0.0;
  double tol = 1e-6;
  double envy_tol = kDefaultEnvyTol;
  std::int64_t max_iter = 1000000;
  int cycle_window = 64;  // states compared under 1e-10 infinity norm
  bool unsafe_allow_bound_violation = false;
  bool record_trajectory = false;
  // Sequential sweeps in seed-shuffled action order, re-reading the state
  // after each action, instead of the default synchronous update.
  bool async = false;
  std::uint64_t async_seed = 0;
};

// How an envious action splits the mass it gives up. With outflow share
// tau in (0, 1]:
//   EqualShare      tau * x_i split evenly over the envy set
//   PerTarget       tau * x_i to each envied action; needs tau*(n-1) <= 1
//   UtilityWeighted tau * x_i split proportionally to the envy margins
struct RedistributionPolicy {
  enum class Kind { EqualShare, PerTarget, UtilityWeighted };
  Kind kind = Kind::EqualShare;
  double tau = 0.0;
};

template <class Point>
struct TrajectoryRecord {
  std::int64_t k = 0;
  Point x;
  double min_utility = 0.0;
  double gap = 0.0;
  double moved_mass = 0.0;
};

enum class SolveStatus {
  Converged,
  MaxIter,
  CycleDetected,
  PreconditionViolated,
};

const char* to_string(SolveStatus status);

// iterations is the trajectory index of x_final. Trajectories, when
// recorded, keep every step up to 10^5 and then every 100th plus the final
// point. For Converged results x_final re-verified as an equilibrium
// before being reported (Nash for the projection solver, inertial for
// better-response).
template <class Point>
struct SolveResult {
  SolveStatus status = SolveStatus::MaxIter;
  Point x_final;
  std::int64_t iterations = 0;
  double gap_final = 0.0;
  bool verified_inertial = false;
  std::optional<std::int64_t> cycle_period;
  std::string message;
  std::vector<TrajectoryRecord<Point>> trajectory;
};

struct Transfer {
  int from = -1;
  int to = -1;
  double amount = 0.0;
};

// Unmet guarantee preconditions, empty when the configuration is covered.
std::vector<std::string> projection_preconditions(const PopulationGame& game,
                                                  const ProjectionConfig& cfg);
std::vector<std::string> better_response_preconditions(
    const PopulationGame& game, const RedistributionPolicy& policy,
    const BetterResponseConfig& cfg);

SolveResult<SimplexPoint> projection_solve(const PopulationGame& game,
                                           const SimplexPoint& x0,
                                           const ProjectionConfig& cfg);

struct StepResult {
  SimplexPoint x_next;
  std::vector<Transfer> transfers;
};

// One synchronous better-response step: envy sets frozen at x, then every
// envious action routes mass along its envy edges per the policy. Throws
// BoundViolation if the policy asks for more outflow than an action holds
// (reachable with PerTarget when tau*(n-1) > 1).
StepResult better_response_step(const PopulationGame& game,
                                const SimplexPoint& x,
                                const RedistributionPolicy& policy,
                                const BetterResponseConfig& cfg);

struct BoundCheckIssue {
  std::string what;
  double margin = 0.0;  // amount by which the bound is exceeded
};

struct BoundCheck {
  bool ok = true;
  std::vector<BoundCheckIssue> issues;
};

// Audits a transfer plan against the convergence bounds at state x: flows
// only along envy edges, per-source outflow in [tau * x_i, x_i] for
// envious sources, and per-destination inflow at most c_min/L - epsilon.
BoundCheck check_transfer_bounds(const PopulationGame& game,
                                 const SimplexPoint& x,
                                 const std::vector<Transfer>& transfers,
                                 double tau, double epsilon,
                                 double envy_tol = kDefaultEnvyTol);

SolveResult<SimplexPoint> better_response_solve(
    const PopulationGame& game, const SimplexPoint& x0,
    const RedistributionPolicy& policy, const BetterResponseConfig& cfg);

// theta(x) = sum_i integral of u_i over [0, x_i]; gradient equals u, so the
// projection iteration ascends theta when rho <= 1/L. Any nonnegative
// vector is accepted; the point does not need to lie on the simplex.
double potential_value(const PopulationGame& game,
                       const std::vector<double>& x);
double potential_value(const PopulationGame& game, const SimplexPoint& x);

namespace detail {

// Transfer plan for one population block; shared by the single- and
// multi-class solvers so that the multi-class loop with one class repeats
// the single-class arithmetic bit for bit.
struct BlockPlan {
  std::vector<double> delta;
  std::vector<Transfer> transfers;
  double moved = 0.0;
};

BlockPlan block_transfers(const std::vector<double>& u,
                          const SwitchingCosts& costs,
                          const std::vector<double>& x,
                          const EnvyReport& envy,
                          const RedistributionPolicy& policy);

double sum_squares(const std::vector<double>& v);
double min_of(const std::vector<double>& v);
double gap_from(const std::vector<double>& f, const std::vector<double>& x,
                double gamma);
bool states_match(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace detail

}  // namespace inertial
