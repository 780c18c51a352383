#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "inertial/equilibrium.hpp"
#include "inertial/game.hpp"
#include "inertial/solvers.hpp"

namespace inertial {

// Several populations over one shared action set. Class a has mass
// gammas[a], its own utility models utilities[a] (all evaluated at the
// reduced distribution, the componentwise sum over classes), and its own
// switching costs costs[a].
struct MultiClassGame {
  int num_classes = 0;
  int n = 0;
  std::vector<double> gammas;
  std::vector<std::vector<UtilityModel>> utilities;
  std::vector<SwitchingCosts> costs;
};

// One simplex block per class; block a carries class a's mass.
class StackedPoint {
 public:
  StackedPoint() = default;
  explicit StackedPoint(std::vector<SimplexPoint> blocks);

  int num_classes() const { return static_cast<int>(blocks_.size()); }
  int block_size() const;
  const SimplexPoint& block(int a) const {
    return blocks_[static_cast<std::size_t>(a)];
  }
  const std::vector<SimplexPoint>& blocks() const { return blocks_; }

  // Class-major concatenation: entry a*n + i is class a's mass on action i.
  std::vector<double> flat() const;

 private:
  std::vector<SimplexPoint> blocks_;
};

// Class a viewed as a standalone single-class game.
PopulationGame single_class(const MultiClassGame& mc, int a);

// Wraps a single-class game as a one-class instance.
MultiClassGame as_multiclass(const PopulationGame& game);

// Structural checks per class plus cross-class shape consistency; messages
// are prefixed with the 1-based class id.
std::vector<Violation> validate_multiclass(const MultiClassGame& mc);

// Reduced distribution x_r = sum over classes, the coordinate every
// utility model reads.
std::vector<double> reduce(const StackedPoint& xs);

// Block-stacked operator: block a holds F computed from class a's
// utilities at the reduced point and class a's costs. Each block is
// nonnegative with an exact zero minimum.
std::vector<double> operator_f_multi(const MultiClassGame& mc,
                                     const StackedPoint& xs);

struct MultiInertialVerdict {
  bool inertial = false;
  std::vector<EnvyReport> reports;  // one per class
};

// Inertial iff every class's envy sets are empty, with class a's utilities
// and costs read at the reduced point and the mass antecedent read from
// class a's own block.
MultiInertialVerdict is_multiclass_inertial(const MultiClassGame& mc,
                                            const StackedPoint& xs,
                                            double tol = kDefaultEnvyTol);

// Sum over classes of F^a . x^a - gamma^a * min_j F^a_j; zero exactly on
// multi-class inertial points.
double vi_gap_multi(const MultiClassGame& mc, const StackedPoint& xs);

// Guarantee preconditions for the class-wise better response: per-class
// policy and utility checks plus the aggregate feasibility condition
// sum_a tau * gamma^a <= (min_a c_min^a) / L_max - epsilon, where L_max is
// the largest per-class Lipschitz bound. Empty when satisfied.
std::vector<std::string> better_response_multi_preconditions(
    const MultiClassGame& mc, const RedistributionPolicy& policy,
    const BetterResponseConfig& cfg);

// Synchronous class-wise better response: every class computes its envy
// sets at the current reduced point and routes mass along its own envy
// edges per the shared policy; all blocks advance together. With one class
// this repeats better_response_solve arithmetic bit for bit.
SolveResult<StackedPoint> better_response_multi_solve(
    const MultiClassGame& mc, const StackedPoint& xs0,
    const RedistributionPolicy& policy, const BetterResponseConfig& cfg);

// Monotonicity probe for the stacked operator over the product of the
// class simplexes.
ProbeReport monotonicity_probe_multi(ProbeOperator which,
                                     const MultiClassGame& mc,
                                     std::uint64_t seed, int num_samples,
                                     double tol = 1e-9);

}  // namespace inertial
