#pragma once

#include <string>
#include <variant>
#include <vector>

#include "inertial/errors.hpp"

namespace inertial {

// Simplex membership slack: entries in [-kSimplexTol, 0) are clamped to 0,
// and |sum - mass| must stay below it (scaled by max(1, mass)).
inline constexpr double kSimplexTol = 1e-12;

// Envy comparisons are strict beyond this slack, so exact ties never count
// as envy and actions with mass <= tol are treated as unused.
inline constexpr double kDefaultEnvyTol = 1e-9;

// u(x) = base - slope * x with slope >= 0.
struct AffineUtility {
  double base = 0.0;
  double slope = 0.0;
};

// Driver revenue per unit time: u(x) = alpha * v(x) - (1 - v(x)) * beta,
// where v(x) = 1 - (x / (1 + x))^p is the occupied-time fraction when x
// drivers compete for p passenger requests. alpha is the average profit per
// trip, beta the operating cost while vacant, and p > 1 the local demand.
struct RideHailingUtility {
  double alpha = 0.0;
  double beta = 0.0;
  double p = 2.0;
};

struct ConstantUtility {
  double value = 0.0;
};

using UtilityModel =
    std::variant<AffineUtility, RideHailingUtility, ConstantUtility>;

double evaluate(const UtilityModel& model, double x);

// Upper bound on |u'| over x >= 0. For the ride-hailing family this is
// 4 (alpha + beta) p (p-1)^(p-1) / (p+1)^(p+1), the slope magnitude at the
// interior maximizer x = (p-1)/2 of |v'|.
double slope_bound(const UtilityModel& model);

// Integral of u over [0, upper]; closed form except for the ride-hailing
// family, whose occupancy term has no elementary antiderivative for real p
// and is integrated by adaptive quadrature well below 1e-10 error.
double integral(const UtilityModel& model, double upper);

bool non_increasing(const UtilityModel& model);

// Row-major n x n matrix of switching costs c_ij >= 0 with c_ii = 0.
class SwitchingCosts {
 public:
  SwitchingCosts() = default;
  SwitchingCosts(int n, std::vector<double> row_major);

  static SwitchingCosts zero(int n);

  int size() const { return n_; }
  double at(int i, int j) const { return m_[idx(i, j)]; }
  void set(int i, int j, double v) { m_[idx(i, j)] = v; }

  // Minimum c_ij over i != j; 0 when there is a single action.
  double min_off_diagonal() const;

  const std::vector<double>& data() const { return m_; }

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(j);
  }

  int n_ = 0;
  std::vector<double> m_;
};

// A population of total mass gamma distributed over n actions. Utilities
// are per-action functions of the action's own mass; `coupled` is reserved
// for general joint tables and is rejected by every operation here.
struct PopulationGame {
  int n = 0;
  std::vector<UtilityModel> utilities;
  SwitchingCosts costs;
  double gamma = 1.0;
  bool coupled = false;
};

// Point of the scaled simplex {x >= 0, sum x = mass}. Construction clamps
// entries in [-kSimplexTol, 0) to zero and rejects anything worse.
class SimplexPoint {
 public:
  SimplexPoint(std::vector<double> values, double mass);

  static SimplexPoint uniform(int n, double mass);

  int size() const { return static_cast<int>(x_.size()); }
  double mass() const { return mass_; }
  double operator[](int i) const { return x_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& values() const { return x_; }

 private:
  std::vector<double> x_;
  double mass_ = 0.0;
};

enum class ViolationKind {
  BadActionCount,
  UtilityCount,
  CostShape,
  NonPositiveMass,
  UnsupportedCoupled,
  BadUtilityParam,
  NonzeroDiagonal,
  NegativeCost,
  NonFiniteValue,
};

// One structural defect; i/j are 0-based indices (-1 when not applicable)
// while the rendered message uses the 1-based action ids reports use.
struct Violation {
  ViolationKind kind;
  int i = -1;
  int j = -1;
  std::string message;
};

// Collects every defect instead of stopping at the first; an empty result
// means the game satisfies all structural invariants. Idempotent.
std::vector<Violation> validate_game(const PopulationGame& game);

// u_i(x_i) for every action. The raw-vector overload accepts any point of
// the nonnegative orthant; the SimplexPoint overload also checks that the
// point's mass matches game.gamma.
std::vector<double> evaluate_utilities(const PopulationGame& game,
                                       const std::vector<double>& x);
std::vector<double> evaluate_utilities(const PopulationGame& game,
                                       const SimplexPoint& x);

struct LipschitzBounds {
  std::vector<double> per_action;
  double global = 0.0;
};

LipschitzBounds lipschitz_bounds(const PopulationGame& game);

// Adds action n+1 with constant utility `exit_utility` and zero switching
// cost to and from every action. Note the zero cost row/column drives the
// game's minimum off-diagonal cost to zero, which the better-response
// solver's preconditions reject; the caller decides how to proceed.
PopulationGame extend_with_exit(const PopulationGame& game,
                                double exit_utility);

}  // namespace inertial
