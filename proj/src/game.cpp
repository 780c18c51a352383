#include "inertial/game.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace inertial {

namespace {

bool finite(double v) { return std::isfinite(v); }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Occupied-time fraction; exactly 1 at x = 0 since pow(0, p) == 0 for p > 0.
double occupancy(double x, double p) {
  if (x < 0.0) x = 0.0;  // tiny negatives from upstream clamping
  const double ratio = x / (1.0 + x);
  return 1.0 - std::pow(ratio, p);
}

}  // namespace

double evaluate(const UtilityModel& model, double x) {
  return std::visit(
      [x](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, AffineUtility>) {
          return m.base - m.slope * x;
        } else if constexpr (std::is_same_v<T, RideHailingUtility>) {
          const double v = occupancy(x, m.p);
          return m.alpha * v - (1.0 - v) * m.beta;
        } else {
          return m.value;
        }
      },
      model);
}

double slope_bound(const UtilityModel& model) {
  return std::visit(
      [](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, AffineUtility>) {
          return std::abs(m.slope);
        } else if constexpr (std::is_same_v<T, RideHailingUtility>) {
          if (!(m.p > 1.0)) {
            throw UnboundedSlope("slope_bound: ride-hailing requires p > 1");
          }
          // max over t in [0,1) of p t^(p-1) (1-t)^2 with t = x/(1+x),
          // attained at t = (p-1)/(p+1).
          const double shape = 4.0 * m.p * std::pow(m.p - 1.0, m.p - 1.0) /
                               std::pow(m.p + 1.0, m.p + 1.0);
          return std::abs(m.alpha + m.beta) * shape;
        } else {
          return 0.0;
        }
      },
      model);
}

double integral(const UtilityModel& model, double upper) {
  return std::visit(
      [upper](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, AffineUtility>) {
          return m.base * upper - 0.5 * m.slope * upper * upper;
        } else if constexpr (std::is_same_v<T, RideHailingUtility>) {
          if (upper == 0.0) return 0.0;
          const double p = m.p;
          const auto vacancy = [p](double s) {
            return std::pow(s / (1.0 + s), p);
          };
          const double burnt =
              boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
                  vacancy, 0.0, upper, 12, 1e-13);
          return (m.alpha + m.beta) * (upper - burnt) - m.beta * upper;
        } else {
          return m.value * upper;
        }
      },
      model);
}

bool non_increasing(const UtilityModel& model) {
  return std::visit(
      [](const auto& m) -> bool {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, AffineUtility>) {
          return m.slope >= 0.0;
        } else if constexpr (std::is_same_v<T, RideHailingUtility>) {
          return m.alpha + m.beta >= 0.0;  // u' = (alpha + beta) v', v' <= 0
        } else {
          return true;
        }
      },
      model);
}

SwitchingCosts::SwitchingCosts(int n, std::vector<double> row_major)
    : n_(n), m_(std::move(row_major)) {
  if (n < 0 || m_.size() != static_cast<std::size_t>(n) * n) {
    throw DimensionMismatch("SwitchingCosts: need n*n row-major entries");
  }
}

SwitchingCosts SwitchingCosts::zero(int n) {
  return SwitchingCosts(n, std::vector<double>(
                               static_cast<std::size_t>(n) * n, 0.0));
}

double SwitchingCosts::min_off_diagonal() const {
  if (n_ <= 1) return 0.0;
  double lo = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      if (i != j) lo = std::min(lo, at(i, j));
    }
  }
  return lo;
}

SimplexPoint::SimplexPoint(std::vector<double> values, double mass)
    : x_(std::move(values)), mass_(mass) {
  if (x_.empty()) throw SimplexViolation("SimplexPoint: empty vector");
  if (!finite(mass_) || mass_ <= 0.0) {
    throw SimplexViolation("SimplexPoint: mass must be positive, got " +
                           fmt(mass_));
  }
  const double slack = kSimplexTol * std::max(1.0, mass_);
  double sum = 0.0;
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!finite(x_[i])) {
      throw SimplexViolation("SimplexPoint: non-finite entry " +
                             std::to_string(i + 1));
    }
    if (x_[i] < 0.0) {
      if (x_[i] < -slack) {
        throw SimplexViolation("SimplexPoint: entry " + std::to_string(i + 1) +
                               " = " + fmt(x_[i]) + " below zero");
      }
      x_[i] = 0.0;
    }
    sum += x_[i];
  }
  if (std::abs(sum - mass_) > slack) {
    throw SimplexViolation("SimplexPoint: entries sum to " + fmt(sum) +
                           ", expected " + fmt(mass_));
  }
}

SimplexPoint SimplexPoint::uniform(int n, double mass) {
  if (n < 1) throw SimplexViolation("SimplexPoint: need n >= 1");
  return SimplexPoint(
      std::vector<double>(static_cast<std::size_t>(n), mass / n), mass);
}

namespace {

void check_utility_params(const UtilityModel& model, int i,
                          std::vector<Violation>& out) {
  const auto bad = [&](const std::string& what) {
    out.push_back({ViolationKind::BadUtilityParam, i, -1,
                   "BadUtilityParam(" + std::to_string(i + 1) + "): " + what});
  };
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, AffineUtility>) {
          if (!finite(m.base) || !finite(m.slope)) bad("non-finite affine");
          else if (m.slope < 0.0) bad("affine slope < 0");
        } else if constexpr (std::is_same_v<T, RideHailingUtility>) {
          if (!finite(m.alpha) || !finite(m.beta) || !finite(m.p)) {
            bad("non-finite ride-hailing");
          } else {
            if (!(m.p > 1.0)) bad("ride-hailing p <= 1");
            if (m.beta < 0.0) bad("ride-hailing beta < 0");
          }
        } else {
          if (!finite(m.value)) bad("non-finite constant");
        }
      },
      model);
}

}  // namespace

std::vector<Violation> validate_game(const PopulationGame& game) {
  std::vector<Violation> out;
  if (game.n < 1) {
    out.push_back({ViolationKind::BadActionCount, -1, -1,
                   "BadActionCount: n = " + std::to_string(game.n)});
    return out;
  }
  if (!finite(game.gamma) || game.gamma <= 0.0) {
    out.push_back({ViolationKind::NonPositiveMass, -1, -1,
                   "NonPositiveMass: gamma = " + fmt(game.gamma)});
  }
  if (game.coupled) {
    out.push_back({ViolationKind::UnsupportedCoupled, -1, -1,
                   "UnsupportedCoupled: joint utility tables are not "
                   "supported"});
  }
  if (static_cast<int>(game.utilities.size()) != game.n) {
    out.push_back(
        {ViolationKind::UtilityCount, -1, -1,
         "UtilityCount: " + std::to_string(game.utilities.size()) +
             " utilities for n = " + std::to_string(game.n)});
  } else {
    for (int i = 0; i < game.n; ++i) {
      check_utility_params(game.utilities[static_cast<std::size_t>(i)], i,
                           out);
    }
  }
  if (game.costs.size() != game.n) {
    out.push_back({ViolationKind::CostShape, -1, -1,
                   "CostShape: cost matrix is " +
                       std::to_string(game.costs.size()) + "x" +
                       std::to_string(game.costs.size()) + " for n = " +
                       std::to_string(game.n)});
    return out;
  }
  for (int i = 0; i < game.n; ++i) {
    for (int j = 0; j < game.n; ++j) {
      const double c = game.costs.at(i, j);
      if (!finite(c)) {
        out.push_back({ViolationKind::NonFiniteValue, i, j,
                       "NonFiniteValue(" + std::to_string(i + 1) + "," +
                           std::to_string(j + 1) + "): cost"});
        continue;
      }
      if (i == j && c != 0.0) {
        out.push_back({ViolationKind::NonzeroDiagonal, i, i,
                       "NonzeroDiagonal(" + std::to_string(i + 1) +
                           "): c = " + fmt(c)});
      }
      if (i != j && c < 0.0) {
        out.push_back({ViolationKind::NegativeCost, i, j,
                       "NegativeCost(" + std::to_string(i + 1) + "," +
                           std::to_string(j + 1) + "): c = " + fmt(c)});
      }
    }
  }
  return out;
}

std::vector<double> evaluate_utilities(const PopulationGame& game,
                                       const std::vector<double>& x) {
  if (game.coupled) {
    throw NonSeparable("evaluate_utilities: coupled games are unsupported");
  }
  if (static_cast<int>(x.size()) != game.n ||
      static_cast<int>(game.utilities.size()) != game.n) {
    throw DimensionMismatch("evaluate_utilities: point/game size mismatch");
  }
  std::vector<double> u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    u[i] = evaluate(game.utilities[i], x[i]);
  }
  return u;
}

std::vector<double> evaluate_utilities(const PopulationGame& game,
                                       const SimplexPoint& x) {
  if (std::abs(x.mass() - game.gamma) >
      kSimplexTol * std::max(1.0, game.gamma)) {
    throw MassMismatch("evaluate_utilities: point mass " + fmt(x.mass()) +
                       " != gamma " + fmt(game.gamma));
  }
  return evaluate_utilities(game, x.values());
}

LipschitzBounds lipschitz_bounds(const PopulationGame& game) {
  LipschitzBounds out;
  out.per_action.reserve(game.utilities.size());
  for (const auto& model : game.utilities) {
    const double L = slope_bound(model);
    out.per_action.push_back(L);
    out.global = std::max(out.global, L);
  }
  return out;
}

PopulationGame extend_with_exit(const PopulationGame& game,
                                double exit_utility) {
  PopulationGame out;
  out.n = game.n + 1;
  out.gamma = game.gamma;
  out.coupled = game.coupled;
  out.utilities = game.utilities;
  out.utilities.push_back(ConstantUtility{exit_utility});
  out.costs = SwitchingCosts::zero(out.n);
  for (int i = 0; i < game.n; ++i) {
    for (int j = 0; j < game.n; ++j) {
      out.costs.set(i, j, game.costs.at(i, j));
    }
  }
  return out;
}

}  // namespace inertial
