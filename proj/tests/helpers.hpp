#pragma once

#include <cmath>
#include <vector>

#include "inertial/game.hpp"

namespace testutil {

// Three-action instance used across the suites: two identical affine
// utilities, one cheaper action, and an asymmetric cost matrix whose
// minimum off-diagonal entry is 0.1.
inline inertial::PopulationGame example_game() {
  inertial::PopulationGame game;
  game.n = 3;
  game.utilities = {inertial::AffineUtility{1.2, 1.0},
                    inertial::AffineUtility{1.2, 1.0},
                    inertial::AffineUtility{1.0, 1.0}};
  game.costs = inertial::SwitchingCosts(
      3, {0.0, 0.2, 0.3, 1.0, 0.0, 0.8, 0.1, 1.2, 0.0});
  game.gamma = 1.0;
  return game;
}

// Two-action instance with u_i = 1 - x_i and symmetric cost 0.5; the
// textbook case where an oversized transfer fraction produces a period-2
// cycle while a compliant one converges.
inline inertial::PopulationGame two_action_game() {
  inertial::PopulationGame game;
  game.n = 2;
  game.utilities = {inertial::AffineUtility{1.0, 1.0},
                    inertial::AffineUtility{1.0, 1.0}};
  game.costs = inertial::SwitchingCosts(2, {0.0, 0.5, 0.5, 0.0});
  game.gamma = 1.0;
  return game;
}

inline bool near(double a, double b, double tol) {
  return std::fabs(a - b) <= tol;
}

inline double linf(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::fabs(a[i] - b[i]));
  }
  return worst;
}

}  // namespace testutil
