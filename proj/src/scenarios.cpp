#include "inertial/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_map>

#include "inertial/rng.hpp"

namespace inertial {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void check_range(const std::pair<double, double>& r, const char* name) {
  if (!std::isfinite(r.first) || !std::isfinite(r.second) ||
      r.first > r.second) {
    throw InvalidSpec(std::string(name) + " range [" + fmt(r.first) + ", " +
                      fmt(r.second) + "] is not a valid interval");
  }
}

}  // namespace

PopulationGame build_ridehailing(const CityGraph& graph, double gamma,
                                 std::vector<std::string>* warnings) {
  const int n = static_cast<int>(graph.nodes.size());
  if (n < 1) throw InvalidGraph("graph has no nodes");
  if (!std::isfinite(gamma) || gamma <= 0.0) {
    throw InvalidGraph("total mass gamma must be positive, got " + fmt(gamma));
  }
  if (!std::isfinite(graph.beta) || graph.beta < 0.0) {
    throw InvalidGraph("beta must be nonnegative, got " + fmt(graph.beta));
  }
  if (!std::isfinite(graph.big_cost) || graph.big_cost <= 0.0) {
    throw InvalidGraph("big_cost must be positive, got " +
                       fmt(graph.big_cost));
  }

  std::unordered_map<int, int> index;  // node id -> action index
  for (int k = 0; k < n; ++k) {
    const CityNode& node = graph.nodes[static_cast<std::size_t>(k)];
    if (!index.emplace(node.id, k).second) {
      throw InvalidGraph("duplicate node id " + std::to_string(node.id));
    }
    if (!std::isfinite(node.alpha)) {
      throw InvalidGraph("node " + std::to_string(node.id) +
                         ": alpha is not finite");
    }
    if (!std::isfinite(node.p) || !(node.p > 1.0)) {
      throw InvalidGraph("node " + std::to_string(node.id) +
                         ": demand level p must exceed 1, got " +
                         fmt(node.p));
    }
  }

  PopulationGame game;
  game.n = n;
  game.gamma = gamma;
  game.utilities.reserve(static_cast<std::size_t>(n));
  for (const CityNode& node : graph.nodes) {
    game.utilities.push_back(RideHailingUtility{node.alpha, graph.beta,
                                                node.p});
    if (warnings && node.alpha <= graph.beta) {
      warnings->push_back("node " + std::to_string(node.id) + ": alpha = " +
                          fmt(node.alpha) + " <= beta = " + fmt(graph.beta) +
                          "; the utility is negative everywhere");
    }
  }

  game.costs = SwitchingCosts::zero(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) game.costs.set(i, j, graph.big_cost);
    }
  }
  std::set<std::pair<int, int>> seen;
  for (const CityEdge& edge : graph.edges) {
    const auto it_i = index.find(edge.i);
    const auto it_j = index.find(edge.j);
    if (it_i == index.end() || it_j == index.end()) {
      throw InvalidGraph("edge (" + std::to_string(edge.i) + ", " +
                         std::to_string(edge.j) +
                         ") references a missing node");
    }
    if (edge.i == edge.j) {
      throw InvalidGraph("edge (" + std::to_string(edge.i) + ", " +
                         std::to_string(edge.j) +
                         ") is a self-loop; diagonal costs are fixed at zero");
    }
    if (!std::isfinite(edge.fuel_cost) || edge.fuel_cost <= 0.0) {
      throw InvalidGraph("edge (" + std::to_string(edge.i) + ", " +
                         std::to_string(edge.j) +
                         "): fuel cost must be positive, got " +
                         fmt(edge.fuel_cost));
    }
    const auto key = std::minmax(it_i->second, it_j->second);
    if (!seen.insert(key).second) {
      throw InvalidGraph("duplicate edge (" + std::to_string(edge.i) + ", " +
                         std::to_string(edge.j) + ")");
    }
    game.costs.set(it_i->second, it_j->second, edge.fuel_cost);
    game.costs.set(it_j->second, it_i->second, edge.fuel_cost);
  }
  return game;
}

RecommendedParams recommended_params(const PopulationGame& game) {
  const auto violations = validate_game(game);
  if (!violations.empty()) {
    throw InvalidSpec("recommended_params: invalid game: " +
                      violations.front().message);
  }
  const double c_min = game.costs.min_off_diagonal();
  if (!(c_min > 0.0)) {
    throw ZeroCMin("recommended_params: minimum off-diagonal switching cost "
                   "is zero");
  }
  const double L = lipschitz_bounds(game).global;
  if (!(L > 0.0)) {
    throw ZeroLipschitz("recommended_params: all utilities are flat; the "
                        "step-size rule 1/L is undefined");
  }
  RecommendedParams out;
  out.rho = 1.0 / L;
  out.tau = std::min(1.0, 0.9 * c_min / (L * game.gamma));
  out.epsilon = 0.1 * c_min / L;
  return out;
}

PopulationGame random_game(std::uint64_t seed, int n, const GameSpec& spec) {
  if (n < 1) {
    throw InvalidSpec("random_game: need n >= 1, got " + std::to_string(n));
  }
  if (!std::isfinite(spec.gamma) || spec.gamma <= 0.0) {
    throw InvalidSpec("random_game: gamma must be positive, got " +
                      fmt(spec.gamma));
  }
  check_range(spec.cost_range, "cost");
  if (!(spec.cost_range.first > 0.0)) {
    throw InvalidSpec("random_game: cost range must start above 0 to keep "
                      "c_min positive, got " + fmt(spec.cost_range.first));
  }
  if (spec.family == GameSpec::Family::Affine) {
    check_range(spec.a_range, "affine base");
    check_range(spec.b_range, "affine slope");
    if (spec.b_range.first < 0.0) {
      throw InvalidSpec("random_game: affine slopes must be nonnegative, "
                        "range starts at " + fmt(spec.b_range.first));
    }
  } else {
    check_range(spec.alpha_range, "alpha");
    check_range(spec.p_range, "p");
    if (!(spec.p_range.first > 1.0)) {
      throw InvalidSpec("random_game: demand level p must exceed 1, range "
                        "starts at " + fmt(spec.p_range.first));
    }
    if (!std::isfinite(spec.beta) || spec.beta < 0.0) {
      throw InvalidSpec("random_game: beta must be nonnegative, got " +
                        fmt(spec.beta));
    }
  }

  Rng rng(seed);
  PopulationGame game;
  game.n = n;
  game.gamma = spec.gamma;
  game.utilities.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (spec.family == GameSpec::Family::Affine) {
      const double a = rng.uniform(spec.a_range.first, spec.a_range.second);
      const double b = rng.uniform(spec.b_range.first, spec.b_range.second);
      game.utilities.push_back(AffineUtility{a, b});
    } else {
      const double alpha =
          rng.uniform(spec.alpha_range.first, spec.alpha_range.second);
      const double p = rng.uniform(spec.p_range.first, spec.p_range.second);
      game.utilities.push_back(RideHailingUtility{alpha, spec.beta, p});
    }
  }
  game.costs = SwitchingCosts::zero(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      game.costs.set(i, j,
                     rng.uniform(spec.cost_range.first,
                                 spec.cost_range.second));
    }
  }
  return game;
}

SimplexPoint random_simplex_point(std::uint64_t seed, int n, double mass) {
  if (n < 1) {
    throw InvalidSpec("random_simplex_point: need n >= 1, got " +
                      std::to_string(n));
  }
  Rng rng(seed);
  return SimplexPoint(sample_simplex(rng, n, mass), mass);
}

}  // namespace inertial
