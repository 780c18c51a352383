#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "inertial/game.hpp"

namespace inertial {

struct CityNode {
  int id = 0;
  double alpha = 0.0;  // average profit per trip
  double p = 2.0;      // local demand level, > 1
};

// Undirected; listing (i, j) covers (j, i).
struct CityEdge {
  int i = 0;
  int j = 0;
  double fuel_cost = 0.0;  // > 0, the switching cost between neighborhoods
};

// Neighborhood graph for the ride-hailing scenario. Non-adjacent pairs get
// big_cost: large enough that no driver relocates across them, finite so
// the arithmetic stays exact.
struct CityGraph {
  std::vector<CityNode> nodes;
  std::vector<CityEdge> edges;
  double beta = 6.34;      // operating cost while vacant
  double big_cost = 1e6;
};

// Game over the graph's nodes in listing order: ride-hailing utilities
// (alpha_i, beta, p_i), fuel costs on edges (symmetric), big_cost across
// non-adjacent pairs, zero diagonal, total mass gamma. Appends a note per
// node with alpha <= beta (utility negative everywhere) to `warnings` when
// provided. Throws InvalidGraph on structural defects.
PopulationGame build_ridehailing(const CityGraph& graph, double gamma,
                                 std::vector<std::string>* warnings = nullptr);

// rho = 1/L, tau = min(1, 0.9 * c_min / (L * gamma)),
// epsilon = 0.1 * c_min / L. Satisfies both solvers' guarantee
// preconditions whenever the game does at all.
struct RecommendedParams {
  double rho = 0.0;
  double tau = 0.0;
  double epsilon = 0.0;
};

RecommendedParams recommended_params(const PopulationGame& game);

// Ranges are inclusive [lo, hi]; cost_range applies to every off-diagonal
// entry independently, so c_min >= cost_range.first by construction.
struct GameSpec {
  enum class Family { Affine, RideHailing };
  Family family = Family::Affine;
  std::pair<double, double> a_range{0.5, 1.5};       // affine base
  std::pair<double, double> b_range{0.5, 2.0};       // affine slope
  std::pair<double, double> alpha_range{30.0, 140.0};
  std::pair<double, double> p_range{1.5, 8.0};
  double beta = 6.34;
  std::pair<double, double> cost_range{0.1, 1.0};
  double gamma = 1.0;
};

// Deterministic per seed: utility parameters first (per action), then the
// off-diagonal costs in row-major order. Throws InvalidSpec on bad ranges.
PopulationGame random_game(std::uint64_t seed, int n,
                           const GameSpec& spec = {});

// Uniform on {x >= 0, sum x = mass}, deterministic per seed.
SimplexPoint random_simplex_point(std::uint64_t seed, int n, double mass);

}  // namespace inertial
