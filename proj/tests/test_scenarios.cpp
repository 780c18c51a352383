#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "inertial/equilibrium.hpp"
#include "inertial/io.hpp"
#include "inertial/rng.hpp"
#include "inertial/scenarios.hpp"
#include "inertial/solvers.hpp"

using namespace inertial;

namespace {

CityGraph triangle() {
  CityGraph graph;
  graph.nodes = {{1, 80.0, 2.0}, {2, 95.0, 3.0}, {3, 60.0, 2.5}};
  graph.edges = {{1, 2, 2.0}, {2, 3, 2.0}, {1, 3, 2.0}};
  return graph;
}

}  // namespace

TEST_CASE("a fully connected triangle gets symmetric fuel costs") {
  const auto game = build_ridehailing(triangle(), 1.0);
  CHECK(game.n == 3);
  CHECK(validate_game(game).empty());
  for (int i = 0; i < 3; ++i) {
    CHECK(game.costs.at(i, i) == 0.0);
    for (int j = 0; j < 3; ++j) {
      if (i != j) CHECK(game.costs.at(i, j) == 2.0);
      CHECK(game.costs.at(i, j) == game.costs.at(j, i));
    }
  }
}

TEST_CASE("missing edges price at big_cost") {
  CityGraph graph;
  graph.nodes = {{1, 80.0, 2.0}, {2, 95.0, 3.0}, {3, 60.0, 2.5},
                 {4, 70.0, 1.8}};
  graph.edges = {{1, 2, 3.0}, {2, 3, 3.0}, {3, 4, 3.0}};
  const auto game = build_ridehailing(graph, 1.0);
  CHECK(game.costs.at(0, 3) == graph.big_cost);
  CHECK(game.costs.at(3, 0) == graph.big_cost);
  CHECK(game.costs.at(0, 1) == 3.0);
  CHECK(game.costs.min_off_diagonal() == 3.0);
}

TEST_CASE("built utilities start at alpha and strictly decrease") {
  const auto game = build_ridehailing(triangle(), 1.0);
  const std::vector<double> alphas = {80.0, 95.0, 60.0};
  for (int i = 0; i < 3; ++i) {
    const auto& model = game.utilities[static_cast<std::size_t>(i)];
    CHECK(evaluate(model, 0.0) == alphas[static_cast<std::size_t>(i)]);
    double prev = evaluate(model, 0.0);
    for (int k = 1; k <= 64; ++k) {
      const double cur = evaluate(model, k / 64.0);
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("low-profit nodes produce a warning but still build") {
  CityGraph graph = triangle();
  graph.nodes[2].alpha = 5.0;  // below beta = 6.34
  std::vector<std::string> warnings;
  const auto game = build_ridehailing(graph, 1.0, &warnings);
  CHECK(game.n == 3);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("node 3") != std::string::npos);
}

TEST_CASE("graph validation rejects malformed inputs") {
  CityGraph dup_id = triangle();
  dup_id.nodes[1].id = 1;
  CHECK_THROWS_AS(build_ridehailing(dup_id, 1.0), InvalidGraph);

  CityGraph bad_p = triangle();
  bad_p.nodes[0].p = 1.0;
  CHECK_THROWS_AS(build_ridehailing(bad_p, 1.0), InvalidGraph);

  CityGraph unknown = triangle();
  unknown.edges[0].j = 9;
  CHECK_THROWS_AS(build_ridehailing(unknown, 1.0), InvalidGraph);

  CityGraph self_loop = triangle();
  self_loop.edges[0] = {2, 2, 1.0};
  CHECK_THROWS_AS(build_ridehailing(self_loop, 1.0), InvalidGraph);

  CityGraph free_edge = triangle();
  free_edge.edges[0].fuel_cost = 0.0;
  CHECK_THROWS_AS(build_ridehailing(free_edge, 1.0), InvalidGraph);

  CityGraph doubled = triangle();
  doubled.edges.push_back({2, 1, 4.0});
  CHECK_THROWS_AS(build_ridehailing(doubled, 1.0), InvalidGraph);

  CHECK_THROWS_AS(build_ridehailing(triangle(), 0.0), InvalidGraph);

  CityGraph empty;
  CHECK_THROWS_AS(build_ridehailing(empty, 1.0), InvalidGraph);
}

TEST_CASE("recommended parameters hit the example game's anchors") {
  const auto rec = recommended_params(testutil::example_game());
  CHECK(rec.rho == 1.0);
  CHECK(testutil::near(rec.tau, 0.09, 1e-15));
  CHECK(testutil::near(rec.epsilon, 0.01, 1e-15));
}

TEST_CASE("recommended parameters always satisfy the solver guarantees") {
  Rng rng(83);
  for (int t = 0; t < 30; ++t) {
    GameSpec spec;
    if (t % 2 == 0) {
      spec.family = GameSpec::Family::RideHailing;
    }
    const int n = 3 + static_cast<int>(rng.below(8));
    const auto game = random_game(rng.next(), n, spec);
    const auto rec = recommended_params(game);

    ProjectionConfig pcfg;
    pcfg.rho = rec.rho;
    CHECK(projection_preconditions(game, pcfg).empty());

    RedistributionPolicy policy;
    policy.kind = RedistributionPolicy::Kind::EqualShare;
    policy.tau = rec.tau;
    BetterResponseConfig bcfg;
    bcfg.epsilon = rec.epsilon;
    CHECK(better_response_preconditions(game, policy, bcfg).empty());

    const double cap =
        game.costs.min_off_diagonal() / lipschitz_bounds(game).global;
    CHECK(rec.rho < 2.0 / lipschitz_bounds(game).global);
    CHECK(rec.tau * game.gamma <= cap - rec.epsilon + 1e-15);
    CHECK(rec.tau <= 1.0);
  }
}

TEST_CASE("recommended parameters refuse degenerate games") {
  const auto extended = extend_with_exit(testutil::example_game(), 0.5);
  CHECK_THROWS_AS(recommended_params(extended), ZeroCMin);

  PopulationGame flat = testutil::example_game();
  flat.utilities = {ConstantUtility{1.0}, ConstantUtility{1.0},
                    ConstantUtility{1.0}};
  CHECK_THROWS_AS(recommended_params(flat), ZeroLipschitz);
}

TEST_CASE("random games respect their spec ranges") {
  GameSpec spec;
  spec.a_range = {0.5, 1.5};
  spec.b_range = {1.0, 2.0};
  spec.cost_range = {0.05, 0.1};
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const auto game = random_game(seed, 5, spec);
    CHECK(validate_game(game).empty());
    CHECK(game.gamma == 1.0);
    for (const auto& model : game.utilities) {
      const auto& affine = std::get<AffineUtility>(model);
      CHECK(affine.base >= 0.5);
      CHECK(affine.base <= 1.5);
      CHECK(affine.slope >= 1.0);
      CHECK(affine.slope <= 2.0);
    }
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        if (i == j) continue;
        CHECK(game.costs.at(i, j) >= 0.05);
        CHECK(game.costs.at(i, j) <= 0.1);
      }
    }
  }

  GameSpec ride;
  ride.family = GameSpec::Family::RideHailing;
  const auto game = random_game(9, 4, ride);
  CHECK(validate_game(game).empty());
  for (const auto& model : game.utilities) {
    const auto& rh = std::get<RideHailingUtility>(model);
    CHECK(rh.alpha >= ride.alpha_range.first);
    CHECK(rh.alpha <= ride.alpha_range.second);
    CHECK(rh.p > 1.0);
    CHECK(rh.beta == ride.beta);
  }
}

TEST_CASE("random games are reproducible and seeds matter") {
  const auto a = io::game_to_json(random_game(42, 6));
  const auto b = io::game_to_json(random_game(42, 6));
  const auto c = io::game_to_json(random_game(43, 6));
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("random game generation rejects bad specs") {
  CHECK_THROWS_AS(random_game(1, 0), InvalidSpec);
  GameSpec zero_cost;
  zero_cost.cost_range = {0.0, 0.1};
  CHECK_THROWS_AS(random_game(1, 3, zero_cost), InvalidSpec);
  GameSpec inverted;
  inverted.a_range = {2.0, 1.0};
  CHECK_THROWS_AS(random_game(1, 3, inverted), InvalidSpec);
  GameSpec shallow;
  shallow.family = GameSpec::Family::RideHailing;
  shallow.p_range = {0.5, 3.0};
  CHECK_THROWS_AS(random_game(1, 3, shallow), InvalidSpec);
}

TEST_CASE("random simplex points are uniform in expectation") {
  const int kDraws = 100000;
  const int n = 4;
  std::vector<double> mean(n, 0.0);
  for (int t = 0; t < kDraws; ++t) {
    const auto x = random_simplex_point(split_seed(7, t), n, 2.0);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      CHECK(x[i] >= 0.0);
      sum += x[i];
      mean[static_cast<std::size_t>(i)] += x[i];
    }
    REQUIRE(testutil::near(sum, 2.0, 1e-12 * 2.0));
  }
  for (double m : mean) {
    CHECK(testutil::near(m / kDraws, 0.5, 0.005));
  }
  // Reproducibility per seed.
  const auto x1 = random_simplex_point(11, n, 1.0);
  const auto x2 = random_simplex_point(11, n, 1.0);
  CHECK(x1.values() == x2.values());
}

TEST_CASE("the bundled eighteen-node dataset builds a well-posed game") {
  const auto cfg = io::load_scenario(std::string(INERTIAL_DATA_DIR) +
                                     "/hk18_scenario.json");
  CHECK(cfg.gamma == 1.0);
  CHECK(cfg.graph.beta == 6.34);
  REQUIRE(cfg.graph.nodes.size() == 18);
  REQUIRE(cfg.graph.edges.size() == 32);

  std::vector<std::string> warnings;
  const auto game = build_ridehailing(cfg.graph, cfg.gamma, &warnings);
  CHECK(warnings.empty());
  CHECK(game.n == 18);
  CHECK(validate_game(game).empty());
  CHECK(game.costs.min_off_diagonal() == 2.5);

  // Cost symmetry and the big-cost fill for non-adjacent pairs.
  int genuine = 0;
  for (int i = 0; i < 18; ++i) {
    for (int j = i + 1; j < 18; ++j) {
      CHECK(game.costs.at(i, j) == game.costs.at(j, i));
      if (game.costs.at(i, j) < cfg.graph.big_cost) ++genuine;
    }
  }
  CHECK(genuine == 32);

  // The closed-form bound dominates sampled slopes on every node.
  const auto bounds = lipschitz_bounds(game);
  for (int i = 0; i < 18; ++i) {
    const auto& model = game.utilities[static_cast<std::size_t>(i)];
    double prev = evaluate(model, 0.0);
    double grid_max = 0.0;
    const int kPoints = 10000;
    for (int k = 1; k <= kPoints; ++k) {
      const double cur = evaluate(model, static_cast<double>(k) / kPoints);
      grid_max = std::max(grid_max, std::fabs(cur - prev) * kPoints);
      prev = cur;
    }
    CHECK(bounds.per_action[static_cast<std::size_t>(i)] >= grid_max);
  }
  CHECK(bounds.global > 30.0);
  CHECK(bounds.global < 31.0);

  const auto rec = recommended_params(game);
  ProjectionConfig pcfg;
  pcfg.rho = rec.rho;
  CHECK(projection_preconditions(game, pcfg).empty());
}
