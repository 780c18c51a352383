#pragma once

#include <string>
#include <utility>
#include <vector>

#include "inertial/game.hpp"
#include "inertial/multiclass.hpp"
#include "inertial/scenarios.hpp"
#include "inertial/solvers.hpp"

namespace inertial::io {

// All emitted numbers carry 17 significant digits so every value parses
// back to the identical double; all writers are byte-deterministic for
// identical inputs. Malformed input of any kind throws ParseError.

std::string fmt_g17(double v);

// JSON literal builders for config echoes.
std::string json_number(double v);
std::string json_int(long long v);
std::string json_bool(bool v);
std::string json_string(const std::string& s);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Game files: {"costs": [[..] per row], "gamma": g, "n": n, "utilities":
// [{"kind": "affine", "a": .., "b": ..} | {"kind": "ridehailing",
// "alpha": .., "beta": .., "p": ..} | {"kind": "constant", "c": ..}]}.
// Loading validates structure and game invariants.
std::string game_to_json(const PopulationGame& game);
PopulationGame game_from_json(const std::string& text);
PopulationGame load_game(const std::string& path);
void save_game(const PopulationGame& game, const std::string& path);

// Multi-class game files add {"A": classes, "gammas": [..]} and make
// utilities/costs per-class arrays. text_is_multiclass detects the "A" key
// so the CLI can dispatch on file content.
bool text_is_multiclass(const std::string& text);
std::string multiclass_to_json(const MultiClassGame& mc);
MultiClassGame multiclass_from_json(const std::string& text);
MultiClassGame load_multiclass(const std::string& path);
void save_multiclass(const MultiClassGame& mc, const std::string& path);

// Points: a bare array, {"x": [..]}, or a solver result ({"x_final": [..]}).
// Stacked points: {"blocks": [[..]..]}, a bare array of arrays, or a
// multi-class result ({"x_final_blocks": [[..]..]}).
std::vector<double> point_from_json(const std::string& text);
std::vector<double> load_point(const std::string& path);
std::vector<std::vector<double>> blocks_from_json(const std::string& text);
std::vector<std::vector<double>> load_blocks(const std::string& path);

// Inline CLI points: comma-separated numbers, e.g. "0.4,0.3,0.3".
std::vector<double> parse_number_list(const std::string& text);

// Run metadata echoed into result files. config values must already be
// JSON literals (see the json_* builders); keys are emitted sorted.
struct ResultMeta {
  std::string algorithm;
  std::vector<std::pair<std::string, std::string>> config;
};

std::string result_to_json(const SolveResult<SimplexPoint>& result,
                           const ResultMeta& meta);
std::string result_to_json(const SolveResult<StackedPoint>& result,
                           const ResultMeta& meta);

// Trajectory CSV: "k,x_1,..,x_n,min_utility,gap,moved_mass"; stacked runs
// name the columns x[a][i] with 1-based class and action ids.
std::string trajectory_to_csv(
    const std::vector<TrajectoryRecord<SimplexPoint>>& trajectory);
std::string trajectory_to_csv(
    const std::vector<TrajectoryRecord<StackedPoint>>& trajectory);

// Scenario inputs. Nodes CSV header: id,alpha,p. Edges CSV header:
// i,j,fuel_cost. Blank lines and '#' comment lines are skipped; fields are
// whitespace-trimmed. The scenario config JSON {"beta": .., "big_cost": ..,
// "gamma": .., "nodes_path": "..", "edges_path": ".."} resolves the CSV
// paths relative to its own directory.
std::vector<CityNode> parse_nodes_csv(const std::string& text);
std::vector<CityEdge> parse_edges_csv(const std::string& text);

struct ScenarioConfig {
  CityGraph graph;
  double gamma = 1.0;
};

ScenarioConfig load_scenario(const std::string& config_path);

}  // namespace inertial::io
