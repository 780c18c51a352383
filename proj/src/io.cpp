#include "inertial/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace inertial::io {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(what + ": " + e.what());
  }
}

double as_number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ParseError(what + " must be a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& what) {
  if (!j.is_number_integer()) throw ParseError(what + " must be an integer");
  return j.get<int>();
}

std::vector<double> as_vector(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(as_number(j[i], what + "[" + std::to_string(i + 1) + "]"));
  }
  return out;
}

const json& field(const json& j, const char* key, const std::string& what) {
  const auto it = j.find(key);
  if (it == j.end()) {
    throw ParseError(what + ": missing field \"" + key + "\"");
  }
  return *it;
}

std::string utility_to_json(const UtilityModel& model) {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, AffineUtility>) {
          return "{\"a\": " + json_number(m.base) + ", \"b\": " +
                 json_number(m.slope) + ", \"kind\": \"affine\"}";
        } else if constexpr (std::is_same_v<T, RideHailingUtility>) {
          return "{\"alpha\": " + json_number(m.alpha) + ", \"beta\": " +
                 json_number(m.beta) + ", \"kind\": \"ridehailing\", \"p\": " +
                 json_number(m.p) + "}";
        } else {
          return "{\"c\": " + json_number(m.value) +
                 ", \"kind\": \"constant\"}";
        }
      },
      model);
}

UtilityModel utility_from_json(const json& j, const std::string& what) {
  if (!j.is_object()) throw ParseError(what + " must be an object");
  const json& kind = field(j, "kind", what);
  if (!kind.is_string()) throw ParseError(what + ": kind must be a string");
  const std::string k = kind.get<std::string>();
  if (k == "affine") {
    return AffineUtility{as_number(field(j, "a", what), what + ".a"),
                         as_number(field(j, "b", what), what + ".b")};
  }
  if (k == "ridehailing") {
    return RideHailingUtility{
        as_number(field(j, "alpha", what), what + ".alpha"),
        as_number(field(j, "beta", what), what + ".beta"),
        as_number(field(j, "p", what), what + ".p")};
  }
  if (k == "constant") {
    return ConstantUtility{as_number(field(j, "c", what), what + ".c")};
  }
  throw ParseError(what + ": unknown utility kind \"" + k + "\"");
}

std::string costs_to_json(const SwitchingCosts& costs) {
  std::string out = "[";
  for (int i = 0; i < costs.size(); ++i) {
    if (i) out += ", ";
    out += "[";
    for (int j = 0; j < costs.size(); ++j) {
      if (j) out += ", ";
      out += json_number(costs.at(i, j));
    }
    out += "]";
  }
  return out + "]";
}

SwitchingCosts costs_from_json(const json& j, int n, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    throw ParseError(what + " must be an array of " + std::to_string(n) +
                     " rows");
  }
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const std::vector<double> row =
        as_vector(j[static_cast<std::size_t>(i)],
                  what + " row " + std::to_string(i + 1));
    if (static_cast<int>(row.size()) != n) {
      throw ParseError(what + " row " + std::to_string(i + 1) + " has " +
                       std::to_string(row.size()) + " entries for n = " +
                       std::to_string(n));
    }
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return SwitchingCosts(n, std::move(flat));
}

std::string utilities_to_json(const std::vector<UtilityModel>& utilities) {
  std::string out = "[";
  for (std::size_t i = 0; i < utilities.size(); ++i) {
    if (i) out += ", ";
    out += utility_to_json(utilities[i]);
  }
  return out + "]";
}

std::vector<UtilityModel> utilities_from_json(const json& j, int n,
                                              const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    throw ParseError(what + " must be an array of " + std::to_string(n) +
                     " utility models");
  }
  std::vector<UtilityModel> out;
  out.reserve(j.size());
  for (int i = 0; i < n; ++i) {
    out.push_back(utility_from_json(j[static_cast<std::size_t>(i)],
                                    what + "[" + std::to_string(i + 1) + "]"));
  }
  return out;
}

void require_valid(const std::vector<Violation>& violations,
                   const std::string& what) {
  if (violations.empty()) return;
  std::string msg = what + ": invalid game:";
  for (const auto& v : violations) msg += " " + v.message + ";";
  msg.pop_back();
  throw ParseError(msg);
}

std::string vector_to_json(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += json_number(v[i]);
  }
  return out + "]";
}

std::string result_body(SolveStatus status, std::int64_t iterations,
                        double gap_final, bool verified_inertial,
                        const std::optional<std::int64_t>& cycle_period,
                        const std::string& message, const ResultMeta& meta,
                        const std::string& x_fields) {
  std::string out = "{\n";
  out += "  \"algorithm\": " + json_string(meta.algorithm) + ",\n";
  out += "  \"config\": {";
  auto config = meta.config;
  std::sort(config.begin(), config.end());
  for (std::size_t i = 0; i < config.size(); ++i) {
    if (i) out += ", ";
    out += json_string(config[i].first) + ": " + config[i].second;
  }
  out += "},\n";
  if (cycle_period) {
    out += "  \"cycle_period\": " + json_int(*cycle_period) + ",\n";
  }
  out += "  \"gap_final\": " + json_number(gap_final) + ",\n";
  out += "  \"iterations\": " + json_int(iterations) + ",\n";
  if (!message.empty()) {
    out += "  \"message\": " + json_string(message) + ",\n";
  }
  out += "  \"status\": " + json_string(to_string(status)) + ",\n";
  out += "  \"verified_inertial\": " + json_bool(verified_inertial) + ",\n";
  out += x_fields;
  out += "\n}\n";
  return out;
}

void csv_row(std::string& out, std::int64_t k,
             const std::vector<double>& coords, double min_utility,
             double gap, double moved_mass) {
  out += std::to_string(k);
  for (double v : coords) {
    out += ",";
    out += fmt_g17(v);
  }
  out += ",";
  out += fmt_g17(min_utility);
  out += ",";
  out += fmt_g17(gap);
  out += ",";
  out += fmt_g17(moved_mass);
  out += "\n";
}

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Non-empty, non-comment lines split on commas, fields trimmed.
std::vector<std::vector<std::string>> csv_lines(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) {
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = t.find(',', start);
      fields.push_back(trim(t.substr(start, comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    out.push_back(std::move(fields));
  }
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  if (s.empty()) throw ParseError(what + ": empty number");
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError(what + ": cannot parse \"" + s + "\" as a number");
  }
  if (used != s.size()) {
    throw ParseError(what + ": trailing characters in \"" + s + "\"");
  }
  return v;
}

int parse_int(const std::string& s, const std::string& what) {
  if (s.empty()) throw ParseError(what + ": empty integer");
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    throw ParseError(what + ": cannot parse \"" + s + "\" as an integer");
  }
  if (used != s.size()) {
    throw ParseError(what + ": trailing characters in \"" + s + "\"");
  }
  return v;
}

void check_header(const std::vector<std::string>& got,
                  const std::vector<std::string>& want,
                  const std::string& what) {
  if (got != want) {
    std::string expect;
    for (const auto& w : want) {
      if (!expect.empty()) expect += ",";
      expect += w;
    }
    throw ParseError(what + ": first data line must be the header \"" +
                     expect + "\"");
  }
}

}  // namespace

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string json_number(double v) {
  if (!std::isfinite(v)) return "null";
  return fmt_g17(v);
}

std::string json_int(long long v) { return std::to_string(v); }

std::string json_bool(bool v) { return v ? "true" : "false"; }

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x",
                        static_cast<unsigned>(c));
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << content;
  if (!out) throw ParseError("write to " + path + " failed");
}

std::string game_to_json(const PopulationGame& game) {
  std::string out = "{\n";
  out += "  \"costs\": " + costs_to_json(game.costs) + ",\n";
  out += "  \"gamma\": " + json_number(game.gamma) + ",\n";
  out += "  \"n\": " + json_int(game.n) + ",\n";
  out += "  \"utilities\": " + utilities_to_json(game.utilities) + "\n";
  out += "}\n";
  return out;
}

PopulationGame game_from_json(const std::string& text) {
  const json j = parse_json(text, "game");
  if (!j.is_object()) throw ParseError("game: top level must be an object");
  PopulationGame game;
  game.n = as_int(field(j, "n", "game"), "game.n");
  if (game.n < 1) throw ParseError("game.n must be at least 1");
  game.gamma = as_number(field(j, "gamma", "game"), "game.gamma");
  game.utilities =
      utilities_from_json(field(j, "utilities", "game"), game.n,
                          "game.utilities");
  game.costs = costs_from_json(field(j, "costs", "game"), game.n,
                               "game.costs");
  require_valid(validate_game(game), "game");
  return game;
}

PopulationGame load_game(const std::string& path) {
  return game_from_json(read_file(path));
}

void save_game(const PopulationGame& game, const std::string& path) {
  write_file(path, game_to_json(game));
}

bool text_is_multiclass(const std::string& text) {
  try {
    const json j = json::parse(text);
    return j.is_object() && j.contains("A");
  } catch (const json::parse_error&) {
    return false;
  }
}

std::string multiclass_to_json(const MultiClassGame& mc) {
  std::string out = "{\n";
  out += "  \"A\": " + json_int(mc.num_classes) + ",\n";
  out += "  \"costs\": [";
  for (std::size_t a = 0; a < mc.costs.size(); ++a) {
    if (a) out += ", ";
    out += costs_to_json(mc.costs[a]);
  }
  out += "],\n";
  out += "  \"gammas\": " + vector_to_json(mc.gammas) + ",\n";
  out += "  \"n\": " + json_int(mc.n) + ",\n";
  out += "  \"utilities\": [";
  for (std::size_t a = 0; a < mc.utilities.size(); ++a) {
    if (a) out += ", ";
    out += utilities_to_json(mc.utilities[a]);
  }
  out += "]\n";
  out += "}\n";
  return out;
}

MultiClassGame multiclass_from_json(const std::string& text) {
  const json j = parse_json(text, "multiclass game");
  if (!j.is_object()) {
    throw ParseError("multiclass game: top level must be an object");
  }
  MultiClassGame mc;
  mc.num_classes = as_int(field(j, "A", "multiclass game"), "game.A");
  mc.n = as_int(field(j, "n", "multiclass game"), "game.n");
  if (mc.num_classes < 1) throw ParseError("game.A must be at least 1");
  if (mc.n < 1) throw ParseError("game.n must be at least 1");
  mc.gammas = as_vector(field(j, "gammas", "multiclass game"), "game.gammas");
  if (static_cast<int>(mc.gammas.size()) != mc.num_classes) {
    throw ParseError("game.gammas must have A = " +
                     std::to_string(mc.num_classes) + " entries");
  }
  const json& utilities = field(j, "utilities", "multiclass game");
  const json& costs = field(j, "costs", "multiclass game");
  if (!utilities.is_array() ||
      static_cast<int>(utilities.size()) != mc.num_classes) {
    throw ParseError("game.utilities must have one row per class");
  }
  if (!costs.is_array() || static_cast<int>(costs.size()) != mc.num_classes) {
    throw ParseError("game.costs must have one matrix per class");
  }
  for (int a = 0; a < mc.num_classes; ++a) {
    const std::string tag = "class " + std::to_string(a + 1);
    mc.utilities.push_back(
        utilities_from_json(utilities[static_cast<std::size_t>(a)], mc.n,
                            tag + " utilities"));
    mc.costs.push_back(costs_from_json(costs[static_cast<std::size_t>(a)],
                                       mc.n, tag + " costs"));
  }
  require_valid(validate_multiclass(mc), "multiclass game");
  return mc;
}

MultiClassGame load_multiclass(const std::string& path) {
  return multiclass_from_json(read_file(path));
}

void save_multiclass(const MultiClassGame& mc, const std::string& path) {
  write_file(path, multiclass_to_json(mc));
}

std::vector<double> point_from_json(const std::string& text) {
  const json j = parse_json(text, "point");
  if (j.is_array()) return as_vector(j, "point");
  if (j.is_object()) {
    if (j.contains("x")) return as_vector(j["x"], "point.x");
    if (j.contains("x_final")) {
      return as_vector(j["x_final"], "point.x_final");
    }
  }
  throw ParseError(
      "point: expected an array, {\"x\": [..]}, or {\"x_final\": [..]}");
}

std::vector<double> load_point(const std::string& path) {
  return point_from_json(read_file(path));
}

std::vector<std::vector<double>> blocks_from_json(const std::string& text) {
  const json j = parse_json(text, "stacked point");
  const json* rows = nullptr;
  if (j.is_array()) {
    rows = &j;
  } else if (j.is_object() && j.contains("blocks")) {
    rows = &j["blocks"];
  } else if (j.is_object() && j.contains("x_final_blocks")) {
    rows = &j["x_final_blocks"];
  }
  if (!rows || !rows->is_array() || rows->empty()) {
    throw ParseError("stacked point: expected a nonempty array of blocks, "
                     "{\"blocks\": [..]}, or {\"x_final_blocks\": [..]}");
  }
  std::vector<std::vector<double>> out;
  out.reserve(rows->size());
  for (std::size_t a = 0; a < rows->size(); ++a) {
    out.push_back(as_vector((*rows)[a],
                            "stacked point block " + std::to_string(a + 1)));
  }
  return out;
}

std::vector<std::vector<double>> load_blocks(const std::string& path) {
  return blocks_from_json(read_file(path));
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    out.push_back(parse_double(trim(text.substr(start, comma - start)),
                               "inline point"));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string result_to_json(const SolveResult<SimplexPoint>& result,
                           const ResultMeta& meta) {
  const std::string x_fields =
      "  \"x_final\": " + vector_to_json(result.x_final.values());
  return result_body(result.status, result.iterations, result.gap_final,
                     result.verified_inertial, result.cycle_period,
                     result.message, meta, x_fields);
}

std::string result_to_json(const SolveResult<StackedPoint>& result,
                           const ResultMeta& meta) {
  std::string x_fields = "  \"x_final_blocks\": [";
  for (int a = 0; a < result.x_final.num_classes(); ++a) {
    if (a) x_fields += ", ";
    x_fields += vector_to_json(result.x_final.block(a).values());
  }
  x_fields += "],\n";
  x_fields += "  \"x_reduced\": ";
  x_fields += result.x_final.num_classes() > 0
                  ? vector_to_json(reduce(result.x_final))
                  : "[]";
  return result_body(result.status, result.iterations, result.gap_final,
                     result.verified_inertial, result.cycle_period,
                     result.message, meta, x_fields);
}

std::string trajectory_to_csv(
    const std::vector<TrajectoryRecord<SimplexPoint>>& trajectory) {
  std::string out = "k";
  const int n = trajectory.empty() ? 0 : trajectory.front().x.size();
  for (int i = 1; i <= n; ++i) out += ",x_" + std::to_string(i);
  out += ",min_utility,gap,moved_mass\n";
  for (const auto& rec : trajectory) {
    csv_row(out, rec.k, rec.x.values(), rec.min_utility, rec.gap,
            rec.moved_mass);
  }
  return out;
}

std::string trajectory_to_csv(
    const std::vector<TrajectoryRecord<StackedPoint>>& trajectory) {
  std::string out = "k";
  if (!trajectory.empty()) {
    const StackedPoint& first = trajectory.front().x;
    for (int a = 1; a <= first.num_classes(); ++a) {
      for (int i = 1; i <= first.block_size(); ++i) {
        out += ",x[" + std::to_string(a) + "][" + std::to_string(i) + "]";
      }
    }
  }
  out += ",min_utility,gap,moved_mass\n";
  for (const auto& rec : trajectory) {
    csv_row(out, rec.k, rec.x.flat(), rec.min_utility, rec.gap,
            rec.moved_mass);
  }
  return out;
}

std::vector<CityNode> parse_nodes_csv(const std::string& text) {
  const auto lines = csv_lines(text);
  if (lines.empty()) throw ParseError("nodes file: no content");
  check_header(lines.front(), {"id", "alpha", "p"}, "nodes file");
  std::vector<CityNode> out;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::string tag = "nodes file line " + std::to_string(r + 1);
    if (lines[r].size() != 3) {
      throw ParseError(tag + ": expected 3 fields, got " +
                       std::to_string(lines[r].size()));
    }
    out.push_back(CityNode{parse_int(lines[r][0], tag + " id"),
                           parse_double(lines[r][1], tag + " alpha"),
                           parse_double(lines[r][2], tag + " p")});
  }
  return out;
}

std::vector<CityEdge> parse_edges_csv(const std::string& text) {
  const auto lines = csv_lines(text);
  if (lines.empty()) throw ParseError("edges file: no content");
  check_header(lines.front(), {"i", "j", "fuel_cost"}, "edges file");
  std::vector<CityEdge> out;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::string tag = "edges file line " + std::to_string(r + 1);
    if (lines[r].size() != 3) {
      throw ParseError(tag + ": expected 3 fields, got " +
                       std::to_string(lines[r].size()));
    }
    out.push_back(CityEdge{parse_int(lines[r][0], tag + " i"),
                           parse_int(lines[r][1], tag + " j"),
                           parse_double(lines[r][2], tag + " fuel_cost")});
  }
  return out;
}

ScenarioConfig load_scenario(const std::string& config_path) {
  const json j = parse_json(read_file(config_path), "scenario config");
  if (!j.is_object()) {
    throw ParseError("scenario config: top level must be an object");
  }
  ScenarioConfig out;
  out.graph.beta = as_number(field(j, "beta", "scenario config"),
                             "scenario config beta");
  out.graph.big_cost = as_number(field(j, "big_cost", "scenario config"),
                                 "scenario config big_cost");
  out.gamma = as_number(field(j, "gamma", "scenario config"),
                        "scenario config gamma");
  const json& nodes_path = field(j, "nodes_path", "scenario config");
  const json& edges_path = field(j, "edges_path", "scenario config");
  if (!nodes_path.is_string() || !edges_path.is_string()) {
    throw ParseError("scenario config: nodes_path and edges_path must be "
                     "strings");
  }
  const std::filesystem::path base =
      std::filesystem::path(config_path).parent_path();
  const auto resolve = [&base](const std::string& p) {
    const std::filesystem::path fp(p);
    return fp.is_absolute() ? fp.string() : (base / fp).string();
  };
  out.graph.nodes =
      parse_nodes_csv(read_file(resolve(nodes_path.get<std::string>())));
  out.graph.edges =
      parse_edges_csv(read_file(resolve(edges_path.get<std::string>())));
  return out;
}

}  // namespace inertial::io
