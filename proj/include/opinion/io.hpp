#pragma once

// JSON instance files. Weights and beliefs travel as exact strings:
//
//   {"n": 3, "edges": [[0, 1, "0.5"], [1, 2, "1"]], "beliefs": ["0", "1/2", "1"]}
//
// "belief_scale" (integer, default 1) is written only for integer versions.

#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "opinion/errors.hpp"
#include "opinion/game.hpp"
#include "opinion/graph.hpp"
#include "opinion/rational.hpp"

namespace opinion {

using Json = nlohmann::json;

/// Finite decimals print as decimals, everything else as "num/den".
inline std::string exact_string(const Rational& r) {
  return r.decimal_digits() >= 0 ? r.decimal() : r.str();
}

namespace detail {

inline Rational json_rational(const Json& v, const std::string& path) {
  if (v.is_string()) {
    try {
      return Rational::parse(v.get<std::string>());
    } catch (const Error& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  throw ConfigError(path + ": expected an exact decimal string");
}

inline std::size_t json_index(const Json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw ConfigError(path + ": expected a vertex index");
  return v.get<std::size_t>();
}

}  // namespace detail

inline SocialGraph graph_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("$: expected an object");
  if (!j.contains("n")) throw ConfigError("$.n: missing");
  if (!j["n"].is_number_integer() || j["n"].get<std::int64_t>() < 1) throw ConfigError("$.n: expected a positive integer");
  const auto n = j["n"].get<std::size_t>();
  if (!j.contains("edges") || !j["edges"].is_array()) throw ConfigError("$.edges: expected an array");
  std::vector<WeightedEdge> edges;
  const auto& arr = j["edges"];
  for (std::size_t e = 0; e < arr.size(); ++e) {
    const std::string path = "$.edges[" + std::to_string(e) + "]";
    const auto& item = arr[e];
    if (!item.is_array() || item.size() != 3) throw ConfigError(path + ": expected [u, v, \"weight\"]");
    WeightedEdge we{detail::json_index(item[0], path + "[0]"), detail::json_index(item[1], path + "[1]"),
                    detail::json_rational(item[2], path + "[2]")};
    edges.push_back(we);
  }
  try {
    return SocialGraph(n, std::move(edges));
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("$: ") + e.what());
  }
}

inline Json graph_to_json(const SocialGraph& g) {
  Json edges = Json::array();
  for (const auto& e : g.edges()) edges.push_back(Json::array({e.u, e.v, exact_string(g.weight(e))}));
  return Json{{"n", g.size()}, {"edges", std::move(edges)}};
}

inline OpinionGame game_from_json(const Json& j) {
  SocialGraph g = graph_from_json(j);
  if (!j.contains("beliefs") || !j["beliefs"].is_array()) throw ConfigError("$.beliefs: expected an array");
  const auto& arr = j["beliefs"];
  if (arr.size() != g.size()) {
    throw ConfigError("$.beliefs: expected " + std::to_string(g.size()) + " entries, got " + std::to_string(arr.size()));
  }
  std::vector<Rational> beliefs;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string path = "$.beliefs[" + std::to_string(i) + "]";
    Rational b = detail::json_rational(arr[i], path);
    if (b < Rational(0) || b > Rational(1)) throw ConfigError(path + ": belief " + exact_string(b) + " outside [0,1]");
    beliefs.push_back(b);
  }
  std::int64_t scale = 1;
  if (j.contains("belief_scale")) {
    if (!j["belief_scale"].is_number_integer() || j["belief_scale"].get<std::int64_t>() < 1) {
      throw ConfigError("$.belief_scale: expected a positive integer");
    }
    scale = j["belief_scale"].get<std::int64_t>();
  }
  return OpinionGame(std::move(g), std::move(beliefs), scale);
}

inline Json game_to_json(const OpinionGame& game) {
  Json j = graph_to_json(game.graph());
  Json beliefs = Json::array();
  for (const auto& b : game.beliefs()) beliefs.push_back(exact_string(b));
  j["beliefs"] = std::move(beliefs);
  if (game.belief_scale() != 1) j["belief_scale"] = game.belief_scale();
  return j;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline OpinionGame parse_game(const std::string& path) {
  Json j = read_json_file(path);
  try {
    return game_from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

}  // namespace opinion
