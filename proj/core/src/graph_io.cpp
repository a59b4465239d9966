#include <set>

#include <json.hpp>

#include "quditfuse/graphstate.hpp"

namespace quditfuse {

using nlohmann::json;

QuditGraph parse_graph_json(std::string_view text, std::optional<int> expected_dim) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("graph document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InvalidInput("graph document must be a JSON object");
  static const std::set<std::string> allowed = {"d", "vertices", "edges"};
  for (const auto& [key, _] : doc.items()) {
    if (!allowed.contains(key)) throw InvalidInput("unknown key '" + key + "' in graph document");
  }

  int d = 0;
  if (doc.contains("d")) {
    if (!doc["d"].is_number_integer()) throw InvalidInput("graph 'd' must be an integer");
    d = doc["d"].get<int>();
    if (expected_dim && *expected_dim != d) {
      throw InvalidInput("graph dimension " + std::to_string(d) + " does not match scenario dimension " +
                         std::to_string(*expected_dim));
    }
  } else if (expected_dim) {
    d = *expected_dim;
  } else {
    throw InvalidInput("graph document is missing 'd'");
  }

  if (!doc.contains("vertices") || !doc["vertices"].is_array()) {
    throw InvalidInput("graph document needs a 'vertices' array");
  }
  std::vector<std::string> vertices;
  for (const auto& v : doc["vertices"]) {
    if (!v.is_string()) throw InvalidInput("vertex labels must be strings");
    vertices.push_back(v.get<std::string>());
  }

  std::vector<std::pair<std::string, std::string>> edges;
  if (doc.contains("edges")) {
    if (!doc["edges"].is_array()) throw InvalidInput("'edges' must be an array");
    for (const auto& e : doc["edges"]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
        throw InvalidInput("each edge must be a pair of vertex labels");
      }
      edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
  }
  return QuditGraph(QuditDim(d), std::move(vertices), edges);
}

std::string graph_to_json(const QuditGraph& graph) {
  json doc;
  doc["d"] = graph.dim().value();
  doc["vertices"] = graph.vertices();
  json edges = json::array();
  for (const auto& [a, b] : graph.edges()) edges.push_back({graph.vertices()[a], graph.vertices()[b]});
  doc["edges"] = std::move(edges);
  return doc.dump();
}

}  // namespace quditfuse
