#include "rigidity/json_io.hpp"

#include <sstream>

#include "json.hpp"

namespace rigidity {

using nlohmann::json;

Framework framework_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("framework JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("framework JSON: top level must be an object");

  Framework f;
  if (!j.contains("dimension") || !j["dimension"].is_number_integer())
    throw std::invalid_argument("dimension: required integer");
  f.dimension = j["dimension"].get<int>();

  if (!j.contains("vertices") || !j["vertices"].is_array() || j["vertices"].empty())
    throw std::invalid_argument("vertices: required nonempty array");
  const auto& jv = j["vertices"];
  f.vertices.resize(static_cast<int>(jv.size()), std::max(f.dimension, 1));
  for (size_t i = 0; i < jv.size(); ++i) {
    if (!jv[i].is_array() || static_cast<int>(jv[i].size()) != f.dimension)
      throw std::invalid_argument("vertices: each row needs exactly 'dimension' numbers");
    for (int a = 0; a < f.dimension; ++a) {
      if (!jv[i][a].is_number()) throw std::invalid_argument("vertices: coordinates must be numbers");
      f.vertices(static_cast<int>(i), a) = jv[i][a].get<double>();
    }
  }

  if (!j.contains("edges") || !j["edges"].is_array())
    throw std::invalid_argument("edges: required array");
  for (const auto& je : j["edges"]) {
    if (!je.is_array() || je.size() != 2 || !je[0].is_number_integer() ||
        !je[1].is_number_integer())
      throw std::invalid_argument("edges: each entry must be a pair of integers");
    const int a = je[0].get<int>(), b = je[1].get<int>();
    if (a < 1 || b < 1) throw std::invalid_argument("edges: vertex indices are 1-based");
    f.edges.push_back({a - 1, b - 1});
  }

  if (j.contains("labels")) {
    if (!j["labels"].is_array()) throw std::invalid_argument("labels: must be an array");
    for (const auto& jl : j["labels"]) {
      if (!jl.is_number_integer()) throw std::invalid_argument("labels: entries must be integers");
      f.labels.push_back(jl.get<int>());
    }
  }
  if (j.contains("pinned")) {
    if (!j["pinned"].is_array()) throw std::invalid_argument("pinned: must be an array");
    for (const auto& jp : j["pinned"]) {
      if (!jp.is_number_integer()) throw std::invalid_argument("pinned: entries must be integers");
      const int c = jp.get<int>();
      if (c < 1) throw std::invalid_argument("pinned: coordinate indices are 1-based");
      f.pinned.push_back(c - 1);
    }
  }
  f.validate();
  return f;
}

std::string framework_to_json(const Framework& f) {
  json j;
  j["dimension"] = f.dimension;
  json jv = json::array();
  for (int i = 0; i < f.n_vertices(); ++i) {
    json row = json::array();
    for (int a = 0; a < f.dimension; ++a) row.push_back(f.vertices(i, a));
    jv.push_back(row);
  }
  j["vertices"] = jv;
  json je = json::array();
  for (const auto& [a, b] : f.edges) je.push_back({a + 1, b + 1});
  j["edges"] = je;
  if (!f.labels.empty()) j["labels"] = f.labels;
  if (!f.pinned.empty()) {
    std::vector<int> p(f.pinned);
    for (int& c : p) ++c;
    j["pinned"] = p;
  }
  return j.dump(2) + "\n";
}

}  // namespace rigidity
