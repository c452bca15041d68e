#include "rigidity/framework.hpp"

#include <algorithm>
#include <set>

namespace rigidity {

bool Framework::all_bars() const {
  return std::all_of(labels.begin(), labels.end(), [](int l) { return l == kBar; });
}

Eigen::VectorXd Framework::configuration() const {
  const int n = n_vertices(), d = dimension;
  Eigen::VectorXd q(n * d);
  for (int i = 0; i < n; ++i) q.segment(i * d, d) = vertices.row(i).transpose();
  return q;
}

void Framework::set_configuration(const Eigen::VectorXd& q) {
  const int n = n_vertices(), d = dimension;
  if (q.size() != n * d) throw std::invalid_argument("configuration: wrong length");
  for (int i = 0; i < n; ++i) vertices.row(i) = q.segment(i * d, d).transpose();
}

int Framework::max_degree() const {
  std::vector<int> deg(n_vertices(), 0);
  for (const auto& [i, j] : edges) {
    ++deg[i];
    ++deg[j];
  }
  return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

void Framework::validate() const {
  const int n = n_vertices();
  if (dimension < 1) throw std::invalid_argument("dimension: must be at least 1");
  if (n < 1) throw std::invalid_argument("vertices: must be nonempty");
  if (vertices.cols() != dimension)
    throw std::invalid_argument("vertices: row length does not match dimension");
  if (!vertices.allFinite()) throw std::invalid_argument("vertices: coordinates must be finite");

  std::set<std::pair<int, int>> seen;
  for (const auto& [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n)
      throw std::invalid_argument("edges: vertex index out of range");
    if (i >= j) throw std::invalid_argument("edges: endpoints must be ordered and distinct");
    if (!seen.insert({i, j}).second) throw std::invalid_argument("edges: duplicate edge");
  }
  if (!labels.empty()) {
    if (labels.size() != edges.size())
      throw std::invalid_argument("labels: must have one entry per edge");
    for (int l : labels)
      if (l < -1 || l > 1) throw std::invalid_argument("labels: values must be -1, 0, or +1");
  }
  int prev = -1;
  for (int c : pinned) {
    if (c < 0 || c >= dimension * n)
      throw std::invalid_argument("pinned: coordinate index out of range");
    if (c <= prev) throw std::invalid_argument("pinned: indices must be strictly increasing");
    prev = c;
  }
}

}  // namespace rigidity
