#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rigidity {

// Numeric routine failed to converge or found the problem outside its domain.
struct solver_error : std::runtime_error {
  explicit solver_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct unknown_name_error : std::runtime_error {
  explicit unknown_name_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Edge labels: -1 strut (compression only), 0 bar, +1 cable (tension only).
constexpr int kStrut = -1;
constexpr int kBar = 0;
constexpr int kCable = +1;

// A bar framework or tensegrity: points in R^d plus an edge list.
// Edges are stored 0-based with first < second; labels are empty (all bars)
// or one entry per edge; pinned holds 0-based flattened coordinate indices,
// strictly increasing. Flattening is vertex-major: coordinate (i, axis)
// lands at i*d + axis.
struct Framework {
  int dimension = 0;
  Eigen::MatrixXd vertices;  // n x d, one row per vertex
  std::vector<std::pair<int, int>> edges;
  std::vector<int> labels;
  std::vector<int> pinned;

  int n_vertices() const { return static_cast<int>(vertices.rows()); }
  int n_edges() const { return static_cast<int>(edges.size()); }
  int dof() const { return dimension * n_vertices(); }
  bool has_labels() const { return !labels.empty(); }
  int label(int k) const { return labels.empty() ? kBar : labels[k]; }
  bool all_bars() const;

  Eigen::VectorXd configuration() const;
  void set_configuration(const Eigen::VectorXd& q);
  int max_degree() const;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

}  // namespace rigidity
