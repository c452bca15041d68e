#include "rigidity/corpus.hpp"

#include <cmath>

namespace rigidity {

namespace {

Framework build(int d, std::vector<std::vector<double>> pts,
                std::vector<std::pair<int, int>> edges_1based, std::vector<int> labels = {}) {
  Framework f;
  f.dimension = d;
  f.vertices.resize(static_cast<int>(pts.size()), d);
  for (int i = 0; i < static_cast<int>(pts.size()); ++i)
    for (int a = 0; a < d; ++a) f.vertices(i, a) = pts[i][a];
  for (auto [i, j] : edges_1based) f.edges.push_back({i - 1, j - 1});
  f.labels = std::move(labels);
  f.validate();
  return f;
}

}  // namespace

std::vector<std::string> corpus_names() {
  return {"square",      "tetrahedron", "octahedron",     "example_a",
          "example_h",   "k34_heptagon", "snelson_x",      "cable_triangle"};
}

Framework corpus_framework(const std::string& name) {
  const double s3 = std::sqrt(3.0), s6 = std::sqrt(6.0), r2 = 1.0 / std::sqrt(2.0);

  if (name == "square") {
    // Unit square braced by one diagonal.
    return build(2, {{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{1, 2}, {2, 3}, {3, 4}, {1, 4}, {1, 3}});
  }
  if (name == "tetrahedron") {
    return build(3,
                 {{0, 0, 0}, {1, 0, 0}, {0.5, s3 / 2, 0}, {0.5, s3 / 6, s6 / 3}},
                 {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}});
  }
  if (name == "octahedron") {
    // All vertex pairs except the three antipodal ones.
    return build(3,
                 {{r2, 0, 0}, {-r2, 0, 0}, {0, r2, 0}, {0, -r2, 0}, {0, 0, r2}, {0, 0, -r2}},
                 {{1, 3}, {1, 4}, {1, 5}, {1, 6}, {2, 3}, {2, 4}, {2, 5}, {2, 6},
                  {3, 5}, {3, 6}, {4, 5}, {4, 6}});
  }
  if (name == "example_a") {
    // Triangle over a split base: vertices 1,5,6,2 are collinear, so the
    // framework is flexible to first order yet prestress stable.
    return build(2,
                 {{0, 0}, {1, 0}, {0.5, 1}, {0.5, 0.5}, {1.0 / 3.0, 0}, {2.0 / 3.0, 0}},
                 {{1, 3}, {2, 3}, {1, 4}, {2, 4}, {3, 4}, {1, 5}, {2, 6}, {5, 6}});
  }
  if (name == "example_h") {
    // Two rigid triangles joined by three parallel horizontal bars.
    return build(2,
                 {{0, 0}, {0, 2}, {1, 1}, {3, 1}, {4, 2}, {4, 0}},
                 {{1, 2}, {1, 3}, {2, 3}, {3, 4}, {2, 5}, {4, 5}, {1, 6}, {4, 6}, {5, 6}});
  }
  if (name == "k34_heptagon") {
    // Complete bipartite K(3,4) on the unit heptagon.
    std::vector<std::vector<double>> pts;
    for (int k = 0; k < 7; ++k) {
      const double th = 2 * M_PI * k / 7;
      pts.push_back({std::cos(th), std::sin(th)});
    }
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i <= 3; ++i)
      for (int j = 4; j <= 7; ++j) edges.push_back({i, j});
    return build(2, std::move(pts), std::move(edges));
  }
  if (name == "snelson_x") {
    // Square with cable sides and strut diagonals.
    return build(2, {{0, 0}, {1, 0}, {1, 1}, {0, 1}},
                 {{1, 2}, {2, 3}, {3, 4}, {1, 4}, {1, 3}, {2, 4}},
                 {kCable, kCable, kCable, kCable, kStrut, kStrut});
  }
  if (name == "cable_triangle") {
    return build(2, {{0, 0}, {1, 0}, {0.5, s3 / 2}}, {{1, 2}, {1, 3}, {2, 3}},
                 {kCable, kCable, kCable});
  }
  throw unknown_name_error("no corpus framework named '" + name + "'");
}

}  // namespace rigidity
