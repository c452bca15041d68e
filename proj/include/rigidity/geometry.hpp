#pragma once

#include <Eigen/Dense>

#include "rigidity/framework.hpp"

namespace rigidity {

// Orthonormal basis of a linear subspace of R^n, stored column-wise.
struct Subspace {
  Eigen::MatrixXd basis;  // ambient_dim x rank, orthonormal columns

  int ambient_dim() const { return static_cast<int>(basis.rows()); }
  int rank() const { return static_cast<int>(basis.cols()); }
};

// Column span of `generators`, orthonormalized by SVD. Columns whose singular
// value falls below rel_cutoff times the largest are dropped.
Subspace span_of(const Eigen::MatrixXd& generators, double rel_cutoff = 1e-10);

// Squared edge lengths of configuration q (flattened, vertex-major).
Eigen::VectorXd edge_vector(const Framework& f, const Eigen::VectorXd& q);

// Rigidity matrix rows built from configuration q: row k for edge (i,j)
// carries q_i - q_j in the vertex-i block and its negation in the vertex-j
// block, so d/dt edge_vector(q + t v) = 2 R(q) v. R is linear in q.
Eigen::MatrixXd rigidity_matrix_at(const Framework& f, const Eigen::VectorXd& q);
Eigen::MatrixXd rigidity_matrix(const Framework& f);

// Stress matrix of the edge-stress vector omega: the quadratic form with
// u^T O v = sum_k omega_k (u_i - u_j) . (v_i - v_j).
Eigen::MatrixXd stress_matrix(const Framework& f, const Eigen::VectorXd& omega);

// Span of the rigid-motion directions at the current configuration:
// d translations plus the d(d-1)/2 infinitesimal rotations.
Subspace trivial_space(const Framework& f);

enum class PinMode {
  orthogonal,  // C = orthogonal complement of the trivial space
  pinned,      // C = identity columns of the non-pinned coordinates
};

// Complement used to factor out rigid motions. Throws std::invalid_argument
// ("C not complementary to T") when [C T] fails to span R^{dn}.
Subspace complement_space(const Framework& f, PinMode mode);

// Least distance between two flattened configurations over proper rigid
// motions (translations and rotations, no reflections), as the Frobenius
// norm over all coordinates.
double kabsch_distance(const Eigen::VectorXd& qa, const Eigen::VectorXd& qb, int dimension);

// `moving` transformed by the optimal proper rigid motion onto `reference`.
Eigen::VectorXd kabsch_align(const Eigen::VectorXd& reference, const Eigen::VectorXd& moving,
                             int dimension);

}  // namespace rigidity
