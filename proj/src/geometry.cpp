#include "rigidity/geometry.hpp"

#include <Eigen/SVD>

namespace rigidity {

Subspace span_of(const Eigen::MatrixXd& generators, double rel_cutoff) {
  if (generators.cols() == 0 || generators.rows() == 0)
    return {Eigen::MatrixXd(generators.rows(), 0)};
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(generators, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cut = rel_cutoff * sv(0);
  int r = 0;
  while (r < sv.size() && sv(r) > cut) ++r;
  return {svd.matrixU().leftCols(r)};
}

Eigen::VectorXd edge_vector(const Framework& f, const Eigen::VectorXd& q) {
  const int d = f.dimension;
  if (q.size() != f.dof()) throw std::invalid_argument("edge_vector: configuration length");
  Eigen::VectorXd e(f.n_edges());
  for (int k = 0; k < f.n_edges(); ++k) {
    const auto& [i, j] = f.edges[k];
    e(k) = (q.segment(i * d, d) - q.segment(j * d, d)).squaredNorm();
  }
  return e;
}

Eigen::MatrixXd rigidity_matrix_at(const Framework& f, const Eigen::VectorXd& q) {
  const int d = f.dimension;
  if (q.size() != f.dof()) throw std::invalid_argument("rigidity_matrix: configuration length");
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(f.n_edges(), f.dof());
  for (int k = 0; k < f.n_edges(); ++k) {
    const auto& [i, j] = f.edges[k];
    const Eigen::VectorXd diff = q.segment(i * d, d) - q.segment(j * d, d);
    R.block(k, i * d, 1, d) = diff.transpose();
    R.block(k, j * d, 1, d) = -diff.transpose();
  }
  return R;
}

Eigen::MatrixXd rigidity_matrix(const Framework& f) {
  return rigidity_matrix_at(f, f.configuration());
}

Eigen::MatrixXd stress_matrix(const Framework& f, const Eigen::VectorXd& omega) {
  const int d = f.dimension;
  if (omega.size() != f.n_edges()) throw std::invalid_argument("stress_matrix: stress length");
  Eigen::MatrixXd O = Eigen::MatrixXd::Zero(f.dof(), f.dof());
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
  for (int k = 0; k < f.n_edges(); ++k) {
    const auto& [i, j] = f.edges[k];
    const double w = omega(k);
    O.block(i * d, i * d, d, d) += w * id;
    O.block(j * d, j * d, d, d) += w * id;
    O.block(i * d, j * d, d, d) -= w * id;
    O.block(j * d, i * d, d, d) -= w * id;
  }
  return O;
}

Subspace trivial_space(const Framework& f) {
  const int n = f.n_vertices(), d = f.dimension;
  const int n_rot = d * (d - 1) / 2;
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(n * d, d + n_rot);
  for (int a = 0; a < d; ++a)
    for (int i = 0; i < n; ++i) gen(i * d + a, a) = 1.0;
  int col = d;
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b, ++col)
      for (int i = 0; i < n; ++i) {
        gen(i * d + b, col) = f.vertices(i, a);
        gen(i * d + a, col) = -f.vertices(i, b);
      }
  return span_of(gen);
}

namespace {

int joint_rank(const Eigen::MatrixXd& C, const Eigen::MatrixXd& T) {
  Eigen::MatrixXd both(C.rows(), C.cols() + T.cols());
  both << C, T;
  if (both.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(both);
  const auto& sv = svd.singularValues();
  const double cut = 1e-10 * (sv.size() ? sv(0) : 0.0);
  int r = 0;
  while (r < sv.size() && sv(r) > cut) ++r;
  return r;
}

}  // namespace

Subspace complement_space(const Framework& f, PinMode mode) {
  const Subspace T = trivial_space(f);
  const int dn = f.dof();
  Subspace C;
  if (mode == PinMode::orthogonal) {
    // Full SVD of the trivial basis: trailing left singular vectors span T-perp.
    if (T.rank() == 0) {
      C.basis = Eigen::MatrixXd::Identity(dn, dn);
    } else {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(T.basis, Eigen::ComputeFullU);
      C.basis = svd.matrixU().rightCols(dn - T.rank());
    }
  } else {
    C.basis = Eigen::MatrixXd::Zero(dn, dn - static_cast<int>(f.pinned.size()));
    int col = 0;
    std::size_t pi = 0;
    for (int c = 0; c < dn; ++c) {
      if (pi < f.pinned.size() && f.pinned[pi] == c) {
        ++pi;
        continue;
      }
      C.basis(c, col++) = 1.0;
    }
  }
  if (C.rank() + T.rank() != dn || joint_rank(C.basis, T.basis) != dn)
    throw std::invalid_argument("C not complementary to T: need rank(C) + rank(T) = " +
                                std::to_string(dn) + ", got " + std::to_string(C.rank()) +
                                " + " + std::to_string(T.rank()));
  return C;
}

namespace {

// Optimal proper rotation taking Bc onto Ac (rows are centered points):
// maximize tr(R^T Ac^T Bc) over SO(d).
Eigen::MatrixXd kabsch_rotation(const Eigen::MatrixXd& Ac, const Eigen::MatrixXd& Bc) {
  const Eigen::MatrixXd K = Ac.transpose() * Bc;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(K, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::MatrixXd R = svd.matrixU() * svd.matrixV().transpose();
  if (R.determinant() < 0) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Identity(K.rows(), K.cols());
    D(K.rows() - 1, K.cols() - 1) = -1.0;
    R = svd.matrixU() * D * svd.matrixV().transpose();
  }
  return R;
}

struct Centered {
  Eigen::MatrixXd pts;
  Eigen::RowVectorXd centroid;
};

Centered center(const Eigen::VectorXd& q, int d) {
  const int n = static_cast<int>(q.size()) / d;
  Eigen::MatrixXd M(n, d);
  for (int i = 0; i < n; ++i) M.row(i) = q.segment(i * d, d).transpose();
  Eigen::RowVectorXd c = M.colwise().mean();
  M.rowwise() -= c;
  return {M, c};
}

}  // namespace

double kabsch_distance(const Eigen::VectorXd& qa, const Eigen::VectorXd& qb, int dimension) {
  if (dimension < 1 || qa.size() != qb.size() || qa.size() % dimension != 0)
    throw std::invalid_argument("kabsch_distance: configurations must match, length a multiple of dimension");
  const auto A = center(qa, dimension), B = center(qb, dimension);
  const Eigen::MatrixXd R = kabsch_rotation(A.pts, B.pts);
  return (A.pts - B.pts * R.transpose()).norm();
}

Eigen::VectorXd kabsch_align(const Eigen::VectorXd& reference, const Eigen::VectorXd& moving,
                             int dimension) {
  if (dimension < 1 || reference.size() != moving.size() ||
      reference.size() % dimension != 0)
    throw std::invalid_argument("kabsch_align: configurations must match, length a multiple of dimension");
  const auto A = center(reference, dimension), B = center(moving, dimension);
  const Eigen::MatrixXd R = kabsch_rotation(A.pts, B.pts);
  Eigen::MatrixXd moved = B.pts * R.transpose();
  moved.rowwise() += A.centroid;
  Eigen::VectorXd out(reference.size());
  for (int i = 0; i < moved.rows(); ++i)
    out.segment(i * dimension, dimension) = moved.row(i).transpose();
  return out;
}

}  // namespace rigidity
