#include "rigidity/spectral.hpp"

#include <Eigen/SVD>
#include <algorithm>

namespace rigidity {

SpectralDecomposition decompose(const Framework& f, const Subspace& C, double sigma_cutoff) {
  if (!(sigma_cutoff >= 0)) throw std::invalid_argument("decompose: cutoff must be >= 0");
  const Eigen::MatrixXd R = rigidity_matrix(f);
  const int m = f.n_edges(), dn = f.dof(), nc = C.rank();
  if (nc == 0) throw std::invalid_argument("decompose: complement is trivial");

  SpectralDecomposition out;
  out.sigma_cutoff = sigma_cutoff;

  const Eigen::MatrixXd RC = R * C.basis;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(RC, Eigen::ComputeFullU | Eigen::ComputeFullV);
  // Pad with structural zeros: right null directions beyond min(m, nc).
  Eigen::VectorXd sv = Eigen::VectorXd::Zero(nc);
  sv.head(svd.singularValues().size()) = svd.singularValues();
  out.singular_values = sv;

  int first_small = nc;
  for (int i = 0; i < nc; ++i)
    if (sv(i) <= sigma_cutoff) {
      first_small = i;
      break;
    }
  if (first_small == 0)
    throw solver_error("decompose: every singular value of the reduced rigidity matrix is at or below the cutoff");
  out.sigma0 = sv(first_small - 1);
  out.V.basis = C.basis * svd.matrixV().rightCols(nc - first_small);

  // Near-stresses come from the full matrix: left singular directions of R,
  // padded with zeros when there are more edges than coordinates.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd_full(R, Eigen::ComputeFullU);
  Eigen::VectorXd sw = Eigen::VectorXd::Zero(m);
  sw.head(svd_full.singularValues().size()) = svd_full.singularValues();
  int w_small = m;
  for (int i = 0; i < m; ++i)
    if (sw(i) <= sigma_cutoff) {
      w_small = i;
      break;
    }
  out.W.basis = svd_full.matrixU().rightCols(m - w_small);
  return out;
}

double smallest_nonzero_singular(const Framework& f, const Subspace& C, double rank_rel_cutoff) {
  const Eigen::MatrixXd RC = rigidity_matrix(f) * C.basis;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(RC);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) throw solver_error("smallest_nonzero_singular: empty spectrum");
  const double cut = rank_rel_cutoff * sv(0);
  double best = -1;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) best = sv(i);
  if (best < 0) throw solver_error("smallest_nonzero_singular: matrix is numerically zero");
  return best;
}

}  // namespace rigidity
