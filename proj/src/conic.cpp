#include "rigidity/conic.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace rigidity {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double min_eig(const Eigen::MatrixXd& S) {
  if (S.rows() == 0) return kInf;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double min_eig_vec(const Eigen::MatrixXd& S, Eigen::VectorXd& v) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  v = es.eigenvectors().col(0);
  return es.eigenvalues()(0);
}

double spectral_norm_sym(const Eigen::MatrixXd& S) {
  if (S.rows() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  return std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(S.rows() - 1)));
}

Eigen::MatrixXd combine(const std::vector<Eigen::MatrixXd>& Ms, const Eigen::VectorXd& a) {
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(Ms[0].rows(), Ms[0].cols());
  for (int i = 0; i < a.size(); ++i) X += a(i) * Ms[i];
  return X;
}

}  // namespace

const char* cert_status_name(CertStatus s) {
  switch (s) {
    case CertStatus::positive_definite: return "positive_definite";
    case CertStatus::failed: return "failed";
    case CertStatus::vacuous: return "vacuous";
    case CertStatus::no_stress: return "no_stress";
  }
  return "unknown";
}

std::vector<Eigen::MatrixXd> flex_stress_forms(const Framework& f, const Subspace& V,
                                               const Subspace& W) {
  std::vector<Eigen::MatrixXd> Ms;
  Ms.reserve(W.rank());
  for (int i = 0; i < W.rank(); ++i) {
    const Eigen::MatrixXd O = stress_matrix(f, W.basis.col(i));
    const Eigen::MatrixXd M = V.basis.transpose() * O * V.basis;
    Ms.push_back(0.5 * (M + M.transpose()));
  }
  return Ms;
}

namespace {

// Frank-Wolfe on the dual: the best certified min-eigenvalue over |a| <= 1
// equals the least norm over the convex hull of the generator image, and the
// optimal a points along the least-norm element. State is the current hull
// point y; each step moves toward the generator the linear oracle picks.
struct FwProblem {
  const std::vector<Eigen::MatrixXd>* Ms = nullptr;  // eigenvalue part, may be empty
  const Eigen::MatrixXd* rows = nullptr;             // linear part, may be null
  int nw = 0;

  // Value being maximized at coefficients a.
  double primal(const Eigen::VectorXd& a) const {
    double t = kInf;
    if (Ms && !Ms->empty() && (*Ms)[0].rows() > 0) t = min_eig(combine(*Ms, a));
    if (rows && rows->rows() > 0) t = std::min(t, ((*rows) * a).minCoeff());
    return t;
  }

  // Generator minimizing <y, g>.
  Eigen::VectorXd oracle(const Eigen::VectorXd& y) const {
    double best = kInf;
    Eigen::VectorXd pick;
    if (Ms && !Ms->empty() && (*Ms)[0].rows() > 0) {
      Eigen::VectorXd u;
      min_eig_vec(combine(*Ms, y), u);
      Eigen::VectorXd c(nw);
      for (int i = 0; i < nw; ++i) c(i) = u.dot((*Ms)[i] * u);
      best = y.dot(c);
      pick = c;
    }
    if (rows && rows->rows() > 0) {
      Eigen::VectorXd vals = (*rows) * y;
      int j;
      const double v = vals.minCoeff(&j);
      if (v < best) pick = rows->row(j).transpose();
    }
    return pick;
  }
};

struct FwOut {
  Eigen::VectorXd a;
  double t = -kInf;
  double gap = kInf;
  int iters = 0;
};

FwOut fw_maximin(const FwProblem& prob, double scale, int max_iters = 200000) {
  const int nw = prob.nw;
  FwOut out;
  out.a = Eigen::VectorXd::Zero(nw);

  // Prescan the signed unit coefficients; keeps the closed-form cases reachable
  // even if the iteration stalls.
  for (int i = 0; i < nw; ++i)
    for (double s : {1.0, -1.0}) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(nw);
      e(i) = s;
      const double t = prob.primal(e);
      if (t > out.t) {
        out.t = t;
        out.a = e;
      }
    }

  Eigen::VectorXd y = prob.oracle(out.a.norm() > 0 ? out.a : Eigen::VectorXd::Ones(nw));
  const double gap_tol = 1e-8 * std::max(scale, 1e-300);
  double yn = y.norm();
  for (out.iters = 0; out.iters < max_iters; ++out.iters) {
    yn = y.norm();
    if (yn > 0) {
      const Eigen::VectorXd ahat = y / yn;
      const double t = prob.primal(ahat);
      if (t > out.t) {
        out.t = t;
        out.a = ahat;
      }
    }
    out.gap = yn - out.t;
    if (out.gap <= gap_tol) break;
    const Eigen::VectorXd c = prob.oracle(yn > 0 ? y : out.a);
    const Eigen::VectorXd d = c - y;
    const double dd = d.squaredNorm();
    if (dd <= 1e-300) break;
    const double gamma = std::clamp(-y.dot(d) / dd, 0.0, 1.0);
    if (gamma <= 0) break;
    y += gamma * d;
  }

  // Damped supergradient polish on the sphere.
  double tau = 0.5;
  Eigen::VectorXd a = out.a;
  for (int k = 0; k < 2000 && tau > 1e-14; ++k) {
    const Eigen::VectorXd g = prob.oracle(a);
    Eigen::VectorXd cand = a + tau * g;
    const double cn = cand.norm();
    if (cn <= 0) {
      tau *= 0.5;
      continue;
    }
    cand /= cn;
    const double tc = prob.primal(cand);
    if (tc > out.t) {
      out.t = tc;
      out.a = cand;
      a = cand;
    } else {
      tau *= 0.5;
    }
  }
  out.gap = std::max(0.0, yn - out.t);
  return out;
}

}  // namespace

StressCertificate stress_search(const std::vector<Eigen::MatrixXd>& Ms) {
  StressCertificate cert;
  const int nw = static_cast<int>(Ms.size());
  if (nw == 0) {
    cert.status = CertStatus::no_stress;
    cert.a.resize(0);
    return cert;
  }
  const int nv = static_cast<int>(Ms[0].rows());
  if (nv == 0) {
    cert.status = CertStatus::vacuous;
    cert.a = Eigen::VectorXd::Zero(nw);
    cert.lambda0 = kInf;
    return cert;
  }

  double scale = 0;
  for (const auto& M : Ms) scale = std::max(scale, spectral_norm_sym(M));
  const double tol = 1e-9 * scale;
  cert.a = Eigen::VectorXd::Zero(nw);

  if (scale == 0) {
    cert.status = CertStatus::failed;
    cert.lambda0 = 0;
    return cert;
  }

  if (nw == 1) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ms[0], Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(nv - 1);
    if (lo > tol) {
      cert.a(0) = 1;
      cert.lambda0 = lo;
      cert.status = CertStatus::positive_definite;
    } else if (hi < -tol) {
      cert.a(0) = -1;
      cert.lambda0 = -hi;
      cert.status = CertStatus::positive_definite;
    } else {
      cert.a(0) = (lo >= -hi) ? 1 : -1;
      cert.lambda0 = std::max(lo, -hi);
      cert.status = CertStatus::failed;
    }
    return cert;
  }

  if (nv == 1) {
    // Scalar forms: the exact optimum over |a| <= 1 is a aligned with the
    // vector of values, independent of the basis chosen for the stress space.
    Eigen::VectorXd m(nw);
    for (int i = 0; i < nw; ++i) m(i) = Ms[i](0, 0);
    const double norm = m.norm();
    cert.a = (norm > 0) ? Eigen::VectorXd(m / norm) : Eigen::VectorXd::Zero(nw);
    cert.lambda0 = norm;
    cert.status = (norm > tol) ? CertStatus::positive_definite : CertStatus::failed;
    return cert;
  }

  FwProblem prob;
  prob.Ms = &Ms;
  prob.nw = nw;
  const FwOut out = fw_maximin(prob, scale);
  if (out.gap > 1e-3 * scale)
    throw solver_error("stress search did not converge: optimality gap " +
                       std::to_string(out.gap));
  cert.a = out.a;
  cert.lambda0 = out.t;
  cert.gap = out.gap;
  cert.iterations = out.iters;
  cert.status = (out.t > tol) ? CertStatus::positive_definite : CertStatus::failed;
  return cert;
}

double kappa_tolerance(double kappa) { return 1e-6 * std::max(kappa, 1e-6); }

namespace {

void kappa_validate(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double lambda,
                    double lambda0) {
  if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows())
    throw std::invalid_argument("kappa: A and B must be square and same size");
  if (!(lambda > 0)) throw std::invalid_argument("kappa: lambda must be positive");
  if (!(lambda < lambda0))
    throw std::invalid_argument("kappa: lambda must lie strictly below lambda0");
}

}  // namespace

double kappa_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double lambda,
                   double lambda0) {
  kappa_validate(A, B, lambda, lambda0);
  const int n = static_cast<int>(A.rows());
  if (n == 0) return 0;

  const double normA = spectral_norm_sym(A);
  const double normB = spectral_norm_sym(B);
  const Eigen::MatrixXd Abar = A - lambda * Eigen::MatrixXd::Identity(n, n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esB(B);
  const Eigen::VectorXd beta = esB.eigenvalues();  // ascending
  const double bcut = 1e-10 * std::max(beta(n - 1), 0.0);
  int n0 = 0;
  while (n0 < n && beta(n0) <= bcut) ++n0;
  const int np = n - n0;

  const auto tol_feas = [&](double k) { return 1e-9 * (normA + lambda + k * normB + 1); };

  if (np == 0) {
    if (min_eig(Abar) >= -tol_feas(0)) return 0;
    throw solver_error("kappa: B vanishes while A - lambda I has negative directions");
  }

  const Eigen::MatrixXd Q0 = esB.eigenvectors().leftCols(n0);
  const Eigen::MatrixXd Qp = esB.eigenvectors().rightCols(np);

  if (n0 > 0 && std::isfinite(lambda0)) {
    const double floor0 = min_eig(Q0.transpose() * A * Q0);
    if (floor0 < lambda0 - 1e-7 * (1 + std::abs(lambda0)))
      throw std::invalid_argument("kappa: A is not at least lambda0 on the null space of B");
  }

  // Schur reduction: with S blocks of Q^T (A - lambda I) Q, feasibility of
  // A + kappa B - lambda I is kappa D >= S_p0 S_00^{-1} S_0p - S_pp on the
  // positive eigenspace, D = diag(positive beta).
  Eigen::MatrixXd M;
  const Eigen::MatrixXd S0p = Q0.transpose() * Abar * Qp;
  const Eigen::MatrixXd Spp = Qp.transpose() * Abar * Qp;
  if (n0 > 0) {
    const Eigen::MatrixXd S00 = Q0.transpose() * Abar * Q0;
    if (min_eig(S00) <= 0)
      throw solver_error("kappa: A - lambda I is singular on the null space of B");
    M = S0p.transpose() * S00.llt().solve(S0p) - Spp;
  } else {
    M = -Spp;
  }
  const Eigen::VectorXd dscale = beta.tail(np).cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd G = dscale.asDiagonal() * M * dscale.asDiagonal();
  G = 0.5 * (G + G.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esG(G, Eigen::EigenvaluesOnly);
  double kappa = std::max(0.0, esG.eigenvalues()(np - 1));

  // Polish against the unreduced constraint; the floor function of kappa is
  // concave and increasing here, so Newton from below climbs monotonically.
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd v;
    const double phi = min_eig_vec(Abar + kappa * B, v);
    if (phi >= -tol_feas(kappa)) return kappa;
    const double slope = v.dot(B * v);
    if (slope <= 1e-300)
      throw solver_error("kappa: negative direction outside the range of B");
    kappa += (-phi / slope) * (1 + 1e-12);
    if (kappa > 1e12) throw solver_error("kappa: exceeds 1e12, treating as infeasible");
  }
  throw solver_error("kappa: feasibility polish did not converge");
}

double kappa_bisection(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double lambda,
                       double lambda0) {
  kappa_validate(A, B, lambda, lambda0);
  const int n = static_cast<int>(A.rows());
  if (n == 0) return 0;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const auto phi = [&](double k) { return min_eig(A + k * B - lambda * I); };

  if (phi(0) >= 0) return 0;
  double lo = 0, hi = 1;
  while (phi(hi) < 0) {
    lo = hi;
    hi *= 2;
    if (hi > 1e12) throw solver_error("kappa bisection: no feasible kappa up to 1e12");
  }
  while (hi - lo > 1e-8 * hi) {
    const double mid = 0.5 * (lo + hi);
    (phi(mid) >= 0 ? hi : lo) = mid;
  }
  return hi;
}

TensionRows tension_sign_rows(const Framework& f) {
  TensionRows out;
  const int m = f.n_edges();
  std::vector<int> idx;
  for (int k = 0; k < m; ++k)
    if (f.label(k) != kBar) idx.push_back(k);
  out.E = Eigen::MatrixXd::Zero(static_cast<int>(idx.size()), m);
  for (int r = 0; r < static_cast<int>(idx.size()); ++r)
    out.E(r, idx[r]) = static_cast<double>(f.label(idx[r]));
  out.edge_index = std::move(idx);
  return out;
}

TensegrityCertificate tensegrity_stress_search(const std::vector<Eigen::MatrixXd>& Ms,
                                               const Eigen::MatrixXd& W_basis,
                                               const TensionRows& rows) {
  TensegrityCertificate cert;
  const int nw = static_cast<int>(W_basis.cols());
  const int nr = static_cast<int>(rows.E.rows());
  if (nr == 0) throw std::invalid_argument("tensegrity search: no sign-constrained edges");
  cert.a = Eigen::VectorXd::Zero(nw);
  cert.omega = Eigen::VectorXd::Zero(W_basis.rows());
  if (nw == 0) return cert;  // no stresses at all; caller reports no_stress

  const int nv = Ms.empty() ? 0 : static_cast<int>(Ms[0].rows());
  const Eigen::MatrixXd EW = rows.E * W_basis;

  double scale_rows = EW.cwiseAbs().maxCoeff();
  double scale_eig = 0;
  for (const auto& M : Ms) scale_eig = std::max(scale_eig, spectral_norm_sym(M));
  const double tol_s = 1e-9 * std::max(scale_rows, 1e-300);
  const double tol_t = 1e-9 * std::max(scale_eig, 1e-300);

  FwProblem prob;
  prob.Ms = (nv > 0) ? &Ms : nullptr;
  prob.rows = &EW;
  prob.nw = nw;

  FwOut out;
  if (nv == 0 && nw == 1) {
    // One stress, signs only: pick the better orientation outright.
    Eigen::VectorXd e(1);
    e(0) = 1;
    out.a = e;
    out.t = (EW * e).minCoeff();
    if ((EW * (-e)).minCoeff() > out.t) {
      out.a = -e;
      out.t = (EW * (-e)).minCoeff();
    }
    out.gap = 0;
  } else {
    out = fw_maximin(prob, std::max(scale_rows, scale_eig));
    if (out.gap > 1e-3 * std::max(scale_rows, scale_eig))
      throw solver_error("tensegrity stress search did not converge: gap " +
                         std::to_string(out.gap));
  }

  cert.a = out.a;
  cert.omega = W_basis * out.a;
  cert.iterations = out.iters;
  const Eigen::VectorXd vals = EW * out.a;
  cert.s = vals.minCoeff();
  cert.t = (nv > 0) ? min_eig(combine(Ms, out.a)) : kInf;
  cert.success = cert.s > tol_s && (nv == 0 || cert.t > tol_t);
  for (int r = 0; r < nr; ++r)
    if (vals(r) <= 10 * tol_s) cert.slack_edges.push_back(rows.edge_index[r]);
  return cert;
}

double tensegrity_edge_margin(const Framework& f, const Eigen::VectorXd& omega, double kappa) {
  if (kappa == 0) return kInf;
  double margin = kInf;
  for (int k = 0; k < f.n_edges(); ++k)
    if (f.label(k) != kBar) margin = std::min(margin, 2 * std::abs(omega(k)) / kappa);
  return margin;
}

}  // namespace rigidity
