#include "rigidity/energy.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace rigidity {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double EnergyModel::energy(const Eigen::VectorXd& q) const {
  const Eigen::VectorXd e = edge_vector(f, q);
  double h = 0;
  for (int k = 0; k < e.size(); ++k) {
    const double de = e(k) - p_sq(k);
    h += 0.5 * kappa * de * de + omega(k) * e(k);
  }
  return h;
}

double EnergyModel::delta_energy(const Eigen::VectorXd& q) const {
  // Exact identity: H(q) - H(p) = (kappa/2) |e(q) - e(p)|^2 + omega . (e(q) - e(p)).
  const Eigen::VectorXd de = edge_vector(f, q) - p_sq;
  return 0.5 * kappa * de.squaredNorm() + omega.dot(de);
}

Eigen::VectorXd EnergyModel::stress_at(const Eigen::VectorXd& q) const {
  return kappa * (edge_vector(f, q) - p_sq) + omega;
}

EnergyModel::Derivs EnergyModel::directional(const Eigen::VectorXd& q,
                                             const Eigen::VectorXd& v) const {
  // Along q + t v the squared lengths are quadratic in t, so H is an exact
  // quartic; e(v) doubles as R(v) v.
  const Eigen::VectorXd Rqv = rigidity_matrix_at(f, q) * v;
  const Eigen::VectorXd ev = edge_vector(f, v);
  const Eigen::VectorXd wq = stress_at(q);
  Derivs d;
  d.d1 = 2 * wq.dot(Rqv);
  d.d2 = 4 * kappa * Rqv.squaredNorm() + 2 * wq.dot(ev);
  d.d3 = 12 * kappa * Rqv.dot(ev);
  d.d4 = 12 * kappa * ev.squaredNorm();
  return d;
}

double EnergyModel::coeff_b(const Eigen::VectorXd& v) const {
  const Eigen::VectorXd Rpv = rigidity_matrix_at(f, p) * v;
  return 2 * kappa * Rpv.squaredNorm() + omega.dot(edge_vector(f, v));
}

double EnergyModel::coeff_c(const Eigen::VectorXd& v) const {
  return 2 * omega.dot(rigidity_matrix_at(f, p) * v);
}

double EnergyModel::coeff_a(const Eigen::VectorXd& v, double r) const {
  const Eigen::VectorXd Rpv = rigidity_matrix_at(f, p) * v;
  const Eigen::VectorXd ev = edge_vector(f, v);
  return 2 * kappa * (Rpv.dot(ev) + r * ev.squaredNorm());
}

EnergyModel energy_model(const AnalysisResult& r) {
  if (!r.has_constants)
    throw std::invalid_argument("energy_model: analysis carries no usable constants");
  EnergyModel m;
  m.f = r.framework;
  m.p = r.framework.configuration();
  m.p_sq = edge_vector(r.framework, m.p);
  m.kappa = r.constants.kappa;
  m.omega = r.certificate.omega.size() ? r.certificate.omega
                                       : Eigen::VectorXd::Zero(r.framework.n_edges());
  return m;
}

AnalysisResult with_kappa(const AnalysisResult& r, double kappa) {
  if (!r.has_constants)
    throw std::invalid_argument("with_kappa: analysis carries no usable constants");
  AnalysisResult out = r;
  out.constants.kappa = kappa;
  out.constants.L = (kappa > 0)
                        ? std::sqrt(out.constants.lambda / (8.0 * out.constants.z * kappa))
                        : kInf;
  const Classification cls = out.report.classification;
  out.report = radii_report(out.constants);
  out.report.classification = cls;
  out.verification.reset();
  return out;
}

namespace {

// Directions that exercise the certificate hardest: the near-flex basis, the
// softest directions of the stress form and of the stiffened form, and the
// bottom singular direction of the reduced rigidity matrix.
std::vector<Eigen::VectorXd> adversarial_directions(const AnalysisResult& r) {
  std::vector<Eigen::VectorXd> dirs;
  const auto add = [&](const Eigen::VectorXd& v) {
    const double n = v.norm();
    if (n > 0) {
      dirs.push_back(v / n);
      dirs.push_back(-v / n);
    }
  };
  for (int i = 0; i < r.spectral.n_v(); ++i) add(r.spectral.V.basis.col(i));

  const Eigen::MatrixXd RC = rigidity_matrix(r.framework) * r.C.basis;
  const Eigen::MatrixXd O = stress_matrix(r.framework, r.certificate.omega.size()
                                                           ? r.certificate.omega
                                                           : Eigen::VectorXd::Zero(
                                                                 r.framework.n_edges()));
  Eigen::MatrixXd A = r.C.basis.transpose() * O * r.C.basis;
  A = 0.5 * (A + A.transpose());
  const Eigen::MatrixXd B = 2.0 * RC.transpose() * RC;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esA(A);
  add(r.C.basis * esA.eigenvectors().col(0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esAB(A + r.constants.kappa * B);
  add(r.C.basis * esAB.eigenvectors().col(0));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(RC, Eigen::ComputeFullV);
  add(r.C.basis * svd.matrixV().col(svd.matrixV().cols() - 1));
  return dirs;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> out;
  if (!(lo > 0) || !(hi > lo) || count < 1) return out;
  const double la = std::log(lo), lb = std::log(hi);
  for (int i = 0; i < count; ++i)
    out.push_back(std::exp(la + (lb - la) * (count == 1 ? 1.0 : double(i) / (count - 1))));
  return out;
}

}  // namespace

VerificationRecord verify_certified_region(const AnalysisResult& r, int samples,
                                           std::uint64_t seed) {
  VerificationRecord rec;
  rec.seed = seed;
  if (!r.has_constants) {
    rec.skip_reason = "no usable certificate";
    return rec;
  }
  const auto& rep = r.report;
  const auto& c = r.constants;
  if (!rep.containment_applies || !rep.eta2 || !std::isfinite(*rep.eta2)) {
    rec.skip_reason = "outer radius not available";
    return rec;
  }
  rec.skipped = false;
  rec.worst_annulus = kInf;
  rec.worst_barrier = kInf;
  rec.worst_edge = kInf;

  const EnergyModel model = energy_model(r);
  const int radii_per_dir = 8;
  const int n_dirs = std::max(1, samples / radii_per_dir);

  std::vector<Eigen::VectorXd> dirs = adversarial_directions(r);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (static_cast<int>(dirs.size()) < n_dirs) {
    Eigen::VectorXd coeff(r.C.rank());
    for (int i = 0; i < coeff.size(); ++i) coeff(i) = gauss(rng);
    const Eigen::VectorXd v = r.C.basis * coeff;
    if (v.norm() > 0) dirs.push_back(v / v.norm());
  }
  if (static_cast<int>(dirs.size()) > n_dirs) dirs.resize(std::max(n_dirs, 1));

  const double eta1 = rep.eta1, eta2 = *rep.eta2;
  const std::vector<double> ann_radii =
      log_spaced(std::max(eta1 * (1 + 1e-6), eta2 * 1e-4), eta2 * (1 - 1e-9), radii_per_dir);
  std::vector<double> bar_radii;
  const bool do_barrier = rep.barrier_applies && rep.eta3 && std::isfinite(*rep.eta3);
  if (do_barrier) {
    const double lo = std::max(1.5 * eta1 * (1 + 1e-6), *rep.eta3 * 1e-4);
    bar_radii = log_spaced(lo, *rep.eta3, radii_per_dir);
  }

  for (const auto& v : dirs) {
    for (double eta : ann_radii) {
      const double dh = model.delta_energy(model.p + eta * v);
      ++rec.samples;
      rec.worst_annulus = std::min(rec.worst_annulus, dh);
      if (!(dh > 0)) ++rec.violations;
    }
    for (double eta : bar_radii) {
      const Eigen::VectorXd q = model.p + eta * v;
      const double dh = model.delta_energy(q);
      const double bound = c.lambda / 3.0 * eta * eta * (1 - 1.5 * eta1 / eta);
      ++rec.samples;
      rec.worst_barrier = std::min(rec.worst_barrier, dh - bound);
      if (dh < bound - 1e-9) ++rec.violations;

      const double edge_move = (edge_vector(model.f, q) - model.p_sq).norm();
      const double efloor = e_min(eta, eta1, c.lambda, c.kappa, c.omega_norm);
      ++rec.samples;
      rec.worst_edge = std::min(rec.worst_edge, edge_move - efloor);
      if (edge_move < efloor - 1e-9) ++rec.violations;
    }
  }
  return rec;
}

BoundCheckRecord bound_checks(const AnalysisResult& r, int samples, std::uint64_t seed) {
  BoundCheckRecord rec;
  rec.worst_ratio_slack = kInf;
  rec.eta0_min_ratio = kInf;
  rec.eta0bad_min_ratio = kInf;
  if (!r.has_constants || !(r.constants.kappa > 0))
    throw std::invalid_argument("bound_checks: needs constants with kappa > 0");
  const auto& c = r.constants;
  const EnergyModel model = energy_model(r);
  const double invL = 1.0 / c.L;
  const double smu = std::sqrt(std::max(c.mu_bar, 0.0));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const int radii_per_dir = 8;
  const int n_dirs = std::max(1, samples / radii_per_dir);
  for (int t = 0; t < n_dirs; ++t) {
    Eigen::VectorXd coeff(r.C.rank());
    for (int i = 0; i < coeff.size(); ++i) coeff(i) = gauss(rng);
    Eigen::VectorXd v = r.C.basis * coeff;
    if (!(v.norm() > 0)) continue;
    v /= v.norm();
    const double h2p = model.directional(model.p, v).d2;
    for (int s = 0; s < radii_per_dir; ++s) {
      const double rv = c.L * (0.5 * s);  // 0, L/2, L, ..., 3.5 L
      const double lhs = std::abs(model.directional(model.p + rv * v, v).d3);
      const double bound = 3 * invL * (smu + invL * rv);
      ++rec.samples;
      const double slack = bound + 1e-9 - lhs / h2p;
      rec.worst_ratio_slack = std::min(rec.worst_ratio_slack, slack);
      if (slack < 0) ++rec.ratio_violations;

      const double a_val = model.coeff_a(v, rv);
      if (a_val > 0) {
        const double ratio0 = model.coeff_b(v) / (2 * a_val);
        const double eta0 = 0.5 * c.L / (smu + rv * invL);
        rec.eta0_min_ratio = std::min(rec.eta0_min_ratio, ratio0 / eta0);
        const double eta0bad = c.L / (c.p_norm * invL + rv * invL);
        rec.eta0bad_min_ratio = std::min(rec.eta0bad_min_ratio, ratio0 / eta0bad);
      }
    }
  }

  // |R(q) u| <= 2 sqrt(z) |q| |u| for arbitrary vector pairs.
  const double zbound = 2 * std::sqrt(static_cast<double>(c.z));
  for (int t = 0; t < samples; ++t) {
    Eigen::VectorXd q(r.framework.dof()), u(r.framework.dof());
    for (int i = 0; i < q.size(); ++i) q(i) = gauss(rng);
    for (int i = 0; i < u.size(); ++i) u(i) = gauss(rng);
    const double lhs = (rigidity_matrix_at(r.framework, q) * u).norm();
    ++rec.samples;
    if (lhs > zbound * q.norm() * u.norm() * (1 + 1e-12)) ++rec.rmatrix_violations;
  }
  return rec;
}

CubicProbe::CubicProbe(double b_, double c_, double a_bar_) : b(b_), c(c_), a_bar(a_bar_) {
  if (!(b > 0)) throw std::invalid_argument("cubic: b must be positive");
  if (!(a_bar > 0)) throw std::invalid_argument("cubic: a_bar must be positive");
  if (!(a_bar < a_star()))
    throw std::invalid_argument("cubic: a_bar must lie strictly below b^2 / (4|c|)");
}

double CubicProbe::a_star() const { return c == 0 ? kInf : b * b / (4 * std::abs(c)); }

double CubicProbe::t_star() const { return 2 * std::abs(c) / b; }

double CubicProbe::t1_plus(double a) const {
  if (a == 0) return kInf;
  const double disc = 1 - 4 * std::abs(a) * std::abs(c) / (b * b);
  return b / (2 * std::abs(a)) * (1 + std::sqrt(std::max(disc, 0.0)));
}

double CubicProbe::t_c() const { return 2 * b / (3 * a_bar); }

double CubicProbe::g(double t, double a) const { return ((a * t + b) * t + c) * t; }

double CubicProbe::f_lower(double t) const {
  return ((-a_bar * t + b) * t - std::abs(c)) * t;
}

namespace {

double grid_point(double lo, double hi, int i, int n) {
  return n == 1 ? lo : lo + (hi - lo) * double(i) / (n - 1);
}

}  // namespace

CubicReport cubic_positivity(const CubicProbe& probe, int nt, int na) {
  CubicReport rep;
  rep.min_margin = kInf;
  const double lo = probe.t_star();
  const double hi = probe.t1_plus(probe.a_bar) * (1 - 1e-9);
  for (int ia = 0; ia < na; ++ia) {
    const double a = grid_point(-probe.a_bar, probe.a_bar, ia, na);
    for (int it = 0; it < nt; ++it) {
      const double t = grid_point(lo, hi, it, nt);
      for (double sign : {1.0, -1.0}) {
        const double v = probe.g(sign * t, a);
        ++rep.checks;
        rep.min_margin = std::min(rep.min_margin, v);
        if (!(v > 0)) ++rep.violations;
      }
    }
  }
  return rep;
}

CubicReport cubic_zero_positivity(const CubicProbe& probe, int nt, int na) {
  if (probe.c != 0) throw std::invalid_argument("cubic: zero-linear-term bound needs c = 0");
  CubicReport rep;
  rep.min_margin = kInf;
  const double hi = probe.b / probe.a_bar * (1 - 1e-9);
  const double lo = hi * 1e-9;
  for (int ia = 0; ia < na; ++ia) {
    const double a = grid_point(-probe.a_bar, probe.a_bar, ia, na);
    for (int it = 0; it < nt; ++it) {
      const double t = grid_point(lo, hi, it, nt);
      for (double sign : {1.0, -1.0}) {
        const double v = probe.g(sign * t, a);
        ++rep.checks;
        rep.min_margin = std::min(rep.min_margin, v);
        if (!(v > 0)) ++rep.violations;
      }
    }
  }
  return rep;
}

CubicReport cubic_lower_bound(const CubicProbe& probe, int nt, int na) {
  CubicReport rep;
  rep.min_margin = kInf;
  const double hi = 3 * probe.t_c();
  const double lo = hi * 1e-9;
  for (int ia = 0; ia < na; ++ia) {
    const double a = grid_point(-probe.a_bar, probe.a_bar, ia, na);
    for (int it = 0; it < nt; ++it) {
      const double t = grid_point(lo, hi, it, nt);
      const double floor = probe.f_lower(t);
      const double scale =
          probe.a_bar * t * t * t + probe.b * t * t + std::abs(probe.c) * t;
      for (double sign : {1.0, -1.0}) {
        const double margin = probe.g(sign * t, a) - floor;
        ++rep.checks;
        rep.min_margin = std::min(rep.min_margin, margin);
        if (margin < -1e-12 * scale) ++rep.violations;
      }
    }
  }
  return rep;
}

}  // namespace rigidity
