#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "rigidity/analysis.hpp"
#include "rigidity/framework.hpp"

namespace rigidity {

// Smoothed elastic energy with rest lengths taken from p and a linear stress
// term: H(q) = sum_k [ (kappa/2) (|q_i-q_j|^2 - |p_i-p_j|^2)^2
//                      + omega_k |q_i-q_j|^2 ].
// Along a line q + t v this is an exact quartic in t.
struct EnergyModel {
  Framework f;
  Eigen::VectorXd p;      // rest configuration
  Eigen::VectorXd p_sq;   // squared rest lengths
  double kappa = 0;
  Eigen::VectorXd omega;  // one entry per edge

  double energy(const Eigen::VectorXd& q) const;
  double delta_energy(const Eigen::VectorXd& q) const;  // energy(q) - energy(p)

  // Stress induced at q: kappa (e(q) - e(p)) + omega.
  Eigen::VectorXd stress_at(const Eigen::VectorXd& q) const;

  struct Derivs {
    double d1 = 0, d2 = 0, d3 = 0, d4 = 0;
  };
  // Directional derivatives of t -> H(q + t v) at t = 0.
  Derivs directional(const Eigen::VectorXd& q, const Eigen::VectorXd& v) const;

  // Quadratic, linear, and cubic coefficients controlling H along p + t v:
  // b = 2 kappa |R(p)v|^2 + v^T O(omega) v, c = 2 omega^T R(p) v,
  // a(r) = 2 kappa v^T (R(p) + R(rv))^T R(v) v, nondecreasing in r.
  double coeff_b(const Eigen::VectorXd& v) const;
  double coeff_c(const Eigen::VectorXd& v) const;
  double coeff_a(const Eigen::VectorXd& v, double r) const;
};

EnergyModel energy_model(const AnalysisResult& r);

// Sample the certified conclusions: positive energy gain on the annulus
// between eta1 and eta2, the explicit barrier on ((3/2) eta1, eta3], and the
// edge-displacement floor. Directions are drawn inside C (unit, ambient),
// with a fixed adversarial set prepended; radii are log-spaced.
VerificationRecord verify_certified_region(const AnalysisResult& r, int samples,
                                           std::uint64_t seed);
// Same sampling against an AnalysisResult whose constants were rebuilt with
// a different kappa (used to show the check has teeth).
AnalysisResult with_kappa(const AnalysisResult& r, double kappa);

// Spot checks of the inequalities the radius formulas rest on.
struct BoundCheckRecord {
  int samples = 0;
  int ratio_violations = 0;   // third-vs-second derivative ratio bound
  int rmatrix_violations = 0; // |R(q)u| <= 2 sqrt(z) |q| |u|
  double worst_ratio_slack = 0;
  double eta0_min_ratio = 0;     // min of (b/2a) / eta0(r), should stay >= 1
  double eta0bad_min_ratio = 0;  // same against the configuration-norm variant, reported only
};
BoundCheckRecord bound_checks(const AnalysisResult& r, int samples, std::uint64_t seed);

// Scalar cubic g(t) = a t^3 + b t^2 + c t with |a| <= a_bar, b > 0. The
// construction requires a_bar < a_star = b^2 / (4 |c|).
struct CubicProbe {
  double b = 0, c = 0, a_bar = 0;

  CubicProbe(double b, double c, double a_bar);

  double a_star() const;              // b^2 / (4|c|), +inf when c = 0
  double t_star() const;              // 2|c| / b
  double t1_plus(double a) const;     // larger positive root scale of the margin
  double t_c() const;                 // 2b / (3 a_bar)
  double g(double t, double a) const;
  double f_lower(double t) const;     // -a_bar t^3 + b t^2 - |c| t
};

struct CubicReport {
  long long checks = 0;
  long long violations = 0;
  double min_margin = 0;
};

// g(t, a) > 0 for all |a| <= a_bar and t_star <= |t| < t1_plus(a_bar).
CubicReport cubic_positivity(const CubicProbe& probe, int nt, int na);
// c = 0 variant: g > 0 on 0 < |t| < b / a_bar.
CubicReport cubic_zero_positivity(const CubicProbe& probe, int nt, int na);
// g(t, a) >= f_lower(|t|) for all |a| <= a_bar.
CubicReport cubic_lower_bound(const CubicProbe& probe, int nt, int na);

}  // namespace rigidity
