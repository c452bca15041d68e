#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rigidity/framework.hpp"
#include "rigidity/geometry.hpp"
#include "rigidity/spectral.hpp"

namespace rigidity {

enum class CertStatus {
  positive_definite,  // a unit stress was found making the flex form positive definite
  failed,             // stresses exist but none certifies positivity
  vacuous,            // no near-flexes, nothing to certify
  no_stress,          // no near-stresses at this cutoff
};

const char* cert_status_name(CertStatus s);

// Result of the stress search over the unit ball of near-stress coefficients.
struct StressCertificate {
  CertStatus status = CertStatus::vacuous;
  Eigen::VectorXd a;      // coefficients in the W basis, |a| <= 1
  Eigen::VectorXd omega;  // W_basis * a, an edge-stress vector
  double lambda0 = 0;     // min eigenvalue of the certified flex form (best found when failed)
  double mu0 = 0;         // min eigenvalue of the stress form on C, filled by the caller
  double gap = 0;         // optimality gap bound from the solver (general route only)
  int iterations = 0;
};

// M_i = V^T stress_matrix(w_i) V for each column w_i of W, symmetrized.
std::vector<Eigen::MatrixXd> flex_stress_forms(const Framework& f, const Subspace& V,
                                               const Subspace& W);

// Maximize min-eigenvalue of sum_i a_i M_i over |a| <= 1. Closed forms for
// one stress or one flex; Frank-Wolfe on the dual otherwise. The returned
// lambda0 is recomputed at the returned coefficients, so
// eig_min(sum a_i M_i) = lambda0 holds to machine accuracy.
StressCertificate stress_search(const std::vector<Eigen::MatrixXd>& Ms);

// Least kappa >= 0 with A + kappa B - lambda I positive semidefinite, for
// symmetric A, PSD B, and 0 < lambda < lambda0 where A is at least lambda0
// on the null space of B (checked; lambda0 may be +inf to skip the bound
// lambda < lambda0). Reduced Schur-complement eigenvalue route with a
// feasibility polish. Throws solver_error when no finite kappa works.
double kappa_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double lambda,
                   double lambda0);

// Independent oracle: pure bisection on eig_min(A + kappa B - lambda I).
double kappa_bisection(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double lambda,
                       double lambda0);

// Absolute tolerance the two routes are expected to agree within.
double kappa_tolerance(double kappa);

// Sign-constraint rows for a tensegrity: row per non-bar edge k, equal to
// label_k times the k-th unit row, so (E omega)_row = label_k * omega_k must
// stay positive for a proper stress. Also returns the edge index per row.
struct TensionRows {
  Eigen::MatrixXd E;           // rows x m
  std::vector<int> edge_index; // rows, 0-based edge per row
};
TensionRows tension_sign_rows(const Framework& f);

// Joint search over |a| <= 1 maximizing min(strictness of the sign
// constraints, min-eigenvalue of the flex form). With no near-flexes only
// the sign constraints matter and t is +inf.
struct TensegrityCertificate {
  bool success = false;
  Eigen::VectorXd a;
  Eigen::VectorXd omega;
  double s = 0;                  // min over sign constraints of label_k * omega_k
  double t = 0;                  // min eigenvalue of the flex form; +inf when vacuous
  std::vector<int> slack_edges;  // non-bar edges whose constraint sits at ~0 when failed
  int iterations = 0;
};

TensegrityCertificate tensegrity_stress_search(const std::vector<Eigen::MatrixXd>& Ms,
                                               const Eigen::MatrixXd& W_basis,
                                               const TensionRows& rows);

// min over non-bar edges of 2 |omega_k| / kappa; +inf when kappa = 0.
double tensegrity_edge_margin(const Framework& f, const Eigen::VectorXd& omega, double kappa);

}  // namespace rigidity
