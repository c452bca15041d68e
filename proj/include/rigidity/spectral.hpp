#pragma once

#include <Eigen/Dense>

#include "rigidity/framework.hpp"
#include "rigidity/geometry.hpp"

namespace rigidity {

// Singular-value split of the rigidity matrix restricted to the complement.
//
// V spans the near-flex directions: right singular vectors of R(p) C_basis
// with singular value at or below the absolute cutoff, mapped back through
// C_basis (so V is a subspace of C). W spans the near-stresses: left
// singular vectors of the full R(p) with singular value at or below the
// cutoff, including structural zeros when there are more edges than
// coordinate degrees of freedom.
struct SpectralDecomposition {
  double sigma_cutoff = 0;
  Eigen::VectorXd singular_values;  // of R(p) C, descending, padded with zeros to rank(C)
  Subspace V;                       // near flexes, ambient R^{dn}, inside C
  Subspace W;                       // near stresses, ambient R^m
  double sigma0 = 0;                // smallest singular value strictly above the cutoff

  int n_v() const { return V.rank(); }
  int n_w() const { return W.rank(); }
};

// Throws solver_error when every singular value of R(p) C is at or below the
// cutoff (no spectral gap to report).
SpectralDecomposition decompose(const Framework& f, const Subspace& C, double sigma_cutoff);

// Smallest singular value of R(p) C above the relative rank cutoff.
double smallest_nonzero_singular(const Framework& f, const Subspace& C,
                                 double rank_rel_cutoff = 1e-10);

}  // namespace rigidity
