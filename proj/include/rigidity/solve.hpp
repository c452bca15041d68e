#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "rigidity/analysis.hpp"
#include "rigidity/framework.hpp"

namespace rigidity {

struct SolveSettings {
  double delta = 9e-16;        // target on max |squared-length residual|
  int max_iterations = 500;
  double damping_scale = 1e-3; // initial damping relative to |J^T J|
  std::vector<int> pinned;     // 0-based coordinate indices held fixed (default none)
  bool align_to_seed = true;   // Kabsch-align the unpinned result onto the start
  std::vector<double>* residual_trace = nullptr;  // accepted residuals, for diagnostics
};

struct SolveResult {
  Eigen::VectorXd q;
  int iterations = 0;
  double max_residual = 0;
  bool converged = false;
};

// Thrown when the damped least-squares iteration stalls; carries the best
// iterate seen.
struct solve_failure : solver_error {
  SolveResult best;
  solve_failure(const std::string& msg, SolveResult b)
      : solver_error(msg), best(std::move(b)) {}
};

// Find a configuration near f's current one whose edge lengths match
// `target_lengths` to within settings.delta on squared residuals.
// Levenberg-style damped Gauss-Newton; pinned coordinates never move.
SolveResult solve_edges(const Framework& f, const Eigen::VectorXd& target_lengths,
                        const SolveSettings& settings = {});

struct PerturbationRow {
  double delta = 0;
  int trial = 0;
  bool failed = false;
  std::string error;
  double eta1 = 0;
  std::optional<double> eta2, eta3, e_min_star;
  double D = 0;
  double D_pss = 0;
  Classification classification = Classification::inconclusive;
};

struct PerturbationAggregate {
  double delta = 0;
  int trials_ok = 0;
  double eta1_mean = 0, eta1_std = 0;
  double eta2_mean = 0, eta2_std = 0;
  double eta3_mean = 0, eta3_std = 0;
  double e_min_star_mean = 0, e_min_star_std = 0;
};

struct PerturbationResult {
  std::vector<PerturbationRow> rows;
  std::vector<PerturbationAggregate> aggregates;  // one per delta, in input order
};

struct PerturbSettings {
  std::vector<double> deltas;  // solver tolerances to sweep
  int trials = 20;
  double noise = 0;            // per-coordinate noise; <= 0 means 1e-3 x mean edge length
  std::uint64_t seed = 0;
  AnalyzeOptions analyze;      // callers default sigma_cutoff to 1e-2 here
};

// Perturb the configuration, re-solve the original lengths to each delta,
// and run the full analysis on the result. Per-trial failures are recorded
// in the row, not thrown.
PerturbationResult perturbation_experiment(const Framework& f, const PerturbSettings& settings);

// Columns: delta, trial, eta1, eta2, eta3, e_min_star, D, D_pss, classification.
std::string perturbation_csv(const PerturbationResult& r);

}  // namespace rigidity
