#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rigidity/conic.hpp"
#include "rigidity/framework.hpp"
#include "rigidity/geometry.hpp"
#include "rigidity/spectral.hpp"

namespace rigidity {

enum class Classification { first_order_rigid, prestress_stable, almost_rigid, inconclusive };
const char* classification_name(Classification c);

enum class Eta2Case { case1, case2 };

enum class PinChoice {
  automatic,     // use the framework's pins when present, else the orthogonal complement
  none,          // always the orthogonal complement
  force_pinned,  // always the framework's pins
};

struct AnalyzeOptions {
  double lambda_fraction = 0.5;
  double sigma_cutoff = 1e-7;
  double rank_cutoff = 1e-10;
  PinChoice pin = PinChoice::automatic;
  int verify_samples = 0;
  std::uint64_t seed = 0;
};

// Scalars the radius formulas run on. kappa = 0 forces L infinite; mu_bar
// can then be <= 0 and the outer radii are unbounded.
struct DerivedConstants {
  double lambda = 0;
  double kappa = 0;
  double L = 0;
  double mu0 = 0;
  double mu_bar = 0;
  int z = 0;
  double residual = 0;     // |R(p)^T omega|
  double omega_norm = 0;   // |omega|
  double p_norm = 0;       // |p - centroid|
  bool first_order = false;
};

struct VerificationRecord {
  bool skipped = true;
  std::string skip_reason;
  int samples = 0;
  int violations = 0;
  double worst_annulus = 0;  // min excess of the energy over 0 inside the annulus
  double worst_barrier = 0;  // min excess of the energy over the barrier bound
  double worst_edge = 0;     // min excess of the edge displacement over its bound
  std::uint64_t seed = 0;
};

struct RigidityReport {
  double eta1 = 0;
  std::optional<double> eta2;  // unset when containment fails; +inf when kappa = 0
  std::optional<double> eta3;
  std::optional<double> e_min_star;
  std::optional<Eta2Case> eta2_case;
  double D = 0;
  double D_pss = 0;
  bool containment_applies = false;
  bool barrier_applies = false;
  bool stability_applies = false;
  Classification classification = Classification::inconclusive;
  std::vector<std::string> warnings;
};

struct AnalysisResult {
  Framework framework;
  AnalyzeOptions options;
  Subspace C;
  SpectralDecomposition spectral;
  StressCertificate certificate;
  bool has_constants = false;
  DerivedConstants constants;
  RigidityReport report;
  std::optional<VerificationRecord> verification;
};

// Radius and margin formulas. All take plain scalars so they can be pinned
// against worked numbers directly.
double compute_eta1(double lambda, double residual);
double compute_D(double eta1, double L, double mu_bar);
double compute_D_pss(double eta1, double L, double mu_bar, double p_norm);
// Threshold on D below which the tighter outer-radius case applies.
double eta2_case_threshold(double mu_bar);
std::pair<double, Eta2Case> compute_eta2(double eta1, double L, double mu_bar, double D);
// Threshold on D below which the energy-barrier radius applies.
double barrier_threshold(double mu_bar);
double compute_eta3(double L, double mu_bar);
// Least guaranteed edge displacement at configuration distance eta,
// valid on eta > (3/2) eta1. kappa may be 0.
double e_min(double eta, double eta1, double lambda, double kappa, double omega_norm);
// Radius certified to contain all length-preserving configurations whose
// edge vector moved by at most eps.
double compute_eta_max(double eps, double eta1, double lambda, double kappa, double omega_norm);

DerivedConstants derive_constants(const AnalysisResult& partial, double lambda_fraction);

// Radii and applicability flags from the constants alone; classification and
// context warnings are layered on by analyze().
RigidityReport radii_report(const DerivedConstants& c);

AnalysisResult analyze(const Framework& f, const AnalyzeOptions& opts = {});

std::string report_to_json(const AnalysisResult& r);
std::string report_to_text(const AnalysisResult& r);

// CSV over a grid of lambda/lambda0 fractions; columns
// lambda_fraction, L, kappa, eta1, eta2, eta3, e_min_star.
std::string sweep_lambda_csv(const Framework& f, double lo, double hi, int count,
                             const AnalyzeOptions& opts);

struct TensegrityAnalysis {
  AnalysisResult base;           // analysis on the final edge set
  TensegrityCertificate tenseg;  // empty when the framework is all bars
  bool all_bars = false;
  bool proper = false;           // cables positive, struts negative, strictly
  double edge_margin = 0;        // +inf when kappa = 0
  std::vector<int> removed_edges;  // 0-based indices into the original edge list
  int exit_status = 0;           // 1 when no proper stress exists
};

TensegrityAnalysis tensegrity_analyze(const Framework& f, const AnalyzeOptions& opts = {});
std::string tensegrity_to_json(const TensegrityAnalysis& t);
std::string tensegrity_to_text(const TensegrityAnalysis& t);

}  // namespace rigidity
