#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <sstream>
#include <string>

#include "doctest.h"
#include "rigidity/analysis.hpp"
#include "rigidity/corpus.hpp"

using namespace rigidity;

namespace {

AnalyzeOptions loose_cutoff() {
  AnalyzeOptions o;
  o.sigma_cutoff = 1e-2;
  return o;
}

Framework perturbed_split_base(double h5, double h6) {
  Framework f = corpus_framework("example_a");
  f.vertices(4, 1) += h5;
  f.vertices(5, 1) += h6;
  return f;
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("inner radius formula") {
  CHECK(compute_eta1(2.0, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(compute_eta1(4.0, 0.0) == 0.0);
  CHECK_THROWS_AS(compute_eta1(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(compute_eta1(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("smallness measures") {
  CHECK(compute_D(0.1, 1.0, 4.0) == doctest::Approx(0.21).epsilon(1e-12));
  CHECK(compute_D(0.0, 2.0, 9.0) == 0.0);
  CHECK(compute_D_pss(0.1, 1.0, 4.0, 2.0) == doctest::Approx(0.315).epsilon(1e-12));
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(compute_D(0.1, inf, 4.0) == 0.0);
}

TEST_CASE("outer radius cases and threshold") {
  CHECK(eta2_case_threshold(0.0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(eta2_case_threshold(1.0) ==
        doctest::Approx(0.25 + (std::sqrt(5.0) - 1.0) / 8.0).epsilon(1e-12));

  const auto [v1, c1] = compute_eta2(0.0, 1.0, 1.0, 0.0);
  CHECK(c1 == Eta2Case::case1);
  CHECK(v1 == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-12));

  const auto [v2, c2] = compute_eta2(0.0, 1.0, 1.0, 0.5);
  CHECK(c2 == Eta2Case::case2);
  CHECK(v2 == doctest::Approx((std::sqrt(3.0) - 1.0) / 2.0).epsilon(1e-12));

  // The inner radius is subtracted only in the tight case.
  const auto [v3, c3] = compute_eta2(0.01, 1.0, 1.0, 0.0);
  CHECK(c3 == Eta2Case::case1);
  CHECK(v3 == doctest::Approx(v1 - 0.01).epsilon(1e-12));
}

TEST_CASE("barrier radius formula") {
  CHECK(barrier_threshold(0.0) == doctest::Approx(8.0 / 27.0).epsilon(1e-12));
  CHECK(barrier_threshold(1.0) ==
        doctest::Approx((8.0 / 3.0 + std::sqrt(11.0 / 3.0) - 1.0) / 9.0).epsilon(1e-12));
  CHECK(compute_eta3(1.0, 1.0) ==
        doctest::Approx(0.5 * (std::sqrt(11.0 / 3.0) - 1.0)).epsilon(1e-12));
}

TEST_CASE("guaranteed edge displacement") {
  // Quadratic-plus-linear stress route.
  CHECK(e_min(1.0, 0.0, 3.0, 2.0, 2.0) ==
        doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));
  // Pure linear route at kappa = 0.
  CHECK(e_min(1.0, 0.0, 3.0, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  // Inside the dead zone the bound is vacuous.
  CHECK(e_min(0.1, 0.1, 3.0, 2.0, 1.0) == 0.0);
  CHECK_THROWS_AS(e_min(1.0, 0.0, 3.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("edge displacement is continuous as the stiffening constant vanishes") {
  const double limit = e_min(0.8, 0.1, 3.0, 0.0, 1.5);
  const double near = e_min(0.8, 0.1, 3.0, 1e-9, 1.5);
  CHECK(near == doctest::Approx(limit).epsilon(1e-6));
}

TEST_CASE("containment radius inverts the edge displacement exactly") {
  const double eta1 = 0.02, lambda = 1.7, kappa = 2.3, w = 0.9;
  for (double eta : {0.05, 0.3, 1.0, 4.0}) {
    const double eps = e_min(eta, eta1, lambda, kappa, w);
    REQUIRE(eps > 0);
    CHECK(compute_eta_max(eps, eta1, lambda, kappa, w) ==
          doctest::Approx(eta).epsilon(1e-10));
  }
  // kappa = 0 variant.
  const double eps0 = e_min(0.5, 0.02, 1.7, 0.0, 0.9);
  CHECK(compute_eta_max(eps0, 0.02, 1.7, 0.0, 0.9) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("first-order rigid route uses the closed forms in the spectral gap") {
  const AnalysisResult r = analyze(corpus_framework("square"));
  REQUIRE(r.has_constants);
  CHECK(r.constants.first_order);
  CHECK(r.constants.kappa == 1.0);
  CHECK(r.constants.mu_bar == 1.0);
  const double s0 = r.spectral.sigma0;
  CHECK(r.constants.lambda == doctest::Approx(2 * s0 * s0).epsilon(1e-12));
  const double L = s0 / (2.0 * std::sqrt(3.0));  // max degree 3
  CHECK(r.constants.L == doctest::Approx(L).epsilon(1e-12));
  CHECK(r.report.eta1 == 0.0);
  REQUIRE(r.report.eta2);
  CHECK(*r.report.eta2 == doctest::Approx(L * (std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-12));
  REQUIRE(r.report.eta3);
  CHECK(*r.report.eta3 ==
        doctest::Approx(L * (std::sqrt(11.0 / 3.0) - 1.0) / 2.0).epsilon(1e-12));
  CHECK(r.report.classification == Classification::first_order_rigid);
}

TEST_CASE("radii of the braced square") {
  const AnalysisResult r = analyze(corpus_framework("square"));
  CHECK(*r.report.eta2 == doctest::Approx(0.15594).epsilon(1e-4));
  CHECK(*r.report.eta3 == doctest::Approx(0.11541).epsilon(1e-4));
  CHECK(*r.report.e_min_star == doctest::Approx(0.11648).epsilon(1e-4));
}

TEST_CASE("radii of the regular tetrahedron") {
  const AnalysisResult r = analyze(corpus_framework("tetrahedron"));
  CHECK(r.report.classification == Classification::first_order_rigid);
  CHECK(*r.report.eta2 == doctest::Approx(0.17841).epsilon(1e-4));
  CHECK(*r.report.eta3 == doctest::Approx(0.13205).epsilon(1e-4));
  CHECK(*r.report.e_min_star == doctest::Approx(0.15248).epsilon(1e-4));
}

TEST_CASE("radii of the regular octahedron") {
  const AnalysisResult r = analyze(corpus_framework("octahedron"));
  CHECK(r.report.classification == Classification::first_order_rigid);
  CHECK(*r.report.eta2 == doctest::Approx(0.15451).epsilon(1e-4));
  CHECK(*r.report.eta3 == doctest::Approx(0.11436).epsilon(1e-4));
  CHECK(*r.report.e_min_star == doctest::Approx(0.13205).epsilon(1e-4));
}

TEST_CASE("radii of the parallel-bar framework") {
  const AnalysisResult r = analyze(corpus_framework("example_h"));
  CHECK(r.report.classification == Classification::prestress_stable);
  CHECK(*r.report.eta2 == doctest::Approx(0.13226).epsilon(1e-4));
  CHECK(*r.report.eta3 == doctest::Approx(0.095852).epsilon(1e-4));
  CHECK(*r.report.e_min_star == doctest::Approx(8.877e-4).epsilon(1e-3));
}

TEST_CASE("radii of the bipartite heptagon framework") {
  const AnalysisResult r = analyze(corpus_framework("k34_heptagon"));
  CHECK(r.report.classification == Classification::prestress_stable);
  CHECK(*r.report.eta2 == doctest::Approx(0.027528).epsilon(1e-4));
  CHECK(*r.report.eta3 == doctest::Approx(0.018872).epsilon(1e-4));
  CHECK(*r.report.e_min_star == doctest::Approx(1.3628e-5).epsilon(1e-3));
}

TEST_CASE("full pipeline on the flexible triangle over a split base") {
  const AnalysisResult r = analyze(corpus_framework("example_a"));
  CHECK(r.spectral.n_v() == 2);
  CHECK(r.spectral.n_w() == 1);
  CHECK(r.constants.kappa == doctest::Approx(3.5236474776847553).epsilon(1e-9));
  CHECK(r.report.eta1 < 1e-12);  // exact coordinates: the stress is in equilibrium
  CHECK(*r.report.eta2 == doctest::Approx(0.013581386225283714).epsilon(1e-9));
  CHECK(*r.report.eta3 == doctest::Approx(0.009287261419503857).epsilon(1e-9));
  CHECK(*r.report.e_min_star == doctest::Approx(5.6519281421141265e-06).epsilon(1e-7));
  CHECK(r.report.classification == Classification::prestress_stable);
  CHECK(r.report.containment_applies);
  CHECK(r.report.barrier_applies);
  CHECK(r.report.stability_applies);
}

TEST_CASE("lambda fraction is honored") {
  AnalyzeOptions o;
  o.lambda_fraction = 0.25;
  const AnalysisResult r = analyze(corpus_framework("example_a"), o);
  CHECK(r.constants.lambda ==
        doctest::Approx(0.25 * r.certificate.lambda0).epsilon(1e-12));
  const AnalysisResult half = analyze(corpus_framework("example_a"));
  CHECK(half.constants.lambda ==
        doctest::Approx(0.5 * half.certificate.lambda0).epsilon(1e-12));
  CHECK(r.constants.kappa < half.constants.kappa);  // smaller target is easier
}

TEST_CASE("radii scale with the framework") {
  // Doubling the configuration doubles distances and quadruples the edge
  // displacement floor; the certified eigenvalue is scale-free.
  const AnalysisResult base = analyze(corpus_framework("example_a"));
  Framework big = corpus_framework("example_a");
  big.vertices *= 2.0;
  const AnalysisResult scaled = analyze(big);
  CHECK(scaled.certificate.lambda0 == doctest::Approx(base.certificate.lambda0).epsilon(1e-9));
  CHECK(scaled.constants.kappa == doctest::Approx(0.25 * base.constants.kappa).epsilon(1e-9));
  CHECK(*scaled.report.eta2 == doctest::Approx(2.0 * *base.report.eta2).epsilon(1e-9));
  CHECK(*scaled.report.eta3 == doctest::Approx(2.0 * *base.report.eta3).epsilon(1e-9));
  CHECK(*scaled.report.e_min_star ==
        doctest::Approx(4.0 * *base.report.e_min_star).epsilon(1e-9));
}

TEST_CASE("slightly perturbed base stays certified at matched perturbations") {
  // Both split-base vertices moved up together: the stress stays nearly
  // balanced and the framework is almost rigid at a positive inner radius.
  const AnalysisResult r = analyze(perturbed_split_base(5e-4, 5e-4), loose_cutoff());
  CHECK(r.report.eta1 > 0.0);
  CHECK(r.report.D == doctest::Approx(0.3216).epsilon(2e-2));
  CHECK(r.report.classification == Classification::almost_rigid);
  REQUIRE(r.report.eta2);
  CHECK(r.report.eta1 < *r.report.eta2);
}

TEST_CASE("opposed perturbation is certified only while small") {
  const AnalysisResult ok = analyze(perturbed_split_base(2.5e-4, -2.5e-4), loose_cutoff());
  CHECK(ok.report.D == doctest::Approx(0.405).epsilon(5e-2));
  CHECK(ok.report.classification == Classification::almost_rigid);

  const AnalysisResult big = analyze(perturbed_split_base(5e-4, -5e-4), loose_cutoff());
  CHECK(big.report.D > 0.5);
  CHECK(big.report.containment_applies == false);
  CHECK(big.report.classification == Classification::inconclusive);
  CHECK(!big.report.eta2);
}

TEST_CASE("edge displacement floor grows over the barrier region") {
  const AnalysisResult r = analyze(corpus_framework("example_a"));
  const auto& c = r.constants;
  const double at_half = e_min(*r.report.eta3 / 2, r.report.eta1, c.lambda, c.kappa,
                               c.omega_norm);
  CHECK(*r.report.e_min_star > at_half);
  CHECK(at_half > 0.0);
}

TEST_CASE("pin handling") {
  Framework f = corpus_framework("example_a");
  f.pinned = {0, 1, 3};
  const AnalysisResult pinned = analyze(f);  // automatic: uses the pins
  CHECK(pinned.C.rank() == 9);
  CHECK(pinned.report.classification == Classification::prestress_stable);

  AnalyzeOptions o;
  o.pin = PinChoice::none;
  const AnalysisResult ortho = analyze(f, o);
  CHECK(ortho.C.rank() == 9);
  // Identity columns versus an orthogonal complement: same certificate space.
  CHECK(ortho.spectral.n_w() == pinned.spectral.n_w());
}

TEST_CASE("reports serialize deterministically") {
  const AnalysisResult a = analyze(corpus_framework("example_h"));
  const AnalysisResult b = analyze(corpus_framework("example_h"));
  CHECK(report_to_json(a) == report_to_json(b));
  CHECK(report_to_json(a).find("\"classification\": \"prestress_stable\"") !=
        std::string::npos);
  const std::string text = report_to_text(a);
  CHECK(text.find("prestress_stable") != std::string::npos);
}

TEST_CASE("verification plumbing runs inside analyze") {
  AnalyzeOptions o;
  o.verify_samples = 50;
  o.seed = 3;
  const AnalysisResult r = analyze(corpus_framework("example_a"), o);
  REQUIRE(r.verification);
  CHECK(r.verification->skipped == false);
  CHECK(r.verification->samples > 0);
  CHECK(r.verification->violations == 0);
  CHECK(r.verification->seed == 3);
}

TEST_CASE("lambda sweep emits one row per grid point") {
  const std::string csv =
      sweep_lambda_csv(corpus_framework("example_h"), 0.1, 0.9, 5, AnalyzeOptions{});
  CHECK(count_lines(csv) == 6);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "lambda_fraction,L,kappa,eta1,eta2,eta3,e_min_star");
  double first = -1;
  in >> first;
  CHECK(first == doctest::Approx(0.1).epsilon(1e-9));
}
