#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "doctest.h"
#include "rigidity/analysis.hpp"
#include "rigidity/corpus.hpp"
#include "rigidity/energy.hpp"
#include "rigidity/geometry.hpp"

using namespace rigidity;

namespace {

Eigen::VectorXd random_vector(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = gauss(rng);
  return v;
}

}  // namespace

TEST_CASE("energy difference identity") {
  const EnergyModel m = energy_model(analyze(corpus_framework("example_a")));
  for (unsigned seed : {1u, 2u, 3u}) {
    const Eigen::VectorXd q = m.p + 0.3 * random_vector(m.p.size(), seed);
    CHECK(m.delta_energy(q) ==
          doctest::Approx(m.energy(q) - m.energy(m.p)).epsilon(1e-10));
  }
}

TEST_CASE("energy along a line is the exact quartic of its derivatives") {
  const EnergyModel m = energy_model(analyze(corpus_framework("example_h")));
  const Eigen::VectorXd q = m.p + 0.05 * random_vector(m.p.size(), 9);
  const Eigen::VectorXd v = random_vector(m.p.size(), 10).normalized();
  const auto d = m.directional(q, v);
  const double h0 = m.energy(q);
  const auto line = [&](double t) { return m.energy(q + t * v); };
  // Even part at t = 1, 2 determines d2 and d4; odd part determines d1, d3.
  const double e1 = 0.5 * (line(1) + line(-1)) - h0;  // d2/2 + d4/24
  const double e2 = 0.5 * (line(2) + line(-2)) - h0;  // 2 d2 + (2/3) d4
  const double o1 = 0.5 * (line(1) - line(-1));       // d1 + d3/6
  const double o2 = 0.5 * (line(2) - line(-2));       // 2 d1 + (4/3) d3
  const double d4 = 2 * (e2 - 4 * e1);
  const double d2 = 2 * (e1 - d4 / 24);
  const double d3 = (o2 - 2 * o1);
  const double d1 = o1 - d3 / 6;
  CHECK(d.d1 == doctest::Approx(d1).epsilon(1e-8));
  CHECK(d.d2 == doctest::Approx(d2).epsilon(1e-8));
  CHECK(d.d3 == doctest::Approx(d3).epsilon(1e-8));
  CHECK(d.d4 == doctest::Approx(d4).epsilon(1e-8));
}

TEST_CASE("energy is translation invariant") {
  const EnergyModel m = energy_model(analyze(corpus_framework("k34_heptagon")));
  const Eigen::VectorXd q = m.p + 0.1 * random_vector(m.p.size(), 4);
  Eigen::VectorXd shift = Eigen::VectorXd::Zero(q.size());
  for (int i = 0; i < q.size() / 2; ++i) {
    shift(i * 2) = 0.7;
    shift(i * 2 + 1) = -1.3;
  }
  CHECK(m.energy(q + shift) == doctest::Approx(m.energy(q)).epsilon(1e-12));
}

TEST_CASE("line coefficients match the directional derivatives at rest") {
  const EnergyModel m = energy_model(analyze(corpus_framework("example_a")));
  const Eigen::VectorXd v = random_vector(m.p.size(), 12).normalized();
  const auto d = m.directional(m.p, v);
  CHECK(m.coeff_c(v) == doctest::Approx(d.d1).epsilon(1e-12));
  CHECK(m.coeff_b(v) == doctest::Approx(0.5 * d.d2).epsilon(1e-12));
  CHECK(m.coeff_a(v, 0.0) == doctest::Approx(d.d3 / 6.0).epsilon(1e-12));
  // The cubic coefficient grows with the radius.
  CHECK(m.coeff_a(v, 1.0) >= m.coeff_a(v, 0.0));
  CHECK(m.coeff_a(v, 2.0) >= m.coeff_a(v, 1.0));
}

TEST_CASE("certified region verifies clean on the stressed example") {
  const AnalysisResult r = analyze(corpus_framework("example_a"));
  const VerificationRecord rec = verify_certified_region(r, 240, 5);
  CHECK(rec.skipped == false);
  CHECK(rec.samples == 720);  // 8 annulus + 8 barrier + 8 edge per direction
  CHECK(rec.violations == 0);
  CHECK(rec.worst_annulus > 0.0);
  CHECK(rec.worst_barrier >= -1e-9);
  CHECK(rec.worst_edge >= -1e-9);
}

TEST_CASE("certified region verifies clean on a first-order rigid example") {
  const AnalysisResult r = analyze(corpus_framework("square"));
  const VerificationRecord rec = verify_certified_region(r, 96, 11);
  CHECK(rec.skipped == false);
  CHECK(rec.violations == 0);
}

TEST_CASE("verification is reproducible by seed") {
  const AnalysisResult r = analyze(corpus_framework("example_h"));
  const VerificationRecord a = verify_certified_region(r, 160, 42);
  const VerificationRecord b = verify_certified_region(r, 160, 42);
  CHECK(a.samples == b.samples);
  CHECK(a.worst_annulus == b.worst_annulus);
  CHECK(a.worst_barrier == b.worst_barrier);
  CHECK(a.worst_edge == b.worst_edge);
}

TEST_CASE("rebuilt constants rescale the radii") {
  const AnalysisResult r = analyze(corpus_framework("example_a"));
  const AnalysisResult wk = with_kappa(r, r.constants.kappa / 4.0);
  CHECK(wk.constants.L == doctest::Approx(2.0 * r.constants.L).epsilon(1e-12));
  CHECK(*wk.report.eta2 == doctest::Approx(2.0 * *r.report.eta2).epsilon(1e-6));
}

TEST_CASE("an understated stiffening constant is caught by sampling") {
  // Halving kappa widens every radius and raises the edge-displacement
  // floor beyond what the framework actually delivers along its flexes.
  const AnalysisResult r = analyze(corpus_framework("example_a"));
  const AnalysisResult bad = with_kappa(r, r.constants.kappa / 2.0);
  const VerificationRecord rec = verify_certified_region(bad, 500, 1);
  CHECK(rec.skipped == false);
  CHECK(rec.violations >= 1);
}

TEST_CASE("derivative and matrix bounds hold on random samples") {
  const AnalysisResult r = analyze(corpus_framework("example_a"));
  const BoundCheckRecord rec = bound_checks(r, 100, 2);
  CHECK(rec.samples > 0);
  CHECK(rec.ratio_violations == 0);
  CHECK(rec.rmatrix_violations == 0);
  CHECK(rec.worst_ratio_slack >= 0.0);
  CHECK(rec.eta0_min_ratio >= 1.0);
}

TEST_CASE("bound checks demand a stiffened certificate") {
  AnalysisResult r = analyze(corpus_framework("square"));
  r.constants.kappa = 0.0;
  CHECK_THROWS_AS(bound_checks(r, 10, 1), std::invalid_argument);
}

TEST_CASE("cubic probe geometry") {
  const CubicProbe probe(2.0, 1.0, 0.8);
  CHECK(probe.a_star() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(probe.t_star() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(probe.t1_plus(0.8) == doctest::Approx(1.25 * (1 + std::sqrt(0.2))).epsilon(1e-12));
  CHECK(probe.t_c() == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
  CHECK(std::isinf(CubicProbe(2.0, 0.0, 0.8).a_star()));
}

TEST_CASE("cubic probe rejects an overlarge cubic bound") {
  CHECK_THROWS_AS(CubicProbe(2.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(CubicProbe(2.0, 1.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(CubicProbe(-1.0, 0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(CubicProbe(2.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("cubic positivity holds on a dense grid") {
  const CubicProbe probe(2.0, 1.0, 0.8);
  const CubicReport rep = cubic_positivity(probe, 200, 41);
  CHECK(rep.checks == 200 * 41 * 2);
  CHECK(rep.violations == 0);
  CHECK(rep.min_margin > 0.0);
}

TEST_CASE("cubic positivity with no linear term") {
  const CubicProbe probe(2.0, 0.0, 0.8);
  const CubicReport rep = cubic_zero_positivity(probe, 150, 31);
  CHECK(rep.violations == 0);
  CHECK(rep.min_margin > 0.0);
  CHECK_THROWS_AS(cubic_zero_positivity(CubicProbe(2.0, 1.0, 0.8), 10, 3),
                  std::invalid_argument);
}

TEST_CASE("cubic stays above its explicit lower envelope") {
  const CubicProbe probe(2.0, 1.0, 0.8);
  const CubicReport rep = cubic_lower_bound(probe, 150, 31);
  CHECK(rep.violations == 0);
}
