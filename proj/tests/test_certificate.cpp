#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <string>

#include "doctest.h"
#include "rigidity/analysis.hpp"
#include "rigidity/conic.hpp"
#include "rigidity/corpus.hpp"
#include "rigidity/geometry.hpp"

using namespace rigidity;

namespace {

double min_eig(const Eigen::MatrixXd& M) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues().minCoeff();
}

Eigen::MatrixXd diag2(double a, double b) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2, 2);
  M(0, 0) = a;
  M(1, 1) = b;
  return M;
}

// Certified min eigenvalue recomputed from the framework and the returned
// stress; must reproduce cert.lambda0.
double recheck_lambda0(const AnalysisResult& r) {
  const Eigen::MatrixXd O = stress_matrix(r.framework, r.certificate.omega);
  const Eigen::MatrixXd M =
      r.spectral.V.basis.transpose() * O * r.spectral.V.basis;
  return min_eig(0.5 * (M + M.transpose()));
}

}  // namespace

TEST_CASE("first-order rigid frameworks need no certificate") {
  const AnalysisResult r = analyze(corpus_framework("square"));
  CHECK(r.certificate.status == CertStatus::vacuous);
  CHECK(std::string(cert_status_name(r.certificate.status)) == "vacuous");
}

TEST_CASE("flexible triangle over a split base is certified prestress stable") {
  const AnalysisResult r = analyze(corpus_framework("example_a"));
  REQUIRE(r.certificate.status == CertStatus::positive_definite);
  CHECK(r.certificate.lambda0 == doctest::Approx(0.39316682549746695).epsilon(1e-10));
  CHECK(recheck_lambda0(r) == doctest::Approx(r.certificate.lambda0).epsilon(1e-10));
  CHECK(std::abs(r.certificate.a.norm() - 1.0) < 1e-12);
  CHECK(std::abs(r.certificate.omega.norm() - 1.0) < 1e-10);

  // The one-dimensional stress space has a fixed shape: with the first edge
  // as reference, equilibrium at every vertex forces these ratios.
  const Eigen::VectorXd& w = r.certificate.omega;
  REQUIRE(w.size() == 8);
  const double base = w(0);
  REQUIRE(std::abs(base) > 0.1);
  CHECK(w(1) / base == doctest::Approx(1.0).epsilon(1e-9));    // mirrored top edge
  CHECK(w(2) / base == doctest::Approx(-2.0).epsilon(1e-9));   // midpoint ties
  CHECK(w(3) / base == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(w(4) / base == doctest::Approx(-4.0).epsilon(1e-9));   // vertical tie
  CHECK(w(5) / base == doctest::Approx(1.5).epsilon(1e-9));    // split base
  CHECK(w(6) / base == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(w(7) / base == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("parallel-bar framework needs the sign flip of its raw stress basis") {
  const AnalysisResult r = analyze(corpus_framework("example_h"));
  REQUIRE(r.certificate.status == CertStatus::positive_definite);
  CHECK(r.certificate.lambda0 == doctest::Approx(0.5797509043642036).epsilon(1e-9));
  REQUIRE(r.certificate.a.size() == 1);
  CHECK(std::abs(std::abs(r.certificate.a(0)) - 1.0) < 1e-12);
  CHECK(recheck_lambda0(r) == doctest::Approx(r.certificate.lambda0).epsilon(1e-10));
}

TEST_CASE("bipartite heptagon picks the best stress from a two-dimensional space") {
  // One flex against two stresses: the flex forms are scalars, and the best
  // unit combination has certified value equal to their 2-norm, which no
  // single basis stress reaches.
  const AnalysisResult r = analyze(corpus_framework("k34_heptagon"));
  REQUIRE(r.certificate.status == CertStatus::positive_definite);
  REQUIRE(r.certificate.a.size() == 2);
  CHECK(std::abs(r.certificate.a.norm() - 1.0) < 1e-12);
  CHECK(r.certificate.lambda0 == doctest::Approx(0.229583).epsilon(1e-4));
  CHECK(recheck_lambda0(r) == doctest::Approx(r.certificate.lambda0).epsilon(1e-10));

  const auto Ms = flex_stress_forms(r.framework, r.spectral.V, r.spectral.W);
  REQUIRE(Ms.size() == 2);
  REQUIRE(Ms[0].rows() == 1);
  const double m0 = Ms[0](0, 0), m1 = Ms[1](0, 0);
  CHECK(r.certificate.lambda0 ==
        doctest::Approx(std::hypot(m0, m1)).epsilon(1e-12));
  CHECK(r.certificate.lambda0 >= std::max(std::abs(m0), std::abs(m1)) - 1e-12);
}

TEST_CASE("single-stress search resolves by eigenvalue sign") {
  auto pos = stress_search({diag2(2, 3)});
  CHECK(pos.status == CertStatus::positive_definite);
  CHECK(pos.a(0) == 1.0);
  CHECK(pos.lambda0 == doctest::Approx(2.0).epsilon(1e-12));

  auto neg = stress_search({diag2(-2, -3)});
  CHECK(neg.status == CertStatus::positive_definite);
  CHECK(neg.a(0) == -1.0);
  CHECK(neg.lambda0 == doctest::Approx(2.0).epsilon(1e-12));

  auto indef = stress_search({diag2(1, -1)});
  CHECK(indef.status == CertStatus::failed);
  CHECK(indef.lambda0 <= 0.0);
}

TEST_CASE("scalar flex forms maximize along the coefficient ball exactly") {
  std::vector<Eigen::MatrixXd> Ms(2);
  Ms[0] = Eigen::MatrixXd::Constant(1, 1, 0.3);
  Ms[1] = Eigen::MatrixXd::Constant(1, 1, -0.4);
  const auto cert = stress_search(Ms);
  CHECK(cert.status == CertStatus::positive_definite);
  CHECK(cert.lambda0 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cert.a(0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(cert.a(1) == doctest::Approx(-0.8).epsilon(1e-12));
}

TEST_CASE("general search balances two complementary forms") {
  // max over |a| <= 1 of min eig(a0 diag(1,0) + a1 diag(0,1)) is 1/sqrt(2)
  // at the symmetric point.
  const auto cert = stress_search({diag2(1, 0), diag2(0, 1)});
  CHECK(cert.status == CertStatus::positive_definite);
  CHECK(cert.lambda0 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-3));
  CHECK(cert.a(0) == doctest::Approx(cert.a(1)).epsilon(1e-2));
  CHECK(cert.gap >= 0.0);
  CHECK(cert.iterations > 0);
}

TEST_CASE("empty inputs report their degenerate status") {
  const auto none = stress_search({});
  CHECK(none.status == CertStatus::no_stress);

  std::vector<Eigen::MatrixXd> empty_forms(1, Eigen::MatrixXd(0, 0));
  const auto vac = stress_search(empty_forms);
  CHECK(vac.status == CertStatus::vacuous);
  CHECK(vac.lambda0 == std::numeric_limits<double>::infinity());
}

TEST_CASE("tension rows encode the sign constraints") {
  const Framework f = corpus_framework("snelson_x");
  const TensionRows rows = tension_sign_rows(f);
  REQUIRE(rows.E.rows() == 6);
  REQUIRE(rows.E.cols() == 6);
  for (int r = 0; r < 6; ++r) {
    const int k = rows.edge_index[r];
    CHECK(rows.E(r, k) == static_cast<double>(f.label(k)));
    CHECK(rows.E.row(r).cwiseAbs().sum() == 1.0);
  }
  CHECK(tension_sign_rows(corpus_framework("square")).E.rows() == 0);
}

TEST_CASE("cable-strut square carries a proper stress") {
  const TensegrityAnalysis t = tensegrity_analyze(corpus_framework("snelson_x"));
  CHECK(t.all_bars == false);
  CHECK(t.proper);
  CHECK(t.exit_status == 0);
  CHECK(t.tenseg.success);
  CHECK(t.tenseg.s == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-9));
  CHECK(std::isinf(t.tenseg.t));  // no near-flexes to certify against
  CHECK(t.edge_margin == doctest::Approx(2.0 / std::sqrt(6.0)).epsilon(1e-9));

  const Framework& f = t.base.framework;
  const Eigen::VectorXd& w = t.tenseg.omega;
  REQUIRE(w.size() == 6);
  for (int k = 0; k < 6; ++k) {
    if (f.label(k) == kCable) CHECK(w(k) > 1e-6);
    if (f.label(k) == kStrut) CHECK(w(k) < -1e-6);
    CHECK(std::abs(w(k)) == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-9));
  }
}

TEST_CASE("all-cable triangle has no proper stress") {
  const TensegrityAnalysis t = tensegrity_analyze(corpus_framework("cable_triangle"));
  CHECK(t.all_bars == false);
  CHECK(t.proper == false);
  CHECK(t.exit_status == 1);
  CHECK(t.tenseg.success == false);
  // The underlying bar framework is rigid but carries no stress at all.
  CHECK(t.base.certificate.status == CertStatus::vacuous);
  CHECK(t.base.spectral.n_w() == 0);
  CHECK(t.base.report.classification == Classification::first_order_rigid);
}

TEST_CASE("all-bar input short-circuits to the plain analysis") {
  const TensegrityAnalysis t = tensegrity_analyze(corpus_framework("square"));
  CHECK(t.all_bars);
  CHECK(t.base.report.classification == Classification::first_order_rigid);
}

TEST_CASE("edge margin formula") {
  const Framework f = corpus_framework("snelson_x");
  Eigen::VectorXd w(6);
  w << 1, -3, 2, 0.5, -0.25, 4;
  CHECK(tensegrity_edge_margin(f, w, 2.0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(std::isinf(tensegrity_edge_margin(f, w, 0.0)));
}

TEST_CASE("tensegrity search requires sign-constrained edges") {
  const TensionRows none = tension_sign_rows(corpus_framework("square"));
  CHECK_THROWS_AS(tensegrity_stress_search({}, Eigen::MatrixXd(5, 0), none),
                  std::invalid_argument);
}
