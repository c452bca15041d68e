#include "rigidity/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "rigidity/energy.hpp"

namespace rigidity {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
using nlohmann::json;

double min_eig_sym(const Eigen::MatrixXd& S) {
  if (S.rows() == 0) return kInf;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

Eigen::VectorXd centered(const Eigen::VectorXd& p, int d) {
  const int n = static_cast<int>(p.size()) / d;
  Eigen::VectorXd out = p;
  for (int a = 0; a < d; ++a) {
    double mean = 0;
    for (int i = 0; i < n; ++i) mean += p(i * d + a);
    mean /= n;
    for (int i = 0; i < n; ++i) out(i * d + a) -= mean;
  }
  return out;
}

}  // namespace

const char* classification_name(Classification c) {
  switch (c) {
    case Classification::first_order_rigid: return "first_order_rigid";
    case Classification::prestress_stable: return "prestress_stable";
    case Classification::almost_rigid: return "almost_rigid";
    case Classification::inconclusive: return "inconclusive";
  }
  return "unknown";
}

double compute_eta1(double lambda, double residual) {
  if (!(lambda > 0)) throw std::invalid_argument("eta1: lambda must be positive");
  if (residual < 0) throw std::invalid_argument("eta1: residual must be nonnegative");
  return 4 * residual / lambda;
}

double compute_D(double eta1, double L, double mu_bar) {
  if (!(L > 0)) throw std::invalid_argument("D: L must be positive");
  if (std::isinf(L)) return 0;
  const double x = eta1 / L;
  return x * (std::sqrt(std::max(mu_bar, 0.0)) + x);
}

double compute_D_pss(double eta1, double L, double mu_bar, double p_norm) {
  if (!(L > 0)) throw std::invalid_argument("D_pss: L must be positive");
  if (std::isinf(L)) return 0;
  const double x = eta1 / L;
  return x * (std::sqrt(std::max(mu_bar, 0.0)) + 1.5 * x + 0.5 * p_norm / L);
}

double eta2_case_threshold(double mu_bar) {
  return 0.25 + 0.125 * (std::sqrt(mu_bar * (mu_bar + 4)) - mu_bar);
}

std::pair<double, Eta2Case> compute_eta2(double eta1, double L, double mu_bar, double D) {
  if (std::isinf(L)) return {kInf, Eta2Case::case1};
  if (D < eta2_case_threshold(mu_bar))
    return {0.5 * L * (std::sqrt(mu_bar + 4) - std::sqrt(mu_bar)) - eta1, Eta2Case::case1};
  return {0.5 * L * (std::sqrt(mu_bar + 2) - std::sqrt(mu_bar)), Eta2Case::case2};
}

double barrier_threshold(double mu_bar) {
  return (8.0 / 3.0 + std::sqrt(mu_bar * (mu_bar + 8.0 / 3.0)) - mu_bar) / 9.0;
}

double compute_eta3(double L, double mu_bar) {
  if (std::isinf(L)) return kInf;
  return 0.5 * L * (std::sqrt(mu_bar + 8.0 / 3.0) - std::sqrt(mu_bar));
}

double e_min(double eta, double eta1, double lambda, double kappa, double omega_norm) {
  if (!(lambda > 0)) throw std::invalid_argument("e_min: lambda must be positive");
  if (kappa < 0 || omega_norm < 0) throw std::invalid_argument("e_min: negative coefficient");
  if (!(eta > 1.5 * eta1)) return 0;
  if (std::isinf(eta)) return kInf;
  const double shape = eta * eta * (1 - 1.5 * eta1 / eta);
  if (kappa == 0) {
    if (omega_norm == 0) throw std::invalid_argument("e_min: kappa and stress both zero");
    return lambda / (3 * omega_norm) * shape;
  }
  const double w = omega_norm / kappa;
  return std::sqrt(w * w + (2.0 / 3.0) * (lambda / kappa) * shape) - w;
}

double compute_eta_max(double eps, double eta1, double lambda, double kappa,
                       double omega_norm) {
  if (eps < 0) throw std::invalid_argument("eta_max: eps must be nonnegative");
  if (!(lambda > 0)) throw std::invalid_argument("eta_max: lambda must be positive");
  const double base = 0.75 * eta1;
  return base +
         std::sqrt(base * base + 3 * (omega_norm / lambda) * eps + 1.5 * (kappa / lambda) * eps * eps);
}

DerivedConstants derive_constants(const AnalysisResult& r, double lambda_fraction) {
  if (!(lambda_fraction > 0 && lambda_fraction < 1))
    throw std::invalid_argument("derive_constants: lambda fraction must lie in (0,1)");
  DerivedConstants c;
  c.z = r.framework.max_degree();
  c.p_norm = centered(r.framework.configuration(), r.framework.dimension).norm();

  const auto& cert = r.certificate;
  if (cert.status == CertStatus::vacuous) {
    c.first_order = true;
    c.lambda = 2 * r.spectral.sigma0 * r.spectral.sigma0;
    c.kappa = 1;
    c.mu0 = 0;
    c.mu_bar = 1;
    c.residual = 0;
    c.omega_norm = 0;
  } else if (cert.status == CertStatus::positive_definite) {
    const Eigen::MatrixXd R = rigidity_matrix(r.framework);
    const Eigen::MatrixXd RC = R * r.C.basis;
    const Eigen::MatrixXd O = stress_matrix(r.framework, cert.omega);
    const Eigen::MatrixXd A = r.C.basis.transpose() * O * r.C.basis;
    const Eigen::MatrixXd B = 2.0 * RC.transpose() * RC;
    c.mu0 = min_eig_sym(0.5 * (A + A.transpose()));
    c.lambda = lambda_fraction * cert.lambda0;
    c.residual = (R.transpose() * cert.omega).norm();
    c.omega_norm = cert.omega.norm();
    c.kappa = kappa_solve(0.5 * (A + A.transpose()), B, c.lambda, cert.lambda0);
    c.mu_bar = 1 - c.mu0 / c.lambda;
  } else {
    throw std::invalid_argument("derive_constants: certificate does not certify positivity");
  }
  c.L = (c.kappa > 0) ? std::sqrt(c.lambda / (8.0 * c.z * c.kappa)) : kInf;
  return c;
}

RigidityReport radii_report(const DerivedConstants& c) {
  RigidityReport rep;
  rep.eta1 = compute_eta1(c.lambda, c.residual);
  rep.D = compute_D(rep.eta1, c.L, c.mu_bar);
  rep.D_pss = compute_D_pss(rep.eta1, c.L, c.mu_bar, c.p_norm);
  rep.containment_applies = rep.D < 0.5;
  rep.stability_applies = rep.D_pss < 0.5;
  if (c.kappa == 0) {
    rep.eta2 = kInf;
    rep.eta3 = kInf;
    rep.e_min_star = kInf;
    rep.barrier_applies = true;
    rep.warnings.push_back(
        "stiffness bound inactive (kappa = 0): outer and barrier radii are unbounded");
    return rep;
  }
  if (rep.containment_applies) {
    const auto [v, cse] = compute_eta2(rep.eta1, c.L, c.mu_bar, rep.D);
    rep.eta2 = v;
    rep.eta2_case = cse;
  }
  rep.barrier_applies = rep.D < barrier_threshold(c.mu_bar);
  if (rep.barrier_applies) {
    const double e3 = compute_eta3(c.L, c.mu_bar);
    if (e3 > 1.5 * rep.eta1) {
      rep.eta3 = e3;
      rep.e_min_star = e_min(e3, rep.eta1, c.lambda, c.kappa, c.omega_norm);
    } else {
      rep.barrier_applies = false;
      rep.warnings.push_back("barrier radius does not clear (3/2) eta1; dropping the barrier");
    }
  }
  if (rep.eta2 && rep.eta3 && *rep.eta3 >= *rep.eta2)
    rep.warnings.push_back("barrier radius reaches the outer radius");
  return rep;
}

namespace {

PinMode resolve_pin(PinChoice pc, const Framework& f) {
  switch (pc) {
    case PinChoice::automatic:
      return f.pinned.empty() ? PinMode::orthogonal : PinMode::pinned;
    case PinChoice::none:
      return PinMode::orthogonal;
    case PinChoice::force_pinned:
      return PinMode::pinned;
  }
  return PinMode::orthogonal;
}

StressCertificate make_certificate(const Framework& f, const SpectralDecomposition& sp) {
  StressCertificate cert;
  const int m = f.n_edges();
  if (sp.n_v() == 0) {
    cert.status = CertStatus::vacuous;
    cert.a = Eigen::VectorXd::Zero(sp.n_w());
    cert.omega = Eigen::VectorXd::Zero(m);
    cert.lambda0 = kInf;
    return cert;
  }
  if (sp.n_w() == 0) {
    cert.status = CertStatus::no_stress;
    cert.a.resize(0);
    cert.omega = Eigen::VectorXd::Zero(m);
    return cert;
  }
  cert = stress_search(flex_stress_forms(f, sp.V, sp.W));
  cert.omega = sp.W.basis * cert.a;
  return cert;
}

AnalysisResult analyze_impl(const Framework& f, const AnalyzeOptions& opts,
                            const TensegrityCertificate* signed_cert) {
  f.validate();
  if (f.n_edges() == 0) throw std::invalid_argument("analyze: framework has no edges");
  if (!(opts.lambda_fraction > 0 && opts.lambda_fraction < 1))
    throw std::invalid_argument("analyze: lambda fraction must lie in (0,1)");
  if (!(opts.sigma_cutoff >= 0)) throw std::invalid_argument("analyze: cutoff must be >= 0");

  AnalysisResult r;
  r.framework = f;
  r.options = opts;
  r.C = complement_space(f, resolve_pin(opts.pin, f));
  r.spectral = decompose(f, r.C, opts.sigma_cutoff);

  if (signed_cert && r.spectral.n_v() > 0) {
    r.certificate.status = CertStatus::positive_definite;
    r.certificate.a = signed_cert->a;
    r.certificate.omega = signed_cert->omega;
    r.certificate.lambda0 = signed_cert->t;
    r.certificate.iterations = signed_cert->iterations;
  } else {
    r.certificate = make_certificate(f, r.spectral);
  }

  // Classification: exact prestress stability is decided at machine scale,
  // independent of the user cutoff.
  Classification cls = Classification::inconclusive;
  if (r.spectral.n_v() == 0) {
    cls = Classification::first_order_rigid;
  } else {
    bool prestress = false;
    try {
      const double cut_m = 1e-12 * r.spectral.singular_values(0);
      const SpectralDecomposition sp_m = decompose(f, r.C, cut_m);
      if (sp_m.n_v() > 0 && sp_m.n_w() > 0) {
        StressCertificate cert_m = stress_search(flex_stress_forms(f, sp_m.V, sp_m.W));
        if (cert_m.status == CertStatus::positive_definite) {
          const Eigen::MatrixXd R = rigidity_matrix(f);
          const Eigen::VectorXd omega_m = sp_m.W.basis * cert_m.a;
          Eigen::JacobiSVD<Eigen::MatrixXd> svd(R);
          const double normR = svd.singularValues()(0);
          if ((R.transpose() * omega_m).norm() < 1e-12 * normR * omega_m.norm())
            prestress = true;
        }
      }
    } catch (const solver_error&) {
      // machine pass is advisory; fall through
    }
    if (prestress) cls = Classification::prestress_stable;
  }

  auto& rep = r.report;
  if (r.certificate.status == CertStatus::vacuous ||
      r.certificate.status == CertStatus::positive_definite) {
    r.constants = derive_constants(r, opts.lambda_fraction);
    r.has_constants = true;
    r.certificate.mu0 = r.constants.mu0;
    rep = radii_report(r.constants);
  } else {
    rep.eta1 = kNaN;
    rep.D = kNaN;
    rep.D_pss = kNaN;
    rep.warnings.push_back(r.certificate.status == CertStatus::failed
                               ? "no certifying stress found at this cutoff"
                               : "no near-stresses at this cutoff");
  }

  if (cls == Classification::inconclusive && r.has_constants &&
      r.certificate.status == CertStatus::positive_definite && rep.containment_applies &&
      rep.eta1 > 0)
    cls = Classification::almost_rigid;
  rep.classification = cls;

  if (opts.verify_samples > 0) {
    if (r.has_constants) {
      r.verification = verify_certified_region(r, opts.verify_samples, opts.seed);
    } else {
      VerificationRecord v;
      v.skipped = true;
      v.skip_reason = "no usable certificate";
      v.seed = opts.seed;
      r.verification = v;
    }
  }
  return r;
}

const char* pin_name(PinChoice pc) {
  switch (pc) {
    case PinChoice::automatic: return "auto";
    case PinChoice::none: return "none";
    case PinChoice::force_pinned: return "pinned";
  }
  return "auto";
}

json num_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

json opt_or_null(const std::optional<double>& v) {
  if (v && std::isfinite(*v)) return *v;
  return nullptr;
}

json report_json(const AnalysisResult& r) {
  const auto& f = r.framework;
  json j;
  j["framework"] = {{"dimension", f.dimension},
                    {"n_vertices", f.n_vertices()},
                    {"n_edges", f.n_edges()},
                    {"max_degree", f.max_degree()}};
  j["options"] = {{"lambda_fraction", r.options.lambda_fraction},
                  {"sigma_cutoff", r.options.sigma_cutoff},
                  {"rank_cutoff", r.options.rank_cutoff},
                  {"pin", pin_name(r.options.pin)},
                  {"verify_samples", r.options.verify_samples},
                  {"seed", r.options.seed}};
  j["spectral"] = {{"n_flexes", r.spectral.n_v()},
                   {"n_stresses", r.spectral.n_w()},
                   {"sigma0", num_or_null(r.spectral.sigma0)},
                   {"sigma_max", r.spectral.singular_values.size()
                                     ? json(r.spectral.singular_values(0))
                                     : json(nullptr)}};
  const auto& cert = r.certificate;
  json jc;
  jc["status"] = cert_status_name(cert.status);
  jc["lambda0"] = num_or_null(cert.lambda0);
  jc["mu0"] = r.has_constants && cert.status == CertStatus::positive_definite
                  ? json(cert.mu0)
                  : json(nullptr);
  jc["gap"] = cert.gap;
  jc["iterations"] = cert.iterations;
  if (cert.status == CertStatus::positive_definite) {
    jc["stress"] = std::vector<double>(cert.omega.data(), cert.omega.data() + cert.omega.size());
    jc["coefficients"] = std::vector<double>(cert.a.data(), cert.a.data() + cert.a.size());
  } else {
    jc["stress"] = nullptr;
    jc["coefficients"] = nullptr;
  }
  j["certificate"] = jc;

  if (r.has_constants) {
    const auto& c = r.constants;
    j["constants"] = {{"lambda", c.lambda},
                      {"kappa", c.kappa},
                      {"L", num_or_null(c.L)},
                      {"mu0", c.mu0},
                      {"mu_bar", c.mu_bar},
                      {"z", c.z},
                      {"residual", c.residual},
                      {"stress_norm", c.omega_norm},
                      {"config_norm", c.p_norm}};
  } else {
    j["constants"] = nullptr;
  }

  const auto& rep = r.report;
  json jr;
  jr["eta1"] = num_or_null(rep.eta1);
  jr["eta2"] = opt_or_null(rep.eta2);
  jr["eta3"] = opt_or_null(rep.eta3);
  jr["e_min_star"] = opt_or_null(rep.e_min_star);
  jr["eta2_case"] =
      rep.eta2_case ? json(*rep.eta2_case == Eta2Case::case1 ? "case1" : "case2") : json(nullptr);
  jr["eta_max_regime"] =
      r.has_constants ? json(r.constants.first_order ? "linear" : "sqrt") : json(nullptr);
  j["radii"] = jr;

  j["checks"] = {{"D", num_or_null(rep.D)},
                 {"D_pss", num_or_null(rep.D_pss)},
                 {"containment_applies", rep.containment_applies},
                 {"barrier_applies", rep.barrier_applies},
                 {"stability_applies", rep.stability_applies}};
  j["classification"] = classification_name(rep.classification);
  j["warnings"] = rep.warnings;

  if (r.verification) {
    const auto& v = *r.verification;
    json jv;
    jv["skipped"] = v.skipped;
    if (v.skipped) {
      jv["skip_reason"] = v.skip_reason;
    } else {
      jv["samples"] = v.samples;
      jv["violations"] = v.violations;
      jv["worst_annulus"] = num_or_null(v.worst_annulus);
      jv["worst_barrier"] = num_or_null(v.worst_barrier);
      jv["worst_edge"] = num_or_null(v.worst_edge);
    }
    jv["seed"] = v.seed;
    j["verification"] = jv;
  } else {
    j["verification"] = nullptr;
  }
  return j;
}

void flatten_lines(const json& j, const std::string& prefix, std::ostringstream& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten_lines(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else {
    out << prefix << ": " << j.dump() << "\n";
  }
}

std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

AnalysisResult analyze(const Framework& f, const AnalyzeOptions& opts) {
  return analyze_impl(f, opts, nullptr);
}

std::string report_to_json(const AnalysisResult& r) { return report_json(r).dump(2) + "\n"; }

std::string report_to_text(const AnalysisResult& r) {
  std::ostringstream out;
  flatten_lines(report_json(r), "", out);
  return out.str();
}

std::string sweep_lambda_csv(const Framework& f, double lo, double hi, int count,
                             const AnalyzeOptions& opts) {
  if (!(lo > 0 && hi < 1 && lo <= hi)) throw std::invalid_argument("sweep: grid must lie in (0,1)");
  if (count < 1) throw std::invalid_argument("sweep: count must be positive");
  AnalysisResult base = analyze(f, opts);
  if (!base.has_constants)
    throw solver_error("sweep: no usable certificate at this cutoff");

  std::ostringstream out;
  out << "lambda_fraction,L,kappa,eta1,eta2,eta3,e_min_star\n";
  for (int i = 0; i < count; ++i) {
    const double frac = (count == 1) ? lo : lo + (hi - lo) * i / (count - 1);
    const DerivedConstants c = derive_constants(base, frac);
    const RigidityReport rep = radii_report(c);
    out << csv_num(frac) << "," << csv_num(c.L) << "," << csv_num(c.kappa) << ","
        << csv_num(rep.eta1) << "," << csv_num(rep.eta2.value_or(kNaN)) << ","
        << csv_num(rep.eta3.value_or(kNaN)) << "," << csv_num(rep.e_min_star.value_or(kNaN))
        << "\n";
  }
  return out.str();
}

TensegrityAnalysis tensegrity_analyze(const Framework& f, const AnalyzeOptions& opts) {
  f.validate();
  TensegrityAnalysis T;
  if (f.all_bars()) {
    T.all_bars = true;
    T.base = analyze(f, opts);
    T.proper = true;
    T.edge_margin = kInf;
    return T;
  }

  Framework cur = f;
  std::vector<int> orig_index(f.n_edges());
  for (int k = 0; k < f.n_edges(); ++k) orig_index[k] = k;

  for (int round = 0; round <= f.n_edges(); ++round) {
    const Subspace C = complement_space(cur, resolve_pin(opts.pin, cur));
    const SpectralDecomposition sp = decompose(cur, C, opts.sigma_cutoff);
    if (sp.n_w() == 0) {
      T.base = analyze(cur, opts);
      T.exit_status = 1;
      return T;
    }
    const TensionRows rows = tension_sign_rows(cur);
    const auto Ms = flex_stress_forms(cur, sp.V, sp.W);
    TensegrityCertificate tc = tensegrity_stress_search(Ms, sp.W.basis, rows);

    if (tc.success) {
      T.tenseg = tc;
      T.base = analyze_impl(cur, opts, &tc);
      bool proper = true;
      for (int k = 0; k < cur.n_edges(); ++k) {
        if (cur.label(k) == kCable && !(tc.omega(k) > 0)) proper = false;
        if (cur.label(k) == kStrut && !(tc.omega(k) < 0)) proper = false;
      }
      T.proper = proper;
      const double kap = T.base.has_constants ? T.base.constants.kappa : 0;
      T.edge_margin = tensegrity_edge_margin(cur, tc.omega, kap);
      return T;
    }

    if (tc.slack_edges.empty() || round == f.n_edges()) {
      T.tenseg = tc;
      T.base = analyze(cur, opts);
      T.exit_status = 1;
      return T;
    }

    // Drop the slack-constrained edges and retry on the smaller framework.
    std::vector<std::pair<int, int>> edges;
    std::vector<int> labels, keep;
    for (int k = 0; k < cur.n_edges(); ++k) {
      if (std::find(tc.slack_edges.begin(), tc.slack_edges.end(), k) != tc.slack_edges.end()) {
        T.removed_edges.push_back(orig_index[k]);
        continue;
      }
      edges.push_back(cur.edges[k]);
      labels.push_back(cur.label(k));
      keep.push_back(orig_index[k]);
    }
    cur.edges = std::move(edges);
    cur.labels = std::move(labels);
    orig_index = std::move(keep);
    if (cur.n_edges() == 0) {
      T.base = AnalysisResult{};
      T.base.framework = cur;
      T.exit_status = 1;
      return T;
    }
  }
  throw solver_error("tensegrity analysis: retry loop failed to settle");
}

std::string tensegrity_to_json(const TensegrityAnalysis& t) {
  json j = report_json(t.base);
  json jt;
  jt["all_bars"] = t.all_bars;
  if (!t.all_bars) {
    jt["status"] = t.proper ? "proper" : "no_stress";
    jt["proper"] = t.proper;
    jt["s"] = num_or_null(t.tenseg.s);
    jt["t"] = num_or_null(t.tenseg.t);
    jt["edge_margin"] = num_or_null(t.edge_margin);
    jt["exit_status"] = t.exit_status;
    std::vector<int> removed(t.removed_edges);
    for (auto& k : removed) ++k;  // 1-based in reports
    jt["removed_edges"] = removed;
    if (t.tenseg.omega.size())
      jt["stress"] =
          std::vector<double>(t.tenseg.omega.data(), t.tenseg.omega.data() + t.tenseg.omega.size());
    else
      jt["stress"] = nullptr;
  }
  j["tensegrity"] = jt;
  return j.dump(2) + "\n";
}

std::string tensegrity_to_text(const TensegrityAnalysis& t) {
  const std::string js = tensegrity_to_json(t);
  std::ostringstream out;
  flatten_lines(json::parse(js), "", out);
  return out.str();
}

}  // namespace rigidity
