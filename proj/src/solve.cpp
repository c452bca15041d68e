#include "rigidity/solve.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "rigidity/geometry.hpp"

namespace rigidity {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

SolveResult solve_edges(const Framework& f, const Eigen::VectorXd& target_lengths,
                        const SolveSettings& settings) {
  f.validate();
  const int m = f.n_edges(), dn = f.dof();
  if (target_lengths.size() != m)
    throw std::invalid_argument("solve_edges: one target length per edge required");
  for (int k = 0; k < m; ++k)
    if (!(target_lengths(k) > 0))
      throw std::invalid_argument("solve_edges: target lengths must be positive");
  if (!(settings.delta > 0)) throw std::invalid_argument("solve_edges: delta must be positive");
  for (int c : settings.pinned)
    if (c < 0 || c >= dn) throw std::invalid_argument("solve_edges: pinned index out of range");

  std::vector<char> is_pinned(dn, 0);
  for (int c : settings.pinned) is_pinned[c] = 1;
  std::vector<int> free_idx;
  for (int c = 0; c < dn; ++c)
    if (!is_pinned[c]) free_idx.push_back(c);
  const int nf = static_cast<int>(free_idx.size());

  const Eigen::VectorXd d_sq = target_lengths.cwiseProduct(target_lengths);
  const Eigen::VectorXd seed = f.configuration();
  Eigen::VectorXd q = seed;

  const auto residual = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return edge_vector(f, x) - d_sq;
  };

  Eigen::VectorXd fv = residual(q);
  double best_res = fv.cwiseAbs().maxCoeff();
  Eigen::VectorXd best_q = q;
  if (settings.residual_trace) settings.residual_trace->push_back(best_res);

  double nu = -1;  // set from the first normal matrix
  int it = 0;
  for (; it < settings.max_iterations; ++it) {
    const double cur = fv.cwiseAbs().maxCoeff();
    if (cur <= settings.delta) break;

    const Eigen::MatrixXd Rfull = 2.0 * rigidity_matrix_at(f, q);
    Eigen::MatrixXd J(m, nf);
    for (int c = 0; c < nf; ++c) J.col(c) = Rfull.col(free_idx[c]);
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * fv;
    const double scale = JtJ.diagonal().maxCoeff();
    if (nu < 0) nu = settings.damping_scale * std::max(scale, 1e-300);

    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries) {
      Eigen::MatrixXd H = JtJ;
      H.diagonal().array() += nu;
      const Eigen::VectorXd step = H.ldlt().solve(-g);
      Eigen::VectorXd q_new = q;
      for (int c = 0; c < nf; ++c) q_new(free_idx[c]) += step(c);
      const Eigen::VectorXd fv_new = residual(q_new);
      const double res_new = fv_new.cwiseAbs().maxCoeff();
      if (res_new < cur) {
        q = q_new;
        fv = fv_new;
        nu = std::max(nu / 10, 1e-300);
        accepted = true;
        if (settings.residual_trace) settings.residual_trace->push_back(res_new);
        if (res_new < best_res) {
          best_res = res_new;
          best_q = q;
        }
        break;
      }
      nu *= 10;
    }
    if (!accepted) {
      SolveResult best{best_q, it, best_res, false};
      char msg[160];
      std::snprintf(msg, sizeof msg,
                    "solve_edges: damping stalled at residual %.3e (target %.3e)", best_res,
                    settings.delta);
      throw solve_failure(msg, std::move(best));
    }
  }

  SolveResult out{q, it, fv.cwiseAbs().maxCoeff(), true};
  if (out.max_residual > settings.delta) {
    SolveResult best{best_q, it, best_res, false};
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "solve_edges: iteration cap reached at residual %.3e (target %.3e)", best_res,
                  settings.delta);
    throw solve_failure(msg, std::move(best));
  }
  if (settings.align_to_seed && settings.pinned.empty())
    out.q = kabsch_align(seed, out.q, f.dimension);
  return out;
}

namespace {

void accumulate(std::vector<double>& xs, double v) {
  if (std::isfinite(v)) xs.push_back(v);
}

std::pair<double, double> mean_std(const std::vector<double>& xs) {
  if (xs.empty()) return {kNaN, kNaN};
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  double var = 0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var = xs.size() > 1 ? var / (xs.size() - 1) : 0;
  return {mean, std::sqrt(var)};
}

}  // namespace

PerturbationResult perturbation_experiment(const Framework& f, const PerturbSettings& settings) {
  f.validate();
  if (settings.deltas.empty())
    throw std::invalid_argument("perturbation_experiment: no deltas given");
  if (settings.trials < 1)
    throw std::invalid_argument("perturbation_experiment: trials must be positive");

  const Eigen::VectorXd p = f.configuration();
  const Eigen::VectorXd lengths = edge_vector(f, p).cwiseSqrt();
  double noise = settings.noise;
  if (!(noise > 0)) noise = 1e-3 * lengths.mean();

  std::mt19937_64 rng(settings.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  PerturbationResult out;
  for (double delta : settings.deltas) {
    std::vector<double> e1s, e2s, e3s, ems;
    int ok = 0;
    for (int trial = 0; trial < settings.trials; ++trial) {
      PerturbationRow row;
      row.delta = delta;
      row.trial = trial;
      try {
        Eigen::VectorXd q0 = p;
        for (int i = 0; i < q0.size(); ++i) q0(i) += noise * gauss(rng);
        Framework fw = f;
        fw.set_configuration(q0);
        SolveSettings ss;
        ss.delta = delta;
        const SolveResult sol = solve_edges(fw, lengths, ss);
        fw.set_configuration(sol.q);
        const AnalysisResult res = analyze(fw, settings.analyze);
        row.eta1 = res.report.eta1;
        row.eta2 = res.report.eta2;
        row.eta3 = res.report.eta3;
        row.e_min_star = res.report.e_min_star;
        row.D = res.report.D;
        row.D_pss = res.report.D_pss;
        row.classification = res.report.classification;
        ++ok;
        accumulate(e1s, row.eta1);
        if (row.eta2) accumulate(e2s, *row.eta2);
        if (row.eta3) accumulate(e3s, *row.eta3);
        if (row.e_min_star) accumulate(ems, *row.e_min_star);
      } catch (const std::exception& ex) {
        row.failed = true;
        row.error = ex.what();
      }
      out.rows.push_back(std::move(row));
    }
    PerturbationAggregate agg;
    agg.delta = delta;
    agg.trials_ok = ok;
    std::tie(agg.eta1_mean, agg.eta1_std) = mean_std(e1s);
    std::tie(agg.eta2_mean, agg.eta2_std) = mean_std(e2s);
    std::tie(agg.eta3_mean, agg.eta3_std) = mean_std(e3s);
    std::tie(agg.e_min_star_mean, agg.e_min_star_std) = mean_std(ems);
    out.aggregates.push_back(agg);
  }
  return out;
}

std::string perturbation_csv(const PerturbationResult& r) {
  const auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::ostringstream out;
  out << "delta,trial,eta1,eta2,eta3,e_min_star,D,D_pss,classification\n";
  for (const auto& row : r.rows) {
    out << num(row.delta) << "," << row.trial << ",";
    if (row.failed) {
      out << "nan,nan,nan,nan,nan,nan,error\n";
      continue;
    }
    out << num(row.eta1) << "," << num(row.eta2.value_or(kNaN)) << ","
        << num(row.eta3.value_or(kNaN)) << "," << num(row.e_min_star.value_or(kNaN)) << ","
        << num(row.D) << "," << num(row.D_pss) << ","
        << classification_name(row.classification) << "\n";
  }
  return out.str();
}

}  // namespace rigidity
