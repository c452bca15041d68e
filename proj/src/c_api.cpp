#include "rigidity_c.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "json.hpp"
#include "rigidity/analysis.hpp"
#include "rigidity/corpus.hpp"
#include "rigidity/framework.hpp"
#include "rigidity/geometry.hpp"
#include "rigidity/json_io.hpp"
#include "rigidity/solve.hpp"

using nlohmann::json;

struct rig_framework {
  rigidity::Framework f;
};

namespace {

thread_local std::string g_last_error;

char* copy_out(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Runs fn, mapping exceptions onto status codes and the thread error slot.
template <typename Fn>
rig_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return RIG_OK;
  } catch (const rigidity::unknown_name_error& e) {
    g_last_error = e.what();
    return RIG_ERR_UNKNOWN_NAME;
  } catch (const rigidity::solver_error& e) {
    g_last_error = e.what();
    return RIG_ERR_SOLVER;
  } catch (const json::parse_error& e) {
    g_last_error = e.what();
    return RIG_ERR_PARSE;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    // Malformed input documents are parse errors, bad values are not.
    return std::strstr(e.what(), "JSON") ? RIG_ERR_PARSE : RIG_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RIG_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return RIG_ERR_INTERNAL;
  }
}

rig_status fail_invalid(const char* msg) {
  g_last_error = msg;
  return RIG_ERR_INVALID_ARGUMENT;
}

json parse_options(const char* options_json) {
  if (options_json == nullptr || options_json[0] == '\0') return json::object();
  json j = json::parse(options_json);  // parse_error propagates
  if (!j.is_object()) throw std::invalid_argument("options JSON: must be an object");
  return j;
}

double num_opt(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw std::invalid_argument(std::string(key) + ": must be a number");
  return j[key].get<double>();
}

int int_opt(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer())
    throw std::invalid_argument(std::string(key) + ": must be an integer");
  return j[key].get<int>();
}

rigidity::AnalyzeOptions analyze_options(const json& j, double default_sigma_cutoff) {
  rigidity::AnalyzeOptions o;
  o.sigma_cutoff = default_sigma_cutoff;
  o.lambda_fraction = num_opt(j, "lambda_fraction", o.lambda_fraction);
  o.sigma_cutoff = num_opt(j, "sigma_cutoff", o.sigma_cutoff);
  o.rank_cutoff = num_opt(j, "rank_cutoff", o.rank_cutoff);
  o.verify_samples = int_opt(j, "verify_samples", o.verify_samples);
  o.seed = static_cast<std::uint64_t>(num_opt(j, "seed", 0));
  if (j.contains("pin")) {
    if (!j["pin"].is_string()) throw std::invalid_argument("pin: must be a string");
    const std::string p = j["pin"].get<std::string>();
    if (p == "auto")
      o.pin = rigidity::PinChoice::automatic;
    else if (p == "none")
      o.pin = rigidity::PinChoice::none;
    else if (p == "pinned")
      o.pin = rigidity::PinChoice::force_pinned;
    else
      throw std::invalid_argument("pin: must be \"auto\", \"none\", or \"pinned\"");
  }
  return o;
}

bool want_text(const json& j) {
  if (!j.contains("format")) return false;
  if (!j["format"].is_string()) throw std::invalid_argument("format: must be a string");
  const std::string f = j["format"].get<std::string>();
  if (f == "json") return false;
  if (f == "text") return true;
  throw std::invalid_argument("format: must be \"json\" or \"text\"");
}

}  // namespace

extern "C" {

const char* rig_status_name(rig_status s) {
  switch (s) {
    case RIG_OK: return "ok";
    case RIG_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case RIG_ERR_PARSE: return "parse_error";
    case RIG_ERR_UNKNOWN_NAME: return "unknown_name";
    case RIG_ERR_SOLVER: return "solver_error";
    case RIG_ERR_INTERNAL: return "internal_error";
  }
  return "invalid_status";
}

const char* rig_last_error(void) { return g_last_error.c_str(); }

void rig_string_free(char* s) { std::free(s); }

rig_status rig_framework_from_json(const char* json_text, rig_framework** out) {
  if (json_text == nullptr || out == nullptr) return fail_invalid("null argument");
  *out = nullptr;
  return guarded([&] { *out = new rig_framework{rigidity::framework_from_json(json_text)}; });
}

rig_status rig_framework_from_corpus(const char* name, rig_framework** out) {
  if (name == nullptr || out == nullptr) return fail_invalid("null argument");
  *out = nullptr;
  return guarded([&] { *out = new rig_framework{rigidity::corpus_framework(name)}; });
}

rig_status rig_framework_to_json(const rig_framework* fw, char** out_json) {
  if (fw == nullptr || out_json == nullptr) return fail_invalid("null argument");
  *out_json = nullptr;
  return guarded([&] { *out_json = copy_out(rigidity::framework_to_json(fw->f)); });
}

void rig_framework_free(rig_framework* fw) { delete fw; }

rig_status rig_corpus_list(char** out_json) {
  if (out_json == nullptr) return fail_invalid("null argument");
  *out_json = nullptr;
  return guarded([&] {
    json names = json::array();
    for (const auto& n : rigidity::corpus_names()) names.push_back(n);
    *out_json = copy_out(names.dump(2) + "\n");
  });
}

rig_status rig_analyze(const rig_framework* fw, const char* options_json,
                       char** out_report_json) {
  if (fw == nullptr || out_report_json == nullptr) return fail_invalid("null argument");
  *out_report_json = nullptr;
  return guarded([&] {
    const json j = parse_options(options_json);
    const auto opts = analyze_options(j, 1e-7);
    const auto r = rigidity::analyze(fw->f, opts);
    *out_report_json =
        copy_out(want_text(j) ? rigidity::report_to_text(r) : rigidity::report_to_json(r));
  });
}

rig_status rig_tensegrity_analyze(const rig_framework* fw, const char* options_json,
                                  char** out_report_json) {
  if (fw == nullptr || out_report_json == nullptr) return fail_invalid("null argument");
  *out_report_json = nullptr;
  return guarded([&] {
    const json j = parse_options(options_json);
    const auto opts = analyze_options(j, 1e-7);
    const auto t = rigidity::tensegrity_analyze(fw->f, opts);
    *out_report_json =
        copy_out(want_text(j) ? rigidity::tensegrity_to_text(t) : rigidity::tensegrity_to_json(t));
  });
}

rig_status rig_sweep_lambda(const rig_framework* fw, const char* options_json, char** out_csv) {
  if (fw == nullptr || out_csv == nullptr) return fail_invalid("null argument");
  *out_csv = nullptr;
  return guarded([&] {
    const json j = parse_options(options_json);
    const auto opts = analyze_options(j, 1e-7);
    const double lo = num_opt(j, "grid_start", 0.02);
    const double hi = num_opt(j, "grid_end", 0.98);
    const int count = int_opt(j, "grid_count", 49);
    *out_csv = copy_out(rigidity::sweep_lambda_csv(fw->f, lo, hi, count, opts));
  });
}

rig_status rig_perturb_experiment(const rig_framework* fw, const char* options_json,
                                  char** out_csv) {
  if (fw == nullptr || out_csv == nullptr) return fail_invalid("null argument");
  *out_csv = nullptr;
  return guarded([&] {
    const json j = parse_options(options_json);
    rigidity::PerturbSettings s;
    s.analyze = analyze_options(j, 1e-2);
    s.trials = int_opt(j, "trials", s.trials);
    s.noise = num_opt(j, "noise", s.noise);
    s.seed = static_cast<std::uint64_t>(num_opt(j, "seed", 0));
    if (j.contains("deltas")) {
      if (!j["deltas"].is_array()) throw std::invalid_argument("deltas: must be an array");
      for (const auto& d : j["deltas"]) {
        if (!d.is_number()) throw std::invalid_argument("deltas: entries must be numbers");
        s.deltas.push_back(d.get<double>());
      }
    }
    if (s.deltas.empty())
      s.deltas = {1e-14, 1e-13, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6};
    *out_csv = copy_out(rigidity::perturbation_csv(rigidity::perturbation_experiment(fw->f, s)));
  });
}

rig_status rig_solve_edges(const rig_framework* fw, const char* lengths_json,
                           const char* options_json, char** out_json) {
  if (fw == nullptr || lengths_json == nullptr || out_json == nullptr)
    return fail_invalid("null argument");
  *out_json = nullptr;
  return guarded([&] {
    const json jl = json::parse(lengths_json);
    if (!jl.is_array()) throw std::invalid_argument("lengths JSON: must be an array");
    Eigen::VectorXd lengths(static_cast<int>(jl.size()));
    for (size_t k = 0; k < jl.size(); ++k) {
      if (!jl[k].is_number())
        throw std::invalid_argument("lengths JSON: entries must be numbers");
      lengths[static_cast<int>(k)] = jl[k].get<double>();
    }
    const json j = parse_options(options_json);
    rigidity::SolveSettings s;
    s.delta = num_opt(j, "delta", s.delta);
    s.max_iterations = int_opt(j, "max_iterations", s.max_iterations);
    if (j.contains("align_to_seed")) {
      if (!j["align_to_seed"].is_boolean())
        throw std::invalid_argument("align_to_seed: must be a boolean");
      s.align_to_seed = j["align_to_seed"].get<bool>();
    }
    if (j.contains("pinned")) {
      if (!j["pinned"].is_array()) throw std::invalid_argument("pinned: must be an array");
      for (const auto& p : j["pinned"]) {
        if (!p.is_number_integer())
          throw std::invalid_argument("pinned: entries must be integers");
        const int c = p.get<int>();
        if (c < 1) throw std::invalid_argument("pinned: coordinate indices are 1-based");
        s.pinned.push_back(c - 1);
      }
    }
    const auto r = rigidity::solve_edges(fw->f, lengths, s);
    json out;
    out["configuration"] = std::vector<double>(r.q.data(), r.q.data() + r.q.size());
    out["iterations"] = r.iterations;
    out["max_residual"] = r.max_residual;
    *out_json = copy_out(out.dump(2) + "\n");
  });
}

rig_status rig_kabsch_distance(const double* qa, const double* qb, size_t len, int dimension,
                               double* out_distance) {
  if (qa == nullptr || qb == nullptr || out_distance == nullptr)
    return fail_invalid("null argument");
  return guarded([&] {
    if (dimension < 1) throw std::invalid_argument("dimension: must be at least 1");
    if (len == 0 || len % static_cast<size_t>(dimension) != 0)
      throw std::invalid_argument("len: must be a positive multiple of dimension");
    Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(qa, static_cast<int>(len));
    Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(qb, static_cast<int>(len));
    *out_distance = rigidity::kabsch_distance(a, b, dimension);
  });
}

}  // extern "C"
