// Command-line front end. Talks to the core only through the C interface.
#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rigidity_c.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonFlags {
  std::string input;
  std::string corpus;
  double lambda_frac = 0.5;
  double sigma_cutoff = 1e-7;
  double rank_cutoff = 1e-10;
  std::string pin = "auto";
  int verify = 0;
  std::uint64_t seed = 0;
  std::string format = "json";
  std::string out;
};

void add_source_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("input", f.input, "framework JSON file");
  cmd->add_option("--corpus", f.corpus, "built-in example name instead of a file");
}

void add_analyze_flags(CLI::App* cmd, CommonFlags& f, double default_sigma) {
  f.sigma_cutoff = default_sigma;
  cmd->add_option("--lambda-frac", f.lambda_frac, "fraction of lambda0 used as lambda");
  cmd->add_option("--sigma-cutoff", f.sigma_cutoff, "singular values at or below count as zero");
  cmd->add_option("--rank-cutoff", f.rank_cutoff, "relative rank cutoff for subspace bases");
  cmd->add_option("--pin", f.pin, "rigid-motion complement: auto, none, or pinned")
      ->check(CLI::IsMember({"auto", "none", "pinned"}));
  cmd->add_option("--seed", f.seed, "random seed");
}

json options_json(const CommonFlags& f) {
  json j;
  j["lambda_fraction"] = f.lambda_frac;
  j["sigma_cutoff"] = f.sigma_cutoff;
  j["rank_cutoff"] = f.rank_cutoff;
  j["pin"] = f.pin;
  j["verify_samples"] = f.verify;
  j["seed"] = f.seed;
  return j;
}

int report_failure(rig_status st) {
  std::fprintf(stderr, "error (%s): %s\n", rig_status_name(st), rig_last_error());
  return st == RIG_ERR_SOLVER ? 2 : 1;
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

// Owns the handle for one framework drawn from a file or the corpus.
int load_framework(const CommonFlags& f, rig_framework** out) {
  if (f.corpus.empty() == f.input.empty()) {
    std::fprintf(stderr, "error: give exactly one of an input file or --corpus\n");
    return 1;
  }
  rig_status st;
  if (!f.corpus.empty()) {
    st = rig_framework_from_corpus(f.corpus.c_str(), out);
  } else {
    std::string text;
    if (!read_file(f.input, text)) {
      std::fprintf(stderr, "error: cannot read input file '%s'\n", f.input.c_str());
      return 1;
    }
    st = rig_framework_from_json(text.c_str(), out);
  }
  return st == RIG_OK ? 0 : report_failure(st);
}

int emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::fprintf(stderr, "error: cannot write output file '%s'\n", out_path.c_str());
    return 1;
  }
  out << text;
  return 0;
}

int run_report(const CommonFlags& f, bool tensegrity) {
  rig_framework* fw = nullptr;
  if (int rc = load_framework(f, &fw)) return rc;
  json opts = options_json(f);
  opts["format"] = f.format;
  char* text = nullptr;
  const rig_status st = tensegrity
                            ? rig_tensegrity_analyze(fw, opts.dump().c_str(), &text)
                            : rig_analyze(fw, opts.dump().c_str(), &text);
  rig_framework_free(fw);
  if (st != RIG_OK) return report_failure(st);
  const int rc = emit(text, f.out);
  rig_string_free(text);
  return rc;
}

int run_sweep(const CommonFlags& f, const std::string& grid) {
  double lo = 0, hi = 0;
  int count = 0;
  if (std::sscanf(grid.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3) {
    std::fprintf(stderr, "error: --grid must look like lo:hi:count\n");
    return 1;
  }
  rig_framework* fw = nullptr;
  if (int rc = load_framework(f, &fw)) return rc;
  json opts = options_json(f);
  opts["grid_start"] = lo;
  opts["grid_end"] = hi;
  opts["grid_count"] = count;
  char* text = nullptr;
  const rig_status st = rig_sweep_lambda(fw, opts.dump().c_str(), &text);
  rig_framework_free(fw);
  if (st != RIG_OK) return report_failure(st);
  const int rc = emit(text, f.out);
  rig_string_free(text);
  return rc;
}

int run_perturb(const CommonFlags& f, const std::string& delta_list, int trials, double scale) {
  rig_framework* fw = nullptr;
  if (int rc = load_framework(f, &fw)) return rc;
  json opts = options_json(f);
  opts["trials"] = trials;
  opts["noise"] = scale;
  if (!delta_list.empty()) {
    json deltas = json::array();
    std::stringstream ss(delta_list);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        deltas.push_back(std::stod(item));
      } catch (const std::exception&) {
        std::fprintf(stderr, "error: --delta-list entries must be numbers\n");
        rig_framework_free(fw);
        return 1;
      }
    }
    opts["deltas"] = deltas;
  }
  char* text = nullptr;
  const rig_status st = rig_perturb_experiment(fw, opts.dump().c_str(), &text);
  rig_framework_free(fw);
  if (st != RIG_OK) return report_failure(st);
  const int rc = emit(text, f.out);
  rig_string_free(text);
  return rc;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  out += '"';
  return out;
}

std::string num_or_empty(const json& v) {
  if (!v.is_number()) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v.get<double>());
  return buf;
}

struct ScanRow {
  std::string file;
  std::string status = "ok";
  std::string classification;
  std::string eta1, eta2, eta3, e_min_star;
  double D = 0, D_pss = 0;
  std::string error;
};

int run_scan(const CommonFlags& f, const std::string& dir, std::string out_dir, int parallel) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    std::fprintf(stderr, "error: '%s' is not a directory\n", dir.c_str());
    return 1;
  }
  if (out_dir.empty()) {
    const char* env = std::getenv("RIGIDITY_OUT_DIR");
    out_dir = (env != nullptr && env[0] != '\0') ? env : "scan_reports";
  }
  fs::create_directories(out_dir, ec);
  if (ec) {
    std::fprintf(stderr, "error: cannot create output directory '%s'\n", out_dir.c_str());
    return 1;
  }

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto& p = entry.path();
    if (p.extension() != ".json") continue;
    if (p.filename().string().size() > 12 &&
        p.filename().string().rfind(".report.json") == p.filename().string().size() - 12)
      continue;
    files.push_back(p);
  }
  std::sort(files.begin(), files.end());

  const std::string opts = options_json(f).dump();
  std::vector<ScanRow> rows(files.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= files.size()) return;
      ScanRow& row = rows[i];
      row.file = files[i].filename().string();
      std::string text;
      if (!read_file(files[i].string(), text)) {
        row.status = "io_error";
        row.error = "cannot read file";
        continue;
      }
      rig_framework* fw = nullptr;
      rig_status st = rig_framework_from_json(text.c_str(), &fw);
      if (st != RIG_OK) {
        row.status = rig_status_name(st);
        row.error = rig_last_error();
        continue;
      }
      char* report = nullptr;
      st = rig_analyze(fw, opts.c_str(), &report);
      rig_framework_free(fw);
      if (st != RIG_OK) {
        row.status = rig_status_name(st);
        row.error = rig_last_error();
        continue;
      }
      const fs::path out_path =
          fs::path(out_dir) / (files[i].stem().string() + ".report.json");
      std::ofstream out(out_path, std::ios::binary);
      if (!out) {
        row.status = "io_error";
        row.error = "cannot write " + out_path.string();
      } else {
        out << report;
        const json r = json::parse(report);
        row.classification = r.at("classification").get<std::string>();
        row.eta1 = num_or_empty(r.at("radii").at("eta1"));
        row.eta2 = num_or_empty(r.at("radii").at("eta2"));
        row.eta3 = num_or_empty(r.at("radii").at("eta3"));
        row.e_min_star = num_or_empty(r.at("radii").at("e_min_star"));
        row.D = r.at("checks").at("D").get<double>();
        row.D_pss = r.at("checks").at("D_pss").get<double>();
      }
      rig_string_free(report);
    }
  };
  if (parallel < 1) parallel = 1;
  std::vector<std::thread> pool;
  for (int t = 1; t < parallel; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ofstream agg(fs::path(out_dir) / "aggregate.csv", std::ios::binary);
  agg << "file,status,classification,eta1,eta2,eta3,e_min_star,D,D_pss,error\n";
  int ok = 0;
  json jrows = json::array();
  std::map<std::string, int> counts;
  double d_min = 0, d_max = 0, dp_min = 0, dp_max = 0;
  char dbuf[40];
  for (const auto& r : rows) {
    agg << csv_quote(r.file) << ',' << r.status << ',' << r.classification << ',' << r.eta1
        << ',' << r.eta2 << ',' << r.eta3 << ',' << r.e_min_star << ',';
    if (r.status == "ok") {
      std::snprintf(dbuf, sizeof(dbuf), "%.17g,%.17g", r.D, r.D_pss);
      agg << dbuf;
    } else {
      agg << ',';
    }
    agg << ',' << csv_quote(r.error) << '\n';
    json jr;
    jr["file"] = r.file;
    jr["status"] = r.status;
    if (r.status == "ok") {
      jr["classification"] = r.classification;
      ++counts[r.classification];
      if (ok == 0) {
        d_min = d_max = r.D;
        dp_min = dp_max = r.D_pss;
      } else {
        d_min = std::min(d_min, r.D);
        d_max = std::max(d_max, r.D);
        dp_min = std::min(dp_min, r.D_pss);
        dp_max = std::max(dp_max, r.D_pss);
      }
      ++ok;
    } else {
      jr["error"] = r.error;
    }
    jrows.push_back(jr);
  }
  json summary;
  summary["out_dir"] = out_dir;
  summary["scanned"] = rows.size();
  summary["ok"] = ok;
  summary["failed"] = rows.size() - ok;
  summary["classifications"] = counts;
  if (ok > 0) {
    summary["D_min"] = d_min;
    summary["D_max"] = d_max;
    summary["D_pss_min"] = dp_min;
    summary["D_pss_max"] = dp_max;
  } else {
    summary["D_min"] = nullptr;
    summary["D_max"] = nullptr;
    summary["D_pss_min"] = nullptr;
    summary["D_pss_max"] = nullptr;
  }
  summary["rows"] = jrows;
  std::fputs((summary.dump(2) + "\n").c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"structural rigidity analysis"};
  app.require_subcommand(1);

  CommonFlags af;
  auto* analyze = app.add_subcommand("analyze", "radii, margins, and classification");
  add_source_flags(analyze, af);
  add_analyze_flags(analyze, af, 1e-7);
  analyze->add_option("--verify", af.verify, "sample count for certificate spot checks");
  analyze->add_option("--format", af.format, "json or text")
      ->check(CLI::IsMember({"json", "text"}));
  analyze->add_option("--out", af.out, "output file (default stdout)");

  CommonFlags tf;
  auto* tenseg = app.add_subcommand("tensegrity", "sign-constrained stress analysis");
  add_source_flags(tenseg, tf);
  add_analyze_flags(tenseg, tf, 1e-7);
  tenseg->add_option("--verify", tf.verify, "sample count for certificate spot checks");
  tenseg->add_option("--format", tf.format, "json or text")
      ->check(CLI::IsMember({"json", "text"}));
  tenseg->add_option("--out", tf.out, "output file (default stdout)");

  CommonFlags sf;
  std::string grid = "0.02:0.98:49";
  auto* sweep = app.add_subcommand("sweep-lambda", "radii over a lambda-fraction grid, CSV");
  add_source_flags(sweep, sf);
  add_analyze_flags(sweep, sf, 1e-7);
  sweep->add_option("--grid", grid, "lo:hi:count grid of lambda fractions");
  sweep->add_option("--out", sf.out, "output file (default stdout)");

  CommonFlags pf;
  std::string delta_list;
  int trials = 20;
  double scale = 0;
  auto* perturb = app.add_subcommand("perturb", "perturb, re-solve, re-analyze; CSV per trial");
  add_source_flags(perturb, pf);
  add_analyze_flags(perturb, pf, 1e-2);
  perturb->add_option("--delta-list", delta_list, "comma-separated solver tolerances");
  perturb->add_option("--trials", trials, "trials per tolerance");
  perturb->add_option("--scale", scale, "perturbation size (0 = auto)");
  perturb->add_option("--out", pf.out, "output file (default stdout)");

  CommonFlags cf;
  std::string scan_dir;
  std::string scan_out;
  int parallel = 1;
  auto* scan = app.add_subcommand("scan", "analyze every .json framework in a directory");
  scan->add_option("dir", scan_dir, "directory of framework JSON files")->required();
  add_analyze_flags(scan, cf, 1e-7);
  scan->add_option("--out-dir", scan_out, "report directory (default $RIGIDITY_OUT_DIR or scan_reports)");
  scan->add_option("--parallel", parallel, "worker threads");

  auto* corpus = app.add_subcommand("corpus", "built-in examples");
  auto* corpus_list = corpus->add_subcommand("list", "print the example names");
  corpus->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (analyze->parsed()) return run_report(af, false);
  if (tenseg->parsed()) return run_report(tf, true);
  if (sweep->parsed()) return run_sweep(sf, grid);
  if (perturb->parsed()) return run_perturb(pf, delta_list, trials, scale);
  if (scan->parsed()) return run_scan(cf, scan_dir, scan_out, parallel);
  if (corpus->parsed() && corpus_list->parsed()) {
    char* text = nullptr;
    const rig_status st = rig_corpus_list(&text);
    if (st != RIG_OK) return report_failure(st);
    std::fputs(text, stdout);
    rig_string_free(text);
    return 0;
  }
  return 1;
}
