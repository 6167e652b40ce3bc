#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "adrcm/blocks.hpp"
#include "adrcm/harness.hpp"
#include "adrcm/io.hpp"
#include "adrcm/run_config.hpp"
#include "adrcm/theory.hpp"

namespace adrcm::cli {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kExitOk = 0, kExitStatFailure = 1, kExitUsage = 2, kExitInternal = 3 };

inline constexpr double kKsAlpha = 0.01;

struct RunOptions {
  unsigned threads = 1;
  bool assert_mode = false;
};

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunOutcome {
  json summary;
  std::vector<Check> checks;
  std::vector<std::string> report;  // deterministic stdout lines
  std::vector<std::filesystem::path> files;
  double wall_time = 0.0;

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }
};

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string config_hash(const RunConfig& c) { return hex64(fnv1a64(render_config(c))); }

namespace detail {

class Writer {
 public:
  Writer(const RunConfig& config, RunOutcome& outcome) : config_(config), outcome_(outcome) {
    std::filesystem::create_directories(config.output_directory);
  }

  std::string csv_preamble() const {
    return "# schema_version: " + std::to_string(kSchemaVersion) + "\n# seed: " + std::to_string(config_.seed) +
           "\n# config_hash: " + config_hash(config_) + "\n";
  }

  void csv(const std::string& name, const std::string& body) {
    if (!config_.write_csv) return;
    put(name, csv_preamble() + body);
  }

  void put(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::path(config_.output_directory) / name;
    atomic_write(path, content);
    outcome_.files.push_back(path);
  }

 private:
  const RunConfig& config_;
  RunOutcome& outcome_;
};

inline ExperimentPlan make_plan(const RunConfig& c, const RunOptions& opts) {
  ExperimentPlan plan;
  plan.params = c.model;
  if (c.statistic == StatisticKind::kTree) {
    plan.statistic = TreeStatistic{*c.tree_spec};
  } else {
    plan.statistic = CliqueStatistic{c.k_list};
  }
  plan.replicates = c.replicates;
  plan.master_seed = c.seed;
  plan.n_list = c.n_list;
  plan.threads = opts.threads;
  return plan;
}

inline json real(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline void add_check(RunOutcome& out, std::string name, bool passed, std::string detail) {
  out.report.push_back("check " + name + ": " + (passed ? "PASS" : "FAIL") + " (" + detail + ")");
  out.checks.push_back({std::move(name), passed, std::move(detail)});
}

inline std::string replicate_table(const std::vector<std::string>& names,
                                   const std::vector<ReplicateResult>& results) {
  std::ostringstream s;
  s << "replicate,seed,point_count";
  for (const auto& n : names) s << ',' << n;
  s << '\n';
  for (std::size_t i = 0; i < results.size(); ++i) {
    s << i << ',' << results[i].seed << ',' << results[i].point_count;
    for (auto v : results[i].values) s << ',' << v;
    s << '\n';
  }
  return s.str();
}

// Per-statistic moments shared by the replicated modes.
inline void describe_replicates(const RunConfig& c, const std::vector<std::string>& names,
                                const std::vector<ReplicateResult>& results, RunOutcome& out,
                                std::ostringstream& summary_csv) {
  auto& est = out.summary["estimates"];
  auto& se = out.summary["std_errors"];
  const double n = c.model.torus_length;
  summary_csv << "statistic,mean,mean_se,variance,var_over_n,var_over_n_se\n";
  for (std::size_t s = 0; s < names.size(); ++s) {
    const auto col = column(results, s);
    const double m = stats::mean(col), v = stats::variance(col);
    const double m_se = stats::standard_error_of_mean(col), v_se = stats::covariance_standard_error(col, col);
    est[names[s]] = {{"mean", real(m)}, {"variance", real(v)}, {"var_over_n", real(v / n)}};
    se[names[s]] = {{"mean", real(m_se)}, {"var_over_n", real(v_se / n)}};
    summary_csv << names[s] << ',' << format_real(m) << ',' << format_real(m_se) << ',' << format_real(v) << ','
                << format_real(v / n) << ',' << format_real(v_se / n) << '\n';
    out.report.push_back(names[s] + ": mean " + format_shortest(m) + " +- " + format_shortest(m_se) + ", var/n " +
                         format_shortest(v / n) + " +- " + format_shortest(v_se / n));
  }
}

inline json seeds_of(const std::vector<ReplicateResult>& results) {
  json seeds = json::array();
  for (const auto& r : results) seeds.push_back(r.seed);
  return seeds;
}

inline void run_sample(const RunConfig& c, RunOutcome& out, Writer& w) {
  const auto config = sample_config(c.model, c.seed);
  std::ostringstream csv;
  write_config_csv(csv, config);
  w.csv("points.csv", csv.str());
  out.summary["estimates"]["point_count"] = config.size();
  out.summary["seeds"] = json::array({c.seed});
  out.report.push_back("sampled " + std::to_string(config.size()) + " points");
}

inline void run_counts(const RunConfig& c, const RunOptions& opts, RunOutcome& out, Writer& w) {
  const auto plan = make_plan(c, opts);
  const auto names = plan.statistic_names();
  const auto results = run_replicates(plan);
  std::ostringstream summary_csv;
  describe_replicates(c, names, results, out, summary_csv);
  w.csv("replicates.csv", replicate_table(names, results));
  w.csv("statistics.csv", summary_csv.str());
  out.summary["seeds"] = seeds_of(results);
}

inline void scaling_section(const RunConfig& c, const ExperimentPlan& plan, RunOutcome& out, Writer& w) {
  const auto study = variance_scaling(plan);
  json table = json::object();
  std::ostringstream csv;
  csv << "statistic,n,var_over_n,ci_lo,ci_hi,replicates\n";
  for (std::size_t s = 0; s < study.names.size(); ++s) {
    json rows = json::array();
    for (const auto& r : study.rows[s]) {
      rows.push_back({{"n", r.n}, {"var_over_n", real(r.var_over_n)}, {"ci_lo", real(r.ci.lo)},
                      {"ci_hi", real(r.ci.hi)}, {"replicates", r.replicates}});
      csv << study.names[s] << ',' << format_real(r.n) << ',' << format_real(r.var_over_n) << ','
          << format_real(r.ci.lo) << ',' << format_real(r.ci.hi) << ',' << r.replicates << '\n';
    }
    table[study.names[s]] = rows;
    const auto& a = study.rows[s][study.rows[s].size() - 2];
    const auto& b = study.rows[s].back();
    add_check(out, study.names[s] + " variance linearity", a.ci.overlaps(b.ci),
              "Var/n CIs at n=" + format_shortest(a.n) + " and n=" + format_shortest(b.n) + " overlap");

    // KS trend across the ladder, non-increasing up to one combined SE.
    if (c.replicates >= stats::kMinGoodnessSamples) {
      std::vector<stats::KsResult> ks;
      for (const auto& run : study.runs) ks.push_back(stats::ks_distance_normal(stats::standardize(column(run, s))));
      bool trend = true;
      json ladder = json::array();
      for (std::size_t i = 0; i < ks.size(); ++i) {
        ladder.push_back({{"n", study.rows[s][i].n}, {"ks", ks[i].statistic}, {"ks_se", ks[i].std_error}});
        if (i > 0 && ks[i].statistic - ks[i - 1].statistic >
                         std::hypot(ks[i].std_error, ks[i - 1].std_error))
          trend = false;
      }
      out.summary["test_statistics"]["ks_ladder"][study.names[s]] = ladder;
      add_check(out, study.names[s] + " KS trend", trend, "KS non-increasing along n_list up to 1 SE");
    }
  }
  out.summary["tables"]["scaling"] = table;
  w.csv("scaling.csv", csv.str());
}

inline void run_clt(const RunConfig& c, const RunOptions& opts, RunOutcome& out, Writer& w) {
  const auto plan = make_plan(c, opts);
  const auto names = plan.statistic_names();
  const auto results = run_replicates(plan);
  std::ostringstream summary_csv;
  describe_replicates(c, names, results, out, summary_csv);
  w.csv("replicates.csv", replicate_table(names, results));
  w.csv("statistics.csv", summary_csv.str());
  out.summary["seeds"] = seeds_of(results);
  for (std::size_t s = 0; s < names.size(); ++s) {
    json vals = json::array();
    for (const auto& r : results) vals.push_back(r.values[s]);
    out.summary["replicate_values"][names[s]] = vals;
  }

  std::vector<std::string> flags;
  std::vector<std::vector<double>> columns;
  bool degenerate = false;
  for (std::size_t s = 0; s < names.size(); ++s) {
    columns.push_back(column(results, s));
    if (stats::variance(columns.back()) == 0.0) {
      flags.push_back(names[s] + ": zero sample variance, cannot standardize");
      degenerate = true;
    }
  }
  if (c.replicates < stats::kMinGoodnessSamples) {
    flags.push_back("insufficient samples for KS");
  } else if (!degenerate) {
    std::ostringstream gof;
    gof << "statistic,ks,ks_se,p_value,w1\n";
    for (std::size_t s = 0; s < names.size(); ++s) {
      const auto z = stats::standardize(columns[s]);
      const auto ks = stats::ks_distance_normal(z);
      const double w1 = stats::wasserstein1_distance_normal(z);
      out.summary["test_statistics"][names[s]] = {{"ks", ks.statistic}, {"ks_se", ks.std_error}, {"w1", w1}};
      out.summary["p_values"][names[s]] = ks.p_value;
      gof << names[s] << ',' << format_real(ks.statistic) << ',' << format_real(ks.std_error) << ','
          << format_real(ks.p_value) << ',' << format_real(w1) << '\n';
      out.report.push_back(names[s] + ": KS " + format_shortest(ks.statistic) + " p " + format_shortest(ks.p_value) +
                           ", W1 " + format_shortest(w1));
      add_check(out, names[s] + " normality", ks.p_value > kKsAlpha, "KS p > " + format_shortest(kKsAlpha));
    }
    if (names.size() >= 2) {
      const auto cov = covariance_matrix(results, c.model.torus_length, names);
      json m = json::array(), mse = json::array();
      for (std::size_t i = 0; i < cov.dim; ++i) {
        json row = json::array(), row_se = json::array();
        for (std::size_t j = 0; j < cov.dim; ++j) {
          row.push_back(cov.at(i, j));
          row_se.push_back(cov.se(i, j));
        }
        m.push_back(row);
        mse.push_back(row_se);
      }
      out.summary["estimates"]["covariance_over_n"] = m;
      out.summary["std_errors"]["covariance_over_n"] = mse;
      out.summary["estimates"]["covariance_min_eigenvalue"] = cov.min_eigenvalue;
      add_check(out, "covariance PSD", cov.min_eigenvalue >= -1e-8 * cov.trace,
                "min eigenvalue >= -1e-8 * trace");

      const auto proj = projection_normality(columns, c.projections, derive_seed(c.seed, fnv1a64("projections"), 0));
      json ps = json::array(), pp = json::array();
      bool all = true;
      for (const auto& r : proj.projections) {
        ps.push_back(r.statistic);
        pp.push_back(r.p_value);
        all = all && r.p_value > kKsAlpha;
      }
      out.summary["test_statistics"]["projections"] = ps;
      out.summary["p_values"]["projections"] = pp;
      add_check(out, "projection normality", all,
                std::to_string(proj.projections.size()) + " random projections with KS p > " + format_shortest(kKsAlpha));
    }
    w.csv("goodness.csv", gof.str());
  }
  if (!c.n_list.empty()) scaling_section(c, plan, out, w);
  out.summary["flags"] = flags;
  for (const auto& f : flags) out.report.push_back("flag: " + f);
}

inline void run_sigma(const RunConfig& c, const RunOptions& opts, RunOutcome& out, Writer& w) {
  SigmaOptions so;
  so.samples = c.samples;
  so.u_floor = c.u_floor;
  so.threads = opts.threads;
  std::ostringstream csv;
  csv << "k,l,sigma,se,single_term,single_term_se,double_term,double_term_se,double_term_core,max_points\n";
  json rows = json::array();
  for (std::size_t a = 0; a < c.k_list.size(); ++a) {
    for (std::size_t b = a; b < c.k_list.size(); ++b) {
      const int k = c.k_list[a], l = c.k_list[b];
      const auto e = sigma_palm(c.model, k, l, so, derive_seed(c.seed, fnv1a64("sigma"), a * 64 + b));
      const std::string key = "sigma_" + std::to_string(k) + "_" + std::to_string(l);
      out.summary["estimates"][key] = e.value;
      out.summary["std_errors"][key] = e.std_error;
      rows.push_back({{"k", k},
                      {"l", l},
                      {"sigma", e.value},
                      {"se", e.std_error},
                      {"single_term", e.single_term},
                      {"double_term", e.double_term},
                      {"double_term_core", e.double_term_core},
                      {"u_floor", e.u_floor},
                      {"mark_exponent", e.mark_exponent},
                      {"truncation", e.truncation_note}});
      csv << k << ',' << l << ',' << format_real(e.value) << ',' << format_real(e.std_error) << ','
          << format_real(e.single_term) << ',' << format_real(e.single_term_se) << ',' << format_real(e.double_term)
          << ',' << format_real(e.double_term_se) << ',' << format_real(e.double_term_core) << ',' << e.max_points
          << '\n';
      out.report.push_back(key + " = " + format_shortest(e.value) + " +- " + format_shortest(e.std_error));
      if (k == l) add_check(out, key + " positive", e.value > 3.0 * e.std_error, "estimate exceeds 3 SE");
    }
  }
  out.summary["tables"]["sigma"] = rows;
  out.summary["seeds"] = json::array({c.seed});
  w.csv("sigma.csv", csv.str());
}

inline void run_moments(const RunConfig& c, const RunOptions& opts, RunOutcome& out, Writer& w) {
  const auto window = palm_window_params(c.model, *std::min_element(c.u_list.begin(), c.u_list.end()));
  PalmMomentCurve curve;
  double bound = 0.0;
  std::string label;
  const auto seed = derive_seed(c.seed, fnv1a64("moments"), 0);
  if (c.statistic == StatisticKind::kTree) {
    const auto tree = validate_tree(*c.tree_spec);
    curve = palm_moment_curve(
        window, c.u_list, c.samples, c.power,
        [&](const PointConfig& cfg, double u) { return d_in(cfg, MarkedPoint{0.0, u}, tree); }, seed, opts.threads);
    bound = c.power * static_cast<double>(tree.leaf_count()) * c.model.gamma;
    label = "D_in";
  } else {
    const int k = c.k_list.front();
    curve = palm_moment_curve(
        window, c.u_list, c.samples, c.power,
        [&](const PointConfig& cfg, double u) { return diff1_clique(cfg, u, k); }, seed, opts.threads);
    bound = c.power * c.model.gamma;
    label = "D_u C" + std::to_string(k);
  }
  std::ostringstream csv;
  csv << "u,moment,se\n";
  json rows = json::array();
  for (const auto& r : curve.rows) {
    csv << format_real(r.u) << ',' << format_real(r.moment) << ',' << format_real(r.std_error) << '\n';
    rows.push_back({{"u", r.u}, {"moment", r.moment}, {"se", r.std_error}});
  }
  out.summary["tables"]["moments"] = rows;
  out.summary["estimates"]["slope"] = curve.slope;
  out.summary["estimates"]["slope_bound"] = bound;
  out.summary["seeds"] = json::array({c.seed});
  out.report.push_back("E[" + label + "^" + format_shortest(c.power) + "] slope vs log(1/u): " + format_shortest(curve.slope));
  add_check(out, "moment slope", curve.slope <= bound + 0.15, "slope <= " + format_shortest(bound) + " + 0.15");
  w.csv("moments.csv", csv.str());
}

inline void run_blocks(const RunConfig& c, const RunOptions& opts, RunOutcome& out, Writer& w) {
  const auto plan = make_plan(c, opts);
  const auto blocks = run_block_replicates(plan);
  const std::size_t n = blocks.front().values.size();
  const std::size_t max_lag = std::min(c.max_lag, n - 1);
  if (max_lag < 1) throw ParameterError("blocks mode needs n >= 2");
  std::ostringstream csv;
  csv << "lag,covariance,se,cox_grimmett,cox_grimmett_se\n";
  json rows = json::array();
  std::vector<Estimate> cov, cg;
  bool nonnegative = true;
  for (std::size_t k = 1; k <= max_lag; ++k) {
    cov.push_back(block_lag_covariance(blocks, k));
    cg.push_back(cox_grimmett(blocks, k));
    nonnegative = nonnegative && cov.back().value >= -3.0 * cov.back().std_error;
    csv << k << ',' << format_real(cov.back().value) << ',' << format_real(cov.back().std_error) << ','
        << format_real(cg.back().value) << ',' << format_real(cg.back().std_error) << '\n';
    rows.push_back({{"lag", k},
                    {"covariance", real(cov.back().value)},
                    {"se", real(cov.back().std_error)},
                    {"cox_grimmett", real(cg.back().value)},
                    {"cox_grimmett_se", real(cg.back().std_error)}});
  }
  out.summary["tables"]["lags"] = rows;
  out.summary["estimates"]["cov_lag1"] = cov.front().value;
  out.summary["estimates"]["cox_grimmett_1"] = cg.front().value;
  out.summary["seeds"] = json::array();
  for (std::size_t i = 0; i < c.replicates; ++i)
    out.summary["seeds"].push_back(replicate_seed(c.seed, c.model.torus_length, i));
  out.report.push_back("Cov(T_1,T_2) = " + format_shortest(cov.front().value) + " +- " + format_shortest(cov.front().std_error));
  add_check(out, "positive association", nonnegative, "all lag covariances >= -3 SE");
  if (max_lag >= 2) {
    add_check(out, "Cox-Grimmett decay", cg.back().value < cg.front().value,
              "u_n(" + std::to_string(max_lag) + ") < u_n(1)");
    add_check(out, "covariance decay", cov.back().value < 0.5 * cov.front().value,
              "Cov at lag " + std::to_string(max_lag) + " < half of lag 1");
  }
  w.csv("lags.csv", csv.str());
}

}  // namespace detail

// Runs the configured experiment, writes its outputs and returns the summary.
inline RunOutcome run_experiment(const RunConfig& config, const RunOptions& opts = {}) {
  RunOutcome out;
  const auto start = std::chrono::steady_clock::now();
  detail::Writer w(config, out);
  out.summary["schema_version"] = kSchemaVersion;
  out.summary["mode"] = std::string(mode_name(config.mode));
  json plan = {{"config_text", render_config(config)},
               {"config_hash", config_hash(config)},
               {"master_seed", config.seed},
               {"params",
                {{"gamma", config.model.gamma}, {"beta", config.model.beta}, {"n", config.model.torus_length}}}};
  if (config.tree_spec) plan["tree_spec"] = render_tree_spec(*config.tree_spec);
  out.summary["plan"] = plan;
  out.summary["estimates"] = json::object();
  out.summary["std_errors"] = json::object();
  out.summary["test_statistics"] = json::object();
  out.summary["p_values"] = json::object();
  out.report.push_back("mode " + std::string(mode_name(config.mode)) + ", seed " + std::to_string(config.seed) +
                       ", config " + config_hash(config));

  switch (config.mode) {
    case Mode::kSample: detail::run_sample(config, out, w); break;
    case Mode::kCliques:
    case Mode::kTrees: detail::run_counts(config, opts, out, w); break;
    case Mode::kClt: detail::run_clt(config, opts, out, w); break;
    case Mode::kSigma: detail::run_sigma(config, opts, out, w); break;
    case Mode::kMoments: detail::run_moments(config, opts, out, w); break;
    case Mode::kBlocks: detail::run_blocks(config, opts, out, w); break;
  }
  json checks = json::array();
  for (const auto& c : out.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  out.summary["checks"] = checks;
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.summary["wall_time"] = out.wall_time;
  if (config.write_json) w.put("summary.json", out.summary.dump(2) + "\n");
  return out;
}

// Plot-ready CSV from a run summary. qq: (normal quantile, standardized sample
// quantile); scaling: (n, Var/n, CI lo, CI hi); decay: (lag k, covariance, SE).
inline std::string export_plotdata(const json& summary, const std::string& kind, std::string statistic = {}) {
  const std::string mode = summary.value("mode", "");
  std::ostringstream out;
  out << "# schema_version: " << kSchemaVersion << "\n# seed: " << summary["plan"].value("master_seed", 0ull)
      << "\n# config_hash: " << summary["plan"].value("config_hash", "") << "\n";
  auto pick = [&](const json& obj) {
    if (obj.empty()) throw FormatError("no statistics recorded");
    if (statistic.empty()) statistic = obj.begin().key();
    if (!obj.contains(statistic)) throw FormatError("statistic '" + statistic + "' not found");
    return obj[statistic];
  };
  if (kind == "qq") {
    if (!summary.contains("replicate_values")) throw FormatError("plot kind 'qq' needs clt results, got " + mode);
    std::vector<double> xs = pick(summary["replicate_values"]).get<std::vector<double>>();
    if (xs.size() < 2) throw FormatError("qq plot needs at least 2 samples");
    auto z = stats::standardize(xs);
    std::sort(z.begin(), z.end());
    const double m = static_cast<double>(z.size());
    out << "normal_quantile,sample_quantile\n";
    for (std::size_t i = 0; i < z.size(); ++i)
      out << format_real(stats::normal_quantile((static_cast<double>(i) + 0.5) / m)) << ',' << format_real(z[i])
          << '\n';
  } else if (kind == "scaling") {
    if (!summary.contains("tables") || !summary["tables"].contains("scaling"))
      throw FormatError("plot kind 'scaling' needs clt results with n_list, got " + mode);
    out << "n,var_over_n,ci_lo,ci_hi\n";
    for (const auto& r : pick(summary["tables"]["scaling"])) {
      out << format_real(r["n"].get<double>()) << ',' << format_real(r["var_over_n"].get<double>()) << ','
          << format_real(r["ci_lo"].get<double>()) << ',' << format_real(r["ci_hi"].get<double>()) << '\n';
    }
  } else if (kind == "decay") {
    if (mode != "blocks") throw FormatError("plot kind 'decay' needs blocks results, got " + mode);
    auto rows = summary["tables"]["lags"];
    std::vector<std::tuple<std::size_t, double, double>> pts;
    for (const auto& r : rows) {
      pts.emplace_back(r["lag"].get<std::size_t>(), r["covariance"].is_null() ? NAN : r["covariance"].get<double>(),
                       r["se"].is_null() ? NAN : r["se"].get<double>());
    }
    std::sort(pts.begin(), pts.end());
    out << "k,covariance,se\n";
    for (const auto& [k, v, se] : pts) out << k << ',' << format_real(v) << ',' << format_real(se) << '\n';
  } else {
    throw FormatError("unknown plot kind '" + kind + "' (expected qq, scaling or decay)");
  }
  return out.str();
}

// Reads a config document, or the config embedded in a run summary.
inline std::string load_config_text(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const auto doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.contains("plan") || !doc["plan"].contains("config_text"))
      throw FormatError(path.string() + " is not a run summary with an embedded config");
    return doc["plan"]["config_text"].get<std::string>();
  }
  return text;
}

inline constexpr const char* kHelpFooter = R"(CONFIGURATION
  Flat 'key = value' lines grouped under [model], [experiment] and [output]
  headers; '#' starts a comment. Lists are comma separated.

  [model]       gamma (0.3), beta (1), n (1000)
  [experiment]  mode, statistic (cliques|tree), k_list (3), tree (edge|wedge|
                path3|star3) or tree_file, replicates (1000), n_list, seed (1),
                samples (20000), u_list, u_floor (auto, sigma only), power (2),
                max_lag (10), projections (8), override_regime (false)
  [output]      directory (out), formats (csv, json)

  The subcommand sets experiment.mode. --set section.key=value overrides any
  key. --config also accepts a summary.json and re-runs its embedded config.

EXIT STATUS
  0 success, 1 statistical check failed under --assert, 2 usage or
  configuration error, 3 internal error.

OUTPUT
  CSV tables and summary.json in the output directory. Every file carries
  schema_version, the master seed and the config hash. Lines on stdout are
  deterministic except those starting with '# time:'.
)";

// Command-line entry point.
inline int main(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Simulation experiments for the age-dependent random connection model", "adrcm"};
  app.footer(kHelpFooter);
  app.require_subcommand(1);

  std::string config_path, out_dir, kind, input, statistic;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool assert_mode = false, override_regime = false;
  std::vector<std::string> sets;

  for (auto m : kModeNames) {
    auto* sub = app.add_subcommand(std::string(m), "run the " + std::string(m) + " experiment");
    sub->add_option("--config", config_path, "config file or summary.json")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));
    sub->add_option("--out", out_dir, "output directory");
    sub->add_flag("--assert", assert_mode, "exit 1 if a statistical check fails");
    sub->add_flag("--override-regime", override_regime, "allow gamma outside the proven CLT regime");
    sub->add_option("--set", sets, "override a config key, e.g. model.gamma=0.2");
  }
  auto* plot = app.add_subcommand("plotdata", "export plot-ready CSV from a run summary");
  plot->add_option("--kind", kind, "qq, scaling or decay")->required();
  plot->add_option("--input", input, "summary.json of a previous run")->required()->check(CLI::ExistingFile);
  plot->add_option("--statistic", statistic, "statistic name, e.g. C3");
  plot->add_option("--out", out_dir, "output directory (defaults to the input's)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (plot->parsed()) {
      const auto summary = json::parse(read_file(input));
      const auto csv = export_plotdata(summary, kind, statistic);
      const auto dir = out_dir.empty() ? std::filesystem::path(input).parent_path() : std::filesystem::path(out_dir);
      if (!dir.empty()) std::filesystem::create_directories(dir);
      const auto path = dir / ("plot_" + kind + ".csv");
      atomic_write(path, csv);
      out << "wrote " << path.string() << '\n';
      return kExitOk;
    }

    const auto* sub = app.get_subcommands().front();
    const std::string mode = sub->get_name();
    std::string text = config_path.empty() ? std::string() : load_config_text(config_path);
    if (const auto given = get_config_value(text, "experiment", "mode"); given && *given != mode)
      throw ConfigError({"config mode '" + *given + "' conflicts with subcommand '" + mode + "'"});
    text = set_config_value(text, "experiment", "mode", mode);
    if (sub->count("--seed")) text = set_config_value(text, "experiment", "seed", std::to_string(seed));
    if (!out_dir.empty()) text = set_config_value(text, "output", "directory", out_dir);
    if (override_regime) text = set_config_value(text, "experiment", "override_regime", "true");
    for (const auto& s : sets) {
      const auto eq = s.find('='), dot = s.find('.');
      if (eq == std::string::npos || dot == std::string::npos || dot > eq)
        throw ConfigError({"--set expects section.key=value, got '" + s + "'"});
      text = set_config_value(text, s.substr(0, dot), s.substr(dot + 1, eq - dot - 1), s.substr(eq + 1));
    }
    const RunConfig config = parse_config(text);
    const auto outcome = run_experiment(config, {threads, assert_mode});
    for (const auto& line : outcome.report) out << line << '\n';
    for (const auto& f : outcome.files) out << "wrote " << f.string() << '\n';
    char buf[64];
    std::snprintf(buf, sizeof buf, "# time: %.3f s", outcome.wall_time);
    out << buf << '\n';
    return assert_mode && !outcome.all_passed() ? kExitStatFailure : kExitOk;
  } catch (const ConfigError& e) {
    err << "configuration error:\n";
    for (const auto& p : e.problems()) err << "  " << p << '\n';
    return kExitUsage;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const RegimeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SpecError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace adrcm::cli
