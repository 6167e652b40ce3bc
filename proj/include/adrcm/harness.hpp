#pragma once

#include <chrono>
#include <cmath>
#include <cstring>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Eigenvalues>

#include "adrcm/cliques.hpp"
#include "adrcm/error.hpp"
#include "adrcm/model.hpp"
#include "adrcm/parallel.hpp"
#include "adrcm/random.hpp"
#include "adrcm/stats.hpp"
#include "adrcm/theory.hpp"
#include "adrcm/trees.hpp"

namespace adrcm {

struct CliqueStatistic {
  std::vector<int> k_list{3};
};

struct TreeStatistic {
  DirectedTreeSpec spec = trees::wedge();
};

using StatisticSpec = std::variant<CliqueStatistic, TreeStatistic>;

struct ExperimentPlan {
  ModelParams params;
  StatisticSpec statistic = CliqueStatistic{};
  std::size_t replicates = 1000;
  std::uint64_t master_seed = 1;
  // Torus lengths for scaling studies; the model's own length is used when empty.
  std::vector<double> n_list;
  unsigned threads = 1;
  ProgressHook progress;

  void validate() const {
    params.validate();
    if (replicates < 2) throw ParameterError("need at least 2 replicates");
    if (const auto* c = std::get_if<CliqueStatistic>(&statistic)) {
      if (c->k_list.empty()) throw ParameterError("empty clique size list");
      for (int k : c->k_list) {
        if (k < 1) throw ParameterError("clique size k must be >= 1");
      }
    } else {
      validate_tree(std::get<TreeStatistic>(statistic).spec);
    }
    for (double n : n_list) {
      if (!(n > 0.0)) throw ParameterError("torus lengths must be positive");
    }
  }

  std::vector<std::string> statistic_names() const {
    std::vector<std::string> names;
    if (const auto* c = std::get_if<CliqueStatistic>(&statistic)) {
      for (int k : c->k_list) names.push_back("C" + std::to_string(k));
    } else {
      names.push_back("T");
    }
    return names;
  }
};

struct ReplicateResult {
  std::uint64_t seed = 0;
  std::vector<Count> values;
  std::size_t point_count = 0;
  double wall_time = 0.0;  // seconds
};

// Seed of replicate `index` for torus length n.
inline std::uint64_t replicate_seed(std::uint64_t master, double n, std::size_t index) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &n, sizeof bits);
  return derive_seed(master, fnv1a64("replicate") ^ bits, index);
}

inline std::vector<Count> measure(const PointConfig& config, const StatisticSpec& statistic) {
  if (const auto* c = std::get_if<CliqueStatistic>(&statistic)) {
    const int max_k = *std::max_element(c->k_list.begin(), c->k_list.end());
    const auto totals = count_cliques_upto(config, max_k);
    std::vector<Count> out;
    for (int k : c->k_list) out.push_back(totals[static_cast<std::size_t>(k)]);
    return out;
  }
  return {count_trees(config, validate_tree(std::get<TreeStatistic>(statistic).spec))};
}

// Samples R independent configurations at torus length n and measures the
// plan's statistic on each. Results are indexed by replicate, so they do not
// depend on the thread count.
inline std::vector<ReplicateResult> run_replicates(const ExperimentPlan& plan, double n) {
  plan.validate();
  ModelParams params = plan.params;
  params.torus_length = n;
  params.validate();
  std::vector<ReplicateResult> results(plan.replicates);
  parallel_for(
      plan.replicates, plan.threads,
      [&](std::size_t i) {
        const auto seed = replicate_seed(plan.master_seed, n, i);
        const auto start = std::chrono::steady_clock::now();
        try {
          const auto config = sample_config(params, seed);
          results[i].values = measure(config, plan.statistic);
          results[i].point_count = config.size();
        } catch (const std::exception& e) {
          throw ReplicateError(seed, e.what());
        }
        results[i].seed = seed;
        // Floor at 1ns so an instantaneous replicate still records a positive time.
        results[i].wall_time =
            std::max(1e-9, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
      },
      plan.progress);
  return results;
}

inline std::vector<ReplicateResult> run_replicates(const ExperimentPlan& plan) {
  return run_replicates(plan, plan.params.torus_length);
}

inline std::vector<double> column(const std::vector<ReplicateResult>& results, std::size_t statistic) {
  std::vector<double> out(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) out[i] = static_cast<double>(results[i].values.at(statistic));
  return out;
}

struct ScalingRow {
  double n = 0.0;
  double var_over_n = 0.0;
  stats::Interval ci;
  std::size_t replicates = 0;
};

struct ScalingStudy {
  std::vector<std::string> names;
  std::vector<std::vector<ScalingRow>> rows;       // [statistic][n]
  std::vector<std::vector<ReplicateResult>> runs;  // one per n, in n_list order
};

inline constexpr std::size_t kBootstrapResamples = 1000;

inline ScalingRow scaling_row(const std::vector<double>& samples, double n, std::uint64_t seed,
                              std::size_t resamples = kBootstrapResamples) {
  ScalingRow row;
  row.n = n;
  row.replicates = samples.size();
  row.var_over_n = stats::variance(samples) / n;
  row.ci = stats::percentile_bootstrap(
      samples, [n](std::span<const double> s) { return stats::variance(s) / n; }, resamples, seed);
  return row;
}

// Var/n with percentile-bootstrap CIs for every statistic and every n in the
// plan's n_list.
inline ScalingStudy variance_scaling(const ExperimentPlan& plan) {
  plan.validate();
  if (plan.n_list.size() < 2) throw ParameterError("variance scaling needs at least 2 torus lengths");
  if (plan.replicates < 200) throw ParameterError("variance scaling needs at least 200 replicates");
  ScalingStudy study;
  study.names = plan.statistic_names();
  study.rows.resize(study.names.size());
  for (std::size_t i = 0; i < plan.n_list.size(); ++i) {
    auto results = run_replicates(plan, plan.n_list[i]);
    for (std::size_t s = 0; s < study.names.size(); ++s) {
      study.rows[s].push_back(scaling_row(column(results, s), plan.n_list[i],
                                          derive_seed(plan.master_seed, fnv1a64("bootstrap") + s, i)));
    }
    study.runs.push_back(std::move(results));
  }
  return study;
}

// Block sums of the plan's tree statistic, one per replicate, at the model's
// torus length. Seeds match run_replicates.
inline std::vector<BlockSums> run_block_replicates(const ExperimentPlan& plan) {
  plan.validate();
  const auto* t = std::get_if<TreeStatistic>(&plan.statistic);
  if (!t) throw ParameterError("block sums need a tree statistic");
  const auto tree = validate_tree(t->spec);
  integer_torus_length(plan.params);
  std::vector<BlockSums> out(plan.replicates);
  parallel_for(
      plan.replicates, plan.threads,
      [&](std::size_t i) {
        const auto seed = replicate_seed(plan.master_seed, plan.params.torus_length, i);
        try {
          out[i] = block_sums(sample_config(plan.params, seed), tree);
        } catch (const std::exception& e) {
          throw ReplicateError(seed, e.what());
        }
      },
      plan.progress);
  return out;
}

struct CovarianceMatrix {
  std::vector<std::string> names;
  // Cov / n and its standard error, row-major d x d.
  std::vector<double> values;
  std::vector<double> std_errors;
  double min_eigenvalue = 0.0;
  double trace = 0.0;
  std::size_t dim = 0;

  double at(std::size_t i, std::size_t j) const { return values[i * dim + j]; }
  double se(std::size_t i, std::size_t j) const { return std_errors[i * dim + j]; }
};

inline CovarianceMatrix covariance_matrix(const std::vector<ReplicateResult>& results, double n,
                                          std::vector<std::string> names) {
  if (results.size() < 2) throw ParameterError("covariance matrix needs at least 2 replicates");
  const std::size_t d = results.front().values.size();
  CovarianceMatrix m;
  m.names = std::move(names);
  m.dim = d;
  m.values.assign(d * d, 0.0);
  m.std_errors.assign(d * d, 0.0);
  std::vector<std::vector<double>> cols;
  for (std::size_t i = 0; i < d; ++i) cols.push_back(column(results, i));
  Eigen::MatrixXd mat(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      // Computed once per unordered pair so the matrix is exactly symmetric.
      if (j < i) {
        m.values[i * d + j] = m.values[j * d + i];
        m.std_errors[i * d + j] = m.std_errors[j * d + i];
      } else {
        m.values[i * d + j] = stats::covariance(cols[i], cols[j]) / n;
        m.std_errors[i * d + j] = stats::covariance_standard_error(cols[i], cols[j]) / n;
      }
      mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m.values[i * d + j];
    }
    m.trace += m.values[i * d + i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(mat, Eigen::EigenvaluesOnly);
  m.min_eigenvalue = solver.eigenvalues().minCoeff();
  return m;
}

// Runs the plan at its own torus length and returns Cov(C_k, C_l) / n.
inline CovarianceMatrix covariance_matrix(const ExperimentPlan& plan) {
  if (!std::holds_alternative<CliqueStatistic>(plan.statistic) ||
      std::get<CliqueStatistic>(plan.statistic).k_list.size() < 2)
    throw ParameterError("covariance matrix needs at least 2 clique statistics");
  if (plan.replicates < 200) throw ParameterError("covariance matrix needs at least 200 replicates");
  return covariance_matrix(run_replicates(plan), plan.params.torus_length, plan.statistic_names());
}

struct ProjectionReport {
  std::vector<stats::KsResult> coordinates;
  std::vector<stats::KsResult> projections;
  std::vector<std::vector<double>> directions;
};

// Normality checks for a sample of d-vectors: KS on every standardized
// coordinate and on seed-fixed random unit projections of the standardized vector.
inline ProjectionReport projection_normality(const std::vector<std::vector<double>>& columns,
                                             std::size_t projections, std::uint64_t seed) {
  if (columns.empty()) throw ParameterError("no coordinates");
  const std::size_t d = columns.size();
  const std::size_t r = columns.front().size();
  std::vector<std::vector<double>> z;
  ProjectionReport report;
  for (const auto& c : columns) {
    z.push_back(stats::standardize(c));
    report.coordinates.push_back(stats::ks_distance_normal(z.back()));
  }
  Rng rng(seed);
  for (std::size_t p = 0; p < projections; ++p) {
    std::vector<double> dir(d);
    double norm = 0.0;
    for (auto& v : dir) {
      v = rng.standard_normal();
      norm += v * v;
    }
    for (auto& v : dir) v /= std::sqrt(norm);
    std::vector<double> proj(r, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < d; ++j) proj[i] += dir[j] * z[j][i];
    }
    report.projections.push_back(stats::ks_distance_normal(stats::standardize(proj)));
    report.directions.push_back(std::move(dir));
  }
  return report;
}

struct PalmMomentRow {
  double u = 0.0;
  double moment = 0.0;
  double std_error = 0.0;
};

struct PalmMomentCurve {
  std::vector<PalmMomentRow> rows;
  // Least-squares slope of log(moment) against log(1/u).
  double slope = 0.0;
  double power = 1.0;
  std::size_t samples = 0;
};

// Empirical E[F(u)^power] over Palm configurations for each u in the grid.
// Configuration i is shared by every u (common random numbers).
template <class Functional>
PalmMomentCurve palm_moment_curve(const ModelParams& params, std::span<const double> u_grid, std::size_t samples,
                                  double power, Functional&& functional, std::uint64_t seed,
                                  unsigned threads = 1) {
  params.validate();
  if (u_grid.size() < 2) throw ParameterError("moment curve needs at least 2 marks");
  if (samples < 2) throw ParameterError("moment curve needs at least 2 samples");
  std::vector<std::vector<double>> values(u_grid.size(), std::vector<double>(samples));
  parallel_for(samples, threads, [&](std::size_t i) {
    const auto config = sample_config(params, derive_seed(seed, fnv1a64("palm_moment"), i));
    for (std::size_t a = 0; a < u_grid.size(); ++a) {
      values[a][i] = std::pow(static_cast<double>(functional(config, u_grid[a])), power);
    }
  });
  PalmMomentCurve curve;
  curve.power = power;
  curve.samples = samples;
  std::vector<double> lx, ly;
  for (std::size_t a = 0; a < u_grid.size(); ++a) {
    PalmMomentRow row{u_grid[a], stats::mean(values[a]), stats::standard_error_of_mean(values[a])};
    curve.rows.push_back(row);
    if (row.moment <= 0.0) throw DegenerateError("zero moment at u = " + std::to_string(row.u) + "; cannot take logs");
    lx.push_back(std::log(1.0 / row.u));
    ly.push_back(std::log(row.moment));
  }
  curve.slope = stats::ls_slope(lx, ly);
  return curve;
}

// Torus standing in for the infinite line in Palm expectations at marks >= u_min.
inline ModelParams palm_window_params(const ModelParams& params, double u_min) {
  return {params.gamma, params.beta, 2.0 * palm_half_width(params, u_min)};
}

}  // namespace adrcm
