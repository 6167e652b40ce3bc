#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "adrcm/error.hpp"
#include "adrcm/random.hpp"

namespace adrcm {

// A Monte Carlo point estimate with its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

}  // namespace adrcm

namespace adrcm::stats {

// Neumaier-compensated sum; the result does not depend on how the input was produced.
inline double sum(std::span<const double> xs) {
  double s = 0.0, c = 0.0;
  for (double x : xs) {
    const double t = s + x;
    c += std::fabs(s) >= std::fabs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  return s + c;
}

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw ParameterError("mean of empty sample");
  return sum(xs) / static_cast<double>(xs.size());
}

// Unbiased sample covariance (two-pass).
inline double covariance(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw ParameterError("covariance: length mismatch");
  if (xs.size() < 2) throw ParameterError("covariance needs at least 2 samples");
  const double mx = mean(xs), my = mean(ys);
  std::vector<double> prod(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) prod[i] = (xs[i] - mx) * (ys[i] - my);
  return sum(prod) / static_cast<double>(xs.size() - 1);
}

inline double variance(std::span<const double> xs) { return covariance(xs, xs); }

inline double standard_error_of_mean(std::span<const double> xs) {
  return std::sqrt(variance(xs) / static_cast<double>(xs.size()));
}

// Standard error of the sample covariance: sd of the centered products / sqrt(R).
inline double covariance_standard_error(std::span<const double> xs, std::span<const double> ys) {
  const double mx = mean(xs), my = mean(ys);
  std::vector<double> prod(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) prod[i] = (xs[i] - mx) * (ys[i] - my);
  return standard_error_of_mean(prod);
}

// Rescales to empirical mean 0 and empirical (1/m) variance 1, so {0, 2}
// maps to {-1, 1}. Sample moments stand in for the unknown true moments.
inline std::vector<double> standardize(std::span<const double> xs) {
  if (xs.size() < 2) throw DegenerateError("standardize needs at least 2 samples");
  const double m = mean(xs);
  const double v = variance(xs) * static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size());
  if (!(v > 0.0)) throw DegenerateError("sample variance is zero");
  const double s = std::sqrt(v);
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = (xs[i] - m) / s;
  return out;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("normal quantile needs p in (0,1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

// Survival function of the limiting Kolmogorov distribution, P(K > t).
inline double kolmogorov_survival(double t) {
  if (t <= 0.0) return 1.0;
  if (t < 1.18) {
    // Jacobi-theta form, converges fast for small t.
    const double y = std::exp(-std::numbers::pi * std::numbers::pi / (8.0 * t * t));
    double s = 0.0;
    for (int j = 1; j <= 7; j += 2) s += std::pow(y, j * j);
    return 1.0 - std::sqrt(2.0 * std::numbers::pi) / t * s;
  }
  double s = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * t * t);
    s += (j % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

// Standard deviation of the limiting Kolmogorov law, sqrt(pi^2/12 - pi/2 ln^2 2).
inline double kolmogorov_sd() {
  const double l2 = std::numbers::ln2;
  return std::sqrt(std::numbers::pi * std::numbers::pi / 12.0 - 0.5 * std::numbers::pi * l2 * l2);
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  // Null-calibrated standard error of the statistic, kolmogorov_sd() / sqrt(m).
  double std_error = 0.0;
};

inline constexpr std::size_t kMinGoodnessSamples = 30;

inline double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double m = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / m - f, f - static_cast<double>(i) / m});
  }
  return d;
}

// One-sample KS test of (standardized) samples against N(0,1). The p-value
// uses the asymptotic Kolmogorov law with Stephens' finite-sample correction.
inline KsResult ks_distance_normal(std::span<const double> samples) {
  if (samples.size() < kMinGoodnessSamples)
    throw ParameterError("KS test needs at least 30 samples, got " + std::to_string(samples.size()));
  KsResult r;
  r.statistic = ks_statistic(samples, normal_cdf);
  const double rm = std::sqrt(static_cast<double>(samples.size()));
  r.p_value = kolmogorov_survival((rm + 0.12 + 0.11 / rm) * r.statistic);
  r.std_error = kolmogorov_sd() / rm;
  return r;
}

// W1 distance between the empirical measure and N(0,1):
// integral over t in (0,1) of |F_hat^{-1}(t) - Phi^{-1}(t)|, evaluated exactly
// per order statistic using  int_a^b Phi^{-1}(t) dt = phi(Phi^{-1}(a)) - phi(Phi^{-1}(b)).
inline double wasserstein1_distance_normal(std::span<const double> samples) {
  if (samples.size() < kMinGoodnessSamples)
    throw ParameterError("W1 distance needs at least 30 samples, got " + std::to_string(samples.size()));
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double m = static_cast<double>(s.size());
  // phi(Phi^{-1}(t)) with the limits t -> 0, 1 equal to 0.
  auto phi_at = [](double t) { return (t <= 0.0 || t >= 1.0) ? 0.0 : normal_pdf(normal_quantile(t)); };
  // int_a^b (x - Phi^{-1}(t)) dt
  auto signed_part = [&](double x, double a, double b) { return x * (b - a) - (phi_at(a) - phi_at(b)); };
  std::vector<double> parts(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double a = static_cast<double>(i) / m;
    const double b = static_cast<double>(i + 1) / m;
    const double c = std::clamp(normal_cdf(s[i]), a, b);
    parts[i] = signed_part(s[i], a, c) - signed_part(s[i], c, b);
  }
  return std::max(0.0, sum(parts));
}

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

// Pearson goodness of fit of non-negative integer counts to Poisson(mean).
// Cells are 0, 1, ... with the upper tail pooled; adjacent cells are merged
// until every expected count is at least 5.
inline ChiSquareResult chi_square_poisson(std::span<const std::size_t> counts, double mean) {
  if (counts.empty()) throw ParameterError("chi-square needs samples");
  if (!(mean > 0.0)) throw ParameterError("Poisson mean must be positive");
  const double total = static_cast<double>(counts.size());
  std::size_t max_c = *std::max_element(counts.begin(), counts.end());
  std::vector<double> observed(max_c + 1, 0.0);
  for (auto c : counts) observed[c] += 1.0;
  std::vector<double> prob(max_c + 1);
  double p = std::exp(-mean), acc = 0.0;
  for (std::size_t k = 0; k <= max_c; ++k) {
    prob[k] = p;
    acc += p;
    p *= mean / static_cast<double>(k + 1);
  }
  prob[max_c] += std::max(0.0, 1.0 - acc);  // upper tail into the last cell

  std::vector<double> obs_cells, exp_cells;
  double o = 0.0, e = 0.0;
  for (std::size_t k = 0; k <= max_c; ++k) {
    o += observed[k];
    e += prob[k] * total;
    if (e >= 5.0) {
      obs_cells.push_back(o);
      exp_cells.push_back(e);
      o = e = 0.0;
    }
  }
  if (e > 0.0 || o > 0.0) {
    if (exp_cells.empty()) {
      obs_cells.push_back(o);
      exp_cells.push_back(e);
    } else {
      obs_cells.back() += o;
      exp_cells.back() += e;
    }
  }
  ChiSquareResult r;
  for (std::size_t i = 0; i < obs_cells.size(); ++i) {
    const double d = obs_cells[i] - exp_cells[i];
    r.statistic += d * d / exp_cells[i];
  }
  r.dof = static_cast<int>(obs_cells.size()) - 1;
  r.p_value = r.dof > 0 ? boost::math::gamma_q(0.5 * r.dof, 0.5 * r.statistic) : 1.0;
  return r;
}

// Least-squares slope of y on x.
inline double ls_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("slope needs >= 2 paired points");
  return covariance(x, y) / variance(x);
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
  bool contains(double v) const { return lo <= v && v <= hi; }
};

// Empirical quantile with linear interpolation between order statistics.
inline double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw ParameterError("quantile of empty sample");
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

// Percentile bootstrap confidence interval for statistic(sample).
inline Interval percentile_bootstrap(std::span<const double> xs,
                                     const std::function<double(std::span<const double>)>& statistic,
                                     std::size_t resamples, std::uint64_t seed, double level = 0.95) {
  if (xs.size() < 2) throw ParameterError("bootstrap needs at least 2 samples");
  Rng rng(seed);
  std::vector<double> replicate(xs.size());
  std::vector<double> values(resamples);
  for (std::size_t b = 0; b < resamples; ++b) {
    for (auto& v : replicate) v = xs[rng.below(xs.size())];
    values[b] = statistic(replicate);
  }
  const double alpha = 0.5 * (1.0 - level);
  return {quantile(values, alpha), quantile(values, 1.0 - alpha)};
}

// Delete-one-batch jackknife standard error of estimator(rows), with rows
// split into `batches` contiguous groups.
template <class Row>
double batch_jackknife_se(std::span<const Row> rows, std::size_t batches,
                          const std::function<double(std::span<const Row>)>& estimator) {
  batches = std::min(batches, rows.size());
  if (batches < 2) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> leave_out(batches);
  std::vector<Row> kept;
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t lo = rows.size() * b / batches;
    const std::size_t hi = rows.size() * (b + 1) / batches;
    kept.clear();
    kept.insert(kept.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(lo));
    kept.insert(kept.end(), rows.begin() + static_cast<std::ptrdiff_t>(hi), rows.end());
    leave_out[b] = estimator(kept);
  }
  const double g = static_cast<double>(batches);
  const double m = mean(leave_out);
  double ss = 0.0;
  for (double v : leave_out) ss += (v - m) * (v - m);
  return std::sqrt((g - 1.0) / g * ss);
}

}  // namespace adrcm::stats
