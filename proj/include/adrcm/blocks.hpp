#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "adrcm/error.hpp"
#include "adrcm/stats.hpp"
#include "adrcm/trees.hpp"

namespace adrcm {

namespace detail {

using BlockRow = std::vector<double>;

inline std::vector<BlockRow> block_rows(std::span<const BlockSums> replicates) {
  if (replicates.size() < 2) throw ParameterError("need at least 2 replicates, got " + std::to_string(replicates.size()));
  const std::size_t n = replicates.front().values.size();
  std::vector<BlockRow> rows;
  rows.reserve(replicates.size());
  for (const auto& r : replicates) {
    if (r.values.size() != n) throw ParameterError("replicates disagree on block count");
    rows.emplace_back(r.values.begin(), r.values.end());
  }
  return rows;
}

// Cyclic average over i of the sample covariance of (T_i, T_{i+lag}).
inline double lag_covariance(std::span<const BlockRow> rows, std::size_t lag) {
  const std::size_t n = rows.front().size();
  const double r = static_cast<double>(rows.size());
  std::vector<double> means(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> col(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) col[k] = rows[k][i];
    means[i] = stats::mean(col);
  }
  std::vector<double> per_block(n);
  std::vector<double> prod(rows.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + lag) % n;
    for (std::size_t k = 0; k < rows.size(); ++k) prod[k] = (rows[k][i] - means[i]) * (rows[k][j] - means[j]);
    per_block[i] = stats::sum(prod) / (r - 1.0);
  }
  return stats::mean(per_block);
}

inline double cox_grimmett_value(std::span<const BlockRow> rows, std::size_t k) {
  const std::size_t n = rows.front().size();
  const std::size_t half = (n + 1) / 2;  // ceil(n/2)
  double total = 0.0;
  for (std::size_t j = k + 1; j <= half; ++j) total += lag_covariance(rows, j - 1);
  return 2.0 * total;
}

inline constexpr std::size_t kJackknifeBatches = 20;

}  // namespace detail

// Estimated Cov(T_1, T_{1+lag}) across replicates, using every cyclic pair.
// Standard error by delete-one-batch jackknife over replicates.
inline Estimate block_lag_covariance(std::span<const BlockSums> replicates, std::size_t lag) {
  const auto rows = detail::block_rows(replicates);
  Estimate e;
  e.value = detail::lag_covariance(rows, lag);
  e.std_error = stats::batch_jackknife_se<detail::BlockRow>(
      rows, detail::kJackknifeBatches,
      [lag](std::span<const detail::BlockRow> sub) { return detail::lag_covariance(sub, lag); });
  return e;
}

// Cox-Grimmett coefficient u_n(k) = 2 sum_{j=k+1}^{ceil(n/2)} Cov(T_1, T_j)
// (the cyclic form of the maximal covariance tail sum).
inline Estimate cox_grimmett(std::span<const BlockSums> replicates, std::size_t k) {
  const auto rows = detail::block_rows(replicates);
  const std::size_t n = rows.front().size();
  if (k < 1 || k > n) throw ParameterError("Cox-Grimmett lag must lie in [1, n]");
  Estimate e;
  e.value = detail::cox_grimmett_value(rows, k);
  e.std_error = stats::batch_jackknife_se<detail::BlockRow>(
      rows, detail::kJackknifeBatches,
      [k](std::span<const detail::BlockRow> sub) { return detail::cox_grimmett_value(sub, k); });
  return e;
}

// Plain sample covariance of blocks i and j (0-based) with its standard error.
inline Estimate block_pair_covariance(std::span<const BlockSums> replicates, std::size_t i, std::size_t j) {
  const auto rows = detail::block_rows(replicates);
  std::vector<double> a(rows.size()), b(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    a[k] = rows[k].at(i);
    b[k] = rows[k].at(j);
  }
  return {stats::covariance(a, b), stats::covariance_standard_error(a, b)};
}

}  // namespace adrcm
