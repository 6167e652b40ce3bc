#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adrcm/cliques.hpp"
#include "adrcm/error.hpp"
#include "adrcm/io.hpp"
#include "adrcm/model.hpp"
#include "adrcm/parallel.hpp"
#include "adrcm/random.hpp"
#include "adrcm/stats.hpp"

namespace adrcm {

// Intensity of the up-neighborhood of (0, u) in infinite volume:
// integral over v in (u,1) of 2 beta u^-gamma v^(gamma-1) dv = (2 beta / gamma)(u^-gamma - 1).
inline double lambda_up(double u, const ModelParams& params) {
  if (!(u > 0.0 && u <= 1.0)) throw ParameterError("mark must lie in (0,1]");
  return 2.0 * params.beta / params.gamma * (std::pow(u, -params.gamma) - 1.0);
}

// Small-u coefficient c+ in lambda_up(u) ~ c+ u^-gamma.
inline double lambda_up_coefficient(const ModelParams& params) { return 2.0 * params.beta / params.gamma; }

// Intensity of the down-neighborhood, the same for every mark: 2 beta / (1 - gamma).
inline double lambda_down(const ModelParams& params) { return 2.0 * params.beta / (1.0 - params.gamma); }

// 1 ^ (u^gamma r)^(-1/(1-gamma)) 1{r <= 2/u}, with beta normalized to 1.
inline double s_wedge(double u, double r, double gamma) {
  if (!(u > 0.0 && u <= 1.0)) throw ParameterError("mark must lie in (0,1]");
  if (r < 0.0) throw ParameterError("distance must be non-negative");
  if (r > 2.0 / u) return 0.0;
  const double base = std::pow(u, gamma) * r;
  if (base <= 1.0) return 1.0;
  return std::min(1.0, std::pow(base, -1.0 / (1.0 - gamma)));
}

inline void require_finite_variance_regime(double gamma) {
  if (!(gamma > 0.0 && gamma < 0.5))
    throw RegimeError("requires 0 < gamma < 1/2 (finite-variance regime), got gamma = " + format_shortest(gamma));
}

// Open interval of admissible eta: 1 < eta < 2 and eta * max(2 gamma, 1 - gamma) < 1.
inline std::pair<double, double> eta_interval(double gamma) {
  require_finite_variance_regime(gamma);
  return {1.0, std::min(2.0, 1.0 / std::max(2.0 * gamma, 1.0 - gamma))};
}

inline void require_feasible_eta(double gamma, double eta) {
  const auto [lo, hi] = eta_interval(gamma);
  if (!(eta > lo && eta < hi))
    throw ParameterError("eta = " + format_shortest(eta) + " infeasible for gamma = " + format_shortest(gamma) +
                         "; feasible interval is (" + format_shortest(lo) + ", " + format_shortest(hi) + ")");
}

struct RateExponents {
  double zeta = 0.0;  // covariance convergence rate, min(1-gamma, (1-2gamma)/gamma)
  double tau = 0.0;   // max(gamma, 1-2gamma)
  double eta = 0.0;   // midpoint of the feasible eta interval
};

inline RateExponents rate_exponents(double gamma) {
  require_finite_variance_regime(gamma);
  const auto [lo, hi] = eta_interval(gamma);
  return {std::min(1.0 - gamma, (1.0 - 2.0 * gamma) / gamma), std::max(gamma, 1.0 - 2.0 * gamma), 0.5 * (lo + hi)};
}

// Half-width of the window standing in for the infinite line in Palm
// expectations at marks >= u_min: max(64, 2 beta / u_min). Up-neighbors of
// (0, u) lie within beta / u, so they are never cut.
inline double palm_half_width(const ModelParams& params, double u_min) {
  if (!(u_min > 0.0 && u_min <= 1.0)) throw ParameterError("mark must lie in (0,1]");
  return std::max(64.0, 2.0 * params.beta / u_min);
}

// Mark floor at which the up-neighborhood holds about 3000 points, clamped
// to [1e-12, 1e-3]. Sampling cost grows like u_floor^(-2 gamma).
inline double default_sigma_floor(const ModelParams& params) {
  const double f = std::pow(1.0 + 3000.0 * params.gamma / (2.0 * params.beta), -1.0 / params.gamma);
  return std::clamp(f, 1e-12, 1e-3);
}

struct SigmaOptions {
  std::size_t samples = 20000;
  // Marks below the floor are omitted; the missing mass is of order
  // u_floor^(1 - 2 gamma). Unset: default_sigma_floor(params).
  std::optional<double> u_floor;
  // Optional cap on the half-width of the q-positions; by default the full
  // support of the joint count is covered.
  std::optional<double> q_half_width;
  unsigned threads = 1;
  ProgressHook progress;
};

struct SigmaEstimate {
  enum class Method { kPalm, kDirect };

  double value = 0.0;
  double std_error = 0.0;
  Method method = Method::kPalm;
  // Palm components; they add up to value.
  double single_term = 0.0;
  double single_term_se = 0.0;
  double double_term = 0.0;
  double double_term_se = 0.0;
  // Part of the double term from q within the core width
  // 4 beta (u^-gamma + v^-gamma) of p.
  double double_term_core = 0.0;
  double u_floor = 0.0;
  double mark_exponent = 0.0;
  std::size_t samples = 0;
  std::size_t max_points = 0;
  std::string truncation_note;
};

namespace detail {

struct PalmSample {
  double single = 0.0;
  double joint = 0.0;
  double joint_core = 0.0;
  std::size_t points = 0;
};

// Mark with density (1 - a) u^-a / (1 - f^(1-a)) on (f, 1]; weight is 1 / density.
inline double draw_weighted_mark(Rng& rng, double a, double floor, double& weight) {
  const double b = 1.0 - a;
  const double fb = std::pow(floor, b);
  const double u = std::pow(fb + (1.0 - fb) * rng.uniform_open_closed(), 1.0 / b);
  weight = (1.0 - fb) * std::pow(u, a) / b;
  return u;
}

// Poisson points of the up-neighborhood region of (x, u), i.e. v in (u, 1]
// and |y - x| <= beta u^-gamma v^(gamma-1). Points for which `skip` holds are dropped.
template <class Skip>
void sample_up_region(Rng& rng, const ModelParams& params, double x, double u, std::vector<MarkedPoint>& out,
                      Skip&& skip) {
  const double g = params.gamma;
  const double ug = std::pow(u, g);
  const auto m = rng.poisson(2.0 * params.beta / g * (1.0 / ug - 1.0));
  for (std::uint64_t i = 0; i < m; ++i) {
    // v^gamma is uniform on (u^gamma, 1]
    const double v = std::pow(ug + (1.0 - ug) * rng.uniform_open_closed(), 1.0 / g);
    const double r = params.beta / ug * std::pow(v, g - 1.0);
    const MarkedPoint q{x + rng.uniform(-r, r), v};
    if (q.u > u && !skip(q)) out.push_back(q);
  }
}

// One draw of both Palm integrands. Cliques centered at p only use
// up-neighbors of p, so only the up-regions of p and q are sampled and the
// counts are exact infinite-volume values.
inline PalmSample sigma_palm_sample(const ModelParams& base, int k, int l, double floor, double a,
                                    std::optional<double> q_cap, std::uint64_t seed) {
  Rng rng(seed);
  double wu = 0.0, wv = 0.0;
  const double u = draw_weighted_mark(rng, a, floor, wu);
  const double v = draw_weighted_mark(rng, a, floor, wv);
  const double g = base.gamma;
  const double spread = std::pow(u, -g) + std::pow(v, -g);
  // Up-regions of p and q can only meet if |y| is below this bound.
  double support = base.beta * std::pow(std::max(u, v), g - 1.0) * spread;
  if (q_cap) support = std::min(support, *q_cap);
  const double core = std::min(support, 4.0 * base.beta * spread);
  // Defensive mixture: half the draws in the core, half over the support.
  const double y = rng.uniform() < 0.5 ? rng.uniform(-core, core) : rng.uniform(-support, support);
  const double density = 0.5 * (std::fabs(y) <= core ? 0.5 / core : 0.0) + 0.25 / support;

  const MarkedPoint p{0.0, u};
  const MarkedPoint q{y, v};
  // Long enough that no two sampled points are close through the wrap-around.
  const ModelParams line{g, base.beta, 4.0 * (std::fabs(y) + base.beta / u + base.beta / v) + 16.0};
  std::vector<MarkedPoint> pts;
  sample_up_region(rng, base, p.x, u, pts, [](const MarkedPoint&) { return false; });
  PalmSample s;
  const PointConfig around_p(line, pts);
  const auto ck = static_cast<double>(count_cliques_centered(around_p, p, k));
  const auto cl = k == l ? ck : static_cast<double>(count_cliques_centered(around_p, p, l));
  s.single = wu * ck * cl;
  if (u == v) return s;  // probability zero; the pair would be degenerate
  sample_up_region(rng, base, q.x, v, pts, [&](const MarkedPoint& r) { return r.u > u && connects(p, r, line); });
  const PointConfig both(line, std::move(pts));
  s.points = both.size();
  if (k > 1 || l > 1) {
    s.joint = wu * wv * static_cast<double>(count_joint_cliques(both, p, q, k, l)) / density;
    s.joint_core = std::fabs(y) <= core ? s.joint : 0.0;
  }
  return s;
}

}  // namespace detail

// Monte Carlo estimate of
//   sigma_{k,l} = int_0^1 E[C_k(u) C_l(u)] du + int_0^1 int E[C_{k,l}(u, q)] dq du.
// Marks of p = (0, u) and q = (y, v) are drawn with density proportional to
// u^(-2 gamma) above u_floor, which flattens the small-mark singularity of
// both integrands; y is drawn from a mixture of uniforms over the region where
// the joint count can be non-zero.
inline SigmaEstimate sigma_palm(const ModelParams& params, int k, int l, const SigmaOptions& options,
                                std::uint64_t seed) {
  require_finite_variance_regime(params.gamma);
  if (k < 1 || l < 1) throw ParameterError("clique sizes must be >= 1");
  if (options.samples < 2) throw ParameterError("sigma_palm needs at least 2 samples");
  const double floor = options.u_floor.value_or(default_sigma_floor(params));
  if (!(floor > 0.0 && floor < 1.0)) throw ParameterError("u_floor must lie in (0,1)");
  if (options.q_half_width && !(*options.q_half_width > 0.0))
    throw ParameterError("q-window half-width must be positive");
  SigmaEstimate est;
  est.u_floor = floor;
  est.mark_exponent = 2.0 * params.gamma;
  est.samples = options.samples;

  std::vector<detail::PalmSample> draws(options.samples);
  parallel_for(
      options.samples, options.threads,
      [&](std::size_t i) {
        draws[i] = detail::sigma_palm_sample(params, k, l, floor, est.mark_exponent, options.q_half_width,
                                             derive_seed(seed, fnv1a64("sigma_palm"), i));
      },
      options.progress);

  std::vector<double> total(draws.size()), single(draws.size()), joint(draws.size()), core(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) {
    single[i] = draws[i].single;
    joint[i] = draws[i].joint;
    core[i] = draws[i].joint_core;
    total[i] = single[i] + joint[i];
    est.max_points = std::max(est.max_points, draws[i].points);
  }
  est.single_term = stats::mean(single);
  est.single_term_se = stats::standard_error_of_mean(single);
  est.double_term = stats::mean(joint);
  est.double_term_se = stats::standard_error_of_mean(joint);
  est.value = est.single_term + est.double_term;
  est.std_error = stats::standard_error_of_mean(total);
  est.double_term_core = stats::mean(core);
  est.truncation_note = "marks below " + format_shortest(floor) + " omitted (mass of order u_floor^" +
                        format_shortest(1.0 - 2.0 * params.gamma) + "); " +
                        (options.q_half_width ? "q-positions capped at " + format_shortest(*options.q_half_width)
                                              : std::string("q-positions cover the full support"));
  return est;
}

struct GammaOptions {
  std::size_t configs = 200;   // configurations shared by every grid node
  std::size_t mark_cells = 8;  // geometric cells in [u_floor, 1] for u and v
  std::size_t offset_cells = 6;
  double u_floor = 1e-3;
  unsigned threads = 1;
};

struct GammaDiagnostics {
  Estimate gamma1;
  Estimate gamma2;
  Estimate gamma3;
  double eta = 0.0;
  int max_k = 0;
};

namespace detail {

struct MarkGrid {
  std::vector<double> nodes;
  std::vector<double> widths;
};

inline MarkGrid geometric_grid(double floor, std::size_t cells) {
  MarkGrid g;
  const double lf = std::log(floor);
  for (std::size_t i = 0; i < cells; ++i) {
    const double a = std::exp(lf * (1.0 - static_cast<double>(i) / static_cast<double>(cells)));
    const double b = std::exp(lf * (1.0 - static_cast<double>(i + 1) / static_cast<double>(cells)));
    g.nodes.push_back(std::sqrt(a * b));
    g.widths.push_back(b - a);
  }
  return g;
}

// Half-width of {y : (y, v) ~ (0, u)}, capped at the torus half-length.
inline double connection_half_width(double u, double v, const ModelParams& params) {
  const double lo = std::min(u, v), hi = std::max(u, v);
  const double w = params.beta * std::pow(lo, -params.gamma) * std::pow(hi, params.gamma - 1.0);
  return std::min(w, 0.5 * params.torus_length);
}

}  // namespace detail

// Monte Carlo versions of the three integrals bounding the normal
// approximation error for clique counts of sizes 1..max_k. First and second
// differences are sampled on a fixed (u, v, y) grid over shared
// configurations; the q-integral is restricted to the connection region of
// (0, u), outside of which second differences vanish. Standard errors come
// from a delete-one-batch jackknife over configurations. Intended for
// trends across n, not for tight numerics.
inline GammaDiagnostics gamma_diagnostics(const ModelParams& params, double eta, int max_k,
                                          const GammaOptions& options, std::uint64_t seed) {
  params.validate();
  require_feasible_eta(params.gamma, eta);
  if (max_k < 1) throw ParameterError("max_k must be >= 1");
  if (options.configs < 2 || options.mark_cells < 1 || options.offset_cells < 1)
    throw ParameterError("gamma_diagnostics needs >= 2 configurations and non-empty grids");
  const auto grid = detail::geometric_grid(options.u_floor, options.mark_cells);
  const std::size_t G = grid.nodes.size(), Y = options.offset_cells, K = static_cast<std::size_t>(max_k);

  // Per configuration: first differences [a][k] and second differences [a][b][c][k].
  struct Row {
    std::vector<double> d1;
    std::vector<double> d2;
  };
  auto d1_at = [&](std::size_t a, std::size_t k) { return a * K + k; };
  auto d2_at = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t k) {
    return ((a * G + b) * Y + c) * K + k;
  };
  std::vector<Row> rows(options.configs);
  parallel_for(options.configs, options.threads, [&](std::size_t j) {
    const PointConfig config = sample_config(params, derive_seed(seed, fnv1a64("gamma_diagnostics"), j));
    Row row{std::vector<double>(G * K), std::vector<double>(G * G * Y * K)};
    for (std::size_t a = 0; a < G; ++a) {
      const MarkedPoint p{0.0, grid.nodes[a]};
      const auto counts = cliques_through_upto(config, p, max_k);
      for (std::size_t k = 0; k < K; ++k) row.d1[d1_at(a, k)] = static_cast<double>(counts[k + 1]);
      const auto p_neighbors = config.neighbors(p);
      for (std::size_t b = 0; b < G; ++b) {
        const double w = detail::connection_half_width(grid.nodes[a], grid.nodes[b], params);
        for (std::size_t c = 0; c < Y; ++c) {
          const MarkedPoint q{-w + (static_cast<double>(c) + 0.5) * 2.0 * w / static_cast<double>(Y), grid.nodes[b]};
          if (b == a) {
            // Same mark as p: shift by a relative 1e-12 to keep marks distinct.
            const auto pair = cliques_through_pair_upto(config, p, p_neighbors, {q.x, q.u * (1.0 + 1e-12)}, max_k);
            for (std::size_t k = 0; k < K; ++k) row.d2[d2_at(a, b, c, k)] = static_cast<double>(pair[k + 1]);
            continue;
          }
          const auto pair = cliques_through_pair_upto(config, p, p_neighbors, q, max_k);
          for (std::size_t k = 0; k < K; ++k) row.d2[d2_at(a, b, c, k)] = static_cast<double>(pair[k + 1]);
        }
      }
    }
    rows[j] = std::move(row);
  });

  auto evaluate = [&](std::span<const Row> sample) -> std::array<double, 3> {
    const double m = static_cast<double>(sample.size());
    std::vector<double> mom_eta1(G * K, 0.0), mom_2eta_first(G * K, 0.0), mom_2eta_second(G * G * Y * K, 0.0);
    for (const auto& r : sample) {
      for (std::size_t i = 0; i < G * K; ++i) {
        mom_eta1[i] += std::pow(r.d1[i], eta + 1.0) / m;
        mom_2eta_first[i] += std::pow(r.d1[i], 2.0 * eta) / m;
      }
      for (std::size_t i = 0; i < r.d2.size(); ++i) {
        if (r.d2[i] > 0.0) mom_2eta_second[i] += std::pow(r.d2[i], 2.0 * eta) / m;
      }
    }
    double g1 = 0.0, g2 = 0.0, g3 = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t l = 0; l < K; ++l) {
        for (std::size_t a = 0; a < G; ++a) {
          const double du = grid.widths[a];
          g3 += du * std::pow(mom_eta1[d1_at(a, k)], 1.0 / (eta + 1.0)) *
                std::pow(mom_eta1[d1_at(a, l)], 1.0 - 1.0 / (eta + 1.0));
          double inner1 = 0.0, inner2 = 0.0;
          for (std::size_t b = 0; b < G; ++b) {
            const double w = detail::connection_half_width(grid.nodes[a], grid.nodes[b], params);
            const double cell = grid.widths[b] * 2.0 * w / static_cast<double>(Y);
            for (std::size_t c = 0; c < Y; ++c) {
              const double second_l = std::pow(mom_2eta_second[d2_at(a, b, c, l)], 1.0 / (2.0 * eta));
              const double second_k = std::pow(mom_2eta_second[d2_at(a, b, c, k)], 1.0 / (2.0 * eta));
              inner1 += cell * std::pow(mom_2eta_first[d1_at(b, k)], 1.0 / (2.0 * eta)) * second_l;
              inner2 += cell * second_k * second_l;
            }
          }
          g1 += du * std::pow(inner1, eta);
          g2 += du * std::pow(inner2, eta);
        }
      }
    }
    return {g1, g2, g3};
  };

  GammaDiagnostics out;
  out.eta = eta;
  out.max_k = max_k;
  const auto full = evaluate(rows);
  std::array<Estimate*, 3> slots{&out.gamma1, &out.gamma2, &out.gamma3};
  for (std::size_t i = 0; i < 3; ++i) {
    slots[i]->value = full[i];
    slots[i]->std_error = stats::batch_jackknife_se<Row>(
        rows, 10, [&](std::span<const Row> sub) { return evaluate(sub)[i]; });
  }
  return out;
}

}  // namespace adrcm
