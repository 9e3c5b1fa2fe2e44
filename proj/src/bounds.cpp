/*
   Copyright 2026 The ilattice Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "ilattice/bounds.hpp"

#include "ilattice/parallel.hpp"
#include "ilattice/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ilat {
namespace {

void check_result(const PriceResult& result, const TimeGrid& tg) {
  if (result.steps != tg.steps() || static_cast<int>(result.surfaces.size()) != tg.steps())
    throw std::invalid_argument("bounds: price result does not cover every slice of the time grid");
}

bool exercise_allowed(const PriceResult& result, int slice) {
  return result.style == ExerciseStyle::American || slice == result.steps;
}

}  // namespace

Estimate mean_and_se(const std::vector<double>& samples) {
  Estimate e;
  const auto n = static_cast<double>(samples.size());
  if (samples.empty()) return e;
  double sum = 0.0;
  for (double s : samples) sum += s;
  e.value = sum / n;
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double s : samples) ss += (s - e.value) * (s - e.value);
    e.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return e;
}

double discounted_value(const PriceResult& result, const MarketParams& params, const TimeGrid& tg,
                        const Eigen::VectorXd& x, int slice) {
  const double disc = std::exp(-params.rate() * tg.time(slice));
  const double exercise = payoff_log(result.spec, x);
  if (slice == result.steps) return disc * exercise;
  const double cont = result.continuation(slice, x);
  return disc * (result.style == ExerciseStyle::American ? std::max(cont, exercise) : cont);
}

Estimate conditional_value(const PriceResult& result, const MarketParams& params, const TimeGrid& tg,
                           const Eigen::VectorXd& x, int slice, int n_inner, Stream& gen) {
  if (n_inner < 1) throw std::invalid_argument("conditional_value: n_inner must be at least 1");
  const StepMoments moments = log_step_moments(params, tg.dt());
  const Eigen::MatrixXd step_factor = params.factor() * std::sqrt(tg.dt());
  const int d = params.dim();
  const bool paired = n_inner % 2 == 0;
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(paired ? n_inner / 2 : n_inner));
  Eigen::VectorXd z(d), y(d);
  for (int k = 0; k < (paired ? n_inner / 2 : n_inner); ++k) {
    for (int j = 0; j < d; ++j) z[j] = gen.normal();
    const Eigen::VectorXd shock = step_factor * z;
    y = x + moments.mean + shock;
    double v = discounted_value(result, params, tg, y, slice + 1);
    if (paired) {
      y = x + moments.mean - shock;
      v = 0.5 * (v + discounted_value(result, params, tg, y, slice + 1));
    }
    samples.push_back(v);
  }
  return mean_and_se(samples);
}

Estimate lower_bound(const PriceResult& result, const MarketParams& params, const TimeGrid& tg,
                     const BoundsConfig& cfg) {
  check_result(result, tg);
  if (cfg.n_paths_lower < 1) throw std::invalid_argument("bounds: n_paths_lower must be at least 1");
  const PathSet paths =
      simulate_paths(params, tg, cfg.n_paths_lower, mix64(cfg.seed ^ stream_tag::lower_bound), cfg.workers);
  const int m = tg.steps();
  std::vector<double> cash(static_cast<std::size_t>(cfg.n_paths_lower));
  parallel_for(cash.size(), cfg.workers, [&](std::size_t i) {
    const int p = static_cast<int>(i);
    for (int t = 0; t < m; ++t) {
      if (!exercise_allowed(result, t)) continue;
      const auto x = paths.log_price(p, t);
      const double exercise = payoff_log(result.spec, x);
      if (exercise > 0.0 && exercise >= result.continuation(t, x)) {
        cash[i] = std::exp(-params.rate() * tg.time(t)) * exercise;
        return;
      }
    }
    cash[i] = std::exp(-params.rate() * tg.maturity()) * payoff_log(result.spec, paths.log_price(p, m));
  });
  return mean_and_se(cash);
}

MartingalePath martingale_path(const PriceResult& result, const MarketParams& params, const TimeGrid& tg,
                               const PathSet& paths, int path, int n_inner, std::uint64_t seed) {
  check_result(result, tg);
  const int m = tg.steps();
  MartingalePath out;
  out.discounted.resize(static_cast<std::size_t>(m + 1));
  out.discounted[0] = discounted_value(result, params, tg, paths.log_price(path, 0), 0);
  for (int t = 0; t < m; ++t) {
    Stream gen(seed, {stream_tag::upper_inner, static_cast<std::uint64_t>(path), static_cast<std::uint64_t>(t)});
    const Eigen::VectorXd xt = paths.log_price(path, t);
    const double expected = conditional_value(result, params, tg, xt, t, n_inner, gen).value;
    const double realized = discounted_value(result, params, tg, paths.log_price(path, t + 1), t + 1);
    out.discounted[static_cast<std::size_t>(t + 1)] = out.discounted[static_cast<std::size_t>(t)] + realized - expected;
  }
  return out;
}

Estimate upper_bound(const PriceResult& result, const MarketParams& params, const TimeGrid& tg,
                     const BoundsConfig& cfg, double* increment_mean, double* increment_se) {
  check_result(result, tg);
  if (cfg.n_paths_outer < 1) throw std::invalid_argument("bounds: n_paths_outer must be at least 1");
  if (cfg.n_inner < 2) throw std::invalid_argument("bounds: n_inner must be at least 2");
  const std::uint64_t outer_seed = mix64(cfg.seed ^ stream_tag::upper_outer);
  const PathSet paths = simulate_paths(params, tg, cfg.n_paths_outer, outer_seed, cfg.workers);
  const int m = tg.steps();
  const auto n = static_cast<std::size_t>(cfg.n_paths_outer);
  std::vector<double> dual(n);
  // Per-path average increment: slices along one path are dependent, paths are not.
  std::vector<double> increments(n);
  parallel_for(n, cfg.workers, [&](std::size_t i) {
    const int p = static_cast<int>(i);
    const auto mg = martingale_path(result, params, tg, paths, p, cfg.n_inner, outer_seed);
    double best = -std::numeric_limits<double>::infinity();
    for (int t = 0; t <= m; ++t) {
      if (!exercise_allowed(result, t)) continue;
      const double z = std::exp(-params.rate() * tg.time(t)) * payoff_log(result.spec, paths.log_price(p, t));
      best = std::max(best, z - mg.discounted[static_cast<std::size_t>(t)] + mg.discounted[0]);
    }
    dual[i] = best;
    increments[i] = (mg.discounted.back() - mg.discounted.front()) / m;
  });
  if (increment_mean || increment_se) {
    const Estimate inc = mean_and_se(increments);
    if (increment_mean) *increment_mean = inc.value;
    if (increment_se) *increment_se = inc.se;
  }
  return mean_and_se(dual);
}

BoundsResult compute_bounds(const PriceResult& result, const MarketParams& params, const TimeGrid& tg,
                            const BoundsConfig& cfg) {
  BoundsResult out;
  const Estimate lo = lower_bound(result, params, tg, cfg);
  const Estimate up = upper_bound(result, params, tg, cfg, &out.increment_mean, &out.increment_se);
  out.v_lower = lo.value;
  out.se_lower = lo.se;
  out.v_upper = up.value;
  out.se_upper = up.se;
  return out;
}

}  // namespace ilat
