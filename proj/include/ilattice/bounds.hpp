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

#pragma once

#include "ilattice/lattice.hpp"
#include "ilattice/model.hpp"

#include <cstdint>
#include <vector>

namespace ilat {

struct BoundsConfig {
  int n_paths_lower = 20000;
  int n_paths_outer = 2000;
  int n_inner = 64;
  std::uint64_t seed = 0;
  int workers = 1;
};

/// Sample mean with its standard error.
struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

Estimate mean_and_se(const std::vector<double>& samples);

struct BoundsResult {
  double v_lower = 0.0;
  double se_lower = 0.0;
  double v_upper = 0.0;
  double se_upper = 0.0;
  /// Mean one-step increment of the discounted martingale over paths and
  /// slices; the standard error treats each path as one observation.
  double increment_mean = 0.0;
  double increment_se = 0.0;

  double gap() const { return v_upper - v_lower; }
};

/// Discounted value process exp(-r t) max(continuation, payoff) along the
/// surfaces of `result` (continuation only before maturity in European style,
/// the payoff at maturity).
double discounted_value(const PriceResult& result, const MarketParams& params, const TimeGrid& tg,
                        const Eigen::VectorXd& x, int slice);

/// Inner Monte Carlo estimate of E[discounted_value(x_{t+1}, t+1) | x_t = x].
/// Even counts use antithetic pairs.
Estimate conditional_value(const PriceResult& result, const MarketParams& params, const TimeGrid& tg,
                           const Eigen::VectorXd& x, int slice, int n_inner, Stream& gen);

/// Lower bound from the stopping rule "exercise when payoff > 0 and payoff
/// >= continuation", with terminal exercise for paths that never stop.
Estimate lower_bound(const PriceResult& result, const MarketParams& params, const TimeGrid& tg,
                     const BoundsConfig& cfg);

/// Discounted martingale D_t = exp(-r t) M_t along one path:
/// D_0 = discounted_value(x_0, 0), D_{t+1} = D_t + V(x_{t+1}) - E_t V(x_{t+1}).
struct MartingalePath {
  std::vector<double> discounted;
};

MartingalePath martingale_path(const PriceResult& result, const MarketParams& params, const TimeGrid& tg,
                               const PathSet& paths, int path, int n_inner, std::uint64_t seed);

/// Duality upper bound mean over paths of max_t [exp(-r t) payoff(x_t) - D_t + D_0].
Estimate upper_bound(const PriceResult& result, const MarketParams& params, const TimeGrid& tg,
                     const BoundsConfig& cfg, double* increment_mean = nullptr, double* increment_se = nullptr);

BoundsResult compute_bounds(const PriceResult& result, const MarketParams& params, const TimeGrid& tg,
                            const BoundsConfig& cfg);

}  // namespace ilat
