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

#include "ilattice/model.hpp"
#include "ilattice/bounds.hpp"

#include <cstdint>

namespace ilat {

/// P(Z1 <= a, Z2 <= b) for standard normals with correlation rho.
/// Throws std::domain_error for |rho| > 1.
double bivariate_normal_cdf(double a, double b, double rho);

/// European call on min(S1, S2) with strike K >= 0 (two-asset closed form).
double stulz_call_on_min(const MarketParams& params, double strike, double maturity);

/// European put on min(S1, S2) via parity on the minimum:
/// P = K exp(-rT) - C_min(0) + C_min(K).
double stulz_european_min_put(const MarketParams& params, double strike, double maturity);

/// One-step exact Monte Carlo of the discounted terminal payoff with
/// antithetic pairs (the standard error is over pair averages).
Estimate european_mc(const MarketParams& params, const PayoffSpec& spec, double maturity, long n_paths,
                     std::uint64_t seed, int workers = 1);

struct LsmcConfig {
  int n_paths = 100000;
  /// Total degree of the polynomial basis in normalized prices.
  int degree = 2;
  std::uint64_t seed = 0;
  int workers = 1;
};

/// Number of regressors: monomials of total degree <= degree, plus the payoff.
int lsmc_basis_size(int dim, int degree);

/// Least-squares Monte Carlo on in-the-money paths with exercise dates at
/// every slice (slice 0 compares the payoff with the mean continuation).
Estimate lsmc_american(const MarketParams& params, const PayoffSpec& spec, const TimeGrid& tg,
                       const LsmcConfig& cfg);

/// One-dimensional GBM followed by the geometric mean of the assets.
struct GeoReduction {
  double sigma = 0.0;  // volatility of the geometric mean
  double delta = 0.0;  // effective dividend yield
  double spot = 0.0;   // geometric mean of the spots
};

GeoReduction geo_reduce(const MarketParams& params, const PayoffSpec& spec);

enum class OptionType { Put, Call };

/// Cox–Ross–Rubinstein tree with dividend yield; American exercise at every
/// node unless `american` is false.
double binomial_1d(double spot, double sigma, double delta, double r, double strike, double maturity, int steps,
                   OptionType type, bool american = true);

/// Exercise only at maturity * k / exercise_dates, k = 0..exercise_dates;
/// averages trees with steps_per_date and steps_per_date + 1 steps per period.
double binomial_bermudan_1d(double spot, double sigma, double delta, double r, double strike, double maturity,
                            int exercise_dates, int steps_per_date, OptionType type);

/// Average of the steps and steps + 1 trees, damping odd/even oscillation.
double binomial_american_1d(double spot, double sigma, double delta, double r, double strike, double maturity,
                            int steps, OptionType type, bool american = true);

}  // namespace ilat
