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


#include "ilattice/baselines.hpp"
#include "ilattice/gridgen.hpp"
#include "ilattice/rng.hpp"

#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

using namespace ilat;

namespace {

MarketParams pair_market(double rho = 0.5, double v1 = 0.2, double v2 = 0.3, double rate = 0.05) {
  Eigen::MatrixXd corr(2, 2);
  corr << 1.0, rho, rho, 1.0;
  return MarketParams::from_vols(rate, Eigen::Vector2d(v1, v2), corr, Eigen::Vector2d(100.0, 100.0));
}

// P(Z1 <= a, Z2 <= b) = int_{-inf}^{a} phi(x) Phi((b - rho x) / sqrt(1 - rho^2)) dx
double bvn_quadrature(double a, double b, double rho) {
  const double s = std::sqrt(1.0 - rho * rho);
  auto f = [&](double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi) * normal_cdf((b - rho * x) / s);
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -40.0, a, 20, 1e-15);
}

}  // namespace

TEST_CASE("bivariate_normal_cdf") {
  CHECK(std::abs(bivariate_normal_cdf(8.0, 8.0, 0.3) - 1.0) < 1e-10);
  CHECK(std::abs(bivariate_normal_cdf(8.0, 8.0, -0.9) - 1.0) < 1e-10);
  for (double a : {-1.3, 0.0, 0.7})
    for (double b : {-0.4, 1.1})
      CHECK(bivariate_normal_cdf(a, b, 0.0) == doctest::Approx(normal_cdf(a) * normal_cdf(b)).epsilon(1e-12));
  CHECK(std::abs(bivariate_normal_cdf(0.0, 0.0, 0.5) - (0.25 + std::asin(0.5) / (2.0 * std::numbers::pi))) < 5e-8);
  CHECK(std::abs(bivariate_normal_cdf(0.0, 0.0, 0.5) - 1.0 / 3.0) < 5e-8);
  for (double rho : {-0.99, -0.6, -0.2, 0.3, 0.75, 0.95, 0.999})
    for (double a : {-2.5, -0.3, 0.4, 1.7})
      for (double b : {-1.9, 0.0, 2.2}) CHECK(std::abs(bivariate_normal_cdf(a, b, rho) - bvn_quadrature(a, b, rho)) < 5e-8);
  CHECK(bivariate_normal_cdf(0.5, -0.2, 1.0) == doctest::Approx(normal_cdf(-0.2)).epsilon(1e-12));
  CHECK(bivariate_normal_cdf(0.5, -0.2, -1.0) == doctest::Approx(std::max(0.0, normal_cdf(0.5) + normal_cdf(-0.2) - 1.0)));
  CHECK_THROWS_AS(bivariate_normal_cdf(0.0, 0.0, 1.01), std::domain_error);
}

TEST_CASE("stulz_european_min_put: degenerate limits") {
  // both forwards above the strike
  MarketParams flat(0.05, Eigen::MatrixXd::Identity(2, 2) * 1e-16, Eigen::Vector2d(100.0, 110.0));
  CHECK(std::abs(stulz_european_min_put(flat, 90.0, 1.0)) < 1e-8);
  // min forward below the strike
  const double expect = std::exp(-0.05) * (120.0 - 100.0 * std::exp(0.05));
  CHECK(stulz_european_min_put(flat, 120.0, 1.0) == doctest::Approx(expect).epsilon(1e-8));
  MarketParams three(0.05, Eigen::MatrixXd::Identity(3, 3) * 0.04, Eigen::VectorXd::Constant(3, 100.0));
  CHECK_THROWS_AS(stulz_european_min_put(three, 100.0, 1.0), std::domain_error);
}

TEST_CASE("stulz_european_min_put matches a 10^7-path Monte Carlo") {
  const MarketParams p = pair_market();
  const PayoffSpec spec{PayoffKind::MinPut, 100.0};
  const double formula = stulz_european_min_put(p, 100.0, 1.0);
  const Estimate mc = european_mc(p, spec, 1.0, 10000000, 2026);
  CHECK(std::abs(formula - mc.value) <= 3.0 * mc.se);
  const Estimate call = european_mc(p, {PayoffKind::MinCall, 95.0}, 1.0, 2000000, 7);
  CHECK(std::abs(stulz_call_on_min(p, 95.0, 1.0) - call.value) <= 3.0 * call.se);
}

TEST_CASE("european_mc") {
  MarketParams flat(0.05, Eigen::MatrixXd::Zero(2, 2), Eigen::Vector2d(90.0, 95.0));
  const Estimate det = european_mc(flat, {PayoffKind::MinPut, 100.0}, 1.0, 1000, 1);
  CHECK(det.value == doctest::Approx(std::exp(-0.05) * (100.0 - 90.0 * std::exp(0.05))).epsilon(1e-13));
  CHECK(det.se == 0.0);

  const PayoffSpec spec{PayoffKind::MinPut, 100.0};
  const Estimate high = european_mc(pair_market(0.8), spec, 1.0, 200000, 5);
  const Estimate low = european_mc(pair_market(0.2), spec, 1.0, 200000, 5);
  CHECK(low.value > high.value);

  const Estimate a = european_mc(pair_market(), spec, 1.0, 200000, 5, 1);
  const Estimate b = european_mc(pair_market(), spec, 1.0, 200000, 5, 4);
  CHECK(a.value == b.value);
  CHECK(a.se == b.se);
  CHECK_THROWS(european_mc(pair_market(), spec, 1.0, 10, 5));
}

TEST_CASE("lsmc_american") {
  const MarketParams p = pair_market();
  const PayoffSpec spec{PayoffKind::MinPut, 100.0};
  LsmcConfig cfg;
  cfg.n_paths = 50000;
  cfg.seed = 3;
  const TimeGrid one(1.0, 1);
  const Estimate single = lsmc_american(p, spec, one, cfg);
  const PathSet paths = simulate_paths(p, one, cfg.n_paths, mix64(cfg.seed ^ stream_tag::lsmc));
  std::vector<double> cash;
  for (int i = 0; i < cfg.n_paths; ++i) cash.push_back(std::exp(-0.05) * payoff_log(spec, paths.log_price(i, 1)));
  CHECK(single.value == doctest::Approx(mean_and_se(cash).value).epsilon(1e-12));

  MarketParams deep = MarketParams::from_vols(0.05, Eigen::Vector2d(0.2, 0.3), Eigen::Matrix2d::Identity(),
                                              Eigen::Vector2d(10.0, 12.0));
  CHECK(lsmc_american(deep, spec, TimeGrid(1.0, 8), cfg).value == 90.0);

  const Estimate am = lsmc_american(p, spec, TimeGrid(1.0, 8), cfg);
  CHECK(am.value > stulz_european_min_put(p, 100.0, 1.0));
  CHECK(lsmc_basis_size(2, 2) == 7);
  LsmcConfig tiny = cfg;
  tiny.n_paths = 50;
  CHECK_THROWS(lsmc_american(p, spec, TimeGrid(1.0, 8), tiny));
}

TEST_CASE("geo_reduce") {
  MarketParams one(0.05, Eigen::MatrixXd::Constant(1, 1, 0.09), Eigen::VectorXd::Constant(1, 50.0));
  const auto g1 = geo_reduce(one, {PayoffKind::GeoMeanPut, 50.0});
  CHECK(g1.sigma * g1.sigma == doctest::Approx(0.09));
  CHECK(std::abs(g1.delta) < 1e-15);
  CHECK(g1.spot == doctest::Approx(50.0));

  const double v = 0.04;
  const int d = 4;
  MarketParams iid(0.05, Eigen::MatrixXd::Identity(d, d) * v, Eigen::VectorXd::Constant(d, 100.0));
  const auto g = geo_reduce(iid, {PayoffKind::GeoMeanPut, 100.0});
  CHECK(g.sigma * g.sigma == doctest::Approx(v / d));
  CHECK(g.delta == doctest::Approx(v / 2.0 - v / (2.0 * d)));
  CHECK_THROWS(geo_reduce(iid, {PayoffKind::MinPut, 100.0}));
}

TEST_CASE("geo_reduce: simulated log G matches the reduced GBM moments") {
  Eigen::MatrixXd corr = Eigen::MatrixXd::Constant(5, 5, 0.3);
  corr.diagonal().setOnes();
  Eigen::VectorXd vols(5);
  vols << 0.15, 0.2, 0.25, 0.2, 0.3;
  const MarketParams p = MarketParams::from_vols(0.05, vols, corr, Eigen::VectorXd::LinSpaced(5, 90.0, 110.0));
  const auto g = geo_reduce(p, {PayoffKind::GeoMeanPut, 100.0});
  const TimeGrid tg(1.0, 1);
  const int n = 1000000;
  const PathSet paths = simulate_paths(p, tg, n, 17);
  std::vector<double> logs(n), sq(n);
  for (int i = 0; i < n; ++i) logs[static_cast<std::size_t>(i)] = paths.log_price(i, 1).mean();
  const Estimate mean = mean_and_se(logs);
  const double mu = std::log(g.spot) + (0.05 - g.delta - 0.5 * g.sigma * g.sigma);
  CHECK(std::abs(mean.value - mu) <= 3.0 * mean.se);
  for (int i = 0; i < n; ++i) sq[static_cast<std::size_t>(i)] = std::pow(logs[static_cast<std::size_t>(i)] - mu, 2);
  const Estimate var = mean_and_se(sq);
  CHECK(std::abs(var.value - g.sigma * g.sigma) <= 3.0 * var.se);
}

TEST_CASE("binomial trees") {
  // zero volatility, in the money, positive rate: immediate exercise
  CHECK(binomial_american_1d(80.0, 1e-14, 0.0, 0.05, 100.0, 1.0, 200, OptionType::Put) == doctest::Approx(20.0));

  // European tree against a Black-Scholes Monte Carlo
  MarketParams one(0.05, Eigen::MatrixXd::Constant(1, 1, 0.04), Eigen::VectorXd::Constant(1, 100.0));
  const Estimate mc = european_mc(one, {PayoffKind::GeoMeanPut, 100.0}, 1.0, 2000000, 9);
  const double tree = binomial_american_1d(100.0, 0.2, 0.0, 0.05, 100.0, 1.0, 2000, OptionType::Put, false);
  CHECK(std::abs(tree - mc.value) <= 3.0 * mc.se);

  for (double s : {80.0, 100.0, 120.0}) {
    const double am = binomial_american_1d(s, 0.25, 0.02, 0.05, 100.0, 1.0, 500, OptionType::Put);
    const double eu = binomial_american_1d(s, 0.25, 0.02, 0.05, 100.0, 1.0, 500, OptionType::Put, false);
    CHECK(am >= eu);
    const double ber = binomial_bermudan_1d(s, 0.25, 0.02, 0.05, 100.0, 1.0, 6, 100, OptionType::Put);
    CHECK(ber >= eu - 1e-3);
    CHECK(ber <= am + 1e-3);
    // one exercise date (besides t = 0) at maturity
    CHECK(binomial_bermudan_1d(s, 0.25, 0.02, 0.05, 100.0, 1.0, 1, 500, OptionType::Put) ==
          doctest::Approx(std::max(eu, s < 100.0 ? 100.0 - s : 0.0)).epsilon(2e-3));
    const double call = binomial_american_1d(s, 0.25, 0.0, 0.05, 100.0, 1.0, 500, OptionType::Call);
    CHECK(call == doctest::Approx(binomial_american_1d(s, 0.25, 0.0, 0.05, 100.0, 1.0, 500, OptionType::Call, false)));
  }
  CHECK_THROWS(binomial_1d(100.0, 0.2, 0.0, 0.05, 100.0, 1.0, 0, OptionType::Put));
}
