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

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ilat {
namespace {

double phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

template <unsigned N>
double sum_nodes(auto&& f) {
  using rule = boost::math::quadrature::gauss<double, N>;
  double s = 0.0;
  for (std::size_t i = 0; i < rule::abscissa().size(); ++i) {
    s += rule::weights()[i] * (f(rule::abscissa()[i]) + f(-rule::abscissa()[i]));
  }
  return s;
}

template <class F>
double gauss_legendre(double abs_rho, F&& f) {
  if (abs_rho < 0.3) return sum_nodes<6>(f);
  if (abs_rho < 0.75) return sum_nodes<12>(f);
  return sum_nodes<20>(f);
}

// Upper orthant P(Z1 > h, Z2 > k), after Genz (2004).
double upper_orthant(double h, double k, double r) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double abs_r = std::abs(r);
  double hk = h * k;
  double bvn = 0.0;
  if (abs_r < 0.925) {
    const double hs = 0.5 * (h * h + k * k);
    const double asr = std::asin(r);
    bvn = gauss_legendre(abs_r, [&](double x) {
      const double sn = std::sin(0.5 * asr * (x + 1.0));
      return std::exp((sn * hk - hs) / (1.0 - sn * sn));
    });
    return bvn * asr / (2.0 * two_pi) + phi(-h) * phi(-k);
  }
  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  if (abs_r < 1.0) {
    const double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    bvn = a * std::exp(-0.5 * (bs / as + hk)) * (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
    if (hk > -160.0) {
      const double b = std::sqrt(bs);
      bvn -= std::exp(-0.5 * hk) * std::sqrt(two_pi) * phi(-b / a) * b * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a *= 0.5;
    bvn += gauss_legendre(abs_r, [&](double x) {
      const double xs = (a * (x + 1.0)) * (a * (x + 1.0));
      const double rs = std::sqrt(1.0 - xs);
      const double asr = -0.5 * (bs / xs + hk);
      if (asr <= -100.0) return 0.0;
      return a * std::exp(asr) * (std::exp(-hk * xs / (2.0 * (1.0 + rs) * (1.0 + rs))) / rs - (1.0 + c * xs * (1.0 + d * xs)));
    });
    bvn = -bvn / two_pi;
  }
  if (r > 0.0) return bvn + phi(-std::max(h, k));
  bvn = -bvn;
  if (k > h) bvn += h < 0.0 ? phi(k) - phi(h) : phi(-h) - phi(-k);
  return bvn;
}

struct TwoAsset {
  double s1, s2, v1, v2, rho, r;
};

TwoAsset two_asset(const MarketParams& params) {
  if (params.dim() != 2) throw std::domain_error("stulz: requires exactly two assets");
  TwoAsset a;
  a.s1 = params.spot()[0];
  a.s2 = params.spot()[1];
  a.v1 = std::sqrt(params.covariance()(0, 0));
  a.v2 = std::sqrt(params.covariance()(1, 1));
  if (!(a.v1 > 0.0 && a.v2 > 0.0)) throw std::domain_error("stulz: volatilities must be positive");
  a.rho = std::clamp(params.covariance()(0, 1) / (a.v1 * a.v2), -1.0, 1.0);
  a.r = params.rate();
  return a;
}

}  // namespace

double bivariate_normal_cdf(double a, double b, double rho) {
  if (!(std::abs(rho) <= 1.0)) throw std::domain_error("bivariate_normal_cdf: |rho| must not exceed 1");
  return std::clamp(upper_orthant(-a, -b, rho), 0.0, 1.0);
}

double stulz_call_on_min(const MarketParams& params, double strike, double maturity) {
  const TwoAsset a = two_asset(params);
  if (!(maturity > 0.0)) throw std::domain_error("stulz: maturity must be positive");
  if (strike < 0.0) throw std::domain_error("stulz: strike must be non-negative");
  const double sq = std::sqrt(maturity);
  const double var = a.v1 * a.v1 + a.v2 * a.v2 - 2.0 * a.rho * a.v1 * a.v2;
  if (!(var > 0.0)) throw std::domain_error("stulz: spread volatility must be positive");
  const double vol = std::sqrt(var);
  const double d = (std::log(a.s1 / a.s2) + 0.5 * var * maturity) / (vol * sq);
  const double rho1 = (a.v1 - a.rho * a.v2) / vol;
  const double rho2 = (a.v2 - a.rho * a.v1) / vol;
  if (strike == 0.0) return a.s1 * phi(-d) + a.s2 * phi(d - vol * sq);
  const double y1 = (std::log(a.s1 / strike) + (a.r + 0.5 * a.v1 * a.v1) * maturity) / (a.v1 * sq);
  const double y2 = (std::log(a.s2 / strike) + (a.r + 0.5 * a.v2 * a.v2) * maturity) / (a.v2 * sq);
  return a.s1 * bivariate_normal_cdf(y1, -d, -rho1) + a.s2 * bivariate_normal_cdf(y2, d - vol * sq, -rho2) -
         strike * std::exp(-a.r * maturity) * bivariate_normal_cdf(y1 - a.v1 * sq, y2 - a.v2 * sq, a.rho);
}

double stulz_european_min_put(const MarketParams& params, double strike, double maturity) {
  if (!(strike > 0.0)) throw std::domain_error("stulz: strike must be positive");
  return strike * std::exp(-params.rate() * maturity) - stulz_call_on_min(params, 0.0, maturity) +
         stulz_call_on_min(params, strike, maturity);
}

}  // namespace ilat
