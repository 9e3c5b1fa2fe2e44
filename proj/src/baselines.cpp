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

#include "ilattice/parallel.hpp"
#include "ilattice/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ilat {
namespace {

constexpr long kPairsPerChunk = 4096;

// Exponents of every monomial of total degree <= degree in `dim` variables,
// in graded lexicographic order starting with the constant.
std::vector<std::vector<int>> monomials(int dim, int degree) {
  std::vector<std::vector<int>> out;
  for (int total = 0; total <= degree; ++total) {
    std::vector<int> cur(static_cast<std::size_t>(dim), 0);
    auto rec = [&](auto&& self, int pos, int left) -> void {
      if (pos == dim - 1) {
        cur[static_cast<std::size_t>(pos)] = left;
        out.push_back(cur);
        return;
      }
      for (int k = left; k >= 0; --k) {
        cur[static_cast<std::size_t>(pos)] = k;
        self(self, pos + 1, left - k);
      }
    };
    rec(rec, 0, total);
  }
  return out;
}

}  // namespace

Estimate european_mc(const MarketParams& params, const PayoffSpec& spec, double maturity, long n_paths,
                     std::uint64_t seed, int workers) {
  if (n_paths < 100) throw std::invalid_argument("european_mc: n_paths must be at least 100");
  if (!(maturity > 0.0)) throw std::invalid_argument("european_mc: maturity must be positive");
  const int d = params.dim();
  const StepMoments mom = log_step_moments(params, maturity);
  const Eigen::MatrixXd factor = params.factor() * std::sqrt(maturity);
  const Eigen::VectorXd drift = params.log_spot() + mom.mean;
  const double disc = std::exp(-params.rate() * maturity);

  const long n_pairs = (n_paths + 1) / 2;
  const long n_chunks = (n_pairs + kPairsPerChunk - 1) / kPairsPerChunk;
  std::vector<double> sums(static_cast<std::size_t>(n_chunks)), squares(static_cast<std::size_t>(n_chunks));
  parallel_for(static_cast<std::size_t>(n_chunks), workers, [&](std::size_t c) {
    Stream gen(seed, {stream_tag::european_mc, c});
    const long lo = static_cast<long>(c) * kPairsPerChunk;
    const long hi = std::min(n_pairs, lo + kPairsPerChunk);
    Eigen::VectorXd z(d);
    double s = 0.0, ss = 0.0;
    for (long i = lo; i < hi; ++i) {
      for (int j = 0; j < d; ++j) z[j] = gen.normal();
      const Eigen::VectorXd shock = factor * z;
      const double v = 0.5 * disc * (payoff_log(spec, drift + shock) + payoff_log(spec, drift - shock));
      s += v;
      ss += v * v;
    }
    sums[c] = s;
    squares[c] = ss;
  });
  double s = 0.0, ss = 0.0;
  for (std::size_t c = 0; c < sums.size(); ++c) {
    s += sums[c];
    ss += squares[c];
  }
  const double n = static_cast<double>(n_pairs);
  Estimate e;
  e.value = s / n;
  e.se = std::sqrt(std::max(0.0, ss / n - e.value * e.value) / (n - 1.0));
  return e;
}

int lsmc_basis_size(int dim, int degree) { return static_cast<int>(monomials(dim, degree).size()) + 1; }

Estimate lsmc_american(const MarketParams& params, const PayoffSpec& spec, const TimeGrid& tg,
                       const LsmcConfig& cfg) {
  const int d = params.dim();
  if (cfg.degree < 1) throw std::invalid_argument("lsmc: degree must be at least 1");
  const auto terms = monomials(d, cfg.degree);
  const int n_basis = static_cast<int>(terms.size()) + 1;
  if (cfg.n_paths < 10 * n_basis)
    throw std::invalid_argument("lsmc: n_paths must be at least 10x the basis size (" + std::to_string(10 * n_basis) + ")");

  const PathSet paths = simulate_paths(params, tg, cfg.n_paths, mix64(cfg.seed ^ stream_tag::lsmc), cfg.workers);
  const int m = tg.steps();
  const double dt = tg.dt();
  const double r = params.rate();
  const Eigen::VectorXd inv_spot = params.spot().cwiseInverse();

  std::vector<double> cash(static_cast<std::size_t>(cfg.n_paths));
  std::vector<int> stop(static_cast<std::size_t>(cfg.n_paths), m);
  for (int p = 0; p < cfg.n_paths; ++p) cash[static_cast<std::size_t>(p)] = payoff_log(spec, paths.log_price(p, m));

  for (int t = m - 1; t >= 1; --t) {
    std::vector<int> itm;
    std::vector<double> exercise;
    for (int p = 0; p < cfg.n_paths; ++p) {
      const double e = payoff_log(spec, paths.log_price(p, t));
      if (e > 0.0) {
        itm.push_back(p);
        exercise.push_back(e);
      }
    }
    if (static_cast<int>(itm.size()) < n_basis) continue;
    const auto rows = static_cast<Eigen::Index>(itm.size());
    Eigen::MatrixXd X(rows, n_basis);
    Eigen::VectorXd Y(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const int p = itm[static_cast<std::size_t>(i)];
      const Eigen::VectorXd s = paths.price(p, t).cwiseProduct(inv_spot);
      for (std::size_t k = 0; k < terms.size(); ++k) {
        double v = 1.0;
        for (int j = 0; j < d; ++j) v *= std::pow(s[j], terms[k][static_cast<std::size_t>(j)]);
        X(i, static_cast<Eigen::Index>(k)) = v;
      }
      X(i, n_basis - 1) = exercise[static_cast<std::size_t>(i)] / spec.strike;
      Y[i] = cash[static_cast<std::size_t>(p)] * std::exp(-r * dt * (stop[static_cast<std::size_t>(p)] - t));
    }
    // Column-pivoted QR drops numerically dependent regressors.
    const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(Y);
    const Eigen::VectorXd fitted = X * beta;
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (exercise[static_cast<std::size_t>(i)] >= fitted[i]) {
        const auto p = static_cast<std::size_t>(itm[static_cast<std::size_t>(i)]);
        cash[p] = exercise[static_cast<std::size_t>(i)];
        stop[p] = t;
      }
    }
  }

  std::vector<double> discounted(cash.size());
  for (std::size_t p = 0; p < cash.size(); ++p) discounted[p] = cash[p] * std::exp(-r * dt * stop[p]);
  Estimate e = mean_and_se(discounted);
  const double immediate = payoff(spec, params.spot());
  if (immediate > 0.0 && immediate >= e.value) {
    e.value = immediate;
    e.se = 0.0;
  }
  return e;
}

GeoReduction geo_reduce(const MarketParams& params, const PayoffSpec& spec) {
  if (!spec.is_geometric()) throw std::invalid_argument("geo_reduce: payoff must be a geometric-mean kind");
  const double d = params.dim();
  const auto& cov = params.covariance();
  GeoReduction g;
  const double var = cov.sum() / (d * d);
  g.sigma = std::sqrt(var);
  g.delta = cov.diagonal().sum() / (2.0 * d) - 0.5 * var;
  g.spot = std::exp(params.log_spot().mean());
  return g;
}

namespace {

// Exercise is checked at nodes whose step index is a multiple of
// exercise_every (0: never).
double binomial_tree(double spot, double sigma, double delta, double r, double strike, double maturity, int steps,
                     OptionType type, int exercise_every) {
  if (steps < 1) throw std::invalid_argument("binomial: steps must be at least 1");
  const double dt = maturity / steps;
  const double growth = std::exp((r - delta) * dt);
  double up, down, p;
  if (sigma * std::sqrt(dt) < 1e-12) {
    // Zero volatility: every node follows the forward.
    up = down = growth;
    p = 1.0;
  } else {
    up = std::exp(sigma * std::sqrt(dt));
    down = 1.0 / up;
    p = (growth - down) / (up - down);
  }
  const double disc = std::exp(-r * dt);
  auto intrinsic = [&](double s) { return std::max(type == OptionType::Put ? strike - s : s - strike, 0.0); };

  std::vector<double> v(static_cast<std::size_t>(steps + 1));
  for (int j = 0; j <= steps; ++j)
    v[static_cast<std::size_t>(j)] = intrinsic(spot * std::pow(up, j) * std::pow(down, steps - j));
  for (int i = steps - 1; i >= 0; --i) {
    for (int j = 0; j <= i; ++j) {
      double cont = disc * (p * v[static_cast<std::size_t>(j + 1)] + (1.0 - p) * v[static_cast<std::size_t>(j)]);
      if (exercise_every > 0 && i % exercise_every == 0)
        cont = std::max(cont, intrinsic(spot * std::pow(up, j) * std::pow(down, i - j)));
      v[static_cast<std::size_t>(j)] = cont;
    }
  }
  return v[0];
}

}  // namespace

double binomial_1d(double spot, double sigma, double delta, double r, double strike, double maturity, int steps,
                   OptionType type, bool american) {
  return binomial_tree(spot, sigma, delta, r, strike, maturity, steps, type, american ? 1 : 0);
}

double binomial_bermudan_1d(double spot, double sigma, double delta, double r, double strike, double maturity,
                            int exercise_dates, int steps_per_date, OptionType type) {
  if (exercise_dates < 1 || steps_per_date < 1)
    throw std::invalid_argument("binomial: exercise_dates and steps_per_date must be at least 1");
  const auto price = [&](int per) {
    return binomial_tree(spot, sigma, delta, r, strike, maturity, exercise_dates * per, type, per);
  };
  return 0.5 * (price(steps_per_date) + price(steps_per_date + 1));
}

double binomial_american_1d(double spot, double sigma, double delta, double r, double strike, double maturity,
                            int steps, OptionType type, bool american) {
  return 0.5 * (binomial_1d(spot, sigma, delta, r, strike, maturity, steps, type, american) +
                binomial_1d(spot, sigma, delta, r, strike, maturity, steps + 1, type, american));
}

}  // namespace ilat
