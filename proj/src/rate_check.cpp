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

#include "ilattice/approx.hpp"

#include "ilattice/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ilat {

RateTable theorem_rate_check(const Mixture& target, const RateCheckOptions& opts) {
  if (!(opts.alpha > 0.0 && opts.alpha < 1.0)) throw std::invalid_argument("rate check: alpha must lie in (0, 1)");
  if (opts.max_terms < 1) throw std::invalid_argument("rate check: max_terms must be at least 1");
  const auto n_target = static_cast<Eigen::Index>(target.size());

  RateTable table;
  table.coef_mass = target.coef_mass();
  table.hypothesis_met = !opts.exclude_dictionary;
  const double K = table.coef_mass;

  // Basis: the target's own unit-norm functions, then the dictionary.
  std::vector<Term> basis;
  for (const auto& t : target.terms()) basis.push_back(t.with_weight(1.0));
  std::vector<Eigen::Index> dictionary;
  for (Eigen::Index i = 0; i < n_target; ++i) {
    if (opts.exclude_dictionary) {
      const auto& t = target[static_cast<std::size_t>(i)];
      Eigen::VectorXd c = t.center();
      c[0] += 0.75 / std::sqrt(t.precision()(0, 0));
      basis.emplace_back(1.0, 2.0 * t.precision(), std::move(c));
      dictionary.push_back(n_target + i);
    } else {
      dictionary.push_back(i);
    }
  }
  const auto n_basis = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd gram(n_basis, n_basis);
  for (Eigen::Index i = 0; i < n_basis; ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      gram(i, j) = gram(j, i) = basis_inner_product(basis[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(j)]);

  Eigen::VectorXd f = Eigen::VectorXd::Zero(n_basis);
  for (Eigen::Index i = 0; i < n_target; ++i) f[i] = target[static_cast<std::size_t>(i)].weight();
  auto norm_sq = [&](const Eigen::VectorXd& c) { return std::max(0.0, c.dot(gram * c)); };

  Eigen::VectorXd fn = Eigen::VectorXd::Zero(n_basis);
  for (int n = 1; n <= opts.max_terms; ++n) {
    const Eigen::VectorXd e = fn - f;
    const Eigen::VectorXd ge = gram * e;
    double best = norm_sq(e);
    Eigen::VectorXd best_fn = fn;
    for (Eigen::Index k : dictionary)
      for (double sign : {1.0, -1.0}) {
        // h = g - f_n with g = sign * K * phi_k
        Eigen::VectorXd h = -fn;
        h[k] += sign * K;
        const double hh = norm_sq(h);
        if (!(hh > 0.0)) continue;
        const double lambda = std::clamp(-ge.dot(h) / hh, 0.0, 1.0);
        const Eigen::VectorXd trial = fn + lambda * h;
        const double err = norm_sq(trial - f);
        if (err < best) {
          best = err;
          best_fn = trial;
        }
      }
    fn = best_fn;
    RateRow row;
    row.n = n;
    row.error_sq = norm_sq(fn - f);
    row.bound = std::pow((K + 1.0) / opts.alpha, 2) / n;
    if (row.error_sq > row.bound * (1.0 + 1e-12) + 1e-15) table.bound_holds = false;
    table.rows.push_back(row);
  }
  return table;
}

Mixture random_target(int dim, int n_terms, double coef_mass, std::uint64_t seed) {
  if (n_terms < 1) throw std::invalid_argument("random_target: n_terms must be at least 1");
  Stream gen(seed, {0x7a7e});
  Mixture out(dim);
  std::vector<double> mags(static_cast<std::size_t>(n_terms));
  for (auto& m : mags) m = 0.2 + gen.uniform();
  double total = 0.0;
  for (double m : mags) total += m;
  for (int k = 0; k < n_terms; ++k) {
    const double sign = gen.uniform() < 0.5 ? -1.0 : 1.0;
    Eigen::VectorXd c(dim);
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dim, dim);
    for (int j = 0; j < dim; ++j) {
      c[j] = 2.0 * gen.uniform() - 1.0;
      p(j, j) = std::pow(4.0, 2.0 * gen.uniform() - 1.0) * 4.0;
    }
    out.add(Term(sign * coef_mass * mags[static_cast<std::size_t>(k)] / total, std::move(p), std::move(c)));
  }
  return out;
}

}  // namespace ilat
