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

#include "ilattice/gridgen.hpp"

#include "ilattice/rng.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/random/sobol.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ilat {

int sobol_max_dimension() {
  return static_cast<int>(boost::random::default_sobol_table::max_dimension);
}

Eigen::MatrixXd sobol_sequence(const SobolConfig& cfg, int n) {
  if (n < 1) throw std::invalid_argument("sobol_sequence: n must be at least 1");
  const int d = cfg.dimension;
  if (d < 1 || d > sobol_max_dimension())
    throw std::invalid_argument("sobol_sequence: dimension " + std::to_string(d) +
                                " outside supported range [1, " + std::to_string(sobol_max_dimension()) + "]");

  std::vector<std::uint64_t> shift(d, 0);
  if (cfg.scramble_seed) {
    Stream gen(*cfg.scramble_seed, {stream_tag::scramble});
    for (auto& s : shift) s = gen();
  }

  // The engine starts at index 1, so index 0 (the origin) is emitted by hand.
  boost::random::sobol engine(static_cast<std::size_t>(d));
  int row = 0;
  Eigen::MatrixXd out(n, d);
  if (cfg.skip == 0) {
    for (int j = 0; j < d; ++j) out(0, j) = static_cast<double>(shift[j] >> 11) * 0x1.0p-53;
    row = 1;
  } else if (cfg.skip > 1) {
    engine.seed(cfg.skip - 1);
  }
  for (; row < n; ++row)
    for (int j = 0; j < d; ++j) out(row, j) = static_cast<double>((engine() ^ shift[j]) >> 11) * 0x1.0p-53;
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double inverse_normal_cdf(double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("inverse_normal_cdf: u must lie in (0, 1)");
  // Evaluate on the nearer tail so that 1 - u does not lose digits.
  if (u > 0.5) return std::sqrt(2.0) * boost::math::erfc_inv(2.0 * (1.0 - u));
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
}

Grid build_grid(const MarketParams& params, double horizon, double spread, int n,
                const SobolConfig& cfg) {
  const int d = params.dim();
  if (!(horizon > 0.0)) throw std::invalid_argument("grid: horizon must be positive");
  if (!(spread > 0.0)) throw std::invalid_argument("grid: spread must be positive");
  if (n < d + 2) throw std::invalid_argument("grid: n_points must be at least d + 2 = " + std::to_string(d + 2));
  if (cfg.dimension != d) throw std::invalid_argument("grid: sobol dimension must equal market dimension");

  const Eigen::MatrixXd u = sobol_sequence(cfg, n);
  const Eigen::MatrixXd z = u.unaryExpr([](double v) { return inverse_normal_cdf(v); });

  Grid g;
  g.center = params.log_spot() +
             ((params.rate() - 0.5 * params.covariance().diagonal().array()) * horizon).matrix();
  g.transform = spread * std::sqrt(horizon) * params.factor();
  g.points = (z * g.transform.transpose()).rowwise() + g.center.transpose();
  g.train_idx.resize(n);
  std::iota(g.train_idx.begin(), g.train_idx.end(), 0);
  return g;
}

Grid split(Grid grid, double val_fraction, std::uint64_t seed) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0))
    throw std::invalid_argument("split: val_fraction must lie in (0, 1)");
  const int n = grid.size();
  // nearbyint under the default rounding mode rounds half to even.
  const int n_val = static_cast<int>(std::nearbyint(val_fraction * n));

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Stream gen(seed, {stream_tag::split});
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(gen.uniform() * (i + 1));
    std::swap(order[i], order[std::min(j, i)]);
  }
  grid.val_idx.assign(order.begin(), order.begin() + n_val);
  grid.train_idx.assign(order.begin() + n_val, order.end());
  std::sort(grid.val_idx.begin(), grid.val_idx.end());
  std::sort(grid.train_idx.begin(), grid.train_idx.end());
  return grid;
}

void write_grid_csv(std::ostream& out, const Grid& grid, const GridMetadata& meta) {
  out << "# ilattice-grid v1 n=" << grid.size() << " d=" << grid.dim() << std::setprecision(17)
      << " horizon=" << meta.horizon << " spread=" << meta.spread << " skip=" << meta.skip << '\n';
  for (int j = 0; j < grid.dim(); ++j) out << (j ? "," : "") << 'x' << j;
  out << '\n';
  for (int i = 0; i < grid.size(); ++i) {
    for (int j = 0; j < grid.dim(); ++j) out << (j ? "," : "") << grid.points(i, j);
    out << '\n';
  }
}

Grid read_grid_csv(std::istream& in, GridMetadata* meta) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ilattice-grid v1", 0) != 0)
    throw std::runtime_error("grid csv: missing '# ilattice-grid v1' metadata line");
  int n = -1, d = -1;
  GridMetadata md;
  {
    std::istringstream fields(line.substr(18));
    std::string kv;
    while (fields >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
      if (key == "n") n = std::stoi(value);
      else if (key == "d") d = std::stoi(value);
      else if (key == "horizon") md.horizon = std::stod(value);
      else if (key == "spread") md.spread = std::stod(value);
      else if (key == "skip") md.skip = std::stoull(value);
    }
  }
  if (n < 1 || d < 1) throw std::runtime_error("grid csv: metadata must carry n and d");
  std::getline(in, line);  // column names
  Grid g;
  g.points.resize(n, d);
  for (int i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw std::runtime_error("grid csv: expected " + std::to_string(n) + " rows");
    std::istringstream row(line);
    std::string cell;
    for (int j = 0; j < d; ++j) {
      if (!std::getline(row, cell, ',')) throw std::runtime_error("grid csv: short row " + std::to_string(i));
      g.points(i, j) = std::stod(cell);
    }
  }
  if (!g.points.allFinite()) throw std::runtime_error("grid csv: non-finite coordinate");
  g.train_idx.resize(n);
  std::iota(g.train_idx.begin(), g.train_idx.end(), 0);
  if (meta) *meta = md;
  return g;
}

}  // namespace ilat
