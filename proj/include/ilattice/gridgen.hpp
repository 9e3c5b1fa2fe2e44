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

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace ilat {

/// Largest dimension covered by the direction-number table.
int sobol_max_dimension();

struct SobolConfig {
  int dimension = 1;
  /// Points discarded from the start of the sequence. Index 0 is the
  /// all-zero point, which the Gaussian transform cannot map.
  std::uint64_t skip = 1;
  /// Random digital shift applied to every coordinate when set.
  std::optional<std::uint64_t> scramble_seed;
};

/// n × d matrix of Sobol points in [0, 1)^d (Joe–Kuo direction numbers).
Eigen::MatrixXd sobol_sequence(const SobolConfig& cfg, int n);

double normal_cdf(double x);

/// Standard normal quantile. Throws std::domain_error outside (0, 1).
double inverse_normal_cdf(double u);

/// Irregular grid of log-price points with a train/validation partition.
struct Grid {
  Eigen::MatrixXd points;  // n × d
  std::vector<int> train_idx;
  std::vector<int> val_idx;
  /// Affine map used to build the points: x = transform * z + center.
  Eigen::VectorXd center;
  Eigen::MatrixXd transform;

  int size() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
};

/// Sobol points pushed through the inverse normal CDF and the affine map
/// onto the risk-neutral log-price law at `horizon`, widened by `spread`.
/// The grid is returned with every point in the training set.
Grid build_grid(const MarketParams& params, double horizon, double spread, int n,
                const SobolConfig& cfg);

/// Seeded random partition with |val| = round-half-even(val_fraction * n).
Grid split(Grid grid, double val_fraction, std::uint64_t seed);

struct GridMetadata {
  double horizon = 0.0;
  double spread = 0.0;
  std::uint64_t skip = 0;
};

/// CSV: one metadata comment line, a header of column names, one row per point.
void write_grid_csv(std::ostream& out, const Grid& grid, const GridMetadata& meta);
Grid read_grid_csv(std::istream& in, GridMetadata* meta = nullptr);

}  // namespace ilat
