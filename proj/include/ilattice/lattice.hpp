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

#include "ilattice/approx.hpp"
#include "ilattice/gridgen.hpp"
#include "ilattice/model.hpp"
#include "ilattice/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace ilat {

enum class Propagation { Analytic, Cluster };
enum class DescendantScheme { Pseudo, Antithetic, Sobol };
enum class ExerciseStyle { American, European };

std::string to_string(Propagation p);
std::string to_string(DescendantScheme s);
std::string to_string(ExerciseStyle s);

struct PricerConfig {
  Propagation propagation = Propagation::Cluster;
  int n_descendants = 256;
  DescendantScheme descendant_scheme = DescendantScheme::Sobol;
  ExerciseStyle style = ExerciseStyle::American;
  FitConfig fit;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct PhaseTimings {
  double continuation_s = 0.0;
  double fit_s = 0.0;
  double total_s = 0.0;
};

struct PriceResult {
  double value0 = 0.0;
  /// Continuation surface per slice 0..m-1 (slice m is the payoff itself).
  std::vector<Surface> surfaces;
  std::vector<FitReport> fit_reports;
  /// True where the slice surface is the exact propagation of the next one
  /// rather than a fit.
  std::vector<bool> propagated;
  PayoffSpec spec;
  ExerciseStyle style = ExerciseStyle::American;
  int steps = 0;
  PhaseTimings timing;

  /// Continuation value at slice t (t < steps) and log prices x.
  template <class Derived>
  double continuation(int t, const Eigen::MatrixBase<Derived>& x) const {
    return surfaces.at(static_cast<std::size_t>(t))(x);
  }
};

/// Raised when a slice fit produces non-finite values.
class FitFailure : public std::runtime_error {
 public:
  FitFailure(int slice, FitReport report, const std::string& what)
      : std::runtime_error("fit failed at slice " + std::to_string(slice) + ": " + what),
        slice_(slice), report_(std::move(report)) {}
  int slice() const { return slice_; }
  const FitReport& report() const { return report_; }

 private:
  int slice_;
  FitReport report_;
};

/// Reusable generator of one-step descendant clouds.
class DescendantSampler {
 public:
  DescendantSampler(const MarketParams& params, double dt, int n, DescendantScheme scheme);

  int size() const { return n_; }
  /// n × d log-price states following x, drawn from `gen`.
  Eigen::MatrixXd operator()(const Eigen::VectorXd& x, Stream& gen) const;

 private:
  StepMoments moments_;
  Eigen::MatrixXd step_factor_;
  int n_;
  DescendantScheme scheme_;
  Eigen::MatrixXd sobol_;  // base net for the randomly shifted scheme
};

/// One-step descendants of x. Antithetic draws come in (xi, -xi) pairs and
/// need even n; the Sobol scheme is a randomly shifted Sobol net.
Eigen::MatrixXd descendants(const Eigen::VectorXd& x, const MarketParams& params, double dt, int n,
                            DescendantScheme scheme, std::uint64_t seed);

/// exp(-r dt) times the mean of the surface over the descendant rows.
double continuation_cluster(const Surface& surface, const Eigen::MatrixXd& descendants, double r, double dt);

/// Surface-level backward step: z -> exp(-r dt) E[surface(z + m + xi)].
Surface propagate_analytic(const Surface& surface, const MarketParams& params, double dt);

/// Backward induction over the grid. Slice m holds exercise payoffs; each
/// earlier slice gets a fitted continuation surface, and the value function
/// is max(payoff, continuation) (continuation only, in European style).
PriceResult backward_induct(const MarketParams& params, const PayoffSpec& spec, const TimeGrid& tg,
                            const Grid& grid, const PricerConfig& cfg);

/// Value at cash prices S and slice t from the stored surfaces.
double price_at(const PriceResult& result, const Eigen::VectorXd& prices, int slice);

/// Writes slice_<t>.mix files and manifest.txt into dir.
void export_price_result(const std::filesystem::path& dir, const PriceResult& result, const std::string& config_echo);

}  // namespace ilat
