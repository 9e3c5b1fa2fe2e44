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
#include "ilattice/baselines.hpp"
#include "ilattice/bounds.hpp"
#include "ilattice/lattice.hpp"
#include "ilattice/model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ilat::cli {

/// Invalid configuration; the message starts with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class Job { Price, Bounds, Benchmark, RateCheck };
std::string to_string(Job job);

struct GridSettings {
  int n_points = 4096;
  double spread = 1.5;
  /// Reference horizon of the Gaussian transform; the maturity when unset.
  std::optional<double> horizon;
  std::uint64_t sobol_skip = 1;
  std::optional<std::uint64_t> scramble_seed;
  double val_fraction = 0.2;
};

struct BenchmarkSettings {
  int mc_paths = 1000000;
  int binomial_steps = 2000;
};

struct RateCheckSettings {
  int n_targets = 20;
  int min_terms = 1;
  int max_terms_target = 5;
  double min_mass = 1.0;
  double max_mass = 5.0;
  std::vector<int> dims{1, 2, 3};
  RateCheckOptions options;
};

struct RunConfig {
  std::string name = "run";
  Job job = Job::Price;
  std::uint64_t seed = 0;
  int workers = 1;

  double rate = 0.0;
  Eigen::VectorXd spots;
  Eigen::MatrixXd covariance;
  PayoffSpec payoff;
  double maturity = 1.0;
  int steps = 1;

  GridSettings grid;
  PricerConfig pricer;  // pricer.fit holds the fit section, pricer.style the exercise style
  BoundsConfig bounds;
  LsmcConfig lsmc;
  BenchmarkSettings benchmark;
  RateCheckSettings rate_check;

  MarketParams market() const { return MarketParams(rate, covariance, spots); }
  TimeGrid time_grid() const { return TimeGrid(maturity, steps); }
};

/// Parses and validates a JSON run configuration. Each override has the form
/// "dotted.path=value" and replaces one leaf before validation; the value is
/// read as JSON when possible and as a string otherwise.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});

/// Canonical JSON of a validated configuration, with every default filled in.
std::string dump_config(const RunConfig& cfg);

/// One line of the CSV summary. Missing quantities are written as empty cells.
struct CsvRow {
  std::string instance;
  std::string method;
  double price = 0.0;
  std::optional<double> se;
  std::optional<double> lower;
  std::optional<double> lower_se;
  std::optional<double> upper;
  std::optional<double> upper_se;
  std::optional<double> gap;
};

std::string csv_header();
std::string to_csv(const std::vector<CsvRow>& rows);

struct Report {
  std::vector<CsvRow> rows;
  /// Human-readable table; carries the timings that the CSV leaves out.
  std::string text;
  /// Rate-check output uses its own CSV layout.
  std::optional<std::string> csv_override;
  int exit_code = 0;

  std::string csv() const { return csv_override ? *csv_override : to_csv(rows); }
};

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalFailure = 3, kPropertyViolation = 4 };

Grid make_grid(const RunConfig& cfg);
PricerConfig pricer_config(const RunConfig& cfg);

/// Grid, backward induction, and optionally the slice surfaces plus manifest.
Report run_price(const RunConfig& cfg, const std::optional<std::filesystem::path>& export_dir = std::nullopt);
/// IL price followed by the lower and duality upper bounds.
Report run_bounds(const RunConfig& cfg);
/// IL, bounds and every baseline that applies to the instance.
Report run_benchmark(const RunConfig& cfg);
/// Approximation-rate check on random synthetic mixtures; exit code 4 when a
/// bound fails on a target that meets the hypothesis.
Report run_rate_check(const RunConfig& cfg);

Report run_job(const RunConfig& cfg, const std::optional<std::filesystem::path>& export_dir = std::nullopt);

}  // namespace ilat::cli
