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

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace ilat {

enum class PayoffKind { MinPut, MaxPut, MinCall, MaxCall, GeoMeanPut, GeoMeanCall };

std::string to_string(PayoffKind kind);
PayoffKind payoff_kind_from_string(const std::string& name);

/// Rainbow payoff: max(f(K, S), 0) with f chosen by kind.
struct PayoffSpec {
  PayoffKind kind = PayoffKind::MinPut;
  double strike = 100.0;

  bool is_put() const {
    return kind == PayoffKind::MinPut || kind == PayoffKind::MaxPut || kind == PayoffKind::GeoMeanPut;
  }
  bool is_geometric() const {
    return kind == PayoffKind::GeoMeanPut || kind == PayoffKind::GeoMeanCall;
  }
};

/// Payoff on cash prices. Throws std::domain_error for a non-positive price.
double payoff(const PayoffSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& prices);

/// Payoff on log prices; always well defined.
template <class Derived>
double payoff_log(const PayoffSpec& spec, const Eigen::MatrixBase<Derived>& log_prices) {
  double level = 0.0;
  switch (spec.kind) {
    case PayoffKind::MinPut:
    case PayoffKind::MinCall:
      level = std::exp(log_prices.minCoeff());
      break;
    case PayoffKind::MaxPut:
    case PayoffKind::MaxCall:
      level = std::exp(log_prices.maxCoeff());
      break;
    case PayoffKind::GeoMeanPut:
    case PayoffKind::GeoMeanCall:
      level = std::exp(log_prices.mean());
      break;
  }
  const double f = spec.is_put() ? spec.strike - level : level - spec.strike;
  return f > 0.0 ? f : 0.0;
}

/// Risk-neutral multi-asset geometric Brownian motion.
///
/// The covariance of annualized log returns is stored as given and must be
/// exactly symmetric and positive semi-definite. A factor L with L Lᵀ = sigma
/// is computed once: Cholesky when it succeeds, otherwise an eigen
/// decomposition with tiny negative eigenvalues clipped to zero.
class MarketParams {
 public:
  MarketParams(double rate, Eigen::MatrixXd covariance, Eigen::VectorXd spot);

  /// Builds sigma = D C D with D = diag(vols).
  static MarketParams from_vols(double rate, const Eigen::VectorXd& vols,
                                const Eigen::MatrixXd& correlation, Eigen::VectorXd spot);

  int dim() const { return static_cast<int>(spot_.size()); }
  double rate() const { return rate_; }
  const Eigen::MatrixXd& covariance() const { return covariance_; }
  const Eigen::VectorXd& spot() const { return spot_; }
  Eigen::VectorXd log_spot() const { return spot_.array().log().matrix(); }
  /// L with L Lᵀ = covariance().
  const Eigen::MatrixXd& factor() const { return factor_; }

 private:
  double rate_;
  Eigen::MatrixXd covariance_;
  Eigen::VectorXd spot_;
  Eigen::MatrixXd factor_;
};

/// Square-root factor of a PSD matrix (Cholesky, else clipped eigen).
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& cov);

class TimeGrid {
 public:
  TimeGrid(double maturity, int steps);

  double maturity() const { return maturity_; }
  int steps() const { return steps_; }
  double dt() const { return dt_; }
  double time(int slice) const { return slice == steps_ ? maturity_ : slice * dt_; }

 private:
  double maturity_;
  int steps_;
  double dt_;
};

struct StepMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Exact mean and covariance of the log-price increment over dt.
StepMoments log_step_moments(const MarketParams& params, double dt);

/// Simulated paths stored as log prices, path-major: (path, slice, asset).
class PathSet {
 public:
  PathSet(int n_paths, int steps, int dim)
      : n_paths_(n_paths), steps_(steps), dim_(dim),
        data_(static_cast<std::size_t>(n_paths) * (steps + 1) * dim) {}

  int n_paths() const { return n_paths_; }
  int steps() const { return steps_; }
  int dim() const { return dim_; }

  Eigen::Map<const Eigen::VectorXd> log_price(int path, int slice) const {
    return Eigen::Map<const Eigen::VectorXd>(data_.data() + offset(path, slice), dim_);
  }
  Eigen::Map<Eigen::VectorXd> log_price(int path, int slice) {
    return Eigen::Map<Eigen::VectorXd>(data_.data() + offset(path, slice), dim_);
  }
  Eigen::VectorXd price(int path, int slice) const { return log_price(path, slice).array().exp().matrix(); }

 private:
  std::size_t offset(int path, int slice) const {
    return (static_cast<std::size_t>(path) * (steps_ + 1) + slice) * dim_;
  }

  int n_paths_;
  int steps_;
  int dim_;
  std::vector<double> data_;
};

/// Exact GBM paths. Path i draws from the stream keyed by (seed, i), so the
/// output does not depend on `workers`.
PathSet simulate_paths(const MarketParams& params, const TimeGrid& grid, int n_paths,
                       std::uint64_t seed, int workers = 1);

/// Advances one path by one step in place: x += mean + chol * z.
template <class Gen>
void step_log_price(Eigen::Ref<Eigen::VectorXd> x, const StepMoments& moments,
                    const Eigen::MatrixXd& step_factor, Gen& gen, Eigen::VectorXd& z) {
  for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = gen.normal();
  x += moments.mean + step_factor * z;
}

}  // namespace ilat
