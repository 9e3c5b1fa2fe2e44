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

#include "ilattice/model.hpp"

#include "ilattice/parallel.hpp"
#include "ilattice/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace ilat {

std::string to_string(PayoffKind kind) {
  switch (kind) {
    case PayoffKind::MinPut: return "min_put";
    case PayoffKind::MaxPut: return "max_put";
    case PayoffKind::MinCall: return "min_call";
    case PayoffKind::MaxCall: return "max_call";
    case PayoffKind::GeoMeanPut: return "geo_mean_put";
    case PayoffKind::GeoMeanCall: return "geo_mean_call";
  }
  return "unknown";
}

PayoffKind payoff_kind_from_string(const std::string& name) {
  for (auto k : {PayoffKind::MinPut, PayoffKind::MaxPut, PayoffKind::MinCall, PayoffKind::MaxCall,
                 PayoffKind::GeoMeanPut, PayoffKind::GeoMeanCall})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown payoff kind '" + name + "'");
}

double payoff(const PayoffSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& prices) {
  if (prices.size() == 0 || (prices.array() <= 0.0).any())
    throw std::domain_error("payoff: prices must be positive");
  return payoff_log(spec, prices.array().log().matrix());
}

Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().allFinite())
    return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * lambda.cwiseSqrt().asDiagonal();
}

MarketParams::MarketParams(double rate, Eigen::MatrixXd covariance, Eigen::VectorXd spot)
    : rate_(rate), covariance_(std::move(covariance)), spot_(std::move(spot)) {
  const auto d = spot_.size();
  if (d < 1) throw std::invalid_argument("market: dimension must be at least 1");
  if (covariance_.rows() != d || covariance_.cols() != d)
    throw std::invalid_argument("market: covariance must be " + std::to_string(d) + "x" + std::to_string(d));
  if (!std::isfinite(rate_)) throw std::invalid_argument("market: rate must be finite");
  if (!covariance_.allFinite()) throw std::invalid_argument("market: covariance must be finite");
  if ((spot_.array() <= 0.0).any() || !spot_.allFinite())
    throw std::invalid_argument("market: spots must be positive");
  if (covariance_ != covariance_.transpose()) throw std::invalid_argument("market: covariance must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance_, Eigen::EigenvaluesOnly);
  const double top = eig.eigenvalues().maxCoeff();
  if (eig.eigenvalues().minCoeff() < -1e-10 * std::max(top, 0.0))
    throw std::invalid_argument("market: covariance is not positive semi-definite");
  factor_ = psd_factor(covariance_);
}

MarketParams MarketParams::from_vols(double rate, const Eigen::VectorXd& vols,
                                     const Eigen::MatrixXd& correlation, Eigen::VectorXd spot) {
  const auto d = vols.size();
  if (correlation.rows() != d || correlation.cols() != d)
    throw std::invalid_argument("market: correlation must be " + std::to_string(d) + "x" + std::to_string(d));
  Eigen::MatrixXd cov = vols.asDiagonal() * correlation * vols.asDiagonal();
  // D C D is symmetric in exact arithmetic; enforce it bitwise.
  cov = (0.5 * (cov + cov.transpose())).eval();
  return MarketParams(rate, std::move(cov), std::move(spot));
}

TimeGrid::TimeGrid(double maturity, int steps) : maturity_(maturity), steps_(steps) {
  if (!(maturity > 0.0)) throw std::invalid_argument("time: maturity must be positive");
  if (steps < 1) throw std::invalid_argument("time: steps must be at least 1");
  dt_ = maturity / steps;
}

StepMoments log_step_moments(const MarketParams& params, double dt) {
  if (!(dt > 0.0)) throw std::domain_error("log_step_moments: dt must be positive");
  StepMoments m;
  m.mean = ((params.rate() - 0.5 * params.covariance().diagonal().array()) * dt).matrix();
  m.cov = params.covariance() * dt;
  return m;
}

PathSet simulate_paths(const MarketParams& params, const TimeGrid& grid, int n_paths,
                       std::uint64_t seed, int workers) {
  if (n_paths < 1) throw std::invalid_argument("simulate_paths: n_paths must be at least 1");
  const int d = params.dim();
  const int m = grid.steps();
  const StepMoments moments = log_step_moments(params, grid.dt());
  const Eigen::MatrixXd step_factor = params.factor() * std::sqrt(grid.dt());
  const Eigen::VectorXd x0 = params.log_spot();
  PathSet paths(n_paths, m, d);
  parallel_for(static_cast<std::size_t>(n_paths), workers, [&](std::size_t i) {
    const int p = static_cast<int>(i);
    Stream gen(seed, {stream_tag::paths, i});
    Eigen::VectorXd x = x0;
    Eigen::VectorXd z(d);
    paths.log_price(p, 0) = x;
    for (int t = 1; t <= m; ++t) {
      step_log_price(x, moments, step_factor, gen, z);
      paths.log_price(p, t) = x;
    }
  });
  return paths;
}

}  // namespace ilat
