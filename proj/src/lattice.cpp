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

#include "ilattice/lattice.hpp"

#include "ilattice/parallel.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace ilat {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

constexpr double kUnitFloor = 0x1.0p-53;

}  // namespace

std::string to_string(Propagation p) { return p == Propagation::Analytic ? "analytic" : "cluster"; }

std::string to_string(DescendantScheme s) {
  switch (s) {
    case DescendantScheme::Pseudo: return "pseudo";
    case DescendantScheme::Antithetic: return "antithetic";
    case DescendantScheme::Sobol: return "sobol";
  }
  return "unknown";
}

std::string to_string(ExerciseStyle s) { return s == ExerciseStyle::American ? "american" : "european"; }

DescendantSampler::DescendantSampler(const MarketParams& params, double dt, int n, DescendantScheme scheme)
    : moments_(log_step_moments(params, dt)),
      step_factor_(params.factor() * std::sqrt(dt)),
      n_(n),
      scheme_(scheme) {
  if (n < 2) throw std::invalid_argument("descendants: n must be at least 2");
  if (scheme == DescendantScheme::Antithetic && n % 2 != 0)
    throw std::invalid_argument("descendants: antithetic scheme needs an even count");
  if (scheme == DescendantScheme::Sobol) {
    SobolConfig sc;
    sc.dimension = params.dim();
    sc.skip = 0;
    sobol_ = sobol_sequence(sc, n);
  }
}

Eigen::MatrixXd DescendantSampler::operator()(const Eigen::VectorXd& x, Stream& gen) const {
  const auto d = x.size();
  Eigen::MatrixXd z(n_, d);
  switch (scheme_) {
    case DescendantScheme::Pseudo:
      for (int i = 0; i < n_; ++i)
        for (Eigen::Index j = 0; j < d; ++j) z(i, j) = gen.normal();
      break;
    case DescendantScheme::Antithetic:
      for (int i = 0; i < n_; i += 2)
        for (Eigen::Index j = 0; j < d; ++j) {
          z(i, j) = gen.normal();
          z(i + 1, j) = -z(i, j);
        }
      break;
    case DescendantScheme::Sobol: {
      Eigen::VectorXd shift(d);
      for (Eigen::Index j = 0; j < d; ++j) shift[j] = gen.uniform();
      for (int i = 0; i < n_; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
          double u = sobol_(i, j) + shift[j];
          if (u >= 1.0) u -= 1.0;
          z(i, j) = inverse_normal_cdf(std::clamp(u, kUnitFloor, 1.0 - kUnitFloor));
        }
      break;
    }
  }
  Eigen::MatrixXd out = z * step_factor_.transpose();
  out.rowwise() += (x + moments_.mean).transpose();
  return out;
}

Eigen::MatrixXd descendants(const Eigen::VectorXd& x, const MarketParams& params, double dt, int n,
                            DescendantScheme scheme, std::uint64_t seed) {
  DescendantSampler sampler(params, dt, n, scheme);
  Stream gen(seed, {stream_tag::descendants});
  return sampler(x, gen);
}

double continuation_cluster(const Surface& surface, const Eigen::MatrixXd& descendants, double r, double dt) {
  if (descendants.cols() != surface.mixture.dim())
    throw std::domain_error("continuation_cluster: dimension mismatch");
  return std::exp(-r * dt) * surface.rows(descendants).mean();
}

Surface propagate_analytic(const Surface& surface, const MarketParams& params, double dt) {
  const auto m = log_step_moments(params, dt);
  const double disc = std::exp(-params.rate() * dt);
  Surface out;
  out.mixture = propagate(surface.mixture, m.mean, m.cov, disc);
  out.offset = disc * surface.offset;
  out.lower = disc * surface.lower;
  out.upper = disc * surface.upper;
  return out;
}

PriceResult backward_induct(const MarketParams& params, const PayoffSpec& spec, const TimeGrid& tg,
                            const Grid& grid, const PricerConfig& cfg) {
  const auto start = Clock::now();
  const int d = params.dim();
  if (grid.dim() != d) throw std::invalid_argument("backward_induct: grid dimension differs from market");
  if (static_cast<int>(grid.train_idx.size()) < d + 2)
    throw std::invalid_argument("backward_induct: grid needs at least d + 2 training points");

  const int m = tg.steps();
  const double dt = tg.dt();
  const double disc = std::exp(-params.rate() * dt);
  const bool american = cfg.style == ExerciseStyle::American;
  const DescendantSampler sampler(params, dt, cfg.n_descendants, cfg.descendant_scheme);
  const int n = grid.size();

  PriceResult result;
  result.spec = spec;
  result.style = cfg.style;
  result.steps = m;
  result.surfaces.resize(static_cast<std::size_t>(m));
  result.fit_reports.resize(static_cast<std::size_t>(m));
  result.propagated.assign(static_cast<std::size_t>(m), false);

  for (int t = m - 1; t >= 0; --t) {
    const auto slice = static_cast<std::size_t>(t);
    const bool terminal_next = t + 1 == m;
    const bool analytic = !terminal_next && cfg.propagation == Propagation::Analytic;
    Surface propagated;
    if (analytic) {
      propagated = propagate_analytic(result.surfaces[slice + 1], params, dt);
      if (!american) {
        // Without the exercise max the next value function is a mixture, and
        // its propagation is exact.
        result.surfaces[slice] = std::move(propagated);
        result.propagated[slice] = true;
        FitReport& rep = result.fit_reports[slice];
        rep.n_terms_selected = static_cast<int>(result.surfaces[slice].mixture.size());
        rep.coef_mass = result.surfaces[slice].mixture.coef_mass();
        continue;
      }
    }

    // Analytic mode fits only the early-exercise premium
    // e^{-r dt} E[(payoff - next continuation)^+] on top of the propagated
    // continuation; cluster mode fits the whole continuation value.
    const auto phase = Clock::now();
    Eigen::VectorXd targets(n);
    const Surface* next = terminal_next ? nullptr : &result.surfaces[slice + 1];
    parallel_for(static_cast<std::size_t>(n), cfg.workers, [&](std::size_t i) {
      const Eigen::VectorXd x = grid.points.row(static_cast<Eigen::Index>(i)).transpose();
      Stream gen(cfg.seed, {stream_tag::descendants, static_cast<std::uint64_t>(t), i});
      const Eigen::MatrixXd cloud = sampler(x, gen);
      Eigen::VectorXd exercise(cloud.rows());
      for (Eigen::Index k = 0; k < cloud.rows(); ++k) exercise[k] = payoff_log(spec, cloud.row(k));
      double mean_value = 0.0;
      if (terminal_next) {
        mean_value = exercise.mean();
      } else if (analytic) {
        mean_value = (exercise.array() == 0.0).all() ? 0.0 : (exercise - next->rows(cloud)).cwiseMax(0.0).mean();
      } else {
        const Eigen::VectorXd cont = next->rows(cloud);
        mean_value = american ? cont.cwiseMax(exercise).mean() : cont.mean();
      }
      targets[static_cast<Eigen::Index>(i)] = disc * mean_value;
    });
    result.timing.continuation_s += seconds_since(phase);
    if (!targets.allFinite()) throw FitFailure(t, FitReport{}, "non-finite continuation targets");

    const auto fit_phase = Clock::now();
    FitConfig fc = cfg.fit;
    fc.seed = mix64(cfg.seed ^ mix64(static_cast<std::uint64_t>(t) + 0x51ce));
    fc.workers = cfg.workers;
    Fit fit = fit_rga(grid.points, targets, grid.train_idx, grid.val_idx, fc);
    result.timing.fit_s += seconds_since(fit_phase);
    if (!std::isfinite(fit.surface.offset) || !std::isfinite(fit.report.residual_val_rms))
      throw FitFailure(t, fit.report, "non-finite fit");
    if (analytic) {
      Surface& out = propagated;
      for (const auto& term : fit.surface.mixture.terms()) out.mixture.add(term);
      out.offset += fit.surface.offset;
      out.upper += fit.surface.upper;
      result.propagated[slice] = true;
      result.surfaces[slice] = std::move(out);
    } else {
      result.surfaces[slice] = std::move(fit.surface);
    }
    result.fit_reports[slice] = std::move(fit.report);
  }

  const Eigen::VectorXd x0 = params.log_spot();
  const double cont0 = result.surfaces[0](x0);
  result.value0 = american ? std::max(payoff_log(spec, x0), cont0) : cont0;
  result.timing.total_s = seconds_since(start);
  return result;
}

double price_at(const PriceResult& result, const Eigen::VectorXd& prices, int slice) {
  if (slice < 0 || slice > result.steps) throw std::domain_error("price_at: slice out of range");
  const double exercise = payoff(result.spec, prices);
  if (slice == result.steps) return exercise;
  const double cont = result.continuation(slice, prices.array().log().matrix());
  return result.style == ExerciseStyle::American ? std::max(exercise, cont) : cont;
}

void export_price_result(const std::filesystem::path& dir, const PriceResult& result, const std::string& config_echo) {
  std::filesystem::create_directories(dir);
  char name[32];
  for (int t = 0; t < result.steps; ++t) {
    std::snprintf(name, sizeof name, "slice_%03d.mix", t);
    std::ofstream out(dir / name);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    write_surface(out, result.surfaces[static_cast<std::size_t>(t)]);
  }
  std::ofstream manifest(dir / "manifest.txt");
  if (!manifest) throw std::runtime_error("cannot write " + (dir / "manifest.txt").string());
  char buf[128];
  manifest << "# ilattice-manifest v1\n";
  std::snprintf(buf, sizeof buf, "value0 %.17g\n", result.value0);
  manifest << buf << "steps " << result.steps << "\nstyle " << to_string(result.style) << '\n';
  manifest << "payoff " << to_string(result.spec.kind);
  std::snprintf(buf, sizeof buf, " %.17g\n", result.spec.strike);
  manifest << buf;
  for (int t = 0; t < result.steps; ++t) {
    const auto& rep = result.fit_reports[static_cast<std::size_t>(t)];
    std::snprintf(buf, sizeof buf, "slice %d slice_%03d.mix terms=%d val_rms=%.6g propagated=%d\n", t, t,
                  rep.n_terms_selected, rep.residual_val_rms, result.propagated[static_cast<std::size_t>(t)] ? 1 : 0);
    manifest << buf;
  }
  std::snprintf(buf, sizeof buf, "timing continuation_s=%.3f fit_s=%.3f total_s=%.3f\n", result.timing.continuation_s,
                result.timing.fit_s, result.timing.total_s);
  manifest << buf << "# config\n" << config_echo;
  if (!config_echo.empty() && config_echo.back() != '\n') manifest << '\n';
}

}  // namespace ilat
