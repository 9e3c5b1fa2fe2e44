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


// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "trivial_cases.hpp"

#include "ilattice/baselines.hpp"
#include "ilattice/cli.hpp"
#include "ilattice/lattice.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace ilat;

namespace {

namespace tol {
constexpr double eu2_abs = 0.05;
constexpr double eu2_stretch = 0.01;
constexpr double eu2_seconds = 300.0;
constexpr double put3_rel = 0.05;
constexpr double put3_seconds = 600.0;
constexpr double geo5_rel = 0.03;
constexpr double geo5_seconds = 1800.0;
constexpr int geo5_binomial_steps = 2000;
constexpr double n_se = 3.0;
constexpr double am2_gap_rel = 0.02;
constexpr double rate_seconds = 120.0;
constexpr int oracle_trials = 5;
constexpr int oracle_points = 5;
constexpr int oracle_draws = 1000000;
}  // namespace tol

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

cli::RunConfig load(const std::string& name, const std::vector<std::string>& overrides = {}) {
  return cli::parse_config(read_file(std::string(ILAT_SOURCE_DIR) + "/configs/" + name + ".json"), overrides);
}

struct Bench {
  cli::Report report;
  double seconds = 0.0;

  const cli::CsvRow* row(const std::string& method) const {
    for (const auto& r : report.rows)
      if (r.method == method) return &r;
    return nullptr;
  }
};

// Benchmarks are expensive; each instance runs once and serves several criteria.
const Bench& bench(const std::string& name) {
  static std::map<std::string, Bench> cache;
  auto it = cache.find(name);
  if (it == cache.end()) {
    const auto cfg = load(name);
    const auto t0 = Clock::now();
    Bench b{cli::run_benchmark(cfg), 0.0};
    b.seconds = seconds_since(t0);
    std::printf("  [%s] %.1f s\n%s", name.c_str(), b.seconds, b.report.text.c_str());
    it = cache.emplace(name, std::move(b)).first;
  }
  return it->second;
}

int failures = 0;

void verdict(int id, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Each criterion reports its own outcome; an exception counts as a failure.
template <class F>
void run(int id, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    verdict(id, false, std::string("exception: ") + e.what());
  }
}

void european_pair() {
  const Bench& b = bench("minput2_eu");
  const double il = b.row("IL")->price;
  const double ref = stulz_european_min_put(load("minput2_eu").market(), 100.0, 1.0);
  const double diff = std::abs(il - ref);
  verdict(1, diff <= tol::eu2_abs && b.seconds <= tol::eu2_seconds,
          fmt("IL %.5f vs Stulz %.5f, |diff| %.5f (tol %.2f, stretch %.2f %s), %.1f s", il, ref, diff, tol::eu2_abs,
              tol::eu2_stretch, diff <= tol::eu2_stretch ? "met" : "missed", b.seconds));
}

void european_triple() {
  std::string detail;
  bool pass = true;
  double total = 0.0;
  for (const char* name : {"put3_min_put", "put3_max_put", "put3_geo_mean_put"}) {
    const Bench& b = bench(name);
    const double il = b.row("IL")->price;
    const double mc = b.row("MC")->price;
    const double rel = std::abs(il - mc) / mc;
    pass = pass && rel <= tol::put3_rel;
    total += b.seconds;
    detail += fmt("%s IL %.4f MC %.4f rel %.2f%%; ", name, il, mc, 100.0 * rel);
  }
  pass = pass && total <= tol::put3_seconds;
  verdict(2, pass, detail + fmt("%.1f s total", total));
}

void geo_five() {
  const Bench& b = bench("geo5_am");
  const auto cfg = load("geo5_am");
  const auto g = geo_reduce(cfg.market(), cfg.payoff);
  const double ref = binomial_american_1d(g.spot, g.sigma, g.delta, cfg.rate, cfg.payoff.strike, cfg.maturity,
                                          tol::geo5_binomial_steps, OptionType::Put);
  const double il = b.row("IL")->price;
  const double rel = std::abs(il - ref) / ref;
  verdict(3, rel <= tol::geo5_rel && b.seconds <= tol::geo5_seconds,
          fmt("IL %.4f vs reduced binomial %.4f, rel %.2f%% (tol %.0f%%), %.1f s", il, ref, 100.0 * rel,
              100.0 * tol::geo5_rel, b.seconds));
}

void sandwich() {
  // The continuous-exercise tree is not a price of the Bermudan contract, so
  // American instances use the tree restricted to the exercise dates.
  bool pass = true;
  std::string detail;
  for (const char* name :
       {"minput2_eu", "minput2_am", "put3_min_put", "put3_max_put", "put3_geo_mean_put", "geo5_am"}) {
    const Bench& b = bench(name);
    const auto* bounds = b.row("bounds");
    const double lo = *bounds->lower - tol::n_se * *bounds->lower_se;
    const double hi = *bounds->upper + tol::n_se * *bounds->upper_se;
    const bool american = load(name).pricer.style == ExerciseStyle::American;
    std::string members;
    for (const auto& r : b.report.rows) {
      if (r.method == "bounds" || (american && r.method == "binomial-reduced")) continue;
      const bool in = lo <= r.price && r.price <= hi;
      pass = pass && in;
      members += fmt(" %s %.4f%s", r.method.c_str(), r.price, in ? "" : " (outside)");
    }
    detail += fmt("%s [%.4f, %.4f]:%s; ", name, lo, hi, members.c_str());
  }
  const auto* am = bench("minput2_am").row("bounds");
  const double gap = (*am->upper - *am->lower) / *am->lower;
  pass = pass && gap <= tol::am2_gap_rel;
  verdict(4, pass, detail + fmt("2-asset American gap %.2f%% (tol %.0f%%)", 100.0 * gap, 100.0 * tol::am2_gap_rel));
}

void rate_suite() {
  const auto t0 = Clock::now();
  const auto rep = cli::run_rate_check(load("rate_check"));
  const double s = seconds_since(t0);
  std::printf("%s", rep.text.c_str());
  verdict(5, rep.exit_code == cli::kOk && s <= tol::rate_seconds,
          fmt("exit code %d, %.1f s (limit %.0f s)", rep.exit_code, s, tol::rate_seconds));
}

void propagation_oracle() {
  int outside = 0;
  double worst = 0.0;
  for (int trial = 0; trial < tol::oracle_trials; ++trial) {
    Stream gen(2026, {static_cast<std::uint64_t>(trial)});
    Eigen::Matrix2d corr;
    const double rho = 0.9 * (2.0 * gen.uniform() - 1.0);
    corr << 1.0, rho, rho, 1.0;
    const Eigen::Vector2d vols(0.1 + 0.3 * gen.uniform(), 0.1 + 0.3 * gen.uniform());
    const MarketParams p = MarketParams::from_vols(0.01 + 0.09 * gen.uniform(), vols, corr, Eigen::Vector2d(100, 100));
    const double dt = 0.05 + 0.45 * gen.uniform();
    Surface s;
    s.mixture = random_target(2, 3, 1.0 + 4.0 * gen.uniform(), 500 + trial);
    const Surface out = propagate_analytic(s, p, dt);
    const auto m = log_step_moments(p, dt);
    const Eigen::MatrixXd f = p.factor() * std::sqrt(dt);
    for (int k = 0; k < tol::oracle_points; ++k) {
      const Eigen::Vector2d z(gen.normal() * 0.5, gen.normal() * 0.5);
      double sum = 0.0, sum2 = 0.0;
      for (int i = 0; i < tol::oracle_draws; ++i) {
        const Eigen::Vector2d xi = f * Eigen::Vector2d(gen.normal(), gen.normal());
        const double v = std::exp(-p.rate() * dt) * evaluate(s.mixture, Eigen::Vector2d(z + m.mean + xi));
        sum += v;
        sum2 += v * v;
      }
      const double mean = sum / tol::oracle_draws;
      const double se = std::sqrt((sum2 / tol::oracle_draws - mean * mean) / (tol::oracle_draws - 1));
      const double ratio = std::abs(out(z) - mean) / se;
      worst = std::max(worst, ratio);
      if (ratio > tol::n_se) ++outside;
    }
  }
  verdict(6, outside == 0,
          fmt("%d of %d probes outside %.0f se, worst %.2f se", outside, tol::oracle_trials * tol::oracle_points,
              tol::n_se, worst));
}

void martingale() {
  const auto cfg = load("minput2_am");
  const auto result = backward_induct(cfg.market(), cfg.payoff, cfg.time_grid(), cli::make_grid(cfg), cli::pricer_config(cfg));
  const auto bounds = compute_bounds(result, cfg.market(), cfg.time_grid(), cfg.bounds);
  const double z = std::abs(bounds.increment_mean) / bounds.increment_se;
  verdict(7, z <= tol::n_se,
          fmt("mean increment %.5f (se %.5f, %.2f se) over %d outer x %d inner", bounds.increment_mean,
              bounds.increment_se, z, cfg.bounds.n_paths_outer, cfg.bounds.n_inner));
}

void determinism() {
  const std::vector<std::pair<std::string, std::vector<std::string>>> cases{
      {"minput2_am", {"grid.n_points=256", "bounds.n_paths_lower=2000", "bounds.n_paths_outer=50",
                      "bounds.n_inner=8", "lsmc.n_paths=5000", "pricer.propagation=cluster",
                      "pricer.n_descendants=32"}},
      {"minput2_eu", {"grid.n_points=256", "bounds.n_paths_lower=2000", "bounds.n_paths_outer=50",
                      "bounds.n_inner=8", "benchmark.mc_paths=20000"}},
      {"geo5_am", {"grid.n_points=256", "bounds.n_paths_lower=2000", "bounds.n_paths_outer=50",
                   "bounds.n_inner=8", "lsmc.n_paths=5000", "fit.max_terms=20"}}};
  bool pass = true;
  std::string detail;
  for (const auto& [name, overrides] : cases) {
    auto with_workers = [&](int w) {
      auto o = overrides;
      o.push_back("workers=" + std::to_string(w));
      return load(name, o);
    };
    const auto one = with_workers(1), four = with_workers(4);
    const bool price_same = cli::run_price(one).csv() == cli::run_price(four).csv();
    const bool bench_same = cli::run_benchmark(one).csv() == cli::run_benchmark(four).csv();
    pass = pass && price_same && bench_same;
    detail += fmt("%s price %s benchmark %s; ", name.c_str(), price_same ? "identical" : "DIFFERS",
                  bench_same ? "identical" : "DIFFERS");
  }
  verdict(8, pass, detail + "workers 1 vs 4");
}

void trivial() {
  int failed = 0;
  std::string names;
  const auto& cases = testing::trivial_cases();
  for (const auto& c : cases) {
    bool ok = false;
    try {
      ok = c.check();
    } catch (const std::exception&) {
      ok = false;
    }
    if (!ok) {
      ++failed;
      names += " " + c.name + ";";
    }
  }
  verdict(9, failed == 0,
          fmt("%zu cases, %d failed", cases.size(), failed) + (failed ? ":" + names : std::string()));
}

}  // namespace

int main() {
  run(1, european_pair);
  run(2, european_triple);
  run(3, geo_five);
  run(4, sandwich);
  run(5, rate_suite);
  run(6, propagation_oracle);
  run(7, martingale);
  run(8, determinism);
  run(9, trivial);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
