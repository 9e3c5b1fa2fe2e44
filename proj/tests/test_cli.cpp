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


#include "ilattice/cli.hpp"
#include "ilattice/gridgen.hpp"

#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ilat;
using namespace ilat::cli;

namespace {

const std::string kMinimal = R"({
  "market": {"rate": 0.05, "spots": [100, 100], "vols": [0.2, 0.3],
             "correlation": [[1, 0.5], [0.5, 1]]},
  "payoff": {"kind": "min_put", "strike": 100},
  "time": {"maturity": 1, "steps": 8}
})";

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path golden(const std::string& name) {
  return std::filesystem::path(ILAT_SOURCE_DIR) / "docs" / "golden" / name;
}

std::string error_of(const std::string& text, const std::vector<std::string>& overrides = {}) {
  try {
    parse_config(text, overrides);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

// Drops the timing line, which is the only non-reproducible part of a manifest.
std::string without_timing(const std::string& s) {
  std::istringstream in(s);
  std::string line, out;
  while (std::getline(in, line))
    if (line.rfind("timing ", 0) != 0) out += line + '\n';
  return out;
}

}  // namespace

TEST_CASE("parse_config: defaults") {
  const RunConfig cfg = parse_config(kMinimal);
  CHECK(cfg.job == Job::Price);
  CHECK(cfg.pricer.n_descendants == 256);
  CHECK(cfg.pricer.fit.patience == 3);
  CHECK(cfg.pricer.fit.max_terms == 200);
  CHECK(cfg.pricer.fit.rga_mode == RecombineMode::Affine);
  CHECK(cfg.pricer.style == ExerciseStyle::American);
  CHECK(cfg.grid.n_points == 4096);
  CHECK(cfg.grid.spread == 1.5);
  CHECK_FALSE(cfg.grid.horizon.has_value());
  CHECK(cfg.grid.sobol_skip == 1);
  CHECK(cfg.grid.val_fraction == 0.2);
  CHECK(cfg.bounds.n_inner == 64);
  CHECK(cfg.bounds.n_paths_outer == 2000);
  CHECK(cfg.lsmc.degree == 2);
  CHECK(cfg.steps == 8);
}

TEST_CASE("parse_config: vols and correlation become a covariance") {
  const RunConfig cfg = parse_config(kMinimal);
  Eigen::Matrix2d expect;
  expect << 0.04, 0.5 * 0.2 * 0.3, 0.5 * 0.2 * 0.3, 0.09;
  CHECK((cfg.covariance - expect).cwiseAbs().maxCoeff() <= 1e-12);
  const Eigen::VectorXd vols = cfg.covariance.diagonal().cwiseSqrt();
  CHECK(std::abs(vols[0] - 0.2) <= 1e-12);
  CHECK(std::abs(vols[1] - 0.3) <= 1e-12);
  CHECK(std::abs(cfg.covariance(0, 1) / (vols[0] * vols[1]) - 0.5) <= 1e-12);

  // the canonical dump parses back to itself
  const std::string dumped = dump_config(cfg);
  CHECK(dump_config(parse_config(dumped)) == dumped);
}

TEST_CASE("parse_config: errors name the offending path") {
  CHECK(error_of(kMinimal, {"market.correlation=[[1,1.2],[1.2,1]]"}).rfind("market.correlation[0][1]", 0) == 0);
  CHECK(error_of(kMinimal, {"market.correlation=[[1,0.5],[0.4,1]]"}).rfind("market.correlation", 0) == 0);
  CHECK(error_of(kMinimal, {"market.vols=[0.2,0.3,0.1]"}).rfind("market.vols", 0) == 0);
  CHECK(error_of(kMinimal, {"fit.patiense=4"}).rfind("fit.patiense", 0) == 0);
  CHECK(error_of(kMinimal, {"payoff.kind=\"straddle\""}).rfind("payoff.kind", 0) == 0);
  CHECK(error_of(kMinimal, {"time.steps=0"}).rfind("time.steps", 0) == 0);
  CHECK(error_of(kMinimal, {"grid.n_points=3"}).rfind("grid.n_points", 0) == 0);
  CHECK(error_of(kMinimal, {"pricer.descendant_scheme=antithetic", "pricer.n_descendants=5"})
            .rfind("pricer.n_descendants", 0) == 0);
  CHECK(error_of(R"({"market": {"rate": 0.05, "vols": [0.2], "correlation": [[1]]},
                     "payoff": {"kind": "min_put", "strike": 100}, "time": {"maturity": 1, "steps": 2}})")
            .rfind("market.spots", 0) == 0);
  // three assets with a non-PSD correlation
  CHECK(error_of(R"({"market": {"rate": 0.05, "spots": [1, 1, 1], "vols": [0.2, 0.2, 0.2],
                     "correlation": [[1, 0.9, -0.9], [0.9, 1, 0.9], [-0.9, 0.9, 1]]},
                     "payoff": {"kind": "min_put", "strike": 1}, "time": {"maturity": 1, "steps": 2}})")
            .rfind("market.correlation", 0) == 0);
  CHECK(error_of("{ not json").size() > 0);
}

TEST_CASE("parse_config: overrides replace leaves") {
  const RunConfig cfg = parse_config(kMinimal, {"pricer.n_descendants=512", "job=benchmark", "fit.rga_mode=convex",
                                                "grid.horizon=0.5"});
  CHECK(cfg.pricer.n_descendants == 512);
  CHECK(cfg.job == Job::Benchmark);
  CHECK(cfg.pricer.fit.rga_mode == RecombineMode::Convex);
  CHECK(cfg.grid.horizon == 0.5);
  CHECK(error_of(kMinimal, {"no_equals_sign"}).size() > 0);
}

TEST_CASE("run_price: one-step toy is fast and reproducible") {
  RunConfig cfg = parse_config(kMinimal, {"time.steps=1", "grid.n_points=512", "payoff.exercise=european"});
  const auto start = std::chrono::steady_clock::now();
  const Report a = run_price(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(secs < 10.0);
  const Report b = run_price(cfg);
  CHECK(a.csv() == b.csv());
  cfg.workers = 4;
  CHECK(run_price(cfg).csv() == a.csv());
  REQUIRE(a.rows.size() == 1);
  CHECK(a.rows[0].method == "IL");
}

TEST_CASE("run_price: undersized grid is a configuration error") {
  CHECK_THROWS_AS(parse_config(kMinimal, {"grid.n_points=3"}), ConfigError);
}

TEST_CASE("CSV header is stable") {
  CHECK(csv_header() == "# ilattice-csv v1\ninstance,method,price,se,lower,lower_se,upper,upper_se,gap\n");
  const std::string committed = read_file(golden("summary.csv"));
  CHECK(committed.rfind(csv_header(), 0) == 0);
  CsvRow row{"x", "IL", 1.5, std::nullopt, 1.0, 0.1, 2.0, 0.2, 1.0};
  CHECK(to_csv({row}) == csv_header() + "x,IL,1.5,,1,0.1,2,0.2,1\n");
}

TEST_CASE("golden price run: summary, surfaces, manifest and grid") {
  const RunConfig cfg = parse_config(read_file(golden("toy.json")));
  const auto dir = std::filesystem::temp_directory_path() / "ilattice_golden_test";
  std::filesystem::remove_all(dir);
  const Report rep = run_price(cfg, dir);
  CHECK(rep.csv() == read_file(golden("summary.csv")));
  for (const char* name : {"slice_000.mix", "slice_001.mix", "grid.csv"})
    CHECK(read_file(dir / name) == read_file(golden(name)));
  CHECK(without_timing(read_file(dir / "manifest.txt")) == without_timing(read_file(golden("manifest.txt"))));

  // committed files parse with the library readers
  std::ifstream mix(golden("slice_000.mix"));
  const Surface s = read_surface(mix);
  CHECK(s.mixture.dim() == 2);
  std::ifstream grid(golden("grid.csv"));
  CHECK(read_grid_csv(grid).size() == cfg.grid.n_points);
  std::filesystem::remove_all(dir);
}

TEST_CASE("run_benchmark: row sets follow the instance") {
  {
    const RunConfig cfg = parse_config(kMinimal, {"payoff.exercise=european", "grid.n_points=256", "time.steps=2",
                                                  "benchmark.mc_paths=20000", "bounds.n_paths_lower=2000",
                                                  "bounds.n_paths_outer=100", "bounds.n_inner=8"});
    const Report rep = run_benchmark(cfg);
    std::vector<std::string> methods;
    for (const auto& r : rep.rows) methods.push_back(r.method);
    for (const char* m : {"IL", "Stulz", "MC"}) CHECK(std::find(methods.begin(), methods.end(), m) != methods.end());
  }
  {
    const RunConfig cfg = parse_config(R"({
      "market": {"rate": 0.05, "spots": [100, 100, 100, 100, 100], "vols": [0.2, 0.2, 0.2, 0.2, 0.2],
                 "correlation": [[1, 0.3, 0.3, 0.3, 0.3], [0.3, 1, 0.3, 0.3, 0.3], [0.3, 0.3, 1, 0.3, 0.3],
                                 [0.3, 0.3, 0.3, 1, 0.3], [0.3, 0.3, 0.3, 0.3, 1]]},
      "payoff": {"kind": "geo_mean_put", "strike": 100},
      "time": {"maturity": 1, "steps": 2},
      "grid": {"n_points": 256},
      "fit": {"max_terms": 10},
      "pricer": {"propagation": "analytic", "n_descendants": 32},
      "bounds": {"n_paths_lower": 2000, "n_paths_outer": 50, "n_inner": 8},
      "lsmc": {"n_paths": 5000},
      "benchmark": {"binomial_steps": 200}
    })");
    const Report rep = run_benchmark(cfg);
    std::vector<std::string> methods;
    for (const auto& r : rep.rows) methods.push_back(r.method);
    for (const char* m : {"IL", "bounds", "LSMC", "binomial-reduced"})
      CHECK(std::find(methods.begin(), methods.end(), m) != methods.end());
  }
}

TEST_CASE("run_rate_check: exit codes and hypothesis marking") {
  RunConfig cfg = parse_config(R"({"job": "rate-check", "rate_check": {"n_targets": 3, "min_terms": 1,
                                   "max_terms_target": 1, "max_terms": 10}})");
  const Report single = run_rate_check(cfg);
  CHECK(single.exit_code == kOk);
  std::istringstream rows(single.csv());
  std::string line;
  std::getline(rows, line);
  CHECK(line == "# ilattice-rate v1");
  std::getline(rows, line);
  std::getline(rows, line);
  const double eps1 = std::stod(line.substr(line.find(",met,1,") + 7));
  CHECK(eps1 < 1e-12);

  RunConfig five = parse_config(R"({"job": "rate-check", "rate_check": {"n_targets": 2, "min_terms": 5,
                                    "max_terms_target": 5, "max_terms": 100}})");
  CHECK(run_rate_check(five).exit_code == kOk);

  RunConfig adversarial = parse_config(R"({"job": "rate-check", "rate_check": {"n_targets": 4, "min_terms": 3,
                                          "max_terms_target": 5, "max_terms": 50, "exclude_dictionary": true}})");
  const Report adv = run_rate_check(adversarial);
  CHECK(adv.exit_code == kOk);
  CHECK(adv.text.find("hypothesis unmet") != std::string::npos);
  CHECK(adv.csv().find(",met,") == std::string::npos);

  std::ifstream committed(golden("rate.json"));
  std::stringstream ss;
  ss << committed.rdbuf();
  CHECK(run_rate_check(parse_config(ss.str())).csv() == read_file(golden("rate.csv")));
}
