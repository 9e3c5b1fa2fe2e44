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
#include "ilattice/rng.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ilat::cli {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string cell(const std::optional<double>& v) {
  if (!v) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", *v);
  return buf;
}

std::string fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

CsvRow make_row(const RunConfig& cfg, std::string method, double price, std::optional<double> se = std::nullopt) {
  CsvRow row;
  row.instance = cfg.name;
  row.method = std::move(method);
  row.price = price;
  row.se = se;
  return row;
}

struct Timed {
  CsvRow row;
  double seconds = 0.0;
};

std::string table(const std::string& title, const std::vector<Timed>& rows) {
  std::vector<std::array<std::string, 4>> lines{{"method", "price", "se/gap", "runtime"}};
  for (const auto& t : rows) {
    std::string err;
    if (t.row.gap)
      err = "gap " + fixed(*t.row.gap, 4);
    else if (t.row.se)
      err = "se " + fixed(*t.row.se, 4);
    lines.push_back({t.row.method, fixed(t.row.price, 6), err, fixed(t.seconds, 2) + " s"});
  }
  std::array<int, 4> w{};
  for (const auto& l : lines)
    for (std::size_t i = 0; i < 4; ++i) w[i] = std::max(w[i], static_cast<int>(l[i].size()));
  std::string out = title + "\n";
  char buf[256];
  for (const auto& l : lines) {
    std::snprintf(buf, sizeof buf, "  %-*s  %*s  %-*s  %*s\n", w[0], l[0].c_str(), w[1], l[1].c_str(), w[2],
                  l[2].c_str(), w[3], l[3].c_str());
    out += buf;
  }
  return out;
}

std::string describe(const RunConfig& cfg) {
  std::ostringstream out;
  out << cfg.name << ": " << to_string(cfg.payoff.kind) << " K=" << cfg.payoff.strike << ", "
      << to_string(cfg.pricer.style) << ", d=" << cfg.spots.size() << ", T=" << cfg.maturity << ", m=" << cfg.steps
      << ", " << cfg.grid.n_points << " grid points, " << to_string(cfg.pricer.propagation) << " propagation";
  return out.str();
}

std::string slice_diagnostics(const PriceResult& result) {
  std::string out = "  slice  terms  val_rms     coef_mass   propagated\n";
  char buf[160];
  for (int t = 0; t < result.steps; ++t) {
    const auto& rep = result.fit_reports[static_cast<std::size_t>(t)];
    std::snprintf(buf, sizeof buf, "  %5d  %5d  %-10.4g  %-10.4g  %s\n", t, rep.n_terms_selected,
                  rep.residual_val_rms, rep.coef_mass, result.propagated[static_cast<std::size_t>(t)] ? "yes" : "no");
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "  timings: continuation %.2f s, fit %.2f s, total %.2f s\n",
                result.timing.continuation_s, result.timing.fit_s, result.timing.total_s);
  return out + buf;
}

std::string bounds_notes(const BoundsResult& b) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "  lower %.6f (se %.4f), upper %.6f (se %.4f), gap %.2f%% of lower\n"
                "  martingale increment mean %.3g (se %.3g)\n",
                b.v_lower, b.se_lower, b.v_upper, b.se_upper, b.v_lower != 0.0 ? 100.0 * b.gap() / b.v_lower : 0.0,
                b.increment_mean, b.increment_se);
  return buf;
}

Report assemble(const RunConfig& cfg, const std::vector<Timed>& rows, const std::string& notes) {
  Report rep;
  for (const auto& t : rows) rep.rows.push_back(t.row);
  rep.text = table(describe(cfg), rows) + notes;
  return rep;
}

// IL price, optionally followed by the bounds.
struct Stage {
  std::vector<Timed> rows;
  std::string notes;
  PriceResult result;
};

Stage price_stage(const RunConfig& cfg, bool with_bounds) {
  Stage s;
  auto start = Clock::now();
  const MarketParams params = cfg.market();
  s.result = backward_induct(params, cfg.payoff, cfg.time_grid(), make_grid(cfg), pricer_config(cfg));
  s.rows.push_back({make_row(cfg, "IL", s.result.value0), seconds_since(start)});
  s.notes = slice_diagnostics(s.result);
  if (with_bounds) {
    start = Clock::now();
    BoundsConfig bc = cfg.bounds;
    bc.seed = cfg.seed;
    bc.workers = cfg.workers;
    const BoundsResult b = compute_bounds(s.result, params, cfg.time_grid(), bc);
    CsvRow row = make_row(cfg, "bounds", 0.5 * (b.v_lower + b.v_upper));
    row.lower = b.v_lower;
    row.lower_se = b.se_lower;
    row.upper = b.v_upper;
    row.upper_se = b.se_upper;
    row.gap = b.gap();
    s.rows.push_back({row, seconds_since(start)});
    s.notes += bounds_notes(b);
  }
  return s;
}

}  // namespace

Grid make_grid(const RunConfig& cfg) {
  const MarketParams params = cfg.market();
  SobolConfig sc;
  sc.dimension = params.dim();
  sc.skip = cfg.grid.sobol_skip;
  sc.scramble_seed = cfg.grid.scramble_seed;
  Grid grid = build_grid(params, cfg.grid.horizon.value_or(cfg.maturity), cfg.grid.spread, cfg.grid.n_points, sc);
  return split(std::move(grid), cfg.grid.val_fraction, mix64(cfg.seed ^ stream_tag::split));
}

PricerConfig pricer_config(const RunConfig& cfg) {
  PricerConfig pc = cfg.pricer;
  pc.seed = cfg.seed;
  pc.workers = cfg.workers;
  pc.fit.workers = cfg.workers;
  return pc;
}

std::string csv_header() { return "# ilattice-csv v1\ninstance,method,price,se,lower,lower_se,upper,upper_se,gap\n"; }

std::string to_csv(const std::vector<CsvRow>& rows) {
  std::string out = csv_header();
  for (const auto& r : rows)
    out += r.instance + ',' + r.method + ',' + cell(r.price) + ',' + cell(r.se) + ',' + cell(r.lower) + ',' +
           cell(r.lower_se) + ',' + cell(r.upper) + ',' + cell(r.upper_se) + ',' + cell(r.gap) + '\n';
  return out;
}

Report run_price(const RunConfig& cfg, const std::optional<std::filesystem::path>& export_dir) {
  Stage s = price_stage(cfg, false);
  if (export_dir) {
    export_price_result(*export_dir, s.result, dump_config(cfg));
    std::ofstream grid_out(*export_dir / "grid.csv");
    if (!grid_out) throw std::runtime_error("cannot write " + (*export_dir / "grid.csv").string());
    write_grid_csv(grid_out, make_grid(cfg), {cfg.grid.horizon.value_or(cfg.maturity), cfg.grid.spread, cfg.grid.sobol_skip});
    s.notes += "  surfaces written to " + export_dir->string() + "\n";
  }
  return assemble(cfg, s.rows, s.notes);
}

Report run_bounds(const RunConfig& cfg) {
  const Stage s = price_stage(cfg, true);
  return assemble(cfg, s.rows, s.notes);
}

Report run_benchmark(const RunConfig& cfg) {
  Stage s = price_stage(cfg, true);
  const MarketParams params = cfg.market();
  const bool european = cfg.pricer.style == ExerciseStyle::European;
  const double strike = cfg.payoff.strike;

  if (params.dim() == 2 && european &&
      (cfg.payoff.kind == PayoffKind::MinPut || cfg.payoff.kind == PayoffKind::MinCall)) {
    const auto start = Clock::now();
    const double v = cfg.payoff.kind == PayoffKind::MinPut ? stulz_european_min_put(params, strike, cfg.maturity)
                                                          : stulz_call_on_min(params, strike, cfg.maturity);
    s.rows.push_back({make_row(cfg, "Stulz", v), seconds_since(start)});
  }
  if (european) {
    const auto start = Clock::now();
    const Estimate e = european_mc(params, cfg.payoff, cfg.maturity, cfg.benchmark.mc_paths,
                                   mix64(cfg.seed ^ stream_tag::european_mc), cfg.workers);
    s.rows.push_back({make_row(cfg, "MC", e.value, e.se), seconds_since(start)});
  } else {
    const auto start = Clock::now();
    LsmcConfig lc = cfg.lsmc;
    lc.seed = mix64(cfg.seed ^ stream_tag::lsmc);
    lc.workers = cfg.workers;
    const Estimate e = lsmc_american(params, cfg.payoff, cfg.time_grid(), lc);
    s.rows.push_back({make_row(cfg, "LSMC", e.value, e.se), seconds_since(start)});
  }
  if (cfg.payoff.is_geometric()) {
    const GeoReduction g = geo_reduce(params, cfg.payoff);
    const OptionType type = cfg.payoff.is_put() ? OptionType::Put : OptionType::Call;
    auto start = Clock::now();
    const double v = binomial_american_1d(g.spot, g.sigma, g.delta, params.rate(), strike, cfg.maturity,
                                          cfg.benchmark.binomial_steps, type, !european);
    s.rows.push_back({make_row(cfg, "binomial-reduced", v), seconds_since(start)});
    if (!european) {
      // Same exercise dates as the lattice, which is what the bounds bracket.
      start = Clock::now();
      const int per_date = std::max(1, cfg.benchmark.binomial_steps / cfg.steps);
      const double vb =
          binomial_bermudan_1d(g.spot, g.sigma, g.delta, params.rate(), strike, cfg.maturity, cfg.steps, per_date, type);
      s.rows.push_back({make_row(cfg, "binomial-bermudan", vb), seconds_since(start)});
    }
  }
  return assemble(cfg, s.rows, s.notes);
}

Report run_rate_check(const RunConfig& cfg) {
  const auto& rc = cfg.rate_check;
  Report rep;
  std::string csv = "# ilattice-rate v1\ntarget,dim,terms,coef_mass,hypothesis,n,error_sq,bound,holds\n";
  std::ostringstream text;
  text << "rate check: " << rc.n_targets << " targets, " << rc.options.max_terms << " rounds, alpha "
       << rc.options.alpha << (rc.options.exclude_dictionary ? ", dictionary excluded" : "") << '\n';
  text << "  target  dim  terms  K         max eps^2*n/(K+1)^2  result\n";
  int violations = 0;
  char buf[256];
  for (int k = 0; k < rc.n_targets; ++k) {
    Stream gen(cfg.seed, {stream_tag::rate_check, static_cast<std::uint64_t>(k)});
    const int dim = rc.dims[static_cast<std::size_t>(k) % rc.dims.size()];
    const int span = rc.max_terms_target - rc.min_terms + 1;
    const int terms = rc.min_terms + std::min(span - 1, static_cast<int>(gen.uniform() * span));
    const double mass = rc.min_mass + (rc.max_mass - rc.min_mass) * gen.uniform();
    const Mixture target = random_target(dim, terms, mass, mix64(cfg.seed ^ mix64(static_cast<std::uint64_t>(k) + 1)));
    const RateTable t = theorem_rate_check(target, rc.options);
    double worst = 0.0;
    const double scale = (t.coef_mass + 1.0) * (t.coef_mass + 1.0);
    for (const auto& row : t.rows) {
      worst = std::max(worst, row.error_sq * row.n / scale);
      std::snprintf(buf, sizeof buf, "%d,%d,%d,%.10g,%s,%d,%.10g,%.10g,%d\n", k, dim, terms, t.coef_mass,
                    t.hypothesis_met ? "met" : "unmet", row.n, row.error_sq, row.bound,
                    row.error_sq <= row.bound ? 1 : 0);
      csv += buf;
    }
    const char* verdict = !t.hypothesis_met ? "hypothesis unmet" : (t.bound_holds ? "bound holds" : "VIOLATED");
    if (t.hypothesis_met && !t.bound_holds) ++violations;
    std::snprintf(buf, sizeof buf, "  %6d  %3d  %5d  %-8.4f  %-19.4f  %s\n", k, dim, terms, t.coef_mass, worst,
                  verdict);
    text << buf;
  }
  text << (violations ? std::to_string(violations) + " target(s) violate the bound\n" : "all bounds hold\n");
  rep.text = text.str();
  rep.csv_override = csv;
  rep.exit_code = violations ? kPropertyViolation : kOk;
  return rep;
}

Report run_job(const RunConfig& cfg, const std::optional<std::filesystem::path>& export_dir) {
  switch (cfg.job) {
    case Job::Price: return run_price(cfg, export_dir);
    case Job::Bounds: return run_bounds(cfg);
    case Job::Benchmark: return run_benchmark(cfg);
    case Job::RateCheck: return run_rate_check(cfg);
  }
  return run_price(cfg, export_dir);
}

}  // namespace ilat::cli
