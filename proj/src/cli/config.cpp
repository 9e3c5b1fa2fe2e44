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

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace ilat::cli {
namespace {

using json = nlohmann::json;

std::string join(const std::string& parent, const std::string& key) { return parent.empty() ? key : parent + "." + key; }

std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

long long as_integer(const json& j, const std::string& path) {
  if (j.is_number_integer()) return j.get<long long>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9e15) return static_cast<long long>(v);
  }
  throw ConfigError(path, "expected an integer");
}

// Reads one JSON object, remembering which keys were used so that leftovers
// can be reported as unknown.
class Section {
 public:
  Section(const json* node, std::string path) : node_(node), path_(std::move(path)) {
    if (node_ && !node_->is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) const { return node_ && node_->contains(key); }
  std::string path(const std::string& key) const { return join(path_, key); }

  const json* take(const std::string& key) {
    used_.insert(key);
    if (!has(key)) return nullptr;
    return &node_->at(key);
  }

  const json& require(const std::string& key) {
    const json* j = take(key);
    if (!j) throw ConfigError(path(key), "required field is missing");
    return *j;
  }

  double number(const std::string& key, double fallback) {
    const json* j = take(key);
    return j ? as_number(*j, path(key)) : fallback;
  }

  double positive(const std::string& key, double fallback) {
    const double v = number(key, fallback);
    if (!(v > 0.0)) throw ConfigError(path(key), "must be positive");
    return v;
  }

  long long integer(const std::string& key, long long fallback, long long lo,
                    long long hi = std::numeric_limits<int>::max()) {
    const json* j = take(key);
    const long long v = j ? as_integer(*j, path(key)) : fallback;
    if (v < lo || v > hi)
      throw ConfigError(path(key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
  }

  std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback) {
    const json* j = take(key);
    if (!j) return fallback;
    if (j->is_number_unsigned()) return j->get<std::uint64_t>();
    const long long v = as_integer(*j, path(key));
    if (v < 0) throw ConfigError(path(key), "must be non-negative");
    return static_cast<std::uint64_t>(v);
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* j = take(key);
    if (!j) return fallback;
    if (!j->is_boolean()) throw ConfigError(path(key), "expected true or false");
    return j->get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const json* j = take(key);
    if (!j) return fallback;
    if (!j->is_string()) throw ConfigError(path(key), "expected a string");
    return j->get<std::string>();
  }

  template <class Enum>
  Enum choice(const std::string& key, Enum fallback, std::initializer_list<std::pair<const char*, Enum>> options) {
    const json* j = take(key);
    if (!j) return fallback;
    if (!j->is_string()) throw ConfigError(path(key), "expected a string");
    const auto value = j->get<std::string>();
    std::string names;
    for (const auto& [name, e] : options) {
      if (value == name) return e;
      names += names.empty() ? name : std::string(", ") + name;
    }
    throw ConfigError(path(key), "unknown value '" + value + "' (expected one of: " + names + ")");
  }

  Section child(const std::string& key) { return Section(take(key), path(key)); }

  void finish() const {
    if (!node_) return;
    for (const auto& [key, value] : node_->items())
      if (!used_.count(key)) throw ConfigError(path(key), "unknown field");
  }

 private:
  const json* node_;
  std::string path_;
  std::set<std::string> used_;
};

Eigen::VectorXd read_vector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = as_number(j[i], index_path(path, i));
  return v;
}

Eigen::MatrixXd read_matrix(const json& j, const std::string& path, Eigen::Index d) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != d)
    throw ConfigError(path, "expected " + std::to_string(d) + " rows to match market.spots");
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    const auto row_path = index_path(path, static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d)
      throw ConfigError(row_path, "expected " + std::to_string(d) + " entries");
    for (Eigen::Index k = 0; k < d; ++k)
      m(i, k) = as_number(row[static_cast<std::size_t>(k)], index_path(row_path, static_cast<std::size_t>(k)));
  }
  return m;
}

void check_symmetric(const Eigen::MatrixXd& m, const std::string& path) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < i; ++k)
      if (m(i, k) != m(k, i))
        throw ConfigError(index_path(index_path(path, static_cast<std::size_t>(i)), static_cast<std::size_t>(k)),
                          "matrix must be symmetric");
}

void read_market(Section market, RunConfig& cfg) {
  cfg.rate = market.number("rate", std::numeric_limits<double>::quiet_NaN());
  if (!market.has("rate")) throw ConfigError(market.path("rate"), "required field is missing");
  const auto spots_path = market.path("spots");
  cfg.spots = read_vector(market.require("spots"), spots_path);
  for (Eigen::Index i = 0; i < cfg.spots.size(); ++i)
    if (!(cfg.spots[i] > 0.0)) throw ConfigError(index_path(spots_path, static_cast<std::size_t>(i)), "must be positive");
  const Eigen::Index d = cfg.spots.size();

  const json* cov = market.take("covariance");
  const json* vols = market.take("vols");
  const json* corr = market.take("correlation");
  std::string matrix_path;
  if (cov) {
    if (vols || corr)
      throw ConfigError(market.path("covariance"), "give either covariance or vols with correlation, not both");
    matrix_path = market.path("covariance");
    cfg.covariance = read_matrix(*cov, matrix_path, d);
    check_symmetric(cfg.covariance, matrix_path);
    for (Eigen::Index i = 0; i < d; ++i)
      if (cfg.covariance(i, i) < 0.0)
        throw ConfigError(index_path(index_path(matrix_path, static_cast<std::size_t>(i)), static_cast<std::size_t>(i)),
                          "variance must be non-negative");
  } else {
    if (!vols) throw ConfigError(market.path("vols"), "required field is missing (or give market.covariance)");
    const auto vols_path = market.path("vols");
    const Eigen::VectorXd v = read_vector(*vols, vols_path);
    if (v.size() != d) throw ConfigError(vols_path, "expected " + std::to_string(d) + " entries to match market.spots");
    for (Eigen::Index i = 0; i < d; ++i)
      if (v[i] < 0.0) throw ConfigError(index_path(vols_path, static_cast<std::size_t>(i)), "must be non-negative");
    matrix_path = market.path("correlation");
    Eigen::MatrixXd c = Eigen::MatrixXd::Identity(d, d);
    if (corr) {
      c = read_matrix(*corr, matrix_path, d);
    } else if (d > 1) {
      throw ConfigError(matrix_path, "required field is missing");
    }
    check_symmetric(c, matrix_path);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index k = 0; k < d; ++k) {
        const auto entry = index_path(index_path(matrix_path, static_cast<std::size_t>(i)), static_cast<std::size_t>(k));
        if (i == k && c(i, k) != 1.0) throw ConfigError(entry, "diagonal entries must equal 1");
        if (c(i, k) < -1.0 || c(i, k) > 1.0) throw ConfigError(entry, "correlation must lie in [-1, 1]");
      }
    cfg.covariance = v.asDiagonal() * c * v.asDiagonal();
  }
  market.finish();
  try {
    (void)cfg.market();
  } catch (const std::exception& e) {
    throw ConfigError(matrix_path, e.what());
  }
}

void read_fit(Section s, FitConfig& fit) {
  fit.max_terms = static_cast<int>(s.integer("max_terms", fit.max_terms, 1));
  fit.n_center_candidates = static_cast<int>(s.integer("n_center_candidates", fit.n_center_candidates, 1));
  fit.n_precision_scales = static_cast<int>(s.integer("n_precision_scales", fit.n_precision_scales, 1, 30));
  fit.patience = static_cast<int>(s.integer("patience", fit.patience, 0));
  fit.rga_mode = s.choice("rga_mode", fit.rga_mode, {{"affine", RecombineMode::Affine}, {"convex", RecombineMode::Convex}});
  fit.precision_shape = s.choice("precision_shape", fit.precision_shape,
                                 {{"isotropic", PrecisionShape::Isotropic}, {"diagonal", PrecisionShape::Diagonal}});
  fit.refine_iters = static_cast<int>(s.integer("refine_iters", fit.refine_iters, 0));
  fit.width_neighbors = static_cast<int>(s.integer("width_neighbors", fit.width_neighbors, 0));
  fit.ridge_candidates = s.boolean("ridge_candidates", fit.ridge_candidates);
  fit.backfit = s.boolean("backfit", fit.backfit);
  fit.center_targets = s.boolean("center_targets", fit.center_targets);
  s.finish();
}

void apply_override(json& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError(assignment, "override must have the form path=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json* node = &root;
  std::stringstream parts(path);
  std::string key, walked;
  std::vector<std::string> keys;
  while (std::getline(parts, key, '.')) {
    if (key.empty()) throw ConfigError(path, "empty path component in override");
    keys.push_back(key);
  }
  for (std::size_t i = 0; i < keys.size(); ++i) {
    walked = join(walked, keys[i]);
    if (!node->is_object()) throw ConfigError(walked, "cannot override inside a non-object value");
    if (i + 1 == keys.size()) {
      (*node)[keys[i]] = value;
    } else {
      if (!node->contains(keys[i])) (*node)[keys[i]] = json::object();
      node = &(*node)[keys[i]];
    }
  }
}

}  // namespace

std::string to_string(Job job) {
  switch (job) {
    case Job::Price: return "price";
    case Job::Bounds: return "bounds";
    case Job::Benchmark: return "benchmark";
    case Job::RateCheck: return "rate-check";
  }
  return "price";
}

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  json root;
  try {
    root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  for (const auto& o : overrides) apply_override(root, o);

  RunConfig cfg;
  Section top(&root, "");
  cfg.name = top.string("name", cfg.name);
  if (cfg.name.empty() || cfg.name.find_first_of(",\n\"") != std::string::npos)
    throw ConfigError("name", "must be non-empty and free of commas, quotes and newlines");
  cfg.job = top.choice("job", cfg.job,
                       {{"price", Job::Price}, {"bounds", Job::Bounds}, {"benchmark", Job::Benchmark},
                        {"rate-check", Job::RateCheck}});
  cfg.seed = top.unsigned64("seed", cfg.seed);
  cfg.workers = static_cast<int>(top.integer("workers", cfg.workers, 1, 1024));
  const bool needs_market = cfg.job != Job::RateCheck;

  if (needs_market || top.has("market")) {
    if (!top.has("market")) throw ConfigError("market", "required section is missing");
    read_market(top.child("market"), cfg);
  }
  const int d = static_cast<int>(cfg.spots.size());

  if (needs_market || top.has("payoff")) {
    Section p = top.child("payoff");
    if (!top.has("payoff")) throw ConfigError("payoff", "required section is missing");
    const std::string kind = p.string("kind", "");
    if (!p.has("kind")) throw ConfigError(p.path("kind"), "required field is missing");
    try {
      cfg.payoff.kind = payoff_kind_from_string(kind);
    } catch (const std::exception& e) {
      throw ConfigError(p.path("kind"), e.what());
    }
    if (!p.has("strike")) throw ConfigError(p.path("strike"), "required field is missing");
    cfg.payoff.strike = p.positive("strike", 1.0);
    cfg.pricer.style = p.choice("exercise", ExerciseStyle::American,
                                {{"american", ExerciseStyle::American}, {"european", ExerciseStyle::European}});
    p.finish();
  }

  if (needs_market || top.has("time")) {
    Section t = top.child("time");
    if (!top.has("time")) throw ConfigError("time", "required section is missing");
    if (!t.has("maturity")) throw ConfigError(t.path("maturity"), "required field is missing");
    cfg.maturity = t.positive("maturity", 1.0);
    if (!t.has("steps")) throw ConfigError(t.path("steps"), "required field is missing");
    cfg.steps = static_cast<int>(t.integer("steps", 1, 1, 100000));
    t.finish();
  }

  {
    Section g = top.child("grid");
    cfg.grid.n_points = static_cast<int>(g.integer("n_points", cfg.grid.n_points, 1, 1 << 26));
    if (needs_market && cfg.grid.n_points < d + 2)
      throw ConfigError(g.path("n_points"), "need at least d + 2 = " + std::to_string(d + 2) + " points");
    cfg.grid.spread = g.positive("spread", cfg.grid.spread);
    if (g.has("horizon")) cfg.grid.horizon = g.positive("horizon", 1.0);
    cfg.grid.sobol_skip = g.unsigned64("sobol_skip", cfg.grid.sobol_skip);
    if (cfg.grid.sobol_skip < 1)
      throw ConfigError(g.path("sobol_skip"), "must be at least 1 (the first Sobol point maps to infinity)");
    if (g.has("scramble_seed")) cfg.grid.scramble_seed = g.unsigned64("scramble_seed", 0);
    cfg.grid.val_fraction = g.number("val_fraction", cfg.grid.val_fraction);
    if (!(cfg.grid.val_fraction > 0.0 && cfg.grid.val_fraction < 1.0))
      throw ConfigError(g.path("val_fraction"), "must lie in (0, 1)");
    g.finish();
    if (needs_market && d > sobol_max_dimension())
      throw ConfigError("market.spots", "dimension exceeds the Sobol table (" + std::to_string(sobol_max_dimension()) + ")");
  }

  read_fit(top.child("fit"), cfg.pricer.fit);

  {
    Section p = top.child("pricer");
    cfg.pricer.propagation = p.choice("propagation", cfg.pricer.propagation,
                                      {{"cluster", Propagation::Cluster}, {"analytic", Propagation::Analytic}});
    cfg.pricer.n_descendants = static_cast<int>(p.integer("n_descendants", cfg.pricer.n_descendants, 2));
    cfg.pricer.descendant_scheme =
        p.choice("descendant_scheme", cfg.pricer.descendant_scheme,
                 {{"sobol", DescendantScheme::Sobol}, {"pseudo", DescendantScheme::Pseudo},
                  {"antithetic", DescendantScheme::Antithetic}});
    if (cfg.pricer.descendant_scheme == DescendantScheme::Antithetic && cfg.pricer.n_descendants % 2 != 0)
      throw ConfigError(p.path("n_descendants"), "antithetic descendants need an even count");
    p.finish();
  }

  {
    Section b = top.child("bounds");
    cfg.bounds.n_paths_lower = static_cast<int>(b.integer("n_paths_lower", cfg.bounds.n_paths_lower, 1));
    cfg.bounds.n_paths_outer = static_cast<int>(b.integer("n_paths_outer", cfg.bounds.n_paths_outer, 1));
    cfg.bounds.n_inner = static_cast<int>(b.integer("n_inner", cfg.bounds.n_inner, 2));
    b.finish();
  }

  {
    Section l = top.child("lsmc");
    cfg.lsmc.n_paths = static_cast<int>(l.integer("n_paths", cfg.lsmc.n_paths, 100));
    cfg.lsmc.degree = static_cast<int>(l.integer("degree", cfg.lsmc.degree, 1, 6));
    l.finish();
  }

  {
    Section b = top.child("benchmark");
    cfg.benchmark.mc_paths = static_cast<int>(b.integer("mc_paths", cfg.benchmark.mc_paths, 100));
    cfg.benchmark.binomial_steps = static_cast<int>(b.integer("binomial_steps", cfg.benchmark.binomial_steps, 1, 1000000));
    b.finish();
  }

  {
    Section r = top.child("rate_check");
    auto& rc = cfg.rate_check;
    rc.n_targets = static_cast<int>(r.integer("n_targets", rc.n_targets, 1, 100000));
    rc.min_terms = static_cast<int>(r.integer("min_terms", rc.min_terms, 1, 1000));
    rc.max_terms_target = static_cast<int>(r.integer("max_terms_target", rc.max_terms_target, rc.min_terms, 1000));
    rc.min_mass = r.positive("min_mass", rc.min_mass);
    rc.max_mass = r.positive("max_mass", rc.max_mass);
    if (rc.max_mass < rc.min_mass) throw ConfigError(r.path("max_mass"), "must not be below rate_check.min_mass");
    if (const json* dims = r.take("dims")) {
      const auto path = r.path("dims");
      if (!dims->is_array() || dims->empty()) throw ConfigError(path, "expected a non-empty array of integers");
      rc.dims.clear();
      for (std::size_t i = 0; i < dims->size(); ++i) {
        const long long v = as_integer((*dims)[i], index_path(path, i));
        if (v < 1 || v > 16) throw ConfigError(index_path(path, i), "must lie in [1, 16]");
        rc.dims.push_back(static_cast<int>(v));
      }
    }
    rc.options.max_terms = static_cast<int>(r.integer("max_terms", rc.options.max_terms, 1, 100000));
    rc.options.alpha = r.number("alpha", rc.options.alpha);
    if (!(rc.options.alpha > 0.0 && rc.options.alpha < 1.0)) throw ConfigError(r.path("alpha"), "must lie in (0, 1)");
    rc.options.exclude_dictionary = r.boolean("exclude_dictionary", rc.options.exclude_dictionary);
    r.finish();
  }

  top.finish();

  cfg.pricer.seed = cfg.seed;
  cfg.pricer.workers = cfg.workers;
  cfg.pricer.fit.workers = cfg.workers;
  cfg.bounds.seed = cfg.seed;
  cfg.bounds.workers = cfg.workers;
  cfg.lsmc.seed = cfg.seed;
  cfg.lsmc.workers = cfg.workers;
  return cfg;
}

std::string dump_config(const RunConfig& cfg) {
  json root;
  root["name"] = cfg.name;
  root["job"] = to_string(cfg.job);
  root["seed"] = cfg.seed;
  root["workers"] = cfg.workers;
  if (cfg.spots.size() > 0) {
    json market;
    market["rate"] = cfg.rate;
    market["spots"] = std::vector<double>(cfg.spots.data(), cfg.spots.data() + cfg.spots.size());
    json cov = json::array();
    for (Eigen::Index i = 0; i < cfg.covariance.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index k = 0; k < cfg.covariance.cols(); ++k) row.push_back(cfg.covariance(i, k));
      cov.push_back(row);
    }
    market["covariance"] = cov;
    root["market"] = market;
    root["payoff"] = {{"kind", to_string(cfg.payoff.kind)},
                      {"strike", cfg.payoff.strike},
                      {"exercise", to_string(cfg.pricer.style)}};
    root["time"] = {{"maturity", cfg.maturity}, {"steps", cfg.steps}};
  }
  json grid = {{"n_points", cfg.grid.n_points},
               {"spread", cfg.grid.spread},
               {"sobol_skip", cfg.grid.sobol_skip},
               {"val_fraction", cfg.grid.val_fraction}};
  if (cfg.grid.horizon) grid["horizon"] = *cfg.grid.horizon;
  if (cfg.grid.scramble_seed) grid["scramble_seed"] = *cfg.grid.scramble_seed;
  root["grid"] = grid;
  const auto& f = cfg.pricer.fit;
  root["fit"] = {{"max_terms", f.max_terms},
                 {"n_center_candidates", f.n_center_candidates},
                 {"n_precision_scales", f.n_precision_scales},
                 {"patience", f.patience},
                 {"rga_mode", f.rga_mode == RecombineMode::Affine ? "affine" : "convex"},
                 {"precision_shape", f.precision_shape == PrecisionShape::Isotropic ? "isotropic" : "diagonal"},
                 {"refine_iters", f.refine_iters},
                 {"width_neighbors", f.width_neighbors},
                 {"ridge_candidates", f.ridge_candidates},
                 {"backfit", f.backfit},
                 {"center_targets", f.center_targets}};
  root["pricer"] = {{"propagation", to_string(cfg.pricer.propagation)},
                    {"n_descendants", cfg.pricer.n_descendants},
                    {"descendant_scheme", to_string(cfg.pricer.descendant_scheme)}};
  root["bounds"] = {{"n_paths_lower", cfg.bounds.n_paths_lower},
                    {"n_paths_outer", cfg.bounds.n_paths_outer},
                    {"n_inner", cfg.bounds.n_inner}};
  root["lsmc"] = {{"n_paths", cfg.lsmc.n_paths}, {"degree", cfg.lsmc.degree}};
  root["benchmark"] = {{"mc_paths", cfg.benchmark.mc_paths}, {"binomial_steps", cfg.benchmark.binomial_steps}};
  const auto& rc = cfg.rate_check;
  root["rate_check"] = {{"n_targets", rc.n_targets},
                        {"min_terms", rc.min_terms},
                        {"max_terms_target", rc.max_terms_target},
                        {"min_mass", rc.min_mass},
                        {"max_mass", rc.max_mass},
                        {"dims", rc.dims},
                        {"max_terms", rc.options.max_terms},
                        {"alpha", rc.options.alpha},
                        {"exclude_dictionary", rc.options.exclude_dictionary}};
  return root.dump(2) + "\n";
}

}  // namespace ilat::cli
