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

#include "ilattice/approx.hpp"

#include "ilattice/parallel.hpp"
#include "ilattice/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace ilat {
namespace {

constexpr double kPrecisionFloor = 1e-8;
constexpr double kPrecisionCeil = 1e8;

double mean_square(const Eigen::VectorXd& v) { return v.size() ? v.squaredNorm() / v.size() : 0.0; }

Eigen::VectorXd basis_values(const Candidate& c, const Eigen::MatrixXd& xs) {
  return Term(1.0, c.precision, c.center).basis_rows(xs);
}

double grid_scale(const Eigen::VectorXd& axis_variance) { return 1.0 / axis_variance.mean(); }

bool is_diagonal(const Eigen::MatrixXd& m) { return (m - Eigen::MatrixXd(m.diagonal().asDiagonal())).isZero(0.0); }

void clamp_precision(Eigen::MatrixXd& precision, double min_width, const Eigen::VectorXd& axis_variance,
                     PrecisionShape shape) {
  const double scale = grid_scale(axis_variance);
  const double w2 = min_width * min_width;
  if (!is_diagonal(precision)) {
    // Clamp eigenvalues in standardized coordinates, where the grid scale is 1.
    const Eigen::VectorXd sd = axis_variance.cwiseSqrt();
    const Eigen::MatrixXd z = sd.asDiagonal() * precision * sd.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (z + z.transpose()));
    const double hi = w2 > 0.0 ? std::max(kPrecisionFloor, std::min(kPrecisionCeil, 1.0 / w2)) : kPrecisionCeil;
    const Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(kPrecisionFloor).cwiseMin(hi);
    const Eigen::MatrixXd clamped = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
    precision = sd.cwiseInverse().asDiagonal() * clamped * sd.cwiseInverse().asDiagonal();
    precision = 0.5 * (precision + precision.transpose()).eval();
    return;
  }
  for (Eigen::Index j = 0; j < precision.rows(); ++j) {
    double hi = kPrecisionCeil * scale;
    if (w2 > 0.0) {
      const double var = shape == PrecisionShape::Diagonal ? axis_variance[j] : axis_variance.mean();
      hi = std::max(kPrecisionFloor * scale, std::min(hi, 1.0 / (w2 * var)));
    }
    precision(j, j) = std::clamp(precision(j, j), kPrecisionFloor * scale, hi);
  }
}

// Unit direction of the least-squares gradient of `values` around training
// point i, in standardized coordinates; empty when it cannot be estimated.
Eigen::VectorXd local_gradient_direction(const Eigen::VectorXd& values, const Eigen::MatrixXd& xs,
                                         const SampleGeometry& g, Eigen::Index i) {
  const Eigen::Index k = g.neighbors.cols();
  const Eigen::Index d = xs.cols();
  if (g.neighbors.rows() != xs.rows() || k < d) return {};
  const Eigen::VectorXd inv_sd = g.axis_variance.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd a(k, d);
  Eigen::VectorXd b(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    const int j = g.neighbors(i, r);
    a.row(r) = (xs.row(j) - xs.row(i)).cwiseProduct(inv_sd.transpose());
    b[r] = values[j] - values[i];
  }
  const Eigen::VectorXd grad = a.colPivHouseholderQr().solve(b);
  const double norm = grad.norm();
  if (!std::isfinite(norm) || norm == 0.0) return {};
  return grad / norm;
}

// A fit with centred targets carries a constant level that affine rounds may
// move; the convex rule keeps it fixed.
bool free_level(const FitConfig& cfg) { return cfg.center_targets && cfg.rga_mode == RecombineMode::Affine; }

struct LevelRecombination {
  Recombination rec;
  double level = 0.0;  // constant added to a * f + b * phi
};

LevelRecombination recombine_with_level(const Eigen::VectorXd& f, const Eigen::VectorXd& phi, const Eigen::VectorXd& y,
                                        const FitConfig& cfg) {
  LevelRecombination out;
  if (!free_level(cfg) || y.size() == 0) {
    out.rec = recombine(f, phi, y, cfg.rga_mode);
    return out;
  }
  // Least squares with a free constant is least squares on mean-removed vectors.
  const double mf = f.mean(), mp = phi.mean(), my = y.mean();
  out.rec = recombine((f.array() - mf).matrix(), (phi.array() - mp).matrix(), (y.array() - my).matrix(), cfg.rga_mode);
  out.level = my - out.rec.a * mf - out.rec.b * mp;
  return out;
}

double score(const Candidate& c, const Eigen::MatrixXd& xs, const Eigen::VectorXd& f, const Eigen::VectorXd& y,
             const FitConfig& cfg) {
  return recombine_with_level(f, basis_values(c, xs), y, cfg).rec.mse;
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& xs, const std::vector<int>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), xs.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = xs.row(idx[i]);
  return out;
}

Eigen::VectorXd gather(const Eigen::VectorXd& ys, const std::vector<int>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = ys[idx[i]];
  return out;
}

// Orders sample indices by coordinates so the fit does not depend on the
// order in which points were supplied.
std::vector<int> canonical_order(const Eigen::MatrixXd& xs, const Eigen::VectorXd& ys, std::vector<int> idx) {
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    for (Eigen::Index j = 0; j < xs.cols(); ++j)
      if (xs(a, j) != xs(b, j)) return xs(a, j) < xs(b, j);
    if (ys[a] != ys[b]) return ys[a] < ys[b];
    return a < b;
  });
  return idx;
}

}  // namespace

Recombination recombine(const Eigen::VectorXd& f, const Eigen::VectorXd& phi, const Eigen::VectorXd& y,
                        RecombineMode mode) {
  if (f.size() != phi.size() || f.size() != y.size()) throw std::invalid_argument("recombine: length mismatch");
  Recombination out;
  const double pp = phi.squaredNorm();
  if (mode == RecombineMode::Convex) {
    const double level = pp > 0.0 ? phi.dot(y) / pp : 0.0;
    const Eigen::VectorXd h = level * phi - f;
    const double hh = h.squaredNorm();
    const double lambda = hh > 0.0 ? std::clamp((y - f).dot(h) / hh, 0.0, 1.0) : 0.0;
    out.a = 1.0 - lambda;
    out.b = lambda * level;
  } else {
    const double ff = f.squaredNorm();
    const double fp = f.dot(phi);
    const double det = ff * pp - fp * fp;
    if (ff == 0.0) {
      out.a = 1.0;
      out.b = pp > 0.0 ? phi.dot(y) / pp : 0.0;
    } else if (pp == 0.0 || det <= 1e-12 * ff * pp) {
      out.a = f.dot(y) / ff;
      out.b = 0.0;
    } else {
      const double fy = f.dot(y);
      const double py = phi.dot(y);
      out.a = (pp * fy - fp * py) / det;
      out.b = (ff * py - fp * fy) / det;
    }
  }
  out.mse = mean_square(out.a * f + out.b * phi - y);
  return out;
}

SampleGeometry sample_geometry(const Eigen::MatrixXd& xs, int k) {
  SampleGeometry g;
  const Eigen::Index n = xs.rows();
  g.axis_variance = n > 0 ? Eigen::VectorXd((xs.rowwise() - xs.colwise().mean()).colwise().squaredNorm().transpose() /
                                            static_cast<double>(n))
                          : Eigen::VectorXd::Ones(xs.cols());
  const double top = g.axis_variance.size() ? g.axis_variance.maxCoeff() : 0.0;
  g.axis_variance = g.axis_variance.cwiseMax(top > 0.0 ? 1e-12 * top : 1.0);
  g.spacing = Eigen::VectorXd::Zero(n);
  if (k <= 0 || n < 2) return g;
  const int rank = static_cast<int>(std::min<Eigen::Index>(k, n - 1));
  const Eigen::MatrixXd z = xs * g.axis_variance.cwiseSqrt().cwiseInverse().asDiagonal();
  g.neighbors.resize(n, rank);
  std::vector<std::pair<double, int>> dist(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j)
      dist[static_cast<std::size_t>(j)] = {(z.row(j) - z.row(i)).squaredNorm(), static_cast<int>(j)};
    // Point i itself sorts first at distance zero, so the k-th neighbour sits at position k.
    dist[static_cast<std::size_t>(i)].first = -1.0;
    std::partial_sort(dist.begin(), dist.begin() + rank + 1, dist.end());
    for (int r = 0; r < rank; ++r) g.neighbors(i, r) = dist[static_cast<std::size_t>(r + 1)].second;
    g.spacing[i] = std::sqrt(dist[static_cast<std::size_t>(rank)].first);
  }
  return g;
}

std::vector<double> precision_ladder(int n_scales) {
  std::vector<double> out;
  const int lo = -(n_scales - 1) / 2;
  for (int k = 0; k < n_scales; ++k) out.push_back(std::pow(4.0, lo + k));
  return out;
}

std::vector<Candidate> propose_candidates(const Eigen::VectorXd& residual, const Eigen::MatrixXd& train_xs,
                                          const SampleGeometry& geometry, const FitConfig& cfg,
                                          std::uint64_t round) {
  if (residual.size() != train_xs.rows()) throw std::invalid_argument("propose_candidates: length mismatch");
  const Eigen::VectorXd& axis_variance = geometry.axis_variance;
  const bool has_spacing = geometry.spacing.size() == train_xs.rows();
  std::vector<Candidate> out;
  const Eigen::VectorXd weight = residual.array().square();
  const double total = weight.sum();
  if (!(total > 0.0)) return out;

  std::vector<double> cumulative(static_cast<std::size_t>(weight.size()));
  std::partial_sum(weight.data(), weight.data() + weight.size(), cumulative.begin());

  const int d = static_cast<int>(train_xs.cols());
  const double scale = grid_scale(axis_variance);
  Eigen::MatrixXd base = Eigen::MatrixXd::Zero(d, d);
  if (cfg.precision_shape == PrecisionShape::Diagonal)
    base.diagonal() = axis_variance.cwiseInverse();
  else
    base.diagonal().setConstant(scale);

  const auto ladder = precision_ladder(cfg.n_precision_scales);
  Stream gen(cfg.seed, {stream_tag::fit, round});
  out.reserve(static_cast<std::size_t>(cfg.n_center_candidates) * ladder.size());
  for (int c = 0; c < cfg.n_center_candidates; ++c) {
    const double u = gen.uniform() * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    // Skip zero-weight points that share the boundary value.
    auto idx = std::min<std::ptrdiff_t>(it - cumulative.begin(), weight.size() - 1);
    while (weight[idx] == 0.0 && idx + 1 < weight.size()) ++idx;
    const Eigen::VectorXd center = train_xs.row(idx).transpose();
    const double min_width = has_spacing ? geometry.spacing[idx] : 0.0;
    for (double s : ladder) {
      Eigen::MatrixXd p = base * s;
      clamp_precision(p, min_width, axis_variance, cfg.precision_shape);
      out.push_back({std::move(p), center, min_width, static_cast<int>(idx)});
    }
    if (!cfg.ridge_candidates || d < 2) continue;
    const Eigen::VectorXd w = local_gradient_direction(residual, train_xs, geometry, idx);
    if (w.size() == 0) continue;
    const Eigen::VectorXd inv_sd = axis_variance.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd across = ladder.front() * Eigen::MatrixXd::Identity(d, d);
    for (std::size_t k = 1; k < ladder.size(); ++k) {
      const Eigen::MatrixXd z = across + (ladder[k] - ladder.front()) * w * w.transpose();
      Eigen::MatrixXd p = inv_sd.asDiagonal() * z * inv_sd.asDiagonal();
      clamp_precision(p, min_width, axis_variance, cfg.precision_shape);
      out.push_back({std::move(p), center, min_width, static_cast<int>(idx)});
    }
  }
  return out;
}

Candidate refine_candidate(Candidate start, const Eigen::MatrixXd& train_xs, const Eigen::VectorXd& f,
                           const Eigen::VectorXd& y, const SampleGeometry& geometry, const FitConfig& cfg) {
  const int d = static_cast<int>(start.center.size());
  Candidate best = std::move(start);
  double best_mse = score(best, train_xs, f, y, cfg);
  double step = 0.5;    // center step in units of the kernel width
  double factor = 2.0;  // multiplicative precision step

  auto try_move = [&](Candidate trial) {
    clamp_precision(trial.precision, trial.min_width, geometry.axis_variance, cfg.precision_shape);
    const double s = score(trial, train_xs, f, y, cfg);
    if (s < best_mse) {
      best = std::move(trial);
      best_mse = s;
      return true;
    }
    return false;
  };

  for (int iter = 0; iter < cfg.refine_iters; ++iter) {
    bool improved = false;
    for (int j = 0; j < d; ++j) {
      const double width = 1.0 / std::sqrt(best.precision(j, j));
      for (double sign : {1.0, -1.0}) {
        Candidate trial = best;
        trial.center[j] += sign * step * width;
        improved |= try_move(std::move(trial));
      }
    }
    if (cfg.precision_shape == PrecisionShape::Diagonal && is_diagonal(best.precision)) {
      for (int j = 0; j < d; ++j)
        for (double g : {factor, 1.0 / factor}) {
          Candidate trial = best;
          trial.precision(j, j) *= g;
          improved |= try_move(std::move(trial));
        }
    } else {
      for (double g : {factor, 1.0 / factor}) {
        Candidate trial = best;
        trial.precision *= g;
        improved |= try_move(std::move(trial));
      }
    }
    if (!improved) {
      step *= 0.5;
      factor = std::sqrt(factor);
    }
  }
  return best;
}

Fit fit_rga(const Eigen::MatrixXd& xs, const Eigen::VectorXd& ys, const std::vector<int>& train_idx,
            const std::vector<int>& val_idx, const FitConfig& cfg) {
  const int d = static_cast<int>(xs.cols());
  if (xs.rows() != ys.size()) throw std::invalid_argument("fit_rga: xs and ys lengths differ");
  if (static_cast<int>(train_idx.size()) < d + 2)
    throw std::invalid_argument("fit_rga: need at least d + 2 training points");
  if (cfg.max_terms < 1) throw std::invalid_argument("fit_rga: max_terms must be at least 1");
  if (cfg.patience < 0) throw std::invalid_argument("fit_rga: patience must be non-negative");
  if (!ys.allFinite()) throw std::invalid_argument("fit_rga: targets must be finite");
  for (const auto* idx : {&train_idx, &val_idx})
    for (int i : *idx)
      if (i < 0 || i >= xs.rows()) throw std::out_of_range("fit_rga: sample index out of range");

  const auto train = canonical_order(xs, ys, train_idx);
  const auto val = canonical_order(xs, ys, val_idx);
  const Eigen::MatrixXd xt = gather_rows(xs, train);
  const Eigen::MatrixXd xv = gather_rows(xs, val);
  const double offset = cfg.center_targets ? gather(ys, train).mean() : 0.0;
  const Eigen::VectorXd tt = (gather(ys, train).array() - offset).matrix();
  const Eigen::VectorXd tv = (gather(ys, val).array() - offset).matrix();
  const bool has_val = tv.size() > 0;

  const SampleGeometry geometry = sample_geometry(xt, cfg.width_neighbors);

  std::vector<Candidate> chosen;
  Eigen::VectorXd weights(0);
  double shift = 0.0;  // constant level fitted on top of the training mean
  Eigen::MatrixXd phi_t(xt.rows(), 0), phi_v(xv.rows(), 0);
  Eigen::VectorXd ft = Eigen::VectorXd::Zero(tt.size());
  Eigen::VectorXd fv = Eigen::VectorXd::Zero(tv.size());

  FitReport report;
  report.train_mse_trace.push_back(mean_square(tt));
  report.val_mse_trace.push_back(has_val ? mean_square(tv) : report.train_mse_trace.back());

  const int stop_after = std::max(cfg.patience, 1);
  int rejections = 0;
  std::uint64_t round = 0;
  // Centers whose term was just rejected stay out of the draw until a round
  // is accepted; otherwise an unchanged state picks the same term again.
  std::vector<int> banned;
  while (static_cast<int>(chosen.size()) < cfg.max_terms && rejections < stop_after) {
    const Eigen::VectorXd residual = tt - ft;
    if (residual.squaredNorm() == 0.0) break;
    ++round;

    std::vector<Candidate> pool = cfg.dictionary;
    if (!cfg.dictionary_only) {
      Eigen::VectorXd draw = residual;
      for (int i : banned) draw[i] = 0.0;
      auto sampled = propose_candidates(draw, xt, geometry, cfg, round);
      pool.insert(pool.end(), std::make_move_iterator(sampled.begin()), std::make_move_iterator(sampled.end()));
    }
    if (pool.empty()) break;

    std::vector<double> scores(pool.size());
    parallel_for(pool.size(), cfg.workers,
                 [&](std::size_t i) { scores[i] = score(pool[i], xt, ft, tt, cfg); });
    const auto best_it = std::min_element(scores.begin(), scores.end());  // first minimum wins ties
    Candidate pick = pool[static_cast<std::size_t>(best_it - scores.begin())];
    if (cfg.refine_iters > 0 && !cfg.dictionary_only)
      pick = refine_candidate(std::move(pick), xt, ft, tt, geometry, cfg);

    const Eigen::VectorXd pt = basis_values(pick, xt);
    const Eigen::VectorXd pv = basis_values(pick, xv);
    const auto [rec, level] = recombine_with_level(ft, pt, tt, cfg);
    Eigen::VectorXd next_weights(weights.size() + 1);
    next_weights << rec.a * weights, rec.b;
    double next_shift = rec.a * shift + level;

    Eigen::MatrixXd next_phi_t(phi_t.rows(), phi_t.cols() + 1);
    next_phi_t << phi_t, pt;
    if (cfg.backfit) {
      // Weights and, when free, the constant level are solved together; only
      // the weights are damped.
      const Eigen::Index k = next_phi_t.cols();
      const Eigen::Index cols = free_level(cfg) ? k + 1 : k;
      Eigen::MatrixXd design(next_phi_t.rows(), cols);
      design.leftCols(k) = next_phi_t;
      if (cols > k) design.col(k).setOnes();
      Eigen::MatrixXd gram = design.transpose() * design;
      gram.diagonal().head(k).array() += 1e-12 * gram.diagonal().head(k).maxCoeff();
      const Eigen::VectorXd solved = gram.ldlt().solve(design.transpose() * tt);
      if (solved.allFinite() && mean_square(design * solved - tt) <= rec.mse) {
        next_weights = solved.head(k);
        next_shift = cols > k ? solved[k] : 0.0;
      }
    }
    Eigen::MatrixXd next_phi_v(phi_v.rows(), phi_v.cols() + 1);
    next_phi_v << phi_v, pv;
    const Eigen::VectorXd next_ft = (next_phi_t * next_weights).array() + next_shift;
    const Eigen::VectorXd next_fv = (next_phi_v * next_weights).array() + next_shift;
    const double train_mse = mean_square(next_ft - tt);
    const double val_mse = has_val ? mean_square(next_fv - tv) : train_mse;

    if (std::isfinite(val_mse) && val_mse < report.val_mse_trace.back()) {
      chosen.push_back(std::move(pick));
      weights = std::move(next_weights);
      shift = next_shift;
      phi_t = std::move(next_phi_t);
      phi_v = std::move(next_phi_v);
      ft = next_ft;
      fv = next_fv;
      report.train_mse_trace.push_back(train_mse);
      report.val_mse_trace.push_back(val_mse);
      rejections = 0;
      banned.clear();
    } else {
      if (pick.origin >= 0) banned.push_back(pick.origin);
      ++rejections;
      ++report.rejected_rounds;
    }
  }

  Fit out;
  out.surface.offset = offset + shift;
  if (ys.size() > 0) {
    out.surface.lower = ys.minCoeff();
    out.surface.upper = ys.maxCoeff();
  }
  out.surface.mixture = Mixture(d);
  for (std::size_t k = 0; k < chosen.size(); ++k)
    out.surface.mixture.add(Term(weights[static_cast<Eigen::Index>(k)], chosen[k].precision, chosen[k].center));
  report.rounds = static_cast<int>(round);
  report.n_terms_selected = static_cast<int>(chosen.size());
  report.coef_mass = out.surface.mixture.coef_mass();
  report.residual_val_rms = std::sqrt(report.val_mse_trace.back());
  out.report = std::move(report);
  return out;
}

void write_surface(std::ostream& out, const Surface& surface) {
  const auto& mix = surface.mixture;
  char buf[64];
  out << "mixture d=" << mix.dim() << " terms=" << mix.size();
  for (auto [key, value] : {std::pair{"offset", surface.offset}, {"lower", surface.lower}, {"upper", surface.upper}}) {
    std::snprintf(buf, sizeof buf, "%.17g", value);
    out << ' ' << key << '=' << buf;
  }
  out << '\n';
  for (const auto& t : mix.terms()) {
    std::snprintf(buf, sizeof buf, "%.17g", t.weight());
    out << buf;
    for (Eigen::Index j = 0; j < t.center().size(); ++j) {
      std::snprintf(buf, sizeof buf, " %.17g", t.center()[j]);
      out << buf;
    }
    for (Eigen::Index i = 0; i < t.precision().rows(); ++i)
      for (Eigen::Index j = 0; j < t.precision().cols(); ++j) {
        std::snprintf(buf, sizeof buf, " %.17g", t.precision()(i, j));
        out << buf;
      }
    out << '\n';
  }
}

Surface read_surface(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("mixture ", 0) != 0)
    throw std::runtime_error("mixture file: expected 'mixture d=<d> terms=<n> offset=<x>' header");
  int d = -1;
  long n = -1;
  Surface s;
  std::istringstream header(line.substr(8));
  std::string kv;
  while (header >> kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::runtime_error("mixture file: malformed header field '" + kv + "'");
    const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
    if (key == "d") d = std::stoi(value);
    else if (key == "terms") n = std::stol(value);
    else if (key == "offset") s.offset = std::stod(value);
    else if (key == "lower") s.lower = std::stod(value);
    else if (key == "upper") s.upper = std::stod(value);
    else throw std::runtime_error("mixture file: unknown header field '" + key + "'");
  }
  if (d < 1 || n < 0) throw std::runtime_error("mixture file: header must carry d >= 1 and terms >= 0");
  if (!(s.lower <= s.upper)) throw std::runtime_error("mixture file: lower must not exceed upper");
  s.mixture = Mixture(d);
  for (long k = 0; k < n; ++k) {
    if (!std::getline(in, line)) throw std::runtime_error("mixture file: expected " + std::to_string(n) + " terms");
    std::istringstream row(line);
    double w = 0.0;
    Eigen::VectorXd c(d);
    Eigen::MatrixXd p(d, d);
    row >> w;
    for (int j = 0; j < d; ++j) row >> c[j];
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) row >> p(i, j);
    if (!row) throw std::runtime_error("mixture file: short term line " + std::to_string(k + 2));
    s.mixture.add(Term(w, std::move(p), std::move(c)));
  }
  return s;
}

}  // namespace ilat
