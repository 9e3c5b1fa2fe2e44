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

#include "ilattice/gaussian.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

namespace ilat {

enum class RecombineMode { Convex, Affine };
enum class PrecisionShape { Isotropic, Diagonal };

/// A dictionary element: precision and center of an unweighted basis function.
struct Candidate {
  Eigen::MatrixXd precision;
  Eigen::VectorXd center;
  /// Smallest kernel width allowed, in per-axis standard deviations of the
  /// sample (0: only the global precision clamp applies).
  double min_width = 0.0;
  /// Training point the center was drawn from (-1 for dictionary entries).
  int origin = -1;
};

/// Scale information about the training sample that candidates are built from.
struct SampleGeometry {
  Eigen::VectorXd axis_variance;
  /// Standardized distance from each training point to its k-th nearest
  /// neighbour; kernels centred there may not be narrower than this.
  Eigen::VectorXd spacing;
  /// Row i lists the k nearest neighbours of training point i.
  Eigen::MatrixXi neighbors;
};

/// Axis variances, k-nearest-neighbour lists and spacing of the rows of xs.
SampleGeometry sample_geometry(const Eigen::MatrixXd& xs, int k);

struct FitConfig {
  int max_terms = 200;
  int n_center_candidates = 24;
  int n_precision_scales = 6;
  /// Consecutive rounds without validation improvement before stopping.
  int patience = 3;
  RecombineMode rga_mode = RecombineMode::Affine;
  PrecisionShape precision_shape = PrecisionShape::Isotropic;
  /// Sweeps of the accept-only-improving local search on the chosen candidate.
  int refine_iters = 6;
  /// Neighbour rank used for the local width floor (0 disables the floor).
  int width_neighbors = 8;
  /// Also offer kernels that are narrow only along the local residual
  /// gradient (estimated from the nearest neighbours) and wide across it.
  bool ridge_candidates = true;
  /// Re-solve all term weights by least squares after each accepted round.
  bool backfit = true;
  /// Fit ys - mean(ys[train]) and carry the mean as an offset.
  bool center_targets = true;
  /// Extra candidates offered every round, ahead of the sampled ones.
  std::vector<Candidate> dictionary;
  /// Offer only `dictionary` (exact-dictionary experiments).
  bool dictionary_only = false;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct FitReport {
  /// Entry k is the MSE with k terms (entry 0: offset only).
  std::vector<double> train_mse_trace;
  std::vector<double> val_mse_trace;
  int n_terms_selected = 0;
  double coef_mass = 0.0;
  double residual_val_rms = 0.0;
  int rounds = 0;
  int rejected_rounds = 0;
};

/// Gaussian mixture plus constant offset, clamped to the range of the data it
/// was fitted to; the form in which fitted functions are stored and evaluated.
struct Surface {
  Mixture mixture{1};
  double offset = 0.0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  template <class Derived>
  double operator()(const Eigen::MatrixBase<Derived>& x) const {
    return std::clamp(offset + evaluate(mixture, x), lower, upper);
  }
  Eigen::VectorXd rows(const Eigen::MatrixXd& xs) const {
    return (evaluate_rows(mixture, xs).array() + offset).cwiseMax(lower).cwiseMin(upper).matrix();
  }
};

struct Fit {
  Surface surface;
  FitReport report;
};

/// Coefficients of the recombined fit a * f + b * phi.
struct Recombination {
  double a = 1.0;
  double b = 0.0;
  double mse = 0.0;
};

/// Best combination of the current fit f and a new basis vector phi against
/// targets y. Convex mode: (1 - lambda) f + lambda * c * phi with c the
/// least-squares level of phi and lambda clipped to [0, 1]. Affine mode:
/// unconstrained 2 × 2 least squares, with b = 0 when phi is collinear with f.
Recombination recombine(const Eigen::VectorXd& f, const Eigen::VectorXd& phi, const Eigen::VectorXd& y,
                        RecombineMode mode);

/// Precision multipliers of the dyadic ladder: 4^k for k centred on zero
/// (n = 3 gives {1/4, 1, 4}; even n leans towards narrower kernels).
std::vector<double> precision_ladder(int n_scales);

/// Residual²-weighted centers crossed with the precision ladder. Returns an
/// empty list when every residual is zero. The base precision is 1 / variance
/// per axis (or its mean in isotropic mode); `geometry.spacing`, when set,
/// caps precision so no kernel is narrower than its center's local spacing.
std::vector<Candidate> propose_candidates(const Eigen::VectorXd& residual, const Eigen::MatrixXd& train_xs,
                                          const SampleGeometry& geometry, const FitConfig& cfg,
                                          std::uint64_t round);

/// Accept-only-improving coordinate search over center and precision scale.
/// The returned candidate never scores worse than the input. The score is the
/// two-column recombination MSE, with a free constant level when the fit is
/// affine on centred targets.
Candidate refine_candidate(Candidate start, const Eigen::MatrixXd& train_xs, const Eigen::VectorXd& f,
                           const Eigen::VectorXd& y, const SampleGeometry& geometry, const FitConfig& cfg);

/// Relaxed greedy fit of a Gaussian mixture to (xs, ys) with validation-based
/// acceptance: a round's term is kept only if validation MSE decreases, and
/// fitting stops after `patience` consecutive rejections or `max_terms` terms.
Fit fit_rga(const Eigen::MatrixXd& xs, const Eigen::VectorXd& ys, const std::vector<int>& train_idx,
            const std::vector<int>& val_idx, const FitConfig& cfg);

/// Text format: "mixture d=<d> terms=<n> offset=<x> lower=<x> upper=<x>" then one line per
/// term: weight, center (d values), precision (d*d values, row-major).
void write_surface(std::ostream& out, const Surface& surface);
Surface read_surface(std::istream& in);

// Greedy-rate check against the exact dictionary of a target mixture.

struct RateCheckOptions {
  int max_terms = 100;
  double alpha = 0.5;
  /// Replace the dictionary by perturbed copies of the target terms, so the
  /// approximation-rate hypothesis no longer holds.
  bool exclude_dictionary = false;
};

struct RateRow {
  int n = 0;
  double error_sq = 0.0;
  double bound = 0.0;
};

struct RateTable {
  double coef_mass = 0.0;  // K
  bool hypothesis_met = true;
  bool bound_holds = true;
  std::vector<RateRow> rows;
};

/// Runs the relaxed greedy algorithm in L2(R^d) with dictionary {±K phi_i}
/// taken from the target's own terms, computing every norm in closed form,
/// and compares eps_n² = ||f_n - f||² to ((K + 1) / alpha)² / n.
RateTable theorem_rate_check(const Mixture& target, const RateCheckOptions& opts);

/// Random mixture for rate experiments: coefficient mass K spread over
/// n_terms signed weights, diagonal precisions and centers in a unit box.
Mixture random_target(int dim, int n_terms, double coef_mass, std::uint64_t seed);

}  // namespace ilat
