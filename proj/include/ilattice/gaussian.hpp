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

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace ilat {

/// One weighted, L2-normalized Gaussian
///   a * (det B)^{1/4} * pi^{-d/4} * exp(-1/2 (x - C)ᵀ B (x - C)).
///
/// The precision B must be symmetric positive definite; the normalizing
/// amplitude is fixed at construction so that the unweighted basis function
/// has unit L2 norm under Lebesgue measure.
template <class Scalar>
class GaussianTerm {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  GaussianTerm(Scalar weight, Matrix precision, Vector center)
      : weight_(weight), precision_(std::move(precision)), center_(std::move(center)) {
    if (precision_.rows() != center_.size() || precision_.cols() != center_.size())
      throw std::invalid_argument("GaussianTerm: precision and center dimensions differ");
    Eigen::LLT<Matrix> llt(precision_);
    if (llt.info() != Eigen::Success || !(llt.matrixL().toDenseMatrix().diagonal().array() > Scalar(0)).all())
      throw std::invalid_argument("GaussianTerm: precision is not positive definite");
    // (det B)^{1/4} = sqrt(prod diag L)
    const Scalar log_det_quarter = Scalar(0.5) * llt.matrixLLT().diagonal().array().log().sum();
    log_amplitude_ = log_det_quarter - Scalar(0.25) * Scalar(dim()) * std::log(std::numbers::pi_v<Scalar>);
  }

  int dim() const { return static_cast<int>(center_.size()); }
  Scalar weight() const { return weight_; }
  const Matrix& precision() const { return precision_; }
  const Vector& center() const { return center_; }
  Scalar amplitude() const { return std::exp(log_amplitude_); }
  Scalar log_amplitude() const { return log_amplitude_; }

  GaussianTerm with_weight(Scalar w) const {
    GaussianTerm t = *this;
    t.weight_ = w;
    return t;
  }

  /// Unweighted basis value at x.
  template <class Derived>
  Scalar basis(const Eigen::MatrixBase<Derived>& x) const {
    const Vector diff = x - center_;
    return std::exp(log_amplitude_ - Scalar(0.5) * diff.dot(precision_ * diff));
  }

  /// Unweighted basis values at every row of xs.
  Vector basis_rows(const Matrix& xs) const {
    const Matrix diff = xs.rowwise() - center_.transpose();
    const Vector q = (diff * precision_).cwiseProduct(diff).rowwise().sum();
    return (log_amplitude_ - Scalar(0.5) * q.array()).exp().matrix();
  }

 private:
  Scalar weight_;
  Matrix precision_;
  Vector center_;
  Scalar log_amplitude_{};
};

/// Weighted sum of Gaussian terms of a common dimension.
template <class Scalar>
class GaussianMixture {
 public:
  using Term = GaussianTerm<Scalar>;
  using Vector = typename Term::Vector;
  using Matrix = typename Term::Matrix;

  explicit GaussianMixture(int dim = 1) : dim_(dim) {
    if (dim < 1) throw std::invalid_argument("GaussianMixture: dimension must be at least 1");
  }

  int dim() const { return dim_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::vector<Term>& terms() const { return terms_; }
  const Term& operator[](std::size_t i) const { return terms_[i]; }

  void add(Term term) {
    if (term.dim() != dim_) throw std::invalid_argument("GaussianMixture: term dimension mismatch");
    terms_.push_back(std::move(term));
  }

  /// Sum of |a_i|.
  Scalar coef_mass() const {
    Scalar s(0);
    for (const auto& t : terms_) s += std::abs(t.weight());
    return s;
  }

  GaussianMixture scaled(Scalar factor) const {
    GaussianMixture out(dim_);
    for (const auto& t : terms_) out.add(t.with_weight(t.weight() * factor));
    return out;
  }

 private:
  int dim_;
  std::vector<Term> terms_;
};

using Term = GaussianTerm<double>;
using Mixture = GaussianMixture<double>;

template <class Scalar, class Derived>
Scalar evaluate(const GaussianMixture<Scalar>& mixture, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != mixture.dim()) throw std::domain_error("evaluate: dimension mismatch");
  Scalar s(0);
  for (const auto& t : mixture.terms()) s += t.weight() * t.basis(x);
  return s;
}

/// Mixture values at every row of xs.
template <class Scalar>
typename GaussianMixture<Scalar>::Vector evaluate_rows(const GaussianMixture<Scalar>& mixture,
                                                       const typename GaussianMixture<Scalar>::Matrix& xs) {
  if (xs.cols() != mixture.dim()) throw std::domain_error("evaluate_rows: dimension mismatch");
  typename GaussianMixture<Scalar>::Vector out = GaussianMixture<Scalar>::Vector::Zero(xs.rows());
  for (const auto& t : mixture.terms()) out += t.weight() * t.basis_rows(xs);
  return out;
}

/// Closed-form L2 inner product of the two unweighted basis functions:
/// the Gaussian product integral.
template <class Scalar>
Scalar basis_inner_product(const GaussianTerm<Scalar>& a, const GaussianTerm<Scalar>& b) {
  using Matrix = typename GaussianTerm<Scalar>::Matrix;
  using Vector = typename GaussianTerm<Scalar>::Vector;
  if (a.dim() != b.dim()) throw std::domain_error("basis_inner_product: dimension mismatch");
  const int d = a.dim();
  const Matrix sum = a.precision() + b.precision();
  Eigen::LLT<Matrix> llt(sum);
  const Vector delta = a.center() - b.center();
  // (Ba^{-1} + Bb^{-1})^{-1} = Ba (Ba + Bb)^{-1} Bb
  const Vector w = llt.solve(b.precision() * delta);
  const Scalar quad = delta.dot(a.precision() * w);
  const Scalar log_det_sum = Scalar(2) * llt.matrixLLT().diagonal().array().log().sum();
  const Scalar log_integral = Scalar(0.5) * Scalar(d) * std::log(Scalar(2) * std::numbers::pi_v<Scalar>) -
                              Scalar(0.5) * log_det_sum - Scalar(0.5) * quad;
  return std::exp(a.log_amplitude() + b.log_amplitude() + log_integral);
}

template <class Scalar>
Scalar l2_inner(const GaussianMixture<Scalar>& f, const GaussianMixture<Scalar>& g) {
  if (f.dim() != g.dim()) throw std::domain_error("l2_inner: dimension mismatch");
  Scalar s(0);
  for (const auto& a : f.terms())
    for (const auto& b : g.terms()) s += a.weight() * b.weight() * basis_inner_product(a, b);
  return s;
}

/// Exact L2 norm of the mixture as a function on R^d.
template <class Scalar>
Scalar l2_norm(const GaussianMixture<Scalar>& f) {
  return std::sqrt(std::max(Scalar(0), l2_inner(f, f)));
}

/// Backward action of one Gaussian transition step on a mixture:
///   z -> discount * E[f(z + mean + xi)],  xi ~ N(0, cov).
///
/// Each term maps to the Gaussian convolution with covariance B^{-1} + cov,
/// re-expressed in normalized-amplitude form, so term count is preserved.
template <class Scalar>
GaussianMixture<Scalar> propagate(const GaussianMixture<Scalar>& f,
                                  const typename GaussianMixture<Scalar>::Vector& mean,
                                  const typename GaussianMixture<Scalar>::Matrix& cov, Scalar discount) {
  using Matrix = typename GaussianMixture<Scalar>::Matrix;
  const int d = f.dim();
  if (mean.size() != d || cov.rows() != d || cov.cols() != d)
    throw std::domain_error("propagate: dimension mismatch");
  const Matrix identity = Matrix::Identity(d, d);
  GaussianMixture<Scalar> out(d);
  for (const auto& t : f.terms()) {
    // B' = (B^{-1} + cov)^{-1} = (I + B cov)^{-1} B
    const Matrix spread = identity + t.precision() * cov;
    Eigen::PartialPivLU<Matrix> lu(spread);
    Matrix next = lu.solve(t.precision());
    next = (Scalar(0.5) * (next + next.transpose())).eval();
    const Scalar log_shrink = -Scalar(0.5) * std::log(std::abs(lu.determinant()));
    GaussianTerm<Scalar> moved(Scalar(1), std::move(next), t.center() - mean);
    const Scalar w = discount * t.weight() * std::exp(t.log_amplitude() + log_shrink - moved.log_amplitude());
    out.add(moved.with_weight(w));
  }
  return out;
}

}  // namespace ilat
