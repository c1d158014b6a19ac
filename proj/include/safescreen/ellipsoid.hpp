#ifndef SAFESCREEN_ELLIPSOID_HPP
#define SAFESCREEN_ELLIPSOID_HPP

#include <cmath>
#include <optional>

#include "safescreen/core.hpp"
#include "safescreen/erm.hpp"

namespace safescreen {

/// {x : (x - z)' E^{-1} (x - z) <= 1} with E = s I - L diag(D) L'.
///
/// L holds one column per cut, so products with E cost O(pk) and E is never
/// formed. Values are immutable; step() returns a new ellipsoid.
template <typename Scalar>
class Ellipsoid {
 public:
  /// Ball of the given radius; radius 0 is the single point `center`.
  static Ellipsoid ball(Vector<Scalar> center, Scalar radius) {
    if (!(radius >= Scalar(0)) || !std::isfinite(radius))
      throw InvalidArgument("radius must be finite and nonnegative");
    Ellipsoid e;
    const Index p = center.size();
    e.center_ = std::move(center);
    e.scale_ = radius * radius;
    e.factors_.resize(p, 0);
    e.weights_.resize(0);
    e.log_det_ = static_cast<Scalar>(p) * std::log(e.scale_);
    return e;
  }

  Index dim() const noexcept { return center_.size(); }
  Index rank() const noexcept { return factors_.cols(); }
  const Vector<Scalar>& center() const noexcept { return center_; }
  Scalar scale() const noexcept { return scale_; }
  const Matrix<Scalar>& factors() const noexcept { return factors_; }
  const Vector<Scalar>& weights() const noexcept { return weights_; }
  const std::optional<Vector<Scalar>>& last_cut() const noexcept { return last_cut_; }

  /// log det E, tracked through the closed-form volume ratio of each step.
  Scalar log_det() const noexcept { return log_det_; }

  template <typename Derived>
  Vector<Scalar> apply(const Eigen::MatrixBase<Derived>& v) const {
    if (v.size() != dim()) throw InvalidArgument("vector length does not match ellipsoid dimension");
    Vector<Scalar> out = scale_ * v;
    if (rank() > 0) out.noalias() -= factors_ * weights_.cwiseProduct(factors_.transpose() * v);
    return out;
  }

  Matrix<Scalar> dense() const {
    Matrix<Scalar> e = scale_ * Matrix<Scalar>::Identity(dim(), dim());
    if (rank() > 0) e.noalias() -= factors_ * weights_.asDiagonal() * factors_.transpose();
    return e;
  }

  /// One central-cut update with subgradient g at the center.
  Ellipsoid step(const Vector<Scalar>& g) const {
    const Index p = dim();
    if (p < 2) throw InvalidArgument("ellipsoid updates need dimension p >= 2");
    if (g.size() != p) throw InvalidArgument("cut has wrong dimension");
    if (g.isZero(0)) throw InvalidArgument("cannot cut with a zero subgradient");
    const Vector<Scalar> eg = apply(g);
    const Scalar geg = g.dot(eg);
    if (!(geg > Scalar(0)) || !std::isfinite(geg))
      throw std::runtime_error("ellipsoid matrix lost positive definiteness (g'Eg <= 0)");
    const Scalar pd = static_cast<Scalar>(p);
    const Scalar expand = pd * pd / (pd * pd - Scalar(1));
    const Vector<Scalar> column = eg / std::sqrt(geg);  // E g~

    Ellipsoid next;
    next.center_ = center_ - column / (pd + Scalar(1));
    next.scale_ = scale_ * expand;
    next.factors_.resize(p, rank() + 1);
    next.factors_.leftCols(rank()) = factors_;
    next.factors_.col(rank()) = column;
    next.weights_.resize(rank() + 1);
    next.weights_.head(rank()) = expand * weights_;
    next.weights_[rank()] = expand * Scalar(2) / (pd + Scalar(1));
    next.last_cut_ = g;
    next.log_det_ = log_det_ + log_volume_ratio(p);
    return next;
  }

  /// log(det E_{k+1} / det E_k) = p log(p^2/(p^2-1)) + log((p-1)/(p+1)).
  static Scalar log_volume_ratio(Index p) {
    const Scalar pd = static_cast<Scalar>(p);
    return pd * std::log(pd * pd / (pd * pd - Scalar(1))) + std::log((pd - Scalar(1)) / (pd + Scalar(1)));
  }

 private:
  Ellipsoid() = default;

  Vector<Scalar> center_;
  Scalar scale_ = 0;
  Matrix<Scalar> factors_;
  Vector<Scalar> weights_;
  std::optional<Vector<Scalar>> last_cut_;
  Scalar log_det_ = 0;
};

template <typename Scalar>
Ellipsoid<Scalar> init_ball(Vector<Scalar> center, Scalar radius) {
  if (!(radius > Scalar(0))) throw InvalidArgument("radius must be positive");
  return Ellipsoid<Scalar>::ball(std::move(center), radius);
}

template <typename Scalar, typename Derived>
Vector<Scalar> matvec(const Ellipsoid<Scalar>& e, const Eigen::MatrixBase<Derived>& v) {
  return e.apply(v);
}

template <typename Scalar>
Ellipsoid<Scalar> step(const Ellipsoid<Scalar>& e, const Vector<Scalar>& g) {
  return e.step(g);
}

/// Ellipsoid intersected with the half-space g'(x - z) <= 0.
template <typename Scalar>
struct CutRegion {
  Ellipsoid<Scalar> ellipsoid;
  std::optional<Vector<Scalar>> halfspace_g;
  int steps = 0;
  Scalar initial_radius = 0;
};

/// Runs `n_steps` ellipsoid-method cuts on P starting from ball(x0, radius)
/// and keeps the subgradient at the final center as the half-space cut. A
/// zero subgradient means the center is optimal; the build stops there.
template <typename Scalar>
CutRegion<Scalar> build_region(const ErmProblem<Scalar>& problem, const Vector<Scalar>& x0,
                               Scalar radius, int n_steps) {
  if (n_steps < 0) throw InvalidArgument("n_steps must be nonnegative");
  detail::check_dim(problem, x0.size());
  CutRegion<Scalar> region{init_ball<Scalar>(x0, radius), std::nullopt, 0, radius};
  for (int k = 0; k <= n_steps; ++k) {
    Vector<Scalar> g = objective_subgradient(problem, region.ellipsoid.center());
    if (g.isZero(0)) {
      region.halfspace_g.reset();
      break;
    }
    if (k == n_steps) {
      region.halfspace_g = std::move(g);
      break;
    }
    region.ellipsoid = region.ellipsoid.step(g);
    region.steps = k + 1;
  }
  return region;
}

/// Solves E y = r by conjugate gradients using only products with E.
template <typename Scalar>
Vector<Scalar> solve_ellipsoid_system(const Ellipsoid<Scalar>& e, const Vector<Scalar>& rhs,
                                      Scalar rel_tol = Scalar(1e-10), Index max_iters = -1) {
  if (max_iters < 0) max_iters = 10 * e.dim();
  Vector<Scalar> y = Vector<Scalar>::Zero(rhs.size());
  Vector<Scalar> r = rhs;
  const Scalar target = rel_tol * rhs.norm();
  if (r.norm() <= target) return y;
  Vector<Scalar> d = r;
  Scalar rr = r.squaredNorm();
  for (Index it = 0; it < max_iters; ++it) {
    const Vector<Scalar> ed = e.apply(d);
    const Scalar ded = d.dot(ed);
    if (!(ded > Scalar(0))) break;
    const Scalar alpha = rr / ded;
    y += alpha * d;
    r -= alpha * ed;
    const Scalar rr_next = r.squaredNorm();
    if (std::sqrt(rr_next) <= target) return y;
    d = r + (rr_next / rr) * d;
    rr = rr_next;
  }
  throw std::runtime_error("conjugate gradient did not converge: ellipsoid is ill-conditioned");
}

/// A-posteriori check that x_ref lies in the region (ellipsoid and cut).
template <typename Scalar>
bool verify_containment(const CutRegion<Scalar>& region, const Vector<Scalar>& x_ref,
                        Scalar tol) {
  const auto& e = region.ellipsoid;
  if (x_ref.size() != e.dim()) throw InvalidArgument("reference point has wrong dimension");
  const Vector<Scalar> d = x_ref - e.center();
  if (e.scale() == Scalar(0)) return d.norm() <= tol;
  if (d.isZero(0)) return true;
  const Scalar q = d.dot(solve_ellipsoid_system(e, d));
  if (!(q <= Scalar(1) + tol)) return false;
  if (region.halfspace_g) {
    const auto& g = *region.halfspace_g;
    if (g.dot(d) > tol * g.norm() * std::sqrt(e.scale())) return false;
  }
  return true;
}

}  // namespace safescreen

#endif  // SAFESCREEN_ELLIPSOID_HPP
