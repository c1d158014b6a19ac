#ifndef SAFESCREEN_LOSSES_HPP
#define SAFESCREEN_LOSSES_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "safescreen/core.hpp"

namespace safescreen {

enum class LossFamily {
  ScreeningFriendlyRegression,  // 1/2 [|t| - mu]_+^2
  SafeLogistic,                 // e^{t+mu-1} - (t+mu) for t <= 1-mu, else 0
  Hinge,                        // 1/2 [1 - t - mu]_+
  SquaredHinge,                 // [1 - t - mu]_+^2
  Huber,                        // t^2/(2mu) on |t| <= mu, |t| - mu/2 elsewhere
  Square,                       // t^2/2
  Logistic                      // log(1 + e^{-t})
};

inline const char* to_string(LossFamily family) {
  switch (family) {
    case LossFamily::ScreeningFriendlyRegression: return "sreg";
    case LossFamily::SafeLogistic: return "safelog";
    case LossFamily::Hinge: return "hinge";
    case LossFamily::SquaredHinge: return "sqhinge";
    case LossFamily::Huber: return "huber";
    case LossFamily::Square: return "square";
    case LossFamily::Logistic: return "logistic";
  }
  return "?";
}

inline LossFamily parse_loss_family(const std::string& name) {
  for (auto f : {LossFamily::ScreeningFriendlyRegression, LossFamily::SafeLogistic,
                 LossFamily::Hinge, LossFamily::SquaredHinge, LossFamily::Huber,
                 LossFamily::Square, LossFamily::Logistic})
    if (name == to_string(f)) return f;
  throw InvalidArgument("unknown loss '" + name + "'");
}

/// Zero set of a safe loss. Either bound may be infinite.
template <typename Scalar>
struct FlatInterval {
  Scalar lo;
  Scalar hi;

  bool in_interior(Scalar t) const { return t > lo && t < hi; }
  bool contains(Scalar t) const { return t >= lo && t <= hi; }
};

/// A scalar margin loss phi with its threshold parameter mu.
template <typename Scalar>
class SafeLoss {
 public:
  SafeLoss(LossFamily family, Scalar mu) : family_(family), mu_(mu) {
    if (!(mu >= Scalar(0)) || !std::isfinite(mu)) throw InvalidArgument("mu must be nonnegative");
    if ((family == LossFamily::ScreeningFriendlyRegression || family == LossFamily::Huber) &&
        !(mu > Scalar(0)))
      throw InvalidArgument(std::string(to_string(family)) + " loss needs mu > 0");
  }

  LossFamily family() const noexcept { return family_; }
  Scalar mu() const noexcept { return mu_; }

  /// True when the loss has a non-trivial flat interval.
  bool is_safe() const noexcept {
    return family_ == LossFamily::ScreeningFriendlyRegression ||
           family_ == LossFamily::SafeLogistic || family_ == LossFamily::Hinge ||
           family_ == LossFamily::SquaredHinge;
  }

  bool is_differentiable() const noexcept { return family_ != LossFamily::Hinge; }

  /// Margin-based (t = b a'x) as opposed to residual-based (t = a'x - b).
  bool is_classification() const noexcept {
    return family_ == LossFamily::SafeLogistic || family_ == LossFamily::Hinge ||
           family_ == LossFamily::SquaredHinge || family_ == LossFamily::Logistic;
  }

 private:
  LossFamily family_;
  Scalar mu_;
};

template <typename Scalar>
constexpr Scalar infinity() {
  return std::numeric_limits<Scalar>::infinity();
}

namespace detail {

template <typename Scalar>
Scalar positive_part(Scalar v) {
  return v > Scalar(0) ? v : Scalar(0);
}

// x log x with the 0 log 0 = 0 convention.
template <typename Scalar>
Scalar xlogx(Scalar x) {
  return x > Scalar(0) ? x * std::log(x) : Scalar(0);
}

}  // namespace detail

template <typename Scalar>
Scalar loss_eval(const SafeLoss<Scalar>& loss, Scalar t) {
  using detail::positive_part;
  const Scalar mu = loss.mu();
  switch (loss.family()) {
    case LossFamily::ScreeningFriendlyRegression: {
      const Scalar r = positive_part(std::abs(t) - mu);
      return Scalar(0.5) * r * r;
    }
    case LossFamily::SafeLogistic: {
      const Scalar u = t + mu;
      if (u - Scalar(1) >= Scalar(0)) return Scalar(0);
      // expm1 keeps the value accurate (and nonnegative) near the flat boundary.
      return std::expm1(u - Scalar(1)) - (u - Scalar(1));
    }
    case LossFamily::Hinge:
      return Scalar(0.5) * positive_part(Scalar(1) - t - mu);
    case LossFamily::SquaredHinge: {
      const Scalar r = positive_part(Scalar(1) - t - mu);
      return r * r;
    }
    case LossFamily::Huber: {
      const Scalar a = std::abs(t);
      return a <= mu ? t * t / (Scalar(2) * mu) : a - mu / Scalar(2);
    }
    case LossFamily::Square:
      return Scalar(0.5) * t * t;
    case LossFamily::Logistic:
      // log(1 + e^{-t}) without overflow
      return t > Scalar(0) ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
  }
  return Scalar(0);
}

/// Sum of the loss over the coordinates of t.
template <typename Scalar, typename Derived>
Scalar loss_eval(const SafeLoss<Scalar>& loss, const Eigen::MatrixBase<Derived>& t) {
  Scalar total = 0;
  for (Index i = 0; i < t.size(); ++i) total += loss_eval(loss, Scalar(t(i)));
  return total;
}

/// Derivative where it exists. The hinge returns 0 at its kink 1 - mu.
template <typename Scalar>
Scalar loss_subgradient(const SafeLoss<Scalar>& loss, Scalar t) {
  const Scalar mu = loss.mu();
  switch (loss.family()) {
    case LossFamily::ScreeningFriendlyRegression: {
      const Scalar r = detail::positive_part(std::abs(t) - mu);
      return t > Scalar(0) ? r : -r;
    }
    case LossFamily::SafeLogistic: {
      const Scalar u = t + mu - Scalar(1);
      return u >= Scalar(0) ? Scalar(0) : std::expm1(u);
    }
    case LossFamily::Hinge:
      return Scalar(1) - t - mu > Scalar(0) ? Scalar(-0.5) : Scalar(0);
    case LossFamily::SquaredHinge:
      return Scalar(-2) * detail::positive_part(Scalar(1) - t - mu);
    case LossFamily::Huber:
      if (std::abs(t) <= mu) return t / mu;
      return t > Scalar(0) ? Scalar(1) : Scalar(-1);
    case LossFamily::Square:
      return t;
    case LossFamily::Logistic:
      return Scalar(-1) / (Scalar(1) + std::exp(t));
  }
  return Scalar(0);
}

template <typename Scalar, typename Derived>
Vector<Scalar> loss_subgradient(const SafeLoss<Scalar>& loss,
                                const Eigen::MatrixBase<Derived>& t) {
  Vector<Scalar> g(t.size());
  for (Index i = 0; i < t.size(); ++i) g[i] = loss_subgradient(loss, Scalar(t(i)));
  return g;
}

/// Fenchel conjugate phi*(y); +infinity outside the conjugate's domain.
template <typename Scalar>
Scalar loss_conjugate(const SafeLoss<Scalar>& loss, Scalar y) {
  const Scalar mu = loss.mu();
  const Scalar inf = infinity<Scalar>();
  switch (loss.family()) {
    case LossFamily::ScreeningFriendlyRegression:
      return Scalar(0.5) * y * y + mu * std::abs(y);
    case LossFamily::SafeLogistic:
      // conjugate of e^{u-1} - u restricted to u <= 1, shifted by mu
      if (y < Scalar(-1) || y > Scalar(0)) return inf;
      return detail::xlogx(Scalar(1) + y) - mu * y;
    case LossFamily::Hinge:
      if (y < Scalar(-0.5) || y > Scalar(0)) return inf;
      return (Scalar(1) - mu) * y;
    case LossFamily::SquaredHinge:
      if (y > Scalar(0)) return inf;
      return (Scalar(1) - mu) * y + y * y / Scalar(4);
    case LossFamily::Huber:
      if (std::abs(y) > Scalar(1)) return inf;
      return Scalar(0.5) * mu * y * y;
    case LossFamily::Square:
      return Scalar(0.5) * y * y;
    case LossFamily::Logistic:
      if (y < Scalar(-1) || y > Scalar(0)) return inf;
      return detail::xlogx(-y) + detail::xlogx(Scalar(1) + y);
  }
  return inf;
}

template <typename Scalar>
FlatInterval<Scalar> flat_interval(const SafeLoss<Scalar>& loss) {
  switch (loss.family()) {
    case LossFamily::ScreeningFriendlyRegression:
      return {-loss.mu(), loss.mu()};
    case LossFamily::SafeLogistic:
    case LossFamily::Hinge:
    case LossFamily::SquaredHinge:
      return {Scalar(1) - loss.mu(), infinity<Scalar>()};
    default:
      throw InvalidArgument(std::string("no flat interval for loss '") +
                            to_string(loss.family()) + "'");
  }
}

/// Numeric infimal convolution
///   min_z base(z) + mu * omega_star((t - z) / mu)
/// over a grid of z in [-grid_halfwidth, grid_halfwidth], followed by local
/// grid refinement around the best point until the spacing drops below 1e-12.
/// Test oracle only; omega_star may return +infinity (indicators).
template <typename Scalar>
Scalar infconv_oracle(const std::function<Scalar(Scalar)>& base,
                      const std::function<Scalar(Scalar)>& omega_star, Scalar mu, Scalar t,
                      Scalar grid_halfwidth, Scalar grid_step) {
  if (!(mu > Scalar(0))) throw InvalidArgument("infconv oracle needs mu > 0");
  if (!(grid_step > Scalar(0)) || !(grid_halfwidth > Scalar(0)))
    throw InvalidArgument("grid must be non-degenerate");
  auto objective = [&](Scalar z) { return base(z) + mu * omega_star((t - z) / mu); };
  const auto count = static_cast<long long>(std::ceil(Scalar(2) * grid_halfwidth / grid_step));
  Scalar best = infinity<Scalar>();
  Scalar best_z = Scalar(0);
  for (long long k = 0; k <= count; ++k) {
    const Scalar z = -grid_halfwidth + static_cast<Scalar>(k) * grid_step;
    const Scalar v = objective(z);
    if (v < best) {
      best = v;
      best_z = z;
    }
  }
  Scalar h = grid_step;
  while (h > Scalar(1e-12) && std::isfinite(best)) {
    const Scalar center = best_z;
    for (int k = -20; k <= 20; ++k) {
      const Scalar z = center + static_cast<Scalar>(k) * h / Scalar(20);
      const Scalar v = objective(z);
      if (v < best) {
        best = v;
        best_z = z;
      }
    }
    h /= Scalar(10);
  }
  return best;
}

}  // namespace safescreen

#endif  // SAFESCREEN_LOSSES_HPP
