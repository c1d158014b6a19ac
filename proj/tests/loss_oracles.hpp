// Independent numeric references for the loss closed forms. Test-only.
#ifndef SAFESCREEN_TESTS_LOSS_ORACLES_HPP
#define SAFESCREEN_TESTS_LOSS_ORACLES_HPP

#include <cmath>
#include <functional>
#include <utility>

#include "safescreen/losses.hpp"

namespace test_oracles {

using safescreen::infinity;
using safescreen::LossFamily;
using safescreen::SafeLoss;

inline double indicator(bool inside) { return inside ? 0.0 : infinity<double>(); }

/// (base, omega_star) whose infimal convolution base □ mu omega_star(./mu)
/// yields the family's closed form.
///   sreg:    1/2 z^2           with the indicator of |y| <= 1
///   huber:   |z|               with 1/2 y^2
///   sqhinge: (1 - z)^2         with the indicator of y >= -1
///   hinge:   1/2 |1 - z|       with the indicator of y >= -1
///   safelog: e^{z-1} - z on z <= 1 (0 beyond), with the indicator of |y| <= 1
inline std::pair<std::function<double(double)>, std::function<double(double)>> construction(
    LossFamily family) {
  switch (family) {
    case LossFamily::ScreeningFriendlyRegression:
      return {[](double z) { return 0.5 * z * z; },
              [](double y) { return indicator(std::abs(y) <= 1.0); }};
    case LossFamily::Huber:
      return {[](double z) { return std::abs(z); }, [](double y) { return 0.5 * y * y; }};
    case LossFamily::SquaredHinge:
      return {[](double z) { return (1.0 - z) * (1.0 - z); },
              [](double y) { return indicator(y >= -1.0); }};
    case LossFamily::Hinge:
      return {[](double z) { return 0.5 * std::abs(1.0 - z); },
              [](double y) { return indicator(y >= -1.0); }};
    case LossFamily::SafeLogistic:
      return {[](double z) { return z <= 1.0 ? std::exp(z - 1.0) - z : 0.0; },
              [](double y) { return indicator(std::abs(y) <= 1.0); }};
    default:
      throw std::invalid_argument("no construction for this family");
  }
}

/// The infimal-convolution oracle at grid step 1e-4 on [-10, 10].
inline double infconv_reference(const SafeLoss<double>& loss, double t) {
  auto [base, omega_star] = construction(loss.family());
  return safescreen::infconv_oracle<double>(base, omega_star, loss.mu(), t, 10.0, 1e-4);
}

/// Ternary search for the max of a concave function on [lo, hi].
inline double maximize_concave(const std::function<double(double)>& f, double lo, double hi,
                               double tol = 1e-10) {
  while (hi - lo > tol) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (f(m1) < f(m2)) lo = m1;
    else hi = m2;
  }
  return f(0.5 * (lo + hi));
}

/// phi*(y) = max_t t y - phi(t), searched on [-50, 50].
inline double conjugate_by_search(const SafeLoss<double>& loss, double y) {
  return maximize_concave(
      [&](double t) { return t * y - safescreen::loss_eval(loss, t); }, -50.0, 50.0);
}

/// phi**(t) = max_y t y - phi*(y) over the conjugate's domain.
inline double biconjugate(const SafeLoss<double>& loss, double t) {
  double lo = -10.0, hi = 10.0;
  switch (loss.family()) {
    case LossFamily::SafeLogistic:
    case LossFamily::Logistic: lo = -1.0; hi = 0.0; break;
    case LossFamily::Hinge: lo = -0.5; hi = 0.0; break;
    case LossFamily::SquaredHinge: hi = 0.0; break;
    case LossFamily::Huber: lo = -1.0; hi = 1.0; break;
    default: break;
  }
  return maximize_concave(
      [&](double y) { return t * y - safescreen::loss_conjugate(loss, y); }, lo, hi, 1e-12);
}

}  // namespace test_oracles

#endif  // SAFESCREEN_TESTS_LOSS_ORACLES_HPP
