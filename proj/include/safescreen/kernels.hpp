#ifndef SAFESCREEN_KERNELS_HPP
#define SAFESCREEN_KERNELS_HPP

#include <cmath>
#include <optional>

#include "safescreen/core.hpp"
#include "safescreen/erm.hpp"

namespace safescreen {

template <typename Scalar>
struct GramMatrix {
  Matrix<Scalar> values;
  std::optional<Scalar> bandwidth;  // empty for the linear kernel
};

/// K_ij = exp(-||a_i - a_j||^2 / (2 sigma^2)).
template <typename Scalar>
GramMatrix<Scalar> gaussian_gram(const Dataset<Scalar>& data, Scalar sigma) {
  if (!(sigma > Scalar(0))) throw InvalidArgument("kernel bandwidth sigma must be positive");
  const Matrix<Scalar>& a = data.features();
  const Index n = data.n();
  const Vector<Scalar> sq = a.rowwise().squaredNorm();
  const Matrix<Scalar> inner = a * a.transpose();
  const Scalar denom = Scalar(2) * sigma * sigma;
  Matrix<Scalar> k(n, n);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    k(i, i) = Scalar(1);
    for (Index j = 0; j < i; ++j) {
      const Scalar d2 = std::max(sq[i] + sq[j] - Scalar(2) * inner(i, j), Scalar(0));
      k(i, j) = std::exp(-d2 / denom);
    }
  }
  k.template triangularView<Eigen::StrictlyUpper>() = k.transpose();
  return {std::move(k), sigma};
}

/// K = A A'.
template <typename Scalar>
GramMatrix<Scalar> linear_gram(const Dataset<Scalar>& data) {
  Matrix<Scalar> k = data.features() * data.features().transpose();
  k = (Scalar(0.5) * (k + k.transpose())).eval();
  return {std::move(k), std::nullopt};
}

/// Problem over representer weights alpha with margins from Gram rows and
/// penalty lambda alpha'K alpha. With the linear kernel this matches the
/// linear L2sq problem at 2 lambda (lambda ||x||^2 versus lambda/2 ||x||^2).
template <typename Scalar>
ErmProblem<Scalar> kernelize(const ErmProblem<Scalar>& problem, const GramMatrix<Scalar>& gram) {
  if (problem.is_kernelized()) throw InvalidArgument("problem is already kernelized");
  if (problem.penalty() != Penalty::L2sq)
    throw InvalidArgument("kernel mode needs the squared RKHS norm; L1 penalty rejected");
  return ErmProblem<Scalar>::kernelized(problem.data(), problem.loss(), problem.lambda(),
                                        gram.values);
}

}  // namespace safescreen

#endif  // SAFESCREEN_KERNELS_HPP
