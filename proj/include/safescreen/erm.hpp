#ifndef SAFESCREEN_ERM_HPP
#define SAFESCREEN_ERM_HPP

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "safescreen/core.hpp"
#include "safescreen/losses.hpp"

namespace safescreen {

/// L1 is ||x||_1, L2sq is 1/2 ||x||_2^2.
enum class Penalty { L1, L2sq };

inline const char* to_string(Penalty penalty) {
  return penalty == Penalty::L1 ? "l1" : "l2sq";
}

inline Penalty parse_penalty(const std::string& name) {
  if (name == "l1") return Penalty::L1;
  if (name == "l2sq" || name == "l2") return Penalty::L2sq;
  throw InvalidArgument("unknown penalty '" + name + "'");
}

/// Raised by the solver on a non-finite objective.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// P(x) = (1/n) sum_i phi(t_i(x)) + lambda R(x).
///
/// Margins are t_i = a_i'x - b_i for regression and interval data and
/// t_i = b_i a_i'x for classification. In kernelized mode the variable is the
/// representer weight vector alpha, a_i'x becomes [K]_i alpha and the penalty
/// is lambda alpha'K alpha.
template <typename Scalar>
class ErmProblem {
 public:
  static ErmProblem linear(Dataset<Scalar> data, SafeLoss<Scalar> loss, Penalty penalty,
                           Scalar lambda) {
    return ErmProblem(std::move(data), loss, penalty, lambda, ModelMode::Linear, std::nullopt);
  }

  /// The Gram matrix must be n x n, symmetric and positive semi-definite.
  static ErmProblem kernelized(Dataset<Scalar> data, SafeLoss<Scalar> loss, Scalar lambda,
                               Matrix<Scalar> gram) {
    return ErmProblem(std::move(data), loss, Penalty::L2sq, lambda, ModelMode::Kernelized,
                      std::move(gram));
  }

  const Dataset<Scalar>& data() const noexcept { return data_; }
  const SafeLoss<Scalar>& loss() const noexcept { return loss_; }
  Penalty penalty() const noexcept { return penalty_; }
  Scalar lambda() const noexcept { return lambda_; }
  ModelMode mode() const noexcept { return mode_; }
  bool is_kernelized() const noexcept { return mode_ == ModelMode::Kernelized; }
  const std::optional<Matrix<Scalar>>& gram() const noexcept { return gram_; }
  Index n() const noexcept { return data_.n(); }

  /// Dimension of the optimization variable (p, or n in kernelized mode).
  Index dim() const noexcept { return is_kernelized() ? data_.n() : data_.p(); }

  /// Rows a_i (or [K]_i) that enter the margins linearly.
  const Matrix<Scalar>& design() const noexcept {
    return is_kernelized() ? *gram_ : data_.features();
  }

  /// t = signs .* (design x) - offsets.
  const Vector<Scalar>& signs() const noexcept { return signs_; }
  const Vector<Scalar>& offsets() const noexcept { return offsets_; }

  /// Problem restricted to `rows` whose minimizer coincides with the full
  /// problem's whenever the dropped samples have zero dual variables: the
  /// loss keeps its 1/n normalization, folded into lambda * n / |rows|.
  ErmProblem subset(const std::vector<Index>& rows) const {
    if (rows.empty()) throw InvalidArgument("subset must keep at least one sample");
    const Scalar scaled =
        lambda_ * static_cast<Scalar>(n()) / static_cast<Scalar>(rows.size());
    auto sub = data_.subset(rows);
    if (!is_kernelized()) return linear(std::move(sub), loss_, penalty_, scaled);
    Matrix<Scalar> k(static_cast<Index>(rows.size()), static_cast<Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < rows.size(); ++c)
        k(static_cast<Index>(r), static_cast<Index>(c)) = (*gram_)(rows[r], rows[c]);
    return ErmProblem(std::move(sub), loss_, penalty_, scaled, mode_, std::move(k), false);
  }

  ErmProblem with_lambda(Scalar lambda) const {
    return ErmProblem(data_, loss_, penalty_, lambda, mode_, gram_, false);
  }

 private:
  ErmProblem(Dataset<Scalar> data, SafeLoss<Scalar> loss, Penalty penalty, Scalar lambda,
             ModelMode mode, std::optional<Matrix<Scalar>> gram, bool check_gram = true)
      : data_(std::move(data)),
        loss_(loss),
        penalty_(penalty),
        lambda_(lambda),
        mode_(mode),
        gram_(std::move(gram)) {
    if (!(lambda_ > Scalar(0)) || !std::isfinite(lambda_))
      throw InvalidArgument("lambda must be positive");
    const bool classif = data_.kind() == ProblemKind::Classification;
    if (classif != loss_.is_classification())
      throw InvalidArgument(std::string("loss '") + to_string(loss_.family()) +
                            "' does not match a " + to_string(data_.kind()) + " dataset");
    if (data_.kind() == ProblemKind::Interval &&
        loss_.family() != LossFamily::ScreeningFriendlyRegression)
      throw InvalidArgument("interval data needs the screening-friendly regression loss");
    if (mode_ == ModelMode::Kernelized) {
      if (penalty_ != Penalty::L2sq) throw InvalidArgument("L1 penalty is not supported in kernel mode");
      if (!gram_ || gram_->rows() != data_.n() || gram_->cols() != data_.n())
        throw InvalidArgument("Gram matrix must be n x n");
      if (check_gram) validate_gram(*gram_);
    }
    if (classif) {
      signs_ = data_.labels();
      offsets_ = Vector<Scalar>::Zero(data_.n());
    } else {
      signs_ = Vector<Scalar>::Ones(data_.n());
      offsets_ = data_.labels();
    }
  }

  static void validate_gram(const Matrix<Scalar>& k) {
    if ((k - k.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-10))
      throw InvalidArgument("Gram matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(k, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < Scalar(-1e-8))
      throw InvalidArgument("Gram matrix is not positive semi-definite");
  }

  Dataset<Scalar> data_;
  SafeLoss<Scalar> loss_;
  Penalty penalty_;
  Scalar lambda_;
  ModelMode mode_;
  std::optional<Matrix<Scalar>> gram_;
  Vector<Scalar> signs_;
  Vector<Scalar> offsets_;
};

namespace detail {

template <typename Scalar>
void check_dim(const ErmProblem<Scalar>& problem, Index size) {
  if (size != problem.dim())
    throw InvalidArgument("model has length " + std::to_string(size) + ", expected " +
                          std::to_string(problem.dim()));
}

}  // namespace detail

template <typename Scalar>
Vector<Scalar> margin_vector(const ErmProblem<Scalar>& problem, const Vector<Scalar>& x) {
  detail::check_dim(problem, x.size());
  return problem.signs().cwiseProduct(problem.design() * x) - problem.offsets();
}

template <typename Scalar>
Vector<Scalar> margin_vector(const ErmProblem<Scalar>& problem, const ModelVector<Scalar>& x) {
  return margin_vector(problem, x.coefficients);
}

template <typename Scalar>
Scalar penalty_value(const ErmProblem<Scalar>& problem, const Vector<Scalar>& x) {
  if (problem.is_kernelized()) return x.dot(*problem.gram() * x);
  return problem.penalty() == Penalty::L1 ? x.template lpNorm<1>() : Scalar(0.5) * x.squaredNorm();
}

template <typename Scalar>
Scalar primal_objective(const ErmProblem<Scalar>& problem, const Vector<Scalar>& x) {
  const Vector<Scalar> t = margin_vector(problem, x);
  return loss_eval(problem.loss(), t) / static_cast<Scalar>(problem.n()) +
         problem.lambda() * penalty_value(problem, x);
}

/// Dual objective in the margin convention nu_i = phi'(t_i). Returns
/// -infinity outside the dual domain.
template <typename Scalar>
Scalar dual_objective(const ErmProblem<Scalar>& problem, const Vector<Scalar>& nu) {
  if (nu.size() != problem.n()) throw InvalidArgument("dual vector must have length n");
  const Scalar n = static_cast<Scalar>(problem.n());
  const Scalar lambda = problem.lambda();
  Scalar conj_sum = 0;
  for (Index i = 0; i < nu.size(); ++i) {
    const Scalar c = loss_conjugate(problem.loss(), nu[i]);
    if (!std::isfinite(c)) return -infinity<Scalar>();
    conj_sum += c + problem.offsets()[i] * nu[i];
  }
  const Vector<Scalar> u = problem.signs().cwiseProduct(nu);
  Scalar reg_conj = 0;
  if (problem.is_kernelized()) {
    reg_conj = u.dot(*problem.gram() * u) / (Scalar(4) * lambda * n * n);
  } else {
    const Vector<Scalar> v = -(problem.design().transpose() * u) / (lambda * n);
    if (problem.penalty() == Penalty::L2sq) {
      reg_conj = lambda * Scalar(0.5) * v.squaredNorm();
    } else if (v.size() > 0 && v.cwiseAbs().maxCoeff() > Scalar(1) + Scalar(1e-12)) {
      return -infinity<Scalar>();
    }
  }
  return -conj_sum / n - reg_conj;
}

/// nu_i = phi'(t_i); at the optimum of the linear L2sq problem
/// x = -A' diag(signs) nu / (lambda n).
template <typename Scalar>
Vector<Scalar> dual_from_primal(const ErmProblem<Scalar>& problem, const Vector<Scalar>& x) {
  return loss_subgradient(problem.loss(), margin_vector(problem, x));
}

/// Residual of the primal-dual link x + A' diag(signs) nu / (lambda n); in
/// kernelized mode alpha + diag(signs) nu / (2 lambda n).
template <typename Scalar>
Vector<Scalar> kkt_residual(const ErmProblem<Scalar>& problem, const Vector<Scalar>& x) {
  const Vector<Scalar> u = problem.signs().cwiseProduct(dual_from_primal(problem, x));
  const Scalar ln = problem.lambda() * static_cast<Scalar>(problem.n());
  if (problem.is_kernelized()) return x + u / (Scalar(2) * ln);
  return x + problem.design().transpose() * u / ln;
}

/// P(x) - D(nu) with nu from dual_from_primal. For L1 the dual candidate is
/// rescaled into the dual-feasible set first.
template <typename Scalar>
Scalar duality_gap(const ErmProblem<Scalar>& problem, const Vector<Scalar>& x) {
  Vector<Scalar> nu = dual_from_primal(problem, x);
  if (!problem.is_kernelized() && problem.penalty() == Penalty::L1) {
    const Scalar ln = problem.lambda() * static_cast<Scalar>(problem.n());
    const Scalar dual_norm =
        (problem.design().transpose() * problem.signs().cwiseProduct(nu)).cwiseAbs().maxCoeff() / ln;
    if (dual_norm > Scalar(1)) nu /= dual_norm;
  }
  return primal_objective(problem, x) - dual_objective(problem, nu);
}

/// Componentwise sgn(t) [|t| - tau]_+, the prox of tau ||.||_1.
template <typename Derived>
auto soft_threshold(const Eigen::MatrixBase<Derived>& t, typename Derived::Scalar tau) {
  using Scalar = typename Derived::Scalar;
  if (!(tau >= Scalar(0))) throw InvalidArgument("threshold must be nonnegative");
  return t.unaryExpr([tau](Scalar v) {
           const Scalar r = std::abs(v) - tau;
           return r > Scalar(0) ? (v > Scalar(0) ? r : -r) : Scalar(0);
         })
      .eval();
}

/// prox of tau R for the given penalty.
template <typename Scalar, typename Derived>
Vector<Scalar> prox_step(Penalty penalty, const Eigen::MatrixBase<Derived>& t, Scalar tau) {
  if (penalty == Penalty::L1) return soft_threshold(t, tau);
  if (!(tau >= Scalar(0))) throw InvalidArgument("threshold must be nonnegative");
  return t / (Scalar(1) + tau);
}

/// Subgradient of P at x; for L1 uses sign(x) with 0 at 0.
template <typename Scalar>
Vector<Scalar> objective_subgradient(const ErmProblem<Scalar>& problem, const Vector<Scalar>& x) {
  const Vector<Scalar> u = problem.signs().cwiseProduct(dual_from_primal(problem, x));
  const Scalar n = static_cast<Scalar>(problem.n());
  Vector<Scalar> g = problem.design().transpose() * u / n;
  if (problem.is_kernelized()) {
    g += Scalar(2) * problem.lambda() * (*problem.gram() * x);
  } else if (problem.penalty() == Penalty::L1) {
    g += problem.lambda() * x.unaryExpr([](Scalar v) {
      return v > Scalar(0) ? Scalar(1) : (v < Scalar(0) ? Scalar(-1) : Scalar(0));
    });
  } else {
    g += problem.lambda() * x;
  }
  return g;
}

template <typename Scalar>
struct TraceEntry {
  int epoch;
  Scalar primal;
  Scalar gap;
};

template <typename Scalar>
struct SolveTrace {
  std::vector<TraceEntry<Scalar>> iterates;
  ModelVector<Scalar> final;

  int epochs() const { return iterates.empty() ? 0 : iterates.back().epoch; }
  Scalar final_gap() const { return iterates.empty() ? infinity<Scalar>() : iterates.back().gap; }
};

struct SolveOptions {
  int max_epochs = 1000;
  double tol = 1e-8;
};

/// Proximal gradient descent (ISTA) with backtracking, halving the step until
/// the quadratic upper bound holds. One epoch is one accepted step. Stops
/// when the duality gap falls to `tol`.
///
/// In kernelized mode the step follows the RKHS gradient, whose coordinates
/// in alpha are (1/n) diag(signs) phi'(t) + 2 lambda alpha.
template <typename Scalar>
SolveTrace<Scalar> solve(const ErmProblem<Scalar>& problem, int max_epochs, Scalar tol,
                         const std::optional<Vector<Scalar>>& x0 = std::nullopt) {
  if (!problem.loss().is_differentiable())
    throw InvalidArgument("nonsmooth loss unsupported by solver");
  if (max_epochs < 0) throw InvalidArgument("max_epochs must be nonnegative");
  const Index dim = problem.dim();
  Vector<Scalar> x = x0 ? *x0 : Vector<Scalar>::Zero(dim);
  detail::check_dim(problem, x.size());

  const Scalar n = static_cast<Scalar>(problem.n());
  const Scalar lambda = problem.lambda();
  const bool kernel = problem.is_kernelized();
  const Matrix<Scalar>& design = problem.design();

  // Smooth part of the objective and its value at x.
  auto smooth_value = [&](const Vector<Scalar>& v, const Vector<Scalar>& design_v) {
    const Vector<Scalar> t = problem.signs().cwiseProduct(design_v) - problem.offsets();
    Scalar f = loss_eval(problem.loss(), t) / n;
    if (kernel) f += lambda * v.dot(design_v);
    return f;
  };

  SolveTrace<Scalar> trace;
  Vector<Scalar> dx = design * x;
  Scalar smooth = smooth_value(x, dx);
  Scalar primal = smooth + (kernel ? Scalar(0) : lambda * penalty_value(problem, x));
  Scalar gap = duality_gap(problem, x);
  if (!std::isfinite(primal)) throw DivergenceError("objective is not finite at the start point");
  trace.iterates.push_back({0, primal, gap});

  Scalar step = Scalar(1);
  for (int epoch = 1; epoch <= max_epochs && !(gap <= tol); ++epoch) {
    const Vector<Scalar> t = problem.signs().cwiseProduct(dx) - problem.offsets();
    const Vector<Scalar> u = problem.signs().cwiseProduct(loss_subgradient(problem.loss(), t)) / n;
    Vector<Scalar> direction;
    Scalar direction_sq = 0;
    if (kernel) {
      direction = u + Scalar(2) * lambda * x;
      direction_sq = direction.dot(design * direction);
    } else {
      direction = design.transpose() * u;
    }

    step *= Scalar(2);
    Vector<Scalar> candidate;
    Vector<Scalar> d_candidate;
    Scalar smooth_candidate = 0;
    for (int tries = 0;; ++tries) {
      if (tries > 200) throw DivergenceError("line search failed to find a descent step");
      if (kernel) {
        candidate = x - step * direction;
        d_candidate = design * candidate;
        smooth_candidate = smooth_value(candidate, d_candidate);
        if (smooth_candidate <= smooth - Scalar(0.5) * step * direction_sq) break;
      } else {
        candidate = prox_step<Scalar>(problem.penalty(), x - step * direction, step * lambda);
        d_candidate = design * candidate;
        smooth_candidate = smooth_value(candidate, d_candidate);
        const Vector<Scalar> diff = candidate - x;
        if (smooth_candidate <=
            smooth + direction.dot(diff) + diff.squaredNorm() / (Scalar(2) * step))
          break;
      }
      step *= Scalar(0.5);
    }
    x = std::move(candidate);
    dx = std::move(d_candidate);
    smooth = smooth_candidate;
    primal = smooth + (kernel ? Scalar(0) : lambda * penalty_value(problem, x));
    if (!std::isfinite(primal)) throw DivergenceError("objective diverged");
    gap = duality_gap(problem, x);
    trace.iterates.push_back({epoch, primal, gap});
  }
  trace.final = ModelVector<Scalar>{std::move(x), problem.mode()};
  return trace;
}

}  // namespace safescreen

#endif  // SAFESCREEN_ERM_HPP
