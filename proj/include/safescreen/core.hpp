#ifndef SAFESCREEN_CORE_HPP
#define SAFESCREEN_CORE_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace safescreen {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Raised when an input violates an operation's contract.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by the text readers; carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

enum class ProblemKind { Regression, Classification, Interval };

enum class ModelMode { Linear, Kernelized };

inline const char* to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Regression: return "regression";
    case ProblemKind::Classification: return "classification";
    case ProblemKind::Interval: return "interval";
  }
  return "?";
}

inline ProblemKind parse_problem_kind(const std::string& name) {
  if (name == "regression") return ProblemKind::Regression;
  if (name == "classification") return ProblemKind::Classification;
  if (name == "interval") return ProblemKind::Interval;
  throw InvalidArgument("unknown problem kind '" + name + "'");
}

/// Design matrix, labels and problem kind. Immutable once built.
///
/// Interval datasets store each interval as its center (the label) plus a
/// half-width shared by every sample.
template <typename Scalar>
class Dataset {
 public:
  Dataset(Matrix<Scalar> features, Vector<Scalar> labels, ProblemKind kind,
          std::optional<Scalar> interval_halfwidth = std::nullopt)
      : features_(std::move(features)),
        labels_(std::move(labels)),
        kind_(kind),
        interval_halfwidth_(interval_halfwidth) {
    if (features_.rows() < 1 || features_.cols() < 1)
      throw InvalidArgument("dataset needs n >= 1 and p >= 1");
    if (labels_.size() != features_.rows())
      throw InvalidArgument("labels length does not match number of samples");
    if (kind_ == ProblemKind::Classification) {
      for (Index i = 0; i < labels_.size(); ++i)
        if (labels_[i] != Scalar(1) && labels_[i] != Scalar(-1))
          throw InvalidArgument("invalid label: classification labels must be +1 or -1");
    }
    if (kind_ == ProblemKind::Interval) {
      if (!interval_halfwidth_ || !(*interval_halfwidth_ > Scalar(0)))
        throw InvalidArgument("interval datasets need a positive half-width");
    } else if (interval_halfwidth_) {
      throw InvalidArgument("half-width given for a non-interval dataset");
    }
  }

  const Matrix<Scalar>& features() const noexcept { return features_; }
  const Vector<Scalar>& labels() const noexcept { return labels_; }
  ProblemKind kind() const noexcept { return kind_; }
  std::optional<Scalar> interval_halfwidth() const noexcept { return interval_halfwidth_; }
  Index n() const noexcept { return features_.rows(); }
  Index p() const noexcept { return features_.cols(); }

  Dataset subset(const std::vector<Index>& rows) const {
    Matrix<Scalar> a(static_cast<Index>(rows.size()), p());
    Vector<Scalar> b(static_cast<Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      a.row(static_cast<Index>(r)) = features_.row(rows[r]);
      b[static_cast<Index>(r)] = labels_[rows[r]];
    }
    return Dataset(std::move(a), std::move(b), kind_, interval_halfwidth_);
  }

 private:
  Matrix<Scalar> features_;
  Vector<Scalar> labels_;
  ProblemKind kind_;
  std::optional<Scalar> interval_halfwidth_;
};

/// Keep/discard decision and screening score per sample.
template <typename Scalar>
struct SampleMask {
  std::vector<bool> keep;
  Vector<Scalar> scores;

  static SampleMask keep_all(Index n) {
    return {std::vector<bool>(static_cast<std::size_t>(n), true), Vector<Scalar>::Zero(n)};
  }

  Index size() const noexcept { return static_cast<Index>(keep.size()); }

  Index n_discarded() const {
    return static_cast<Index>(std::count(keep.begin(), keep.end(), false));
  }

  std::vector<Index> kept_indices() const {
    std::vector<Index> out;
    for (std::size_t i = 0; i < keep.size(); ++i)
      if (keep[i]) out.push_back(static_cast<Index>(i));
    return out;
  }

  friend bool operator==(const SampleMask& lhs, const SampleMask& rhs) {
    return lhs.keep == rhs.keep && lhs.scores.size() == rhs.scores.size() &&
           lhs.scores == rhs.scores;
  }
};

/// Primal coefficients (length p) or representer weights (length n).
template <typename Scalar>
struct ModelVector {
  Vector<Scalar> coefficients;
  ModelMode mode = ModelMode::Linear;

  bool is_finite() const { return coefficients.allFinite(); }
};

template <typename Scalar>
struct SyntheticRegression {
  Dataset<Scalar> data;
  ModelVector<Scalar> truth;
};

namespace detail {

template <typename Scalar>
Vector<Scalar> sparse_truth(Index p, Index sparsity, std::mt19937_64& rng) {
  std::vector<Index> support(static_cast<std::size_t>(p));
  std::iota(support.begin(), support.end(), Index(0));
  std::shuffle(support.begin(), support.end(), rng);
  std::normal_distribution<Scalar> normal(0, 1);
  Vector<Scalar> x = Vector<Scalar>::Zero(p);
  for (Index j = 0; j < sparsity; ++j) x[support[static_cast<std::size_t>(j)]] = normal(rng);
  return x;
}

template <typename Scalar>
Matrix<Scalar> uniform_design(Index n, Index p, std::mt19937_64& rng) {
  std::uniform_real_distribution<Scalar> unif(-1, 1);
  Matrix<Scalar> a(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) a(i, j) = unif(rng);
  return a;
}

inline void check_sizes(Index n, Index p, Index sparsity) {
  if (n < 1 || p < 1) throw InvalidArgument("n and p must be positive");
  if (sparsity < 1 || sparsity > p) throw InvalidArgument("sparsity must lie in [1, p]");
}

}  // namespace detail

/// b = A x + eps with A uniform on [-1, 1], x with `sparsity` standard normal
/// nonzeros at random positions and eps ~ N(0, sigma^2).
template <typename Scalar = double>
SyntheticRegression<Scalar> gen_synthetic_regression(Index n, Index p, Index sparsity,
                                                     Scalar sigma, std::uint64_t seed) {
  detail::check_sizes(n, p, sparsity);
  if (!(sigma >= Scalar(0))) throw InvalidArgument("sigma must be nonnegative");
  std::mt19937_64 rng(seed);
  Vector<Scalar> x = detail::sparse_truth<Scalar>(p, sparsity, rng);
  Matrix<Scalar> a = detail::uniform_design<Scalar>(n, p, rng);
  Vector<Scalar> b = a * x;
  if (sigma > Scalar(0)) {
    std::normal_distribution<Scalar> noise(0, sigma);
    for (Index i = 0; i < n; ++i) b[i] += noise(rng);
  }
  return {Dataset<Scalar>(std::move(a), std::move(b), ProblemKind::Regression),
          ModelVector<Scalar>{std::move(x), ModelMode::Linear}};
}

/// Same generator as the regression one, labels are the signs of A x + eps.
template <typename Scalar = double>
SyntheticRegression<Scalar> gen_synthetic_classification(Index n, Index p, Index sparsity,
                                                         Scalar sigma, std::uint64_t seed) {
  auto reg = gen_synthetic_regression<Scalar>(n, p, sparsity, sigma, seed);
  Vector<Scalar> b = reg.data.labels().unaryExpr(
      [](Scalar v) { return v >= Scalar(0) ? Scalar(1) : Scalar(-1); });
  return {Dataset<Scalar>(reg.data.features(), std::move(b), ProblemKind::Classification),
          std::move(reg.truth)};
}

/// Interval regression data: every label is the center of [b_i - h, b_i + h].
template <typename Scalar = double>
Dataset<Scalar> gen_interval_dataset(Index n, Index p, Scalar halfwidth, std::uint64_t seed,
                                     Index sparsity = 1, Scalar sigma = Scalar(0.01)) {
  if (!(halfwidth > Scalar(0))) throw InvalidArgument("halfwidth must be positive");
  auto reg = gen_synthetic_regression<Scalar>(n, p, sparsity, sigma, seed);
  return Dataset<Scalar>(reg.data.features(), reg.data.labels(), ProblemKind::Interval,
                         halfwidth);
}

/// Random train/test split; the test part holds round(fraction * n) samples.
template <typename Scalar>
std::pair<Dataset<Scalar>, Dataset<Scalar>> split_dataset(const Dataset<Scalar>& data,
                                                          double test_fraction,
                                                          std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw InvalidArgument("test fraction must lie in (0, 1)");
  const auto n_test = static_cast<Index>(std::llround(test_fraction * static_cast<double>(data.n())));
  if (n_test < 1 || n_test >= data.n()) throw InvalidArgument("split leaves an empty side");
  std::vector<Index> order(static_cast<std::size_t>(data.n()));
  std::iota(order.begin(), order.end(), Index(0));
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Index> test(order.begin(), order.begin() + n_test);
  std::vector<Index> train(order.begin() + n_test, order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {data.subset(train), data.subset(test)};
}

}  // namespace safescreen

#endif  // SAFESCREEN_CORE_HPP
