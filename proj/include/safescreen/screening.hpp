#ifndef SAFESCREEN_SCREENING_HPP
#define SAFESCREEN_SCREENING_HPP

#include <chrono>
#include <cmath>
#include <optional>
#include <vector>

#include "safescreen/core.hpp"
#include "safescreen/ellipsoid.hpp"
#include "safescreen/erm.hpp"
#include "safescreen/losses.hpp"

namespace safescreen {

/// Extremizes linear forms a'x over a cut region in closed form.
///
/// With E the ellipsoid matrix and g the cut, the maximum of a'x is
///   a'z + sqrt(a'Ea)                      if there is no cut or g'Ea < 0,
///   a'z + sqrt(a'Ea - (g'Ea)^2 / g'Eg)    otherwise.
/// The second line is a'(z + E w / sqrt(w'Ew)) with w = a - (g'Ea / g'Eg) g,
/// the point where the ellipsoid boundary meets the cutting hyperplane. The
/// textbook statement of this test scales E w by 1/(2 gamma) with
/// gamma = sqrt(w'Ew / 2), which overshoots the boundary by a factor sqrt(2)
/// (for E = I, a = e1, g = (1, 1) it gives 1 instead of 1/sqrt(2)); the
/// boundary-normalized form is the exact maximum.
template <typename Scalar>
class RegionProbe {
 public:
  explicit RegionProbe(const CutRegion<Scalar>& region) : region_(region) {
    if (region.halfspace_g) {
      eg_ = region.ellipsoid.apply(*region.halfspace_g);
      geg_ = region.halfspace_g->dot(eg_);
      if (!(geg_ > Scalar(0)) && region.ellipsoid.scale() > Scalar(0))
        throw std::runtime_error("region ellipsoid is not positive definite");
    }
  }

  struct Range {
    Scalar lo;
    Scalar hi;
  };

  /// min and max of a'x over the region.
  template <typename Derived>
  Range range(const Eigen::MatrixBase<Derived>& a) const {
    const auto& e = region_.ellipsoid;
    const Vector<Scalar> ea = e.apply(a);
    const Scalar base = a.dot(e.center());
    const Scalar aea = std::max(a.dot(ea), Scalar(0));
    const Scalar full = std::sqrt(aea);
    if (!region_.halfspace_g || !(geg_ > Scalar(0))) return {base - full, base + full};
    const Scalar gea = eg_.dot(a);
    const Scalar wew = aea - gea * gea / geg_;
    const Scalar deg = Scalar(1e-12) * e.scale() * a.squaredNorm();
    const Scalar cut = wew > deg ? std::sqrt(wew) : Scalar(0);
    // The cut binds for +a when g'Ea >= 0 and for -a when g'Ea <= 0.
    const Scalar up = gea < Scalar(0) ? full : cut;
    const Scalar down = gea > Scalar(0) ? full : cut;
    return {base - down, base + up};
  }

  const CutRegion<Scalar>& region() const noexcept { return region_; }

 private:
  const CutRegion<Scalar>& region_;
  Vector<Scalar> eg_;
  Scalar geg_ = 0;
};

/// max of a'x - b_off over the region.
template <typename Scalar>
Scalar max_linear_over_region(const Vector<Scalar>& a, Scalar b_off,
                              const CutRegion<Scalar>& region) {
  if (a.size() != region.ellipsoid.dim()) throw InvalidArgument("linear form has wrong dimension");
  return RegionProbe<Scalar>(region).range(a).hi - b_off;
}

template <typename Scalar>
struct ScreeningSettings {
  LossFamily loss = LossFamily::ScreeningFriendlyRegression;
  Scalar mu = 0;
  Scalar lambda = 0;
  Penalty penalty = Penalty::L2sq;
  ModelMode mode = ModelMode::Linear;
  int steps = 0;
  Scalar radius = 0;
};

template <typename Scalar>
struct ScreeningReport {
  SampleMask<Scalar> mask;
  Index n_screened = 0;
  Scalar region_volume_logdet = 0;
  ScreeningSettings<Scalar> settings;
  double wall_time = 0;
};

/// The SAFE rule: sample i is discarded when its margin stays in the interior
/// of the loss's flat interval over the whole region, with `strict_eps` slack.
/// Scores are the signed distance from the certified margin range to the
/// nearest finite end of the flat interval (positive means discardable).
template <typename Scalar>
ScreeningReport<Scalar> screen(const ErmProblem<Scalar>& problem, const CutRegion<Scalar>& region,
                               Scalar strict_eps = Scalar(1e-9)) {
  const auto started = std::chrono::steady_clock::now();
  if (!problem.loss().is_safe())
    throw InvalidArgument(std::string("loss '") + to_string(problem.loss().family()) +
                          "' is not safe: no screening possible");
  if (region.ellipsoid.dim() != problem.dim())
    throw InvalidArgument("region does not live in the problem's variable space");
  const FlatInterval<Scalar> flat = flat_interval(problem.loss());
  const RegionProbe<Scalar> probe(region);
  const Matrix<Scalar>& design = problem.design();
  const Index n = problem.n();

  ScreeningReport<Scalar> report;
  report.mask.keep.assign(static_cast<std::size_t>(n), true);
  report.mask.scores.resize(n);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    const auto r = probe.range(design.row(i).transpose());
    const Scalar sign = problem.signs()[i];
    const Scalar off = problem.offsets()[i];
    const Scalar t_lo = (sign > 0 ? r.lo : -r.hi) - off;
    const Scalar t_hi = (sign > 0 ? r.hi : -r.lo) - off;
    Scalar score = infinity<Scalar>();
    if (std::isfinite(flat.lo)) score = std::min(score, t_lo - flat.lo);
    if (std::isfinite(flat.hi)) score = std::min(score, flat.hi - t_hi);
    report.mask.scores[i] = score;
  }
  for (Index i = 0; i < n; ++i)
    report.mask.keep[static_cast<std::size_t>(i)] = !(report.mask.scores[i] > strict_eps);
  report.n_screened = report.mask.n_discarded();
  report.region_volume_logdet = region.ellipsoid.log_det();
  report.settings = {problem.loss().family(), problem.loss().mu(), problem.lambda(),
                     problem.penalty(),       problem.mode(),      region.steps,
                     region.initial_radius};
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

/// Duality-gap ball baseline: ball(x, 2 Delta / lambda), no cut.
/// Needs the linear problem with the L2sq penalty.
template <typename Scalar>
CutRegion<Scalar> gap_ball_region(const ErmProblem<Scalar>& problem, const Vector<Scalar>& x) {
  if (problem.is_kernelized() || problem.penalty() != Penalty::L2sq)
    throw InvalidArgument("baseline requires strong convexity (linear model, L2sq penalty)");
  const Scalar gap = std::max(duality_gap(problem, x), Scalar(0));
  if (!std::isfinite(gap)) throw std::runtime_error("duality gap is not finite");
  const Scalar radius = Scalar(2) * gap / problem.lambda();
  return {Ellipsoid<Scalar>::ball(x, radius), std::nullopt, 0, radius};
}

/// Radius certified by strong convexity, kappa/2 ||x - x*||^2 <= P(x) - P* <= gap:
/// sqrt(2 gap / lambda) for L2sq, sqrt(gap / (lambda eig_min(K))) in kernel mode.
/// Empty for L1, where no such bound exists. `min_gap` replaces smaller
/// computed gaps, which can be rounding noise near the optimum.
template <typename Scalar>
std::optional<Scalar> strong_convexity_radius(const ErmProblem<Scalar>& problem,
                                              const Vector<Scalar>& x, Scalar min_gap = 0) {
  if (!problem.is_kernelized() && problem.penalty() == Penalty::L1) return std::nullopt;
  const Scalar gap = std::max(duality_gap(problem, x), std::max(min_gap, Scalar(0)));
  if (!problem.is_kernelized()) return std::sqrt(Scalar(2) * gap / problem.lambda());
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(*problem.gram(), Eigen::EigenvaluesOnly);
  const Scalar kappa = Scalar(2) * problem.lambda() * eig.eigenvalues().minCoeff();
  if (!(kappa > Scalar(0))) return std::nullopt;
  return std::sqrt(Scalar(2) * gap / kappa);
}

/// Per-sample screening slack; larger means easier to discard.
template <typename Scalar>
Vector<Scalar> compression_scores(const ErmProblem<Scalar>& problem,
                                  const CutRegion<Scalar>& region) {
  return screen(problem, region).mask.scores;
}

/// Sample indices by decreasing score, ties by increasing index.
template <typename Scalar>
std::vector<Index> compression_order(const Vector<Scalar>& scores) {
  std::vector<Index> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return scores[a] > scores[b]; });
  return order;
}

template <typename Scalar>
struct SafetyTolerances {
  Scalar objective = Scalar(1e-6);
  Scalar solution = Scalar(1e-4);
};

template <typename Scalar>
struct SafetyCheck {
  bool safe = false;
  Scalar objective_diff = 0;
  Scalar solution_diff = 0;
  Index n_kept = 0;
  int epochs = 0;
  ModelVector<Scalar> screened_solution;
};

/// Solves the problem restricted to the kept samples and compares it with a
/// full-data reference solution, evaluating P with every sample. The
/// solution distance is only checked for the strongly convex (L2sq) case.
template <typename Scalar>
SafetyCheck<Scalar> check_safety(const ErmProblem<Scalar>& problem, const SampleMask<Scalar>& mask,
                                 const Vector<Scalar>& reference, int max_epochs,
                                 Scalar solver_tol, SafetyTolerances<Scalar> tol = {}) {
  if (mask.size() != problem.n()) throw InvalidArgument("mask length does not match dataset");
  SafetyCheck<Scalar> check;
  const auto kept = mask.kept_indices();
  check.n_kept = static_cast<Index>(kept.size());
  Vector<Scalar> x = Vector<Scalar>::Zero(problem.dim());
  if (check.n_kept == problem.n()) {
    x = reference;
  } else if (!kept.empty()) {
    const auto sub = problem.subset(kept);
    const auto trace = solve(sub, max_epochs, solver_tol);
    check.epochs = trace.epochs();
    if (problem.is_kernelized()) {
      for (std::size_t r = 0; r < kept.size(); ++r)
        x[kept[r]] = trace.final.coefficients[static_cast<Index>(r)];
    } else {
      x = trace.final.coefficients;
    }
  }
  check.objective_diff = std::abs(primal_objective(problem, x) - primal_objective(problem, reference));
  check.solution_diff = (x - reference).norm();
  check.safe = check.objective_diff <= tol.objective;
  if (problem.penalty() == Penalty::L2sq)
    check.safe = check.safe && check.solution_diff <= tol.solution * (Scalar(1) + reference.norm());
  check.screened_solution = ModelVector<Scalar>{std::move(x), problem.mode()};
  return check;
}

/// True when fitting on the kept samples reproduces the full-data optimum
/// within `tol` (objective, and solution for L2sq).
template <typename Scalar>
bool verify_safety(const ErmProblem<Scalar>& problem, const SampleMask<Scalar>& mask,
                   Scalar solver_tol, SafetyTolerances<Scalar> tol, int max_epochs = 100000) {
  if (mask.size() != problem.n()) throw InvalidArgument("mask length does not match dataset");
  if (mask.n_discarded() == 0) return true;
  const auto full = solve(problem, max_epochs, solver_tol);
  return check_safety(problem, mask, full.final.coefficients, max_epochs, solver_tol, tol).safe;
}

/// Same with one tolerance for the objective and the solution.
template <typename Scalar>
bool verify_safety(const ErmProblem<Scalar>& problem, const SampleMask<Scalar>& mask,
                   Scalar solver_tol, Scalar check_tol, int max_epochs = 100000) {
  return verify_safety(problem, mask, solver_tol, SafetyTolerances<Scalar>{check_tol, check_tol},
                       max_epochs);
}

}  // namespace safescreen

#endif  // SAFESCREEN_SCREENING_HPP
