#ifndef SAFESCREEN_EXPERIMENTS_HPP
#define SAFESCREEN_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "safescreen/core.hpp"
#include "safescreen/ellipsoid.hpp"
#include "safescreen/erm.hpp"
#include "safescreen/losses.hpp"
#include "safescreen/screening.hpp"

namespace safescreen {

struct ProblemSpec {
  LossFamily loss = LossFamily::ScreeningFriendlyRegression;
  double mu = 0.5;
  Penalty penalty = Penalty::L2sq;
  double lambda = 0.1;
  std::string kernel = "none";  // none | linear | gaussian
  double sigma = 1.0;
};

ErmProblem<double> make_problem(const Dataset<double>& data, const ProblemSpec& spec);

/// The solver run for `epochs` epochs from zero (fewer if `tol` is reached).
SolveTrace<double> initial_point(const ErmProblem<double>& problem, int epochs, double tol);

struct RadiusChoice {
  double radius = 0;
  bool certified = false;
};

/// Radius of a ball around x0 containing the optimum. Strongly convex
/// problems use the duality-gap bound; the L1 penalty uses
/// ||x0|| + P(x0)/lambda, since lambda ||x*||_1 <= P(x*) <= P(x0).
RadiusChoice default_radius(const ErmProblem<double>& problem, const Vector<double>& x0);

struct ScreenOptions {
  int steps = 10;
  std::optional<double> radius;
  int init_epochs = 20;
  bool verify = false;
  double reference_tol = 1e-13;
  int max_epochs = 100000;
  double containment_tol = 1e-8;
  SafetyTolerances<double> safety;
};

struct ScreenRun {
  ScreeningReport<double> report;
  Vector<double> x0;
  int init_epochs = 0;
  double x0_gap = 0;
  double radius = 0;
  bool radius_certified = false;
  std::optional<bool> containment;
  std::optional<bool> safety;
  double objective_diff = 0;
  double solution_diff = 0;
  std::string status = "unchecked";  // unchecked | safe | unsafe | unverified
};

/// Initial epochs, region construction, screening and (optionally) the
/// containment and safety checks against a high-precision reference solve.
/// A run whose region misses the reference solution is "unverified" and never
/// reports safety.
ScreenRun run_screen(const ErmProblem<double>& problem, const ScreenOptions& options);

/// Test MSE for regression/interval, error rate for classification.
double test_metric(const Dataset<double>& test, const Vector<double>& x);
const char* metric_name(ProblemKind kind);

struct CompressionOptions {
  std::vector<double> fractions = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  ScreenOptions screen;
  double solver_tol = 1e-9;
  int max_epochs = 100000;
};

struct CompressionCurve {
  std::uint64_t seed = 0;
  double full_metric = 0;
  std::vector<double> screened;
  std::vector<double> random;
};

/// Deletes the highest-scoring samples (and, separately, uniformly random
/// ones) at each fraction, refits on the rest with the objective-preserving
/// subset problem and evaluates on `test`.
CompressionCurve compress_once(const ErmProblem<double>& train, const Dataset<double>& test,
                               const CompressionOptions& options, std::uint64_t seed);

struct CompressionResult {
  std::string metric;
  std::vector<double> fractions;
  std::vector<CompressionCurve> runs;
};

/// One 80/20 split per repetition, seeded with seed + r.
CompressionResult run_compression(const Dataset<double>& data, const ProblemSpec& spec,
                                  const CompressionOptions& options, int repetitions,
                                  std::uint64_t seed);

double median(std::vector<double> values);
double mean(const std::vector<double>& values);

struct PathOptions {
  int points = 10;
  double lambda_max = 1.0;
  double lambda_min = 1e-2;
  int steps = 0;
  int init_epochs = 0;
  double tol = 1e-9;
  int max_epochs = 100000;
  double check_tol = 1e-6;
  double reference_tol = 1e-14;  // containment checks only, not costed
};

struct PathPoint {
  double lambda = 0;
  int full_epochs = 0;
  double full_cost = 0;
  double radius = 0;
  Index n_screened = 0;
  int init_epochs = 0;
  int screened_epochs = 0;
  double screened_cost = 0;
  std::optional<bool> containment;
  bool safe = false;
  double objective_diff = 0;
};

struct PathResult {
  std::vector<PathPoint> points;
  double full_total = 0;
  double screened_total = 0;
  bool all_safe = false;
};

/// Decreasing log-spaced lambda grid. Both arms warm-start from their own
/// previous solution. The screened arm runs `init_epochs` full-data epochs
/// from its warm start (none by default), screens around the resulting point,
/// then fits the survivors. Costs are in epoch equivalents: a fit of T epochs
/// on s of n samples costs T s / n, a screening pass with k cuts costs k + 1
/// (the extra pass evaluates the duality gap for the radius). The first
/// lambda is solved without screening in both arms.
PathResult run_path(const Dataset<double>& data, const ProblemSpec& spec,
                    const PathOptions& options);

std::vector<double> lambda_grid(double lambda_max, double lambda_min, int points);

}  // namespace safescreen

#endif  // SAFESCREEN_EXPERIMENTS_HPP
