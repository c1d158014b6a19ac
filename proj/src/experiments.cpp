#include "safescreen/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "safescreen/kernels.hpp"

namespace safescreen {

ErmProblem<double> make_problem(const Dataset<double>& data, const ProblemSpec& spec) {
  auto problem = ErmProblem<double>::linear(data, SafeLoss<double>(spec.loss, spec.mu),
                                            spec.penalty, spec.lambda);
  if (spec.kernel == "none") return problem;
  if (spec.kernel == "linear") return kernelize(problem, linear_gram(data));
  if (spec.kernel == "gaussian") return kernelize(problem, gaussian_gram(data, spec.sigma));
  throw InvalidArgument("unknown kernel '" + spec.kernel + "'");
}

SolveTrace<double> initial_point(const ErmProblem<double>& problem, int epochs, double tol) {
  if (epochs == 0 && !problem.loss().is_differentiable()) {
    // no solver for the hinge; screening from the origin still works
    SolveTrace<double> trace;
    Vector<double> zero = Vector<double>::Zero(problem.dim());
    trace.iterates.push_back({0, primal_objective(problem, zero), duality_gap(problem, zero)});
    trace.final = ModelVector<double>{std::move(zero), problem.mode()};
    return trace;
  }
  return solve(problem, epochs, tol);
}

RadiusChoice default_radius(const ErmProblem<double>& problem, const Vector<double>& x0) {
  const double primal = primal_objective(problem, x0);
  // gaps below this are dominated by rounding in P - D
  const double gap_floor = 1e-12 * (1.0 + std::abs(primal));
  if (const auto r = strong_convexity_radius(problem, x0, gap_floor)) return {*r, true};
  const double bound = x0.norm() + primal / problem.lambda();
  // lambda ||x*||_1 <= P(x0) only holds for the L1 penalty
  return {std::max(bound, 1e-12 * (1.0 + x0.norm())), !problem.is_kernelized()};
}

ScreenRun run_screen(const ErmProblem<double>& problem, const ScreenOptions& options) {
  ScreenRun run;
  // tol 0: run exactly init_epochs epochs unless the gap vanishes
  const auto init = initial_point(problem, options.init_epochs, 0.0);
  run.x0 = init.final.coefficients;
  run.init_epochs = init.epochs();
  run.x0_gap = init.final_gap();
  if (options.radius) {
    run.radius = *options.radius;
  } else {
    const auto choice = default_radius(problem, run.x0);
    run.radius = choice.radius;
    run.radius_certified = choice.certified;
  }
  const auto steps = problem.dim() < 2 ? 0 : options.steps;
  const auto region = build_region(problem, run.x0, run.radius, steps);
  run.report = screen(problem, region);
  if (!options.verify) return run;

  const auto reference = solve(problem, options.max_epochs, options.reference_tol,
                               std::optional<Vector<double>>(run.x0));
  const Vector<double>& x_ref = reference.final.coefficients;
  run.containment = verify_containment(region, x_ref, options.containment_tol);
  const auto check = check_safety(problem, run.report.mask, x_ref, options.max_epochs,
                                  options.reference_tol, options.safety);
  run.objective_diff = check.objective_diff;
  run.solution_diff = check.solution_diff;
  if (!*run.containment) {
    run.status = "unverified";
  } else {
    run.safety = check.safe;
    run.status = check.safe ? "safe" : "unsafe";
  }
  return run;
}

const char* metric_name(ProblemKind kind) {
  return kind == ProblemKind::Classification ? "error_rate" : "mse";
}

double test_metric(const Dataset<double>& test, const Vector<double>& x) {
  if (x.size() != test.p()) throw InvalidArgument("model does not match the test features");
  const Vector<double> pred = test.features() * x;
  if (test.kind() == ProblemKind::Classification) {
    Index wrong = 0;
    for (Index i = 0; i < test.n(); ++i)
      if ((pred[i] >= 0.0 ? 1.0 : -1.0) != test.labels()[i]) ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(test.n());
  }
  return (pred - test.labels()).squaredNorm() / static_cast<double>(test.n());
}

namespace {

std::vector<Index> complement_sorted(Index n, const std::vector<Index>& removed) {
  std::vector<bool> drop(static_cast<std::size_t>(n), false);
  for (Index i : removed) drop[static_cast<std::size_t>(i)] = true;
  std::vector<Index> kept;
  for (Index i = 0; i < n; ++i)
    if (!drop[static_cast<std::size_t>(i)]) kept.push_back(i);
  return kept;
}

double refit_metric(const ErmProblem<double>& train, const Dataset<double>& test,
                    const std::vector<Index>& removed, const Vector<double>& warm,
                    const CompressionOptions& options) {
  const auto kept = complement_sorted(train.n(), removed);
  const auto trace = solve(train.subset(kept), options.max_epochs, options.solver_tol,
                           std::optional<Vector<double>>(warm));
  return test_metric(test, trace.final.coefficients);
}

}  // namespace

CompressionCurve compress_once(const ErmProblem<double>& train, const Dataset<double>& test,
                               const CompressionOptions& options, std::uint64_t seed) {
  if (train.is_kernelized()) throw InvalidArgument("compression supports linear models only");
  CompressionCurve curve;
  curve.seed = seed;
  const auto full = solve(train, options.max_epochs, options.solver_tol);
  const Vector<double>& x_full = full.final.coefficients;
  curve.full_metric = test_metric(test, x_full);

  ScreenOptions screen_options = options.screen;
  screen_options.verify = false;
  const auto run = run_screen(train, screen_options);
  const auto ranked = compression_order(run.report.mask.scores);

  std::vector<Index> shuffled(static_cast<std::size_t>(train.n()));
  std::iota(shuffled.begin(), shuffled.end(), Index(0));
  std::mt19937_64 rng(seed);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);

  for (double fraction : options.fractions) {
    if (!(fraction >= 0.0 && fraction < 1.0))
      throw InvalidArgument("deletion fractions must lie in [0, 1)");
    const auto m = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(train.n())));
    if (m == 0) {
      curve.screened.push_back(curve.full_metric);
      curve.random.push_back(curve.full_metric);
      continue;
    }
    const std::vector<Index> by_score(ranked.begin(), ranked.begin() + static_cast<long>(m));
    const std::vector<Index> by_chance(shuffled.begin(), shuffled.begin() + static_cast<long>(m));
    curve.screened.push_back(refit_metric(train, test, by_score, x_full, options));
    curve.random.push_back(refit_metric(train, test, by_chance, x_full, options));
  }
  return curve;
}

CompressionResult run_compression(const Dataset<double>& data, const ProblemSpec& spec,
                                  const CompressionOptions& options, int repetitions,
                                  std::uint64_t seed) {
  if (repetitions < 1) throw InvalidArgument("repetitions must be positive");
  CompressionResult result;
  result.metric = metric_name(data.kind());
  result.fractions = options.fractions;
  for (int r = 0; r < repetitions; ++r) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(r);
    const auto [train, test] = split_dataset(data, 0.2, s);
    result.runs.push_back(compress_once(make_problem(train, spec), test, options, s));
  }
  return result;
}

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

double mean(const std::vector<double>& values) {
  if (values.empty()) throw InvalidArgument("mean of an empty set");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

std::vector<double> lambda_grid(double lambda_max, double lambda_min, int points) {
  if (points < 2) throw InvalidArgument("lambda grid needs at least two points");
  if (!(lambda_min > 0.0 && lambda_min < lambda_max))
    throw InvalidArgument("lambda grid needs 0 < lambda_min < lambda_max");
  std::vector<double> grid;
  const double ratio = std::log(lambda_min / lambda_max);
  for (int k = 0; k < points; ++k)
    grid.push_back(lambda_max * std::exp(ratio * k / (points - 1)));
  return grid;
}

PathResult run_path(const Dataset<double>& data, const ProblemSpec& spec,
                    const PathOptions& options) {
  const auto base = make_problem(data, spec);
  if (base.is_kernelized()) throw InvalidArgument("path supports linear models only");
  const double n = static_cast<double>(base.n());
  PathResult result;
  result.all_safe = true;
  Vector<double> x_full = Vector<double>::Zero(base.dim());
  Vector<double> x_screened = x_full;
  bool first = true;
  for (double lambda : lambda_grid(options.lambda_max, options.lambda_min, options.points)) {
    const auto problem = base.with_lambda(lambda);
    PathPoint point;
    point.lambda = lambda;

    const auto full = solve(problem, options.max_epochs, options.tol,
                            std::optional<Vector<double>>(x_full));
    x_full = full.final.coefficients;
    point.full_epochs = full.epochs();
    point.full_cost = full.epochs();

    if (first) {
      x_screened = x_full;
      point.screened_epochs = point.full_epochs;
      point.screened_cost = point.full_cost;
      point.safe = true;
      first = false;
    } else {
      double cost = 0;
      if (options.init_epochs > 0) {
        const auto init = solve(problem, options.init_epochs, options.tol,
                                std::optional<Vector<double>>(x_screened));
        x_screened = init.final.coefficients;
        point.init_epochs = init.epochs();
        cost += init.epochs();
      }
      const auto choice = default_radius(problem, x_screened);
      point.radius = choice.radius;
      const int steps = problem.dim() < 2 ? 0 : options.steps;
      const auto region = build_region(problem, x_screened, choice.radius, steps);
      const auto report = screen(problem, region);
      point.n_screened = report.n_screened;
      const auto reference = solve(problem, options.max_epochs,
                                   std::min(options.tol, options.reference_tol),
                                   std::optional<Vector<double>>(x_full));
      point.containment = verify_containment(region, reference.final.coefficients, 1e-8);
      const auto kept = report.mask.kept_indices();
      cost += region.steps + 1;
      if (kept.empty()) {
        x_screened.setZero();
      } else {
        const auto part = solve(problem.subset(kept), options.max_epochs, options.tol,
                                std::optional<Vector<double>>(x_screened));
        x_screened = part.final.coefficients;
        point.screened_epochs = part.epochs();
        cost += part.epochs() * static_cast<double>(kept.size()) / n;
      }
      point.screened_cost = cost;
      point.objective_diff =
          std::abs(primal_objective(problem, x_screened) - primal_objective(problem, x_full));
      point.safe = point.objective_diff <= options.check_tol && point.containment.value_or(false);
    }
    result.full_total += point.full_cost;
    result.screened_total += point.screened_cost;
    result.all_safe = result.all_safe && point.safe;
    result.points.push_back(point);
  }
  return result;
}

}  // namespace safescreen
