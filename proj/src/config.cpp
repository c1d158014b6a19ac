#include "safescreen/config.hpp"

#include <cmath>

#include "safescreen/erm.hpp"
#include "safescreen/io.hpp"
#include "safescreen/losses.hpp"

namespace safescreen {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument(message);
}

bool positive(double v) { return v > 0.0 && std::isfinite(v); }

}  // namespace

double tolerance(const RunConfig& c, const std::string& command) {
  if (c.tol) return *c.tol;
  if (command == "compress") return 1e-9;
  if (command == "path") return 1e-12;
  return 1e-13;
}

void validate(const RunConfig& c, const std::string& command) {
  parse_data_format(c.format);
  const ProblemKind kind = parse_problem_kind(c.kind);
  parse_penalty(c.penalty);
  const LossFamily family = parse_loss_family(c.loss);
  SafeLoss<double>(family, c.mu);
  require(c.kernel == "none" || c.kernel == "linear" || c.kernel == "gaussian",
          "unknown kernel '" + c.kernel + "'");
  require(positive(c.lambda), "--lambda must be positive");
  require(positive(c.sigma), "--sigma must be positive");
  require(c.steps >= 0, "--steps must be nonnegative");
  require(!c.radius || positive(*c.radius), "--radius must be positive");
  require(c.init_epochs >= 0, "--init-epochs must be nonnegative");
  require(!c.tol || positive(*c.tol), "--tol must be positive");
  require(c.max_epochs > 0, "--max-epochs must be positive");
  require(!c.out.empty(), "--out must name a directory");
  if (kind == ProblemKind::Interval)
    require(c.halfwidth && positive(*c.halfwidth), "interval data needs a positive --halfwidth");

  if (command == "gen") {
    require(c.n >= 1 && c.p >= 1, "--n and --p must be positive");
    require(c.sparsity >= 1 && c.sparsity <= c.p, "--sparsity must lie in [1, p]");
    require(c.noise >= 0.0 && std::isfinite(c.noise), "--noise must be nonnegative");
  } else {
    require(!c.data.empty(), "--data is required");
  }
  if (command == "compress") require(c.repetitions >= 1, "--repetitions must be positive");
  if (command == "path") {
    require(c.grid >= 2, "--grid needs at least two points");
    require(positive(c.lambda_min) && c.lambda_min < c.lambda,
            "--lambda-min must be positive and below --lambda");
  }
}

}  // namespace safescreen
