#ifndef SAFESCREEN_CONFIG_HPP
#define SAFESCREEN_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "safescreen/core.hpp"

namespace safescreen {

/// Parameters of one command-line run. Filled from flags and/or a
/// "key = value" file; see the CLI for the precedence rules.
struct RunConfig {
  std::string data;
  std::string format = "csv";
  std::string kind = "regression";
  std::string loss = "sreg";
  double mu = 0.5;
  std::string penalty = "l2sq";
  double lambda = 0.1;
  std::string kernel = "none";  // none | linear | gaussian
  double sigma = 1.0;
  int steps = 10;
  std::optional<double> radius;
  int init_epochs = 20;
  std::optional<double> tol;  // see tolerance()
  std::uint64_t seed = 0;
  std::string out = "out";
  bool verify = false;

  // gen
  Index n = 200;
  Index p = 20;
  Index sparsity = 5;
  double noise = 0.1;
  std::optional<double> halfwidth;

  // solve, compress and path
  int max_epochs = 100000;
  int repetitions = 3;
  int grid = 10;
  double lambda_min = 1e-3;
};

/// The duality-gap tolerance: --tol if given, else 1e-9 for compress (L1
/// gaps level off near 1e-10), 1e-12 for path and 1e-13 otherwise.
double tolerance(const RunConfig& config, const std::string& command);

/// Throws InvalidArgument naming the first offending parameter.
void validate(const RunConfig& config, const std::string& command);

}  // namespace safescreen

#endif  // SAFESCREEN_CONFIG_HPP
