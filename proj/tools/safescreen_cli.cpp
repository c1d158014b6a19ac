// Command-line front-end: gen | solve | screen | compress | path.
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "safescreen/config.hpp"
#include "safescreen/experiments.hpp"
#include "safescreen/io.hpp"
#include "safescreen/report.hpp"

using namespace safescreen;

namespace {

std::string out_file(const RunConfig& c, const std::string& name) {
  std::filesystem::create_directories(c.out);
  return (std::filesystem::path(c.out) / name).string();
}

Dataset<double> load(const RunConfig& c) {
  return load_dataset(c.data, parse_data_format(c.format), parse_problem_kind(c.kind), c.halfwidth);
}

ProblemSpec problem_spec(const RunConfig& c) {
  return {parse_loss_family(c.loss), c.mu, parse_penalty(c.penalty), c.lambda, c.kernel, c.sigma};
}

void cmd_gen(const RunConfig& c) {
  const auto kind = parse_problem_kind(c.kind);
  if (kind == ProblemKind::Interval) {
    save_dataset_csv(gen_interval_dataset<double>(c.n, c.p, *c.halfwidth, c.seed, c.sparsity, c.noise),
                     out_file(c, "data.csv"));
    return;
  }
  const auto s = kind == ProblemKind::Classification
                     ? gen_synthetic_classification<double>(c.n, c.p, c.sparsity, c.noise, c.seed)
                     : gen_synthetic_regression<double>(c.n, c.p, c.sparsity, c.noise, c.seed);
  save_dataset_csv(s.data, out_file(c, "data.csv"));
  save_model(s.truth, out_file(c, "truth.txt"));
}

void cmd_solve(const RunConfig& c) {
  const auto problem = make_problem(load(c), problem_spec(c));
  const auto trace = solve(problem, c.max_epochs, tolerance(c, "solve"));
  save_model(trace.final, out_file(c, "model.txt"));
  save_json({{"schema", kSchemaVersion},
             {"primal", trace.iterates.back().primal},
             {"gap", trace.final_gap()},
             {"epochs", trace.epochs()},
             {"converged", trace.final_gap() <= tolerance(c, "solve")}},
            out_file(c, "solve.json"));
}

void cmd_screen(const RunConfig& c) {
  const auto problem = make_problem(load(c), problem_spec(c));
  ScreenOptions options;
  options.steps = c.steps;
  options.radius = c.radius;
  options.init_epochs = c.init_epochs;
  options.verify = c.verify;
  options.reference_tol = tolerance(c, "screen");
  options.max_epochs = c.max_epochs;
  const auto run = run_screen(problem, options);
  save_json(to_json(run), out_file(c, "report.json"));
  save_mask(run.report.mask, out_file(c, "mask.txt"));
  std::cout << run.report.n_screened << " of " << problem.n() << " samples screened";
  if (c.verify) std::cout << " (" << run.status << ")";
  std::cout << '\n';
}

void cmd_compress(const RunConfig& c) {
  CompressionOptions options;
  options.screen.steps = c.steps;
  options.screen.radius = c.radius;
  options.screen.init_epochs = c.init_epochs;
  options.solver_tol = tolerance(c, "compress");
  options.max_epochs = c.max_epochs;
  const auto result = run_compression(load(c), problem_spec(c), options, c.repetitions, c.seed);
  save_json(to_json(result), out_file(c, "compress.json"));
  save_compression_csv(result, out_file(c, "compress.csv"));
}

void cmd_path(const RunConfig& c) {
  PathOptions options;
  options.points = c.grid;
  options.lambda_max = c.lambda;
  options.lambda_min = c.lambda_min;
  options.steps = c.steps;
  options.init_epochs = c.init_epochs;
  options.tol = tolerance(c, "path");
  options.max_epochs = c.max_epochs;
  const auto result = run_path(load(c), problem_spec(c), options);
  save_json(to_json(result), out_file(c, "path.json"));
  save_path_csv(result, out_file(c, "path.csv"));
  std::cout << "cost " << result.screened_total << " screened vs " << result.full_total
            << " full" << (result.all_safe ? "" : " (UNSAFE point)") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safe sample screening for convex empirical risk minimization"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value file; flags take precedence");

  RunConfig c;
  app.add_option("--data", c.data, "dataset file");
  app.add_option("--format", c.format, "csv | libsvm")->capture_default_str();
  app.add_option("--kind", c.kind, "regression | classification | interval")->capture_default_str();
  app.add_option("--loss", c.loss, "sreg | safelog | hinge | sqhinge | huber | square | logistic")
      ->capture_default_str();
  app.add_option("--mu", c.mu, "loss threshold")->capture_default_str();
  app.add_option("--penalty", c.penalty, "l1 | l2sq")->capture_default_str();
  app.add_option("--lambda", c.lambda, "regularization (largest value for path)")->capture_default_str();
  app.add_option("--kernel", c.kernel, "none | linear | gaussian")->capture_default_str();
  app.add_option("--sigma", c.sigma, "gaussian kernel bandwidth")->capture_default_str();
  app.add_option("--steps", c.steps, "ellipsoid steps")->capture_default_str();
  app.add_option("--radius", c.radius, "initial ball radius (default: certified bound)");
  app.add_option("--init-epochs", c.init_epochs, "solver epochs before screening")->capture_default_str();
  app.add_option("--tol", c.tol, "duality-gap tolerance (default depends on the command)");
  app.add_option("--seed", c.seed, "random seed")->capture_default_str();
  app.add_option("--out", c.out, "output directory")->capture_default_str();
  app.add_flag("--verify", c.verify, "check containment and safety against a reference solve");
  app.add_option("--n", c.n, "samples (gen)")->capture_default_str();
  app.add_option("--p", c.p, "features (gen)")->capture_default_str();
  app.add_option("--sparsity", c.sparsity, "nonzeros of the true model (gen)")->capture_default_str();
  app.add_option("--noise", c.noise, "label noise standard deviation (gen)")->capture_default_str();
  app.add_option("--halfwidth", c.halfwidth, "interval half-width");
  app.add_option("--max-epochs", c.max_epochs, "solver epoch cap")->capture_default_str();
  app.add_option("--repetitions", c.repetitions, "compression repetitions")->capture_default_str();
  app.add_option("--grid", c.grid, "path grid size")->capture_default_str();
  app.add_option("--lambda-min", c.lambda_min, "smallest lambda of the path")->capture_default_str();

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"gen", "write a synthetic dataset and its true model"},
      {"solve", "fit the model"},
      {"screen", "screen samples and write a report and mask"},
      {"compress", "score-ranked versus random deletion"},
      {"path", "regularization path with and without screening"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    validate(c, command);
    if (command == "gen") cmd_gen(c);
    else if (command == "solve") cmd_solve(c);
    else if (command == "screen") cmd_screen(c);
    else if (command == "compress") cmd_compress(c);
    else cmd_path(c);
  } catch (const InvalidArgument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
