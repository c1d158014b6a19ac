#include "safescreen/report.hpp"

#include <fstream>
#include <stdexcept>

#include "safescreen/io.hpp"

namespace safescreen {

using nlohmann::json;

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

template <typename T>
json optional_json(const std::optional<T>& value) {
  return value ? json(*value) : json(nullptr);
}

}  // namespace

json to_json(const ScreeningReport<double>& report) {
  const auto& s = report.settings;
  return {
      {"schema", kSchemaVersion},
      {"n", report.mask.size()},
      {"n_screened", report.n_screened},
      {"settings",
       {{"loss", to_string(s.loss)},
        {"mu", s.mu},
        {"lambda", s.lambda},
        {"penalty", to_string(s.penalty)},
        {"mode", s.mode == ModelMode::Kernelized ? "kernelized" : "linear"},
        {"steps", s.steps},
        {"radius", s.radius}}},
      {"logdet", report.region_volume_logdet},
      {"wall_time_s", report.wall_time},
  };
}

json to_json(const ScreenRun& run) {
  json j = to_json(run.report);
  j["init_epochs"] = run.init_epochs;
  j["x0_gap"] = run.x0_gap;
  j["radius_certified"] = run.radius_certified;
  j["containment"] = optional_json(run.containment);
  j["safety"] = optional_json(run.safety);
  if (run.safety) {
    j["objective_diff"] = run.objective_diff;
    j["solution_diff"] = run.solution_diff;
  }
  j["status"] = run.status;
  return j;
}

json to_json(const CompressionResult& result) {
  json runs = json::array();
  for (const auto& c : result.runs)
    runs.push_back({{"seed", c.seed},
                    {"full", c.full_metric},
                    {"screened", c.screened},
                    {"random", c.random}});
  json table = json::array();
  for (std::size_t f = 0; f < result.fractions.size(); ++f) {
    std::vector<double> screened, random;
    for (const auto& c : result.runs) {
      screened.push_back(c.screened[f]);
      random.push_back(c.random[f]);
    }
    table.push_back({{"fraction", result.fractions[f]},
                     {"screened_mean", mean(screened)},
                     {"screened_median", median(screened)},
                     {"random_mean", mean(random)},
                     {"random_median", median(random)}});
  }
  return {{"schema", kSchemaVersion}, {"metric", result.metric}, {"table", table}, {"runs", runs}};
}

json to_json(const PathResult& result) {
  json points = json::array();
  for (const auto& p : result.points)
    points.push_back({{"lambda", p.lambda},
                      {"full_epochs", p.full_epochs},
                      {"full_cost", p.full_cost},
                      {"radius", p.radius},
                      {"n_screened", p.n_screened},
                      {"init_epochs", p.init_epochs},
                      {"screened_epochs", p.screened_epochs},
                      {"screened_cost", p.screened_cost},
                      {"containment", optional_json(p.containment)},
                      {"safe", p.safe},
                      {"objective_diff", p.objective_diff}});
  return {{"schema", kSchemaVersion},
          {"cost_model", "fit: epochs * kept / n; initial epochs: 1 each; screening: steps + 1"},
          {"full_total", result.full_total},
          {"screened_total", result.screened_total},
          {"all_safe", result.all_safe},
          {"points", points}};
}

void save_json(const json& value, const std::string& path) {
  auto out = open_output(path);
  out << value.dump(2) << '\n';
}

void save_compression_csv(const CompressionResult& result, const std::string& path) {
  auto out = open_output(path);
  out << "seed,fraction,screened,random\n";
  for (const auto& c : result.runs)
    for (std::size_t f = 0; f < result.fractions.size(); ++f)
      out << c.seed << ',' << format_real(result.fractions[f]) << ',' << format_real(c.screened[f])
          << ',' << format_real(c.random[f]) << '\n';
}

void save_path_csv(const PathResult& result, const std::string& path) {
  auto out = open_output(path);
  out << "lambda,full_cost,screened_cost,n_screened,safe\n";
  for (const auto& p : result.points)
    out << format_real(p.lambda) << ',' << format_real(p.full_cost) << ','
        << format_real(p.screened_cost) << ',' << p.n_screened << ',' << (p.safe ? 1 : 0) << '\n';
}

}  // namespace safescreen
