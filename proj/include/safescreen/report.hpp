#ifndef SAFESCREEN_REPORT_HPP
#define SAFESCREEN_REPORT_HPP

#include <string>

#include <json.hpp>

#include "safescreen/experiments.hpp"
#include "safescreen/screening.hpp"

namespace safescreen {

inline constexpr int kSchemaVersion = 1;

nlohmann::json to_json(const ScreeningReport<double>& report);
nlohmann::json to_json(const ScreenRun& run);
nlohmann::json to_json(const CompressionResult& result);
nlohmann::json to_json(const PathResult& result);

/// Pretty-printed, with a trailing newline.
void save_json(const nlohmann::json& value, const std::string& path);

void save_compression_csv(const CompressionResult& result, const std::string& path);
void save_path_csv(const PathResult& result, const std::string& path);

}  // namespace safescreen

#endif  // SAFESCREEN_REPORT_HPP
