#ifndef SAFESCREEN_IO_HPP
#define SAFESCREEN_IO_HPP

#include <iosfwd>
#include <string>

#include "safescreen/core.hpp"

namespace safescreen {

enum class DataFormat { Csv, Libsvm };

DataFormat parse_data_format(const std::string& name);

// csv: one sample per row, label in the last column.
// libsvm: "label idx:val ..." with 1-based indices, densified, p = max index.
// Classification labels 0/1 are mapped to -1/+1.
Dataset<double> read_dataset(std::istream& in, DataFormat format, ProblemKind kind,
                             std::optional<double> interval_halfwidth = std::nullopt);
Dataset<double> load_dataset(const std::string& path, DataFormat format, ProblemKind kind,
                             std::optional<double> interval_halfwidth = std::nullopt);

void write_dataset_csv(std::ostream& out, const Dataset<double>& data);
void save_dataset_csv(const Dataset<double>& data, const std::string& path);

/// Shortest decimal that parses back to the same double, always with a
/// fractional part or exponent ("-1.0", "0.2", "1e-300").
std::string format_real(double value);
double parse_real(const std::string& token, std::size_t line = 0);

// Mask file: one "<0|1> <score>" line per sample.
void write_mask(std::ostream& out, const SampleMask<double>& mask);
SampleMask<double> read_mask(std::istream& in);
void save_mask(const SampleMask<double>& mask, const std::string& path);
SampleMask<double> load_mask(const std::string& path);

// Model file: one coefficient per line.
void save_model(const ModelVector<double>& model, const std::string& path);
ModelVector<double> load_model(const std::string& path, ModelMode mode = ModelMode::Linear);

}  // namespace safescreen

#endif  // SAFESCREEN_IO_HPP
