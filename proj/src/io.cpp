#include "safescreen/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace safescreen {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream stream(s);
  while (std::getline(stream, token, sep)) out.push_back(trim(token));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream stream(s);
  std::string token;
  while (stream >> token) out.push_back(token);
  return out;
}

double normalize_label(double label, ProblemKind kind, std::size_t line) {
  if (kind != ProblemKind::Classification) return label;
  if (label == 1.0) return 1.0;
  if (label == -1.0 || label == 0.0) return -1.0;
  throw ParseError("invalid label " + format_real(label) + " for classification", line);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

DataFormat parse_data_format(const std::string& name) {
  if (name == "csv") return DataFormat::Csv;
  if (name == "libsvm") return DataFormat::Libsvm;
  throw InvalidArgument("unknown data format '" + name + "'");
}

std::string format_real(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw std::runtime_error("cannot format number");
  std::string s(buf, end);
  if (s.find_first_of(".eEni") == std::string::npos) s += ".0";
  return s;
}

double parse_real(const std::string& token, std::size_t line) {
  std::string_view view(token);
  if (!view.empty() && view.front() == '+') view.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(view.data(), view.data() + view.size(), value);
  if (ec != std::errc{} || ptr != view.data() + view.size() || view.empty())
    throw ParseError("malformed number '" + token + "'", line);
  return value;
}

Dataset<double> read_dataset(std::istream& in, DataFormat format, ProblemKind kind,
                             std::optional<double> interval_halfwidth) {
  std::vector<std::vector<double>> rows;
  std::vector<std::map<Index, double>> sparse_rows;
  std::vector<double> labels;
  Index width = -1;
  Index max_index = 0;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (format == DataFormat::Csv) {
      const auto tokens = split(line, ',');
      if (tokens.size() < 2) throw ParseError("malformed row: need features and a label", line_no);
      if (width >= 0 && static_cast<Index>(tokens.size()) != width)
        throw ParseError("malformed row: inconsistent number of columns", line_no);
      width = static_cast<Index>(tokens.size());
      std::vector<double> values;
      for (const auto& t : tokens) values.push_back(parse_real(t, line_no));
      labels.push_back(normalize_label(values.back(), kind, line_no));
      values.pop_back();
      rows.push_back(std::move(values));
    } else {
      const auto tokens = split_ws(line);
      labels.push_back(normalize_label(parse_real(tokens.front(), line_no), kind, line_no));
      std::map<Index, double> entries;
      for (std::size_t k = 1; k < tokens.size(); ++k) {
        const auto colon = tokens[k].find(':');
        if (colon == std::string::npos)
          throw ParseError("malformed row: expected idx:val, got '" + tokens[k] + "'", line_no);
        long long idx = 0;
        const auto& t = tokens[k];
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + colon, idx);
        if (ec != std::errc{} || ptr != t.data() + colon || idx < 1)
          throw ParseError("malformed row: bad feature index in '" + t + "'", line_no);
        entries[static_cast<Index>(idx)] = parse_real(t.substr(colon + 1), line_no);
        max_index = std::max<Index>(max_index, static_cast<Index>(idx));
      }
      sparse_rows.push_back(std::move(entries));
    }
  }
  if (labels.empty()) throw ParseError("empty dataset file");

  const auto n = static_cast<Index>(labels.size());
  Matrix<double> a;
  if (format == DataFormat::Csv) {
    a.resize(n, width - 1);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < width - 1; ++j) a(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  } else {
    if (max_index < 1) throw ParseError("libsvm file has no features");
    a = Matrix<double>::Zero(n, max_index);
    for (Index i = 0; i < n; ++i)
      for (const auto& [j, v] : sparse_rows[static_cast<std::size_t>(i)]) a(i, j - 1) = v;
  }
  Vector<double> b = Eigen::Map<Vector<double>>(labels.data(), n);
  return Dataset<double>(std::move(a), std::move(b), kind, interval_halfwidth);
}

Dataset<double> load_dataset(const std::string& path, DataFormat format, ProblemKind kind,
                             std::optional<double> interval_halfwidth) {
  auto in = open_in(path);
  return read_dataset(in, format, kind, interval_halfwidth);
}

void write_dataset_csv(std::ostream& out, const Dataset<double>& data) {
  for (Index i = 0; i < data.n(); ++i) {
    for (Index j = 0; j < data.p(); ++j) out << format_real(data.features()(i, j)) << ',';
    out << format_real(data.labels()[i]) << '\n';
  }
}

void save_dataset_csv(const Dataset<double>& data, const std::string& path) {
  auto out = open_out(path);
  write_dataset_csv(out, data);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void write_mask(std::ostream& out, const SampleMask<double>& mask) {
  if (mask.scores.size() != mask.size())
    throw InvalidArgument("mask scores and keep flags differ in length");
  for (Index i = 0; i < mask.size(); ++i)
    out << (mask.keep[static_cast<std::size_t>(i)] ? '1' : '0') << ' '
        << format_real(mask.scores[i]) << '\n';
}

SampleMask<double> read_mask(std::istream& in) {
  std::vector<bool> keep;
  std::vector<double> scores;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto tokens = split_ws(raw);
    if (tokens.empty()) continue;
    if (tokens.size() != 2) throw ParseError("mask line needs exactly 2 tokens", line_no);
    if (tokens[0] != "0" && tokens[0] != "1")
      throw ParseError("keep flag must be 0 or 1", line_no);
    keep.push_back(tokens[0] == "1");
    scores.push_back(parse_real(tokens[1], line_no));
  }
  SampleMask<double> mask;
  mask.keep = std::move(keep);
  mask.scores = Eigen::Map<Vector<double>>(scores.data(), static_cast<Index>(scores.size()));
  return mask;
}

void save_mask(const SampleMask<double>& mask, const std::string& path) {
  auto out = open_out(path);
  write_mask(out, mask);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

SampleMask<double> load_mask(const std::string& path) {
  auto in = open_in(path);
  return read_mask(in);
}

void save_model(const ModelVector<double>& model, const std::string& path) {
  auto out = open_out(path);
  for (Index j = 0; j < model.coefficients.size(); ++j)
    out << format_real(model.coefficients[j]) << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

ModelVector<double> load_model(const std::string& path, ModelMode mode) {
  auto in = open_in(path);
  std::vector<double> values;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto t = trim(raw);
    if (!t.empty()) values.push_back(parse_real(t, line_no));
  }
  return {Eigen::Map<Vector<double>>(values.data(), static_cast<Index>(values.size())), mode};
}

}  // namespace safescreen
