#include "lamper/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "lamper/errors.hpp"

namespace lamper {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  const auto isSpace = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && isSpace(s.front())) s.remove_prefix(1);
  while (!s.empty() && isSpace(s.back())) s.remove_suffix(1);
  return s;
}

double parseReal(std::string_view field, std::size_t line) {
  field = trim(field);
  if (field.empty()) throw ParseError("empty field", line);
  // from_chars rejects a leading '+', which some exporters emit.
  if (field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec == std::errc::result_out_of_range) {
    throw ParseError("value out of range: '" + std::string(field) + "'", line);
  }
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("non-numeric field '" + std::string(field) + "'", line);
  }
  if (!std::isfinite(value)) throw ParseError("non-finite value '" + std::string(field) + "'", line);
  return value;
}

long parseLabel(std::string_view field, std::size_t line) {
  const double value = parseReal(field, line);
  if (std::trunc(value) != value || std::fabs(value) > 9.0e15) {
    throw ParseError("non-integral label '" + std::string(trim(field)) + "'", line);
  }
  return static_cast<long>(value);
}

std::string readFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

fs::path splitPath(const fs::path& root, const std::string& name, Split split) {
  return root / name / (name + (split == Split::Train ? "_TRAIN.tsv" : "_TEST.tsv"));
}

}  // namespace

std::string_view splitName(Split split) { return split == Split::Train ? "train" : "test"; }

bool TimeSeriesDataset::equalLength() const {
  std::size_t length = 0;
  for (const auto* part : {&train, &test}) {
    for (const auto& s : *part) {
      if (length == 0) length = s.values.size();
      if (s.values.size() != length) return false;
    }
  }
  return true;
}

std::vector<LabeledSeries> parseUcr(std::string_view text) {
  std::vector<LabeledSeries> out;
  char separator = 0;
  std::size_t lineNo = 0;
  while (!text.empty()) {
    const auto end = text.find('\n');
    std::string_view line = text.substr(0, end);
    text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
    ++lineNo;
    line = trim(line);
    if (line.empty()) continue;

    if (separator == 0) {
      const auto tab = line.find('\t');
      const auto comma = line.find(',');
      if (tab == std::string_view::npos && comma == std::string_view::npos) {
        throw ParseError("line has fewer than 2 fields", lineNo);
      }
      separator = tab != std::string_view::npos && (comma == std::string_view::npos || tab < comma) ? '\t' : ',';
    }

    LabeledSeries series;
    std::size_t fieldNo = 0;
    std::size_t pos = 0;
    while (true) {
      const auto next = line.find(separator, pos);
      const std::string_view field = line.substr(pos, next == std::string_view::npos ? next : next - pos);
      if (fieldNo == 0) {
        series.label = parseLabel(field, lineNo);
      } else {
        series.values.push_back(parseReal(field, lineNo));
      }
      ++fieldNo;
      if (next == std::string_view::npos) break;
      pos = next + 1;
    }
    if (fieldNo < 2) throw ParseError("line has fewer than 2 fields", lineNo);
    out.push_back(std::move(series));
  }
  if (out.empty()) throw ParseError("empty file");
  return out;
}

std::string formatUcrLine(const LabeledSeries& series, char separator) {
  std::string line = std::to_string(series.label);
  char buf[64];
  for (const double v : series.values) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    line += separator;
    line.append(buf, ptr);
  }
  return line;
}

std::vector<double> zNormalize(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  if (out.empty()) return out;
  const double n = static_cast<double>(out.size());
  double mean = 0.0;
  for (const double v : out) mean += v;
  mean /= n;
  double var = 0.0;
  for (const double v : out) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / n);
  for (double& v : out) v = sd > 0.0 ? (v - mean) / sd : 0.0;
  return out;
}

TimeSeriesDataset loadDataset(const fs::path& root, const std::string& name, const LoadOptions& options) {
  TimeSeriesDataset ds;
  ds.name = name;
  for (const Split split : {Split::Train, Split::Test}) {
    const fs::path path = splitPath(root, name, split);
    if (!fs::is_regular_file(path)) throw DatasetError("missing file " + path.string());
    auto& target = split == Split::Train ? ds.train : ds.test;
    try {
      target = parseUcr(readFile(path));
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
    if (options.zNormalize) {
      for (auto& s : target) s.values = zNormalize(s.values);
    }
  }

  std::set<long> trainLabels;
  for (const auto& s : ds.train) trainLabels.insert(s.label);
  for (const auto& s : ds.test) {
    if (!trainLabels.contains(s.label)) {
      throw DatasetError(name + ": test label " + std::to_string(s.label) + " absent from train split");
    }
  }
  ds.classCount = trainLabels.size();
  if (ds.classCount < 2) throw DatasetError(name + ": train split has fewer than 2 classes");
  return ds;
}

std::vector<std::string> listDatasets(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw DatasetError("dataset root not found: " + root.string());
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(root, ec)) {
    if (!entry.is_directory()) continue;
    const std::string name = entry.path().filename().string();
    if (fs::is_regular_file(splitPath(root, name, Split::Train)) &&
        fs::is_regular_file(splitPath(root, name, Split::Test))) {
      names.push_back(name);
    }
  }
  if (ec) throw DatasetError("cannot read dataset root " + root.string() + ": " + ec.message());
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace lamper
