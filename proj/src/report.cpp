#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "lamper/errors.hpp"
#include "lamper/stats.hpp"

namespace lamper {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string csvField(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> splitCsvLine(std::string_view line, std::size_t lineNo) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", lineNo);
  return fields;
}

std::string xmlEscape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string summaryRows(const RankReport& report, const std::vector<std::size_t>& rows) {
  std::string out = "method,average_accuracy,average_rank\n";
  for (const std::size_t m : rows) {
    out += csvField(report.methods[m]) + "," + fixed(report.averageAccuracy[m], 6) + "," +
           fixed(report.averageRank[m], 4) + "\n";
  }
  return out;
}

}  // namespace

std::string summaryCsv(const RankReport& report) {
  std::vector<std::size_t> rows(report.methods.size());
  for (std::size_t m = 0; m < rows.size(); ++m) rows[m] = m;
  std::string out = summaryRows(report, rows);

  out += "# rank_pool: ";
  for (std::size_t m = 0; m < report.methods.size(); ++m) out += (m ? ";" : "") + report.methods[m];
  out += "\n# datasets_ranked: " + std::to_string(report.datasetCount) + "\n";
  out += "# friedman_chi2: " + fixed(report.friedman, 4) + "\n";
  out += "# nemenyi_cd_alpha_" + fixed(report.alpha, 2) + ": " + (report.cd ? fixed(*report.cd, 4) : "n/a") + "\n";
  out += "# skipped_datasets: ";
  for (std::size_t i = 0; i < report.skippedDatasets.size(); ++i) out += (i ? ";" : "") + report.skippedDatasets[i];
  out += "\n";
  return out;
}

std::string subsetSummaryCsv(const RankReport& report, std::span<const std::string> methods) {
  std::vector<std::size_t> rows;
  for (std::size_t m = 0; m < report.methods.size(); ++m) {
    if (std::find(methods.begin(), methods.end(), report.methods[m]) != methods.end()) rows.push_back(m);
  }
  return summaryRows(report, rows);
}

std::string perDatasetCsv(const AccuracyMatrix& matrix) {
  std::string out = "dataset";
  for (const auto& m : matrix.methods) out += "," + csvField(m);
  out += ",skipped\n";
  for (std::size_t d = 0; d < matrix.datasets.size(); ++d) {
    out += csvField(matrix.datasets[d]);
    std::string skipped;
    for (std::size_t m = 0; m < matrix.methods.size(); ++m) {
      out += ",";
      if (matrix.values[m][d]) {
        out += fixed(*matrix.values[m][d], 6);
      } else {
        skipped += (skipped.empty() ? "" : ";") + matrix.methods[m];
      }
    }
    out += "," + csvField(skipped) + "\n";
  }
  return out;
}

AccuracyMatrix parsePerDatasetCsv(std::string_view text) {
  AccuracyMatrix matrix;
  std::size_t lineNo = 0;
  bool header = true;
  while (!text.empty()) {
    const auto end = text.find('\n');
    const std::string_view line = text.substr(0, end);
    text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
    ++lineNo;
    if (line.empty() || line == "\r" || line.front() == '#') continue;
    auto fields = splitCsvLine(line, lineNo);
    if (header) {
      if (fields.size() < 4 || fields.front() != "dataset" || fields.back() != "skipped") {
        throw ParseError("expected header 'dataset,<methods...>,skipped'", lineNo);
      }
      matrix.methods.assign(fields.begin() + 1, fields.end() - 1);
      matrix.values.resize(matrix.methods.size());
      header = false;
      continue;
    }
    if (fields.size() != matrix.methods.size() + 2) throw ParseError("wrong number of fields", lineNo);
    matrix.datasets.push_back(fields.front());
    for (std::size_t m = 0; m < matrix.methods.size(); ++m) {
      const std::string& cell = fields[m + 1];
      if (cell.empty()) {
        matrix.values[m].push_back(std::nullopt);
        continue;
      }
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        matrix.values[m].push_back(v);
      } catch (const std::exception&) {
        throw ParseError("non-numeric accuracy '" + cell + "'", lineNo);
      }
    }
  }
  if (header) throw ParseError("empty per-dataset file");
  matrix.validate();
  return matrix;
}

std::string renderCdDiagram(const RankReport& report) {
  const std::size_t k = report.methods.size();
  const double left = 60.0;
  const double right = 640.0;
  const double axisY = 80.0;
  const auto xOf = [&](double rank) { return left + (rank - 1.0) / static_cast<double>(std::max<std::size_t>(k - 1, 1)) * (right - left); };

  std::vector<std::size_t> order(k);
  for (std::size_t m = 0; m < k; ++m) order[m] = m;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return report.averageRank[a] < report.averageRank[b]; });

  std::vector<const std::vector<std::size_t>*> drawn;
  for (const auto& c : report.cliques) {
    if (c.size() >= 2) drawn.push_back(&c);
  }
  const double cliqueTop = axisY + 18.0;
  const double labelTop = cliqueTop + 12.0 * static_cast<double>(drawn.size()) + 16.0;
  const double height = labelTop + 20.0 * static_cast<double>(k) + 50.0;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"700\" height=\"" << fixed(height, 0)
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  if (report.cd) {
    const double x0 = xOf(1.0);
    const double x1 = xOf(1.0 + *report.cd);
    svg << "<g class=\"cd-bar\"><line x1=\"" << fixed(x0, 2) << "\" y1=\"30\" x2=\"" << fixed(x1, 2)
        << "\" y2=\"30\" stroke=\"black\" stroke-width=\"2\"/>"
        << "<line x1=\"" << fixed(x0, 2) << "\" y1=\"25\" x2=\"" << fixed(x0, 2) << "\" y2=\"35\" stroke=\"black\"/>"
        << "<line x1=\"" << fixed(x1, 2) << "\" y1=\"25\" x2=\"" << fixed(x1, 2) << "\" y2=\"35\" stroke=\"black\"/>"
        << "<text x=\"" << fixed((x0 + x1) / 2.0, 2) << "\" y=\"20\" text-anchor=\"middle\">CD = "
        << fixed(*report.cd, 4) << "</text></g>\n";
  }

  svg << "<g class=\"axis\"><line x1=\"" << fixed(left, 2) << "\" y1=\"" << fixed(axisY, 2) << "\" x2=\""
      << fixed(right, 2) << "\" y2=\"" << fixed(axisY, 2) << "\" stroke=\"black\"/>";
  for (std::size_t r = 1; r <= k; ++r) {
    const double x = xOf(static_cast<double>(r));
    svg << "<line x1=\"" << fixed(x, 2) << "\" y1=\"" << fixed(axisY - 6, 2) << "\" x2=\"" << fixed(x, 2)
        << "\" y2=\"" << fixed(axisY, 2) << "\" stroke=\"black\"/><text x=\"" << fixed(x, 2) << "\" y=\""
        << fixed(axisY - 10, 2) << "\" text-anchor=\"middle\">" << r << "</text>";
  }
  svg << "</g>\n";

  for (std::size_t i = 0; i < drawn.size(); ++i) {
    const auto& c = *drawn[i];
    double lo = report.averageRank[c.front()];
    double hi = lo;
    for (const std::size_t m : c) {
      lo = std::min(lo, report.averageRank[m]);
      hi = std::max(hi, report.averageRank[m]);
    }
    const double y = cliqueTop + 12.0 * static_cast<double>(i);
    svg << "<line class=\"clique\" x1=\"" << fixed(xOf(lo) - 4.0, 2) << "\" y1=\"" << fixed(y, 2) << "\" x2=\""
        << fixed(xOf(hi) + 4.0, 2) << "\" y2=\"" << fixed(y, 2) << "\" stroke=\"black\" stroke-width=\"4\"/>\n";
  }

  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t m = order[i];
    const double x = xOf(report.averageRank[m]);
    const double y = labelTop + 20.0 * static_cast<double>(i);
    svg << "<g class=\"method\"><line x1=\"" << fixed(x, 2) << "\" y1=\"" << fixed(axisY, 2) << "\" x2=\""
        << fixed(x, 2) << "\" y2=\"" << fixed(y, 2) << "\" stroke=\"gray\"/><text x=\"" << fixed(x + 4.0, 2)
        << "\" y=\"" << fixed(y + 4.0, 2) << "\">" << xmlEscape(report.methods[m]) << " ("
        << fixed(report.averageRank[m], 2) << ")</text></g>\n";
  }

  std::string footer = "N = " + std::to_string(report.datasetCount) + " datasets";
  if (!report.skippedDatasets.empty()) {
    footer += "; skipped:";
    for (const auto& d : report.skippedDatasets) footer += " " + xmlEscape(d);
  }
  svg << "<text class=\"footer\" x=\"" << fixed(left, 2) << "\" y=\"" << fixed(height - 15.0, 2) << "\">"
      << xmlEscape(footer) << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace lamper
