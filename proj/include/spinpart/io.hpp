#pragma once

// Output plumbing for the command-line tool: CSV/JSON writers with a
// reproducibility metadata header, unit-suffix parsing for config values,
// a stable config hash, and a minimal SVG line-plot renderer.

#include "spinpart/angular.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <utility>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spinpart {
namespace io {

using nlohmann::json;

inline constexpr const char* tool_version = "0.1.0";

// %.15g: enough digits to round-trip doubles while keeping integers clean.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

// FNV-1a 64-bit hash; used to fingerprint the effective config.
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// ---------------------------------------------------------------------------
// Quantity parsing: optional "2pi*" prefix and SI suffix
// ---------------------------------------------------------------------------

// Parses "1.25", "62ns", "2pi*32.1kHz", "1.2us" and the like.  The suffix
// is a pure SI scale factor; the 2pi* prefix multiplies by 2*pi (for
// angular frequencies quoted in cyclic units).
inline double parse_quantity(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw std::domain_error("parse_quantity: empty value");
  double factor = 1.0;
  if (s.rfind("2pi*", 0) == 0 || s.rfind("2PI*", 0) == 0) {
    factor = 2.0 * angular::pi;
    s = s.substr(4);
  }
  static const std::pair<const char*, double> suffixes[] = {
      {"GHz", 1e9}, {"MHz", 1e6}, {"kHz", 1e3}, {"Hz", 1.0},
      {"ns", 1e-9}, {"us", 1e-6}, {"ms", 1e-3}, {"s", 1.0},
  };
  double scale = 1.0;
  for (const auto& [suffix, value] : suffixes) {
    const size_t len = std::string(suffix).size();
    if (s.size() > len && s.compare(s.size() - len, len, suffix) == 0) {
      scale = value;
      s = s.substr(0, s.size() - len);
      break;
    }
  }
  size_t consumed = 0;
  double number = 0.0;
  try {
    number = std::stod(s, &consumed);
  } catch (const std::exception&) {
    throw std::domain_error("parse_quantity: cannot parse number in '" + text + "'");
  }
  if (consumed != s.size())
    throw std::domain_error("parse_quantity: trailing characters in '" + text + "'");
  return factor * scale * number;
}

// Config accessor accepting either a plain number or a unit string.
inline double quantity(const json& config, const std::string& key) {
  if (!config.contains(key)) throw std::domain_error("config: missing key '" + key + "'");
  const json& v = config.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_quantity(v.get<std::string>());
  throw std::domain_error("config: key '" + key + "' must be a number or unit string");
}

// ---------------------------------------------------------------------------
// Metadata and writers
// ---------------------------------------------------------------------------

// Header stamped on every output file so runs are reproducible: tool
// version, scenario name, hash of the effective config, seed (when the
// scenario samples), a stable id for the quantity the file reproduces,
// and the effective config itself.
struct Metadata {
  std::string scenario;
  std::string reproduces;
  std::string config_dump;         // compact JSON of the effective config
  std::optional<std::uint64_t> seed;

  std::uint64_t config_hash() const { return fnv1a64(config_dump); }
};

inline void write_metadata_lines(std::ofstream& out, const Metadata& meta) {
  out << "# tool_version: " << tool_version << "\n";
  out << "# scenario: " << meta.scenario << "\n";
  out << "# config_hash: " << hex64(meta.config_hash()) << "\n";
  if (meta.seed) out << "# seed: " << *meta.seed << "\n";
  out << "# reproduces: " << meta.reproduces << "\n";
  out << "# config: " << meta.config_dump << "\n";
}

inline void write_csv(const std::string& path, const Metadata& meta,
                      const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);  // binary: LF line endings everywhere
  if (!out) throw std::runtime_error("write_csv: cannot open '" + path + "'");
  write_metadata_lines(out, meta);
  for (size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << "\n";
  for (const auto& row : rows) {
    if (row.size() != columns.size())
      throw std::runtime_error("write_csv: row width mismatch in '" + path + "'");
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << "\n";
  }
  if (!out.good()) throw std::runtime_error("write_csv: write failed for '" + path + "'");
}

inline json metadata_json(const Metadata& meta) {
  json m;
  m["tool_version"] = tool_version;
  m["scenario"] = meta.scenario;
  m["config_hash"] = hex64(meta.config_hash());
  if (meta.seed) m["seed"] = *meta.seed;
  m["reproduces"] = meta.reproduces;
  m["config"] = json::parse(meta.config_dump);
  return m;
}

inline void write_json(const std::string& path, const json& document) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_json: cannot open '" + path + "'");
  out << document.dump(2) << "\n";
  if (!out.good()) throw std::runtime_error("write_json: write failed for '" + path + "'");
}

// Complex matrix as nested arrays of [re, im] pairs.
inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// SVG line plots (optional companions to the CSV output)
// ---------------------------------------------------------------------------

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

inline void write_svg_plot(const std::string& path, const std::string& title,
                           const std::string& x_label, const std::string& y_label,
                           const std::vector<PlotSeries>& series) {
  if (series.empty()) throw std::runtime_error("write_svg_plot: no series");
  double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size() || s.x.empty())
      throw std::runtime_error("write_svg_plot: malformed series '" + s.name + "'");
    for (double v : s.x) { x_min = std::min(x_min, v); x_max = std::max(x_max, v); }
    for (double v : s.y) { y_min = std::min(y_min, v); y_max = std::max(y_max, v); }
  }
  if (x_max <= x_min) x_max = x_min + 1.0;
  if (y_max <= y_min) y_max = y_min + 1.0;
  const double pad_y = 0.05 * (y_max - y_min);
  y_min -= pad_y;
  y_max += pad_y;

  const double width = 640, height = 420, ml = 70, mr = 20, mt = 40, mb = 50;
  const auto px = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * (width - ml - mr); };
  const auto py = [&](double y) {
    return height - mb - (y - y_min) / (y_max - y_min) * (height - mt - mb);
  };
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                  "#8c564b"};

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_svg_plot: cannot open '" + path + "'");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << title << "</text>\n";
  // Axes
  out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
      << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << height - mb
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
      << (mt + height - mb) / 2 << ")\">" << y_label << "</text>\n";
  // Range labels
  out << "<text x=\"" << ml << "\" y=\"" << height - mb + 16
      << "\" text-anchor=\"middle\" font-size=\"10\">" << format_double(x_min) << "</text>\n";
  out << "<text x=\"" << width - mr << "\" y=\"" << height - mb + 16
      << "\" text-anchor=\"middle\" font-size=\"10\">" << format_double(x_max) << "</text>\n";
  out << "<text x=\"" << ml - 6 << "\" y=\"" << height - mb + 4
      << "\" text-anchor=\"end\" font-size=\"10\">" << format_double(y_min) << "</text>\n";
  out << "<text x=\"" << ml - 6 << "\" y=\"" << mt + 4
      << "\" text-anchor=\"end\" font-size=\"10\">" << format_double(y_max) << "</text>\n";
  for (size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = palette[k % 6];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < s.x.size(); ++i)
      out << px(s.x[i]) << "," << py(s.y[i]) << (i + 1 < s.x.size() ? " " : "");
    out << "\"/>\n";
    out << "<text x=\"" << width - mr - 8 << "\" y=\"" << mt + 16 + 16 * double(k)
        << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << color << "\">" << s.name
        << "</text>\n";
  }
  out << "</svg>\n";
  if (!out.good()) throw std::runtime_error("write_svg_plot: write failed for '" + path + "'");
}

}  // namespace io
}  // namespace spinpart
