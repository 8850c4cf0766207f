#pragma once

// JSON and CSV serialization of report rows. Output is byte-stable: fixed
// field order, %.17g floats, exact integer counts, LF line endings.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "kloos/complex_sum.hpp"
#include "kloos/counting.hpp"
#include "kloos/vaughan.hpp"
#include "kloos/verify.hpp"

namespace kloos {

using Params = std::vector<std::pair<std::string, std::string>>;

inline ReportRow to_row(const ComplexSum& s, std::string method, Params params = {}) {
  ReportRow r;
  r.method = std::move(method);
  r.value_re = s.re;
  r.value_im = s.im;
  r.err = s.err;
  r.terms = s.terms;
  r.bound = NAN;
  r.ratio = NAN;
  r.params = std::move(params);
  return r;
}

inline ReportRow to_row(const CountResult& c, Params params = {}) {
  ReportRow r;
  r.method = to_string(c.method);
  r.exact = c.value;
  r.value_re = static_cast<double>(c.value);
  r.bound = c.bound;
  r.ratio = std::isfinite(c.bound) && c.bound > 0 ? static_cast<double>(c.value) / c.bound : NAN;
  r.params = std::move(params);
  if (!std::isnan(c.envelope)) r.params.emplace_back("envelope", detail::fmt17(c.envelope));
  return r;
}

inline std::vector<ReportRow> to_rows(const Decomposition& d, const Params& base = {}) {
  Params p = base;
  p.emplace_back("V", detail::fmt17(d.params.V));
  p.emplace_back("D", detail::fmt17(d.params.D));
  p.emplace_back("regime", to_string(d.params.regime));
  std::vector<ReportRow> rows;
  rows.push_back(to_row(d.T, "T", p));
  rows.push_back(to_row(d.S1, "S1", p));
  rows.push_back(to_row(d.S2, "S2", p));
  rows.push_back(to_row(d.S3, "S3", p));
  rows.push_back(to_row(d.S4, "S4", p));
  rows.push_back(to_row(d.remainder, "remainder", p));
  return rows;
}

namespace detail {

inline std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (unsigned char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += static_cast<char>(c);
    } else if (c < 0x20) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\u%04x", c);
      out += buf;
    } else {
      out += static_cast<char>(c);
    }
  }
  return out + "\"";
}

inline std::string json_number(double x) { return std::isfinite(x) ? fmt17(x) : "null"; }

inline std::string csv_number(double x) { return std::isfinite(x) ? fmt17(x) : ""; }

inline std::string value_text(const ReportRow& r, bool json) {
  if (r.exact) return std::to_string(*r.exact);
  return json ? json_number(r.value_re) : csv_number(r.value_re);
}

}  // namespace detail

inline std::string to_json(const ReportRow& r) {
  using namespace detail;
  std::string s = "{\"value_re\":" + value_text(r, true);
  s += ",\"value_im\":" + json_number(r.value_im);
  s += ",\"err\":" + json_number(r.err);
  s += ",\"terms\":" + std::to_string(r.terms);
  s += ",\"bound\":" + json_number(r.bound);
  s += ",\"ratio\":" + json_number(r.ratio);
  s += ",\"params\":{";
  for (std::size_t i = 0; i < r.params.size(); ++i) {
    if (i) s += ",";
    s += json_string(r.params[i].first) + ":" + json_string(r.params[i].second);
  }
  s += "},\"method\":" + json_string(r.method) + "}";
  return s;
}

inline constexpr const char* kCsvHeader = "value_re,value_im,err,terms,bound,ratio,params,method";

inline std::string to_csv(const ReportRow& r) {
  using namespace detail;
  std::string params;
  for (std::size_t i = 0; i < r.params.size(); ++i) {
    if (i) params += ";";
    params += r.params[i].first + "=" + r.params[i].second;
  }
  if (params.find_first_of(",\"\n") != std::string::npos) {
    std::string quoted = "\"";
    for (char ch : params) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    params = quoted + "\"";
  }
  return value_text(r, false) + "," + csv_number(r.value_im) + "," + csv_number(r.err) + "," +
         std::to_string(r.terms) + "," + csv_number(r.bound) + "," + csv_number(r.ratio) + "," + params +
         "," + r.method;
}

enum class Format { json, csv };

/// A full document: {"command":..., "rows":[...], "notes":[...]} for JSON,
/// header plus one line per row for CSV (notes are dropped).
inline std::string serialize(const std::string& command, const std::vector<ReportRow>& rows,
                             const std::vector<std::string>& notes, Format format) {
  std::string out;
  if (format == Format::csv) {
    out = std::string(kCsvHeader) + "\n";
    for (const auto& r : rows) out += to_csv(r) + "\n";
    return out;
  }
  out = "{\"command\":" + detail::json_string(command) + ",\"rows\":[";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out += i ? ",\n" : "\n";
    out += to_json(rows[i]);
  }
  out += rows.empty() ? "]" : "\n]";
  out += ",\"notes\":[";
  for (std::size_t i = 0; i < notes.size(); ++i) {
    if (i) out += ",";
    out += detail::json_string(notes[i]);
  }
  out += "]}\n";
  return out;
}

inline std::string serialize(const std::string& command, const BoundReport& report, Format format) {
  return serialize(command, report.rows, report.notes, format);
}

}  // namespace kloos
