#pragma once

// CSV emission and parsing for run records, aggregates and skipped runs.
// Fields follow RFC 4180 quoting; reals are written with 9 significant digits.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sepec/error.hpp"
#include "sepec/sim.hpp"

namespace sepec::io {

inline const char* const kRecordHeader = "method,eps,seed,h1,estimate,true_diff,rejected,safety_loss";
inline const char* const kAggregateHeader = "method,eps,rmse,power,mean_safety_loss,n_runs";
inline const char* const kSkipHeader = "method,eps,seed,reason";

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// The value a real takes after a write/read cycle.
inline double round_trip(double v) { return std::strtod(format_real(v).c_str(), nullptr); }

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Splits RFC 4180 text into rows of fields. Blank lines are skipped.
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  auto end_row = [&] {
    if (any || !field.empty() || !row.empty()) {
      row.push_back(field);
      rows.push_back(row);
    }
    row.clear();
    field.clear();
    any = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        any = true;
        break;
      case ',':
        row.push_back(field);
        field.clear();
        any = true;
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        break;
      default:
        field += c;
    }
  }
  if (quoted) throw InvalidArgument("csv: unterminated quoted field");
  end_row();
  return rows;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path + "'");
}

namespace detail {

inline double parse_real(const std::string& s, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw InvalidArgument(std::string("csv: bad number in column ") + what + ": '" + s + "'");
  return v;
}

inline std::uint64_t parse_u64(const std::string& s, const char* what) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0') throw InvalidArgument(std::string("csv: bad integer in column ") + what + ": '" + s + "'");
  return v;
}

inline bool parse_bool(const std::string& s, const char* what) {
  if (s == "1" || s == "true") return true;
  if (s == "0" || s == "false") return false;
  throw InvalidArgument(std::string("csv: bad boolean in column ") + what + ": '" + s + "'");
}

inline std::string join_header(const std::vector<std::string>& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
  return out;
}

inline std::vector<std::vector<std::string>> body(const std::string& text, const char* header, std::size_t cols) {
  auto rows = parse_csv(text);
  if (rows.empty() || join_header(rows.front()) != header)
    throw InvalidArgument(std::string("csv: expected header '") + header + "'");
  rows.erase(rows.begin());
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].size() != cols)
      throw InvalidArgument("csv: row " + std::to_string(i + 2) + " has " + std::to_string(rows[i].size()) +
                            " fields, expected " + std::to_string(cols));
  return rows;
}

}  // namespace detail

// --- run records

inline std::string records_to_csv(const std::vector<sim::RunRecord>& records) {
  std::string out = std::string(kRecordHeader) + "\n";
  for (const auto& r : records) {
    out += csv_field(r.method) + "," + format_real(r.eps) + "," + std::to_string(r.seed) + "," + (r.h1 ? "1" : "0") +
           "," + format_real(r.estimate) + "," + format_real(r.true_diff) + "," + (r.rejected ? "1" : "0") + "," +
           format_real(r.safety_loss) + "\n";
  }
  return out;
}

inline std::vector<sim::RunRecord> records_from_csv(const std::string& text) {
  std::vector<sim::RunRecord> out;
  for (const auto& f : detail::body(text, kRecordHeader, 8)) {
    sim::RunRecord r;
    r.method = f[0];
    r.eps = detail::parse_real(f[1], "eps");
    r.seed = detail::parse_u64(f[2], "seed");
    r.h1 = detail::parse_bool(f[3], "h1");
    r.estimate = detail::parse_real(f[4], "estimate");
    r.true_diff = detail::parse_real(f[5], "true_diff");
    r.rejected = detail::parse_bool(f[6], "rejected");
    r.safety_loss = detail::parse_real(f[7], "safety_loss");
    out.push_back(std::move(r));
  }
  return out;
}

inline void write_csv(const std::vector<sim::RunRecord>& records, const std::string& path) {
  write_file(path, records_to_csv(records));
}

inline std::vector<sim::RunRecord> read_csv(const std::string& path) { return records_from_csv(read_file(path)); }

// Records as they read back from CSV, so aggregates computed from them match
// a later recomputation from the file.
inline std::vector<sim::RunRecord> rounded(std::vector<sim::RunRecord> records) {
  for (auto& r : records) {
    r.eps = round_trip(r.eps);
    r.estimate = round_trip(r.estimate);
    r.true_diff = round_trip(r.true_diff);
    r.safety_loss = round_trip(r.safety_loss);
  }
  return records;
}

// --- aggregates

inline std::string aggregates_to_csv(const std::vector<sim::AggregateRow>& rows) {
  std::string out = std::string(kAggregateHeader) + "\n";
  for (const auto& a : rows)
    out += csv_field(a.method) + "," + format_real(a.eps) + "," + format_real(a.rmse) + "," + format_real(a.power) +
           "," + format_real(a.mean_safety_loss) + "," + std::to_string(a.n_runs) + "\n";
  return out;
}

inline std::vector<sim::AggregateRow> aggregates_from_csv(const std::string& text) {
  std::vector<sim::AggregateRow> out;
  for (const auto& f : detail::body(text, kAggregateHeader, 6)) {
    sim::AggregateRow a;
    a.method = f[0];
    a.eps = detail::parse_real(f[1], "eps");
    a.rmse = detail::parse_real(f[2], "rmse");
    a.power = detail::parse_real(f[3], "power");
    a.mean_safety_loss = detail::parse_real(f[4], "mean_safety_loss");
    a.n_runs = static_cast<std::size_t>(detail::parse_u64(f[5], "n_runs"));
    out.push_back(std::move(a));
  }
  return out;
}

// --- skipped runs

inline std::string skips_to_csv(const std::vector<sim::SkipRecord>& skips) {
  std::string out = std::string(kSkipHeader) + "\n";
  for (const auto& s : skips)
    out += csv_field(s.method) + "," + format_real(s.eps) + "," + std::to_string(s.seed) + "," + csv_field(s.reason) +
           "\n";
  return out;
}

inline std::vector<sim::SkipRecord> skips_from_csv(const std::string& text) {
  std::vector<sim::SkipRecord> out;
  for (const auto& f : detail::body(text, kSkipHeader, 4))
    out.push_back(sim::SkipRecord{f[0], detail::parse_real(f[1], "eps"), detail::parse_u64(f[2], "seed"), f[3]});
  return out;
}

// Sidecar paths next to the main record file: runs.csv -> runs.aggregates.csv.
inline std::string sibling_path(const std::string& path, const std::string& tag) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + "." + tag + ".csv";
  return path.substr(0, dot) + "." + tag + path.substr(dot);
}

}  // namespace sepec::io
