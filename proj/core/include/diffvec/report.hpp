#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "diffvec/metrics.hpp"

namespace diffvec {

inline constexpr int kReportVersion = 1;

// A table destined for CSV (one row per point of a curve).
struct Series {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;  // strings or numbers

  friend bool operator==(const Series&, const Series&) = default;
};

struct VariantReport {
  std::string name;
  std::vector<ClassMetrics> per_relation;
  ClassMetrics micro;  // pooled counts of per_relation
  std::map<std::string, double> relative_recall;

  friend bool operator==(const VariantReport&, const VariantReport&) = default;
};

struct EvalReport {
  std::string experiment;
  int version = kReportVersion;
  nlohmann::json config = nlohmann::json::object();
  std::vector<VariantReport> variants;
  std::map<std::string, double> scalars;
  std::map<std::string, double> relation_entropy;
  std::map<std::string, std::int64_t> counts;
  std::vector<Series> series;
  std::vector<std::string> warnings;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Sums the per-relation counts into `micro`.
void pool_micro(VariantReport& variant);

// Throws if any number is non-finite, a metric lies outside [0, 1] or a
// micro-average disagrees with its pooled counts.
void validate(const EvalReport& report);

nlohmann::json to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

// Pretty-printed JSON, written to a temporary file and renamed into place.
void write_report(const EvalReport& report, const std::filesystem::path& path);
EvalReport read_report(const std::filesystem::path& path);

// RFC 4180: CRLF line ends, fields quoted when they contain a comma, quote,
// CR or LF.
std::string to_csv(const Series& series);
void write_csv(const Series& series, const std::filesystem::path& path);

// Writes `text` atomically to `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace diffvec
