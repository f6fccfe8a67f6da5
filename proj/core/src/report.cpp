#include "diffvec/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "diffvec/error.hpp"

namespace diffvec {

namespace {

using nlohmann::json;

json metrics_json(const ClassMetrics& m) {
  return {{"label", m.label},   {"tp", m.tp},         {"fp", m.fp},  {"fn", m.fn},
          {"precision", m.precision()}, {"recall", m.recall()}, {"f1", m.f1()}};
}

ClassMetrics metrics_from_json(const json& j) {
  ClassMetrics m;
  m.label = j.at("label").get<std::string>();
  m.tp = j.at("tp").get<std::int64_t>();
  m.fp = j.at("fp").get<std::int64_t>();
  m.fn = j.at("fn").get<std::int64_t>();
  return m;
}

void check_numbers(const json& j, const std::string& where) {
  if (j.is_number_float()) {
    if (!std::isfinite(j.get<double>())) throw Error("report: non-finite value at " + where);
  } else if (j.is_object()) {
    for (const auto& [k, v] : j.items()) check_numbers(v, where + "." + k);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) check_numbers(j[i], where + "[" + std::to_string(i) + "]");
  }
}

void check_unit(double v, const std::string& what) {
  if (!std::isfinite(v)) throw Error("report: non-finite value for " + what);
  if (v < 0.0 || v > 1.0) throw Error("report: " + what + " outside [0, 1]");
}

}  // namespace

void pool_micro(VariantReport& variant) {
  ClassMetrics micro;
  micro.label = "micro";
  for (const auto& m : variant.per_relation) micro += m;
  variant.micro = micro;
}

void validate(const EvalReport& report) {
  for (const auto& v : report.variants) {
    ClassMetrics pooled;
    for (const auto& m : v.per_relation) {
      if (m.tp < 0 || m.fp < 0 || m.fn < 0) throw Error("report: negative count for " + m.label);
      pooled += m;
    }
    if (pooled.tp != v.micro.tp || pooled.fp != v.micro.fp || pooled.fn != v.micro.fn)
      throw Error("report: micro-average of variant '" + v.name + "' does not match its pooled counts");
    for (const auto& [k, r] : v.relative_recall) check_unit(r, "relative recall of " + k);
  }
  for (const auto& [k, v] : report.relation_entropy) check_unit(v, "entropy of " + k);
  for (const auto& [k, v] : report.scalars)
    if (!std::isfinite(v)) throw Error("report: non-finite value for " + k);
  for (const auto& s : report.series)
    for (const auto& row : s.rows) {
      if (row.size() != s.columns.size()) throw Error("report: series '" + s.name + "' has a ragged row");
      for (const auto& cell : row) check_numbers(cell, s.name);
    }
  check_numbers(report.config, "config");
}

nlohmann::json to_json(const EvalReport& report) {
  json variants = json::array();
  for (const auto& v : report.variants) {
    json per = json::array();
    for (const auto& m : v.per_relation) per.push_back(metrics_json(m));
    json jv = {{"name", v.name}, {"per_relation", per}, {"micro", metrics_json(v.micro)}};
    if (!v.relative_recall.empty()) jv["relative_recall"] = v.relative_recall;
    variants.push_back(std::move(jv));
  }
  json series = json::array();
  for (const auto& s : report.series) series.push_back({{"name", s.name}, {"columns", s.columns}, {"rows", s.rows}});
  return {{"experiment", report.experiment},
          {"version", report.version},
          {"config", report.config},
          {"variants", variants},
          {"scalars", report.scalars},
          {"relation_entropy", report.relation_entropy},
          {"counts", report.counts},
          {"series", series},
          {"warnings", report.warnings}};
}

EvalReport report_from_json(const nlohmann::json& j) {
  try {
    EvalReport r;
    r.experiment = j.at("experiment").get<std::string>();
    r.version = j.at("version").get<int>();
    if (r.version != kReportVersion) throw Error("report: unsupported version " + std::to_string(r.version));
    r.config = j.at("config");
    for (const auto& jv : j.at("variants")) {
      VariantReport v;
      v.name = jv.at("name").get<std::string>();
      for (const auto& m : jv.at("per_relation")) v.per_relation.push_back(metrics_from_json(m));
      v.micro = metrics_from_json(jv.at("micro"));
      if (jv.contains("relative_recall")) v.relative_recall = jv["relative_recall"].get<std::map<std::string, double>>();
      r.variants.push_back(std::move(v));
    }
    r.scalars = j.at("scalars").get<std::map<std::string, double>>();
    r.relation_entropy = j.at("relation_entropy").get<std::map<std::string, double>>();
    r.counts = j.at("counts").get<std::map<std::string, std::int64_t>>();
    for (const auto& js : j.at("series")) {
      Series s;
      s.name = js.at("name").get<std::string>();
      s.columns = js.at("columns").get<std::vector<std::string>>();
      for (const auto& row : js.at("rows")) s.rows.push_back(row.get<std::vector<json>>());
      r.series.push_back(std::move(s));
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
  } catch (const json::exception& e) {
    throw Error(std::string("report: malformed: ") + e.what());
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error("cannot write " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot write " + path.string() + ": " + ec.message());
  }
}

void write_report(const EvalReport& report, const std::filesystem::path& path) {
  validate(report);
  write_file_atomic(path, to_json(report).dump(2) + "\n");
}

EvalReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path.string(), 0, e.what());
  }
  return report_from_json(j);
}

namespace {

std::string csv_field(const nlohmann::json& cell) {
  std::string s;
  if (cell.is_string())
    s = cell.get<std::string>();
  else if (cell.is_null())
    s = "";
  else
    s = cell.dump();
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

}  // namespace

std::string to_csv(const Series& series) {
  std::ostringstream out;
  for (std::size_t i = 0; i < series.columns.size(); ++i)
    out << (i ? "," : "") << csv_field(series.columns[i]);
  out << "\r\n";
  for (const auto& row : series.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
    out << "\r\n";
  }
  return out.str();
}

void write_csv(const Series& series, const std::filesystem::path& path) {
  for (const auto& row : series.rows)
    for (const auto& cell : row) check_numbers(cell, series.name);
  write_file_atomic(path, to_csv(series));
}

}  // namespace diffvec
