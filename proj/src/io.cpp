/*
 * Copyright 2026 The kwsdse Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "kwsdse/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "json.hpp"
#include "kwsdse/error.hpp"

namespace kwsdse {

using ojson = nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError(ErrorCode::kIo, path.string(), 0, 0, "cannot open file");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// --- CSV ---------------------------------------------------------------------

namespace {

std::string_view trim(std::string_view v) {
  while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
  while (!v.empty() && (v.back() == ' ' || v.back() == '\t' || v.back() == '\r'))
    v.remove_suffix(1);
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

struct Line {
  int number;
  std::string_view text;
};

std::vector<Line> lines_of(std::string_view text) {
  std::vector<Line> out;
  int number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t pos = text.find('\n', start);
    if (pos == std::string_view::npos) pos = text.size();
    ++number;
    out.push_back({number, text.substr(start, pos - start)});
    start = pos + 1;
  }
  return out;
}

bool parse_double(std::string_view field, double& out) {
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size() && std::isfinite(out);
}

class CsvTable {
 public:
  CsvTable(std::string_view text, std::string_view source,
           std::span<const std::string_view> required,
           std::span<const std::string_view> optional)
      : source_(source) {
    const std::vector<Line> lines = lines_of(text);
    std::size_t i = 0;
    while (i < lines.size() && trim(lines[i].text).empty()) ++i;
    if (i == lines.size()) {
      throw InputError(ErrorCode::kMissingHeader, source_, 1, 0, "file is empty");
    }
    const auto header = split(lines[i].text, ',');
    bool ok = header.size() >= required.size() &&
              header.size() <= required.size() + optional.size();
    for (std::size_t c = 0; ok && c < header.size(); ++c) {
      const std::string_view want =
          c < required.size() ? required[c] : optional[c - required.size()];
      ok = header[c] == want;
    }
    if (!ok) {
      std::string expected;
      for (auto r : required) expected += (expected.empty() ? "" : ",") + std::string(r);
      for (auto o : optional) expected += "[," + std::string(o) + "]";
      throw InputError(ErrorCode::kMissingHeader, source_, lines[i].number, 0,
                       "header must be '" + expected + "', got '" +
                           std::string(trim(lines[i].text)) + "'");
    }
    columns_ = header.size();
    for (++i; i < lines.size(); ++i) {
      if (trim(lines[i].text).empty()) continue;
      auto fields = split(lines[i].text, ',');
      if (fields.size() != columns_) {
        throw InputError(ErrorCode::kBadNumeric, source_, lines[i].number,
                         static_cast<int>(std::min(fields.size(), columns_) + 1),
                         "expected " + std::to_string(columns_) + " fields, got " +
                             std::to_string(fields.size()));
      }
      Row row{lines[i].number, {}};
      for (std::size_t c = 0; c < fields.size(); ++c) {
        double v = 0.0;
        if (!parse_double(fields[c], v)) {
          throw InputError(ErrorCode::kBadNumeric, source_, lines[i].number,
                           static_cast<int>(c + 1),
                           "'" + std::string(fields[c]) + "' is not a finite number");
        }
        row.values.push_back(v);
      }
      rows_.push_back(std::move(row));
    }
    if (rows_.empty()) {
      throw InputError(ErrorCode::kEmptySamples, source_, 0, 0, "no data rows");
    }
  }

  struct Row {
    int line;
    std::vector<double> values;
  };

  const std::vector<Row>& rows() const { return rows_; }
  std::size_t columns() const { return columns_; }

  [[noreturn]] void out_of_range(const Row& row, int column, const std::string& what) const {
    throw InputError(ErrorCode::kOutOfRange, source_, row.line, column, what);
  }

 private:
  std::string source_;
  std::size_t columns_ = 0;
  std::vector<Row> rows_;
};

void check_q_s(const CsvTable& t, const CsvTable::Row& row) {
  const double q = row.values[0];
  if (q < 1.0 || q != std::floor(q)) t.out_of_range(row, 1, "q must be an integer >= 1");
  if (!(row.values[1] > 0.0)) t.out_of_range(row, 2, "s must be positive");
}

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::vector<AccuracySample> parse_accuracy_csv_text(std::string_view text,
                                                    std::string_view source) {
  static constexpr std::string_view kRequired[] = {"q", "s", "accuracy_pct"};
  const CsvTable table(text, source, kRequired, {});
  std::vector<AccuracySample> out;
  for (const auto& row : table.rows()) {
    check_q_s(table, row);
    const double acc = row.values[2];
    if (!(acc > 0.0 && acc <= 100.0)) {
      table.out_of_range(row, 3, "accuracy_pct must be in (0, 100]");
    }
    out.push_back({row.values[0], row.values[1], acc});
  }
  return out;
}

std::vector<AccuracySample> parse_accuracy_csv(const std::filesystem::path& path) {
  return parse_accuracy_csv_text(read_file(path), path.string());
}

std::vector<HwSample> parse_hw_csv_text(std::string_view text, std::string_view source) {
  static constexpr std::string_view kRequired[] = {"q", "s", "power_w", "latency_ms"};
  static constexpr std::string_view kOptional[] = {"energy_mj"};
  const CsvTable table(text, source, kRequired, kOptional);
  std::vector<HwSample> out;
  for (const auto& row : table.rows()) {
    check_q_s(table, row);
    HwSample h{row.values[0], row.values[1], row.values[2], row.values[3], 0.0};
    if (!(h.power_w > 0.0)) table.out_of_range(row, 3, "power_w must be positive");
    if (!(h.latency_ms > 0.0)) table.out_of_range(row, 4, "latency_ms must be positive");
    const double derived = h.power_w * h.latency_ms;
    if (table.columns() == 5) {
      h.energy_mj = row.values[4];
      if (!(h.energy_mj > 0.0)) table.out_of_range(row, 5, "energy_mj must be positive");
      if (std::abs(h.energy_mj - derived) > 0.01 * derived) {
        throw InputError(ErrorCode::kInconsistentEnergy, std::string(source), row.line, 5,
                         "energy_mj " + shortest(h.energy_mj) +
                             " differs from power_w*latency_ms = " + shortest(derived) +
                             " by more than 1%");
      }
    } else {
      h.energy_mj = derived;
    }
    out.push_back(h);
  }
  return out;
}

std::vector<HwSample> parse_hw_csv(const std::filesystem::path& path) {
  return parse_hw_csv_text(read_file(path), path.string());
}

std::string write_accuracy_csv(std::span<const AccuracySample> samples) {
  std::string out = "q,s,accuracy_pct\n";
  for (const auto& x : samples) {
    out += shortest(x.q) + "," + shortest(x.s) + "," + shortest(x.accuracy_pct) + "\n";
  }
  return out;
}

std::string write_hw_csv(std::span<const HwSample> samples) {
  std::string out = "q,s,power_w,latency_ms,energy_mj\n";
  for (const auto& h : samples) {
    out += shortest(h.q) + "," + shortest(h.s) + "," + shortest(h.power_w) + "," +
           shortest(h.latency_ms) + "," + shortest(h.energy_mj) + "\n";
  }
  return out;
}

// --- model JSON ----------------------------------------------------------------

namespace {

constexpr std::string_view kModelFormat = "kwsdse-models";

// JSON has no infinity; an unbounded condition number is stored as null.
ojson number_or_null(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

ojson fit_json(const FitReport& r) {
  ojson j;
  j["rmse"] = r.rmse;
  j["n_points"] = r.n_points;
  j["max_abs_residual"] = r.max_abs_residual;
  j["condition_indicator"] = number_or_null(r.condition_indicator);
  return j;
}

ojson domain_json(const SampleDomain& d) {
  ojson j;
  j["q_min"] = d.q_min;
  j["q_max"] = d.q_max;
  j["s_min"] = d.s_min;
  j["s_max"] = d.s_max;
  return j;
}

class JsonReader {
 public:
  explicit JsonReader(std::string_view source) : source_(source) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw InputError(ErrorCode::kParse, source_, 0, 0, what);
  }

  const ojson& at(const ojson& obj, const char* key, const std::string& where) const {
    if (!obj.is_object() || !obj.contains(key)) fail("missing '" + where + "." + key + "'");
    return obj.at(key);
  }

  double number(const ojson& obj, const char* key, const std::string& where) const {
    const ojson& v = at(obj, key, where);
    if (!v.is_number()) fail("'" + where + "." + key + "' must be a number");
    return v.get<double>();
  }

  FitReport fit(const ojson& obj, const std::string& where) const {
    const ojson& f = at(obj, "fit", where);
    FitReport r;
    r.rmse = number(f, "rmse", where + ".fit");
    r.n_points = static_cast<int>(number(f, "n_points", where + ".fit"));
    r.max_abs_residual = number(f, "max_abs_residual", where + ".fit");
    const ojson& c = at(f, "condition_indicator", where + ".fit");
    r.condition_indicator =
        c.is_null() ? std::numeric_limits<double>::infinity() : c.get<double>();
    return r;
  }

  SampleDomain domain(const ojson& obj, const std::string& where) const {
    const ojson& d = at(obj, "domain", where);
    return {number(d, "q_min", where + ".domain"), number(d, "q_max", where + ".domain"),
            number(d, "s_min", where + ".domain"), number(d, "s_max", where + ".domain")};
  }

 private:
  std::string source_;
};

}  // namespace

std::string write_models_json(const ModelDocument& doc) {
  ojson root;
  root["format"] = kModelFormat;
  root["tool_version"] = kToolVersion;
  if (doc.accuracy) {
    const auto& m = doc.accuracy->model;
    ojson c;
    c["a0"] = m.a0;
    c["a1"] = m.a1;
    c["a2"] = m.a2;
    c["a3"] = m.a3;
    c["a4"] = m.a4;
    c["a5"] = m.a5;
    c["a6"] = m.a6;
    root["accuracy"] = {{"coefficients", c},
                        {"fit", fit_json(doc.accuracy->report)},
                        {"domain", domain_json(m.domain)}};
  }
  if (doc.power) {
    const auto& m = doc.power->model;
    ojson c;
    c["b0"] = m.b0;
    c["b1"] = m.b1;
    c["b2"] = m.b2;
    c["b3"] = m.b3;
    root["power"] = {{"coefficients", c},
                     {"fit", fit_json(doc.power->report)},
                     {"domain", domain_json(m.domain)}};
  }
  if (doc.latency) {
    const auto& m = doc.latency->model;
    ojson c;
    c["d"] = m.d;
    c["e"] = m.e;
    root["latency"] = {{"coefficients", c},
                       {"fit", fit_json(doc.latency->report)},
                       {"domain", domain_json(m.domain)},
                       {"q_spread", doc.latency->q_spread}};
  }
  return root.dump(2) + "\n";
}

ModelDocument parse_models_json(std::string_view text, std::string_view source) {
  const JsonReader rd(source);
  ojson root;
  try {
    root = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    rd.fail(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object() || root.value("format", std::string()) != kModelFormat) {
    rd.fail("not a kwsdse model document");
  }
  ModelDocument doc;
  if (root.contains("accuracy")) {
    const ojson& a = root["accuracy"];
    const ojson& c = rd.at(a, "coefficients", "accuracy");
    AccuracyFit f;
    f.model.a0 = rd.number(c, "a0", "accuracy.coefficients");
    f.model.a1 = rd.number(c, "a1", "accuracy.coefficients");
    f.model.a2 = rd.number(c, "a2", "accuracy.coefficients");
    f.model.a3 = rd.number(c, "a3", "accuracy.coefficients");
    f.model.a4 = rd.number(c, "a4", "accuracy.coefficients");
    f.model.a5 = rd.number(c, "a5", "accuracy.coefficients");
    f.model.a6 = rd.number(c, "a6", "accuracy.coefficients");
    f.model.domain = rd.domain(a, "accuracy");
    f.report = rd.fit(a, "accuracy");
    doc.accuracy = f;
  }
  if (root.contains("power")) {
    const ojson& p = root["power"];
    const ojson& c = rd.at(p, "coefficients", "power");
    PowerFit f;
    f.model.b0 = rd.number(c, "b0", "power.coefficients");
    f.model.b1 = rd.number(c, "b1", "power.coefficients");
    f.model.b2 = rd.number(c, "b2", "power.coefficients");
    f.model.b3 = rd.number(c, "b3", "power.coefficients");
    f.model.domain = rd.domain(p, "power");
    f.report = rd.fit(p, "power");
    doc.power = f;
  }
  if (root.contains("latency")) {
    const ojson& l = root["latency"];
    const ojson& c = rd.at(l, "coefficients", "latency");
    LatencyFit f;
    f.model.d = rd.number(c, "d", "latency.coefficients");
    f.model.e = rd.number(c, "e", "latency.coefficients");
    f.model.domain = rd.domain(l, "latency");
    f.report = rd.fit(l, "latency");
    f.q_spread = rd.number(l, "q_spread", "latency");
    doc.latency = f;
  }
  return doc;
}

void merge_models(ModelDocument& into, const ModelDocument& from) {
  if (from.accuracy) into.accuracy = from.accuracy;
  if (from.power) into.power = from.power;
  if (from.latency) into.latency = from.latency;
}

SurrogateSet to_surrogates(const ModelDocument& doc) {
  std::string missing;
  if (!doc.accuracy) missing += " accuracy";
  if (!doc.power) missing += " power";
  if (!doc.latency) missing += " latency";
  if (!missing.empty()) {
    throw Error(ErrorCode::kMissingModel, "missing fitted model(s):" + missing);
  }
  SurrogateSet set;
  set.accuracy = doc.accuracy->model;
  set.accuracy_report = doc.accuracy->report;
  set.power = doc.power->model;
  set.power_report = doc.power->report;
  set.latency = doc.latency->model;
  set.latency_report = doc.latency->report;
  return set;
}

// --- reports -------------------------------------------------------------------

std::string format_sig6(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

namespace {

double round6(double v) {
  const std::string s = format_sig6(v);
  double out = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), out);
  return out;
}

constexpr std::string_view kReportColumns =
    "q,s,P,M,pred_accuracy_pct,pred_power_w,pred_latency_ms,pred_energy_mj,"
    "model_size_kb,bram36,gopj,feasible,extrapolated,pareto";

bool is_pareto(const ExplorationResult& r, const Candidate& c) {
  return std::any_of(r.pareto.begin(), r.pareto.end(), [&](const Candidate& p) {
    return p.point == c.point;
  });
}

// Ordered key/value view of the metadata shared by both formats.
std::vector<std::pair<std::string, std::string>> metadata_fields(const ReportMetadata& m) {
  return {
      {"tool_version", m.tool_version},
      {"target_accuracy_pct", format_sig6(m.target_accuracy_pct)},
      {"freq_hz", format_sig6(m.freq_hz)},
      {"padding", m.padding},
      {"pool_rounding", m.pool_rounding},
      {"count_biases", m.count_biases ? "1" : "0"},
      {"accuracy_rmse", format_sig6(m.accuracy_rmse)},
      {"power_rmse_w", format_sig6(m.power_rmse_w)},
      {"latency_rmse_ms", format_sig6(m.latency_rmse_ms)},
      {"grid_size", std::to_string(m.grid_size)},
      {"feasible_count", std::to_string(m.feasible_count)},
      {"no_feasible_point", m.no_feasible_point ? "1" : "0"},
  };
}

[[noreturn]] void report_error(const std::string& what, int line = 0) {
  throw InputError(ErrorCode::kParse, "<report>", line, 0, what);
}

double report_number(std::string_view s, int line) {
  double v = 0.0;
  if (!parse_double(s, v)) report_error("bad number '" + std::string(s) + "'", line);
  return v;
}

std::int64_t report_integer(std::string_view s, int line) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    report_error("bad integer '" + std::string(s) + "'", line);
  return v;
}

bool report_flag(std::string_view s, int line) {
  if (s == "1" || s == "true") return true;
  if (s == "0" || s == "false") return false;
  report_error("bad flag '" + std::string(s) + "'", line);
}

void set_metadata(ReportMetadata& m, const std::string& key, const std::string& value,
                  int line) {
  if (key == "tool_version") m.tool_version = value;
  else if (key == "target_accuracy_pct") m.target_accuracy_pct = report_number(value, line);
  else if (key == "freq_hz") m.freq_hz = report_number(value, line);
  else if (key == "padding") m.padding = value;
  else if (key == "pool_rounding") m.pool_rounding = value;
  else if (key == "count_biases") m.count_biases = report_flag(value, line);
  else if (key == "accuracy_rmse") m.accuracy_rmse = report_number(value, line);
  else if (key == "power_rmse_w") m.power_rmse_w = report_number(value, line);
  else if (key == "latency_rmse_ms") m.latency_rmse_ms = report_number(value, line);
  else if (key == "grid_size") m.grid_size = report_integer(value, line);
  else if (key == "feasible_count") m.feasible_count = report_integer(value, line);
  else if (key == "no_feasible_point") m.no_feasible_point = report_flag(value, line);
  else report_error("unknown metadata key '" + key + "'", line);
}

std::vector<std::string> row_fields(const ReportRow& r) {
  return {std::to_string(r.q),
          format_sig6(r.s),
          std::to_string(r.engines),
          std::to_string(r.multipliers),
          format_sig6(r.pred_accuracy_pct),
          format_sig6(r.pred_power_w),
          format_sig6(r.pred_latency_ms),
          format_sig6(r.pred_energy_mj),
          format_sig6(r.model_size_kb),
          std::to_string(r.bram36),
          format_sig6(r.gopj),
          r.feasible ? "1" : "0",
          r.extrapolated ? "1" : "0",
          r.pareto ? "1" : "0"};
}

ReportRow row_from_fields(const std::vector<std::string_view>& f, int line) {
  if (f.size() != 14) report_error("expected 14 report columns", line);
  ReportRow r;
  r.q = static_cast<int>(report_integer(f[0], line));
  r.s = report_number(f[1], line);
  r.engines = static_cast<int>(report_integer(f[2], line));
  r.multipliers = static_cast<int>(report_integer(f[3], line));
  r.pred_accuracy_pct = report_number(f[4], line);
  r.pred_power_w = report_number(f[5], line);
  r.pred_latency_ms = report_number(f[6], line);
  r.pred_energy_mj = report_number(f[7], line);
  r.model_size_kb = report_number(f[8], line);
  r.bram36 = report_integer(f[9], line);
  r.gopj = report_number(f[10], line);
  r.feasible = report_flag(f[11], line);
  r.extrapolated = report_flag(f[12], line);
  r.pareto = report_flag(f[13], line);
  return r;
}

}  // namespace

Report build_report(const ExplorationResult& result, const SurrogateSet& models) {
  Report rep;
  ReportMetadata& m = rep.metadata;
  m.target_accuracy_pct = round6(result.request.target_accuracy_pct);
  m.freq_hz = round6(result.request.freq_hz);
  m.padding = std::string(to_string(result.conventions.conv_padding));
  m.pool_rounding = std::string(to_string(result.conventions.pool_rounding));
  m.count_biases = result.conventions.count_biases;
  m.accuracy_rmse = round6(models.accuracy_report.rmse);
  m.power_rmse_w = round6(models.power_report.rmse);
  m.latency_rmse_ms = round6(models.latency_report.rmse);
  m.grid_size = static_cast<std::int64_t>(result.evaluated.size());
  m.feasible_count = static_cast<std::int64_t>(result.ranked.size());
  m.no_feasible_point = result.no_feasible_point();

  for (const Candidate& c : result.ranked) {
    ReportRow r;
    r.q = c.point.q;
    r.s = round6(c.point.s);
    r.engines = c.engines;
    r.multipliers = c.multipliers;
    r.pred_accuracy_pct = round6(c.pred_accuracy_pct);
    r.pred_power_w = round6(c.pred_power_w);
    r.pred_latency_ms = round6(c.pred_latency_ms);
    r.pred_energy_mj = round6(c.pred_energy_mj);
    r.model_size_kb = round6(static_cast<double>(c.model_size_bits) / kBitsPerKB);
    r.bram36 = c.bram36_estimate;
    r.gopj = round6(c.gopj_estimate);
    r.feasible = c.feasible;
    r.extrapolated = c.extrapolated;
    r.pareto = is_pareto(result, c);
    rep.rows.push_back(r);
  }
  return rep;
}

std::string write_report(const Report& report, ReportFormat format) {
  if (format == ReportFormat::kCsv) {
    std::string out = "# kwsdse exploration report\n";
    for (const auto& [k, v] : metadata_fields(report.metadata)) {
      out += "# " + k + "=" + v + "\n";
    }
    out += std::string(kReportColumns) + "\n";
    for (const ReportRow& r : report.rows) {
      const auto fields = row_fields(r);
      for (std::size_t i = 0; i < fields.size(); ++i) {
        out += (i ? "," : "") + fields[i];
      }
      out += "\n";
    }
    return out;
  }

  ojson root;
  ojson meta = ojson::object();
  for (const auto& [k, v] : metadata_fields(report.metadata)) meta[k] = v;
  root["metadata"] = meta;
  ojson rows = ojson::array();
  const auto names = split(kReportColumns, ',');
  for (const ReportRow& r : report.rows) {
    const auto fields = row_fields(r);
    ojson row = ojson::object();
    for (std::size_t i = 0; i < fields.size(); ++i) row[std::string(names[i])] = fields[i];
    rows.push_back(row);
  }
  root["rows"] = rows;
  return root.dump(2) + "\n";
}

Report parse_report(std::string_view text, ReportFormat format) {
  Report rep;
  if (format == ReportFormat::kCsv) {
    bool header_seen = false;
    for (const Line& line : lines_of(text)) {
      const std::string_view t = trim(line.text);
      if (t.empty()) continue;
      if (t.front() == '#') {
        const std::string_view body = trim(t.substr(1));
        const std::size_t eq = body.find('=');
        if (eq == std::string_view::npos) continue;  // title line
        set_metadata(rep.metadata, std::string(body.substr(0, eq)),
                     std::string(body.substr(eq + 1)), line.number);
        continue;
      }
      if (!header_seen) {
        if (t != kReportColumns) report_error("unexpected report header", line.number);
        header_seen = true;
        continue;
      }
      rep.rows.push_back(row_from_fields(split(t, ','), line.number));
    }
    if (!header_seen) report_error("report header missing");
    return rep;
  }

  ojson root;
  try {
    root = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    report_error(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object() || !root.contains("metadata") || !root.contains("rows"))
    report_error("report JSON needs 'metadata' and 'rows'");
  for (const auto& [k, v] : root["metadata"].items()) {
    if (!v.is_string()) report_error("metadata values must be strings");
    set_metadata(rep.metadata, k, v.get<std::string>(), 0);
  }
  const auto names = split(kReportColumns, ',');
  std::vector<std::string> storage;
  for (const ojson& row : root["rows"]) {
    storage.clear();
    for (auto name : names) {
      const std::string key(name);
      if (!row.contains(key) || !row[key].is_string()) report_error("row field '" + key + "'");
      storage.push_back(row[key].get<std::string>());
    }
    std::vector<std::string_view> views(storage.begin(), storage.end());
    rep.rows.push_back(row_from_fields(views, 0));
  }
  return rep;
}

// --- SVG -------------------------------------------------------------------------

namespace {

struct Panel {
  double x0, y0, w, h;  // pixel box
  double vx0, vx1, vy0, vy1;  // value box

  double px(double v) const { return x0 + (v - vx0) / (vx1 - vx0) * w; }
  double py(double v) const { return y0 + h - (v - vy0) / (vy1 - vy0) * h; }
};

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

void axes(std::string& out, const Panel& p, const std::string& xlabel,
          const std::string& ylabel, const std::string& title) {
  out += "  <rect x=\"" + fmt2(p.x0) + "\" y=\"" + fmt2(p.y0) + "\" width=\"" + fmt2(p.w) +
         "\" height=\"" + fmt2(p.h) + "\" fill=\"none\" stroke=\"#333\"/>\n";
  out += "  <text x=\"" + fmt2(p.x0 + p.w / 2) + "\" y=\"" + fmt2(p.y0 - 12) +
         "\" text-anchor=\"middle\" class=\"title\">" + escape(title) + "</text>\n";
  out += "  <text x=\"" + fmt2(p.x0 + p.w / 2) + "\" y=\"" + fmt2(p.y0 + p.h + 36) +
         "\" text-anchor=\"middle\" class=\"axis-label\">" + escape(xlabel) + "</text>\n";
  out += "  <text x=\"" + fmt2(p.x0 - 44) + "\" y=\"" + fmt2(p.y0 + p.h / 2) +
         "\" text-anchor=\"middle\" class=\"axis-label\" transform=\"rotate(-90 " +
         fmt2(p.x0 - 44) + " " + fmt2(p.y0 + p.h / 2) + ")\">" + escape(ylabel) +
         "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double vx = p.vx0 + (p.vx1 - p.vx0) * i / 4.0;
    const double vy = p.vy0 + (p.vy1 - p.vy0) * i / 4.0;
    out += "  <text x=\"" + fmt2(p.px(vx)) + "\" y=\"" + fmt2(p.y0 + p.h + 16) +
           "\" text-anchor=\"middle\" class=\"tick\">" + format_sig6(round6(vx)) + "</text>\n";
    out += "  <text x=\"" + fmt2(p.x0 - 6) + "\" y=\"" + fmt2(p.py(vy) + 4) +
           "\" text-anchor=\"end\" class=\"tick\">" + format_sig6(round6(vy)) + "</text>\n";
  }
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

ContourSvg render_contours_svg(std::span<const double> levels, const SurrogateSet& models,
                               int q_min, int q_max, double s_min, double s_max) {
  if (q_min > q_max || !(s_min < s_max)) {
    throw Error(ErrorCode::kInvalidArgument, "contour ranges are empty");
  }
  ContourSvg result;
  std::vector<int> qs;
  for (int q = q_min; q <= q_max; ++q) qs.push_back(q);

  struct Series {
    double level;
    std::vector<std::pair<double, double>> contour;  // (q, s), fine q sampling
    EnergyOptimum optimum;
  };
  std::vector<Series> series;
  for (double level : levels) {
    try {
      Series s{level, {}, min_energy_at_accuracy(models.accuracy, models.power,
                                                 models.latency, level, qs)};
      constexpr int kStepsPerBit = 8;
      for (int i = 0; i <= (q_max - q_min) * kStepsPerBit; ++i) {
        const double q = q_min + static_cast<double>(i) / kStepsPerBit;
        try {
          const double sv = invert_scale(models.accuracy, q, level);
          if (sv >= s_min && sv <= s_max) s.contour.emplace_back(q, sv);
        } catch (const Error&) {
        }
      }
      series.push_back(std::move(s));
      result.optima.push_back(series.back().optimum);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyContour) throw;
      result.skipped_levels.push_back(level);
    }
  }

  double e_lo = std::numeric_limits<double>::infinity();
  double e_hi = -std::numeric_limits<double>::infinity();
  for (const Series& s : series) {
    for (const auto& p : s.optimum.curve) {
      e_lo = std::min(e_lo, p.energy_mj);
      e_hi = std::max(e_hi, p.energy_mj);
    }
  }
  if (!std::isfinite(e_lo)) {
    e_lo = 0.0;
    e_hi = 1.0;
  }
  if (e_hi - e_lo < 1e-9) e_hi = e_lo + 1.0;
  const double pad = 0.05 * (e_hi - e_lo);

  const double qx1 = q_max > q_min ? q_max : q_min + 1;
  const Panel left{70, 50, 360, 300, static_cast<double>(q_min), qx1, s_min, s_max};
  const Panel right{540, 50, 360, 300, static_cast<double>(q_min), qx1, e_lo - pad, e_hi + pad};

  std::string& out = result.svg;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" height=\"440\" "
         "viewBox=\"0 0 960 440\" font-family=\"sans-serif\" font-size=\"11\">\n";
  axes(out, left, "quantization q (bits)", "scale s", "accuracy contours");
  axes(out, right, "quantization q (bits)", "energy (mJ)", "energy at accuracy level");

  for (std::size_t i = 0; i < series.size(); ++i) {
    const Series& s = series[i];
    const std::string color = kPalette[i % std::size(kPalette)];
    const std::string label = format_sig6(s.level) + "%";

    std::string pts;
    for (const auto& [q, sv] : s.contour) {
      pts += (pts.empty() ? "" : " ") + fmt2(left.px(q)) + "," + fmt2(left.py(sv));
    }
    out += "  <polyline class=\"accuracy-contour\" data-level=\"" + format_sig6(s.level) +
           "\" fill=\"none\" stroke=\"" + color + "\" points=\"" + pts + "\"/>\n";
    if (!s.contour.empty()) {
      const auto& [q, sv] = s.contour.back();
      out += "  <text class=\"level-label\" x=\"" + fmt2(left.px(q) + 4) + "\" y=\"" +
             fmt2(left.py(sv)) + "\" fill=\"" + color + "\">" + label + "</text>\n";
    }

    pts.clear();
    for (const auto& p : s.optimum.curve) {
      pts += (pts.empty() ? "" : " ") + fmt2(right.px(p.q)) + "," + fmt2(right.py(p.energy_mj));
    }
    out += "  <polyline class=\"energy-curve\" data-level=\"" + format_sig6(s.level) +
           "\" fill=\"none\" stroke=\"" + color + "\" points=\"" + pts + "\"/>\n";
    out += "  <circle class=\"energy-minimum\" data-level=\"" + format_sig6(s.level) +
           "\" data-q=\"" + std::to_string(s.optimum.q) + "\" cx=\"" +
           fmt2(right.px(s.optimum.q)) + "\" cy=\"" + fmt2(right.py(s.optimum.energy_mj)) +
           "\" r=\"4\" fill=\"" + color + "\"/>\n";
    out += "  <text class=\"level-label\" x=\"" + fmt2(right.px(s.optimum.q) + 6) + "\" y=\"" +
           fmt2(right.py(s.optimum.energy_mj) - 6) + "\" fill=\"" + color + "\">" + label +
           " min q=" + std::to_string(s.optimum.q) + "</text>\n";
  }
  double warn_y = 400;
  for (double level : result.skipped_levels) {
    out += "  <text class=\"warning\" x=\"70\" y=\"" + fmt2(warn_y) +
           "\">warning: no q in range reaches " + format_sig6(level) + "%</text>\n";
    warn_y += 14;
  }
  out += "</svg>\n";
  return result;
}

}  // namespace kwsdse
