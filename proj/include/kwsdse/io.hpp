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

// Sample ingestion, model persistence, exploration reports and SVG contour
// rendering.
//
// Sample files are CSV with a fixed header:
//   accuracy:  q,s,accuracy_pct
//   hardware:  q,s,power_w,latency_ms[,energy_mj]
// Fitted models are JSON with named coefficients. Reports are CSV or JSON
// with numbers printed to 6 significant digits.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kwsdse/explorer.hpp"
#include "kwsdse/surrogates.hpp"

namespace kwsdse {

inline constexpr std::string_view kToolVersion = "0.1.0";

std::string read_file(const std::filesystem::path& path);

std::vector<AccuracySample> parse_accuracy_csv(const std::filesystem::path& path);
std::vector<AccuracySample> parse_accuracy_csv_text(std::string_view text,
                                                    std::string_view source);
std::vector<HwSample> parse_hw_csv(const std::filesystem::path& path);
std::vector<HwSample> parse_hw_csv_text(std::string_view text, std::string_view source);

/// Shortest round-trip number formatting, so parse(write(x)) == x.
std::string write_accuracy_csv(std::span<const AccuracySample> samples);
std::string write_hw_csv(std::span<const HwSample> samples);

// --- model documents ---------------------------------------------------------

struct ModelDocument {
  std::optional<AccuracyFit> accuracy;
  std::optional<PowerFit> power;
  std::optional<LatencyFit> latency;
};

std::string write_models_json(const ModelDocument& doc);
ModelDocument parse_models_json(std::string_view text, std::string_view source);
/// Sections present in `from` replace those in `into`.
void merge_models(ModelDocument& into, const ModelDocument& from);
/// Throws MissingModel naming the absent sections.
SurrogateSet to_surrogates(const ModelDocument& doc);

// --- reports -----------------------------------------------------------------

enum class ReportFormat { kCsv, kJson };

struct ReportRow {
  int q = 0;
  double s = 0.0;
  int engines = 0;
  int multipliers = 0;
  double pred_accuracy_pct = 0.0;
  double pred_power_w = 0.0;
  double pred_latency_ms = 0.0;
  double pred_energy_mj = 0.0;
  double model_size_kb = 0.0;
  std::int64_t bram36 = 0;
  double gopj = 0.0;
  bool feasible = false;
  bool extrapolated = false;
  bool pareto = false;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct ReportMetadata {
  std::string tool_version{kToolVersion};
  double target_accuracy_pct = 0.0;
  double freq_hz = 0.0;
  std::string padding;
  std::string pool_rounding;
  bool count_biases = false;
  double accuracy_rmse = 0.0;
  double power_rmse_w = 0.0;
  double latency_rmse_ms = 0.0;
  std::int64_t grid_size = 0;
  std::int64_t feasible_count = 0;
  bool no_feasible_point = false;

  friend bool operator==(const ReportMetadata&, const ReportMetadata&) = default;
};

/// Rows follow ExplorationResult::ranked order.
struct Report {
  ReportMetadata metadata;
  std::vector<ReportRow> rows;

  friend bool operator==(const Report&, const Report&) = default;
};

/// Numbers are rounded to 6 significant digits at construction so the
/// in-memory report matches its serialized form.
Report build_report(const ExplorationResult& result, const SurrogateSet& models);
std::string write_report(const Report& report, ReportFormat format);
Report parse_report(std::string_view text, ReportFormat format);

/// "%.6g".
std::string format_sig6(double v);

// --- contours ----------------------------------------------------------------

struct ContourSvg {
  std::string svg;
  /// Levels with no feasible q; each gets a warning element in the SVG.
  std::vector<double> skipped_levels;
  /// Per rendered level: integer-q optimum of the energy curve.
  std::vector<EnergyOptimum> optima;
};

/// One accuracy polyline in (q, s) space and one energy-vs-q polyline per
/// level.
ContourSvg render_contours_svg(std::span<const double> levels,
                               const SurrogateSet& models, int q_min, int q_max,
                               double s_min, double s_max);

}  // namespace kwsdse
