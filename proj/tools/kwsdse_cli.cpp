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

// kwsdse command-line front end. Talks to the library only through kwsdse.h.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kwsdse.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitFit = 3;

struct Failure {
  kd_status status;
};

int exit_code_for(kd_status st) {
  switch (st) {
    case KD_ERR_TOO_FEW_POINTS:
    case KD_ERR_RANK_DEFICIENT:
    case KD_ERR_DENOMINATOR_VANISHES:
      return kExitFit;
    case KD_ERR_INTERNAL:
      return 1;
    default:
      return kExitInput;
  }
}

void check(kd_status st) {
  if (st != KD_OK) {
    std::cerr << "error: " << kd_status_name(st) << ": " << kd_last_error() << "\n";
    throw Failure{st};
  }
}

struct CString {
  char* p = nullptr;
  ~CString() { kd_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

struct ModelsHandle {
  kd_models* h = nullptr;
  ModelsHandle() { check(kd_models_new(&h)); }
  ~ModelsHandle() { kd_models_free(h); }
  ModelsHandle(const ModelsHandle&) = delete;
  ModelsHandle& operator=(const ModelsHandle&) = delete;
};

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: Io: cannot write " << path << "\n";
    throw Failure{KD_ERR_IO};
  }
  out << text;
}

// "a:b" or "a,b".
template <typename T>
std::pair<T, T> parse_range(const std::string& text, const char* flag) {
  std::string t = text;
  for (char& c : t) {
    if (c == ':' || c == ',') c = ' ';
  }
  std::istringstream in(t);
  T lo{};
  T hi{};
  std::string rest;
  if (!(in >> lo >> hi) || (in >> rest)) {
    std::cerr << "error: InvalidArgument: " << flag << " expects LO:HI, got '" << text << "'\n";
    throw Failure{KD_ERR_INVALID_ARGUMENT};
  }
  return {lo, hi};
}

struct Common {
  std::string accuracy_csv;
  std::string hw_csv;
  std::vector<std::string> model_in;
  std::string model_out;
  std::string padding = "same";
  std::string pool_rounding = "floor";
  bool count_biases = false;
  bool no_refine = false;
  bool joint = false;
};

kd_conventions conventions_of(const Common& c) {
  kd_conventions conv = kd_default_conventions();
  conv.padding = c.padding == "valid" ? KD_PADDING_VALID : KD_PADDING_SAME;
  conv.pool_rounding = c.pool_rounding == "ceil" ? KD_POOL_CEIL : KD_POOL_FLOOR;
  conv.count_biases = c.count_biases ? 1 : 0;
  return conv;
}

void print_report(const char* name, const kd_fit_report& r) {
  std::fprintf(stderr, "%-9s rmse=%.6g max_abs_residual=%.6g n=%d cond=%.6g\n", name, r.rmse,
               r.max_abs_residual, r.n_points, r.condition_indicator);
}

// Loads --model-in files in order, then fits whatever sample files were given.
void load_models(const Common& c, kd_models* models) {
  for (const auto& path : c.model_in) check(kd_models_merge_json(models, path.c_str()));
  if (!c.accuracy_csv.empty()) {
    kd_accuracy_samples* s = nullptr;
    check(kd_accuracy_samples_load(c.accuracy_csv.c_str(), &s));
    std::unique_ptr<kd_accuracy_samples, decltype(&kd_accuracy_samples_free)> guard(
        s, kd_accuracy_samples_free);
    kd_fit_report r{};
    check(kd_models_fit_accuracy(models, s, c.no_refine ? 0 : 1, &r));
    print_report("accuracy", r);
  }
  if (!c.hw_csv.empty()) {
    kd_hw_samples* s = nullptr;
    check(kd_hw_samples_load(c.hw_csv.c_str(), &s));
    std::unique_ptr<kd_hw_samples, decltype(&kd_hw_samples_free)> guard(s, kd_hw_samples_free);
    kd_hw_fit_report r{};
    check(kd_models_fit_hw(models, s, c.joint ? 1 : 0, &r));
    print_report("power", r.power);
    print_report("latency", r.latency);
    print_report("energy", r.energy);
    std::fprintf(stderr, "latency q-spread=%.6g ms\n", r.latency_q_spread);
  }
}

void save_models(const Common& c, kd_models* models) {
  CString json;
  check(kd_models_to_json(models, &json.p));
  write_output(c.model_out, json.str());
}

void add_model_flags(CLI::App* app, Common& c) {
  app->add_option("--model-in", c.model_in, "Model JSON to load (repeatable; later wins)");
  app->add_option("--accuracy-csv", c.accuracy_csv, "Accuracy samples to fit first");
  app->add_option("--hw-csv", c.hw_csv, "Hardware samples to fit first");
  app->add_flag("--no-refine", c.no_refine, "Skip Levenberg-Marquardt accuracy refinement");
  app->add_flag("--joint", c.joint, "Refine power and latency jointly against energy");
}

void add_convention_flags(CLI::App* app, Common& c) {
  app->add_option("--padding", c.padding, "Convolution padding")
      ->check(CLI::IsMember({"same", "valid"}));
  app->add_option("--pool-rounding", c.pool_rounding, "Pooling output rounding")
      ->check(CLI::IsMember({"floor", "ceil"}));
  app->add_flag("--count-biases", c.count_biases, "Include biases in model size");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Design-space exploration for scaled and quantized keyword-spotting CNNs"};
  app.set_version_flag("--version", std::string(kd_version()));
  app.require_subcommand(1);

  Common c;
  double target = 90.0;
  std::string q_range = "2:8";
  std::string s_range = "0.5:8";
  double freq_mhz = 100.0;
  std::string format = "csv";
  std::string out_path;
  std::string svg_out;
  double q = 8.0;
  double s = 0.0;
  std::vector<double> levels{90.0};

  auto* fit_acc = app.add_subcommand("fit-accuracy", "Fit the rational accuracy model");
  fit_acc->add_option("--accuracy-csv", c.accuracy_csv, "q,s,accuracy_pct samples")->required();
  fit_acc->add_option("--model-in", c.model_in, "Model JSON to merge into");
  fit_acc->add_option("--model-out", c.model_out, "Output model JSON (default stdout)");
  fit_acc->add_flag("--no-refine", c.no_refine, "Skip Levenberg-Marquardt refinement");

  auto* fit_hw = app.add_subcommand("fit-hw", "Fit the power and latency models");
  fit_hw->add_option("--hw-csv", c.hw_csv, "q,s,power_w,latency_ms[,energy_mj] samples")
      ->required();
  fit_hw->add_option("--model-in", c.model_in, "Model JSON to merge into");
  fit_hw->add_option("--model-out", c.model_out, "Output model JSON (default stdout)");
  fit_hw->add_flag("--joint", c.joint, "Refine power and latency jointly against energy");

  auto* predict = app.add_subcommand("predict", "Predict accuracy, power, latency and energy");
  add_model_flags(predict, c);
  predict->add_option("--q", q, "Quantization bits")->required();
  predict->add_option("--s", s, "Scale");
  predict->add_option("--target", target, "Also invert accuracy to s at this level");

  auto* explore = app.add_subcommand("explore", "Grid search for minimum-energy configurations");
  add_model_flags(explore, c);
  add_convention_flags(explore, c);
  explore->add_option("--target", target, "Accuracy target in percent")->capture_default_str();
  explore->add_option("--q-range", q_range, "Integer q range LO:HI")->capture_default_str();
  explore->add_option("--s-range", s_range, "Scale range LO:HI (grid step 1/16)")->capture_default_str();
  explore->add_option("--freq-mhz", freq_mhz, "Accelerator clock")->capture_default_str();
  explore->add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"csv", "json"}));
  explore->add_option("--out", out_path, "Report path (default stdout)");
  explore->add_option("--svg-out", svg_out, "Also render contours at the target");
  explore->add_option("--model-out", c.model_out, "Write the models used");

  auto* analyze = app.add_subcommand("analyze-net", "Layer-by-layer network analytics");
  add_convention_flags(analyze, c);
  analyze->add_option("--s", s, "Scale")->required();
  analyze->add_option("--q", q, "Quantization bits")->capture_default_str();

  auto* accel = app.add_subcommand("accel-model", "Analytical accelerator cycles and memory");
  add_convention_flags(accel, c);
  accel->add_option("--q", q, "Quantization bits")->required();
  accel->add_option("--s", s, "Scale")->required();
  accel->add_option("--freq-mhz", freq_mhz, "Accelerator clock")->capture_default_str();

  auto* contours = app.add_subcommand("contours", "Render accuracy contours and energy curves");
  add_model_flags(contours, c);
  contours->add_option("--levels", levels, "Accuracy levels in percent")->delimiter(',');
  contours->add_option("--q-range", q_range, "Integer q range LO:HI")->capture_default_str();
  contours->add_option("--s-range", s_range, "Scale range LO:HI")->capture_default_str();
  contours->add_option("--svg-out", svg_out, "SVG path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (fit_acc->parsed() || fit_hw->parsed()) {
      ModelsHandle models;
      load_models(c, models.h);
      save_models(c, models.h);
      return kExitOk;
    }

    if (predict->parsed()) {
      ModelsHandle models;
      load_models(c, models.h);
      if (predict->count("--s") > 0) {
        kd_prediction p{};
        check(kd_predict(models.h, q, s, &p));
        std::printf("q=%.6g s=%.6g accuracy_pct=%.6g power_w=%.6g latency_ms=%.6g "
                    "energy_mj=%.6g%s%s\n",
                    q, s, p.accuracy_pct, p.power_w, p.latency_ms, p.energy_mj,
                    p.extrapolated ? " (extrapolated)" : "",
                    p.energy_warning ? " (warning: non-positive energy)" : "");
      }
      if (predict->count("--target") > 0) {
        double s_at = 0.0;
        check(kd_invert_scale(models.h, q, target, &s_at));
        std::printf("q=%.6g accuracy_pct=%.6g -> s=%.6g\n", q, target, s_at);
      }
      if (predict->count("--s") == 0 && predict->count("--target") == 0) {
        std::cerr << "error: InvalidArgument: predict needs --s and/or --target\n";
        return kExitInput;
      }
      return kExitOk;
    }

    if (explore->parsed()) {
      ModelsHandle models;
      load_models(c, models.h);
      if (!c.model_out.empty()) save_models(c, models.h);
      const auto [q_lo, q_hi] = parse_range<int>(q_range, "--q-range");
      const auto [s_lo, s_hi] = parse_range<double>(s_range, "--s-range");
      kd_explore_request req = kd_default_explore_request();
      req.target_accuracy_pct = target;
      req.q_min = q_lo;
      req.q_max = q_hi;
      req.s_min = s_lo;
      req.s_max = s_hi;
      req.freq_hz = freq_mhz * 1e6;
      const kd_conventions conv = conventions_of(c);
      kd_exploration* ex = nullptr;
      check(kd_explore(models.h, &req, &conv, &ex));
      std::unique_ptr<kd_exploration, decltype(&kd_exploration_free)> guard(
          ex, kd_exploration_free);
      CString report;
      check(kd_exploration_write(ex, format == "json" ? KD_FORMAT_JSON : KD_FORMAT_CSV,
                                 &report.p));
      write_output(out_path, report.str());

      kd_candidate best{};
      int found = 0;
      check(kd_exploration_chosen(ex, &best, &found));
      if (found) {
        std::fprintf(stderr,
                     "chosen: q=%d s=%.6g P=%d M=%d accuracy_pct=%.6g energy_mj=%.6g%s\n",
                     best.q, best.s, best.engines, best.multipliers, best.accuracy_pct,
                     best.energy_mj, best.extrapolated ? " (extrapolated)" : "");
      } else {
        std::fprintf(stderr, "notice: NoFeasiblePoint: no grid point reaches %.6g%% "
                             "(%zu points evaluated)\n",
                     target, kd_exploration_grid_size(ex));
      }
      if (!svg_out.empty()) {
        CString svg;
        size_t skipped = 0;
        check(kd_render_contours_svg(models.h, &target, 1, q_lo, q_hi, s_lo, s_hi, &svg.p,
                                     &skipped));
        write_output(svg_out, svg.str());
      }
      return kExitOk;
    }

    if (analyze->parsed()) {
      const kd_conventions conv = conventions_of(c);
      CString text;
      check(kd_analyze_net(s, static_cast<int>(q), &conv, nullptr, &text.p));
      std::cout << text.str();
      return kExitOk;
    }

    if (accel->parsed()) {
      const kd_conventions conv = conventions_of(c);
      CString text;
      check(kd_accel_report(q, s, freq_mhz * 1e6, &conv, nullptr, &text.p));
      std::cout << text.str();
      return kExitOk;
    }

    if (contours->parsed()) {
      ModelsHandle models;
      load_models(c, models.h);
      const auto [q_lo, q_hi] = parse_range<int>(q_range, "--q-range");
      const auto [s_lo, s_hi] = parse_range<double>(s_range, "--s-range");
      CString svg;
      size_t skipped = 0;
      check(kd_render_contours_svg(models.h, levels.data(), levels.size(), q_lo, q_hi, s_lo,
                                   s_hi, &svg.p, &skipped));
      write_output(svg_out, svg.str());
      if (skipped > 0) {
        std::fprintf(stderr, "warning: %zu level(s) unreachable for every q in range\n",
                     skipped);
      }
      return kExitOk;
    }
  } catch (const Failure& f) {
    return exit_code_for(f.status);
  }
  return kExitOk;
}
