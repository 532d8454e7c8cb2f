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

#include "kwsdse.h"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "kwsdse/accel_model.hpp"
#include "kwsdse/error.hpp"
#include "kwsdse/explorer.hpp"
#include "kwsdse/io.hpp"
#include "kwsdse/netspec.hpp"
#include "kwsdse/surrogates.hpp"

struct kd_accuracy_samples {
  std::vector<kwsdse::AccuracySample> rows;
};

struct kd_hw_samples {
  std::vector<kwsdse::HwSample> rows;
};

struct kd_models {
  kwsdse::ModelDocument doc;
};

struct kd_exploration {
  kwsdse::ExplorationResult result;
  kwsdse::SurrogateSet models;
};

namespace {

thread_local std::string g_last_error;

kd_status fail(kd_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
kd_status guarded(Fn&& fn) {
  try {
    fn();
    return KD_OK;
  } catch (const kwsdse::Error& e) {
    return fail(static_cast<kd_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(KD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(KD_ERR_INTERNAL, e.what());
  }
}

kd_status null_arg(const char* name) {
  return fail(KD_ERR_INVALID_ARGUMENT, std::string(name) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

kwsdse::ShapeConventions to_cpp(const kd_conventions* c) {
  kwsdse::ShapeConventions out;
  if (c == nullptr) return out;
  out.conv_padding = c->padding == KD_PADDING_VALID ? kwsdse::Padding::kValid
                                                    : kwsdse::Padding::kSame;
  out.pool_rounding = c->pool_rounding == KD_POOL_CEIL ? kwsdse::PoolRounding::kCeil
                                                       : kwsdse::PoolRounding::kFloor;
  out.count_biases = c->count_biases != 0;
  return out;
}

kd_fit_report to_c(const kwsdse::FitReport& r) {
  return {r.rmse, r.n_points, r.max_abs_residual, r.condition_indicator};
}

kwsdse::FitReport residual_report(const std::vector<double>& residuals, double condition) {
  kwsdse::FitReport r;
  double ss = 0.0;
  for (double x : residuals) {
    ss += x * x;
    r.max_abs_residual = std::max(r.max_abs_residual, std::abs(x));
  }
  r.n_points = static_cast<int>(residuals.size());
  r.rmse = residuals.empty() ? 0.0 : std::sqrt(ss / static_cast<double>(residuals.size()));
  r.condition_indicator = condition;
  return r;
}

std::string printf_string(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
std::string printf_string(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

std::string layer_label(const kwsdse::LayerSpec& l) {
  switch (l.kind) {
    case kwsdse::LayerKind::kConv2d:
      return printf_string("conv %dx%d/%lld", l.kernel_h, l.kernel_w,
                           static_cast<long long>(l.filters));
    case kwsdse::LayerKind::kMaxPool2d:
      return printf_string("maxpool %dx%d", l.kernel_h, l.kernel_w);
    case kwsdse::LayerKind::kFullyConnected:
      return printf_string("fc %lld", static_cast<long long>(l.filters));
  }
  return "?";
}

std::string shape_label(const kwsdse::Shape3& s) {
  return printf_string("%lldx%lldx%lld", static_cast<long long>(s.height),
                       static_cast<long long>(s.width), static_cast<long long>(s.channels));
}

}  // namespace

extern "C" {

const char* kd_version(void) { return kwsdse::kToolVersion.data(); }

const char* kd_status_name(kd_status status) {
  if (status == KD_OK) return "Ok";
  if (status == KD_ERR_INTERNAL) return "Internal";
  if (status < KD_ERR_INVALID_ARGUMENT || status > KD_ERR_MISSING_MODEL) return "Unknown";
  return kwsdse::error_name(static_cast<kwsdse::ErrorCode>(status)).data();
}

const char* kd_last_error(void) { return g_last_error.c_str(); }

void kd_string_free(char* s) { std::free(s); }

kd_conventions kd_default_conventions(void) {
  return {KD_PADDING_SAME, KD_POOL_FLOOR, 0};
}

// --- samples ---------------------------------------------------------------------

kd_status kd_accuracy_samples_load(const char* path, kd_accuracy_samples** out) {
  if (path == nullptr) return null_arg("path");
  if (out == nullptr) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<kd_accuracy_samples>();
    h->rows = kwsdse::parse_accuracy_csv(path);
    *out = h.release();
  });
}

size_t kd_accuracy_samples_count(const kd_accuracy_samples* samples) {
  return samples == nullptr ? 0 : samples->rows.size();
}

kd_status kd_accuracy_samples_get(const kd_accuracy_samples* samples, size_t index, double* q,
                                  double* s, double* accuracy_pct) {
  if (samples == nullptr) return null_arg("samples");
  if (index >= samples->rows.size()) return fail(KD_ERR_INVALID_ARGUMENT, "index out of range");
  const auto& r = samples->rows[index];
  if (q) *q = r.q;
  if (s) *s = r.s;
  if (accuracy_pct) *accuracy_pct = r.accuracy_pct;
  return KD_OK;
}

void kd_accuracy_samples_free(kd_accuracy_samples* samples) { delete samples; }

kd_status kd_hw_samples_load(const char* path, kd_hw_samples** out) {
  if (path == nullptr) return null_arg("path");
  if (out == nullptr) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<kd_hw_samples>();
    h->rows = kwsdse::parse_hw_csv(path);
    *out = h.release();
  });
}

size_t kd_hw_samples_count(const kd_hw_samples* samples) {
  return samples == nullptr ? 0 : samples->rows.size();
}

kd_status kd_hw_samples_get(const kd_hw_samples* samples, size_t index, double* q, double* s,
                            double* power_w, double* latency_ms, double* energy_mj) {
  if (samples == nullptr) return null_arg("samples");
  if (index >= samples->rows.size()) return fail(KD_ERR_INVALID_ARGUMENT, "index out of range");
  const auto& r = samples->rows[index];
  if (q) *q = r.q;
  if (s) *s = r.s;
  if (power_w) *power_w = r.power_w;
  if (latency_ms) *latency_ms = r.latency_ms;
  if (energy_mj) *energy_mj = r.energy_mj;
  return KD_OK;
}

void kd_hw_samples_free(kd_hw_samples* samples) { delete samples; }

// --- models ----------------------------------------------------------------------

kd_status kd_models_new(kd_models** out) {
  if (out == nullptr) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = new kd_models(); });
}

kd_status kd_models_merge_json(kd_models* models, const char* path) {
  if (models == nullptr) return null_arg("models");
  if (path == nullptr) return null_arg("path");
  return guarded([&] {
    const auto doc = kwsdse::parse_models_json(kwsdse::read_file(path), path);
    kwsdse::merge_models(models->doc, doc);
  });
}

kd_status kd_models_to_json(const kd_models* models, char** out) {
  if (models == nullptr) return null_arg("models");
  if (out == nullptr) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = dup_string(kwsdse::write_models_json(models->doc)); });
}

kd_status kd_models_fit_accuracy(kd_models* models, const kd_accuracy_samples* samples,
                                 int refine, kd_fit_report* report) {
  if (models == nullptr) return null_arg("models");
  if (samples == nullptr) return null_arg("samples");
  return guarded([&] {
    models->doc.accuracy = kwsdse::fit_accuracy(samples->rows, refine != 0);
    if (report) *report = to_c(models->doc.accuracy->report);
  });
}

kd_status kd_models_fit_hw(kd_models* models, const kd_hw_samples* samples, int joint,
                           kd_hw_fit_report* report) {
  if (models == nullptr) return null_arg("models");
  if (samples == nullptr) return null_arg("samples");
  return guarded([&] {
    kwsdse::PowerFit power = kwsdse::fit_power(samples->rows);
    kwsdse::LatencyFit latency = kwsdse::fit_latency(samples->rows);
    if (joint != 0) {
      const auto pair = kwsdse::refine_energy_jointly(power.model, latency.model, samples->rows);
      power.model = pair.power;
      latency.model = pair.latency;
      std::vector<double> rp;
      std::vector<double> rl;
      for (const auto& h : samples->rows) {
        rp.push_back(kwsdse::predict_power(power.model, h.q, h.s) - h.power_w);
        rl.push_back(kwsdse::predict_latency(latency.model, h.s) - h.latency_ms);
      }
      power.report = residual_report(rp, power.report.condition_indicator);
      latency.report = residual_report(rl, latency.report.condition_indicator);
    }
    const auto energy = kwsdse::energy_rmse(power.model, latency.model, samples->rows);
    models->doc.power = power;
    models->doc.latency = latency;
    if (report) {
      report->power = to_c(power.report);
      report->latency = to_c(latency.report);
      report->energy = to_c(energy);
      report->latency_q_spread = latency.q_spread;
    }
  });
}

void kd_models_free(kd_models* models) { delete models; }

kd_status kd_predict(const kd_models* models, double q, double s, kd_prediction* out) {
  if (models == nullptr) return null_arg("models");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    const auto set = kwsdse::to_surrogates(models->doc);
    kd_prediction p{};
    p.accuracy_pct = kwsdse::predict_accuracy(set.accuracy, q, s);
    p.power_w = kwsdse::predict_power(set.power, q, s);
    p.latency_ms = kwsdse::predict_latency(set.latency, s);
    const auto e = kwsdse::predict_energy(set.power, set.latency, q, s);
    p.energy_mj = e.mj;
    p.energy_warning = e.warning ? 1 : 0;
    p.extrapolated = (!set.accuracy.domain.contains(q, s) || !set.power.domain.contains(q, s) ||
                      !set.latency.domain.contains(q, s))
                         ? 1
                         : 0;
    *out = p;
  });
}

kd_status kd_invert_scale(const kd_models* models, double q, double accuracy_pct,
                          double* s_out) {
  if (models == nullptr) return null_arg("models");
  if (s_out == nullptr) return null_arg("s_out");
  if (!models->doc.accuracy) return fail(KD_ERR_MISSING_MODEL, "no accuracy model loaded");
  return guarded(
      [&] { *s_out = kwsdse::invert_scale(models->doc.accuracy->model, q, accuracy_pct); });
}

kd_status kd_min_energy_at_accuracy(const kd_models* models, double accuracy_pct, int q_min,
                                    int q_max, int* q_out, double* s_out,
                                    double* energy_mj_out) {
  if (models == nullptr) return null_arg("models");
  if (q_min > q_max) return fail(KD_ERR_INVALID_ARGUMENT, "q range is empty");
  return guarded([&] {
    const auto set = kwsdse::to_surrogates(models->doc);
    std::vector<int> qs;
    for (int q = q_min; q <= q_max; ++q) qs.push_back(q);
    const auto opt =
        kwsdse::min_energy_at_accuracy(set.accuracy, set.power, set.latency, accuracy_pct, qs);
    if (q_out) *q_out = opt.q;
    if (s_out) *s_out = opt.s;
    if (energy_mj_out) *energy_mj_out = opt.energy_mj;
  });
}

// --- network and accelerator -------------------------------------------------------

kd_status kd_analyze_net(double s, int q, const kd_conventions* conventions,
                         kd_net_summary* out, char** text_out) {
  if (text_out) *text_out = nullptr;
  if (q < 1) return fail(KD_ERR_INVALID_ARGUMENT, "q must be >= 1");
  return guarded([&] {
    const auto conv = to_cpp(conventions);
    const auto net = kwsdse::build_network(s, conv);
    const auto a = kwsdse::analytics(net, q);
    const auto poly = kwsdse::mac_polynomial(conv);
    if (out) {
      *out = {a.total_macs, a.weight_count, a.model_size_bits, a.largest_fmap_bits,
              a.c_comp,     a.c_size,       a.c_fmap,          poly.quadratic,
              poly.linear};
    }
    if (text_out) {
      std::string t = printf_string("network at s=%g q=%d (padding=%s, pool=%s, biases=%s)\n", s,
                                    q, std::string(kwsdse::to_string(conv.conv_padding)).c_str(),
                                    std::string(kwsdse::to_string(conv.pool_rounding)).c_str(),
                                    conv.count_biases ? "counted" : "excluded");
      t += printf_string("%-16s %-12s %-12s %14s %12s\n", "layer", "input", "output", "macs",
                         "weights");
      for (const auto& l : net.layers) {
        t += printf_string("%-16s %-12s %-12s %14lld %12lld\n", layer_label(l).c_str(),
                           shape_label(l.in_shape).c_str(), shape_label(l.out_shape).c_str(),
                           static_cast<long long>(l.macs()),
                           static_cast<long long>(l.weights() + (conv.count_biases ? l.biases() : 0)));
      }
      t += printf_string("total_macs        %lld\n", static_cast<long long>(a.total_macs));
      t += printf_string("weight_count      %lld\n", static_cast<long long>(a.weight_count));
      t += printf_string("model_size_kb     %.6g\n", a.model_size_bits / kwsdse::kBitsPerKB);
      t += printf_string("largest_fmap_kb   %.6g\n", a.largest_fmap_bits / kwsdse::kBitsPerKB);
      t += printf_string("c_comp            %.6g M MACs/s^2\n", a.c_comp);
      t += printf_string("c_size            %.6g KB/(q s^2)\n", a.c_size);
      t += printf_string("c_fmap            %.6g KB/(q s)\n", a.c_fmap);
      t += printf_string("mac_polynomial    %lld s^2 + %lld s\n",
                         static_cast<long long>(poly.quadratic),
                         static_cast<long long>(poly.linear));
      *text_out = dup_string(t);
    }
  });
}

kd_status kd_accel_report(double q, double s, double freq_hz, const kd_conventions* conventions,
                          kd_accel_summary* out, char** text_out) {
  if (text_out) *text_out = nullptr;
  if (q < 1 || q != std::floor(q)) return fail(KD_ERR_NOT_HARDWARE_FRIENDLY, "q must be a natural number");
  return guarded([&] {
    const kwsdse::DesignPoint point{static_cast<int>(q), s};
    const auto cfg = kwsdse::derive_config(point, freq_hz);
    const auto net = kwsdse::build_network(s, to_cpp(conventions));
    const auto lat = kwsdse::network_latency(net, cfg);
    const auto mem = kwsdse::memory_plan(net, cfg);
    if (out) {
      *out = {cfg.engines,     cfg.multipliers,         lat.total_cycles,
              lat.first_layer_cycles, lat.seconds * 1e3, mem.bram36_estimate};
    }
    if (text_out) {
      std::string t = printf_string("accelerator at q=%d s=%g: P=%d M=%d f=%.6g MHz\n", point.q,
                                    s, cfg.engines, cfg.multipliers, cfg.freq_hz / 1e6);
      t += printf_string("%-16s %14s %14s %10s %14s\n", "layer", "cycles", "macs", "util",
                         "peak_gops");
      for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const auto& l = net.layers[i];
        const auto& c = lat.per_layer[i];
        const double peak = l.kind == kwsdse::LayerKind::kMaxPool2d
                                ? 0.0
                                : kwsdse::peak_performance(cfg, l) / 1e9;
        t += printf_string("%-16s %14lld %14lld %10.4f %14.6g\n", layer_label(l).c_str(),
                           static_cast<long long>(c.cycles), static_cast<long long>(c.macs),
                           c.utilization, peak);
      }
      t += printf_string("total_cycles      %lld\n", static_cast<long long>(lat.total_cycles));
      t += printf_string("first_layer       %lld\n",
                         static_cast<long long>(lat.first_layer_cycles));
      t += printf_string("latency_ms        %.6g\n", lat.seconds * 1e3);
      const auto bank = [&](const char* name, const kwsdse::MemoryBank& b) {
        t += printf_string("%-17s width=%lld depth=%lld total_bits=%lld bram36=%lld\n", name,
                           static_cast<long long>(b.width_bits), static_cast<long long>(b.depth),
                           static_cast<long long>(b.total_bits),
                           static_cast<long long>(b.bram36));
      };
      bank("feature_memory", mem.feature_map);
      bank("output_memory", mem.output);
      bank("weight_memory", mem.weights);
      t += printf_string("bram36_estimate   %lld\n", static_cast<long long>(mem.bram36_estimate));
      *text_out = dup_string(t);
    }
  });
}

// --- exploration ---------------------------------------------------------------------

kd_explore_request kd_default_explore_request(void) {
  const kwsdse::ExplorationRequest r;
  return {r.target_accuracy_pct, r.q_min, r.q_max, r.s_min, r.s_max, r.freq_hz};
}

kd_status kd_explore(const kd_models* models, const kd_explore_request* request,
                     const kd_conventions* conventions, kd_exploration** out) {
  if (models == nullptr) return null_arg("models");
  if (out == nullptr) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    kwsdse::ExplorationRequest req;
    if (request) {
      req.target_accuracy_pct = request->target_accuracy_pct;
      req.q_min = request->q_min;
      req.q_max = request->q_max;
      req.s_min = request->s_min;
      req.s_max = request->s_max;
      req.freq_hz = request->freq_hz;
    }
    auto h = std::make_unique<kd_exploration>();
    h->models = kwsdse::to_surrogates(models->doc);
    h->result = kwsdse::explore(req, h->models, to_cpp(conventions));
    *out = h.release();
  });
}

size_t kd_exploration_grid_size(const kd_exploration* ex) {
  return ex == nullptr ? 0 : ex->result.evaluated.size();
}

size_t kd_exploration_feasible_count(const kd_exploration* ex) {
  return ex == nullptr ? 0 : ex->result.ranked.size();
}

size_t kd_exploration_pareto_count(const kd_exploration* ex) {
  return ex == nullptr ? 0 : ex->result.pareto.size();
}

kd_status kd_exploration_chosen(const kd_exploration* ex, kd_candidate* out, int* found) {
  if (ex == nullptr) return null_arg("ex");
  if (found == nullptr) return null_arg("found");
  const kwsdse::Candidate* c = ex->result.chosen();
  *found = c != nullptr ? 1 : 0;
  if (c != nullptr && out != nullptr) {
    *out = {c->point.q,         c->point.s,        c->engines,         c->multipliers,
            c->pred_accuracy_pct, c->pred_power_w, c->pred_latency_ms, c->pred_energy_mj,
            c->model_size_bits, c->bram36_estimate, c->gopj_estimate,  c->feasible ? 1 : 0,
            c->extrapolated ? 1 : 0};
  }
  return KD_OK;
}

kd_status kd_exploration_write(const kd_exploration* ex, kd_format format, char** out) {
  if (ex == nullptr) return null_arg("ex");
  if (out == nullptr) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    const auto report = kwsdse::build_report(ex->result, ex->models);
    *out = dup_string(kwsdse::write_report(
        report, format == KD_FORMAT_JSON ? kwsdse::ReportFormat::kJson
                                         : kwsdse::ReportFormat::kCsv));
  });
}

void kd_exploration_free(kd_exploration* ex) { delete ex; }

kd_status kd_render_contours_svg(const kd_models* models, const double* levels,
                                 size_t n_levels, int q_min, int q_max, double s_min,
                                 double s_max, char** svg_out, size_t* skipped) {
  if (models == nullptr) return null_arg("models");
  if (svg_out == nullptr) return null_arg("svg_out");
  if (levels == nullptr && n_levels > 0) return null_arg("levels");
  *svg_out = nullptr;
  return guarded([&] {
    const auto set = kwsdse::to_surrogates(models->doc);
    const auto svg = kwsdse::render_contours_svg({levels, n_levels}, set, q_min, q_max, s_min,
                                                 s_max);
    if (skipped) *skipped = svg.skipped_levels.size();
    *svg_out = dup_string(svg.svg);
  });
}

}  // extern "C"
