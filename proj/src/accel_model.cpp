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

#include "kwsdse/accel_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kwsdse/error.hpp"

namespace kwsdse {

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

void check_config(const AcceleratorConfig& cfg) {
  if (cfg.engines < 1 || cfg.multipliers < 1 || cfg.q < 1 || !(cfg.freq_hz > 0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "accelerator config needs P, M, q >= 1 and a positive clock");
  }
}

}  // namespace

AcceleratorConfig derive_config(const DesignPoint& point, double freq_hz) {
  const std::int64_t p = integral_multiple(point.s, 16);
  if (p <= 0) {
    throw Error(ErrorCode::kNotHardwareFriendly,
                "16*s is not a positive integer for s=" + std::to_string(point.s));
  }
  if (point.q < 1) throw Error(ErrorCode::kInvalidArgument, "q must be >= 1");
  AcceleratorConfig cfg;
  cfg.engines = static_cast<int>(p);
  cfg.multipliers = kDefaultMultipliersPerEngine;
  cfg.freq_hz = freq_hz;
  cfg.q = point.q;
  check_config(cfg);
  return cfg;
}

LayerCost layer_cycles(const LayerSpec& layer, const AcceleratorConfig& cfg) {
  if (layer.kind == LayerKind::kMaxPool2d) {
    throw Error(ErrorCode::kUnsupportedLayer,
                "pooling layers are costed by pool_cycles");
  }
  check_config(cfg);
  LayerCost c;
  c.macs = layer.macs();
  c.cycles = ceil_div(layer.filters, cfg.engines) *
             ceil_div(layer.in_channels, cfg.multipliers) *
             layer.out_shape.height * layer.out_shape.width * layer.kernel_h *
             layer.kernel_w;
  if (c.cycles > 0) {
    c.macs_per_cycle = static_cast<double>(c.macs) / static_cast<double>(c.cycles);
    c.utilization = c.macs_per_cycle /
                    (static_cast<double>(cfg.engines) * cfg.multipliers);
  }
  return c;
}

LayerCost pool_cycles(const LayerSpec& layer, const AcceleratorConfig& cfg) {
  if (layer.kind != LayerKind::kMaxPool2d) {
    throw Error(ErrorCode::kUnsupportedLayer,
                "pool_cycles only costs max-pooling layers");
  }
  check_config(cfg);
  const int compares = cfg.pool_compares_per_window.value_or(
      layer.kernel_h * layer.kernel_w - 1);
  LayerCost c;
  c.cycles = ceil_div(layer.in_channels, cfg.engines) * layer.out_shape.height *
             layer.out_shape.width * std::max(compares, 0);
  return c;
}

LayerCost cost_of(const LayerSpec& layer, const AcceleratorConfig& cfg) {
  return layer.kind == LayerKind::kMaxPool2d ? pool_cycles(layer, cfg)
                                              : layer_cycles(layer, cfg);
}

NetworkLatency network_latency(const NetworkSpec& net,
                               const AcceleratorConfig& cfg) {
  NetworkLatency out;
  out.per_layer.reserve(net.layers.size());
  for (const auto& layer : net.layers) {
    out.per_layer.push_back(cost_of(layer, cfg));
    out.total_cycles += out.per_layer.back().cycles;
  }
  if (!out.per_layer.empty()) out.first_layer_cycles = out.per_layer.front().cycles;
  out.remaining_cycles = out.total_cycles - out.first_layer_cycles;
  out.seconds = static_cast<double>(out.total_cycles) / cfg.freq_hz;
  return out;
}

double peak_performance(const AcceleratorConfig& cfg, const LayerSpec& layer) {
  if (layer.kind == LayerKind::kMaxPool2d) {
    throw Error(ErrorCode::kUnsupportedLayer,
                "peak performance is defined for conv/FC layers");
  }
  const double f = static_cast<double>(std::min<std::int64_t>(layer.filters, cfg.engines));
  const double c =
      static_cast<double>(std::min<std::int64_t>(layer.in_channels, cfg.multipliers));
  return 2.0 * f * c * cfg.freq_hz;
}

namespace {

MemoryBank bank(std::int64_t content_bits, const AcceleratorConfig& cfg) {
  MemoryBank b;
  b.width_bits = static_cast<std::int64_t>(cfg.multipliers) * cfg.q;
  b.depth = ceil_div(content_bits, b.width_bits * cfg.engines);
  b.total_bits = b.width_bits * b.depth * cfg.engines;
  b.bram36 = std::max<std::int64_t>(1, ceil_div(b.total_bits, kBram36Bits));
  return b;
}

}  // namespace

MemoryPlan memory_plan(const NetworkSpec& net, const AcceleratorConfig& cfg) {
  check_config(cfg);
  MemoryPlan plan;
  const std::int64_t fmap = largest_fmap_bits(net, cfg.q);
  plan.feature_map = bank(fmap, cfg);
  plan.output = bank(fmap, cfg);
  plan.weights = bank(model_size_bits(net, cfg.q), cfg);
  plan.bram36_estimate =
      plan.feature_map.bram36 + plan.output.bram36 + plan.weights.bram36;
  return plan;
}

double gopj(const DesignPoint& point, double energy_mj, double ops_per_scale_sq) {
  if (!(energy_mj > 0.0)) {
    throw Error(ErrorCode::kNonPositiveEnergy, "energy must be positive");
  }
  const double ops = ops_per_scale_sq * point.s * point.s;
  return ops / (energy_mj * 1e-3) / 1e9;
}

}  // namespace kwsdse
