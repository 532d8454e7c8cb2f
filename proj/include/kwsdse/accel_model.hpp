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

// Analytical model of the PE-array accelerator: P engines of M multipliers,
// output-channel tiling (one output channel per engine at a time), a single
// comparator per engine for max pooling, and three on-chip memories
// (feature map, output, weights) of width M*q.
//
// No pipeline fill/drain, memory stalls or control overhead are modeled.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kwsdse/netspec.hpp"

namespace kwsdse {

inline constexpr int kDefaultMultipliersPerEngine = 8;
inline constexpr double kDefaultFrequencyHz = 100e6;
inline constexpr std::int64_t kBram36Bits = 36864;
/// Ops per s^2 used for efficiency figures (one op per MAC).
inline constexpr double kReferenceOpsPerScaleSq = 3.06e6;

struct AcceleratorConfig {
  int engines = 16;  // P
  int multipliers = kDefaultMultipliersPerEngine;  // M
  double freq_hz = kDefaultFrequencyHz;
  int q = 8;
  /// Sequential comparisons per pooling window; unset means kh*kw - 1.
  std::optional<int> pool_compares_per_window;
};

/// P = 16s, M = 8. Throws NotHardwareFriendly when 16s is not an integer.
AcceleratorConfig derive_config(const DesignPoint& point,
                                double freq_hz = kDefaultFrequencyHz);

struct LayerCost {
  std::int64_t cycles = 0;
  std::int64_t macs = 0;
  double macs_per_cycle = 0.0;
  /// macs / (cycles * P * M); zero for pooling.
  double utilization = 0.0;
};

/// Conv/FC cost under output-channel tiling:
/// ceil(F/P) * ceil(C/M) * outH * outW * kh * kw.
LayerCost layer_cycles(const LayerSpec& layer, const AcceleratorConfig& cfg);

/// Max-pool cost: ceil(C/P) * outH * outW * compares_per_window.
LayerCost pool_cycles(const LayerSpec& layer, const AcceleratorConfig& cfg);

/// Dispatches to layer_cycles or pool_cycles.
LayerCost cost_of(const LayerSpec& layer, const AcceleratorConfig& cfg);

struct NetworkLatency {
  double seconds = 0.0;
  std::int64_t total_cycles = 0;
  std::int64_t first_layer_cycles = 0;
  std::int64_t remaining_cycles = 0;
  std::vector<LayerCost> per_layer;
};

NetworkLatency network_latency(const NetworkSpec& net,
                               const AcceleratorConfig& cfg);

/// 2 * min(F, P) * min(C, M) * freq, in ops per second.
double peak_performance(const AcceleratorConfig& cfg, const LayerSpec& layer);

struct MemoryBank {
  std::int64_t width_bits = 0;
  std::int64_t depth = 0;
  /// width * depth * P: one bank of this shape per engine.
  std::int64_t total_bits = 0;
  std::int64_t bram36 = 0;
};

struct MemoryPlan {
  MemoryBank feature_map;
  MemoryBank output;
  MemoryBank weights;
  std::int64_t bram36_estimate = 0;
};

/// Widths are M*q; depths are ceil(largest_fmap / (P*M*q)) for the feature
/// and output memories and ceil(model_size / (P*M*q)) for weights. The BRAM
/// count packs each memory into 36 Kb blocks, at least one per memory.
MemoryPlan memory_plan(const NetworkSpec& net, const AcceleratorConfig& cfg);

/// Giga-ops per joule with ops = ops_per_scale_sq * s^2.
double gopj(const DesignPoint& point, double energy_mj,
            double ops_per_scale_sq = kReferenceOpsPerScaleSq);

}  // namespace kwsdse
