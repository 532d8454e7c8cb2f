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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "kwsdse/accel_model.hpp"
#include "kwsdse/error.hpp"
#include "kwsdse/netspec.hpp"

using namespace kwsdse;

namespace {

std::vector<double> grid_scales() {
  std::vector<double> v;
  for (int n = 8; n <= 128; ++n) v.push_back(n / 16.0);
  return v;
}

// Direct loop-nest count: one cycle per (filter tile, channel tile, output
// pixel, kernel tap).
std::int64_t loop_nest_cycles(const LayerSpec& l, int P, int M) {
  std::int64_t cycles = 0;
  for (std::int64_t f0 = 0; f0 < l.filters; f0 += P) {
    for (std::int64_t c0 = 0; c0 < l.in_channels; c0 += M) {
      cycles += l.out_shape.height * l.out_shape.width * l.kernel_h * l.kernel_w;
    }
  }
  return cycles;
}

LayerSpec dense(std::int64_t f, std::int64_t c) {
  LayerSpec l;
  l.kind = LayerKind::kFullyConnected;
  l.filters = f;
  l.in_channels = c;
  l.in_shape = {1, 1, c};
  l.out_shape = {1, 1, f};
  return l;
}

}  // namespace

TEST_CASE("derive_config pins P = 16s and M = 8") {
  const auto a = derive_config({4, 4.5}, 100e6);
  CHECK(a.engines == 72);
  CHECK(a.multipliers == 8);
  CHECK(a.q == 4);
  CHECK(a.freq_hz == 100e6);
  const auto b = derive_config({8, 1.0}, 100e6);
  CHECK(b.engines == 16);
  CHECK(b.multipliers == 8);
  try {
    derive_config({4, 0.3}, 100e6);
    FAIL("expected NotHardwareFriendly");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotHardwareFriendly);
  }
}

TEST_CASE("conv cycles at s=1") {
  const auto net = build_network(1.0);
  const auto cfg = derive_config({4, 1.0});
  CHECK(layer_cycles(net.layers[0], cfg).cycles == 20'592);
  CHECK(layer_cycles(net.layers[2], cfg).cycles == 19'008);
  CHECK(pool_cycles(net.layers[1], cfg).cycles == 1'584);
  CHECK(pool_cycles(net.layers[5], cfg).cycles == 30);
  CHECK_THROWS_AS(layer_cycles(net.layers[1], cfg), Error);
  CHECK_THROWS_AS(pool_cycles(net.layers[0], cfg), Error);
}

TEST_CASE("cycle formula matches loop-nest enumeration") {
  for (const double s : grid_scales()) {
    const auto net = build_network(s);
    const auto cfg = derive_config({4, s});
    for (const auto& l : net.layers) {
      if (l.kind == LayerKind::kMaxPool2d) continue;
      CHECK(layer_cycles(l, cfg).cycles == loop_nest_cycles(l, cfg.engines, cfg.multipliers));
    }
  }
}

TEST_CASE("single-compare pooling window costs nothing") {
  auto net = build_network(1.0);
  LayerSpec pool = net.layers[1];
  pool.kernel_h = pool.kernel_w = 1;
  CHECK(pool_cycles(pool, derive_config({4, 1.0})).cycles == 0);
  AcceleratorConfig cfg = derive_config({4, 1.0});
  cfg.pool_compares_per_window = 1;
  CHECK(pool_cycles(net.layers[1], cfg).cycles == 4 * 22 * 6);
}

TEST_CASE("fully parallel layer utilization") {
  AcceleratorConfig cfg;
  cfg.engines = 16;
  cfg.multipliers = 8;
  const auto c = layer_cycles(dense(12, 6), cfg);
  CHECK(c.cycles == 1);
  CHECK(c.utilization == doctest::Approx(12.0 * 6.0 / (16.0 * 8.0)));
}

TEST_CASE("cycle lower bound, with equality exactly under divisibility") {
  for (const double s : grid_scales()) {
    const auto net = build_network(s);
    const auto cfg = derive_config({4, s});
    const std::int64_t pm = cfg.engines * cfg.multipliers;
    for (const auto& l : net.layers) {
      const auto c = cost_of(l, cfg);
      if (l.kind == LayerKind::kMaxPool2d) continue;
      CHECK(c.cycles * pm >= c.macs);
      CHECK(c.macs_per_cycle <= static_cast<double>(std::min<std::int64_t>(l.filters, cfg.engines) *
                                                    std::min<std::int64_t>(l.in_channels, cfg.multipliers)) + 1e-9);
      CHECK(c.utilization >= 0.0);
      CHECK(c.utilization <= 1.0);
      const bool divisible = l.filters % cfg.engines == 0 && l.in_channels % cfg.multipliers == 0;
      CHECK((c.cycles * pm == c.macs) == divisible);
    }
  }
}

TEST_CASE("work conservation and q-invariance") {
  for (const double s : grid_scales()) {
    const auto net = build_network(s);
    const auto lat4 = network_latency(net, derive_config({4, s}));
    const auto lat8 = network_latency(net, derive_config({8, s}));
    std::int64_t macs = 0;
    for (const auto& c : lat4.per_layer) macs += c.macs;
    CHECK(macs == count_macs(net));
    CHECK(lat4.total_cycles == lat8.total_cycles);
    CHECK(lat4.seconds == lat8.seconds);
    CHECK(lat4.first_layer_cycles + lat4.remaining_cycles == lat4.total_cycles);
  }
}

TEST_CASE("first-layer cycles do not depend on s") {
  for (const double s : grid_scales()) {
    const auto lat = network_latency(build_network(s), derive_config({4, s}));
    CHECK(lat.first_layer_cycles == 20'592);
  }
}

TEST_CASE("cycles are affine in s for every layer except the classifier") {
  // The classifier has a fixed 30 outputs, so ceil(30/P) does not scale.
  auto body = [](double s) {
    const auto net = build_network(s);
    const auto lat = network_latency(net, derive_config({4, s}));
    return lat.total_cycles - lat.per_layer.back().cycles;
  };
  const std::int64_t slope = body(2.0) - body(1.0);
  for (const double s : {0.5, 1.5, 2.5, 3.0, 4.0, 6.0, 8.0}) {
    CAPTURE(s);
    CHECK(static_cast<double>(body(s)) ==
          static_cast<double>(body(1.0)) + static_cast<double>(slope) * (s - 1.0));
  }
}

TEST_CASE("analytical latency at s=1") {
  const auto lat = network_latency(build_network(1.0), derive_config({4, 1.0}, 100e6));
  CHECK(lat.total_cycles == 43'884);
  CHECK(lat.seconds * 1e3 == doctest::Approx(0.43884));
}

TEST_CASE("peak performance") {
  AcceleratorConfig cfg;
  cfg.engines = 16;
  cfg.multipliers = 8;
  cfg.freq_hz = 100e6;
  CHECK(peak_performance(cfg, dense(64, 32)) == doctest::Approx(25.6e9));
  CHECK(peak_performance(cfg, dense(1, 32)) == doctest::Approx(2.0 * 1 * 8 * 100e6));
  AcceleratorConfig big = cfg;
  big.engines = 48;
  CHECK(peak_performance(big, dense(192, 32)) ==
        doctest::Approx(3.0 * peak_performance(cfg, dense(64, 32))));
}

TEST_CASE("memory plan at q=4, s=1") {
  const auto plan = memory_plan(build_network(1.0), derive_config({4, 1.0}));
  CHECK(plan.feature_map.width_bits == 32);
  CHECK(plan.output.width_bits == 32);
  CHECK(plan.weights.width_bits == 32);
  CHECK(plan.feature_map.depth == 286);
  CHECK(plan.output.depth == 286);
  CHECK(plan.weights.depth == 316);
}

TEST_CASE("memory identities hold bit-exactly across the grid") {
  for (int q = 1; q <= 8; ++q) {
    for (const double s : grid_scales()) {
      const auto net = build_network(s);
      const auto cfg = derive_config({q, s});
      const auto plan = memory_plan(net, cfg);
      const std::int64_t word = static_cast<std::int64_t>(cfg.engines) * cfg.multipliers * q;
      CHECK(plan.feature_map.width_bits == cfg.multipliers * q);
      CHECK(plan.weights.width_bits == cfg.multipliers * q);
      CHECK(plan.feature_map.depth == (largest_fmap_bits(net, q) + word - 1) / word);
      CHECK(plan.weights.depth == (model_size_bits(net, q) + word - 1) / word);
      CHECK(plan.bram36_estimate ==
            plan.feature_map.bram36 + plan.output.bram36 + plan.weights.bram36);
      CHECK(plan.feature_map.bram36 >= 1);
    }
  }
}

TEST_CASE("BRAM estimate is monotone in q and s") {
  const auto scales = grid_scales();
  for (int q = 1; q <= 8; ++q) {
    std::int64_t prev = 0;
    for (const double s : scales) {
      const auto b = memory_plan(build_network(s), derive_config({q, s})).bram36_estimate;
      CHECK(b >= prev);
      prev = b;
    }
  }
  for (const double s : scales) {
    const auto net = build_network(s);
    std::int64_t prev = 0;
    for (int q = 1; q <= 8; ++q) {
      const auto b = memory_plan(net, derive_config({q, s})).bram36_estimate;
      CHECK(b >= prev);
      prev = b;
    }
  }
}

TEST_CASE("gopj counts one op per MAC") {
  CHECK(gopj({4, 4.0}, 0.76 * 0.65) == doctest::Approx(3.06e6 * 16 / (0.76 * 0.65e-3) / 1e9));
  CHECK(gopj({4, 4.0}, 0.76 * 0.65) == doctest::Approx(98.9).epsilon(0.02));
  CHECK(gopj({8, 4.0}, 1.47 * 0.65) == doctest::Approx(51.1).epsilon(0.02));
  CHECK(gopj({4, 1.0}, 0.28 * 0.31) == doctest::Approx(35.25).epsilon(0.01));
  CHECK(gopj({4, 2.0}, 1.0, 1e6) == doctest::Approx(4e6 / 1e-3 / 1e9));
  try {
    gopj({4, 1.0}, 0.0);
    FAIL("expected NonPositiveEnergy");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNonPositiveEnergy);
  }
}
