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

#include <algorithm>
#include <cstdint>
#include <vector>

#include "kwsdse/error.hpp"
#include "kwsdse/netspec.hpp"

using namespace kwsdse;

namespace {

// Brute-force oracle: walks every window position instead of using extent
// formulas, then multiplies out per-layer work.
struct OracleCounts {
  std::int64_t macs = 0;
  std::int64_t weights = 0;
  std::int64_t largest_fmap = 0;
};

std::int64_t count_conv_positions(std::int64_t in, bool same) {
  std::int64_t n = 0;
  if (same) {
    for (std::int64_t centre = 0; centre < in; ++centre) ++n;
  } else {
    for (std::int64_t start = 0; start + 3 <= in; ++start) ++n;
  }
  return n;
}

std::int64_t count_pool_positions(std::int64_t in, bool ceil_mode) {
  std::int64_t n = 0;
  for (std::int64_t start = 0; start < in; start += 2) {
    if (start + 2 <= in || ceil_mode) ++n;
  }
  return n;
}

OracleCounts oracle(double s, bool same, bool ceil_mode, int classes = 30) {
  OracleCounts out;
  std::int64_t h = 44;
  std::int64_t w = 13;
  std::int64_t c = 1;
  out.largest_fmap = h * w * c;
  const std::int64_t filters[3] = {static_cast<std::int64_t>(64 * s),
                                   static_cast<std::int64_t>(32 * s),
                                   static_cast<std::int64_t>(32 * s)};
  for (std::int64_t f : filters) {
    h = count_conv_positions(h, same);
    w = count_conv_positions(w, same);
    out.macs += h * w * f * c * 9;
    out.weights += f * c * 9;
    c = f;
    out.largest_fmap = std::max(out.largest_fmap, h * w * c);
    h = count_pool_positions(h, ceil_mode);
    w = count_pool_positions(w, ceil_mode);
    out.largest_fmap = std::max(out.largest_fmap, h * w * c);
  }
  std::int64_t flat = h * w * c;
  for (std::int64_t f : {static_cast<std::int64_t>(64 * s), std::int64_t{classes}}) {
    out.macs += flat * f;
    out.weights += flat * f;
    flat = f;
    out.largest_fmap = std::max(out.largest_fmap, f);
  }
  return out;
}

std::vector<double> half_steps() {
  std::vector<double> v;
  for (int k = 1; k <= 16; ++k) v.push_back(0.5 * k);
  return v;
}

}  // namespace

TEST_CASE("filter counts follow the scale") {
  const auto net = build_network(1.0);
  REQUIRE(net.layers.size() == 8);
  CHECK(net.layers[0].filters == 64);
  CHECK(net.layers[2].filters == 32);
  CHECK(net.layers[4].filters == 32);
  CHECK(net.layers[6].filters == 64);
  CHECK(net.layers[7].filters == 30);

  const auto half = build_network(0.5);
  CHECK(half.layers[0].filters == 32);
  CHECK(half.layers[2].filters == 16);
  CHECK(half.layers[4].filters == 16);
  CHECK(half.layers[6].filters == 32);
  CHECK(half.layers[7].filters == 30);
}

TEST_CASE("layer kinds, kernels and strides") {
  const auto net = build_network(2.0);
  const LayerKind kinds[] = {LayerKind::kConv2d,   LayerKind::kMaxPool2d,
                             LayerKind::kConv2d,   LayerKind::kMaxPool2d,
                             LayerKind::kConv2d,   LayerKind::kMaxPool2d,
                             LayerKind::kFullyConnected, LayerKind::kFullyConnected};
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const auto& l = net.layers[i];
    CHECK(l.kind == kinds[i]);
    if (l.kind == LayerKind::kConv2d) {
      CHECK(l.kernel_h == 3);
      CHECK(l.kernel_w == 3);
      CHECK(l.stride == 1);
    } else if (l.kind == LayerKind::kMaxPool2d) {
      CHECK(l.kernel_h == 2);
      CHECK(l.stride == 2);
    }
    if (i > 0) {
      CHECK(l.in_shape == net.layers[i - 1].out_shape);
    }
  }
  CHECK(net.layers[0].in_shape == Shape3{44, 13, 1});
}

TEST_CASE("fractional channel counts are rejected") {
  try {
    build_network(0.3);
    FAIL("expected NonIntegerChannels");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNonIntegerChannels);
  }
  CHECK_THROWS_AS(build_network(0.0), Error);
  CHECK_THROWS_AS(build_network(-1.0), Error);
}

TEST_CASE("valid padding collapses the width dimension") {
  ShapeConventions valid;
  valid.conv_padding = Padding::kValid;
  try {
    build_network(1.0, valid);
    FAIL("expected InvalidShape");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidShape);
  }
}

TEST_CASE("hand-enumerated counts at s=1") {
  const auto net = build_network(1.0);
  CHECK(net.layers[0].macs() == 329'472);
  CHECK(net.layers[2].macs() == 2'433'024);
  CHECK(net.layers[4].macs() == 304'128);
  CHECK(net.layers[6].macs() == 10'240);
  CHECK(net.layers[7].macs() == 1'920);
  CHECK(count_macs(net) == 3'078'784);

  CHECK(net.layers[0].weights() == 576);
  CHECK(net.layers[2].weights() == 18'432);
  CHECK(net.layers[4].weights() == 9'216);
  CHECK(weight_count(net) == 40'384);
  CHECK(model_size_bits(net, 4) == 161'536);
  CHECK(model_size_bits(net, 8) == 323'072);

  CHECK(largest_fmap_elements(net) == 36'608);
  CHECK(largest_fmap_bits(net, 4) == 146'432);
}

TEST_CASE("counts match the brute-force oracle") {
  for (const bool ceil_mode : {false, true}) {
    ShapeConventions conv;
    conv.pool_rounding = ceil_mode ? PoolRounding::kCeil : PoolRounding::kFloor;
    for (const double s : half_steps()) {
      CAPTURE(s);
      CAPTURE(ceil_mode);
      const auto net = build_network(s, conv);
      const auto ref = oracle(s, true, ceil_mode);
      CHECK(count_macs(net) == ref.macs);
      CHECK(weight_count(net) == ref.weights);
      CHECK(largest_fmap_elements(net) == ref.largest_fmap);
      for (int q = 1; q <= 8; ++q) {
        CHECK(model_size_bits(net, q) == ref.weights * q);
        CHECK(largest_fmap_bits(net, q) == ref.largest_fmap * q);
      }
    }
  }
}

TEST_CASE("biases are counted only on request") {
  ShapeConventions with;
  with.count_biases = true;
  const auto a = build_network(1.0);
  const auto b = build_network(1.0, with);
  // 64 + 32 + 32 + 64 + 30 biases.
  CHECK(model_size_bits(b, 4) - model_size_bits(a, 4) == 222 * 4);
  CHECK(count_macs(a) == count_macs(b));
}

TEST_CASE("mac count is an exact quadratic plus linear polynomial") {
  for (const bool ceil_mode : {false, true}) {
    ShapeConventions conv;
    conv.pool_rounding = ceil_mode ? PoolRounding::kCeil : PoolRounding::kFloor;
    const auto poly = mac_polynomial(conv);
    CHECK(poly.quadratic >= 0);
    CHECK(poly.linear >= 0);
    for (const double s : half_steps()) {
      const auto net = build_network(s, conv);
      const double exact = static_cast<double>(count_macs(net));
      CHECK(exact == poly.evaluate(s));
    }
  }
  const auto poly = mac_polynomial();
  CHECK(poly.quadratic == 2'747'392);
  CHECK(poly.linear == 331'392);

  const double r = static_cast<double>(count_macs(build_network(4.0))) /
                   static_cast<double>(count_macs(build_network(2.0)));
  CHECK(r >= 3.5);
  CHECK(r <= 4.0);
}

TEST_CASE("scaling laws") {
  for (const double s : half_steps()) {
    const auto net = build_network(s);
    for (int q = 1; q <= 8; ++q) {
      CHECK(model_size_bits(net, 2 * q) == 2 * model_size_bits(net, q));
      // conv1 output dominates: 44*13*64s elements.
      CHECK(largest_fmap_bits(net, q) == static_cast<std::int64_t>(36'608 * s) * q);
    }
  }
}

TEST_CASE("analytics proxies follow the proportionalities") {
  const auto net = build_network(2.0);
  const auto net2 = build_network(4.0);
  const auto a = analytics(net, 4);
  const auto b = analytics(net, 8);
  CHECK(b.model_size_bits == 2 * a.model_size_bits);
  CHECK(b.total_macs == a.total_macs);
  CHECK(b.mult_op_cost_proxy == doctest::Approx(4 * a.mult_op_cost_proxy));
  CHECK(b.add_op_cost_proxy == doctest::Approx(2 * a.add_op_cost_proxy));
  const auto c = analytics(net2, 4);
  CHECK(c.largest_fmap_bits == 2 * a.largest_fmap_bits);
  CHECK(c.mult_op_cost_proxy == doctest::Approx(4 * a.mult_op_cost_proxy));
  CHECK(a.mult_op_cost_proxy == doctest::Approx(64.0));
  CHECK(a.add_op_cost_proxy == doctest::Approx(16.0));
}

TEST_CASE("derived constants") {
  const auto a = analytics(build_network(1.0), 4);
  CHECK(a.c_comp == doctest::Approx(3.078784));
  CHECK(a.c_size == doctest::Approx(40'384.0 / 8192.0));
  CHECK(a.c_fmap == doctest::Approx(36'608.0 / 8192.0));
}

TEST_CASE("hardware-friendly scales") {
  CHECK(is_hardware_friendly(4.5));
  CHECK(is_hardware_friendly(1.0 / 16.0));
  CHECK_FALSE(is_hardware_friendly(0.3));
  CHECK_FALSE(is_hardware_friendly(0.0));
  CHECK(integral_multiple(4.5, 16) == 72);
  CHECK(integral_multiple(0.3, 16) == -1);
}

TEST_CASE("build_network is deterministic") {
  const auto a = build_network(3.5);
  const auto b = build_network(3.5);
  REQUIRE(a.layers.size() == b.layers.size());
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    CHECK(a.layers[i].out_shape == b.layers[i].out_shape);
    CHECK(a.layers[i].macs() == b.layers[i].macs());
  }
}
