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

#include "kwsdse/netspec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kwsdse/error.hpp"

namespace kwsdse {

bool is_hardware_friendly(double s) noexcept {
  return integral_multiple(s, 16) > 0;
}

std::int64_t integral_multiple(double s, int k) noexcept {
  if (!std::isfinite(s)) return -1;
  const double v = s * k;
  const double r = std::round(v);
  if (std::abs(v - r) > 1e-9) return -1;
  return static_cast<std::int64_t>(r);
}

std::string_view to_string(Padding p) noexcept {
  return p == Padding::kSame ? "same" : "valid";
}

std::string_view to_string(PoolRounding r) noexcept {
  return r == PoolRounding::kFloor ? "floor" : "ceil";
}

std::string_view to_string(LayerKind k) noexcept {
  switch (k) {
    case LayerKind::kConv2d: return "conv2d";
    case LayerKind::kMaxPool2d: return "maxpool2d";
    case LayerKind::kFullyConnected: return "fully_connected";
  }
  return "unknown";
}

std::int64_t LayerSpec::macs() const noexcept {
  if (kind == LayerKind::kMaxPool2d) return 0;
  return out_shape.height * out_shape.width * filters * in_channels *
         kernel_h * kernel_w;
}

std::int64_t LayerSpec::weights() const noexcept {
  if (kind == LayerKind::kMaxPool2d) return 0;
  return filters * in_channels * kernel_h * kernel_w;
}

std::int64_t LayerSpec::biases() const noexcept {
  return kind == LayerKind::kMaxPool2d ? 0 : filters;
}

namespace {

std::int64_t channels_for(double s, int base) {
  const std::int64_t c = integral_multiple(s, base);
  if (c <= 0) {
    throw Error(ErrorCode::kNonIntegerChannels,
                std::to_string(base) + "*s is not a positive integer for s=" +
                    std::to_string(s));
  }
  return c;
}

std::int64_t conv_extent(std::int64_t in, int k, int stride, Padding p) {
  if (p == Padding::kSame) return (in + stride - 1) / stride;
  if (in < k) return 0;
  return (in - k) / stride + 1;
}

std::int64_t pool_extent(std::int64_t in, int k, int stride, PoolRounding r) {
  if (in < k) {
    // A partial window still yields one output under ceil rounding.
    return (r == PoolRounding::kCeil && in > 0) ? 1 : 0;
  }
  const std::int64_t span = in - k;
  const std::int64_t steps =
      r == PoolRounding::kFloor ? span / stride : (span + stride - 1) / stride;
  return steps + 1;
}

void require_spatial(const Shape3& shape, std::string_view layer) {
  if (shape.height <= 0 || shape.width <= 0) {
    throw Error(ErrorCode::kInvalidShape,
                "spatial dimension collapsed to zero at " + std::string(layer));
  }
}

LayerSpec conv(const Shape3& in, std::int64_t filters, Padding p) {
  LayerSpec l;
  l.kind = LayerKind::kConv2d;
  l.kernel_h = l.kernel_w = 3;
  l.stride = 1;
  l.filters = filters;
  l.in_channels = in.channels;
  l.in_shape = in;
  l.out_shape = {conv_extent(in.height, 3, 1, p), conv_extent(in.width, 3, 1, p),
                 filters};
  require_spatial(l.out_shape, "conv2d");
  return l;
}

LayerSpec pool(const Shape3& in, PoolRounding r) {
  LayerSpec l;
  l.kind = LayerKind::kMaxPool2d;
  l.kernel_h = l.kernel_w = 2;
  l.stride = 2;
  l.filters = in.channels;
  l.in_channels = in.channels;
  l.in_shape = in;
  l.out_shape = {pool_extent(in.height, 2, 2, r), pool_extent(in.width, 2, 2, r),
                 in.channels};
  require_spatial(l.out_shape, "maxpool2d");
  return l;
}

LayerSpec dense(const Shape3& in, std::int64_t outputs) {
  LayerSpec l;
  l.kind = LayerKind::kFullyConnected;
  l.kernel_h = l.kernel_w = 1;
  l.stride = 1;
  l.filters = outputs;
  l.in_channels = in.elements();
  l.in_shape = in;
  l.out_shape = {1, 1, outputs};
  return l;
}

}  // namespace

NetworkSpec build_network(double s, const ShapeConventions& conventions,
                          int num_classes) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw Error(ErrorCode::kInvalidArgument, "scale must be positive");
  }
  if (num_classes < 2) {
    throw Error(ErrorCode::kInvalidArgument, "num_classes must be >= 2");
  }
  const std::int64_t f64 = channels_for(s, 64);
  const std::int64_t f32 = channels_for(s, 32);

  NetworkSpec net;
  net.scale = s;
  net.num_classes = num_classes;
  net.conventions = conventions;

  Shape3 cur = net.input_shape;
  auto push = [&](LayerSpec l) {
    cur = l.out_shape;
    net.layers.push_back(std::move(l));
  };
  push(conv(cur, f64, conventions.conv_padding));
  push(pool(cur, conventions.pool_rounding));
  push(conv(cur, f32, conventions.conv_padding));
  push(pool(cur, conventions.pool_rounding));
  push(conv(cur, f32, conventions.conv_padding));
  push(pool(cur, conventions.pool_rounding));
  push(dense(cur, f64));
  push(dense(cur, num_classes));
  return net;
}

std::int64_t count_macs(const NetworkSpec& net) {
  std::int64_t total = 0;
  for (const auto& l : net.layers) total += l.macs();
  return total;
}

std::int64_t weight_count(const NetworkSpec& net) {
  std::int64_t total = 0;
  for (const auto& l : net.layers) {
    total += l.weights();
    if (net.conventions.count_biases) total += l.biases();
  }
  return total;
}

std::int64_t model_size_bits(const NetworkSpec& net, int q) {
  if (q < 1) throw Error(ErrorCode::kInvalidArgument, "q must be >= 1");
  return weight_count(net) * q;
}

std::int64_t largest_fmap_elements(const NetworkSpec& net) {
  std::int64_t best = net.input_shape.elements();
  for (const auto& l : net.layers) best = std::max(best, l.out_shape.elements());
  return best;
}

std::int64_t largest_fmap_bits(const NetworkSpec& net, int q) {
  if (q < 1) throw Error(ErrorCode::kInvalidArgument, "q must be >= 1");
  return largest_fmap_elements(net) * q;
}

ModelAnalytics analytics(const NetworkSpec& net, int q) {
  ModelAnalytics a;
  a.total_macs = count_macs(net);
  a.weight_count = weight_count(net);
  a.model_size_bits = model_size_bits(net, q);
  a.largest_fmap_bits = largest_fmap_bits(net, q);

  const double s = net.scale;
  const double qd = q;
  a.c_comp = static_cast<double>(a.total_macs) / 1e6 / (s * s);
  a.c_size = static_cast<double>(a.model_size_bits) / kBitsPerKB / (qd * s * s);
  a.c_fmap = static_cast<double>(a.largest_fmap_bits) / kBitsPerKB / (qd * s);
  a.mult_op_cost_proxy = qd * qd * s * s;
  a.add_op_cost_proxy = qd * s * s;
  return a;
}

MacPolynomial mac_polynomial(const ShapeConventions& conventions,
                             int num_classes) {
  // Shapes are s-independent, so two evaluations pin both coefficients.
  const std::int64_t m1 = count_macs(build_network(1.0, conventions, num_classes));
  const std::int64_t m2 = count_macs(build_network(2.0, conventions, num_classes));
  MacPolynomial p;
  p.quadratic = (m2 - 2 * m1) / 2;
  p.linear = m1 - p.quadratic;
  return p;
}

}  // namespace kwsdse
