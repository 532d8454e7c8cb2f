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

// The keyword-spotting CNN used throughout the toolkit: three conv/maxpool
// pairs followed by two fully connected layers, with every channel count
// multiplied by a scale s. Only shapes and counts are modeled here; no
// tensor arithmetic is performed.

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace kwsdse {

/// A (q, s) candidate: uniform fixed-point bit width and filter-scale
/// multiplier.
struct DesignPoint {
  int q = 0;
  double s = 0.0;

  friend bool operator==(const DesignPoint&, const DesignPoint&) = default;
};

/// True when 16*s is a positive integer (within 1e-9).
bool is_hardware_friendly(double s) noexcept;

/// Returns round(k*s) when k*s is integral within 1e-9, otherwise -1.
std::int64_t integral_multiple(double s, int k) noexcept;

enum class Padding { kSame, kValid };
enum class PoolRounding { kFloor, kCeil };

struct ShapeConventions {
  Padding conv_padding = Padding::kSame;
  PoolRounding pool_rounding = PoolRounding::kFloor;
  bool count_biases = false;

  friend bool operator==(const ShapeConventions&,
                         const ShapeConventions&) = default;
};

std::string_view to_string(Padding p) noexcept;
std::string_view to_string(PoolRounding r) noexcept;

struct Shape3 {
  std::int64_t height = 0;
  std::int64_t width = 0;
  std::int64_t channels = 0;

  std::int64_t elements() const noexcept { return height * width * channels; }
  friend bool operator==(const Shape3&, const Shape3&) = default;
};

enum class LayerKind { kConv2d, kMaxPool2d, kFullyConnected };

std::string_view to_string(LayerKind k) noexcept;

struct LayerSpec {
  LayerKind kind = LayerKind::kConv2d;
  int kernel_h = 1;
  int kernel_w = 1;
  /// Output channels F. For pooling this equals in_channels.
  std::int64_t filters = 0;
  /// Input channels C. For fully connected layers this is the flattened
  /// input length.
  std::int64_t in_channels = 0;
  int stride = 1;
  Shape3 in_shape;
  Shape3 out_shape;

  /// outH*outW*F*C*kh*kw for conv/FC, zero for pooling.
  std::int64_t macs() const noexcept;
  /// F*C*kh*kw for conv/FC, zero for pooling.
  std::int64_t weights() const noexcept;
  /// F for conv/FC, zero for pooling.
  std::int64_t biases() const noexcept;
};

inline constexpr Shape3 kInputShape{44, 13, 1};
inline constexpr int kDefaultNumClasses = 30;

struct NetworkSpec {
  std::vector<LayerSpec> layers;
  Shape3 input_shape = kInputShape;
  int num_classes = kDefaultNumClasses;
  double scale = 1.0;
  ShapeConventions conventions;
};

/// Builds conv(64s) -> pool -> conv(32s) -> pool -> conv(32s) -> pool ->
/// fc(64s) -> fc(num_classes). Throws NonIntegerChannels when a channel
/// count is fractional and InvalidShape when a spatial dimension collapses.
NetworkSpec build_network(double s, const ShapeConventions& conventions = {},
                          int num_classes = kDefaultNumClasses);

std::int64_t count_macs(const NetworkSpec& net);
std::int64_t weight_count(const NetworkSpec& net);
std::int64_t model_size_bits(const NetworkSpec& net, int q);
/// Largest of the input map and every layer output, in bits.
std::int64_t largest_fmap_bits(const NetworkSpec& net, int q);
std::int64_t largest_fmap_elements(const NetworkSpec& net);

inline constexpr double kBitsPerKB = 8.0 * 1024.0;

struct ModelAnalytics {
  std::int64_t total_macs = 0;
  std::int64_t weight_count = 0;
  std::int64_t model_size_bits = 0;
  std::int64_t largest_fmap_bits = 0;
  /// Millions of MACs per s^2.
  double c_comp = 0.0;
  /// KB per q*s^2.
  double c_size = 0.0;
  /// KB per q*s.
  double c_fmap = 0.0;
  double mult_op_cost_proxy = 0.0;  // q^2 s^2
  double add_op_cost_proxy = 0.0;   // q s^2
};

ModelAnalytics analytics(const NetworkSpec& net, int q);

/// total_macs(s) == quadratic*s^2 + linear*s exactly for every valid s
/// (spatial shapes do not depend on s).
struct MacPolynomial {
  std::int64_t quadratic = 0;
  std::int64_t linear = 0;

  double evaluate(double s) const noexcept {
    return static_cast<double>(quadratic) * s * s +
           static_cast<double>(linear) * s;
  }
};

MacPolynomial mac_polynomial(const ShapeConventions& conventions = {},
                             int num_classes = kDefaultNumClasses);

}  // namespace kwsdse
