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

// Regression surrogates over the (q, s) design space.
//
//   accuracy(q, s) = (a6 qs + a5 s + a4 q + a3) / (qs + a2 s + a1 q + a0)
//   power(q, s)    = b3 q^2 s^2 + b2 q s^2 + b1 q s + b0              [W]
//   latency(s)     = d s + e                                           [ms]
//   energy(q, s)   = power(q, s) * latency(s)                          [mJ]

#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace kwsdse {

struct AccuracySample {
  double q = 0.0;
  double s = 0.0;
  double accuracy_pct = 0.0;

  friend bool operator==(const AccuracySample&, const AccuracySample&) = default;
};

struct HwSample {
  double q = 0.0;
  double s = 0.0;
  double power_w = 0.0;
  double latency_ms = 0.0;
  double energy_mj = 0.0;

  friend bool operator==(const HwSample&, const HwSample&) = default;
};

/// Axis-aligned bounding box of the samples a model was fitted on.
struct SampleDomain {
  double q_min = 0.0;
  double q_max = 0.0;
  double s_min = 0.0;
  double s_max = 0.0;

  bool contains(double q, double s) const noexcept {
    return q >= q_min && q <= q_max && s >= s_min && s <= s_max;
  }
  friend bool operator==(const SampleDomain&, const SampleDomain&) = default;
};

struct FitReport {
  double rmse = 0.0;
  int n_points = 0;
  double max_abs_residual = 0.0;
  /// Condition number of the column-normalized design matrix.
  double condition_indicator = 0.0;

  friend bool operator==(const FitReport&, const FitReport&) = default;
};

struct AccuracyModel {
  double a0 = 0, a1 = 0, a2 = 0, a3 = 0, a4 = 0, a5 = 0, a6 = 0;
  SampleDomain domain;

  double numerator(double q, double s) const noexcept {
    return a6 * q * s + a5 * s + a4 * q + a3;
  }
  double denominator(double q, double s) const noexcept {
    return q * s + a2 * s + a1 * q + a0;
  }
  friend bool operator==(const AccuracyModel&, const AccuracyModel&) = default;
};

struct PowerModel {
  double b0 = 0, b1 = 0, b2 = 0, b3 = 0;
  SampleDomain domain;
  friend bool operator==(const PowerModel&, const PowerModel&) = default;
};

struct LatencyModel {
  double d = 0;
  double e = 0;
  SampleDomain domain;
  friend bool operator==(const LatencyModel&, const LatencyModel&) = default;
};

struct AccuracyFit {
  AccuracyModel model;
  FitReport report;
};

struct PowerFit {
  PowerModel model;
  FitReport report;
};

struct LatencyFit {
  LatencyModel model;
  FitReport report;
  /// Largest spread (max - min) of latency across q among samples sharing s.
  double q_spread = 0.0;
};

// --- accuracy -------------------------------------------------------------

/// Rows of the linearized accuracy system X c = y with
/// c = (a6, a5, a4, a3, a2, a1, a0) and row
/// (qs, s, q, 1, -A s, -A q, -A) = A qs.
struct LinearizedSystem {
  std::vector<std::array<double, 7>> rows;
  std::vector<double> rhs;
};

LinearizedSystem build_linearized_system(std::span<const AccuracySample> samples);

/// Least-squares solution of the linearized system by column-pivoted QR on the
/// column-normalized design. damping > 0 adds Tikhonov rows sqrt(damping)*I in
/// normalized coordinates. Throws TooFewPoints / RankDeficient.
AccuracyModel solve_linearized(std::span<const AccuracySample> samples,
                               double damping = 0.0);

/// Fits the rational accuracy model. The undamped linearized solution is
/// used when its denominator keeps one sign over the sample box; otherwise
/// damped solutions along a decade schedule are tried and the pole-free one
/// with the smallest true residual wins. With refine, a Levenberg-Marquardt
/// pass on the true residual follows, accepting only improving, pole-free
/// steps.
AccuracyFit fit_accuracy(std::span<const AccuracySample> samples, bool refine = true);

/// Throws PoleAtPoint when the denominator vanishes at (q, s) or has the
/// opposite sign to the one it keeps over the fitted domain.
double predict_accuracy(const AccuracyModel& model, double q, double s);

/// Closed-form s solving accuracy(q, s) = level. Throws SingularInversion on a
/// zero denominator and Infeasible when s <= 0 or s falls on the far side of a
/// pole from the fitted domain.
double invert_scale(const AccuracyModel& model, double q, double accuracy_pct);

struct ContourPoint {
  int q = 0;
  double s = 0.0;
};

/// invert_scale over q_values, dropping infeasible q. Throws EmptyContour.
std::vector<ContourPoint> accuracy_contour(const AccuracyModel& model,
                                           double level,
                                           std::span<const int> q_values);

// --- power / latency / energy ----------------------------------------------

PowerFit fit_power(std::span<const HwSample> samples);
LatencyFit fit_latency(std::span<const HwSample> samples);

double predict_power(const PowerModel& model, double q, double s) noexcept;
double predict_latency(const LatencyModel& model, double s) noexcept;

struct EnergyPrediction {
  double mj = 0.0;
  /// Set when the predicted energy (or either factor) is not positive.
  bool warning = false;
};

EnergyPrediction predict_energy(const PowerModel& power,
                                const LatencyModel& latency, double q, double s);

/// RMSE of predicted vs sample energy. Throws EmptySamples.
FitReport energy_rmse(const PowerModel& power, const LatencyModel& latency,
                      std::span<const HwSample> samples);

struct EnergyModelPair {
  PowerModel power;
  LatencyModel latency;
  FitReport energy_report;
};

/// Alternating refinement of the product form against energy directly:
/// power coefficients with latency fixed, then latency with power fixed.
/// Starts from the separate fits and accepts only improving rounds.
EnergyModelPair refine_energy_jointly(const PowerModel& power,
                                      const LatencyModel& latency,
                                      std::span<const HwSample> samples,
                                      int max_rounds = 50);

struct EnergyCurvePoint {
  int q = 0;
  double s = 0.0;
  double energy_mj = 0.0;
};

struct EnergyOptimum {
  int q = 0;
  double s = 0.0;
  double energy_mj = 0.0;
  /// One entry per feasible candidate q, ascending in q.
  std::vector<EnergyCurvePoint> curve;
};

/// For each candidate q, s(q) = invert_scale(level); returns the q with the
/// lowest energy at (q, s(q)), ties toward lower q. Throws EmptyContour.
EnergyOptimum min_energy_at_accuracy(const AccuracyModel& accuracy,
                                     const PowerModel& power,
                                     const LatencyModel& latency, double level,
                                     std::span<const int> q_candidates);

}  // namespace kwsdse
