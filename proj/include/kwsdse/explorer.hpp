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

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kwsdse/accel_model.hpp"
#include "kwsdse/netspec.hpp"
#include "kwsdse/surrogates.hpp"

namespace kwsdse {

/// Fitted surrogates used by the explorer. Fit reports are carried along for
/// report metadata only.
struct SurrogateSet {
  AccuracyModel accuracy;
  PowerModel power;
  LatencyModel latency;
  FitReport accuracy_report;
  FitReport power_report;
  FitReport latency_report;
};

struct ExplorationRequest {
  double target_accuracy_pct = 90.0;
  int q_min = 2;
  int q_max = 8;
  double s_min = 0.5;
  double s_max = 8.0;
  double freq_hz = kDefaultFrequencyHz;
  int num_classes = kDefaultNumClasses;
};

struct Candidate {
  DesignPoint point;
  int engines = 0;      // P
  int multipliers = 0;  // M
  double pred_accuracy_pct = 0.0;
  double pred_power_w = 0.0;
  double pred_latency_ms = 0.0;
  double pred_energy_mj = 0.0;
  std::int64_t model_size_bits = 0;
  std::int64_t bram36_estimate = 0;
  double gopj_estimate = 0.0;
  bool feasible = false;
  bool extrapolated = false;
  /// False when some prediction failed; `reason` then says why.
  bool evaluated = true;
  std::string reason;
};

struct ExplorationResult {
  ExplorationRequest request;
  ShapeConventions conventions;
  /// Every grid point, in grid order.
  std::vector<Candidate> evaluated;
  /// Feasible candidates, ascending by energy, ties by lower q then lower s.
  std::vector<Candidate> ranked;
  /// Non-dominated set over all evaluated points (accuracy up, energy down).
  std::vector<Candidate> pareto;

  bool no_feasible_point() const noexcept { return ranked.empty(); }
  const Candidate* chosen() const noexcept {
    return ranked.empty() ? nullptr : &ranked.front();
  }
};

/// All (q, n/16) with q in [q_min, q_max] and n/16 in [s_min, s_max], sorted
/// by (q, s). Throws EmptyGrid.
std::vector<DesignPoint> enumerate_grid(const ExplorationRequest& req);

/// Prediction failures are recorded on the candidate, not thrown. An accuracy
/// prediction outside [0, 100] counts as a failure.
Candidate evaluate(const DesignPoint& point, const SurrogateSet& models,
                   const ShapeConventions& conventions,
                   double freq_hz = kDefaultFrequencyHz,
                   double target_accuracy_pct = 0.0,
                   int num_classes = kDefaultNumClasses);

ExplorationResult explore(const ExplorationRequest& req, const SurrogateSet& models,
                          const ShapeConventions& conventions = {});

/// Maximal set under (accuracy max, energy min) dominance, ascending energy.
/// Candidates with equal (accuracy, energy) are all kept. Unevaluated
/// candidates are ignored. Throws EmptyInput.
std::vector<Candidate> pareto_front(std::span<const Candidate> candidates);

}  // namespace kwsdse
