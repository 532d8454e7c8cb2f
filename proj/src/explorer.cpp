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

#include "kwsdse/explorer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kwsdse/error.hpp"

namespace kwsdse {

std::vector<DesignPoint> enumerate_grid(const ExplorationRequest& req) {
  if (req.q_min > req.q_max || !(req.s_min <= req.s_max)) {
    throw Error(ErrorCode::kInvalidArgument, "exploration ranges are empty");
  }
  if (!(req.target_accuracy_pct >= 0.0 && req.target_accuracy_pct <= 100.0)) {
    throw Error(ErrorCode::kInvalidArgument, "target accuracy must be in [0, 100]");
  }
  const auto n_lo = static_cast<std::int64_t>(std::ceil(req.s_min * 16.0 - 1e-9));
  const auto n_hi = static_cast<std::int64_t>(std::floor(req.s_max * 16.0 + 1e-9));
  std::vector<DesignPoint> grid;
  for (int q = std::max(req.q_min, 1); q <= req.q_max; ++q) {
    for (std::int64_t n = std::max<std::int64_t>(n_lo, 1); n <= n_hi; ++n) {
      grid.push_back({q, static_cast<double>(n) / 16.0});
    }
  }
  if (grid.empty()) {
    throw Error(ErrorCode::kEmptyGrid, "no hardware-friendly point in the request ranges");
  }
  return grid;
}

Candidate evaluate(const DesignPoint& point, const SurrogateSet& models,
                   const ShapeConventions& conventions, double freq_hz,
                   double target_accuracy_pct, int num_classes) {
  Candidate c;
  c.point = point;
  try {
    const AcceleratorConfig cfg = derive_config(point, freq_hz);
    c.engines = cfg.engines;
    c.multipliers = cfg.multipliers;
    const NetworkSpec net = build_network(point.s, conventions, num_classes);
    c.model_size_bits = model_size_bits(net, point.q);
    c.bram36_estimate = memory_plan(net, cfg).bram36_estimate;

    c.pred_power_w = predict_power(models.power, point.q, point.s);
    c.pred_latency_ms = predict_latency(models.latency, point.s);
    c.pred_energy_mj = c.pred_power_w * c.pred_latency_ms;
    c.extrapolated = !models.accuracy.domain.contains(point.q, point.s) ||
                     !models.power.domain.contains(point.q, point.s) ||
                     !models.latency.domain.contains(point.q, point.s);
    if (c.pred_energy_mj > 0.0) {
      c.gopj_estimate = gopj(point, c.pred_energy_mj);
    } else {
      c.reason = "non-positive predicted energy";
    }
    c.pred_accuracy_pct = predict_accuracy(models.accuracy, point.q, point.s);
    if (!(c.pred_accuracy_pct >= 0.0 && c.pred_accuracy_pct <= 100.0)) {
      c.evaluated = false;
      c.feasible = false;
      c.reason = "predicted accuracy " + std::to_string(c.pred_accuracy_pct) +
                 "% is outside [0, 100]";
      return c;
    }
    c.feasible = c.pred_accuracy_pct >= target_accuracy_pct;
  } catch (const Error& e) {
    c.evaluated = false;
    c.feasible = false;
    c.reason = std::string(error_name(e.code())) + ": " + e.what();
  }
  return c;
}

namespace {

bool rank_order(const Candidate& a, const Candidate& b) {
  if (a.pred_energy_mj != b.pred_energy_mj) return a.pred_energy_mj < b.pred_energy_mj;
  if (a.point.q != b.point.q) return a.point.q < b.point.q;
  return a.point.s < b.point.s;
}

}  // namespace

ExplorationResult explore(const ExplorationRequest& req, const SurrogateSet& models,
                          const ShapeConventions& conventions) {
  ExplorationResult out;
  out.request = req;
  out.conventions = conventions;
  for (const DesignPoint& p : enumerate_grid(req)) {
    out.evaluated.push_back(evaluate(p, models, conventions, req.freq_hz,
                                     req.target_accuracy_pct, req.num_classes));
  }
  for (const Candidate& c : out.evaluated) {
    if (c.feasible) out.ranked.push_back(c);
  }
  std::stable_sort(out.ranked.begin(), out.ranked.end(), rank_order);

  const bool any_evaluated =
      std::any_of(out.evaluated.begin(), out.evaluated.end(),
                  [](const Candidate& c) { return c.evaluated; });
  if (any_evaluated) out.pareto = pareto_front(out.evaluated);
  return out;
}

std::vector<Candidate> pareto_front(std::span<const Candidate> candidates) {
  if (candidates.empty()) {
    throw Error(ErrorCode::kEmptyInput, "pareto front of an empty candidate list");
  }
  std::vector<const Candidate*> order;
  for (const Candidate& c : candidates) {
    if (c.evaluated && !std::isnan(c.pred_accuracy_pct) && !std::isnan(c.pred_energy_mj)) {
      order.push_back(&c);
    }
  }
  std::stable_sort(order.begin(), order.end(), [](const Candidate* a, const Candidate* b) {
    if (a->pred_energy_mj != b->pred_energy_mj) return a->pred_energy_mj < b->pred_energy_mj;
    if (a->pred_accuracy_pct != b->pred_accuracy_pct)
      return a->pred_accuracy_pct > b->pred_accuracy_pct;
    if (a->point.q != b->point.q) return a->point.q < b->point.q;
    return a->point.s < b->point.s;
  });

  // Sweep groups of equal energy. A point survives when it has its group's
  // best accuracy and beats every strictly cheaper point's accuracy.
  std::vector<Candidate> front;
  double best_cheaper = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && order[j]->pred_energy_mj == order[i]->pred_energy_mj) ++j;
    const double group_best = order[i]->pred_accuracy_pct;
    for (std::size_t k = i; k < j && order[k]->pred_accuracy_pct == group_best; ++k) {
      if (group_best > best_cheaper) front.push_back(*order[k]);
    }
    best_cheaper = std::max(best_cheaper, group_best);
    i = j;
  }
  return front;
}

}  // namespace kwsdse
