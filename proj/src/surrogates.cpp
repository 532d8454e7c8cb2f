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

#include "kwsdse/surrogates.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "kwsdse/error.hpp"

namespace kwsdse {

namespace {

constexpr int kAccuracyCoefficients = 7;
constexpr int kPowerCoefficients = 4;

template <typename Sample>
SampleDomain domain_of(std::span<const Sample> samples) {
  SampleDomain d;
  d.q_min = d.s_min = std::numeric_limits<double>::infinity();
  d.q_max = d.s_max = -std::numeric_limits<double>::infinity();
  for (const auto& x : samples) {
    d.q_min = std::min(d.q_min, x.q);
    d.q_max = std::max(d.q_max, x.q);
    d.s_min = std::min(d.s_min, x.s);
    d.s_max = std::max(d.s_max, x.s);
  }
  return d;
}

template <typename Sample, typename Field>
std::size_t distinct(std::span<const Sample> samples, Field field) {
  std::set<double> values;
  for (const auto& x : samples) values.insert(field(x));
  return values.size();
}

// Normalizes columns to unit norm in place and returns the scale factors.
Eigen::VectorXd normalize_columns(Eigen::MatrixXd& x) {
  Eigen::VectorXd scale(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    scale(j) = x.col(j).norm();
    if (!(scale(j) > 0.0)) {
      throw Error(ErrorCode::kRankDeficient,
                  "design column " + std::to_string(j) + " is identically zero");
    }
    x.col(j) /= scale(j);
  }
  return scale;
}

double condition_of(const Eigen::MatrixXd& normalized) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(normalized);
  const auto& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  if (!(smallest > 0.0)) return std::numeric_limits<double>::infinity();
  return sv(0) / smallest;
}

// Column-pivoted QR solve of the normalized system; throws on rank loss.
Eigen::VectorXd solve_full_rank(const Eigen::MatrixXd& normalized,
                                const Eigen::VectorXd& rhs) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(normalized);
  if (qr.rank() < normalized.cols()) {
    throw Error(ErrorCode::kRankDeficient,
                "design matrix has rank " + std::to_string(qr.rank()) + " < " +
                    std::to_string(normalized.cols()));
  }
  return qr.solve(rhs);
}

FitReport report_from_residuals(const Eigen::VectorXd& r, double condition) {
  FitReport rep;
  rep.n_points = static_cast<int>(r.size());
  rep.rmse = r.size() ? std::sqrt(r.squaredNorm() / static_cast<double>(r.size())) : 0.0;
  rep.max_abs_residual = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
  rep.condition_indicator = condition;
  return rep;
}

// --- accuracy helpers ------------------------------------------------------

AccuracyModel from_vector(const Eigen::VectorXd& c, const SampleDomain& domain) {
  AccuracyModel m;
  m.a6 = c(0);
  m.a5 = c(1);
  m.a4 = c(2);
  m.a3 = c(3);
  m.a2 = c(4);
  m.a1 = c(5);
  m.a0 = c(6);
  m.domain = domain;
  return m;
}

Eigen::VectorXd to_vector(const AccuracyModel& m) {
  Eigen::VectorXd c(kAccuracyCoefficients);
  c << m.a6, m.a5, m.a4, m.a3, m.a2, m.a1, m.a0;
  return c;
}

// The denominator is bilinear in (q, s), so over an axis-aligned box its
// extremes sit on the corners: one strict sign on all four corners means no
// pole inside the box.
int domain_sign(const AccuracyModel& m) {
  const SampleDomain& d = m.domain;
  const double corners[4] = {m.denominator(d.q_min, d.s_min),
                             m.denominator(d.q_min, d.s_max),
                             m.denominator(d.q_max, d.s_min),
                             m.denominator(d.q_max, d.s_max)};
  const double tol =
      1e-9 * std::max(1.0, std::abs(d.q_max * d.s_max));
  bool pos = true;
  bool neg = true;
  for (double v : corners) {
    pos = pos && v > tol;
    neg = neg && v < -tol;
  }
  return pos ? 1 : (neg ? -1 : 0);
}

Eigen::VectorXd true_residuals(const AccuracyModel& m,
                               std::span<const AccuracySample> samples) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& x = samples[i];
    r(static_cast<Eigen::Index>(i)) =
        m.numerator(x.q, x.s) / m.denominator(x.q, x.s) - x.accuracy_pct;
  }
  return r;
}

void validate_accuracy_samples(std::span<const AccuracySample> samples) {
  if (samples.size() < kAccuracyCoefficients) {
    throw Error(ErrorCode::kTooFewPoints,
                "accuracy fit needs at least 7 samples, got " +
                    std::to_string(samples.size()));
  }
  if (distinct(samples, [](const auto& x) { return x.q; }) < 2 ||
      distinct(samples, [](const auto& x) { return x.s; }) < 2) {
    throw Error(ErrorCode::kRankDeficient,
                "accuracy samples need at least two distinct q and two distinct s");
  }
}

struct Normalized {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd scale;
};

Normalized normalized_system(std::span<const AccuracySample> samples) {
  const LinearizedSystem sys = build_linearized_system(samples);
  const auto n = static_cast<Eigen::Index>(sys.rows.size());
  Normalized out;
  out.x.resize(n, kAccuracyCoefficients);
  out.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < kAccuracyCoefficients; ++j) out.x(i, j) = sys.rows[i][j];
    out.y(i) = sys.rhs[i];
  }
  out.scale = normalize_columns(out.x);
  return out;
}

Eigen::VectorXd damped_solve(const Normalized& sys, double damping) {
  const Eigen::Index n = sys.x.rows();
  Eigen::MatrixXd aug(n + kAccuracyCoefficients, kAccuracyCoefficients);
  aug.topRows(n) = sys.x;
  aug.bottomRows(kAccuracyCoefficients) =
      std::sqrt(damping) *
      Eigen::MatrixXd::Identity(kAccuracyCoefficients, kAccuracyCoefficients);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + kAccuracyCoefficients);
  rhs.head(n) = sys.y;
  return aug.householderQr().solve(rhs);
}

// Levenberg-Marquardt on the true residual with Marquardt diagonal scaling.
AccuracyModel refine_accuracy(AccuracyModel model,
                              std::span<const AccuracySample> samples) {
  const int sign = domain_sign(model);
  Eigen::VectorXd c = to_vector(model);
  Eigen::VectorXd r = true_residuals(model, samples);
  double cost = r.squaredNorm();
  double mu = 1e-3;
  const auto n = static_cast<Eigen::Index>(samples.size());

  for (int iter = 0; iter < 500 && cost > 0.0; ++iter) {
    Eigen::MatrixXd jac(n, kAccuracyCoefficients);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& x = samples[static_cast<std::size_t>(i)];
      const double den = model.denominator(x.q, x.s);
      const double f = model.numerator(x.q, x.s) / den;
      jac(i, 0) = x.q * x.s / den;
      jac(i, 1) = x.s / den;
      jac(i, 2) = x.q / den;
      jac(i, 3) = 1.0 / den;
      jac(i, 4) = -f * x.s / den;
      jac(i, 5) = -f * x.q / den;
      jac(i, 6) = -f / den;
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;
    const Eigen::VectorXd diag =
        jtj.diagonal().cwiseMax(1e-12 * std::max(1.0, jtj.diagonal().maxCoeff()));

    bool accepted = false;
    double gain = 0.0;
    while (mu < 1e16) {
      Eigen::MatrixXd lhs = jtj;
      lhs.diagonal() += mu * diag;
      const Eigen::VectorXd step = lhs.ldlt().solve(-grad);
      const AccuracyModel trial = from_vector(c + step, model.domain);
      if (step.allFinite() && domain_sign(trial) == sign) {
        const Eigen::VectorXd rt = true_residuals(trial, samples);
        const double ct = rt.squaredNorm();
        if (std::isfinite(ct) && ct < cost) {
          gain = (cost - ct) / cost;
          c += step;
          model = trial;
          r = rt;
          cost = ct;
          mu = std::max(mu * 0.1, 1e-12);
          accepted = true;
          break;
        }
      }
      mu *= 10.0;
    }
    if (!accepted || gain < 1e-14) break;
  }
  return model;
}

}  // namespace

LinearizedSystem build_linearized_system(std::span<const AccuracySample> samples) {
  LinearizedSystem sys;
  sys.rows.reserve(samples.size());
  sys.rhs.reserve(samples.size());
  for (const auto& x : samples) {
    const double a = x.accuracy_pct;
    sys.rows.push_back({x.q * x.s, x.s, x.q, 1.0, -a * x.s, -a * x.q, -a});
    sys.rhs.push_back(a * x.q * x.s);
  }
  return sys;
}

AccuracyModel solve_linearized(std::span<const AccuracySample> samples,
                               double damping) {
  validate_accuracy_samples(samples);
  const Normalized sys = normalized_system(samples);
  const Eigen::VectorXd cn =
      damping > 0.0 ? damped_solve(sys, damping) : solve_full_rank(sys.x, sys.y);
  return from_vector(cn.cwiseQuotient(sys.scale), domain_of(samples));
}

AccuracyFit fit_accuracy(std::span<const AccuracySample> samples, bool refine) {
  validate_accuracy_samples(samples);
  const Normalized sys = normalized_system(samples);
  const SampleDomain domain = domain_of(samples);
  const double condition = condition_of(sys.x);

  std::optional<AccuracyModel> best;
  double best_rmse = std::numeric_limits<double>::infinity();
  auto consider = [&](const Eigen::VectorXd& normalized_coeffs) {
    const AccuracyModel m = from_vector(normalized_coeffs.cwiseQuotient(sys.scale), domain);
    if (domain_sign(m) == 0) return;
    const double rmse = true_residuals(m, samples).norm();
    if (std::isfinite(rmse) && rmse < best_rmse) {
      best = m;
      best_rmse = rmse;
    }
  };

  consider(solve_full_rank(sys.x, sys.y));
  if (!best) {
    // Samples on only two q (or s) lines admit a spurious common factor in
    // numerator and denominator that zeroes the linearized residual on a
    // whole line; damping moves the solve off that degenerate point.
    for (int k = -10; k <= 0; ++k) consider(damped_solve(sys, std::pow(10.0, k)));
  }
  if (!best) {
    throw Error(ErrorCode::kDenominatorVanishes,
                "every linearized accuracy solution has a pole inside the "
                "sample domain");
  }

  AccuracyModel model = refine ? refine_accuracy(*best, samples) : *best;
  return {model, report_from_residuals(true_residuals(model, samples), condition)};
}

double predict_accuracy(const AccuracyModel& model, double q, double s) {
  const double den = model.denominator(q, s);
  const double scale = std::max(1.0, std::abs(q * s));
  if (std::abs(den) <= 1e-12 * scale) {
    throw Error(ErrorCode::kPoleAtPoint, "accuracy model has a pole at (" +
                                             std::to_string(q) + ", " +
                                             std::to_string(s) + ")");
  }
  const int sign = domain_sign(model);
  if (sign != 0 && den * sign < 0.0) {
    throw Error(ErrorCode::kPoleAtPoint, "(" + std::to_string(q) + ", " + std::to_string(s) +
                                             ") lies beyond a pole of the accuracy model");
  }
  return model.numerator(q, s) / den;
}

double invert_scale(const AccuracyModel& m, double q, double accuracy_pct) {
  const double a = accuracy_pct;
  const double num = m.a4 * q + m.a3 - a * (m.a1 * q + m.a0);
  const double den = a * (q + m.a2) - m.a6 * q - m.a5;
  const double scale = std::max({1.0, std::abs(a * q), std::abs(m.a6 * q), std::abs(m.a5)});
  if (std::abs(den) <= 1e-12 * scale) {
    throw Error(ErrorCode::kSingularInversion,
                "accuracy " + std::to_string(a) + " is the model asymptote at q=" +
                    std::to_string(q));
  }
  const double s = num / den;
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw Error(ErrorCode::kInfeasible,
                "no positive scale reaches accuracy " + std::to_string(a) +
                    " at q=" + std::to_string(q));
  }
  const int sign = domain_sign(m);
  const double d = m.denominator(q, s);
  if (sign != 0 && d * sign <= 0.0) {
    throw Error(ErrorCode::kInfeasible,
                "scale solving accuracy " + std::to_string(a) + " at q=" +
                    std::to_string(q) + " lies beyond a pole of the model");
  }
  return s;
}

std::vector<ContourPoint> accuracy_contour(const AccuracyModel& model, double level,
                                           std::span<const int> q_values) {
  std::vector<ContourPoint> out;
  for (int q : q_values) {
    try {
      out.push_back({q, invert_scale(model, q, level)});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInfeasible &&
          e.code() != ErrorCode::kSingularInversion) {
        throw;
      }
    }
  }
  if (out.empty()) {
    throw Error(ErrorCode::kEmptyContour,
                "no candidate q reaches accuracy " + std::to_string(level));
  }
  return out;
}

// --- power / latency ---------------------------------------------------------

PowerFit fit_power(std::span<const HwSample> samples) {
  if (samples.size() < kPowerCoefficients) {
    throw Error(ErrorCode::kTooFewPoints, "power fit needs at least 4 samples, got " +
                                              std::to_string(samples.size()));
  }
  if (distinct(samples, [](const auto& x) { return x.q; }) < 2 ||
      distinct(samples, [](const auto& x) { return x.s; }) < 2) {
    throw Error(ErrorCode::kRankDeficient,
                "power samples need at least two distinct q and two distinct s");
  }
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd x(n, kPowerCoefficients);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& h = samples[static_cast<std::size_t>(i)];
    x(i, 0) = h.q * h.q * h.s * h.s;
    x(i, 1) = h.q * h.s * h.s;
    x(i, 2) = h.q * h.s;
    x(i, 3) = 1.0;
    y(i) = h.power_w;
  }
  Eigen::MatrixXd xn = x;
  const Eigen::VectorXd scale = normalize_columns(xn);
  const Eigen::VectorXd c = solve_full_rank(xn, y).cwiseQuotient(scale);

  PowerFit fit;
  fit.model.b3 = c(0);
  fit.model.b2 = c(1);
  fit.model.b1 = c(2);
  fit.model.b0 = c(3);
  fit.model.domain = domain_of(samples);
  fit.report = report_from_residuals(x * c - y, condition_of(xn));
  return fit;
}

LatencyFit fit_latency(std::span<const HwSample> samples) {
  if (distinct(samples, [](const auto& x) { return x.s; }) < 2) {
    throw Error(ErrorCode::kTooFewPoints,
                "latency fit needs at least two distinct scales");
  }
  const double n = static_cast<double>(samples.size());
  double s_mean = 0.0;
  double l_mean = 0.0;
  for (const auto& h : samples) {
    s_mean += h.s;
    l_mean += h.latency_ms;
  }
  s_mean /= n;
  l_mean /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& h : samples) {
    sxx += (h.s - s_mean) * (h.s - s_mean);
    sxy += (h.s - s_mean) * (h.latency_ms - l_mean);
  }

  LatencyFit fit;
  fit.model.d = sxy / sxx;
  fit.model.e = l_mean - fit.model.d * s_mean;
  fit.model.domain = domain_of(samples);

  Eigen::VectorXd r(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    r(static_cast<Eigen::Index>(i)) =
        predict_latency(fit.model, samples[i].s) - samples[i].latency_ms;
  }
  // Condition of the normalized [s, 1] design.
  Eigen::MatrixXd xn(static_cast<Eigen::Index>(samples.size()), 2);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    xn(static_cast<Eigen::Index>(i), 0) = samples[i].s;
    xn(static_cast<Eigen::Index>(i), 1) = 1.0;
  }
  normalize_columns(xn);
  fit.report = report_from_residuals(r, condition_of(xn));

  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      if (samples[i].s == samples[j].s) {
        fit.q_spread = std::max(
            fit.q_spread, std::abs(samples[i].latency_ms - samples[j].latency_ms));
      }
    }
  }
  return fit;
}

double predict_power(const PowerModel& m, double q, double s) noexcept {
  return m.b3 * q * q * s * s + m.b2 * q * s * s + m.b1 * q * s + m.b0;
}

double predict_latency(const LatencyModel& m, double s) noexcept {
  return m.d * s + m.e;
}

EnergyPrediction predict_energy(const PowerModel& power, const LatencyModel& latency,
                                double q, double s) {
  const double p = predict_power(power, q, s);
  const double l = predict_latency(latency, s);
  EnergyPrediction out;
  out.mj = p * l;
  out.warning = !(p > 0.0) || !(l > 0.0);
  return out;
}

FitReport energy_rmse(const PowerModel& power, const LatencyModel& latency,
                      std::span<const HwSample> samples) {
  if (samples.empty()) {
    throw Error(ErrorCode::kEmptySamples, "energy RMSE needs at least one sample");
  }
  Eigen::VectorXd r(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& h = samples[i];
    r(static_cast<Eigen::Index>(i)) =
        predict_energy(power, latency, h.q, h.s).mj - h.energy_mj;
  }
  return report_from_residuals(r, 0.0);
}

EnergyModelPair refine_energy_jointly(const PowerModel& power,
                                      const LatencyModel& latency,
                                      std::span<const HwSample> samples,
                                      int max_rounds) {
  EnergyModelPair best{power, latency, energy_rmse(power, latency, samples)};
  const auto n = static_cast<Eigen::Index>(samples.size());
  for (int round = 0; round < max_rounds; ++round) {
    EnergyModelPair trial = best;

    // Power step: E_i = L_i * (b3 q^2 s^2 + b2 q s^2 + b1 q s + b0).
    Eigen::MatrixXd xp(n, kPowerCoefficients);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& h = samples[static_cast<std::size_t>(i)];
      const double l = predict_latency(trial.latency, h.s);
      xp(i, 0) = l * h.q * h.q * h.s * h.s;
      xp(i, 1) = l * h.q * h.s * h.s;
      xp(i, 2) = l * h.q * h.s;
      xp(i, 3) = l;
      y(i) = h.energy_mj;
    }
    Eigen::VectorXd scale = normalize_columns(xp);
    Eigen::VectorXd b = solve_full_rank(xp, y).cwiseQuotient(scale);
    trial.power.b3 = b(0);
    trial.power.b2 = b(1);
    trial.power.b1 = b(2);
    trial.power.b0 = b(3);

    // Latency step: E_i = P_i * (d s + e).
    Eigen::MatrixXd xl(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& h = samples[static_cast<std::size_t>(i)];
      const double p = predict_power(trial.power, h.q, h.s);
      xl(i, 0) = p * h.s;
      xl(i, 1) = p;
    }
    scale = normalize_columns(xl);
    const Eigen::VectorXd de = solve_full_rank(xl, y).cwiseQuotient(scale);
    trial.latency.d = de(0);
    trial.latency.e = de(1);

    trial.energy_report = energy_rmse(trial.power, trial.latency, samples);
    if (!(trial.energy_report.rmse < best.energy_report.rmse)) break;
    const double gain = (best.energy_report.rmse - trial.energy_report.rmse) /
                        std::max(best.energy_report.rmse, 1e-300);
    best = trial;
    if (gain < 1e-12) break;
  }
  return best;
}

EnergyOptimum min_energy_at_accuracy(const AccuracyModel& accuracy,
                                     const PowerModel& power,
                                     const LatencyModel& latency, double level,
                                     std::span<const int> q_candidates) {
  std::vector<int> qs(q_candidates.begin(), q_candidates.end());
  std::sort(qs.begin(), qs.end());
  qs.erase(std::unique(qs.begin(), qs.end()), qs.end());

  EnergyOptimum out;
  for (const ContourPoint& p : accuracy_contour(accuracy, level, qs)) {
    const double e = predict_energy(power, latency, p.q, p.s).mj;
    out.curve.push_back({p.q, p.s, e});
  }
  const auto best = std::min_element(
      out.curve.begin(), out.curve.end(),
      [](const EnergyCurvePoint& a, const EnergyCurvePoint& b) {
        return a.energy_mj < b.energy_mj;
      });
  out.q = best->q;
  out.s = best->s;
  out.energy_mj = best->energy_mj;
  return out;
}

}  // namespace kwsdse
