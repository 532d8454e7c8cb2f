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

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kwsdse/error.hpp"
#include "kwsdse/io.hpp"

using namespace kwsdse;

namespace {

const char* kHwCsv =
    "q,s,power_w,latency_ms\n"
    "4,1,0.28,0.31\n"
    "4,2,0.38,0.42\n"
    "4,4,0.76,0.65\n"
    "4,4.5,0.83,0.70\n"
    "8,1,0.45,0.31\n"
    "8,2,0.68,0.42\n"
    "8,4,1.47,0.65\n";

const char* kAccuracyCsv =
    "q,s,accuracy_pct\n"
    "4,2.5,86.5\n"
    "4,3.5,88.7\n"
    "4,4.5,90.3\n"
    "8,2.5,88.7\n"
    "8,3,89.6\n"
    "8,3.5,90.2\n"
    "4,4.5,90.1\n";

struct Caught {
  ErrorCode code = ErrorCode::kInvalidArgument;
  int row = -1;
  int column = -1;
};

template <typename Fn>
Caught input_error(Fn fn) {
  try {
    fn();
  } catch (const InputError& e) {
    return {e.code(), e.row(), e.column()};
  } catch (const Error& e) {
    return {e.code(), -1, -1};
  }
  FAIL("expected an error");
  return {};
}

SurrogateSet fitted(ModelDocument* doc_out = nullptr) {
  ModelDocument doc;
  const auto acc = parse_accuracy_csv_text(kAccuracyCsv, "acc.csv");
  const auto hw = parse_hw_csv_text(kHwCsv, "hw.csv");
  doc.accuracy = fit_accuracy(acc);
  doc.power = fit_power(hw);
  doc.latency = fit_latency(hw);
  if (doc_out) *doc_out = doc;
  return to_surrogates(doc);
}

namespace pt = boost::property_tree;

pt::ptree parse_xml(const std::string& text) {
  std::istringstream in(text);
  pt::ptree tree;
  pt::read_xml(in, tree);
  return tree;
}

int count_class(const pt::ptree& svg, const std::string& tag, const std::string& cls) {
  int n = 0;
  for (const auto& [name, child] : svg) {
    if (name != tag) continue;
    if (child.get<std::string>("<xmlattr>.class", "") == cls) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("hardware csv parses and derives energy") {
  const auto hw = parse_hw_csv_text(kHwCsv, "hw.csv");
  REQUIRE(hw.size() == 7);
  CHECK(hw[3].q == 4);
  CHECK(hw[3].s == 4.5);
  CHECK(hw[3].power_w == 0.83);
  CHECK(hw[3].latency_ms == 0.70);
  CHECK(hw[3].energy_mj == 0.83 * 0.70);

  const auto with_energy =
      parse_hw_csv_text("q,s,power_w,latency_ms,energy_mj\n4,1,0.28,0.31,0.0868\n", "e.csv");
  CHECK(with_energy[0].energy_mj == 0.0868);
}

TEST_CASE("csv tolerates whitespace, blank lines and a leading plus") {
  const auto acc = parse_accuracy_csv_text(" q , s , accuracy_pct \n\n +4 , 2.5 , 86.5 \n\n", "a");
  REQUIRE(acc.size() == 1);
  CHECK(acc[0] == AccuracySample{4, 2.5, 86.5});
}

TEST_CASE("csv errors carry file, row and column") {
  auto acc = [](const char* text) { return [=] { parse_accuracy_csv_text(text, "a.csv"); }; };
  auto hw = [](const char* text) { return [=] { parse_hw_csv_text(text, "h.csv"); }; };

  auto e = input_error(acc(""));
  CHECK(e.code == ErrorCode::kMissingHeader);
  e = input_error(acc("q,s,acc\n4,1,90\n"));
  CHECK(e.code == ErrorCode::kMissingHeader);
  CHECK(e.row == 1);
  e = input_error(acc("q,s,accuracy_pct\n"));
  CHECK(e.code == ErrorCode::kEmptySamples);
  e = input_error(acc("q,s,accuracy_pct\n4,1,90\n4,x,90\n"));
  CHECK(e.code == ErrorCode::kBadNumeric);
  CHECK(e.row == 3);
  CHECK(e.column == 2);
  e = input_error(acc("q,s,accuracy_pct\n4,1\n"));
  CHECK(e.code == ErrorCode::kBadNumeric);
  CHECK(e.row == 2);
  e = input_error(acc("q,s,accuracy_pct\n4,1,nan\n"));
  CHECK(e.code == ErrorCode::kBadNumeric);
  CHECK(e.column == 3);
  e = input_error(acc("q,s,accuracy_pct\n4.5,1,90\n"));
  CHECK(e.code == ErrorCode::kOutOfRange);
  CHECK(e.column == 1);
  e = input_error(acc("q,s,accuracy_pct\n4,0,90\n"));
  CHECK(e.code == ErrorCode::kOutOfRange);
  CHECK(e.column == 2);
  e = input_error(acc("q,s,accuracy_pct\n4,1,100.5\n"));
  CHECK(e.code == ErrorCode::kOutOfRange);
  CHECK(e.column == 3);
  CHECK(parse_accuracy_csv_text("q,s,accuracy_pct\n4,1,100\n", "a")[0].accuracy_pct == 100);

  e = input_error(hw("q,s,power_w,latency_ms\n4,1,-0.1,0.3\n"));
  CHECK(e.code == ErrorCode::kOutOfRange);
  CHECK(e.column == 3);
  e = input_error(hw("q,s,power_w,latency_ms\n4,1,0.1,0\n"));
  CHECK(e.code == ErrorCode::kOutOfRange);
  CHECK(e.column == 4);
  e = input_error(hw("q,s,power_w,latency_ms,energy_mj\n4,1,0.28,0.31,0.0868\n4,1,0.28,0.31,0.09\n"));
  CHECK(e.code == ErrorCode::kInconsistentEnergy);
  CHECK(e.row == 3);
  CHECK(e.column == 5);

  e = input_error([] { parse_hw_csv("/nonexistent/kwsdse/h.csv"); });
  CHECK(e.code == ErrorCode::kIo);
}

TEST_CASE("csv round trip is exact") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.01, 10.0);
  std::uniform_int_distribution<int> qd(1, 16);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<AccuracySample> acc;
    std::vector<HwSample> hw;
    for (int i = 0; i < 20; ++i) {
      acc.push_back({static_cast<double>(qd(rng)), u(rng), 10.0 * u(rng)});
      const double p = u(rng);
      const double l = u(rng);
      hw.push_back({static_cast<double>(qd(rng)), u(rng), p, l, p * l});
    }
    CHECK(parse_accuracy_csv_text(write_accuracy_csv(acc), "rt") == acc);
    CHECK(parse_hw_csv_text(write_hw_csv(hw), "rt") == hw);
  }
}

TEST_CASE("model json round trip") {
  ModelDocument doc;
  fitted(&doc);
  const std::string text = write_models_json(doc);
  const auto back = parse_models_json(text, "m.json");
  REQUIRE(back.accuracy);
  REQUIRE(back.power);
  REQUIRE(back.latency);
  CHECK(back.accuracy->model == doc.accuracy->model);
  CHECK(back.accuracy->report == doc.accuracy->report);
  CHECK(back.power->model == doc.power->model);
  CHECK(back.latency->model == doc.latency->model);
  CHECK(back.latency->q_spread == doc.latency->q_spread);
  CHECK(write_models_json(back) == text);

  ModelDocument inf;
  inf.latency = doc.latency;
  inf.latency->report.condition_indicator = std::numeric_limits<double>::infinity();
  const auto inf_back = parse_models_json(write_models_json(inf), "inf.json");
  CHECK(std::isinf(inf_back.latency->report.condition_indicator));
  CHECK_FALSE(inf_back.accuracy);
}

TEST_CASE("model json errors") {
  CHECK(input_error([] { parse_models_json("{", "m"); }).code == ErrorCode::kParse);
  CHECK(input_error([] { parse_models_json("{\"format\":\"other\"}", "m"); }).code ==
        ErrorCode::kParse);
  ModelDocument empty;
  CHECK(input_error([&] { to_surrogates(empty); }).code == ErrorCode::kMissingModel);
}

TEST_CASE("merge replaces present sections") {
  ModelDocument full;
  fitted(&full);
  ModelDocument partial;
  partial.power = full.power;
  partial.power->model.b0 = 123.0;
  ModelDocument into = full;
  merge_models(into, partial);
  CHECK(into.power->model.b0 == 123.0);
  CHECK(into.accuracy->model == full.accuracy->model);
}

TEST_CASE("format_sig6") {
  CHECK(format_sig6(0.0) == "0");
  CHECK(format_sig6(90.1234567) == "90.1235");
  CHECK(format_sig6(0.000123456789) == "0.000123457");
  CHECK(format_sig6(1234567.0) == "1.23457e+06");
}

TEST_CASE("report write, parse, write is a fixpoint") {
  const auto models = fitted();
  for (const double target : {85.0, 90.0, 100.0}) {
    ExplorationRequest req;
    req.target_accuracy_pct = target;
    const auto report = build_report(explore(req, models), models);
    CHECK(report.rows.size() == static_cast<std::size_t>(report.metadata.feasible_count));
    for (const auto fmt : {ReportFormat::kCsv, ReportFormat::kJson}) {
      const std::string a = write_report(report, fmt);
      const Report parsed = parse_report(a, fmt);
      CHECK(parsed == report);
      CHECK(write_report(parsed, fmt) == a);
    }
  }
}

TEST_CASE("report with no feasible rows") {
  const auto models = fitted();
  ExplorationRequest req;
  req.target_accuracy_pct = 100.0;
  req.q_min = 4;
  req.q_max = 8;
  const auto report = build_report(explore(req, models), models);
  CHECK(report.rows.empty());
  CHECK(report.metadata.no_feasible_point);
  const std::string csv = write_report(report, ReportFormat::kCsv);
  CHECK(csv.find("q,s,P,M,pred_accuracy_pct") != std::string::npos);
  CHECK(parse_report(csv, ReportFormat::kCsv) == report);
}

TEST_CASE("report parse errors") {
  CHECK_THROWS_AS(parse_report("not a report", ReportFormat::kCsv), Error);
  CHECK_THROWS_AS(parse_report("[1,2", ReportFormat::kJson), Error);
}

TEST_CASE("contour svg is well-formed and complete") {
  const auto models = fitted();
  const double levels[] = {88.0, 90.0};
  const auto out = render_contours_svg(levels, models, 4, 8, 0.5, 8.0);
  CHECK(out.skipped_levels.empty());
  CHECK(out.optima.size() == 2);
  const auto tree = parse_xml(out.svg);
  const auto& svg = tree.get_child("svg");
  CHECK(svg.get<int>("<xmlattr>.width") == 960);
  CHECK(count_class(svg, "polyline", "accuracy-contour") == 2);
  CHECK(count_class(svg, "polyline", "energy-curve") == 2);
  CHECK(count_class(svg, "circle", "energy-minimum") == 2);
  CHECK(count_class(svg, "text", "warning") == 0);
  for (const auto& [name, child] : svg) {
    if (name == "polyline") CHECK_FALSE(child.get<std::string>("<xmlattr>.points").empty());
  }
  CHECK(render_contours_svg(levels, models, 4, 8, 0.5, 8.0).svg == out.svg);
}

TEST_CASE("single level renders exactly one contour and one energy curve") {
  const auto models = fitted();
  const double level[] = {90.0};
  const auto out = render_contours_svg(level, models, 4, 8, 0.5, 8.0);
  const auto tree = parse_xml(out.svg);
  const auto& svg = tree.get_child("svg");
  CHECK(count_class(svg, "polyline", "accuracy-contour") == 1);
  CHECK(count_class(svg, "polyline", "energy-curve") == 1);
  CHECK(out.optima[0].q == svg.get_child("circle").get<int>("<xmlattr>.data-q"));
}

TEST_CASE("unreachable level becomes a warning") {
  auto models = fitted();
  models.accuracy = AccuracyModel{1, 0.5, 1, 0, 5, 10, 95, {2, 8, 0.5, 4}};
  const double levels[] = {60.0, 99.5};
  const auto out = render_contours_svg(levels, models, 2, 8, 0.5, 8.0);
  REQUIRE(out.skipped_levels.size() == 1);
  CHECK(out.skipped_levels[0] == 99.5);
  const auto tree = parse_xml(out.svg);
  const auto& svg = tree.get_child("svg");
  CHECK(count_class(svg, "text", "warning") == 1);
  CHECK(count_class(svg, "polyline", "accuracy-contour") == 1);
  CHECK(input_error([&] { render_contours_svg(levels, models, 8, 2, 0.5, 8.0); }).code ==
        ErrorCode::kInvalidArgument);
}
