// Copyright (c) 2026 The hrpnav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hrpnav/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "hrpnav/error.hpp"

namespace hrpnav
{

RegionMask::RegionMask(GridGeometry geometry)
: geometry_(std::move(geometry)),
  cells_(static_cast<size_t>(std::max<int64_t>(0, geometry_.cell_count())), 0)
{
}

bool RegionMask::contains_point(Point2D world) const
{
  const auto c = geometry_.world_to_cell(world);
  return c && contains(*c);
}

int64_t RegionMask::count() const
{
  return std::count(cells_.begin(), cells_.end(), uint8_t{1});
}

namespace
{

// Liang-Barsky clip of segment ab against the closed box [lo, hi].
bool segment_touches_box(Point2D a, Point2D b, Point2D lo, Point2D hi)
{
  double t0 = 0.0;
  double t1 = 1.0;
  const Point2D d = b - a;
  const double p[4] = {-d.x, d.x, -d.y, d.y};
  const double q[4] = {a.x - lo.x, hi.x - a.x, a.y - lo.y, hi.y - a.y};
  for (int k = 0; k < 4; ++k) {
    if (p[k] == 0.0) {
      if (q[k] < 0.0) {
        return false;
      }
      continue;
    }
    const double r = q[k] / p[k];
    if (p[k] < 0.0) {
      t0 = std::max(t0, r);
    } else {
      t1 = std::min(t1, r);
    }
    if (t0 > t1) {
      return false;
    }
  }
  return true;
}

int64_t clamp_index(double v, int64_t limit)
{
  if (v < 0.0) {
    return 0;
  }
  if (v >= static_cast<double>(limit)) {
    return limit - 1;
  }
  return static_cast<int64_t>(v);
}

void mark_segment(RegionMask & mask, Point2D a, Point2D b, double radius)
{
  const GridGeometry & g = mask.geometry();
  const Point2D ga = g.to_grid_frame(a);
  const Point2D gb = g.to_grid_frame(b);
  const double res = g.resolution;
  const double pad = radius + res;
  const double min_x = std::min(ga.x, gb.x) - pad;
  const double max_x = std::max(ga.x, gb.x) + pad;
  const double min_y = std::min(ga.y, gb.y) - pad;
  const double max_y = std::max(ga.y, gb.y) + pad;
  if (max_x < 0.0 || max_y < 0.0 || min_x > static_cast<double>(g.width) * res ||
    min_y > static_cast<double>(g.height) * res)
  {
    return;
  }
  const int64_t i0 = clamp_index(std::floor(min_x / res), g.width);
  const int64_t i1 = clamp_index(std::floor(max_x / res), g.width);
  const int64_t j0 = clamp_index(std::floor(min_y / res), g.height);
  const int64_t j1 = clamp_index(std::floor(max_y / res), g.height);
  for (int64_t j = j0; j <= j1; ++j) {
    for (int64_t i = i0; i <= i1; ++i) {
      const CellIndex c{i, j};
      bool inside;
      if (radius > 0.0) {
        inside = point_segment_distance(g.cell_center(c), a, b) <= radius;
      } else {
        const Point2D lo{static_cast<double>(i) * res, static_cast<double>(j) * res};
        inside = segment_touches_box(ga, gb, lo, lo + Point2D{res, res});
      }
      if (inside) {
        mask.set(c);
      }
    }
  }
}

std::optional<double> ratio(int64_t num, int64_t den)
{
  if (den == 0) {
    return std::nullopt;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

using json = nlohmann::ordered_json;

json optional_number(const std::optional<double> & v)
{
  return v ? json(*v) : json(nullptr);
}

}  // namespace

RegionMask dilate_polyline(
  std::span<const Point2D> points, double radius, const GridGeometry & geometry)
{
  geometry.validate();
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorCode::InvalidArgument, "dilation radius must be >= 0");
  }
  RegionMask mask(geometry);
  if (points.size() == 1) {
    mark_segment(mask, points[0], points[0], radius);
  }
  for (size_t k = 1; k < points.size(); ++k) {
    mark_segment(mask, points[k - 1], points[k], radius);
  }
  return mask;
}

double gt_radius(const Scenario & scenario)
{
  return scenario.robot_radius + scenario.tape_width / 2.0;
}

double gt_width(const Scenario & scenario)
{
  return 2.0 * gt_radius(scenario);
}

RegionMask build_gt_region(const Scenario & scenario, const GridGeometry & geometry)
{
  if (scenario.centerline.empty() || polyline_length(scenario.centerline) <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "scenario centerline must have positive length");
  }
  for (const auto & p : scenario.centerline) {
    if (!geometry.world_to_cell(p)) {
      throw Error(ErrorCode::OutOfBounds, "scenario centerline leaves the grid");
    }
  }
  return dilate_polyline(scenario.centerline, gt_radius(scenario), geometry);
}

RegionMask rasterize_drawn(
  std::span<const Point2D> hrp, double gt_width, const GridGeometry & geometry)
{
  if (hrp.size() < 2) {
    throw Error(ErrorCode::PathTooShort, "a drawn path needs at least two points");
  }
  return dilate_polyline(hrp, gt_width / 2.0, geometry);
}

double pct_within_gt(std::span<const Point2D> hrp, const RegionMask & gt)
{
  if (hrp.size() < 2) {
    throw Error(ErrorCode::PathTooShort, "a drawn path needs at least two points");
  }
  const double step = gt.geometry().resolution / 2.0;
  double inside = 0.0;
  double total = 0.0;
  for (size_t k = 1; k < hrp.size(); ++k) {
    const Point2D a = hrp[k - 1];
    const Point2D b = hrp[k];
    const double len = distance(a, b);
    if (len == 0.0) {
      continue;
    }
    const auto pieces = static_cast<int64_t>(std::max(1.0, std::ceil(len / step)));
    const double weight = len / static_cast<double>(pieces);
    for (int64_t m = 0; m < pieces; ++m) {
      const double u = (static_cast<double>(m) + 0.5) / static_cast<double>(pieces);
      if (gt.contains_point(a + u * (b - a))) {
        inside += weight;
      }
      total += weight;
    }
  }
  if (total == 0.0) {
    return gt.contains_point(hrp.front()) ? 1.0 : 0.0;
  }
  return inside / total;
}

ConfusionCounts confusion(const RegionMask & gt, const RegionMask & drawn)
{
  if (!(gt.geometry() == drawn.geometry())) {
    throw Error(ErrorCode::GeometryMismatch, "masks cover different grids");
  }
  ConfusionCounts c;
  const auto n = static_cast<size_t>(gt.geometry().cell_count());
  for (size_t k = 0; k < n; ++k) {
    const bool g = gt.contains_flat(k);
    const bool d = drawn.contains_flat(k);
    if (g && d) {
      ++c.tp;
    } else if (d) {
      ++c.fp;
    } else if (g) {
      ++c.fn;
    } else {
      ++c.tn;
    }
  }
  return c;
}

MetricReport metrics(const ConfusionCounts & c)
{
  MetricReport r;
  r.accuracy = ratio(c.tp + c.tn, c.total());
  r.precision = ratio(c.tp, c.tp + c.fp);
  r.recall = ratio(c.tp, c.tp + c.fn);
  r.specificity = ratio(c.tn, c.tn + c.fp);
  if (r.precision && r.recall && (*r.precision + *r.recall) > 0.0) {
    r.f1 = 2.0 * *r.precision * *r.recall / (*r.precision + *r.recall);
  } else if (r.precision && r.recall) {
    r.f1 = 0.0;
  }
  return r;
}

PathEvaluation evaluate_path(
  const Scenario & scenario, std::span<const Point2D> hrp, const GridGeometry & geometry)
{
  const RegionMask gt = build_gt_region(scenario, geometry);
  const RegionMask drawn = rasterize_drawn(hrp, gt_width(scenario), geometry);
  PathEvaluation out;
  out.counts = confusion(gt, drawn);
  out.report = metrics(out.counts);
  out.report.pct_within_gt = pct_within_gt(hrp, gt);
  return out;
}

Scenario make_stage(std::string_view name, const StageOptions & options)
{
  Scenario s;
  s.tape_width = options.tape_width;
  s.robot_radius = options.robot_radius;
  if (name == "A") {
    s.name = "A";
    s.centerline = {{0.0, 0.0}, {options.stage_a_length, 0.0}};
  } else if (name == "B") {
    if (options.stage_b_segments < 2) {
      throw Error(ErrorCode::InvalidArgument, "stage B needs at least two segments");
    }
    s.name = "B";
    Point2D p{0.0, 0.0};
    s.centerline.push_back(p);
    for (int k = 0; k < options.stage_b_segments; ++k) {
      const double heading = (k % 2 == 0) ? 0.0 : std::numbers::pi / 4.0;
      p = p + options.stage_b_segment * Point2D{std::cos(heading), std::sin(heading)};
      s.centerline.push_back(p);
    }
  } else if (name == "practice") {
    s.name = "practice";
    s.centerline = {{0.0, 0.0}, {options.practice_length, 0.0}};
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown stage '" + std::string(name) + "'");
  }
  const Point2D d = s.centerline[1] - s.centerline[0];
  s.start = Pose2D(s.centerline[0], std::atan2(d.y, d.x));
  return s;
}

std::vector<double> turn_angles(std::span<const Point2D> polyline)
{
  std::vector<double> out;
  for (size_t k = 1; k + 1 < polyline.size(); ++k) {
    const Point2D in = polyline[k] - polyline[k - 1];
    const Point2D o = polyline[k + 1] - polyline[k];
    out.push_back(normalize_angle(std::atan2(o.y, o.x) - std::atan2(in.y, in.x)));
  }
  return out;
}

GridGeometry grid_for_scenario(const Scenario & scenario, double resolution, double margin)
{
  if (scenario.centerline.empty()) {
    throw Error(ErrorCode::InvalidArgument, "scenario centerline is empty");
  }
  double min_x = scenario.centerline.front().x, max_x = min_x;
  double min_y = scenario.centerline.front().y, max_y = min_y;
  for (const auto & p : scenario.centerline) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  GridGeometry g;
  g.resolution = resolution;
  g.origin = Pose2D(min_x - margin, min_y - margin, 0.0);
  g.width = static_cast<int64_t>(std::ceil((max_x - min_x + 2.0 * margin) / resolution));
  g.height = static_cast<int64_t>(std::ceil((max_y - min_y + 2.0 * margin) / resolution));
  g.validate();
  return g;
}

std::string scenario_to_json(const Scenario & s)
{
  json j;
  j["name"] = s.name;
  auto line = json::array();
  for (const auto & p : s.centerline) {
    line.push_back({p.x, p.y});
  }
  j["centerline"] = std::move(line);
  j["tape_width"] = s.tape_width;
  j["robot_radius"] = s.robot_radius;
  j["start"] = {s.start.position.x, s.start.position.y, s.start.theta};
  return j.dump();
}

Scenario scenario_from_json(std::string_view text)
{
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception & e) {
    throw Error(ErrorCode::Parse, std::string("malformed scenario: ") + e.what());
  }
  try {
    Scenario s;
    s.name = j.at("name").get<std::string>();
    for (const auto & p : j.at("centerline")) {
      if (p.size() != 2) {
        throw Error(ErrorCode::Parse, "centerline points must be [x, y] pairs");
      }
      s.centerline.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    s.tape_width = j.at("tape_width").get<double>();
    s.robot_radius = j.at("robot_radius").get<double>();
    const auto & start = j.at("start");
    if (start.size() != 3) {
      throw Error(ErrorCode::Parse, "start must be [x, y, theta]");
    }
    s.start = Pose2D(start.at(0).get<double>(), start.at(1).get<double>(), start.at(2).get<double>());
    if (s.centerline.size() < 2 || polyline_length(s.centerline) <= 0.0) {
      throw Error(ErrorCode::Parse, "centerline must have positive length");
    }
    if (!(s.tape_width >= 0.0) || !(s.robot_radius >= 0.0)) {
      throw Error(ErrorCode::Parse, "tape width and robot radius must be >= 0");
    }
    return s;
  } catch (const nlohmann::json::exception & e) {
    throw Error(ErrorCode::Parse, std::string("invalid scenario: ") + e.what());
  }
}

Scenario load_scenario(const std::filesystem::path & file)
{
  std::ifstream in(file);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open scenario '" + file.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

void save_scenario(const std::filesystem::path & file, const Scenario & scenario)
{
  std::ofstream out(file);
  if (!out) {
    throw Error(ErrorCode::Io, "cannot write scenario '" + file.string() + "'");
  }
  out << scenario_to_json(scenario) << '\n';
}

void write_report_csv(std::ostream & out, const PathEvaluation & e)
{
  auto row = [&out](const char * name, const std::optional<double> & v) {
      out << name << ',';
      if (v) {
        out << std::setprecision(17) << *v;
      } else {
        out << "undefined";
      }
      out << '\n';
    };
  out << "metric,value\n";
  row("accuracy", e.report.accuracy);
  row("precision", e.report.precision);
  row("recall", e.report.recall);
  row("specificity", e.report.specificity);
  row("f1", e.report.f1);
  row("pct_within_gt", e.report.pct_within_gt);
  out << "tp," << e.counts.tp << "\nfp," << e.counts.fp << "\nfn," << e.counts.fn << "\ntn,"
      << e.counts.tn << '\n';
}

std::string report_to_json(const PathEvaluation & e)
{
  json j;
  j["counts"] = {{"tp", e.counts.tp}, {"fp", e.counts.fp}, {"fn", e.counts.fn},
    {"tn", e.counts.tn}};
  j["metrics"] = {
    {"accuracy", optional_number(e.report.accuracy)},
    {"precision", optional_number(e.report.precision)},
    {"recall", optional_number(e.report.recall)},
    {"specificity", optional_number(e.report.specificity)},
    {"f1", optional_number(e.report.f1)},
    {"pct_within_gt", optional_number(e.report.pct_within_gt)}};
  return j.dump();
}

}  // namespace hrpnav
