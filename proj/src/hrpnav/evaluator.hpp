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

#ifndef HRPNAV__EVALUATOR_HPP_
#define HRPNAV__EVALUATOR_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hrpnav/geometry.hpp"
#include "hrpnav/grid.hpp"

namespace hrpnav
{

/// Binary cell set over a grid geometry.
class RegionMask
{
public:
  explicit RegionMask(GridGeometry geometry);

  const GridGeometry & geometry() const {return geometry_;}
  bool contains(CellIndex c) const {return cells_[geometry_.flat(c)] != 0;}
  bool contains_flat(size_t k) const {return cells_[k] != 0;}
  void set(CellIndex c, bool value = true) {cells_[geometry_.flat(c)] = value ? 1 : 0;}
  bool contains_point(Point2D world) const;
  int64_t count() const;

  friend bool operator==(const RegionMask &, const RegionMask &) = default;

private:
  GridGeometry geometry_;
  std::vector<uint8_t> cells_;
};

/**
 * Cells whose centers lie within `radius` of the polyline. With a zero radius the
 * mask holds the cells the polyline passes through instead.
 */
RegionMask dilate_polyline(
  std::span<const Point2D> points, double radius, const GridGeometry & geometry);

struct Scenario
{
  std::string name;
  std::vector<Point2D> centerline;
  double tape_width{0.05};
  double robot_radius{0.25};
  Pose2D start;

  friend bool operator==(const Scenario &, const Scenario &) = default;
};

/// Half-width of the ground-truth corridor: robot radius plus half the tape.
double gt_radius(const Scenario & scenario);
double gt_width(const Scenario & scenario);

/// Throws OutOfBounds when the centerline leaves the grid.
RegionMask build_gt_region(const Scenario & scenario, const GridGeometry & geometry);

RegionMask rasterize_drawn(
  std::span<const Point2D> hrp, double gt_width, const GridGeometry & geometry);

/// Arc-length fraction of the polyline lying in mask cells, sampled every half cell.
double pct_within_gt(std::span<const Point2D> hrp, const RegionMask & gt);

struct ConfusionCounts
{
  int64_t tp{0};
  int64_t fp{0};
  int64_t fn{0};
  int64_t tn{0};

  int64_t total() const {return tp + fp + fn + tn;}

  friend bool operator==(const ConfusionCounts &, const ConfusionCounts &) = default;
};

/// Throws GeometryMismatch when the masks cover different grids.
ConfusionCounts confusion(const RegionMask & gt, const RegionMask & drawn);

/// Fractions in [0, 1]; nullopt marks an undefined ratio (zero denominator).
struct MetricReport
{
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> specificity;
  std::optional<double> f1;
  std::optional<double> pct_within_gt;
};

MetricReport metrics(const ConfusionCounts & counts);

struct PathEvaluation
{
  ConfusionCounts counts;
  MetricReport report;
};

/// Full pipeline for one map-frame path against a scenario's ground truth.
PathEvaluation evaluate_path(
  const Scenario & scenario, std::span<const Point2D> hrp, const GridGeometry & geometry);

struct StageOptions
{
  double stage_a_length{4.0};
  double stage_b_segment{1.2};
  int stage_b_segments{5};
  double practice_length{2.0};
  double tape_width{0.05};
  double robot_radius{0.25};
};

/// "A": straight; "B": zig-zag with alternating +/-45 degree turns; "practice": short straight.
Scenario make_stage(std::string_view name, const StageOptions & options = {});

/// Interior turn angles in radians, signed, one per interior vertex.
std::vector<double> turn_angles(std::span<const Point2D> polyline);

/// Grid aligned with the map axes that covers the centerline plus a margin.
GridGeometry grid_for_scenario(
  const Scenario & scenario, double resolution = 0.05, double margin = 1.0);

std::string scenario_to_json(const Scenario & scenario);
Scenario scenario_from_json(std::string_view text);
Scenario load_scenario(const std::filesystem::path & file);
void save_scenario(const std::filesystem::path & file, const Scenario & scenario);

/// `metric,value` rows; undefined values are written as `undefined`.
void write_report_csv(std::ostream & out, const PathEvaluation & evaluation);
std::string report_to_json(const PathEvaluation & evaluation);

}  // namespace hrpnav

#endif  // HRPNAV__EVALUATOR_HPP_
