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

#include "hrpnav/pure_pursuit.hpp"

#include <algorithm>
#include <cmath>

#include "hrpnav/error.hpp"

namespace hrpnav
{

void ControllerParams::validate() const
{
  auto require = [](bool ok, const char * what) {
      if (!ok) {
        throw Error(ErrorCode::InvalidArgument, what);
      }
    };
  require(std::isfinite(lookahead) && lookahead > 0.0, "lookahead must be positive");
  require(std::isfinite(cruise_speed) && cruise_speed >= 0.0, "cruise speed must be >= 0");
  require(
    std::isfinite(goal_xy_tolerance) && goal_xy_tolerance > 0.0,
    "goal tolerance must be positive");
  require(goal_xy_tolerance < lookahead, "goal tolerance must be below the lookahead");
  require(
    std::isfinite(slowdown_distance) && slowdown_distance >= 0.0,
    "slowdown distance must be >= 0");
  require(std::isfinite(max_angular) && max_angular > 0.0, "max angular rate must be positive");
}

GlobalPath local_transform(const GlobalPath & path, const Pose2D & robot)
{
  const double c = std::cos(robot.theta);
  const double s = std::sin(robot.theta);
  GlobalPath out;
  out.source_id = path.source_id;
  out.poses.reserve(path.poses.size());
  for (const auto & pose : path.poses) {
    const Point2D d = pose.position - robot.position;
    out.poses.emplace_back(Point2D{c * d.x + s * d.y, -s * d.x + c * d.y}, pose.theta - robot.theta);
  }
  return out;
}

namespace
{

struct Projection
{
  size_t segment{0};
  Point2D point;
};

Projection project_onto_path(std::span<const Point2D> pts)
{
  Projection best{0, pts.front()};
  double best_dist = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    const Point2D a = pts[i];
    const Point2D ab = pts[i + 1] - a;
    const double len2 = dot(ab, ab);
    const double u = len2 > 0.0 ? std::clamp(-dot(a, ab) / len2, 0.0, 1.0) : 0.0;
    const Point2D q = a + u * ab;
    const double d = norm(q);
    if (d < best_dist) {
      best_dist = d;
      best = {i, q};
    }
  }
  return best;
}

}  // namespace

Point2D select_target(std::span<const Point2D> pts, double lookahead)
{
  if (pts.empty()) {
    throw Error(ErrorCode::DegeneratePath, "cannot select a target on an empty path");
  }
  if (pts.size() == 1) {
    return pts.front();
  }
  const Projection proj = project_onto_path(pts);
  if (norm(proj.point) >= lookahead) {
    return proj.point;
  }
  const double l2 = lookahead * lookahead;
  Point2D start = proj.point;
  for (size_t seg = proj.segment; seg + 1 < pts.size(); ++seg) {
    const Point2D end = pts[seg + 1];
    if (dot(end, end) >= l2) {
      // |start + t*d| = L with |start| < L <= |end| has exactly one root in (0, 1].
      const Point2D d = end - start;
      const double a = dot(d, d);
      const double b = 2.0 * dot(start, d);
      const double c = dot(start, start) - l2;
      const double t = (-b + std::sqrt(std::max(0.0, b * b - 4.0 * a * c))) / (2.0 * a);
      return start + std::clamp(t, 0.0, 1.0) * d;
    }
    start = end;
  }
  return pts.back();
}

Twist compute_twist(Point2D target, const ControllerParams & params, double distance_to_goal)
{
  const double d2 = dot(target, target);
  if (d2 == 0.0) {
    return {};
  }
  const double curvature = 2.0 * target.y / d2;
  double v = params.cruise_speed;
  if (params.slowdown_distance > 0.0 && distance_to_goal < params.slowdown_distance) {
    v *= std::max(0.0, distance_to_goal) / params.slowdown_distance;
  }
  const double omega = std::clamp(v * curvature, -params.max_angular, params.max_angular);
  return {v, omega};
}

bool goal_reached(const Pose2D & robot, const Pose2D & goal, const ControllerParams & params)
{
  return distance(robot.position, goal.position) <= params.goal_xy_tolerance;
}

ControlOutput compute_velocity_commands(
  const GlobalPath & path, const Pose2D & robot, const ControllerParams & params)
{
  const GlobalPath local = local_transform(path, robot);
  const std::vector<Point2D> local_points = local.positions();
  ControlOutput out;
  out.target = select_target(local_points, params.lookahead);
  out.cross_track_error = distance_to_polyline({0.0, 0.0}, local_points);
  const double to_goal = distance(robot.position, goal_pose(path).position);
  out.twist = compute_twist(out.target, params, to_goal);
  return out;
}

}  // namespace hrpnav
