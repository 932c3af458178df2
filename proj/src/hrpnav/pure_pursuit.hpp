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

#ifndef HRPNAV__PURE_PURSUIT_HPP_
#define HRPNAV__PURE_PURSUIT_HPP_

#include <limits>
#include <span>
#include <vector>

#include "hrpnav/geometry.hpp"
#include "hrpnav/planner.hpp"

namespace hrpnav
{

struct ControllerParams
{
  double lookahead{0.5};
  double cruise_speed{0.3};
  double goal_xy_tolerance{0.1};
  double slowdown_distance{0.5};
  double max_angular{1.5};

  /// Throws InvalidArgument on out-of-range values. A zero cruise speed is
  /// accepted and parks the robot.
  void validate() const;
};

struct Twist
{
  double v{0.0};
  double omega{0.0};

  friend bool operator==(const Twist &, const Twist &) = default;
};

/// Expresses the path in the robot frame: robot at the origin facing +x.
GlobalPath local_transform(const GlobalPath & path, const Pose2D & robot);

/// Lookahead point on a robot-frame polyline. The walk starts at the projection
/// of the robot onto the nearest segment; the first crossing of the lookahead
/// circle is returned, or the final point if the path ends inside the circle.
Point2D select_target(std::span<const Point2D> local_points, double lookahead);

/**
 * Pure pursuit law: curvature 2y/d^2 toward the robot-frame target, cruise speed
 * ramped linearly to zero inside the slowdown distance, angular rate clamped.
 * A target at the origin yields a zero twist.
 */
Twist compute_twist(
  Point2D target, const ControllerParams & params,
  double distance_to_goal = std::numeric_limits<double>::infinity());

bool goal_reached(const Pose2D & robot, const Pose2D & goal, const ControllerParams & params);

struct ControlOutput
{
  Twist twist;
  Point2D target;  // robot frame
  double cross_track_error{0.0};
};

/// One controller cycle: transform, target selection and twist.
ControlOutput compute_velocity_commands(
  const GlobalPath & path, const Pose2D & robot, const ControllerParams & params);

}  // namespace hrpnav

#endif  // HRPNAV__PURE_PURSUIT_HPP_
