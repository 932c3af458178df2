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

#ifndef HRPNAV__PLANNER_HPP_
#define HRPNAV__PLANNER_HPP_

#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "hrpnav/geometry.hpp"

namespace hrpnav
{

struct GlobalPath
{
  std::vector<Pose2D> poses;
  std::string source_id;

  std::vector<Point2D> positions() const;

  friend bool operator==(const GlobalPath &, const GlobalPath &) = default;
};

/**
 * Builds an oriented path from a received point sequence. Consecutive duplicate
 * points are dropped first; each pose then faces its successor and the last pose
 * inherits the heading of the one before it.
 *
 * Throws DegeneratePath if fewer than two distinct points remain.
 */
GlobalPath assign_orientations(std::span<const Point2D> points, std::string source_id = {});

Pose2D goal_pose(const GlobalPath & path);

/**
 * Holds the latest converted path and hands it back verbatim on every plan
 * request. Start and goal are accepted for interface parity with a regular
 * global planner and ignored.
 *
 * Writers swap the whole path; readers always see a complete one.
 */
class PlannerSlot
{
public:
  void set_path(GlobalPath path);
  void reset();
  bool has_path() const;

  GlobalPath create_plan(const Pose2D & start, const Pose2D & goal) const;

private:
  mutable std::mutex mutex_;
  std::shared_ptr<const GlobalPath> current_;
};

}  // namespace hrpnav

#endif  // HRPNAV__PLANNER_HPP_
