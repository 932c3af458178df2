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

#include "hrpnav/planner.hpp"

#include <cmath>

#include "hrpnav/error.hpp"

namespace hrpnav
{

std::vector<Point2D> GlobalPath::positions() const
{
  std::vector<Point2D> out;
  out.reserve(poses.size());
  for (const auto & pose : poses) {
    out.push_back(pose.position);
  }
  return out;
}

GlobalPath assign_orientations(std::span<const Point2D> points, std::string source_id)
{
  std::vector<Point2D> distinct;
  distinct.reserve(points.size());
  for (const auto & p : points) {
    if (!is_finite(p)) {
      throw Error(ErrorCode::InvalidArgument, "path point is not finite");
    }
    if (distinct.empty() || !(distinct.back() == p)) {
      distinct.push_back(p);
    }
  }
  if (distinct.size() < 2) {
    throw Error(ErrorCode::DegeneratePath, "a global path needs at least two distinct points");
  }

  GlobalPath path;
  path.source_id = std::move(source_id);
  path.poses.reserve(distinct.size());
  for (size_t i = 0; i + 1 < distinct.size(); ++i) {
    const Point2D d = distinct[i + 1] - distinct[i];
    path.poses.emplace_back(distinct[i], std::atan2(d.y, d.x));
  }
  path.poses.emplace_back(distinct.back(), path.poses.back().theta);
  return path;
}

Pose2D goal_pose(const GlobalPath & path)
{
  if (path.poses.empty()) {
    throw Error(ErrorCode::DegeneratePath, "empty global path has no goal");
  }
  return path.poses.back();
}

void PlannerSlot::set_path(GlobalPath path)
{
  auto next = std::make_shared<const GlobalPath>(std::move(path));
  std::lock_guard<std::mutex> lock(mutex_);
  current_ = std::move(next);
}

void PlannerSlot::reset()
{
  std::lock_guard<std::mutex> lock(mutex_);
  current_.reset();
}

bool PlannerSlot::has_path() const
{
  std::lock_guard<std::mutex> lock(mutex_);
  return current_ != nullptr;
}

GlobalPath PlannerSlot::create_plan(const Pose2D & /*start*/, const Pose2D & /*goal*/) const
{
  std::shared_ptr<const GlobalPath> snapshot;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    snapshot = current_;
  }
  if (!snapshot) {
    throw Error(ErrorCode::NoPathAvailable, "no path has been received yet");
  }
  return *snapshot;
}

}  // namespace hrpnav
