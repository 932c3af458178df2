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

#ifndef HRPNAV__SIMULATOR_HPP_
#define HRPNAV__SIMULATOR_HPP_

#include <filesystem>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

#include "hrpnav/grid.hpp"
#include "hrpnav/planner.hpp"
#include "hrpnav/pure_pursuit.hpp"

namespace hrpnav
{

struct RobotState
{
  Pose2D pose;
  double t{0.0};

  friend bool operator==(const RobotState &, const RobotState &) = default;
};

enum class Outcome
{
  ReachedGoal,
  Collision,
  Timeout,
};

std::string_view outcome_name(Outcome outcome);

struct Trajectory
{
  std::vector<RobotState> states;
  std::vector<Twist> commands;  // commands[k] is applied from states[k]; the last is zero
  Outcome outcome{Outcome::Timeout};

  std::vector<Point2D> positions() const;

  friend bool operator==(const Trajectory &, const Trajectory &) = default;
};

struct SimConfig
{
  double dt{0.05};
  double timeout{120.0};
};

/// Exact constant-twist unicycle integration over `dt`.
RobotState step(const RobotState & state, const Twist & twist, double dt);

/**
 * Closed-loop follower advanced one control period at a time. Terminates when the
 * goal tolerance is met, the robot center enters an occupied or off-map cell, or
 * simulated time exceeds the timeout.
 */
class FollowRun
{
public:
  /// Throws InvalidStart when the start pose is blocked.
  FollowRun(
    GlobalPath path, const RobotState & start, const ControllerParams & params,
    const OccupancyGrid & grid, const SimConfig & config);

  /// Advances one period. Returns the outcome once the run has terminated.
  std::optional<Outcome> advance();

  bool done() const {return outcome_.has_value();}
  const RobotState & state() const {return trajectory_.states.back();}
  const Twist & last_command() const {return last_command_;}
  const GlobalPath & path() const {return path_;}
  const Trajectory & trajectory() const {return trajectory_;}
  Trajectory take_trajectory();

private:
  GlobalPath path_;
  Pose2D goal_;
  ControllerParams params_;
  const OccupancyGrid & grid_;
  SimConfig config_;
  Trajectory trajectory_;
  Twist last_command_;
  std::optional<Outcome> outcome_;
  double start_time_{0.0};
};

Trajectory run_follow(
  const GlobalPath & path, const RobotState & start, const ControllerParams & params,
  const OccupancyGrid & grid, const SimConfig & config = {});

/// CSV with header `t,x,y,theta,v,omega`.
void write_trajectory_csv(std::ostream & out, const Trajectory & trajectory);
void write_trajectory_csv(const std::filesystem::path & file, const Trajectory & trajectory);

/// Distance from each recorded position to the reference polyline.
std::vector<double> cross_track_errors(
  const Trajectory & trajectory, std::span<const Point2D> reference);

}  // namespace hrpnav

#endif  // HRPNAV__SIMULATOR_HPP_
