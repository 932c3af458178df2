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

#include "hrpnav/simulator.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

#include "hrpnav/error.hpp"

namespace hrpnav
{

std::string_view outcome_name(Outcome outcome)
{
  switch (outcome) {
    case Outcome::ReachedGoal: return "reached_goal";
    case Outcome::Collision: return "collision";
    case Outcome::Timeout: return "timeout";
  }
  return "unknown";
}

std::vector<Point2D> Trajectory::positions() const
{
  std::vector<Point2D> out;
  out.reserve(states.size());
  for (const auto & s : states) {
    out.push_back(s.pose.position);
  }
  return out;
}

RobotState step(const RobotState & state, const Twist & twist, double dt)
{
  if (!(dt > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "time step must be positive");
  }
  const double x = state.pose.position.x;
  const double y = state.pose.position.y;
  const double th = state.pose.theta;
  RobotState next;
  next.t = state.t + dt;
  if (std::abs(twist.omega) < 1e-9) {
    next.pose = Pose2D(x + twist.v * dt * std::cos(th), y + twist.v * dt * std::sin(th), th);
    return next;
  }
  const double r = twist.v / twist.omega;
  const double th1 = th + twist.omega * dt;
  next.pose = Pose2D(
    x + r * (std::sin(th1) - std::sin(th)),
    y - r * (std::cos(th1) - std::cos(th)),
    th1);
  return next;
}

FollowRun::FollowRun(
  GlobalPath path, const RobotState & start, const ControllerParams & params,
  const OccupancyGrid & grid, const SimConfig & config)
: path_(std::move(path)), params_(params), grid_(grid), config_(config),
  start_time_(start.t)
{
  params_.validate();
  if (!(config_.dt > 0.0) || !(config_.timeout > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "dt and timeout must be positive");
  }
  goal_ = goal_pose(path_);
  if (grid_.blocked_at(start.pose.position)) {
    throw Error(ErrorCode::InvalidStart, "start pose is occupied or outside the map");
  }
  trajectory_.states.push_back(start);
}

std::optional<Outcome> FollowRun::advance()
{
  if (outcome_) {
    return outcome_;
  }
  const RobotState & current = trajectory_.states.back();
  if (goal_reached(current.pose, goal_, params_)) {
    outcome_ = Outcome::ReachedGoal;
  } else if (current.t - start_time_ > config_.timeout) {
    outcome_ = Outcome::Timeout;
  }
  if (outcome_) {
    last_command_ = {};
    trajectory_.commands.push_back(last_command_);
    trajectory_.outcome = *outcome_;
    return outcome_;
  }

  last_command_ = compute_velocity_commands(path_, current.pose, params_).twist;
  trajectory_.commands.push_back(last_command_);
  RobotState next = step(current, last_command_, config_.dt);
  // Time from the step count keeps the spacing exactly uniform.
  next.t = start_time_ + static_cast<double>(trajectory_.states.size()) * config_.dt;
  trajectory_.states.push_back(next);

  if (grid_.blocked_at(next.pose.position)) {
    outcome_ = Outcome::Collision;
    trajectory_.commands.push_back({});
    trajectory_.outcome = *outcome_;
  }
  return outcome_;
}

Trajectory FollowRun::take_trajectory()
{
  return std::move(trajectory_);
}

Trajectory run_follow(
  const GlobalPath & path, const RobotState & start, const ControllerParams & params,
  const OccupancyGrid & grid, const SimConfig & config)
{
  FollowRun run(path, start, params, grid, config);
  while (!run.advance()) {
  }
  return run.take_trajectory();
}

void write_trajectory_csv(std::ostream & out, const Trajectory & trajectory)
{
  out << "t,x,y,theta,v,omega\n";
  out << std::setprecision(17);
  for (size_t k = 0; k < trajectory.states.size(); ++k) {
    const auto & s = trajectory.states[k];
    const Twist cmd = k < trajectory.commands.size() ? trajectory.commands[k] : Twist{};
    out << s.t << ',' << s.pose.position.x << ',' << s.pose.position.y << ',' << s.pose.theta
        << ',' << cmd.v << ',' << cmd.omega << '\n';
  }
}

void write_trajectory_csv(const std::filesystem::path & file, const Trajectory & trajectory)
{
  std::ofstream out(file);
  if (!out) {
    throw Error(ErrorCode::Io, "cannot write trajectory '" + file.string() + "'");
  }
  write_trajectory_csv(out, trajectory);
}

std::vector<double> cross_track_errors(
  const Trajectory & trajectory, std::span<const Point2D> reference)
{
  std::vector<double> out;
  out.reserve(trajectory.states.size());
  for (const auto & s : trajectory.states) {
    out.push_back(distance_to_polyline(s.pose.position, reference));
  }
  return out;
}

}  // namespace hrpnav
