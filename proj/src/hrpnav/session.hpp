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

#ifndef HRPNAV__SESSION_HPP_
#define HRPNAV__SESSION_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hrpnav/evaluator.hpp"
#include "hrpnav/grid.hpp"
#include "hrpnav/path_store.hpp"
#include "hrpnav/planner.hpp"
#include "hrpnav/pure_pursuit.hpp"
#include "hrpnav/simulator.hpp"

namespace hrpnav
{

enum class SessionMode
{
  Off,
  Add,
  Clear,
  Send,
};

std::string_view mode_name(SessionMode mode);

using ClientId = uint64_t;

/// A serialized protocol message (no trailing newline). Unaddressed messages go
/// to every connected client.
struct Outgoing
{
  std::optional<ClientId> to;
  std::string line;
};

using Outbox = std::vector<Outgoing>;

struct SessionConfig
{
  std::filesystem::path db_file;
  OccupancyGrid grid;
  std::optional<Scenario> scenario;
  ControllerParams controller;
  SimConfig sim;
  double waypoint_threshold{kDefaultWaypointThreshold};
  /// Robot pose before the first SEND. Defaults to the scenario start, else the
  /// first pose of the sent path.
  std::optional<Pose2D> initial_pose;
  /// Monotonic seconds for the task timer; steady_clock when unset.
  std::function<double()> clock;
};

struct SessionCounters
{
  int64_t drawing_attempts{0};
  std::optional<double> completion_time;  // start mark to SEND confirmation
};

/**
 * Owns the ADD / CLEAR / SEND mode machine and everything behind it: the path
 * store, the planner slot and the live follow run. Not thread-safe; the owner
 * serializes calls. Every call returns the replies and broadcasts it produced.
 *
 * The first connected client drives the session; later clients observe until
 * the driver disconnects.
 */
class Session
{
public:
  explicit Session(SessionConfig config);
  ~Session();

  Outbox connect(ClientId client);
  Outbox disconnect(ClientId client);
  Outbox handle_line(ClientId client, std::string_view line);

  /// Advances the live run by one control period.
  Outbox tick();

  SessionMode mode() const {return mode_;}
  std::optional<SessionMode> pending_confirmation() const {return pending_;}
  bool drawing() const {return drawing_.has_value();}
  bool live_run_active() const;
  const PathDatabase & database() const {return store_.database();}
  const SessionCounters & counters() const {return counters_;}
  const PlannerSlot & planner() const {return planner_;}
  std::optional<ClientId> driver() const;
  const std::optional<Trajectory> & last_trajectory() const {return last_trajectory_;}
  const SessionConfig & config() const {return config_;}

private:
  void dispatch(ClientId client, std::string_view line, Outbox & out);
  void set_mode(SessionMode mode, Outbox & out);
  void pinch(bool down, Outbox & out);
  void cursor(Point2D p, Outbox & out);
  void confirm(bool value, Outbox & out);
  void execute_send(Outbox & out);
  void finish_run(Outbox & out);

  void broadcast_mode(Outbox & out) const;
  void broadcast_paths(Outbox & out) const;
  void broadcast_stroke(Outbox & out) const;
  void broadcast_counters(Outbox & out) const;
  void send_snapshot(ClientId client, Outbox & out) const;

  double now() const;

  SessionConfig config_;
  PathStore store_;
  PlannerSlot planner_;
  SessionMode mode_{SessionMode::Off};
  std::optional<SessionMode> pending_;
  std::optional<DrawingSession> drawing_;
  std::optional<std::string> selected_id_;
  std::unique_ptr<FollowRun> run_;
  std::optional<Trajectory> last_trajectory_;
  std::optional<Pose2D> robot_pose_;
  std::set<ClientId> clients_;
  SessionCounters counters_;
  double task_start_{0.0};
};

}  // namespace hrpnav

#endif  // HRPNAV__SESSION_HPP_
