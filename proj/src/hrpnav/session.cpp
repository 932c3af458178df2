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

#include "hrpnav/session.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "json.hpp"

#include "hrpnav/error.hpp"

namespace hrpnav
{

using json = nlohmann::ordered_json;

std::string_view mode_name(SessionMode mode)
{
  switch (mode) {
    case SessionMode::Off: return "OFF";
    case SessionMode::Add: return "ADD";
    case SessionMode::Clear: return "CLEAR";
    case SessionMode::Send: return "SEND";
  }
  return "OFF";
}

namespace
{

SessionMode parse_mode(const std::string & text)
{
  if (text == "OFF") {
    return SessionMode::Off;
  }
  if (text == "ADD") {
    return SessionMode::Add;
  }
  if (text == "CLEAR") {
    return SessionMode::Clear;
  }
  if (text == "SEND") {
    return SessionMode::Send;
  }
  throw Error(ErrorCode::Malformed, "unknown mode '" + text + "'");
}

json point_array(std::span<const Point2D> points)
{
  auto arr = json::array();
  for (const auto & p : points) {
    arr.push_back({p.x, p.y});
  }
  return arr;
}

json optional_number(const std::optional<double> & v)
{
  return v ? json(*v) : json(nullptr);
}

void emit(Outbox & out, const json & msg, std::optional<ClientId> to = std::nullopt)
{
  out.push_back({to, msg.dump()});
}

void emit_error(Outbox & out, ClientId to, ErrorCode code, const std::string & message)
{
  emit(out, json{{"type", "error"}, {"code", error_code_name(code)}, {"message", message}}, to);
}

const json & field(const json & msg, const char * key)
{
  auto it = msg.find(key);
  if (it == msg.end()) {
    throw Error(ErrorCode::Malformed, std::string("message is missing '") + key + "'");
  }
  return *it;
}

double number_field(const json & msg, const char * key)
{
  const json & v = field(msg, key);
  if (!v.is_number()) {
    throw Error(ErrorCode::Malformed, std::string("'") + key + "' must be a number");
  }
  return v.get<double>();
}

std::string string_field(const json & msg, const char * key)
{
  const json & v = field(msg, key);
  if (!v.is_string()) {
    throw Error(ErrorCode::Malformed, std::string("'") + key + "' must be a string");
  }
  return v.get<std::string>();
}

}  // namespace

Session::Session(SessionConfig config)
: config_(std::move(config)), store_(config_.db_file)
{
  config_.controller.validate();
  config_.grid.geometry.validate();
  // Throws on a bad threshold before any client can connect.
  DrawingSession probe(config_.waypoint_threshold);
  if (config_.initial_pose) {
    robot_pose_ = config_.initial_pose;
  } else if (config_.scenario) {
    robot_pose_ = config_.scenario->start;
  }
  task_start_ = now();
}

Session::~Session() = default;

double Session::now() const
{
  if (config_.clock) {
    return config_.clock();
  }
  return std::chrono::duration<double>(
    std::chrono::steady_clock::now().time_since_epoch()).count();
}

bool Session::live_run_active() const
{
  return run_ != nullptr && !run_->done();
}

std::optional<ClientId> Session::driver() const
{
  if (clients_.empty()) {
    return std::nullopt;
  }
  return *clients_.begin();
}

Outbox Session::connect(ClientId client)
{
  Outbox out;
  clients_.insert(client);
  send_snapshot(client, out);
  return out;
}

Outbox Session::disconnect(ClientId client)
{
  Outbox out;
  const bool was_driver = driver() == client;
  clients_.erase(client);
  if (was_driver) {
    if (drawing_) {
      drawing_.reset();
      broadcast_stroke(out);
    }
    if (auto next = driver()) {
      emit(out, json{{"type", "hello"}, {"client", *next}, {"role", "driver"}}, *next);
    }
  }
  return out;
}

void Session::send_snapshot(ClientId client, Outbox & out) const
{
  emit(
    out,
    json{{"type", "hello"}, {"client", client},
      {"role", driver() == client ? "driver" : "observer"}},
    client);

  const auto & g = config_.grid.geometry;
  auto occupied = json::array();
  for (int64_t k = 0; k < g.cell_count(); ++k) {
    if (config_.grid.occupied[static_cast<size_t>(k)]) {
      occupied.push_back(k);
    }
  }
  emit(
    out,
    json{{"type", "map"}, {"resolution", g.resolution}, {"width", g.width},
      {"height", g.height},
      {"origin", {g.origin.position.x, g.origin.position.y, g.origin.theta}},
      {"occupied", std::move(occupied)}},
    client);
  if (config_.scenario) {
    json s = json::parse(scenario_to_json(*config_.scenario));
    s["gt_width"] = gt_width(*config_.scenario);
    emit(out, json{{"type", "scenario"}, {"scenario", std::move(s)}}, client);
  }

  Outbox snapshot;
  broadcast_mode(snapshot);
  broadcast_paths(snapshot);
  broadcast_stroke(snapshot);
  broadcast_counters(snapshot);
  for (auto & m : snapshot) {
    m.to = client;
    out.push_back(std::move(m));
  }
  if (run_) {
    const auto & s = run_->state();
    const auto & cmd = run_->last_command();
    emit(
      out,
      json{{"type", "robot_state"}, {"t", s.t}, {"x", s.pose.position.x},
        {"y", s.pose.position.y}, {"theta", s.pose.theta}, {"v", cmd.v},
        {"omega", cmd.omega}},
      client);
  }
}

Outbox Session::handle_line(ClientId client, std::string_view line)
{
  Outbox out;
  try {
    dispatch(client, line, out);
  } catch (const Error & e) {
    emit_error(out, client, e.code(), e.what());
  }
  return out;
}

void Session::dispatch(ClientId client, std::string_view line, Outbox & out)
{
  json msg;
  try {
    msg = json::parse(line.begin(), line.end());
  } catch (const nlohmann::json::exception &) {
    throw Error(ErrorCode::Malformed, "message is not valid JSON");
  }
  if (!msg.is_object()) {
    throw Error(ErrorCode::Malformed, "message must be a JSON object");
  }
  const std::string type = string_field(msg, "type");

  if (type == "sync") {
    send_snapshot(client, out);
    return;
  }
  if (!clients_.count(client) || driver() != client) {
    throw Error(ErrorCode::NotAuthoritative, "only the driving client may change the session");
  }

  if (type == "set_mode") {
    set_mode(parse_mode(string_field(msg, "mode")), out);
  } else if (type == "pinch") {
    const std::string state = string_field(msg, "state");
    if (state != "down" && state != "up") {
      throw Error(ErrorCode::Malformed, "pinch state must be 'down' or 'up'");
    }
    pinch(state == "down", out);
  } else if (type == "cursor") {
    Point2D p{number_field(msg, "x"), number_field(msg, "y")};
    auto frame = msg.find("frame");
    if (frame != msg.end()) {
      if (*frame == "map") {
        p = apply_anchor(invert_anchor(store_.database().anchor), p);
      } else if (*frame != "anchor") {
        throw Error(ErrorCode::Malformed, "cursor frame must be 'anchor' or 'map'");
      }
    }
    cursor(p, out);
  } else if (type == "confirm") {
    const json & v = field(msg, "value");
    if (!v.is_boolean()) {
      throw Error(ErrorCode::Malformed, "'value' must be a boolean");
    }
    confirm(v.get<bool>(), out);
  } else if (type == "select_path") {
    const json & id = field(msg, "id");
    if (id.is_null()) {
      selected_id_.reset();
    } else if (id.is_string()) {
      const auto & paths = store_.database().paths;
      const auto want = id.get<std::string>();
      if (std::none_of(paths.begin(), paths.end(), [&](const Hrp & p) {return p.id == want;})) {
        throw Error(ErrorCode::NotFound, "no path with id '" + want + "'");
      }
      selected_id_ = want;
    } else {
      throw Error(ErrorCode::Malformed, "'id' must be a string or null");
    }
    broadcast_paths(out);
  } else if (type == "start_task") {
    counters_ = {};
    task_start_ = now();
    broadcast_counters(out);
  } else {
    throw Error(ErrorCode::Malformed, "unknown message type '" + type + "'");
  }
}

void Session::set_mode(SessionMode mode, Outbox & out)
{
  if (drawing_) {
    drawing_.reset();
    broadcast_stroke(out);
  }
  mode_ = mode;
  pending_.reset();
  if (mode == SessionMode::Clear || mode == SessionMode::Send) {
    pending_ = mode;
  }
  broadcast_mode(out);
}

void Session::pinch(bool down, Outbox & out)
{
  if (mode_ != SessionMode::Add) {
    throw Error(ErrorCode::ProtocolViolation, "pinch gestures are only accepted in ADD mode");
  }
  if (down) {
    if (drawing_) {
      throw Error(ErrorCode::ProtocolViolation, "pinch is already held");
    }
    drawing_.emplace(config_.waypoint_threshold);
    drawing_->pinch_down();
    ++counters_.drawing_attempts;
    broadcast_stroke(out);
    broadcast_counters(out);
    return;
  }
  if (!drawing_) {
    throw Error(ErrorCode::ProtocolViolation, "pinch released without being held");
  }
  DrawingSession finished = std::move(*drawing_);
  drawing_.reset();
  finished.pinch_up();
  broadcast_stroke(out);
  FinishedPath result = session_finish(finished);
  // Reloads the file before appending, then overwrites it.
  store_.add(std::move(result.path));
  broadcast_paths(out);
}

void Session::cursor(Point2D p, Outbox & out)
{
  if (mode_ != SessionMode::Add) {
    throw Error(ErrorCode::ProtocolViolation, "cursor messages are only accepted in ADD mode");
  }
  if (!drawing_) {
    return;  // hovering without a pinch
  }
  if (drawing_->feed(p)) {
    broadcast_stroke(out);
  }
}

void Session::confirm(bool value, Outbox & out)
{
  if (!pending_) {
    throw Error(ErrorCode::ProtocolViolation, "nothing is awaiting confirmation");
  }
  const SessionMode action = *pending_;
  pending_.reset();
  mode_ = SessionMode::Off;
  if (!value) {
    broadcast_mode(out);
    return;
  }
  if (action == SessionMode::Clear) {
    try {
      store_.clear();
    } catch (...) {
      broadcast_mode(out);
      throw;
    }
    selected_id_.reset();
    broadcast_mode(out);
    broadcast_paths(out);
    return;
  }
  broadcast_mode(out);
  execute_send(out);
}

void Session::execute_send(Outbox & out)
{
  const SendPayload payload = store_.fetch_for_send(selected_id_);
  GlobalPath oriented = assign_orientations(payload.points, payload.source_id);
  const Pose2D goal = goal_pose(oriented);
  if (run_) {
    // A new SEND preempts the running one from wherever the robot is now.
    robot_pose_ = run_->state().pose;
  }
  const Pose2D start_pose = robot_pose_.value_or(oriented.poses.front());
  planner_.set_path(std::move(oriented));
  const GlobalPath plan = planner_.create_plan(start_pose, goal);

  counters_.completion_time = now() - task_start_;
  broadcast_counters(out);

  auto poses = json::array();
  for (const auto & p : plan.poses) {
    poses.push_back({p.position.x, p.position.y, p.theta});
  }
  emit(
    out,
    json{{"type", "plan"}, {"source_id", plan.source_id}, {"poses", std::move(poses)},
      {"goal", {goal.position.x, goal.position.y, goal.theta}}});

  RobotState start{start_pose, 0.0};
  run_ = std::make_unique<FollowRun>(plan, start, config_.controller, config_.grid, config_.sim);
  emit(
    out,
    json{{"type", "robot_state"}, {"t", 0.0}, {"x", start_pose.position.x},
      {"y", start_pose.position.y}, {"theta", start_pose.theta}, {"v", 0.0}, {"omega", 0.0}});
}

Outbox Session::tick()
{
  Outbox out;
  if (!live_run_active()) {
    return out;
  }
  const auto outcome = run_->advance();
  const auto & s = run_->state();
  const auto & cmd = run_->last_command();
  if (!outcome || *outcome == Outcome::Collision) {
    emit(
      out,
      json{{"type", "robot_state"}, {"t", s.t}, {"x", s.pose.position.x},
        {"y", s.pose.position.y}, {"theta", s.pose.theta}, {"v", cmd.v},
        {"omega", cmd.omega}});
  }
  if (outcome) {
    finish_run(out);
  }
  return out;
}

void Session::finish_run(Outbox & out)
{
  const GlobalPath path = run_->path();
  Trajectory trajectory = run_->trajectory();
  robot_pose_ = trajectory.states.back().pose;

  const auto reference = path.positions();
  const auto errors = cross_track_errors(trajectory, reference);
  json metrics;
  if (config_.scenario) {
    try {
      const auto eval = evaluate_path(*config_.scenario, reference, config_.grid.geometry);
      metrics["accuracy"] = optional_number(eval.report.accuracy);
      metrics["precision"] = optional_number(eval.report.precision);
      metrics["recall"] = optional_number(eval.report.recall);
      metrics["specificity"] = optional_number(eval.report.specificity);
      metrics["f1"] = optional_number(eval.report.f1);
      metrics["pct_within_gt"] = optional_number(eval.report.pct_within_gt);
      const auto gt = build_gt_region(*config_.scenario, config_.grid.geometry);
      const auto traj_points = trajectory.positions();
      if (traj_points.size() >= 2) {
        metrics["trajectory_pct_within_gt"] = pct_within_gt(traj_points, gt);
      }
    } catch (const Error & e) {
      metrics["evaluation_error"] = e.what();
    }
  }
  metrics["max_cross_track_error"] =
    errors.empty() ? 0.0 : *std::max_element(errors.begin(), errors.end());
  metrics["final_goal_distance"] =
    distance(trajectory.states.back().pose.position, goal_pose(path).position);
  metrics["duration"] = trajectory.states.back().t - trajectory.states.front().t;

  emit(
    out,
    json{{"type", "result"}, {"source_id", path.source_id},
      {"outcome", outcome_name(trajectory.outcome)}, {"metrics", std::move(metrics)}});
  last_trajectory_ = std::move(trajectory);
  run_.reset();
}

void Session::broadcast_mode(Outbox & out) const
{
  emit(
    out,
    json{{"type", "mode"}, {"mode", mode_name(mode_)},
      {"pending_confirmation",
        pending_ ? json(mode_name(*pending_)) : json(nullptr)}});
}

void Session::broadcast_paths(Outbox & out) const
{
  const auto & db = store_.database();
  auto paths = json::array();
  for (const auto & hrp : db.paths) {
    std::vector<Point2D> map_points;
    map_points.reserve(hrp.points.size());
    for (const auto & p : hrp.points) {
      map_points.push_back(apply_anchor(db.anchor, p));
    }
    paths.push_back(
      {{"id", hrp.id}, {"created_at", format_rfc3339(hrp.created_at)},
        {"points", point_array(hrp.points)}, {"map_points", point_array(map_points)},
        {"goal", {map_points.back().x, map_points.back().y}}});
  }
  emit(
    out,
    json{{"type", "paths"}, {"paths", std::move(paths)},
      {"selected", selected_id_ ? json(*selected_id_) : json(nullptr)}});
}

void Session::broadcast_stroke(Outbox & out) const
{
  const std::vector<Point2D> none;
  const auto & points = drawing_ ? drawing_->committed() : none;
  emit(
    out,
    json{{"type", "stroke"}, {"active", drawing_.has_value()},
      {"points", point_array(points)}});
}

void Session::broadcast_counters(Outbox & out) const
{
  emit(
    out,
    json{{"type", "counters"}, {"drawing_attempts", counters_.drawing_attempts},
      {"completion_time", optional_number(counters_.completion_time)}});
}

}  // namespace hrpnav
