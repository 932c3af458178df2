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


#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "hrpnav/session.hpp"
#include "json.hpp"
#include "support/gtest_support.hpp"

namespace
{

using hrpnav::ClientId;
using hrpnav::Outbox;
using hrpnav::Session;
using hrpnav::SessionMode;
using json = nlohmann::json;
using testing_support::TempDir;

hrpnav::OccupancyGrid open_grid()
{
  hrpnav::GridGeometry g;
  g.resolution = 0.05;
  g.width = 200;
  g.height = 120;
  g.origin = hrpnav::Pose2D(-2.0, -3.0, 0.0);
  return hrpnav::OccupancyGrid::empty(g);
}

std::vector<json> parse(const Outbox & out, std::optional<ClientId> only = std::nullopt)
{
  std::vector<json> msgs;
  for (const auto & m : out) {
    if (only && m.to && *m.to != *only) {
      continue;
    }
    msgs.push_back(json::parse(m.line));
  }
  return msgs;
}

std::vector<json> of_type(const std::vector<json> & msgs, const std::string & type)
{
  std::vector<json> out;
  for (const auto & m : msgs) {
    if (m["type"] == type) {
      out.push_back(m);
    }
  }
  return out;
}

class SessionTest : public ::testing::Test
{
protected:
  void SetUp() override
  {
    session_ = make_session();
    session_->connect(1);
  }

  std::unique_ptr<Session> make_session(std::optional<hrpnav::Scenario> scenario = std::nullopt)
  {
    hrpnav::SessionConfig config;
    config.db_file = dir_ / "db.json";
    config.grid = open_grid();
    config.scenario = scenario;
    config.clock = [this] {return clock_;};
    return std::make_unique<Session>(std::move(config));
  }

  std::vector<json> send(const json & msg, ClientId client = 1)
  {
    return parse(session_->handle_line(client, msg.dump()));
  }

  std::vector<json> send_raw(const std::string & line, ClientId client = 1)
  {
    return parse(session_->handle_line(client, line));
  }

  // Draws a straight stroke from `from` to `to` in 1 cm cursor steps.
  std::vector<json> draw(hrpnav::Point2D from, hrpnav::Point2D to)
  {
    send({{"type", "set_mode"}, {"mode", "ADD"}});
    send({{"type", "pinch"}, {"state", "down"}});
    const int steps = static_cast<int>(std::ceil(hrpnav::distance(from, to) / 0.01));
    for (int k = 0; k <= steps; ++k) {
      const double u = static_cast<double>(k) / steps;
      send({{"type", "cursor"}, {"x", from.x + u * (to.x - from.x)},
          {"y", from.y + u * (to.y - from.y)}});
    }
    return send({{"type", "pinch"}, {"state", "up"}});
  }

  std::vector<json> run_to_end()
  {
    std::vector<json> all;
    for (int k = 0; k < 100000 && session_->live_run_active(); ++k) {
      for (auto & m : parse(session_->tick())) {
        all.push_back(std::move(m));
      }
    }
    return all;
  }

  static std::string error_code(const std::vector<json> & msgs)
  {
    const auto errors = of_type(msgs, "error");
    return errors.empty() ? std::string() : errors.front()["code"].get<std::string>();
  }

  TempDir dir_;
  double clock_{100.0};
  std::unique_ptr<Session> session_;
};

TEST_F(SessionTest, ConnectSendsSnapshot)
{
  const auto msgs = parse(session_->connect(2));
  std::vector<std::string> types;
  for (const auto & m : msgs) {
    types.push_back(m["type"]);
  }
  EXPECT_EQ(types, (std::vector<std::string>{"hello", "map", "mode", "paths", "stroke", "counters"}));
  EXPECT_EQ(msgs[0]["role"], "observer");
  EXPECT_EQ(msgs[1]["width"], 200);
  EXPECT_EQ(msgs[2]["mode"], "OFF");
  for (const auto & m : session_->connect(3)) {
    EXPECT_EQ(m.to, std::optional<ClientId>(3));
  }
}

TEST_F(SessionTest, AddDrawCommitsOneHrpAndBroadcasts)
{
  const auto msgs = draw({0, 0}, {1, 0});
  ASSERT_EQ(session_->database().paths.size(), 1u);
  const auto & pts = session_->database().paths[0].points;
  ASSERT_EQ(pts.size(), 5u);
  EXPECT_NEAR(pts.back().x, 0.84, 1e-12);
  const auto paths = of_type(msgs, "paths");
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_EQ(paths[0]["paths"].size(), 1u);
  EXPECT_EQ(paths[0]["paths"][0]["goal"][0].get<double>(), pts.back().x);
  EXPECT_EQ(hrpnav::load(dir_ / "db.json"), session_->database());
  EXPECT_EQ(session_->mode(), SessionMode::Add);
  EXPECT_FALSE(session_->drawing());
}

TEST_F(SessionTest, ThreeCursorMessagesMakeAPath)
{
  send({{"type", "set_mode"}, {"mode", "ADD"}});
  send({{"type", "pinch"}, {"state", "down"}});
  send({{"type", "cursor"}, {"x", 0.0}, {"y", 0.0}});
  const auto mid = send({{"type", "cursor"}, {"x", 0.1}, {"y", 0.0}});
  EXPECT_TRUE(of_type(mid, "stroke").empty());
  const auto far = send({{"type", "cursor"}, {"x", 0.5}, {"y", 0.0}});
  ASSERT_EQ(of_type(far, "stroke").size(), 1u);
  EXPECT_EQ(of_type(far, "stroke")[0]["points"].size(), 2u);
  send({{"type", "pinch"}, {"state", "up"}});
  EXPECT_EQ(session_->database().paths.size(), 1u);
}

TEST_F(SessionTest, CursorOutsideAddIsProtocolViolation)
{
  EXPECT_EQ(error_code(send({{"type", "cursor"}, {"x", 0.0}, {"y", 0.0}})), "protocol_violation");
  EXPECT_EQ(error_code(send({{"type", "pinch"}, {"state", "down"}})), "protocol_violation");
}

TEST_F(SessionTest, HoverInAddIsIgnored)
{
  send({{"type", "set_mode"}, {"mode", "ADD"}});
  EXPECT_TRUE(send({{"type", "cursor"}, {"x", 1.0}, {"y", 0.0}}).empty());
  EXPECT_EQ(error_code(send({{"type", "pinch"}, {"state", "up"}})), "protocol_violation");
}

TEST_F(SessionTest, TapWithoutDragIsPathTooShort)
{
  send({{"type", "set_mode"}, {"mode", "ADD"}});
  send({{"type", "pinch"}, {"state", "down"}});
  send({{"type", "cursor"}, {"x", 1.0}, {"y", 0.0}});
  EXPECT_EQ(error_code(send({{"type", "pinch"}, {"state", "up"}})), "path_too_short");
  EXPECT_TRUE(session_->database().paths.empty());
  EXPECT_FALSE(session_->drawing());
}

TEST_F(SessionTest, ClearConfirmEmptiesStore)
{
  draw({0, 0}, {1, 0});
  const auto pending = send({{"type", "set_mode"}, {"mode", "CLEAR"}});
  EXPECT_EQ(of_type(pending, "mode")[0]["pending_confirmation"], "CLEAR");
  EXPECT_EQ(session_->database().paths.size(), 1u);
  const auto done = send({{"type", "confirm"}, {"value", true}});
  EXPECT_TRUE(session_->database().paths.empty());
  EXPECT_TRUE(hrpnav::load(dir_ / "db.json").paths.empty());
  EXPECT_EQ(session_->mode(), SessionMode::Off);
  EXPECT_EQ(of_type(done, "mode")[0]["mode"], "OFF");
  EXPECT_EQ(of_type(done, "paths")[0]["paths"].size(), 0u);
}

TEST_F(SessionTest, CancelledConfirmationDoesNothing)
{
  draw({0, 0}, {1, 0});
  send({{"type", "set_mode"}, {"mode", "CLEAR"}});
  send({{"type", "confirm"}, {"value", false}});
  EXPECT_EQ(session_->database().paths.size(), 1u);
  EXPECT_EQ(session_->mode(), SessionMode::Off);
  EXPECT_FALSE(session_->pending_confirmation());
  EXPECT_EQ(error_code(send({{"type", "confirm"}, {"value", true}})), "protocol_violation");
}

TEST_F(SessionTest, SendWithEmptyStore)
{
  send({{"type", "set_mode"}, {"mode", "SEND"}});
  EXPECT_EQ(error_code(send({{"type", "confirm"}, {"value", true}})), "nothing_to_send");
  EXPECT_FALSE(session_->live_run_active());
  EXPECT_EQ(session_->mode(), SessionMode::Off);
}

TEST_F(SessionTest, SendStreamsRobotStateUntilGoal)
{
  draw({0, 0}, {2, 0});
  clock_ = 112.5;
  send({{"type", "set_mode"}, {"mode", "SEND"}});
  const auto started = send({{"type", "confirm"}, {"value", true}});
  ASSERT_EQ(of_type(started, "plan").size(), 1u);
  ASSERT_EQ(of_type(started, "robot_state").size(), 1u);
  EXPECT_EQ(of_type(started, "counters")[0]["completion_time"], 12.5);
  EXPECT_TRUE(session_->live_run_active());
  EXPECT_TRUE(session_->planner().has_path());

  const auto stream = run_to_end();
  const auto states = of_type(stream, "robot_state");
  ASSERT_GT(states.size(), 10u);
  for (size_t k = 1; k < states.size(); ++k) {
    EXPECT_NEAR(states[k]["t"].get<double>() - states[k - 1]["t"].get<double>(), 0.05, 1e-9);
  }
  const auto results = of_type(stream, "result");
  ASSERT_EQ(results.size(), 1u);
  EXPECT_EQ(results[0]["outcome"], "reached_goal");
  const auto goal = session_->database().paths[0].points.back();
  const auto & last = states.back();
  EXPECT_LE(std::hypot(last["x"].get<double>() - goal.x, last["y"].get<double>() - goal.y), 0.1);
  EXPECT_LE(results[0]["metrics"]["final_goal_distance"].get<double>(), 0.1);
  ASSERT_TRUE(session_->last_trajectory());
  EXPECT_EQ(session_->last_trajectory()->outcome, hrpnav::Outcome::ReachedGoal);
}

TEST_F(SessionTest, ResultCarriesGtMetricsWithScenario)
{
  auto scenario = hrpnav::make_stage("practice");
  session_ = make_session(scenario);
  const auto hello = parse(session_->connect(1));
  ASSERT_EQ(of_type(hello, "scenario").size(), 1u);
  EXPECT_DOUBLE_EQ(of_type(hello, "scenario")[0]["scenario"]["gt_width"].get<double>(), 0.55);
  draw({0, 0}, {2, 0});
  send({{"type", "set_mode"}, {"mode", "SEND"}});
  send({{"type", "confirm"}, {"value", true}});
  const auto results = of_type(run_to_end(), "result");
  ASSERT_EQ(results.size(), 1u);
  const auto & m = results[0]["metrics"];
  EXPECT_GE(m["f1"].get<double>(), 0.9);
  EXPECT_EQ(m["pct_within_gt"].get<double>(), 1.0);
  EXPECT_EQ(m["trajectory_pct_within_gt"].get<double>(), 1.0);
}

TEST_F(SessionTest, SelectPathChoosesSendSource)
{
  draw({0, 0}, {1, 0});
  const std::string first = session_->database().paths[0].id;
  draw({0, 0}, {0, 1});
  EXPECT_EQ(error_code(send({{"type", "select_path"}, {"id", "nope"}})), "not_found");
  const auto sel = send({{"type", "select_path"}, {"id", first}});
  EXPECT_EQ(of_type(sel, "paths")[0]["selected"], first);
  send({{"type", "set_mode"}, {"mode", "SEND"}});
  const auto started = send({{"type", "confirm"}, {"value", true}});
  EXPECT_EQ(of_type(started, "plan")[0]["source_id"], first);
  send({{"type", "select_path"}, {"id", nullptr}});
}

TEST_F(SessionTest, ObserversCannotDrive)
{
  session_->connect(2);
  EXPECT_EQ(session_->driver(), std::optional<ClientId>(1));
  EXPECT_EQ(error_code(send({{"type", "set_mode"}, {"mode", "ADD"}}, 2)), "not_authoritative");
  EXPECT_EQ(session_->mode(), SessionMode::Off);
  EXPECT_FALSE(send({{"type", "sync"}}, 2).empty());

  const auto handover = parse(session_->disconnect(1));
  ASSERT_EQ(handover.size(), 1u);
  EXPECT_EQ(handover[0]["role"], "driver");
  EXPECT_TRUE(error_code(send({{"type", "set_mode"}, {"mode", "ADD"}}, 2)).empty());
}

TEST_F(SessionTest, DriverDisconnectAbandonsStroke)
{
  session_->connect(2);
  send({{"type", "set_mode"}, {"mode", "ADD"}});
  send({{"type", "pinch"}, {"state", "down"}});
  EXPECT_TRUE(session_->drawing());
  session_->disconnect(1);
  EXPECT_FALSE(session_->drawing());
}

TEST_F(SessionTest, MalformedMessages)
{
  EXPECT_EQ(error_code(send_raw("{not json")), "malformed");
  EXPECT_EQ(error_code(send_raw("[1,2]")), "malformed");
  EXPECT_EQ(error_code(send_raw(R"({"kind":"x"})")), "malformed");
  EXPECT_EQ(error_code(send_raw(R"({"type":"teleport"})")), "malformed");
  EXPECT_EQ(error_code(send_raw(R"({"type":"set_mode","mode":"DANCE"})")), "malformed");
  EXPECT_EQ(error_code(send_raw(R"({"type":"confirm","value":"yes"})")), "malformed");
  send({{"type", "set_mode"}, {"mode", "ADD"}});
  EXPECT_EQ(error_code(send_raw(R"({"type":"cursor","x":"1","y":0})")), "malformed");
  EXPECT_EQ(error_code(send_raw(R"({"type":"pinch","state":"sideways"})")), "malformed");
  EXPECT_EQ(error_code(send_raw(R"({"type":"cursor","x":1,"y":0,"frame":"moon"})")), "malformed");
  for (const auto & m : session_->handle_line(1, "{")) {
    EXPECT_EQ(m.to, std::optional<ClientId>(1));
  }
}

TEST_F(SessionTest, MapFrameCursorIsStoredInAnchorFrame)
{
  {
    hrpnav::PathStore store(dir_ / "db.json");
    store.set_anchor({{1.0, 0.0}, 0.0});
  }
  session_ = make_session();
  session_->connect(1);
  send({{"type", "set_mode"}, {"mode", "ADD"}});
  send({{"type", "pinch"}, {"state", "down"}});
  send({{"type", "cursor"}, {"x", 1.0}, {"y", 0.0}, {"frame", "map"}});
  send({{"type", "cursor"}, {"x", 1.5}, {"y", 0.0}, {"frame", "map"}});
  const auto msgs = send({{"type", "pinch"}, {"state", "up"}});
  const auto & hrp = session_->database().paths.at(0);
  EXPECT_EQ(hrp.points[0], (hrpnav::Point2D{0.0, 0.0}));
  EXPECT_EQ(of_type(msgs, "paths")[0]["paths"][0]["map_points"][1][0], 1.5);
}

TEST_F(SessionTest, CountersTrackAttemptsAndReset)
{
  draw({0, 0}, {1, 0});
  send({{"type", "pinch"}, {"state", "down"}});
  send({{"type", "pinch"}, {"state", "up"}});
  EXPECT_EQ(session_->counters().drawing_attempts, 2);
  const auto reset = send({{"type", "start_task"}});
  EXPECT_EQ(of_type(reset, "counters")[0]["drawing_attempts"], 0);
  EXPECT_EQ(session_->counters().drawing_attempts, 0);
  EXPECT_FALSE(session_->counters().completion_time);
}

TEST_F(SessionTest, RestartRestoresPaths)
{
  draw({0, 0}, {1, 0});
  draw({0, 0}, {0, 1});
  const auto before = session_->database();
  session_.reset();
  session_ = make_session();
  EXPECT_EQ(session_->database(), before);
  const auto snapshot = parse(session_->connect(1));
  EXPECT_EQ(of_type(snapshot, "paths")[0]["paths"].size(), 2u);
}

TEST_F(SessionTest, SecondSendPreemptsFromCurrentPose)
{
  draw({0, 0}, {2, 0});
  send({{"type", "set_mode"}, {"mode", "SEND"}});
  send({{"type", "confirm"}, {"value", true}});
  for (int k = 0; k < 40; ++k) {
    session_->tick();
  }
  send({{"type", "set_mode"}, {"mode", "SEND"}});
  const auto restarted = send({{"type", "confirm"}, {"value", true}});
  const auto state = of_type(restarted, "robot_state").at(0);
  EXPECT_GT(state["x"].get<double>(), 0.3);
  EXPECT_EQ(state["t"], 0.0);
  EXPECT_EQ(of_type(run_to_end(), "result")[0]["outcome"], "reached_goal");
}

}  // namespace
