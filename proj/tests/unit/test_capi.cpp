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

#include <hrpnav.h>

#include <cmath>
#include <cstring>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "support/test_support.hpp"

namespace
{

using json = nlohmann::json;
using testing_support::TempDir;

std::string take(char * s)
{
  std::string out = s != nullptr ? s : "";
  hrpnav_string_free(s);
  return out;
}

std::vector<hrpnav_point> line_points(double length, double step = 0.21)
{
  std::vector<hrpnav_point> pts;
  for (double x = 0.0; x < length + 1e-9; x += step) {
    pts.push_back({x, 0.0});
  }
  return pts;
}

struct Collector
{
  std::vector<std::pair<int64_t, json>> messages;

  static void callback(void * user, int64_t to, const char * line)
  {
    static_cast<Collector *>(user)->messages.emplace_back(to, json::parse(line));
  }

  std::vector<json> of_type(const std::string & type) const
  {
    std::vector<json> out;
    for (const auto & [to, m] : messages) {
      if (m["type"] == type) {
        out.push_back(m);
      }
    }
    return out;
  }
};

TEST(CApi, VersionAndStatusNames)
{
  EXPECT_STREQ(hrpnav_version(), "0.1.0");
  EXPECT_STREQ(hrpnav_status_name(HRPNAV_OK), "ok");
  EXPECT_STREQ(hrpnav_status_name(HRPNAV_E_NOTHING_TO_SEND), "nothing_to_send");
  EXPECT_STREQ(hrpnav_status_name(HRPNAV_E_PORT_IN_USE), "port_in_use");
  EXPECT_STREQ(hrpnav_status_name(HRPNAV_E_INTERNAL), "internal_error");
  hrpnav_string_free(nullptr);
  hrpnav_points_free(nullptr);
}

TEST(CApi, Defaults)
{
  hrpnav_controller_params c;
  hrpnav_controller_params_default(&c);
  EXPECT_GT(c.lookahead, 0.0);
  EXPECT_GT(c.cruise_speed, 0.0);
  hrpnav_sim_config s;
  hrpnav_sim_config_default(&s);
  EXPECT_DOUBLE_EQ(s.dt, 0.05);
  hrpnav_session_options o;
  hrpnav_session_options_default(&o);
  EXPECT_DOUBLE_EQ(o.waypoint_threshold, 0.2);
  EXPECT_EQ(o.map, nullptr);
  hrpnav_eval_options e;
  hrpnav_eval_options_default(&e);
  EXPECT_DOUBLE_EQ(e.resolution, 0.05);
}

TEST(CApi, StoreLifecycle)
{
  TempDir dir;
  const std::string file = (dir / "db.json").string();
  hrpnav_store * store = nullptr;
  ASSERT_EQ(hrpnav_store_open(file.c_str(), &store), HRPNAV_OK);
  size_t count = 99;
  ASSERT_EQ(hrpnav_store_count(store, &count), HRPNAV_OK);
  EXPECT_EQ(count, 0u);

  hrpnav_point * pts = nullptr;
  size_t n = 0;
  EXPECT_EQ(hrpnav_store_fetch(store, nullptr, &pts, &n, nullptr), HRPNAV_E_NOTHING_TO_SEND);
  EXPECT_NE(std::string(hrpnav_last_error()), "");

  ASSERT_EQ(hrpnav_store_set_anchor(store, 1.0, 2.0, 0.0), HRPNAV_OK);
  const auto a = line_points(0.5);
  char * id = nullptr;
  ASSERT_EQ(hrpnav_store_add(store, a.data(), a.size(), &id), HRPNAV_OK);
  const std::string first = take(id);
  EXPECT_FALSE(first.empty());
  const auto b = line_points(1.0);
  ASSERT_EQ(hrpnav_store_add(store, b.data(), b.size(), nullptr), HRPNAV_OK);
  ASSERT_EQ(hrpnav_store_count(store, &count), HRPNAV_OK);
  EXPECT_EQ(count, 2u);

  char * source = nullptr;
  ASSERT_EQ(hrpnav_store_fetch(store, first.c_str(), &pts, &n, &source), HRPNAV_OK);
  EXPECT_EQ(take(source), first);
  ASSERT_EQ(n, a.size());
  EXPECT_EQ(pts[0].x, 1.0);
  EXPECT_EQ(pts[0].y, 2.0);
  hrpnav_points_free(pts);
  ASSERT_EQ(hrpnav_store_fetch(store, nullptr, &pts, &n, nullptr), HRPNAV_OK);
  EXPECT_EQ(n, b.size());
  hrpnav_points_free(pts);
  EXPECT_EQ(hrpnav_store_fetch(store, "missing", &pts, &n, nullptr), HRPNAV_E_NOT_FOUND);

  char * text = nullptr;
  ASSERT_EQ(hrpnav_store_to_json(store, &text), HRPNAV_OK);
  EXPECT_EQ(take(text), testing_support::read_file(file));

  const hrpnav_point dup[] = {{0, 0}, {0, 0}};
  EXPECT_EQ(hrpnav_store_add(store, dup, 2, nullptr), HRPNAV_E_INVALID_ARGUMENT);
  EXPECT_EQ(hrpnav_store_add(store, nullptr, 0, nullptr), HRPNAV_E_INVALID_ARGUMENT);

  ASSERT_EQ(hrpnav_store_clear(store), HRPNAV_OK);
  ASSERT_EQ(hrpnav_store_count(store, &count), HRPNAV_OK);
  EXPECT_EQ(count, 0u);
  hrpnav_store_close(store);

  ASSERT_EQ(hrpnav_store_open(file.c_str(), &store), HRPNAV_OK);
  ASSERT_EQ(hrpnav_store_count(store, &count), HRPNAV_OK);
  EXPECT_EQ(count, 0u);
  hrpnav_store_close(store);
  hrpnav_store_close(nullptr);
}

TEST(CApi, StoreOpenErrors)
{
  TempDir dir;
  hrpnav_store * store = nullptr;
  EXPECT_EQ(hrpnav_store_open(nullptr, &store), HRPNAV_E_INVALID_ARGUMENT);
  EXPECT_EQ(hrpnav_store_open("x", nullptr), HRPNAV_E_INVALID_ARGUMENT);
  testing_support::write_file(dir / "bad.json", "{nope");
  EXPECT_EQ(hrpnav_store_open((dir / "bad.json").c_str(), &store), HRPNAV_E_PARSE);
  testing_support::write_file(dir / "v9.json", R"({"version":9,"anchor":{},"paths":[]})");
  EXPECT_EQ(hrpnav_store_open((dir / "v9.json").c_str(), &store), HRPNAV_E_UNSUPPORTED_VERSION);
  EXPECT_EQ(store, nullptr);
}

TEST(CApi, MapRoundTrip)
{
  TempDir dir;
  hrpnav_map * map = nullptr;
  ASSERT_EQ(hrpnav_map_create_empty(0.1, 10, 5, -1.0, -0.5, &map), HRPNAV_OK);
  ASSERT_EQ(hrpnav_map_set_occupied(map, 3, 4, 1), HRPNAV_OK);
  EXPECT_EQ(hrpnav_map_set_occupied(map, 10, 0, 1), HRPNAV_E_OUT_OF_BOUNDS);
  const std::string meta = (dir / "map.yaml").string();
  ASSERT_EQ(hrpnav_map_save(map, meta.c_str()), HRPNAV_OK);
  hrpnav_map_free(map);
  ASSERT_EQ(hrpnav_map_load(meta.c_str(), &map), HRPNAV_OK);
  hrpnav_map_free(map);
  EXPECT_EQ(hrpnav_map_create_empty(0.0, 10, 5, 0, 0, &map), HRPNAV_E_INVALID_ARGUMENT);
  EXPECT_EQ(hrpnav_map_load((dir / "none.yaml").c_str(), &map), HRPNAV_E_IO);
  hrpnav_map_free(nullptr);
}

TEST(CApi, ScenarioStages)
{
  TempDir dir;
  char * text = nullptr;
  ASSERT_EQ(hrpnav_scenario_stage_json("B", &text), HRPNAV_OK);
  const json b = json::parse(take(text));
  EXPECT_EQ(b["centerline"].size(), 6u);
  EXPECT_EQ(hrpnav_scenario_stage_json("Z", &text), HRPNAV_E_INVALID_ARGUMENT);
  const std::string file = (dir / "a.json").string();
  ASSERT_EQ(hrpnav_scenario_write_stage("A", file.c_str()), HRPNAV_OK);
  EXPECT_EQ(json::parse(testing_support::read_file(file))["name"], "A");
}

class CApiPipeline : public ::testing::Test
{
protected:
  void SetUp() override
  {
    db_ = (dir_ / "db.json").string();
    scenario_ = (dir_ / "stage.json").string();
    ASSERT_EQ(hrpnav_scenario_write_stage("A", scenario_.c_str()), HRPNAV_OK);
    hrpnav_store * store = nullptr;
    ASSERT_EQ(hrpnav_store_open(db_.c_str(), &store), HRPNAV_OK);
    const auto pts = line_points(4.0, 0.25);
    char * id = nullptr;
    ASSERT_EQ(hrpnav_store_add(store, pts.data(), pts.size(), &id), HRPNAV_OK);
    id_ = take(id);
    hrpnav_store_close(store);
  }

  TempDir dir_;
  std::string db_;
  std::string scenario_;
  std::string id_;
};

TEST_F(CApiPipeline, ReplayReachesGoal)
{
  hrpnav_replay_options o;
  hrpnav_replay_options_default(&o);
  o.db_file = db_.c_str();
  o.scenario_file = scenario_.c_str();
  const std::string csv = (dir_ / "traj.csv").string();
  o.out_csv = csv.c_str();
  char * text = nullptr;
  ASSERT_EQ(hrpnav_replay(&o, &text), HRPNAV_OK) << hrpnav_last_error();
  const json s = json::parse(take(text));
  EXPECT_EQ(s["source_id"], id_);
  EXPECT_EQ(s["outcome"], "reached_goal");
  EXPECT_EQ(s["trajectory_pct_within_gt"], 1.0);
  EXPECT_EQ(testing_support::read_file(csv).rfind("t,x,y,theta,v,omega\n", 0), 0u);

  o.out_csv = nullptr;
  o.has_start = 1;
  o.start = {0.0, 0.2, 0.0};
  ASSERT_EQ(hrpnav_replay(&o, &text), HRPNAV_OK);
  EXPECT_EQ(json::parse(take(text))["outcome"], "reached_goal");

  o.path_id = "missing";
  EXPECT_EQ(hrpnav_replay(&o, &text), HRPNAV_E_NOT_FOUND);
  o.path_id = nullptr;
  const std::string nodb = (dir_ / "none.json").string();
  o.db_file = nodb.c_str();
  EXPECT_EQ(hrpnav_replay(&o, &text), HRPNAV_E_IO);
}

TEST_F(CApiPipeline, ReplayBlockedStart)
{
  hrpnav_map * map = nullptr;
  ASSERT_EQ(hrpnav_map_create_empty(0.05, 100, 40, -0.5, -1.0, &map), HRPNAV_OK);
  ASSERT_EQ(hrpnav_map_set_occupied(map, 10, 20, 1), HRPNAV_OK);
  hrpnav_replay_options o;
  hrpnav_replay_options_default(&o);
  o.db_file = db_.c_str();
  o.map = map;
  char * text = nullptr;
  EXPECT_EQ(hrpnav_replay(&o, &text), HRPNAV_E_INVALID_START);
  hrpnav_map_free(map);
}

TEST_F(CApiPipeline, EvalReportsMetrics)
{
  hrpnav_eval_options o;
  hrpnav_eval_options_default(&o);
  o.scenario_file = scenario_.c_str();
  o.db_file = db_.c_str();
  const std::string out = (dir_ / "report.csv").string();
  o.out_file = out.c_str();
  char * text = nullptr;
  ASSERT_EQ(hrpnav_eval(&o, &text), HRPNAV_OK) << hrpnav_last_error();
  const json doc = json::parse(take(text));
  EXPECT_EQ(doc["scenario"], "A");
  ASSERT_EQ(doc["results"].size(), 1u);
  EXPECT_EQ(doc["results"][0]["id"], id_);
  EXPECT_EQ(doc["results"][0]["metrics"]["pct_within_gt"], 1.0);
  EXPECT_GE(doc["results"][0]["metrics"]["f1"].get<double>(), 0.95);
  EXPECT_EQ(testing_support::read_file(out).rfind("metric,value\n", 0), 0u);

  o.all_paths = 1;
  const std::string out_json = (dir_ / "report.json").string();
  o.out_file = out_json.c_str();
  ASSERT_EQ(hrpnav_eval(&o, nullptr), HRPNAV_OK);
  EXPECT_EQ(json::parse(testing_support::read_file(out_json))["results"].size(), 1u);

  o.resolution = -1.0;
  EXPECT_EQ(hrpnav_eval(&o, &text), HRPNAV_E_INVALID_ARGUMENT);
  o.resolution = 0.05;
  const std::string bad = (dir_ / "bad.json").string();
  testing_support::write_file(bad, "[]");
  o.scenario_file = bad.c_str();
  EXPECT_EQ(hrpnav_eval(&o, &text), HRPNAV_E_PARSE);
}

TEST(CApi, Wilcoxon)
{
  const double a[] = {1, 2, 3, 4, 5};
  const double b[] = {2, 4, 6, 8, 10};
  hrpnav_stat_result r;
  ASSERT_EQ(hrpnav_wilcoxon(a, b, 5, HRPNAV_TWO_SIDED, HRPNAV_METHOD_AUTO, &r), HRPNAV_OK);
  EXPECT_DOUBLE_EQ(r.p_value, 0.0625);
  EXPECT_EQ(r.n_effective, 5);
  EXPECT_EQ(r.exact, 1);
  EXPECT_EQ(r.w_statistic, 0.0);
  ASSERT_EQ(hrpnav_wilcoxon(a, b, 5, HRPNAV_TWO_SIDED, HRPNAV_METHOD_NORMAL, &r), HRPNAV_OK);
  EXPECT_EQ(r.exact, 0);
  EXPECT_EQ(hrpnav_wilcoxon(a, a, 5, HRPNAV_TWO_SIDED, HRPNAV_METHOD_AUTO, &r),
    HRPNAV_E_DEGENERATE_SAMPLE);
  EXPECT_EQ(hrpnav_wilcoxon(nullptr, b, 5, HRPNAV_LESS, HRPNAV_METHOD_AUTO, &r),
    HRPNAV_E_INVALID_ARGUMENT);
}

TEST(CApi, WilcoxonCsv)
{
  TempDir dir;
  const std::string file = (dir / "s.csv").string();
  testing_support::write_file(file, "participant,a,b\n1,1,2\n2,2,4\n3,3,6\n4,4,8\n5,5,10\n");
  char * text = nullptr;
  ASSERT_EQ(hrpnav_wilcoxon_csv(file.c_str(), HRPNAV_LESS, HRPNAV_METHOD_EXACT, &text), HRPNAV_OK);
  const json r = json::parse(take(text));
  EXPECT_DOUBLE_EQ(r["p_value"].get<double>(), 0.03125);
  EXPECT_EQ(r["alternative"], "less");
  testing_support::write_file(file, "1,x,2\n");
  EXPECT_EQ(hrpnav_wilcoxon_csv(file.c_str(), HRPNAV_LESS, HRPNAV_METHOD_EXACT, &text),
    HRPNAV_E_PARSE);
  EXPECT_EQ(hrpnav_wilcoxon_csv((dir / "none.csv").c_str(), HRPNAV_LESS, HRPNAV_METHOD_EXACT,
    &text), HRPNAV_E_IO);
}

TEST(CApi, SessionFlow)
{
  TempDir dir;
  const std::string db = (dir / "db.json").string();
  hrpnav_session_options o;
  hrpnav_session_options_default(&o);
  o.db_file = db.c_str();
  hrpnav_session * session = nullptr;
  ASSERT_EQ(hrpnav_session_create(&o, &session), HRPNAV_OK);
  Collector c;
  ASSERT_EQ(hrpnav_session_connect(session, 7, &Collector::callback, &c), HRPNAV_OK);
  ASSERT_FALSE(c.of_type("hello").empty());
  EXPECT_EQ(c.messages.front().first, 7);

  auto send = [&](const json & m) {
      return hrpnav_session_handle_line(session, 7, m.dump().c_str(), &Collector::callback, &c);
    };
  ASSERT_EQ(send({{"type", "set_mode"}, {"mode", "ADD"}}), HRPNAV_OK);
  ASSERT_EQ(send({{"type", "pinch"}, {"state", "down"}}), HRPNAV_OK);
  for (int k = 0; k <= 150; ++k) {
    ASSERT_EQ(send({{"type", "cursor"}, {"x", k * 0.01}, {"y", 0.0}}), HRPNAV_OK);
  }
  ASSERT_EQ(send({{"type", "pinch"}, {"state", "up"}}), HRPNAV_OK);
  ASSERT_EQ(c.of_type("paths").back()["paths"].size(), 1u);
  EXPECT_EQ(c.messages.back().first, -1);

  ASSERT_EQ(hrpnav_session_handle_line(session, 7, "{", &Collector::callback, &c), HRPNAV_OK);
  EXPECT_EQ(c.of_type("error").back()["code"], "malformed");

  ASSERT_EQ(send({{"type", "set_mode"}, {"mode", "SEND"}}), HRPNAV_OK);
  ASSERT_EQ(send({{"type", "confirm"}, {"value", true}}), HRPNAV_OK);
  int active = 1;
  for (int k = 0; k < 10000 && active; ++k) {
    ASSERT_EQ(hrpnav_session_tick(session, &Collector::callback, &c, &active), HRPNAV_OK);
  }
  ASSERT_EQ(c.of_type("result").size(), 1u);
  EXPECT_EQ(c.of_type("result")[0]["outcome"], "reached_goal");
  ASSERT_EQ(hrpnav_session_disconnect(session, 7, &Collector::callback, &c), HRPNAV_OK);
  hrpnav_session_free(session);

  o.db_file = nullptr;
  EXPECT_EQ(hrpnav_session_create(&o, &session), HRPNAV_E_INVALID_ARGUMENT);
}

TEST(CApi, ServerStartsAndStops)
{
  TempDir dir;
  const std::string db = (dir / "db.json").string();
  hrpnav_session_options o;
  hrpnav_session_options_default(&o);
  o.db_file = db.c_str();
  hrpnav_server * server = nullptr;
  ASSERT_EQ(hrpnav_server_create(&o, "127.0.0.1", 0, 1.0, 0, &server), HRPNAV_OK);
  const uint16_t port = hrpnav_server_port(server);
  EXPECT_NE(port, 0);
  hrpnav_server * other = nullptr;
  EXPECT_EQ(hrpnav_server_create(&o, "127.0.0.1", port, 1.0, 0, &other), HRPNAV_E_PORT_IN_USE);
  hrpnav_status status = HRPNAV_E_INTERNAL;
  std::thread runner([&] {status = hrpnav_server_run(server);});
  hrpnav_server_stop(server);
  runner.join();
  EXPECT_EQ(status, HRPNAV_OK);
  hrpnav_server_free(server);
}

}  // namespace
