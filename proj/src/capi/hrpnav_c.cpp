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


#include "hrpnav.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hrpnav/error.hpp"
#include "hrpnav/evaluator.hpp"
#include "hrpnav/grid.hpp"
#include "hrpnav/path_store.hpp"
#include "hrpnav/planner.hpp"
#include "hrpnav/session.hpp"
#include "hrpnav/simulator.hpp"
#include "hrpnav/stats.hpp"
#include "server/server.hpp"

using json = nlohmann::ordered_json;

struct hrpnav_store
{
  explicit hrpnav_store(std::filesystem::path file)
  : store(std::move(file)) {}

  hrpnav::PathStore store;
};

struct hrpnav_map
{
  hrpnav::OccupancyGrid grid;
};

struct hrpnav_session
{
  explicit hrpnav_session(hrpnav::SessionConfig config)
  : session(std::move(config)) {}

  hrpnav::Session session;
};

struct hrpnav_server
{
  explicit hrpnav_server(hrpnav::ServerOptions options)
  : server(std::move(options)) {}

  hrpnav::Server server;
};

namespace
{

thread_local std::string g_last_error;

hrpnav_status to_status(hrpnav::ErrorCode code)
{
  return static_cast<hrpnav_status>(static_cast<int>(code) + 1);
}

template<typename F>
hrpnav_status guarded(F && body)
{
  try {
    body();
    g_last_error.clear();
    return HRPNAV_OK;
  } catch (const hrpnav::Error & e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const hrpnav::SimulatedCrash & e) {
    g_last_error = e.what();
    return HRPNAV_E_IO;
  } catch (const std::bad_alloc &) {
    g_last_error = "out of memory";
    return HRPNAV_E_INTERNAL;
  } catch (const std::exception & e) {
    g_last_error = e.what();
    return HRPNAV_E_INTERNAL;
  }
}

void require(bool condition, const char * what)
{
  if (!condition) {
    throw hrpnav::Error(hrpnav::ErrorCode::InvalidArgument, what);
  }
}

char * copy_string(const std::string & s)
{
  char * out = static_cast<char *>(std::malloc(s.size() + 1));
  if (out == nullptr) {
    throw std::bad_alloc();
  }
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

hrpnav::ControllerParams to_params(const hrpnav_controller_params & p)
{
  hrpnav::ControllerParams out;
  out.lookahead = p.lookahead;
  out.cruise_speed = p.cruise_speed;
  out.goal_xy_tolerance = p.goal_xy_tolerance;
  out.slowdown_distance = p.slowdown_distance;
  out.max_angular = p.max_angular;
  out.validate();
  return out;
}

hrpnav::SimConfig to_sim(const hrpnav_sim_config & c)
{
  require(c.dt > 0.0 && std::isfinite(c.dt), "dt must be positive");
  require(c.timeout > 0.0, "timeout must be positive");
  return {c.dt, c.timeout};
}

hrpnav::Pose2D to_pose(const hrpnav_pose & p)
{
  return hrpnav::Pose2D(p.x, p.y, p.theta);
}

void require_file(const char * file, const char * what)
{
  require(file != nullptr && *file != '\0', what);
  if (!std::filesystem::exists(file)) {
    throw hrpnav::Error(hrpnav::ErrorCode::Io, std::string("no such file '") + file + "'");
  }
}

std::optional<std::string> optional_id(const char * id)
{
  if (id == nullptr || *id == '\0') {
    return std::nullopt;
  }
  return std::string(id);
}

// Empty grid covering every point with a one meter margin.
hrpnav::OccupancyGrid grid_around(std::vector<hrpnav::Point2D> points, double resolution)
{
  hrpnav::Scenario bounds;
  bounds.centerline = std::move(points);
  return hrpnav::OccupancyGrid::empty(hrpnav::grid_for_scenario(bounds, resolution, 1.0));
}

void deliver(const hrpnav::Outbox & out, hrpnav_message_fn fn, void * user)
{
  if (fn == nullptr) {
    return;
  }
  for (const auto & msg : out) {
    fn(user, msg.to ? static_cast<int64_t>(*msg.to) : -1, msg.line.c_str());
  }
}

hrpnav::SessionConfig to_session_config(const hrpnav_session_options & o)
{
  require(o.db_file != nullptr && *o.db_file != '\0', "a database file is required");
  hrpnav::SessionConfig config;
  config.db_file = o.db_file;
  if (o.scenario_file != nullptr) {
    config.scenario = hrpnav::load_scenario(o.scenario_file);
  }
  if (o.map != nullptr) {
    config.grid = o.map->grid;
  } else if (config.scenario) {
    config.grid = hrpnav::OccupancyGrid::empty(hrpnav::grid_for_scenario(*config.scenario));
  } else {
    config.grid = grid_around({{-10.0, -10.0}, {10.0, 10.0}}, 0.05);
  }
  config.controller = to_params(o.controller);
  config.sim = to_sim(o.sim);
  config.waypoint_threshold = o.waypoint_threshold;
  if (o.has_initial_pose) {
    config.initial_pose = to_pose(o.initial_pose);
  }
  return config;
}

}  // namespace

extern "C" {

const char * hrpnav_version(void)
{
  return "0.1.0";
}

const char * hrpnav_status_name(hrpnav_status status)
{
  switch (status) {
    case HRPNAV_OK:
      return "ok";
    case HRPNAV_E_INTERNAL:
      return "internal_error";
    default:
      break;
  }
  const int code = static_cast<int>(status) - 1;
  if (code < 0 || code > static_cast<int>(hrpnav::ErrorCode::PortInUse)) {
    return "unknown";
  }
  return hrpnav::error_code_name(static_cast<hrpnav::ErrorCode>(code)).data();
}

const char * hrpnav_last_error(void)
{
  return g_last_error.c_str();
}

void hrpnav_string_free(char * s)
{
  std::free(s);
}

void hrpnav_points_free(hrpnav_point * points)
{
  std::free(points);
}

void hrpnav_controller_params_default(hrpnav_controller_params * params)
{
  if (params == nullptr) {
    return;
  }
  const hrpnav::ControllerParams d;
  *params = {d.lookahead, d.cruise_speed, d.goal_xy_tolerance, d.slowdown_distance,
    d.max_angular};
}

void hrpnav_sim_config_default(hrpnav_sim_config * config)
{
  if (config == nullptr) {
    return;
  }
  const hrpnav::SimConfig d;
  *config = {d.dt, d.timeout};
}

hrpnav_status hrpnav_store_open(const char * file, hrpnav_store ** out)
{
  return guarded(
    [&] {
      require(file != nullptr && *file != '\0' && out != nullptr, "store file and handle required");
      *out = new hrpnav_store(file);
    });
}

void hrpnav_store_close(hrpnav_store * store)
{
  delete store;
}

hrpnav_status hrpnav_store_add(
  hrpnav_store * store, const hrpnav_point * points, size_t count, char ** out_id)
{
  return guarded(
    [&] {
      require(store != nullptr, "store handle required");
      require(points != nullptr || count == 0, "points required");
      hrpnav::Hrp hrp;
      hrp.id = hrpnav::generate_path_id();
      hrp.created_at = hrpnav::now_seconds();
      for (size_t k = 0; k < count; ++k) {
        hrp.points.push_back({points[k].x, points[k].y});
      }
      const auto & added = store->store.add(std::move(hrp));
      if (out_id != nullptr) {
        *out_id = copy_string(added.id);
      }
    });
}

hrpnav_status hrpnav_store_clear(hrpnav_store * store)
{
  return guarded(
    [&] {
      require(store != nullptr, "store handle required");
      store->store.clear();
    });
}

hrpnav_status hrpnav_store_set_anchor(hrpnav_store * store, double tx, double ty, double rotation)
{
  return guarded(
    [&] {
      require(store != nullptr, "store handle required");
      store->store.set_anchor({{tx, ty}, rotation});
    });
}

hrpnav_status hrpnav_store_count(const hrpnav_store * store, size_t * out)
{
  return guarded(
    [&] {
      require(store != nullptr && out != nullptr, "store handle required");
      *out = store->store.database().paths.size();
    });
}

hrpnav_status hrpnav_store_fetch(
  hrpnav_store * store, const char * id, hrpnav_point ** out_points, size_t * out_count,
  char ** out_source_id)
{
  return guarded(
    [&] {
      require(store != nullptr && out_points != nullptr && out_count != nullptr,
      "store handle and outputs required");
      const auto payload = store->store.fetch_for_send(optional_id(id));
      auto * buf = static_cast<hrpnav_point *>(
        std::malloc(sizeof(hrpnav_point) * std::max<size_t>(1, payload.points.size())));
      if (buf == nullptr) {
        throw std::bad_alloc();
      }
      for (size_t k = 0; k < payload.points.size(); ++k) {
        buf[k] = {payload.points[k].x, payload.points[k].y};
      }
      char * source = nullptr;
      if (out_source_id != nullptr) {
        try {
          source = copy_string(payload.source_id);
        } catch (...) {
          std::free(buf);
          throw;
        }
        *out_source_id = source;
      }
      *out_points = buf;
      *out_count = payload.points.size();
    });
}

hrpnav_status hrpnav_store_to_json(const hrpnav_store * store, char ** out_json)
{
  return guarded(
    [&] {
      require(store != nullptr && out_json != nullptr, "store handle and output required");
      *out_json = copy_string(hrpnav::serialize(store->store.database()));
    });
}

hrpnav_status hrpnav_map_load(const char * metadata_file, hrpnav_map ** out)
{
  return guarded(
    [&] {
      require(metadata_file != nullptr && out != nullptr, "map file and handle required");
      *out = new hrpnav_map{hrpnav::load_map(metadata_file)};
    });
}

hrpnav_status hrpnav_map_create_empty(
  double resolution, int64_t width, int64_t height, double origin_x, double origin_y,
  hrpnav_map ** out)
{
  return guarded(
    [&] {
      require(out != nullptr, "map handle required");
      hrpnav::GridGeometry g;
      g.resolution = resolution;
      g.width = width;
      g.height = height;
      g.origin = hrpnav::Pose2D(origin_x, origin_y, 0.0);
      *out = new hrpnav_map{hrpnav::OccupancyGrid::empty(g)};
    });
}

hrpnav_status hrpnav_map_set_occupied(hrpnav_map * map, int64_t i, int64_t j, int occupied)
{
  return guarded(
    [&] {
      require(map != nullptr, "map handle required");
      if (!map->grid.geometry.in_bounds({i, j})) {
        throw hrpnav::Error(hrpnav::ErrorCode::OutOfBounds, "cell outside the map");
      }
      map->grid.set_occupied({i, j}, occupied != 0);
    });
}

hrpnav_status hrpnav_map_save(const hrpnav_map * map, const char * metadata_file)
{
  return guarded(
    [&] {
      require(map != nullptr && metadata_file != nullptr, "map handle and file required");
      hrpnav::save_map(metadata_file, map->grid);
    });
}

void hrpnav_map_free(hrpnav_map * map)
{
  delete map;
}

hrpnav_status hrpnav_scenario_stage_json(const char * stage, char ** out_json)
{
  return guarded(
    [&] {
      require(stage != nullptr && out_json != nullptr, "stage and output required");
      *out_json = copy_string(hrpnav::scenario_to_json(hrpnav::make_stage(stage)));
    });
}

hrpnav_status hrpnav_scenario_write_stage(const char * stage, const char * file)
{
  return guarded(
    [&] {
      require(stage != nullptr && file != nullptr, "stage and file required");
      hrpnav::save_scenario(file, hrpnav::make_stage(stage));
    });
}

void hrpnav_replay_options_default(hrpnav_replay_options * options)
{
  if (options == nullptr) {
    return;
  }
  *options = hrpnav_replay_options{};
  hrpnav_controller_params_default(&options->controller);
  hrpnav_sim_config_default(&options->sim);
}

hrpnav_status hrpnav_replay(const hrpnav_replay_options * options, char ** out_summary_json)
{
  return guarded(
    [&] {
      require(options != nullptr, "replay options required");
      require_file(options->db_file, "a database file is required");
      const auto params = to_params(options->controller);
      const auto sim = to_sim(options->sim);
      std::optional<hrpnav::Scenario> scenario;
      if (options->scenario_file != nullptr) {
        scenario = hrpnav::load_scenario(options->scenario_file);
      }

      const auto db = hrpnav::load(options->db_file);
      const auto payload = hrpnav::fetch_for_send(db, optional_id(options->path_id));
      const auto path = hrpnav::assign_orientations(payload.points, payload.source_id);
      const hrpnav::Pose2D start =
      options->has_start ? to_pose(options->start) : path.poses.front();

      hrpnav::OccupancyGrid grid;
      if (options->map != nullptr) {
        grid = options->map->grid;
      } else {
        auto extent = path.positions();
        extent.push_back(start.position);
        if (scenario) {
          extent.insert(extent.end(), scenario->centerline.begin(), scenario->centerline.end());
        }
        grid = grid_around(std::move(extent), 0.05);
      }

      const auto trajectory = hrpnav::run_follow(path, {start, 0.0}, params, grid, sim);
      if (options->out_csv != nullptr) {
        hrpnav::write_trajectory_csv(options->out_csv, trajectory);
      }

      const auto reference = path.positions();
      const auto errors = hrpnav::cross_track_errors(trajectory, reference);
      json summary;
      summary["source_id"] = path.source_id;
      summary["outcome"] = hrpnav::outcome_name(trajectory.outcome);
      summary["steps"] = trajectory.states.size() - 1;
      summary["duration"] = trajectory.states.back().t - trajectory.states.front().t;
      summary["final_goal_distance"] = hrpnav::distance(
        trajectory.states.back().pose.position, hrpnav::goal_pose(path).position);
      summary["max_cross_track_error"] =
      errors.empty() ? 0.0 : *std::max_element(errors.begin(), errors.end());
      summary["mean_cross_track_error"] = errors.empty() ? 0.0 :
      std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(errors.size());
      if (scenario) {
        const auto gt = hrpnav::build_gt_region(*scenario, grid.geometry);
        const auto points = trajectory.positions();
        summary["trajectory_pct_within_gt"] =
        points.size() >= 2 ? json(hrpnav::pct_within_gt(points, gt)) : json(nullptr);
      }
      if (out_summary_json != nullptr) {
        *out_summary_json = copy_string(summary.dump());
      }
    });
}

void hrpnav_eval_options_default(hrpnav_eval_options * options)
{
  if (options == nullptr) {
    return;
  }
  *options = hrpnav_eval_options{};
  options->resolution = 0.05;
}

hrpnav_status hrpnav_eval(const hrpnav_eval_options * options, char ** out_json)
{
  return guarded(
    [&] {
      require(options != nullptr, "eval options required");
      require_file(options->scenario_file, "a scenario file is required");
      require_file(options->db_file, "a database file is required");
      require(options->resolution > 0.0, "resolution must be positive");
      const auto scenario = hrpnav::load_scenario(options->scenario_file);
      const auto db = hrpnav::load(options->db_file);

      std::vector<hrpnav::SendPayload> selected;
      if (options->all_paths) {
        if (db.paths.empty()) {
          throw hrpnav::Error(hrpnav::ErrorCode::NothingToSend, "the database holds no HRP");
        }
        for (const auto & hrp : db.paths) {
          selected.push_back(hrpnav::fetch_for_send(db, hrp.id));
        }
      } else {
        selected.push_back(hrpnav::fetch_for_send(db, optional_id(options->path_id)));
      }

      // One grid for every evaluated path so the cell counts compare.
      std::vector<hrpnav::Point2D> extent = scenario.centerline;
      for (const auto & s : selected) {
        extent.insert(extent.end(), s.points.begin(), s.points.end());
      }
      const auto geometry = grid_around(std::move(extent), options->resolution).geometry;

      json results = json::array();
      std::vector<hrpnav::PathEvaluation> evaluations;
      for (const auto & s : selected) {
        evaluations.push_back(hrpnav::evaluate_path(scenario, s.points, geometry));
        json entry;
        entry["id"] = s.source_id;
        const json report = json::parse(hrpnav::report_to_json(evaluations.back()));
        entry["counts"] = report["counts"];
        entry["metrics"] = report["metrics"];
        results.push_back(std::move(entry));
      }
      json doc;
      doc["scenario"] = scenario.name;
      doc["gt_width"] = hrpnav::gt_width(scenario);
      doc["resolution"] = options->resolution;
      doc["results"] = std::move(results);

      if (options->out_file != nullptr) {
        const std::filesystem::path out_path(options->out_file);
        std::ofstream out(out_path);
        if (!out) {
          throw hrpnav::Error(
            hrpnav::ErrorCode::Io, "cannot write report '" + out_path.string() + "'");
        }
        if (out_path.extension() == ".json") {
          out << doc.dump(2) << "\n";
        } else {
          require(evaluations.size() == 1, "a CSV report holds exactly one path");
          hrpnav::write_report_csv(out, evaluations.front());
        }
        if (!out) {
          throw hrpnav::Error(
            hrpnav::ErrorCode::Io, "cannot write report '" + out_path.string() + "'");
        }
      }
      if (out_json != nullptr) {
        *out_json = copy_string(doc.dump());
      }
    });
}

namespace
{

hrpnav::Alternative to_alternative(hrpnav_alternative a)
{
  switch (a) {
    case HRPNAV_TWO_SIDED:
      return hrpnav::Alternative::TwoSided;
    case HRPNAV_GREATER:
      return hrpnav::Alternative::Greater;
    case HRPNAV_LESS:
      return hrpnav::Alternative::Less;
  }
  throw hrpnav::Error(hrpnav::ErrorCode::InvalidArgument, "unknown alternative");
}

hrpnav::MethodChoice to_method(hrpnav_method m)
{
  switch (m) {
    case HRPNAV_METHOD_AUTO:
      return hrpnav::MethodChoice::Auto;
    case HRPNAV_METHOD_EXACT:
      return hrpnav::MethodChoice::Exact;
    case HRPNAV_METHOD_NORMAL:
      return hrpnav::MethodChoice::Normal;
  }
  throw hrpnav::Error(hrpnav::ErrorCode::InvalidArgument, "unknown method");
}

}  // namespace

hrpnav_status hrpnav_wilcoxon(
  const double * condition_a, const double * condition_b, size_t n,
  hrpnav_alternative alternative, hrpnav_method method, hrpnav_stat_result * out)
{
  return guarded(
    [&] {
      require(out != nullptr, "result output required");
      require(n == 0 || (condition_a != nullptr && condition_b != nullptr), "samples required");
      hrpnav::PairedSample sample;
      sample.condition_a.assign(condition_a, condition_a + n);
      sample.condition_b.assign(condition_b, condition_b + n);
      const auto r = hrpnav::wilcoxon_signed_rank(
        sample, to_alternative(alternative), to_method(method));
      *out = {r.w_statistic, r.w_plus, r.w_minus, r.p_value, r.z, r.effect_size_r,
        r.n_effective, r.method == hrpnav::StatMethod::Exact ? 1 : 0};
    });
}

hrpnav_status hrpnav_wilcoxon_csv(
  const char * csv_file, hrpnav_alternative alternative, hrpnav_method method,
  char ** out_json)
{
  return guarded(
    [&] {
      require_file(csv_file, "a CSV file is required");
      require(out_json != nullptr, "result output required");
      const auto alt = to_alternative(alternative);
      const auto r = hrpnav::wilcoxon_signed_rank(
        hrpnav::read_paired_csv(csv_file), alt, to_method(method));
      *out_json = copy_string(hrpnav::stat_result_to_json(r, alt));
    });
}

void hrpnav_session_options_default(hrpnav_session_options * options)
{
  if (options == nullptr) {
    return;
  }
  *options = hrpnav_session_options{};
  hrpnav_controller_params_default(&options->controller);
  hrpnav_sim_config_default(&options->sim);
  options->waypoint_threshold = hrpnav::kDefaultWaypointThreshold;
}

hrpnav_status hrpnav_session_create(const hrpnav_session_options * options, hrpnav_session ** out)
{
  return guarded(
    [&] {
      require(options != nullptr && out != nullptr, "session options and handle required");
      *out = new hrpnav_session(to_session_config(*options));
    });
}

void hrpnav_session_free(hrpnav_session * session)
{
  delete session;
}

hrpnav_status hrpnav_session_connect(
  hrpnav_session * session, uint64_t client, hrpnav_message_fn fn, void * user)
{
  return guarded(
    [&] {
      require(session != nullptr, "session handle required");
      deliver(session->session.connect(client), fn, user);
    });
}

hrpnav_status hrpnav_session_disconnect(
  hrpnav_session * session, uint64_t client, hrpnav_message_fn fn, void * user)
{
  return guarded(
    [&] {
      require(session != nullptr, "session handle required");
      deliver(session->session.disconnect(client), fn, user);
    });
}

hrpnav_status hrpnav_session_handle_line(
  hrpnav_session * session, uint64_t client, const char * line, hrpnav_message_fn fn,
  void * user)
{
  return guarded(
    [&] {
      require(session != nullptr && line != nullptr, "session handle and line required");
      deliver(session->session.handle_line(client, line), fn, user);
    });
}

hrpnav_status hrpnav_session_tick(
  hrpnav_session * session, hrpnav_message_fn fn, void * user, int * out_active)
{
  return guarded(
    [&] {
      require(session != nullptr, "session handle required");
      deliver(session->session.tick(), fn, user);
      if (out_active != nullptr) {
        *out_active = session->session.live_run_active() ? 1 : 0;
      }
    });
}

hrpnav_status hrpnav_server_create(
  const hrpnav_session_options * options, const char * address, uint16_t port,
  double time_scale, int handle_signals, hrpnav_server ** out)
{
  return guarded(
    [&] {
      require(options != nullptr && out != nullptr, "server options and handle required");
      hrpnav::ServerOptions so;
      if (address != nullptr) {
        so.address = address;
      }
      so.port = port;
      so.session = to_session_config(*options);
      so.time_scale = time_scale;
      so.handle_signals = handle_signals != 0;
      *out = new hrpnav_server(std::move(so));
    });
}

uint16_t hrpnav_server_port(const hrpnav_server * server)
{
  return server == nullptr ? 0 : server->server.port();
}

hrpnav_status hrpnav_server_run(hrpnav_server * server)
{
  return guarded(
    [&] {
      require(server != nullptr, "server handle required");
      server->server.run();
    });
}

void hrpnav_server_stop(hrpnav_server * server)
{
  if (server != nullptr) {
    server->server.stop();
  }
}

void hrpnav_server_free(hrpnav_server * server)
{
  delete server;
}

}  // extern "C"
