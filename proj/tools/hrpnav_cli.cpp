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


#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hrpnav.h"

namespace
{

enum ExitCode
{
  kExitOk = 0,
  kExitOther = 1,
  kExitBadArgs = 2,
  kExitIo = 3,
  kExitProtocol = 4,
  kExitNotFound = 5,
  kExitPortInUse = 6,
};

int exit_code_for(hrpnav_status status)
{
  switch (status) {
    case HRPNAV_OK:
      return kExitOk;
    case HRPNAV_E_INVALID_ARGUMENT:
    case HRPNAV_E_DEGENERATE_SAMPLE:
      return kExitBadArgs;
    case HRPNAV_E_IO:
      return kExitIo;
    case HRPNAV_E_PARSE:
    case HRPNAV_E_UNSUPPORTED_VERSION:
    case HRPNAV_E_MALFORMED:
    case HRPNAV_E_PROTOCOL_VIOLATION:
    case HRPNAV_E_GEOMETRY_MISMATCH:
      return kExitProtocol;
    case HRPNAV_E_NOT_FOUND:
    case HRPNAV_E_NOTHING_TO_SEND:
      return kExitNotFound;
    case HRPNAV_E_PORT_IN_USE:
      return kExitPortInUse;
    default:
      return kExitOther;
  }
}

int report(hrpnav_status status)
{
  if (status != HRPNAV_OK) {
    std::fprintf(
      stderr, "hrpnav: %s: %s\n", hrpnav_status_name(status), hrpnav_last_error());
  }
  return exit_code_for(status);
}

// Prints and frees a library-owned string.
void emit(char * text)
{
  if (text != nullptr) {
    std::cout << text << "\n";
    hrpnav_string_free(text);
  }
}

const char * c_str_or_null(const std::string & s)
{
  return s.empty() ? nullptr : s.c_str();
}

struct ControlFlags
{
  hrpnav_controller_params controller{};
  hrpnav_sim_config sim{};

  ControlFlags()
  {
    hrpnav_controller_params_default(&controller);
    hrpnav_sim_config_default(&sim);
  }

  void add_to(CLI::App * cmd)
  {
    cmd->add_option("--dt", sim.dt, "Control period in seconds")->capture_default_str();
    cmd->add_option("--timeout", sim.timeout, "Simulated time limit in seconds")
    ->capture_default_str();
    cmd->add_option("--lookahead", controller.lookahead, "Pure pursuit lookahead in meters")
    ->capture_default_str();
    cmd->add_option("--speed", controller.cruise_speed, "Cruise speed in m/s")
    ->capture_default_str();
    cmd->add_option("--goal-tolerance", controller.goal_xy_tolerance, "Goal radius in meters")
    ->capture_default_str();
  }
};

// Loads the optional map; returns nonzero exit code on failure.
int load_map(const std::string & file, hrpnav_map ** out)
{
  *out = nullptr;
  if (file.empty()) {
    return kExitOk;
  }
  return report(hrpnav_map_load(file.c_str(), out));
}

hrpnav_alternative parse_alternative(const std::string & s)
{
  if (s == "greater") {
    return HRPNAV_GREATER;
  }
  if (s == "less") {
    return HRPNAV_LESS;
  }
  return HRPNAV_TWO_SIDED;
}

hrpnav_method parse_method(const std::string & s)
{
  if (s == "exact") {
    return HRPNAV_METHOD_EXACT;
  }
  if (s == "normal") {
    return HRPNAV_METHOD_NORMAL;
  }
  return HRPNAV_METHOD_AUTO;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Hand-drawn reference path navigation: session server and offline tools"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(hrpnav_version()));

  // serve
  auto * serve = app.add_subcommand("serve", "Run the drawing/navigation session service");
  std::string serve_map, serve_db, serve_scenario, serve_address{"127.0.0.1"};
  int serve_port = 8765;
  double time_scale = 1.0;
  double threshold = 0.2;
  ControlFlags serve_flags;
  serve->add_option("--db", serve_db, "Path database file")->required();
  serve->add_option("--map", serve_map, "Map metadata file");
  serve->add_option("--scenario", serve_scenario, "Scenario file for result metrics");
  serve->add_option("--port", serve_port, "TCP port (0 picks one)")
  ->check(CLI::Range(0, 65535))->capture_default_str();
  serve->add_option("--address", serve_address, "Bind address")->capture_default_str();
  serve->add_option("--time-scale", time_scale, "Simulated seconds per wall second")
  ->check(CLI::PositiveNumber)->capture_default_str();
  serve->add_option("--threshold", threshold, "Waypoint spacing threshold in meters")
  ->capture_default_str();
  serve_flags.add_to(serve);

  // replay
  auto * replay = app.add_subcommand("replay", "Follow a stored path headlessly");
  std::string replay_db, replay_path_id, replay_map, replay_scenario, replay_out;
  std::vector<double> replay_start;
  ControlFlags replay_flags;
  replay->add_option("--db", replay_db, "Path database file")->required();
  replay->add_option("--path-id", replay_path_id, "Path to follow (default: latest)");
  replay->add_option("--map", replay_map, "Map metadata file");
  replay->add_option("--scenario", replay_scenario, "Scenario file for GT metrics");
  replay->add_option("--out", replay_out, "Trajectory CSV output");
  replay->add_option("--start", replay_start, "Start pose x y theta")->expected(3);
  replay_flags.add_to(replay);

  // eval
  auto * eval = app.add_subcommand("eval", "Score stored paths against a scenario GT");
  std::string eval_scenario, eval_db, eval_path_id, eval_out;
  bool eval_all = false;
  double resolution = 0.05;
  eval->add_option("--scenario", eval_scenario, "Scenario file")->required();
  eval->add_option("--db", eval_db, "Path database file")->required();
  eval->add_option("--path-id", eval_path_id, "Path to score (default: latest)");
  eval->add_flag("--all", eval_all, "Score every stored path");
  eval->add_option("--resolution", resolution, "Grid cell size in meters")
  ->capture_default_str();
  eval->add_option("--out", eval_out, "Report file (.json, otherwise metric,value CSV)");

  // scenario
  auto * scenario = app.add_subcommand("scenario", "Write a predefined task scenario");
  std::string stage, scenario_out;
  scenario->add_option("--stage", stage, "Stage")->required()
  ->check(CLI::IsMember({"A", "B", "practice"}));
  scenario->add_option("--out", scenario_out, "Scenario file (default: stdout)");

  // stats
  auto * stats = app.add_subcommand("stats", "Wilcoxon signed-rank test on paired data");
  std::string csv, alternative{"two-sided"}, method{"auto"}, stats_out;
  stats->add_option("csv", csv, "CSV of participant,condition_a,condition_b")->required();
  stats->add_option("--alternative", alternative, "Alternative hypothesis")
  ->check(CLI::IsMember({"two-sided", "greater", "less"}))->capture_default_str();
  stats->add_option("--method", method, "Null distribution")
  ->check(CLI::IsMember({"auto", "exact", "normal"}))->capture_default_str();
  stats->add_option("--out", stats_out, "Result JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp & e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion & e) {
    return app.exit(e);
  } catch (const CLI::ParseError & e) {
    app.exit(e);
    return kExitBadArgs;
  }

  if (serve->parsed()) {
    hrpnav_map * map = nullptr;
    if (int rc = load_map(serve_map, &map)) {
      return rc;
    }
    hrpnav_session_options options;
    hrpnav_session_options_default(&options);
    options.db_file = serve_db.c_str();
    options.map = map;
    options.scenario_file = c_str_or_null(serve_scenario);
    options.controller = serve_flags.controller;
    options.sim = serve_flags.sim;
    options.waypoint_threshold = threshold;
    hrpnav_server * server = nullptr;
    const hrpnav_status st = hrpnav_server_create(
      &options, serve_address.c_str(), static_cast<uint16_t>(serve_port), time_scale, 1,
      &server);
    hrpnav_map_free(map);
    if (st != HRPNAV_OK) {
      return report(st);
    }
    std::printf("listening on %s:%u\n", serve_address.c_str(), hrpnav_server_port(server));
    std::fflush(stdout);
    const hrpnav_status run = hrpnav_server_run(server);
    hrpnav_server_free(server);
    return report(run);
  }

  if (replay->parsed()) {
    hrpnav_map * map = nullptr;
    if (int rc = load_map(replay_map, &map)) {
      return rc;
    }
    hrpnav_replay_options options;
    hrpnav_replay_options_default(&options);
    options.db_file = replay_db.c_str();
    options.path_id = c_str_or_null(replay_path_id);
    options.map = map;
    options.scenario_file = c_str_or_null(replay_scenario);
    options.out_csv = c_str_or_null(replay_out);
    options.controller = replay_flags.controller;
    options.sim = replay_flags.sim;
    if (replay_start.size() == 3) {
      options.has_start = 1;
      options.start = {replay_start[0], replay_start[1], replay_start[2]};
    }
    char * summary = nullptr;
    const hrpnav_status st = hrpnav_replay(&options, &summary);
    hrpnav_map_free(map);
    emit(summary);
    return report(st);
  }

  if (eval->parsed()) {
    hrpnav_eval_options options;
    hrpnav_eval_options_default(&options);
    options.scenario_file = eval_scenario.c_str();
    options.db_file = eval_db.c_str();
    options.path_id = c_str_or_null(eval_path_id);
    options.all_paths = eval_all ? 1 : 0;
    options.resolution = resolution;
    options.out_file = c_str_or_null(eval_out);
    char * doc = nullptr;
    const hrpnav_status st = hrpnav_eval(&options, &doc);
    emit(doc);
    return report(st);
  }

  if (scenario->parsed()) {
    if (!scenario_out.empty()) {
      return report(hrpnav_scenario_write_stage(stage.c_str(), scenario_out.c_str()));
    }
    char * doc = nullptr;
    const hrpnav_status st = hrpnav_scenario_stage_json(stage.c_str(), &doc);
    emit(doc);
    return report(st);
  }

  if (stats->parsed()) {
    char * doc = nullptr;
    const hrpnav_status st = hrpnav_wilcoxon_csv(
      csv.c_str(), parse_alternative(alternative), parse_method(method), &doc);
    if (st == HRPNAV_OK && !stats_out.empty()) {
      FILE * f = std::fopen(stats_out.c_str(), "w");
      if (f == nullptr) {
        hrpnav_string_free(doc);
        std::fprintf(stderr, "hrpnav: io_error: cannot write '%s'\n", stats_out.c_str());
        return kExitIo;
      }
      std::fprintf(f, "%s\n", doc);
      std::fclose(f);
    }
    emit(doc);
    return report(st);
  }
  return kExitBadArgs;
}
