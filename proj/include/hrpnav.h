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

#ifndef HRPNAV_H_
#define HRPNAV_H_

#include <stddef.h>
#include <stdint.h>

#if defined(HRPNAV_BUILDING_LIBRARY)
#define HRPNAV_API __attribute__((visibility("default")))
#else
#define HRPNAV_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/*
 * Every fallible call returns a status. On failure a message describing the
 * last error of the calling thread is available from hrpnav_last_error().
 * Strings and arrays handed out by the library are released with
 * hrpnav_string_free() / hrpnav_points_free().
 */
typedef enum hrpnav_status
{
  HRPNAV_OK = 0,
  HRPNAV_E_INVALID_ARGUMENT = 1,
  HRPNAV_E_PATH_TOO_SHORT = 2,
  HRPNAV_E_DEGENERATE_PATH = 3,
  HRPNAV_E_IO = 4,
  HRPNAV_E_PARSE = 5,
  HRPNAV_E_UNSUPPORTED_VERSION = 6,
  HRPNAV_E_CONFLICT = 7,
  HRPNAV_E_NOTHING_TO_SEND = 8,
  HRPNAV_E_NOT_FOUND = 9,
  HRPNAV_E_NO_PATH_AVAILABLE = 10,
  HRPNAV_E_INVALID_START = 11,
  HRPNAV_E_OUT_OF_BOUNDS = 12,
  HRPNAV_E_GEOMETRY_MISMATCH = 13,
  HRPNAV_E_DEGENERATE_SAMPLE = 14,
  HRPNAV_E_PROTOCOL_VIOLATION = 15,
  HRPNAV_E_MALFORMED = 16,
  HRPNAV_E_NOT_AUTHORITATIVE = 17,
  HRPNAV_E_PORT_IN_USE = 18,
  HRPNAV_E_INTERNAL = 99,
} hrpnav_status;

HRPNAV_API const char * hrpnav_version(void);
/* snake_case name, e.g. "io_error". */
HRPNAV_API const char * hrpnav_status_name(hrpnav_status status);
HRPNAV_API const char * hrpnav_last_error(void);
HRPNAV_API void hrpnav_string_free(char * s);

typedef struct hrpnav_point
{
  double x;
  double y;
} hrpnav_point;

typedef struct hrpnav_pose
{
  double x;
  double y;
  double theta;
} hrpnav_pose;

HRPNAV_API void hrpnav_points_free(hrpnav_point * points);

typedef struct hrpnav_controller_params
{
  double lookahead;
  double cruise_speed;
  double goal_xy_tolerance;
  double slowdown_distance;
  double max_angular;
} hrpnav_controller_params;

typedef struct hrpnav_sim_config
{
  double dt;
  double timeout;
} hrpnav_sim_config;

HRPNAV_API void hrpnav_controller_params_default(hrpnav_controller_params * params);
HRPNAV_API void hrpnav_sim_config_default(hrpnav_sim_config * config);

/* ---- path store ---- */

typedef struct hrpnav_store hrpnav_store;

/* A missing file opens as an empty store. */
HRPNAV_API hrpnav_status hrpnav_store_open(const char * file, hrpnav_store ** out);
HRPNAV_API void hrpnav_store_close(hrpnav_store * store);

/* Adds an HRP with a fresh id and the current time. out_id may be NULL. */
HRPNAV_API hrpnav_status hrpnav_store_add(
  hrpnav_store * store, const hrpnav_point * points, size_t count, char ** out_id);
HRPNAV_API hrpnav_status hrpnav_store_clear(hrpnav_store * store);
HRPNAV_API hrpnav_status hrpnav_store_set_anchor(
  hrpnav_store * store, double tx, double ty, double rotation);
HRPNAV_API hrpnav_status hrpnav_store_count(const hrpnav_store * store, size_t * out);

/* Map-frame points of the selected HRP; id NULL selects the latest one. */
HRPNAV_API hrpnav_status hrpnav_store_fetch(
  hrpnav_store * store, const char * id, hrpnav_point ** out_points, size_t * out_count,
  char ** out_source_id);

/* The database document exactly as stored on disk. */
HRPNAV_API hrpnav_status hrpnav_store_to_json(const hrpnav_store * store, char ** out_json);

/* ---- occupancy map ---- */

typedef struct hrpnav_map hrpnav_map;

HRPNAV_API hrpnav_status hrpnav_map_load(const char * metadata_file, hrpnav_map ** out);
HRPNAV_API hrpnav_status hrpnav_map_create_empty(
  double resolution, int64_t width, int64_t height, double origin_x, double origin_y,
  hrpnav_map ** out);
HRPNAV_API hrpnav_status hrpnav_map_set_occupied(
  hrpnav_map * map, int64_t i, int64_t j, int occupied);
HRPNAV_API hrpnav_status hrpnav_map_save(const hrpnav_map * map, const char * metadata_file);
HRPNAV_API void hrpnav_map_free(hrpnav_map * map);

/* ---- scenarios ---- */

/* stage: "A", "B" or "practice". */
HRPNAV_API hrpnav_status hrpnav_scenario_stage_json(const char * stage, char ** out_json);
HRPNAV_API hrpnav_status hrpnav_scenario_write_stage(const char * stage, const char * file);

/* ---- headless replay and evaluation ---- */

typedef struct hrpnav_replay_options
{
  const char * db_file;
  const char * path_id;        /* NULL: latest HRP */
  const hrpnav_map * map;      /* NULL: empty grid around the path / scenario */
  const char * scenario_file;  /* NULL: no GT metrics */
  const char * out_csv;        /* NULL: trajectory not written */
  int has_start;               /* 0: start on the first path pose */
  hrpnav_pose start;
  hrpnav_controller_params controller;
  hrpnav_sim_config sim;
} hrpnav_replay_options;

HRPNAV_API void hrpnav_replay_options_default(hrpnav_replay_options * options);

/*
 * Follows a stored HRP closed-loop and writes the trajectory as CSV
 * (t,x,y,theta,v,omega). The summary JSON holds the outcome, step count,
 * duration, final goal distance, cross-track errors and, with a scenario,
 * trajectory_pct_within_gt.
 */
HRPNAV_API hrpnav_status hrpnav_replay(
  const hrpnav_replay_options * options, char ** out_summary_json);

typedef struct hrpnav_eval_options
{
  const char * scenario_file;
  const char * db_file;
  const char * path_id;  /* NULL: latest HRP */
  int all_paths;         /* nonzero: evaluate every HRP, path_id ignored */
  double resolution;     /* grid cell size in meters */
  const char * out_file; /* NULL: none; ".json" writes JSON, anything else metric,value CSV */
} hrpnav_eval_options;

HRPNAV_API void hrpnav_eval_options_default(hrpnav_eval_options * options);
HRPNAV_API hrpnav_status hrpnav_eval(const hrpnav_eval_options * options, char ** out_json);

/* ---- statistics ---- */

typedef enum hrpnav_alternative
{
  HRPNAV_TWO_SIDED = 0,
  HRPNAV_GREATER = 1,
  HRPNAV_LESS = 2,
} hrpnav_alternative;

typedef enum hrpnav_method
{
  HRPNAV_METHOD_AUTO = 0,
  HRPNAV_METHOD_EXACT = 1,
  HRPNAV_METHOD_NORMAL = 2,
} hrpnav_method;

typedef struct hrpnav_stat_result
{
  double w_statistic;
  double w_plus;
  double w_minus;
  double p_value;
  double z;
  double effect_size_r;
  int n_effective;
  int exact;  /* 1 exact null distribution, 0 normal approximation */
} hrpnav_stat_result;

HRPNAV_API hrpnav_status hrpnav_wilcoxon(
  const double * condition_a, const double * condition_b, size_t n,
  hrpnav_alternative alternative, hrpnav_method method, hrpnav_stat_result * out);

/* CSV rows participant,condition_a,condition_b; an optional header is skipped. */
HRPNAV_API hrpnav_status hrpnav_wilcoxon_csv(
  const char * csv_file, hrpnav_alternative alternative, hrpnav_method method,
  char ** out_json);

/* ---- session ---- */

typedef struct hrpnav_session_options
{
  const char * db_file;
  const hrpnav_map * map;      /* NULL: grid around the scenario, else 20 m x 20 m empty */
  const char * scenario_file;  /* NULL: results carry no GT metrics */
  hrpnav_controller_params controller;
  hrpnav_sim_config sim;
  double waypoint_threshold;
  int has_initial_pose;
  hrpnav_pose initial_pose;
} hrpnav_session_options;

HRPNAV_API void hrpnav_session_options_default(hrpnav_session_options * options);

typedef struct hrpnav_session hrpnav_session;

/* Receives each outgoing protocol line; to is the client id or -1 for broadcast. */
typedef void (* hrpnav_message_fn)(void * user, int64_t to, const char * line);

HRPNAV_API hrpnav_status hrpnav_session_create(
  const hrpnav_session_options * options, hrpnav_session ** out);
HRPNAV_API void hrpnav_session_free(hrpnav_session * session);
HRPNAV_API hrpnav_status hrpnav_session_connect(
  hrpnav_session * session, uint64_t client, hrpnav_message_fn fn, void * user);
HRPNAV_API hrpnav_status hrpnav_session_disconnect(
  hrpnav_session * session, uint64_t client, hrpnav_message_fn fn, void * user);
HRPNAV_API hrpnav_status hrpnav_session_handle_line(
  hrpnav_session * session, uint64_t client, const char * line, hrpnav_message_fn fn,
  void * user);
/* Advances the live run one period; out_active reports whether it is still running. */
HRPNAV_API hrpnav_status hrpnav_session_tick(
  hrpnav_session * session, hrpnav_message_fn fn, void * user, int * out_active);

/* ---- network service ---- */

typedef struct hrpnav_server hrpnav_server;

/* Binds immediately; port 0 picks an ephemeral port. */
HRPNAV_API hrpnav_status hrpnav_server_create(
  const hrpnav_session_options * options, const char * address, uint16_t port,
  double time_scale, int handle_signals, hrpnav_server ** out);
HRPNAV_API uint16_t hrpnav_server_port(const hrpnav_server * server);
/* Blocks until hrpnav_server_stop() or, with signal handling, SIGINT/SIGTERM. */
HRPNAV_API hrpnav_status hrpnav_server_run(hrpnav_server * server);
HRPNAV_API void hrpnav_server_stop(hrpnav_server * server);
HRPNAV_API void hrpnav_server_free(hrpnav_server * server);

#ifdef __cplusplus
}
#endif

#endif  /* HRPNAV_H_ */
