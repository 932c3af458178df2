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

#ifndef HRPNAV__PATH_STORE_HPP_
#define HRPNAV__PATH_STORE_HPP_

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hrpnav/geometry.hpp"

namespace hrpnav
{

constexpr int kDatabaseVersion = 1;

struct PathDatabase
{
  int version{kDatabaseVersion};
  AnchorTransform anchor;
  std::vector<Hrp> paths;

  friend bool operator==(const PathDatabase &, const PathDatabase &) = default;
};

/// Compact single-line JSON in the fixed key order version, anchor, paths.
std::string serialize(const PathDatabase & db);
PathDatabase deserialize(std::string_view text);

/// A missing file yields an empty database with the identity anchor.
PathDatabase load(const std::filesystem::path & file);

/// Test hook for interrupting an atomic write at a given stage.
enum class CrashPoint
{
  None,
  DuringTempWrite,
  BeforeRename,
};

class SimulatedCrash : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Writes to a sibling temp file, flushes it, then renames over `file`.
void write_atomic(
  const std::filesystem::path & file, std::string_view content,
  CrashPoint crash = CrashPoint::None);

void save(
  const std::filesystem::path & file, const PathDatabase & db,
  CrashPoint crash = CrashPoint::None);

PathDatabase add(PathDatabase db, Hrp hrp);
PathDatabase clear(PathDatabase db);

struct SendPayload
{
  std::string source_id;
  std::vector<Point2D> points;  // map frame
};

/// Selects the path with `id`, or the most recently added one when no id is given,
/// and moves its points into the map frame.
SendPayload fetch_for_send(const PathDatabase & db, const std::optional<std::string> & id);

/// File-backed database. Every mutation reloads the file, applies the change and
/// overwrites the file before the in-memory copy is updated.
class PathStore
{
public:
  explicit PathStore(std::filesystem::path file);

  const PathDatabase & database() const {return db_;}
  const std::filesystem::path & file() const {return file_;}

  const Hrp & add(Hrp hrp);
  void clear();
  SendPayload fetch_for_send(const std::optional<std::string> & id);
  void set_anchor(const AnchorTransform & anchor);

  void inject_crash(CrashPoint point) {crash_ = point;}

private:
  PathDatabase reload() const;
  void commit(PathDatabase next);

  std::filesystem::path file_;
  PathDatabase db_;
  CrashPoint crash_{CrashPoint::None};
};

}  // namespace hrpnav

#endif  // HRPNAV__PATH_STORE_HPP_
