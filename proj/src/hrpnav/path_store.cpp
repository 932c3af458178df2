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

#include "hrpnav/path_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

#include "hrpnav/error.hpp"

namespace hrpnav
{

namespace
{

using ordered_json = nlohmann::ordered_json;

std::string describe_position(std::string_view text, size_t byte)
{
  size_t line = 1;
  size_t column = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

double require_number(const ordered_json & j, const char * what)
{
  if (!j.is_number()) {
    throw Error(ErrorCode::Parse, std::string("expected a number for ") + what);
  }
  return j.get<double>();
}

const ordered_json & require_key(const ordered_json & obj, const char * key)
{
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(ErrorCode::Parse, std::string("missing key '") + key + "'");
  }
  return *it;
}

Hrp parse_path(const ordered_json & j)
{
  if (!j.is_object()) {
    throw Error(ErrorCode::Parse, "path entry must be an object");
  }
  const auto & id = require_key(j, "id");
  const auto & created = require_key(j, "created_at");
  const auto & points = require_key(j, "points");
  if (!id.is_string() || !created.is_string() || !points.is_array()) {
    throw Error(ErrorCode::Parse, "path entry has mistyped fields");
  }
  Hrp hrp;
  hrp.id = id.get<std::string>();
  hrp.created_at = parse_rfc3339(created.get<std::string>());
  hrp.points.reserve(points.size());
  for (const auto & p : points) {
    if (!p.is_array() || p.size() != 2) {
      throw Error(ErrorCode::Parse, "path point must be an [x, y] pair");
    }
    hrp.points.push_back({require_number(p[0], "x"), require_number(p[1], "y")});
  }
  try {
    validate_hrp(hrp);
  } catch (const Error & e) {
    throw Error(ErrorCode::Parse, e.what());
  }
  return hrp;
}

void throw_errno(const std::string & what, const std::filesystem::path & file)
{
  throw Error(ErrorCode::Io, what + " '" + file.string() + "': " + std::strerror(errno));
}

}  // namespace

std::string serialize(const PathDatabase & db)
{
  ordered_json j;
  j["version"] = db.version;
  j["anchor"] = {
    {"x", db.anchor.translation.x},
    {"y", db.anchor.translation.y},
    {"theta", db.anchor.rotation}};
  auto paths = ordered_json::array();
  for (const auto & hrp : db.paths) {
    auto points = ordered_json::array();
    for (const auto & p : hrp.points) {
      points.push_back({p.x, p.y});
    }
    paths.push_back(
      {{"id", hrp.id}, {"created_at", format_rfc3339(hrp.created_at)},
        {"points", std::move(points)}});
  }
  j["paths"] = std::move(paths);
  return j.dump();
}

PathDatabase deserialize(std::string_view text)
{
  ordered_json j;
  try {
    j = ordered_json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error & e) {
    throw Error(
      ErrorCode::Parse,
      "malformed path database at " + describe_position(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  if (!j.is_object()) {
    throw Error(ErrorCode::Parse, "path database must be a JSON object");
  }
  const auto & version = require_key(j, "version");
  if (!version.is_number_integer()) {
    throw Error(ErrorCode::Parse, "version must be an integer");
  }
  if (version.get<int>() != kDatabaseVersion) {
    throw Error(
      ErrorCode::UnsupportedVersion,
      "unsupported path database version " + std::to_string(version.get<int>()));
  }
  PathDatabase db;
  const auto & anchor = require_key(j, "anchor");
  if (!anchor.is_object()) {
    throw Error(ErrorCode::Parse, "anchor must be an object");
  }
  db.anchor.translation.x = require_number(require_key(anchor, "x"), "anchor.x");
  db.anchor.translation.y = require_number(require_key(anchor, "y"), "anchor.y");
  db.anchor.rotation = require_number(require_key(anchor, "theta"), "anchor.theta");

  const auto & paths = require_key(j, "paths");
  if (!paths.is_array()) {
    throw Error(ErrorCode::Parse, "paths must be an array");
  }
  std::unordered_set<std::string> seen;
  for (const auto & entry : paths) {
    Hrp hrp = parse_path(entry);
    if (!seen.insert(hrp.id).second) {
      throw Error(ErrorCode::Parse, "duplicate path id '" + hrp.id + "'");
    }
    db.paths.push_back(std::move(hrp));
  }
  return db;
}

PathDatabase load(const std::filesystem::path & file)
{
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(file)) {
      return PathDatabase{};
    }
    throw Error(ErrorCode::Io, "cannot open path database '" + file.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

void write_atomic(
  const std::filesystem::path & file, std::string_view content, CrashPoint crash)
{
  std::filesystem::path tmp = file;
  tmp += ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) {
    throw_errno("cannot create", tmp);
  }
  size_t to_write = content.size();
  if (crash == CrashPoint::DuringTempWrite) {
    to_write /= 2;
  }
  size_t written = 0;
  while (written < to_write) {
    const ssize_t n = ::write(fd, content.data() + written, to_write - written);
    if (n < 0) {
      if (errno == EINTR) {
        continue;
      }
      ::close(fd);
      throw_errno("cannot write", tmp);
    }
    written += static_cast<size_t>(n);
  }
  if (crash == CrashPoint::DuringTempWrite) {
    ::close(fd);
    throw SimulatedCrash("simulated crash while writing " + tmp.string());
  }
  if (::fsync(fd) != 0) {
    ::close(fd);
    throw_errno("cannot flush", tmp);
  }
  ::close(fd);
  if (crash == CrashPoint::BeforeRename) {
    throw SimulatedCrash("simulated crash before renaming " + tmp.string());
  }
  if (::rename(tmp.c_str(), file.c_str()) != 0) {
    throw_errno("cannot replace", file);
  }
}

void save(const std::filesystem::path & file, const PathDatabase & db, CrashPoint crash)
{
  write_atomic(file, serialize(db), crash);
}

PathDatabase add(PathDatabase db, Hrp hrp)
{
  validate_hrp(hrp);
  const bool duplicate = std::any_of(
    db.paths.begin(), db.paths.end(), [&](const Hrp & p) {return p.id == hrp.id;});
  if (duplicate) {
    throw Error(ErrorCode::Conflict, "path id '" + hrp.id + "' already exists");
  }
  db.paths.push_back(std::move(hrp));
  return db;
}

PathDatabase clear(PathDatabase db)
{
  db.paths.clear();
  return db;
}

SendPayload fetch_for_send(const PathDatabase & db, const std::optional<std::string> & id)
{
  if (db.paths.empty()) {
    throw Error(ErrorCode::NothingToSend, "the path database is empty");
  }
  const Hrp * selected = &db.paths.back();
  if (id) {
    auto it = std::find_if(
      db.paths.begin(), db.paths.end(), [&](const Hrp & p) {return p.id == *id;});
    if (it == db.paths.end()) {
      throw Error(ErrorCode::NotFound, "no path with id '" + *id + "'");
    }
    selected = &*it;
  }
  SendPayload out;
  out.source_id = selected->id;
  out.points.reserve(selected->points.size());
  for (const auto & p : selected->points) {
    out.points.push_back(apply_anchor(db.anchor, p));
  }
  return out;
}

PathStore::PathStore(std::filesystem::path file)
: file_(std::move(file)), db_(load(file_))
{
}

PathDatabase PathStore::reload() const
{
  if (!std::filesystem::exists(file_)) {
    PathDatabase empty;
    empty.anchor = db_.anchor;
    return empty;
  }
  return load(file_);
}

void PathStore::commit(PathDatabase next)
{
  save(file_, next, crash_);
  db_ = std::move(next);
}

const Hrp & PathStore::add(Hrp hrp)
{
  commit(hrpnav::add(reload(), std::move(hrp)));
  return db_.paths.back();
}

void PathStore::clear()
{
  commit(hrpnav::clear(reload()));
}

SendPayload PathStore::fetch_for_send(const std::optional<std::string> & id)
{
  db_ = reload();
  return hrpnav::fetch_for_send(db_, id);
}

void PathStore::set_anchor(const AnchorTransform & anchor)
{
  PathDatabase next = reload();
  next.anchor = anchor;
  commit(std::move(next));
}

}  // namespace hrpnav
