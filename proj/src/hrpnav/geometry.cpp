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

#include "hrpnav/geometry.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>

#include "hrpnav/error.hpp"

namespace hrpnav
{

double normalize_angle(double theta)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::remainder(theta, two_pi);
  if (r <= -std::numbers::pi) {
    r += two_pi;
  }
  return r;
}

Point2D apply_anchor(const AnchorTransform & t, Point2D p)
{
  const double c = std::cos(t.rotation);
  const double s = std::sin(t.rotation);
  return {c * p.x - s * p.y + t.translation.x, s * p.x + c * p.y + t.translation.y};
}

AnchorTransform invert_anchor(const AnchorTransform & t)
{
  // R^T * (-translation), rotation negated
  const double c = std::cos(t.rotation);
  const double s = std::sin(t.rotation);
  const Point2D inv_translation{
    -(c * t.translation.x + s * t.translation.y),
    -(-s * t.translation.x + c * t.translation.y)};
  return {inv_translation, -t.rotation};
}

std::string format_rfc3339(Timestamp t)
{
  const auto days = std::chrono::floor<std::chrono::days>(t);
  const std::chrono::year_month_day ymd{days};
  const std::chrono::hh_mm_ss hms{t - days};
  char buf[32];
  std::snprintf(
    buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ",
    static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
    static_cast<unsigned>(ymd.day()), static_cast<int>(hms.hours().count()),
    static_cast<int>(hms.minutes().count()), static_cast<int>(hms.seconds().count()));
  return buf;
}

Timestamp parse_rfc3339(const std::string & text)
{
  int y = 0;
  unsigned mo = 0, d = 0;
  int h = 0, mi = 0, s = 0;
  char tail = 0;
  int consumed = 0;
  if (std::sscanf(
      text.c_str(), "%4d-%2u-%2uT%2d:%2d:%2d%c%n", &y, &mo, &d, &h, &mi, &s, &tail,
      &consumed) != 7 ||
    tail != 'Z' || static_cast<size_t>(consumed) != text.size())
  {
    throw Error(ErrorCode::Parse, "invalid RFC 3339 timestamp '" + text + "'");
  }
  const std::chrono::year_month_day ymd{
    std::chrono::year{y}, std::chrono::month{mo}, std::chrono::day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) {
    throw Error(ErrorCode::Parse, "out-of-range RFC 3339 timestamp '" + text + "'");
  }
  return std::chrono::sys_days{ymd} + std::chrono::hours{h} + std::chrono::minutes{mi} +
         std::chrono::seconds{s};
}

Timestamp now_seconds()
{
  return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

void validate_hrp(const Hrp & hrp)
{
  if (hrp.id.empty()) {
    throw Error(ErrorCode::InvalidArgument, "path id must not be empty");
  }
  if (hrp.points.empty()) {
    throw Error(ErrorCode::InvalidArgument, "path '" + hrp.id + "' has no points");
  }
  for (size_t i = 0; i < hrp.points.size(); ++i) {
    if (!is_finite(hrp.points[i])) {
      throw Error(ErrorCode::InvalidArgument, "path '" + hrp.id + "' has a non-finite point");
    }
    if (i > 0 && hrp.points[i] == hrp.points[i - 1]) {
      throw Error(
        ErrorCode::InvalidArgument, "path '" + hrp.id + "' repeats a consecutive point");
    }
  }
}

std::string generate_path_id()
{
  thread_local std::mt19937_64 rng{std::random_device{}()};
  char buf[24];
  std::snprintf(
    buf, sizeof(buf), "hrp-%016llx", static_cast<unsigned long long>(rng()));
  return buf;
}

DrawingSession::DrawingSession(double threshold)
: threshold_(threshold)
{
  if (!(threshold > 0.0) || !std::isfinite(threshold)) {
    throw Error(ErrorCode::InvalidArgument, "waypoint threshold must be positive");
  }
}

void DrawingSession::pinch_down()
{
  pinch_active_ = true;
}

void DrawingSession::pinch_up()
{
  pinch_active_ = false;
}

bool DrawingSession::feed(Point2D cursor)
{
  if (!is_finite(cursor)) {
    throw Error(ErrorCode::InvalidArgument, "cursor coordinates must be finite");
  }
  if (!pinch_active_) {
    throw Error(ErrorCode::ProtocolViolation, "cursor fed without an active pinch");
  }
  if (committed_.empty() ||
    distance(cursor, committed_.back()) > threshold_ + kThresholdTieTolerance)
  {
    committed_.push_back(cursor);
    return true;
  }
  return false;
}

DrawingSession session_feed_cursor(DrawingSession session, Point2D cursor)
{
  session.feed(cursor);
  return session;
}

FinishedPath session_finish(const DrawingSession & session, std::string id, Timestamp created_at)
{
  if (session.pinch_active()) {
    throw Error(ErrorCode::ProtocolViolation, "cannot finish a path while the pinch is held");
  }
  if (session.committed().size() < 2) {
    throw Error(ErrorCode::PathTooShort, "a path needs at least two waypoints");
  }
  Hrp hrp{std::move(id), session.committed(), created_at};
  const Point2D goal = hrp.points.back();
  return {std::move(hrp), goal};
}

FinishedPath session_finish(const DrawingSession & session)
{
  return session_finish(session, generate_path_id(), now_seconds());
}

double polyline_length(std::span<const Point2D> points)
{
  double total = 0.0;
  for (size_t i = 1; i < points.size(); ++i) {
    total += distance(points[i - 1], points[i]);
  }
  return total;
}

std::vector<Point2D> resample_uniform(std::span<const Point2D> points, double step)
{
  if (points.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "resampling needs at least two points");
  }
  if (!(step > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "resampling step must be positive");
  }
  const double total = polyline_length(points);
  // Guards against a duplicate final sample when total is a multiple of step.
  const double end_slack = 1e-9 * std::max(1.0, total);

  std::vector<Point2D> out;
  size_t seg = 0;
  double seg_start = 0.0;  // arc length at points[seg]
  for (size_t k = 0;; ++k) {
    const double s = static_cast<double>(k) * step;
    if (s >= total - end_slack) {
      break;
    }
    double seg_len = distance(points[seg], points[seg + 1]);
    while (seg + 2 < points.size() && s > seg_start + seg_len) {
      seg_start += seg_len;
      ++seg;
      seg_len = distance(points[seg], points[seg + 1]);
    }
    const double u = seg_len > 0.0 ? std::clamp((s - seg_start) / seg_len, 0.0, 1.0) : 0.0;
    out.push_back(points[seg] + u * (points[seg + 1] - points[seg]));
  }
  out.push_back(points.back());
  return out;
}

double point_segment_distance(Point2D p, Point2D a, Point2D b)
{
  const Point2D ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) {
    return distance(p, a);
  }
  const double u = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + u * ab);
}

double distance_to_polyline(Point2D p, std::span<const Point2D> points)
{
  if (points.empty()) {
    return std::numeric_limits<double>::infinity();
  }
  if (points.size() == 1) {
    return distance(p, points.front());
  }
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < points.size(); ++i) {
    best = std::min(best, point_segment_distance(p, points[i - 1], points[i]));
  }
  return best;
}

}  // namespace hrpnav
