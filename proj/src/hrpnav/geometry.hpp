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

#ifndef HRPNAV__GEOMETRY_HPP_
#define HRPNAV__GEOMETRY_HPP_

#include <chrono>
#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace hrpnav
{

/// Planar point in meters. The frame (anchor or map) is implied by context.
struct Point2D
{
  double x{0.0};
  double y{0.0};

  friend bool operator==(const Point2D &, const Point2D &) = default;
};

inline Point2D operator+(Point2D a, Point2D b) {return {a.x + b.x, a.y + b.y};}
inline Point2D operator-(Point2D a, Point2D b) {return {a.x - b.x, a.y - b.y};}
inline Point2D operator*(double s, Point2D p) {return {s * p.x, s * p.y};}

inline double dot(Point2D a, Point2D b) {return a.x * b.x + a.y * b.y;}
inline double norm(Point2D p) {return std::hypot(p.x, p.y);}
inline double distance(Point2D a, Point2D b) {return norm(a - b);}
inline bool is_finite(Point2D p) {return std::isfinite(p.x) && std::isfinite(p.y);}

/// Wraps an angle into (-pi, pi].
double normalize_angle(double theta);

struct Pose2D
{
  Point2D position;
  double theta{0.0};

  Pose2D() = default;
  Pose2D(Point2D p, double heading)
  : position(p), theta(normalize_angle(heading)) {}
  Pose2D(double x, double y, double heading)
  : Pose2D(Point2D{x, y}, heading) {}

  friend bool operator==(const Pose2D &, const Pose2D &) = default;
};

/// Rigid 2D transform from the drawing (anchor) frame into the map frame.
struct AnchorTransform
{
  Point2D translation;
  double rotation{0.0};

  friend bool operator==(const AnchorTransform &, const AnchorTransform &) = default;
};

Point2D apply_anchor(const AnchorTransform & t, Point2D p);
AnchorTransform invert_anchor(const AnchorTransform & t);

using Timestamp = std::chrono::sys_seconds;

/// RFC 3339 UTC, second precision: "2026-10-16T07:46:00Z".
std::string format_rfc3339(Timestamp t);
Timestamp parse_rfc3339(const std::string & text);
Timestamp now_seconds();

/// A hand-drawn reference path: an identified waypoint sequence in the anchor frame.
struct Hrp
{
  std::string id;
  std::vector<Point2D> points;
  Timestamp created_at{};

  friend bool operator==(const Hrp &, const Hrp &) = default;
};

/// Throws InvalidArgument unless the path is non-empty, finite and free of
/// consecutive duplicates.
void validate_hrp(const Hrp & hrp);

std::string generate_path_id();

constexpr double kDefaultWaypointThreshold = 0.2;

// Distances within this margin of the threshold count as ties. Cursor streams
// quantized to decimal steps otherwise land a few ulps above the threshold.
constexpr double kThresholdTieTolerance = 1e-12;

/// Accumulates waypoints from a cursor stream while the pinch is held.
class DrawingSession
{
public:
  explicit DrawingSession(double threshold = kDefaultWaypointThreshold);

  void pinch_down();
  void pinch_up();

  /// Commits the cursor as a waypoint when it is farther than the threshold
  /// from the last waypoint. Returns true if a waypoint was appended.
  bool feed(Point2D cursor);

  double threshold() const {return threshold_;}
  bool pinch_active() const {return pinch_active_;}
  const std::vector<Point2D> & committed() const {return committed_;}

private:
  std::vector<Point2D> committed_;
  double threshold_;
  bool pinch_active_{false};
};

DrawingSession session_feed_cursor(DrawingSession session, Point2D cursor);

struct FinishedPath
{
  Hrp path;
  Point2D goal_marker;
};

FinishedPath session_finish(
  const DrawingSession & session, std::string id, Timestamp created_at);
FinishedPath session_finish(const DrawingSession & session);

double polyline_length(std::span<const Point2D> points);

/// Samples the polyline every `step` meters of arc length, always ending at
/// the final vertex.
std::vector<Point2D> resample_uniform(std::span<const Point2D> points, double step);

double point_segment_distance(Point2D p, Point2D a, Point2D b);
double distance_to_polyline(Point2D p, std::span<const Point2D> points);

}  // namespace hrpnav

#endif  // HRPNAV__GEOMETRY_HPP_
