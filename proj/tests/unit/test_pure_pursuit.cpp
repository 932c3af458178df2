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
#include <numbers>
#include <random>

#include "hrpnav/pure_pursuit.hpp"
#include "support/gtest_support.hpp"

namespace
{

using hrpnav::ControllerParams;
using hrpnav::ErrorCode;
using hrpnav::Point2D;
using hrpnav::Pose2D;
using testing_support::error_of;

hrpnav::GlobalPath straight(double length, double y = 0.0)
{
  return hrpnav::assign_orientations(std::vector<Point2D>{{0, y}, {length, y}});
}

TEST(LocalTransform, IdentityTranslationRotation)
{
  const auto path = hrpnav::assign_orientations(std::vector<Point2D>{{2, 0}, {0, 1}});
  EXPECT_EQ(hrpnav::local_transform(path, Pose2D()).positions(), path.positions());

  const auto shifted = hrpnav::local_transform(path, Pose2D(1, 0, 0));
  EXPECT_EQ(shifted.poses[0].position, (Point2D{1, 0}));

  const auto rotated = hrpnav::local_transform(path, Pose2D(0, 0, std::numbers::pi / 2));
  EXPECT_NEAR(rotated.poses[1].position.x, 1.0, 1e-15);
  EXPECT_NEAR(rotated.poses[1].position.y, 0.0, 1e-15);
  EXPECT_NEAR(rotated.poses[1].theta, path.poses[1].theta - std::numbers::pi / 2, 1e-15);
}

TEST(SelectTarget, OnStraightPath)
{
  const std::vector<Point2D> local{{0, 0}, {1, 0}, {2, 0}};
  const auto t = hrpnav::select_target(local, 0.5);
  EXPECT_NEAR(t.x, 0.5, 1e-15);
  EXPECT_EQ(t.y, 0.0);
}

TEST(SelectTarget, ShortPathFallsBackToEnd)
{
  const std::vector<Point2D> local{{0, 0}, {0.3, 0}};
  EXPECT_EQ(hrpnav::select_target(local, 0.5), (Point2D{0.3, 0}));
  EXPECT_EQ(hrpnav::select_target(std::vector<Point2D>{{0.2, 0.1}}, 0.5), (Point2D{0.2, 0.1}));
  EXPECT_EQ(error_of([] {hrpnav::select_target(std::vector<Point2D>{}, 0.5);}),
    ErrorCode::DegeneratePath);
}

TEST(SelectTarget, LateralOffsetMatchesCircleIntersection)
{
  const std::vector<Point2D> local{{-1, 0.1}, {3, 0.1}};
  const auto t = hrpnav::select_target(local, 0.5);
  EXPECT_NEAR(t.x, std::sqrt(0.25 - 0.01), 1e-12);
  EXPECT_NEAR(t.y, 0.1, 1e-15);
}

TEST(SelectTarget, FarFromPathReturnsProjection)
{
  const std::vector<Point2D> local{{-1, 2}, {3, 2}};
  const auto t = hrpnav::select_target(local, 0.5);
  EXPECT_NEAR(t.x, 0.0, 1e-15);
  EXPECT_NEAR(t.y, 2.0, 1e-15);
}

TEST(SelectTarget, WalksAcrossCorners)
{
  // Enters the lookahead circle only on the second segment.
  const std::vector<Point2D> local{{0, 0}, {0.3, 0}, {0.3, 1}};
  const auto t = hrpnav::select_target(local, 0.5);
  EXPECT_NEAR(t.x, 0.3, 1e-15);
  EXPECT_NEAR(t.y, 0.4, 1e-12);
  EXPECT_NEAR(std::hypot(t.x, t.y), 0.5, 1e-12);
}

TEST(SelectTarget, RandomPathsAgreeWithBruteForceWalk)
{
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Point2D> pts;
    for (int i = 0; i < 6; ++i) {
      pts.push_back({coord(rng), coord(rng)});
    }
    const double L = 0.5 + 0.1 * (trial % 10);
    const auto t = hrpnav::select_target(pts, L);
    // The result is a path point at distance L, the path end, or the projection.
    const double d = hrpnav::distance_to_polyline(t, pts);
    EXPECT_LT(d, 1e-9);
    const bool on_circle = std::abs(std::hypot(t.x, t.y) - L) < 1e-9;
    const bool is_end = t == pts.back();
    const double nearest = hrpnav::distance_to_polyline({0, 0}, pts);
    const bool is_projection = std::abs(std::hypot(t.x, t.y) - nearest) < 1e-9 && nearest >= L;
    EXPECT_TRUE(on_circle || is_end || is_projection) << "trial " << trial;
  }
}

TEST(ComputeTwist, StraightAhead)
{
  const ControllerParams params;
  const auto tw = hrpnav::compute_twist({0.5, 0.0}, params);
  EXPECT_EQ(tw.v, params.cruise_speed);
  EXPECT_EQ(tw.omega, 0.0);
}

TEST(ComputeTwist, CurvatureFormula)
{
  ControllerParams params;
  params.max_angular = 100.0;
  const auto tw = hrpnav::compute_twist({0.0, 0.5}, params);
  EXPECT_DOUBLE_EQ(tw.omega, 4.0 * params.cruise_speed);
  EXPECT_LT(hrpnav::compute_twist({0.5, -0.1}, params).omega, 0.0);
  EXPECT_GT(hrpnav::compute_twist({0.5, 0.1}, params).omega, 0.0);
}

TEST(ComputeTwist, ClampsAngularRate)
{
  ControllerParams params;
  params.cruise_speed = 1.0;
  params.max_angular = 1.5;
  EXPECT_EQ(hrpnav::compute_twist({0.0, 0.5}, params).omega, 1.5);
  EXPECT_EQ(hrpnav::compute_twist({0.0, -0.5}, params).omega, -1.5);
}

TEST(ComputeTwist, SlowsDownNearGoal)
{
  const ControllerParams params;
  EXPECT_DOUBLE_EQ(hrpnav::compute_twist({0.5, 0}, params, 0.25).v, params.cruise_speed * 0.5);
  EXPECT_EQ(hrpnav::compute_twist({0.5, 0}, params, 2.0).v, params.cruise_speed);
  EXPECT_EQ(hrpnav::compute_twist({0.0, 0.0}, params), hrpnav::Twist{});
}

TEST(GoalReached, Tolerance)
{
  const ControllerParams params;
  const Pose2D goal(2, 0, 0);
  EXPECT_TRUE(hrpnav::goal_reached(goal, goal, params));
  EXPECT_TRUE(hrpnav::goal_reached(Pose2D(2.05, 0, 1), goal, params));
  EXPECT_FALSE(hrpnav::goal_reached(Pose2D(2.2, 0, 0), goal, params));
}

TEST(ControllerParams, Validation)
{
  EXPECT_NO_THROW(ControllerParams{}.validate());
  ControllerParams zero_speed;
  zero_speed.cruise_speed = 0.0;
  EXPECT_NO_THROW(zero_speed.validate());
  auto bad = [](auto mutate) {
      ControllerParams p;
      mutate(p);
      return error_of([&] {p.validate();});
    };
  EXPECT_EQ(bad([](auto & p) {p.lookahead = 0.0;}), ErrorCode::InvalidArgument);
  EXPECT_EQ(bad([](auto & p) {p.cruise_speed = -0.1;}), ErrorCode::InvalidArgument);
  EXPECT_EQ(bad([](auto & p) {p.goal_xy_tolerance = 0.6;}), ErrorCode::InvalidArgument);
  EXPECT_EQ(bad([](auto & p) {p.max_angular = 0.0;}), ErrorCode::InvalidArgument);
  EXPECT_EQ(bad([](auto & p) {p.slowdown_distance = NAN;}), ErrorCode::InvalidArgument);
}

TEST(ComputeVelocityCommands, ReportsTargetAndCrossTrack)
{
  const ControllerParams params;
  const auto out = hrpnav::compute_velocity_commands(straight(4.0), Pose2D(1.0, 0.1, 0.0), params);
  EXPECT_NEAR(out.cross_track_error, 0.1, 1e-12);
  EXPECT_NEAR(out.target.y, -0.1, 1e-12);
  EXPECT_NEAR(out.target.x, std::sqrt(0.24), 1e-12);
  EXPECT_LT(out.twist.omega, 0.0);
  EXPECT_EQ(out.twist.v, params.cruise_speed);
}

}  // namespace
