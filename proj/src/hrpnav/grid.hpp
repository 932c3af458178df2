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

#ifndef HRPNAV__GRID_HPP_
#define HRPNAV__GRID_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "hrpnav/geometry.hpp"

namespace hrpnav
{

struct CellIndex
{
  int64_t i{0};  // column, along the grid x axis
  int64_t j{0};  // row, along the grid y axis

  friend bool operator==(const CellIndex &, const CellIndex &) = default;
};

/// Cell (0, 0) has its lower-left corner at `origin`; rows grow along +y.
struct GridGeometry
{
  double resolution{0.05};
  int64_t width{0};
  int64_t height{0};
  Pose2D origin;

  int64_t cell_count() const {return width * height;}
  size_t flat(CellIndex c) const {return static_cast<size_t>(c.j * width + c.i);}
  bool in_bounds(CellIndex c) const {return c.i >= 0 && c.j >= 0 && c.i < width && c.j < height;}

  /// Point expressed in the grid frame (origin corner at 0, axes along the cells).
  Point2D to_grid_frame(Point2D world) const;
  Point2D to_world(Point2D grid_frame) const;

  std::optional<CellIndex> world_to_cell(Point2D world) const;
  Point2D cell_center(CellIndex c) const;

  void validate() const;

  friend bool operator==(const GridGeometry &, const GridGeometry &) = default;
};

struct OccupancyGrid
{
  GridGeometry geometry;
  std::vector<uint8_t> occupied;  // 1 = occupied, row-major from row 0

  static OccupancyGrid empty(const GridGeometry & geometry);

  bool is_occupied(CellIndex c) const {return occupied[geometry.flat(c)] != 0;}
  void set_occupied(CellIndex c, bool value = true) {occupied[geometry.flat(c)] = value ? 1 : 0;}

  /// Out-of-bounds points count as blocked.
  bool blocked_at(Point2D world) const;
};

/**
 * Reads a map description: a text file of `key: value` lines (resolution,
 * origin_x, origin_y, origin_theta, image, and optionally width/height) plus an
 * 8-bit grayscale PGM (P5 or P2). Pixels darker than 128 are occupied. The top
 * image row is the highest grid row.
 */
OccupancyGrid load_map(const std::filesystem::path & metadata_file);
OccupancyGrid load_map(
  const std::filesystem::path & metadata_file, const std::filesystem::path & image_file);

/// Writes `<stem>.pgm` next to the metadata file and references it by name.
void save_map(const std::filesystem::path & metadata_file, const OccupancyGrid & grid);

}  // namespace hrpnav

#endif  // HRPNAV__GRID_HPP_
