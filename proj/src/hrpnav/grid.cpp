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

#include "hrpnav/grid.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>

#include "hrpnav/error.hpp"

namespace hrpnav
{

Point2D GridGeometry::to_grid_frame(Point2D world) const
{
  const Point2D d = world - origin.position;
  if (origin.theta == 0.0) {
    return d;
  }
  const double c = std::cos(origin.theta);
  const double s = std::sin(origin.theta);
  return {c * d.x + s * d.y, -s * d.x + c * d.y};
}

Point2D GridGeometry::to_world(Point2D g) const
{
  if (origin.theta == 0.0) {
    return origin.position + g;
  }
  const double c = std::cos(origin.theta);
  const double s = std::sin(origin.theta);
  return {origin.position.x + c * g.x - s * g.y, origin.position.y + s * g.x + c * g.y};
}

std::optional<CellIndex> GridGeometry::world_to_cell(Point2D world) const
{
  if (!is_finite(world)) {
    return std::nullopt;
  }
  const Point2D g = to_grid_frame(world);
  const CellIndex c{
    static_cast<int64_t>(std::floor(g.x / resolution)),
    static_cast<int64_t>(std::floor(g.y / resolution))};
  if (!in_bounds(c)) {
    return std::nullopt;
  }
  return c;
}

Point2D GridGeometry::cell_center(CellIndex c) const
{
  return to_world(
    {(static_cast<double>(c.i) + 0.5) * resolution,
      (static_cast<double>(c.j) + 0.5) * resolution});
}

void GridGeometry::validate() const
{
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw Error(ErrorCode::InvalidArgument, "grid resolution must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::InvalidArgument, "grid dimensions must be positive");
  }
  if (!is_finite(origin.position) || !std::isfinite(origin.theta)) {
    throw Error(ErrorCode::InvalidArgument, "grid origin must be finite");
  }
}

OccupancyGrid OccupancyGrid::empty(const GridGeometry & geometry)
{
  geometry.validate();
  return {geometry, std::vector<uint8_t>(static_cast<size_t>(geometry.cell_count()), 0)};
}

bool OccupancyGrid::blocked_at(Point2D world) const
{
  const auto cell = geometry.world_to_cell(world);
  return !cell || is_occupied(*cell);
}

namespace
{

struct PgmImage
{
  int64_t width{0};
  int64_t height{0};
  std::vector<uint8_t> pixels;  // normalized to 0..255, row 0 at the top
};

std::string next_token(std::istream & in)
{
  std::string token;
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string skip;
      std::getline(in, skip);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!token.empty()) {
        break;
      }
      continue;
    }
    token.push_back(c);
  }
  return token;
}

int64_t parse_header_int(std::istream & in, const std::filesystem::path & file)
{
  const std::string token = next_token(in);
  try {
    size_t used = 0;
    const long long v = std::stoll(token, &used);
    if (used == token.size() && v > 0) {
      return v;
    }
  } catch (const std::exception &) {
  }
  throw Error(ErrorCode::Parse, "bad PGM header in '" + file.string() + "'");
}

PgmImage read_pgm(const std::filesystem::path & file)
{
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open map image '" + file.string() + "'");
  }
  const std::string magic = next_token(in);
  if (magic != "P5" && magic != "P2") {
    throw Error(ErrorCode::Parse, "'" + file.string() + "' is not a grayscale PGM image");
  }
  PgmImage img;
  img.width = parse_header_int(in, file);
  img.height = parse_header_int(in, file);
  const int64_t maxval = parse_header_int(in, file);
  if (maxval > 255) {
    throw Error(ErrorCode::Parse, "only 8-bit PGM images are supported");
  }
  const size_t count = static_cast<size_t>(img.width * img.height);
  img.pixels.resize(count);
  if (magic == "P5") {
    // A single whitespace byte after maxval was consumed by next_token.
    in.read(reinterpret_cast<char *>(img.pixels.data()), static_cast<std::streamsize>(count));
    if (static_cast<size_t>(in.gcount()) != count) {
      throw Error(ErrorCode::Parse, "truncated PGM pixel data in '" + file.string() + "'");
    }
  } else {
    for (size_t k = 0; k < count; ++k) {
      const std::string token = next_token(in);
      if (token.empty()) {
        throw Error(ErrorCode::Parse, "truncated PGM pixel data in '" + file.string() + "'");
      }
      img.pixels[k] = static_cast<uint8_t>(std::stoi(token));
    }
  }
  if (maxval != 255) {
    for (auto & p : img.pixels) {
      p = static_cast<uint8_t>(std::min<int64_t>(255, p * 255 / maxval));
    }
  }
  return img;
}

std::map<std::string, std::string> read_metadata(const std::filesystem::path & file)
{
  std::ifstream in(file);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open map metadata '" + file.string() + "'");
  }
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) {
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw Error(
        ErrorCode::Parse,
        file.string() + ":" + std::to_string(lineno) + ": expected 'key: value'");
    }
    out[trim(line.substr(0, colon))] = trim(line.substr(colon + 1));
  }
  return out;
}

double metadata_number(
  const std::map<std::string, std::string> & meta, const std::string & key,
  std::optional<double> fallback)
{
  auto it = meta.find(key);
  if (it == meta.end()) {
    if (fallback) {
      return *fallback;
    }
    throw Error(ErrorCode::Parse, "map metadata is missing '" + key + "'");
  }
  try {
    size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used == it->second.size() && std::isfinite(v)) {
      return v;
    }
  } catch (const std::exception &) {
  }
  throw Error(ErrorCode::Parse, "map metadata '" + key + "' is not a number");
}

OccupancyGrid build_grid(
  const std::map<std::string, std::string> & meta, const std::filesystem::path & image_file)
{
  const PgmImage img = read_pgm(image_file);
  GridGeometry geometry;
  geometry.resolution = metadata_number(meta, "resolution", std::nullopt);
  geometry.origin = Pose2D(
    metadata_number(meta, "origin_x", 0.0), metadata_number(meta, "origin_y", 0.0),
    metadata_number(meta, "origin_theta", 0.0));
  geometry.width = img.width;
  geometry.height = img.height;
  if (meta.count("width") &&
    static_cast<int64_t>(metadata_number(meta, "width", std::nullopt)) != img.width)
  {
    throw Error(ErrorCode::GeometryMismatch, "map width disagrees with the image");
  }
  if (meta.count("height") &&
    static_cast<int64_t>(metadata_number(meta, "height", std::nullopt)) != img.height)
  {
    throw Error(ErrorCode::GeometryMismatch, "map height disagrees with the image");
  }
  OccupancyGrid grid = OccupancyGrid::empty(geometry);
  for (int64_t row = 0; row < img.height; ++row) {
    for (int64_t col = 0; col < img.width; ++col) {
      const uint8_t value = img.pixels[static_cast<size_t>(row * img.width + col)];
      grid.set_occupied({col, img.height - 1 - row}, value < 128);
    }
  }
  return grid;
}

}  // namespace

OccupancyGrid load_map(const std::filesystem::path & metadata_file)
{
  const auto meta = read_metadata(metadata_file);
  auto it = meta.find("image");
  if (it == meta.end() || it->second.empty()) {
    throw Error(ErrorCode::Parse, "map metadata is missing 'image'");
  }
  std::filesystem::path image = it->second;
  if (image.is_relative()) {
    image = metadata_file.parent_path() / image;
  }
  return build_grid(meta, image);
}

OccupancyGrid load_map(
  const std::filesystem::path & metadata_file, const std::filesystem::path & image_file)
{
  return build_grid(read_metadata(metadata_file), image_file);
}

void save_map(const std::filesystem::path & metadata_file, const OccupancyGrid & grid)
{
  std::filesystem::path image = metadata_file;
  image.replace_extension(".pgm");
  {
    std::ofstream out(image, std::ios::binary);
    if (!out) {
      throw Error(ErrorCode::Io, "cannot write map image '" + image.string() + "'");
    }
    const auto & g = grid.geometry;
    out << "P5\n" << g.width << " " << g.height << "\n255\n";
    for (int64_t row = 0; row < g.height; ++row) {
      for (int64_t col = 0; col < g.width; ++col) {
        out.put(grid.is_occupied({col, g.height - 1 - row}) ? char(0) : char(255));
      }
    }
  }
  std::ofstream meta(metadata_file);
  if (!meta) {
    throw Error(ErrorCode::Io, "cannot write map metadata '" + metadata_file.string() + "'");
  }
  meta.precision(17);
  meta << "image: " << image.filename().string() << "\n"
       << "resolution: " << grid.geometry.resolution << "\n"
       << "origin_x: " << grid.geometry.origin.position.x << "\n"
       << "origin_y: " << grid.geometry.origin.position.y << "\n"
       << "origin_theta: " << grid.geometry.origin.theta << "\n"
       << "width: " << grid.geometry.width << "\n"
       << "height: " << grid.geometry.height << "\n";
}

}  // namespace hrpnav
