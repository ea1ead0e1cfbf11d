#pragma once

// Choke-dependent regions (CDR) over a tile grid.
//
// Base regions and chokes are inputs. CDRs refine them with a distance-limited
// Voronoi tessellation seeded at the chokes: walkable tiles within the ground
// distance limit of a choke take that choke's label, everything else keeps
// its base region's label. Region r has CDR label r; choke c has CDR label
// region_count + c.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "battlemix/logmodel.hpp"

namespace battlemix {

struct Tile {
  int x = 0;
  int y = 0;
  bool operator==(const Tile&) const = default;
};

struct WalkGrid {
  int width = 0;
  int height = 0;
  int tile_size = 32;
  std::vector<char> walkable;  // row-major, width * height

  WalkGrid() = default;
  WalkGrid(int w, int h, int tile_px);

  bool on_grid(Tile t) const { return t.x >= 0 && t.y >= 0 && t.x < width && t.y < height; }
  std::size_t index(Tile t) const { return static_cast<std::size_t>(t.y) * width + t.x; }
  Tile tile_at(std::size_t idx) const {
    return {static_cast<int>(idx % width), static_cast<int>(idx / width)};
  }
  bool is_walkable(Tile t) const { return on_grid(t) && walkable[index(t)] != 0; }
  std::size_t tile_count() const { return walkable.size(); }
};

struct Choke {
  int id = 0;
  std::vector<Tile> tiles;
};

inline constexpr int kNoLabel = -1;

struct RegionMap {
  WalkGrid grid;
  int region_count = 0;
  std::vector<int> region_of;  // per tile; kNoLabel on unwalkable tiles
  std::vector<Choke> chokes;   // ordered by id, ids are 0..n-1
  std::vector<int> cdr_of;     // per tile; kNoLabel on unwalkable tiles
  std::vector<std::optional<Tile>> region_centers;
  std::vector<std::optional<Tile>> cdr_centers;

  int cdr_count() const { return region_count + static_cast<int>(chokes.size()); }
  int choke_cdr(int choke_id) const { return region_count + choke_id; }
};

/// Parsed grid file: walkability, base region labels, chokes.
struct GridFile {
  WalkGrid grid;
  std::vector<int> region_of;
  int region_count = 0;
  std::vector<Choke> chokes;
};

/// Grid file format: `W H tile_size`, H rows of W characters ('#' unwalkable,
/// 0-9a-zA-Z region label 0..61), then `Choke;<id>;<tx>;<ty>` lines, one per
/// choke tile.
GridFile parse_grid(std::string_view text);
std::string write_grid(const GridFile& file);

inline constexpr double kDefaultChokeRadiusTiles = 10.0;

/// Labels tiles within `radius_px` ground distance of a choke with the nearest
/// choke's CDR (ties go to the lower choke id). Throws ChokeOffGrid,
/// ChokeOnUnwalkable, InvalidArgument (radius <= 0, label/grid mismatch).
RegionMap build_cdr(const WalkGrid& grid, const std::vector<int>& region_of, int region_count,
                    const std::vector<Choke>& chokes, double radius_px);
RegionMap build_cdr(const GridFile& file, double radius_px);

/// Ground step costs: axial = tile_size, diagonal = round(tile_size * sqrt 2).
std::int64_t diagonal_step(int tile_size);

/// Single-source shortest ground distances (8-connected) to every tile;
/// kUnreachable where disconnected.
std::vector<std::int64_t> ground_distances_from(const WalkGrid& grid, Tile source);

/// Pairwise ground distances between centers. Throws CenterOffGrid.
DistanceMatrix ground_distance_matrix(const WalkGrid& grid, const std::vector<Tile>& centers);

/// Matrices over region / CDR centers; labels without tiles are unreachable
/// from everything but themselves.
DistanceMatrix region_distance_matrix(const RegionMap& map);
DistanceMatrix cdr_distance_matrix(const RegionMap& map);

struct Location {
  int region_id = kNoLabel;
  int cdr_id = kNoLabel;
  bool operator==(const Location&) const = default;
};

/// Labels of the tile under pixel (x, y). Unwalkable tiles resolve to the
/// nearest walkable tile (Euclidean, ties to the lowest tile index).
/// Throws OffGrid.
Location locate(const RegionMap& map, double x, double y);

}  // namespace battlemix
