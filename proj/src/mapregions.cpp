#include "battlemix/mapregions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <tuple>

#include "battlemix/error.hpp"
#include "battlemix/text.hpp"

namespace battlemix {

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();

int label_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'z') return 10 + (c - 'a');
  if (c >= 'A' && c <= 'Z') return 36 + (c - 'A');
  return -1;
}

char label_char(int v) {
  if (v < 10) return static_cast<char>('0' + v);
  if (v < 36) return static_cast<char>('a' + (v - 10));
  return static_cast<char>('A' + (v - 36));
}

[[noreturn]] void bad_grid(std::size_t line, const std::string& reason) {
  throw Error(ErrorCode::MalformedGrid, reason, line);
}

struct Step {
  int dx, dy;
  bool diagonal;
};
constexpr Step kSteps[8] = {{1, 0, false},  {-1, 0, false}, {0, 1, false},  {0, -1, false},
                            {1, 1, true},   {1, -1, true},  {-1, 1, true},  {-1, -1, true}};

/// Tile of `tiles` closest to their centroid; ties to the lowest tile index.
std::optional<Tile> central_tile(const WalkGrid& grid, const std::vector<std::size_t>& tiles) {
  if (tiles.empty()) return std::nullopt;
  double cx = 0.0;
  double cy = 0.0;
  for (const auto idx : tiles) {
    const Tile t = grid.tile_at(idx);
    cx += t.x;
    cy += t.y;
  }
  cx /= static_cast<double>(tiles.size());
  cy /= static_cast<double>(tiles.size());
  std::size_t best = tiles.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto idx : tiles) {  // tiles are in increasing index order
    const Tile t = grid.tile_at(idx);
    const double d = (t.x - cx) * (t.x - cx) + (t.y - cy) * (t.y - cy);
    if (d < best_d) {
      best_d = d;
      best = idx;
    }
  }
  return grid.tile_at(best);
}

std::vector<std::optional<Tile>> centers_of(const WalkGrid& grid, const std::vector<int>& labels,
                                            int label_count) {
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(label_count));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= 0) members[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  std::vector<std::optional<Tile>> out;
  out.reserve(members.size());
  for (const auto& m : members) out.push_back(central_tile(grid, m));
  return out;
}

DistanceMatrix matrix_over(const WalkGrid& grid, const std::vector<std::optional<Tile>>& centers) {
  DistanceMatrix m(centers.size());
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (!centers[i]) {
      for (std::size_t j = 0; j < centers.size(); ++j) {
        if (i != j) {
          m.at(i, j) = DistanceMatrix::kUnreachable;
          m.at(j, i) = DistanceMatrix::kUnreachable;
        }
      }
      continue;
    }
    const auto dist = ground_distances_from(grid, *centers[i]);
    for (std::size_t j = 0; j < centers.size(); ++j) {
      if (!centers[j]) continue;
      m.at(i, j) = dist[grid.index(*centers[j])];
    }
  }
  // Integer Dijkstra is exact, so i->j and j->i agree; enforce anyway.
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t j = i + 1; j < m.n; ++j) m.at(j, i) = m.at(i, j);
  }
  return m;
}

}  // namespace

WalkGrid::WalkGrid(int w, int h, int tile_px)
    : width(w), height(h), tile_size(tile_px),
      walkable(static_cast<std::size_t>(std::max(w, 0)) * static_cast<std::size_t>(std::max(h, 0)), 0) {
  if (w < 1 || h < 1) throw Error(ErrorCode::InvalidArgument, "grid must be at least 1x1");
  if (tile_px < 1) throw Error(ErrorCode::InvalidArgument, "tile size must be positive");
}

GridFile parse_grid(std::string_view input) {
  std::vector<std::pair<std::size_t, std::string_view>> lines;
  {
    std::size_t start = 0;
    std::size_t no = 0;
    while (start < input.size()) {
      auto end = input.find('\n', start);
      if (end == std::string_view::npos) end = input.size();
      ++no;
      lines.emplace_back(no, input.substr(start, end - start));
      start = end + 1;
    }
  }
  std::size_t i = 0;
  while (i < lines.size() && lines[i].second.empty()) ++i;
  if (i == lines.size()) bad_grid(0, "empty grid file");

  const auto header = text::split(lines[i].second, ' ');
  if (header.size() != 3) bad_grid(lines[i].first, "header must be 'W H tile_size'");
  const auto w = text::to_int(header[0]);
  const auto h = text::to_int(header[1]);
  const auto ts = text::to_int(header[2]);
  if (!w || !h || !ts || *w < 1 || *h < 1 || *ts < 1 || *w > 4096 || *h > 4096) {
    bad_grid(lines[i].first, "bad grid header");
  }
  GridFile out;
  out.grid = WalkGrid(static_cast<int>(*w), static_cast<int>(*h), static_cast<int>(*ts));
  out.region_of.assign(out.grid.tile_count(), kNoLabel);
  ++i;

  int max_label = -1;
  for (int y = 0; y < out.grid.height; ++y, ++i) {
    if (i >= lines.size()) bad_grid(lines.empty() ? 0 : lines.back().first, "missing grid rows");
    const auto row = lines[i].second;
    if (row.size() != static_cast<std::size_t>(out.grid.width)) {
      bad_grid(lines[i].first, "grid row has wrong width");
    }
    for (int x = 0; x < out.grid.width; ++x) {
      const char c = row[static_cast<std::size_t>(x)];
      const auto idx = out.grid.index({x, y});
      if (c == '#') continue;
      const int v = label_value(c);
      if (v < 0) bad_grid(lines[i].first, std::string("bad tile character '") + c + "'");
      out.grid.walkable[idx] = 1;
      out.region_of[idx] = v;
      max_label = std::max(max_label, v);
    }
  }
  out.region_count = max_label + 1;
  {
    std::vector<char> seen(static_cast<std::size_t>(out.region_count), 0);
    for (const int r : out.region_of) {
      if (r >= 0) seen[static_cast<std::size_t>(r)] = 1;
    }
    for (int r = 0; r < out.region_count; ++r) {
      if (!seen[static_cast<std::size_t>(r)]) {
        bad_grid(0, "region labels must be contiguous; missing " + std::to_string(r));
      }
    }
  }

  std::map<int, Choke> chokes;
  for (; i < lines.size(); ++i) {
    const auto [no, rec] = lines[i];
    if (rec.empty() || rec.front() == '#') continue;
    const auto f = text::split(rec, ';');
    if (f.size() != 4 || f[0] != "Choke") bad_grid(no, "expected Choke;<id>;<tx>;<ty>");
    const auto id = text::to_int(f[1]);
    const auto tx = text::to_int(f[2]);
    const auto ty = text::to_int(f[3]);
    if (!id || !tx || !ty || *id < 0 || *id > 100000) bad_grid(no, "bad choke record");
    auto& c = chokes[static_cast<int>(*id)];
    c.id = static_cast<int>(*id);
    c.tiles.push_back({static_cast<int>(*tx), static_cast<int>(*ty)});
  }
  int expect = 0;
  for (auto& [id, c] : chokes) {
    if (id != expect++) bad_grid(0, "choke ids must be contiguous from 0");
    out.chokes.push_back(std::move(c));
  }
  return out;
}

std::string write_grid(const GridFile& file) {
  const auto& g = file.grid;
  std::string out = std::to_string(g.width) + " " + std::to_string(g.height) + " " +
                    std::to_string(g.tile_size) + "\n";
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      const auto idx = g.index({x, y});
      out += g.walkable[idx] ? label_char(file.region_of[idx]) : '#';
    }
    out += '\n';
  }
  for (const auto& c : file.chokes) {
    for (const auto& t : c.tiles) {
      out += "Choke;" + std::to_string(c.id) + ";" + std::to_string(t.x) + ";" +
             std::to_string(t.y) + "\n";
    }
  }
  return out;
}

std::int64_t diagonal_step(int tile_size) {
  return static_cast<std::int64_t>(std::llround(tile_size * std::sqrt(2.0)));
}

std::vector<std::int64_t> ground_distances_from(const WalkGrid& grid, Tile source) {
  std::vector<std::int64_t> dist(grid.tile_count(), kInf);
  const std::int64_t axial = grid.tile_size;
  const std::int64_t diag = diagonal_step(grid.tile_size);
  using Item = std::pair<std::int64_t, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  const auto s = grid.index(source);
  dist[s] = 0;
  pq.emplace(0, s);
  while (!pq.empty()) {
    const auto [d, idx] = pq.top();
    pq.pop();
    if (d != dist[idx]) continue;
    const Tile t = grid.tile_at(idx);
    for (const auto& st : kSteps) {
      const Tile n{t.x + st.dx, t.y + st.dy};
      if (!grid.is_walkable(n)) continue;
      const auto ni = grid.index(n);
      const auto nd = d + (st.diagonal ? diag : axial);
      if (nd < dist[ni]) {
        dist[ni] = nd;
        pq.emplace(nd, ni);
      }
    }
  }
  for (auto& d : dist) {
    if (d == kInf) d = DistanceMatrix::kUnreachable;
  }
  return dist;
}

RegionMap build_cdr(const WalkGrid& grid, const std::vector<int>& region_of, int region_count,
                    const std::vector<Choke>& chokes, double radius_px) {
  if (!(radius_px > 0.0)) throw Error(ErrorCode::InvalidArgument, "choke radius must be positive");
  if (region_of.size() != grid.tile_count()) {
    throw Error(ErrorCode::InvalidArgument, "region labels do not match grid size");
  }
  for (std::size_t i = 0; i < region_of.size(); ++i) {
    const bool walk = grid.walkable[i] != 0;
    if (walk && (region_of[i] < 0 || region_of[i] >= region_count)) {
      throw Error(ErrorCode::InvalidArgument, "walkable tile without a valid region label");
    }
  }
  for (std::size_t c = 0; c < chokes.size(); ++c) {
    if (chokes[c].id != static_cast<int>(c)) {
      throw Error(ErrorCode::InvalidArgument, "choke ids must be 0..n-1 in order");
    }
    for (const auto& t : chokes[c].tiles) {
      if (!grid.on_grid(t)) {
        throw Error(ErrorCode::ChokeOffGrid, "choke " + std::to_string(c) + " tile (" +
                                                 std::to_string(t.x) + "," + std::to_string(t.y) + ")");
      }
      if (!grid.is_walkable(t)) {
        throw Error(ErrorCode::ChokeOnUnwalkable, "choke " + std::to_string(c) + " tile (" +
                                                      std::to_string(t.x) + "," +
                                                      std::to_string(t.y) + ")");
      }
    }
  }

  RegionMap map;
  map.grid = grid;
  map.region_count = region_count;
  map.region_of = region_of;
  map.chokes = chokes;
  map.cdr_of.assign(grid.tile_count(), kNoLabel);
  for (std::size_t i = 0; i < region_of.size(); ++i) {
    if (grid.walkable[i]) map.cdr_of[i] = region_of[i];
  }

  // Multi-source Dijkstra keyed by (distance, choke id): the settled key of a
  // tile is its nearest choke with ties broken towards the lower id.
  using Key = std::pair<std::int64_t, int>;
  std::vector<Key> best(grid.tile_count(), Key{kInf, 0});
  using Item = std::tuple<std::int64_t, int, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (const auto& c : chokes) {
    for (const auto& t : c.tiles) {
      const auto idx = grid.index(t);
      const Key k{0, c.id};
      if (k < best[idx]) {
        best[idx] = k;
        pq.emplace(0, c.id, idx);
      }
    }
  }
  const std::int64_t axial = grid.tile_size;
  const std::int64_t diag = diagonal_step(grid.tile_size);
  while (!pq.empty()) {
    const auto [d, cid, idx] = pq.top();
    pq.pop();
    if (Key{d, cid} != best[idx]) continue;
    if (static_cast<double>(d) > radius_px) continue;
    const Tile t = grid.tile_at(idx);
    for (const auto& st : kSteps) {
      const Tile n{t.x + st.dx, t.y + st.dy};
      if (!grid.is_walkable(n)) continue;
      const auto ni = grid.index(n);
      const Key nk{d + (st.diagonal ? diag : axial), cid};
      if (nk < best[ni]) {
        best[ni] = nk;
        pq.emplace(nk.first, nk.second, ni);
      }
    }
  }
  for (std::size_t i = 0; i < best.size(); ++i) {
    if (best[i].first != kInf && static_cast<double>(best[i].first) <= radius_px) {
      map.cdr_of[i] = map.choke_cdr(best[i].second);
    }
  }

  map.region_centers = centers_of(grid, map.region_of, region_count);
  map.cdr_centers = centers_of(grid, map.cdr_of, map.cdr_count());
  return map;
}

RegionMap build_cdr(const GridFile& file, double radius_px) {
  return build_cdr(file.grid, file.region_of, file.region_count, file.chokes, radius_px);
}

DistanceMatrix ground_distance_matrix(const WalkGrid& grid, const std::vector<Tile>& centers) {
  for (const auto& c : centers) {
    if (!grid.on_grid(c)) {
      throw Error(ErrorCode::CenterOffGrid,
                  "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")");
    }
    if (!grid.is_walkable(c)) {
      throw Error(ErrorCode::InvalidArgument, "center on unwalkable tile (" + std::to_string(c.x) +
                                                  "," + std::to_string(c.y) + ")");
    }
  }
  std::vector<std::optional<Tile>> opt(centers.begin(), centers.end());
  return matrix_over(grid, opt);
}

DistanceMatrix region_distance_matrix(const RegionMap& map) {
  return matrix_over(map.grid, map.region_centers);
}

DistanceMatrix cdr_distance_matrix(const RegionMap& map) {
  return matrix_over(map.grid, map.cdr_centers);
}

Location locate(const RegionMap& map, double x, double y) {
  const auto& g = map.grid;
  if (!(x >= 0.0) || !(y >= 0.0)) throw Error(ErrorCode::OffGrid, "negative pixel coordinate");
  const Tile t{static_cast<int>(x / g.tile_size), static_cast<int>(y / g.tile_size)};
  if (!g.on_grid(t)) {
    throw Error(ErrorCode::OffGrid, "pixel (" + text::format_double(x) + "," +
                                        text::format_double(y) + ") is off the grid");
  }
  std::size_t idx = g.index(t);
  if (!g.walkable[idx]) {
    std::int64_t best_d = std::numeric_limits<std::int64_t>::max();
    std::size_t best = g.tile_count();
    for (std::size_t i = 0; i < g.tile_count(); ++i) {
      if (!g.walkable[i]) continue;
      const Tile o = g.tile_at(i);
      const std::int64_t dx = o.x - t.x;
      const std::int64_t dy = o.y - t.y;
      const auto d = dx * dx + dy * dy;
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    if (best == g.tile_count()) throw Error(ErrorCode::OffGrid, "grid has no walkable tile");
    idx = best;
  }
  return {map.region_of[idx], map.cdr_of[idx]};
}

}  // namespace battlemix
