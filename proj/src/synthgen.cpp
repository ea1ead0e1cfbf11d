#include "battlemix/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "battlemix/error.hpp"
#include "battlemix/rng.hpp"
#include "battlemix/text.hpp"

namespace battlemix::synth {

namespace {

constexpr int kMapTiles = 64;
constexpr int kTilePx = 32;
constexpr double kSpeedPxPerFrame = 6.0;
constexpr Frame kSampleEvery = 100;
constexpr double kRingMin = 30.0;
constexpr double kRingMax = 60.0;
constexpr double kMinSiteDistance = 750.0;

struct Layout {
  int cols;
  int rows;
  bool obstacles;
  bool island;
};

Layout layout_of(int id) {
  switch (id) {
    case 0: return {2, 2, false, false};
    case 1: return {3, 2, false, false};
    case 2: return {3, 3, false, false};
    case 3: return {2, 3, true, false};
    case 4: return {2, 2, false, true};
    default: throw Error(ErrorCode::InvalidArgument, "unknown map template " + std::to_string(id));
  }
}

int split(int i, int parts) { return static_cast<int>(std::lround(i * kMapTiles / static_cast<double>(parts))); }

geom::Point base_of(int player_index) {
  const double t = player_index == 0 ? 6.5 : kMapTiles - 6.5;
  return {t * kTilePx, t * kTilePx};
}

PixelPos to_pixel(geom::Point p) { return {std::llround(p.x), std::llround(p.y)}; }

}  // namespace

GridFile map_template(int template_id) {
  const Layout lay = layout_of(template_id);
  GridFile g;
  g.grid = WalkGrid(kMapTiles, kMapTiles, kTilePx);
  g.region_of.assign(g.grid.tile_count(), kNoLabel);
  std::vector<int> xs(lay.cols + 1);
  std::vector<int> ys(lay.rows + 1);
  for (int i = 0; i <= lay.cols; ++i) xs[i] = std::min(split(i, lay.cols), kMapTiles - 1);
  for (int i = 0; i <= lay.rows; ++i) ys[i] = std::min(split(i, lay.rows), kMapTiles - 1);

  auto set = [&](int x, int y, int label) {
    const auto idx = g.grid.index({x, y});
    g.grid.walkable[idx] = label == kNoLabel ? 0 : 1;
    g.region_of[idx] = label;
  };
  auto is_wall_x = [&](int x) { return std::ranges::find(xs, x) != xs.end(); };
  auto is_wall_y = [&](int y) { return std::ranges::find(ys, y) != ys.end(); };
  auto cell_of = [&](int x, int y) {
    int cx = 0;
    int cy = 0;
    while (cx + 1 < lay.cols && x >= xs[cx + 1]) ++cx;
    while (cy + 1 < lay.rows && y >= ys[cy + 1]) ++cy;
    return cy * lay.cols + cx;
  };
  for (int y = 0; y < kMapTiles; ++y) {
    for (int x = 0; x < kMapTiles; ++x) {
      set(x, y, is_wall_x(x) || is_wall_y(y) ? kNoLabel : cell_of(x, y));
    }
  }

  // Choke gaps in every internal wall segment; gap tiles join the lower cell.
  int choke_id = 0;
  auto open_gap = [&](std::vector<Tile> tiles, int label) {
    Choke c;
    c.id = choke_id++;
    for (const Tile t : tiles) set(t.x, t.y, label);
    c.tiles = std::move(tiles);
    g.chokes.push_back(std::move(c));
  };
  for (int cy = 0; cy < lay.rows; ++cy) {
    for (int cx = 1; cx < lay.cols; ++cx) {
      const int mid = (ys[cy] + ys[cy + 1]) / 2;
      open_gap({{xs[cx], mid - 1}, {xs[cx], mid}, {xs[cx], mid + 1}}, cy * lay.cols + cx - 1);
    }
  }
  for (int cy = 1; cy < lay.rows; ++cy) {
    for (int cx = 0; cx < lay.cols; ++cx) {
      const int mid = (xs[cx] + xs[cx + 1]) / 2;
      open_gap({{mid - 1, ys[cy]}, {mid, ys[cy]}, {mid + 1, ys[cy]}}, (cy - 1) * lay.cols + cx);
    }
  }

  if (lay.obstacles) {
    for (int cy = 0; cy < lay.rows; ++cy) {
      for (int cx = 0; cx < lay.cols; ++cx) {
        const int ox = (xs[cx] + xs[cx + 1]) / 2 + (cx % 2 == 0 ? 3 : -5);
        const int oy = (ys[cy] + ys[cy + 1]) / 2 + (cy % 2 == 0 ? -5 : 3);
        for (int y = oy; y < oy + 3; ++y) {
          for (int x = ox; x < ox + 3; ++x) set(x, y, kNoLabel);
        }
      }
    }
  }

  int regions = lay.cols * lay.rows;
  if (lay.island) {
    // Sealed room inside the top-right cell.
    const int x0 = 44;
    const int y0 = 8;
    const int side = 9;
    for (int y = y0; y < y0 + side; ++y) {
      for (int x = x0; x < x0 + side; ++x) {
        const bool border = x == x0 || y == y0 || x == x0 + side - 1 || y == y0 + side - 1;
        set(x, y, border ? kNoLabel : regions);
      }
    }
    ++regions;
  }
  g.region_count = regions;
  return g;
}

std::string map_template_name(int template_id) {
  layout_of(template_id);
  return "synth-map-" + std::to_string(template_id);
}

RegionMap map_template_regions(int template_id) {
  return build_cdr(map_template(template_id), kDefaultChokeRadiusTiles * kTilePx);
}

std::string write_truth(const std::vector<TruthAttack>& truth) {
  auto ids = [](const std::set<int>& s) {
    std::string out;
    for (const int id : s) {
      if (!out.empty()) out += '|';
      out += std::to_string(id);
    }
    return out;
  };
  std::string out;
  for (const auto& t : truth) {
    out += "Attack;" + std::to_string(t.index) + ";" + std::string(to_string(t.type)) + ";" +
           std::to_string(t.attacker_pid) + ";" + std::to_string(t.defender_pid) + ";" +
           std::to_string(t.first_death) + ";" + std::to_string(t.last_death) + ";" +
           std::to_string(t.site.x) + ";" + std::to_string(t.site.y) + "\n";
    for (const auto& [pid, s] : t.units) out += "Units;" + std::to_string(pid) + ";" + ids(s) + "\n";
    for (const auto& [pid, s] : t.lost) out += "Lost;" + std::to_string(pid) + ";" + ids(s) + "\n";
  }
  return out;
}

std::vector<TruthAttack> parse_truth(std::string_view content) {
  std::vector<TruthAttack> out;
  text::for_each_record(content, [&](std::size_t line, std::string_view rec) {
    const auto f = text::split(rec, ';');
    auto num = [&](std::string_view s) {
      const auto v = text::to_int(s);
      if (!v) throw Error(ErrorCode::MalformedLine, "truth: bad number", line);
      return *v;
    };
    if (f[0] == "Attack" && f.size() == 9) {
      TruthAttack t;
      t.index = static_cast<int>(num(f[1]));
      const auto type = parse_attack_type(f[2]);
      if (!type) throw Error(ErrorCode::MalformedLine, "truth: bad attack type", line);
      t.type = *type;
      t.attacker_pid = static_cast<int>(num(f[3]));
      t.defender_pid = static_cast<int>(num(f[4]));
      t.first_death = num(f[5]);
      t.last_death = num(f[6]);
      t.site = {num(f[7]), num(f[8])};
      out.push_back(std::move(t));
    } else if ((f[0] == "Units" || f[0] == "Lost") && f.size() == 3 && !out.empty()) {
      auto& dst = f[0] == "Units" ? out.back().units : out.back().lost;
      auto& s = dst[static_cast<int>(num(f[1]))];
      if (!f[2].empty()) {
        for (const auto id : text::split(f[2], '|')) s.insert(static_cast<int>(num(id)));
      }
    } else {
      throw Error(ErrorCode::MalformedLine, "truth: unexpected record", line);
    }
  });
  return out;
}

namespace {

struct Pools {
  std::vector<std::string> ground;
  std::vector<std::string> air;
  std::vector<std::string> cloaked;
  std::string transport;
  std::vector<std::string> drop_cargo;
  std::string worker;
  std::string base;
};

Pools pools_of(Race race) {
  switch (race) {
    case Race::Protoss:
      return {{"Zealot", "Dragoon", "Archon", "Reaver"},
              {"Scout", "Corsair", "Carrier"},
              {"DarkTemplar"},
              "Shuttle",
              {"Zealot", "Dragoon", "Reaver"},
              "Probe",
              "Nexus"};
    case Race::Terran:
      return {{"Marine", "Firebat", "Goliath", "SiegeTank", "Vulture"},
              {"Wraith", "Valkyrie", "Battlecruiser"},
              {"Ghost"},
              "Dropship",
              {"Marine", "Firebat"},
              "SCV",
              "CommandCenter"};
    case Race::Zerg:
      return {{"Zergling", "Hydralisk", "Ultralisk"},
              {"Mutalisk", "Guardian", "Devourer"},
              {"Lurker"},
              "Overlord",
              {"Zergling", "Hydralisk"},
              "Drone",
              "Hatchery"};
  }
  return {};
}

/// One unit's scripted life: waypoints sampled every 100 frames.
struct ScriptedUnit {
  int id = 0;
  int owner = 0;
  std::string type;
  Frame created = 0;
  std::optional<Frame> died;
  std::vector<std::pair<Frame, geom::Point>> waypoints;  // (frame, position), frame-ordered

  geom::Point position_at(Frame f) const {
    if (f <= waypoints.front().first) return waypoints.front().second;
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
      const auto& [f1, p1] = waypoints[i];
      if (f <= f1) {
        const auto& [f0, p0] = waypoints[i - 1];
        const double t = static_cast<double>(f - f0) / static_cast<double>(f1 - f0);
        return {p0.x + t * (p1.x - p0.x), p0.y + t * (p1.y - p0.y)};
      }
    }
    return waypoints.back().second;
  }
};

Frame round_up(Frame f, Frame step) { return (f + step - 1) / step * step; }

Frame travel_frames(geom::Point a, geom::Point b) {
  return round_up(static_cast<Frame>(std::ceil(geom::distance(a, b) / kSpeedPxPerFrame)), kSampleEvery);
}

}  // namespace

GeneratedGame gen_gamelog(const GameGenConfig& config, const UnitTable& table) {
  if (config.skirmishes < 0 || config.min_units < 2 || config.max_units < config.min_units ||
      config.min_gap <= 0 || config.max_gap < config.min_gap) {
    throw Error(ErrorCode::InvalidArgument, "bad game generator configuration");
  }
  Rng rng(config.seed);
  const RegionMap map = map_template_regions(config.map_template);
  const auto reach = ground_distances_from(map.grid, {6, 6});

  GeneratedGame out;
  GameLog& log = out.log;
  log.map_name = map_template_name(config.map_template);
  log.players = {{0, "synthA", config.race_a}, {1, "synthB", config.race_b}};
  log.region_distances = region_distance_matrix(map);
  log.cdr_distances = cdr_distance_matrix(map);

  std::vector<ScriptedUnit> units;
  int next_id = 1;
  auto spawn = [&](int owner, const std::string& type, Frame created, geom::Point at) -> ScriptedUnit& {
    table.at(type);
    units.push_back({next_id++, owner, type, created, std::nullopt, {{created, at}}});
    return units.back();
  };

  // Home bases: a town hall and four workers per player.
  for (int p = 0; p < 2; ++p) {
    const Pools pools = pools_of(log.players[p].race);
    const geom::Point b = base_of(p);
    spawn(p, pools.base, 0, b);
    for (int w = 0; w < 4; ++w) {
      const double a = 2.0 * std::numbers::pi * w / 4.0;
      spawn(p, pools.worker, 0, {b.x + 48.0 * std::cos(a), b.y + 48.0 * std::sin(a)});
    }
  }

  auto pick_site = [&]() {
    for (;;) {
      const Tile t{static_cast<int>(rng.uniform_int(2, kMapTiles - 3)),
                   static_cast<int>(rng.uniform_int(2, kMapTiles - 3))};
      if (!map.grid.is_walkable(t) || reach[map.grid.index(t)] == DistanceMatrix::kUnreachable) continue;
      const geom::Point p{(t.x + 0.5) * kTilePx, (t.y + 0.5) * kTilePx};
      if (geom::distance(p, base_of(0)) < kMinSiteDistance) continue;
      if (geom::distance(p, base_of(1)) < kMinSiteDistance) continue;
      return p;
    }
  };

  std::vector<UnitEvent> extra_events;
  const geom::Point fixed_site = pick_site();
  Frame next_first_death = 1200 + rng.uniform_int(0, 600);
  Frame end_of_script = 0;

  for (int s = 0; s < config.skirmishes; ++s) {
    const AttackType type =
        s < static_cast<int>(config.types.size())
            ? config.types[static_cast<std::size_t>(s)]
            : static_cast<AttackType>(rng.uniform_int(0, 3));
    const int attacker = static_cast<int>(rng.uniform_int(0, 1));
    const int defender = 1 - attacker;
    const geom::Point site = config.same_site ? fixed_site : pick_site();

    // Rosters.
    std::vector<std::string> roster[2];
    std::string center[2];
    for (int side = 0; side < 2; ++side) {
      const int pid = side == 0 ? attacker : defender;
      const Pools pools = pools_of(log.players[pid].race);
      const int n = static_cast<int>(rng.uniform_int(config.min_units, config.max_units));
      auto draw = [&](const std::vector<std::string>& pool) {
        return pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1))];
      };
      if (side == 1) {
        for (int i = 0; i < n; ++i) roster[side].push_back(draw(pools.ground));
        continue;
      }
      switch (type) {
        case AttackType::Ground:
          for (int i = 0; i < n; ++i) roster[side].push_back(draw(pools.ground));
          break;
        case AttackType::AirRaid:
          for (int i = 0; i < n; ++i) roster[side].push_back(draw(pools.air));
          break;
        case AttackType::Invisible:
          for (int i = 0; i < n; ++i) roster[side].push_back(draw(pools.cloaked));
          break;
        case AttackType::Drop:
          center[side] = pools.transport;
          for (int i = 0; i < n; ++i) roster[side].push_back(draw(pools.drop_cargo));
          break;
      }
    }

    // Ring slots interleave both sides around the site; transports sit at the center.
    const std::size_t ring = roster[0].size() + roster[1].size();
    std::vector<geom::Point> slots;
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    for (std::size_t i = 0; i < ring; ++i) {
      const double a = phase + 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(ring);
      const double r = rng.uniform(kRingMin, kRingMax);
      slots.push_back({site.x + r * std::cos(a), site.y + r * std::sin(a)});
    }

    const Frame first_death = next_first_death;
    Frame walk = 0;
    for (int p = 0; p < 2; ++p) walk = std::max(walk, travel_frames(base_of(p), site));
    const Frame arrive = (first_death - 150) / kSampleEvery * kSampleEvery;
    const Frame created = arrive - walk;

    TruthAttack truth;
    truth.index = s;
    truth.type = type;
    truth.attacker_pid = attacker;
    truth.defender_pid = defender;
    truth.site = to_pixel(site);

    std::vector<std::size_t> members;  // indices into `units`
    std::size_t slot = 0;
    for (int side = 0; side < 2; ++side) {
      const int pid = side == 0 ? attacker : defender;
      const geom::Point home = base_of(pid);
      auto place = [&](const std::string& type_name, geom::Point target) {
        ScriptedUnit& u = spawn(pid, type_name, created, home);
        u.waypoints.emplace_back(arrive, target);
        members.push_back(units.size() - 1);
        truth.units[pid].insert(u.id);
        log.orders.push_back({created, pid, u.id, "Move", to_pixel(target), std::nullopt});
      };
      for (const auto& t : roster[side]) place(t, slots[slot++]);
      if (!center[side].empty()) place(center[side], site);
    }

    // Deaths among ring units (never the center transport), 30-120 frames apart.
    std::vector<std::size_t> ring_members;
    for (const auto idx : members) {
      if (units[idx].type != center[0]) ring_members.push_back(idx);
    }
    rng.shuffle(std::span<std::size_t>(ring_members));
    const auto max_losses = static_cast<std::int64_t>(std::min<std::size_t>(ring_members.size() - 1, 6));
    const auto losses = static_cast<std::size_t>(rng.uniform_int(1, std::max<std::int64_t>(1, max_losses)));
    Frame t = first_death;
    for (std::size_t i = 0; i < losses; ++i) {
      ScriptedUnit& u = units[ring_members[i]];
      u.died = t;
      truth.lost[u.owner].insert(u.id);
      truth.last_death = t;
      if (i + 1 < losses) t += rng.uniform_int(30, 120);
    }
    truth.first_death = first_death;

    // Attack orders shortly before the first death; defenders hold.
    std::vector<int> defender_ids(truth.units[defender].begin(), truth.units[defender].end());
    for (const auto idx : members) {
      ScriptedUnit& u = units[idx];
      if (u.owner == attacker) {
        const int target = defender_ids[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(defender_ids.size()) - 1))];
        const Frame f = first_death - rng.uniform_int(0, 140);
        geom::Point tp = site;
        for (const auto j : members) {
          if (units[j].id == target) tp = units[j].waypoints.back().second;
        }
        log.orders.push_back({f, attacker, u.id, "AttackUnit", to_pixel(tp), target});
      } else {
        log.orders.push_back({arrive, defender, u.id, "HoldPosition", to_pixel(u.waypoints.back().second),
                              std::nullopt});
      }
    }
    // Both sides spot each other on arrival.
    for (const auto idx : members) {
      const ScriptedUnit& u = units[idx];
      extra_events.push_back({arrive, EventKind::Discovery, u.id, "", 1 - u.owner, std::nullopt});
    }

    // Survivors go home once the fight has gone quiet.
    const Frame leave = round_up(truth.last_death + 480 + kSampleEvery, kSampleEvery);
    for (const auto idx : members) {
      ScriptedUnit& u = units[idx];
      if (u.died) continue;
      const geom::Point home = base_of(u.owner);
      const geom::Point from = u.waypoints.back().second;
      const geom::Point dest{home.x + rng.uniform(-80.0, 80.0), home.y + rng.uniform(-80.0, 80.0)};
      u.waypoints.emplace_back(leave, from);
      const Frame back = leave + travel_frames(from, dest);
      u.waypoints.emplace_back(back, dest);
      log.orders.push_back({leave, u.owner, u.id, "Move", to_pixel(dest), std::nullopt});
      end_of_script = std::max(end_of_script, back);
    }
    end_of_script = std::max(end_of_script, truth.last_death);
    next_first_death = truth.last_death + rng.uniform_int(config.min_gap, config.max_gap);
    out.truth.push_back(std::move(truth));
  }

  log.duration_frames = round_up(std::max<Frame>(end_of_script, 2400) + 200, kSampleEvery);

  // Events.
  for (const auto& u : units) {
    log.events.push_back({u.created, EventKind::Creation, u.id, u.type, u.owner, to_pixel(u.waypoints.front().second)});
    if (u.died) log.events.push_back({*u.died, EventKind::Destruction, u.id, "", -1, std::nullopt});
  }
  log.events.insert(log.events.end(), extra_events.begin(), extra_events.end());
  std::ranges::stable_sort(log.events, {}, &UnitEvent::frame);
  std::ranges::stable_sort(log.orders, {}, &Order::frame);

  // Position samples every 100 frames for every live unit.
  for (Frame f = 0; f <= log.duration_frames; f += kSampleEvery) {
    for (const auto& u : units) {
      if (u.created > f || (u.died && *u.died <= f)) continue;
      const geom::Point p = u.position_at(f);
      const Location loc = locate(map, p.x, p.y);
      log.positions.push_back({f, u.id, to_pixel(p), loc.region_id, loc.cdr_id});
    }
  }

  // Economy every 25 frames.
  for (int p = 0; p < 2; ++p) {
    std::int64_t minerals = 50;
    std::int64_t gas = 0;
    for (Frame f = 0; f <= log.duration_frames; f += 25) {
      minerals = std::max<std::int64_t>(0, minerals + rng.uniform_int(-20, 40));
      gas = std::max<std::int64_t>(0, gas + rng.uniform_int(-10, 20));
      const std::int64_t supply = 8 + f / 600;
      log.economy.push_back({f, p, minerals, gas, supply, supply + 16});
    }
  }
  std::ranges::stable_sort(log.economy, {}, &EconomySample::frame);
  return out;
}

PlantedMixture random_mixture(std::size_t K, std::size_t N, double sd, std::uint64_t seed) {
  if (K == 0 || N == 0) throw Error(ErrorCode::InvalidArgument, "empty mixture");
  Rng rng(seed);
  PlantedMixture m;
  m.weights.assign(K, 1.0 / static_cast<double>(K));
  m.means = Matrix(K, N);
  m.variances = Matrix(K, N, sd * sd);
  for (std::size_t k = 0; k < K; ++k) {
    // Each component leans on a few types, anchored at type k so components differ.
    // The unit baseline keeps every mean coordinate away from the simplex boundary.
    const std::size_t anchor = k % N;
    std::vector<double> w(N, 1.0);
    w[anchor] += static_cast<double>(N);
    const auto extra = static_cast<std::size_t>(rng.uniform_int(1, std::min<std::int64_t>(3, static_cast<std::int64_t>(N))));
    for (std::size_t e = 0; e < extra; ++e) {
      w[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(N) - 1))] += rng.uniform(0.5, 2.0);
    }
    double total = 0.0;
    for (const double v : w) total += v;
    for (std::size_t d = 0; d < N; ++d) m.means(k, d) = w[d] / total;
  }
  return m;
}

namespace {

std::vector<double> draw_composition(const PlantedMixture& m, std::size_t k, Rng& rng) {
  const std::size_t n = m.N();
  std::vector<double> u(n);
  double total = 0.0;
  for (std::size_t d = 0; d < n; ++d) {
    const double v = m.means(k, d) + std::sqrt(m.variances(k, d)) * rng.normal();
    u[d] = std::max(0.0, v);
    total += u[d];
  }
  if (!(total > 0.0)) {
    // Every coordinate clamped away: fall back to the component mean.
    for (std::size_t d = 0; d < n; ++d) u[d] = m.means(k, d);
    total = 0.0;
    for (const double v : u) total += v;
  }
  for (auto& v : u) v /= total;
  return u;
}

}  // namespace

CompositionSample gen_compositions(const PlantedMixture& mixture, std::size_t M, std::uint64_t seed) {
  Rng rng(seed);
  CompositionSample s;
  s.data = Matrix(M, mixture.N());
  s.labels.resize(M);
  for (std::size_t i = 0; i < M; ++i) {
    const std::size_t k = rng.categorical(mixture.weights);
    s.labels[i] = k;
    const auto u = draw_composition(mixture, k, rng);
    std::ranges::copy(u, s.data.row(i).begin());
  }
  return s;
}

GeneratedBattles gen_battles(const BattleGenConfig& c) {
  if (c.planted.rows() != c.own.K() || c.planted.cols() != c.enemy.K()) {
    throw Error(ErrorCode::DimensionMismatch, "planted counter matrix must be K × K'");
  }
  if (!(c.max_disparity >= 1.0)) throw Error(ErrorCode::InvalidArgument, "max_disparity must be ≥ 1");
  Rng rng(c.seed);
  GeneratedBattles out;
  for (std::size_t g = 0; g < c.games; ++g) {
    const std::string game = c.game_prefix + "-" + std::to_string(g);
    const std::size_t fixed_own = rng.categorical(c.own.weights);
    const std::size_t fixed_enemy = rng.categorical(c.enemy.weights);
    Frame frame = 2400 + rng.uniform_int(0, 600);
    for (std::size_t b = 0; b < c.battles_per_game; ++b) {
      const std::size_t k = c.static_armies ? fixed_own : rng.categorical(c.own.weights);
      const std::size_t ek = c.static_armies ? fixed_enemy : rng.categorical(c.enemy.weights);
      BattleRecord r;
      r.game = game;
      r.frame = frame;
      r.scope = c.scope;
      r.own = {c.own_race, c.scope, draw_composition(c.own, k, rng), 0};
      r.enemy = {c.enemy_race, c.scope, draw_composition(c.enemy, ek, rng), 0};
      const double base = rng.uniform(1000.0, 5000.0);
      const double disp = rng.uniform(1.0, c.max_disparity);
      const bool own_bigger = rng.bernoulli(0.5);
      r.own_value = own_bigger ? base * disp : base;
      r.enemy_value = own_bigger ? base : base * disp;
      bool own_wins;
      if (rng.bernoulli(c.epsilon)) {
        own_wins = r.own_value >= r.enemy_value;
      } else {
        own_wins = rng.bernoulli(c.planted(k, ek));
      }
      r.winner = own_wins ? Side::Own : Side::Enemy;
      r.attack_id = static_cast<int>(b);
      r.own_pid = 0;
      out.rows.push_back(r);
      out.rows.push_back(mirror_perspective(r, 1));
      out.own_labels.push_back(k);
      out.enemy_labels.push_back(ek);
      frame += c.spacing + rng.uniform_int(-120, 120);
    }
  }
  return out;
}

Matrix cyclic_counter(std::size_t K, double strong) {
  Matrix m(K, K, 0.5);
  if (K < 2) return m;
  for (std::size_t c = 0; c < K; ++c) {
    const std::size_t beats = (c + 1) % K;
    m(c, beats) = strong;
    m(beats, c) = 1.0 - strong;
  }
  return m;
}

}  // namespace battlemix::synth
