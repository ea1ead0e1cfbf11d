#include "battlemix/attacktrack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "battlemix/error.hpp"

namespace battlemix {

namespace {

geom::Point to_point(const PixelPos& p) {
  return {static_cast<double>(p.x), static_cast<double>(p.y)};
}

double weapon_range(const UnitTable& table, const std::string& type) {
  return table.at(type).max_weapon_range_px;
}

void record_unit(Attack& a, const UnitState& u) {
  a.units_involved[u.owner].insert(u.unit_id);
  a.unit_types[u.unit_id] = u.unit_type;
  a.unit_positions[u.unit_id] = u.pos;
}

Attack new_attack(int id, const UnitState& dying, Frame frame, const WorldView& world,
                  const TrackerContext& ctx) {
  Attack a;
  a.attack_id = id;
  a.start_frame = frame;
  a.end_frame = frame;
  std::vector<geom::Point> pts{dying.pos};
  for (const auto& [uid, u] : world.units()) {
    if (uid == dying.unit_id) continue;
    if (!ctx.table.at(u.unit_type).is_military) continue;
    if (geom::distance(u.pos, dying.pos) <= ctx.config.context_radius_px) pts.push_back(u.pos);
  }
  a.hull = geom::ConvexHull::of(pts);
  a.first_casualty = dying.unit_id;
  a.first_casualty_owner = dying.owner;
  return a;
}

std::size_t military_around(const UnitState& dying, const WorldView& world,
                            const TrackerContext& ctx) {
  std::size_t n = 0;
  for (const auto& [uid, u] : world.units()) {
    if (uid == dying.unit_id) continue;
    if (!ctx.table.at(u.unit_type).is_military) continue;
    if (geom::distance(u.pos, dying.pos) <= ctx.config.context_radius_px) ++n;
  }
  return n;
}

bool is_attack_order(const std::string& t) { return t == "AttackUnit" || t == "AttackMove"; }

/// Per-unit region history: (frame, region) from the creation position and
/// every position sample, in frame order.
using RegionHistory = std::unordered_map<int, std::vector<std::pair<Frame, int>>>;

RegionHistory build_region_history(const GameLog& log, const RegionMap* regions) {
  RegionHistory h;
  if (regions == nullptr) return h;
  std::size_t ei = 0;
  std::size_t pi = 0;
  while (ei < log.events.size() || pi < log.positions.size()) {
    const bool take_event = pi == log.positions.size() ||
                            (ei < log.events.size() && log.events[ei].frame <= log.positions[pi].frame);
    if (take_event) {
      const auto& e = log.events[ei++];
      if ((e.kind == EventKind::Creation || e.kind == EventKind::Morph) && e.pos) {
        const auto p = to_point(*e.pos);
        try {
          h[e.unit_id].emplace_back(e.frame, locate(*regions, p.x, p.y).region_id);
        } catch (const Error&) {
          // positions outside the grid carry no region
        }
      }
    } else {
      const auto& s = log.positions[pi++];
      h[s.unit_id].emplace_back(s.frame, s.region_id);
    }
  }
  return h;
}

/// Frame at which the unit last entered `region` at or before `until`, if it is
/// in that region at `until`.
std::optional<Frame> arrival_frame(const RegionHistory& h, int unit_id, int region, Frame until) {
  const auto it = h.find(unit_id);
  if (it == h.end()) return std::nullopt;
  std::optional<Frame> arrived;
  int prev = kNoLabel;
  bool any = false;
  for (const auto& [f, r] : it->second) {
    if (f > until) break;
    if (r == region && (!any || prev != region)) arrived = f;
    if (r != region) arrived.reset();
    prev = r;
    any = true;
  }
  return arrived;
}

void resolve_sides(Attack& a, const GameLog& log, const RegionHistory& history,
                   const std::unordered_map<int, std::vector<std::size_t>>& orders_by_unit,
                   const TrackerContext& ctx) {
  const int p0 = log.players[0].id;
  const int p1 = log.players[1].id;

  auto aggressive_units = [&](int pid) {
    std::size_t n = 0;
    const auto it = a.units_involved.find(pid);
    if (it == a.units_involved.end()) return n;
    const Frame from = a.start_frame - ctx.config.order_window;
    for (const int uid : it->second) {
      const auto oit = orders_by_unit.find(uid);
      if (oit == orders_by_unit.end()) continue;
      const double range = weapon_range(ctx.table, a.unit_types.at(uid));
      for (const auto idx : oit->second) {
        const auto& o = log.orders[idx];
        if (o.frame < from || o.frame > a.end_frame) continue;
        if (!is_attack_order(o.order_type)) continue;
        const bool target_unit_in = o.target_unit_id && a.involves(*o.target_unit_id);
        const bool target_pos_in = a.hull.distance_to(to_point(o.target)) <= range;
        if (target_unit_in || target_pos_in) {
          ++n;
          break;
        }
      }
    }
    return n;
  };

  const auto n0 = aggressive_units(p0);
  const auto n1 = aggressive_units(p1);
  int attacker = -1;
  if (n0 != n1) {
    attacker = n0 > n1 ? p0 : p1;
  } else if (a.region_id != kNoLabel) {
    auto latest = [&](int pid) {
      std::optional<Frame> best;
      const auto it = a.units_involved.find(pid);
      if (it == a.units_involved.end()) return best;
      for (const int uid : it->second) {
        const auto f = arrival_frame(history, uid, a.region_id, a.end_frame);
        if (f && (!best || *f > *best)) best = f;
      }
      return best;
    };
    const auto f0 = latest(p0);
    const auto f1 = latest(p1);
    if (f0 != f1) {
      if (!f1 || (f0 && *f0 > *f1)) {
        attacker = p0;
      } else {
        attacker = p1;
      }
    }
  }
  if (attacker == -1) {
    // Still tied: the side that took the first loss is the defender.
    attacker = a.first_casualty_owner == p0 ? p1 : p0;
  }
  a.attacker_pid = attacker;
  a.defender_pid = attacker == p0 ? p1 : p0;
}

void finish(TrackerState& state, std::size_t idx, Frame frame) {
  Attack a = std::move(state.tracked[idx]);
  state.tracked.erase(state.tracked.begin() + static_cast<std::ptrdiff_t>(idx));
  a.end_frame = frame;
  a.tick = 0;
  state.finished.push_back(std::move(a));
}

}  // namespace

std::string_view to_string(AttackType type) {
  switch (type) {
    case AttackType::Ground: return "ground";
    case AttackType::AirRaid: return "air";
    case AttackType::Invisible: return "invisible";
    case AttackType::Drop: return "drop";
  }
  return "ground";
}

std::optional<AttackType> parse_attack_type(std::string_view s) {
  if (s == "ground") return AttackType::Ground;
  if (s == "air") return AttackType::AirRaid;
  if (s == "invisible") return AttackType::Invisible;
  if (s == "drop") return AttackType::Drop;
  return std::nullopt;
}

bool Attack::involves(int unit_id) const {
  for (const auto& [pid, ids] : units_involved) {
    if (ids.contains(unit_id)) return true;
  }
  return false;
}

std::vector<int> Attack::involved_of(int player_id) const {
  const auto it = units_involved.find(player_id);
  if (it == units_involved.end()) return {};
  return {it->second.begin(), it->second.end()};
}

std::vector<int> Attack::lost_of(int player_id) const {
  const auto it = units_lost.find(player_id);
  if (it == units_lost.end()) return {};
  return {it->second.begin(), it->second.end()};
}

void WorldView::create(int unit_id, std::string unit_type, int owner, geom::Point pos) {
  units_[unit_id] = UnitState{unit_id, std::move(unit_type), owner, pos};
}

void WorldView::morph(int unit_id, std::string unit_type, int owner, geom::Point pos) {
  create(unit_id, std::move(unit_type), owner, pos);
}

void WorldView::set_owner(int unit_id, int owner) {
  if (auto it = units_.find(unit_id); it != units_.end()) it->second.owner = owner;
}

void WorldView::move(int unit_id, geom::Point pos) {
  if (auto it = units_.find(unit_id); it != units_.end()) it->second.pos = pos;
}

void WorldView::remove(int unit_id) { units_.erase(unit_id); }

const UnitState* WorldView::find(int unit_id) const {
  const auto it = units_.find(unit_id);
  return it == units_.end() ? nullptr : &it->second;
}

std::vector<int> update(Attack& attack, int unit_id, Frame frame, const WorldView& world,
                        const TrackerContext& ctx) {
  const UnitState* dying = world.find(unit_id);
  if (dying == nullptr) throw Error(ErrorCode::UnknownUnit, "unit " + std::to_string(unit_id));

  attack.hull = attack.hull.with(dying->pos);
  std::vector<int> context;
  for (const auto& [uid, u] : world.units()) {
    const double range = weapon_range(ctx.table, u.unit_type);
    if (attack.hull.distance_to(u.pos) <= range) {
      context.push_back(uid);
      record_unit(attack, u);
    }
  }
  // The dying unit sits on the hull, so it is always part of the context.
  attack.units_lost[dying->owner].insert(unit_id);
  attack.end_frame = std::max(attack.end_frame, frame);
  attack.tick = ctx.config.timeout;
  return context;
}

std::optional<int> unit_death_event(TrackerState& state, int unit_id, Frame frame,
                                    const WorldView& world, const TrackerContext& ctx) {
  const UnitState* dying = world.find(unit_id);
  if (dying == nullptr) throw Error(ErrorCode::UnknownUnit, "unit " + std::to_string(unit_id));

  const double range = weapon_range(ctx.table, dying->unit_type);
  for (auto& a : state.tracked) {
    if (a.involves(unit_id) || a.hull.distance_to(dying->pos) <= range) {
      update(a, unit_id, frame, world, ctx);
      return a.attack_id;
    }
  }
  if (military_around(*dying, world, ctx) < ctx.config.min_military) return std::nullopt;

  Attack a = new_attack(state.next_id++, *dying, frame, world, ctx);
  update(a, unit_id, frame, world, ctx);
  state.tracked.push_back(std::move(a));
  return state.tracked.back().attack_id;
}

void tick_update(TrackerState& state, Frame frame) {
  for (std::size_t i = 0; i < state.tracked.size();) {
    auto& a = state.tracked[i];
    --a.tick;
    if (a.tick <= 0) {
      finish(state, i, frame);
    } else {
      ++i;
    }
  }
}

AttackType classify_type(const Attack& attack, const UnitTable& table) {
  const auto it = attack.units_involved.find(attack.attacker_pid);
  if (it == attack.units_involved.end() || it->second.empty()) {
    throw Error(ErrorCode::NoAttackerUnits, "attack " + std::to_string(attack.attack_id));
  }
  bool has_transport = false;
  bool has_ground_military = false;
  std::size_t damage_dealers = 0;
  std::size_t cloaked_dealers = 0;
  std::size_t military = 0;
  std::size_t flying_military = 0;
  for (const int uid : it->second) {
    const auto& a = table.at(attack.unit_types.at(uid));
    has_transport = has_transport || a.is_transport;
    if (a.is_military && !a.is_flying) has_ground_military = true;
    if (a.is_military && a.max_weapon_range_px > 0.0) {
      ++damage_dealers;
      if (a.is_cloaked) ++cloaked_dealers;
    }
    if (a.is_military) {
      ++military;
      if (a.is_flying) ++flying_military;
    }
  }
  if (has_transport && has_ground_military) return AttackType::Drop;
  if (damage_dealers > 0 && cloaked_dealers == damage_dealers) return AttackType::Invisible;
  if (military > 0 && flying_military == military) return AttackType::AirRaid;
  return AttackType::Ground;
}

std::vector<Attack> run_tracker(const GameLog& log, const RegionMap* regions,
                                const UnitTable& table, const TrackerConfig& config) {
  if (log.players.size() != 2) throw Error(ErrorCode::InvalidGameLog, "expected 2 players");
  const TrackerContext ctx{table, config};
  WorldView world;
  TrackerState state;

  std::size_t ei = 0;
  std::size_t pi = 0;
  for (Frame f = 0; f <= log.duration_frames; ++f) {
    std::vector<int> deaths;
    for (; ei < log.events.size() && log.events[ei].frame == f; ++ei) {
      const auto& e = log.events[ei];
      switch (e.kind) {
        case EventKind::Creation:
          world.create(e.unit_id, e.unit_type, e.player_id, to_point(e.pos.value_or(PixelPos{})));
          break;
        case EventKind::Morph:
          world.morph(e.unit_id, e.unit_type, e.player_id, to_point(e.pos.value_or(PixelPos{})));
          break;
        case EventKind::OwnershipChange:
          world.set_owner(e.unit_id, e.player_id);
          break;
        case EventKind::Discovery:
          break;
        case EventKind::Destruction:
          deaths.push_back(e.unit_id);
          break;
      }
    }
    for (; pi < log.positions.size() && log.positions[pi].frame == f; ++pi) {
      world.move(log.positions[pi].unit_id, to_point(log.positions[pi].pos));
    }
    for (const int uid : deaths) {
      unit_death_event(state, uid, f, world, ctx);
      world.remove(uid);
    }
    tick_update(state, f);
  }
  while (!state.tracked.empty()) finish(state, 0, log.duration_frames);

  std::vector<Attack> attacks = std::move(state.finished);
  std::stable_sort(attacks.begin(), attacks.end(), [](const Attack& a, const Attack& b) {
    return a.start_frame < b.start_frame ||
           (a.start_frame == b.start_frame && a.attack_id < b.attack_id);
  });

  const auto history = build_region_history(log, regions);
  std::unordered_map<int, std::vector<std::size_t>> orders_by_unit;
  for (std::size_t i = 0; i < log.orders.size(); ++i) orders_by_unit[log.orders[i].unit_id].push_back(i);

  for (std::size_t i = 0; i < attacks.size(); ++i) {
    auto& a = attacks[i];
    a.attack_id = static_cast<int>(i);
    a.position = a.hull.centroid();
    if (regions != nullptr) {
      try {
        const auto loc = locate(*regions, a.position.x, a.position.y);
        a.region_id = loc.region_id;
        a.cdr_id = loc.cdr_id;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::OffGrid) throw;
      }
    }
    resolve_sides(a, log, history, orders_by_unit, ctx);
    a.type = classify_type(a, table);
  }
  return attacks;
}

std::string write_attacks_csv(const std::vector<Attack>& attacks, const GameLog& log) {
  auto ids = [](const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i != 0) s += '|';
      s += std::to_string(v[i]);
    }
    return s;
  };
  const int pa = log.players.at(0).id;
  const int pb = log.players.at(1).id;
  std::string out =
      "attack_id,start_frame,end_frame,type,attacker_pid,defender_pid,x,y,region,cdr,unitsA,unitsB,"
      "lostA,lostB\n";
  for (const auto& a : attacks) {
    out += std::to_string(a.attack_id) + "," + std::to_string(a.start_frame) + "," +
           std::to_string(a.end_frame) + "," + std::string(to_string(a.type)) + "," +
           std::to_string(a.attacker_pid) + "," + std::to_string(a.defender_pid) + "," +
           std::to_string(std::llround(a.position.x)) + "," +
           std::to_string(std::llround(a.position.y)) + "," + std::to_string(a.region_id) + "," +
           std::to_string(a.cdr_id) + "," + ids(a.involved_of(pa)) + "," + ids(a.involved_of(pb)) +
           "," + ids(a.lost_of(pa)) + "," + ids(a.lost_of(pb)) + "\n";
  }
  return out;
}

}  // namespace battlemix
