#include "battlemix/composition.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "battlemix/error.hpp"
#include "battlemix/text.hpp"

namespace battlemix {

namespace {

constexpr std::string_view kBattlesHeader =
    "game,frame,scope,race,own_vector...,enemy_race,enemy_vector...,own_value,enemy_value,winner,"
    "attack,own_pid";

[[noreturn]] void bad_row(std::size_t line, const std::string& reason) {
  throw Error(ErrorCode::MalformedLine, "battles: " + reason, line);
}

std::vector<std::string> unit_types_of(const Attack& attack, const std::vector<int>& ids) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (const int id : ids) out.push_back(attack.unit_types.at(id));
  return out;
}

std::vector<std::string> scoped(const std::vector<std::string>& types, Race race, Scope scope,
                                const UnitTable& table) {
  std::vector<std::string> out;
  for (const auto& t : types) {
    const auto& a = table.at(t);
    if (a.race == race && a.in_scope(scope)) out.push_back(t);
  }
  return out;
}

}  // namespace

double unit_value(std::string_view unit_type, const UnitTable& table) {
  const auto& a = table.at(unit_type);
  return a.minerals + (4.0 / 3.0) * a.gas + 50.0 * a.supply;
}

double army_value(std::span<const std::string> unit_types, const UnitTable& table) {
  double v = 0.0;
  for (const auto& t : unit_types) v += unit_value(t, table);
  return v;
}

double disparity(double a_value, double b_value) {
  if (!(a_value > 0.0) || !(b_value > 0.0)) {
    throw Error(ErrorCode::ZeroValueArmy, "army values must be positive");
  }
  return std::max(a_value, b_value) / std::min(a_value, b_value);
}

CompositionVector composition_of(std::span<const std::string> unit_types, Race race, Scope scope,
                                 const UnitTable& table) {
  const auto basis = table.basis(race, scope);
  std::map<std::string_view, std::size_t> slot;
  for (std::size_t i = 0; i < basis.size(); ++i) slot.emplace(basis[i], i);

  CompositionVector c;
  c.race = race;
  c.scope = scope;
  c.u.assign(basis.size(), 0.0);
  std::vector<std::int64_t> counts(basis.size(), 0);
  for (const auto& t : unit_types) {
    table.at(t);  // unknown types are an error even when filtered out
    const auto it = slot.find(t);
    if (it == slot.end()) continue;
    ++counts[it->second];
    ++c.total_units;
  }
  if (c.total_units == 0) {
    throw Error(ErrorCode::EmptyArmy, std::string("no ") + std::string(to_string(race)) +
                                          " units in scope " + std::string(to_string(scope)));
  }
  for (std::size_t i = 0; i < counts.size(); ++i) {
    c.u[i] = static_cast<double>(counts[i]) / static_cast<double>(c.total_units);
  }
  return c;
}

CompositionVector extract_composition(const Attack& attack, int player_id, Race race, Scope scope,
                                      const UnitTable& table) {
  const auto types = unit_types_of(attack, attack.involved_of(player_id));
  return composition_of(types, race, scope, table);
}

std::string_view to_string(Side side) { return side == Side::Own ? "own" : "enemy"; }

BattleRecord mirror_perspective(const BattleRecord& b, int other_pid) {
  BattleRecord m = b;
  std::swap(m.own, m.enemy);
  std::swap(m.own_value, m.enemy_value);
  m.winner = b.winner == Side::Own ? Side::Enemy : Side::Own;
  m.own_pid = other_pid;
  return m;
}

int battle_winner(const Attack& attack, const UnitTable& table) {
  auto lost_value = [&](int pid) {
    return army_value(unit_types_of(attack, attack.lost_of(pid)), table);
  };
  const int att = attack.attacker_pid;
  const int def = attack.defender_pid;
  const double la = lost_value(att);
  const double ld = lost_value(def);
  return la < ld ? att : def;
}

std::vector<BattleRecord> battles_from_attacks(const std::string& game, const GameLog& log,
                                               const std::vector<Attack>& attacks, Scope scope,
                                               const UnitTable& table) {
  std::vector<BattleRecord> out;
  const auto& pa = log.players.at(0);
  const auto& pb = log.players.at(1);
  for (const auto& a : attacks) {
    const auto types_a = scoped(unit_types_of(a, a.involved_of(pa.id)), pa.race, scope, table);
    const auto types_b = scoped(unit_types_of(a, a.involved_of(pb.id)), pb.race, scope, table);
    if (types_a.empty() || types_b.empty()) continue;

    BattleRecord r;
    r.game = game;
    r.frame = a.start_frame;
    r.scope = scope;
    r.own = composition_of(types_a, pa.race, scope, table);
    r.enemy = composition_of(types_b, pb.race, scope, table);
    r.own_value = army_value(types_a, table);
    r.enemy_value = army_value(types_b, table);
    if (!(r.own_value > 0.0) || !(r.enemy_value > 0.0)) continue;
    r.winner = battle_winner(a, table) == pa.id ? Side::Own : Side::Enemy;
    r.attack_id = a.attack_id;
    r.own_pid = pa.id;

    BattleRecord m = mirror_perspective(r, pb.id);
    out.push_back(std::move(r));
    out.push_back(std::move(m));
  }
  return out;
}

std::string write_battles_csv(std::span<const BattleRecord> battles) {
  std::string out(kBattlesHeader);
  out += '\n';
  for (const auto& b : battles) {
    out += b.game + "," + std::to_string(b.frame) + "," + std::string(to_string(b.scope)) + "," +
           std::string(to_string(b.own.race));
    for (const double v : b.own.u) out += "," + text::format_double(v);
    out += "," + std::string(to_string(b.enemy.race));
    for (const double v : b.enemy.u) out += "," + text::format_double(v);
    out += "," + text::format_double(b.own_value) + "," + text::format_double(b.enemy_value) + "," +
           std::string(to_string(b.winner)) + "," + std::to_string(b.attack_id) + "," +
           std::to_string(b.own_pid) + "\n";
  }
  return out;
}

std::vector<BattleRecord> parse_battles_csv(std::string_view csv, const UnitTable& table) {
  std::vector<BattleRecord> out;
  bool header_seen = false;
  std::map<std::pair<Race, Scope>, std::size_t> dims;
  auto dim = [&](Race r, Scope s) {
    auto it = dims.find({r, s});
    if (it == dims.end()) it = dims.emplace(std::pair{r, s}, table.basis(r, s).size()).first;
    return it->second;
  };

  text::for_each_record(csv, [&](std::size_t line, std::string_view rec) {
    if (!header_seen) {
      if (rec != kBattlesHeader) bad_row(line, "unexpected header");
      header_seen = true;
      return;
    }
    const auto f = text::split(rec, ',');
    if (f.size() < 5) bad_row(line, "too few fields");
    BattleRecord b;
    b.game = std::string(f[0]);
    const auto frame = text::to_int(f[1]);
    if (!frame || *frame < 0) bad_row(line, "bad frame");
    b.frame = *frame;
    b.scope = parse_scope(f[2]);
    const auto own_race = parse_race(f[3]);
    if (!own_race) bad_row(line, "bad race");
    const std::size_t n_own = dim(*own_race, b.scope);
    std::size_t i = 4;
    auto read_vector = [&](CompositionVector& c, Race race, std::size_t n) {
      c.race = race;
      c.scope = b.scope;
      if (i + n > f.size()) bad_row(line, "vector shorter than the basis");
      double sum = 0.0;
      for (std::size_t k = 0; k < n; ++k, ++i) {
        const auto v = text::to_double(f[i]);
        if (!v || *v < 0.0 || *v > 1.0) bad_row(line, "bad proportion");
        c.u.push_back(*v);
        sum += *v;
      }
      if (std::abs(sum - 1.0) > 1e-9) bad_row(line, "proportions must sum to 1");
      c.total_units = 0;  // counts are not serialized
    };
    read_vector(b.own, *own_race, n_own);
    if (i >= f.size()) bad_row(line, "missing enemy race");
    const auto enemy_race = parse_race(f[i++]);
    if (!enemy_race) bad_row(line, "bad enemy race");
    read_vector(b.enemy, *enemy_race, dim(*enemy_race, b.scope));
    if (f.size() != i + 5) bad_row(line, "wrong field count for the declared races");
    const auto ov = text::to_double(f[i]);
    const auto ev = text::to_double(f[i + 1]);
    if (!ov || !ev || !(*ov > 0.0) || !(*ev > 0.0)) bad_row(line, "army values must be positive");
    b.own_value = *ov;
    b.enemy_value = *ev;
    if (f[i + 2] == "own") {
      b.winner = Side::Own;
    } else if (f[i + 2] == "enemy") {
      b.winner = Side::Enemy;
    } else {
      bad_row(line, "winner must be own or enemy");
    }
    const auto aid = text::to_int(f[i + 3]);
    const auto pid = text::to_int(f[i + 4]);
    if (!aid || !pid) bad_row(line, "bad attack or player id");
    b.attack_id = static_cast<int>(*aid);
    b.own_pid = static_cast<int>(*pid);
    out.push_back(std::move(b));
  });
  if (!header_seen) throw Error(ErrorCode::MalformedLine, "battles: missing header");
  return out;
}

}  // namespace battlemix
