#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "battlemix/attacktrack.hpp"
#include "battlemix/unit_table.hpp"

namespace battlemix {

/// Unit-type proportions over the (race, scope) basis of a unit table.
struct CompositionVector {
  Race race = Race::Protoss;
  Scope scope = Scope::Military;
  std::vector<double> u;
  std::int64_t total_units = 0;

  bool operator==(const CompositionVector&) const = default;
};

/// v(unit) = minerals + 4/3 gas + 50 supply. Throws UnknownUnitType.
double unit_value(std::string_view unit_type, const UnitTable& table);
double army_value(std::span<const std::string> unit_types, const UnitTable& table);

/// max(a, b) / min(a, b). Throws ZeroValueArmy unless both are positive.
double disparity(double a_value, double b_value);

/// Proportions of `player_id`'s involved units that fall in scope and in the
/// race basis. Throws EmptyArmy when nothing is left after filtering.
CompositionVector extract_composition(const Attack& attack, int player_id, Race race, Scope scope,
                                      const UnitTable& table);

/// Composition of an explicit unit multiset (same filtering as above).
CompositionVector composition_of(std::span<const std::string> unit_types, Race race, Scope scope,
                                 const UnitTable& table);

enum class Side { Own, Enemy };

std::string_view to_string(Side side);

/// One battle seen from one player's side.
struct BattleRecord {
  std::string game;
  Frame frame = 0;
  Scope scope = Scope::Military;
  CompositionVector own;
  CompositionVector enemy;
  double own_value = 0.0;
  double enemy_value = 0.0;
  Side winner = Side::Own;
  int attack_id = 0;
  int own_pid = 0;

  std::string matchup() const { return matchup_label(own.race, enemy.race); }
  bool operator==(const BattleRecord&) const = default;
};

/// Same battle from the other side, whose player id is `other_pid`.
BattleRecord mirror_perspective(const BattleRecord& b, int other_pid);

/// Player with the smaller lost value Σv over units_lost; ties go to the defender.
int battle_winner(const Attack& attack, const UnitTable& table);

/// Two perspective rows per attack (players[0]'s first) for every attack in
/// which both armies are non-empty under `scope`; other attacks are skipped.
std::vector<BattleRecord> battles_from_attacks(const std::string& game, const GameLog& log,
                                               const std::vector<Attack>& attacks, Scope scope,
                                               const UnitTable& table);

/// Battles CSV: `game,frame,scope,race,own_vector…,enemy_race,enemy_vector…,
/// own_value,enemy_value,winner,attack,own_pid`. Vector lengths follow the
/// unit-table basis of each row's race and scope. Unit counts are not
/// serialized; parsed records carry total_units = 0.
std::string write_battles_csv(std::span<const BattleRecord> battles);
std::vector<BattleRecord> parse_battles_csv(std::string_view csv, const UnitTable& table);

}  // namespace battlemix
