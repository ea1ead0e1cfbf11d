#pragma once

// Seeded synthetic data with known ground truth: tile maps, game logs with
// scripted skirmishes, planted composition mixtures and battle outcomes.
// Identical configurations produce identical outputs.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "battlemix/attacktrack.hpp"
#include "battlemix/composition.hpp"
#include "battlemix/logmodel.hpp"
#include "battlemix/mapregions.hpp"
#include "battlemix/matrix.hpp"
#include "battlemix/unit_table.hpp"

namespace battlemix::synth {

inline constexpr int kMapTemplateCount = 5;

/// 64×64 tiles of 32 px. Walls split the map into cells (the base regions)
/// joined by 3-tile choke gaps: template 0 is 2×2, 1 is 3×2, 2 is 3×3, 3 is
/// 2×3 with obstacle blocks, 4 is 2×2 plus a sealed room (an unreachable
/// region). Player bases sit in opposite corners.
GridFile map_template(int template_id);
std::string map_template_name(int template_id);
RegionMap map_template_regions(int template_id);

struct TruthAttack {
  int index = 0;
  AttackType type = AttackType::Ground;
  int attacker_pid = 0;
  int defender_pid = 1;
  Frame first_death = 0;
  Frame last_death = 0;
  PixelPos site;
  std::map<int, std::set<int>> units;  // player -> unit ids
  std::map<int, std::set<int>> lost;

  bool operator==(const TruthAttack&) const = default;
};

std::string write_truth(const std::vector<TruthAttack>& truth);
std::vector<TruthAttack> parse_truth(std::string_view text);

struct GameGenConfig {
  std::uint64_t seed = 1;
  int map_template = 0;
  Race race_a = Race::Protoss;
  Race race_b = Race::Terran;
  int skirmishes = 3;
  /// Attack type per skirmish; random when shorter than `skirmishes`.
  std::vector<AttackType> types;
  /// All skirmishes at one site instead of a fresh site each.
  bool same_site = false;
  /// Quiet frames between one skirmish's last death and the next one's first.
  Frame min_gap = 2880;
  Frame max_gap = 4000;
  int min_units = 3;
  int max_units = 7;
};

struct GeneratedGame {
  GameLog log;
  std::vector<TruthAttack> truth;
};

GeneratedGame gen_gamelog(const GameGenConfig& config, const UnitTable& table = UnitTable::defaults());

/// Diagonal Gaussian mixture on composition vectors.
struct PlantedMixture {
  std::vector<double> weights;
  Matrix means;      // K × N, rows on the simplex
  Matrix variances;  // K × N

  std::size_t K() const { return weights.size(); }
  std::size_t N() const { return means.cols(); }
};

/// K components over N types, each concentrated on a few types, with
/// per-coordinate standard deviation `sd`.
PlantedMixture random_mixture(std::size_t K, std::size_t N, double sd, std::uint64_t seed);

struct CompositionSample {
  Matrix data;
  std::vector<std::size_t> labels;
};

/// Component by weight, Gaussian draw, clamp at 0, renormalize to the simplex.
CompositionSample gen_compositions(const PlantedMixture& mixture, std::size_t M, std::uint64_t seed);

struct BattleGenConfig {
  std::uint64_t seed = 1;
  Race own_race = Race::Protoss;
  Race enemy_race = Race::Terran;
  Scope scope = Scope::Military;
  PlantedMixture own;
  PlantedMixture enemy;
  /// planted(c, ec): probability that own cluster c beats enemy cluster ec.
  Matrix planted;
  /// Probability that the outcome is decided by army value instead.
  double epsilon = 0.0;
  /// Disparity drawn uniformly in [1, max_disparity].
  double max_disparity = 1.5;
  std::size_t games = 10;
  std::size_t battles_per_game = 10;
  /// Each player keeps one cluster for the whole game.
  bool static_armies = false;
  Frame spacing = 2880;
  std::string game_prefix = "synth";
};

struct GeneratedBattles {
  /// Two rows per battle: player 0's perspective, then player 1's.
  std::vector<BattleRecord> rows;
  std::vector<std::size_t> own_labels;  // per battle, player 0's cluster
  std::vector<std::size_t> enemy_labels;
};

GeneratedBattles gen_battles(const BattleGenConfig& config);

/// Rock-paper-scissors counter matrix over K clusters: cluster c beats
/// c+1 (mod K) with probability `strong`, loses with 1 − strong, draws 0.5
/// against itself and 0.5 elsewhere.
Matrix cyclic_counter(std::size_t K, double strong);

}  // namespace battlemix::synth
