#pragma once

// Replay telemetry: domain types and the line-oriented .rgd/.rod/.rld formats.
//
// Every record is one LF-terminated line of ';'-separated fields; lines that
// start with '#' and empty lines are ignored. Frames are the only time unit
// (24 frames per second).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace battlemix {

using Frame = std::int64_t;

inline constexpr double kFramesPerSecond = 24.0;

enum class Race { Protoss, Terran, Zerg };

std::string_view to_string(Race race);
std::optional<Race> parse_race(std::string_view s);
char race_letter(Race race);

struct PixelPos {
  std::int64_t x = 0;
  std::int64_t y = 0;
  bool operator==(const PixelPos&) const = default;
};

struct PlayerInfo {
  int id = 0;
  std::string name;
  Race race = Race::Protoss;
  bool operator==(const PlayerInfo&) const = default;
};

enum class EventKind { Creation, Morph, Destruction, Discovery, OwnershipChange };

/// Creation/Morph carry type, owner and position. Destruction carries only the
/// unit id (player_id = -1, no position). Discovery and OwnershipChange carry
/// a player id: the discovering player, respectively the new owner.
struct UnitEvent {
  Frame frame = 0;
  EventKind kind = EventKind::Creation;
  int unit_id = 0;
  std::string unit_type;
  int player_id = -1;
  std::optional<PixelPos> pos;
  bool operator==(const UnitEvent&) const = default;
};

struct EconomySample {
  Frame frame = 0;
  int player_id = 0;
  std::int64_t minerals = 0;
  std::int64_t gas = 0;
  std::int64_t supply = 0;
  std::int64_t max_supply = 0;
  bool operator==(const EconomySample&) const = default;
};

struct Order {
  Frame frame = 0;
  int player_id = 0;
  int unit_id = 0;
  std::string order_type;
  PixelPos target;
  std::optional<int> target_unit_id;
  bool operator==(const Order&) const = default;
};

struct PositionSample {
  Frame frame = 0;
  int unit_id = 0;
  PixelPos pos;
  int region_id = 0;
  int cdr_id = 0;
  bool operator==(const PositionSample&) const = default;
};

/// Square matrix of ground distances in pixels, row-major.
struct DistanceMatrix {
  static constexpr std::int64_t kUnreachable = -1;

  std::size_t n = 0;
  std::vector<std::int64_t> d;

  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t size) : n(size), d(size * size, 0) {}

  std::int64_t at(std::size_t i, std::size_t j) const { return d[i * n + j]; }
  std::int64_t& at(std::size_t i, std::size_t j) { return d[i * n + j]; }
  bool reachable(std::size_t i, std::size_t j) const { return at(i, j) != kUnreachable; }

  bool operator==(const DistanceMatrix&) const = default;
};

struct GameLog {
  std::string map_name;
  std::vector<PlayerInfo> players;
  std::vector<UnitEvent> events;
  std::vector<EconomySample> economy;
  std::vector<Order> orders;
  std::vector<PositionSample> positions;
  DistanceMatrix region_distances;
  DistanceMatrix cdr_distances;
  Frame duration_frames = 0;

  /// "PvT" style label, races in P < T < Z order.
  std::string matchup() const;
  const PlayerInfo* player(int id) const;

  bool operator==(const GameLog&) const = default;
};

std::string matchup_label(Race a, Race b);

// --- .rgd ------------------------------------------------------------------

struct RgdContent {
  std::string map_name;
  std::vector<PlayerInfo> players;
  std::vector<UnitEvent> events;
  std::vector<EconomySample> economy;
  /// From the optional `Frames;<n>` header line.
  std::optional<Frame> duration_frames;
};

RgdContent parse_rgd(std::string_view text);
std::vector<Order> parse_rod(std::string_view text);

struct RldContent {
  DistanceMatrix region_distances;
  DistanceMatrix cdr_distances;
  std::vector<PositionSample> positions;
};

RldContent parse_rld(std::string_view text);

std::string write_rgd(const GameLog& log);
std::string write_rod(const GameLog& log);
std::string write_rld(const GameLog& log);

/// Combines the three parsed files and checks cross-file invariants.
GameLog assemble_game(RgdContent rgd, std::vector<Order> orders, RldContent rld);

/// Throws InvalidGameLog describing the first violated invariant.
void validate_game(const GameLog& log);

struct GameFiles {
  std::filesystem::path rgd;
  std::filesystem::path rod;
  std::filesystem::path rld;
};

GameFiles game_files(const std::filesystem::path& dir, std::string_view stem);
GameLog read_game(const GameFiles& files);
void write_game(const GameLog& log, const GameFiles& files);

}  // namespace battlemix
