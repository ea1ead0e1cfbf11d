#pragma once

// Attack reconstruction from unit deaths.
//
// A death either joins a live attack (the dying unit already takes part in it,
// or it died within its weapon range of the attack hull) or, when at least two
// military units stand within the context radius, opens a new attack. Each
// update grows the hull by the death position, pulls in every live unit within
// its own weapon range of the hull, and resets the attack's timeout. Attacks
// whose timeout runs out are finished; sides and type are resolved then.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "battlemix/geometry.hpp"
#include "battlemix/logmodel.hpp"
#include "battlemix/mapregions.hpp"
#include "battlemix/unit_table.hpp"

namespace battlemix {

enum class AttackType { Ground, AirRaid, Invisible, Drop };

std::string_view to_string(AttackType type);
std::optional<AttackType> parse_attack_type(std::string_view s);

struct TrackerConfig {
  Frame timeout = 480;              // 20 s
  double context_radius_px = 400.0;
  Frame order_window = 240;         // attack orders considered before start
  std::size_t min_military = 2;
};

struct Attack {
  int attack_id = -1;
  Frame start_frame = 0;
  Frame end_frame = 0;
  geom::ConvexHull hull;
  geom::Point position;
  int region_id = kNoLabel;
  int cdr_id = kNoLabel;
  int attacker_pid = -1;
  int defender_pid = -1;
  std::map<int, std::set<int>> units_involved;  // player -> unit ids
  std::map<int, std::set<int>> units_lost;
  std::map<int, std::string> unit_types;        // last type seen while involved
  std::map<int, geom::Point> unit_positions;    // last position seen while involved
  int first_casualty = -1;
  int first_casualty_owner = -1;
  AttackType type = AttackType::Ground;
  Frame tick = 0;

  bool involves(int unit_id) const;
  std::vector<int> involved_of(int player_id) const;
  std::vector<int> lost_of(int player_id) const;
};

struct UnitState {
  int unit_id = 0;
  std::string unit_type;
  int owner = -1;
  geom::Point pos;
};

/// Live units at the current frame, keyed by id.
class WorldView {
 public:
  void create(int unit_id, std::string unit_type, int owner, geom::Point pos);
  void morph(int unit_id, std::string unit_type, int owner, geom::Point pos);
  void set_owner(int unit_id, int owner);
  void move(int unit_id, geom::Point pos);
  void remove(int unit_id);

  const UnitState* find(int unit_id) const;
  const std::map<int, UnitState>& units() const { return units_; }

 private:
  std::map<int, UnitState> units_;
};

struct TrackerState {
  std::vector<Attack> tracked;   // live, in creation order; tick > 0
  std::vector<Attack> finished;  // in expiry order
  int next_id = 0;
};

struct TrackerContext {
  const UnitTable& table;
  TrackerConfig config;
};

/// Returns the id of the attack the death was attributed to, if any.
/// Throws UnknownUnit when the unit is not alive in `world`.
std::optional<int> unit_death_event(TrackerState& state, int unit_id, Frame frame,
                                    const WorldView& world, const TrackerContext& ctx);

/// Grows the hull by the death position of `unit_id`, merges the context into
/// units_involved, records the loss and resets the timeout. Returns the
/// context: live units within their weapon range of the grown hull.
std::vector<int> update(Attack& attack, int unit_id, Frame frame, const WorldView& world,
                        const TrackerContext& ctx);

/// One frame of timeout bookkeeping; expired attacks move to `finished`.
void tick_update(TrackerState& state, Frame frame);

/// Drop > Invisible > AirRaid > Ground, judged on the attacker's units.
/// Throws NoAttackerUnits.
AttackType classify_type(const Attack& attack, const UnitTable& table);

/// Drives the tracker over a whole log. Attacks come back ordered by start
/// frame with ids 0..n-1, sides resolved, typed and located (region labels
/// stay kNoLabel when `regions` is null).
std::vector<Attack> run_tracker(const GameLog& log, const RegionMap* regions,
                                const UnitTable& table, const TrackerConfig& config = {});

/// Attacks CSV; A/B columns follow the order of log.players.
std::string write_attacks_csv(const std::vector<Attack>& attacks, const GameLog& log);

}  // namespace battlemix
