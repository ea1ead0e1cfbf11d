#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "battlemix/logmodel.hpp"

namespace battlemix {

/// Army scope for compositions and values: "m" counts military units only,
/// "ws" also counts workers and static defenses (every armed non-military unit).
enum class Scope { Military, WithStatic };

std::string_view to_string(Scope scope);
Scope parse_scope(std::string_view s);

struct UnitAttributes {
  std::string unit_type;
  Race race = Race::Protoss;
  double minerals = 0.0;
  double gas = 0.0;
  double supply = 0.0;
  bool is_military = false;
  bool is_flying = false;
  bool is_cloaked = false;
  bool is_transport = false;
  double max_weapon_range_px = 0.0;

  bool in_scope(Scope scope) const;
};

/// Per-type attributes loaded from the unit CSV. Lookups of types missing from
/// the table fail with UnknownUnitType; parsing never consults the table.
class UnitTable {
 public:
  static UnitTable from_csv(std::string_view csv);
  static const UnitTable& defaults();

  const UnitAttributes& at(std::string_view unit_type) const;
  const UnitAttributes* find(std::string_view unit_type) const;
  bool contains(std::string_view unit_type) const { return find(unit_type) != nullptr; }

  /// Canonical composition basis: in-scope types of `race`, lexicographic.
  std::vector<std::string> basis(Race race, Scope scope) const;
  std::vector<std::string> types(Race race) const;

  std::size_t size() const { return by_type_.size(); }
  std::string to_csv() const;

 private:
  std::map<std::string, UnitAttributes, std::less<>> by_type_;
};

std::string_view default_unit_csv();

}  // namespace battlemix
