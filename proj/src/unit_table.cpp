#include "battlemix/unit_table.hpp"

#include "battlemix/error.hpp"
#include "battlemix/text.hpp"

namespace battlemix {

namespace {

constexpr std::string_view kHeader =
    "unit_type,race,minerals,gas,supply,is_military,is_flying,is_cloaked,is_transport,"
    "max_weapon_range_px";

[[noreturn]] void bad_row(std::size_t line, const std::string& reason) {
  throw Error(ErrorCode::MalformedLine, "unit table: " + reason, line);
}

double cost(std::string_view s, std::size_t line, const char* what) {
  const auto v = text::to_double(s);
  if (!v || *v < 0.0) bad_row(line, std::string("bad ") + what + " '" + std::string(s) + "'");
  return *v;
}

bool flag(std::string_view s, std::size_t line, const char* what) {
  if (s == "1") return true;
  if (s == "0") return false;
  bad_row(line, std::string("flag ") + what + " must be 0 or 1");
}

std::string fmt(double v) { return text::format_double(v); }

}  // namespace

std::string_view to_string(Scope scope) { return scope == Scope::Military ? "m" : "ws"; }

Scope parse_scope(std::string_view s) {
  if (s == "m") return Scope::Military;
  if (s == "ws") return Scope::WithStatic;
  throw Error(ErrorCode::InvalidArgument, "scope must be 'm' or 'ws', got '" + std::string(s) + "'");
}

bool UnitAttributes::in_scope(Scope scope) const {
  if (is_military) return true;
  return scope == Scope::WithStatic && max_weapon_range_px > 0.0;
}

UnitTable UnitTable::from_csv(std::string_view csv) {
  UnitTable table;
  bool header_seen = false;
  text::for_each_record(csv, [&](std::size_t line, std::string_view rec) {
    if (!header_seen) {
      if (rec != kHeader) bad_row(line, "unexpected header");
      header_seen = true;
      return;
    }
    const auto f = text::split(rec, ',');
    if (f.size() != 10) bad_row(line, "expected 10 columns");
    UnitAttributes a;
    if (f[0].empty()) bad_row(line, "empty unit type");
    a.unit_type = std::string(f[0]);
    const auto race = parse_race(f[1]);
    if (!race) bad_row(line, "unknown race '" + std::string(f[1]) + "'");
    a.race = *race;
    a.minerals = cost(f[2], line, "minerals");
    a.gas = cost(f[3], line, "gas");
    a.supply = cost(f[4], line, "supply");
    a.is_military = flag(f[5], line, "is_military");
    a.is_flying = flag(f[6], line, "is_flying");
    a.is_cloaked = flag(f[7], line, "is_cloaked");
    a.is_transport = flag(f[8], line, "is_transport");
    a.max_weapon_range_px = cost(f[9], line, "max_weapon_range_px");
    if (!table.by_type_.emplace(a.unit_type, a).second) bad_row(line, "duplicate unit type");
  });
  if (!header_seen) throw Error(ErrorCode::MalformedLine, "unit table: missing header");
  return table;
}

const UnitTable& UnitTable::defaults() {
  static const UnitTable table = from_csv(default_unit_csv());
  return table;
}

const UnitAttributes* UnitTable::find(std::string_view unit_type) const {
  const auto it = by_type_.find(unit_type);
  return it == by_type_.end() ? nullptr : &it->second;
}

const UnitAttributes& UnitTable::at(std::string_view unit_type) const {
  if (const auto* a = find(unit_type)) return *a;
  throw Error(ErrorCode::UnknownUnitType, std::string(unit_type));
}

std::vector<std::string> UnitTable::basis(Race race, Scope scope) const {
  std::vector<std::string> out;
  for (const auto& [name, a] : by_type_) {
    if (a.race == race && a.in_scope(scope)) out.push_back(name);
  }
  return out;
}

std::vector<std::string> UnitTable::types(Race race) const {
  std::vector<std::string> out;
  for (const auto& [name, a] : by_type_) {
    if (a.race == race) out.push_back(name);
  }
  return out;
}

std::string UnitTable::to_csv() const {
  std::string out(kHeader);
  out += '\n';
  for (const auto& [name, a] : by_type_) {
    out += name + "," + std::string(to_string(a.race)) + "," + fmt(a.minerals) + "," + fmt(a.gas) +
           "," + fmt(a.supply) + "," + (a.is_military ? "1" : "0") + "," +
           (a.is_flying ? "1" : "0") + "," + (a.is_cloaked ? "1" : "0") + "," +
           (a.is_transport ? "1" : "0") + "," + fmt(a.max_weapon_range_px) + "\n";
  }
  return out;
}

}  // namespace battlemix
