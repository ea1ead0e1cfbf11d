#include "doctest.h"

#include <algorithm>
#include <random>

#include "battlemix/composition.hpp"
#include "battlemix/error.hpp"

using namespace battlemix;

namespace {

const char* kCsv =
    "unit_type,race,minerals,gas,supply,is_military,is_flying,is_cloaked,is_transport,max_weapon_range_px\n"
    "Alpha,Protoss,50,0,1,1,0,0,0,10\n"
    "Beta,Protoss,100,50,2,1,0,0,0,100\n"
    "Gamma,Protoss,0,0,0,1,0,0,0,0\n"
    "Worker,Protoss,50,0,1,0,0,0,0,10\n"
    "Tower,Protoss,125,0,0,0,0,0,0,200\n"
    "Pylon,Protoss,100,0,0,0,0,0,0,0\n"
    "Rifle,Terran,50,0,1,1,0,0,0,128\n";

const UnitTable& small() {
  static const UnitTable t = UnitTable::from_csv(kCsv);
  return t;
}

Attack attack_with(const std::vector<std::pair<int, std::string>>& units) {
  Attack a;
  int id = 1;
  for (const auto& [pid, type] : units) {
    a.units_involved[pid].insert(id);
    a.unit_types[id++] = type;
  }
  return a;
}

double value_oracle(double minerals, double gas, double supply) { return minerals + gas * 4.0 / 3.0 + 50.0 * supply; }

}  // namespace

TEST_SUITE("composition") {
  TEST_CASE("unit value formula") {
    CHECK(unit_value("Alpha", small()) == doctest::Approx(100.0));
    CHECK(unit_value("Beta", small()) == doctest::Approx(266.6666666667));
    CHECK(unit_value("Gamma", small()) == 0.0);
    CHECK_THROWS_AS(unit_value("Nope", small()), Error);
  }

  TEST_CASE("army value sums per-unit values") {
    CHECK(army_value(std::vector<std::string>{}, small()) == 0.0);
    CHECK(army_value(std::vector<std::string>{"Alpha", "Alpha", "Alpha"}, small()) == doctest::Approx(300.0));
    const auto& t = UnitTable::defaults();
    std::mt19937_64 gen(5);
    const auto types = t.types(Race::Zerg);
    std::vector<std::string> army;
    double expected = 0.0;
    for (int i = 0; i < 40; ++i) {
      const auto& name = types[gen() % types.size()];
      army.push_back(name);
      const auto& a = t.at(name);
      expected += value_oracle(a.minerals, a.gas, a.supply);
    }
    CHECK(army_value(army, t) == doctest::Approx(expected).epsilon(1e-12));
  }

  TEST_CASE("disparity is symmetric and at least one") {
    CHECK(disparity(100, 100) == 1.0);
    CHECK(disparity(150, 100) == doctest::Approx(1.5));
    CHECK(disparity(100, 150) == doctest::Approx(1.5));
    CHECK_THROWS_AS(disparity(0, 100), Error);
  }

  TEST_CASE("five zealots and five dragoons split evenly") {
    const auto& t = UnitTable::defaults();
    std::vector<std::pair<int, std::string>> units;
    for (int i = 0; i < 5; ++i) {
      units.emplace_back(0, "Zealot");
      units.emplace_back(0, "Dragoon");
    }
    const auto v = extract_composition(attack_with(units), 0, Race::Protoss, Scope::Military, t);
    const auto basis = t.basis(Race::Protoss, Scope::Military);
    REQUIRE(v.u.size() == basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const double want = basis[i] == "Zealot" || basis[i] == "Dragoon" ? 0.5 : 0.0;
      CHECK(v.u[i] == want);
    }
    CHECK(v.total_units == 10);
  }

  TEST_CASE("single unit is one-hot; workers alone are empty under m") {
    const auto v = extract_composition(attack_with({{1, "Rifle"}}), 1, Race::Terran, Scope::Military, small());
    CHECK(v.u == std::vector<double>{1.0});
    const auto workers = attack_with({{0, "Worker"}, {0, "Worker"}});
    try {
      extract_composition(workers, 0, Race::Protoss, Scope::Military, small());
      FAIL("expected EmptyArmy");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyArmy);
    }
    const auto ws = extract_composition(workers, 0, Race::Protoss, Scope::WithStatic, small());
    CHECK(ws.total_units == 2);
  }

  TEST_CASE("scope basis: ws adds armed non-military types only") {
    CHECK(small().basis(Race::Protoss, Scope::Military) == std::vector<std::string>{"Alpha", "Beta", "Gamma"});
    CHECK(small().basis(Race::Protoss, Scope::WithStatic) ==
          std::vector<std::string>{"Alpha", "Beta", "Gamma", "Tower", "Worker"});
  }

  TEST_CASE("property: scale and permutation invariance, simplex membership") {
    std::mt19937_64 gen(17);
    const std::vector<std::string> pool{"Alpha", "Beta", "Gamma", "Worker", "Tower"};
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<std::string> army;
      const int n = 1 + static_cast<int>(gen() % 12);
      for (int i = 0; i < n; ++i) army.push_back(pool[gen() % pool.size()]);
      army.push_back("Alpha");
      const auto v = composition_of(army, Race::Protoss, Scope::WithStatic, small());
      double sum = 0.0;
      for (const double x : v.u) {
        CHECK(x >= 0.0);
        sum += x;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
      std::vector<std::string> tripled;
      for (int k = 0; k < 3; ++k) tripled.insert(tripled.end(), army.begin(), army.end());
      std::shuffle(tripled.begin(), tripled.end(), gen);
      const auto w = composition_of(tripled, Race::Protoss, Scope::WithStatic, small());
      for (std::size_t i = 0; i < v.u.size(); ++i) CHECK(w.u[i] == doctest::Approx(v.u[i]).epsilon(1e-12));
    }
  }

  TEST_CASE("battle winner loses less value; ties go to the defender") {
    Attack a = attack_with({{0, "Alpha"}, {0, "Beta"}, {1, "Alpha"}, {1, "Alpha"}});
    a.attacker_pid = 0;
    a.defender_pid = 1;
    a.units_lost[0] = {2};  // Beta
    a.units_lost[1] = {3};  // Alpha
    CHECK(battle_winner(a, small()) == 1);
    a.units_lost[0] = {1};
    CHECK(battle_winner(a, small()) == 1);
    a.units_lost[1] = {3, 4};
    CHECK(battle_winner(a, small()) == 0);
  }

  TEST_CASE("battles CSV round-trip and mirrored perspective") {
    GameLog log;
    log.players = {{0, "a", Race::Protoss}, {1, "b", Race::Terran}};
    Attack a = attack_with({{0, "Alpha"}, {0, "Beta"}, {1, "Rifle"}});
    a.attacker_pid = 1;
    a.defender_pid = 0;
    a.units_lost[1] = {3};
    a.start_frame = 500;
    a.attack_id = 4;
    const auto rows = battles_from_attacks("g1", log, {a}, Scope::Military, small());
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].own.race == Race::Protoss);
    CHECK(rows[0].winner == Side::Own);
    CHECK(rows[1] == mirror_perspective(rows[0], 1));
    CHECK(rows[1].winner == Side::Enemy);
    CHECK(rows[1].own_value == rows[0].enemy_value);
    const auto back = parse_battles_csv(write_battles_csv(rows), small());
    auto expected = rows;  // unit counts are not part of the CSV
    for (auto& r : expected) r.own.total_units = r.enemy.total_units = 0;
    CHECK(back == expected);
    CHECK(write_battles_csv(back) == write_battles_csv(rows));
  }
}
