#include "doctest.h"

#include <random>

#include "battlemix/counterplay.hpp"
#include "battlemix/error.hpp"
#include "battlemix/synthgen.hpp"
#include "support.hpp"

using namespace battlemix;

namespace {

CounterTable ten_battle_table() {
  const std::vector<LabeledBattle> battles(10, LabeledBattle{0, 1, true});
  const std::vector<double> prior{0.5, 0.5, 0.0};
  return counter_table(battles, 3, 3, prior, prior);
}

synth::GeneratedBattles value_battles(double epsilon, std::uint64_t seed, std::size_t games) {
  synth::BattleGenConfig c;
  c.seed = seed;
  c.own = synth::random_mixture(3, 5, 0.01, seed + 1);
  c.enemy = synth::random_mixture(3, 5, 0.01, seed + 2);
  c.planted = synth::cyclic_counter(3, 0.95);
  c.epsilon = epsilon;
  c.games = games;
  return synth::gen_battles(c);
}

EvaluationConfig quick_config(std::size_t holdout) {
  EvaluationConfig cfg;
  cfg.holdout_games = holdout;
  cfg.scopes = {Scope::Military};
  cfg.selection.k_range = {2, 3, 4};
  cfg.selection.structures = {CovarianceType::Diagonal};
  return cfg;
}

}  // namespace

TEST_SUITE("counterplay") {
  TEST_CASE("zero battles give a uniform table") {
    const auto t = counter_table(std::vector<LabeledBattle>{}, 3, 3);
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t e = 0; e < 3; ++e) {
        CHECK(t.raw(c, e) == 1.0 / 3.0);
        CHECK(t.normalized(c, e) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
      }
    }
  }

  TEST_CASE("ten-battle hand example") {
    const auto t = ten_battle_table();
    CHECK(std::abs(t.raw(0, 1) - 0.4375) < 1e-12);
    CHECK(std::abs(t.raw(1, 1) - 0.125) < 1e-12);
    CHECK(std::abs(t.raw(2, 1) - 0.125) < 1e-12);
    CHECK(std::abs(t.normalized(0, 1) - 0.4375 / 0.6875) < 1e-12);
    CHECK(std::abs(t.normalized(0, 1) - 0.636) < 1e-3);
    CHECK(std::abs(t.normalized(2, 1) - 0.182) < 1e-3);
  }

  TEST_CASE("empirical priors are label frequencies; normalized columns sum to one") {
    std::mt19937_64 gen(1);
    std::vector<LabeledBattle> battles;
    for (int i = 0; i < 300; ++i) battles.push_back({gen() % 4, gen() % 3, gen() % 2 == 0});
    const auto t = counter_table(battles, 4, 3);
    std::vector<double> own(4, 0.0);
    for (const auto& b : battles) own[b.c] += 1.0 / 300.0;
    for (std::size_t c = 0; c < 4; ++c) CHECK(t.own_prior[c] == doctest::Approx(own[c]));
    for (std::size_t e = 0; e < 3; ++e) {
      double s = 0.0;
      for (std::size_t c = 0; c < 4; ++c) {
        CHECK(t.raw(c, e) > 0.0);
        CHECK(t.raw(c, e) < 1.0);
        s += t.normalized(c, e);
      }
      CHECK(std::abs(s - 1.0) < 1e-9);
    }
    CHECK_THROWS_AS(counter_table(std::vector<LabeledBattle>{{5, 0, true}}, 4, 3), Error);
  }

  TEST_CASE("planted rock-paper-scissors is recovered from true labels") {
    const auto g = value_battles(0.0, 4, 60);
    std::vector<LabeledBattle> labeled;
    for (std::size_t i = 0; i < g.own_labels.size(); ++i) {
      labeled.push_back({g.own_labels[i], g.enemy_labels[i], g.rows[2 * i].winner == Side::Own});
    }
    REQUIRE(labeled.size() == 600);
    const auto t = counter_table(labeled, 3, 3);
    for (std::size_t ec = 0; ec < 3; ++ec) {
      std::size_t best = 0;
      for (std::size_t c = 1; c < 3; ++c) {
        if (t.normalized(c, ec) > t.normalized(best, ec)) best = c;
      }
      CHECK(best == (ec + 2) % 3);
    }
  }

  TEST_CASE("dynamics: smoothing, single pair, pairing window") {
    const auto none = learn_dynamics(std::vector<TimedLabel>{}, 3);
    CHECK(none.probability(1, 2) == doctest::Approx(1.0 / 3.0));
    const std::vector<TimedLabel> one{{"g", 0, 1000, 0}, {"g", 0, 1000 + 2880, 2}, {"g", 1, 1000 + 2880, 1},
                                      {"h", 0, 1000 + 2880, 1}, {"g", 0, 1000 + 2880 + 1000, 1}};
    const auto t = learn_dynamics(one, 3);
    CHECK(t.pairs == 1);
    CHECK(t.probability(0, 2) == 0.5);
    CHECK(t.probability(1, 2) == 0.25);
    CHECK(t.probability(2, 2) == 0.25);
    const auto csv = testing::csv_rows(dynamics_heatmap_csv(t));
    CHECK(csv.size() == 1 + 9);
  }

  TEST_CASE("dynamics: static armies make the diagonal dominate") {
    synth::BattleGenConfig c;
    c.own = synth::random_mixture(3, 5, 0.01, 1);
    c.enemy = synth::random_mixture(3, 5, 0.01, 2);
    c.planted = Matrix(3, 3, 0.5);
    c.static_armies = true;
    c.games = 30;
    const auto g = synth::gen_battles(c);
    std::vector<TimedLabel> labels;
    for (std::size_t i = 0; i < g.own_labels.size(); ++i) {
      labels.push_back({g.rows[2 * i].game, g.rows[2 * i].own_pid, g.rows[2 * i].frame, g.own_labels[i]});
    }
    const auto t = learn_dynamics(labels, 3, c.spacing, 360);
    CHECK(t.pairs > 0);
    for (std::size_t j = 0; j < 3; ++j) {
      for (std::size_t i = 0; i < 3; ++i) {
        if (i != j) CHECK(t.probability(j, j) > t.probability(i, j));
      }
    }
  }

  TEST_CASE("heuristic predictor") {
    CHECK(predict_heuristic(300, 200) == Side::Own);
    CHECK(predict_heuristic(200, 300) == Side::Enemy);
    CHECK(predict_heuristic(250, 250) == Side::Own);
    CHECK_THROWS_AS(predict_heuristic(0, 10), Error);
  }

  TEST_CASE("just-prob and combined predictors") {
    const auto own_table = ten_battle_table();
    const auto enemy_table = counter_table(std::vector<LabeledBattle>{}, 3, 3);
    const std::vector<double> on_c0{1, 0, 0}, on_c1{0, 1, 0};
    const double own_lift = counter_lift(on_c0, on_c1, own_table);
    const double enemy_lift = counter_lift(on_c1, on_c0, enemy_table);
    CHECK(own_lift == doctest::Approx(3.0 * 0.4375 / 0.6875));
    CHECK(enemy_lift == doctest::Approx(1.0));
    CHECK(predict_just_prob(own_lift, enemy_lift) == Side::Own);
    CHECK(predict_just_prob(1.0, 1.0) == Side::Own);
    CHECK(predict_combined(0.5, 1.0, 120.0, 100.0) == Side::Enemy);
    CHECK(predict_combined(own_lift, enemy_lift, 100.0, 100.0) == predict_just_prob(own_lift, enemy_lift));

    const auto one = counter_table(std::vector<LabeledBattle>{{0, 0, true}}, 1, 1);
    const std::vector<double> single{1.0};
    CHECK(counter_lift(single, single, one) == doctest::Approx(one.normalized(0, 0)));
  }

  TEST_CASE("property: a uniform table turns the combined predictor into the heuristic") {
    const auto uniform = counter_table(std::vector<LabeledBattle>{}, 4, 2);
    const auto uniform_t = counter_table(std::vector<LabeledBattle>{}, 2, 4);
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
      std::vector<double> po(4), pe(2);
      for (auto& v : po) v = u(gen);
      for (auto& v : pe) v = u(gen);
      double so = 0, se = 0;
      for (const auto v : po) so += v;
      for (const auto v : pe) se += v;
      for (auto& v : po) v /= so;
      for (auto& v : pe) v /= se;
      const double ov = 100 + 1000 * u(gen);
      const double ev = i % 7 == 0 ? ov : 100 + 1000 * u(gen);
      CHECK(predict_combined(counter_lift(po, pe, uniform), counter_lift(pe, po, uniform_t), ov, ev) ==
            predict_heuristic(ov, ev));
    }
  }

  TEST_CASE("evaluate: value-determined outcomes score 100% for the heuristic; buckets nest") {
    const auto g = value_battles(1.0, 7, 40);
    const auto result = evaluate(g.rows, quick_config(10));
    CHECK(result.test_games.size() == 10);
    std::size_t prev = 0;
    for (std::size_t t = 0; t < 3; ++t) {
      const auto& cell = result.cells.at({"PvT", Scope::Military, t, Predictor::Heuristic});
      CHECK(cell.total >= prev);
      prev = cell.total;
      REQUIRE(cell.accuracy().has_value());
      CHECK(*cell.accuracy() == 100.0);
    }
    const auto rows = testing::csv_rows(results_csv(result));
    CHECK(rows[0].front() == "disparity");
    CHECK(rows[0].back() == "mean");
    CHECK(rows.size() == 1 + 9);
    CHECK(rows[1][0] == "1.1");
    CHECK(rows[1][1] == "heuristic");
  }

  TEST_CASE("property: evaluation does not depend on which perspective rows are listed") {
    const auto g = value_battles(0.2, 9, 30);
    std::vector<BattleRecord> flipped;
    for (std::size_t i = 0; i < g.rows.size(); i += 2) {
      flipped.push_back(g.rows[i + 1]);
      flipped.push_back(g.rows[i]);
    }
    const auto a = evaluate(g.rows, quick_config(8));
    const auto b = evaluate(flipped, quick_config(8));
    CHECK(results_csv(a) == results_csv(b));
    CHECK(counts_csv(a) == counts_csv(b));
  }

  TEST_CASE("evaluate needs more games than the holdout") {
    const auto g = value_battles(1.0, 1, 5);
    try {
      evaluate(g.rows, quick_config(5));
      FAIL("expected InsufficientGames");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InsufficientGames);
    }
  }

  TEST_CASE("parallel-plot data keeps eight types plus the component") {
    synth::BattleGenConfig c;
    c.own = synth::random_mixture(3, 12, 0.01, 1);
    c.enemy = synth::random_mixture(3, 12, 0.01, 2);
    c.planted = Matrix(3, 3, 0.5);
    c.own_race = Race::Protoss;
    c.enemy_race = Race::Terran;
    const auto g = synth::gen_battles(c);
    std::vector<CompositionVector> own;
    for (const auto& r : g.rows) {
      if (r.own.race == Race::Protoss) own.push_back(r.own);
    }
    auto model = fit(composition_matrix(own), 3, CovarianceType::Diagonal, 0);
    model.race = Race::Protoss;
    const auto rows = testing::csv_rows(parallel_plot_csv(g.rows, model));
    REQUIRE(rows.size() == 1 + own.size());
    CHECK(rows[0].size() == 3 + 8 + 1);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      double s = 0.0;
      for (std::size_t j = 3; j < 11; ++j) s += std::stod(rows[i][j]);
      CHECK(s <= 1.0 + 1e-9);
      const int comp = std::stoi(rows[i].back());
      CHECK(comp >= 0);
      CHECK(comp < 3);
    }
  }
}
