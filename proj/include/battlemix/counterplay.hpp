#pragma once

// Counter-composition tables, cluster dynamics, winner predictors and their
// disparity-bucketed evaluation.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "battlemix/composition.hpp"
#include "battlemix/gmm.hpp"
#include "battlemix/matrix.hpp"

namespace battlemix {

/// P(C = c | EC = ec) for own clusters c (rows) against enemy clusters ec
/// (columns). `raw` follows the add-one formula
///   (1 + P(c)·P(ec)·count(c > ec)) / (K + P(ec)·count_with(ec));
/// `normalized` rescales each column to sum to one.
struct CounterTable {
  std::size_t K = 0;
  std::size_t K_enemy = 0;
  Matrix wins;                     // count(c > ec)
  std::vector<double> count_with;  // battles against ec
  std::vector<double> own_prior;
  std::vector<double> enemy_prior;
  Matrix raw;
  Matrix normalized;
  std::size_t battles = 0;
};

/// One battle reduced to hard cluster labels.
struct LabeledBattle {
  std::size_t c = 0;
  std::size_t ec = 0;
  bool own_won = false;
};

/// Table with explicit priors.
CounterTable counter_table(std::span<const LabeledBattle> battles, std::size_t K, std::size_t K_enemy,
                           std::span<const double> own_prior, std::span<const double> enemy_prior);

/// Table with empirical label frequencies as priors (zero when there are no battles).
CounterTable counter_table(std::span<const LabeledBattle> battles, std::size_t K, std::size_t K_enemy);

/// Labels each battle by the argmax components of its own and enemy armies.
std::vector<LabeledBattle> label_battles(std::span<const BattleRecord> battles, const GmmModel& own,
                                         const GmmModel& enemy);

CounterTable learn_counter_table(std::span<const BattleRecord> battles, const GmmModel& own,
                                 const GmmModel& enemy);

std::string counter_table_csv(const CounterTable& table);

/// P(EC^t = i | EC^{t+Δt} = j), add-one smoothed, columns normalized.
struct DynamicsTable {
  std::size_t K = 0;
  Frame delta = 2880;
  Frame tolerance = 360;
  Matrix counts;
  Matrix probability;
  std::size_t pairs = 0;
};

/// A player's army label at a battle.
struct TimedLabel {
  std::string game;
  int player_id = 0;
  Frame frame = 0;
  std::size_t label = 0;
};

/// Counts every ordered pair of one player's battles in one game whose start
/// frames differ by Δt ± tolerance.
DynamicsTable learn_dynamics(std::span<const TimedLabel> labels, std::size_t K, Frame delta = 2880,
                             Frame tolerance = 360);

/// Labels of every battle row whose own army matches the model's race and
/// scope, attributed to that row's own player.
std::vector<TimedLabel> army_labels(std::span<const BattleRecord> battles, const GmmModel& model);

/// `i,j,probability` triples, i-major.
std::string dynamics_heatmap_csv(const DynamicsTable& table);

enum class Predictor { Heuristic, JustProb, Combined };

inline constexpr Predictor kAllPredictors[] = {Predictor::Heuristic, Predictor::JustProb,
                                               Predictor::Combined};

std::string_view to_string(Predictor p);

/// Larger army value wins; equal values go to the own side. Throws ZeroValueArmy.
Side predict_heuristic(double own_value, double enemy_value);

/// K · Σ_c Σ_ec P(c|own)·P(ec|enemy)·T[c][ec] on the normalized table. The
/// factor K makes a uniform table score exactly 1 whatever the cluster counts.
double counter_lift(std::span<const double> own_post, std::span<const double> enemy_post,
                    const CounterTable& table);

/// Everything a composition-aware prediction needs for one match-up side
/// pairing. `own_table` is learned from the own perspective; `enemy_table`
/// from the enemy perspective (its rows are enemy clusters).
struct PredictionModels {
  const GmmModel& own_model;
  const GmmModel& enemy_model;
  const CounterTable& own_table;
  const CounterTable& enemy_table;
};

/// Scores equal within a relative 1e-12 count as a tie, which goes to own.
Side predict_just_prob(const BattleRecord& battle, const PredictionModels& m);
/// Lift × army value per side; when the lifts tie this is exactly the heuristic.
Side predict_combined(const BattleRecord& battle, const PredictionModels& m);

Side predict_just_prob(double own_lift, double enemy_lift);
Side predict_combined(double own_lift, double enemy_lift, double own_value, double enemy_value);

struct EvaluationConfig {
  std::vector<double> thresholds = {1.1, 1.3, 1.5};
  std::vector<Scope> scopes = {Scope::Military, Scope::WithStatic};
  std::size_t holdout_games = 100;
  std::uint64_t seed = 0;
  SelectionOptions selection;
};

struct EvaluationCell {
  std::size_t correct = 0;
  std::size_t total = 0;
  std::optional<double> accuracy() const;
};

struct EvaluationResult {
  std::vector<double> thresholds;
  std::vector<std::string> test_games;  // sorted
  /// (match-up, scope, threshold index, predictor) → counts.
  std::map<std::tuple<std::string, Scope, std::size_t, Predictor>, EvaluationCell> cells;
};

/// Splits games into train and held-out test sets (seeded), fits one model
/// per race and learns counter tables per perspective on the train battles of
/// each match-up and scope, then scores every test battle once, from the
/// perspective whose race comes first in the match-up label (the lower
/// player id in mirrors). Throws InsufficientGames when the holdout does not
/// leave at least one training game.
EvaluationResult evaluate(std::span<const BattleRecord> battles, const EvaluationConfig& config);

/// Scores already-split data with fixed models and tables (no fitting).
void score_battles(std::span<const BattleRecord> test, const PredictionModels& m,
                   const std::string& matchup, Scope scope, std::span<const double> thresholds,
                   EvaluationResult& result);

/// Rows `disparity,predictor`, one column per match-up × scope plus `mean`
/// (over the ws columns that have battles). Empty cells have no battles.
std::string results_csv(const EvaluationResult& result);
/// Same layout with battle counts.
std::string counts_csv(const EvaluationResult& result);

/// One row per battle: the `top` unit types with the largest summed
/// proportion over all rows, then the argmax component.
std::string parallel_plot_csv(std::span<const BattleRecord> battles, const GmmModel& model,
                              std::size_t top = 8);

/// Canonical six match-up labels in table order.
const std::vector<std::string>& all_matchups();

}  // namespace battlemix
