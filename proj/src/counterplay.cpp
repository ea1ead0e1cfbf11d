#include "battlemix/counterplay.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "battlemix/error.hpp"
#include "battlemix/rng.hpp"
#include "battlemix/text.hpp"

namespace battlemix {

namespace {

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

std::string percent(const EvaluationCell& c) {
  const auto a = c.accuracy();
  return a ? text::format_fixed(*a, 1) : std::string();
}

struct BattleKey {
  std::string game;
  int attack = 0;
  auto operator<=>(const BattleKey&) const = default;
};

/// One row per battle, seen from the match-up's first race (lower player id
/// in mirrors).
std::vector<BattleRecord> canonical_rows(std::span<const BattleRecord> rows) {
  // rank 0: stored from the first race's side; rank 1: flipped here.
  std::map<BattleKey, std::pair<int, BattleRecord>> best;
  for (const auto& r : rows) {
    const bool flip = r.own.race > r.enemy.race;
    std::pair<int, BattleRecord> cand{flip ? 1 : 0, flip ? mirror_perspective(r, -1) : r};
    auto [it, inserted] = best.try_emplace(BattleKey{r.game, r.attack_id}, cand);
    if (inserted) continue;
    auto& cur = it->second;
    if (std::tie(cand.first, cand.second.own_pid) < std::tie(cur.first, cur.second.own_pid)) {
      cur = std::move(cand);
    }
  }
  std::vector<BattleRecord> out;
  out.reserve(best.size());
  for (auto& [k, v] : best) out.push_back(std::move(v.second));
  return out;
}

std::optional<GmmModel> fit_race_model(const std::vector<CompositionVector>& vectors,
                                       const SelectionOptions& base) {
  if (vectors.empty()) return std::nullopt;
  const Matrix data = composition_matrix(vectors);
  SelectionOptions opts = base;
  opts.k_range.clear();
  for (const auto k : base.k_range) {
    if (k >= 1 && k <= data.rows()) opts.k_range.push_back(k);
  }
  if (opts.k_range.empty()) opts.k_range.push_back(data.rows());
  GmmModel g = select_model(data, opts).best;
  g.race = vectors.front().race;
  g.scope = vectors.front().scope;
  return g;
}

}  // namespace

CounterTable counter_table(std::span<const LabeledBattle> battles, std::size_t K, std::size_t K_enemy,
                           std::span<const double> own_prior, std::span<const double> enemy_prior) {
  if (K == 0 || K_enemy == 0) throw Error(ErrorCode::InvalidArgument, "cluster counts must be positive");
  if (own_prior.size() != K || enemy_prior.size() != K_enemy) {
    throw Error(ErrorCode::DimensionMismatch, "prior lengths differ from cluster counts");
  }
  CounterTable t;
  t.K = K;
  t.K_enemy = K_enemy;
  t.wins = Matrix(K, K_enemy);
  t.count_with.assign(K_enemy, 0.0);
  t.own_prior.assign(own_prior.begin(), own_prior.end());
  t.enemy_prior.assign(enemy_prior.begin(), enemy_prior.end());
  t.battles = battles.size();
  for (const auto& b : battles) {
    if (b.c >= K || b.ec >= K_enemy) throw Error(ErrorCode::DimensionMismatch, "cluster label out of range");
    t.count_with[b.ec] += 1.0;
    if (b.own_won) t.wins(b.c, b.ec) += 1.0;
  }
  t.raw = Matrix(K, K_enemy);
  t.normalized = Matrix(K, K_enemy);
  for (std::size_t ec = 0; ec < K_enemy; ++ec) {
    const double denom = static_cast<double>(K) + t.enemy_prior[ec] * t.count_with[ec];
    double col = 0.0;
    for (std::size_t c = 0; c < K; ++c) {
      t.raw(c, ec) = (1.0 + t.own_prior[c] * t.enemy_prior[ec] * t.wins(c, ec)) / denom;
      col += t.raw(c, ec);
    }
    for (std::size_t c = 0; c < K; ++c) t.normalized(c, ec) = t.raw(c, ec) / col;
  }
  return t;
}

CounterTable counter_table(std::span<const LabeledBattle> battles, std::size_t K, std::size_t K_enemy) {
  std::vector<double> own(K, 0.0);
  std::vector<double> enemy(K_enemy, 0.0);
  for (const auto& b : battles) {
    if (b.c >= K || b.ec >= K_enemy) throw Error(ErrorCode::DimensionMismatch, "cluster label out of range");
    own[b.c] += 1.0;
    enemy[b.ec] += 1.0;
  }
  if (!battles.empty()) {
    const auto m = static_cast<double>(battles.size());
    for (auto& p : own) p /= m;
    for (auto& p : enemy) p /= m;
  }
  return counter_table(battles, K, K_enemy, own, enemy);
}

std::vector<LabeledBattle> label_battles(std::span<const BattleRecord> battles, const GmmModel& own,
                                         const GmmModel& enemy) {
  std::vector<LabeledBattle> out;
  out.reserve(battles.size());
  for (const auto& b : battles) {
    out.push_back({argmax(posterior(own, b.own)), argmax(posterior(enemy, b.enemy)),
                   b.winner == Side::Own});
  }
  return out;
}

CounterTable learn_counter_table(std::span<const BattleRecord> battles, const GmmModel& own,
                                 const GmmModel& enemy) {
  const auto labels = label_battles(battles, own, enemy);
  return counter_table(labels, own.K(), enemy.K());
}

std::string counter_table_csv(const CounterTable& t) {
  std::string out = "c,ec,wins,count_with,own_prior,enemy_prior,raw,normalized\n";
  for (std::size_t c = 0; c < t.K; ++c) {
    for (std::size_t ec = 0; ec < t.K_enemy; ++ec) {
      out += std::to_string(c) + "," + std::to_string(ec) + "," + text::format_double(t.wins(c, ec)) +
             "," + text::format_double(t.count_with[ec]) + "," + text::format_double(t.own_prior[c]) +
             "," + text::format_double(t.enemy_prior[ec]) + "," + text::format_double(t.raw(c, ec)) +
             "," + text::format_double(t.normalized(c, ec)) + "\n";
    }
  }
  return out;
}

DynamicsTable learn_dynamics(std::span<const TimedLabel> labels, std::size_t K, Frame delta,
                             Frame tolerance) {
  if (K == 0) throw Error(ErrorCode::InvalidArgument, "cluster count must be positive");
  if (tolerance < 0 || delta < 0) throw Error(ErrorCode::InvalidArgument, "negative Δt or tolerance");
  DynamicsTable t;
  t.K = K;
  t.delta = delta;
  t.tolerance = tolerance;
  t.counts = Matrix(K, K);
  t.probability = Matrix(K, K);

  std::map<std::pair<std::string, int>, std::vector<const TimedLabel*>> by_player;
  for (const auto& l : labels) {
    if (l.label >= K) throw Error(ErrorCode::DimensionMismatch, "cluster label out of range");
    by_player[{l.game, l.player_id}].push_back(&l);
  }
  for (auto& [key, seq] : by_player) {
    std::ranges::stable_sort(seq, {}, [](const TimedLabel* l) { return l->frame; });
    for (std::size_t a = 0; a < seq.size(); ++a) {
      for (std::size_t b = a + 1; b < seq.size(); ++b) {
        const Frame gap = seq[b]->frame - seq[a]->frame;
        if (gap > delta + tolerance) break;
        if (gap < delta - tolerance) continue;
        t.counts(seq[a]->label, seq[b]->label) += 1.0;
        ++t.pairs;
      }
    }
  }
  for (std::size_t j = 0; j < K; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < K; ++i) col += t.counts(i, j);
    for (std::size_t i = 0; i < K; ++i) {
      t.probability(i, j) = (1.0 + t.counts(i, j)) / (static_cast<double>(K) + col);
    }
  }
  return t;
}

std::vector<TimedLabel> army_labels(std::span<const BattleRecord> battles, const GmmModel& model) {
  std::vector<TimedLabel> out;
  for (const auto& b : battles) {
    if (b.own.race != model.race || b.scope != model.scope) continue;
    out.push_back({b.game, b.own_pid, b.frame, argmax(posterior(model, b.own))});
  }
  return out;
}

std::string dynamics_heatmap_csv(const DynamicsTable& t) {
  std::string out = "i,j,probability\n";
  for (std::size_t i = 0; i < t.K; ++i) {
    for (std::size_t j = 0; j < t.K; ++j) {
      out += std::to_string(i) + "," + std::to_string(j) + "," + text::format_double(t.probability(i, j)) + "\n";
    }
  }
  return out;
}

std::string_view to_string(Predictor p) {
  switch (p) {
    case Predictor::Heuristic: return "heuristic";
    case Predictor::JustProb: return "just_prob";
    case Predictor::Combined: return "prob_x_heuristic";
  }
  return "?";
}

Side predict_heuristic(double own_value, double enemy_value) {
  if (!(own_value > 0.0) || !(enemy_value > 0.0)) {
    throw Error(ErrorCode::ZeroValueArmy, "army values must be positive");
  }
  return own_value >= enemy_value ? Side::Own : Side::Enemy;
}

double counter_lift(std::span<const double> own_post, std::span<const double> enemy_post,
                    const CounterTable& table) {
  if (own_post.size() != table.K || enemy_post.size() != table.K_enemy) {
    throw Error(ErrorCode::DimensionMismatch, "posterior lengths differ from the counter table");
  }
  double s = 0.0;
  for (std::size_t c = 0; c < table.K; ++c) {
    for (std::size_t ec = 0; ec < table.K_enemy; ++ec) {
      s += own_post[c] * enemy_post[ec] * table.normalized(c, ec);
    }
  }
  return static_cast<double>(table.K) * s;
}

Side predict_just_prob(double own_lift, double enemy_lift) {
  if (nearly_equal(own_lift, enemy_lift)) return Side::Own;
  return own_lift > enemy_lift ? Side::Own : Side::Enemy;
}

Side predict_combined(double own_lift, double enemy_lift, double own_value, double enemy_value) {
  if (nearly_equal(own_lift, enemy_lift)) return predict_heuristic(own_value, enemy_value);
  if (!(own_value > 0.0) || !(enemy_value > 0.0)) {
    throw Error(ErrorCode::ZeroValueArmy, "army values must be positive");
  }
  const double a = own_lift * own_value;
  const double b = enemy_lift * enemy_value;
  if (nearly_equal(a, b)) return Side::Own;
  return a > b ? Side::Own : Side::Enemy;
}

namespace {

std::pair<double, double> lifts(const BattleRecord& b, const PredictionModels& m) {
  const auto po = posterior(m.own_model, b.own);
  const auto pe = posterior(m.enemy_model, b.enemy);
  return {counter_lift(po, pe, m.own_table), counter_lift(pe, po, m.enemy_table)};
}

}  // namespace

Side predict_just_prob(const BattleRecord& battle, const PredictionModels& m) {
  const auto [own, enemy] = lifts(battle, m);
  return predict_just_prob(own, enemy);
}

Side predict_combined(const BattleRecord& battle, const PredictionModels& m) {
  const auto [own, enemy] = lifts(battle, m);
  return predict_combined(own, enemy, battle.own_value, battle.enemy_value);
}

std::optional<double> EvaluationCell::accuracy() const {
  if (total == 0) return std::nullopt;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(total);
}

void score_battles(std::span<const BattleRecord> test, const PredictionModels& m,
                   const std::string& matchup, Scope scope, std::span<const double> thresholds,
                   EvaluationResult& result) {
  for (const auto& b : test) {
    const double disp = disparity(b.own_value, b.enemy_value);
    const auto [own_lift, enemy_lift] = lifts(b, m);
    const Side guesses[] = {predict_heuristic(b.own_value, b.enemy_value),
                            predict_just_prob(own_lift, enemy_lift),
                            predict_combined(own_lift, enemy_lift, b.own_value, b.enemy_value)};
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      if (disp > thresholds[t]) continue;
      for (std::size_t p = 0; p < 3; ++p) {
        auto& cell = result.cells[{matchup, scope, t, kAllPredictors[p]}];
        ++cell.total;
        if (guesses[p] == b.winner) ++cell.correct;
      }
    }
  }
}

EvaluationResult evaluate(std::span<const BattleRecord> battles, const EvaluationConfig& config) {
  for (const double t : config.thresholds) {
    if (!(t >= 1.0)) throw Error(ErrorCode::InvalidArgument, "disparity thresholds must be ≥ 1");
  }
  std::set<std::string> game_set;
  for (const auto& b : battles) game_set.insert(b.game);
  std::vector<std::string> games(game_set.begin(), game_set.end());
  if (config.holdout_games >= games.size()) {
    throw Error(ErrorCode::InsufficientGames,
                "holdout of " + std::to_string(config.holdout_games) + " games leaves no training game out of " +
                    std::to_string(games.size()));
  }
  Rng rng(config.seed);
  rng.shuffle(std::span<std::string>(games));
  const std::set<std::string> test_games(games.begin(),
                                         games.begin() + static_cast<std::ptrdiff_t>(config.holdout_games));

  EvaluationResult result;
  result.thresholds = config.thresholds;
  result.test_games.assign(test_games.begin(), test_games.end());

  for (const auto& mu : all_matchups()) {
    for (const Scope scope : config.scopes) {
      std::vector<BattleRecord> train;
      std::vector<BattleRecord> test;
      for (const auto& b : battles) {
        if (b.scope != scope || b.matchup() != mu) continue;
        (test_games.contains(b.game) ? test : train).push_back(b);
      }
      train = canonical_rows(train);
      test = canonical_rows(test);
      if (train.empty() || test.empty()) continue;

      const bool mirror = train.front().own.race == train.front().enemy.race;
      std::vector<BattleRecord> flipped;
      flipped.reserve(train.size());
      for (const auto& b : train) flipped.push_back(mirror_perspective(b, -1));

      std::vector<CompositionVector> first;
      std::vector<CompositionVector> second;
      for (const auto& b : train) {
        first.push_back(b.own);
        (mirror ? first : second).push_back(b.enemy);
      }
      const auto m1 = fit_race_model(first, config.selection);
      const auto m2 = mirror ? m1 : fit_race_model(second, config.selection);

      CounterTable own_table;
      CounterTable enemy_table;
      if (mirror) {
        std::vector<BattleRecord> both = train;
        both.insert(both.end(), flipped.begin(), flipped.end());
        own_table = learn_counter_table(both, *m1, *m1);
        enemy_table = own_table;
      } else {
        own_table = learn_counter_table(train, *m1, *m2);
        enemy_table = learn_counter_table(flipped, *m2, *m1);
      }
      const PredictionModels pm{*m1, *m2, own_table, enemy_table};
      score_battles(test, pm, mu, scope, config.thresholds, result);
    }
  }
  return result;
}

namespace {

std::string table_csv(const EvaluationResult& r, bool counts) {
  std::string out = "disparity,predictor";
  for (const auto& mu : all_matchups()) out += "," + mu + "_m," + mu + "_ws";
  out += ",mean\n";
  for (std::size_t t = 0; t < r.thresholds.size(); ++t) {
    for (const auto p : kAllPredictors) {
      out += text::format_double(r.thresholds[t]) + "," + std::string(to_string(p));
      double sum = 0.0;
      std::size_t n = 0;
      std::size_t count_sum = 0;
      for (const auto& mu : all_matchups()) {
        for (const Scope s : {Scope::Military, Scope::WithStatic}) {
          const auto it = r.cells.find({mu, s, t, p});
          const EvaluationCell cell = it == r.cells.end() ? EvaluationCell{} : it->second;
          out += ",";
          out += counts ? (cell.total ? std::to_string(cell.total) : std::string()) : percent(cell);
          if (s == Scope::WithStatic && cell.total) {
            sum += *cell.accuracy();
            count_sum += cell.total;
            ++n;
          }
        }
      }
      out += ",";
      if (n) out += counts ? std::to_string(count_sum) : text::format_fixed(sum / static_cast<double>(n), 1);
      out += "\n";
    }
  }
  return out;
}

}  // namespace

std::string results_csv(const EvaluationResult& result) { return table_csv(result, false); }
std::string counts_csv(const EvaluationResult& result) { return table_csv(result, true); }

std::string parallel_plot_csv(std::span<const BattleRecord> battles, const GmmModel& model, std::size_t top) {
  std::vector<const BattleRecord*> rows;
  for (const auto& b : battles) {
    if (b.own.race == model.race && b.scope == model.scope) rows.push_back(&b);
  }
  const std::size_t n = model.N();
  std::vector<double> mass(n, 0.0);
  for (const auto* b : rows) {
    if (b->own.u.size() != n) throw Error(ErrorCode::DimensionMismatch, "composition length differs from model");
    for (std::size_t d = 0; d < n; ++d) mass[d] += b->own.u[d];
  }
  std::vector<std::size_t> order(n);
  for (std::size_t d = 0; d < n; ++d) order[d] = d;
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return mass[a] > mass[b]; });
  order.resize(std::min(top, n));

  std::string out = "game,frame,own_pid";
  for (const auto d : order) out += "," + (d < model.basis.size() ? model.basis[d] : "u" + std::to_string(d));
  out += ",component\n";
  for (const auto* b : rows) {
    out += b->game + "," + std::to_string(b->frame) + "," + std::to_string(b->own_pid);
    for (const auto d : order) out += "," + text::format_double(b->own.u[d]);
    out += "," + std::to_string(argmax(posterior(model, b->own))) + "\n";
  }
  return out;
}

const std::vector<std::string>& all_matchups() {
  static const std::vector<std::string> m = {"PvP", "PvT", "PvZ", "TvT", "TvZ", "ZvZ"};
  return m;
}

}  // namespace battlemix
