#include "battlemix/stats.hpp"

#include <array>

#include "battlemix/error.hpp"
#include "battlemix/text.hpp"

namespace battlemix {

namespace {

std::optional<double> mean_reachable(const DistanceMatrix& m) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t j = i + 1; j < m.n; ++j) {
      if (!m.reachable(i, j)) continue;
      sum += static_cast<double>(m.at(i, j));
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

constexpr std::array<const char*, 6> kMatchupOrder = {"PvP", "PvT", "PvZ", "TvT", "TvZ", "ZvZ"};

}  // namespace

GameSummary summarize_game(const GameLog& log, std::size_t attacks) {
  GameSummary s;
  s.matchup = log.matchup();
  s.duration_frames = log.duration_frames;
  s.attacks = attacks;
  s.orders = log.orders.size();
  s.regions = log.region_distances.n;
  s.cdrs = log.cdr_distances.n;
  s.mean_region_distance = mean_reachable(log.region_distances);
  s.mean_cdr_distance = mean_reachable(log.cdr_distances);
  return s;
}

StatsTable corpus_stats(std::span<const GameSummary> games) {
  if (games.empty()) throw Error(ErrorCode::EmptyCorpus, "no games to summarize");

  struct Acc {
    std::size_t games = 0, attacks = 0;
    double frames = 0, orders = 0, regions = 0, cdrs = 0;
    double region_dist = 0, cdr_dist = 0;
    std::size_t region_dist_n = 0, cdr_dist_n = 0;
  };
  std::map<std::string, Acc> acc;
  for (const auto& g : games) {
    auto& a = acc[g.matchup];
    ++a.games;
    a.attacks += g.attacks;
    a.frames += static_cast<double>(g.duration_frames);
    a.orders += static_cast<double>(g.orders);
    a.regions += static_cast<double>(g.regions);
    a.cdrs += static_cast<double>(g.cdrs);
    if (g.mean_region_distance) {
      a.region_dist += *g.mean_region_distance;
      ++a.region_dist_n;
    }
    if (g.mean_cdr_distance) {
      a.cdr_dist += *g.mean_cdr_distance;
      ++a.cdr_dist_n;
    }
  }

  StatsTable table;
  for (const auto& [mu, a] : acc) {
    const double n = static_cast<double>(a.games);
    MatchupStats s;
    s.games = a.games;
    s.attacks = a.attacks;
    s.mean_attacks = static_cast<double>(a.attacks) / n;
    s.mean_frames = a.frames / n;
    s.mean_minutes = frames_to_minutes(s.mean_frames);
    s.mean_orders = a.orders / n;
    s.mean_regions = a.regions / n;
    s.mean_cdrs = a.cdrs / n;
    s.mean_region_distance = a.region_dist_n ? a.region_dist / static_cast<double>(a.region_dist_n) : 0.0;
    s.mean_cdr_distance = a.cdr_dist_n ? a.cdr_dist / static_cast<double>(a.cdr_dist_n) : 0.0;
    table.by_matchup[mu] = s;
  }
  return table;
}

std::string StatsTable::to_csv() const {
  std::vector<std::string> cols;
  for (const char* mu : kMatchupOrder) {
    if (by_matchup.contains(mu)) cols.emplace_back(mu);
  }
  for (const auto& [mu, s] : by_matchup) {
    bool listed = false;
    for (const char* known : kMatchupOrder) listed = listed || mu == known;
    if (!listed) cols.push_back(mu);
  }

  std::string out = "metric";
  for (const auto& c : cols) out += "," + c;
  out += '\n';

  auto row = [&](const char* name, auto&& get) {
    out += name;
    for (const auto& c : cols) out += "," + get(by_matchup.at(c));
    out += '\n';
  };
  auto fixed = [](int d) {
    return [d](double v) { return text::format_fixed(v, d); };
  };
  row("number of games", [](const MatchupStats& s) { return std::to_string(s.games); });
  row("number of attacks", [](const MatchupStats& s) { return std::to_string(s.attacks); });
  row("mean attacks/game", [&](const MatchupStats& s) { return fixed(2)(s.mean_attacks); });
  row("mean time (frames)/game", [&](const MatchupStats& s) { return fixed(0)(s.mean_frames); });
  row("mean time (minutes)/game", [&](const MatchupStats& s) { return fixed(2)(s.mean_minutes); });
  row("orders/game", [&](const MatchupStats& s) { return fixed(0)(s.mean_orders); });
  row("mean regions/game", [&](const MatchupStats& s) { return fixed(2)(s.mean_regions); });
  row("mean CDR/game", [&](const MatchupStats& s) { return fixed(2)(s.mean_cdrs); });
  row("mean ground distance region<->region",
      [&](const MatchupStats& s) { return fixed(0)(s.mean_region_distance); });
  row("mean ground distance CDR<->CDR",
      [&](const MatchupStats& s) { return fixed(0)(s.mean_cdr_distance); });
  return out;
}

}  // namespace battlemix
