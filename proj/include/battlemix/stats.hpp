#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>

#include "battlemix/logmodel.hpp"

namespace battlemix {

struct GameSummary {
  std::string matchup;
  Frame duration_frames = 0;
  std::size_t attacks = 0;
  std::size_t orders = 0;
  std::size_t regions = 0;
  std::size_t cdrs = 0;
  /// Mean over reachable off-diagonal pairs; nullopt when no pair is reachable.
  std::optional<double> mean_region_distance;
  std::optional<double> mean_cdr_distance;
};

GameSummary summarize_game(const GameLog& log, std::size_t attacks);

/// One column of the corpus table.
struct MatchupStats {
  std::size_t games = 0;
  std::size_t attacks = 0;
  double mean_attacks = 0.0;
  double mean_frames = 0.0;
  double mean_minutes = 0.0;
  double mean_orders = 0.0;
  double mean_regions = 0.0;
  double mean_cdrs = 0.0;
  double mean_region_distance = 0.0;
  double mean_cdr_distance = 0.0;
};

struct StatsTable {
  std::map<std::string, MatchupStats> by_matchup;

  /// Rows are metrics, columns are match-ups in PvP, PvT, PvZ, TvT, TvZ, ZvZ
  /// order (absent match-ups are omitted).
  std::string to_csv() const;
};

/// Throws EmptyCorpus for an empty input.
StatsTable corpus_stats(std::span<const GameSummary> games);

inline double frames_to_minutes(double frames) { return frames / kFramesPerSecond / 60.0; }

}  // namespace battlemix
