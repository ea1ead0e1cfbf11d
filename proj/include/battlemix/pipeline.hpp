#pragma once

// Corpus-level stages shared by the command-line tool and the tests:
// configuration, ingest, and the manifest that makes reruns no-ops.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "battlemix/attacktrack.hpp"
#include "battlemix/composition.hpp"
#include "battlemix/counterplay.hpp"
#include "battlemix/gmm.hpp"
#include "battlemix/stats.hpp"
#include "battlemix/unit_table.hpp"
#include "json.hpp"

namespace battlemix::pipeline {

/// Flat `key = value` text; `#` starts a comment line.
std::map<std::string, std::string> parse_config_text(std::string_view text);

struct Settings {
  TrackerConfig tracker;
  double choke_radius_tiles = kDefaultChokeRadiusTiles;
  SelectionOptions selection;
  Frame delta_t = 2880;
  Frame delta_tolerance = 360;
  EvaluationConfig evaluation;
  unsigned threads = 0;
  std::optional<std::filesystem::path> units_csv;

  /// Applies recognized keys; throws InvalidArgument on unknown keys or bad values.
  void apply(const std::map<std::string, std::string>& kv);
  /// Canonical `key=value` lines covering every setting (stage checksums).
  std::string canonical() const;
};

/// Default settings with the file (if any) and then `overrides` applied.
Settings load_settings(const std::optional<std::filesystem::path>& config_file,
                       const std::map<std::string, std::string>& overrides = {});

std::vector<std::uint64_t> parse_seed_list(std::string_view s);

struct SkippedGame {
  std::string stem;
  std::string reason;
};

struct IngestedGame {
  std::string stem;
  GameLog log;
  std::vector<Attack> attacks;
};

struct IngestResult {
  std::vector<IngestedGame> games;  // sorted by stem
  std::vector<SkippedGame> skipped;
  std::vector<BattleRecord> battles;  // both scopes, game order
  StatsTable stats;
};

/// Stems of every `.rgd` file in `dir`, sorted. Throws NoGamesFound.
std::vector<std::string> list_games(const std::filesystem::path& dir);

/// Reads, tracks and composes every game of the corpus on a worker pool.
/// Games that fail to read or validate are skipped and reported. Grid files
/// named `<map>.grid` (in `dir` or `dir/maps`) give attacks their regions.
IngestResult ingest(const std::filesystem::path& dir, const Settings& settings, const UnitTable& table,
                    bool keep_logs = false);

std::string skipped_report(const std::vector<SkippedGame>& skipped);

/// Stage bookkeeping persisted as `manifest.json` in the output directory.
class Manifest {
 public:
  explicit Manifest(std::filesystem::path out_dir);

  /// True when the stage ran with the same key and every recorded output
  /// still has its recorded checksum.
  bool up_to_date(const std::string& stage, const std::string& key) const;

  /// Records a completed stage; outputs are paths relative to the output dir.
  void record(const std::string& stage, const std::string& key, const std::vector<std::string>& argv,
              const std::map<std::string, std::string>& inputs, const std::vector<std::string>& outputs,
              const std::map<std::string, std::string>& extra = {});

  void save() const;
  const std::filesystem::path& out_dir() const { return out_dir_; }

 private:
  std::filesystem::path out_dir_;
  nlohmann::json doc_;
};

/// Hex FNV-1a of a file's bytes; throws Io when unreadable.
std::string file_checksum(const std::filesystem::path& path);
/// Hex FNV-1a over the concatenation of parts with separators.
std::string combine_checksums(const std::vector<std::string>& parts);

}  // namespace battlemix::pipeline
