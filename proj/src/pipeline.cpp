#include "battlemix/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <sstream>
#include <thread>

#include "battlemix/error.hpp"
#include "battlemix/mapregions.hpp"
#include "battlemix/text.hpp"

namespace battlemix::pipeline {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw Error(ErrorCode::InvalidArgument, "config: bad value '" + value + "' for " + key);
}

double as_double(const std::string& key, const std::string& v) {
  const auto d = text::to_double(v);
  if (!d) bad_value(key, v);
  return *d;
}

std::int64_t as_int(const std::string& key, const std::string& v) {
  const auto i = text::to_int(v);
  if (!i) bad_value(key, v);
  return *i;
}

std::vector<std::string> list_of(const std::string& v) {
  std::vector<std::string> out;
  for (const auto part : text::split(v, ',')) {
    const auto t = trim(part);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

template <typename T, typename F>
std::string joined(const std::vector<T>& items, F&& fmt) {
  std::string s;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) s += ',';
    s += fmt(items[i]);
  }
  return s;
}

}  // namespace

std::map<std::string, std::string> parse_config_text(std::string_view content) {
  std::map<std::string, std::string> kv;
  text::for_each_record(content, [&](std::size_t line, std::string_view rec) {
    const auto eq = rec.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::MalformedLine, "config: expected key = value", line);
    }
    const auto key = trim(rec.substr(0, eq));
    if (key.empty()) throw Error(ErrorCode::MalformedLine, "config: empty key", line);
    kv[key] = trim(rec.substr(eq + 1));
  });
  return kv;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view s) {
  std::vector<std::uint64_t> seeds;
  for (const auto& part : list_of(std::string(s))) {
    const auto dash = part.find('-');
    if (dash != std::string::npos && dash > 0) {
      const auto a = text::to_int(part.substr(0, dash));
      const auto b = text::to_int(part.substr(dash + 1));
      if (!a || !b || *a < 0 || *b < *a) bad_value("seeds", part);
      for (auto v = *a; v <= *b; ++v) seeds.push_back(static_cast<std::uint64_t>(v));
    } else {
      const auto v = text::to_int(part);
      if (!v || *v < 0) bad_value("seeds", part);
      seeds.push_back(static_cast<std::uint64_t>(*v));
    }
  }
  if (seeds.empty()) bad_value("seeds", std::string(s));
  return seeds;
}

void Settings::apply(const std::map<std::string, std::string>& kv) {
  std::optional<std::int64_t> k_min;
  std::optional<std::int64_t> k_max;
  for (const auto& [key, v] : kv) {
    if (key == "timeout") {
      tracker.timeout = as_int(key, v);
      if (tracker.timeout <= 0) bad_value(key, v);
    } else if (key == "context_radius") {
      tracker.context_radius_px = as_double(key, v);
      if (!(tracker.context_radius_px > 0.0)) bad_value(key, v);
    } else if (key == "order_window") {
      tracker.order_window = as_int(key, v);
    } else if (key == "choke_radius_tiles") {
      choke_radius_tiles = as_double(key, v);
      if (!(choke_radius_tiles > 0.0)) bad_value(key, v);
    } else if (key == "k_min") {
      k_min = as_int(key, v);
    } else if (key == "k_max") {
      k_max = as_int(key, v);
    } else if (key == "structures") {
      selection.structures.clear();
      for (const auto& s : list_of(v)) {
        const auto t = parse_covariance_type(s);
        if (!t) bad_value(key, s);
        selection.structures.push_back(*t);
      }
      if (selection.structures.empty()) bad_value(key, v);
    } else if (key == "seeds") {
      selection.seeds = parse_seed_list(v);
    } else if (key == "max_iter") {
      selection.fit.max_iter = static_cast<int>(as_int(key, v));
    } else if (key == "tol") {
      selection.fit.tol = as_double(key, v);
    } else if (key == "reg_floor") {
      selection.fit.reg_floor = as_double(key, v);
      if (!(selection.fit.reg_floor > 0.0)) bad_value(key, v);
    } else if (key == "delta_t") {
      delta_t = as_int(key, v);
    } else if (key == "delta_tolerance") {
      delta_tolerance = as_int(key, v);
    } else if (key == "thresholds") {
      evaluation.thresholds.clear();
      for (const auto& s : list_of(v)) {
        const double t = as_double(key, s);
        if (!(t >= 1.0)) bad_value(key, s);
        evaluation.thresholds.push_back(t);
      }
    } else if (key == "scope") {
      evaluation.scopes.clear();
      if (v == "both") {
        evaluation.scopes = {Scope::Military, Scope::WithStatic};
      } else {
        evaluation.scopes = {parse_scope(v)};
      }
    } else if (key == "holdout") {
      const auto h = as_int(key, v);
      if (h < 0) bad_value(key, v);
      evaluation.holdout_games = static_cast<std::size_t>(h);
    } else if (key == "threads") {
      const auto t = as_int(key, v);
      if (t < 0) bad_value(key, v);
      threads = static_cast<unsigned>(t);
    } else if (key == "units") {
      units_csv = fs::path(v);
    } else {
      throw Error(ErrorCode::InvalidArgument, "config: unknown key '" + key + "'");
    }
  }
  if (k_min || k_max) {
    const auto lo = k_min.value_or(static_cast<std::int64_t>(selection.k_range.front()));
    const auto hi = k_max.value_or(static_cast<std::int64_t>(selection.k_range.back()));
    if (lo < 1 || hi < lo) bad_value("k_min/k_max", std::to_string(lo) + ".." + std::to_string(hi));
    selection.k_range.clear();
    for (auto k = lo; k <= hi; ++k) selection.k_range.push_back(static_cast<std::size_t>(k));
  }
  selection.threads = threads;
  evaluation.selection = selection;
}

std::string Settings::canonical() const {
  std::string s;
  s += "timeout=" + std::to_string(tracker.timeout) + "\n";
  s += "context_radius=" + text::format_double(tracker.context_radius_px) + "\n";
  s += "order_window=" + std::to_string(tracker.order_window) + "\n";
  s += "choke_radius_tiles=" + text::format_double(choke_radius_tiles) + "\n";
  s += "k_range=" + joined(selection.k_range, [](std::size_t k) { return std::to_string(k); }) + "\n";
  s += "structures=" + joined(selection.structures, [](CovarianceType t) { return std::string(to_string(t)); }) + "\n";
  s += "seeds=" + joined(selection.seeds, [](std::uint64_t v) { return std::to_string(v); }) + "\n";
  s += "max_iter=" + std::to_string(selection.fit.max_iter) + "\n";
  s += "tol=" + text::format_double(selection.fit.tol) + "\n";
  s += "reg_floor=" + text::format_double(selection.fit.reg_floor) + "\n";
  s += "delta_t=" + std::to_string(delta_t) + "\n";
  s += "delta_tolerance=" + std::to_string(delta_tolerance) + "\n";
  s += "thresholds=" + joined(evaluation.thresholds, [](double t) { return text::format_double(t); }) + "\n";
  s += "scope=" + joined(evaluation.scopes, [](Scope sc) { return std::string(to_string(sc)); }) + "\n";
  s += "holdout=" + std::to_string(evaluation.holdout_games) + "\n";
  s += "units=" + (units_csv ? units_csv->generic_string() : std::string("default")) + "\n";
  return s;
}

Settings load_settings(const std::optional<fs::path>& config_file,
                       const std::map<std::string, std::string>& overrides) {
  Settings s;
  if (config_file) s.apply(parse_config_text(text::read_file(*config_file)));
  s.apply(overrides);
  return s;
}

std::vector<std::string> list_games(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorCode::Io, "not a directory: " + dir.string());
  }
  std::vector<std::string> stems;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".rgd") {
      stems.push_back(entry.path().stem().string());
    }
  }
  std::ranges::sort(stems);
  if (stems.empty()) throw Error(ErrorCode::NoGamesFound, "no .rgd files in " + dir.string());
  return stems;
}

namespace {

class MapCache {
 public:
  MapCache(fs::path dir, double radius_px) : dir_(std::move(dir)), radius_px_(radius_px) {}

  const RegionMap* get(const std::string& map_name) {
    std::lock_guard lock(mu_);
    auto it = maps_.find(map_name);
    if (it != maps_.end()) return it->second ? &*it->second : nullptr;
    std::optional<RegionMap> m;
    for (const auto& candidate : {dir_ / (map_name + ".grid"), dir_ / "maps" / (map_name + ".grid")}) {
      std::error_code ec;
      if (fs::is_regular_file(candidate, ec)) {
        m = build_cdr(parse_grid(text::read_file(candidate)), radius_px_);
        break;
      }
    }
    auto [ins, ok] = maps_.emplace(map_name, std::move(m));
    return ins->second ? &*ins->second : nullptr;
  }

 private:
  fs::path dir_;
  double radius_px_;
  std::mutex mu_;
  std::map<std::string, std::optional<RegionMap>> maps_;
};

}  // namespace

IngestResult ingest(const fs::path& dir, const Settings& settings, const UnitTable& table, bool keep_logs) {
  const auto stems = list_games(dir);
  MapCache maps(dir, settings.choke_radius_tiles * 32.0);

  struct Slot {
    std::optional<IngestedGame> game;
    std::vector<BattleRecord> battles;
    GameSummary summary;
    std::string error;
  };
  std::vector<Slot> slots(stems.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < stems.size(); i = next.fetch_add(1)) {
      Slot& slot = slots[i];
      try {
        GameLog log = read_game(game_files(dir, stems[i]));
        validate_game(log);
        const RegionMap* regions = maps.get(log.map_name);
        auto attacks = run_tracker(log, regions, table, settings.tracker);
        for (const Scope scope : {Scope::Military, Scope::WithStatic}) {
          auto rows = battles_from_attacks(stems[i], log, attacks, scope, table);
          slot.battles.insert(slot.battles.end(), rows.begin(), rows.end());
        }
        slot.summary = summarize_game(log, attacks.size());
        IngestedGame g;
        g.stem = stems[i];
        if (keep_logs) g.log = std::move(log);
        g.attacks = std::move(attacks);
        slot.game = std::move(g);
      } catch (const std::exception& e) {
        slot.error = e.what();
      }
    }
  };
  unsigned threads = settings.threads ? settings.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(stems.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  IngestResult result;
  std::vector<GameSummary> summaries;
  for (std::size_t i = 0; i < stems.size(); ++i) {
    Slot& slot = slots[i];
    if (!slot.game) {
      result.skipped.push_back({stems[i], slot.error});
      continue;
    }
    result.games.push_back(std::move(*slot.game));
    summaries.push_back(slot.summary);
    result.battles.insert(result.battles.end(), slot.battles.begin(), slot.battles.end());
  }
  if (summaries.empty()) {
    throw Error(ErrorCode::EmptyCorpus, "no readable game in " + dir.string() + " (" +
                                            std::to_string(result.skipped.size()) + " skipped)");
  }
  result.stats = corpus_stats(summaries);
  return result;
}

std::string skipped_report(const std::vector<SkippedGame>& skipped) {
  std::string out;
  for (const auto& s : skipped) out += s.stem + ": " + s.reason + "\n";
  return out;
}

std::string file_checksum(const fs::path& path) { return text::hex64(text::fnv1a(text::read_file(path))); }

std::string combine_checksums(const std::vector<std::string>& parts) {
  std::uint64_t h = text::fnv1a("");
  for (const auto& p : parts) h = text::fnv1a(p + "\x1f", h);
  return text::hex64(h);
}

Manifest::Manifest(fs::path out_dir) : out_dir_(std::move(out_dir)) {
  const auto path = out_dir_ / "manifest.json";
  std::error_code ec;
  if (fs::is_regular_file(path, ec)) {
    try {
      doc_ = nlohmann::json::parse(text::read_file(path));
    } catch (const nlohmann::json::exception&) {
      doc_ = nlohmann::json::object();  // unreadable manifest: every stage reruns
    }
  }
  if (!doc_.is_object()) doc_ = nlohmann::json::object();
  doc_["version"] = 1;
  if (!doc_.contains("stages") || !doc_["stages"].is_object()) doc_["stages"] = nlohmann::json::object();
}

bool Manifest::up_to_date(const std::string& stage, const std::string& key) const {
  const auto& stages = doc_["stages"];
  if (!stages.contains(stage)) return false;
  const auto& s = stages[stage];
  if (!s.contains("key") || s["key"] != key || !s.contains("outputs")) return false;
  for (const auto& [rel, sum] : s["outputs"].items()) {
    std::error_code ec;
    const auto p = out_dir_ / rel;
    if (!fs::is_regular_file(p, ec)) return false;
    if (file_checksum(p) != sum.get<std::string>()) return false;
  }
  return true;
}

void Manifest::record(const std::string& stage, const std::string& key, const std::vector<std::string>& argv,
                      const std::map<std::string, std::string>& inputs, const std::vector<std::string>& outputs,
                      const std::map<std::string, std::string>& extra) {
  nlohmann::json s = nlohmann::json::object();
  s["key"] = key;
  s["argv"] = argv;
  s["inputs"] = inputs;
  nlohmann::json outs = nlohmann::json::object();
  for (const auto& rel : outputs) outs[rel] = file_checksum(out_dir_ / rel);
  s["outputs"] = outs;
  for (const auto& [k, v] : extra) s[k] = v;
  doc_["stages"][stage] = std::move(s);
}

void Manifest::save() const { text::write_file(out_dir_ / "manifest.json", doc_.dump(2) + "\n"); }

}  // namespace battlemix::pipeline
