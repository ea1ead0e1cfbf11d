#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "battlemix/composition.hpp"
#include "battlemix/counterplay.hpp"
#include "battlemix/error.hpp"
#include "battlemix/gmm.hpp"
#include "battlemix/pipeline.hpp"
#include "battlemix/rng.hpp"
#include "battlemix/synthgen.hpp"
#include "battlemix/text.hpp"
#include "battlemix/unit_table.hpp"

namespace fs = std::filesystem;
using namespace battlemix;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitValidation = 3;
constexpr int kExitInternal = 4;

struct Globals {
  std::uint64_t seed = 0;
  std::optional<std::string> config;
  std::string out = "out";
  std::vector<std::string> sets;
};

std::map<std::string, std::string> overrides_of(const std::vector<std::string>& sets) {
  std::map<std::string, std::string> kv;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorCode::InvalidArgument, "--set expects key=value, got '" + s + "'");
    }
    kv[s.substr(0, eq)] = s.substr(eq + 1);
  }
  return kv;
}

struct Context {
  Globals globals;
  std::vector<std::string> argv;
  pipeline::Settings settings;
  std::optional<UnitTable> custom_units;
  std::string config_checksum;

  const UnitTable& units() const { return custom_units ? *custom_units : UnitTable::defaults(); }
  fs::path out() const { return globals.out; }
};

Context make_context(const Globals& g, const std::vector<std::string>& argv) {
  Context ctx;
  ctx.globals = g;
  ctx.argv = argv;
  std::optional<fs::path> cfg;
  if (g.config) cfg = fs::path(*g.config);
  ctx.settings = pipeline::load_settings(cfg, overrides_of(g.sets));
  if (ctx.settings.units_csv) {
    ctx.custom_units = UnitTable::from_csv(text::read_file(*ctx.settings.units_csv));
  }
  ctx.config_checksum = ctx.settings.canonical() + "seed=" + std::to_string(g.seed) + "\n";
  return ctx;
}

/// Runs `body` unless the manifest says the stage is current. `body` returns
/// the output paths it wrote, relative to the output directory.
int run_stage(Context& ctx, const std::string& stage, const std::map<std::string, std::string>& inputs,
              const std::string& params, const std::function<std::vector<std::string>()>& body) {
  std::vector<std::string> parts{stage, params, ctx.config_checksum};
  for (const auto& [path, sum] : inputs) parts.push_back(path + "=" + sum);
  const std::string key = pipeline::combine_checksums(parts);

  pipeline::Manifest manifest(ctx.out());
  if (manifest.up_to_date(stage, key)) {
    std::cout << stage << ": up to date\n";
    return 0;
  }
  const auto outputs = body();
  manifest.record(stage, key, ctx.argv, inputs, outputs,
                  {{"seed", std::to_string(ctx.globals.seed)}, {"config", ctx.settings.canonical()}});
  manifest.save();
  for (const auto& o : outputs) std::cout << "wrote " << (ctx.out() / o).string() << "\n";
  return 0;
}

std::map<std::string, std::string> corpus_inputs(const fs::path& dir) {
  std::map<std::string, std::string> in;
  for (const auto& stem : pipeline::list_games(dir)) {
    const auto files = game_files(dir, stem);
    for (const auto& p : {files.rgd, files.rod, files.rld}) {
      std::error_code ec;
      in[p.string()] = fs::is_regular_file(p, ec) ? pipeline::file_checksum(p) : "missing";
    }
  }
  for (const auto& sub : {dir, dir / "maps"}) {
    std::error_code ec;
    if (!fs::is_directory(sub, ec)) continue;
    for (const auto& e : fs::directory_iterator(sub)) {
      if (e.is_regular_file() && e.path().extension() == ".grid") {
        in[e.path().string()] = pipeline::file_checksum(e.path());
      }
    }
  }
  return in;
}

std::string attacks_table(const std::vector<pipeline::IngestedGame>& games, const std::vector<GameLog>& logs) {
  std::string out;
  for (std::size_t i = 0; i < games.size(); ++i) {
    const std::string csv = write_attacks_csv(games[i].attacks, logs[i]);
    std::size_t pos = 0;
    bool header = true;
    while (pos < csv.size()) {
      const auto end = csv.find('\n', pos);
      const std::string line = csv.substr(pos, end - pos);
      pos = end + 1;
      if (header) {
        if (out.empty()) out += "game," + line + "\n";
        header = false;
        continue;
      }
      out += games[i].stem + "," + line + "\n";
    }
  }
  if (out.empty()) {
    out = "game,attack_id,start_frame,end_frame,type,attacker_pid,defender_pid,x,y,region,cdr,unitsA,unitsB,lostA,lostB\n";
  }
  return out;
}

int cmd_ingest(Context& ctx, const std::string& dir) {
  auto inputs = corpus_inputs(dir);
  return run_stage(ctx, "ingest", inputs, dir, [&] {
    auto res = pipeline::ingest(dir, ctx.settings, ctx.units(), true);
    std::vector<GameLog> logs;
    for (auto& g : res.games) logs.push_back(std::move(g.log));
    text::write_file(ctx.out() / "battles.csv", write_battles_csv(res.battles));
    text::write_file(ctx.out() / "stats.csv", res.stats.to_csv());
    text::write_file(ctx.out() / "attacks.csv", attacks_table(res.games, logs));
    text::write_file(ctx.out() / "ingest_report.txt", pipeline::skipped_report(res.skipped));
    for (const auto& s : res.skipped) std::cerr << "skipped " << s.stem << ": " << s.reason << "\n";
    std::cout << "ingested " << res.games.size() << " games, skipped " << res.skipped.size() << ", "
              << res.battles.size() << " battle rows\n";
    return std::vector<std::string>{"battles.csv", "stats.csv", "attacks.csv", "ingest_report.txt"};
  });
}

int cmd_stats(Context& ctx, const std::string& dir) {
  auto inputs = corpus_inputs(dir);
  return run_stage(ctx, "stats", inputs, dir, [&] {
    auto res = pipeline::ingest(dir, ctx.settings, ctx.units(), false);
    text::write_file(ctx.out() / "stats.csv", res.stats.to_csv());
    for (const auto& s : res.skipped) std::cerr << "skipped " << s.stem << ": " << s.reason << "\n";
    std::cout << res.stats.to_csv();
    return std::vector<std::string>{"stats.csv"};
  });
}

std::vector<BattleRecord> load_battles(const Context& ctx, const std::string& path) {
  return parse_battles_csv(text::read_file(path), ctx.units());
}

Race race_arg(const std::string& s) {
  const auto r = parse_race(s);
  if (r) return *r;
  if (s.size() == 1) {
    for (const Race c : {Race::Protoss, Race::Terran, Race::Zerg}) {
      if (race_letter(c) == s[0]) return c;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown race '" + s + "'");
}

std::string matchup_arg(const std::string& s) {
  for (const auto& m : all_matchups()) {
    if (m == s) return m;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown match-up '" + s + "'");
}

std::vector<std::uint64_t> fit_seeds(const Context& ctx) {
  // An explicit seed list wins; otherwise the global seed drives the single fit seed.
  const bool configured = ctx.settings.selection.seeds != std::vector<std::uint64_t>{0};
  return configured ? ctx.settings.selection.seeds : std::vector<std::uint64_t>{ctx.globals.seed};
}

int cmd_cluster(Context& ctx, const std::string& battles_path, const std::string& race_s,
                const std::optional<std::string>& matchup_s, const std::string& scope_s) {
  const Race race = race_arg(race_s);
  const Scope scope = parse_scope(scope_s);
  const std::optional<std::string> matchup = matchup_s ? std::optional(matchup_arg(*matchup_s)) : std::nullopt;
  const std::string tag = (matchup ? *matchup : std::string("all")) + "_" + std::string(1, race_letter(race)) +
                          "_" + std::string(to_string(scope));
  const std::map<std::string, std::string> inputs{{battles_path, pipeline::file_checksum(battles_path)}};
  return run_stage(ctx, "cluster_" + tag, inputs, tag, [&] {
    const auto battles = load_battles(ctx, battles_path);
    std::vector<CompositionVector> vectors;
    for (const auto& b : battles) {
      if (b.scope != scope || b.own.race != race) continue;
      if (matchup && b.matchup() != *matchup) continue;
      vectors.push_back(b.own);
    }
    if (vectors.empty()) {
      throw Error(ErrorCode::TooFewPoints, "no " + std::string(to_string(race)) + " armies for " + tag);
    }
    SelectionOptions opts = ctx.settings.selection;
    opts.seeds = fit_seeds(ctx);
    auto sel = select_model(composition_matrix(vectors), opts);
    GmmModel model = std::move(sel.best);
    model.race = race;
    model.scope = scope;
    model.basis = ctx.units().basis(race, scope);
    std::string search = "K,structure,seed,ok,log_likelihood,bic\n";
    for (const auto& c : sel.candidates) {
      search += std::to_string(c.K) + "," + std::string(to_string(c.structure)) + "," + std::to_string(c.seed) +
                "," + (c.ok ? "1" : "0") + "," + (c.ok ? text::format_double(c.log_likelihood) : "") + "," +
                (c.ok ? text::format_double(c.bic) : "") + "\n";
    }
    const std::string model_rel = "models/" + tag + ".gmm";
    const std::string search_rel = "models/" + tag + "_search.csv";
    text::write_file(ctx.out() / model_rel, write_model(model));
    text::write_file(ctx.out() / search_rel, search);
    std::cout << tag << ": " << vectors.size() << " armies, K=" << model.K() << " "
              << to_string(model.structure) << ", BIC " << text::format_fixed(model.bic_score, 2) << "\n";
    return std::vector<std::string>{model_rel, search_rel};
  });
}

GmmModel load_model(const std::string& path) { return parse_model(text::read_file(path)); }

std::vector<BattleRecord> rows_for(const std::vector<BattleRecord>& battles, const GmmModel& own,
                                   const GmmModel* enemy, const std::optional<std::string>& matchup) {
  std::vector<BattleRecord> out;
  for (const auto& b : battles) {
    if (b.scope != own.scope || b.own.race != own.race) continue;
    if (enemy && b.enemy.race != enemy->race) continue;
    if (matchup && b.matchup() != *matchup) continue;
    out.push_back(b);
  }
  return out;
}

int cmd_counter_table(Context& ctx, const std::string& battles_path, const std::string& own_path,
                      const std::string& enemy_path, const std::optional<std::string>& matchup_s) {
  const std::map<std::string, std::string> inputs{{battles_path, pipeline::file_checksum(battles_path)},
                                                  {own_path, pipeline::file_checksum(own_path)},
                                                  {enemy_path, pipeline::file_checksum(enemy_path)}};
  const auto own = load_model(own_path);
  const auto enemy = load_model(enemy_path);
  if (own.scope != enemy.scope) throw Error(ErrorCode::BasisMismatch, "models were fit on different scopes");
  const std::optional<std::string> matchup = matchup_s ? std::optional(matchup_arg(*matchup_s)) : std::nullopt;
  const std::string tag = std::string(1, race_letter(own.race)) + "_vs_" + std::string(1, race_letter(enemy.race)) +
                          "_" + std::string(to_string(own.scope));
  return run_stage(ctx, "counter_" + tag, inputs, tag + (matchup ? *matchup : ""), [&] {
    const auto rows = rows_for(load_battles(ctx, battles_path), own, &enemy, matchup);
    const auto table = learn_counter_table(rows, own, enemy);
    const std::string rel = "counter_" + tag + ".csv";
    text::write_file(ctx.out() / rel, counter_table_csv(table));
    std::cout << tag << ": " << rows.size() << " battles\n";
    return std::vector<std::string>{rel};
  });
}

DynamicsTable dynamics_of(const Context& ctx, const std::vector<BattleRecord>& battles, const GmmModel& model,
                          const std::optional<std::string>& matchup) {
  const auto rows = rows_for(battles, model, nullptr, matchup);
  const auto labels = army_labels(rows, model);
  return learn_dynamics(labels, model.K(), ctx.settings.delta_t, ctx.settings.delta_tolerance);
}

int cmd_dynamics(Context& ctx, const std::string& battles_path, const std::string& model_path,
                 const std::optional<std::string>& matchup_s) {
  const std::map<std::string, std::string> inputs{{battles_path, pipeline::file_checksum(battles_path)},
                                                  {model_path, pipeline::file_checksum(model_path)}};
  const auto model = load_model(model_path);
  const std::optional<std::string> matchup = matchup_s ? std::optional(matchup_arg(*matchup_s)) : std::nullopt;
  const std::string tag = std::string(1, race_letter(model.race)) + "_" + std::string(to_string(model.scope));
  return run_stage(ctx, "dynamics_" + tag, inputs, tag + (matchup ? *matchup : ""), [&] {
    const auto table = dynamics_of(ctx, load_battles(ctx, battles_path), model, matchup);
    const std::string rel = "dynamics_" + tag + ".csv";
    text::write_file(ctx.out() / rel, dynamics_heatmap_csv(table));
    std::cout << tag << ": " << table.pairs << " battle pairs\n";
    return std::vector<std::string>{rel};
  });
}

int cmd_evaluate(Context& ctx, const std::string& battles_path) {
  const std::map<std::string, std::string> inputs{{battles_path, pipeline::file_checksum(battles_path)}};
  return run_stage(ctx, "evaluate", inputs, "", [&] {
    EvaluationConfig cfg = ctx.settings.evaluation;
    cfg.seed = ctx.globals.seed;
    cfg.selection = ctx.settings.selection;
    cfg.selection.seeds = fit_seeds(ctx);
    const auto battles = load_battles(ctx, battles_path);
    const auto result = evaluate(battles, cfg);
    std::string holdout;
    for (const auto& g : result.test_games) holdout += g + "\n";
    text::write_file(ctx.out() / "results.csv", results_csv(result));
    text::write_file(ctx.out() / "results_counts.csv", counts_csv(result));
    text::write_file(ctx.out() / "holdout.txt", holdout);
    std::cout << results_csv(result);
    return std::vector<std::string>{"results.csv", "results_counts.csv", "holdout.txt"};
  });
}

int cmd_plot_data(Context& ctx, const std::string& battles_path, const std::string& model_path,
                  const std::string& kind, const std::optional<std::string>& matchup_s) {
  if (kind != "parallel" && kind != "heatmap") {
    throw Error(ErrorCode::InvalidArgument, "--kind must be parallel or heatmap");
  }
  const std::map<std::string, std::string> inputs{{battles_path, pipeline::file_checksum(battles_path)},
                                                  {model_path, pipeline::file_checksum(model_path)}};
  const auto model = load_model(model_path);
  const std::optional<std::string> matchup = matchup_s ? std::optional(matchup_arg(*matchup_s)) : std::nullopt;
  const std::string tag = kind + "_" + std::string(1, race_letter(model.race)) + "_" +
                          std::string(to_string(model.scope));
  return run_stage(ctx, "plot_" + tag, inputs, tag + (matchup ? *matchup : ""), [&] {
    const auto battles = load_battles(ctx, battles_path);
    const std::string rel = "plots/" + tag + ".csv";
    if (kind == "parallel") {
      text::write_file(ctx.out() / rel, parallel_plot_csv(rows_for(battles, model, nullptr, matchup), model));
    } else {
      text::write_file(ctx.out() / rel, dynamics_heatmap_csv(dynamics_of(ctx, battles, model, matchup)));
    }
    return std::vector<std::string>{rel};
  });
}

struct SynthArgs {
  int games = 5;
  int skirmishes = 3;
  int map_template = -1;
  std::size_t battles = 0;
  std::string matchup = "PvT";
  std::size_t clusters = 3;
  std::string outcome = "cyclic";
  double epsilon = 0.2;
  double max_disparity = 1.5;
};

int cmd_gen_synthetic(Context& ctx, const SynthArgs& a) {
  if (a.games < 0 || a.skirmishes < 0) throw Error(ErrorCode::InvalidArgument, "counts must be non-negative");
  if (a.outcome != "cyclic" && a.outcome != "coin" && a.outcome != "value") {
    throw Error(ErrorCode::InvalidArgument, "--outcome must be cyclic, coin or value");
  }
  const std::string params = std::to_string(a.games) + "/" + std::to_string(a.skirmishes) + "/" +
                             std::to_string(a.map_template) + "/" + std::to_string(a.battles) + "/" + a.matchup +
                             "/" + std::to_string(a.clusters) + "/" + a.outcome + "/" +
                             text::format_double(a.epsilon) + "/" + text::format_double(a.max_disparity);
  return run_stage(ctx, "gen_synthetic", {}, params, [&] {
    std::vector<std::string> outputs;
    const Race races[] = {Race::Protoss, Race::Terran, Race::Zerg};
    std::set<int> templates;
    for (int g = 0; g < a.games; ++g) {
      const std::uint64_t gs = Rng::derive(ctx.globals.seed, static_cast<std::uint64_t>(g));
      synth::GameGenConfig cfg;
      cfg.seed = gs;
      cfg.map_template = a.map_template >= 0 ? a.map_template : static_cast<int>(gs % synth::kMapTemplateCount);
      cfg.race_a = races[(gs >> 8) % 3];
      cfg.race_b = races[(gs >> 16) % 3];
      cfg.skirmishes = a.skirmishes;
      templates.insert(cfg.map_template);
      const auto game = synth::gen_gamelog(cfg, ctx.units());
      char stem[32];
      std::snprintf(stem, sizeof stem, "game%04d", g);
      write_game(game.log, game_files(ctx.out() / "corpus", stem));
      text::write_file(ctx.out() / "corpus" / (std::string(stem) + ".truth"), synth::write_truth(game.truth));
      for (const char* ext : {".rgd", ".rod", ".rld", ".truth"}) outputs.push_back("corpus/" + std::string(stem) + ext);
    }
    for (const int t : templates) {
      const std::string rel = "corpus/" + synth::map_template_name(t) + ".grid";
      text::write_file(ctx.out() / rel, write_grid(synth::map_template(t)));
      outputs.push_back(rel);
    }
    if (a.battles > 0) {
      const std::string mu = matchup_arg(a.matchup);
      synth::BattleGenConfig bc;
      bc.seed = Rng::derive(ctx.globals.seed, 1u << 20);
      bc.own_race = race_arg(mu.substr(0, 1));
      bc.enemy_race = race_arg(mu.substr(2, 1));
      std::vector<BattleRecord> rows;
      for (const Scope scope : {Scope::Military, Scope::WithStatic}) {
        bc.scope = scope;
        const auto own_n = ctx.units().basis(bc.own_race, scope).size();
        const auto enemy_n = ctx.units().basis(bc.enemy_race, scope).size();
        bc.own = synth::random_mixture(a.clusters, own_n, 0.008, Rng::derive(bc.seed, 1));
        bc.enemy = synth::random_mixture(a.clusters, enemy_n, 0.008, Rng::derive(bc.seed, 2));
        if (a.outcome == "cyclic") {
          bc.planted = synth::cyclic_counter(a.clusters, 0.98);
          bc.epsilon = a.epsilon;
        } else {
          bc.planted = Matrix(a.clusters, a.clusters, 0.5);
          bc.epsilon = a.outcome == "value" ? 1.0 : 0.0;
        }
        bc.max_disparity = a.max_disparity;
        bc.battles_per_game = 10;
        bc.games = (a.battles + bc.battles_per_game - 1) / bc.battles_per_game;
        bc.game_prefix = "synth";
        auto gen = synth::gen_battles(bc);
        rows.insert(rows.end(), gen.rows.begin(), gen.rows.end());
        bc.seed = Rng::derive(bc.seed, 3);
      }
      text::write_file(ctx.out() / "synthetic_battles.csv", write_battles_csv(rows));
      outputs.push_back("synthetic_battles.csv");
    }
    return outputs;
  });
}

int exit_code_for(const Error& e) {
  switch (category(e.code())) {
    case ErrorCategory::Input: return kExitInput;
    case ErrorCategory::Validation: return kExitValidation;
    case ErrorCategory::Internal: return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Army-composition clustering and battle-outcome analysis for RTS replays"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random choice (fit initialization, holdout split, generators)");
  app.add_option("--config", g.config, "Flat key = value configuration file");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--set", g.sets, "Configuration override key=value (repeatable)")->allow_extra_args(false);
  app.fallthrough();

  std::string dir;
  auto* ingest = app.add_subcommand("ingest", "Parse a corpus, track attacks, write battles and stats");
  ingest->add_option("dir", dir, "Corpus directory with .rgd/.rod/.rld triples")->required();
  auto* stats = app.add_subcommand("stats", "Per-match-up corpus statistics");
  stats->add_option("dir", dir, "Corpus directory")->required();

  std::string battles;
  std::string race;
  std::optional<std::string> matchup;
  std::string scope = "m";
  auto* cluster = app.add_subcommand("cluster", "Fit the army-composition mixture for one race");
  cluster->add_option("--battles", battles, "Battles CSV")->required();
  cluster->add_option("--race", race, "Race (Protoss/Terran/Zerg or P/T/Z)")->required();
  bool pool = false;
  auto* cluster_mu = cluster->add_option("--matchup", matchup, "Fit armies of this match-up only");
  auto* cluster_pool = cluster->add_flag("--pool", pool, "Pool the race's armies across all match-ups");
  cluster_mu->excludes(cluster_pool);
  cluster->add_option("--scope", scope, "m or ws")->capture_default_str();

  std::string own_model;
  std::string enemy_model;
  auto* counter = app.add_subcommand("counter-table", "Learn P(C|EC) from battles and two models");
  counter->add_option("--battles", battles, "Battles CSV")->required();
  counter->add_option("--own-model", own_model, "Own-race model file")->required();
  counter->add_option("--enemy-model", enemy_model, "Enemy-race model file")->required();
  counter->add_option("--matchup", matchup, "Restrict to one match-up");

  std::string model;
  auto* dynamics = app.add_subcommand("dynamics", "Cluster transition table over Δt");
  dynamics->add_option("--battles", battles, "Battles CSV")->required();
  dynamics->add_option("--model", model, "Model file")->required();
  dynamics->add_option("--matchup", matchup, "Restrict to one match-up");

  auto* eval = app.add_subcommand("evaluate", "Winner-prediction scores on held-out games");
  eval->add_option("--battles", battles, "Battles CSV")->required();

  std::string kind = "parallel";
  auto* plot = app.add_subcommand("plot-data", "Parallel-plot or heatmap data");
  plot->add_option("--battles", battles, "Battles CSV")->required();
  plot->add_option("--model", model, "Model file")->required();
  plot->add_option("--kind", kind, "parallel or heatmap")->capture_default_str();
  plot->add_option("--matchup", matchup, "Restrict to one match-up");

  SynthArgs synth_args;
  auto* gen = app.add_subcommand("gen-synthetic", "Write a synthetic corpus with ground truth");
  gen->add_option("--games", synth_args.games, "Number of game logs")->capture_default_str();
  gen->add_option("--skirmishes", synth_args.skirmishes, "Scripted skirmishes per game")->capture_default_str();
  gen->add_option("--template", synth_args.map_template, "Map template 0-4 (default: per game)");
  gen->add_option("--battles", synth_args.battles, "Also write this many planted battles per scope");
  gen->add_option("--matchup", synth_args.matchup, "Match-up of the planted battles")->capture_default_str();
  gen->add_option("--clusters", synth_args.clusters, "Planted clusters per race")->capture_default_str();
  gen->add_option("--outcome", synth_args.outcome, "cyclic, coin or value")->capture_default_str();
  gen->add_option("--epsilon", synth_args.epsilon, "Share of value-decided outcomes (cyclic)")->capture_default_str();
  gen->add_option("--max-disparity", synth_args.max_disparity, "Largest army value ratio")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    Context ctx = make_context(g, std::vector<std::string>(argv + 1, argv + argc));
    if (*ingest) return cmd_ingest(ctx, dir);
    if (*stats) return cmd_stats(ctx, dir);
    if (*cluster) {
      if (!matchup && !pool) throw Error(ErrorCode::InvalidArgument, "cluster needs --matchup or --pool");
      return cmd_cluster(ctx, battles, race, matchup, scope);
    }
    if (*counter) return cmd_counter_table(ctx, battles, own_model, enemy_model, matchup);
    if (*dynamics) return cmd_dynamics(ctx, battles, model, matchup);
    if (*eval) return cmd_evaluate(ctx, battles);
    if (*plot) return cmd_plot_data(ctx, battles, model, kind, matchup);
    if (*gen) return cmd_gen_synthetic(ctx, synth_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
