#include "doctest.h"

#include <filesystem>

#include "battlemix/gmm.hpp"
#include "battlemix/text.hpp"
#include "support.hpp"

using testing::run_cli;
namespace fs = std::filesystem;

namespace {

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors and bad inputs map to exit codes") {
    testing::TempDir tmp;
    CHECK(run_cli({}, tmp.path()).status == 2);
    CHECK(run_cli({"frobnicate"}, tmp.path()).status == 2);
    CHECK(run_cli({"--help"}, tmp.path()).status == 0);

    const auto missing = run_cli({"ingest", "no_such_dir"}, tmp.path());
    CHECK(missing.status == 2);
    CHECK(contains(missing.output, "no_such_dir"));

    fs::create_directories(tmp / "empty");
    CHECK(run_cli({"ingest", "empty"}, tmp.path()).status == 2);

    const auto bad_key = run_cli({"--set", "nonsense=1", "ingest", "empty"}, tmp.path());
    CHECK(bad_key.status == 3);
    CHECK(contains(bad_key.output, "nonsense"));

    const auto no_file = run_cli({"cluster", "--battles", "nope.csv", "--race", "P", "--pool"}, tmp.path());
    CHECK(no_file.status == 2);
    CHECK(contains(no_file.output, "nope.csv"));
  }

  TEST_CASE("end-to-end run on a synthetic corpus, rerun is a no-op") {
    testing::TempDir tmp;
    const auto gen = run_cli({"--seed", "3", "gen-synthetic", "--games", "4", "--battles", "300"}, tmp.path());
    REQUIRE_MESSAGE(gen.status == 0, gen.output);
    CHECK(fs::exists(tmp / "out/corpus/game0000.rgd"));
    CHECK(fs::exists(tmp / "out/corpus/game0003.truth"));

    const auto ingest = run_cli({"--out", "res", "ingest", "out/corpus"}, tmp.path());
    REQUIRE_MESSAGE(ingest.status == 0, ingest.output);
    for (const char* f : {"battles.csv", "stats.csv", "attacks.csv", "ingest_report.txt", "manifest.json"}) {
      CHECK(fs::exists(tmp / "res" / f));
    }
    const auto battles_before = testing::slurp(tmp / "res/battles.csv");
    const auto again = run_cli({"--out", "res", "ingest", "out/corpus"}, tmp.path());
    CHECK(again.status == 0);
    CHECK(contains(again.output, "up to date"));
    CHECK(testing::slurp(tmp / "res/battles.csv") == battles_before);

    fs::remove(tmp / "res/battles.csv");
    const auto rebuilt = run_cli({"--out", "res", "ingest", "out/corpus"}, tmp.path());
    CHECK_FALSE(contains(rebuilt.output, "up to date"));
    CHECK(testing::slurp(tmp / "res/battles.csv") == battles_before);

    const std::vector<std::string> quick{"--set", "k_min=2", "--set", "k_max=4", "--set", "structures=diagonal"};
    auto args = quick;
    for (const char* a : {"cluster", "--battles", "out/synthetic_battles.csv", "--race", "P", "--matchup", "PvT"}) {
      args.push_back(a);
    }
    const auto cl = run_cli(args, tmp.path());
    REQUIRE_MESSAGE(cl.status == 0, cl.output);
    CHECK(fs::exists(tmp / "out/models/PvT_P_m.gmm"));
    const auto search = testing::csv_rows(testing::slurp(tmp / "out/models/PvT_P_m_search.csv"));
    CHECK(search.size() == 1 + 3);

    const auto pooled_missing =
        run_cli({"cluster", "--battles", "out/synthetic_battles.csv", "--race", "T"}, tmp.path());
    CHECK(pooled_missing.status == 3);

    args = quick;
    for (const char* a : {"cluster", "--battles", "out/synthetic_battles.csv", "--race", "T", "--pool"}) {
      args.push_back(a);
    }
    REQUIRE(run_cli(args, tmp.path()).status == 0);
    CHECK(fs::exists(tmp / "out/models/all_T_m.gmm"));

    const auto ct = run_cli({"counter-table", "--battles", "out/synthetic_battles.csv", "--own-model",
                             "out/models/PvT_P_m.gmm", "--enemy-model", "out/models/all_T_m.gmm"},
                            tmp.path());
    REQUIRE_MESSAGE(ct.status == 0, ct.output);
    CHECK(fs::exists(tmp / "out/counter_P_vs_T_m.csv"));

    const auto dy = run_cli({"dynamics", "--battles", "out/synthetic_battles.csv", "--model", "out/models/all_T_m.gmm"},
                            tmp.path());
    REQUIRE_MESSAGE(dy.status == 0, dy.output);
    CHECK(fs::exists(tmp / "out/dynamics_T_m.csv"));

    for (const char* kind : {"parallel", "heatmap"}) {
      const auto pd = run_cli({"plot-data", "--battles", "out/synthetic_battles.csv", "--model",
                               "out/models/PvT_P_m.gmm", "--kind", kind},
                              tmp.path());
      REQUIRE_MESSAGE(pd.status == 0, pd.output);
      CHECK(fs::exists(tmp / "out/plots" / (std::string(kind) + "_P_m.csv")));
    }
    CHECK(run_cli({"plot-data", "--battles", "out/synthetic_battles.csv", "--model", "out/models/PvT_P_m.gmm",
                   "--kind", "pie"},
                  tmp.path())
              .status == 3);

    args = quick;
    for (const char* a : {"--set", "holdout=10", "--set", "scope=m", "evaluate", "--battles",
                          "out/synthetic_battles.csv"}) {
      args.push_back(a);
    }
    const auto ev = run_cli(args, tmp.path());
    REQUIRE_MESSAGE(ev.status == 0, ev.output);
    const auto results = testing::csv_rows(testing::slurp(tmp / "out/results.csv"));
    REQUIRE(results.size() == 1 + 9);
    CHECK(results[0][0] == "disparity");
    CHECK(testing::csv_rows(testing::slurp(tmp / "out/holdout.txt")).size() == 10);
  }

  TEST_CASE("identical seeds give byte-identical outputs in fresh directories") {
    testing::TempDir a, b;
    for (const auto* dir : {&a, &b}) {
      REQUIRE(run_cli({"--seed", "11", "gen-synthetic", "--games", "2", "--battles", "200"}, dir->path()).status == 0);
      REQUIRE(run_cli({"ingest", "out/corpus"}, dir->path()).status == 0);
      REQUIRE(run_cli({"--seed", "11", "--set", "k_min=1", "--set", "k_max=4", "cluster", "--battles",
                       "out/synthetic_battles.csv", "--race", "P", "--pool", "--scope", "ws"},
                      dir->path())
                  .status == 0);
    }
    for (const char* f : {"corpus/game0001.rgd", "corpus/game0001.rld", "battles.csv", "attacks.csv",
                          "synthetic_battles.csv", "models/all_P_ws.gmm", "models/all_P_ws_search.csv"}) {
      CHECK_MESSAGE(testing::slurp(a / "out" / f) == testing::slurp(b / "out" / f), f);
    }
  }

  TEST_CASE("planted three-cluster data selects K = 3") {
    testing::TempDir tmp;
    REQUIRE(run_cli({"--seed", "5", "gen-synthetic", "--games", "0", "--battles", "1500"}, tmp.path()).status == 0);
    const auto cl = run_cli({"--set", "k_min=1", "--set", "k_max=6", "--set", "structures=diagonal", "cluster",
                             "--battles", "out/synthetic_battles.csv", "--race", "P", "--matchup", "PvT"},
                            tmp.path());
    REQUIRE_MESSAGE(cl.status == 0, cl.output);
    const auto model = battlemix::parse_model(testing::slurp(tmp / "out/models/PvT_P_m.gmm"));
    CHECK(model.K() == 3);
    CHECK(model.race == battlemix::Race::Protoss);
  }

  TEST_CASE("a one-point grid performs a single fit") {
    testing::TempDir tmp;
    REQUIRE(run_cli({"gen-synthetic", "--games", "0", "--battles", "200"}, tmp.path()).status == 0);
    const auto cl = run_cli({"--set", "k_min=2", "--set", "k_max=2", "--set", "structures=spherical", "cluster",
                             "--battles", "out/synthetic_battles.csv", "--race", "Terran", "--pool"},
                            tmp.path());
    REQUIRE_MESSAGE(cl.status == 0, cl.output);
    CHECK(testing::csv_rows(testing::slurp(tmp / "out/models/all_T_m_search.csv")).size() == 2);
    const auto model = battlemix::parse_model(testing::slurp(tmp / "out/models/all_T_m.gmm"));
    CHECK(model.K() == 2);
    CHECK(model.structure == battlemix::CovarianceType::Spherical);
  }
}
