#include "support.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#ifndef BATTLEMIX_CLI_PATH
#define BATTLEMIX_CLI_PATH "battlemix"
#endif

namespace testing {

namespace fs = std::filesystem;
using namespace battlemix;

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("battlemix-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

namespace {

DistanceMatrix random_matrix(std::size_t n, std::mt19937_64& gen) {
  DistanceMatrix m(n);
  std::uniform_int_distribution<int> pick(0, 9);
  std::uniform_int_distribution<std::int64_t> dist(32, 9000);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::int64_t v = pick(gen) == 0 ? DistanceMatrix::kUnreachable : dist(gen);
      m.at(i, j) = v;
      m.at(j, i) = v;
    }
  }
  return m;
}

}  // namespace

GameLog random_log(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  auto uni = [&](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(gen);
  };
  const std::array<const char*, 8> types{"Zealot", "Marine", "Zergling", "Probe",
                                         "Dropship", "Mutalisk", "Bunker", "MysteryUnit"};
  const std::array<const char*, 5> orders{"Move", "AttackUnit", "AttackMove", "HoldPosition", "Patrol"};

  GameLog log;
  log.map_name = "Random Map " + std::to_string(uni(0, 999));
  const int p0 = static_cast<int>(uni(0, 5));
  const int p1 = p0 + static_cast<int>(uni(1, 5));
  const Race races[] = {Race::Protoss, Race::Terran, Race::Zerg};
  log.players = {{p0, "alpha" + std::to_string(seed), races[uni(0, 2)]},
                 {p1, "beta gamma", races[uni(0, 2)]}};
  auto any_player = [&] { return uni(0, 1) == 0 ? p0 : p1; };

  std::vector<int> known;
  std::map<int, Frame> known_since;
  int next_id = static_cast<int>(uni(1, 50));
  Frame frame = 0;
  const int n_events = static_cast<int>(uni(0, 80));
  for (int i = 0; i < n_events; ++i) {
    frame += uni(0, 40);
    UnitEvent e;
    e.frame = frame;
    const auto roll = known.empty() ? 0 : uni(0, 9);
    if (roll <= 3) {
      e.kind = EventKind::Creation;
      e.unit_id = next_id++;
      e.unit_type = types[uni(0, types.size() - 1)];
      e.player_id = any_player();
      e.pos = PixelPos{uni(0, 4096), uni(0, 4096)};
      known.push_back(e.unit_id);
      known_since.emplace(e.unit_id, frame);
    } else if (roll == 4) {
      e.kind = EventKind::Discovery;
      e.unit_id = next_id++;
      e.player_id = any_player();
      known.push_back(e.unit_id);
      known_since.emplace(e.unit_id, frame);
    } else if (roll == 5) {
      e.kind = EventKind::Morph;
      e.unit_id = known[uni(0, known.size() - 1)];
      e.unit_type = types[uni(0, types.size() - 1)];
      e.player_id = any_player();
      e.pos = PixelPos{uni(-10, 4096), uni(0, 4096)};
    } else if (roll == 6) {
      e.kind = EventKind::OwnershipChange;
      e.unit_id = known[uni(0, known.size() - 1)];
      e.player_id = any_player();
    } else {
      e.kind = EventKind::Destruction;
      e.unit_id = known[uni(0, known.size() - 1)];
    }
    log.events.push_back(std::move(e));
  }

  Frame eco = 0;
  const int n_eco = static_cast<int>(uni(0, 30));
  for (int i = 0; i < n_eco; ++i) {
    eco += 25 * uni(0, 3);
    log.economy.push_back({eco, any_player(), uni(0, 5000), uni(0, 3000), uni(0, 400), uni(0, 400)});
  }

  Frame last = std::max(frame, eco);
  if (!known.empty()) {
    Frame of = 0;
    const int n_orders = static_cast<int>(uni(0, 40));
    for (int i = 0; i < n_orders; ++i) {
      of += uni(0, 30);
      const int uid = known[uni(0, known.size() - 1)];
      Order o;
      o.frame = std::max(of, known_since[uid]);
      of = o.frame;
      o.player_id = any_player();
      o.unit_id = uid;
      o.order_type = orders[uni(0, orders.size() - 1)];
      o.target = {uni(0, 4096), uni(0, 4096)};
      if (uni(0, 2) == 0) o.target_unit_id = known[uni(0, known.size() - 1)];
      log.orders.push_back(std::move(o));
    }
    last = std::max(last, of);
  }

  const auto n_regions = static_cast<std::size_t>(uni(1, 6));
  const auto n_cdrs = n_regions + static_cast<std::size_t>(uni(0, 4));
  log.region_distances = random_matrix(n_regions, gen);
  log.cdr_distances = random_matrix(n_cdrs, gen);
  if (!known.empty()) {
    std::map<int, std::pair<int, int>> labels;
    Frame pf = 0;
    const int n_pos = static_cast<int>(uni(0, 40));
    for (int i = 0; i < n_pos; ++i) {
      const int uid = known[uni(0, known.size() - 1)];
      const Frame cadence = ((std::max(pf, known_since[uid]) + 99) / 100) * 100 + 100 * uni(0, 1);
      PositionSample s;
      s.unit_id = uid;
      s.pos = {uni(0, 4096), uni(0, 4096)};
      s.region_id = static_cast<int>(uni(0, n_regions - 1));
      s.cdr_id = static_cast<int>(uni(0, n_cdrs - 1));
      const auto it = labels.find(uid);
      const bool changed = it == labels.end() || it->second != std::pair{s.region_id, s.cdr_id};
      // Off-cadence samples are legal only when the unit changes region.
      s.frame = changed && uni(0, 1) == 0 ? std::max(pf, known_since[uid]) + uni(0, 7) : cadence;
      pf = s.frame;
      labels[uid] = {s.region_id, s.cdr_id};
      log.positions.push_back(s);
    }
    last = std::max(last, pf);
  }
  log.duration_frames = last + uni(0, 500);
  return log;
}

CliResult run_cli(const std::vector<std::string>& args, const fs::path& cwd) {
  std::string cmd = "cd '" + cwd.string() + "' && '" BATTLEMIX_CLI_PATH "'";
  for (const auto& a : args) {
    std::string quoted = "'";
    for (const char c : a) {
      if (c == '\'') quoted += "'\\''";
      else quoted += c;
    }
    cmd += " " + quoted + "'";
  }
  cmd += " 2>&1";
  CliResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) throw std::runtime_error("popen failed");
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  const int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace testing
