#include "battlemix/logmodel.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "battlemix/error.hpp"
#include "battlemix/text.hpp"

namespace battlemix {

namespace {

using text::split;

[[noreturn]] void malformed(std::size_t line, const std::string& reason) {
  throw Error(ErrorCode::MalformedLine, reason, line);
}

std::int64_t field_int(std::string_view s, std::size_t line, const char* what) {
  const auto v = text::to_int(s);
  if (!v) malformed(line, std::string("bad integer for ") + what + ": '" + std::string(s) + "'");
  return *v;
}

std::int64_t field_nonneg(std::string_view s, std::size_t line, const char* what) {
  const auto v = field_int(s, line, what);
  if (v < 0) malformed(line, std::string(what) + " must be non-negative");
  return v;
}

int field_id(std::string_view s, std::size_t line, const char* what) {
  const auto v = field_int(s, line, what);
  if (v < -2147483648LL || v > 2147483647LL) malformed(line, std::string(what) + " out of range");
  return static_cast<int>(v);
}

void expect_fields(const std::vector<std::string_view>& f, std::size_t n, std::size_t line) {
  if (f.size() != n) {
    malformed(line, "expected " + std::to_string(n) + " fields, got " + std::to_string(f.size()));
  }
}

void expect_text(std::string_view s, std::size_t line, const char* what) {
  if (s.empty()) malformed(line, std::string(what) + " must be non-empty");
}

bool safe_text(std::string_view s) {
  return s.find_first_of(";\n") == std::string_view::npos;
}

bool starts_with_digit(std::string_view s) {
  return !s.empty() && s.front() >= '0' && s.front() <= '9';
}

std::string pos_str(const PixelPos& p) {
  return std::to_string(p.x) + ";" + std::to_string(p.y);
}

std::string event_line(const UnitEvent& e) {
  std::string out = std::to_string(e.frame);
  switch (e.kind) {
    case EventKind::Creation:
    case EventKind::Morph: {
      const PixelPos p = e.pos.value_or(PixelPos{});
      out += e.kind == EventKind::Creation ? ";Created;" : ";Morphed;";
      out += std::to_string(e.unit_id) + ";" + e.unit_type + ";" + std::to_string(e.player_id) +
             ";" + pos_str(p);
      break;
    }
    case EventKind::Destruction:
      out += ";Destroyed;" + std::to_string(e.unit_id);
      break;
    case EventKind::Discovery:
      out += ";Discovered;" + std::to_string(e.unit_id) + ";" + std::to_string(e.player_id);
      break;
    case EventKind::OwnershipChange:
      out += ";Owned;" + std::to_string(e.unit_id) + ";" + std::to_string(e.player_id);
      break;
  }
  return out;
}

std::string economy_line(const EconomySample& s) {
  return std::to_string(s.frame) + ";R;" + std::to_string(s.player_id) + ";" +
         std::to_string(s.minerals) + ";" + std::to_string(s.gas) + ";" +
         std::to_string(s.supply) + ";" + std::to_string(s.max_supply);
}

void write_matrix(std::string& out, const char* tag, const DistanceMatrix& m) {
  out += tag;
  out += ";" + std::to_string(m.n) + "\n";
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t j = 0; j < m.n; ++j) {
      if (j != 0) out += ' ';
      out += std::to_string(m.at(i, j));
    }
    out += '\n';
  }
}

void check_matrix_shape(const DistanceMatrix& m, std::size_t line) {
  for (std::size_t i = 0; i < m.n; ++i) {
    if (m.at(i, i) != 0) malformed(line, "distance matrix diagonal must be zero");
    for (std::size_t j = i + 1; j < m.n; ++j) {
      if (m.at(i, j) != m.at(j, i)) malformed(line, "distance matrix must be symmetric");
    }
  }
}

[[noreturn]] void invalid(const std::string& reason) {
  throw Error(ErrorCode::InvalidGameLog, reason);
}

}  // namespace

std::string_view to_string(Race race) {
  switch (race) {
    case Race::Protoss: return "Protoss";
    case Race::Terran: return "Terran";
    case Race::Zerg: return "Zerg";
  }
  return "Protoss";
}

std::optional<Race> parse_race(std::string_view s) {
  if (s == "Protoss") return Race::Protoss;
  if (s == "Terran") return Race::Terran;
  if (s == "Zerg") return Race::Zerg;
  return std::nullopt;
}

char race_letter(Race race) { return to_string(race).front(); }

std::string matchup_label(Race a, Race b) {
  if (static_cast<int>(b) < static_cast<int>(a)) std::swap(a, b);
  return std::string{race_letter(a), 'v', race_letter(b)};
}

std::string GameLog::matchup() const {
  if (players.size() != 2) return "?";
  return matchup_label(players[0].race, players[1].race);
}

const PlayerInfo* GameLog::player(int id) const {
  for (const auto& p : players) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

RgdContent parse_rgd(std::string_view input) {
  RgdContent out;
  bool have_map = false;
  bool in_records = false;
  Frame last_frame = 0;
  std::size_t last_line = 0;
  std::unordered_set<int> created;
  std::unordered_set<int> player_ids;

  auto require_player = [&](int pid, std::size_t line) {
    if (!player_ids.contains(pid)) malformed(line, "unknown player id " + std::to_string(pid));
  };

  text::for_each_record(input, [&](std::size_t line, std::string_view rec) {
    last_line = line;
    const auto f = split(rec, ';');
    if (!starts_with_digit(f[0])) {
      if (in_records) malformed(line, "header line after records");
      if (f[0] == "Map") {
        expect_fields(f, 2, line);
        if (have_map) malformed(line, "duplicate Map header");
        out.map_name = std::string(f[1]);
        have_map = true;
      } else if (f[0] == "Frames") {
        expect_fields(f, 2, line);
        out.duration_frames = field_nonneg(f[1], line, "frames");
      } else if (f[0] == "Player") {
        expect_fields(f, 4, line);
        PlayerInfo p;
        p.id = field_id(f[1], line, "player id");
        p.name = std::string(f[2]);
        const auto race = parse_race(f[3]);
        if (!race) malformed(line, "unknown race '" + std::string(f[3]) + "'");
        p.race = *race;
        if (!player_ids.insert(p.id).second) malformed(line, "duplicate player id");
        out.players.push_back(std::move(p));
      } else {
        malformed(line, "unknown header '" + std::string(f[0]) + "'");
      }
      return;
    }

    in_records = true;
    if (!have_map) malformed(line, "missing Map header");
    if (f.size() < 3) malformed(line, "record too short");
    const Frame frame = field_nonneg(f[0], line, "frame");
    if (frame < last_frame) malformed(line, "frame decreases");
    last_frame = frame;
    const auto tag = f[1];

    if (tag == "Created" || tag == "Morphed") {
      expect_fields(f, 7, line);
      UnitEvent e;
      e.frame = frame;
      e.kind = tag == "Created" ? EventKind::Creation : EventKind::Morph;
      e.unit_id = field_id(f[2], line, "unit id");
      expect_text(f[3], line, "unit type");
      e.unit_type = std::string(f[3]);
      e.player_id = field_id(f[4], line, "player id");
      require_player(e.player_id, line);
      e.pos = PixelPos{field_int(f[5], line, "x"), field_int(f[6], line, "y")};
      if (e.kind == EventKind::Creation && !created.insert(e.unit_id).second) {
        throw Error(ErrorCode::DuplicateUnitCreation,
                    "unit " + std::to_string(e.unit_id) + " created twice", line);
      }
      out.events.push_back(std::move(e));
    } else if (tag == "Destroyed") {
      expect_fields(f, 3, line);
      UnitEvent e;
      e.frame = frame;
      e.kind = EventKind::Destruction;
      e.unit_id = field_id(f[2], line, "unit id");
      out.events.push_back(std::move(e));
    } else if (tag == "Discovered" || tag == "Owned") {
      expect_fields(f, 4, line);
      UnitEvent e;
      e.frame = frame;
      e.kind = tag == "Discovered" ? EventKind::Discovery : EventKind::OwnershipChange;
      e.unit_id = field_id(f[2], line, "unit id");
      e.player_id = field_id(f[3], line, "player id");
      require_player(e.player_id, line);
      out.events.push_back(std::move(e));
    } else if (tag == "R") {
      expect_fields(f, 7, line);
      EconomySample s;
      s.frame = frame;
      if (frame % 25 != 0) malformed(line, "economy samples fall on multiples of 25 frames");
      s.player_id = field_id(f[2], line, "player id");
      require_player(s.player_id, line);
      s.minerals = field_nonneg(f[3], line, "minerals");
      s.gas = field_nonneg(f[4], line, "gas");
      s.supply = field_nonneg(f[5], line, "supply");
      s.max_supply = field_nonneg(f[6], line, "max supply");
      out.economy.push_back(s);
    } else {
      throw Error(ErrorCode::UnknownEventTag, "unknown tag '" + std::string(tag) + "'", line);
    }
  });

  if (!have_map) malformed(last_line, "missing Map header");
  if (out.players.size() != 2) {
    malformed(last_line, "expected exactly 2 players, got " + std::to_string(out.players.size()));
  }
  return out;
}

std::vector<Order> parse_rod(std::string_view input) {
  std::vector<Order> out;
  Frame last_frame = 0;
  text::for_each_record(input, [&](std::size_t line, std::string_view rec) {
    const auto f = split(rec, ';');
    expect_fields(f, 7, line);
    Order o;
    o.frame = field_nonneg(f[0], line, "frame");
    if (o.frame < last_frame) malformed(line, "frame decreases");
    last_frame = o.frame;
    o.player_id = field_id(f[1], line, "player id");
    o.unit_id = field_id(f[2], line, "unit id");
    expect_text(f[3], line, "order type");
    o.order_type = std::string(f[3]);
    o.target = PixelPos{field_int(f[4], line, "target x"), field_int(f[5], line, "target y")};
    if (f[6] != "-") o.target_unit_id = field_id(f[6], line, "target unit id");
    out.push_back(std::move(o));
  });
  return out;
}

RldContent parse_rld(std::string_view input) {
  RldContent out;
  enum class Stage { RegionHeader, RegionRows, CdrHeader, CdrRows, Samples };
  Stage stage = Stage::RegionHeader;
  std::size_t row = 0;
  std::size_t last_line = 0;
  Frame last_frame = 0;

  auto read_header = [&](std::string_view rec, std::size_t line, const char* tag,
                         DistanceMatrix& m) {
    const auto f = split(rec, ';');
    if (f[0] != tag) {
      throw Error(ErrorCode::MatrixSizeMismatch, std::string("expected ") + tag + " header", line);
    }
    expect_fields(f, 2, line);
    m = DistanceMatrix(static_cast<std::size_t>(field_nonneg(f[1], line, "matrix size")));
  };
  auto read_row = [&](std::string_view rec, std::size_t line, DistanceMatrix& m) {
    const auto cells = split(rec, ' ');
    if (cells.size() != m.n) {
      throw Error(ErrorCode::MatrixSizeMismatch,
                  "row has " + std::to_string(cells.size()) + " entries, expected " +
                      std::to_string(m.n),
                  line);
    }
    for (std::size_t j = 0; j < m.n; ++j) {
      const auto v = text::to_int(cells[j]);
      if (!v) {
        throw Error(ErrorCode::MatrixSizeMismatch, "bad matrix entry '" + std::string(cells[j]) + "'",
                    line);
      }
      if (*v < DistanceMatrix::kUnreachable) malformed(line, "negative distance");
      m.at(row, j) = *v;
    }
  };

  text::for_each_record(input, [&](std::size_t line, std::string_view rec) {
    last_line = line;
    switch (stage) {
      case Stage::RegionHeader:
        read_header(rec, line, "Regions", out.region_distances);
        row = 0;
        stage = out.region_distances.n == 0 ? Stage::CdrHeader : Stage::RegionRows;
        return;
      case Stage::RegionRows:
        read_row(rec, line, out.region_distances);
        if (++row == out.region_distances.n) {
          check_matrix_shape(out.region_distances, line);
          stage = Stage::CdrHeader;
        }
        return;
      case Stage::CdrHeader:
        read_header(rec, line, "ChokeDepReg", out.cdr_distances);
        row = 0;
        stage = out.cdr_distances.n == 0 ? Stage::Samples : Stage::CdrRows;
        return;
      case Stage::CdrRows:
        read_row(rec, line, out.cdr_distances);
        if (++row == out.cdr_distances.n) {
          check_matrix_shape(out.cdr_distances, line);
          stage = Stage::Samples;
        }
        return;
      case Stage::Samples: {
        const auto f = split(rec, ';');
        expect_fields(f, 6, line);
        PositionSample s;
        s.frame = field_nonneg(f[0], line, "frame");
        if (s.frame < last_frame) malformed(line, "frame decreases");
        last_frame = s.frame;
        s.unit_id = field_id(f[1], line, "unit id");
        s.pos = PixelPos{field_int(f[2], line, "x"), field_int(f[3], line, "y")};
        s.region_id = field_id(f[4], line, "region id");
        s.cdr_id = field_id(f[5], line, "cdr id");
        if (s.region_id < 0 || static_cast<std::size_t>(s.region_id) >= out.region_distances.n) {
          malformed(line, "region id " + std::to_string(s.region_id) + " out of range");
        }
        if (s.cdr_id < 0 || static_cast<std::size_t>(s.cdr_id) >= out.cdr_distances.n) {
          malformed(line, "cdr id " + std::to_string(s.cdr_id) + " out of range");
        }
        out.positions.push_back(s);
        return;
      }
    }
  });

  if (stage != Stage::Samples) {
    throw Error(ErrorCode::MatrixSizeMismatch, "distance matrices incomplete", last_line);
  }
  return out;
}

std::string write_rgd(const GameLog& log) {
  std::string out = "Map;" + log.map_name + "\n";
  out += "Frames;" + std::to_string(log.duration_frames) + "\n";
  for (const auto& p : log.players) {
    out += "Player;" + std::to_string(p.id) + ";" + p.name + ";" + std::string(to_string(p.race)) +
           "\n";
  }
  // Merge the two streams by frame; events go first on equal frames.
  std::size_t ei = 0;
  std::size_t si = 0;
  while (ei < log.events.size() || si < log.economy.size()) {
    const bool take_event =
        si == log.economy.size() ||
        (ei < log.events.size() && log.events[ei].frame <= log.economy[si].frame);
    out += take_event ? event_line(log.events[ei++]) : economy_line(log.economy[si++]);
    out += '\n';
  }
  return out;
}

std::string write_rod(const GameLog& log) {
  std::string out;
  for (const auto& o : log.orders) {
    out += std::to_string(o.frame) + ";" + std::to_string(o.player_id) + ";" +
           std::to_string(o.unit_id) + ";" + o.order_type + ";" + pos_str(o.target) + ";" +
           (o.target_unit_id ? std::to_string(*o.target_unit_id) : std::string("-")) + "\n";
  }
  return out;
}

std::string write_rld(const GameLog& log) {
  std::string out;
  write_matrix(out, "Regions", log.region_distances);
  write_matrix(out, "ChokeDepReg", log.cdr_distances);
  for (const auto& s : log.positions) {
    out += std::to_string(s.frame) + ";" + std::to_string(s.unit_id) + ";" + pos_str(s.pos) + ";" +
           std::to_string(s.region_id) + ";" + std::to_string(s.cdr_id) + "\n";
  }
  return out;
}

GameLog assemble_game(RgdContent rgd, std::vector<Order> orders, RldContent rld) {
  GameLog log;
  log.map_name = std::move(rgd.map_name);
  log.players = std::move(rgd.players);
  log.events = std::move(rgd.events);
  log.economy = std::move(rgd.economy);
  log.orders = std::move(orders);
  log.positions = std::move(rld.positions);
  log.region_distances = std::move(rld.region_distances);
  log.cdr_distances = std::move(rld.cdr_distances);
  if (rgd.duration_frames) {
    log.duration_frames = *rgd.duration_frames;
  } else {
    Frame last = 0;
    if (!log.events.empty()) last = std::max(last, log.events.back().frame);
    if (!log.economy.empty()) last = std::max(last, log.economy.back().frame);
    if (!log.orders.empty()) last = std::max(last, log.orders.back().frame);
    if (!log.positions.empty()) last = std::max(last, log.positions.back().frame);
    log.duration_frames = last;
  }
  validate_game(log);
  return log;
}

void validate_game(const GameLog& log) {
  if (log.players.size() != 2) invalid("expected exactly 2 players");
  if (log.players[0].id == log.players[1].id) invalid("player ids must differ");
  if (!safe_text(log.map_name)) invalid("map name contains ';' or newline");
  for (const auto& p : log.players) {
    if (!safe_text(p.name)) invalid("player name contains ';' or newline");
  }
  auto known_player = [&](int pid) { return log.player(pid) != nullptr; };
  if (log.duration_frames < 0) invalid("negative duration");

  auto check_frame = [&](Frame f, Frame& last, const char* stream) {
    if (f < 0 || f > log.duration_frames) {
      invalid(std::string(stream) + " frame " + std::to_string(f) + " outside [0, duration]");
    }
    if (f < last) invalid(std::string(stream) + " frames decrease");
    last = f;
  };

  // Earliest frame at which each unit id becomes known.
  std::unordered_map<int, Frame> known_since;
  Frame last = 0;
  for (const auto& e : log.events) {
    check_frame(e.frame, last, "event");
    switch (e.kind) {
      case EventKind::Creation:
      case EventKind::Morph:
        if (e.unit_type.empty() || !safe_text(e.unit_type)) invalid("bad unit type");
        if (!known_player(e.player_id)) invalid("event references unknown player");
        if (!e.pos) invalid("creation/morph without position");
        if (e.kind == EventKind::Morph && !known_since.contains(e.unit_id)) {
          invalid("morph of unknown unit");
        }
        known_since.try_emplace(e.unit_id, e.frame);
        break;
      case EventKind::Discovery:
        if (!known_player(e.player_id)) invalid("event references unknown player");
        known_since.try_emplace(e.unit_id, e.frame);
        break;
      case EventKind::OwnershipChange:
        if (!known_player(e.player_id)) invalid("event references unknown player");
        if (!known_since.contains(e.unit_id)) invalid("ownership change of unknown unit");
        break;
      case EventKind::Destruction:
        if (!known_since.contains(e.unit_id)) {
          invalid("destruction of unknown unit " + std::to_string(e.unit_id));
        }
        break;
    }
  }

  last = 0;
  for (const auto& s : log.economy) {
    check_frame(s.frame, last, "economy");
    if (s.frame % 25 != 0) invalid("economy frame not a multiple of 25");
    if (!known_player(s.player_id)) invalid("economy sample references unknown player");
    if (s.minerals < 0 || s.gas < 0 || s.supply < 0 || s.max_supply < 0) {
      invalid("negative economy value");
    }
  }

  auto check_ref = [&](int uid, Frame f, const char* what) {
    const auto it = known_since.find(uid);
    if (it == known_since.end() || it->second > f) {
      invalid(std::string(what) + " references unit " + std::to_string(uid) +
              " before its creation or discovery");
    }
  };

  last = 0;
  for (const auto& o : log.orders) {
    check_frame(o.frame, last, "order");
    if (o.order_type.empty() || !safe_text(o.order_type)) invalid("bad order type");
    if (!known_player(o.player_id)) invalid("order references unknown player");
    check_ref(o.unit_id, o.frame, "order");
  }

  for (const auto* m : {&log.region_distances, &log.cdr_distances}) {
    if (m->d.size() != m->n * m->n) invalid("distance matrix storage size");
    for (std::size_t i = 0; i < m->n; ++i) {
      if (m->at(i, i) != 0) invalid("distance matrix diagonal must be zero");
      for (std::size_t j = 0; j < m->n; ++j) {
        if (m->at(i, j) != m->at(j, i)) invalid("distance matrix must be symmetric");
        if (m->at(i, j) < DistanceMatrix::kUnreachable) invalid("negative distance");
      }
    }
  }

  last = 0;
  std::unordered_map<int, std::pair<int, int>> last_labels;
  for (const auto& s : log.positions) {
    check_frame(s.frame, last, "position");
    check_ref(s.unit_id, s.frame, "position sample");
    if (s.region_id < 0 || static_cast<std::size_t>(s.region_id) >= log.region_distances.n) {
      invalid("position region id out of range");
    }
    if (s.cdr_id < 0 || static_cast<std::size_t>(s.cdr_id) >= log.cdr_distances.n) {
      invalid("position cdr id out of range");
    }
    const std::pair<int, int> labels{s.region_id, s.cdr_id};
    const auto it = last_labels.find(s.unit_id);
    const bool changed = it == last_labels.end() || it->second != labels;
    if (s.frame % 100 != 0 && !changed) {
      invalid("off-cadence position sample without a region change");
    }
    last_labels[s.unit_id] = labels;
  }
}

GameFiles game_files(const std::filesystem::path& dir, std::string_view stem) {
  const std::string s(stem);
  return {dir / (s + ".rgd"), dir / (s + ".rod"), dir / (s + ".rld")};
}

GameLog read_game(const GameFiles& files) {
  auto rgd = parse_rgd(text::read_file(files.rgd));
  auto rod = parse_rod(text::read_file(files.rod));
  auto rld = parse_rld(text::read_file(files.rld));
  return assemble_game(std::move(rgd), std::move(rod), std::move(rld));
}

void write_game(const GameLog& log, const GameFiles& files) {
  text::write_file(files.rgd, write_rgd(log));
  text::write_file(files.rod, write_rod(log));
  text::write_file(files.rld, write_rld(log));
}

}  // namespace battlemix
