#pragma once

// Game filtering, rating buckets, the chunked skill-combination balancer and
// the JSONL shard format consumed by training.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "maia2/chess.hpp"
#include "maia2/common.hpp"
#include "maia2/pgn.hpp"

namespace maia2::pipeline {

// ---------------------------------------------------------------------------
// Rating buckets

// Default layout: [0,1100) then 100-point bands up to [2000,inf) = 11 buckets.
// The alternative right-closed 12-bucket layout ((0,1000], (1000,1100], ...,
// (2000,inf)) is selectable but non-default.
enum class BucketLayout { Eleven, Twelve };

inline int bucket_count(BucketLayout layout) {
  return layout == BucketLayout::Eleven ? 11 : 12;
}

inline int bucket_of(int rating, BucketLayout layout = BucketLayout::Eleven) {
  if (rating <= 0) throw DataError("bucket_of: rating must be positive");
  if (layout == BucketLayout::Eleven) {
    if (rating < 1100) return 0;
    if (rating >= 2000) return 10;
    return 1 + (rating - 1100) / 100;
  }
  if (rating <= 1000) return 0;
  if (rating > 2000) return 11;
  return 1 + (rating - 1001) / 100;
}

// ---------------------------------------------------------------------------
// Game filter

struct FilterConfig {
  int min_ply = 10;
  int max_ply = 300;
  int min_clock_seconds = 30;
  bool require_rapid = true;

  void validate() const {
    if (min_ply < 0 || min_ply >= max_ply)
      throw DataError("filter config: require 0 <= min_ply < max_ply");
    if (min_clock_seconds < 0) throw DataError("filter config: min_clock_seconds < 0");
  }
};

enum class RejectReason { NotRapid, NoClock };

inline std::string to_string(RejectReason r) {
  return r == RejectReason::NotRapid ? "not_rapid" : "no_clock";
}

// The Event header is authoritative; the duration formula base + 40*increment
// in [480, 1500) covers games with stripped headers.
inline bool is_rapid(const pgn::GameRecord& g) {
  auto contains = [&g](std::string_view needle) {
    return g.event.find(needle) != std::string::npos;
  };
  if (contains("Rapid") || contains("rapid")) return true;
  for (std::string_view other : {"Bullet", "bullet", "Blitz", "blitz", "Classical",
                                 "classical", "Correspondence", "correspondence"})
    if (g.event.find(other) != std::string::npos) return false;
  if (!g.time_control.known) return false;
  int estimate = g.time_control.base_seconds + 40 * g.time_control.increment_seconds;
  return estimate >= 480 && estimate < 1500;
}

inline std::optional<RejectReason> filter_game(const pgn::GameRecord& g,
                                               const FilterConfig& cfg) {
  if (cfg.require_rapid && !is_rapid(g)) return RejectReason::NotRapid;
  if (!g.has_clocks()) return RejectReason::NoClock;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Training examples

struct TrainingExample {
  std::string fen;       // mirrored so the active player is white
  std::string move_uci;  // played move in the mirrored frame
  int move_index = 0;
  int active_bucket = 0;
  int opponent_bucket = 0;
  int outcome = 0;  // +1 win / 0 draw / -1 loss for the active player
  int ply = 0;
};

// Replays the game and emits one example per in-window position where both
// players' most recent clocks meet the threshold. Before a player's first
// clock report the time-control base applies. An unreplayable SAN token drops
// the remainder of the game.
inline std::vector<TrainingExample> extract_examples(const pgn::GameRecord& g,
                                                     const FilterConfig& cfg, Tally& tally,
                                                     BucketLayout layout = BucketLayout::Eleven) {
  std::vector<TrainingExample> out;
  chess::Board board = chess::startpos();
  int base = g.time_control.known ? g.time_control.base_seconds
                                  : std::numeric_limits<int>::max();
  int latest_clock[2] = {base, base};
  int white_sign = g.result == pgn::GameResult::WhiteWin
                       ? 1
                       : (g.result == pgn::GameResult::BlackWin ? -1 : 0);

  int n_plies = static_cast<int>(g.moves.size());
  for (int ply = 0; ply < n_plies && ply <= cfg.max_ply; ++ply) {
    chess::Move move;
    try {
      move = chess::parse_san(board, g.moves[static_cast<std::size_t>(ply)].san);
    } catch (const ParseError&) {
      tally.bump("illegal_moves");
      break;  // remainder of the game is untrustworthy
    }

    bool in_window = ply >= cfg.min_ply;
    bool clocks_ok = latest_clock[0] >= cfg.min_clock_seconds &&
                     latest_clock[1] >= cfg.min_clock_seconds;
    if (in_window && clocks_ok) {
      bool white_active = board.side_to_move == chess::Color::White;
      TrainingExample ex;
      chess::Board encoded = white_active ? board : chess::mirror(board);
      chess::Move encoded_move = white_active ? move : chess::mirror_move(move);
      ex.fen = chess::to_fen(encoded);
      ex.move_uci = chess::to_uci(encoded_move);
      ex.move_index = chess::move_to_index(encoded_move);
      ex.active_bucket = bucket_of(white_active ? g.white_elo : g.black_elo, layout);
      ex.opponent_bucket = bucket_of(white_active ? g.black_elo : g.white_elo, layout);
      ex.outcome = white_active ? white_sign : -white_sign;
      ex.ply = ply;
      out.push_back(std::move(ex));
      tally.bump("examples_emitted");
    }

    int mover = board.side_to_move == chess::Color::White ? 0 : 1;
    if (auto clock = g.moves[static_cast<std::size_t>(ply)].clock_seconds)
      latest_clock[mover] = *clock;
    board = chess::apply_move_unchecked(board, move);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Balancer

struct BalancerConfig {
  int chunk_size = 20000;    // games per chunk
  int per_combo_cap = 20;    // games per unordered skill combination
  std::uint64_t seed = 0;

  void validate() const {
    if (per_combo_cap < 1 || chunk_size < 1 || per_combo_cap > chunk_size)
      throw DataError("balancer config: require 1 <= per_combo_cap <= chunk_size");
  }
};

// In-order scan with a per-combination cap; stops early once every unordered
// bucket pair is full. Deterministic in the input order.
inline std::vector<std::size_t> balance_chunk(const std::vector<pgn::GameRecord>& games,
                                              const BalancerConfig& cfg,
                                              BucketLayout layout = BucketLayout::Eleven) {
  if (static_cast<int>(games.size()) > cfg.chunk_size)
    throw DataError("balance_chunk: chunk larger than configured chunk_size");
  int n = bucket_count(layout);
  int total_combos = n * (n + 1) / 2;
  std::map<std::pair<int, int>, int> counts;
  std::vector<std::size_t> selected;
  int full = 0;
  for (std::size_t i = 0; i < games.size(); ++i) {
    if (full == total_combos) break;
    const pgn::GameRecord& g = games[i];
    int bw = bucket_of(g.white_elo, layout);
    int bb = bucket_of(g.black_elo, layout);
    auto key = std::minmax(bw, bb);
    int& count = counts[key];
    if (count < cfg.per_combo_cap) {
      selected.push_back(i);
      if (++count == cfg.per_combo_cap) ++full;
    }
  }
  return selected;
}

// ---------------------------------------------------------------------------
// Shards: one JSON object per line, preceded by a format header line.

inline const std::string kShardHeader = "{\"format\":\"maia2-shard\",\"version\":1}";

inline void write_shard(std::ostream& out, const std::vector<TrainingExample>& examples) {
  out << kShardHeader << '\n';
  for (const TrainingExample& ex : examples) {
    nlohmann::json j{{"fen", ex.fen},          {"move", ex.move_uci},
                     {"active_bucket", ex.active_bucket}, {"opp_bucket", ex.opponent_bucket},
                     {"outcome", ex.outcome},  {"ply", ex.ply}};
    out << j.dump() << '\n';
  }
}

inline void write_shard(const std::filesystem::path& path,
                        const std::vector<TrainingExample>& examples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("write_shard: cannot open " + path.string());
  write_shard(out, examples);
}

inline void for_each_example(std::istream& in, Tally& tally,
                             const std::function<void(TrainingExample&&)>& fn) {
  std::string line;
  if (!std::getline(in, line)) return;  // empty shard
  {
    auto header = nlohmann::json::parse(line, nullptr, false);
    if (header.is_discarded() || header.value("format", "") != "maia2-shard" ||
        header.value("version", 0) != 1)
      throw DataError("shard: bad header line");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      tally.bump("shard_corrupt_lines");
      continue;
    }
    try {
      TrainingExample ex;
      ex.fen = j.at("fen").get<std::string>();
      ex.move_uci = j.at("move").get<std::string>();
      ex.move_index = chess::move_to_index(chess::parse_uci(ex.move_uci));
      ex.active_bucket = j.at("active_bucket").get<int>();
      ex.opponent_bucket = j.at("opp_bucket").get<int>();
      ex.outcome = j.at("outcome").get<int>();
      ex.ply = j.at("ply").get<int>();
      fn(std::move(ex));
    } catch (const std::exception&) {
      tally.bump("shard_corrupt_lines");
    }
  }
}

inline std::vector<TrainingExample> read_shard(const std::filesystem::path& path,
                                               Tally& tally) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("read_shard: cannot open " + path.string());
  std::vector<TrainingExample> out;
  for_each_example(in, tally, [&out](TrainingExample&& ex) { out.push_back(std::move(ex)); });
  return out;
}

inline std::vector<std::filesystem::path> list_shards(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> shards;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl" &&
        entry.path().filename().string().rfind("shard-", 0) == 0)
      shards.push_back(entry.path());
  }
  std::sort(shards.begin(), shards.end());
  return shards;
}

// ---------------------------------------------------------------------------
// Ingest: stream -> parse -> filter -> chunk -> balance -> extract -> shard.

struct IngestConfig {
  FilterConfig filter;
  BalancerConfig balancer;
  BucketLayout layout = BucketLayout::Eleven;
  int workers = 1;
};

struct IngestStats {
  Tally tally;
  std::map<std::pair<int, int>, std::uint64_t> games_per_combo;
  std::uint64_t shards_written = 0;

  nlohmann::json to_json() const {
    nlohmann::json combos = nlohmann::json::array();
    for (const auto& [key, count] : games_per_combo)
      combos.push_back({{"low", key.first}, {"high", key.second}, {"games", count}});
    nlohmann::json counters;
    for (const auto& [k, v] : tally.counts) counters[k] = v;
    return {{"counters", counters}, {"games_per_combo", combos}, {"shards", shards_written}};
  }
};

inline IngestStats ingest(std::istream& pgn_stream, const std::filesystem::path& out_dir,
                          const IngestConfig& cfg) {
  cfg.filter.validate();
  cfg.balancer.validate();
  std::filesystem::create_directories(out_dir);
  IngestStats stats;
  pgn::PgnReader reader(pgn_stream);

  std::vector<pgn::GameRecord> chunk;
  chunk.reserve(static_cast<std::size_t>(cfg.balancer.chunk_size));
  bool done = false;
  while (!done) {
    chunk.clear();
    while (static_cast<int>(chunk.size()) < cfg.balancer.chunk_size) {
      auto game = reader.next(stats.tally);
      if (!game) {
        done = true;
        break;
      }
      stats.tally.bump("games_scanned");
      if (auto reason = filter_game(*game, cfg.filter)) {
        stats.tally.bump("rejected_" + to_string(*reason));
        continue;
      }
      chunk.push_back(std::move(*game));
    }
    if (chunk.empty()) break;

    std::vector<std::size_t> selected = balance_chunk(chunk, cfg.balancer, cfg.layout);
    stats.tally.bump("games_selected", selected.size());
    for (std::size_t idx : selected) {
      auto key = std::minmax(bucket_of(chunk[idx].white_elo, cfg.layout),
                             bucket_of(chunk[idx].black_elo, cfg.layout));
      ++stats.games_per_combo[key];
    }

    // Extraction dominates; parallel per game, deterministic concatenation.
    std::vector<std::vector<TrainingExample>> per_game(selected.size());
    std::vector<Tally> per_game_tally(selected.size());
    parallel_for(selected.size(), cfg.workers, [&](std::size_t i) {
      per_game[i] = extract_examples(chunk[selected[i]], cfg.filter, per_game_tally[i],
                                     cfg.layout);
    });
    std::vector<TrainingExample> examples;
    for (std::size_t i = 0; i < selected.size(); ++i) {
      stats.tally.merge(per_game_tally[i]);
      examples.insert(examples.end(), std::make_move_iterator(per_game[i].begin()),
                      std::make_move_iterator(per_game[i].end()));
    }

    char name[32];
    std::snprintf(name, sizeof(name), "shard-%05llu.jsonl",
                  static_cast<unsigned long long>(stats.shards_written));
    write_shard(out_dir / name, examples);
    ++stats.shards_written;
  }

  std::ofstream stats_out(out_dir / "ingest_stats.json", std::ios::binary);
  stats_out << stats.to_json().dump(2) << '\n';
  return stats;
}

}  // namespace maia2::pipeline
