#pragma once

// Shared test utilities: seeded random playouts for property tests and
// synthetic PGN fixture builders.

#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "maia2/chess.hpp"

namespace maia2::testing {

// Plays up to max_plies random legal moves from the initial position.
// Deterministic given the generator state.
inline chess::Board random_playout(std::mt19937_64& rng, int max_plies) {
  chess::Board b = chess::startpos();
  int plies = std::uniform_int_distribution<int>(0, max_plies)(rng);
  for (int i = 0; i < plies; ++i) {
    std::vector<chess::Move> moves = chess::generate_legal_moves(b);
    if (moves.empty()) break;
    std::size_t pick = std::uniform_int_distribution<std::size_t>(0, moves.size() - 1)(rng);
    b = chess::apply_move_unchecked(b, moves[pick]);
  }
  return b;
}

inline std::vector<chess::Board> random_positions(std::uint64_t seed, int count,
                                                  int max_plies = 60) {
  std::mt19937_64 rng(seed);
  std::vector<chess::Board> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(random_playout(rng, max_plies));
  return out;
}

inline std::string format_clock(int seconds) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%d:%02d:%02d", seconds / 3600, (seconds / 60) % 60,
                seconds % 60);
  return buf;
}

struct PgnGameSpec {
  int white_elo = 1500;
  int black_elo = 1500;
  std::string event = "Rated Rapid game";
  std::string time_control = "600+0";
  std::string result = "1/2-1/2";
  int plies = 40;
  std::uint64_t move_seed = 1;
  // Clock (seconds) reported after the move at a given ply; nullopt = no comment.
  std::function<std::optional<int>(int)> clock_at = [](int ply) {
    return std::optional<int>(600 - 2 * (ply / 2));
  };
};

// Renders one game of random legal moves as Lichess-style PGN. The playout is
// truncated early if the game ends.
inline std::string render_pgn_game(const PgnGameSpec& spec) {
  std::ostringstream out;
  out << "[Event \"" << spec.event << "\"]\n";
  out << "[Site \"https://lichess.org/test\"]\n";
  out << "[Result \"" << spec.result << "\"]\n";
  out << "[WhiteElo \"" << spec.white_elo << "\"]\n";
  out << "[BlackElo \"" << spec.black_elo << "\"]\n";
  out << "[TimeControl \"" << spec.time_control << "\"]\n\n";

  std::mt19937_64 rng(spec.move_seed);
  chess::Board b = chess::startpos();
  for (int ply = 0; ply < spec.plies; ++ply) {
    std::vector<chess::Move> moves = chess::generate_legal_moves(b);
    if (moves.empty()) break;
    std::size_t pick = std::uniform_int_distribution<std::size_t>(0, moves.size() - 1)(rng);
    if (ply % 2 == 0) out << ply / 2 + 1 << ". ";
    out << chess::to_san(b, moves[pick]);
    if (auto clock = spec.clock_at(ply)) out << " { [%clk " << format_clock(*clock) << "] }";
    out << ' ';
    b = chess::apply_move_unchecked(b, moves[pick]);
  }
  out << spec.result << "\n\n";
  return out.str();
}

// A mixed corpus: mostly clean rapid games plus blitz games, no-clock games
// and a sprinkle of malformed ones. Deterministic in the seed.
inline std::string render_random_pgn(std::uint64_t seed, int n_games) {
  std::mt19937_64 rng(seed);
  std::ostringstream out;
  for (int i = 0; i < n_games; ++i) {
    PgnGameSpec spec;
    spec.move_seed = rng();
    spec.white_elo = std::uniform_int_distribution<int>(800, 2600)(rng);
    spec.black_elo = std::uniform_int_distribution<int>(800, 2600)(rng);
    spec.plies = std::uniform_int_distribution<int>(6, 70)(rng);
    int kind = std::uniform_int_distribution<int>(0, 19)(rng);
    if (kind == 0) {
      spec.event = "Rated Blitz game";
      spec.time_control = "300+0";
    } else if (kind == 1) {
      spec.event = "";
      spec.time_control = "600+0";  // rapid via the duration fallback
    } else if (kind == 2) {
      spec.clock_at = [](int) { return std::nullopt; };  // no clocks
    } else if (kind == 3) {
      int dip_ply = std::uniform_int_distribution<int>(12, 50)(rng);
      spec.clock_at = [dip_ply](int ply) {
        return std::optional<int>(ply >= dip_ply ? 10 : 600 - (ply / 2));
      };
    }
    int result = std::uniform_int_distribution<int>(0, 2)(rng);
    spec.result = result == 0 ? "1-0" : (result == 1 ? "0-1" : "1/2-1/2");
    std::string game = render_pgn_game(spec);
    if (std::uniform_int_distribution<int>(0, 99)(rng) == 0) {
      // Corrupt the movetext to exercise resync.
      auto pos = game.find("1. ");
      if (pos != std::string::npos) game.insert(pos + 3, "Zq9x ");
    }
    out << game;
  }
  return out.str();
}

}  // namespace maia2::testing
