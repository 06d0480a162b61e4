#pragma once

// Streaming PGN reader for Lichess-style exports: tag-pair headers, movetext
// with {[%clk H:MM:SS]} comments, NAGs and nested variations. Malformed games
// are skipped with a diagnostics tally; the stream itself never aborts.

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maia2/common.hpp"

namespace maia2::pgn {

enum class GameResult { WhiteWin, BlackWin, Draw };

struct TimeControl {
  int base_seconds = 0;
  int increment_seconds = 0;
  bool known = false;
};

struct TimedMove {
  std::string san;
  std::optional<int> clock_seconds;  // mover's remaining time after the move
};

struct GameRecord {
  int white_elo = 0;
  int black_elo = 0;
  std::string event;
  TimeControl time_control;
  GameResult result = GameResult::Draw;
  std::vector<TimedMove> moves;

  // Lichess exports carry a %clk comment on every move or none at all;
  // partially clocked games count as no-clock.
  bool has_clocks() const {
    if (moves.empty()) return false;
    for (const TimedMove& m : moves)
      if (!m.clock_seconds) return false;
    return true;
  }
};

namespace detail {

inline bool parse_int(std::string_view text, int& out) {
  if (text.empty()) return false;
  int value = 0;
  for (char ch : text) {
    if (ch < '0' || ch > '9') return false;
    value = value * 10 + (ch - '0');
    if (value > 100000000) return false;
  }
  out = value;
  return true;
}

// "600+5" / "600" / "-" (unknown).
inline TimeControl parse_time_control(std::string_view text) {
  TimeControl tc;
  if (text.empty() || text == "-" || text == "?") return tc;
  auto plus = text.find('+');
  std::string_view base = plus == std::string_view::npos ? text : text.substr(0, plus);
  if (!parse_int(base, tc.base_seconds)) return tc;
  if (plus != std::string_view::npos &&
      !parse_int(text.substr(plus + 1), tc.increment_seconds))
    return tc;
  tc.known = true;
  return tc;
}

// Extracts the last [%clk H:MM:SS] from a comment body, if any.
inline std::optional<int> extract_clock(std::string_view comment) {
  std::optional<int> clock;
  std::size_t pos = 0;
  while ((pos = comment.find("[%clk", pos)) != std::string_view::npos) {
    pos += 5;
    while (pos < comment.size() && comment[pos] == ' ') ++pos;
    int fields[3] = {0, 0, 0};
    int field = 0;
    bool any_digit = false, ok = true;
    std::size_t p = pos;
    for (; p < comment.size() && comment[p] != ']'; ++p) {
      char ch = comment[p];
      if (ch >= '0' && ch <= '9') {
        fields[field] = fields[field] * 10 + (ch - '0');
        any_digit = true;
      } else if (ch == ':' && field < 2) {
        ++field;
      } else if (ch == '.') {
        while (p + 1 < comment.size() && comment[p + 1] != ']' && comment[p + 1] != ':') ++p;
      } else {
        ok = false;
        break;
      }
    }
    if (ok && any_digit && field == 2)
      clock = fields[0] * 3600 + fields[1] * 60 + fields[2];
  }
  return clock;
}

// Loose SAN shape check; legality is established later during replay.
inline bool san_syntax_ok(std::string_view token) {
  std::string core{token};
  while (!core.empty() && (core.back() == '+' || core.back() == '#' || core.back() == '!' ||
                           core.back() == '?'))
    core.pop_back();
  if (core == "O-O" || core == "O-O-O" || core == "0-0" || core == "0-0-0") return true;
  if (core.size() < 2 || core.size() > 7) return false;
  std::size_t i = 0;
  if (core[0] == 'K' || core[0] == 'Q' || core[0] == 'R' || core[0] == 'B' || core[0] == 'N')
    i = 1;
  std::size_t promo = core.find('=');
  std::string body = promo == std::string::npos ? core.substr(i) : core.substr(i, promo - i);
  if (promo != std::string::npos) {
    if (i != 0) return false;  // only pawns promote
    if (promo + 2 != core.size()) return false;
    char p = core[promo + 1];
    if (p != 'Q' && p != 'R' && p != 'B' && p != 'N') return false;
  }
  int files = 0, ranks = 0, captures = 0;
  char prev = 0;
  for (char ch : body) {
    if (ch >= 'a' && ch <= 'h')
      ++files;
    else if (ch >= '1' && ch <= '8')
      ++ranks;
    else if (ch == 'x')
      ++captures;
    else
      return false;
    prev = ch;
  }
  return files >= 1 && files <= 2 && ranks >= 1 && ranks <= 2 && captures <= 1 &&
         prev >= '1' && prev <= '8';
}

}  // namespace detail

// Pull-based reader; next() yields one game at a time and never throws on bad
// input. Resyncs to the following "[Event" header after a malformed game.
class PgnReader {
public:
  explicit PgnReader(std::istream& in) : in_(in) {}

  std::optional<GameRecord> next(Tally& tally) {
    for (;;) {
      if (!advance_to_header()) return std::nullopt;
      GameRecord game;
      std::string error;
      if (read_game(game, error)) {
        tally.bump("games_parsed");
        return game;
      }
      tally.bump("games_malformed");
      resync();
    }
  }

private:
  std::istream& in_;
  std::string line_;
  bool line_valid_ = false;

  bool fetch_line() {
    if (line_valid_) return true;
    if (!std::getline(in_, line_)) return false;
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    line_valid_ = true;
    return true;
  }

  void consume_line() { line_valid_ = false; }

  bool advance_to_header() {
    while (fetch_line()) {
      if (!line_.empty() && line_[0] == '[') return true;
      consume_line();
    }
    return false;
  }

  // Skips everything until the next [Event header line.
  void resync() {
    consume_line();
    while (fetch_line()) {
      if (line_.rfind("[Event ", 0) == 0 || line_.rfind("[Event\t", 0) == 0) return;
      consume_line();
    }
  }

  static bool parse_tag(const std::string& line, std::string& key, std::string& value) {
    if (line.size() < 4 || line.front() != '[' || line.back() != ']') return false;
    std::size_t space = line.find_first_of(" \t");
    if (space == std::string::npos) return false;
    key = line.substr(1, space - 1);
    std::size_t open = line.find('"', space);
    std::size_t close = line.rfind('"');
    if (open == std::string::npos || close <= open) return false;
    value = line.substr(open + 1, close - open - 1);
    return true;
  }

  bool read_game(GameRecord& game, std::string& error) {
    bool have_white_elo = false, have_black_elo = false, have_result = false;
    while (fetch_line() && !line_.empty() && line_[0] == '[') {
      std::string key, value;
      if (parse_tag(line_, key, value)) {
        if (key == "Event") {
          game.event = value;
        } else if (key == "WhiteElo") {
          have_white_elo = detail::parse_int(value, game.white_elo);
        } else if (key == "BlackElo") {
          have_black_elo = detail::parse_int(value, game.black_elo);
        } else if (key == "TimeControl") {
          game.time_control = detail::parse_time_control(value);
        } else if (key == "Result") {
          if (value == "1-0") {
            game.result = GameResult::WhiteWin;
            have_result = true;
          } else if (value == "0-1") {
            game.result = GameResult::BlackWin;
            have_result = true;
          } else if (value == "1/2-1/2") {
            game.result = GameResult::Draw;
            have_result = true;
          }
        }
      }
      consume_line();
    }

    if (!read_movetext(game, error)) return false;
    if (!have_white_elo || !have_black_elo || game.white_elo <= 0 || game.black_elo <= 0) {
      error = "missing or invalid Elo header";
      return false;
    }
    if (!have_result) {
      error = "missing or unfinished Result";
      return false;
    }
    if (game.moves.empty()) {
      error = "empty movetext";
      return false;
    }
    return true;
  }

  // Reads tokens until the game terminator. Returns false on malformed input.
  bool read_movetext(GameRecord& game, std::string& error) {
    int variation_depth = 0;
    for (;;) {
      if (!fetch_line()) {
        error = "unterminated movetext";
        return false;
      }
      if (line_.empty()) {
        consume_line();
        continue;
      }
      if (line_[0] == '[') {
        error = "header inside movetext (missing result)";
        return false;
      }
      if (line_[0] == '%') {  // escape line
        consume_line();
        continue;
      }
      std::size_t pos = 0;
      while (pos < line_.size()) {
        char ch = line_[pos];
        if (ch == ' ' || ch == '\t') {
          ++pos;
        } else if (ch == '{') {
          std::string comment;
          if (!read_comment(pos, comment)) {
            error = "unterminated comment";
            return false;
          }
          if (variation_depth == 0 && !game.moves.empty()) {
            if (auto clock = detail::extract_clock(comment))
              game.moves.back().clock_seconds = clock;
          }
        } else if (ch == ';') {
          pos = line_.size();
        } else if (ch == '(') {
          ++variation_depth;
          ++pos;
        } else if (ch == ')') {
          if (--variation_depth < 0) {
            error = "unbalanced variation";
            return false;
          }
          ++pos;
        } else if (ch == '$') {
          ++pos;
          while (pos < line_.size() && std::isdigit(static_cast<unsigned char>(line_[pos]))) ++pos;
        } else {
          std::size_t end = line_.find_first_of(" \t{}();", pos);
          if (end == std::string::npos) end = line_.size();
          std::string_view token{line_.data() + pos, end - pos};
          pos = end;
          if (token == "1-0" || token == "0-1" || token == "1/2-1/2" || token == "*") {
            if (variation_depth != 0) {
              error = "result inside variation";
              return false;
            }
            if (pos >= line_.size()) consume_line();
            else line_ = line_.substr(pos), pos = 0;  // keep remainder for safety
            return true;
          }
          if (!token.empty() && std::isdigit(static_cast<unsigned char>(token[0]))) {
            // Move number like "12." or "12...": digits then dots only.
            std::size_t digits = 0;
            while (digits < token.size() &&
                   std::isdigit(static_cast<unsigned char>(token[digits])))
              ++digits;
            std::size_t dots = digits;
            while (dots < token.size() && token[dots] == '.') ++dots;
            if (dots != token.size()) {
              error = "bad move number token";
              return false;
            }
          } else if (variation_depth == 0) {
            if (!detail::san_syntax_ok(token)) {
              error = "bad SAN token '" + std::string(token) + "'";
              return false;
            }
            game.moves.push_back(TimedMove{std::string(token), std::nullopt});
          }
        }
      }
      if (pos >= line_.size() && line_valid_) consume_line();
    }
  }

  // Reads a brace comment starting at line_[pos]; may span lines.
  bool read_comment(std::size_t& pos, std::string& out) {
    ++pos;  // past '{'
    for (;;) {
      std::size_t close = line_.find('}', pos);
      if (close != std::string::npos) {
        out.append(line_, pos, close - pos);
        pos = close + 1;
        return true;
      }
      out.append(line_, pos, line_.size() - pos);
      out += ' ';
      consume_line();
      if (!fetch_line()) return false;
      pos = 0;
    }
  }
};

}  // namespace maia2::pgn
