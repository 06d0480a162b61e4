#pragma once

// Chess rules: board state, FEN, legal move generation, SAN/UCI move text,
// rank mirroring and the fixed 4168-class move vocabulary.
//
// Boards are immutable values; every operation returns a new Board. The
// generator is a plain mailbox scheme with copy-make legality filtering,
// which is fast enough for perft-based verification and the data pipeline.

#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "maia2/common.hpp"

namespace maia2::chess {

enum class Color : std::uint8_t { White = 0, Black = 1 };

inline Color opposite(Color c) { return c == Color::White ? Color::Black : Color::White; }

enum class PieceType : std::uint8_t { Pawn = 0, Knight, Bishop, Rook, Queen, King };

// Square index: a1=0, h1=7, a8=56, h8=63 (rank*8 + file).
using Square = int;

inline int file_of(Square s) { return s & 7; }
inline int rank_of(Square s) { return s >> 3; }
inline Square make_square(int rank, int file) { return rank * 8 + file; }

inline std::string square_name(Square s) {
  std::string out;
  out += static_cast<char>('a' + file_of(s));
  out += static_cast<char>('1' + rank_of(s));
  return out;
}

inline std::optional<Square> parse_square(std::string_view text) {
  if (text.size() != 2) return std::nullopt;
  int file = text[0] - 'a';
  int rank = text[1] - '1';
  if (file < 0 || file > 7 || rank < 0 || rank > 7) return std::nullopt;
  return make_square(rank, file);
}

// Board cell encoding: 0 empty, 1..6 white PNBRQK, 7..12 black PNBRQK.
constexpr std::uint8_t kEmpty = 0;

inline std::uint8_t make_cell(Color c, PieceType t) {
  return static_cast<std::uint8_t>(1 + static_cast<int>(t) + (c == Color::Black ? 6 : 0));
}
inline bool cell_empty(std::uint8_t cell) { return cell == kEmpty; }
inline Color cell_color(std::uint8_t cell) { return cell <= 6 ? Color::White : Color::Black; }
inline PieceType cell_type(std::uint8_t cell) {
  return static_cast<PieceType>((cell - 1) % 6);
}

inline char piece_char(std::uint8_t cell) {
  static constexpr char kChars[] = "PNBRQK";
  char ch = kChars[static_cast<int>(cell_type(cell))];
  return cell_color(cell) == Color::White ? ch : static_cast<char>(std::tolower(ch));
}

inline std::optional<PieceType> piece_type_from_char(char ch) {
  switch (std::toupper(static_cast<unsigned char>(ch))) {
    case 'P': return PieceType::Pawn;
    case 'N': return PieceType::Knight;
    case 'B': return PieceType::Bishop;
    case 'R': return PieceType::Rook;
    case 'Q': return PieceType::Queen;
    case 'K': return PieceType::King;
    default: return std::nullopt;
  }
}

// Castling right bits.
constexpr std::uint8_t kCastleWK = 1;
constexpr std::uint8_t kCastleWQ = 2;
constexpr std::uint8_t kCastleBK = 4;
constexpr std::uint8_t kCastleBQ = 8;

struct Move {
  std::int8_t from = 0;
  std::int8_t to = 0;
  std::int8_t promotion = -1;  // -1 none, otherwise PieceType (N/B/R/Q)

  bool has_promotion() const { return promotion >= 0; }
  PieceType promotion_type() const { return static_cast<PieceType>(promotion); }

  bool operator==(const Move& other) const {
    return from == other.from && to == other.to && promotion == other.promotion;
  }
  bool operator!=(const Move& other) const { return !(*this == other); }
};

inline Move make_move(Square from, Square to,
                      std::optional<PieceType> promo = std::nullopt) {
  Move m;
  m.from = static_cast<std::int8_t>(from);
  m.to = static_cast<std::int8_t>(to);
  m.promotion = promo ? static_cast<std::int8_t>(*promo) : -1;
  return m;
}

inline std::string to_uci(const Move& m) {
  std::string out = square_name(m.from) + square_name(m.to);
  if (m.has_promotion()) {
    static constexpr char kPromoChars[] = "pnbrq";
    out += kPromoChars[static_cast<int>(m.promotion_type())];
  }
  return out;
}

inline Move parse_uci(std::string_view text) {
  if (text.size() < 4 || text.size() > 5) throw ParseError("uci move: bad length '" + std::string(text) + "'");
  auto from = parse_square(text.substr(0, 2));
  auto to = parse_square(text.substr(2, 2));
  if (!from || !to) throw ParseError("uci move: bad square in '" + std::string(text) + "'");
  std::optional<PieceType> promo;
  if (text.size() == 5) {
    promo = piece_type_from_char(text[4]);
    if (!promo || *promo == PieceType::Pawn || *promo == PieceType::King)
      throw ParseError("uci move: bad promotion piece in '" + std::string(text) + "'");
  }
  return make_move(*from, *to, promo);
}

struct Board {
  std::array<std::uint8_t, 64> cells{};
  Color side_to_move = Color::White;
  std::uint8_t castling = 0;
  std::int8_t en_passant = -1;  // target square or -1
  int halfmove_clock = 0;
  int fullmove_number = 1;

  std::uint8_t at(Square s) const { return cells[static_cast<std::size_t>(s)]; }
  void set(Square s, std::uint8_t cell) { cells[static_cast<std::size_t>(s)] = cell; }

  bool operator==(const Board& other) const {
    return cells == other.cells && side_to_move == other.side_to_move &&
           castling == other.castling && en_passant == other.en_passant &&
           halfmove_clock == other.halfmove_clock &&
           fullmove_number == other.fullmove_number;
  }
  bool operator!=(const Board& other) const { return !(*this == other); }

  Square king_square(Color c) const {
    std::uint8_t king = make_cell(c, PieceType::King);
    for (Square s = 0; s < 64; ++s)
      if (cells[static_cast<std::size_t>(s)] == king) return s;
    return -1;
  }
};

constexpr std::string_view kStartposFen =
    "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";

namespace detail {

constexpr int kKnightDeltas[8][2] = {{1, 2},  {2, 1},  {2, -1}, {1, -2},
                                     {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2}};
constexpr int kKingDeltas[8][2] = {{1, 0},  {1, 1},  {0, 1},  {-1, 1},
                                   {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
constexpr int kBishopDeltas[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
constexpr int kRookDeltas[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

inline bool on_board(int rank, int file) {
  return rank >= 0 && rank < 8 && file >= 0 && file < 8;
}

}  // namespace detail

// True when `target` is attacked by any piece of `by`.
inline bool square_attacked(const Board& b, Square target, Color by) {
  int tr = rank_of(target), tf = file_of(target);
  // Pawns: a white pawn on rank tr-1 attacks tr.
  int pawn_rank = by == Color::White ? tr - 1 : tr + 1;
  std::uint8_t pawn = make_cell(by, PieceType::Pawn);
  if (pawn_rank >= 0 && pawn_rank < 8) {
    for (int df : {-1, 1}) {
      int f = tf + df;
      if (f >= 0 && f < 8 && b.at(make_square(pawn_rank, f)) == pawn) return true;
    }
  }
  std::uint8_t knight = make_cell(by, PieceType::Knight);
  for (const auto& d : detail::kKnightDeltas) {
    int r = tr + d[0], f = tf + d[1];
    if (detail::on_board(r, f) && b.at(make_square(r, f)) == knight) return true;
  }
  std::uint8_t king = make_cell(by, PieceType::King);
  for (const auto& d : detail::kKingDeltas) {
    int r = tr + d[0], f = tf + d[1];
    if (detail::on_board(r, f) && b.at(make_square(r, f)) == king) return true;
  }
  std::uint8_t bishop = make_cell(by, PieceType::Bishop);
  std::uint8_t rook = make_cell(by, PieceType::Rook);
  std::uint8_t queen = make_cell(by, PieceType::Queen);
  for (const auto& d : detail::kBishopDeltas) {
    int r = tr + d[0], f = tf + d[1];
    while (detail::on_board(r, f)) {
      std::uint8_t cell = b.at(make_square(r, f));
      if (!cell_empty(cell)) {
        if (cell == bishop || cell == queen) return true;
        break;
      }
      r += d[0];
      f += d[1];
    }
  }
  for (const auto& d : detail::kRookDeltas) {
    int r = tr + d[0], f = tf + d[1];
    while (detail::on_board(r, f)) {
      std::uint8_t cell = b.at(make_square(r, f));
      if (!cell_empty(cell)) {
        if (cell == rook || cell == queen) return true;
        break;
      }
      r += d[0];
      f += d[1];
    }
  }
  return false;
}

inline bool in_check(const Board& b, Color c) {
  Square k = b.king_square(c);
  return k >= 0 && square_attacked(b, k, opposite(c));
}

// Applies a move without legality checks. Castling is encoded as the king
// move (e1g1 etc); the rook is relocated here.
inline Board apply_move_unchecked(const Board& b, const Move& m) {
  Board out = b;
  Color us = b.side_to_move;
  std::uint8_t moving = b.at(m.from);
  PieceType type = cell_type(moving);
  bool is_capture = !cell_empty(b.at(m.to));

  out.en_passant = -1;
  out.set(m.from, kEmpty);

  if (type == PieceType::Pawn) {
    if (m.to == b.en_passant && b.en_passant >= 0 && file_of(m.from) != file_of(m.to) &&
        !is_capture) {
      // En passant: remove the bypassed pawn.
      Square victim = make_square(rank_of(m.from), file_of(m.to));
      out.set(victim, kEmpty);
      is_capture = true;
    }
    if (std::abs(rank_of(m.to) - rank_of(m.from)) == 2) {
      out.en_passant =
          static_cast<std::int8_t>(make_square((rank_of(m.from) + rank_of(m.to)) / 2, file_of(m.from)));
    }
  }

  if (m.has_promotion())
    out.set(m.to, make_cell(us, m.promotion_type()));
  else
    out.set(m.to, moving);

  if (type == PieceType::King) {
    out.castling &= us == Color::White ? ~(kCastleWK | kCastleWQ) : ~(kCastleBK | kCastleBQ);
    int delta = file_of(m.to) - file_of(m.from);
    if (delta == 2) {  // king side
      Square rook_from = make_square(rank_of(m.from), 7);
      Square rook_to = make_square(rank_of(m.from), 5);
      out.set(rook_to, out.at(rook_from));
      out.set(rook_from, kEmpty);
    } else if (delta == -2) {  // queen side
      Square rook_from = make_square(rank_of(m.from), 0);
      Square rook_to = make_square(rank_of(m.from), 3);
      out.set(rook_to, out.at(rook_from));
      out.set(rook_from, kEmpty);
    }
  }

  // Rook moves or rook captures drop the corresponding right.
  auto clear_rook_right = [&out](Square s) {
    switch (s) {
      case 7: out.castling &= ~kCastleWK; break;
      case 0: out.castling &= ~kCastleWQ; break;
      case 63: out.castling &= ~kCastleBK; break;
      case 56: out.castling &= ~kCastleBQ; break;
      default: break;
    }
  };
  clear_rook_right(m.from);
  clear_rook_right(m.to);

  out.halfmove_clock = (type == PieceType::Pawn || is_capture) ? 0 : b.halfmove_clock + 1;
  if (us == Color::Black) out.fullmove_number = b.fullmove_number + 1;
  out.side_to_move = opposite(us);
  return out;
}

namespace detail {

inline void push_pawn_move(std::vector<Move>& out, Square from, Square to, Color us) {
  int last_rank = us == Color::White ? 7 : 0;
  if (rank_of(to) == last_rank) {
    for (PieceType promo : {PieceType::Queen, PieceType::Rook, PieceType::Bishop, PieceType::Knight})
      out.push_back(make_move(from, to, promo));
  } else {
    out.push_back(make_move(from, to));
  }
}

inline void generate_pseudo_moves(const Board& b, std::vector<Move>& out) {
  Color us = b.side_to_move;
  Color them = opposite(us);
  int forward = us == Color::White ? 1 : -1;
  int start_rank = us == Color::White ? 1 : 6;

  for (Square from = 0; from < 64; ++from) {
    std::uint8_t cell = b.at(from);
    if (cell_empty(cell) || cell_color(cell) != us) continue;
    int r = rank_of(from), f = file_of(from);
    switch (cell_type(cell)) {
      case PieceType::Pawn: {
        int r1 = r + forward;
        if (on_board(r1, f) && cell_empty(b.at(make_square(r1, f)))) {
          push_pawn_move(out, from, make_square(r1, f), us);
          int r2 = r + 2 * forward;
          if (r == start_rank && cell_empty(b.at(make_square(r2, f))))
            out.push_back(make_move(from, make_square(r2, f)));
        }
        for (int df : {-1, 1}) {
          int cf = f + df;
          if (!on_board(r1, cf)) continue;
          Square to = make_square(r1, cf);
          std::uint8_t target = b.at(to);
          if (!cell_empty(target) && cell_color(target) == them)
            push_pawn_move(out, from, to, us);
          else if (to == b.en_passant)
            out.push_back(make_move(from, to));
        }
        break;
      }
      case PieceType::Knight:
        for (const auto& d : kKnightDeltas) {
          int nr = r + d[0], nf = f + d[1];
          if (!on_board(nr, nf)) continue;
          std::uint8_t target = b.at(make_square(nr, nf));
          if (cell_empty(target) || cell_color(target) == them)
            out.push_back(make_move(from, make_square(nr, nf)));
        }
        break;
      case PieceType::King:
        for (const auto& d : kKingDeltas) {
          int nr = r + d[0], nf = f + d[1];
          if (!on_board(nr, nf)) continue;
          std::uint8_t target = b.at(make_square(nr, nf));
          if (cell_empty(target) || cell_color(target) == them)
            out.push_back(make_move(from, make_square(nr, nf)));
        }
        break;
      case PieceType::Bishop:
      case PieceType::Rook:
      case PieceType::Queen: {
        PieceType type = cell_type(cell);
        auto slide = [&](const int (*deltas)[2], int count) {
          for (int i = 0; i < count; ++i) {
            int nr = r + deltas[i][0], nf = f + deltas[i][1];
            while (on_board(nr, nf)) {
              Square to = make_square(nr, nf);
              std::uint8_t target = b.at(to);
              if (cell_empty(target)) {
                out.push_back(make_move(from, to));
              } else {
                if (cell_color(target) == them) out.push_back(make_move(from, to));
                break;
              }
              nr += deltas[i][0];
              nf += deltas[i][1];
            }
          }
        };
        if (type != PieceType::Rook) slide(kBishopDeltas, 4);
        if (type != PieceType::Bishop) slide(kRookDeltas, 4);
        break;
      }
    }
  }

  // Castling: rights already track rook/king presence; squares between must be
  // empty and the king path free of attacks (including the current square).
  int home = us == Color::White ? 0 : 7;
  Square king_from = make_square(home, 4);
  std::uint8_t king_bit = us == Color::White ? kCastleWK : kCastleBK;
  std::uint8_t queen_bit = us == Color::White ? kCastleWQ : kCastleBQ;
  if ((b.castling & (king_bit | queen_bit)) && b.at(king_from) == make_cell(us, PieceType::King) &&
      !square_attacked(b, king_from, them)) {
    if ((b.castling & king_bit) && cell_empty(b.at(make_square(home, 5))) &&
        cell_empty(b.at(make_square(home, 6))) &&
        !square_attacked(b, make_square(home, 5), them) &&
        !square_attacked(b, make_square(home, 6), them)) {
      out.push_back(make_move(king_from, make_square(home, 6)));
    }
    if ((b.castling & queen_bit) && cell_empty(b.at(make_square(home, 1))) &&
        cell_empty(b.at(make_square(home, 2))) && cell_empty(b.at(make_square(home, 3))) &&
        !square_attacked(b, make_square(home, 2), them) &&
        !square_attacked(b, make_square(home, 3), them)) {
      out.push_back(make_move(king_from, make_square(home, 2)));
    }
  }
}

}  // namespace detail

inline std::vector<Move> generate_legal_moves(const Board& b) {
  std::vector<Move> pseudo;
  pseudo.reserve(48);
  detail::generate_pseudo_moves(b, pseudo);
  std::vector<Move> legal;
  legal.reserve(pseudo.size());
  for (const Move& m : pseudo) {
    Board next = apply_move_unchecked(b, m);
    if (!in_check(next, b.side_to_move)) legal.push_back(m);
  }
  return legal;
}

// Validated application; rejects moves outside the legal set.
inline Board apply_move(const Board& b, const Move& m) {
  for (const Move& legal : generate_legal_moves(b)) {
    if (legal == m) return apply_move_unchecked(b, m);
  }
  throw DataError("illegal move " + to_uci(m));
}

inline bool gives_check(const Board& b, const Move& m) {
  Board next = apply_move_unchecked(b, m);
  return in_check(next, next.side_to_move);
}

inline std::uint64_t perft(const Board& b, int depth) {
  if (depth <= 0) return 1;
  std::vector<Move> moves = generate_legal_moves(b);
  if (depth == 1) return moves.size();
  std::uint64_t nodes = 0;
  for (const Move& m : moves) nodes += perft(apply_move_unchecked(b, m), depth - 1);
  return nodes;
}

// Rank flip with color swap: the mirrored board shows the same game from the
// other side's perspective. Involution by construction.
inline Board mirror(const Board& b) {
  Board out;
  for (Square s = 0; s < 64; ++s) {
    std::uint8_t cell = b.at(s);
    Square flipped = make_square(7 - rank_of(s), file_of(s));
    if (cell_empty(cell))
      out.set(flipped, kEmpty);
    else
      out.set(flipped, make_cell(opposite(cell_color(cell)), cell_type(cell)));
  }
  out.side_to_move = opposite(b.side_to_move);
  out.castling = 0;
  if (b.castling & kCastleWK) out.castling |= kCastleBK;
  if (b.castling & kCastleWQ) out.castling |= kCastleBQ;
  if (b.castling & kCastleBK) out.castling |= kCastleWK;
  if (b.castling & kCastleBQ) out.castling |= kCastleWQ;
  out.en_passant = b.en_passant < 0
                       ? -1
                       : static_cast<std::int8_t>(make_square(7 - rank_of(b.en_passant),
                                                              file_of(b.en_passant)));
  out.halfmove_clock = b.halfmove_clock;
  out.fullmove_number = b.fullmove_number;
  return out;
}

inline Move mirror_move(const Move& m) {
  Move out = m;
  out.from = static_cast<std::int8_t>(make_square(7 - rank_of(m.from), file_of(m.from)));
  out.to = static_cast<std::int8_t>(make_square(7 - rank_of(m.to), file_of(m.to)));
  return out;
}

// ---------------------------------------------------------------------------
// FEN

inline Board parse_fen(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string placement, active, castling, ep;
  if (!(in >> placement >> active >> castling >> ep))
    throw ParseError("fen: expected at least 4 fields");
  int halfmove = 0, fullmove = 1;
  if (!(in >> halfmove)) halfmove = 0;
  if (!(in >> fullmove)) fullmove = 1;

  Board b;
  int rank = 7, file = 0;
  for (char ch : placement) {
    if (ch == '/') {
      if (file != 8) throw ParseError("fen placement: rank with wrong square count");
      --rank;
      file = 0;
      if (rank < 0) throw ParseError("fen placement: too many ranks");
    } else if (ch >= '1' && ch <= '8') {
      file += ch - '0';
      if (file > 8) throw ParseError("fen placement: rank overflow");
    } else {
      auto type = piece_type_from_char(ch);
      if (!type) throw ParseError(std::string("fen placement: bad piece char '") + ch + "'");
      if (file > 7) throw ParseError("fen placement: rank overflow");
      Color color = std::isupper(static_cast<unsigned char>(ch)) ? Color::White : Color::Black;
      b.set(make_square(rank, file), make_cell(color, *type));
      ++file;
    }
  }
  if (rank != 0 || file != 8) throw ParseError("fen placement: wrong rank count");

  for (Color c : {Color::White, Color::Black}) {
    int kings = 0;
    std::uint8_t king = make_cell(c, PieceType::King);
    for (Square s = 0; s < 64; ++s)
      if (b.at(s) == king) ++kings;
    if (kings != 1)
      throw ParseError("fen placement: expected exactly one " +
                       std::string(c == Color::White ? "white" : "black") + " king, found " +
                       std::to_string(kings));
  }

  if (active == "w")
    b.side_to_move = Color::White;
  else if (active == "b")
    b.side_to_move = Color::Black;
  else
    throw ParseError("fen active color: expected 'w' or 'b'");

  if (castling != "-") {
    for (char ch : castling) {
      std::uint8_t bit;
      switch (ch) {
        case 'K': bit = kCastleWK; break;
        case 'Q': bit = kCastleWQ; break;
        case 'k': bit = kCastleBK; break;
        case 'q': bit = kCastleBQ; break;
        default: throw ParseError(std::string("fen castling: bad char '") + ch + "'");
      }
      if (b.castling & bit) throw ParseError("fen castling: duplicate right");
      b.castling |= bit;
    }
  }
  // Rights must match king/rook placement.
  auto require = [&b](std::uint8_t bit, Square sq, std::uint8_t cell) {
    if ((b.castling & bit) && b.at(sq) != cell)
      throw ParseError("fen castling: right inconsistent with placement at " + square_name(sq));
  };
  require(kCastleWK | kCastleWQ, 4, make_cell(Color::White, PieceType::King));
  require(kCastleBK | kCastleBQ, 60, make_cell(Color::Black, PieceType::King));
  require(kCastleWK, 7, make_cell(Color::White, PieceType::Rook));
  require(kCastleWQ, 0, make_cell(Color::White, PieceType::Rook));
  require(kCastleBK, 63, make_cell(Color::Black, PieceType::Rook));
  require(kCastleBQ, 56, make_cell(Color::Black, PieceType::Rook));

  if (ep != "-") {
    auto sq = parse_square(ep);
    if (!sq) throw ParseError("fen en passant: bad square '" + ep + "'");
    int r = rank_of(*sq);
    if (r != 2 && r != 5) throw ParseError("fen en passant: square not on rank 3 or 6");
    bool white_pushed = r == 2;
    if (white_pushed == (b.side_to_move == Color::White))
      throw ParseError("fen en passant: rank inconsistent with side to move");
    Color pusher = white_pushed ? Color::White : Color::Black;
    Square pawn_sq = make_square(white_pushed ? 3 : 4, file_of(*sq));
    if (b.at(*sq) != kEmpty || b.at(pawn_sq) != make_cell(pusher, PieceType::Pawn))
      throw ParseError("fen en passant: no double-pushed pawn behind " + ep);
    b.en_passant = static_cast<std::int8_t>(*sq);
  }

  if (halfmove < 0) throw ParseError("fen halfmove: negative");
  if (fullmove < 1) throw ParseError("fen fullmove: must be >= 1");
  b.halfmove_clock = halfmove;
  b.fullmove_number = fullmove;
  return b;
}

inline std::string to_fen(const Board& b) {
  std::string out;
  for (int rank = 7; rank >= 0; --rank) {
    int empties = 0;
    for (int file = 0; file < 8; ++file) {
      std::uint8_t cell = b.at(make_square(rank, file));
      if (cell_empty(cell)) {
        ++empties;
      } else {
        if (empties) out += static_cast<char>('0' + empties);
        empties = 0;
        out += piece_char(cell);
      }
    }
    if (empties) out += static_cast<char>('0' + empties);
    if (rank > 0) out += '/';
  }
  out += b.side_to_move == Color::White ? " w " : " b ";
  if (b.castling == 0) {
    out += '-';
  } else {
    if (b.castling & kCastleWK) out += 'K';
    if (b.castling & kCastleWQ) out += 'Q';
    if (b.castling & kCastleBK) out += 'k';
    if (b.castling & kCastleBQ) out += 'q';
  }
  out += ' ';
  out += b.en_passant < 0 ? "-" : square_name(b.en_passant);
  out += ' ';
  out += std::to_string(b.halfmove_clock);
  out += ' ';
  out += std::to_string(b.fullmove_number);
  return out;
}

inline Board startpos() { return parse_fen(kStartposFen); }

// ---------------------------------------------------------------------------
// Move vocabulary: 64*64 from-to classes plus 72 underpromotion classes.
// Queen promotions share the plain from-to index.

constexpr int kMoveVocabulary = 4168;
constexpr int kUnderpromotionBase = 4096;

inline int move_to_index(const Move& m) {
  if (m.has_promotion() && m.promotion_type() != PieceType::Queen) {
    int piece_idx;
    switch (m.promotion_type()) {
      case PieceType::Knight: piece_idx = 0; break;
      case PieceType::Bishop: piece_idx = 1; break;
      case PieceType::Rook: piece_idx = 2; break;
      default: throw DataError("underpromotion: bad piece");
    }
    if (rank_of(m.from) != 6 || rank_of(m.to) != 7)
      throw DataError("underpromotion outside rank 7->8: " + to_uci(m));
    int df = file_of(m.to) - file_of(m.from);
    if (df < -1 || df > 1) throw DataError("underpromotion: bad file delta");
    return kUnderpromotionBase + piece_idx * 24 + file_of(m.from) * 3 + (df + 1);
  }
  return static_cast<int>(m.from) * 64 + static_cast<int>(m.to);
}

// Plain indices come back without a promotion piece; a pawn reaching the last
// rank through a plain index means a queen promotion in context.
inline Move index_to_move(int index) {
  if (index < 0 || index >= kMoveVocabulary)
    throw DataError("move index out of range: " + std::to_string(index));
  if (index < kUnderpromotionBase)
    return make_move(index / 64, index % 64);
  int rest = index - kUnderpromotionBase;
  int piece_idx = rest / 24;
  int from_file = (rest % 24) / 3;
  int df = rest % 3 - 1;
  static constexpr PieceType kUnderpromos[3] = {PieceType::Knight, PieceType::Bishop,
                                                PieceType::Rook};
  return make_move(make_square(6, from_file), make_square(7, from_file + df),
                   kUnderpromos[piece_idx]);
}

// Fills in the implicit queen promotion when a plain-index move is a pawn
// push/capture into the last rank of `b`.
inline Move resolve_queen_promotion(const Board& b, Move m) {
  if (!m.has_promotion() && cell_type(b.at(m.from)) == PieceType::Pawn) {
    int last_rank = b.side_to_move == Color::White ? 7 : 0;
    if (rank_of(m.to) == last_rank) m.promotion = static_cast<std::int8_t>(PieceType::Queen);
  }
  return m;
}

// ---------------------------------------------------------------------------
// SAN

inline std::string to_san(const Board& b, const Move& m) {
  std::uint8_t moving = b.at(m.from);
  PieceType type = cell_type(moving);
  std::string out;
  bool capture = !cell_empty(b.at(m.to)) ||
                 (type == PieceType::Pawn && m.to == b.en_passant && b.en_passant >= 0);

  if (type == PieceType::King && std::abs(file_of(m.to) - file_of(m.from)) == 2) {
    out = file_of(m.to) == 6 ? "O-O" : "O-O-O";
  } else if (type == PieceType::Pawn) {
    if (capture) {
      out += static_cast<char>('a' + file_of(m.from));
      out += 'x';
    }
    out += square_name(m.to);
    if (m.has_promotion()) {
      out += '=';
      out += "PNBRQK"[static_cast<int>(m.promotion_type())];
    }
  } else {
    out += "PNBRQK"[static_cast<int>(type)];
    // Disambiguate against other same-type pieces that can legally reach `to`.
    bool need_file = false, need_rank = false, ambiguous = false;
    for (const Move& other : generate_legal_moves(b)) {
      if (other.to != m.to || other.from == m.from) continue;
      if (b.at(other.from) != moving) continue;
      ambiguous = true;
      if (file_of(other.from) == file_of(m.from)) need_rank = true;
      if (rank_of(other.from) == rank_of(m.from)) need_file = true;
    }
    if (ambiguous && !need_file && !need_rank) need_file = true;
    if (need_file) out += static_cast<char>('a' + file_of(m.from));
    if (need_rank) out += static_cast<char>('1' + rank_of(m.from));
    if (capture) out += 'x';
    out += square_name(m.to);
  }

  Board next = apply_move_unchecked(b, m);
  if (in_check(next, next.side_to_move))
    out += generate_legal_moves(next).empty() ? '#' : '+';
  return out;
}

// Matches SAN text against the legal moves of `b`. Tolerates check/mate/
// annotation suffixes and '0-0' castling spellings.
inline Move parse_san(const Board& b, std::string_view text) {
  std::string core(text);
  while (!core.empty() && (core.back() == '+' || core.back() == '#' || core.back() == '!' ||
                           core.back() == '?'))
    core.pop_back();
  if (core.empty()) throw ParseError("san: empty move text");

  std::vector<Move> legal = generate_legal_moves(b);
  if (core == "O-O" || core == "0-0" || core == "O-O-O" || core == "0-0-0") {
    bool king_side = core == "O-O" || core == "0-0";
    for (const Move& m : legal) {
      if (cell_type(b.at(m.from)) != PieceType::King) continue;
      int delta = file_of(m.to) - file_of(m.from);
      if ((king_side && delta == 2) || (!king_side && delta == -2)) return m;
    }
    throw ParseError("san: castling not legal here: " + std::string(text));
  }

  PieceType type = PieceType::Pawn;
  std::size_t pos = 0;
  if (auto t = piece_type_from_char(core[0]); t && std::isupper(static_cast<unsigned char>(core[0]))) {
    type = *t;
    pos = 1;
  }

  std::optional<PieceType> promo;
  if (auto eq = core.find('='); eq != std::string::npos) {
    if (eq + 1 >= core.size()) throw ParseError("san: dangling promotion: " + std::string(text));
    promo = piece_type_from_char(core[eq + 1]);
    if (!promo) throw ParseError("san: bad promotion piece: " + std::string(text));
    core = core.substr(0, eq);
  }

  std::string body = core.substr(pos);
  // Strip capture marker; keep disambiguation and target.
  std::string compact;
  for (char ch : body)
    if (ch != 'x') compact += ch;
  if (compact.size() < 2) throw ParseError("san: too short: " + std::string(text));

  std::string target = compact.substr(compact.size() - 2);
  auto to = parse_square(target);
  if (!to) throw ParseError("san: bad target square: " + std::string(text));
  std::string hint = compact.substr(0, compact.size() - 2);
  int hint_file = -1, hint_rank = -1;
  for (char ch : hint) {
    if (ch >= 'a' && ch <= 'h')
      hint_file = ch - 'a';
    else if (ch >= '1' && ch <= '8')
      hint_rank = ch - '1';
    else
      throw ParseError(std::string("san: bad disambiguation char '") + ch + "'");
  }

  const Move* found = nullptr;
  for (const Move& m : legal) {
    if (m.to != static_cast<std::int8_t>(*to)) continue;
    if (cell_type(b.at(m.from)) != type) continue;
    if (hint_file >= 0 && file_of(m.from) != hint_file) continue;
    if (hint_rank >= 0 && rank_of(m.from) != hint_rank) continue;
    if (promo) {
      if (!m.has_promotion() || m.promotion_type() != *promo) continue;
    } else if (m.has_promotion()) {
      continue;
    }
    if (found) throw ParseError("san: ambiguous move: " + std::string(text));
    found = &m;
  }
  if (!found) throw ParseError("san: no legal move matches: " + std::string(text));
  return *found;
}

}  // namespace maia2::chess
