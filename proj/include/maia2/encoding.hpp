#pragma once

// Board -> model input tensor and training-label construction.
//
// Channel layout (C_input = 18, each plane 8x8 row-major by rank then file):
//   0-5   white P N B R Q K
//   6-11  black P N B R Q K
//   12    side to move (all ones; every encoded position is white to move)
//   13-16 castling rights: white-K, white-Q, black-K, black-Q
//   17    en passant target square

#include <array>
#include <cstdint>
#include <vector>

#include "maia2/chess.hpp"
#include "maia2/common.hpp"

namespace maia2::encoding {

constexpr int kInputChannels = 18;
constexpr int kBoardArea = 64;
constexpr int kInputSize = kInputChannels * kBoardArea;

constexpr int kPieceMovedDims = 6;
constexpr int kPieceCapturedDims = 6;
// legal moves | piece moved | piece captured | from | to | gives check
constexpr int kAuxDims = chess::kMoveVocabulary + kPieceMovedDims + kPieceCapturedDims + 64 + 64 + 1;

constexpr int kAuxLegalOffset = 0;
constexpr int kAuxPieceMovedOffset = chess::kMoveVocabulary;
constexpr int kAuxPieceCapturedOffset = kAuxPieceMovedOffset + kPieceMovedDims;
constexpr int kAuxFromOffset = kAuxPieceCapturedOffset + kPieceCapturedDims;
constexpr int kAuxToOffset = kAuxFromOffset + 64;
constexpr int kAuxCheckOffset = kAuxToOffset + 64;

template <typename Scalar>
struct PositionTensor {
  std::vector<Scalar> values;  // kInputSize, channel-major

  Scalar at(int channel, int rank, int file) const {
    return values[static_cast<std::size_t>(channel * kBoardArea + rank * 8 + file)];
  }
};

// The encoder requires the pipeline's white-to-move normalization; feeding an
// unmirrored black-to-move position is a caller bug, not a data condition.
template <typename Scalar>
PositionTensor<Scalar> encode_position(const chess::Board& b) {
  if (b.side_to_move != chess::Color::White)
    throw ContractViolation("encode_position: board must be white to move (mirror first)");
  PositionTensor<Scalar> t;
  t.values.assign(kInputSize, Scalar(0));
  for (chess::Square s = 0; s < 64; ++s) {
    std::uint8_t cell = b.at(s);
    if (chess::cell_empty(cell)) continue;
    int channel = static_cast<int>(chess::cell_type(cell)) +
                  (chess::cell_color(cell) == chess::Color::Black ? 6 : 0);
    t.values[static_cast<std::size_t>(channel * kBoardArea + s)] = Scalar(1);
  }
  for (int i = 0; i < kBoardArea; ++i) t.values[static_cast<std::size_t>(12 * kBoardArea + i)] = Scalar(1);
  const std::array<std::uint8_t, 4> rights = {chess::kCastleWK, chess::kCastleWQ,
                                              chess::kCastleBK, chess::kCastleBQ};
  for (int c = 0; c < 4; ++c) {
    if (b.castling & rights[static_cast<std::size_t>(c)])
      for (int i = 0; i < kBoardArea; ++i)
        t.values[static_cast<std::size_t>((13 + c) * kBoardArea + i)] = Scalar(1);
  }
  if (b.en_passant >= 0)
    t.values[static_cast<std::size_t>(17 * kBoardArea + b.en_passant)] = Scalar(1);
  return t;
}

// Auxiliary labels in sparse form; the trainer densifies per batch.
struct AuxLabels {
  std::vector<std::uint16_t> legal_moves;  // vocabulary indices, ascending
  std::uint8_t piece_moved = 0;
  std::int8_t piece_captured = -1;  // -1 = no capture
  std::uint8_t from_square = 0;
  std::uint8_t to_square = 0;
  bool gives_check = false;

  // Writes the dense 0/1 target vector of kAuxDims entries.
  template <typename Scalar>
  void densify(Scalar* out) const {
    for (int i = 0; i < kAuxDims; ++i) out[i] = Scalar(0);
    for (std::uint16_t idx : legal_moves) out[kAuxLegalOffset + idx] = Scalar(1);
    out[kAuxPieceMovedOffset + piece_moved] = Scalar(1);
    if (piece_captured >= 0) out[kAuxPieceCapturedOffset + piece_captured] = Scalar(1);
    out[kAuxFromOffset + from_square] = Scalar(1);
    out[kAuxToOffset + to_square] = Scalar(1);
    if (gives_check) out[kAuxCheckOffset] = Scalar(1);
  }
};

struct Labels {
  int policy_index = 0;
  AuxLabels aux;
  int outcome = 0;  // +1 win, 0 draw, -1 loss for the active player
};

inline Labels build_labels(const chess::Board& b, const chess::Move& played, int outcome) {
  std::vector<chess::Move> legal = chess::generate_legal_moves(b);
  bool played_legal = false;
  Labels labels;
  labels.aux.legal_moves.reserve(legal.size());
  for (const chess::Move& m : legal) {
    labels.aux.legal_moves.push_back(static_cast<std::uint16_t>(chess::move_to_index(m)));
    if (m == played) played_legal = true;
  }
  if (!played_legal) throw DataError("build_labels: move not legal: " + chess::to_uci(played));
  std::sort(labels.aux.legal_moves.begin(), labels.aux.legal_moves.end());
  labels.aux.legal_moves.erase(
      std::unique(labels.aux.legal_moves.begin(), labels.aux.legal_moves.end()),
      labels.aux.legal_moves.end());

  labels.policy_index = chess::move_to_index(played);
  labels.aux.piece_moved = static_cast<std::uint8_t>(chess::cell_type(b.at(played.from)));
  std::uint8_t target = b.at(played.to);
  if (!chess::cell_empty(target)) {
    labels.aux.piece_captured = static_cast<std::int8_t>(chess::cell_type(target));
  } else if (chess::cell_type(b.at(played.from)) == chess::PieceType::Pawn &&
             played.to == b.en_passant && b.en_passant >= 0) {
    labels.aux.piece_captured = static_cast<std::int8_t>(chess::PieceType::Pawn);
  }
  labels.aux.from_square = static_cast<std::uint8_t>(played.from);
  labels.aux.to_square = static_cast<std::uint8_t>(played.to);
  labels.aux.gives_check = chess::gives_check(b, played);
  labels.outcome = outcome;
  return labels;
}

}  // namespace maia2::encoding
