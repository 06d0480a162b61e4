#!/usr/bin/env python3
"""Brute-force perft reference used to freeze the expected node counts in the
C++ test suite. Kept deliberately independent of the library: 0x88 board,
no shared code. Usage: perft_oracle.py "<fen>" <depth>
"""
import sys

WHITE, BLACK = 0, 1
EMPTY = "."

KNIGHT_D = [33, 31, 18, 14, -33, -31, -18, -14]
KING_D = [16, 17, 1, -15, -16, -17, -1, 15]
BISHOP_D = [17, 15, -17, -15]
ROOK_D = [16, 1, -16, -1]


def sq88(rank, file):
    return rank * 16 + file


def on_board(s):
    return not (s & 0x88)


class Pos:
    __slots__ = ("board", "stm", "castle", "ep")

    def __init__(self):
        self.board = [EMPTY] * 128
        self.stm = WHITE
        self.castle = ""
        self.ep = None


def parse_fen(fen):
    p = Pos()
    placement, stm, castle, ep = fen.split()[:4]
    rank, file = 7, 0
    for ch in placement:
        if ch == "/":
            rank, file = rank - 1, 0
        elif ch.isdigit():
            file += int(ch)
        else:
            p.board[sq88(rank, file)] = ch
            file += 1
    p.stm = WHITE if stm == "w" else BLACK
    p.castle = castle if castle != "-" else ""
    if ep != "-":
        p.ep = sq88(int(ep[1]) - 1, ord(ep[0]) - ord("a"))
    return p


def color_of(piece):
    return WHITE if piece.isupper() else BLACK


def attacked(p, target, by):
    pawn, pd = ("P", [-17, -15]) if by == WHITE else ("p", [17, 15])
    for d in pd:
        s = target + d
        if on_board(s) and p.board[s] == pawn:
            return True
    knight = "N" if by == WHITE else "n"
    for d in KNIGHT_D:
        s = target + d
        if on_board(s) and p.board[s] == knight:
            return True
    king = "K" if by == WHITE else "k"
    for d in KING_D:
        s = target + d
        if on_board(s) and p.board[s] == king:
            return True
    for deltas, runners in ((BISHOP_D, "BQ"), (ROOK_D, "RQ")):
        runners = runners if by == WHITE else runners.lower()
        for d in deltas:
            s = target + d
            while on_board(s):
                piece = p.board[s]
                if piece != EMPTY:
                    if piece in runners:
                        return True
                    break
                s += d
    return False


def king_sq(p, color):
    king = "K" if color == WHITE else "k"
    return next(s for s in range(128) if on_board(s) and p.board[s] == king)


def pseudo_moves(p):
    us = p.stm
    out = []
    fwd = 16 if us == WHITE else -16
    start_rank = 1 if us == WHITE else 6
    last_rank = 7 if us == WHITE else 0
    promos = "NBRQ" if us == WHITE else "nbrq"
    for s in range(128):
        if not on_board(s):
            continue
        piece = p.board[s]
        if piece == EMPTY or color_of(piece) != us:
            continue
        kind = piece.upper()
        if kind == "P":
            one = s + fwd
            if on_board(one) and p.board[one] == EMPTY:
                if one >> 4 == last_rank:
                    out.extend((s, one, pr) for pr in promos)
                else:
                    out.append((s, one, None))
                two = one + fwd
                if s >> 4 == start_rank and on_board(two) and p.board[two] == EMPTY:
                    out.append((s, two, None))
            for d in (fwd - 1, fwd + 1):
                t = s + d
                if not on_board(t):
                    continue
                victim = p.board[t]
                if victim != EMPTY and color_of(victim) != us:
                    if t >> 4 == last_rank:
                        out.extend((s, t, pr) for pr in promos)
                    else:
                        out.append((s, t, None))
                elif p.ep is not None and t == p.ep:
                    out.append((s, t, None))
        elif kind == "N":
            for d in KNIGHT_D:
                t = s + d
                if on_board(t) and (p.board[t] == EMPTY or color_of(p.board[t]) != us):
                    out.append((s, t, None))
        elif kind == "K":
            for d in KING_D:
                t = s + d
                if on_board(t) and (p.board[t] == EMPTY or color_of(p.board[t]) != us):
                    out.append((s, t, None))
        else:
            deltas = {"B": BISHOP_D, "R": ROOK_D, "Q": BISHOP_D + ROOK_D}[kind]
            for d in deltas:
                t = s + d
                while on_board(t):
                    if p.board[t] == EMPTY:
                        out.append((s, t, None))
                    else:
                        if color_of(p.board[t]) != us:
                            out.append((s, t, None))
                        break
                    t += d
    them = 1 - us
    home = 0 if us == WHITE else 7
    e = sq88(home, 4)
    if us == WHITE and "K" in p.castle or us == BLACK and "k" in p.castle:
        f, g = sq88(home, 5), sq88(home, 6)
        if (p.board[f] == EMPTY and p.board[g] == EMPTY and not attacked(p, e, them)
                and not attacked(p, f, them) and not attacked(p, g, them)):
            out.append((e, g, None))
    if us == WHITE and "Q" in p.castle or us == BLACK and "q" in p.castle:
        b, c, d = sq88(home, 1), sq88(home, 2), sq88(home, 3)
        if (p.board[b] == EMPTY and p.board[c] == EMPTY and p.board[d] == EMPTY
                and not attacked(p, e, them) and not attacked(p, d, them)
                and not attacked(p, c, them)):
            out.append((e, c, None))
    return out


def make(p, move):
    frm, to, promo = move
    q = Pos()
    q.board = p.board[:]
    q.stm = 1 - p.stm
    q.castle = p.castle
    q.ep = None
    piece = q.board[frm]
    kind = piece.upper()
    if kind == "P":
        if p.ep is not None and to == p.ep and q.board[to] == EMPTY and (to & 7) != (frm & 7):
            q.board[sq88(frm >> 4, to & 7)] = EMPTY
        if abs((to >> 4) - (frm >> 4)) == 2:
            q.ep = (frm + to) // 2
    q.board[frm] = EMPTY
    q.board[to] = promo if promo else piece
    if kind == "K":
        drop = "KQ" if p.stm == WHITE else "kq"
        q.castle = "".join(c for c in q.castle if c not in drop)
        if to - frm == 2:
            q.board[to - 1], q.board[to + 1] = q.board[to + 1], EMPTY
        elif frm - to == 2:
            q.board[to + 1], q.board[to - 2] = q.board[to - 2], EMPTY
    for corner, right in ((sq88(0, 7), "K"), (sq88(0, 0), "Q"), (sq88(7, 7), "k"), (sq88(7, 0), "q")):
        if frm == corner or to == corner:
            q.castle = q.castle.replace(right, "")
    return q


def perft(p, depth):
    if depth == 0:
        return 1
    total = 0
    for move in pseudo_moves(p):
        q = make(p, move)
        if not attacked(q, king_sq(q, p.stm), q.stm):
            total += perft(q, depth - 1) if depth > 1 else 1
    return total


if __name__ == "__main__":
    position = parse_fen(sys.argv[1])
    for d in range(1, int(sys.argv[2]) + 1):
        print(d, perft(position, d))
