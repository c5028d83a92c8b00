//! Independent perft oracle. Deliberately a different design from the
//! library's board: 0x88 mailbox, offset-based move generation,
//! copy-make with a post-hoc king-safety check, and its own FEN parser.
//! It shares no code with the crate under test.

const WP: i8 = 1;
const WN: i8 = 2;
const WB: i8 = 3;
const WR: i8 = 4;
const WQ: i8 = 5;
const WK: i8 = 6;

#[derive(Clone, Copy)]
struct Board {
    sq: [i8; 128],
    /// +1 white to move, -1 black.
    stm: i8,
    /// Bits: 1 K, 2 Q, 4 k, 8 q.
    castling: u8,
    /// 0x88 index of the en-passant target, or -1.
    ep: i8,
}

fn on_board(i: i16) -> bool {
    i & 0x88 == 0 && (0..128).contains(&i)
}

fn idx(file: i16, rank: i16) -> i16 {
    rank * 16 + file
}

pub fn parse_fen(fen: &str) -> Board {
    let fields: Vec<&str> = fen.split_whitespace().collect();
    let mut b = Board {
        sq: [0; 128],
        stm: 1,
        castling: 0,
        ep: -1,
    };
    let mut rank = 7i16;
    let mut file = 0i16;
    for c in fields[0].chars() {
        match c {
            '/' => {
                rank -= 1;
                file = 0;
            }
            d if d.is_ascii_digit() => file += d.to_digit(10).unwrap() as i16,
            p => {
                let kind = match p.to_ascii_lowercase() {
                    'p' => WP,
                    'n' => WN,
                    'b' => WB,
                    'r' => WR,
                    'q' => WQ,
                    'k' => WK,
                    other => panic!("bad piece {other}"),
                };
                let signed = if p.is_ascii_uppercase() { kind } else { -kind };
                b.sq[idx(file, rank) as usize] = signed;
                file += 1;
            }
        }
    }
    b.stm = if fields[1] == "w" { 1 } else { -1 };
    for c in fields[2].chars() {
        b.castling |= match c {
            'K' => 1,
            'Q' => 2,
            'k' => 4,
            'q' => 8,
            _ => 0,
        };
    }
    if fields[3] != "-" {
        let file = (fields[3].as_bytes()[0] - b'a') as i16;
        let rank = (fields[3].as_bytes()[1] - b'1') as i16;
        b.ep = idx(file, rank) as i8;
    }
    b
}

const KNIGHT_OFFS: [i16; 8] = [33, 31, 18, 14, -33, -31, -18, -14];
const KING_OFFS: [i16; 8] = [17, 16, 15, 1, -17, -16, -15, -1];
const BISHOP_OFFS: [i16; 4] = [17, 15, -17, -15];
const ROOK_OFFS: [i16; 4] = [16, 1, -16, -1];

/// Is `target` attacked by pieces of color `by` (+1/-1)?
fn attacked(b: &Board, target: i16, by: i8) -> bool {
    // Pawns: a white pawn on target-17 / target-15 attacks target.
    let pawn_dir = 16 * i16::from(by);
    for side in [-1i16, 1] {
        let from = target - pawn_dir + side;
        if on_board(from) && b.sq[from as usize] == by * WP {
            return true;
        }
    }
    for off in KNIGHT_OFFS {
        let from = target + off;
        if on_board(from) && b.sq[from as usize] == by * WN {
            return true;
        }
    }
    for off in KING_OFFS {
        let from = target + off;
        if on_board(from) && b.sq[from as usize] == by * WK {
            return true;
        }
    }
    for (offs, straight) in [(BISHOP_OFFS, false), (ROOK_OFFS, true)] {
        for off in offs {
            let mut from = target + off;
            while on_board(from) {
                let piece = b.sq[from as usize];
                if piece != 0 {
                    let kind = piece.abs();
                    let matches = kind == WQ || (kind == if straight { WR } else { WB });
                    if piece.signum() == by && matches {
                        return true;
                    }
                    break;
                }
                from += off;
            }
        }
    }
    false
}

fn king_square(b: &Board, color: i8) -> i16 {
    for i in 0..128i16 {
        if on_board(i) && b.sq[i as usize] == color * WK {
            return i;
        }
    }
    unreachable!("king must exist")
}

/// (from, to, promotion piece or 0, is-ep, is-castle)
type OracleMove = (i16, i16, i8, bool, bool);

fn pseudo_moves(b: &Board) -> Vec<OracleMove> {
    let mut out = Vec::with_capacity(64);
    let us = b.stm;
    for from in 0..128i16 {
        if !on_board(from) {
            continue;
        }
        let piece = b.sq[from as usize];
        if piece == 0 || piece.signum() != us {
            continue;
        }
        match piece.abs() {
            k if k == WP => {
                let dir = 16 * i16::from(us);
                let start_rank = if us == 1 { 1 } else { 6 };
                let promo_rank = if us == 1 { 7 } else { 0 };
                let one = from + dir;
                let mut push = |to: i16, ep: bool, out: &mut Vec<OracleMove>| {
                    if to / 16 == promo_rank {
                        for promo in [WQ, WR, WB, WN] {
                            out.push((from, to, promo, false, false));
                        }
                    } else {
                        out.push((from, to, 0, ep, false));
                    }
                };
                if on_board(one) && b.sq[one as usize] == 0 {
                    push(one, false, &mut out);
                    let two = one + dir;
                    if from / 16 == start_rank && b.sq[two as usize] == 0 {
                        out.push((from, two, 0, false, false));
                    }
                }
                for side in [-1i16, 1] {
                    let to = one + side;
                    if !on_board(to) {
                        continue;
                    }
                    let victim = b.sq[to as usize];
                    if victim != 0 && victim.signum() == -us {
                        push(to, false, &mut out);
                    } else if victim == 0 && to == i16::from(b.ep) {
                        out.push((from, to, 0, true, false));
                    }
                }
            }
            k if k == WN => {
                for off in KNIGHT_OFFS {
                    let to = from + off;
                    if on_board(to) && b.sq[to as usize].signum() != us {
                        out.push((from, to, 0, false, false));
                    }
                }
            }
            k if k == WK => {
                for off in KING_OFFS {
                    let to = from + off;
                    if on_board(to) && b.sq[to as usize].signum() != us {
                        out.push((from, to, 0, false, false));
                    }
                }
                // Castling: empty path, king not in or through check.
                let (rank_base, kingside_bit, queenside_bit) =
                    if us == 1 { (0i16, 1u8, 2u8) } else { (7 * 16, 4, 8) };
                if from == rank_base + 4 {
                    if b.castling & kingside_bit != 0
                        && b.sq[(rank_base + 5) as usize] == 0
                        && b.sq[(rank_base + 6) as usize] == 0
                        && !attacked(b, rank_base + 4, -us)
                        && !attacked(b, rank_base + 5, -us)
                        && !attacked(b, rank_base + 6, -us)
                    {
                        out.push((from, rank_base + 6, 0, false, true));
                    }
                    if b.castling & queenside_bit != 0
                        && b.sq[(rank_base + 3) as usize] == 0
                        && b.sq[(rank_base + 2) as usize] == 0
                        && b.sq[(rank_base + 1) as usize] == 0
                        && !attacked(b, rank_base + 4, -us)
                        && !attacked(b, rank_base + 3, -us)
                        && !attacked(b, rank_base + 2, -us)
                    {
                        out.push((from, rank_base + 2, 0, false, true));
                    }
                }
            }
            kind => {
                let offs: &[i16] = match kind {
                    k if k == WB => &BISHOP_OFFS,
                    k if k == WR => &ROOK_OFFS,
                    _ => &KING_OFFS, // queen: all eight directions
                };
                for &off in offs {
                    let mut to = from + off;
                    while on_board(to) {
                        let victim = b.sq[to as usize];
                        if victim.signum() == us {
                            break;
                        }
                        out.push((from, to, 0, false, false));
                        if victim != 0 {
                            break;
                        }
                        to += off;
                    }
                }
            }
        }
    }
    out
}

fn make(b: &Board, mv: OracleMove) -> Board {
    let (from, to, promo, is_ep, is_castle) = mv;
    let mut next = *b;
    let us = b.stm;
    let piece = next.sq[from as usize];
    next.sq[from as usize] = 0;
    next.sq[to as usize] = if promo != 0 { us * promo } else { piece };
    if is_ep {
        next.sq[(to - 16 * i16::from(us)) as usize] = 0;
    }
    if is_castle {
        let (rook_from, rook_to) = if to % 16 == 6 {
            (to + 1, to - 1)
        } else {
            (to - 2, to + 1)
        };
        next.sq[rook_to as usize] = next.sq[rook_from as usize];
        next.sq[rook_from as usize] = 0;
    }
    next.ep = -1;
    if piece.abs() == WP && (to - from).abs() == 32 {
        next.ep = ((from + to) / 2) as i8;
    }
    // Any move touching a castling square clears the right.
    for touched in [from, to] {
        match touched {
            4 => next.castling &= !3,
            0 => next.castling &= !2,
            7 => next.castling &= !1,
            116 => next.castling &= !12,
            112 => next.castling &= !8,
            119 => next.castling &= !4,
            _ => {}
        }
    }
    next.stm = -us;
    next
}

fn count(b: &Board, depth: u32) -> u64 {
    if depth == 0 {
        return 1;
    }
    let mut total = 0;
    for mv in pseudo_moves(b) {
        let next = make(b, mv);
        if !attacked(&next, king_square(&next, b.stm), next.stm) {
            total += if depth == 1 { 1 } else { count(&next, depth - 1) };
        }
    }
    total
}

/// Leaf count of the legal move tree from `fen` at `depth`.
pub fn perft(fen: &str, depth: u32) -> u64 {
    count(&parse_fen(fen), depth)
}

/// Legal moves in UCI notation, for cross-checking move lists.
pub fn legal_moves_uci(fen: &str) -> Vec<String> {
    let b = parse_fen(fen);
    let mut out = Vec::new();
    for mv in pseudo_moves(&b) {
        let next = make(&b, mv);
        if attacked(&next, king_square(&next, b.stm), next.stm) {
            continue;
        }
        let (from, to, promo, _, _) = mv;
        let name = |sq: i16| {
            format!(
                "{}{}",
                (b'a' + (sq % 16) as u8) as char,
                (b'1' + (sq / 16) as u8) as char
            )
        };
        let suffix = match promo {
            0 => "",
            p if p == WQ => "q",
            p if p == WR => "r",
            p if p == WB => "b",
            _ => "n",
        };
        out.push(format!("{}{}{}", name(from), name(to), suffix));
    }
    out.sort();
    out
}
