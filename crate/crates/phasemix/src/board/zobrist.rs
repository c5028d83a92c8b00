//! Position keys for repetition tracking. Tables are generated once from a
//! fixed splitmix64 stream so keys are stable within a process run.

use super::{Color, Position, Square};
use std::sync::LazyLock;

struct Tables {
    pieces: [[u64; 64]; 12],
    side: u64,
    castling: [u64; 4],
    ep_file: [u64; 8],
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

static TABLES: LazyLock<Tables> = LazyLock::new(|| {
    let mut state = 0x7068617365u64; // fixed seed
    let mut pieces = [[0u64; 64]; 12];
    for row in pieces.iter_mut() {
        for cell in row.iter_mut() {
            *cell = splitmix64(&mut state);
        }
    }
    Tables {
        pieces,
        side: splitmix64(&mut state),
        castling: std::array::from_fn(|_| splitmix64(&mut state)),
        ep_file: std::array::from_fn(|_| splitmix64(&mut state)),
    }
});

pub fn key(p: &Position) -> u64 {
    let t = &*TABLES;
    let mut k = 0u64;
    for i in 0..64u8 {
        if let Some(piece) = p.piece_at(Square(i)) {
            let row = piece.kind.index() + if piece.color == Color::Black { 6 } else { 0 };
            k ^= t.pieces[row][i as usize];
        }
    }
    if p.side_to_move() == Color::Black {
        k ^= t.side;
    }
    let c = p.castling();
    for (i, flag) in [c.white_king, c.white_queen, c.black_king, c.black_queen]
        .into_iter()
        .enumerate()
    {
        if flag {
            k ^= t.castling[i];
        }
    }
    if let Some(ep) = p.en_passant() {
        k ^= t.ep_file[ep.file() as usize];
    }
    k
}
