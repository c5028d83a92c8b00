//! Shared helpers for the integration tests: independent oracles, random
//! corpus generators, and the pass/fail reporter.

#![allow(dead_code)]

pub mod perft_oracle;
pub mod phase_oracle;

use phasemix::board::{GameRecord, GameResult, Position};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Prints exactly one `PASS`/`FAIL` line per criterion: `PASS` when the
/// test body completes, `FAIL` when it panics first.
pub struct Criterion {
    label: &'static str,
    passed: bool,
}

impl Criterion {
    pub fn new(label: &'static str) -> Criterion {
        Criterion { label, passed: false }
    }

    pub fn pass(mut self) {
        self.passed = true;
    }
}

impl Drop for Criterion {
    fn drop(&mut self) {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        println!("acceptance {}: {verdict}", self.label);
    }
}

/// Position after `plies` random legal moves from the start; stops early
/// at terminal positions.
pub fn random_position(rng: &mut ChaCha8Rng, plies: usize) -> Position {
    let mut p = Position::start();
    for _ in 0..plies {
        let moves = p.legal_moves();
        if moves.is_empty() {
            break;
        }
        let mv = moves.choose(rng).unwrap().clone();
        p = p.apply_move_unchecked(&mv);
    }
    p
}

/// Random legal playout from the start recorded as a game; result from
/// the terminal position, draw if the cap is reached.
pub fn random_game(rng: &mut ChaCha8Rng, max_plies: usize) -> GameRecord {
    let mut p = Position::start();
    let initial = p.clone();
    let mut moves = Vec::new();
    let mut result = GameResult::Draw;
    for _ in 0..max_plies {
        if let Some(r) = GameResult::from_outcome(p.outcome()) {
            result = r;
            break;
        }
        let legal = p.legal_moves();
        let mv = legal.choose(rng).unwrap().clone();
        moves.push(mv.clone());
        p = p.apply_move_unchecked(&mv);
    }
    GameRecord {
        initial,
        moves,
        result,
        tags: Vec::new(),
    }
}

pub fn random_games(seed: u64, count: usize, max_plies: usize) -> Vec<GameRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_game(&mut rng, max_plies)).collect()
}
