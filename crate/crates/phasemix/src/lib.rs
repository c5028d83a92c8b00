//! Phase-aware chess engine and experimentation toolkit.
//!
//! The engine routes MCTS leaf evaluations through a mixture of game-phase
//! expert evaluators selected by a rule-based gate. The crate also carries
//! the surrounding machinery: dataset building from PGN, the three expert
//! training regimes, a toy self-play loop, and a tournament harness with
//! Elo estimation.

pub mod arena;
pub mod board;
pub mod encoder;
pub mod experts;
pub mod phase;
pub mod search;
pub mod training;
pub mod uci;

mod scalar;
pub use scalar::Scalar;

/// Trainable evaluator network over `f32` parameters (the production type).
pub type Network32 = experts::Network<f32>;
/// `f64` instantiation, used where full precision matters (gradient checks).
pub type Network64 = experts::Network<f64>;
