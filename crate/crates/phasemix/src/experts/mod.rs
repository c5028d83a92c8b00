//! Evaluators: a handcrafted baseline, the small trainable multi-head
//! network with exact gradients, and the three-expert bundle the gate
//! selects from.

mod bundle;
mod handcrafted;
mod network;

pub use bundle::{
    load_bundle, load_model, load_model_dir, load_network, save_bundle, save_model, save_network,
    BundleError, BundleMetadata, ExpertBundle, LoadedModel,
};
pub use handcrafted::Handcrafted;
pub use network::{make_sample, param_count, LossSample, LossWeights, Network};

use crate::board::{Move, Outcome, Position};

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    /// Scalar value in [-1, 1] from the side to move; always wdl win minus
    /// wdl loss.
    pub value: f64,
    /// Win/draw/loss probabilities from the side to move.
    pub wdl: [f64; 3],
    /// Probability per legal move, in `legal_moves` order; sums to 1.
    pub policy: Vec<(Move, f64)>,
    /// Predicted plies until the game ends, non-negative.
    pub plys_to_end: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("cannot evaluate a terminal position")]
    TerminalPosition,
    #[error("empty batch")]
    EmptyBatch,
}

/// A phase expert or baseline model. Immutable after construction; safe to
/// share across threads.
#[derive(Debug, Clone)]
pub enum Evaluator {
    Handcrafted(Handcrafted),
    Network(Network<f32>),
}

impl Evaluator {
    pub fn evaluate(&self, p: &Position) -> Result<Evaluation, EvalError> {
        if p.outcome() != Outcome::Ongoing {
            return Err(EvalError::TerminalPosition);
        }
        Ok(match self {
            Evaluator::Handcrafted(h) => h.evaluate(p),
            Evaluator::Network(n) => n.evaluate(p),
        })
    }

    /// Elementwise identical to mapping `evaluate`; batching is a
    /// performance contract only.
    pub fn evaluate_batch(&self, positions: &[&Position]) -> Result<Vec<Evaluation>, EvalError> {
        if positions.is_empty() {
            return Err(EvalError::EmptyBatch);
        }
        positions.iter().map(|p| self.evaluate(p)).collect()
    }

    /// Cheap identity check used by tests and the ablation harness.
    pub fn same_as(&self, other: &Evaluator) -> bool {
        match (self, other) {
            (Evaluator::Handcrafted(a), Evaluator::Handcrafted(b)) => a == b,
            (Evaluator::Network(a), Evaluator::Network(b)) => {
                a.hidden == b.hidden && a.params == b.params
            }
            _ => false,
        }
    }
}
