//! Small trainable evaluator: one hidden tanh layer over the flattened
//! 52x64 input with four heads (3-way WDL softmax, legal-move-masked policy
//! softmax, softplus plys-to-end, value derived from WDL). Gradients are
//! exact manual backprop; the whole module is generic over the scalar so
//! gradient checks can run in `f64` while training runs in `f32`.

use super::Evaluation;
use crate::board::Position;
use crate::encoder::{self, PlaneStack, INPUT_DIM, PLANE_CELLS, POLICY_DIM};
use crate::Scalar;
use rand::{Rng, SeedableRng};
use std::ops::Range;

/// Loss term factors: wdl cross-entropy (alpha), policy cross-entropy,
/// plys squared error (beta) and L2 weight decay.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LossWeights {
    pub alpha: f64,
    pub policy_factor: f64,
    pub beta: f64,
    pub weight_decay: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        // Supervised-table defaults.
        LossWeights {
            alpha: 0.01,
            policy_factor: 0.988,
            beta: 0.002,
            weight_decay: 0.0001,
        }
    }
}

/// One training example: encoded planes, the policy support (policy indices
/// of the legal moves) with a target distribution over it, a WDL target and
/// a plys-to-end target.
#[derive(Debug, Clone)]
pub struct LossSample<T> {
    pub planes: PlaneStack<T>,
    pub legal_indices: Vec<usize>,
    pub target_policy: Vec<T>,
    pub target_wdl: [T; 3],
    pub target_plys: T,
}

#[derive(Debug, Clone)]
struct Layout {
    w1: Range<usize>,
    b1: Range<usize>,
    w_wdl: Range<usize>,
    b_wdl: Range<usize>,
    w_pol: Range<usize>,
    b_pol: Range<usize>,
    w_ply: Range<usize>,
    b_ply: Range<usize>,
    total: usize,
}

fn layout(input_dim: usize, hidden: usize) -> Layout {
    let mut at = 0usize;
    let mut take = |n: usize| {
        let r = at..at + n;
        at += n;
        r
    };
    let w1 = take(hidden * input_dim);
    let b1 = take(hidden);
    let w_wdl = take(3 * hidden);
    let b_wdl = take(3);
    let w_pol = take(POLICY_DIM * hidden);
    let b_pol = take(POLICY_DIM);
    let w_ply = take(hidden);
    let b_ply = take(1);
    Layout {
        w1,
        b1,
        w_wdl,
        b_wdl,
        w_pol,
        b_pol,
        w_ply,
        b_ply,
        total: at,
    }
}

/// Analytic parameter count for the architecture.
pub fn param_count(input_dim: usize, hidden: usize) -> usize {
    layout(input_dim, hidden).total
}

/// Fixed per-cell input scaling: integer planes are brought to unit order
/// before the linear layer (halfmove clock / 100, material planes / 8).
fn input_scale(cell: usize) -> f64 {
    match cell / PLANE_CELLS {
        19 => 0.01,
        40..=44 | 47..=51 => 0.125,
        _ => 1.0,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network<T> {
    pub input_dim: usize,
    pub hidden: usize,
    /// Flat parameter vector; see `layout` for the head ranges.
    pub params: Vec<T>,
}

struct Forward<T> {
    hidden_act: Vec<T>,
    wdl: [T; 3],
    policy: Vec<T>,
    ply_z: T,
    ply: T,
}

impl<T: Scalar> Network<T> {
    pub fn zeros(hidden: usize) -> Network<T> {
        let input_dim = INPUT_DIM;
        Network {
            input_dim,
            hidden,
            params: vec![T::zero(); param_count(input_dim, hidden)],
        }
    }

    /// Deterministic random init, uniform in +-1/sqrt(fan_in) per layer.
    pub fn seeded(hidden: usize, seed: u64) -> Network<T> {
        let mut net = Network::zeros(hidden);
        let lay = layout(net.input_dim, hidden);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut fill = |range: Range<usize>, fan_in: usize, params: &mut Vec<T>| {
            let scale = 1.0 / (fan_in as f64).sqrt();
            for i in range {
                params[i] = T::from_f64(rng.gen_range(-scale..scale));
            }
        };
        fill(lay.w1.clone(), net.input_dim, &mut net.params);
        fill(lay.w_wdl.clone(), hidden, &mut net.params);
        fill(lay.w_pol.clone(), hidden, &mut net.params);
        fill(lay.w_ply.clone(), hidden, &mut net.params);
        net
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    fn layout(&self) -> Layout {
        layout(self.input_dim, self.hidden)
    }

    fn forward(&self, planes: &PlaneStack<T>, legal_indices: &[usize]) -> Forward<T> {
        let lay = self.layout();
        let x = planes.as_slice();
        let h = self.hidden;
        let w1 = &self.params[lay.w1.clone()];
        let b1 = &self.params[lay.b1.clone()];

        let mut hidden_act = vec![T::zero(); h];
        // Inputs are sparse; accumulate over nonzero cells only.
        for (d, &xv) in x.iter().enumerate() {
            if xv == T::zero() {
                continue;
            }
            let scaled = xv * T::from_f64(input_scale(d));
            for i in 0..h {
                hidden_act[i] = hidden_act[i] + w1[i * self.input_dim + d] * scaled;
            }
        }
        for i in 0..h {
            hidden_act[i] = (hidden_act[i] + b1[i]).tanh();
        }

        let w_wdl = &self.params[lay.w_wdl.clone()];
        let b_wdl = &self.params[lay.b_wdl.clone()];
        let mut wdl_logits = [T::zero(); 3];
        for (k, logit) in wdl_logits.iter_mut().enumerate() {
            let mut acc = b_wdl[k];
            for i in 0..h {
                acc = acc + w_wdl[k * h + i] * hidden_act[i];
            }
            *logit = acc;
        }
        let wdl = softmax3(wdl_logits);

        let w_pol = &self.params[lay.w_pol.clone()];
        let b_pol = &self.params[lay.b_pol.clone()];
        let mut pol_logits = Vec::with_capacity(legal_indices.len());
        for &j in legal_indices {
            let mut acc = b_pol[j];
            for i in 0..h {
                acc = acc + w_pol[j * h + i] * hidden_act[i];
            }
            pol_logits.push(acc);
        }
        let policy = softmax(&pol_logits);

        let w_ply = &self.params[lay.w_ply.clone()];
        let mut ply_z = self.params[lay.b_ply.clone()][0];
        for i in 0..h {
            ply_z = ply_z + w_ply[i] * hidden_act[i];
        }
        let ply = softplus(ply_z);

        Forward {
            hidden_act,
            wdl,
            policy,
            ply_z,
            ply,
        }
    }

    pub fn evaluate(&self, p: &Position) -> Evaluation {
        let planes = encoder::encode_planes::<T>(p);
        let moves = p.legal_moves();
        let legal: Vec<usize> = moves.iter().map(|m| encoder::encode_policy(m, p)).collect();
        let f = self.forward(&planes, &legal);
        let wdl = [
            f.wdl[0].to_f64_lossy(),
            f.wdl[1].to_f64_lossy(),
            f.wdl[2].to_f64_lossy(),
        ];
        Evaluation {
            value: wdl[0] - wdl[2],
            wdl,
            policy: moves
                .into_iter()
                .zip(f.policy.iter().map(|v| v.to_f64_lossy()))
                .collect(),
            plys_to_end: f.ply.to_f64_lossy(),
        }
    }

    /// The four-term sample loss.
    pub fn loss(&self, sample: &LossSample<T>, weights: &LossWeights) -> T {
        let f = self.forward(&sample.planes, &sample.legal_indices);
        let alpha = T::from_f64(weights.alpha);
        let pf = T::from_f64(weights.policy_factor);
        let beta = T::from_f64(weights.beta);
        let c = T::from_f64(weights.weight_decay);
        let tiny = T::from_f64(1e-300);

        let mut wdl_ce = T::zero();
        for k in 0..3 {
            if sample.target_wdl[k] != T::zero() {
                wdl_ce = wdl_ce - sample.target_wdl[k] * (f.wdl[k] + tiny).ln();
            }
        }
        let mut pol_ce = T::zero();
        for (j, &t) in sample.target_policy.iter().enumerate() {
            if t != T::zero() {
                pol_ce = pol_ce - t * (f.policy[j] + tiny).ln();
            }
        }
        let ply_err = sample.target_plys - f.ply;
        let l2: T = if weights.weight_decay != 0.0 {
            self.params.iter().map(|&w| w * w).sum()
        } else {
            T::zero()
        };
        alpha * wdl_ce + pf * pol_ce + beta * ply_err * ply_err + c * l2
    }

    /// Exact gradient of `loss` with respect to the flat parameter vector.
    pub fn gradient(&self, sample: &LossSample<T>, weights: &LossWeights) -> Vec<T> {
        let mut grad = vec![T::zero(); self.params.len()];
        self.accumulate_gradient(sample, weights, T::one(), &mut grad);
        grad
    }

    /// Adds `scale` times the sample gradient into `out`.
    pub fn accumulate_gradient(
        &self,
        sample: &LossSample<T>,
        weights: &LossWeights,
        scale: T,
        out: &mut [T],
    ) {
        debug_assert_eq!(out.len(), self.params.len());
        let lay = self.layout();
        let h = self.hidden;
        let f = self.forward(&sample.planes, &sample.legal_indices);
        let alpha = T::from_f64(weights.alpha);
        let pf = T::from_f64(weights.policy_factor);
        let beta = T::from_f64(weights.beta);
        let two = T::from_f64(2.0);

        // Head logit gradients.
        let mut g_wdl = [T::zero(); 3];
        for k in 0..3 {
            g_wdl[k] = alpha * (f.wdl[k] - sample.target_wdl[k]) * scale;
        }
        let g_pol: Vec<T> = f
            .policy
            .iter()
            .zip(&sample.target_policy)
            .map(|(&p, &t)| pf * (p - t) * scale)
            .collect();
        let sig = T::one() / (T::one() + (-f.ply_z).exp());
        let g_ply = two * beta * (f.ply - sample.target_plys) * sig * scale;

        // Backprop into the hidden activation.
        let w_wdl = &self.params[lay.w_wdl.clone()];
        let w_pol = &self.params[lay.w_pol.clone()];
        let w_ply = &self.params[lay.w_ply.clone()];
        let mut d_hidden = vec![T::zero(); h];
        for k in 0..3 {
            for i in 0..h {
                d_hidden[i] = d_hidden[i] + w_wdl[k * h + i] * g_wdl[k];
            }
        }
        for (jj, &j) in sample.legal_indices.iter().enumerate() {
            for i in 0..h {
                d_hidden[i] = d_hidden[i] + w_pol[j * h + i] * g_pol[jj];
            }
        }
        for i in 0..h {
            d_hidden[i] = d_hidden[i] + w_ply[i] * g_ply;
            // tanh'
            d_hidden[i] = d_hidden[i] * (T::one() - f.hidden_act[i] * f.hidden_act[i]);
        }

        // Parameter gradients.
        for (d, &xv) in sample.planes.as_slice().iter().enumerate() {
            if xv == T::zero() {
                continue;
            }
            let scaled = xv * T::from_f64(input_scale(d));
            for i in 0..h {
                let idx = lay.w1.start + i * self.input_dim + d;
                out[idx] = out[idx] + d_hidden[i] * scaled;
            }
        }
        for i in 0..h {
            out[lay.b1.start + i] = out[lay.b1.start + i] + d_hidden[i];
        }
        for k in 0..3 {
            for i in 0..h {
                let idx = lay.w_wdl.start + k * h + i;
                out[idx] = out[idx] + g_wdl[k] * f.hidden_act[i];
            }
            out[lay.b_wdl.start + k] = out[lay.b_wdl.start + k] + g_wdl[k];
        }
        for (jj, &j) in sample.legal_indices.iter().enumerate() {
            for i in 0..h {
                let idx = lay.w_pol.start + j * h + i;
                out[idx] = out[idx] + g_pol[jj] * f.hidden_act[i];
            }
            out[lay.b_pol.start + j] = out[lay.b_pol.start + j] + g_pol[jj];
        }
        for i in 0..h {
            out[lay.w_ply.start + i] = out[lay.w_ply.start + i] + g_ply * f.hidden_act[i];
        }
        out[lay.b_ply.start] = out[lay.b_ply.start] + g_ply;

        if weights.weight_decay != 0.0 {
            let c2 = two * T::from_f64(weights.weight_decay) * scale;
            for (o, &w) in out.iter_mut().zip(self.params.iter()) {
                *o = *o + c2 * w;
            }
        }
    }

    /// Reinterpret parameters in another scalar type (f32 <-> f64).
    pub fn convert<U: Scalar>(&self) -> Network<U> {
        Network {
            input_dim: self.input_dim,
            hidden: self.hidden,
            params: self
                .params
                .iter()
                .map(|&w| U::from_f64(w.to_f64_lossy()))
                .collect(),
        }
    }
}

fn softplus<T: Scalar>(z: T) -> T {
    if z > T::zero() {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn softmax3<T: Scalar>(logits: [T; 3]) -> [T; 3] {
    let m = logits[0].max(logits[1]).max(logits[2]);
    let exps = [
        (logits[0] - m).exp(),
        (logits[1] - m).exp(),
        (logits[2] - m).exp(),
    ];
    let sum = exps[0] + exps[1] + exps[2];
    [exps[0] / sum, exps[1] / sum, exps[2] / sum]
}

fn softmax<T: Scalar>(logits: &[T]) -> Vec<T> {
    let m = logits
        .iter()
        .fold(T::neg_infinity(), |acc, &v| acc.max(v));
    let exps: Vec<T> = logits.iter().map(|&v| (v - m).exp()).collect();
    let sum: T = exps.iter().copied().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Builds a `LossSample` from a position and raw targets.
pub fn make_sample<T: Scalar>(
    p: &Position,
    target_policy: &[(usize, f64)],
    target_wdl: [f64; 3],
    target_plys: f64,
) -> LossSample<T> {
    let moves = p.legal_moves();
    let legal_indices: Vec<usize> = moves.iter().map(|m| encoder::encode_policy(m, p)).collect();
    let mut policy = vec![T::zero(); legal_indices.len()];
    for &(idx, mass) in target_policy {
        if let Some(slot) = legal_indices.iter().position(|&l| l == idx) {
            policy[slot] = policy[slot] + T::from_f64(mass);
        }
    }
    LossSample {
        planes: encoder::encode_planes(p),
        legal_indices,
        target_policy: policy,
        target_wdl: [
            T::from_f64(target_wdl[0]),
            T::from_f64(target_wdl[1]),
            T::from_f64(target_wdl[2]),
        ],
        target_plys: T::from_f64(target_plys),
    }
}
