//! Batched Monte-Carlo tree search with a phase gate in front of the leaf
//! evaluator. With a three-expert bundle the gate routes each evaluation
//! batch to the expert voted for by the batch's classified phases; with a
//! single model the identical code path runs and the vote is ignored, so
//! the two configurations differ only in which evaluator answers.

use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Dirichlet, WeightedIndex};

use crate::board::{Move, Outcome, Position};
use crate::experts::{Evaluation, Evaluator, ExpertBundle};
use crate::phase::{self, GamePhase};

/// Leaf evaluator behind the gate: one model for every phase, or one
/// expert per phase.
#[derive(Debug, Clone)]
pub enum EvalRouter {
    Single(Evaluator),
    Bundle(ExpertBundle),
}

impl EvalRouter {
    fn expert_for(&self, phase: GamePhase) -> &Evaluator {
        match self {
            EvalRouter::Single(e) => e,
            EvalRouter::Bundle(b) => b.expert(phase),
        }
    }
}

/// Majority vote over the classified phases of one evaluation batch; ties
/// break toward the later phase so a gate split across a boundary prefers
/// the expert trained on what the game is becoming.
pub fn gate_batch(phases: &[GamePhase]) -> GamePhase {
    let mut votes = [0usize; 3];
    for &p in phases {
        votes[p as usize] += 1;
    }
    let mut best = GamePhase::Opening;
    for &p in &[GamePhase::Middlegame, GamePhase::Endgame] {
        if votes[p as usize] >= votes[best as usize] {
            best = p;
        }
    }
    best
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Node budget; expansions (the root included) count against it.
    pub nodes: Option<u64>,
    /// Wall-clock budget in milliseconds.
    pub movetime: Option<u64>,
    /// Leaves gathered per evaluation batch.
    pub batch_size: usize,
    pub c_puct: f64,
    pub seed: u64,
    /// Self-play settings: root Dirichlet noise and early-game sampling.
    pub noise: bool,
    pub dirichlet_alpha: f64,
    pub dirichlet_epsilon: f64,
    pub temperature: f64,
    /// Full moves of the game during which moves are sampled by visit
    /// count instead of taken greedily. Only honored when `noise` is on.
    pub temperature_moves: u32,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig {
            nodes: Some(800),
            movetime: None,
            batch_size: 8,
            c_puct: 2.5,
            seed: 0,
            noise: false,
            dirichlet_alpha: 0.3,
            dirichlet_epsilon: 0.25,
            temperature: 0.8,
            temperature_moves: 15,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub best_move: Move,
    /// Root children with their visit counts, in `legal_moves` order.
    pub root_visits: Vec<(Move, u32)>,
    /// Root value estimate in [-1, 1] from the side to move.
    pub value: f64,
    /// Leaf evaluations answered by each phase expert.
    pub gate_counts: [u64; 3],
    /// Expansions performed, the root included.
    pub nodes: u64,
    /// Normalized root visit distribution; the self-play training target.
    pub policy_target: Vec<(Move, f64)>,
}

impl SearchResult {
    /// Centipawn-like score used for adjudication and info lines.
    pub fn score(&self) -> i32 {
        value_to_score(self.value)
    }
}

pub fn value_to_score(value: f64) -> i32 {
    (value * 1000.0).round() as i32
}

#[derive(Debug, Clone)]
struct Edge {
    mv: Move,
    prior: f64,
    visits: u32,
    /// Sum of backed-up values from the parent's perspective.
    value_sum: f64,
    vloss: u32,
    child: Option<usize>,
}

#[derive(Debug, Clone)]
struct Node {
    position: Position,
    /// Value assigned at expansion (network output or terminal outcome),
    /// from this node's side to move.
    value: f64,
    /// Outcome value for terminal nodes; such nodes have no edges.
    terminal: Option<f64>,
    edges: Vec<Edge>,
}

impl Node {
    fn q(&self) -> f64 {
        let (mut w, mut n) = (0.0, 0u32);
        for e in &self.edges {
            w += e.value_sum;
            n += e.visits;
        }
        if n == 0 {
            self.value
        } else {
            w / f64::from(n)
        }
    }
}

pub struct SearchTree {
    nodes: Vec<Node>,
    router: EvalRouter,
    pub gate_counts: [u64; 3],
    expansions: u64,
}

impl SearchTree {
    pub fn new(root: Position, router: EvalRouter) -> SearchTree {
        SearchTree {
            nodes: vec![Node {
                position: root,
                value: 0.0,
                terminal: None,
                edges: Vec::new(),
            }],
            router,
            gate_counts: [0; 3],
            expansions: 0,
        }
    }

    fn terminal_value(p: &Position) -> Option<f64> {
        match p.outcome() {
            Outcome::Ongoing => None,
            // A decided game at a node means the side to move was mated.
            Outcome::WhiteWin | Outcome::BlackWin => Some(-1.0),
            Outcome::Draw => Some(0.0),
        }
    }

    /// Walk PUCT from the root, applying virtual loss along the way.
    /// Returns the path of (node, edge index) pairs and the leaf node.
    fn select(&mut self, c_puct: f64) -> (Vec<(usize, usize)>, usize) {
        let mut path = Vec::new();
        let mut node = 0usize;
        loop {
            if self.nodes[node].edges.is_empty() {
                return (path, node);
            }
            let parent_q = self.nodes[node].q();
            let n_parent: u32 = self.nodes[node]
                .edges
                .iter()
                .map(|e| e.visits + e.vloss)
                .sum();
            let sqrt_n = f64::from(n_parent).sqrt().max(1.0);
            let mut best = 0usize;
            let mut best_score = f64::NEG_INFINITY;
            for (i, e) in self.nodes[node].edges.iter().enumerate() {
                let n = e.visits + e.vloss;
                let q = if n == 0 {
                    parent_q
                } else {
                    (e.value_sum - f64::from(e.vloss)) / f64::from(n)
                };
                let u = c_puct * e.prior * sqrt_n / (1.0 + f64::from(n));
                let score = q + u;
                if score > best_score {
                    best_score = score;
                    best = i;
                }
            }
            self.nodes[node].edges[best].vloss += 1;
            path.push((node, best));
            match self.nodes[node].edges[best].child {
                Some(c) => node = c,
                None => {
                    let (from, to);
                    {
                        let e = &self.nodes[node].edges[best];
                        from = node;
                        to = e.mv;
                    }
                    let next = self.nodes[from].position.apply_move_unchecked(&to);
                    let terminal = Self::terminal_value(&next);
                    self.nodes.push(Node {
                        position: next,
                        value: terminal.unwrap_or(0.0),
                        terminal,
                        edges: Vec::new(),
                    });
                    let child = self.nodes.len() - 1;
                    self.nodes[from].edges[best].child = Some(child);
                    return (path, child);
                }
            }
        }
    }

    /// Attach priors to a freshly evaluated leaf and mark it expanded.
    fn expand(&mut self, node: usize, eval: &Evaluation) {
        self.nodes[node].value = eval.value;
        self.nodes[node].edges = eval
            .policy
            .iter()
            .map(|(mv, p)| Edge {
                mv: mv.clone(),
                prior: *p,
                visits: 0,
                value_sum: 0.0,
                vloss: 0,
                child: None,
            })
            .collect();
        self.expansions += 1;
    }

    /// Back the leaf value up the path, reverting virtual losses. The
    /// value flips sign at each ply going up.
    fn backprop(&mut self, path: &[(usize, usize)], leaf_value: f64) {
        let mut v = leaf_value;
        for &(node, edge) in path.iter().rev() {
            // Edge values are from the parent's perspective, one ply
            // above the child the value came from.
            v = -v;
            let e = &mut self.nodes[node].edges[edge];
            e.visits += 1;
            e.value_sum += v;
            e.vloss -= 1;
        }
    }

    /// One batch of leaf collection, gating, evaluation, and backup.
    /// Returns false when the tree is exhausted (every selection hits a
    /// terminal leaf already visited this batch).
    fn run_batch(&mut self, cfg: &SearchConfig, budget_left: u64) -> bool {
        let want = cfg.batch_size.max(1).min(budget_left.max(1) as usize);
        let mut paths: Vec<(Vec<(usize, usize)>, usize)> = Vec::new();
        let mut fresh: Vec<usize> = Vec::new();
        for _ in 0..want {
            let (path, leaf) = self.select(cfg.c_puct);
            if self.nodes[leaf].terminal.is_none() && !fresh.contains(&leaf) {
                fresh.push(leaf);
            }
            paths.push((path, leaf));
            if self.nodes[leaf].terminal.is_some() && paths.len() >= want {
                break;
            }
        }
        if !fresh.is_empty() {
            let phases: Vec<GamePhase> = fresh
                .iter()
                .map(|&n| phase::classify(&self.nodes[n].position).phase)
                .collect();
            let chosen = gate_batch(&phases);
            self.gate_counts[chosen as usize] += fresh.len() as u64;
            let expert = self.router.expert_for(chosen).clone();
            let positions: Vec<&Position> =
                fresh.iter().map(|&n| &self.nodes[n].position).collect();
            let evals = expert
                .evaluate_batch(&positions)
                .expect("non-terminal leaves");
            for (&n, ev) in fresh.iter().zip(&evals) {
                self.expand(n, ev);
            }
        }
        let any_fresh = !fresh.is_empty();
        for (path, leaf) in paths {
            let v = self.nodes[leaf]
                .terminal
                .unwrap_or(self.nodes[leaf].value);
            self.backprop(&path, v);
        }
        any_fresh
    }
}

/// Run a search from `root` under the node/time budget in `cfg`. The stop
/// flag is polled between batches; on stop the best move so far is
/// returned.
pub fn search(
    root: &Position,
    router: EvalRouter,
    cfg: &SearchConfig,
    stop: &AtomicBool,
) -> Result<SearchResult, crate::experts::EvalError> {
    assert_eq!(root.outcome(), Outcome::Ongoing, "search needs a live position");
    let start = Instant::now();
    let deadline = cfg.movetime.map(|ms| Duration::from_millis(ms));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut tree = SearchTree::new(root.clone(), router);

    // Root expansion counts against the budget.
    let root_phase = phase::classify(root).phase;
    let chosen = gate_batch(&[root_phase]);
    tree.gate_counts[chosen as usize] += 1;
    let root_eval = tree.router.expert_for(chosen).evaluate(root)?;
    tree.expand(0, &root_eval);

    if cfg.noise {
        apply_root_noise(&mut tree, cfg, &mut rng);
    }

    let budget = cfg.nodes.unwrap_or(u64::MAX);
    while tree.expansions < budget {
        if stop.load(Ordering::Relaxed) {
            break;
        }
        if let Some(d) = deadline {
            if start.elapsed() >= d {
                break;
            }
        }
        let left = budget - tree.expansions;
        if !tree.run_batch(cfg, left) {
            // Only terminal leaves reachable; their values still refine
            // the statistics, but cap the work so mate-bound roots finish.
            if tree.nodes[0].edges.iter().map(|e| e.visits).sum::<u32>() as u64 >= budget {
                break;
            }
        }
    }

    let root_visits: Vec<(Move, u32)> = tree.nodes[0]
        .edges
        .iter()
        .map(|e| (e.mv.clone(), e.visits))
        .collect();
    let total: u32 = root_visits.iter().map(|(_, n)| n).sum();
    let policy_target: Vec<(Move, f64)> = if total == 0 {
        tree.nodes[0]
            .edges
            .iter()
            .map(|e| (e.mv.clone(), e.prior))
            .collect()
    } else {
        root_visits
            .iter()
            .map(|(m, n)| (m.clone(), f64::from(*n) / f64::from(total)))
            .collect()
    };

    let best_move = pick_move(root, &root_visits, &tree.nodes[0].edges, cfg, &mut rng);
    let value = tree.nodes[0].q();
    Ok(SearchResult {
        best_move,
        root_visits,
        value,
        gate_counts: tree.gate_counts,
        nodes: tree.expansions,
        policy_target,
    })
}

fn apply_root_noise(tree: &mut SearchTree, cfg: &SearchConfig, rng: &mut ChaCha8Rng) {
    let n = tree.nodes[0].edges.len();
    if n < 2 {
        return;
    }
    let dir = Dirichlet::new_with_size(cfg.dirichlet_alpha, n).expect("valid alpha");
    let noise = dir.sample(rng);
    for (e, x) in tree.nodes[0].edges.iter_mut().zip(noise) {
        e.prior = (1.0 - cfg.dirichlet_epsilon) * e.prior + cfg.dirichlet_epsilon * x;
    }
}

fn pick_move(
    root: &Position,
    visits: &[(Move, u32)],
    edges: &[Edge],
    cfg: &SearchConfig,
    rng: &mut ChaCha8Rng,
) -> Move {
    let sample = cfg.noise && root.fullmove_number() <= cfg.temperature_moves;
    if sample {
        let weights: Vec<f64> = visits
            .iter()
            .map(|(_, n)| f64::from(*n).powf(1.0 / cfg.temperature))
            .collect();
        if weights.iter().sum::<f64>() > 0.0 {
            let idx = WeightedIndex::new(&weights).expect("positive weights");
            return visits[idx.sample(rng)].0.clone();
        }
    }
    // Greedy: most visits, prior as the tie-break (covers a budget of one
    // node, where no child has been visited).
    let mut best = 0usize;
    for i in 1..visits.len() {
        let (n_b, p_b) = (visits[best].1, edges[best].prior);
        let (n_i, p_i) = (visits[i].1, edges[i].prior);
        if n_i > n_b || (n_i == n_b && p_i > p_b) {
            best = i;
        }
    }
    visits[best].0.clone()
}
