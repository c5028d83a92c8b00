//! Toy-scale self-play reinforcement loop: alternate game generation
//! (noisy search, temperature sampling early) with training updates over
//! a shared replay buffer.

use std::sync::atomic::AtomicBool;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::board::{Color, Outcome, Position};
use crate::encoder;
use crate::experts::{make_sample, BundleMetadata, Evaluator, ExpertBundle, LossWeights, Network};
use crate::phase::{self, GamePhase};
use crate::search::{search, EvalRouter, SearchConfig};

use super::data::TrainingSample;
use super::trainer::{TrainError, TrainMethod, TrainRunConfig, Trainer};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelfplayMode {
    /// One model for every phase.
    Classical,
    /// Per-phase experts, each trained on its own phase's samples.
    MixtureSeparated,
    /// General model first, then per-phase fine-tunes each update.
    MixtureStaged,
}

impl SelfplayMode {
    pub fn name(self) -> &'static str {
        match self {
            SelfplayMode::Classical => "classical",
            SelfplayMode::MixtureSeparated => "mixture-separated",
            SelfplayMode::MixtureStaged => "mixture-staged",
        }
    }

    pub fn parse(s: &str) -> Option<SelfplayMode> {
        Some(match s {
            "classical" => SelfplayMode::Classical,
            "mixture-separated" | "separated" => SelfplayMode::MixtureSeparated,
            "mixture-staged" | "staged" => SelfplayMode::MixtureStaged,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone)]
pub struct SelfplayConfig {
    pub mode: SelfplayMode,
    pub updates: usize,
    pub games_per_update: usize,
    pub nodes_per_move: u64,
    /// Replay buffer capacity in samples; oldest evicted first.
    pub replay_capacity: usize,
    pub seed: u64,
    pub hidden: usize,
    pub batch_size: usize,
    pub epochs_per_update: usize,
    /// Games longer than this many plies are scored as draws.
    pub max_game_plies: usize,
    pub temperature: f64,
    pub temperature_moves: u32,
}

impl Default for SelfplayConfig {
    fn default() -> SelfplayConfig {
        SelfplayConfig {
            mode: SelfplayMode::Classical,
            updates: 10,
            games_per_update: 4,
            nodes_per_move: 32,
            replay_capacity: 4096,
            seed: 0,
            hidden: 16,
            batch_size: 32,
            epochs_per_update: 1,
            max_game_plies: 120,
            temperature: 0.8,
            temperature_moves: 15,
        }
    }
}

#[derive(Debug)]
pub struct SelfplayReport {
    /// Bundle after each update; index 0 is the initial (v0) bundle.
    pub bundles: Vec<ExpertBundle>,
    pub games_played: usize,
    pub buffer_len: usize,
    /// Per-update mean training loss on the buffer sample.
    pub update_losses: Vec<f64>,
}

struct PlyRecord {
    position: Position,
    policy: Vec<(usize, f64)>,
    phase: GamePhase,
}

/// Outcome value target for the player who moved at `side`.
fn outcome_wdl(outcome: Outcome, side: Color) -> [f64; 3] {
    match (outcome, side) {
        (Outcome::WhiteWin, Color::White) | (Outcome::BlackWin, Color::Black) => [1.0, 0.0, 0.0],
        (Outcome::WhiteWin, Color::Black) | (Outcome::BlackWin, Color::White) => [0.0, 0.0, 1.0],
        _ => [0.0, 1.0, 0.0],
    }
}

fn play_game(
    router: &EvalRouter,
    cfg: &SelfplayConfig,
    seed: u64,
) -> (Vec<TrainingSample>, Outcome) {
    let stop = AtomicBool::new(false);
    let mut p = Position::start();
    let mut records: Vec<PlyRecord> = Vec::new();
    let mut move_rng = ChaCha8Rng::seed_from_u64(seed);
    while p.outcome() == Outcome::Ongoing && records.len() < cfg.max_game_plies {
        let sc = SearchConfig {
            nodes: Some(cfg.nodes_per_move),
            noise: true,
            temperature: cfg.temperature,
            temperature_moves: cfg.temperature_moves,
            seed: move_rng.gen(),
            ..SearchConfig::default()
        };
        let r = search(&p, router.clone(), &sc, &stop).expect("live position");
        let policy = r
            .policy_target
            .iter()
            .map(|(m, v)| (encoder::encode_policy(m, &p), *v))
            .collect();
        records.push(PlyRecord {
            position: p.clone(),
            policy,
            phase: phase::classify(&p).phase,
        });
        p = p.apply_move_unchecked(&r.best_move);
    }
    let outcome = p.outcome();
    let total = records.len();
    let samples = records
        .into_iter()
        .enumerate()
        .map(|(i, rec)| {
            let wdl = outcome_wdl(outcome, rec.position.side_to_move());
            TrainingSample {
                data: make_sample(&rec.position, &rec.policy, wdl, (total - i) as f64),
                phase: rec.phase,
                weight: 1.0,
            }
        })
        .collect();
    (samples, outcome)
}

fn router_for(mode: SelfplayMode, bundle: &ExpertBundle) -> EvalRouter {
    match mode {
        SelfplayMode::Classical => EvalRouter::Single(bundle.experts[0].clone()),
        _ => EvalRouter::Bundle(bundle.clone()),
    }
}

fn train_update(
    mode: SelfplayMode,
    bundle: &ExpertBundle,
    buffer: &[TrainingSample],
    cfg: &SelfplayConfig,
    seed: u64,
) -> Result<(ExpertBundle, f64), TrainError> {
    let tcfg = |s: u64| TrainRunConfig {
        method: TrainMethod::Regular,
        batch_size: cfg.batch_size,
        epochs: cfg.epochs_per_update,
        eval_cadence: usize::MAX, // RL updates keep the final parameters
        hidden: cfg.hidden,
        seed: s,
        max_lr: 0.02,
        // Outcome-driven weights for the RL updates: the value head is
        // the main learning signal; visit-count policies from tiny noisy
        // searches are too diffuse to dominate the loss.
        loss_weights: LossWeights {
            alpha: 1.0,
            policy_factor: 0.25,
            beta: 0.002,
            weight_decay: 0.0001,
        },
        ..TrainRunConfig::default()
    };
    let net_of = |e: &Evaluator| -> Network<f32> {
        match e {
            Evaluator::Network(n) => n.clone(),
            Evaluator::Handcrafted(_) => Network::seeded(cfg.hidden, seed),
        }
    };
    let fine_tune = |init: Network<f32>,
                     samples: &[&TrainingSample],
                     s: u64|
     -> Result<(Network<f32>, f64), TrainError> {
        if samples.is_empty() {
            return Ok((init, 0.0));
        }
        let pairs: Vec<_> = samples.iter().map(|x| (&x.data, x.weight)).collect();
        let mut t = Trainer::new(init, tcfg(s));
        t.run(&pairs, &pairs)?;
        let loss = t.validation_loss(&pairs);
        Ok((t.net, loss))
    };
    let all: Vec<&TrainingSample> = buffer.iter().collect();
    match mode {
        SelfplayMode::Classical => {
            let (net, loss) = fine_tune(net_of(&bundle.experts[0]), &all, seed)?;
            Ok((
                ExpertBundle::uniform(Evaluator::Network(net), bundle.metadata.clone()),
                loss,
            ))
        }
        SelfplayMode::MixtureSeparated => {
            let mut experts = Vec::new();
            let mut losses = 0.0;
            for phase in [GamePhase::Opening, GamePhase::Middlegame, GamePhase::Endgame] {
                let subset: Vec<&TrainingSample> =
                    buffer.iter().filter(|s| s.phase == phase).collect();
                let (net, loss) = fine_tune(
                    net_of(bundle.expert(phase)),
                    &subset,
                    seed ^ (phase as u64),
                )?;
                losses += loss;
                experts.push(Evaluator::Network(net));
            }
            let mut it = experts.into_iter();
            Ok((
                ExpertBundle::new(
                    it.next().unwrap(),
                    it.next().unwrap(),
                    it.next().unwrap(),
                    bundle.metadata.clone(),
                ),
                losses / 3.0,
            ))
        }
        SelfplayMode::MixtureStaged => {
            // General pass over everything, then a short per-phase tune.
            let (general, loss) = fine_tune(net_of(&bundle.experts[0]), &all, seed)?;
            let mut experts = Vec::new();
            for phase in [GamePhase::Opening, GamePhase::Middlegame, GamePhase::Endgame] {
                let subset: Vec<&TrainingSample> =
                    buffer.iter().filter(|s| s.phase == phase).collect();
                let (net, _) =
                    fine_tune(general.clone(), &subset, seed ^ 0x100 ^ (phase as u64))?;
                experts.push(Evaluator::Network(net));
            }
            let mut it = experts.into_iter();
            Ok((
                ExpertBundle::new(
                    it.next().unwrap(),
                    it.next().unwrap(),
                    it.next().unwrap(),
                    bundle.metadata.clone(),
                ),
                loss,
            ))
        }
    }
}

/// Run the RL loop from a random initialization (or a given bundle).
/// Returns the bundle sequence v0..vN and generation statistics.
pub fn selfplay_rl(
    initial: Option<ExpertBundle>,
    cfg: &SelfplayConfig,
) -> Result<SelfplayReport, TrainError> {
    let meta = BundleMetadata::new(cfg.mode.name(), "selfplay");
    let v0 = initial.unwrap_or_else(|| {
        ExpertBundle::uniform(
            Evaluator::Network(Network::seeded(cfg.hidden, cfg.seed)),
            meta,
        )
    });
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5e1f);
    let mut bundles = vec![v0];
    let mut buffer: Vec<TrainingSample> = Vec::new();
    let mut games_played = 0usize;
    let mut update_losses = Vec::new();
    for _update in 0..cfg.updates {
        let current = bundles.last().unwrap();
        let router = router_for(cfg.mode, current);
        for _ in 0..cfg.games_per_update {
            let (samples, _) = play_game(&router, cfg, rng.gen());
            games_played += 1;
            buffer.extend(samples);
        }
        if buffer.len() > cfg.replay_capacity {
            let excess = buffer.len() - cfg.replay_capacity;
            buffer.drain(..excess);
        }
        let (next, loss) = train_update(cfg.mode, current, &buffer, cfg, rng.gen())?;
        update_losses.push(loss);
        bundles.push(next);
    }
    Ok(SelfplayReport {
        buffer_len: buffer.len(),
        bundles,
        games_played,
        update_losses,
    })
}
