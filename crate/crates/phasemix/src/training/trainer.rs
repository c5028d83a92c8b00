//! The supervised training loop and the four regimes built on it:
//! regular (one model), separated (one run per phase), staged (general
//! model then per-phase fine-tunes, with a sequential variant), and
//! weighted (full data, phase-dependent sample weights).

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::experts::{
    BundleMetadata, Evaluator, ExpertBundle, LossSample, LossWeights, Network,
};
use crate::phase::GamePhase;

use super::data::{SplitDatasets, TrainingSample};
use super::optim::{Nag, OneCycle};

#[derive(Debug, thiserror::Error)]
pub enum TrainError {
    #[error("a-factor must be >= 1, got {0}")]
    BadAFactor(f64),
    #[error("empty {0} dataset for method {1}")]
    EmptyDataset(String, String),
    #[error("empty batch")]
    EmptyBatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainMethod {
    Regular,
    Separated,
    Staged,
    StagedSequential,
    Weighted,
}

impl TrainMethod {
    pub fn name(self) -> &'static str {
        match self {
            TrainMethod::Regular => "regular",
            TrainMethod::Separated => "separated",
            TrainMethod::Staged => "staged",
            TrainMethod::StagedSequential => "staged-sequential",
            TrainMethod::Weighted => "weighted",
        }
    }

    pub fn parse(s: &str) -> Option<TrainMethod> {
        Some(match s {
            "regular" => TrainMethod::Regular,
            "separated" => TrainMethod::Separated,
            "staged" => TrainMethod::Staged,
            "staged-sequential" => TrainMethod::StagedSequential,
            "weighted" => TrainMethod::Weighted,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone)]
pub struct TrainRunConfig {
    pub method: TrainMethod,
    /// T3 main-phase factor; 1.0 degenerates to regular learning.
    pub a_factor: f64,
    pub batch_size: usize,
    pub epochs: usize,
    /// Validate (and maybe checkpoint or revert) every this many steps.
    pub eval_cadence: usize,
    /// Revert when a validation loss reaches this multiple of the best.
    pub spike_factor: f64,
    pub seed: u64,
    pub hidden: usize,
    pub max_lr: f64,
    pub loss_weights: LossWeights,
}

impl Default for TrainRunConfig {
    fn default() -> TrainRunConfig {
        TrainRunConfig {
            method: TrainMethod::Regular,
            a_factor: 4.0,
            batch_size: 32,
            epochs: 2,
            eval_cadence: 500,
            spike_factor: 1.5,
            seed: 0,
            hidden: 32,
            max_lr: 0.14,
            loss_weights: LossWeights::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub params: Vec<f32>,
    pub velocity: Vec<f32>,
    pub iteration: usize,
    pub val_loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LogEvent {
    Eval { iteration: usize, val_loss: f64 },
    Checkpoint { iteration: usize, val_loss: f64, param_hash: String },
    SpikeRevert { iteration: usize, val_loss: f64, best: f64 },
    StageStart { stage: String, from_hash: String },
}

#[derive(Debug, Clone, Default)]
pub struct TrainingLog {
    pub events: Vec<LogEvent>,
}

impl TrainingLog {
    pub fn checkpoints(&self) -> impl Iterator<Item = (&usize, &f64)> {
        self.events.iter().filter_map(|e| match e {
            LogEvent::Checkpoint { iteration, val_loss, .. } => Some((iteration, val_loss)),
            _ => return None,
        })
    }
}

pub fn param_hash(params: &[f32]) -> String {
    let mut h = Sha256::new();
    for p in params {
        h.update(p.to_le_bytes());
    }
    let out = h.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

/// T3 weight pair for main-phase factor `a`, normalized so the mean
/// weight is exactly 1.0 under equal one-third phase proportions:
/// (a + 2) * w_other / 3 = 1.
pub fn weight_pair(a: f64) -> Result<(f64, f64), TrainError> {
    if !(a >= 1.0) {
        return Err(TrainError::BadAFactor(a));
    }
    let w_other = 3.0 / (a + 2.0);
    Ok((a * w_other, w_other))
}

/// Weighted (sample, weight) pairs for training an expert of
/// `main_phase` on the full dataset.
pub fn assign_weights<'a>(
    samples: &[&'a TrainingSample],
    main_phase: GamePhase,
    a: f64,
) -> Result<Vec<(&'a TrainingSample, f64)>, TrainError> {
    let (w_main, w_other) = weight_pair(a)?;
    Ok(samples
        .iter()
        .map(|s| {
            let w = if s.phase == main_phase { w_main } else { w_other };
            (*s, s.weight * w)
        })
        .collect())
}

/// Mean of weighted per-sample losses over the batch.
pub fn weighted_loss(
    net: &Network<f32>,
    batch: &[(&LossSample<f32>, f64)],
    lw: &LossWeights,
) -> Result<f64, TrainError> {
    if batch.is_empty() {
        return Err(TrainError::EmptyBatch);
    }
    let sum: f64 = batch
        .iter()
        .map(|(s, w)| w * f64::from(net.loss(s, lw)))
        .sum();
    Ok(sum / batch.len() as f64)
}

/// One training run over a fixed weighted sample list. Owns the network
/// and optimizer; validation snapshots and spike reverts go through the
/// best checkpoint.
pub struct Trainer {
    pub net: Network<f32>,
    pub opt: Nag,
    pub best: Option<Checkpoint>,
    pub log: TrainingLog,
    cfg: TrainRunConfig,
    iteration: usize,
}

impl Trainer {
    pub fn new(net: Network<f32>, cfg: TrainRunConfig) -> Trainer {
        let opt = Nag::new(net.params.len());
        Trainer {
            net,
            opt,
            best: None,
            log: TrainingLog::default(),
            cfg,
            iteration: 0,
        }
    }

    pub fn validation_loss(&self, val: &[(&LossSample<f32>, f64)]) -> f64 {
        // Unweighted mean: validation measures fit, not emphasis.
        if val.is_empty() {
            return f64::INFINITY;
        }
        let sum: f64 = val
            .iter()
            .map(|(s, _)| f64::from(self.net.loss(s, &self.cfg.loss_weights)))
            .sum();
        sum / val.len() as f64
    }

    fn save_checkpoint(&mut self, val_loss: f64) {
        self.best = Some(Checkpoint {
            params: self.net.params.clone(),
            velocity: self.opt.velocity.clone(),
            iteration: self.iteration,
            val_loss,
        });
        self.log.events.push(LogEvent::Checkpoint {
            iteration: self.iteration,
            val_loss,
            param_hash: param_hash(&self.net.params),
        });
    }

    /// Spike rule: revert parameters *and* optimizer state when the new
    /// validation loss reaches `spike_factor` times the best seen.
    pub fn observe_validation(&mut self, val_loss: f64) {
        self.log.events.push(LogEvent::Eval {
            iteration: self.iteration,
            val_loss,
        });
        match &self.best {
            None => self.save_checkpoint(val_loss),
            Some(best) if val_loss < best.val_loss => self.save_checkpoint(val_loss),
            Some(best) if val_loss >= self.cfg.spike_factor * best.val_loss => {
                self.log.events.push(LogEvent::SpikeRevert {
                    iteration: self.iteration,
                    val_loss,
                    best: best.val_loss,
                });
                self.net.params.copy_from_slice(&best.params);
                self.opt.velocity.copy_from_slice(&best.velocity);
            }
            Some(_) => {}
        }
    }

    /// Run the configured number of epochs; leaves the network at the
    /// best checkpoint.
    pub fn run(
        &mut self,
        train: &[(&LossSample<f32>, f64)],
        val: &[(&LossSample<f32>, f64)],
    ) -> Result<(), TrainError> {
        if train.is_empty() {
            return Err(TrainError::EmptyBatch);
        }
        let val = if val.is_empty() { train } else { val };
        let batch = self.cfg.batch_size.max(1).min(train.len());
        let steps_per_epoch = train.len().div_ceil(batch);
        let total_steps = steps_per_epoch * self.cfg.epochs;
        let schedule = OneCycle {
            max_lr: self.cfg.max_lr,
            ..OneCycle::new(total_steps)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        let mut grad = vec![0.0f32; self.net.params.len()];
        let mut order: Vec<usize> = (0..train.len()).collect();

        for _epoch in 0..self.cfg.epochs {
            order.shuffle(&mut rng);
            for chunk in order.chunks(batch) {
                grad.iter_mut().for_each(|g| *g = 0.0);
                let scale_base = 1.0 / chunk.len() as f64;
                for &i in chunk {
                    let (s, w) = train[i];
                    self.net.accumulate_gradient(
                        s,
                        &self.cfg.loss_weights,
                        (w * scale_base) as f32,
                        &mut grad,
                    );
                }
                let lr = schedule.lr(self.iteration);
                let mu = schedule.momentum(self.iteration);
                self.opt.step(&mut self.net.params, &grad, lr, mu);
                self.iteration += 1;
                if self.iteration % self.cfg.eval_cadence == 0 {
                    let v = self.validation_loss(val);
                    self.observe_validation(v);
                }
            }
        }
        let v = self.validation_loss(val);
        self.observe_validation(v);
        // The run's product is the last (best) checkpoint.
        if let Some(best) = &self.best {
            self.net.params.copy_from_slice(&best.params);
        }
        Ok(())
    }
}

fn weighted<'a>(samples: &[&'a TrainingSample]) -> Vec<(&'a LossSample<f32>, f64)> {
    samples.iter().map(|s| (&s.data, s.weight)).collect()
}

fn all_refs(set: &super::data::PhaseDatasets) -> Vec<&TrainingSample> {
    set.samples.iter().collect()
}

const PHASES: [GamePhase; 3] = [
    GamePhase::Opening,
    GamePhase::Middlegame,
    GamePhase::Endgame,
];

fn require_nonempty(
    n: usize,
    what: &str,
    method: TrainMethod,
) -> Result<(), TrainError> {
    if n == 0 {
        Err(TrainError::EmptyDataset(what.into(), method.name().into()))
    } else {
        Ok(())
    }
}

/// Train a bundle with the configured regime. Every run inside a regime
/// uses the same seed so the reduction laws (weighted with a = 1 versus
/// regular) hold exactly.
pub fn train(
    datasets: &SplitDatasets,
    cfg: &TrainRunConfig,
) -> Result<(ExpertBundle, TrainingLog), TrainError> {
    let meta = BundleMetadata::new(cfg.method.name(), "supervised");
    let train_all = all_refs(&datasets.train);
    let val_all = all_refs(&datasets.val);
    require_nonempty(train_all.len(), "train", cfg.method)?;
    let mut log = TrainingLog::default();

    let run_one = |samples: &[(&LossSample<f32>, f64)],
                   val: &[(&LossSample<f32>, f64)],
                   init: Network<f32>,
                   log: &mut TrainingLog|
     -> Result<Network<f32>, TrainError> {
        let mut t = Trainer::new(init, cfg.clone());
        t.run(samples, val)?;
        log.events.extend(t.log.events);
        Ok(t.net)
    };

    let init = || Network::<f32>::seeded(cfg.hidden, cfg.seed);

    let bundle = match cfg.method {
        TrainMethod::Regular => {
            let net = run_one(
                &weighted(&train_all),
                &weighted(&val_all),
                init(),
                &mut log,
            )?;
            ExpertBundle::uniform(Evaluator::Network(net), meta)
        }
        TrainMethod::Separated => {
            let mut experts = Vec::new();
            for phase in PHASES {
                let tr = datasets.train.phase_samples(phase);
                require_nonempty(tr.len(), phase.name(), cfg.method)?;
                let va = datasets.val.phase_samples(phase);
                log.events.push(LogEvent::StageStart {
                    stage: phase.name().into(),
                    from_hash: String::new(),
                });
                experts.push(Evaluator::Network(run_one(
                    &weighted(&tr),
                    &weighted(&va),
                    init(),
                    &mut log,
                )?));
            }
            let mut it = experts.into_iter();
            ExpertBundle::new(
                it.next().unwrap(),
                it.next().unwrap(),
                it.next().unwrap(),
                meta,
            )
        }
        TrainMethod::Staged => {
            // Stage 0: general model on the full pool.
            let general = run_one(
                &weighted(&train_all),
                &weighted(&val_all),
                init(),
                &mut log,
            )?;
            let general_hash = param_hash(&general.params);
            let mut experts = Vec::new();
            for phase in PHASES {
                let tr = datasets.train.phase_samples(phase);
                require_nonempty(tr.len(), phase.name(), cfg.method)?;
                let va = datasets.val.phase_samples(phase);
                log.events.push(LogEvent::StageStart {
                    stage: format!("fine-tune {}", phase.name()),
                    from_hash: general_hash.clone(),
                });
                experts.push(Evaluator::Network(run_one(
                    &weighted(&tr),
                    &weighted(&va),
                    general.clone(),
                    &mut log,
                )?));
            }
            let mut it = experts.into_iter();
            ExpertBundle::new(
                it.next().unwrap(),
                it.next().unwrap(),
                it.next().unwrap(),
                meta,
            )
        }
        TrainMethod::StagedSequential => {
            // One model walks the phases in game order; each stage's
            // result is that phase's expert and the next stage's start.
            let mut current = init();
            let mut experts = Vec::new();
            for phase in PHASES {
                let tr = datasets.train.phase_samples(phase);
                require_nonempty(tr.len(), phase.name(), cfg.method)?;
                let va = datasets.val.phase_samples(phase);
                log.events.push(LogEvent::StageStart {
                    stage: format!("sequential {}", phase.name()),
                    from_hash: param_hash(&current.params),
                });
                current = run_one(&weighted(&tr), &weighted(&va), current, &mut log)?;
                experts.push(Evaluator::Network(current.clone()));
            }
            let mut it = experts.into_iter();
            ExpertBundle::new(
                it.next().unwrap(),
                it.next().unwrap(),
                it.next().unwrap(),
                meta,
            )
        }
        TrainMethod::Weighted => {
            let mut experts = Vec::new();
            for phase in PHASES {
                let tr = assign_weights(&train_all, phase, cfg.a_factor)?;
                let tr: Vec<(&LossSample<f32>, f64)> =
                    tr.iter().map(|(s, w)| (&s.data, *w)).collect();
                log.events.push(LogEvent::StageStart {
                    stage: format!("weighted {}", phase.name()),
                    from_hash: String::new(),
                });
                experts.push(Evaluator::Network(run_one(
                    &tr,
                    &weighted(&val_all),
                    init(),
                    &mut log,
                )?));
            }
            let mut it = experts.into_iter();
            ExpertBundle::new(
                it.next().unwrap(),
                it.next().unwrap(),
                it.next().unwrap(),
                meta,
            )
        }
    };
    Ok((bundle, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::parse_pgn;
    use crate::training::data::{build_datasets_from_games, SplitSpec};

    fn toy_sets() -> SplitDatasets {
        let pgn = r#"[Event "A"]
[Result "1-0"]

1. e4 e5 2. Nf3 Nc6 3. Bb5 a6 4. Ba4 Nf6 5. O-O Be7 6. Re1 b5 7. Bb3 d6 1-0

[Event "B"]
[Result "0-1"]

1. d4 d5 2. c4 e6 3. Nc3 Nf6 4. Bg5 Be7 5. e3 O-O 6. Nf3 h6 7. Bh4 b6 0-1

[Event "C"]
[SetUp "1"]
[FEN "r2qk2r/pppppppp/2n2n2/8/8/2N2N2/PPPPPPPP/R2QK2R w KQkq - 0 1"]
[Result "1/2-1/2"]

1. Nb1 Nb8 2. Nc3 Nc6 3. Nb1 Nb8 4. Nc3 Nc6 5. Nb1 Nb8 1/2-1/2

[Event "D"]
[SetUp "1"]
[FEN "4k3/8/8/8/8/8/4P3/4K3 w - - 0 1"]
[Result "1/2-1/2"]

1. Kd2 Kd7 2. Kc3 Kc6 3. Kd3 Kd6 4. Kc3 Kc6 5. Kd3 Kd6 1/2-1/2
"#;
        let games: Vec<_> = parse_pgn(pgn.as_bytes()).map(|g| g.unwrap()).collect();
        build_datasets_from_games(
            &games,
            &SplitSpec {
                val_fraction: 0.0,
                test_fraction: 0.0,
                ..SplitSpec::default()
            },
        )
    }

    #[test]
    fn weight_pair_matches_closed_form() {
        assert_eq!(weight_pair(4.0).unwrap(), (2.0, 0.5));
        assert_eq!(weight_pair(10.0).unwrap(), (2.5, 0.25));
        assert_eq!(weight_pair(1.0).unwrap(), (1.0, 1.0));
        assert!(weight_pair(0.5).is_err());
        // Mean weight is 1 under equal thirds for any a.
        for a in [1.0, 2.0, 4.0, 7.5, 10.0] {
            let (m, o) = weight_pair(a).unwrap();
            assert!(((m + 2.0 * o) / 3.0 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn weighted_loss_arithmetic() {
        let sets = toy_sets();
        let net = Network::<f32>::seeded(8, 1);
        let lw = LossWeights::default();
        let s0 = &sets.train.samples[0].data;
        let s1 = &sets.train.samples[1].data;
        let l0 = f64::from(net.loss(s0, &lw));
        let l1 = f64::from(net.loss(s1, &lw));
        let got = weighted_loss(&net, &[(s0, 2.0), (s1, 0.5)], &lw).unwrap();
        assert!((got - (2.0 * l0 + 0.5 * l1) / 2.0).abs() < 1e-12);
        // Unit weights equal the plain mean.
        let plain = weighted_loss(&net, &[(s0, 1.0), (s1, 1.0)], &lw).unwrap();
        assert!((plain - (l0 + l1) / 2.0).abs() < 1e-12);
        assert!(weighted_loss(&net, &[], &lw).is_err());
    }

    #[test]
    fn spike_rule_threshold_sides() {
        let mut t = Trainer::new(Network::seeded(4, 1), TrainRunConfig::default());
        t.observe_validation(1.0);
        let best = t.best.clone().unwrap();
        // Perturb, then observe a loss just under the threshold.
        t.net.params[0] += 10.0;
        let perturbed = t.net.params[0];
        t.observe_validation(1.49);
        assert_eq!(t.net.params[0], perturbed, "1.49 must not revert");
        t.observe_validation(1.5);
        assert_eq!(t.net.params[0], best.params[0], "1.5 must revert");
        assert!(t
            .log
            .events
            .iter()
            .any(|e| matches!(e, LogEvent::SpikeRevert { .. })));
    }

    #[test]
    fn best_val_loss_is_monotone_across_checkpoints() {
        let sets = toy_sets();
        let mut cfg = TrainRunConfig {
            epochs: 3,
            eval_cadence: 1,
            hidden: 8,
            max_lr: 0.02,
            ..TrainRunConfig::default()
        };
        cfg.batch_size = 8;
        let mut t = Trainer::new(Network::seeded(cfg.hidden, cfg.seed), cfg);
        let w = weighted(&all_refs(&sets.train));
        t.run(&w, &w).unwrap();
        let mut last = f64::INFINITY;
        for (_, v) in t.log.checkpoints() {
            assert!(*v <= last);
            last = *v;
        }
        assert!(t.best.is_some());
    }

    #[test]
    fn weighted_with_a1_equals_regular_trajectory() {
        let sets = toy_sets();
        let base = TrainRunConfig {
            epochs: 1,
            eval_cadence: 4,
            hidden: 8,
            max_lr: 0.02,
            batch_size: 8,
            ..TrainRunConfig::default()
        };
        let reg = train(
            &sets,
            &TrainRunConfig {
                method: TrainMethod::Regular,
                ..base.clone()
            },
        )
        .unwrap()
        .0;
        let t3 = train(
            &sets,
            &TrainRunConfig {
                method: TrainMethod::Weighted,
                a_factor: 1.0,
                ..base
            },
        )
        .unwrap()
        .0;
        let reg_net = match reg.expert(GamePhase::Opening) {
            Evaluator::Network(n) => n,
            _ => unreachable!(),
        };
        for phase in PHASES {
            match t3.expert(phase) {
                Evaluator::Network(n) => assert_eq!(n.params, reg_net.params),
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn staged_fine_tunes_start_from_general_best() {
        let sets = toy_sets();
        let cfg = TrainRunConfig {
            method: TrainMethod::Staged,
            epochs: 1,
            eval_cadence: 2,
            hidden: 8,
            max_lr: 0.02,
            batch_size: 8,
            ..TrainRunConfig::default()
        };
        let (_, log) = train(&sets, &cfg).unwrap();
        // The general run's last checkpoint hash must equal every
        // fine-tune stage's from_hash.
        let stage_hashes: Vec<&String> = log
            .events
            .iter()
            .filter_map(|e| match e {
                LogEvent::StageStart { stage, from_hash } if stage.starts_with("fine-tune") => {
                    Some(from_hash)
                }
                _ => None,
            })
            .collect();
        assert_eq!(stage_hashes.len(), 3);
        let first_stage_pos = log
            .events
            .iter()
            .position(|e| matches!(e, LogEvent::StageStart { .. }))
            .unwrap();
        let general_best = log.events[..first_stage_pos]
            .iter()
            .filter_map(|e| match e {
                LogEvent::Checkpoint { val_loss, param_hash, .. } => {
                    Some((val_loss, param_hash))
                }
                _ => None,
            })
            .min_by(|a, b| a.0.total_cmp(b.0))
            .unwrap();
        for h in stage_hashes {
            assert_eq!(h, general_best.1);
        }
    }

    #[test]
    fn determinism_under_seed() {
        let sets = toy_sets();
        let cfg = TrainRunConfig {
            epochs: 1,
            hidden: 8,
            max_lr: 0.02,
            batch_size: 8,
            ..TrainRunConfig::default()
        };
        let a = train(&sets, &cfg).unwrap().0;
        let b = train(&sets, &cfg).unwrap().0;
        assert!(a
            .expert(GamePhase::Opening)
            .same_as(b.expert(GamePhase::Opening)));
    }

    #[test]
    fn empty_phase_dataset_rejected() {
        let sets = SplitDatasets::default();
        let cfg = TrainRunConfig::default();
        assert!(matches!(
            train(&sets, &cfg),
            Err(TrainError::EmptyDataset(..))
        ));
    }
}
