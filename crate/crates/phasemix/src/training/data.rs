//! Supervised datasets from PGN: per-position samples labeled with the
//! game phase, split train/val/test by source month, and stored as
//! sparse binary chunks next to a JSON manifest.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::board::{Color, GameRecord, GameResult, PgnReader, Position};
use crate::encoder::{self, PlaneStack, INPUT_DIM};
use crate::experts::LossSample;
use crate::phase::{segment_positions, GamePhase};

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt sample file: {0}")]
    Corrupt(String),
    #[error("bad manifest: {0}")]
    Manifest(#[from] serde_json::Error),
}

/// One supervised position: encoded planes, targets, phase label, and
/// the (initially unit) loss weight.
#[derive(Debug, Clone)]
pub struct TrainingSample {
    pub data: LossSample<f32>,
    pub phase: GamePhase,
    pub weight: f64,
}

impl TrainingSample {
    /// Targets from a played game: one-hot policy over the played move,
    /// result WDL from the mover's side, and remaining plies.
    pub fn from_game_position(
        p: &Position,
        played: usize,
        result: GameResult,
        plys_left: f64,
        phase: GamePhase,
    ) -> TrainingSample {
        let wdl = wdl_target(p.side_to_move(), result);
        TrainingSample {
            data: crate::experts::make_sample(p, &[(played, 1.0)], wdl, plys_left),
            phase,
            weight: 1.0,
        }
    }
}

/// WDL one-hot from the mover's perspective.
pub(crate) fn wdl_target(side: Color, result: GameResult) -> [f64; 3] {
    match (result, side) {
        (GameResult::WhiteWin, Color::White) | (GameResult::BlackWin, Color::Black) => {
            [1.0, 0.0, 0.0]
        }
        (GameResult::WhiteWin, Color::Black) | (GameResult::BlackWin, Color::White) => {
            [0.0, 0.0, 1.0]
        }
        (GameResult::Draw, _) => [0.0, 1.0, 0.0],
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub games_read: usize,
    pub games_skipped_short: usize,
    pub games_skipped_unparseable: usize,
    /// Sample counts keyed by phase name.
    pub counts: BTreeMap<String, usize>,
    /// Source months ("YYYY.MM") with game counts.
    pub months: BTreeMap<String, usize>,
    /// Set when a phase collection came out empty.
    pub empty_phases: Vec<String>,
}

/// The no-phases pool plus per-phase index views. The three phase sets
/// partition the pool by construction; tests verify the property rather
/// than trust it.
#[derive(Debug, Clone, Default)]
pub struct PhaseDatasets {
    pub samples: Vec<TrainingSample>,
    pub by_phase: [Vec<usize>; 3],
    pub manifest: DatasetManifest,
}

impl PhaseDatasets {
    pub fn no_phases(&self) -> &[TrainingSample] {
        &self.samples
    }

    pub fn phase_samples(&self, phase: GamePhase) -> Vec<&TrainingSample> {
        self.by_phase[phase as usize]
            .iter()
            .map(|&i| &self.samples[i])
            .collect()
    }

    pub fn phase_len(&self, phase: GamePhase) -> usize {
        self.by_phase[phase as usize].len()
    }

    fn push(&mut self, sample: TrainingSample) {
        let phase = sample.phase;
        self.by_phase[phase as usize].push(self.samples.len());
        self.samples.push(sample);
    }

    fn finish_manifest(&mut self) {
        let m = &mut self.manifest;
        m.counts.insert("no_phases".into(), self.samples.len());
        for phase in [GamePhase::Opening, GamePhase::Middlegame, GamePhase::Endgame] {
            let n = self.by_phase[phase as usize].len();
            m.counts.insert(phase.name().into(), n);
            if n == 0 {
                m.empty_phases.push(phase.name().into());
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SplitDatasets {
    pub train: PhaseDatasets,
    pub val: PhaseDatasets,
    pub test: PhaseDatasets,
}

/// How games are assigned to train/val/test: by source month when the
/// month lists are given, otherwise by seeded fractions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitSpec {
    pub val_months: Vec<String>,
    pub test_months: Vec<String>,
    pub val_fraction: f64,
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> SplitSpec {
        SplitSpec {
            val_months: Vec::new(),
            test_months: Vec::new(),
            val_fraction: 0.1,
            test_fraction: 0.1,
            seed: 0,
        }
    }
}

enum Split {
    Train,
    Val,
    Test,
}

fn game_month(g: &GameRecord) -> Option<String> {
    let date = g.tag("Date")?;
    let mut parts = date.split('.');
    let year = parts.next()?;
    let month = parts.next()?;
    if year.len() == 4 && month.len() == 2 && year != "????" && month != "??" {
        Some(format!("{year}.{month}"))
    } else {
        None
    }
}

fn assign_split(month: Option<&str>, spec: &SplitSpec, rng: &mut ChaCha8Rng) -> Split {
    if let Some(m) = month {
        if spec.test_months.iter().any(|x| x == m) {
            return Split::Test;
        }
        if spec.val_months.iter().any(|x| x == m) {
            return Split::Val;
        }
        if !spec.val_months.is_empty() || !spec.test_months.is_empty() {
            return Split::Train;
        }
    }
    let r: f64 = rng.gen();
    if r < spec.test_fraction {
        Split::Test
    } else if r < spec.test_fraction + spec.val_fraction {
        Split::Val
    } else {
        Split::Train
    }
}

pub fn build_datasets(pgn_paths: &[&Path], spec: &SplitSpec) -> Result<SplitDatasets, DataError> {
    let mut games = Vec::new();
    let mut unparseable = 0usize;
    for path in pgn_paths {
        let file = File::open(path)?;
        for item in PgnReader::new(BufReader::new(file)) {
            match item {
                Ok(g) => games.push(g),
                Err(_) => unparseable += 1,
            }
        }
    }
    let mut out = build_datasets_from_games(&games, spec);
    for set in [&mut out.train, &mut out.val, &mut out.test] {
        set.manifest.games_skipped_unparseable = unparseable;
    }
    Ok(out)
}

/// Core builder over already-parsed games; the PGN file front end and the
/// self-play loop both funnel through here.
pub fn build_datasets_from_games(games: &[GameRecord], spec: &SplitSpec) -> SplitDatasets {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = SplitDatasets::default();
    for g in games {
        let month = game_month(g);
        // The split draw happens before the length filter so that
        // filtering cannot shift later games between splits.
        let split = assign_split(month.as_deref(), spec, &mut rng);
        let set = match split {
            Split::Train => &mut out.train,
            Split::Val => &mut out.val,
            Split::Test => &mut out.test,
        };
        set.manifest.games_read += 1;
        if let Some(m) = &month {
            *set.manifest.months.entry(m.clone()).or_insert(0) += 1;
        }
        if g.full_moves() < 5 {
            set.manifest.games_skipped_short += 1;
            continue;
        }
        let positions = g.positions();
        let seg = segment_positions(&positions);
        let total = g.moves.len();
        for (i, mv) in g.moves.iter().enumerate() {
            let p = &positions[i];
            let played = encoder::encode_policy(mv, p);
            let plys_left = (total - i) as f64;
            set.push(TrainingSample::from_game_position(
                p,
                played,
                g.result,
                plys_left,
                seg.labels[i],
            ));
        }
    }
    for set in [&mut out.train, &mut out.val, &mut out.test] {
        set.finish_manifest();
    }
    out
}

// --- Binary sample storage -------------------------------------------------
//
// One file per split: magic, sample count, then per sample a small header
// (phase, weight, targets) followed by the nonzero plane cells and the
// legal-index/policy-target table. Cells are stored sparsely; the stacks
// are mostly zeros.

const SAMPLE_MAGIC: &[u8; 4] = b"PXS1";

fn write_u32(w: &mut impl Write, v: u32) -> std::io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn write_f32(w: &mut impl Write, v: f32) -> std::io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn read_u32(r: &mut impl Read) -> std::io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f32(r: &mut impl Read) -> std::io::Result<f32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(f32::from_le_bytes(b))
}

pub fn save_datasets(sets: &SplitDatasets, dir: &Path) -> Result<(), DataError> {
    std::fs::create_dir_all(dir)?;
    let mut manifest = serde_json::Map::new();
    for (name, set) in [
        ("train", &sets.train),
        ("val", &sets.val),
        ("test", &sets.test),
    ] {
        let file = File::create(dir.join(format!("{name}.samples")))?;
        let mut w = BufWriter::new(file);
        w.write_all(SAMPLE_MAGIC)?;
        write_u32(&mut w, set.samples.len() as u32)?;
        for s in &set.samples {
            w.write_all(&[s.phase as u8])?;
            w.write_all(&(s.weight).to_le_bytes())?;
            for v in &s.data.target_wdl {
                write_f32(&mut w, *v)?;
            }
            write_f32(&mut w, s.data.target_plys)?;
            let cells: Vec<(u32, f32)> = s
                .data
                .planes
                .as_slice()
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, v)| (i as u32, *v))
                .collect();
            write_u32(&mut w, cells.len() as u32)?;
            for (i, v) in cells {
                write_u32(&mut w, i)?;
                write_f32(&mut w, v)?;
            }
            write_u32(&mut w, s.data.legal_indices.len() as u32)?;
            for (&idx, &t) in s.data.legal_indices.iter().zip(&s.data.target_policy) {
                write_u32(&mut w, idx as u32)?;
                write_f32(&mut w, t)?;
            }
        }
        manifest.insert(
            name.to_string(),
            serde_json::to_value(&set.manifest)?,
        );
    }
    let mut f = File::create(dir.join("manifest.json"))?;
    serde_json::to_writer_pretty(&mut f, &serde_json::Value::Object(manifest))?;
    f.write_all(b"\n")?;
    Ok(())
}

pub fn load_datasets(dir: &Path) -> Result<SplitDatasets, DataError> {
    let manifest: serde_json::Value =
        serde_json::from_reader(File::open(dir.join("manifest.json"))?)?;
    let mut out = SplitDatasets::default();
    for (name, set) in [
        ("train", &mut out.train),
        ("val", &mut out.val),
        ("test", &mut out.test),
    ] {
        let file = File::open(dir.join(format!("{name}.samples")))?;
        let mut r = BufReader::new(file);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != SAMPLE_MAGIC {
            return Err(DataError::Corrupt(format!("{name}: bad magic")));
        }
        let count = read_u32(&mut r)?;
        for _ in 0..count {
            let mut b = [0u8; 1];
            r.read_exact(&mut b)?;
            let phase = match b[0] {
                0 => GamePhase::Opening,
                1 => GamePhase::Middlegame,
                2 => GamePhase::Endgame,
                x => return Err(DataError::Corrupt(format!("{name}: phase tag {x}"))),
            };
            let mut wb = [0u8; 8];
            r.read_exact(&mut wb)?;
            let weight = f64::from_le_bytes(wb);
            let target_wdl = [read_f32(&mut r)?, read_f32(&mut r)?, read_f32(&mut r)?];
            let target_plys = read_f32(&mut r)?;
            let n_cells = read_u32(&mut r)? as usize;
            let mut planes = PlaneStack::<f32>::zeros();
            for _ in 0..n_cells {
                let i = read_u32(&mut r)? as usize;
                if i >= INPUT_DIM {
                    return Err(DataError::Corrupt(format!("{name}: cell {i}")));
                }
                planes.as_mut_slice()[i] = read_f32(&mut r)?;
            }
            let n_legal = read_u32(&mut r)? as usize;
            let mut legal_indices = Vec::with_capacity(n_legal);
            let mut target_policy = Vec::with_capacity(n_legal);
            for _ in 0..n_legal {
                legal_indices.push(read_u32(&mut r)? as usize);
                target_policy.push(read_f32(&mut r)?);
            }
            set.push(TrainingSample {
                data: LossSample {
                    planes,
                    legal_indices,
                    target_policy,
                    target_wdl,
                    target_plys,
                },
                phase,
                weight,
            });
        }
        if let Some(m) = manifest.get(name) {
            set.manifest = serde_json::from_value(m.clone())?;
        }
    }
    Ok(out)
}
