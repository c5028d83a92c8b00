//! `phasemix` binary: UCI engine by default, toolkit subcommands
//! otherwise. Every subcommand accepts `--seed` and `--config <toml>`;
//! command-line flags override values from the config file.
//!
//! Exit codes: 0 ok, 2 usage error, 3 data error, 4 engine failure.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use phasemix::arena::{
    ablation_bundle, match_pgn, play_match, read_epd, AdjudicationRules, EngineConfig,
    MatchConfig, MatchSummary,
};
use phasemix::board::{PgnReader, Position};
use phasemix::experts::{load_model_dir, Evaluator, Handcrafted, LoadedModel};
use phasemix::phase::{segment_game, GamePhase};
use phasemix::search::{EvalRouter, SearchConfig};
use phasemix::training::{
    build_datasets, load_datasets, save_datasets, selfplay_rl, train, SelfplayConfig,
    SelfplayMode, SplitSpec, TrainMethod, TrainRunConfig,
};

#[derive(Parser)]
#[command(name = "phasemix", version, about = "Phase-aware chess engine and toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Option<Cmd>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build training datasets from PGN files.
    BuildData(BuildDataArgs),
    /// Train expert models from a built dataset.
    Train(TrainArgs),
    /// Reinforcement-learning self-play loop.
    Selfplay(SelfplayArgs),
    /// Play a head-to-head engine match.
    Match(MatchArgs),
    /// Match a bundle with some experts replaced by a baseline.
    Ablation(AblationArgs),
    /// Per-move phase distribution over a PGN corpus, as CSV.
    PhaseStats(PhaseStatsArgs),
    /// Count leaf nodes of the move-generation tree.
    Perft(PerftArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Seed for all stochastic choices in this command.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// TOML config file; explicit flags take precedence over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct BuildDataArgs {
    #[command(flatten)]
    common: Common,
    /// Input PGN files.
    #[arg(long, required = true, num_args = 1..)]
    pgn: Vec<PathBuf>,
    /// Output dataset directory.
    #[arg(long)]
    out: PathBuf,
    /// Months (YYYY.MM) routed to the validation split.
    #[arg(long = "val-month")]
    val_months: Vec<String>,
    /// Months (YYYY.MM) routed to the test split.
    #[arg(long = "test-month")]
    test_months: Vec<String>,
    /// Fraction of games drawn into validation when no months are given.
    #[arg(long)]
    val_fraction: Option<f64>,
    /// Fraction of games drawn into test when no months are given.
    #[arg(long)]
    test_fraction: Option<f64>,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    common: Common,
    /// Dataset directory produced by build-data.
    #[arg(long)]
    data: PathBuf,
    /// Output directory for the model and report.
    #[arg(long)]
    out: PathBuf,
    /// regular | separated | staged | staged-sequential | weighted
    #[arg(long)]
    method: Option<String>,
    /// Main-phase weighting factor for the weighted method.
    #[arg(long)]
    a_factor: Option<f64>,
    #[arg(long)]
    hidden: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    eval_cadence: Option<usize>,
    #[arg(long)]
    max_lr: Option<f64>,
}

#[derive(Args)]
struct SelfplayArgs {
    #[command(flatten)]
    common: Common,
    /// Output directory for the final model and report.
    #[arg(long)]
    out: PathBuf,
    /// classical | mixture-separated | mixture-staged
    #[arg(long)]
    mode: Option<String>,
    /// Start from this model directory instead of random weights.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    updates: Option<usize>,
    #[arg(long)]
    games_per_update: Option<usize>,
    #[arg(long)]
    nodes: Option<u64>,
    #[arg(long)]
    hidden: Option<usize>,
    #[arg(long)]
    max_game_plies: Option<usize>,
}

#[derive(Args)]
struct MatchArgs {
    #[command(flatten)]
    common: Common,
    /// Engine A: "handcrafted" or a model directory.
    #[arg(long)]
    engine_a: String,
    /// Engine B: "handcrafted" or a model directory.
    #[arg(long)]
    engine_b: String,
    /// EPD opening suite.
    #[arg(long)]
    openings: PathBuf,
    /// Output directory for summary.json and games.pgn.
    #[arg(long)]
    out: PathBuf,
    /// Opening pairs to play (two games each, colors swapped).
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long)]
    nodes: Option<u64>,
    #[arg(long)]
    concurrency: Option<usize>,
    #[arg(long)]
    max_game_plies: Option<usize>,
}

#[derive(Args)]
struct AblationArgs {
    #[command(flatten)]
    common: Common,
    /// Bundle directory whose experts are under test.
    #[arg(long)]
    model: PathBuf,
    /// Baseline filling disabled slots and playing the other side;
    /// "handcrafted" or a model directory.
    #[arg(long, default_value = "handcrafted")]
    baseline: String,
    /// Comma-separated phases kept from the bundle
    /// (opening,middlegame,endgame).
    #[arg(long)]
    phases: Option<String>,
    #[arg(long)]
    openings: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long)]
    nodes: Option<u64>,
    #[arg(long)]
    concurrency: Option<usize>,
    #[arg(long)]
    max_game_plies: Option<usize>,
}

#[derive(Args)]
struct PhaseStatsArgs {
    #[command(flatten)]
    common: Common,
    /// Input PGN file.
    #[arg(long)]
    pgn: PathBuf,
    /// Output CSV file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PerftArgs {
    #[command(flatten)]
    common: Common,
    /// Position as FEN, or "startpos".
    #[arg(long, default_value = "startpos")]
    fen: String,
    #[arg(long)]
    depth: Option<u32>,
}

enum CliError {
    Usage(String),
    Data(String),
    Engine(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Engine(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Engine(m) => m,
        }
    }
}

fn data_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Data(e.to_string())
}

/// Values from `--config`, consulted only for arguments the command
/// line left unset.
struct FileCfg(toml::Table);

impl FileCfg {
    fn load(path: Option<&Path>) -> Result<FileCfg, CliError> {
        let Some(path) = path else {
            return Ok(FileCfg(toml::Table::new()));
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let table = text
            .parse::<toml::Table>()
            .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))?;
        Ok(FileCfg(table))
    }

    fn u64(&self, key: &str) -> Option<u64> {
        self.0.get(key).and_then(|v| v.as_integer()).map(|v| v as u64)
    }

    fn usize(&self, key: &str) -> Option<usize> {
        self.u64(key).map(|v| v as usize)
    }

    fn f64(&self, key: &str) -> Option<f64> {
        self.0.get(key).and_then(toml::Value::as_float)
    }

    fn string(&self, key: &str) -> Option<String> {
        self.0.get(key).and_then(|v| v.as_str()).map(str::to_string)
    }

    fn strings(&self, key: &str) -> Option<Vec<String>> {
        self.0.get(key).and_then(|v| v.as_array()).map(|a| {
            a.iter()
                .filter_map(|v| v.as_str())
                .map(str::to_string)
                .collect()
        })
    }
}

fn seed_of(common: &Common, cfg: &FileCfg) -> u64 {
    common.seed.or_else(|| cfg.u64("seed")).unwrap_or(0)
}

fn parse_position(text: &str) -> Result<Position, CliError> {
    if text == "startpos" {
        Ok(Position::start())
    } else {
        Position::from_fen(text).map_err(|e| CliError::Usage(format!("bad FEN: {e}")))
    }
}

fn parse_phase(name: &str) -> Result<GamePhase, CliError> {
    match name.trim() {
        "opening" => Ok(GamePhase::Opening),
        "middlegame" => Ok(GamePhase::Middlegame),
        "endgame" => Ok(GamePhase::Endgame),
        other => Err(CliError::Usage(format!("unknown phase '{other}'"))),
    }
}

/// "handcrafted" or a model directory (bundle.json present means the
/// mixture engine, otherwise a single model).
fn resolve_engine(spec: &str) -> Result<(String, EvalRouter), CliError> {
    if spec == "handcrafted" {
        return Ok((
            "handcrafted".into(),
            EvalRouter::Single(Evaluator::Handcrafted(Handcrafted::baseline())),
        ));
    }
    let dir = Path::new(spec);
    let name = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| spec.to_string());
    match load_model_dir(dir) {
        Ok(LoadedModel::Bundle(b)) => Ok((name, EvalRouter::Bundle(b))),
        Ok(LoadedModel::Single(m)) => Ok((name, EvalRouter::Single(m))),
        Err(e) => Err(CliError::Engine(format!("cannot load engine '{spec}': {e}"))),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(data_err)?;
    std::fs::write(path, text + "\n").map_err(data_err)
}

#[derive(Serialize)]
struct SplitCounts {
    total: usize,
    opening: usize,
    middlegame: usize,
    endgame: usize,
}

#[derive(Serialize)]
struct BuildDataReport {
    format_version: u32,
    seed: u64,
    train: SplitCounts,
    val: SplitCounts,
    test: SplitCounts,
}

fn split_counts(set: &phasemix::training::PhaseDatasets) -> SplitCounts {
    SplitCounts {
        total: set.samples.len(),
        opening: set.phase_len(GamePhase::Opening),
        middlegame: set.phase_len(GamePhase::Middlegame),
        endgame: set.phase_len(GamePhase::Endgame),
    }
}

fn cmd_build_data(args: &BuildDataArgs) -> Result<(), CliError> {
    let cfg = FileCfg::load(args.common.config.as_deref())?;
    let spec = SplitSpec {
        val_months: if args.val_months.is_empty() {
            cfg.strings("val_months").unwrap_or_default()
        } else {
            args.val_months.clone()
        },
        test_months: if args.test_months.is_empty() {
            cfg.strings("test_months").unwrap_or_default()
        } else {
            args.test_months.clone()
        },
        val_fraction: args
            .val_fraction
            .or_else(|| cfg.f64("val_fraction"))
            .unwrap_or(0.1),
        test_fraction: args
            .test_fraction
            .or_else(|| cfg.f64("test_fraction"))
            .unwrap_or(0.1),
        seed: seed_of(&args.common, &cfg),
    };
    let paths: Vec<&Path> = args.pgn.iter().map(PathBuf::as_path).collect();
    let sets = build_datasets(&paths, &spec).map_err(data_err)?;
    save_datasets(&sets, &args.out).map_err(data_err)?;
    let report = BuildDataReport {
        format_version: 1,
        seed: spec.seed,
        train: split_counts(&sets.train),
        val: split_counts(&sets.val),
        test: split_counts(&sets.test),
    };
    write_json(&args.out.join("report.json"), &report)?;
    println!(
        "built {} train / {} val / {} test samples into {}",
        report.train.total,
        report.val.total,
        report.test.total,
        args.out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct TrainReport {
    format_version: u32,
    method: String,
    seed: u64,
    checkpoints: usize,
    spike_reverts: usize,
    best_val_loss: Option<f64>,
}

fn cmd_train(args: &TrainArgs) -> Result<(), CliError> {
    let cfg = FileCfg::load(args.common.config.as_deref())?;
    let method_name = args
        .method
        .clone()
        .or_else(|| cfg.string("method"))
        .unwrap_or_else(|| "regular".into());
    let method = TrainMethod::parse(&method_name)
        .ok_or_else(|| CliError::Usage(format!("unknown method '{method_name}'")))?;
    let defaults = TrainRunConfig::default();
    let run = TrainRunConfig {
        method,
        a_factor: args.a_factor.or_else(|| cfg.f64("a_factor")).unwrap_or(defaults.a_factor),
        batch_size: args
            .batch_size
            .or_else(|| cfg.usize("batch_size"))
            .unwrap_or(defaults.batch_size),
        epochs: args.epochs.or_else(|| cfg.usize("epochs")).unwrap_or(defaults.epochs),
        eval_cadence: args
            .eval_cadence
            .or_else(|| cfg.usize("eval_cadence"))
            .unwrap_or(defaults.eval_cadence),
        seed: seed_of(&args.common, &cfg),
        hidden: args.hidden.or_else(|| cfg.usize("hidden")).unwrap_or(defaults.hidden),
        max_lr: args.max_lr.or_else(|| cfg.f64("max_lr")).unwrap_or(defaults.max_lr),
        ..defaults
    };
    let sets = load_datasets(&args.data).map_err(data_err)?;
    let (bundle, log) = train(&sets, &run).map_err(|e| match e {
        phasemix::training::TrainError::BadAFactor(_) => CliError::Usage(e.to_string()),
        other => CliError::Data(other.to_string()),
    })?;
    std::fs::create_dir_all(&args.out).map_err(data_err)?;
    phasemix::experts::save_bundle(&bundle, &args.out.join("model")).map_err(data_err)?;
    let best_val_loss = log
        .checkpoints()
        .map(|(_, loss)| *loss)
        .fold(None, |acc: Option<f64>, l| Some(acc.map_or(l, |a| a.min(l))));
    let report = TrainReport {
        format_version: 1,
        method: run.method.name().into(),
        seed: run.seed,
        checkpoints: log.checkpoints().count(),
        spike_reverts: log
            .events
            .iter()
            .filter(|e| matches!(e, phasemix::training::LogEvent::SpikeRevert { .. }))
            .count(),
        best_val_loss,
    };
    write_json(&args.out.join("report.json"), &report)?;
    println!(
        "trained {} model into {} (best val loss {:?})",
        report.method,
        args.out.display(),
        report.best_val_loss
    );
    Ok(())
}

#[derive(Serialize)]
struct SelfplayReportJson {
    format_version: u32,
    mode: String,
    seed: u64,
    games_played: usize,
    buffer_len: usize,
    update_losses: Vec<f64>,
}

fn cmd_selfplay(args: &SelfplayArgs) -> Result<(), CliError> {
    let cfg = FileCfg::load(args.common.config.as_deref())?;
    let mode_name = args
        .mode
        .clone()
        .or_else(|| cfg.string("mode"))
        .unwrap_or_else(|| "classical".into());
    let mode = SelfplayMode::parse(&mode_name)
        .ok_or_else(|| CliError::Usage(format!("unknown mode '{mode_name}'")))?;
    let defaults = SelfplayConfig::default();
    let run = SelfplayConfig {
        mode,
        updates: args.updates.or_else(|| cfg.usize("updates")).unwrap_or(defaults.updates),
        games_per_update: args
            .games_per_update
            .or_else(|| cfg.usize("games_per_update"))
            .unwrap_or(defaults.games_per_update),
        nodes_per_move: args.nodes.or_else(|| cfg.u64("nodes")).unwrap_or(defaults.nodes_per_move),
        seed: seed_of(&args.common, &cfg),
        hidden: args.hidden.or_else(|| cfg.usize("hidden")).unwrap_or(defaults.hidden),
        max_game_plies: args
            .max_game_plies
            .or_else(|| cfg.usize("max_game_plies"))
            .unwrap_or(defaults.max_game_plies),
        ..defaults
    };
    let initial = match &args.model {
        None => None,
        Some(dir) => match load_model_dir(dir).map_err(|e| CliError::Engine(e.to_string()))? {
            LoadedModel::Bundle(b) => Some(b),
            LoadedModel::Single(m) => Some(phasemix::experts::ExpertBundle::uniform(
                m,
                phasemix::experts::BundleMetadata::new(run.mode.name(), "selfplay-init"),
            )),
        },
    };
    let report = selfplay_rl(initial, &run).map_err(data_err)?;
    std::fs::create_dir_all(&args.out).map_err(data_err)?;
    let last = report.bundles.last().expect("at least the initial bundle");
    phasemix::experts::save_bundle(last, &args.out.join("model")).map_err(data_err)?;
    let first = report.bundles.first().expect("initial bundle");
    phasemix::experts::save_bundle(first, &args.out.join("model_v0")).map_err(data_err)?;
    let json = SelfplayReportJson {
        format_version: 1,
        mode: run.mode.name().into(),
        seed: run.seed,
        games_played: report.games_played,
        buffer_len: report.buffer_len,
        update_losses: report.update_losses.clone(),
    };
    write_json(&args.out.join("report.json"), &json)?;
    println!(
        "self-play '{}' played {} games over {} updates into {}",
        json.mode,
        json.games_played,
        json.update_losses.len(),
        args.out.display()
    );
    Ok(())
}

struct MatchKnobs {
    pairs: usize,
    nodes: u64,
    concurrency: usize,
    max_game_plies: usize,
    seed: u64,
}

fn run_match(
    engine_a: EngineConfig,
    engine_b: EngineConfig,
    openings: &Path,
    out: &Path,
    knobs: &MatchKnobs,
) -> Result<(), CliError> {
    let suite = read_epd(openings).map_err(data_err)?;
    let cfg = MatchConfig {
        engine_a,
        engine_b,
        openings: knobs.pairs,
        rules: AdjudicationRules::default(),
        max_game_plies: knobs.max_game_plies,
        concurrency: knobs.concurrency,
        seed: knobs.seed,
    };
    let result = play_match(&cfg, &suite).map_err(|e| CliError::Engine(e.to_string()))?;
    std::fs::create_dir_all(out).map_err(data_err)?;
    let summary = MatchSummary::new(&cfg, &result);
    write_json(&out.join("summary.json"), &summary)?;
    std::fs::write(out.join("games.pgn"), match_pgn(&cfg, &result)).map_err(data_err)?;
    println!(
        "{} vs {}: +{} ={} -{} (score {:.3}, elo {:+.1} ± {:.1})",
        summary.engine_a,
        summary.engine_b,
        summary.wins,
        summary.draws,
        summary.losses,
        summary.score,
        summary.elo,
        summary.elo_half_width
    );
    Ok(())
}

fn match_knobs(
    common: &Common,
    cfg: &FileCfg,
    pairs: Option<usize>,
    nodes: Option<u64>,
    concurrency: Option<usize>,
    max_game_plies: Option<usize>,
) -> MatchKnobs {
    MatchKnobs {
        pairs: pairs.or_else(|| cfg.usize("pairs")).unwrap_or(10),
        nodes: nodes.or_else(|| cfg.u64("nodes")).unwrap_or(100),
        concurrency: concurrency.or_else(|| cfg.usize("concurrency")).unwrap_or(1),
        max_game_plies: max_game_plies
            .or_else(|| cfg.usize("max_game_plies"))
            .unwrap_or(300),
        seed: seed_of(common, cfg),
    }
}

fn engine_config(name: String, router: EvalRouter, nodes: u64) -> EngineConfig {
    EngineConfig {
        name,
        router,
        search: SearchConfig {
            nodes: Some(nodes),
            ..SearchConfig::default()
        },
    }
}

fn cmd_match(args: &MatchArgs) -> Result<(), CliError> {
    let cfg = FileCfg::load(args.common.config.as_deref())?;
    let knobs = match_knobs(
        &args.common,
        &cfg,
        args.pairs,
        args.nodes,
        args.concurrency,
        args.max_game_plies,
    );
    let (name_a, router_a) = resolve_engine(&args.engine_a)?;
    let (name_b, router_b) = resolve_engine(&args.engine_b)?;
    run_match(
        engine_config(name_a, router_a, knobs.nodes),
        engine_config(name_b, router_b, knobs.nodes),
        &args.openings,
        &args.out,
        &knobs,
    )
}

fn cmd_ablation(args: &AblationArgs) -> Result<(), CliError> {
    let cfg = FileCfg::load(args.common.config.as_deref())?;
    let knobs = match_knobs(
        &args.common,
        &cfg,
        args.pairs,
        args.nodes,
        args.concurrency,
        args.max_game_plies,
    );
    let bundle = match load_model_dir(&args.model)
        .map_err(|e| CliError::Engine(e.to_string()))?
    {
        LoadedModel::Bundle(b) => b,
        LoadedModel::Single(_) => {
            return Err(CliError::Usage(format!(
                "{} holds a single model, not a bundle",
                args.model.display()
            )))
        }
    };
    let (baseline_name, baseline_router) = resolve_engine(&args.baseline)?;
    let baseline_eval = match &baseline_router {
        EvalRouter::Single(e) => e.clone(),
        EvalRouter::Bundle(_) => {
            return Err(CliError::Usage(
                "ablation baseline must be a single model or handcrafted".into(),
            ))
        }
    };
    let phases_text = args
        .phases
        .clone()
        .or_else(|| cfg.string("phases"))
        .unwrap_or_default();
    let mut enabled = Vec::new();
    for part in phases_text.split(',').filter(|p| !p.trim().is_empty()) {
        enabled.push(parse_phase(part)?);
    }
    let ablated = ablation_bundle(&bundle, &baseline_eval, &enabled);
    let enabled_names: Vec<&str> = enabled.iter().map(|p| p.name()).collect();
    let name_a = format!("ablated[{}]", enabled_names.join("+"));
    run_match(
        engine_config(name_a, EvalRouter::Bundle(ablated), knobs.nodes),
        engine_config(baseline_name, baseline_router, knobs.nodes),
        &args.openings,
        &args.out,
        &knobs,
    )
}

fn cmd_phase_stats(args: &PhaseStatsArgs) -> Result<(), CliError> {
    let file = std::fs::File::open(&args.pgn).map_err(data_err)?;
    let mut counts: BTreeMap<u32, [u64; 3]> = BTreeMap::new();
    let mut games = 0usize;
    for item in PgnReader::new(std::io::BufReader::new(file)) {
        let Ok(record) = item else { continue };
        let seg = segment_game(&record);
        for (ply, phase) in seg.labels.iter().enumerate() {
            let full_move = (ply / 2 + 1) as u32;
            counts.entry(full_move).or_default()[phase.index()] += 1;
        }
        games += 1;
    }
    if games == 0 {
        return Err(CliError::Data(format!(
            "no parseable games in {}",
            args.pgn.display()
        )));
    }
    let mut csv = String::from("move,opening,middlegame,endgame\n");
    for (mv, row) in &counts {
        csv.push_str(&format!("{mv},{},{},{}\n", row[0], row[1], row[2]));
    }
    match &args.out {
        Some(path) => std::fs::write(path, csv).map_err(data_err)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_perft(args: &PerftArgs) -> Result<(), CliError> {
    let cfg = FileCfg::load(args.common.config.as_deref())?;
    let fen = if args.fen == "startpos" {
        cfg.string("fen").unwrap_or_else(|| args.fen.clone())
    } else {
        args.fen.clone()
    };
    let depth = args.depth.or_else(|| cfg.u64("depth").map(|d| d as u32)).unwrap_or(5);
    let position = parse_position(&fen)?;
    println!("{}", position.perft(depth));
    Ok(())
}

fn run(cmd: &Cmd) -> Result<(), CliError> {
    match cmd {
        Cmd::BuildData(a) => cmd_build_data(a),
        Cmd::Train(a) => cmd_train(a),
        Cmd::Selfplay(a) => cmd_selfplay(a),
        Cmd::Match(a) => cmd_match(a),
        Cmd::Ablation(a) => cmd_ablation(a),
        Cmd::PhaseStats(a) => cmd_phase_stats(a),
        Cmd::Perft(a) => cmd_perft(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(cmd) = &cli.cmd else {
        let stdin = std::io::stdin();
        phasemix::uci::uci_loop(stdin.lock(), std::io::stdout());
        return ExitCode::SUCCESS;
    };
    match run(cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
