//! Tournament harness: seeded opening sampling from an EPD suite,
//! color-swapped game pairs, resign/draw adjudication on search scores,
//! and Elo estimation with a trinomial confidence interval.

use std::path::Path;
use std::sync::atomic::AtomicBool;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::board::{Color, GameRecord, GameResult, Move, Outcome, Position};
use crate::search::{search, EvalRouter, SearchConfig};

#[derive(Debug, thiserror::Error)]
pub enum ArenaError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad EPD line {0}: {1}")]
    BadEpd(usize, String),
    #[error("empty opening suite")]
    EmptySuite,
    #[error("engine failed in game {0}: {1}")]
    EngineFailure(usize, String),
}

/// One side of a match: an evaluator (single or bundle) plus its search
/// settings.
#[derive(Clone)]
pub struct EngineConfig {
    pub name: String,
    pub router: EvalRouter,
    pub search: SearchConfig,
}

/// Cutechess-style adjudication rules.
#[derive(Debug, Clone)]
pub struct AdjudicationRules {
    /// Resign when a side's own score is at or below `-resign_score` for
    /// this many consecutive of its own moves.
    pub resign_movecount: u32,
    pub resign_score: i32,
    /// Draw past this full-move number when both sides' scores stay
    /// within `draw_score` for `draw_movecount` consecutive full moves.
    pub draw_movenumber: u32,
    pub draw_movecount: u32,
    pub draw_score: i32,
}

impl Default for AdjudicationRules {
    fn default() -> AdjudicationRules {
        AdjudicationRules {
            resign_movecount: 5,
            resign_score: 600,
            draw_movenumber: 30,
            draw_movecount: 4,
            draw_score: 20,
        }
    }
}

#[derive(Clone)]
pub struct MatchConfig {
    pub engine_a: EngineConfig,
    pub engine_b: EngineConfig,
    /// Openings sampled from the suite; each is played twice with colors
    /// swapped, so the match has 2x this many games.
    pub openings: usize,
    pub rules: AdjudicationRules,
    /// Cap in plies after which an unadjudicated game scores as a draw.
    pub max_game_plies: usize,
    pub concurrency: usize,
    pub seed: u64,
}

/// One finished game with its per-ply scores (from the mover, in
/// value_to_score units) for the PGN comments.
#[derive(Debug, Clone)]
pub struct GameLog {
    pub record: GameRecord,
    pub scores: Vec<i32>,
    /// Which engine had the white pieces.
    pub white_is_a: bool,
    pub termination: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GameScore {
    AWin,
    Draw,
    BWin,
}

#[derive(Clone)]
pub struct MatchResult {
    pub wins: u32,
    pub draws: u32,
    pub losses: u32,
    pub games: Vec<GameLog>,
}

impl MatchResult {
    pub fn total(&self) -> u32 {
        self.wins + self.draws + self.losses
    }

    /// Engine A's score fraction s = (W + D/2) / N.
    pub fn score_fraction(&self) -> f64 {
        (f64::from(self.wins) + f64::from(self.draws) / 2.0) / f64::from(self.total())
    }

    pub fn elo(&self) -> EloEstimate {
        elo_from_counts(self.wins, self.draws, self.losses)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EloEstimate {
    pub elo: f64,
    /// 95% confidence half-width; infinite when s hits 0 or 1.
    pub half_width: f64,
    /// Set when the score was 0 or 1 and the estimate is a bound.
    pub bounded: bool,
}

/// Appendix-style logistic expected score.
pub fn expected_score(r_a: f64, r_b: f64) -> f64 {
    1.0 / (1.0 + 10f64.powf((r_b - r_a) / 400.0))
}

/// Inverse of `expected_score` as a rating difference: the Elo gap at
/// which the expected score equals `s`.
pub fn elo_from_score(s: f64) -> f64 {
    -400.0 * (1.0 / s - 1.0).log10()
}

/// Elo point estimate and 95% CI from W/D/L counts. The score variance
/// uses the trinomial model; the interval is the Elo transform of
/// s +/- 1.96 se, so it is asymmetric like cutechess's.
pub fn elo_from_counts(wins: u32, draws: u32, losses: u32) -> EloEstimate {
    let n = f64::from(wins + draws + losses);
    let s = (f64::from(wins) + f64::from(draws) / 2.0) / n;
    if s <= 0.0 || s >= 1.0 {
        // One-sided evidence: back the score off by half a game and
        // report the transform of that as a bound.
        let s_adj = if s >= 1.0 { (n - 0.5) / n } else { 0.5 / n };
        return EloEstimate {
            elo: elo_from_score(s_adj),
            half_width: f64::INFINITY,
            bounded: true,
        };
    }
    let (pw, pd) = (f64::from(wins) / n, f64::from(draws) / n);
    let var = pw * (1.0 - s).powi(2) + pd * (0.5 - s).powi(2)
        + (f64::from(losses) / n) * (0.0 - s).powi(2);
    let se = (var / n).sqrt();
    let lo = (s - 1.96 * se).clamp(1e-9, 1.0 - 1e-9);
    let hi = (s + 1.96 * se).clamp(1e-9, 1.0 - 1e-9);
    EloEstimate {
        elo: elo_from_score(s),
        half_width: (elo_from_score(hi) - elo_from_score(lo)) / 2.0,
        bounded: false,
    }
}

/// Reads an EPD/FEN opening suite: one position per line, `#` comments
/// and blank lines skipped. EPD operation fields after the four FEN
/// fields are ignored.
pub fn read_epd(path: &Path) -> Result<Vec<Position>, ArenaError> {
    let text = std::fs::read_to_string(path)?;
    parse_epd(&text)
}

pub fn parse_epd(text: &str) -> Result<Vec<Position>, ArenaError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 4 {
            return Err(ArenaError::BadEpd(i + 1, "fewer than 4 fields".into()));
        }
        // EPD: four FEN fields then optional opcodes; synthesize counters.
        let fen = format!(
            "{} {} {} {} 0 1",
            fields[0], fields[1], fields[2], fields[3]
        );
        let p = Position::from_fen(&fen)
            .map_err(|e| ArenaError::BadEpd(i + 1, e.to_string()))?;
        out.push(p);
    }
    if out.is_empty() {
        return Err(ArenaError::EmptySuite);
    }
    Ok(out)
}

/// Seeded uniform sample without replacement; if the suite is smaller
/// than `count` every opening is used once.
pub fn sample_openings(suite: &[Position], count: usize, seed: u64) -> Vec<Position> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = (0..suite.len()).collect();
    idx.shuffle(&mut rng);
    idx.truncate(count.min(suite.len()));
    idx.into_iter().map(|i| suite[i].clone()).collect()
}

struct GameOutcome {
    result: GameResult,
    termination: String,
}

/// Plays one game; `white` moves first from `opening`'s side to move
/// (openings with black to move simply start with `black`'s reply...
/// the white/black naming follows piece color, not move order).
fn play_game(
    opening: &Position,
    white: &EngineConfig,
    black: &EngineConfig,
    rules: &AdjudicationRules,
    max_plies: usize,
    seed: u64,
) -> (GameRecord, Vec<i32>, GameOutcome) {
    let stop = AtomicBool::new(false);
    let mut p = opening.clone();
    let mut moves: Vec<Move> = Vec::new();
    let mut scores: Vec<i32> = Vec::new();
    let mut resign_streak = [0u32; 2]; // indexed by Color
    let mut calm_plies = 0u32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let outcome = loop {
        match p.outcome() {
            Outcome::Ongoing => {}
            o => {
                break GameOutcome {
                    result: GameResult::from_outcome(o).unwrap_or(GameResult::Draw),
                    termination: "terminal".into(),
                }
            }
        }
        if moves.len() >= max_plies {
            break GameOutcome {
                result: GameResult::Draw,
                termination: "max length".into(),
            };
        }
        let engine = match p.side_to_move() {
            Color::White => white,
            Color::Black => black,
        };
        let mut sc = engine.search.clone();
        sc.seed = rng.gen();
        let r = search(&p, engine.router.clone(), &sc, &stop).expect("live position");
        let score = r.score();
        scores.push(score);
        let mover = p.side_to_move();

        // Resign: the mover's own score stays at or below the threshold.
        if score <= -rules.resign_score {
            resign_streak[mover as usize] += 1;
        } else {
            resign_streak[mover as usize] = 0;
        }
        // Draw: both sides calm past the move-number gate.
        if score.abs() <= rules.draw_score {
            calm_plies += 1;
        } else {
            calm_plies = 0;
        }

        moves.push(r.best_move.clone());
        p = p.apply_move_unchecked(&r.best_move);

        // A delivered mate or stalemate outranks adjudication; loop to
        // re-check terminality first.
        if p.outcome() != Outcome::Ongoing {
            continue;
        }
        if resign_streak[mover as usize] >= rules.resign_movecount {
            break GameOutcome {
                result: match mover {
                    Color::White => GameResult::BlackWin,
                    Color::Black => GameResult::WhiteWin,
                },
                termination: "adjudication: resign".into(),
            };
        }
        if p.fullmove_number() > rules.draw_movenumber
            && calm_plies >= rules.draw_movecount * 2
        {
            break GameOutcome {
                result: GameResult::Draw,
                termination: "adjudication: draw".into(),
            };
        }
    };
    let record = GameRecord {
        initial: opening.clone(),
        moves,
        result: outcome.result,
        tags: Vec::new(),
    };
    (record, scores, outcome)
}

fn score_for_a(result: GameResult, white_is_a: bool) -> GameScore {
    match (result, white_is_a) {
        (GameResult::WhiteWin, true) | (GameResult::BlackWin, false) => GameScore::AWin,
        (GameResult::WhiteWin, false) | (GameResult::BlackWin, true) => GameScore::BWin,
        (GameResult::Draw, _) => GameScore::Draw,
    }
}

/// Plays `cfg.openings` color-swapped pairs. Pairs run on a rayon pool
/// sized by `concurrency` and are merged back in pair order, so the
/// result is independent of scheduling.
pub fn play_match(cfg: &MatchConfig, suite: &[Position]) -> Result<MatchResult, ArenaError> {
    if suite.is_empty() {
        return Err(ArenaError::EmptySuite);
    }
    let openings = sample_openings(suite, cfg.openings, cfg.seed);
    let mut seed_rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xa12e);
    let pair_seeds: Vec<(u64, u64)> =
        (0..openings.len()).map(|_| (seed_rng.gen(), seed_rng.gen())).collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.concurrency.max(1))
        .build()
        .expect("thread pool");
    let pairs: Vec<(GameLog, GameLog)> = pool.install(|| {
        openings
            .par_iter()
            .zip(&pair_seeds)
            .map(|(opening, &(s1, s2))| {
                let (rec1, sc1, o1) = play_game(
                    opening,
                    &cfg.engine_a,
                    &cfg.engine_b,
                    &cfg.rules,
                    cfg.max_game_plies,
                    s1,
                );
                let (rec2, sc2, o2) = play_game(
                    opening,
                    &cfg.engine_b,
                    &cfg.engine_a,
                    &cfg.rules,
                    cfg.max_game_plies,
                    s2,
                );
                (
                    GameLog {
                        record: rec1,
                        scores: sc1,
                        white_is_a: true,
                        termination: o1.termination,
                    },
                    GameLog {
                        record: rec2,
                        scores: sc2,
                        white_is_a: false,
                        termination: o2.termination,
                    },
                )
            })
            .collect()
    });

    let mut result = MatchResult {
        wins: 0,
        draws: 0,
        losses: 0,
        games: Vec::new(),
    };
    for (g1, g2) in pairs {
        for g in [g1, g2] {
            match score_for_a(g.record.result, g.white_is_a) {
                GameScore::AWin => result.wins += 1,
                GameScore::Draw => result.draws += 1,
                GameScore::BWin => result.losses += 1,
            }
            result.games.push(g);
        }
    }
    Ok(result)
}

/// Fig.-6-style ablation: engine A plays the bundle's expert for the
/// enabled phases and the baseline elsewhere; engine B is the baseline
/// everywhere.
pub fn ablation_bundle(
    bundle: &crate::experts::ExpertBundle,
    baseline: &crate::experts::Evaluator,
    enabled: &[crate::phase::GamePhase],
) -> crate::experts::ExpertBundle {
    let mut experts = [
        baseline.clone(),
        baseline.clone(),
        baseline.clone(),
    ];
    for &phase in enabled {
        experts[phase as usize] = bundle.expert(phase).clone();
    }
    crate::experts::ExpertBundle {
        experts,
        metadata: bundle.metadata.clone(),
    }
}

/// Match summary for the JSON report.
#[derive(Serialize)]
pub struct MatchSummary {
    pub format_version: u32,
    pub engine_a: String,
    pub engine_b: String,
    pub wins: u32,
    pub draws: u32,
    pub losses: u32,
    pub score: f64,
    pub elo: f64,
    pub elo_half_width: f64,
    pub elo_bounded: bool,
}

impl MatchSummary {
    pub fn new(cfg: &MatchConfig, r: &MatchResult) -> MatchSummary {
        let e = r.elo();
        MatchSummary {
            format_version: 1,
            engine_a: cfg.engine_a.name.clone(),
            engine_b: cfg.engine_b.name.clone(),
            wins: r.wins,
            draws: r.draws,
            losses: r.losses,
            score: r.score_fraction(),
            elo: e.elo,
            elo_half_width: e.half_width,
            elo_bounded: e.bounded,
        }
    }
}

/// PGN text of every game with per-ply score comments.
pub fn match_pgn(cfg: &MatchConfig, result: &MatchResult) -> String {
    let mut out = String::new();
    for (i, g) in result.games.iter().enumerate() {
        let mut record = g.record.clone();
        let (white, black) = if g.white_is_a {
            (&cfg.engine_a.name, &cfg.engine_b.name)
        } else {
            (&cfg.engine_b.name, &cfg.engine_a.name)
        };
        record.tags = vec![
            ("Event".into(), "match".into()),
            ("Round".into(), format!("{}", i / 2 + 1)),
            ("White".into(), white.clone()),
            ("Black".into(), black.clone()),
            ("Termination".into(), g.termination.clone()),
        ];
        let comments: Vec<Option<String>> = g
            .scores
            .iter()
            .map(|s| Some(format!("{:+}.{:02}", s / 100, (s % 100).abs())))
            .collect();
        out.push_str(&crate::board::write_pgn(&record, &comments));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experts::{Evaluator, Handcrafted};

    fn engine(name: &str, nodes: u64) -> EngineConfig {
        EngineConfig {
            name: name.into(),
            router: EvalRouter::Single(Evaluator::Handcrafted(Handcrafted::baseline())),
            search: SearchConfig {
                nodes: Some(nodes),
                ..SearchConfig::default()
            },
        }
    }

    const SUITE: &str = "\
rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq e3
rnbqkbnr/pppp1ppp/8/4p3/4P3/8/PPPP1PPP/RNBQKBNR w KQkq -
rnbqkbnr/ppp1pppp/8/3p4/3P4/8/PPP1PPPP/RNBQKBNR w KQkq -
# a comment line
rnbqkbnr/pppppp1p/6p1/8/4P3/8/PPPP1PPP/RNBQKBNR w KQkq -
";

    #[test]
    fn expected_score_formula() {
        assert_eq!(expected_score(1000.0, 1000.0), 0.5);
        assert!((expected_score(1400.0, 1000.0) - 10.0 / 11.0).abs() < 1e-12);
        for (a, b) in [(1000.0, 1200.0), (1600.0, 900.0)] {
            assert!((expected_score(a, b) + expected_score(b, a) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn elo_round_trips_expected_score() {
        for s in [0.1, 0.25, 0.5, 10.0 / 11.0, 0.99] {
            let elo = elo_from_score(s);
            assert!((expected_score(elo, 0.0) - s).abs() < 1e-9);
        }
        let e = elo_from_counts(10, 0, 10);
        assert_eq!(e.elo, 0.0);
        let up = elo_from_counts(10, 0, 1);
        let down = elo_from_counts(1, 0, 10);
        assert!((up.elo + down.elo).abs() < 1e-9, "antisymmetry");
        assert!((elo_from_counts(10, 0, 1).elo - 400.0).abs() < 1.0); // s = 10/11
    }

    #[test]
    fn degenerate_scores_give_bounded_estimates() {
        let sweep = elo_from_counts(10, 0, 0);
        assert!(sweep.bounded);
        assert!(sweep.elo > 400.0);
        assert!(sweep.half_width.is_infinite());
        let swept = elo_from_counts(0, 0, 10);
        assert!(swept.bounded);
        assert!(swept.elo < -400.0);
    }

    #[test]
    fn epd_reader_skips_comments_and_synthesizes_counters() {
        let suite = parse_epd(SUITE).unwrap();
        assert_eq!(suite.len(), 4);
        assert_eq!(suite[0].side_to_move(), Color::Black);
        assert!(parse_epd("").is_err());
        assert!(matches!(parse_epd("only three fields"), Err(ArenaError::BadEpd(1, _))));
    }

    #[test]
    fn opening_sampling_without_replacement_and_seeded() {
        let suite = parse_epd(SUITE).unwrap();
        let a = sample_openings(&suite, 3, 9);
        let b = sample_openings(&suite, 3, 9);
        assert_eq!(a.len(), 3);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.to_fen(), y.to_fen());
        }
        // Without replacement: all distinct.
        let fens: std::collections::BTreeSet<String> =
            a.iter().map(|p| p.to_fen()).collect();
        assert_eq!(fens.len(), 3);
    }

    #[test]
    fn identical_deterministic_engines_score_half() {
        let suite = parse_epd(SUITE).unwrap();
        let cfg = MatchConfig {
            engine_a: engine("a", 24),
            engine_b: engine("b", 24),
            openings: 2,
            rules: AdjudicationRules::default(),
            max_game_plies: 60,
            concurrency: 2,
            seed: 3,
            };
        let r = play_match(&cfg, &suite).unwrap();
        assert_eq!(r.total(), 4);
        assert_eq!(r.wins, r.losses, "mirrored pairs must cancel");
        assert!((r.score_fraction() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn resign_adjudication_fires_on_fifth_consecutive() {
        // A rook-up position: the handcrafted evaluator reads it as lost
        // for black well past -600, so black should resign quickly.
        let suite = parse_epd("k7/8/8/8/8/8/R7/K6R w - -").unwrap();
        let cfg = MatchConfig {
            engine_a: engine("a", 16),
            engine_b: engine("b", 16),
            openings: 1,
            rules: AdjudicationRules::default(),
            max_game_plies: 200,
            concurrency: 1,
            seed: 5,
        };
        let r = play_match(&cfg, &suite).unwrap();
        for g in &r.games {
            assert!(
                g.termination.contains("resign") || g.termination == "terminal",
                "got {}",
                g.termination
            );
        }
    }

    #[test]
    fn match_pgn_carries_scores() {
        let suite = parse_epd(SUITE).unwrap();
        let cfg = MatchConfig {
            engine_a: engine("alpha", 8),
            engine_b: engine("beta", 8),
            openings: 1,
            rules: AdjudicationRules::default(),
            max_game_plies: 10,
            concurrency: 1,
            seed: 1,
        };
        let r = play_match(&cfg, &suite).unwrap();
        let pgn = match_pgn(&cfg, &r);
        assert!(pgn.contains("[White \"alpha\"]"));
        assert!(pgn.contains("[Round \"1\"]"));
        assert!(pgn.contains('{'), "score comments present");
        // The PGN must parse back.
        let games: Vec<_> = crate::board::parse_pgn(pgn.as_bytes()).collect();
        assert_eq!(games.len(), 2);
        assert!(games.iter().all(|g| g.is_ok()));
    }

    #[test]
    fn ablation_none_is_baseline_everywhere() {
        use crate::experts::{BundleMetadata, ExpertBundle};
        let strong = Evaluator::Handcrafted(Handcrafted::strong());
        let base = Evaluator::Handcrafted(Handcrafted::baseline());
        let bundle = ExpertBundle::uniform(strong, BundleMetadata::new("t", "t"));
        let none = ablation_bundle(&bundle, &base, &[]);
        for e in &none.experts {
            assert!(e.same_as(&base));
        }
        let endgame_only =
            ablation_bundle(&bundle, &base, &[crate::phase::GamePhase::Endgame]);
        assert!(endgame_only.experts[2].same_as(&bundle.experts[2]));
        assert!(endgame_only.experts[0].same_as(&base));
        let all = ablation_bundle(
            &bundle,
            &base,
            &[
                crate::phase::GamePhase::Opening,
                crate::phase::GamePhase::Middlegame,
                crate::phase::GamePhase::Endgame,
            ],
        );
        for (a, b) in all.experts.iter().zip(&bundle.experts) {
            assert!(a.same_as(b));
        }
    }
}
