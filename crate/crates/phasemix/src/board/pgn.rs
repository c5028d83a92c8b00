//! PGN reading (export format). Broken games are reported as error items and
//! skipped; parsing continues with the next game.

use super::{Move, Outcome, Position, SanError};
use std::io::BufRead;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameResult {
    WhiteWin,
    Draw,
    BlackWin,
}

impl GameResult {
    pub fn from_token(tok: &str) -> Option<GameResult> {
        match tok {
            "1-0" => Some(GameResult::WhiteWin),
            "0-1" => Some(GameResult::BlackWin),
            "1/2-1/2" => Some(GameResult::Draw),
            _ => None,
        }
    }

    pub fn to_token(self) -> &'static str {
        match self {
            GameResult::WhiteWin => "1-0",
            GameResult::Draw => "1/2-1/2",
            GameResult::BlackWin => "0-1",
        }
    }

    pub fn from_outcome(o: Outcome) -> Option<GameResult> {
        match o {
            Outcome::WhiteWin => Some(GameResult::WhiteWin),
            Outcome::BlackWin => Some(GameResult::BlackWin),
            Outcome::Draw => Some(GameResult::Draw),
            Outcome::Ongoing => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GameRecord {
    pub initial: Position,
    pub moves: Vec<Move>,
    pub result: GameResult,
    pub tags: Vec<(String, String)>,
}

impl GameRecord {
    pub fn tag(&self, name: &str) -> Option<&str> {
        self.tags
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }

    /// Full moves played: the paper-style game-length measure.
    pub fn full_moves(&self) -> usize {
        self.moves.len().div_ceil(2)
    }

    /// Positions along the game line, starting position included.
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::with_capacity(self.moves.len() + 1);
        let mut p = self.initial.clone();
        for mv in &self.moves {
            out.push(p.clone());
            p = p.apply_move_unchecked(mv);
        }
        out.push(p);
        out
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PgnError {
    #[error("game {game_index}: {reason}")]
    SkippedGame { game_index: usize, reason: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub struct PgnReader<R: BufRead> {
    reader: R,
    game_index: usize,
    done: bool,
}

impl<R: BufRead> PgnReader<R> {
    pub fn new(reader: R) -> Self {
        PgnReader {
            reader,
            game_index: 0,
            done: false,
        }
    }

    /// Reads one game's raw text: tag section plus movetext, ending at the
    /// result token or EOF.
    fn read_game_text(&mut self) -> Result<Option<(Vec<(String, String)>, String)>, std::io::Error> {
        let mut tags = Vec::new();
        let mut movetext = String::new();
        let mut saw_anything = false;
        let mut in_moves = false;
        let mut line = String::new();
        loop {
            line.clear();
            if self.reader.read_line(&mut line)? == 0 {
                break;
            }
            let trimmed = line.trim();
            if trimmed.is_empty() {
                if in_moves && !movetext.trim().is_empty() {
                    break;
                }
                continue;
            }
            saw_anything = true;
            if trimmed.starts_with('[') && !in_moves {
                if let Some((k, v)) = parse_tag(trimmed) {
                    tags.push((k, v));
                }
            } else {
                in_moves = true;
                movetext.push_str(trimmed);
                movetext.push(' ');
                if has_result_token(&movetext) {
                    break;
                }
            }
        }
        if !saw_anything {
            Ok(None)
        } else {
            Ok(Some((tags, movetext)))
        }
    }

    fn build_record(
        &self,
        tags: Vec<(String, String)>,
        movetext: &str,
    ) -> Result<GameRecord, String> {
        let initial = match tags.iter().find(|(k, _)| k == "FEN") {
            Some((_, fen)) => Position::from_fen(fen).map_err(|e| e.to_string())?,
            None => Position::start(),
        };
        let tokens = tokenize_movetext(movetext);
        let mut moves = Vec::new();
        let mut position = initial.clone();
        let mut result = None;
        for tok in tokens {
            if let Some(r) = GameResult::from_token(&tok) {
                result = Some(r);
                break;
            }
            let mv = position
                .parse_san(&tok)
                .map_err(|e: SanError| e.to_string())?;
            position = position.apply_move_unchecked(&mv);
            moves.push(mv);
        }
        let result = result
            .or_else(|| {
                tags.iter()
                    .find(|(k, _)| k == "Result")
                    .and_then(|(_, v)| GameResult::from_token(v))
            })
            .or_else(|| GameResult::from_outcome(position.outcome()))
            .ok_or_else(|| "missing game result".to_string())?;
        Ok(GameRecord {
            initial,
            moves,
            result,
            tags,
        })
    }
}

fn parse_tag(line: &str) -> Option<(String, String)> {
    let inner = line.strip_prefix('[')?.strip_suffix(']')?;
    let (key, rest) = inner.split_once(' ')?;
    let value = rest.trim().strip_prefix('"')?.strip_suffix('"')?;
    Some((key.to_string(), value.to_string()))
}

fn has_result_token(movetext: &str) -> bool {
    movetext
        .split_whitespace()
        .any(|t| GameResult::from_token(t).is_some() || t == "*")
}

/// Strips comments, variations, NAGs and move numbers; keeps SAN tokens and
/// result markers.
fn tokenize_movetext(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut in_comment = false;
    for raw in text.split_whitespace() {
        let mut tok = raw;
        loop {
            if in_comment {
                match tok.find('}') {
                    Some(i) => {
                        in_comment = false;
                        tok = &tok[i + 1..];
                    }
                    None => {
                        tok = "";
                        break;
                    }
                }
            } else if let Some(i) = tok.find('{') {
                let before = &tok[..i];
                emit_token(before, depth, &mut out);
                in_comment = true;
                tok = &tok[i + 1..];
            } else {
                break;
            }
        }
        if in_comment || tok.is_empty() {
            continue;
        }
        // Variations: track parenthesis depth; tokens inside are dropped.
        let mut rest = tok;
        while let Some(stripped) = rest.strip_prefix('(') {
            depth += 1;
            rest = stripped;
        }
        let mut tail_closes = 0;
        while let Some(stripped) = rest.strip_suffix(')') {
            tail_closes += 1;
            rest = stripped;
        }
        emit_token(rest, depth, &mut out);
        depth = depth.saturating_sub(tail_closes);
    }
    out
}

fn emit_token(tok: &str, depth: usize, out: &mut Vec<String>) {
    if depth > 0 || tok.is_empty() || tok.starts_with('$') {
        return;
    }
    if GameResult::from_token(tok).is_some() || tok == "*" {
        out.push(tok.to_string());
        return;
    }
    // "12." / "12..." prefixes, possibly glued to the move.
    let rest = tok.trim_start_matches(|c: char| c.is_ascii_digit());
    let rest = rest.trim_start_matches('.');
    if !rest.is_empty() {
        out.push(rest.to_string());
    }
}

/// Parses a PGN stream, yielding one item per game. Unparseable games come
/// back as `PgnError::SkippedGame` and parsing continues.
pub fn parse_pgn<R: BufRead>(reader: R) -> impl Iterator<Item = Result<GameRecord, PgnError>> {
    PgnReader::new(reader)
}

impl<R: BufRead> Iterator for PgnReader<R> {
    type Item = Result<GameRecord, PgnError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            match self.read_game_text() {
                Err(e) => {
                    self.done = true;
                    return Some(Err(PgnError::Io(e)));
                }
                Ok(None) => {
                    self.done = true;
                    return None;
                }
                Ok(Some((tags, movetext))) => {
                    if movetext.trim().is_empty() && tags.is_empty() {
                        continue;
                    }
                    self.game_index += 1;
                    let idx = self.game_index;
                    return Some(self.build_record(tags, &movetext).map_err(|reason| {
                        PgnError::SkippedGame {
                            game_index: idx,
                            reason,
                        }
                    }));
                }
            }
        }
    }
}

/// Renders a game back to export-format PGN. `comments` holds an optional
/// per-ply annotation (used by the arena for per-move scores).
pub fn write_pgn(record: &GameRecord, comments: &[Option<String>]) -> String {
    let mut out = String::new();
    let required = [
        ("Event", "?"),
        ("Site", "?"),
        ("Date", "????.??.??"),
        ("Round", "?"),
        ("White", "?"),
        ("Black", "?"),
    ];
    for (key, default) in required {
        let value = record.tag(key).unwrap_or(default);
        out.push_str(&format!("[{key} \"{value}\"]\n"));
    }
    for (key, value) in &record.tags {
        if !required.iter().any(|(k, _)| k == key) && key != "Result" {
            out.push_str(&format!("[{key} \"{value}\"]\n"));
        }
    }
    if record.initial.to_fen() != Position::START_FEN && record.tag("FEN").is_none() {
        out.push_str("[SetUp \"1\"]\n");
        out.push_str(&format!("[FEN \"{}\"]\n", record.initial.to_fen()));
    }
    out.push_str(&format!("[Result \"{}\"]\n\n", record.result.to_token()));

    let mut position = record.initial.clone();
    let mut line_len = 0usize;
    for (i, mv) in record.moves.iter().enumerate() {
        let mut chunk = String::new();
        if position.side_to_move() == super::Color::White {
            chunk.push_str(&format!("{}. ", position.fullmove_number()));
        } else if i == 0 {
            chunk.push_str(&format!("{}... ", position.fullmove_number()));
        }
        chunk.push_str(&position.san(mv));
        if let Some(Some(c)) = comments.get(i) {
            chunk.push_str(&format!(" {{{c}}}"));
        }
        chunk.push(' ');
        if line_len + chunk.len() > 80 {
            out.push('\n');
            line_len = 0;
        }
        line_len += chunk.len();
        out.push_str(&chunk);
        position = position.apply_move_unchecked(mv);
    }
    out.push_str(record.result.to_token());
    out.push('\n');
    out
}
