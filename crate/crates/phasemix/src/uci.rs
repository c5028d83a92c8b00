//! UCI front end. The loop is generic over its streams so tests can
//! drive it in-process; `go` runs on a worker thread and `stop` flips an
//! atomic flag the search polls between batches, so a best move is
//! always reported promptly.

use std::io::{BufRead, Write};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;

use crate::board::Position;
use crate::experts::{Evaluator, Handcrafted, LoadedModel};
use crate::search::{search, EvalRouter, SearchConfig};

#[derive(Debug, Clone)]
pub struct EngineOptions {
    pub model_directory: Option<String>,
    pub batch_size: usize,
    pub nodes: u64,
    /// Alias accepted from the tournament tooling; wins over `nodes`
    /// when both are set.
    pub simulations: Option<u64>,
    /// Milliseconds per move; 0 means node-bound only.
    pub fixed_movetime: u64,
    /// "auto" routes by bundle presence; "classical" forces the single
    /// opening expert everywhere; "m2cts" requires a bundle.
    pub search_type: String,
    /// Accepted for option-string compatibility; inert on CPU.
    pub first_device_id: i64,
    pub threads: usize,
}

impl Default for EngineOptions {
    fn default() -> EngineOptions {
        EngineOptions {
            model_directory: None,
            batch_size: 8,
            nodes: 800,
            simulations: None,
            fixed_movetime: 0,
            search_type: "auto".into(),
            first_device_id: 0,
            threads: 1,
        }
    }
}

struct Session<W: Write + Send + 'static> {
    out: Arc<Mutex<W>>,
    position: Position,
    options: EngineOptions,
    router: EvalRouter,
    stop: Arc<AtomicBool>,
    worker: Option<JoinHandle<()>>,
}

fn default_router() -> EvalRouter {
    EvalRouter::Single(Evaluator::Handcrafted(Handcrafted::baseline()))
}

impl<W: Write + Send + 'static> Session<W> {
    fn say(&self, line: &str) {
        let mut o = self.out.lock().unwrap();
        let _ = writeln!(o, "{line}");
        let _ = o.flush();
    }

    fn join_worker(&mut self) {
        if let Some(h) = self.worker.take() {
            let _ = h.join();
        }
    }

    fn reload_model(&mut self) {
        let Some(dir) = self.options.model_directory.clone() else {
            self.router = default_router();
            return;
        };
        match crate::experts::load_model_dir(std::path::Path::new(&dir)) {
            Ok(LoadedModel::Bundle(b)) => {
                if self.options.search_type == "classical" {
                    self.router = EvalRouter::Single(b.experts[0].clone());
                } else {
                    self.router = EvalRouter::Bundle(b);
                }
                self.say("info string model directory loaded as expert bundle");
            }
            Ok(LoadedModel::Single(m)) => {
                self.router = EvalRouter::Single(m);
                self.say("info string model directory loaded as single model");
            }
            Err(e) => self.say(&format!("info string error loading model: {e}")),
        }
    }

    fn setoption(&mut self, rest: &str) {
        // "name <id> [value <x>]"
        let mut name = String::new();
        let mut value = String::new();
        let mut in_value = false;
        for tok in rest.split_whitespace() {
            match tok {
                "name" => continue,
                "value" => in_value = true,
                t if in_value => {
                    if !value.is_empty() {
                        value.push(' ');
                    }
                    value.push_str(t);
                }
                t => {
                    if !name.is_empty() {
                        name.push(' ');
                    }
                    name.push_str(t);
                }
            }
        }
        let parse_u64 = |v: &str| v.parse::<u64>().ok();
        match name.as_str() {
            "Model_Directory" => {
                self.options.model_directory = Some(value);
                self.reload_model();
            }
            "Batch_Size" => {
                if let Some(v) = parse_u64(&value) {
                    self.options.batch_size = v.max(1) as usize;
                }
            }
            "Nodes" => {
                if let Some(v) = parse_u64(&value) {
                    self.options.nodes = v;
                }
            }
            "Simulations" => self.options.simulations = parse_u64(&value),
            "Fixed_Movetime" => {
                if let Some(v) = parse_u64(&value) {
                    self.options.fixed_movetime = v;
                }
            }
            "Search_Type" => {
                self.options.search_type = value;
                self.reload_model();
            }
            "First_Device_ID" => {
                self.options.first_device_id = value.parse().unwrap_or(0);
            }
            "Threads" => {
                if let Some(v) = parse_u64(&value) {
                    self.options.threads = v.max(1) as usize;
                }
            }
            other => self.say(&format!("info string unknown option {other}")),
        }
    }

    fn set_position(&mut self, rest: &str) {
        let rest = rest.trim();
        let (base, moves) = match rest.split_once("moves") {
            Some((b, m)) => (b.trim(), Some(m.trim())),
            None => (rest, None),
        };
        let parsed = if base == "startpos" {
            Ok(Position::start())
        } else if let Some(fen) = base.strip_prefix("fen") {
            Position::from_fen(fen.trim()).map_err(|e| e.to_string())
        } else {
            Err(format!("unknown position base '{base}'"))
        };
        let mut p = match parsed {
            Ok(p) => p,
            Err(e) => {
                self.say(&format!("info string bad position: {e}"));
                return;
            }
        };
        if let Some(moves) = moves {
            for tok in moves.split_whitespace() {
                match p.parse_uci_move(tok) {
                    Ok(mv) => p = p.apply_move_unchecked(&mv),
                    Err(e) => {
                        self.say(&format!("info string bad move {tok}: {e}"));
                        return;
                    }
                }
            }
        }
        self.position = p;
    }

    fn go(&mut self, rest: &str) {
        self.join_worker();
        self.stop.store(false, Ordering::Relaxed);

        let mut nodes = Some(self.options.simulations.unwrap_or(self.options.nodes));
        let mut movetime = if self.options.fixed_movetime > 0 {
            Some(self.options.fixed_movetime)
        } else {
            None
        };
        let mut toks = rest.split_whitespace().peekable();
        while let Some(t) = toks.next() {
            match t {
                "nodes" => nodes = toks.next().and_then(|v| v.parse().ok()),
                "movetime" => movetime = toks.next().and_then(|v| v.parse().ok()),
                "infinite" => {
                    nodes = None;
                    movetime = None;
                }
                _ => {}
            }
        }
        let cfg = SearchConfig {
            nodes,
            movetime,
            batch_size: self.options.batch_size,
            ..SearchConfig::default()
        };
        let position = self.position.clone();
        let router = self.router.clone();
        let stop = Arc::clone(&self.stop);
        let out = Arc::clone(&self.out);
        self.worker = Some(std::thread::spawn(move || {
            let reply = search(&position, router, &cfg, &stop);
            let mut o = out.lock().unwrap();
            match reply {
                Ok(r) => {
                    let [op, mid, end] = r.gate_counts;
                    let _ = writeln!(
                        o,
                        "info nodes {} score cp {} pv {}",
                        r.nodes,
                        r.score(),
                        r.best_move.to_uci()
                    );
                    let _ = writeln!(
                        o,
                        "info string gate votes opening={op} middlegame={mid} endgame={end}"
                    );
                    let _ = writeln!(o, "bestmove {}", r.best_move.to_uci());
                }
                Err(e) => {
                    let _ = writeln!(o, "info string search failed: {e}");
                    let _ = writeln!(o, "bestmove 0000");
                }
            }
            let _ = o.flush();
        }));
    }
}

/// Run the UCI session until `quit` or end of input.
pub fn uci_loop<R: BufRead, W: Write + Send + 'static>(input: R, output: W) {
    let mut s = Session {
        out: Arc::new(Mutex::new(output)),
        position: Position::start(),
        options: EngineOptions::default(),
        router: default_router(),
        stop: Arc::new(AtomicBool::new(false)),
        worker: None,
    };
    for line in input.lines() {
        let Ok(line) = line else { break };
        let line = line.trim();
        let (cmd, rest) = match line.split_once(' ') {
            Some((c, r)) => (c, r),
            None => (line, ""),
        };
        match cmd {
            "uci" => {
                s.say(&format!("id name phasemix {}", env!("CARGO_PKG_VERSION")));
                s.say("id author phasemix contributors");
                s.say("option name Model_Directory type string default <empty>");
                s.say("option name Batch_Size type spin default 8 min 1 max 4096");
                s.say("option name Nodes type spin default 800 min 1 max 100000000");
                s.say("option name Simulations type spin default 0 min 0 max 100000000");
                s.say("option name Fixed_Movetime type spin default 0 min 0 max 86400000");
                s.say("option name Search_Type type combo default auto var auto var classical var m2cts");
                s.say("option name First_Device_ID type spin default 0 min 0 max 64");
                s.say("option name Threads type spin default 1 min 1 max 256");
                s.say("uciok");
            }
            "isready" => s.say("readyok"),
            "setoption" => s.setoption(rest),
            "ucinewgame" => {
                s.join_worker();
                s.position = Position::start();
            }
            "position" => s.set_position(rest),
            "go" => s.go(rest),
            "stop" => {
                s.stop.store(true, Ordering::Relaxed);
                s.join_worker();
            }
            "quit" => {
                s.stop.store(true, Ordering::Relaxed);
                s.join_worker();
                break;
            }
            "" => {}
            other => s.say(&format!("info string unknown command {other}")),
        }
    }
    s.stop.store(true, Ordering::Relaxed);
    s.join_worker();
}
