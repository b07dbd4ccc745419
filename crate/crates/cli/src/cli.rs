//! `dlg` subcommands. `run` takes its output streams so tests can drive it in-process.

use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use dialog_core::engine::trace;
use dialog_core::episodes::DEFAULT_CAP;
use dialog_core::generate::{generate, sample_seed, GenConfig};
use dialog_core::miner::{mine_with, MinerConfig};
use dialog_core::stage::RejectKind;
use dialog_core::syntax::print_spec;
use dialog_core::{
    canonical, canonicalize, enumerate_capped, equivalent_capped, membership_with, parse_episode, parse_expr,
    parse_spec_file, parse_utterance, stage, union_all, Completion, Dialog, Equivalence, StagingOutcome,
};

use crate::formats::read_source;
use crate::harness;
use crate::service;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Dialog specifications: parse, simplify, stage, enumerate, mine and serve.
///
/// Expression and episode arguments are literal text, a path to a file, or `-` for standard input.
#[derive(Parser, Debug)]
#[command(name = "dlg", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and validate; print the canonical form.
    Parse { expr: String },
    /// Print the canonical form, optionally with every rewrite step.
    Canon {
        expr: String,
        #[arg(long)]
        trace: bool,
    },
    /// Stage one utterance against an arrow-free, W-free expression; print what remains.
    Stage {
        expr: String,
        utterance: String,
        #[arg(long)]
        trace: bool,
    },
    /// Is the episode a member of the expression's extension?
    Run {
        expr: String,
        episode: String,
        /// Require every surviving reduction path to finish.
        #[arg(long)]
        strict_complete: bool,
        /// Print one reduction path, configuration by configuration.
        #[arg(long)]
        trace: bool,
    },
    /// Print every episode, one per line.
    Enum {
        expr: String,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Compare two extensions; print a distinguishing episode if they differ.
    Equiv {
        left: String,
        right: String,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Compress an episode list into a union of expressions.
    Mine {
        episodes: String,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Random W-rooted expressions, one per line.
    Gen {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[command(flatten)]
        shape: Shape,
    },
    /// Generate, enumerate, mine and verify; report verbosities and compression.
    Eval {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Directory for report.json and the histogram CSVs.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[command(flatten)]
        shape: Shape,
    },
    /// Start the HTTP facade.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
    },
}

#[derive(clap::Args, Debug)]
pub struct Shape {
    #[arg(long, default_value_t = 5)]
    pub solicitations: usize,
    #[arg(long, default_value_t = 0.5)]
    pub arrow_probability: f64,
    /// Uniform cut points instead of even splits.
    #[arg(long)]
    pub unbalanced: bool,
}

impl Shape {
    fn config(&self, seed: u64) -> GenConfig {
        GenConfig {
            solicitations: self.solicitations,
            arrow_probability: self.arrow_probability,
            balanced: !self.unbalanced,
            seed,
            ..GenConfig::default()
        }
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

// Usage, IO and parse failures; printed to stderr, exit 2.
struct Fail(String);

impl<E: std::fmt::Display> From<E> for Fail {
    fn from(e: E) -> Self {
        Fail(e.to_string())
    }
}

type Outcome = Result<i32, Fail>;

fn load_expr(arg: &str) -> Result<Dialog, Fail> {
    let text = read_source(arg)?;
    parse_expr(&text).map_err(|e| Fail(e.to_string()))
}

/// Runs one command line (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut io = Io { out, err };
    match execute(cli.command, &mut io) {
        Ok(code) => code,
        Err(Fail(msg)) => {
            let _ = writeln!(io.err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn execute(cmd: Command, io: &mut Io<'_>) -> Outcome {
    match cmd {
        Command::Parse { expr } => {
            let d = load_expr(&expr)?;
            for w in dialog_core::validate(&d).warnings {
                writeln!(io.err, "warning: {w}")?;
            }
            writeln!(io.out, "{}", canonical(&d))?;
            Ok(EXIT_OK)
        }
        Command::Canon { expr, trace } => {
            let t = canonicalize(&load_expr(&expr)?);
            writeln!(io.out, "{}", t.result)?;
            if trace {
                for s in &t.steps {
                    writeln!(io.out, "{s}")?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Stage { expr, utterance, trace } => {
            let d = load_expr(&expr)?;
            let u = parse_utterance(read_source(&utterance)?.trim())?;
            match stage(&d, &u) {
                StagingOutcome::Advanced { next, trace: t } => {
                    writeln!(io.out, "{next}")?;
                    if trace {
                        for s in &t.steps {
                            writeln!(io.out, "{s}")?;
                        }
                    }
                    Ok(EXIT_OK)
                }
                StagingOutcome::Rejected(r) if r.kind == RejectKind::Unsupported => {
                    Err(Fail("stage takes arrow-free, W-free expressions; use `run` or the session API".into()))
                }
                StagingOutcome::Rejected(r) => {
                    writeln!(io.out, "REJECTED")?;
                    writeln!(io.err, "{r}")?;
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Run { expr, episode, strict_complete, trace: show } => {
            let d = load_expr(&expr)?;
            let ep = parse_episode(read_source(&episode)?.trim())?;
            let mode = if strict_complete { Completion::All } else { Completion::Any };
            let member = membership_with(&d, &ep, mode);
            if show {
                if let Some(steps) = trace(&d, &ep) {
                    for s in steps {
                        match s.rule {
                            Some(r) => writeln!(io.err, "{r:>8}  {}", s.state)?,
                            None => writeln!(io.err, "{:>8}  {}", "", s.state)?,
                        }
                    }
                }
            }
            writeln!(io.out, "{}", if member { "MEMBER" } else { "NOT-MEMBER" })?;
            Ok(if member { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Enum { expr, cap } => {
            let spec = enumerate_capped(&load_expr(&expr)?, cap)?;
            io.out.write_all(print_spec(&spec).as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Equiv { left, right, cap } => {
            let (a, b) = (load_expr(&left)?, load_expr(&right)?);
            match equivalent_capped(&a, &b, cap)? {
                Equivalence::Equivalent => {
                    writeln!(io.out, "EQUIVALENT")?;
                    Ok(EXIT_OK)
                }
                Equivalence::Differ { witness, in_left } => {
                    writeln!(io.out, "DIFFER")?;
                    writeln!(io.out, "{witness} only in {}", if in_left { "left" } else { "right" })?;
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Mine { episodes, cap, depth } => {
            let spec = parse_spec_file(&read_source(&episodes)?)?;
            let mined = mine_with(&spec, MinerConfig { cap, depth, ..MinerConfig::default() })?;
            match union_all(mined) {
                Some(u) => writeln!(io.out, "{u}")?,
                None => return Err(Fail("no episodes to mine".into())),
            }
            Ok(EXIT_OK)
        }
        Command::Gen { seed, count, shape } => {
            let cfg = shape.config(seed);
            cfg.check()?;
            // sample i of `eval --seed s` is line i of `gen --seed s`
            for i in 0..count {
                let d = generate(&GenConfig { seed: sample_seed(seed, i as u64), ..cfg.clone() });
                writeln!(io.out, "{d}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Eval { n, seed, out, cap, depth, shape } => {
            let cfg = shape.config(seed);
            cfg.check()?;
            let miner = MinerConfig { cap, depth, ..MinerConfig::default() };
            let Some(run) = harness::run_eval(&cfg, miner, n)? else {
                return Err(Fail("n must be at least 1".into()));
            };
            io.out.write_all(harness::summary(&run.report).as_bytes())?;
            if let Some(dir) = out {
                harness::write_outputs(&run, &dir)?;
            }
            let ok = harness::checks(&run.report).iter().all(|(_, ok)| *ok);
            Ok(if ok { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Serve { port, host } => {
            let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
            rt.block_on(service::serve(SocketAddr::new(host, port)))?;
            Ok(EXIT_OK)
        }
    }
}
