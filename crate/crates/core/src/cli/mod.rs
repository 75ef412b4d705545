//! Command-line front end. Every command prints one JSON object per line.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | accept / success / clean |
//! | 1 | reject / validation issues / incompatible machine / code violations |
//! | 2 | unreadable file, parse error or bad argument |
//! | 3 | a step, space or write limit ended the run |
//! | 4 | loop detected |
//! | 5 | write-once violation (end-writer fault) |
//! | 6 | end-writer decider: the machine never halts |

mod corpus;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::endwriter::{analyze, decide_with, DecideVerdict, EndWriterError};
use crate::machine::{binarize_alphabet, parse_machine, validate_machine, Discipline, Machine, MachineDescription, Mode, Symbol, BLANK};
use crate::simulator::{gap_stats, GapReport, Limits, Outcome};
use crate::transpile::{
    relax_to_standard, run_verdict, to_write_once_copying, to_write_once_womcoded, words_up_to, InputEncoding, RunSummary,
    TranspileReport, Verdict,
};
use crate::womcode::{parse_code_spec, verify_code};

pub use corpus::{bundled_corpus_dir, load_corpus, load_entry, load_manifest, CorpusEntry, CorpusError, Expected, Manifest, Tags, MANIFEST};

#[derive(Debug, Parser)]
#[command(name = "wotm", version, about = "Simulate, translate and analyse write-once Turing machines")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct LimitArgs {
    #[arg(long, default_value_t = 100_000)]
    pub max_steps: u64,
    #[arg(long, default_value_t = 10_000)]
    pub max_space: usize,
    #[arg(long)]
    pub max_writes: Option<u64>,
}

impl LimitArgs {
    pub fn limits(&self) -> Limits {
        Limits { max_steps: self.max_steps, max_space: self.max_space, max_writes: self.max_writes }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EncodeInput {
    Raw,
    /// Run the binarized machine on the block encoding of the input.
    Blocks,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Construction {
    Copying,
    Womcoded,
    Relax,
    Binarize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EndWriterAction {
    Analyze,
    Decide,
}

#[derive(Debug, Subcommand)]
pub enum WomAction {
    /// Print the code tables and storage metadata.
    Print {
        #[arg(long, default_value = "rs")]
        code: String,
    },
    /// Check every update sequence up to the given length.
    Verify {
        #[arg(long, default_value = "rs")]
        code: String,
        #[arg(long, default_value_t = 4)]
        max_sequence: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a machine file.
    Validate { path: PathBuf },
    /// Run a machine on an input word given as symbol digits.
    Run {
        path: PathBuf,
        #[arg(default_value = "")]
        input: String,
        #[command(flatten)]
        limits: LimitArgs,
        /// Print every step before the summary.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value = "raw")]
        encode_input: EncodeInput,
    },
    /// Translate a machine and write the result.
    Transpile {
        path: PathBuf,
        #[arg(long, value_enum)]
        construction: Construction,
        #[arg(long, default_value = "slot:1,3")]
        code: String,
        /// Machine file to write; printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inspect write-once memory codes.
    Wom {
        #[command(subcommand)]
        action: WomAction,
    },
    /// Analyse an end-writer or decide acceptance with bounded memory.
    Endwriter {
        #[arg(value_enum)]
        action: EndWriterAction,
        path: PathBuf,
        #[arg(default_value = "")]
        input: String,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Sweep every corpus machine over all short inputs.
    Bench {
        corpus: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
        #[arg(long, default_value = "slot:1,3")]
        code: String,
        #[command(flatten)]
        limits: LimitArgs,
    },
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;
pub const EXIT_LOOP: i32 = 4;
pub const EXIT_VIOLATION: i32 = 5;
pub const EXIT_DIVERGE: i32 = 6;

pub fn outcome_exit_code(outcome: Outcome) -> i32 {
    match outcome {
        Outcome::Accept => EXIT_OK,
        Outcome::Reject => EXIT_NO,
        Outcome::StepLimit | Outcome::SpaceLimit | Outcome::WriteLimit => EXIT_LIMIT,
        Outcome::LoopDetected => EXIT_LOOP,
        Outcome::WriteOnceViolation => EXIT_VIOLATION,
    }
}

pub fn decide_exit_code(verdict: DecideVerdict) -> i32 {
    match verdict {
        DecideVerdict::Accept => EXIT_OK,
        DecideVerdict::Reject => EXIT_NO,
        DecideVerdict::StepLimit | DecideVerdict::WriteLimit => EXIT_LIMIT,
        DecideVerdict::Fault => EXIT_VIOLATION,
        DecideVerdict::Diverge => EXIT_DIVERGE,
    }
}

/// Parses an input word written as symbol digits, e.g. `0120`.
pub fn parse_word(text: &str) -> Result<Vec<Symbol>, String> {
    text.chars()
        .map(|c| c.to_digit(10).map(|d| d as Symbol).ok_or_else(|| format!("'{c}' is not a symbol digit")))
        .collect()
}

pub fn format_word(word: &[Symbol]) -> String {
    word.iter().map(|s| s.to_string()).collect()
}

/// Ends a command early with an exit code after printing a message.
struct Exit(i32, String);

type CmdResult = Result<i32, Exit>;

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn line(&mut self, value: &impl Serialize) {
        let text = serde_json::to_string(value).expect("report serializes");
        let _ = writeln!(self.out, "{text}");
    }
}

fn read_description(path: &Path) -> Result<MachineDescription, Exit> {
    let text = std::fs::read_to_string(path).map_err(|e| Exit(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    parse_machine(&text).map_err(|e| Exit(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn load_machine(path: &Path) -> Result<Machine, Exit> {
    let desc = read_description(path)?;
    Machine::new(desc).map_err(|report| {
        let messages: Vec<String> = report.issues.iter().map(|i| i.message.clone()).collect();
        Exit(EXIT_USAGE, format!("{}: invalid machine: {}", path.display(), messages.join("; ")))
    })
}

fn word_arg(text: &str) -> Result<Vec<Symbol>, Exit> {
    parse_word(text).map_err(|e| Exit(EXIT_USAGE, e))
}

/// Parses `args` (program name first) and runs the command.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let mut io = Io { out, err };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(Exit(code, message)) => {
            let _ = writeln!(io.err, "error: {message}");
            code
        }
    }
}

fn dispatch(command: Command, io: &mut Io) -> CmdResult {
    match command {
        Command::Validate { path } => cmd_validate(&path, io),
        Command::Run { path, input, limits, trace, encode_input } => {
            cmd_run(&path, &input, limits.limits(), trace, encode_input, io)
        }
        Command::Transpile { path, construction, code, out } => cmd_transpile(&path, construction, &code, out.as_deref(), io),
        Command::Wom { action } => cmd_wom(action, io),
        Command::Endwriter { action, path, input, limits } => cmd_endwriter(action, &path, &input, limits.limits(), io),
        Command::Bench { corpus, max_len, code, limits } => cmd_bench(&corpus, max_len, &code, limits.limits(), io),
    }
}

fn cmd_validate(path: &Path, io: &mut Io) -> CmdResult {
    let desc = read_description(path)?;
    let report = validate_machine(&desc);
    io.line(&json!({
        "file": path.display().to_string(),
        "clean": report.is_clean(),
        "issues": report.issues,
    }));
    Ok(if report.is_clean() { EXIT_OK } else { EXIT_NO })
}

#[derive(Serialize)]
struct RunLine<'a> {
    input: String,
    #[serde(flatten)]
    summary: &'a RunSummary,
    #[serde(flatten)]
    gaps: Option<GapReport>,
}

fn cmd_run(path: &Path, input: &str, limits: Limits, trace: bool, encode: EncodeInput, io: &mut Io) -> CmdResult {
    let mut machine = load_machine(path)?;
    let mut word = word_arg(input)?;
    if encode == EncodeInput::Blocks {
        let (binary, enc) = binarize_alphabet(&machine).map_err(|e| Exit(EXIT_NO, e.to_string()))?;
        if let Some(&x) = word.iter().find(|x| !machine.in_alphabet(**x)) {
            return Err(Exit(EXIT_USAGE, format!("input symbol {x} is not in the machine alphabet")));
        }
        word = enc.encode_word(&word);
        machine = binary;
    }
    let summary = run_verdict(&machine, &word, limits).map_err(|e| Exit(EXIT_USAGE, e.to_string()))?;
    if trace {
        if let Some(t) = &summary.trace {
            for (i, e) in t.events.iter().enumerate() {
                io.line(&json!({
                    "step": i + 1,
                    "read": e.read,
                    "change": e.change,
                    "head": e.head,
                    "state": machine.state_name(e.state),
                    "write": e.was_write,
                }));
            }
        }
    }
    let gaps = summary.trace.as_ref().map(|t| gap_stats(t, machine.state_count()));
    io.line(&RunLine { input: format_word(&word), summary: &summary, gaps });
    Ok(outcome_exit_code(summary.outcome))
}

fn cmd_transpile(path: &Path, construction: Construction, code: &str, out: Option<&Path>, io: &mut Io) -> CmdResult {
    let source = load_machine(path)?;
    let incompatible = |e: String| Exit(EXIT_NO, e);
    let (target, report) = match construction {
        Construction::Copying => to_write_once_copying(&source).map_err(|e| incompatible(e.to_string()))?,
        Construction::Womcoded => {
            let code = parse_code_spec(code).map_err(|e| Exit(EXIT_USAGE, e.to_string()))?;
            to_write_once_womcoded(&source, &code).map_err(|e| incompatible(e.to_string()))?
        }
        Construction::Relax => {
            let target = Machine::new(relax_to_standard(source.description())).map_err(|_| incompatible("relaxed machine is invalid".into()))?;
            let report = TranspileReport::new("relax", &source, &target, "unchanged", 1, InputEncoding::Identity, "steps unchanged");
            (target, report)
        }
        Construction::Binarize => {
            let (target, enc) = binarize_alphabet(&source).map_err(|e| incompatible(e.to_string()))?;
            let width = enc.width;
            let layout = format!("{width}-cell blocks");
            let report = TranspileReport::new("binarize", &source, &target, &layout, width, InputEncoding::Blocks { encoding: enc }, "steps <= O(width) per source step");
            (target, report)
        }
    };
    let text = target.description().to_string();
    match out {
        Some(p) => {
            std::fs::write(p, &text).map_err(|e| Exit(EXIT_USAGE, format!("{}: {e}", p.display())))?;
            io.line(&report);
        }
        None => {
            let _ = write!(io.out, "{text}");
            let _ = writeln!(io.err, "{}", serde_json::to_string(&report).expect("report serializes"));
        }
    }
    Ok(EXIT_OK)
}

fn cmd_wom(action: WomAction, io: &mut Io) -> CmdResult {
    match action {
        WomAction::Print { code } => {
            let code = parse_code_spec(&code).map_err(|e| Exit(EXIT_USAGE, e.to_string()))?;
            io.line(&json!({
                "code": code.name(),
                "values": code.value_count(),
                "updates": code.update_budget(),
                "metadata": code.metadata(),
                "table": code.table_lines(),
            }));
            Ok(EXIT_OK)
        }
        WomAction::Verify { code, max_sequence } => {
            let code = parse_code_spec(&code).map_err(|e| Exit(EXIT_USAGE, e.to_string()))?;
            let report = verify_code(&code, max_sequence);
            io.line(&report);
            Ok(if report.is_clean() { EXIT_OK } else { EXIT_NO })
        }
    }
}

fn cmd_endwriter(action: EndWriterAction, path: &Path, input: &str, limits: Limits, io: &mut Io) -> CmdResult {
    let machine = load_machine(path)?;
    let analysis = analyze(&machine).map_err(|e| Exit(EXIT_NO, e.to_string()))?;
    match action {
        EndWriterAction::Analyze => {
            io.line(&analysis.report());
            Ok(EXIT_OK)
        }
        EndWriterAction::Decide => {
            let word = word_arg(input)?;
            let decision = decide_with(&analysis, &word, limits).map_err(|e| match e {
                EndWriterError::BlankInInput | EndWriterError::SymbolOutsideAlphabet(_) => Exit(EXIT_USAGE, e.to_string()),
                other => Exit(EXIT_NO, other.to_string()),
            })?;
            io.line(&json!({
                "input": input,
                "threshold": analysis.threshold.constructed,
                "decision": decision,
            }));
            Ok(decide_exit_code(decision.verdict))
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TranspiledRun {
    pub construction: &'static str,
    pub verdict: Verdict,
    pub steps: usize,
    pub space: usize,
    pub step_ratio: f64,
    pub space_ratio: f64,
    pub agrees: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRecord {
    pub machine: String,
    pub input: String,
    pub mode: &'static str,
    pub discipline: &'static str,
    pub verdict: Verdict,
    pub outcome: Outcome,
    pub steps: usize,
    pub writes: usize,
    pub space: usize,
    pub max_gap: Option<usize>,
    pub bound_check: Option<bool>,
    pub transpiled: Vec<TranspiledRun>,
}

fn ratio(a: usize, b: usize) -> f64 {
    a as f64 / b.max(1) as f64
}

/// Larger limits for translated machines, which run polynomially longer.
fn target_limits(limits: Limits) -> Limits {
    Limits {
        max_steps: limits.max_steps.saturating_mul(100),
        max_space: limits.max_space.saturating_mul(10),
        max_writes: None,
    }
}

/// Records for one machine over every input of length at most `max_len`.
/// End-writers get blank-free inputs.
pub fn bench_machine(name: &str, machine: &Machine, max_len: usize, code: &crate::womcode::WomCode, limits: Limits) -> Result<Vec<BenchRecord>, String> {
    let symbols: Vec<Symbol> = if machine.discipline() == Discipline::WriteOnceEndOnly {
        machine.alphabet().iter().copied().filter(|&s| s != BLANK).collect()
    } else {
        machine.alphabet().to_vec()
    };
    let mut targets = Vec::new();
    let translatable = machine.mode() == Mode::Deterministic && machine.discipline() == Discipline::Standard && machine.is_binary();
    if translatable {
        targets.push(("copying", to_write_once_copying(machine).map_err(|e| e.to_string())?));
        targets.push(("womcoded", to_write_once_womcoded(machine, code).map_err(|e| e.to_string())?));
    }
    let mut records = Vec::new();
    for word in words_up_to(&symbols, max_len) {
        let s = run_verdict(machine, &word, limits).map_err(|e| e.to_string())?;
        let gaps = s.trace.as_ref().filter(|_| machine.mode() == Mode::Deterministic).map(|t| gap_stats(t, machine.state_count()));
        let mut transpiled = Vec::new();
        for (construction, (target, report)) in &targets {
            let t = run_verdict(target, &report.encoding.encode(&word), target_limits(limits)).map_err(|e| e.to_string())?;
            transpiled.push(TranspiledRun {
                construction,
                verdict: t.verdict,
                steps: t.steps,
                space: t.space,
                step_ratio: ratio(t.steps, s.steps),
                space_ratio: ratio(t.space, s.space),
                agrees: s.verdict.accepts().zip(t.verdict.accepts()).map(|(a, b)| a == b),
            });
        }
        records.push(BenchRecord {
            machine: name.to_string(),
            input: format_word(&word),
            mode: machine.mode().keyword(),
            discipline: machine.discipline().keyword(),
            verdict: s.verdict,
            outcome: s.outcome,
            steps: s.steps,
            writes: s.writes,
            space: s.space,
            max_gap: gaps.as_ref().map(|g| g.max_gap),
            bound_check: gaps.as_ref().map(|g| g.bound_check),
            transpiled,
        });
    }
    Ok(records)
}

fn cmd_bench(dir: &Path, max_len: usize, code: &str, limits: Limits, io: &mut Io) -> CmdResult {
    let code = parse_code_spec(code).map_err(|e| Exit(EXIT_USAGE, e.to_string()))?;
    let manifest = load_manifest(dir).map_err(|e| Exit(EXIT_USAGE, e.to_string()))?;
    let results: Vec<Result<Vec<BenchRecord>, String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = manifest
            .entries
            .iter()
            .map(|entry| {
                let code = &code;
                scope.spawn(move || {
                    let desc = load_entry(dir, entry).map_err(|e| e.to_string())?;
                    let machine = Machine::new(desc).map_err(|r| format!("invalid machine ({} issues)", r.issues.len()))?;
                    bench_machine(&entry.file, &machine, max_len, code, limits)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|_| Err("bench worker panicked".into()))).collect()
    });
    let mut failures = 0;
    for (entry, result) in manifest.entries.iter().zip(results) {
        match result {
            Ok(records) => records.iter().for_each(|r| io.line(r)),
            Err(error) => {
                failures += 1;
                io.line(&json!({ "machine": entry.file, "error": error }));
            }
        }
    }
    let _ = writeln!(io.err, "{} machines, {failures} failed", manifest.entries.len());
    Ok(EXIT_OK)
}
