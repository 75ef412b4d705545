use serde::Serialize;

use crate::machine::{Machine, Mode, Symbol};
use crate::simulator::{
    run_alternating, run_deterministic, run_nondeterministic, Limits, Outcome, RunTrace, SimError,
};

use super::InputEncoding;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Accept,
    Reject,
    Loop,
    Fault,
    /// A limit was reached before the answer was known.
    Inconclusive,
}

impl Verdict {
    /// `Some(accepts)` for conclusive verdicts.
    pub fn accepts(self) -> Option<bool> {
        match self {
            Verdict::Accept => Some(true),
            Verdict::Reject | Verdict::Loop | Verdict::Fault => Some(false),
            Verdict::Inconclusive => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub verdict: Verdict,
    pub outcome: Outcome,
    /// Length of the run (deterministic) or of the accepting witness.
    pub steps: usize,
    pub space: usize,
    pub writes: usize,
    /// Configurations visited by the search engines; equals `steps + 1` for
    /// deterministic runs.
    pub explored: usize,
    #[serde(skip)]
    pub trace: Option<RunTrace>,
}

/// Runs `machine` on `input` with the engine matching its mode.
pub fn run_verdict(machine: &Machine, input: &[Symbol], limits: Limits) -> Result<RunSummary, SimError> {
    let summary = |verdict, outcome, trace: Option<RunTrace>, explored| {
        let (steps, space, writes) =
            trace.as_ref().map_or((0, 0, 0), |t| (t.steps(), t.space_used(), t.writes()));
        RunSummary { verdict, outcome, steps, space, writes, explored, trace }
    };
    Ok(match machine.mode() {
        Mode::Deterministic => {
            let t = run_deterministic(machine, input, limits)?;
            let verdict = match t.outcome {
                Outcome::Accept => Verdict::Accept,
                Outcome::Reject => Verdict::Reject,
                Outcome::LoopDetected => Verdict::Loop,
                Outcome::WriteOnceViolation => Verdict::Fault,
                _ => Verdict::Inconclusive,
            };
            let explored = t.steps() + 1;
            summary(verdict, t.outcome, Some(t), explored)
        }
        Mode::Nondeterministic => {
            let r = run_nondeterministic(machine, input, limits)?;
            let verdict = match r.outcome {
                Outcome::Accept => Verdict::Accept,
                Outcome::Reject => Verdict::Reject,
                Outcome::WriteOnceViolation => Verdict::Fault,
                _ => Verdict::Inconclusive,
            };
            summary(verdict, r.outcome, r.witness, r.explored)
        }
        Mode::Alternating => {
            let r = run_alternating(machine, input, limits)?;
            let verdict = match r.outcome {
                Outcome::Accept => Verdict::Accept,
                Outcome::Reject => Verdict::Reject,
                _ => Verdict::Inconclusive,
            };
            summary(verdict, r.outcome, None, r.values.len())
        }
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct WordRecord {
    pub word: Vec<Symbol>,
    pub a: RunSummary,
    pub b: RunSummary,
    /// `None` when either side is inconclusive.
    pub agree: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Divergence {
    pub word: Vec<Symbol>,
    pub a: RunSummary,
    pub b: RunSummary,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiffReport {
    pub max_len: usize,
    pub words: usize,
    pub agreements: usize,
    pub divergences: usize,
    pub inconclusive: usize,
    pub first_divergence: Option<Divergence>,
    /// Largest `b / a` ratios over words where both sides are conclusive and
    /// the `a` figure is nonzero.
    pub max_step_ratio: f64,
    pub max_space_ratio: f64,
    pub max_write_ratio: f64,
    #[serde(skip)]
    pub records: Vec<WordRecord>,
}

impl DiffReport {
    pub fn is_clean(&self) -> bool {
        self.divergences == 0
    }
}

/// All words over `alphabet` of length at most `max_len`, shortest first.
pub fn words_up_to(alphabet: &[Symbol], max_len: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * alphabet.len());
        for w in &layer {
            for &s in alphabet {
                let mut x = w.clone();
                x.push(s);
                next.push(x);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Compares `a` on every word up to `max_len` with `b` on the encoded word.
/// Words are split across threads; the records come back in word order.
pub fn differential_check(
    a: &Machine,
    b: &Machine,
    encoding: &InputEncoding,
    max_len: usize,
    limits_a: Limits,
    limits_b: Limits,
) -> Result<DiffReport, SimError> {
    let words = words_up_to(a.alphabet(), max_len);
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(words.len().max(1));
    let chunk = words.len().div_ceil(threads).max(1);
    let results: Vec<Result<Vec<WordRecord>, SimError>> = std::thread::scope(|s| {
        let handles: Vec<_> = words
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    part.iter()
                        .map(|w| {
                            let ra = run_verdict(a, w, limits_a)?;
                            let rb = run_verdict(b, &encoding.encode(w), limits_b)?;
                            let agree = match (ra.verdict.accepts(), rb.verdict.accepts()) {
                                (Some(x), Some(y)) => Some(x == y),
                                _ => None,
                            };
                            Ok(WordRecord { word: w.clone(), a: ra, b: rb, agree })
                        })
                        .collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut records = Vec::with_capacity(words.len());
    for r in results {
        records.extend(r?);
    }

    let mut report = DiffReport {
        max_len,
        words: records.len(),
        agreements: 0,
        divergences: 0,
        inconclusive: 0,
        first_divergence: None,
        max_step_ratio: 0.0,
        max_space_ratio: 0.0,
        max_write_ratio: 0.0,
        records: Vec::new(),
    };
    let ratio = |x: usize, y: usize| if x == 0 { 0.0 } else { y as f64 / x as f64 };
    for rec in &records {
        match rec.agree {
            None => report.inconclusive += 1,
            Some(true) => report.agreements += 1,
            Some(false) => {
                report.divergences += 1;
                if report.first_divergence.is_none() {
                    report.first_divergence =
                        Some(Divergence { word: rec.word.clone(), a: rec.a.clone(), b: rec.b.clone() });
                }
            }
        }
        if rec.agree.is_some() {
            report.max_step_ratio = report.max_step_ratio.max(ratio(rec.a.steps, rec.b.steps));
            report.max_space_ratio = report.max_space_ratio.max(ratio(rec.a.space, rec.b.space));
            report.max_write_ratio = report.max_write_ratio.max(ratio(rec.a.writes, rec.b.writes));
        }
    }
    report.records = records;
    Ok(report)
}
