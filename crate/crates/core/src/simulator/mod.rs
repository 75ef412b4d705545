//! Execution engines and run analyses.

mod alternating;
mod deterministic;
mod gaps;
mod nondeterministic;
mod shorten;

use std::collections::HashSet;

use serde::Serialize;

use crate::machine::{apply, CellChange, Configuration, Machine, Mode, StateId, Symbol};

pub use alternating::{run_alternating, AlternatingResult, NodeValue};
pub use deterministic::run_deterministic;
pub use gaps::{gap_stats, GapReport};
pub use nondeterministic::{run_nondeterministic, NondeterministicResult};
pub use shorten::shorten_run;

/// Resource limits for one run. Exceeding any of them ends the run with the
/// matching [`Outcome`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Limits {
    pub max_steps: u64,
    /// Cells; the head may visit indices `0..max_space`.
    pub max_space: usize,
    pub max_writes: Option<u64>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_steps: 100_000, max_space: 10_000, max_writes: None }
    }
}

impl Limits {
    pub fn new(max_steps: u64, max_space: usize) -> Self {
        Limits { max_steps, max_space, max_writes: None }
    }

    pub fn with_max_writes(mut self, writes: u64) -> Self {
        self.max_writes = Some(writes);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Accept,
    Reject,
    StepLimit,
    SpaceLimit,
    WriteLimit,
    WriteOnceViolation,
    LoopDetected,
}

impl Outcome {
    pub fn is_limit(self) -> bool {
        matches!(self, Outcome::StepLimit | Outcome::SpaceLimit | Outcome::WriteLimit)
    }

    /// Whether the outcome settles acceptance: everything except limits.
    pub fn is_conclusive(self) -> bool {
        !self.is_limit()
    }
}

/// One step of a run. The configuration it produces is the previous one with
/// `change` applied and the head and state replaced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TraceEvent {
    /// Index of the transition within `actions(previous state, read)`.
    pub action: usize,
    pub read: Symbol,
    pub state: StateId,
    pub head: usize,
    pub change: Option<CellChange>,
    pub was_write: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunTrace {
    pub initial: Configuration,
    pub events: Vec<TraceEvent>,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("engine expects a {expected} machine, got {found}")]
    WrongMode { expected: &'static str, found: &'static str },
    #[error("input symbol {0} is not in the machine alphabet")]
    SymbolOutsideAlphabet(Symbol),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid trace at event {index}: {reason}")]
pub struct InvalidTrace {
    pub index: usize,
    pub reason: String,
}

pub(crate) fn check_input(machine: &Machine, input: &[Symbol]) -> Result<(), SimError> {
    match input.iter().find(|s| !machine.in_alphabet(**s)) {
        Some(&s) => Err(SimError::SymbolOutsideAlphabet(s)),
        None => Ok(()),
    }
}

pub(crate) fn check_mode(machine: &Machine, expected: Mode) -> Result<(), SimError> {
    if machine.mode() == expected {
        Ok(())
    } else {
        Err(SimError::WrongMode { expected: expected.keyword(), found: machine.mode().keyword() })
    }
}

impl TraceEvent {
    pub(crate) fn after(action: usize, config: &Configuration, step: &crate::machine::Step) -> Self {
        TraceEvent {
            action,
            read: step.read,
            state: config.state,
            head: config.head,
            change: step.change,
            was_write: step.was_write,
        }
    }
}

impl RunTrace {
    pub fn steps(&self) -> usize {
        self.events.len()
    }

    pub fn writes(&self) -> usize {
        self.events.iter().filter(|e| e.was_write).count()
    }

    /// `1 + max head index visited`.
    pub fn space_used(&self) -> usize {
        1 + self.events.iter().map(|e| e.head).fold(self.initial.head, usize::max)
    }

    /// Every configuration of the run, initial first.
    pub fn configurations(&self) -> Vec<Configuration> {
        let mut out = Vec::with_capacity(self.events.len() + 1);
        let mut c = self.initial.clone();
        out.push(c.clone());
        for e in &self.events {
            advance(&mut c, e);
            out.push(c.clone());
        }
        out
    }

    pub fn final_configuration(&self) -> Configuration {
        let mut c = self.initial.clone();
        for e in &self.events {
            advance(&mut c, e);
        }
        c
    }

    /// `(state, head)` of every configuration, initial first.
    pub fn positions(&self) -> Vec<(StateId, usize)> {
        std::iter::once((self.initial.state, self.initial.head))
            .chain(self.events.iter().map(|e| (e.state, e.head)))
            .collect()
    }

    /// Re-runs every event against the machine and checks it is a legal step
    /// reproducing the recorded effect.
    pub fn verify(&self, machine: &Machine) -> Result<(), InvalidTrace> {
        let mut c = self.initial.clone();
        for (index, e) in self.events.iter().enumerate() {
            let fail = |reason: String| InvalidTrace { index, reason };
            if machine.is_halting(c.state) {
                return Err(fail("step taken from a halting state".into()));
            }
            let read = c.read();
            if read != e.read {
                return Err(fail(format!("recorded read {} but tape holds {read}", e.read)));
            }
            if e.action >= machine.actions(c.state, read).len() {
                return Err(fail(format!("no transition #{} for this state and symbol", e.action)));
            }
            let expected = e;
            let Some(step) = apply(machine, &mut c, e.action) else {
                return Err(fail("transition forbidden by the tape discipline".into()));
            };
            let got = TraceEvent::after(e.action, &c, &step);
            if &got != expected {
                return Err(fail(format!("recorded {expected:?}, replay gives {got:?}")));
            }
        }
        let end = self.events.len();
        let bad = |reason: &str| Err(InvalidTrace { index: end, reason: reason.into() });
        match self.outcome {
            Outcome::Accept if c.state != machine.accept() => bad("accept outcome but final state is not accepting"),
            Outcome::Reject if c.state == machine.accept() => bad("reject outcome in the accept state"),
            _ => Ok(()),
        }
    }

    /// Checks that no cell ever goes from non-blank to anything else.
    pub fn is_write_once_monotone(&self) -> bool {
        let mut written: HashSet<usize> = self
            .initial
            .tape
            .symbols()
            .iter()
            .enumerate()
            .filter(|(_, &s)| s != 0)
            .map(|(i, _)| i)
            .collect();
        for e in &self.events {
            if let Some(ch) = e.change {
                if ch.old != 0 || !written.insert(ch.cell) {
                    return false;
                }
            }
        }
        true
    }
}

fn advance(c: &mut Configuration, e: &TraceEvent) {
    if let Some(ch) = e.change {
        c.tape.set(ch.cell, ch.new);
    }
    c.state = e.state;
    c.head = e.head;
    c.steps += 1;
    if e.was_write {
        c.writes += 1;
    }
}
