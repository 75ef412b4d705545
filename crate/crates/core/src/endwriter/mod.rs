//! Analysis of deterministic machines that only write at the end of their
//! written word.
//!
//! Between two writes such a machine behaves like a two-way automaton reading
//! the written word. Each of those automata is turned into a one-way automaton
//! and their product drives a pumping argument: any stored word longer than
//! the product has states can be shortened without changing what happens
//! next. The decider in [`decide_acceptance`] keeps only such shortened words.

mod automata;
mod decide;
mod oneway;
mod pumping;
mod twoway;

use serde::Serialize;

use crate::machine::{StateId, Symbol};

pub use automata::{between_writes_automaton, initial_automaton, letters, writing_states};
pub use decide::{analyze, decide_acceptance, decide_with, AnalysisReport, ComponentReport, Decision, DecideVerdict, EndWriterAnalysis};
pub use oneway::{crossing_bound, product, two_way_to_one_way, OneWayAutomaton, Product};
pub use pumping::{pump_down, pumping_threshold, NoRepeat, PumpCertificate, Threshold};
pub use twoway::{Cell, Dir, TwoWayAutomaton, TwoWayRun, TwoWayStep};

/// How a stretch of an end-writer's run between writes ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Halt {
    /// State `state` writes `symbol` at the end of the word.
    Write { state: StateId, symbol: Symbol },
    Accept,
    Reject,
    /// A write that breaks the end-only discipline.
    Fault,
    /// The machine never writes again and never halts.
    Diverge,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EndWriterError {
    #[error("state {0} out of range")]
    StateOutOfRange(usize),
    #[error("state {state} moves past an end marker")]
    EndmarkerMove { state: usize },
    #[error("symbol {0} outside the automaton alphabet")]
    SymbolOutsideAlphabet(Symbol),
    #[error("automata have different alphabets")]
    AlphabetMismatch,
    #[error("expected a write-once-end tape, got {0}")]
    NotEndWriter(&'static str),
    #[error("expected a deterministic machine, got {0}")]
    NotDeterministic(&'static str),
    #[error("state {0} does not write on a blank cell")]
    NotAWritingState(String),
    #[error("input contains a blank")]
    BlankInInput,
}
