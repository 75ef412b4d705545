//! Machine descriptions, tape disciplines, configurations and single-step
//! semantics.
//!
//! A [`MachineDescription`] is the plain, name-based document that the text
//! format parses into and prints from. [`Machine`] is its validated, compiled
//! form: states are dense indices and the transition relation is a table
//! indexed by `(state, read symbol)`. Every simulator and transpiler works on
//! [`Machine`].

mod binarize;
pub(crate) mod builder;
mod bound;
mod format;
mod validate;

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

pub use binarize::{binarize_alphabet, BinarizeError, BlockEncoding};
pub use bound::{kexp_eval, ResourceBound, KEXP_BIT_BUDGET};
pub use format::{parse_machine, ParseError};
pub use validate::{validate_machine, Issue, IssueKind, Severity, ValidationReport};

/// A tape symbol. `0` is blank, `1` is marked; larger values appear in
/// multi-symbol and end-writer machines.
pub type Symbol = u8;

pub const BLANK: Symbol = 0;

/// Dense state index into a compiled [`Machine`].
pub type StateId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Move {
    Left,
    Right,
    Stay,
}

impl Move {
    pub fn letter(self) -> char {
        match self {
            Move::Left => 'L',
            Move::Right => 'R',
            Move::Stay => 'S',
        }
    }

    /// Head position after this move. A left move at cell 0 stays at 0.
    pub fn apply(self, head: usize) -> usize {
        match self {
            Move::Left => head.saturating_sub(1),
            Move::Right => head + 1,
            Move::Stay => head,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Deterministic,
    Nondeterministic,
    Alternating,
}

impl Mode {
    pub fn keyword(self) -> &'static str {
        match self {
            Mode::Deterministic => "deterministic",
            Mode::Nondeterministic => "nondeterministic",
            Mode::Alternating => "alternating",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Discipline {
    Standard,
    WriteOnce,
    WriteOnceEndOnly,
}

impl Discipline {
    pub fn keyword(self) -> &'static str {
        match self {
            Discipline::Standard => "standard",
            Discipline::WriteOnce => "write-once",
            Discipline::WriteOnceEndOnly => "write-once-end",
        }
    }

    pub fn is_write_once(self) -> bool {
        !matches!(self, Discipline::Standard)
    }

    /// Whether writing `write` at `head` on `tape` is allowed.
    pub fn permits(self, tape: &Tape, head: usize, write: Symbol) -> bool {
        let old = tape.get(head);
        match self {
            Discipline::Standard => true,
            Discipline::WriteOnce => old == BLANK || write == old,
            Discipline::WriteOnceEndOnly => {
                if old != BLANK {
                    write == old
                } else {
                    write == BLANK || head == tape.frontier()
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Polarity {
    Existential,
    Universal,
}

/// One `trans:` line of a description.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub state: String,
    pub read: Symbol,
    pub write: Symbol,
    pub mv: Move,
    pub next: String,
}

impl Rule {
    pub fn new(state: impl Into<String>, read: Symbol, write: Symbol, mv: Move, next: impl Into<String>) -> Self {
        Rule { state: state.into(), read, write, mv, next: next.into() }
    }
}

/// A machine as written in the text format: names, not indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachineDescription {
    pub mode: Mode,
    pub discipline: Discipline,
    pub alphabet: Vec<Symbol>,
    pub states: Vec<String>,
    pub start: String,
    pub accept: String,
    pub reject: String,
    /// States with universal polarity (alternating mode only).
    pub universal: Vec<String>,
    pub rules: Vec<Rule>,
}

impl fmt::Display for MachineDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        format::write_description(self, f)
    }
}

/// A single transition effect, with the target state resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Action {
    pub write: Symbol,
    pub mv: Move,
    pub next: StateId,
}

/// A validated, compiled machine. Immutable once built.
#[derive(Debug, Clone)]
pub struct Machine {
    desc: MachineDescription,
    names: Vec<String>,
    index: HashMap<String, StateId>,
    start: StateId,
    accept: StateId,
    reject: StateId,
    universal: Vec<bool>,
    width: usize,
    table: Vec<Vec<Action>>,
}

impl Machine {
    /// Validates and compiles a description. Warnings (such as
    /// discipline-dead transitions) do not prevent compilation.
    pub fn new(desc: MachineDescription) -> Result<Machine, ValidationReport> {
        let report = validate_machine(&desc);
        if report.has_errors() {
            return Err(report);
        }
        let names = desc.states.clone();
        let index: HashMap<String, StateId> =
            names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let width = desc.alphabet.iter().copied().max().unwrap_or(0) as usize + 1;
        let mut table = vec![Vec::new(); names.len() * width];
        for rule in &desc.rules {
            let from = index[&rule.state];
            let action = Action { write: rule.write, mv: rule.mv, next: index[&rule.next] };
            table[from * width + rule.read as usize].push(action);
        }
        let mut universal = vec![false; names.len()];
        for name in &desc.universal {
            universal[index[name]] = true;
        }
        Ok(Machine {
            start: index[&desc.start],
            accept: index[&desc.accept],
            reject: index[&desc.reject],
            desc,
            names,
            index,
            universal,
            width,
            table,
        })
    }

    pub fn description(&self) -> &MachineDescription {
        &self.desc
    }

    pub fn mode(&self) -> Mode {
        self.desc.mode
    }

    pub fn discipline(&self) -> Discipline {
        self.desc.discipline
    }

    pub fn alphabet(&self) -> &[Symbol] {
        &self.desc.alphabet
    }

    pub fn is_binary(&self) -> bool {
        self.desc.alphabet.iter().all(|&s| s <= 1)
    }

    pub fn state_count(&self) -> usize {
        self.names.len()
    }

    pub fn state_name(&self, id: StateId) -> &str {
        &self.names[id]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.index.get(name).copied()
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn accept(&self) -> StateId {
        self.accept
    }

    pub fn reject(&self) -> StateId {
        self.reject
    }

    pub fn is_halting(&self, state: StateId) -> bool {
        state == self.accept || state == self.reject
    }

    pub fn polarity(&self, state: StateId) -> Polarity {
        if self.universal[state] {
            Polarity::Universal
        } else {
            Polarity::Existential
        }
    }

    /// Transitions for `(state, read)` in declaration order.
    pub fn actions(&self, state: StateId, read: Symbol) -> &[Action] {
        let read = read as usize;
        if read >= self.width {
            return &[];
        }
        &self.table[state * self.width + read]
    }

    pub fn in_alphabet(&self, symbol: Symbol) -> bool {
        self.desc.alphabet.contains(&symbol)
    }

    /// The same machine reinterpreted under another mode. Universal marks are
    /// dropped unless the new mode is alternating.
    pub fn with_mode(&self, mode: Mode) -> Result<Machine, ValidationReport> {
        let mut desc = self.desc.clone();
        desc.mode = mode;
        if mode != Mode::Alternating {
            desc.universal.clear();
        }
        Machine::new(desc)
    }

    pub fn with_discipline(&self, discipline: Discipline) -> Result<Machine, ValidationReport> {
        let mut desc = self.desc.clone();
        desc.discipline = discipline;
        Machine::new(desc)
    }
}

impl PartialEq for Machine {
    fn eq(&self, other: &Self) -> bool {
        self.desc == other.desc
    }
}

/// One-way infinite tape. Stores no trailing blanks, so two tapes with the
/// same contents compare equal.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Tape {
    cells: Vec<Symbol>,
    /// Cached first blank cell; a function of `cells`.
    frontier: usize,
}

impl Tape {
    pub fn new(symbols: &[Symbol]) -> Self {
        let mut tape = Tape { cells: symbols.to_vec(), frontier: 0 };
        tape.trim();
        tape.frontier = tape.cells.iter().position(|&s| s == BLANK).unwrap_or(tape.cells.len());
        tape
    }

    fn trim(&mut self) {
        while self.cells.last() == Some(&BLANK) {
            self.cells.pop();
        }
    }

    pub fn get(&self, cell: usize) -> Symbol {
        self.cells.get(cell).copied().unwrap_or(BLANK)
    }

    pub fn set(&mut self, cell: usize, symbol: Symbol) {
        if cell >= self.cells.len() {
            if symbol == BLANK {
                return;
            }
            self.cells.resize(cell + 1, BLANK);
        }
        self.cells[cell] = symbol;
        self.trim();
        if symbol == BLANK {
            self.frontier = self.frontier.min(cell);
        } else if cell == self.frontier {
            while self.get(self.frontier) != BLANK {
                self.frontier += 1;
            }
        }
    }

    /// Index one past the last non-blank cell.
    pub fn extent(&self) -> usize {
        self.cells.len()
    }

    /// The first blank cell: where an end-only writer may append.
    pub fn frontier(&self) -> usize {
        self.frontier
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.cells
    }
}

/// An instantaneous description of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    pub state: StateId,
    pub head: usize,
    pub tape: Tape,
    pub steps: u64,
    /// Count of steps that turned a blank cell non-blank.
    pub writes: u64,
}

/// The part of a configuration that determines its future.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConfigKey {
    pub state: StateId,
    pub head: usize,
    pub tape: Tape,
}

impl Configuration {
    pub fn initial(machine: &Machine, input: &[Symbol]) -> Self {
        Configuration { state: machine.start(), head: 0, tape: Tape::new(input), steps: 0, writes: 0 }
    }

    pub fn key(&self) -> ConfigKey {
        ConfigKey { state: self.state, head: self.head, tape: self.tape.clone() }
    }

    pub fn read(&self) -> Symbol {
        self.tape.get(self.head)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CellChange {
    pub cell: usize,
    pub old: Symbol,
    pub new: Symbol,
}

/// What one step did to a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Step {
    /// Index of the taken transition within `actions(state, read)`.
    pub action: usize,
    pub read: Symbol,
    pub change: Option<CellChange>,
    pub was_write: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Fault {
    #[error("write-once violation in state {state} at cell {cell}: {old} -> {new}")]
    WriteOnceViolation { state: StateId, cell: usize, old: Symbol, new: Symbol },
}

/// Applies transition `action` of the current `(state, read)` pair in place.
/// Returns `None` when the discipline forbids the effect.
pub fn apply(machine: &Machine, config: &mut Configuration, action: usize) -> Option<Step> {
    let read = config.read();
    let act = machine.actions(config.state, read)[action];
    if !machine.discipline().permits(&config.tape, config.head, act.write) {
        return None;
    }
    let change = (act.write != read).then(|| CellChange { cell: config.head, old: read, new: act.write });
    let was_write = read == BLANK && act.write != BLANK;
    if change.is_some() {
        config.tape.set(config.head, act.write);
    }
    config.head = act.mv.apply(config.head);
    config.state = act.next;
    config.steps += 1;
    if was_write {
        config.writes += 1;
    }
    Some(Step { action, read, change, was_write })
}

/// All legal one-step successors of `config`.
///
/// Halting states have none; a non-halting state with no transition for the
/// symbol under the head also has none and is read as rejection. A
/// discipline-illegal transition is a fault for deterministic machines and is
/// pruned for the other modes.
pub fn successors(machine: &Machine, config: &Configuration) -> Result<Vec<(Configuration, Step)>, Fault> {
    if machine.is_halting(config.state) {
        return Ok(Vec::new());
    }
    let read = config.read();
    let actions = machine.actions(config.state, read);
    let mut out = Vec::with_capacity(actions.len());
    for (i, act) in actions.iter().enumerate() {
        let mut next = config.clone();
        match apply(machine, &mut next, i) {
            Some(step) => out.push((next, step)),
            None if machine.mode() == Mode::Deterministic => {
                return Err(Fault::WriteOnceViolation {
                    state: config.state,
                    cell: config.head,
                    old: read,
                    new: act.write,
                })
            }
            None => {}
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn marker() -> Machine {
        let desc = parse_machine(
            "mode: deterministic\ntape: write-once\nalphabet: 0 1\nstates: q0 q1 qa qr\n\
             start: q0\naccept: qa\nreject: qr\n\
             trans: q0 0 -> 1 R q1\ntrans: q0 1 -> 1 L q1\ntrans: q1 1 -> 0 R qa\n",
        )
        .unwrap();
        Machine::new(desc).unwrap()
    }

    #[test]
    fn write_step_sets_cell_and_counts() {
        let m = marker();
        let mut c = Configuration::initial(&m, &[]);
        c.head = 3;
        let succ = successors(&m, &c).unwrap();
        assert_eq!(succ.len(), 1);
        let (next, step) = &succ[0];
        assert_eq!(next.head, 4);
        assert_eq!(next.tape.get(3), 1);
        assert!(step.was_write);
        assert_eq!(next.writes, 1);
    }

    #[test]
    fn left_at_origin_stays_and_remark_is_not_a_write() {
        let m = marker();
        let c = Configuration::initial(&m, &[1]);
        let succ = successors(&m, &c).unwrap();
        let (next, step) = &succ[0];
        assert_eq!(next.head, 0);
        assert!(!step.was_write);
        assert!(step.change.is_none());
    }

    #[test]
    fn deterministic_blanking_faults() {
        let m = marker();
        let mut c = Configuration::initial(&m, &[1]);
        c.state = m.state_id("q1").unwrap();
        assert!(matches!(successors(&m, &c), Err(Fault::WriteOnceViolation { .. })));
    }

    #[test]
    fn nondeterministic_blanking_is_pruned() {
        let m = marker().with_mode(Mode::Nondeterministic).unwrap();
        let mut c = Configuration::initial(&m, &[1]);
        c.state = m.state_id("q1").unwrap();
        assert!(successors(&m, &c).unwrap().is_empty());
    }

    #[test]
    fn end_only_requires_frontier() {
        let tape = Tape::new(&[1, 2]);
        let d = Discipline::WriteOnceEndOnly;
        assert!(d.permits(&tape, 2, 1));
        assert!(!d.permits(&tape, 3, 1));
        assert!(d.permits(&tape, 3, 0));
        assert!(d.permits(&tape, 1, 2));
        assert!(!d.permits(&tape, 1, 1));
    }

    #[test]
    fn tape_never_stores_trailing_blanks() {
        let mut t = Tape::new(&[1, 0, 0]);
        assert_eq!(t.extent(), 1);
        t.set(5, 0);
        assert_eq!(t.extent(), 1);
        t.set(3, 1);
        t.set(3, 0);
        assert_eq!(t, Tape::new(&[1]));
    }
}
