use std::collections::{HashMap, HashSet};

use crate::machine::{Action, Discipline, Machine, Mode, Move, StateId, Symbol, BLANK};

use super::twoway::{Cell, Dir, TwoWayAutomaton, TwoWayStep};
use super::{EndWriterError, Halt};

#[derive(Clone, Copy)]
enum Ret {
    /// Came back to the frontier cell in this state.
    Back(StateId),
    Halt(Halt),
}

enum Memo {
    InProgress,
    Done(Ret),
}

/// Shared machinery for reading a deterministic end-writer as a two-way
/// automaton over its written word.
///
/// On `⊣` (the frontier cell) the automaton folds together everything the
/// machine does on blank cells: stationary steps and excursions into the
/// blank region to the right. The region is uniform, so the effect of
/// entering it in state `q` only depends on `q`.
struct Reader<'a> {
    m: &'a Machine,
    memo: HashMap<StateId, Memo>,
}

impl<'a> Reader<'a> {
    fn new(m: &'a Machine) -> Result<Self, EndWriterError> {
        check_end_writer(m)?;
        Ok(Reader { m, memo: HashMap::new() })
    }

    fn action(&self, q: StateId, read: Symbol) -> Option<Action> {
        self.m.actions(q, read).first().copied()
    }

    fn halting_label(&self, q: StateId) -> Option<Halt> {
        if q == self.m.accept() {
            Some(Halt::Accept)
        } else if q == self.m.reject() {
            Some(Halt::Reject)
        } else {
            None
        }
    }

    /// Run from state `q0` one cell right of the frontier until the head
    /// first comes back to the frontier.
    fn ret(&mut self, q0: StateId) -> Ret {
        match self.memo.get(&q0) {
            Some(Memo::InProgress) => return Ret::Halt(Halt::Diverge),
            Some(Memo::Done(r)) => return *r,
            None => {}
        }
        self.memo.insert(q0, Memo::InProgress);
        let mut q = q0;
        let mut seen = HashSet::new();
        let r = loop {
            if !seen.insert(q) {
                break Ret::Halt(Halt::Diverge);
            }
            let Some(act) = self.action(q, BLANK) else { break Ret::Halt(Halt::Reject) };
            if act.write != BLANK {
                break Ret::Halt(Halt::Fault);
            }
            if let Some(h) = self.halting_label(act.next) {
                break Ret::Halt(h);
            }
            match act.mv {
                Move::Left => break Ret::Back(act.next),
                Move::Stay => q = act.next,
                Move::Right => match self.ret(act.next) {
                    Ret::Back(p) => q = p,
                    h => break h,
                },
            }
        };
        self.memo.insert(q0, Memo::Done(r));
        r
    }

    /// Transition on `⊣` for a non-halting machine state.
    fn at_end(&mut self, mut q: StateId) -> TwoWayStep<Halt> {
        let mut seen = HashSet::new();
        loop {
            if !seen.insert(q) {
                return TwoWayStep::Halt(Halt::Diverge);
            }
            let Some(act) = self.action(q, BLANK) else { return TwoWayStep::Halt(Halt::Reject) };
            if act.write != BLANK {
                return TwoWayStep::Halt(Halt::Write { state: q, symbol: act.write });
            }
            if let Some(h) = self.halting_label(act.next) {
                return TwoWayStep::Halt(h);
            }
            match act.mv {
                Move::Left => return TwoWayStep::Go(act.next, Dir::Left),
                Move::Stay => q = act.next,
                Move::Right => match self.ret(act.next) {
                    Ret::Back(p) => q = p,
                    Ret::Halt(h) => return TwoWayStep::Halt(h),
                },
            }
        }
    }

    /// Transition on a written letter; rewriting it with anything else is a
    /// fault.
    fn at_letter(&self, mut q: StateId, x: Symbol) -> TwoWayStep<Halt> {
        let mut seen = HashSet::new();
        loop {
            if !seen.insert(q) {
                return TwoWayStep::Halt(Halt::Diverge);
            }
            let Some(act) = self.action(q, x) else { return TwoWayStep::Halt(Halt::Reject) };
            if act.write != x {
                return TwoWayStep::Halt(Halt::Fault);
            }
            if let Some(h) = self.halting_label(act.next) {
                return TwoWayStep::Halt(h);
            }
            match act.mv {
                Move::Left => return TwoWayStep::Go(act.next, Dir::Left),
                Move::Right => return TwoWayStep::Go(act.next, Dir::Right),
                Move::Stay => q = act.next,
            }
        }
    }

    /// Row of a machine state; halting states halt on every cell.
    fn machine_row(&mut self, q: StateId, cell: Cell) -> TwoWayStep<Halt> {
        if let Some(h) = self.halting_label(q) {
            return TwoWayStep::Halt(h);
        }
        match cell {
            // The machine cannot move left of cell 0: bounce back.
            Cell::Start => TwoWayStep::Go(q, Dir::Right),
            Cell::End => self.at_end(q),
            Cell::Letter(x) => self.at_letter(q, x),
        }
    }
}

pub(crate) fn check_end_writer(m: &Machine) -> Result<(), EndWriterError> {
    if m.discipline() != Discipline::WriteOnceEndOnly {
        return Err(EndWriterError::NotEndWriter(m.discipline().keyword()));
    }
    if m.mode() != Mode::Deterministic {
        return Err(EndWriterError::NotDeterministic(m.mode().keyword()));
    }
    Ok(())
}

/// Non-blank symbols of the machine: the letters of its written words.
pub fn letters(m: &Machine) -> Vec<Symbol> {
    m.alphabet().iter().copied().filter(|&a| a != BLANK).collect()
}

/// States whose action on a blank cell writes a non-blank symbol.
pub fn writing_states(m: &Machine) -> Vec<StateId> {
    (0..m.state_count())
        .filter(|&q| !m.is_halting(q) && m.actions(q, BLANK).first().is_some_and(|a| a.write != BLANK))
        .collect()
}

/// Automaton for the stretch of the run that starts right after state `s`
/// wrote its symbol at the end of the word. Run on the word including that
/// symbol, it halts with the next write (writing state and symbol) or with
/// the verdict reached before any further write.
///
/// States `0..n` are the machine states; `n` walks to `⊣` to find the head,
/// and `n + 1` takes one extra step left when the write moved the head left.
pub fn between_writes_automaton(m: &Machine, s: StateId) -> Result<TwoWayAutomaton<Halt>, EndWriterError> {
    let mut r = Reader::new(m)?;
    let write = match r.action(s, BLANK) {
        Some(a) if a.write != BLANK && !m.is_halting(s) => a,
        _ => return Err(EndWriterError::NotAWritingState(m.state_name(s).to_string())),
    };
    let n = m.state_count();
    let (seek, back) = (n, n + 1);
    let after = write.next;
    TwoWayAutomaton::new(n + 2, letters(m), seek, |q, cell| {
        if q == seek {
            return match cell {
                Cell::End => match (r.halting_label(after), write.mv) {
                    (Some(h), _) => TwoWayStep::Halt(h),
                    (None, Move::Right) => r.at_end(after),
                    (None, Move::Stay) => TwoWayStep::Go(after, Dir::Left),
                    (None, Move::Left) => TwoWayStep::Go(back, Dir::Left),
                },
                _ => TwoWayStep::Go(seek, Dir::Right),
            };
        }
        if q == back {
            return match cell {
                Cell::Start => TwoWayStep::Go(after, Dir::Right),
                _ => TwoWayStep::Go(after, Dir::Left),
            };
        }
        r.machine_row(q, cell)
    })
}

/// Automaton for the stretch of the run from the initial configuration to
/// the first write, run on the input word.
pub fn initial_automaton(m: &Machine) -> Result<TwoWayAutomaton<Halt>, EndWriterError> {
    let mut r = Reader::new(m)?;
    let n = m.state_count();
    let init = n;
    TwoWayAutomaton::new(n + 1, letters(m), init, |q, cell| {
        if q == init {
            return match (cell, r.halting_label(m.start())) {
                (Cell::Start, Some(h)) => TwoWayStep::Halt(h),
                (Cell::Start, None) => TwoWayStep::Go(m.start(), Dir::Right),
                (Cell::End, _) => TwoWayStep::Halt(Halt::Diverge),
                _ => TwoWayStep::Go(init, Dir::Right),
            };
        }
        r.machine_row(q, cell)
    })
}
