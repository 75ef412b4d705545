use std::collections::HashSet;
use std::hash::Hash;

use crate::machine::Symbol;

use super::EndWriterError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dir {
    Left,
    Right,
}

/// A tape cell of `⊢w⊣`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Start,
    End,
    Letter(Symbol),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TwoWayStep<L> {
    Go(usize, Dir),
    Halt(L),
}

/// Deterministic two-way automaton over `⊢w⊣` that halts with an output
/// label. It starts on `⊢`; it may not move left of `⊢` or right of `⊣`.
#[derive(Debug, Clone)]
pub struct TwoWayAutomaton<L> {
    states: usize,
    alphabet: Vec<Symbol>,
    start: usize,
    delta: Vec<TwoWayStep<L>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoWayRun<L> {
    /// `None` when the automaton cycles forever.
    pub output: Option<L>,
    pub steps: usize,
}

impl<L: Clone + Eq + Hash> TwoWayAutomaton<L> {
    pub fn new(
        states: usize,
        alphabet: Vec<Symbol>,
        start: usize,
        mut delta: impl FnMut(usize, Cell) -> TwoWayStep<L>,
    ) -> Result<Self, EndWriterError> {
        if start >= states {
            return Err(EndWriterError::StateOutOfRange(start));
        }
        let cells: Vec<Cell> = [Cell::Start, Cell::End]
            .into_iter()
            .chain(alphabet.iter().map(|&a| Cell::Letter(a)))
            .collect();
        let mut table = Vec::with_capacity(states * cells.len());
        for q in 0..states {
            for &cell in &cells {
                let step = delta(q, cell);
                match (&step, cell) {
                    (TwoWayStep::Go(p, _), _) if *p >= states => return Err(EndWriterError::StateOutOfRange(*p)),
                    (TwoWayStep::Go(_, Dir::Left), Cell::Start) | (TwoWayStep::Go(_, Dir::Right), Cell::End) => {
                        return Err(EndWriterError::EndmarkerMove { state: q });
                    }
                    _ => {}
                }
                table.push(step);
            }
        }
        Ok(TwoWayAutomaton { states, alphabet, start, delta: table })
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn alphabet(&self) -> &[Symbol] {
        &self.alphabet
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub(crate) fn column(&self, cell: Cell) -> usize {
        match cell {
            Cell::Start => 0,
            Cell::End => 1,
            Cell::Letter(a) => 2 + self.alphabet.iter().position(|&x| x == a).expect("letter outside alphabet"),
        }
    }

    pub fn step(&self, state: usize, cell: Cell) -> &TwoWayStep<L> {
        &self.delta[state * (self.alphabet.len() + 2) + self.column(cell)]
    }

    /// Distinct halting labels appearing in the table.
    pub fn labels(&self) -> Vec<L> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for s in &self.delta {
            if let TwoWayStep::Halt(l) = s {
                if seen.insert(l.clone()) {
                    out.push(l.clone());
                }
            }
        }
        out
    }

    pub fn check_word(&self, word: &[Symbol]) -> Result<(), EndWriterError> {
        match word.iter().find(|a| !self.alphabet.contains(a)) {
            Some(&a) => Err(EndWriterError::SymbolOutsideAlphabet(a)),
            None => Ok(()),
        }
    }

    /// Direct simulation on `⊢word⊣`.
    pub fn run(&self, word: &[Symbol]) -> TwoWayRun<L> {
        let n = word.len();
        let mut visited = vec![false; self.states * (n + 2)];
        let (mut q, mut pos, mut steps) = (self.start, 0usize, 0usize);
        loop {
            let seen = &mut visited[q * (n + 2) + pos];
            if *seen {
                return TwoWayRun { output: None, steps };
            }
            *seen = true;
            let cell = match pos {
                0 => Cell::Start,
                p if p == n + 1 => Cell::End,
                p => Cell::Letter(word[p - 1]),
            };
            steps += 1;
            match self.step(q, cell) {
                TwoWayStep::Halt(l) => return TwoWayRun { output: Some(l.clone()), steps },
                TwoWayStep::Go(p, Dir::Left) => {
                    q = *p;
                    pos -= 1;
                }
                TwoWayStep::Go(p, Dir::Right) => {
                    q = *p;
                    pos += 1;
                }
            }
        }
    }
}
