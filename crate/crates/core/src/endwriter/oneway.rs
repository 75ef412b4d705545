use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use crate::machine::Symbol;

use super::twoway::{Cell, Dir, TwoWayAutomaton, TwoWayStep};
use super::EndWriterError;

/// Deterministic one-way automaton with a total transition function and an
/// output per state: the result of reading the end of the input there.
#[derive(Debug, Clone)]
pub struct OneWayAutomaton<L> {
    alphabet: Vec<Symbol>,
    start: usize,
    delta: Vec<usize>,
    output: Vec<Option<L>>,
}

impl<L: Clone> OneWayAutomaton<L> {
    pub fn from_parts(alphabet: Vec<Symbol>, start: usize, delta: Vec<usize>, output: Vec<Option<L>>) -> Self {
        assert_eq!(delta.len(), output.len() * alphabet.len(), "transition table is not total");
        assert!(delta.iter().all(|&q| q < output.len()) && start < output.len());
        OneWayAutomaton { alphabet, start, delta, output }
    }

    pub fn states(&self) -> usize {
        self.output.len()
    }

    pub fn alphabet(&self) -> &[Symbol] {
        &self.alphabet
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn step(&self, state: usize, symbol: Symbol) -> usize {
        let i = self.alphabet.iter().position(|&a| a == symbol).expect("symbol outside alphabet");
        self.delta[state * self.alphabet.len() + i]
    }

    pub fn output(&self, state: usize) -> Option<&L> {
        self.output[state].as_ref()
    }

    /// State after reading `word` from `state`.
    pub fn run_from(&self, state: usize, word: &[Symbol]) -> usize {
        word.iter().fold(state, |q, &a| self.step(q, a))
    }

    /// States visited on `word`, start state first.
    pub fn trajectory(&self, word: &[Symbol]) -> Vec<usize> {
        let mut out = Vec::with_capacity(word.len() + 1);
        let mut q = self.start;
        out.push(q);
        for &a in word {
            q = self.step(q, a);
            out.push(q);
        }
        out
    }

    pub fn run(&self, word: &[Symbol]) -> Option<&L> {
        self.output(self.run_from(self.start, word))
    }
}

/// What happens after the two-way automaton enters a prefix of `⊢w`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Exit<L> {
    /// Leaves across the right edge in this state.
    Out(usize),
    Halt(L),
    Loop,
}

/// Behaviour of a prefix: how the run from the start first leaves it, and
/// how a re-entry from the right in each state leaves it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Crossing<L> {
    first: Exit<L>,
    table: Vec<Exit<L>>,
}

fn leave_cell<L: Clone + Eq + Hash>(twa: &TwoWayAutomaton<L>, table: &[Exit<L>], cell: Cell, mut r: usize) -> Exit<L> {
    let mut seen = vec![false; twa.states()];
    loop {
        if seen[r] {
            return Exit::Loop;
        }
        seen[r] = true;
        match twa.step(r, cell) {
            TwoWayStep::Halt(l) => return Exit::Halt(l.clone()),
            TwoWayStep::Go(p, Dir::Right) => return Exit::Out(*p),
            TwoWayStep::Go(p, Dir::Left) => match &table[*p] {
                Exit::Out(back) => r = *back,
                other => return other.clone(),
            },
        }
    }
}

/// Converts a two-way automaton into a one-way automaton with the same
/// output on every word, by tracking crossing behaviour of the prefix read so
/// far. Only reachable crossing tables become states. Words on which the
/// two-way automaton cycles get output `None`.
pub fn two_way_to_one_way<L: Clone + Eq + Hash>(twa: &TwoWayAutomaton<L>) -> OneWayAutomaton<L> {
    let k = twa.states();
    // Only states entered by a left move can re-enter a prefix; other
    // table entries are never consulted and stay fixed.
    let mut reentry = vec![false; k];
    for q in 0..k {
        for cell in [Cell::Start, Cell::End].into_iter().chain(twa.alphabet().iter().map(|&a| Cell::Letter(a))) {
            if let TwoWayStep::Go(p, Dir::Left) = twa.step(q, cell) {
                reentry[*p] = true;
            }
        }
    }
    let from_start = |q: usize| match twa.step(q, Cell::Start) {
        TwoWayStep::Halt(l) => Exit::Halt(l.clone()),
        TwoWayStep::Go(p, _) => Exit::Out(*p),
    };
    let column = |f: &dyn Fn(usize) -> Exit<L>| -> Vec<Exit<L>> {
        (0..k).map(|q| if reentry[q] { f(q) } else { Exit::Loop }).collect()
    };
    let initial = Crossing { first: from_start(twa.start()), table: column(&from_start) };

    let mut index: HashMap<Crossing<L>, usize> = HashMap::from([(initial.clone(), 0)]);
    let mut states = vec![initial];
    let mut delta = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    let width = twa.alphabet().len();
    while let Some(i) = queue.pop_front() {
        let mut row = Vec::with_capacity(width);
        for &a in twa.alphabet() {
            let cur = &states[i];
            let cell = Cell::Letter(a);
            let first = match &cur.first {
                Exit::Out(p) => leave_cell(twa, &cur.table, cell, *p),
                other => other.clone(),
            };
            let table = column(&|q| leave_cell(twa, &cur.table, cell, q));
            let next = Crossing { first, table };
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    let id = states.len();
                    index.insert(next.clone(), id);
                    states.push(next);
                    queue.push_back(id);
                    id
                }
            };
            row.push(id);
        }
        // Rows are produced in state order because the queue is FIFO.
        debug_assert_eq!(delta.len(), i * width);
        delta.extend(row);
    }
    let output = states
        .iter()
        .map(|c| match &c.first {
            Exit::Out(p) => match leave_cell(twa, &c.table, Cell::End, *p) {
                Exit::Halt(l) => Some(l),
                _ => None,
            },
            Exit::Halt(l) => Some(l.clone()),
            Exit::Loop => None,
        })
        .collect();
    OneWayAutomaton { alphabet: twa.alphabet().to_vec(), start: 0, delta, output }
}

/// Largest number of distinct crossing tables for a two-way automaton with
/// `states` states and `labels` halting labels: each of the `states + 1`
/// entries is an exit state, a label or a cycle.
pub fn crossing_bound(states: usize, labels: usize) -> f64 {
    ((states + labels + 1) as f64).powi(states as i32 + 1)
}

/// Synchronous product restricted to reachable tuples.
#[derive(Debug, Clone)]
pub struct Product<L> {
    pub automaton: OneWayAutomaton<Vec<Option<L>>>,
    /// Component states of every product state.
    pub tuples: Vec<Vec<usize>>,
    /// Product of the component state counts.
    pub full_size: u128,
}

impl<L> Product<L> {
    pub fn component(&self, state: usize, i: usize) -> usize {
        self.tuples[state][i]
    }
}

pub fn product<L: Clone>(automata: &[&OneWayAutomaton<L>]) -> Result<Product<L>, EndWriterError> {
    let alphabet = automata.first().map_or_else(Vec::new, |a| a.alphabet().to_vec());
    if automata.iter().any(|a| a.alphabet() != alphabet.as_slice()) {
        return Err(EndWriterError::AlphabetMismatch);
    }
    let start: Vec<usize> = automata.iter().map(|a| a.start()).collect();
    let mut index = HashMap::from([(start.clone(), 0usize)]);
    let mut tuples = vec![start];
    let mut delta = Vec::new();
    let mut i = 0;
    while i < tuples.len() {
        for &x in &alphabet {
            let next: Vec<usize> = tuples[i].iter().zip(automata).map(|(&q, a)| a.step(q, x)).collect();
            let id = *index.entry(next.clone()).or_insert_with(|| {
                tuples.push(next);
                tuples.len() - 1
            });
            delta.push(id);
        }
        i += 1;
    }
    let output = tuples
        .iter()
        .map(|t| Some(t.iter().zip(automata).map(|(&q, a)| a.output(q).cloned()).collect()))
        .collect();
    let full_size = automata.iter().fold(1u128, |n, a| n.saturating_mul(a.states() as u128));
    Ok(Product { automaton: OneWayAutomaton { alphabet, start: 0, delta, output }, tuples, full_size })
}
