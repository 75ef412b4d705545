//! Programmatic construction of machines whose states are generated on demand
//! from structured keys. Used by the transpilers and by alphabet binarization.

use std::collections::{HashMap, HashSet};
use std::hash::Hash;

use super::{Discipline, Machine, MachineDescription, Mode, Move, Rule, Symbol};

pub(crate) trait StateKey: Clone + Eq + Hash {
    /// Unique, whitespace-free state name.
    fn label(&self) -> String;
}

pub(crate) struct Synth<K: StateKey> {
    mode: Mode,
    discipline: Discipline,
    alphabet: Vec<Symbol>,
    names: HashMap<K, String>,
    order: Vec<String>,
    pending: Vec<K>,
    rules: Vec<Rule>,
    seen_rules: HashSet<Rule>,
    universal: Vec<String>,
}

impl<K: StateKey> Synth<K> {
    pub fn new(mode: Mode, discipline: Discipline, alphabet: Vec<Symbol>) -> Self {
        Synth {
            mode,
            discipline,
            alphabet,
            names: HashMap::new(),
            order: Vec::new(),
            pending: Vec::new(),
            rules: Vec::new(),
            seen_rules: HashSet::new(),
            universal: Vec::new(),
        }
    }

    /// Name of the state for `key`, scheduling it for expansion if new.
    pub fn id(&mut self, key: &K) -> String {
        if let Some(name) = self.names.get(key) {
            return name.clone();
        }
        let name = key.label();
        self.names.insert(key.clone(), name.clone());
        self.order.push(name.clone());
        self.pending.push(key.clone());
        name
    }

    pub fn next_pending(&mut self) -> Option<K> {
        self.pending.pop()
    }

    /// Adds a transition; exact duplicates are dropped.
    pub fn rule(&mut self, from: &K, read: Symbol, write: Symbol, mv: Move, to: &K) {
        let state = self.id(from);
        let next = self.id(to);
        let rule = Rule { state, read, write, mv, next };
        if self.seen_rules.insert(rule.clone()) {
            self.rules.push(rule);
        }
    }

    /// A rule that leaves the cell unchanged.
    pub fn pass(&mut self, from: &K, read: Symbol, mv: Move, to: &K) {
        self.rule(from, read, read, mv, to);
    }

    pub fn mark_universal(&mut self, key: &K) {
        let name = self.id(key);
        if !self.universal.contains(&name) {
            self.universal.push(name);
        }
    }

    pub fn finish(mut self, start: &K, accept: &K, reject: &K) -> Machine {
        let start = self.id(start);
        let accept = self.id(accept);
        let reject = self.id(reject);
        let desc = MachineDescription {
            mode: self.mode,
            discipline: self.discipline,
            alphabet: self.alphabet,
            states: self.order,
            start,
            accept,
            reject,
            universal: if self.mode == Mode::Alternating { self.universal } else { Vec::new() },
            rules: self.rules,
        };
        match Machine::new(desc) {
            Ok(m) => m,
            Err(report) => panic!("generated machine failed validation:\n{report}"),
        }
    }
}
