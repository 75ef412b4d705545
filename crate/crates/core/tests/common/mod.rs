//! Helpers shared by the integration tests: the bundled corpus and a plain
//! step-by-step simulator with no loop detection, used as an oracle.
#![allow(dead_code)]

use std::collections::HashMap;

use wotm::cli::{bundled_corpus_dir, load_corpus, CorpusEntry};
use wotm::machine::{Discipline, Machine, MachineDescription, Mode, Move, Symbol};

pub fn corpus() -> Vec<(CorpusEntry, MachineDescription)> {
    load_corpus(&bundled_corpus_dir()).expect("bundled corpus loads")
}

pub fn corpus_machines(filter: impl Fn(&CorpusEntry) -> bool) -> Vec<(String, Machine)> {
    corpus()
        .into_iter()
        .filter(|(e, _)| filter(e))
        .map(|(e, d)| (e.file, Machine::new(d).expect("corpus machine is valid")))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleVerdict {
    Accept,
    Reject,
    Violation,
    /// Still running after the step budget.
    Running,
}

#[derive(Debug, Clone)]
pub struct OracleRun {
    pub verdict: OracleVerdict,
    pub steps: u64,
    /// Non-writing steps before, between and after writes.
    pub gaps: Vec<u64>,
    /// One more than the rightmost head position.
    pub space: usize,
    pub tape: Vec<Symbol>,
}

/// Runs a deterministic description directly from its rule list.
pub fn oracle_run(desc: &MachineDescription, input: &[Symbol], max_steps: u64) -> OracleRun {
    assert_eq!(desc.mode, Mode::Deterministic);
    let mut table: HashMap<(&str, Symbol), (Symbol, Move, &str)> = HashMap::new();
    for r in &desc.rules {
        table.entry((r.state.as_str(), r.read)).or_insert((r.write, r.mv, r.next.as_str()));
    }
    let mut tape = input.to_vec();
    let (mut q, mut head, mut steps) = (desc.start.as_str(), 0usize, 0u64);
    let mut gaps = vec![0u64];
    let mut space = 1;
    // First blank cell; only non-blank writes there can move it.
    let mut frontier = tape.iter().position(|&s| s == 0).unwrap_or(tape.len());
    let verdict = loop {
        if q == desc.accept {
            break OracleVerdict::Accept;
        }
        if q == desc.reject {
            break OracleVerdict::Reject;
        }
        if steps == max_steps {
            break OracleVerdict::Running;
        }
        if head >= tape.len() {
            tape.resize(head + 1, 0);
        }
        let read = tape[head];
        let Some(&(write, mv, next)) = table.get(&(q, read)) else { break OracleVerdict::Reject };
        let legal = match desc.discipline {
            Discipline::Standard => true,
            Discipline::WriteOnce => read == 0 || write == read,
            Discipline::WriteOnceEndOnly => {
                if read != 0 {
                    write == read
                } else {
                    write == 0 || head == frontier
                }
            }
        };
        if !legal {
            break OracleVerdict::Violation;
        }
        if read == 0 && write != 0 {
            gaps.push(0);
        } else {
            *gaps.last_mut().unwrap() += 1;
        }
        tape[head] = write;
        if head == frontier && write != 0 {
            while frontier < tape.len() && tape[frontier] != 0 {
                frontier += 1;
            }
        }
        head = match mv {
            Move::Left => head.saturating_sub(1),
            Move::Right => head + 1,
            Move::Stay => head,
        };
        space = space.max(head + 1);
        q = next;
        steps += 1;
    };
    while tape.last() == Some(&0) {
        tape.pop();
    }
    OracleRun { verdict, steps, gaps, space, tape }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}
