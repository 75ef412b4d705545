use std::collections::{HashSet, VecDeque};

use crate::machine::{successors, Configuration, Machine, Mode, Symbol};

use super::{check_input, check_mode, Limits, Outcome, RunTrace, SimError, TraceEvent};

#[derive(Debug, Clone)]
pub struct NondeterministicResult {
    pub accepts: bool,
    /// Shortest accepting run, when one exists.
    pub witness: Option<RunTrace>,
    /// True when every configuration reachable within the limits was
    /// expanded, making a negative answer definitive for those limits.
    pub frontier_exhausted: bool,
    pub outcome: Outcome,
    pub explored: usize,
}

struct Node {
    config: Configuration,
    parent: Option<(usize, TraceEvent)>,
}

/// Breadth-first search over configurations, memoized on
/// `(state, head, tape)`. Successors are expanded in transition declaration
/// order, so the witness is a shortest accepting run and is reproducible.
pub fn run_nondeterministic(
    machine: &Machine,
    input: &[Symbol],
    limits: Limits,
) -> Result<NondeterministicResult, SimError> {
    check_input(machine, input)?;
    if machine.mode() == Mode::Alternating {
        check_mode(machine, Mode::Nondeterministic)?;
    }
    let initial = Configuration::initial(machine, input);
    let mut nodes = vec![Node { config: initial.clone(), parent: None }];
    let mut seen = HashSet::new();
    seen.insert(initial.key());
    let mut queue = VecDeque::from([0usize]);
    let mut truncated: Option<Outcome> = None;
    let mut faulted = false;

    while let Some(id) = queue.pop_front() {
        let config = &nodes[id].config;
        if config.state == machine.accept() {
            let mut events = Vec::new();
            let mut cur = id;
            while let Some((parent, event)) = nodes[cur].parent {
                events.push(event);
                cur = parent;
            }
            events.reverse();
            let witness = RunTrace { initial, events, outcome: Outcome::Accept };
            return Ok(NondeterministicResult {
                accepts: true,
                witness: Some(witness),
                frontier_exhausted: false,
                outcome: Outcome::Accept,
                explored: nodes.len(),
            });
        }
        if machine.is_halting(config.state) {
            continue;
        }
        if config.steps >= limits.max_steps {
            truncated.get_or_insert(Outcome::StepLimit);
            continue;
        }
        let succ = match successors(machine, config) {
            Ok(s) => s,
            Err(_) => {
                faulted = true;
                continue;
            }
        };
        for (next, step) in succ {
            if next.head >= limits.max_space {
                truncated.get_or_insert(Outcome::SpaceLimit);
                continue;
            }
            if limits.max_writes.is_some_and(|w| next.writes > w) {
                truncated.get_or_insert(Outcome::WriteLimit);
                continue;
            }
            if !seen.insert(next.key()) {
                continue;
            }
            let event = TraceEvent::after(step.action, &next, &step);
            nodes.push(Node { config: next, parent: Some((id, event)) });
            queue.push_back(nodes.len() - 1);
        }
    }

    let outcome = match truncated {
        Some(limit) => limit,
        None if faulted && machine.mode() == Mode::Deterministic => Outcome::WriteOnceViolation,
        None => Outcome::Reject,
    };
    Ok(NondeterministicResult {
        accepts: false,
        witness: None,
        frontier_exhausted: truncated.is_none(),
        outcome,
        explored: nodes.len(),
    })
}
