use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::machine::{successors, ConfigKey, Configuration, Machine, Mode, Polarity, Symbol};

use super::{check_input, check_mode, Limits, Outcome, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeValue {
    True,
    False,
    /// False under the limits, but would become true if some truncated
    /// configuration turned out to accept.
    Unresolved,
}

#[derive(Debug, Clone)]
pub struct AlternatingResult {
    pub accepts: bool,
    pub values: HashMap<ConfigKey, NodeValue>,
    /// Some configuration was cut off by a limit.
    pub truncated: bool,
    pub outcome: Outcome,
}

enum Kind {
    Accept,
    Dead,
    Truncated,
    Inner(Polarity),
}

/// Evaluates alternating acceptance as a least fixed point over the
/// configuration graph reachable within the limits. Accepting configurations
/// are true; existential ones need one true successor, universal ones need
/// all successors true. Rejecting, faulting, truncated and cyclic
/// configurations that are not forced true stay false.
pub fn run_alternating(machine: &Machine, input: &[Symbol], limits: Limits) -> Result<AlternatingResult, SimError> {
    check_mode(machine, Mode::Alternating)?;
    check_input(machine, input)?;

    let initial = Configuration::initial(machine, input);
    let mut index: HashMap<ConfigKey, usize> = HashMap::new();
    let mut kinds: Vec<Kind> = Vec::new();
    let mut children: Vec<Vec<usize>> = Vec::new();
    let mut configs: Vec<Configuration> = Vec::new();
    let mut truncated_by: Option<Outcome> = None;

    index.insert(initial.key(), 0);
    configs.push(initial);
    kinds.push(Kind::Dead);
    children.push(Vec::new());
    let mut queue = VecDeque::from([0usize]);

    while let Some(id) = queue.pop_front() {
        let config = configs[id].clone();
        if config.state == machine.accept() {
            kinds[id] = Kind::Accept;
            continue;
        }
        if config.state == machine.reject() {
            continue;
        }
        if config.steps >= limits.max_steps {
            kinds[id] = Kind::Truncated;
            truncated_by.get_or_insert(Outcome::StepLimit);
            continue;
        }
        let Ok(succ) = successors(machine, &config) else { continue };
        let mut kids = Vec::new();
        let mut cut = false;
        for (next, _) in succ {
            if next.head >= limits.max_space {
                truncated_by.get_or_insert(Outcome::SpaceLimit);
                cut = true;
                continue;
            }
            if limits.max_writes.is_some_and(|w| next.writes > w) {
                truncated_by.get_or_insert(Outcome::WriteLimit);
                cut = true;
                continue;
            }
            let key = next.key();
            let child = match index.get(&key) {
                Some(&c) => c,
                None => {
                    let c = configs.len();
                    index.insert(key, c);
                    configs.push(next);
                    kinds.push(Kind::Dead);
                    children.push(Vec::new());
                    queue.push_back(c);
                    c
                }
            };
            if !kids.contains(&child) {
                kids.push(child);
            }
        }
        if cut {
            // A limit removed a successor: model it as a truncated child.
            let c = configs.len();
            configs.push(config.clone());
            kinds.push(Kind::Truncated);
            children.push(Vec::new());
            kids.push(c);
        }
        if !kids.is_empty() {
            kinds[id] = Kind::Inner(machine.polarity(config.state));
            children[id] = kids;
        }
    }

    let lower = solve(&kinds, &children, false);
    let upper = solve(&kinds, &children, true);
    let mut values = HashMap::with_capacity(index.len());
    for (key, &id) in &index {
        let v = match (lower[id], upper[id]) {
            (true, _) => NodeValue::True,
            (false, true) => NodeValue::Unresolved,
            (false, false) => NodeValue::False,
        };
        values.insert(key.clone(), v);
    }
    let accepts = lower[0];
    let outcome = if accepts {
        Outcome::Accept
    } else if upper[0] {
        truncated_by.unwrap_or(Outcome::StepLimit)
    } else {
        Outcome::Reject
    };
    Ok(AlternatingResult { accepts, values, truncated: truncated_by.is_some(), outcome })
}

/// Least fixed point, with truncated nodes fixed to `truncated_value`.
fn solve(kinds: &[Kind], children: &[Vec<usize>], truncated_value: bool) -> Vec<bool> {
    let n = kinds.len();
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (p, kids) in children.iter().enumerate() {
        for &c in kids {
            parents[c].push(p);
        }
    }
    let mut value = vec![false; n];
    let mut remaining: Vec<usize> = children.iter().map(Vec::len).collect();
    let mut work: Vec<usize> = Vec::new();
    for (i, k) in kinds.iter().enumerate() {
        let base = match k {
            Kind::Accept => true,
            Kind::Truncated => truncated_value,
            _ => false,
        };
        if base {
            value[i] = true;
            work.push(i);
        }
    }
    while let Some(c) = work.pop() {
        for &p in &parents[c] {
            if value[p] {
                continue;
            }
            let fire = match kinds[p] {
                Kind::Inner(Polarity::Existential) => true,
                Kind::Inner(Polarity::Universal) => {
                    remaining[p] -= 1;
                    remaining[p] == 0
                }
                _ => false,
            };
            if fire {
                value[p] = true;
                work.push(p);
            }
        }
    }
    value
}
