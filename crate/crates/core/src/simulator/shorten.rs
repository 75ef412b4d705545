use std::collections::HashMap;

use crate::machine::Machine;

use super::{InvalidTrace, RunTrace};

/// Removes every detour between two visits of the same `(state, head)` pair
/// inside a stretch of the run where the tape does not change.
///
/// Repetitions are excised as soon as they close, scanning left to right, and
/// the pass repeats until nothing changes. Because the tape is identical at
/// both ends of an excised segment, the result is again a legal run with the
/// same initial and final configurations and the same tape-changing events.
pub fn shorten_run(machine: &Machine, trace: &RunTrace) -> Result<RunTrace, InvalidTrace> {
    trace.verify(machine)?;
    let mut events = trace.events.clone();
    loop {
        let next = excise_once(trace, &events);
        if next.len() == events.len() {
            break;
        }
        events = next;
    }
    Ok(RunTrace { initial: trace.initial.clone(), events, outcome: trace.outcome })
}

fn excise_once(trace: &RunTrace, events: &[super::TraceEvent]) -> Vec<super::TraceEvent> {
    let mut out = Vec::with_capacity(events.len());
    // Position -> number of kept events when the position was reached.
    let mut gap: HashMap<(usize, usize), usize> = HashMap::new();
    gap.insert((trace.initial.state, trace.initial.head), 0);
    for ev in events {
        out.push(*ev);
        let pos = (ev.state, ev.head);
        if ev.change.is_some() {
            gap.clear();
            gap.insert(pos, out.len());
        } else if let Some(&len) = gap.get(&pos) {
            out.truncate(len);
            gap.retain(|_, v| *v <= len);
        } else {
            gap.insert(pos, out.len());
        }
    }
    out
}
