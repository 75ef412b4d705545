use serde::Serialize;

use super::RunTrace;

/// Write accounting for one run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapReport {
    pub write_count: usize,
    /// Non-writing steps before the first write, between consecutive writes,
    /// and after the last write; always `write_count + 1` entries.
    pub gaps: Vec<usize>,
    pub max_gap: usize,
    pub space_used: usize,
    pub state_count: usize,
    /// `max_gap <= space_used * state_count`.
    pub bound_check: bool,
    pub total_steps: usize,
}

pub fn gap_stats(trace: &RunTrace, state_count: usize) -> GapReport {
    let mut gaps = vec![0usize];
    for e in &trace.events {
        if e.was_write {
            gaps.push(0);
        } else {
            *gaps.last_mut().unwrap() += 1;
        }
    }
    let write_count = gaps.len() - 1;
    let max_gap = gaps.iter().copied().max().unwrap_or(0);
    let space_used = trace.space_used();
    GapReport {
        write_count,
        max_gap,
        space_used,
        state_count,
        bound_check: max_gap <= space_used * state_count,
        total_steps: trace.events.len(),
        gaps,
    }
}
