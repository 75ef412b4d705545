use std::collections::HashSet;

use crate::machine::{apply, Configuration, Machine, Mode, Symbol};

use super::{check_input, check_mode, Limits, Outcome, RunTrace, SimError, TraceEvent};

/// Runs a deterministic machine to completion or a limit.
///
/// Between two tape changes the tape is fixed, so the machine behaves like a
/// two-way automaton over it: if a `(state, head)` pair repeats before the
/// next change the run can never halt and is reported as
/// [`Outcome::LoopDetected`]. The pair set is cleared whenever a cell changes.
pub fn run_deterministic(machine: &Machine, input: &[Symbol], limits: Limits) -> Result<RunTrace, SimError> {
    check_mode(machine, Mode::Deterministic)?;
    check_input(machine, input)?;
    let initial = Configuration::initial(machine, input);
    let mut config = initial.clone();
    let mut events = Vec::new();
    let mut seen = HashSet::new();
    seen.insert((config.state, config.head));

    let outcome = loop {
        if config.state == machine.accept() {
            break Outcome::Accept;
        }
        if config.state == machine.reject() {
            break Outcome::Reject;
        }
        if config.steps >= limits.max_steps {
            break Outcome::StepLimit;
        }
        if machine.actions(config.state, config.read()).is_empty() {
            break Outcome::Reject;
        }
        let Some(step) = apply(machine, &mut config, 0) else {
            break Outcome::WriteOnceViolation;
        };
        events.push(TraceEvent::after(0, &config, &step));
        if config.head >= limits.max_space {
            break Outcome::SpaceLimit;
        }
        if limits.max_writes.is_some_and(|w| config.writes > w) {
            break Outcome::WriteLimit;
        }
        if step.change.is_some() {
            seen.clear();
        }
        if !seen.insert((config.state, config.head)) {
            break Outcome::LoopDetected;
        }
    };
    Ok(RunTrace { initial, events, outcome })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::parse_machine;

    fn machine(body: &str) -> Machine {
        let text = format!(
            "mode: deterministic\ntape: write-once\nalphabet: 0 1\nstates: q0 q1 q2 qa qr\n\
             start: q0\naccept: qa\nreject: qr\n{body}"
        );
        Machine::new(parse_machine(&text).unwrap()).unwrap()
    }

    #[test]
    fn marker_accepts_after_three_writes() {
        let m = machine("trans: q0 0 -> 1 R q1\ntrans: q1 0 -> 1 R q2\ntrans: q2 0 -> 1 R qa\n");
        let t = run_deterministic(&m, &[0, 0, 0], Limits::default()).unwrap();
        assert_eq!(t.outcome, Outcome::Accept);
        assert_eq!(t.writes(), 3);
        assert_eq!(t.steps(), 3);
        t.verify(&m).unwrap();
    }

    #[test]
    fn ping_pong_loops() {
        let m = machine("trans: q0 1 -> 1 R q1\ntrans: q1 1 -> 1 L q0\n");
        let t = run_deterministic(&m, &[1, 1], Limits::default()).unwrap();
        assert_eq!(t.outcome, Outcome::LoopDetected);
        assert_eq!(t.steps(), 2);
    }

    #[test]
    fn runaway_hits_space_limit() {
        let m = machine("trans: q0 0 -> 0 R q0\n");
        let t = run_deterministic(&m, &[], Limits::new(1_000, 50)).unwrap();
        assert_eq!(t.outcome, Outcome::SpaceLimit);
    }

    #[test]
    fn write_limit_is_distinct() {
        let m = machine("trans: q0 0 -> 1 R q0\n");
        let t = run_deterministic(&m, &[], Limits::new(1_000, 500).with_max_writes(4)).unwrap();
        assert_eq!(t.outcome, Outcome::WriteLimit);
        assert_eq!(t.writes(), 5);
    }

    #[test]
    fn missing_transition_rejects() {
        let m = machine("trans: q0 0 -> 1 R q1\n");
        let t = run_deterministic(&m, &[], Limits::default()).unwrap();
        assert_eq!(t.outcome, Outcome::Reject);
    }

    #[test]
    fn violation_is_a_fault() {
        let m = machine("trans: q0 1 -> 0 R qa\n");
        let t = run_deterministic(&m, &[1], Limits::default()).unwrap();
        assert_eq!(t.outcome, Outcome::WriteOnceViolation);
    }

    #[test]
    fn wrong_mode_is_an_error() {
        let m = machine("").with_mode(Mode::Nondeterministic).unwrap();
        assert!(run_deterministic(&m, &[], Limits::default()).is_err());
    }
}
