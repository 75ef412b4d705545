use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use super::{Discipline, MachineDescription, Mode, BLANK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IssueKind {
    EmptyStates,
    DuplicateState,
    UnknownState,
    UnknownSymbol,
    MissingBlank,
    DuplicateSymbol,
    HaltingStatesCoincide,
    HaltingStateHasTransitions,
    Nondeterminism,
    PolarityOutsideAlternating,
    DisciplineDeadTransition,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub severity: Severity,
    pub kind: IssueKind,
    pub message: String,
}

/// Every problem found in a description. Errors block compilation; warnings
/// flag transitions that can never fire under the declared discipline.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.issues.iter().any(|i| i.severity == Severity::Error)
    }

    pub fn count(&self, kind: IssueKind) -> usize {
        self.issues.iter().filter(|i| i.kind == kind).count()
    }

    fn error(&mut self, kind: IssueKind, message: String) {
        self.issues.push(Issue { severity: Severity::Error, kind, message });
    }

    fn warning(&mut self, kind: IssueKind, message: String) {
        self.issues.push(Issue { severity: Severity::Warning, kind, message });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for issue in &self.issues {
            let tag = match issue.severity {
                Severity::Error => "error",
                Severity::Warning => "warning",
            };
            writeln!(f, "{tag}: {}", issue.message)?;
        }
        Ok(())
    }
}

pub fn validate_machine(desc: &MachineDescription) -> ValidationReport {
    let mut report = ValidationReport::default();

    if desc.states.is_empty() {
        report.error(IssueKind::EmptyStates, "machine declares no states".into());
    }
    let mut declared = HashSet::new();
    for s in &desc.states {
        if !declared.insert(s.as_str()) {
            report.error(IssueKind::DuplicateState, format!("state '{s}' declared twice"));
        }
    }
    let mut symbols = HashSet::new();
    for &a in &desc.alphabet {
        if !symbols.insert(a) {
            report.error(IssueKind::DuplicateSymbol, format!("symbol {a} listed twice in alphabet"));
        }
    }
    if !symbols.contains(&BLANK) {
        report.error(IssueKind::MissingBlank, "alphabet must contain the blank symbol 0".into());
    }

    for (role, name) in [("start", &desc.start), ("accept", &desc.accept), ("reject", &desc.reject)] {
        if !declared.contains(name.as_str()) {
            report.error(IssueKind::UnknownState, format!("{role} state '{name}' is not declared"));
        }
    }
    if desc.accept == desc.reject {
        report.error(IssueKind::HaltingStatesCoincide, format!("accept and reject are both '{}'", desc.accept));
    }

    if desc.mode != Mode::Alternating && !desc.universal.is_empty() {
        report.error(
            IssueKind::PolarityOutsideAlternating,
            format!("forall states given for a {} machine", desc.mode.keyword()),
        );
    }
    for s in &desc.universal {
        if !declared.contains(s.as_str()) {
            report.error(IssueKind::UnknownState, format!("forall state '{s}' is not declared"));
        }
    }

    let mut per_pair: HashMap<(&str, u8), usize> = HashMap::new();
    for (line, rule) in desc.rules.iter().enumerate() {
        let label = format!("transition #{} ({} {} -> {} {} {})",
            line + 1, rule.state, rule.read, rule.write, rule.mv.letter(), rule.next);
        for name in [&rule.state, &rule.next] {
            if !declared.contains(name.as_str()) {
                report.error(IssueKind::UnknownState, format!("{label}: unknown state '{name}'"));
            }
        }
        for sym in [rule.read, rule.write] {
            if !symbols.contains(&sym) {
                report.error(IssueKind::UnknownSymbol, format!("{label}: symbol {sym} not in alphabet"));
            }
        }
        if rule.state == desc.accept || rule.state == desc.reject {
            report.error(
                IssueKind::HaltingStateHasTransitions,
                format!("{label}: halting state '{}' has an outgoing transition", rule.state),
            );
        }
        *per_pair.entry((rule.state.as_str(), rule.read)).or_default() += 1;

        let dead = match desc.discipline {
            Discipline::Standard => false,
            Discipline::WriteOnce | Discipline::WriteOnceEndOnly => {
                rule.read != BLANK && rule.write != rule.read
            }
        };
        if dead {
            report.warning(
                IssueKind::DisciplineDeadTransition,
                format!("{label}: overwrites a non-blank cell, forbidden under {}", desc.discipline.keyword()),
            );
        }
    }

    if desc.mode == Mode::Deterministic {
        let mut pairs: Vec<_> = per_pair.into_iter().filter(|&(_, n)| n > 1).collect();
        pairs.sort();
        for ((state, read), n) in pairs {
            report.error(
                IssueKind::Nondeterminism,
                format!("deterministic machine has {n} transitions on ({state}, {read})"),
            );
        }
    }

    report
}
