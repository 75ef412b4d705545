//! Write-once memory codes.
//!
//! A code stores one logical value in a fixed number of physical bits that
//! may only go from 0 to 1, while still allowing a bounded number of updates.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhysicalWord(Vec<u8>);

impl PhysicalWord {
    pub fn zeros(width: usize) -> Self {
        PhysicalWord(vec![0; width])
    }

    /// Panics if some entry is not 0 or 1.
    pub fn from_bits(bits: Vec<u8>) -> Self {
        assert!(bits.iter().all(|&b| b <= 1), "physical bits must be 0 or 1");
        PhysicalWord(bits)
    }

    pub fn parse(text: &str) -> Option<Self> {
        text.chars()
            .map(|c| match c {
                '0' => Some(0),
                '1' => Some(1),
                _ => None,
            })
            .collect::<Option<Vec<u8>>>()
            .map(PhysicalWord)
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    /// Every bit set in `earlier` is still set here.
    pub fn covers(&self, earlier: &PhysicalWord) -> bool {
        self.0.len() == earlier.0.len() && self.0.iter().zip(&earlier.0).all(|(&n, &o)| n >= o)
    }
}

impl fmt::Display for PhysicalWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl Serialize for PhysicalWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WomError {
    #[error("update budget of {budget} exhausted")]
    CapacityExhausted { budget: usize },
    #[error("word {word} is not reachable by any legal update sequence")]
    InvalidState { word: PhysicalWord },
    #[error("update from {from} to {to} clears a bit")]
    NonMonotone { from: PhysicalWord, to: PhysicalWord },
    #[error("value {value} outside 0..{value_count}")]
    ValueOutOfRange { value: usize, value_count: usize },
    #[error("invalid code parameters: {0}")]
    InvalidParameters(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Scheme {
    /// One slot per update: a presence bit followed by the value bits,
    /// most significant first.
    Slot { value_bits: usize },
    /// `tables[g][v]` is the word holding value `v` after `g + 1`
    /// value-changing updates.
    Generational { tables: Vec<Vec<PhysicalWord>> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WomCode {
    name: String,
    value_count: usize,
    update_budget: usize,
    width: usize,
    scheme: Scheme,
}

/// Where a reachable word sits: how many value-changing updates produced it
/// and the value it holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Decoded {
    pub generation: usize,
    pub value: usize,
}

/// Storage accounting attached to a code.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodeMetadata {
    pub width: usize,
    /// Bits needed to store the value `u` times without a code.
    pub naive_width: usize,
    /// `width / ceil(log2 value_count)`: physical bits per logical bit.
    pub storage_factor: f64,
    /// Asymptotic factor `u / log2 u` achievable by optimal code families.
    /// Recorded for comparison only; no code here attains it in general.
    pub cited_factor: f64,
}

fn bits_for(value_count: usize) -> usize {
    (usize::BITS - (value_count.max(2) - 1).leading_zeros()) as usize
}

pub fn slot_code(value_bits: usize, updates: usize) -> Result<WomCode, WomError> {
    if value_bits == 0 || updates == 0 {
        return Err(WomError::InvalidParameters("value_bits and updates must be at least 1".into()));
    }
    if value_bits > 16 {
        return Err(WomError::InvalidParameters("value_bits above 16 is not supported".into()));
    }
    Ok(WomCode {
        name: format!("slot:{value_bits},{updates}"),
        value_count: 1 << value_bits,
        update_budget: updates,
        width: updates * (value_bits + 1),
        scheme: Scheme::Slot { value_bits },
    })
}

/// The classic four-value, two-update code on three bits.
pub fn rivest_shamir_code() -> WomCode {
    let w = |s: &str| PhysicalWord::parse(s).unwrap();
    let first = vec![w("000"), w("100"), w("010"), w("001")];
    let second = vec![w("111"), w("011"), w("101"), w("110")];
    WomCode {
        name: "rs".into(),
        value_count: 4,
        update_budget: 2,
        width: 3,
        scheme: Scheme::Generational { tables: vec![first, second] },
    }
}

impl WomCode {
    /// Builds a code from explicit per-generation tables. The tables are not
    /// checked; run [`verify_code`] to certify them.
    pub fn from_tables(name: &str, tables: Vec<Vec<PhysicalWord>>) -> Result<WomCode, WomError> {
        let value_count = tables.first().map_or(0, Vec::len);
        let width = tables.first().and_then(|t| t.first()).map_or(0, PhysicalWord::width);
        if value_count < 2 || width == 0 {
            return Err(WomError::InvalidParameters("need at least two values and one bit".into()));
        }
        if tables.iter().any(|t| t.len() != value_count || t.iter().any(|p| p.width() != width)) {
            return Err(WomError::InvalidParameters("ragged code table".into()));
        }
        Ok(WomCode {
            name: name.into(),
            value_count,
            update_budget: tables.len(),
            width,
            scheme: Scheme::Generational { tables },
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value_count(&self) -> usize {
        self.value_count
    }

    pub fn update_budget(&self) -> usize {
        self.update_budget
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn fresh(&self) -> PhysicalWord {
        PhysicalWord::zeros(self.width)
    }

    pub fn metadata(&self) -> CodeMetadata {
        let logical = bits_for(self.value_count);
        let u = self.update_budget as f64;
        CodeMetadata {
            width: self.width,
            naive_width: self.update_budget * logical,
            storage_factor: self.width as f64 / logical as f64,
            cited_factor: if self.update_budget < 2 { 1.0 } else { u / u.log2() },
        }
    }

    /// Generation and value of a reachable word.
    pub fn locate(&self, phys: &PhysicalWord) -> Result<Decoded, WomError> {
        let invalid = || WomError::InvalidState { word: phys.clone() };
        if phys.width() != self.width {
            return Err(invalid());
        }
        match &self.scheme {
            Scheme::Slot { value_bits } => {
                let b = *value_bits;
                let mut generation = 0;
                let mut last = 0;
                for (i, slot) in phys.bits().chunks(b + 1).enumerate() {
                    let value = slot[1..].iter().fold(0usize, |acc, &bit| acc << 1 | bit as usize);
                    if slot[0] == 0 {
                        if value != 0 {
                            return Err(invalid());
                        }
                        continue;
                    }
                    if i != generation || value == last {
                        return Err(invalid());
                    }
                    generation += 1;
                    last = value;
                }
                Ok(Decoded { generation, value: last })
            }
            Scheme::Generational { tables } => {
                if phys.weight() == 0 {
                    return Ok(Decoded { generation: 0, value: 0 });
                }
                for (g, table) in tables.iter().enumerate() {
                    if let Some(v) = table.iter().position(|p| p == phys) {
                        return Ok(Decoded { generation: g + 1, value: v });
                    }
                }
                Err(invalid())
            }
        }
    }

    /// The word after writing `value` over `phys`, without monotonicity
    /// checks.
    fn next_word(&self, phys: &PhysicalWord, at: Decoded, value: usize) -> PhysicalWord {
        match &self.scheme {
            Scheme::Slot { value_bits } => {
                let b = *value_bits;
                let mut bits = phys.bits().to_vec();
                let base = at.generation * (b + 1);
                bits[base] = 1;
                for j in 0..b {
                    bits[base + 1 + j] = (value >> (b - 1 - j) & 1) as u8;
                }
                PhysicalWord(bits)
            }
            Scheme::Generational { tables } => tables[at.generation][value].clone(),
        }
    }

    /// Human-readable table: one line per `(generation, value)`.
    ///
    /// For slot codes the pattern shows only the slot written by that
    /// generation; other positions are printed as `.`.
    pub fn table_lines(&self) -> Vec<String> {
        let mut lines = vec![format!("gen 0 value 0 -> {}", self.fresh())];
        match &self.scheme {
            Scheme::Slot { value_bits } => {
                let b = *value_bits;
                for g in 0..self.update_budget {
                    for v in 0..self.value_count {
                        let mut cells = vec!['.'; self.width];
                        let base = g * (b + 1);
                        cells[base] = '1';
                        for j in 0..b {
                            cells[base + 1 + j] = if v >> (b - 1 - j) & 1 == 1 { '1' } else { '0' };
                        }
                        let pattern: String = cells.into_iter().collect();
                        lines.push(format!("gen {} value {v} -> {pattern}", g + 1));
                    }
                }
            }
            Scheme::Generational { tables } => {
                for (g, table) in tables.iter().enumerate() {
                    for (v, p) in table.iter().enumerate() {
                        lines.push(format!("gen {} value {v} -> {p}", g + 1));
                    }
                }
            }
        }
        lines
    }

    /// Every word reachable from the fresh word, in breadth-first order.
    pub fn reachable_words(&self) -> Vec<(PhysicalWord, Decoded)> {
        let fresh = self.fresh();
        let mut seen = HashSet::from([fresh.clone()]);
        let mut out = vec![(fresh.clone(), Decoded { generation: 0, value: 0 })];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let (word, at) = out[i].clone();
            if at.generation == self.update_budget {
                continue;
            }
            for v in 0..self.value_count {
                if v == at.value {
                    continue;
                }
                let next = self.next_word(&word, at, v);
                if seen.insert(next.clone()) {
                    out.push((next, Decoded { generation: at.generation + 1, value: v }));
                    queue.push_back(out.len() - 1);
                }
            }
        }
        out
    }
}

impl fmt::Display for WomCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (values {}, updates {}, width {})",
            self.name, self.value_count, self.update_budget, self.width
        )
    }
}

pub fn wom_decode(code: &WomCode, phys: &PhysicalWord) -> Result<usize, WomError> {
    code.locate(phys).map(|d| d.value)
}

pub fn wom_update(code: &WomCode, phys: &PhysicalWord, value: usize) -> Result<PhysicalWord, WomError> {
    if value >= code.value_count {
        return Err(WomError::ValueOutOfRange { value, value_count: code.value_count });
    }
    let at = code.locate(phys)?;
    if at.value == value {
        return Ok(phys.clone());
    }
    if at.generation >= code.update_budget {
        return Err(WomError::CapacityExhausted { budget: code.update_budget });
    }
    let next = code.next_word(phys, at, value);
    if !next.covers(phys) {
        return Err(WomError::NonMonotone { from: phys.clone(), to: next });
    }
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    Monotonicity,
    Decode,
    NoOp,
    Capacity,
    InvalidState,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// The update sequence that exposed the problem.
    pub sequence: Vec<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub code: String,
    pub max_sequence: usize,
    pub sequences_checked: usize,
    pub violations: Vec<Violation>,
    pub metadata: CodeMetadata,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Upper limit on the number of sequences [`verify_code`] enumerates.
pub const VERIFY_SEQUENCE_BUDGET: usize = 1 << 20;

/// Exhaustively checks every sequence of value-changing updates of length up
/// to `min(max_sequence, u)`, plus every same-value rewrite and every
/// over-budget update along the way.
///
/// `max_sequence` is lowered until the enumeration fits in
/// [`VERIFY_SEQUENCE_BUDGET`].
pub fn verify_code(code: &WomCode, max_sequence: usize) -> VerifyReport {
    let mut len = max_sequence.min(code.update_budget);
    let branching = code.value_count.saturating_sub(1).max(1);
    while len > 0 && branching.checked_pow(len as u32).is_none_or(|n| n > VERIFY_SEQUENCE_BUDGET) {
        len -= 1;
    }
    let mut report = VerifyReport {
        code: code.name.clone(),
        max_sequence: len,
        sequences_checked: 0,
        violations: Vec::new(),
        metadata: code.metadata(),
    };
    let fresh = code.fresh();
    match wom_decode(code, &fresh) {
        Ok(0) => {}
        other => report.violations.push(Violation {
            kind: ViolationKind::Decode,
            sequence: vec![],
            detail: format!("fresh word decodes to {other:?}"),
        }),
    }
    let mut seq = Vec::new();
    walk(code, &fresh, 0, len, &mut seq, &mut report);
    report
}

fn walk(code: &WomCode, word: &PhysicalWord, current: usize, len: usize, seq: &mut Vec<usize>, report: &mut VerifyReport) {
    report.sequences_checked += 1;
    fn record(report: &mut VerifyReport, kind: ViolationKind, seq: &[usize], detail: String) {
        report.violations.push(Violation { kind, sequence: seq.to_vec(), detail });
    }

    seq.push(current);
    match wom_update(code, word, current) {
        Ok(w) if &w == word => {}
        other => record(report, ViolationKind::NoOp, seq, format!("same-value update gave {other:?}")),
    }
    seq.pop();

    let spent = seq.len() == code.update_budget;
    for v in 0..code.value_count {
        if v == current {
            continue;
        }
        seq.push(v);
        let result = wom_update(code, word, v);
        if spent {
            if !matches!(result, Err(WomError::CapacityExhausted { .. })) {
                record(report, ViolationKind::Capacity, seq, format!("update past budget gave {result:?}"));
            }
        } else {
            match result {
                Ok(next) => {
                    if !next.covers(word) {
                        record(report, ViolationKind::Monotonicity, seq, format!("{word} -> {next}"));
                    }
                    match wom_decode(code, &next) {
                        Ok(d) if d == v => {
                            if seq.len() < len {
                                walk(code, &next, v, len, seq, report);
                                seq.pop();
                                continue;
                            }
                            report.sequences_checked += 1;
                        }
                        other => record(report, ViolationKind::Decode, seq, format!("{next} decodes to {other:?}")),
                    }
                }
                Err(WomError::NonMonotone { from, to }) => {
                    record(report, ViolationKind::Monotonicity, seq, format!("{from} -> {to}"));
                }
                Err(WomError::InvalidState { word }) => {
                    record(report, ViolationKind::InvalidState, seq, format!("{word} rejected as unreachable"));
                }
                Err(e) => record(report, ViolationKind::Capacity, seq, format!("premature {e}")),
            }
        }
        seq.pop();
    }
}

/// Parses `slot:<b>,<u>` or `rs`.
pub fn parse_code_spec(spec: &str) -> Result<WomCode, WomError> {
    if spec == "rs" {
        return Ok(rivest_shamir_code());
    }
    let bad = || WomError::InvalidParameters(format!("unrecognised code `{spec}`; expected slot:<b>,<u> or rs"));
    let rest = spec.strip_prefix("slot:").ok_or_else(bad)?;
    let (b, u) = rest.split_once(',').ok_or_else(bad)?;
    let b = b.trim().parse().map_err(|_| bad())?;
    let u = u.trim().parse().map_err(|_| bad())?;
    slot_code(b, u)
}
