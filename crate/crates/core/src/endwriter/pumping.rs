use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::machine::{Symbol, KEXP_BIT_BUDGET};

use super::oneway::OneWayAutomaton;

#[derive(Debug, Clone, Serialize)]
pub struct Threshold {
    /// Product states plus one: every longer run repeats a state.
    pub constructed: usize,
    /// States of the machine the product was built from.
    pub k: usize,
    pub statement_formula: String,
    pub proof_formula: String,
    /// Exponent `e` of the statement bound `2^e`, with `exp(x) = 2^x`:
    /// `e = exp(k)^k = 2^(k*k)`. `None` when too large to materialize.
    #[serde(serialize_with = "ser_opt_big")]
    pub statement_exponent: Option<BigUint>,
    /// Exponent of the proof bound `2^K` with `K = exp(k^2)^k = 2^(k^3)`.
    #[serde(serialize_with = "ser_opt_big")]
    pub proof_exponent: Option<BigUint>,
    /// `constructed <= 2^statement_exponent`.
    pub within_statement: bool,
    pub within_proof: bool,
}

fn ser_opt_big<S: serde::Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(n) => s.collect_str(n),
        None => s.serialize_none(),
    }
}

/// `2^bits` if it fits the bit budget.
fn pow2(bits: u64) -> Option<BigUint> {
    (bits < KEXP_BIT_BUDGET).then(|| BigUint::one() << bits)
}

fn within(constructed: usize, exponent: &Option<BigUint>) -> bool {
    match exponent {
        // Any exponent too large to store dwarfs a machine-sized count.
        None => true,
        Some(e) => match u64::try_from(e) {
            Ok(e) if e < 64 => (constructed as u128) <= 1u128 << e,
            _ => true,
        },
    }
}

pub fn pumping_threshold<L>(prod: &OneWayAutomaton<L>, k: usize) -> Threshold
where
    L: Clone,
{
    let constructed = prod.states() + 1;
    let k64 = k as u64;
    let statement_exponent = k64.checked_mul(k64).and_then(pow2);
    let proof_exponent = k64.checked_mul(k64).and_then(|x| x.checked_mul(k64)).and_then(pow2);
    Threshold {
        constructed,
        k,
        statement_formula: format!("O(2^(exp({k})^{k}))"),
        proof_formula: format!("O(2^K), K = exp({k}^2)^{k}"),
        within_statement: within(constructed, &statement_exponent),
        within_proof: within(constructed, &proof_exponent),
        statement_exponent,
        proof_exponent,
    }
}

/// Evidence for one pumping step: the product visits `state` after `i1`,
/// `i2` and `i3` symbols, with `i1 < i2 <= i3`; symbols `i1..i3` were cut.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PumpCertificate {
    pub i1: usize,
    pub i2: usize,
    pub i3: usize,
    pub state: usize,
    pub removed: Vec<Symbol>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no state repeats on a word of length {len}")]
pub struct NoRepeat {
    pub len: usize,
}

/// Removes the infix between the first repetition of a product state and the
/// last visit of that state. The product ends in the same state on both
/// words.
pub fn pump_down<L: Clone>(
    word: &[Symbol],
    prod: &OneWayAutomaton<L>,
) -> Result<(Vec<Symbol>, PumpCertificate), NoRepeat> {
    let run = prod.trajectory(word);
    let mut first_seen: HashMap<usize, usize> = HashMap::new();
    let (i1, i2) = run
        .iter()
        .enumerate()
        .find_map(|(i, &q)| match first_seen.insert(q, i) {
            Some(prev) => Some((prev, i)),
            None => None,
        })
        .ok_or(NoRepeat { len: word.len() })?;
    let state = run[i1];
    let i3 = run.iter().rposition(|&q| q == state).unwrap();
    let mut pumped = word[..i1].to_vec();
    pumped.extend_from_slice(&word[i3..]);
    let cert = PumpCertificate { i1, i2, i3, state, removed: word[i1..i3].to_vec() };
    Ok((pumped, cert))
}

impl PumpCertificate {
    /// Checks that `pumped` is `original` with the recorded infix cut out and
    /// that every automaton ends in the same state on both.
    pub fn replay<L: Clone>(
        &self,
        original: &[Symbol],
        pumped: &[Symbol],
        automata: &[&OneWayAutomaton<L>],
    ) -> Result<(), String> {
        if !(self.i1 < self.i2 && self.i2 <= self.i3 && self.i3 <= original.len()) {
            return Err(format!("positions out of order: {} {} {}", self.i1, self.i2, self.i3));
        }
        if original[self.i1..self.i3] != self.removed[..]
            || pumped.len() + self.removed.len() != original.len()
            || pumped[..self.i1] != original[..self.i1]
            || pumped[self.i1..] != original[self.i3..]
        {
            return Err("pumped word is not the original with the infix removed".into());
        }
        for (i, a) in automata.iter().enumerate() {
            let x = a.run_from(a.start(), original);
            let y = a.run_from(a.start(), pumped);
            if x != y {
                return Err(format!("automaton {i} ends in {x} on the original but {y} after pumping"));
            }
        }
        Ok(())
    }
}
