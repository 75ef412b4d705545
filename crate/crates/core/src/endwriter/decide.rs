use std::collections::HashSet;

use serde::Serialize;

use crate::machine::{Machine, StateId, Symbol, BLANK};
use crate::simulator::Limits;

use super::automata::{between_writes_automaton, check_end_writer, initial_automaton, letters, writing_states};
use super::oneway::{crossing_bound, product, two_way_to_one_way, OneWayAutomaton, Product};
use super::pumping::{pump_down, pumping_threshold, PumpCertificate, Threshold};
use super::twoway::TwoWayAutomaton;
use super::{EndWriterError, Halt};

/// Every automaton derived from one end-writer. Component 0 covers the run
/// up to the first write; component `i + 1` the run after a write by
/// `writers[i]`.
#[derive(Debug, Clone)]
pub struct EndWriterAnalysis {
    pub k: usize,
    pub letters: Vec<Symbol>,
    pub writers: Vec<StateId>,
    pub names: Vec<String>,
    pub two_way: Vec<TwoWayAutomaton<Halt>>,
    pub one_way: Vec<OneWayAutomaton<Halt>>,
    pub product: Product<Halt>,
    pub threshold: Threshold,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentReport {
    pub name: String,
    pub two_way_states: usize,
    pub one_way_states: usize,
    /// Upper bound on one-way states from counting crossing tables.
    pub crossing_bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub k: usize,
    pub letters: Vec<Symbol>,
    pub components: Vec<ComponentReport>,
    pub product_states: usize,
    pub product_full_size: u128,
    pub threshold: Threshold,
}

pub fn analyze(m: &Machine) -> Result<EndWriterAnalysis, EndWriterError> {
    check_end_writer(m)?;
    let writers = writing_states(m);
    let mut two_way = vec![initial_automaton(m)?];
    let mut names = vec!["init".to_string()];
    for &s in &writers {
        two_way.push(between_writes_automaton(m, s)?);
        names.push(m.state_name(s).to_string());
    }
    let one_way: Vec<_> = two_way.iter().map(two_way_to_one_way).collect();
    let refs: Vec<&OneWayAutomaton<Halt>> = one_way.iter().collect();
    let product = product(&refs)?;
    let threshold = pumping_threshold(&product.automaton, m.state_count());
    Ok(EndWriterAnalysis { k: m.state_count(), letters: letters(m), writers, names, two_way, one_way, product, threshold })
}

impl EndWriterAnalysis {
    pub fn report(&self) -> AnalysisReport {
        let components = self
            .names
            .iter()
            .zip(self.two_way.iter().zip(&self.one_way))
            .map(|(name, (t, o))| ComponentReport {
                name: name.clone(),
                two_way_states: t.states(),
                one_way_states: o.states(),
                crossing_bound: crossing_bound(t.states(), t.labels().len()),
            })
            .collect();
        AnalysisReport {
            k: self.k,
            letters: self.letters.clone(),
            components,
            product_states: self.product.automaton.states(),
            product_full_size: self.product.full_size,
            threshold: self.threshold.clone(),
        }
    }

    fn component_of(&self, writer: StateId) -> usize {
        1 + self.writers.iter().position(|&s| s == writer).expect("write label names a writing state")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecideVerdict {
    Accept,
    Reject,
    Diverge,
    /// The machine breaks the end-only discipline.
    Fault,
    /// More write phases than `max_steps`.
    StepLimit,
    WriteLimit,
}

#[derive(Debug, Clone, Serialize)]
pub struct Decision {
    pub verdict: DecideVerdict,
    /// Longest word held at any time, after compressing the input.
    pub peak_stored_word: usize,
    /// Bits needed for the stored word, the current phase and one product
    /// state at the peak.
    pub peak_memory_model: usize,
    pub phases: usize,
    pub writes: usize,
    pub pumps: usize,
    pub certificate_failures: usize,
    /// Up to the first few applied certificates.
    pub certificates: Vec<PumpCertificate>,
}

const KEPT_CERTIFICATES: usize = 8;

fn bits_for(n: usize) -> usize {
    (usize::BITS - n.saturating_sub(1).leading_zeros()) as usize
}

pub fn decide_acceptance(m: &Machine, input: &[Symbol], limits: Limits) -> Result<Decision, EndWriterError> {
    decide_with(&analyze(m)?, input, limits)
}

/// Runs the machine one write at a time on a stored word that is pumped down
/// whenever it grows past the threshold. The product state at the end of
/// the word is unchanged by pumping, so every later phase behaves the same
/// on the short word as on the real one.
pub fn decide_with(a: &EndWriterAnalysis, input: &[Symbol], limits: Limits) -> Result<Decision, EndWriterError> {
    if input.contains(&BLANK) {
        return Err(EndWriterError::BlankInInput);
    }
    if let Some(&x) = input.iter().find(|x| !a.letters.contains(x)) {
        return Err(EndWriterError::SymbolOutsideAlphabet(x));
    }
    let prod = &a.product.automaton;
    let limit = a.threshold.constructed;
    let components: Vec<&OneWayAutomaton<Halt>> = a.one_way.iter().collect();
    let mut d = Decision {
        verdict: DecideVerdict::Diverge,
        peak_stored_word: 0,
        peak_memory_model: 0,
        phases: 0,
        writes: 0,
        pumps: 0,
        certificate_failures: 0,
        certificates: Vec::new(),
    };
    let mut word = input.to_vec();
    let mut phase = 0usize;
    let mut seen: HashSet<(usize, Vec<Symbol>)> = HashSet::new();
    let verdict = loop {
        while word.len() > limit {
            let (short, cert) = pump_down(&word, prod).expect("a word longer than the product has states repeats one");
            if cert.replay(&word, &short, &components).is_err() || cert.replay(&word, &short, &[prod]).is_err() {
                d.certificate_failures += 1;
            }
            d.pumps += 1;
            if d.certificates.len() < KEPT_CERTIFICATES {
                d.certificates.push(cert);
            }
            word = short;
        }
        assert!(word.len() <= limit + 1 || d.phases == 0, "stored word exceeds the threshold");
        if word.len() > d.peak_stored_word {
            d.peak_stored_word = word.len();
        }
        if !seen.insert((phase, word.clone())) {
            break DecideVerdict::Diverge;
        }
        if d.phases as u64 >= limits.max_steps {
            break DecideVerdict::StepLimit;
        }
        d.phases += 1;
        let out = prod.run(&word).expect("product outputs are total");
        match out[phase] {
            None | Some(Halt::Diverge) => break DecideVerdict::Diverge,
            Some(Halt::Accept) => break DecideVerdict::Accept,
            Some(Halt::Reject) => break DecideVerdict::Reject,
            Some(Halt::Fault) => break DecideVerdict::Fault,
            Some(Halt::Write { state, symbol }) => {
                if limits.max_writes.is_some_and(|w| d.writes as u64 >= w) {
                    break DecideVerdict::WriteLimit;
                }
                d.writes += 1;
                word.push(symbol);
                phase = a.component_of(state);
            }
        }
    };
    d.verdict = verdict;
    d.peak_memory_model = d.peak_stored_word * bits_for(a.letters.len() + 1)
        + bits_for(a.two_way.len())
        + bits_for(prod.states());
    Ok(d)
}
