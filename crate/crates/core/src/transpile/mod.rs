//! Machine-to-machine constructions and a differential harness comparing a
//! machine with its translation.

mod copying;
mod differential;
mod womcoded;

use serde::Serialize;

use crate::machine::{BlockEncoding, Discipline, Machine, MachineDescription, Symbol};
use crate::womcode::{wom_update, WomCode};

pub use copying::{check_copying_trace, check_segment_layout, to_write_once_copying, SegmentSummary, SegmentViolation, BLOCK};
pub use differential::{differential_check, run_verdict, words_up_to, DiffReport, Divergence, RunSummary, Verdict, WordRecord};
pub use womcoded::{to_write_once_womcoded, BUDGET_EXHAUSTED};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TranspileError {
    #[error("construction needs a binary alphabet, got {0:?}")]
    NotBinary(Vec<Symbol>),
    #[error("construction needs a {expected} tape, got {found}")]
    WrongDiscipline { expected: &'static str, found: &'static str },
    #[error("code stores {value_count} values but the alphabet has {alphabet} symbols")]
    CodeTooSmall { value_count: usize, alphabet: usize },
}

/// Maps an input word of the source machine to the input of a translated
/// machine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InputEncoding {
    Identity,
    /// Alphabet binarization: each symbol becomes a presence bit plus its value.
    Blocks { encoding: BlockEncoding },
    /// Copying layout: a segment header, then `[1, x, 0, 0, 0]` per symbol.
    Segments,
    /// Coded layout: per symbol, a marker cell (set only for the first
    /// group) followed by the first-generation code word for the symbol.
    WomGroups {
        #[serde(skip)]
        code: WomCode,
        code_name: String,
    },
    /// Apply the encodings left to right.
    Chain { stages: Vec<InputEncoding> },
}

impl InputEncoding {
    pub fn encode(&self, word: &[Symbol]) -> Vec<Symbol> {
        match self {
            InputEncoding::Identity => word.to_vec(),
            InputEncoding::Blocks { encoding } => encoding.encode_word(word),
            InputEncoding::Segments => {
                let mut out = vec![0, 1, 0, 0, 0];
                for &x in word {
                    out.extend([1, x, 0, 0, 0]);
                }
                out
            }
            InputEncoding::WomGroups { code, .. } => {
                let mut out = Vec::new();
                for i in 0..word.len().max(1) {
                    let x = word.get(i).copied().unwrap_or(0) as usize;
                    let bits = wom_update(code, &code.fresh(), x).expect("first write always fits");
                    out.push((i == 0) as Symbol);
                    out.extend_from_slice(bits.bits());
                }
                out
            }
            InputEncoding::Chain { stages } => {
                stages.iter().fold(word.to_vec(), |w, stage| stage.encode(&w))
            }
        }
    }

    pub(crate) fn wom(code: &WomCode) -> Self {
        InputEncoding::WomGroups { code: code.clone(), code_name: code.name().to_string() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TranspileReport {
    pub construction: String,
    pub source_states: usize,
    pub target_states: usize,
    /// `target_states / source_states`.
    pub blowup: f64,
    pub layout: String,
    /// Target cells per source cell.
    pub group_width: usize,
    pub encoding: InputEncoding,
    pub step_overhead_model: String,
}

impl TranspileReport {
    pub(crate) fn new(
        construction: &str,
        source: &Machine,
        target: &Machine,
        layout: &str,
        group_width: usize,
        encoding: InputEncoding,
        model: &str,
    ) -> Self {
        TranspileReport {
            construction: construction.into(),
            source_states: source.state_count(),
            target_states: target.state_count(),
            blowup: target.state_count() as f64 / source.state_count() as f64,
            layout: layout.into(),
            group_width,
            encoding,
            step_overhead_model: model.into(),
        }
    }
}

/// The same machine with the write-once restriction lifted. Every run of the
/// original is a run of the result, so acceptance can only grow, and stays
/// equal when the original never attempts a forbidden write.
pub fn relax_to_standard(desc: &MachineDescription) -> MachineDescription {
    MachineDescription { discipline: Discipline::Standard, ..desc.clone() }
}

pub(crate) fn require_binary_standard(machine: &Machine) -> Result<(), TranspileError> {
    if machine.discipline() != Discipline::Standard {
        return Err(TranspileError::WrongDiscipline {
            expected: Discipline::Standard.keyword(),
            found: machine.discipline().keyword(),
        });
    }
    if !machine.alphabet().iter().all(|&s| s <= 1) {
        return Err(TranspileError::NotBinary(machine.alphabet().to_vec()));
    }
    Ok(())
}
