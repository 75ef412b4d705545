//! Write-once simulation of a standard binary machine that stores every
//! simulated cell as a WOM-code word.
//!
//! Each simulated cell is a group of `width + 1` physical cells: an origin
//! marker (1 only in the first group, so left moves there can be clamped)
//! followed by the code word. Reading walks the word left to right through a
//! trie of reachable words; writing computes the updated word in the finite
//! control and writes it back right to left. A write that would exceed the
//! code's update budget sends the machine to [`BUDGET_EXHAUSTED`], a state
//! with no transitions, so the run rejects.

use std::collections::{HashMap, HashSet};

use crate::machine::builder::{StateKey, Synth};
use crate::machine::{Discipline, Machine, Move, Polarity, StateId};
use crate::womcode::{wom_update, Decoded, WomCode, WomError};

use super::{require_binary_standard, InputEncoding, TranspileError, TranspileReport};

/// Name of the state entered when a cell runs out of updates.
pub const BUDGET_EXHAUSTED: &str = "budget_exhausted";

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Cont {
    mv: Move,
    next: StateId,
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Key {
    Accept,
    Reject,
    Exhausted,
    /// At a group's marker cell.
    Sim(StateId),
    /// Bits of the word read so far.
    Read(StateId, Vec<u8>),
    /// At offset `bits.len()`, writing the last of `bits` and moving left.
    WriteBack(Vec<u8>, Cont),
    /// Back at the marker, carrying out the simulated move.
    Move(Cont),
    Walk { dir: Move, left: usize, next: StateId },
}

fn bit_string(bits: &[u8]) -> String {
    bits.iter().map(|b| char::from(b'0' + b)).collect()
}

impl StateKey for Key {
    fn label(&self) -> String {
        match self {
            Key::Accept => "accept".into(),
            Key::Reject => "reject".into(),
            Key::Exhausted => BUDGET_EXHAUSTED.into(),
            Key::Sim(q) => format!("s{q}"),
            Key::Read(q, bits) => format!("s{q}.r{}", bit_string(bits)),
            Key::WriteBack(bits, c) => format!("wb{}.{}{}", bit_string(bits), c.mv.letter(), c.next),
            Key::Move(c) => format!("mv{}{}", c.mv.letter(), c.next),
            Key::Walk { dir, left, next } => format!("w{}{left}.s{next}", dir.letter()),
        }
    }
}

fn walk(dir: Move, n: usize, next: StateId) -> (Move, Key) {
    if n == 1 {
        (dir, Key::Sim(next))
    } else {
        (dir, Key::Walk { dir, left: n - 1, next })
    }
}

/// Translates a standard binary machine into a write-once machine over
/// [`InputEncoding::WomGroups`]-encoded inputs. Runs that change no cell
/// more than `code.update_budget() - 1` times after the input is laid down
/// (the input itself uses one update per nonzero cell) are simulated
/// faithfully.
pub fn to_write_once_womcoded(source: &Machine, code: &WomCode) -> Result<(Machine, TranspileReport), TranspileError> {
    require_binary_standard(source)?;
    if code.value_count() < 2 {
        return Err(TranspileError::CodeTooSmall { value_count: code.value_count(), alphabet: 2 });
    }
    let width = code.width();
    let words: HashMap<Vec<u8>, Decoded> =
        code.reachable_words().into_iter().map(|(w, d)| (w.bits().to_vec(), d)).collect();
    let prefixes: HashSet<Vec<u8>> =
        words.keys().flat_map(|w| (0..=w.len()).map(move |n| w[..n].to_vec())).collect();

    let entry = |q: StateId| {
        if q == source.accept() {
            Key::Accept
        } else if q == source.reject() {
            Key::Reject
        } else {
            Key::Sim(q)
        }
    };
    let mut synth = Synth::new(source.mode(), Discipline::WriteOnce, vec![0, 1]);
    let start = entry(source.start());
    synth.id(&start);
    synth.id(&Key::Exhausted);

    while let Some(key) = synth.next_pending() {
        match key.clone() {
            Key::Accept | Key::Reject | Key::Exhausted => {}
            Key::Sim(q) => {
                for m in 0..2 {
                    synth.pass(&key, m, Move::Right, &Key::Read(q, Vec::new()));
                }
            }
            Key::Read(q, bits) => {
                let last = bits.len() + 1 == width;
                if last && source.polarity(q) == Polarity::Universal {
                    synth.mark_universal(&key);
                }
                for b in 0..2u8 {
                    let mut word = bits.clone();
                    word.push(b);
                    if !prefixes.contains(&word) {
                        continue;
                    }
                    if !last {
                        synth.pass(&key, b, Move::Right, &Key::Read(q, word));
                        continue;
                    }
                    let at = words[&word];
                    let phys = crate::womcode::PhysicalWord::from_bits(word.clone());
                    for act in source.actions(q, at.value as u8) {
                        if source.is_halting(act.next) {
                            synth.pass(&key, b, Move::Stay, &entry(act.next));
                            continue;
                        }
                        let c = Cont { mv: act.mv, next: act.next };
                        match wom_update(code, &phys, act.write as usize) {
                            Ok(new) => {
                                let new = new.bits().to_vec();
                                let to = if width == 1 {
                                    Key::Move(c)
                                } else {
                                    Key::WriteBack(new[..width - 1].to_vec(), c)
                                };
                                synth.rule(&key, b, new[width - 1], Move::Left, &to);
                            }
                            Err(WomError::CapacityExhausted { .. }) => {
                                synth.pass(&key, b, Move::Stay, &Key::Exhausted);
                            }
                            Err(e) => unreachable!("reachable word failed to update: {e}"),
                        }
                    }
                }
            }
            Key::WriteBack(bits, c) => {
                let bit = *bits.last().unwrap();
                let rest = bits[..bits.len() - 1].to_vec();
                let to = if rest.is_empty() { Key::Move(c) } else { Key::WriteBack(rest, c) };
                for r in 0..=bit {
                    synth.rule(&key, r, bit, Move::Left, &to);
                }
            }
            Key::Move(c) => match c.mv {
                Move::Stay => {
                    for m in 0..2 {
                        synth.pass(&key, m, Move::Stay, &Key::Sim(c.next));
                    }
                }
                Move::Right => {
                    let (mv, to) = walk(Move::Right, width + 1, c.next);
                    for m in 0..2 {
                        synth.pass(&key, m, mv, &to);
                    }
                }
                Move::Left => {
                    synth.pass(&key, 1, Move::Stay, &Key::Sim(c.next));
                    let (mv, to) = walk(Move::Left, width + 1, c.next);
                    synth.pass(&key, 0, mv, &to);
                }
            },
            Key::Walk { dir, left, next } => {
                let (mv, to) = walk(dir, left, next);
                for b in 0..2 {
                    synth.pass(&key, b, mv, &to);
                }
            }
        }
    }

    let target = synth.finish(&start, &Key::Accept, &Key::Reject);
    let report = TranspileReport::new(
        "wom-coded",
        source,
        &target,
        &format!("groups of {} cells [origin marker, {} code bits of {}]", width + 1, width, code.name()),
        width + 1,
        InputEncoding::wom(code),
        "space <= (width + 1) * (source space); steps <= O(width) per source step",
    );
    Ok((target, report))
}
