//! Rewrites an m-symbol machine into a binary one. Each source cell becomes a
//! block of `1 + ceil(log2 m)` binary cells: a presence bit followed by the
//! symbol value, most significant bit first. Blank encodes as the all-zero
//! block, so untouched tape stays blank.

use serde::Serialize;

use super::builder::{StateKey, Synth};
use super::{Discipline, Machine, Move, Polarity, StateId, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BlockEncoding {
    /// Number of source symbols (`max symbol + 1`).
    pub symbols: usize,
    pub value_bits: usize,
    /// Cells per source cell; 1 when the source is already binary.
    pub width: usize,
}

impl BlockEncoding {
    pub fn for_alphabet(alphabet: &[Symbol]) -> Self {
        let symbols = alphabet.iter().copied().max().unwrap_or(0) as usize + 1;
        if symbols <= 2 {
            return BlockEncoding { symbols, value_bits: 1, width: 1 };
        }
        let value_bits = usize::BITS as usize - (symbols - 1).leading_zeros() as usize;
        BlockEncoding { symbols, value_bits, width: value_bits + 1 }
    }

    pub fn encode(&self, symbol: Symbol) -> Vec<Symbol> {
        if self.width == 1 {
            return vec![symbol];
        }
        let mut bits = vec![(symbol != 0) as Symbol];
        for i in (0..self.value_bits).rev() {
            bits.push((symbol >> i) & 1);
        }
        bits
    }

    /// Inverse of [`encode`](Self::encode) on a block read as an integer,
    /// presence bit most significant. `None` for malformed blocks.
    pub fn decode(&self, block: usize) -> Option<Symbol> {
        if self.width == 1 {
            return Some(block as Symbol);
        }
        let present = block >> self.value_bits;
        let value = block & ((1 << self.value_bits) - 1);
        match (present, value) {
            (0, 0) => Some(0),
            (1, v) if v != 0 && v < self.symbols => Some(v as Symbol),
            _ => None,
        }
    }

    pub fn encode_word(&self, word: &[Symbol]) -> Vec<Symbol> {
        word.iter().flat_map(|&s| self.encode(s)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BinarizeError {
    #[error("binarization needs a standard-discipline machine, got {0}")]
    WriteOnceInput(&'static str),
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Key {
    Accept,
    Reject,
    /// `bits` cells of the block read so far, accumulated in `acc`.
    Read { q: StateId, bits: usize, acc: usize },
    /// Writing offset `offset` of the block for `symbol`, walking left.
    Write { symbol: Symbol, offset: usize, mv: Move, next: StateId },
    Shift { next: StateId, dir: Move, left: usize },
}

impl StateKey for Key {
    fn label(&self) -> String {
        match self {
            Key::Accept => "accept".into(),
            Key::Reject => "reject".into(),
            Key::Read { q, bits, acc } => format!("rd{bits}.{acc}.s{q}"),
            Key::Write { symbol, offset, mv, next } => format!("wr{offset}.{symbol}{}.s{next}", mv.letter()),
            Key::Shift { next, dir, left } => format!("sh{left}{}.s{next}", dir.letter()),
        }
    }
}

/// Binary-alphabet machine accepting the block-encoded image of the source
/// language. Binary machines are returned unchanged.
pub fn binarize_alphabet(machine: &Machine) -> Result<(Machine, BlockEncoding), BinarizeError> {
    if machine.discipline() != Discipline::Standard {
        return Err(BinarizeError::WriteOnceInput(machine.discipline().keyword()));
    }
    let enc = BlockEncoding::for_alphabet(machine.alphabet());
    if enc.width == 1 {
        return Ok((machine.clone(), enc));
    }
    let w = enc.width;
    let entry = |q: StateId| {
        if q == machine.accept() {
            Key::Accept
        } else if q == machine.reject() {
            Key::Reject
        } else {
            Key::Read { q, bits: 0, acc: 0 }
        }
    };

    let mut synth = Synth::new(machine.mode(), Discipline::Standard, vec![0, 1]);
    let start = entry(machine.start());
    synth.id(&start);
    while let Some(key) = synth.next_pending() {
        match key {
            Key::Accept | Key::Reject => {}
            Key::Read { q, bits, acc } if bits + 1 < w => {
                for b in 0..2u8 {
                    let next = Key::Read { q, bits: bits + 1, acc: acc * 2 + b as usize };
                    synth.pass(&key, b, Move::Right, &next);
                }
            }
            Key::Read { q, acc, .. } => {
                if machine.polarity(q) == Polarity::Universal {
                    synth.mark_universal(&key);
                }
                for b in 0..2u8 {
                    let Some(symbol) = enc.decode(acc * 2 + b as usize) else { continue };
                    for act in machine.actions(q, symbol) {
                        if machine.is_halting(act.next) {
                            synth.pass(&key, b, Move::Stay, &entry(act.next));
                            continue;
                        }
                        let bits = enc.encode(act.write);
                        let to = Key::Write { symbol: act.write, offset: w - 2, mv: act.mv, next: act.next };
                        synth.rule(&key, b, bits[w - 1], Move::Left, &to);
                    }
                }
            }
            Key::Write { symbol, offset, mv, next } => {
                let bit = enc.encode(symbol)[offset];
                let (dir, to) = if offset > 0 {
                    (Move::Left, Key::Write { symbol, offset: offset - 1, mv, next })
                } else {
                    match mv {
                        Move::Stay => (Move::Stay, entry(next)),
                        dir => (dir, Key::Shift { next, dir, left: w - 1 }),
                    }
                };
                for b in 0..2u8 {
                    synth.rule(&key, b, bit, dir, &to);
                }
            }
            Key::Shift { next, dir, left } => {
                let to = if left > 1 { Key::Shift { next, dir, left: left - 1 } } else { entry(next) };
                for b in 0..2u8 {
                    synth.pass(&key, b, dir, &to);
                }
            }
        }
    }
    Ok((synth.finish(&start, &Key::Accept, &Key::Reject), enc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_symbol_blocks() {
        let enc = BlockEncoding::for_alphabet(&[0, 1, 2]);
        assert_eq!(enc.width, 3);
        assert_eq!(enc.encode(0), vec![0, 0, 0]);
        assert_eq!(enc.encode(1), vec![1, 0, 1]);
        assert_eq!(enc.encode(2), vec![1, 1, 0]);
        for s in 0..3u8 {
            let bits = enc.encode(s);
            let block = bits.iter().fold(0usize, |a, &b| a * 2 + b as usize);
            assert_eq!(enc.decode(block), Some(s));
        }
        assert_eq!(enc.decode(0b100), None);
        assert_eq!(enc.decode(0b011), None);
    }

    #[test]
    fn widths_follow_log2() {
        assert_eq!(BlockEncoding::for_alphabet(&[0, 1]).width, 1);
        assert_eq!(BlockEncoding::for_alphabet(&[0, 1, 2, 3]).width, 3);
        assert_eq!(BlockEncoding::for_alphabet(&[0, 1, 2, 3, 4]).width, 4);
    }
}
