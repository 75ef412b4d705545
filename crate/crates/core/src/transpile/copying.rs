//! Write-once simulation of a standard binary machine by snapshot copying.
//!
//! Every simulated cell is a block of five physical cells:
//!
//! | offset | track | meaning                                              |
//! |--------|-------|------------------------------------------------------|
//! | 0      | P     | presence: 1 for data blocks                          |
//! | 1      | V     | value; `P = 0, V = 1` marks a segment header         |
//! | 2      | H     | data: cell being blanked; header: segment retired    |
//! | 3      | C     | copy progress: block already copied                  |
//! | 4      | R     | head return point in the copy                        |
//!
//! The tape is a sequence of segments, each a header followed by contiguous
//! data blocks. Only the last segment is live. A block is turned into a data
//! block the first time the head visits it, so data stays contiguous and a
//! segment can be scanned by looking at presence bits alone. Writes of 1 over
//! 0 happen in place. Writing 0 over 1 marks the block, retires the live
//! header, appends a new header after the segment and copies the segment
//! block by block behind it, substituting 0 for the marked block and moving
//! the mark to the R track so the head can find its way back.

use serde::Serialize;

use crate::machine::builder::{StateKey, Synth};
use crate::machine::{Discipline, Machine, Move, Polarity, StateId, Symbol};
use crate::simulator::RunTrace;

use super::{require_binary_standard, InputEncoding, TranspileError, TranspileReport};

/// Physical cells per simulated cell.
pub const BLOCK: usize = 5;

const P: usize = 0;
const H: usize = 2;
const C: usize = 3;
const R: usize = 4;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Cont {
    mv: Move,
    next: StateId,
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Key {
    Accept,
    Reject,
    /// Offset 0 of a block: read P.
    Sim(StateId),
    /// Offset 1: read V and act for the simulated state.
    Classify(StateId, u8),
    Walk { dir: Move, left: usize, then: Box<Key> },
    /// Offset 0 of a fresh block: set P, then V.
    MatP(u8, Cont),
    MatV(u8, Cont),
    MarkH(Cont),
    ScanHeaderL(Cont),
    Retire(Cont),
    ScanBlankR(Cont),
    NewHeader(Cont),
    /// Scan left to the old header, passing `seen` headers first.
    Return(Cont, u8),
    Fetch(Cont),
    FetchV(Cont),
    FetchH(Cont, u8),
    FetchC(Cont, u8, u8),
    Deliver(Cont, u8, u8),
    DeliverV(Cont, u8, u8),
    PutP(Cont, u8, u8),
    PutV(Cont, u8, u8),
    PutR(Cont, u8, u8),
    FindR(Cont),
}

fn cont_label(c: &Cont) -> String {
    format!("{}{}", c.mv.letter(), c.next)
}

impl StateKey for Key {
    fn label(&self) -> String {
        match self {
            Key::Accept => "accept".into(),
            Key::Reject => "reject".into(),
            Key::Sim(q) => format!("s{q}"),
            Key::Classify(q, p) => format!("s{q}.p{p}"),
            Key::Walk { dir, left, then } => format!("w{}{left}.{}", dir.letter(), then.label()),
            Key::MatP(w, c) => format!("matp{w}.{}", cont_label(c)),
            Key::MatV(w, c) => format!("matv{w}.{}", cont_label(c)),
            Key::MarkH(c) => format!("markh.{}", cont_label(c)),
            Key::ScanHeaderL(c) => format!("hdrl.{}", cont_label(c)),
            Key::Retire(c) => format!("retire.{}", cont_label(c)),
            Key::ScanBlankR(c) => format!("blankr.{}", cont_label(c)),
            Key::NewHeader(c) => format!("newhdr.{}", cont_label(c)),
            Key::Return(c, seen) => format!("ret{seen}.{}", cont_label(c)),
            Key::Fetch(c) => format!("fetch.{}", cont_label(c)),
            Key::FetchV(c) => format!("fetchv.{}", cont_label(c)),
            Key::FetchH(c, v) => format!("fetchh{v}.{}", cont_label(c)),
            Key::FetchC(c, v, h) => format!("fetchc{v}{h}.{}", cont_label(c)),
            Key::Deliver(c, v, r) => format!("dlv{v}{r}.{}", cont_label(c)),
            Key::DeliverV(c, v, r) => format!("dlvv{v}{r}.{}", cont_label(c)),
            Key::PutP(c, v, r) => format!("putp{v}{r}.{}", cont_label(c)),
            Key::PutV(c, v, r) => format!("putv{v}{r}.{}", cont_label(c)),
            Key::PutR(c, v, r) => format!("putr{v}{r}.{}", cont_label(c)),
            Key::FindR(c) => format!("findr.{}", cont_label(c)),
        }
    }
}

/// First move and follow-up state for travelling `n >= 1` cells in `dir`.
fn travel(dir: Move, n: usize, then: Key) -> (Move, Key) {
    debug_assert!(n >= 1);
    if n == 1 {
        (dir, then)
    } else {
        (dir, Key::Walk { dir, left: n - 1, then: Box::new(then) })
    }
}

/// Leave a block from `offset` so as to arrive at offset 0 of the block the
/// simulated head moves to, in state `next`.
fn leave(offset: usize, c: Cont) -> (Move, Key) {
    let d: isize = match c.mv {
        Move::Stay => -(offset as isize),
        Move::Right => (BLOCK - offset) as isize,
        Move::Left => -((BLOCK + offset) as isize),
    };
    let then = Key::Sim(c.next);
    match d {
        0 => (Move::Stay, then),
        d if d > 0 => travel(Move::Right, d as usize, then),
        d => travel(Move::Left, d.unsigned_abs(), then),
    }
}

/// Translates a standard binary machine into a write-once machine with the
/// same acceptance behaviour on [`InputEncoding::Segments`]-encoded inputs.
/// Works for all three modes; branching happens only in the states that read
/// a block's value, which inherit the source state's polarity.
pub fn to_write_once_copying(source: &Machine) -> Result<(Machine, TranspileReport), TranspileError> {
    require_binary_standard(source)?;
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

    while let Some(key) = synth.next_pending() {
        match key.clone() {
            Key::Accept | Key::Reject => {}
            Key::Sim(q) => {
                for p in 0..2 {
                    synth.pass(&key, p, Move::Right, &Key::Classify(q, p));
                }
            }
            Key::Classify(q, p) => {
                if source.polarity(q) == Polarity::Universal {
                    synth.mark_universal(&key);
                }
                if p == 0 {
                    // Header: the simulated head tried to leave cell 0.
                    let (mv, to) = travel(Move::Right, BLOCK - 1, Key::Sim(q));
                    synth.pass(&key, 1, mv, &to);
                }
                for v in 0..2u8 {
                    if p == 0 && v == 1 {
                        continue;
                    }
                    for act in source.actions(q, v) {
                        if source.is_halting(act.next) {
                            synth.pass(&key, v, Move::Stay, &entry(act.next));
                            continue;
                        }
                        let c = Cont { mv: act.mv, next: act.next };
                        if p == 0 {
                            synth.pass(&key, 0, Move::Left, &Key::MatP(act.write, c));
                        } else if v == 1 && act.write == 0 {
                            synth.pass(&key, 1, Move::Right, &Key::MarkH(c));
                        } else {
                            let (mv, to) = leave(1, c);
                            synth.rule(&key, v, v.max(act.write), mv, &to);
                        }
                    }
                }
            }
            Key::Walk { dir, left, then } => {
                let to = if left == 1 { *then } else { Key::Walk { dir, left: left - 1, then } };
                for b in 0..2 {
                    synth.pass(&key, b, dir, &to);
                }
            }
            Key::MatP(w, c) => synth.rule(&key, 0, 1, Move::Right, &Key::MatV(w, c)),
            Key::MatV(w, c) => {
                let (mv, to) = leave(1, c);
                synth.rule(&key, 0, w, mv, &to);
            }
            Key::MarkH(c) => {
                let (mv, to) = travel(Move::Left, H, Key::ScanHeaderL(c));
                synth.rule(&key, 0, 1, mv, &to);
            }
            Key::ScanHeaderL(c) => {
                let (mv, to) = travel(Move::Left, BLOCK, key.clone());
                synth.pass(&key, 1, mv, &to);
                let (mv, to) = travel(Move::Right, H, Key::Retire(c));
                synth.pass(&key, 0, mv, &to);
            }
            Key::Retire(c) => {
                let (mv, to) = travel(Move::Right, BLOCK - H, Key::ScanBlankR(c));
                synth.rule(&key, 0, 1, mv, &to);
            }
            Key::ScanBlankR(c) => {
                let (mv, to) = travel(Move::Right, BLOCK, key.clone());
                synth.pass(&key, 1, mv, &to);
                synth.pass(&key, 0, Move::Right, &Key::NewHeader(c));
            }
            Key::NewHeader(c) => synth.rule(&key, 0, 1, Move::Left, &Key::Return(c, 0)),
            Key::Return(c, seen) => {
                let (mv, to) = travel(Move::Left, BLOCK, key.clone());
                synth.pass(&key, 1, mv, &to);
                if seen == 0 {
                    let (mv, to) = travel(Move::Left, BLOCK, Key::Return(c, 1));
                    synth.pass(&key, 0, mv, &to);
                } else {
                    let (mv, to) = travel(Move::Right, BLOCK, Key::Fetch(c));
                    synth.pass(&key, 0, mv, &to);
                }
            }
            Key::Fetch(c) => {
                synth.pass(&key, 1, Move::Right, &Key::FetchV(c));
                // Reached the new header: the copy is complete.
                let (mv, to) = travel(Move::Right, BLOCK + R, Key::FindR(c));
                synth.pass(&key, 0, mv, &to);
            }
            Key::FetchV(c) => {
                for v in 0..2 {
                    synth.pass(&key, v, Move::Right, &Key::FetchH(c, v));
                }
            }
            Key::FetchH(c, v) => {
                for h in 0..2 {
                    synth.pass(&key, h, Move::Right, &Key::FetchC(c, v, h));
                }
            }
            Key::FetchC(c, v, h) => {
                let (mv, to) = travel(Move::Right, BLOCK - C, Key::Fetch(c));
                synth.pass(&key, 1, mv, &to);
                let (nv, nr) = if h == 1 { (0, 1) } else { (v, 0) };
                let (mv, to) = travel(Move::Right, BLOCK - C, Key::Deliver(c, nv, nr));
                synth.rule(&key, 0, 1, mv, &to);
            }
            Key::Deliver(c, v, r) => {
                let (mv, to) = travel(Move::Right, BLOCK, key.clone());
                synth.pass(&key, 1, mv, &to);
                synth.pass(&key, 0, Move::Right, &Key::DeliverV(c, v, r));
            }
            Key::DeliverV(c, v, r) => {
                let (mv, to) = travel(Move::Right, BLOCK - 1, Key::Deliver(c, v, r));
                synth.pass(&key, 1, mv, &to);
                synth.pass(&key, 0, Move::Left, &Key::PutP(c, v, r));
            }
            Key::PutP(c, v, r) => synth.rule(&key, 0, 1, Move::Right, &Key::PutV(c, v, r)),
            Key::PutV(c, v, r) => {
                let (mv, to) = travel(Move::Right, R - 1, Key::PutR(c, v, r));
                synth.rule(&key, 0, v, mv, &to);
            }
            Key::PutR(c, _, r) => {
                let (mv, to) = travel(Move::Left, R, Key::Return(c, 0));
                synth.rule(&key, 0, r, mv, &to);
            }
            Key::FindR(c) => {
                let (mv, to) = travel(Move::Right, BLOCK, key.clone());
                synth.pass(&key, 0, mv, &to);
                let (mv, to) = leave(R, c);
                synth.pass(&key, 1, mv, &to);
            }
        }
    }

    let target = synth.finish(&start, &Key::Accept, &Key::Reject);
    let report = TranspileReport::new(
        "copying",
        source,
        &target,
        "blocks of 5 cells [presence, value, head-mark, copy-progress, return-mark]; \
         segment header [0,1,retired,0,0]; one live segment at the right end",
        BLOCK,
        InputEncoding::Segments,
        "steps <= C * (source steps + source space)^3",
    );
    Ok((target, report))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SegmentSummary {
    pub segments: usize,
    pub open_headers: usize,
    pub data_blocks: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("segment layout broken after event {step}: {reason}")]
pub struct SegmentViolation {
    /// Number of events applied when the problem was found.
    pub step: usize,
    pub reason: String,
}

/// Parses a tape in the copying layout and checks its structural
/// invariants: it starts with a header, every block is a header, a data
/// block or all-blank, nothing follows a blank block, and at most one header
/// is not retired (and if so, it is the last one).
pub fn check_segment_layout(tape: &[Symbol]) -> Result<SegmentSummary, String> {
    let mut s = SegmentSummary::default();
    let mut blank_seen = false;
    let mut open_at = None;
    for (i, chunk) in tape.chunks(BLOCK).enumerate() {
        let mut b = [0u8; BLOCK];
        b[..chunk.len()].copy_from_slice(chunk);
        if b.iter().any(|&x| x > 1) {
            return Err(format!("block {i} holds a non-binary symbol"));
        }
        if b == [0; BLOCK] {
            blank_seen = true;
            continue;
        }
        if blank_seen {
            return Err(format!("block {i} follows a blank block"));
        }
        if b[P] == 1 {
            if i == 0 {
                return Err("tape does not start with a header".into());
            }
            s.data_blocks += 1;
            continue;
        }
        if b[1] != 1 || b[C] != 0 || b[R] != 0 {
            return Err(format!("block {i} is malformed: {b:?}"));
        }
        s.segments += 1;
        if b[H] == 0 {
            s.open_headers += 1;
            open_at = Some(s.segments);
        }
    }
    if s.open_headers > 1 {
        return Err(format!("{} headers are open", s.open_headers));
    }
    if open_at.is_some_and(|k| k != s.segments) {
        return Err("open header is not the last one".into());
    }
    Ok(s)
}

/// Replays a trace of a copying-transpiled machine and checks
/// [`check_segment_layout`] after every tape change. Returns the largest
/// summary seen (by segment count).
pub fn check_copying_trace(trace: &RunTrace) -> Result<SegmentSummary, SegmentViolation> {
    let mut tape = trace.initial.tape.symbols().to_vec();
    let mut best = check_segment_layout(&tape).map_err(|reason| SegmentViolation { step: 0, reason })?;
    for (i, e) in trace.events.iter().enumerate() {
        let Some(ch) = e.change else { continue };
        if tape.len() <= ch.cell {
            tape.resize(ch.cell + 1, 0);
        }
        tape[ch.cell] = ch.new;
        let s = check_segment_layout(&tape).map_err(|reason| SegmentViolation { step: i + 1, reason })?;
        if s.segments > best.segments {
            best = s;
        }
    }
    Ok(best)
}
