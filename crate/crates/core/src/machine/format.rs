//! Line-oriented machine description format.
//!
//! ```text
//! # comment
//! mode: deterministic|nondeterministic|alternating
//! tape: standard|write-once|write-once-end
//! alphabet: 0 1 [2 ...]
//! states: q0 q1 ...
//! start: q0
//! accept: qa
//! reject: qr
//! forall: q2 q3          # alternating only; unlisted states are existential
//! trans: <state> <read> -> <write> <L|R|S> <state>
//! ```
//!
//! A left move on cell 0 leaves the head on cell 0.

use std::fmt;

use super::{Discipline, MachineDescription, Mode, Move, Rule, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Splits a line into whitespace-separated tokens with their 1-based columns.
fn tokens(text: &str, offset: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in text.char_indices() {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((offset + s + 1, &text[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((offset + s + 1, &text[s..]));
    }
    out
}

struct Fields {
    mode: Option<Mode>,
    discipline: Option<Discipline>,
    alphabet: Option<Vec<Symbol>>,
    states: Option<Vec<String>>,
    start: Option<String>,
    accept: Option<String>,
    reject: Option<String>,
    universal: Option<Vec<String>>,
    rules: Vec<Rule>,
}

pub fn parse_machine(text: &str) -> Result<MachineDescription, ParseError> {
    let mut fields = Fields {
        mode: None,
        discipline: None,
        alphabet: None,
        states: None,
        start: None,
        accept: None,
        reject: None,
        universal: None,
        rules: Vec::new(),
    };
    let mut line_count = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        line_count = line;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let err = |column: usize, message: String| ParseError { line, column, message };
        let Some(colon) = content.find(':') else {
            let col = content.len() - content.trim_start().len() + 1;
            return Err(err(col, "expected '<directive>: <value>'".into()));
        };
        let key = content[..colon].trim();
        let key_col = content.len() - content.trim_start().len() + 1;
        let rest = tokens(&content[colon + 1..], colon + 1);
        let end_col = content.trim_end().len() + 1;

        let single = |what: &str| -> Result<(usize, &str), ParseError> {
            match rest.as_slice() {
                [one] => Ok(*one),
                [] => Err(err(end_col, format!("{what} expects a value"))),
                [_, (c, _), ..] => Err(err(*c, format!("{what} expects exactly one value"))),
            }
        };
        let duplicate = |set: bool| -> Result<(), ParseError> {
            if set {
                Err(err(key_col, format!("directive '{key}' given twice")))
            } else {
                Ok(())
            }
        };

        match key {
            "mode" => {
                duplicate(fields.mode.is_some())?;
                let (c, v) = single("mode")?;
                fields.mode = Some(match v {
                    "deterministic" => Mode::Deterministic,
                    "nondeterministic" => Mode::Nondeterministic,
                    "alternating" => Mode::Alternating,
                    _ => return Err(err(c, format!("unknown mode '{v}'"))),
                });
            }
            "tape" => {
                duplicate(fields.discipline.is_some())?;
                let (c, v) = single("tape")?;
                fields.discipline = Some(match v {
                    "standard" => Discipline::Standard,
                    "write-once" => Discipline::WriteOnce,
                    "write-once-end" => Discipline::WriteOnceEndOnly,
                    _ => return Err(err(c, format!("unknown tape discipline '{v}'"))),
                });
            }
            "alphabet" => {
                duplicate(fields.alphabet.is_some())?;
                if rest.is_empty() {
                    return Err(err(end_col, "alphabet expects symbols".into()));
                }
                let mut syms = Vec::new();
                for &(c, t) in &rest {
                    syms.push(parse_symbol(t).map_err(|m| err(c, m))?);
                }
                fields.alphabet = Some(syms);
            }
            "states" => {
                duplicate(fields.states.is_some())?;
                if rest.is_empty() {
                    return Err(err(end_col, "states expects names".into()));
                }
                fields.states = Some(rest.iter().map(|(_, t)| t.to_string()).collect());
            }
            "start" | "accept" | "reject" => {
                let slot = match key {
                    "start" => &mut fields.start,
                    "accept" => &mut fields.accept,
                    _ => &mut fields.reject,
                };
                if slot.is_some() {
                    return Err(err(key_col, format!("directive '{key}' given twice")));
                }
                let (_, v) = single(key)?;
                *slot = Some(v.to_string());
            }
            "forall" => {
                duplicate(fields.universal.is_some())?;
                fields.universal = Some(rest.iter().map(|(_, t)| t.to_string()).collect());
            }
            "trans" => fields.rules.push(parse_rule(&rest, end_col).map_err(|(c, m)| err(c, m))?),
            _ => return Err(err(key_col, format!("unknown directive '{key}'"))),
        }
    }

    let missing = |name: &str| ParseError {
        line: line_count.max(1),
        column: 1,
        message: format!("missing directive '{name}' (file truncated?)"),
    };
    Ok(MachineDescription {
        mode: fields.mode.ok_or_else(|| missing("mode"))?,
        discipline: fields.discipline.ok_or_else(|| missing("tape"))?,
        alphabet: fields.alphabet.ok_or_else(|| missing("alphabet"))?,
        states: fields.states.ok_or_else(|| missing("states"))?,
        start: fields.start.ok_or_else(|| missing("start"))?,
        accept: fields.accept.ok_or_else(|| missing("accept"))?,
        reject: fields.reject.ok_or_else(|| missing("reject"))?,
        universal: fields.universal.unwrap_or_default(),
        rules: fields.rules,
    })
}

fn parse_symbol(t: &str) -> Result<Symbol, String> {
    t.parse::<Symbol>().map_err(|_| format!("'{t}' is not a symbol (expected 0-255)"))
}

fn parse_rule(toks: &[(usize, &str)], end_col: usize) -> Result<Rule, (usize, String)> {
    const SHAPE: &str = "expected '<state> <read> -> <write> <L|R|S> <state>'";
    if toks.len() < 6 {
        return Err((end_col, format!("incomplete transition; {SHAPE}")));
    }
    if toks.len() > 6 {
        return Err((toks[6].0, format!("trailing tokens; {SHAPE}")));
    }
    if toks[2].1 != "->" {
        return Err((toks[2].0, format!("missing '->'; {SHAPE}")));
    }
    let read = parse_symbol(toks[1].1).map_err(|m| (toks[1].0, m))?;
    let write = parse_symbol(toks[3].1).map_err(|m| (toks[3].0, m))?;
    let mv = match toks[4].1 {
        "L" => Move::Left,
        "R" => Move::Right,
        "S" => Move::Stay,
        other => return Err((toks[4].0, format!("unknown move '{other}'"))),
    };
    Ok(Rule { state: toks[0].1.to_string(), read, write, mv, next: toks[5].1.to_string() })
}

pub(super) fn write_description(d: &MachineDescription, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    writeln!(f, "mode: {}", d.mode.keyword())?;
    writeln!(f, "tape: {}", d.discipline.keyword())?;
    let alphabet: Vec<String> = d.alphabet.iter().map(|s| s.to_string()).collect();
    writeln!(f, "alphabet: {}", alphabet.join(" "))?;
    writeln!(f, "states: {}", d.states.join(" "))?;
    writeln!(f, "start: {}", d.start)?;
    writeln!(f, "accept: {}", d.accept)?;
    writeln!(f, "reject: {}", d.reject)?;
    if !d.universal.is_empty() {
        writeln!(f, "forall: {}", d.universal.join(" "))?;
    }
    for r in &d.rules {
        writeln!(f, "trans: {} {} -> {} {} {}", r.state, r.read, r.write, r.mv.letter(), r.next)?;
    }
    Ok(())
}
