//! Line-oriented text formats: machine descriptions, input words, program
//! lists and stream files.

use std::fmt::Write as _;

use approachable_core::approx::DigitStream;
use approachable_core::codec::{machine_of, MachineNumber};
use approachable_core::{Machine, Move, Program, RawMachine, StateId, SymbolId, Transition};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    /// 1-based line number.
    pub line: usize,
    pub message: String,
}

impl FormatError {
    fn new(line: usize, message: impl Into<String>) -> FormatError {
        FormatError {
            line,
            message: message.into(),
        }
    }
}

/// Lines that carry content: blank lines and `#` comments are skipped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_u32(line: usize, word: &str, what: &str) -> Result<u32, FormatError> {
    word.parse()
        .map_err(|_| FormatError::new(line, format!("expected {what}, found {word:?}")))
}

/// Parses the description printed by `Machine`'s `Display`:
///
/// ```text
/// states 2
/// inputs 0
/// symbols 1
/// finals 1
/// 0 0 -> 0 0 L
/// ```
///
/// Transitions may appear in any order; the result is canonical.
pub fn parse_machine(text: &str) -> Result<Machine, FormatError> {
    let mut states = None;
    let mut inputs = None;
    let mut symbols = None;
    let mut finals = None;
    let mut transitions = Vec::new();
    let mut last = 0;
    for (line, content) in content_lines(text) {
        last = line;
        let words: Vec<&str> = content.split_whitespace().collect();
        match words[0] {
            "states" | "inputs" | "symbols" => {
                let [key, value] = words[..] else {
                    return Err(FormatError::new(line, format!("expected `{} <count>`", words[0])));
                };
                let slot = match key {
                    "states" => &mut states,
                    "inputs" => &mut inputs,
                    _ => &mut symbols,
                };
                if slot.is_some() {
                    return Err(FormatError::new(line, format!("duplicate `{key}` line")));
                }
                *slot = Some(parse_u32(line, value, "a count")?);
            }
            "finals" => {
                if finals.is_some() {
                    return Err(FormatError::new(line, "duplicate `finals` line"));
                }
                let list = words[1..]
                    .iter()
                    .map(|w| parse_u32(line, w, "a state").map(StateId))
                    .collect::<Result<Vec<_>, _>>()?;
                finals = Some(list);
            }
            _ => {
                let [p, a, "->", q, b, x] = words[..] else {
                    return Err(FormatError::new(line, "expected `p a -> q b L|R`"));
                };
                let moves = match x {
                    "L" => Move::Left,
                    "R" => Move::Right,
                    _ => return Err(FormatError::new(line, format!("expected L or R, found {x:?}"))),
                };
                transitions.push(Transition::new(
                    parse_u32(line, p, "a state")?,
                    parse_u32(line, a, "a symbol")?,
                    parse_u32(line, q, "a state")?,
                    parse_u32(line, b, "a symbol")?,
                    moves,
                ));
            }
        }
    }
    let end = last + 1;
    let missing = |what: &str| FormatError::new(end, format!("missing `{what}` line"));
    let raw = RawMachine {
        states: states.ok_or_else(|| missing("states"))?,
        input_symbols: inputs.ok_or_else(|| missing("inputs"))?,
        symbols: symbols.ok_or_else(|| missing("symbols"))?,
        transitions,
        finals: finals.ok_or_else(|| missing("finals"))?,
    };
    Machine::canonical(raw).map_err(|report| FormatError::new(end, format!("invalid machine: {report}")))
}

/// Renders an input word as one base-36 digit per symbol; symbols from 36
/// on are written as `[n]`.
pub fn format_word(word: &[SymbolId]) -> String {
    let mut out = String::with_capacity(word.len());
    for s in word {
        match char::from_digit(s.0, 36) {
            Some(c) => out.push(c),
            None => write!(out, "[{}]", s.0).unwrap(),
        }
    }
    out
}

/// Inverse of [`format_word`]. Range checks against a machine happen when
/// the program is built.
pub fn parse_word(text: &str) -> Result<Vec<SymbolId>, String> {
    let mut word = Vec::with_capacity(text.len());
    let mut chars = text.char_indices();
    while let Some((i, c)) = chars.next() {
        if c == '[' {
            let rest = &text[i + 1..];
            let close = rest.find(']').ok_or_else(|| format!("unclosed '[' at position {i}"))?;
            let value = rest[..close]
                .parse()
                .map_err(|_| format!("bad symbol {:?} at position {i}", &rest[..close]))?;
            word.push(SymbolId(value));
            for _ in 0..=close {
                chars.next();
            }
        } else {
            let d = c
                .to_digit(36)
                .ok_or_else(|| format!("input symbol {c:?} at position {i} is not a base-36 digit"))?;
            word.push(SymbolId(d));
        }
    }
    Ok(word)
}

/// `machine_number<TAB>input_word` per line; the tab and word may be
/// omitted for the empty input.
pub fn parse_programs(text: &str) -> Result<Vec<(MachineNumber, Program)>, FormatError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            let line = i + 1;
            let (number, word) = l.split_once('\t').unwrap_or((l, ""));
            let number: MachineNumber = number
                .trim()
                .parse()
                .map_err(|e| FormatError::new(line, format!("{e}")))?;
            let machine = machine_of(&number).map_err(|e| FormatError::new(line, format!("{e}")))?;
            let input = parse_word(word.trim()).map_err(|m| FormatError::new(line, m))?;
            let program = Program::new(machine, input).map_err(|e| FormatError::new(line, format!("{e}")))?;
            Ok((number, program))
        })
        .collect()
}

pub fn format_program_line(number: &MachineNumber, program: &Program) -> String {
    format!("{number}\t{}", format_word(&program.input))
}

/// One digit string per line; line `i` is stream `i`, so an empty line is
/// a stream with no digits. Trailing empty lines are ignored. Every stream
/// is read in `base`.
pub fn parse_streams(text: &str, base: u32) -> Result<Vec<DigitStream>, FormatError> {
    let lines: Vec<&str> = text.lines().collect();
    let used = lines.iter().rposition(|l| !l.trim().is_empty()).map_or(0, |i| i + 1);
    lines[..used]
        .iter()
        .enumerate()
        .map(|(i, l)| DigitStream::parse(l.trim(), base).map_err(|e| FormatError::new(i + 1, format!("{e}"))))
        .collect()
}

pub fn format_streams(streams: &[DigitStream]) -> String {
    let mut out = String::new();
    for s in streams {
        writeln!(out, "{s}").unwrap();
    }
    out
}

/// The first stream of a stream file.
pub fn parse_reference(text: &str, base: u32) -> Result<DigitStream, FormatError> {
    parse_streams(text, base)?
        .into_iter()
        .next()
        .ok_or_else(|| FormatError::new(1, "reference file holds no digit string"))
}
