//! Text encoding of machines over the alphabet `0 1 ( ) ,` and the base-5
//! machine numbers obtained by substituting those characters with `0..=4`.
//!
//! ```text
//! machine := "(" num "," num "," num "," "(" trans ("," trans)* ")" "," "(" num ("," num)* ")" ")"
//! trans   := "(" num "," num "," num "," num "," bit ")"
//! num     := "0" | "1" ("0"|"1")*
//! bit     := "0" | "1"
//! ```
//!
//! The header numerals are `n`, `k`, `m` in that order. No whitespace is
//! allowed anywhere.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use crate::tm::{push_binary, Machine, Move, RawMachine, StateId, SymbolId, Transition};
use crate::validate::ValidityReport;

/// The five encoding characters in machine-number digit order.
pub const ALPHABET: [u8; 5] = *b"01(),";

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("syntax error at position {position}: expected {expected}")]
    Syntax {
        position: usize,
        expected: &'static str,
    },
    #[error("numeral at position {position} does not fit in 32 bits")]
    NumeralOverflow { position: usize },
    #[error("invalid machine: {0}")]
    Semantic(ValidityReport),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum NumberError {
    #[error("illegal character {found:?} at position {position}")]
    IllegalCharacter { position: usize, found: char },
    #[error("illegal digit {found:?} at position {position}")]
    IllegalDigit { position: usize, found: char },
}

/// A machine number: digits `0..=4`, compared by the integer they denote
/// (spellings with extra leading zeros sort after the plain one).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "String", into = "String"))]
pub struct MachineNumber(String);

impl MachineNumber {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Number of base-5 digits, including any leading zeros.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Digits without leading zeros.
    pub(crate) fn significant(&self) -> &str {
        self.0.trim_start_matches('0')
    }
}

impl Ord for MachineNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        let (l, r) = (self.significant(), other.significant());
        l.len()
            .cmp(&r.len())
            .then_with(|| l.cmp(r))
            .then_with(|| self.0.len().cmp(&other.0.len()))
    }
}

impl PartialOrd for MachineNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromStr for MachineNumber {
    type Err = NumberError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some((position, found)) = s.char_indices().find(|&(_, c)| !('0'..='4').contains(&c)) {
            return Err(NumberError::IllegalDigit { position, found });
        }
        Ok(MachineNumber(String::from(s)))
    }
}

impl TryFrom<String> for MachineNumber {
    type Error = NumberError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<MachineNumber> for String {
    fn from(value: MachineNumber) -> Self {
        value.0
    }
}

impl fmt::Display for MachineNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn push_numeral(out: &mut String, value: u32) {
    let mut bits = Vec::new();
    push_binary(&mut bits, value);
    out.extend(bits.into_iter().map(|b| char::from(b'0' + b)));
}

/// Canonical encoding of a valid machine.
pub fn encode(machine: &Machine) -> String {
    let mut out = String::new();
    out.push('(');
    push_numeral(&mut out, machine.states());
    out.push(',');
    push_numeral(&mut out, machine.input_symbols());
    out.push(',');
    push_numeral(&mut out, machine.symbols());
    out.push_str(",(");
    for (i, t) in machine.transitions().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push('(');
        push_numeral(&mut out, t.from.0);
        out.push(',');
        push_numeral(&mut out, t.read.0);
        out.push(',');
        push_numeral(&mut out, t.to.0);
        out.push(',');
        push_numeral(&mut out, t.write.0);
        out.push(',');
        out.push(if t.moves == Move::Right { '1' } else { '0' });
        out.push(')');
    }
    out.push_str("),(");
    for (i, f) in machine.finals().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        push_numeral(&mut out, f.0);
    }
    out.push_str("))");
    out
}

/// Validates and encodes an unchecked description.
pub fn encode_raw(raw: &RawMachine) -> Result<String, ValidityReport> {
    Machine::new(raw.clone()).map(|m| encode(&m))
}

/// Parses an encoding into its unchecked description, without semantic checks.
pub fn parse(text: &str) -> Result<RawMachine, DecodeError> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
    };
    let raw = p.machine()?;
    if p.pos != p.bytes.len() {
        return Err(p.error("end of input"));
    }
    Ok(raw)
}

/// Parses an encoding and checks every machine rule.
pub fn decode(text: &str) -> Result<Machine, DecodeError> {
    Machine::new(parse(text)?).map_err(DecodeError::Semantic)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, expected: &'static str) -> DecodeError {
        DecodeError::Syntax {
            position: self.pos,
            expected,
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, byte: u8, expected: &'static str) -> Result<(), DecodeError> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn numeral(&mut self) -> Result<u32, DecodeError> {
        let start = self.pos;
        match self.peek() {
            Some(b'0') => {
                self.pos += 1;
                Ok(0)
            }
            Some(b'1') => {
                let mut value: u32 = 0;
                while let Some(b @ (b'0' | b'1')) = self.peek() {
                    value = value
                        .checked_mul(2)
                        .and_then(|v| v.checked_add(u32::from(b - b'0')))
                        .ok_or(DecodeError::NumeralOverflow { position: start })?;
                    self.pos += 1;
                }
                Ok(value)
            }
            _ => Err(self.error("binary numeral")),
        }
    }

    fn bit(&mut self) -> Result<Move, DecodeError> {
        let moves = self
            .peek()
            .and_then(|b| b.checked_sub(b'0'))
            .and_then(Move::from_bit)
            .ok_or_else(|| self.error("move bit '0' or '1'"))?;
        self.pos += 1;
        Ok(moves)
    }

    fn transition(&mut self) -> Result<Transition, DecodeError> {
        self.expect(b'(', "'(' opening a transition")?;
        let from = self.numeral()?;
        self.expect(b',', "','")?;
        let read = self.numeral()?;
        self.expect(b',', "','")?;
        let to = self.numeral()?;
        self.expect(b',', "','")?;
        let write = self.numeral()?;
        self.expect(b',', "','")?;
        let moves = self.bit()?;
        self.expect(b')', "')' closing a transition")?;
        Ok(Transition {
            from: StateId(from),
            read: SymbolId(read),
            to: StateId(to),
            write: SymbolId(write),
            moves,
        })
    }

    fn machine(&mut self) -> Result<RawMachine, DecodeError> {
        self.expect(b'(', "'('")?;
        let states = self.numeral()?;
        self.expect(b',', "','")?;
        let input_symbols = self.numeral()?;
        self.expect(b',', "','")?;
        let symbols = self.numeral()?;
        self.expect(b',', "','")?;

        self.expect(b'(', "'(' opening the transition list")?;
        let mut transitions = Vec::new();
        loop {
            transitions.push(self.transition()?);
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b')') => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.error("',' or ')' after a transition")),
            }
        }
        self.expect(b',', "','")?;

        self.expect(b'(', "'(' opening the final-state list")?;
        let mut finals = Vec::new();
        loop {
            finals.push(StateId(self.numeral()?));
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b')') => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.error("',' or ')' after a final state")),
            }
        }
        self.expect(b')', "')' closing the machine")?;
        Ok(RawMachine {
            states,
            input_symbols,
            symbols,
            transitions,
            finals,
        })
    }
}

/// Character-wise substitution `0 1 ( ) ,` → `0 1 2 3 4`.
pub fn to_number(text: &str) -> Result<MachineNumber, NumberError> {
    let mut digits = String::with_capacity(text.len());
    for (position, c) in text.char_indices() {
        let d = ALPHABET
            .iter()
            .position(|&a| char::from(a) == c)
            .ok_or(NumberError::IllegalCharacter { position, found: c })?;
        digits.push(char::from(b'0' + d as u8));
    }
    Ok(MachineNumber(digits))
}

/// Inverse of [`to_number`].
pub fn from_number(number: &MachineNumber) -> String {
    number
        .0
        .bytes()
        .map(|d| char::from(ALPHABET[usize::from(d - b'0')]))
        .collect()
}

pub fn number_of(machine: &Machine) -> MachineNumber {
    // The encoding only uses alphabet characters.
    to_number(&encode(machine)).expect("encodings use the five-character alphabet")
}

pub fn machine_of(number: &MachineNumber) -> Result<Machine, DecodeError> {
    decode(&from_number(number))
}
