//! Finite-horizon checks for digit-printing machines and the diagonal
//! operators over lists of digit streams.
//!
//! A machine is queried on integer inputs `n = 1, 2, ...`; the input is
//! written as a numeral over its input alphabet (see [`integer_input`]) and
//! the answer is whatever [`read_output`] finds on the tape when it halts.
//! Digit positions are 1-based. Non-halting within the fuel budget is a
//! verdict about that budget only.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::tm::{read_output, run, Machine, Outcome, SymbolId};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ApproxError {
    #[error("base {base} must be at least 2 and at most m - 1 = {max}")]
    InvalidBase { base: u32, max: u32 },
    #[error("the machine has no input symbols, so integer inputs cannot be written")]
    NoInputAlphabet,
    #[error("digit {digit} at position {position} is not below base {base}")]
    InvalidDigit { position: usize, digit: u32, base: u32 },
    #[error("stream {stream} has base {found}, expected {expected}")]
    BaseMismatch { stream: usize, found: u32, expected: u32 },
    #[error("stream {stream} has {available} digits, position {stream} is needed")]
    InsufficientDigits { stream: usize, available: usize },
    #[error("{streams} streams given, {needed} needed")]
    TooFewStreams { streams: usize, needed: usize },
    #[error("machine did not halt within fuel on input {0}")]
    NotHalting(u64),
    #[error("precision must satisfy 1 <= m <= horizon (m = {m}, horizon = {horizon})")]
    InvalidPrecision { m: u64, horizon: u64 },
}

/// Digits `d1 d2 ...` of `x = Σ d_i · base^(-i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DigitStream {
    base: u32,
    digits: Vec<u8>,
}

impl DigitStream {
    pub fn new(base: u32, digits: Vec<u8>) -> Result<DigitStream, ApproxError> {
        if !(2..=36).contains(&base) {
            return Err(ApproxError::InvalidBase { base, max: 36 });
        }
        if let Some((i, &d)) = digits.iter().enumerate().find(|(_, &d)| u32::from(d) >= base) {
            return Err(ApproxError::InvalidDigit {
                position: i + 1,
                digit: u32::from(d),
                base,
            });
        }
        Ok(DigitStream { base, digits })
    }

    /// Parses digits written as `0-9` then `a-z`.
    pub fn parse(text: &str, base: u32) -> Result<DigitStream, ApproxError> {
        let mut digits = Vec::with_capacity(text.len());
        for (i, c) in text.chars().enumerate() {
            let d = c.to_digit(36).ok_or(ApproxError::InvalidDigit {
                position: i + 1,
                digit: u32::MAX,
                base,
            })?;
            digits.push(d as u8);
        }
        DigitStream::new(base, digits)
    }

    /// First `len` digits of `numerator / denominator` by long division.
    pub fn from_ratio(numerator: u64, denominator: u64, base: u32, len: usize) -> Result<DigitStream, ApproxError> {
        assert!(denominator > 0 && numerator < denominator, "ratio must lie in [0, 1)");
        let mut rest = u128::from(numerator);
        let den = u128::from(denominator);
        let mut digits = Vec::with_capacity(len);
        for _ in 0..len {
            rest *= u128::from(base);
            digits.push((rest / den) as u8);
            rest %= den;
        }
        DigitStream::new(base, digits)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    /// Digit at 1-based `position`, if available.
    pub fn digit(&self, position: usize) -> Option<u8> {
        position.checked_sub(1).and_then(|i| self.digits.get(i)).copied()
    }

    pub fn available(&self) -> usize {
        self.digits.len()
    }
}

impl fmt::Display for DigitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_digits(&self.digits))
    }
}

/// Renders digits as `0-9a-z`.
pub fn format_digits(digits: &[u8]) -> String {
    digits
        .iter()
        .map(|&d| char::from_digit(u32::from(d), 36).unwrap_or('?'))
        .collect()
}

/// Fuel for the run on input `n`: `base + quadratic · n²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FuelPolicy {
    pub base: u64,
    pub quadratic: u64,
}

impl FuelPolicy {
    pub fn fuel(&self, n: u64) -> u64 {
        self.base
            .saturating_add(self.quadratic.saturating_mul(n.saturating_mul(n)))
            .max(1)
    }
}

impl Default for FuelPolicy {
    fn default() -> Self {
        FuelPolicy {
            base: 10_000,
            quadratic: 100,
        }
    }
}

/// Writes `n` on the tape: unary (`n` copies of symbol 0) when `k = 1`,
/// otherwise positional in base `min(k, 10)`, most significant digit first.
pub fn integer_input(n: u64, input_symbols: u32) -> Result<Vec<SymbolId>, ApproxError> {
    match input_symbols {
        0 => Err(ApproxError::NoInputAlphabet),
        1 => Ok(alloc::vec![SymbolId(0); n as usize]),
        k => {
            let radix = u64::from(k.min(10));
            let mut digits = Vec::new();
            let mut rest = n;
            loop {
                digits.push(SymbolId((rest % radix) as u32));
                rest /= radix;
                if rest == 0 {
                    break;
                }
            }
            digits.reverse();
            Ok(digits)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Halted { steps: u64 },
    OutOfFuel { fuel: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observation {
    pub n: u64,
    pub status: RunStatus,
    pub output: Vec<u8>,
}

impl Observation {
    pub fn status_label(&self) -> &'static str {
        match self.status {
            RunStatus::Halted { .. } => "HALTED",
            RunStatus::OutOfFuel { .. } => "OUT_OF_FUEL",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DidNotHalt { fuel: u64 },
    TooFewDigits { printed: usize, required: usize },
    /// Disagrees with an earlier output at this digit position.
    PrefixMismatch { position: usize },
    ReferenceMismatch { position: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DidNotHalt { fuel } => write!(f, "did not halt within fuel ({fuel} steps)"),
            Violation::TooFewDigits { printed, required } => {
                write!(f, "printed {printed} digits, at least {required} required")
            }
            Violation::PrefixMismatch { position } => write!(f, "prefix mismatch at digit {position}"),
            Violation::ReferenceMismatch { position } => {
                write!(f, "reference mismatch at digit {position}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// No violation up to the horizon. For the approachability check the
    /// value is the witness `k`.
    ConformsUpTo(u64),
    /// Definitive: the run on input `n` broke the contract.
    ViolatesAt { n: u64, violation: Violation },
    /// No stable window was found below this horizon.
    Inconclusive(u64),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::ConformsUpTo(n) => write!(f, "CONFORMS {n}"),
            Verdict::ViolatesAt { n, violation } => write!(f, "VIOLATES {n} {violation}"),
            Verdict::Inconclusive(h) => write!(f, "INCONCLUSIVE {h}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxReport {
    pub verdict: Verdict,
    pub transcript: Vec<Observation>,
}

fn check_base(machine: &Machine, base: u32) -> Result<(), ApproxError> {
    let max = machine.symbols().saturating_sub(1);
    if base < 2 || base > max {
        return Err(ApproxError::InvalidBase { base, max });
    }
    Ok(())
}

fn observe(machine: &Machine, base: u32, n: u64, policy: &FuelPolicy) -> Result<Observation, ApproxError> {
    let input = integer_input(n, machine.input_symbols())?;
    let fuel = policy.fuel(n);
    let outcome = run(machine, &input, fuel).expect("integer inputs are valid and fuel is positive");
    Ok(match outcome {
        Outcome::Halted(c) => Observation {
            n,
            status: RunStatus::Halted { steps: c.steps },
            output: read_output(&c, base),
        },
        Outcome::OutOfFuel(_) => Observation {
            n,
            status: RunStatus::OutOfFuel { fuel },
            output: Vec::new(),
        },
    })
}

fn first_difference(a: &[u8], b: &[u8]) -> Option<usize> {
    a.iter().zip(b).position(|(x, y)| x != y).map(|i| i + 1)
}

/// Checks the computable-number contract on inputs `1..=max_n`: every run
/// halts and prints at least `n` digits, all printed digits agree with every
/// earlier output, and with `reference` where it has digits.
pub fn check_computable(
    machine: &Machine,
    base: u32,
    max_n: u64,
    reference: Option<&DigitStream>,
    policy: &FuelPolicy,
) -> Result<ApproxReport, ApproxError> {
    check_base(machine, base)?;
    if machine.input_symbols() == 0 {
        return Err(ApproxError::NoInputAlphabet);
    }
    let mut transcript = Vec::new();
    // Longest output seen so far; every output must agree with it.
    let mut committed: Vec<u8> = Vec::new();
    for n in 1..=max_n {
        let obs = observe(machine, base, n, policy)?;
        let violation = match obs.status {
            RunStatus::OutOfFuel { fuel } => Some(Violation::DidNotHalt { fuel }),
            RunStatus::Halted { .. } if (obs.output.len() as u64) < n => Some(Violation::TooFewDigits {
                printed: obs.output.len(),
                required: n as usize,
            }),
            RunStatus::Halted { .. } => {
                if let Some(position) = first_difference(&committed, &obs.output) {
                    Some(Violation::PrefixMismatch { position })
                } else {
                    reference
                        .and_then(|r| first_difference(&r.digits, &obs.output))
                        .map(|position| Violation::ReferenceMismatch { position })
                }
            }
        };
        if obs.output.len() > committed.len() {
            committed.clone_from(&obs.output);
        }
        transcript.push(obs);
        if let Some(violation) = violation {
            return Ok(ApproxReport {
                verdict: Verdict::ViolatesAt { n, violation },
                transcript,
            });
        }
    }
    Ok(ApproxReport {
        verdict: Verdict::ConformsUpTo(max_n),
        transcript,
    })
}

/// Shortest stable window accepted as evidence when searching `m..=horizon`:
/// half of the searched range, rounded up.
pub fn min_stable_window(m: u64, horizon: u64) -> u64 {
    (horizon - m + 1).div_ceil(2)
}

/// Looks for the approachability witness for precision `m`: the smallest
/// `k >= m` such that every run on `n` in `k..=horizon` halts and prints at
/// least `m` digits with the same first `m` digits. The window `k..=horizon`
/// must cover at least [`min_stable_window`] inputs, otherwise the result is
/// inconclusive. Every input `1..=horizon` must halt.
pub fn check_approaching(
    machine: &Machine,
    base: u32,
    m: u64,
    horizon: u64,
    policy: &FuelPolicy,
) -> Result<ApproxReport, ApproxError> {
    check_base(machine, base)?;
    if machine.input_symbols() == 0 {
        return Err(ApproxError::NoInputAlphabet);
    }
    if m == 0 || m > horizon {
        return Err(ApproxError::InvalidPrecision { m, horizon });
    }
    let mut transcript = Vec::with_capacity(horizon as usize);
    for n in 1..=horizon {
        let obs = observe(machine, base, n, policy)?;
        if let RunStatus::OutOfFuel { fuel } = obs.status {
            transcript.push(obs);
            return Ok(ApproxReport {
                verdict: Verdict::ViolatesAt {
                    n,
                    violation: Violation::DidNotHalt { fuel },
                },
                transcript,
            });
        }
        transcript.push(obs);
    }
    let precision = m as usize;
    let last = &transcript[horizon as usize - 1].output;
    let target = (last.len() >= precision).then(|| &last[..precision]);
    let mut start = horizon + 1;
    if let Some(target) = target {
        while start > m {
            let out = &transcript[start as usize - 2].output;
            if out.len() >= precision && &out[..precision] == target {
                start -= 1;
            } else {
                break;
            }
        }
    }
    let verdict = if start <= horizon && horizon - start + 1 >= min_stable_window(m, horizon) {
        Verdict::ConformsUpTo(start)
    } else {
        Verdict::Inconclusive(horizon)
    };
    Ok(ApproxReport { verdict, transcript })
}

/// The digits a machine settles on by `horizon`: the output on input
/// `horizon`, after checking that every input `1..=horizon` halts.
pub fn stream_of_machine(machine: &Machine, base: u32, horizon: u64, policy: &FuelPolicy) -> Result<DigitStream, ApproxError> {
    check_base(machine, base)?;
    if machine.input_symbols() == 0 {
        return Err(ApproxError::NoInputAlphabet);
    }
    let mut last = Vec::new();
    for n in 1..=horizon {
        let obs = observe(machine, base, n, policy)?;
        if let RunStatus::OutOfFuel { .. } = obs.status {
            return Err(ApproxError::NotHalting(n));
        }
        last = obs.output;
    }
    DigitStream::new(base, last)
}

fn diagonal_digits(streams: &[DigitStream], n: usize, base: Option<u32>) -> Result<Vec<u8>, ApproxError> {
    if streams.len() < n {
        return Err(ApproxError::TooFewStreams {
            streams: streams.len(),
            needed: n,
        });
    }
    let mut out = Vec::with_capacity(n);
    for (i, stream) in streams.iter().take(n).enumerate() {
        let position = i + 1;
        if let Some(expected) = base {
            if stream.base != expected {
                return Err(ApproxError::BaseMismatch {
                    stream: position,
                    found: stream.base,
                    expected,
                });
            }
        }
        let d = stream.digit(position).ok_or(ApproxError::InsufficientDigits {
            stream: position,
            available: stream.available(),
        })?;
        out.push(d);
    }
    Ok(out)
}

/// Digit `i` is digit `i` of stream `i`, for `i = 1..=n`.
pub fn diagonal_prime(streams: &[DigitStream], n: usize) -> Result<Vec<u8>, ApproxError> {
    diagonal_digits(streams, n, None)
}

/// Digit `i` is digit `i` of stream `i` plus one, modulo `base`.
pub fn diagonal(streams: &[DigitStream], n: usize, base: u32) -> Result<Vec<u8>, ApproxError> {
    if base < 2 {
        return Err(ApproxError::InvalidBase { base, max: 36 });
    }
    let digits = diagonal_digits(streams, n, Some(base))?;
    Ok(digits
        .into_iter()
        .map(|d| ((u32::from(d) + 1) % base) as u8)
        .collect())
}
