//! Enumeration of valid machines by machine number, of input words, and of
//! programs through the Cantor pairing.
//!
//! Machine numbers all start with the digit `2`, so ordering them by value is
//! the same as ordering by length and then lexicographically. Machines of one
//! encoding length are generated structurally: the header fixes the set of
//! `(p, a)` pairs that need a transition, and only the numerals of the target
//! states and written symbols can vary in width.

use alloc::vec::Vec;

use crate::codec::{number_of, MachineNumber};
use crate::tm::{binary_len, Machine, Move, RawMachine, StateId, SymbolId, Transition};

/// One-based rank of a valid machine in machine-number order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MachineIndex(pub u64);

/// Position of a program in the pairing order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProgramIndex(pub u64);

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EnumError {
    #[error("input rank {rank} out of range: the machine has an empty input alphabet")]
    RankOutOfRange { rank: u64 },
    #[error("program index {index} is vacant: machine {machine} has no input of rank {input_rank}")]
    VacantIndex {
        index: u64,
        machine: u64,
        input_rank: u64,
    },
    #[error("machine index {0} is beyond the end of the catalog")]
    MachineIndexOutOfRange(u64),
    #[error("machine is not in the catalog")]
    UnknownMachine,
    #[error("input symbol {symbol} at position {position} is not below k = {input_symbols}")]
    InvalidInput {
        position: usize,
        symbol: u32,
        input_symbols: u32,
    },
    #[error("index arithmetic overflowed")]
    Overflow,
}

/// A machine together with the word written on its tape at start.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Program {
    pub machine: Machine,
    pub input: Vec<SymbolId>,
}

impl Program {
    pub fn new(machine: Machine, input: Vec<SymbolId>) -> Result<Program, EnumError> {
        if let Some((position, s)) = input
            .iter()
            .enumerate()
            .find(|(_, s)| s.0 >= machine.input_symbols())
        {
            return Err(EnumError::InvalidInput {
                position,
                symbol: s.0,
                input_symbols: machine.input_symbols(),
            });
        }
        Ok(Program { machine, input })
    }
}

// ---------------------------------------------------------------------------
// Machines of a given encoding length.

/// Sum of `binary_len(v)` for `v` in `0..count`.
fn numerals_len(count: u32) -> usize {
    (0..count).map(binary_len).sum()
}

/// Values whose minimal binary numeral has exactly `width` characters and
/// that are below `bound`.
fn values_of_width(width: usize, bound: u32) -> core::ops::Range<u32> {
    let (lo, hi) = match width {
        1 => (0u64, 2u64),
        w => (1u64 << (w - 1), 1u64 << w),
    };
    let hi = hi.min(u64::from(bound));
    lo.min(hi) as u32..hi as u32
}

/// Characters used by the transitions of a non-final state `p` when every
/// target state and written symbol is a one-character numeral, separators
/// included.
fn row_floor(p: u32, symbols: u32) -> usize {
    // "(" p "," a "," q "," b "," x ")" plus one separator: 8 + |p| + |a| + 2.
    symbols as usize * (10 + binary_len(p)) + numerals_len(symbols)
}

fn final_cost(s: u32) -> usize {
    binary_len(s) + 1
}

fn header_len(states: u32, inputs: u32, symbols: u32) -> usize {
    4 + binary_len(states) + binary_len(inputs) + binary_len(symbols)
}

/// Shortest possible encoding for these header values: every state but 0 final.
fn length_floor(states: u32, inputs: u32, symbols: u32) -> usize {
    let finals: usize = (1..states).map(final_cost).sum();
    // "(" block ")" "," "(" finals ")" ")" adds four characters.
    header_len(states, inputs, symbols) + 4 + row_floor(0, symbols) + finals
}

struct LengthSearch {
    target: usize,
    out: Vec<MachineNumber>,
}

impl LengthSearch {
    fn run(mut self) -> Vec<MachineNumber> {
        let mut symbols = 1u32;
        while length_floor(2, 0, symbols) <= self.target {
            let mut states = 2u32;
            while length_floor(states, 0, symbols) <= self.target {
                for inputs in 0..symbols {
                    if length_floor(states, inputs, symbols) > self.target {
                        break;
                    }
                    let mut finals = Vec::new();
                    let used = header_len(states, inputs, symbols) + 4 + row_floor(0, symbols);
                    self.choose_finals(states, inputs, symbols, 1, used, &mut finals);
                }
                states += 1;
            }
            symbols += 1;
        }
        self.out.sort();
        self.out
    }

    /// Decides final/non-final for states `state..states`; `used` counts the
    /// floor of what has been decided so far.
    fn choose_finals(&mut self, states: u32, inputs: u32, symbols: u32, state: u32, used: usize, finals: &mut Vec<u32>) {
        let rest: usize = (state..states).map(final_cost).sum();
        if used + rest > self.target {
            return;
        }
        if state == states {
            if !finals.is_empty() {
                self.fill_transitions(states, inputs, symbols, finals, self.target - used);
            }
            return;
        }
        finals.push(state);
        self.choose_finals(states, inputs, symbols, state + 1, used + final_cost(state), finals);
        finals.pop();
        self.choose_finals(states, inputs, symbols, state + 1, used + row_floor(state, symbols), finals);
    }

    fn fill_transitions(&mut self, states: u32, inputs: u32, symbols: u32, finals: &[u32], slack: usize) {
        let sources: Vec<(u32, u32)> = (0..states)
            .filter(|p| finals.binary_search(p).is_err())
            .flat_map(|p| (0..symbols).map(move |a| (p, a)))
            .collect();
        let widest = (binary_len(states - 1) - 1) + (binary_len(symbols - 1) - 1);
        if slack > widest * sources.len() {
            return;
        }
        let mut chosen = Vec::with_capacity(sources.len());
        let header = (states, inputs, symbols, finals);
        self.assign(header, &sources, widest, slack, &mut chosen);
    }

    fn assign(
        &mut self,
        header: (u32, u32, u32, &[u32]),
        sources: &[(u32, u32)],
        widest: usize,
        slack: usize,
        chosen: &mut Vec<(u32, u32)>,
    ) {
        let (states, _, symbols, _) = header;
        let left = sources.len() - chosen.len();
        if left == 0 {
            if slack == 0 {
                self.emit(header, sources, chosen);
            }
            return;
        }
        if slack > widest * left {
            return;
        }
        for q_width in 1..=binary_len(states - 1) {
            for b_width in 1..=binary_len(symbols - 1) {
                let cost = (q_width - 1) + (b_width - 1);
                if cost > slack {
                    continue;
                }
                for q in values_of_width(q_width, states) {
                    for b in values_of_width(b_width, symbols) {
                        chosen.push((q, b));
                        self.assign(header, sources, widest, slack - cost, chosen);
                        chosen.pop();
                    }
                }
            }
        }
    }

    fn emit(&mut self, header: (u32, u32, u32, &[u32]), sources: &[(u32, u32)], chosen: &[(u32, u32)]) {
        let (states, inputs, symbols, finals) = header;
        let count = sources.len();
        assert!(count < 64, "too many transitions for move enumeration");
        for moves in 0u64..(1u64 << count) {
            let transitions = sources
                .iter()
                .zip(chosen)
                .enumerate()
                .map(|(i, (&(p, a), &(q, b)))| {
                    let x = if moves >> i & 1 == 1 { Move::Right } else { Move::Left };
                    Transition::new(p, a, q, b, x)
                })
                .collect();
            let raw = RawMachine {
                states,
                input_symbols: inputs,
                symbols,
                transitions,
                finals: finals.iter().map(|&f| StateId(f)).collect(),
            };
            let machine = Machine::canonical(raw).expect("structurally generated machines are valid");
            self.out.push(number_of(&machine));
        }
    }
}

/// Every valid machine number with exactly `len` digits, in increasing order.
pub fn numbers_of_length(len: usize) -> Vec<MachineNumber> {
    LengthSearch {
        target: len,
        out: Vec::new(),
    }
    .run()
}

/// Valid machine numbers in increasing order, one encoding length at a time.
#[derive(Clone, Debug)]
pub struct MachineEnumerator {
    length: usize,
    batch: Vec<MachineNumber>,
    pos: usize,
}

impl MachineEnumerator {
    pub fn new() -> MachineEnumerator {
        MachineEnumerator {
            length: 0,
            batch: Vec::new(),
            pos: 0,
        }
    }

    /// Continues strictly after `after`.
    pub fn after(after: &MachineNumber) -> MachineEnumerator {
        let length = after.significant().len();
        let batch = numbers_of_length(length);
        let pos = batch.partition_point(|n| n <= after);
        MachineEnumerator { length, batch, pos }
    }
}

impl Default for MachineEnumerator {
    fn default() -> Self {
        MachineEnumerator::new()
    }
}

impl Iterator for MachineEnumerator {
    type Item = MachineNumber;

    fn next(&mut self) -> Option<MachineNumber> {
        while self.pos == self.batch.len() {
            self.length += 1;
            self.batch = numbers_of_length(self.length);
            self.pos = 0;
        }
        self.pos += 1;
        Some(self.batch[self.pos - 1].clone())
    }
}

/// Smallest valid machine number strictly greater than `after`.
pub fn next_valid_number(after: Option<&MachineNumber>) -> MachineNumber {
    let mut machines = match after {
        Some(after) => MachineEnumerator::after(after),
        None => MachineEnumerator::new(),
    };
    machines.next().expect("the enumeration is infinite")
}

/// The first `limit` valid machines with their one-based indices.
pub fn enumerate_machines(limit: usize) -> Vec<(MachineIndex, Machine)> {
    MachineEnumerator::new()
        .take(limit)
        .enumerate()
        .map(|(i, n)| {
            let m = crate::codec::machine_of(&n).expect("enumerated numbers decode");
            (MachineIndex(i as u64 + 1), m)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Input words.

/// The input word of the given rank: words over `0..k` by length, then
/// lexicographically. With `k = 0` only the empty word (rank 0) exists.
pub fn enumerate_inputs(machine: &Machine, rank: u64) -> Result<Vec<SymbolId>, EnumError> {
    input_word(machine.input_symbols(), rank)
}

pub fn input_word(k: u32, rank: u64) -> Result<Vec<SymbolId>, EnumError> {
    match k {
        0 if rank == 0 => Ok(Vec::new()),
        0 => Err(EnumError::RankOutOfRange { rank }),
        1 => Ok(alloc::vec![SymbolId(0); rank as usize]),
        _ => {
            let k = u128::from(k);
            let mut rest = u128::from(rank);
            let mut len = 0usize;
            let mut block = 1u128;
            while rest >= block {
                rest -= block;
                len += 1;
                block *= k;
            }
            let mut word = alloc::vec![SymbolId(0); len];
            for slot in word.iter_mut().rev() {
                *slot = SymbolId((rest % k) as u32);
                rest /= k;
            }
            Ok(word)
        }
    }
}

/// Inverse of [`input_word`].
pub fn input_rank(k: u32, word: &[SymbolId]) -> Result<u64, EnumError> {
    if let Some((position, s)) = word.iter().enumerate().find(|(_, s)| s.0 >= k) {
        return Err(EnumError::InvalidInput {
            position,
            symbol: s.0,
            input_symbols: k,
        });
    }
    if k == 1 {
        return Ok(word.len() as u64);
    }
    let k = u64::from(k);
    let mut shorter = 0u64;
    let mut block = 1u64;
    let mut value = 0u64;
    for s in word {
        shorter = shorter.checked_add(block).ok_or(EnumError::Overflow)?;
        block = block.checked_mul(k).ok_or(EnumError::Overflow)?;
        value = value
            .checked_mul(k)
            .and_then(|v| v.checked_add(u64::from(s.0)))
            .ok_or(EnumError::Overflow)?;
    }
    shorter.checked_add(value).ok_or(EnumError::Overflow)
}

// ---------------------------------------------------------------------------
// Pairing.

/// `(a + b)(a + b + 1) / 2 + b`.
pub fn cantor_pair(a: u64, b: u64) -> Option<u64> {
    let d = a.checked_add(b)?;
    let tri = (u128::from(d) * (u128::from(d) + 1)) / 2;
    u64::try_from(tri + u128::from(b)).ok()
}

pub fn cantor_unpair(z: u64) -> (u64, u64) {
    let z = u128::from(z);
    let d = ((8 * z + 1).isqrt() - 1) / 2;
    let b = z - d * (d + 1) / 2;
    ((d - b) as u64, b as u64)
}

/// Machines addressable by index: the full syntactic enumeration, or a
/// fixed allowlist ordered by machine number.
#[derive(Clone, Debug)]
pub struct MachineCatalog {
    machines: Vec<(MachineNumber, Machine)>,
    source: Option<MachineEnumerator>,
}

impl MachineCatalog {
    pub fn enumerated() -> MachineCatalog {
        MachineCatalog {
            machines: Vec::new(),
            source: Some(MachineEnumerator::new()),
        }
    }

    pub fn allowlist<I: IntoIterator<Item = Machine>>(machines: I) -> MachineCatalog {
        let mut machines: Vec<_> = machines.into_iter().map(|m| (number_of(&m), m)).collect();
        machines.sort_by(|a, b| a.0.cmp(&b.0));
        machines.dedup_by(|a, b| a.0 == b.0);
        MachineCatalog {
            machines,
            source: None,
        }
    }

    fn fill_to(&mut self, count: usize) -> bool {
        while self.machines.len() < count {
            let Some(source) = self.source.as_mut() else {
                return false;
            };
            let number = source.next().expect("the enumeration is infinite");
            let machine = crate::codec::machine_of(&number).expect("enumerated numbers decode");
            self.machines.push((number, machine));
        }
        true
    }

    pub fn machine(&mut self, index: MachineIndex) -> Result<&Machine, EnumError> {
        if index.0 == 0 || !self.fill_to(index.0 as usize) {
            return Err(EnumError::MachineIndexOutOfRange(index.0));
        }
        Ok(&self.machines[index.0 as usize - 1].1)
    }

    pub fn number(&mut self, index: MachineIndex) -> Result<&MachineNumber, EnumError> {
        self.machine(index)?;
        Ok(&self.machines[index.0 as usize - 1].0)
    }

    pub fn index_of(&mut self, machine: &Machine) -> Result<MachineIndex, EnumError> {
        let target = number_of(machine);
        loop {
            if let Ok(i) = self.machines.binary_search_by(|(n, _)| n.cmp(&target)) {
                return Ok(MachineIndex(i as u64 + 1));
            }
            let reached = self.machines.last().is_some_and(|(n, _)| *n > target);
            if reached || !self.fill_to(self.machines.len() + 1) {
                return Err(EnumError::UnknownMachine);
            }
        }
    }

    /// Machines materialized so far.
    pub fn loaded(&self) -> usize {
        self.machines.len()
    }
}

/// The program numbering: index `π(a, b)` is machine `a + 1` on the input of
/// rank `b`. Indices whose input rank does not exist are vacant.
#[derive(Clone, Debug)]
pub struct ProgramNumbering {
    catalog: MachineCatalog,
}

impl ProgramNumbering {
    pub fn new(catalog: MachineCatalog) -> ProgramNumbering {
        ProgramNumbering { catalog }
    }

    pub fn enumerated() -> ProgramNumbering {
        ProgramNumbering::new(MachineCatalog::enumerated())
    }

    pub fn catalog(&mut self) -> &mut MachineCatalog {
        &mut self.catalog
    }

    pub fn program_of(&mut self, index: ProgramIndex) -> Result<Program, EnumError> {
        let (a, b) = cantor_unpair(index.0);
        let machine = self.catalog.machine(MachineIndex(a + 1))?;
        let input = enumerate_inputs(machine, b).map_err(|_| EnumError::VacantIndex {
            index: index.0,
            machine: a + 1,
            input_rank: b,
        })?;
        Ok(Program {
            machine: machine.clone(),
            input,
        })
    }

    pub fn index_of(&mut self, program: &Program) -> Result<ProgramIndex, EnumError> {
        let machine = self.catalog.index_of(&program.machine)?;
        let rank = input_rank(program.machine.input_symbols(), &program.input)?;
        cantor_pair(machine.0 - 1, rank)
            .map(ProgramIndex)
            .ok_or(EnumError::Overflow)
    }
}

pub fn program_of(index: ProgramIndex) -> Result<Program, EnumError> {
    ProgramNumbering::enumerated().program_of(index)
}

pub fn index_of(program: &Program) -> Result<ProgramIndex, EnumError> {
    ProgramNumbering::enumerated().index_of(program)
}
