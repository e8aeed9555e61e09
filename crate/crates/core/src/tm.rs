//! Deterministic single-tape Turing machines.
//!
//! A [`Machine`] is the validated 5-tuple `(Q, Γ, Σ, δ, F)`: states are
//! numbered `0..n` with `0` initial, tape symbols are numbered `0..m` with
//! `m - 1` the blank, and input symbols are `0..k` with `k <= m - 1`. The
//! tape is two-way infinite and stored sparsely; blank cells are never kept
//! in the map.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::validate::{validate, ValidityReport};

/// Index of a state in `Q`. State `0` is the initial state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct StateId(pub u32);

/// Index of a symbol in `Γ`. The blank is always the last symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct SymbolId(pub u32);

impl StateId {
    pub const INITIAL: StateId = StateId(0);
}

/// Head movement. Encoded as `0` for left and `1` for right.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Move {
    Left,
    Right,
}

impl Move {
    pub fn bit(self) -> u8 {
        match self {
            Move::Left => 0,
            Move::Right => 1,
        }
    }

    pub fn from_bit(bit: u8) -> Option<Move> {
        match bit {
            0 => Some(Move::Left),
            1 => Some(Move::Right),
            _ => None,
        }
    }

    fn offset(self) -> i64 {
        match self {
            Move::Left => -1,
            Move::Right => 1,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Left => f.write_str("L"),
            Move::Right => f.write_str("R"),
        }
    }
}

/// One entry `(p, a) -> (q, b, x)` of the transition function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Transition {
    pub from: StateId,
    pub read: SymbolId,
    pub to: StateId,
    pub write: SymbolId,
    pub moves: Move,
}

impl Transition {
    pub fn new(from: u32, read: u32, to: u32, write: u32, moves: Move) -> Transition {
        Transition {
            from: StateId(from),
            read: SymbolId(read),
            to: StateId(to),
            write: SymbolId(write),
            moves,
        }
    }

    /// Canonical ordering of transitions inside an encoding.
    ///
    /// Transitions are ordered by the value of the binary number obtained by
    /// concatenating the numerals `<p><a><q><b><x>`. Distinct transitions can
    /// share that value (`(1,0)->(2,0,L)` and `(2,1)->(0,0,L)` both give
    /// `101000`), so equal keys fall back to `(p, a)`.
    pub fn canonical_cmp(&self, other: &Transition) -> Ordering {
        let lhs = self.key_bits();
        let rhs = other.key_bits();
        compare_binary(&lhs, &rhs)
            .then_with(|| (self.from, self.read).cmp(&(other.from, other.read)))
    }

    fn key_bits(&self) -> Vec<u8> {
        let mut bits = Vec::with_capacity(4 * 32 + 1);
        push_binary(&mut bits, self.from.0);
        push_binary(&mut bits, self.read.0);
        push_binary(&mut bits, self.to.0);
        push_binary(&mut bits, self.write.0);
        bits.push(self.moves.bit());
        bits
    }
}

/// Appends the minimal binary numeral of `value` (most significant bit first).
pub(crate) fn push_binary(out: &mut Vec<u8>, value: u32) {
    if value == 0 {
        out.push(0);
        return;
    }
    let width = 32 - value.leading_zeros();
    for shift in (0..width).rev() {
        out.push(((value >> shift) & 1) as u8);
    }
}

/// Number of characters in the minimal binary numeral of `value`.
pub(crate) fn binary_len(value: u32) -> usize {
    if value == 0 {
        1
    } else {
        (32 - value.leading_zeros()) as usize
    }
}

/// Compares two bit strings by the integer they denote.
fn compare_binary(lhs: &[u8], rhs: &[u8]) -> Ordering {
    let strip = |bits: &[u8]| -> usize { bits.iter().position(|&b| b != 0).unwrap_or(bits.len()) };
    let (l, r) = (&lhs[strip(lhs)..], &rhs[strip(rhs)..]);
    l.len().cmp(&r.len()).then_with(|| l.cmp(r))
}

/// An unchecked machine description. Use [`Machine::new`] to validate it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RawMachine {
    /// `n`, the number of states.
    pub states: u32,
    /// `k`, the size of the input alphabet.
    pub input_symbols: u32,
    /// `m`, the size of the tape alphabet including the blank.
    pub symbols: u32,
    pub transitions: Vec<Transition>,
    pub finals: Vec<StateId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Action {
    to: StateId,
    write: SymbolId,
    moves: Move,
}

const FINAL_ROW: u32 = u32::MAX;

/// A validated machine with a dense lookup table for its transitions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "RawMachine", into = "RawMachine"))]
pub struct Machine {
    raw: RawMachine,
    // Row index into `actions` for every non-final state, `FINAL_ROW` otherwise.
    rows: Vec<u32>,
    actions: Vec<Action>,
}

impl Machine {
    /// Validates `raw` as given. The transition and final lists must already
    /// be in canonical order.
    pub fn new(raw: RawMachine) -> Result<Machine, ValidityReport> {
        let report = validate(&raw);
        if !report.is_valid() {
            return Err(report);
        }
        let symbols = raw.symbols as usize;
        let mut rows = alloc::vec![FINAL_ROW; raw.states as usize];
        let mut next_row = 0u32;
        for (state, row) in rows.iter_mut().enumerate() {
            if raw.finals.binary_search(&StateId(state as u32)).is_err() {
                *row = next_row;
                next_row += 1;
            }
        }
        let placeholder = Action {
            to: StateId(0),
            write: SymbolId(0),
            moves: Move::Left,
        };
        let mut actions = alloc::vec![placeholder; next_row as usize * symbols];
        for t in &raw.transitions {
            let row = rows[t.from.0 as usize] as usize;
            actions[row * symbols + t.read.0 as usize] = Action {
                to: t.to,
                write: t.write,
                moves: t.moves,
            };
        }
        Ok(Machine { raw, rows, actions })
    }

    /// Sorts transitions and final states into canonical order, then validates.
    pub fn canonical(mut raw: RawMachine) -> Result<Machine, ValidityReport> {
        raw.transitions.sort_by(Transition::canonical_cmp);
        raw.finals.sort();
        Machine::new(raw)
    }

    pub fn states(&self) -> u32 {
        self.raw.states
    }

    pub fn input_symbols(&self) -> u32 {
        self.raw.input_symbols
    }

    pub fn symbols(&self) -> u32 {
        self.raw.symbols
    }

    pub fn blank(&self) -> SymbolId {
        SymbolId(self.raw.symbols - 1)
    }

    /// Transitions in canonical order.
    pub fn transitions(&self) -> &[Transition] {
        &self.raw.transitions
    }

    pub fn finals(&self) -> &[StateId] {
        &self.raw.finals
    }

    pub fn is_final(&self, state: StateId) -> bool {
        self.rows
            .get(state.0 as usize)
            .is_some_and(|&row| row == FINAL_ROW)
    }

    pub fn raw(&self) -> &RawMachine {
        &self.raw
    }

    pub fn into_raw(self) -> RawMachine {
        self.raw
    }

    fn action(&self, state: StateId, symbol: SymbolId) -> Option<&Action> {
        let row = *self.rows.get(state.0 as usize)?;
        if row == FINAL_ROW || symbol.0 >= self.raw.symbols {
            return None;
        }
        self.actions
            .get(row as usize * self.raw.symbols as usize + symbol.0 as usize)
    }

    /// Checks that `config` could have been produced by this machine.
    pub fn accepts(&self, config: &Configuration) -> bool {
        config.state.0 < self.raw.states
            && config
                .tape
                .values()
                .all(|s| s.0 < self.raw.symbols && *s != self.blank())
    }
}

impl TryFrom<RawMachine> for Machine {
    type Error = ValidityReport;

    fn try_from(raw: RawMachine) -> Result<Self, Self::Error> {
        Machine::new(raw)
    }
}

impl From<Machine> for RawMachine {
    fn from(machine: Machine) -> Self {
        machine.raw
    }
}

impl fmt::Display for Machine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "states {}", self.raw.states)?;
        writeln!(f, "inputs {}", self.raw.input_symbols)?;
        writeln!(f, "symbols {}", self.raw.symbols)?;
        f.write_str("finals")?;
        for s in &self.raw.finals {
            write!(f, " {}", s.0)?;
        }
        for t in &self.raw.transitions {
            write!(
                f,
                "\n{} {} -> {} {} {}",
                t.from.0, t.read.0, t.to.0, t.write.0, t.moves
            )?;
        }
        Ok(())
    }
}

/// A resumable snapshot of a run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Configuration {
    pub state: StateId,
    pub head: i64,
    pub steps: u64,
    tape: BTreeMap<i64, SymbolId>,
}

impl Configuration {
    /// Builds a configuration from explicit cells. Cells holding the blank
    /// are dropped so that equal tapes compare equal.
    pub fn with_cells<I>(machine: &Machine, state: StateId, head: i64, steps: u64, cells: I) -> Result<Configuration, TmError>
    where
        I: IntoIterator<Item = (i64, SymbolId)>,
    {
        let blank = machine.blank();
        let mut tape = BTreeMap::new();
        for (cell, symbol) in cells {
            if symbol.0 >= machine.symbols() {
                return Err(TmError::InvalidTapeSymbol { cell, symbol: symbol.0 });
            }
            if symbol == blank {
                tape.remove(&cell);
            } else {
                tape.insert(cell, symbol);
            }
        }
        Ok(Configuration { state, head, steps, tape })
    }

    /// Symbol under `cell`, or `None` for a blank cell.
    pub fn cell(&self, cell: i64) -> Option<SymbolId> {
        self.tape.get(&cell).copied()
    }

    /// Non-blank cells in increasing cell order.
    pub fn cells(&self) -> impl Iterator<Item = (i64, SymbolId)> + '_ {
        self.tape.iter().map(|(&c, &s)| (c, s))
    }

    pub fn is_blank_tape(&self) -> bool {
        self.tape.is_empty()
    }

    fn step_in_place(&mut self, machine: &Machine) -> Result<(), TmError> {
        let blank = machine.blank();
        let read = self.tape.get(&self.head).copied().unwrap_or(blank);
        let action = *machine.action(self.state, read).ok_or(TmError::AlreadyHalted)?;
        if action.write == blank {
            self.tape.remove(&self.head);
        } else {
            self.tape.insert(self.head, action.write);
        }
        self.head += action.moves.offset();
        self.state = action.to;
        self.steps += 1;
        Ok(())
    }

    /// Runs until a final state is entered or the step counter reaches `limit`.
    fn run_until(mut self, machine: &Machine, limit: u64) -> Outcome {
        while self.steps < limit {
            if machine.is_final(self.state) {
                break;
            }
            // The state is non-final and the machine is total on non-final states.
            if self.step_in_place(machine).is_err() {
                break;
            }
        }
        if machine.is_final(self.state) {
            Outcome::Halted(self)
        } else {
            Outcome::OutOfFuel(self)
        }
    }
}

/// Result of a fuel-bounded run.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Outcome {
    Halted(Configuration),
    OutOfFuel(Configuration),
}

impl Outcome {
    pub fn config(&self) -> &Configuration {
        match self {
            Outcome::Halted(c) | Outcome::OutOfFuel(c) => c,
        }
    }

    pub fn into_config(self) -> Configuration {
        match self {
            Outcome::Halted(c) | Outcome::OutOfFuel(c) => c,
        }
    }

    pub fn steps(&self) -> u64 {
        self.config().steps
    }

    pub fn is_halted(&self) -> bool {
        matches!(self, Outcome::Halted(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TmError {
    #[error("invalid input symbol {symbol} at position {position}: input alphabet has {input_symbols} symbols")]
    InvalidInputSymbol {
        position: usize,
        symbol: u32,
        input_symbols: u32,
    },
    #[error("invalid tape symbol {symbol} at cell {cell}")]
    InvalidTapeSymbol { cell: i64, symbol: u32 },
    #[error("machine already halted")]
    AlreadyHalted,
    #[error("fuel must be positive")]
    ZeroFuel,
}

/// Start configuration: input at cells `0..len`, head on cell 0, state 0.
pub fn initial_config(machine: &Machine, input: &[SymbolId]) -> Result<Configuration, TmError> {
    let mut tape = BTreeMap::new();
    for (position, &symbol) in input.iter().enumerate() {
        if symbol.0 >= machine.input_symbols() {
            return Err(TmError::InvalidInputSymbol {
                position,
                symbol: symbol.0,
                input_symbols: machine.input_symbols(),
            });
        }
        tape.insert(position as i64, symbol);
    }
    Ok(Configuration {
        state: StateId::INITIAL,
        head: 0,
        steps: 0,
        tape,
    })
}

/// Applies one transition. Returns [`TmError::AlreadyHalted`] in a final state.
pub fn step(machine: &Machine, config: &Configuration) -> Result<Configuration, TmError> {
    let mut next = config.clone();
    next.step_in_place(machine)?;
    Ok(next)
}

/// Runs `input` for at most `fuel` transitions.
pub fn run(machine: &Machine, input: &[SymbolId], fuel: u64) -> Result<Outcome, TmError> {
    if fuel == 0 {
        return Err(TmError::ZeroFuel);
    }
    Ok(initial_config(machine, input)?.run_until(machine, fuel))
}

/// Continues a run for at most `extra_fuel` more transitions.
pub fn resume(machine: &Machine, config: Configuration, extra_fuel: u64) -> Result<Outcome, TmError> {
    if extra_fuel == 0 {
        return Err(TmError::ZeroFuel);
    }
    if machine.is_final(config.state) {
        return Err(TmError::AlreadyHalted);
    }
    let limit = config.steps.saturating_add(extra_fuel);
    Ok(config.run_until(machine, limit))
}

/// Reads the printed number: starting at the leftmost non-blank cell, the
/// longest run of contiguous cells holding numerals `0..base`.
pub fn read_output(config: &Configuration, base: u32) -> Vec<u8> {
    let mut digits = Vec::new();
    let Some((&start, _)) = config.tape.iter().next() else {
        return digits;
    };
    let mut cell = start;
    while let Some(symbol) = config.tape.get(&cell) {
        if symbol.0 >= base {
            break;
        }
        digits.push(symbol.0 as u8);
        cell += 1;
    }
    digits
}

#[cfg(test)]
mod tests {
    use crate::samples::{m_halt, m_loop};
    use super::*;
    use alloc::vec;

    fn sym(v: &[u32]) -> Vec<SymbolId> {
        v.iter().map(|&s| SymbolId(s)).collect()
    }

    fn binary_machine() -> Machine {
        // k = 2, m = 3: copies its input and halts on the first blank.
        Machine::canonical(RawMachine {
            states: 2,
            input_symbols: 2,
            symbols: 3,
            transitions: vec![
                Transition::new(0, 0, 0, 0, Move::Right),
                Transition::new(0, 1, 0, 1, Move::Right),
                Transition::new(0, 2, 1, 2, Move::Left),
            ],
            finals: vec![StateId(1)],
        })
        .unwrap()
    }

    #[test]
    fn initial_config_empty_input() {
        let c = initial_config(&m_loop(), &[]).unwrap();
        assert_eq!(c.state, StateId(0));
        assert_eq!(c.head, 0);
        assert_eq!(c.steps, 0);
        assert!(c.is_blank_tape());
    }

    #[test]
    fn initial_config_writes_input_from_cell_zero() {
        let c = initial_config(&binary_machine(), &sym(&[0, 1])).unwrap();
        assert_eq!(c.cells().collect::<Vec<_>>(), vec![(0, SymbolId(0)), (1, SymbolId(1))]);
        assert_eq!(c.head, 0);
    }

    #[test]
    fn initial_config_rejects_symbols_outside_sigma() {
        let err = initial_config(&m_loop(), &sym(&[0])).unwrap_err();
        assert!(matches!(err, TmError::InvalidInputSymbol { position: 0, symbol: 0, .. }));
    }

    #[test]
    fn loop_machine_steps_left() {
        let m = m_loop();
        let c = step(&m, &initial_config(&m, &[]).unwrap()).unwrap();
        assert_eq!((c.state, c.head, c.steps), (StateId(0), -1, 1));
        assert!(c.is_blank_tape());
    }

    #[test]
    fn halt_machine_single_step() {
        let m = m_halt();
        let c = step(&m, &initial_config(&m, &[]).unwrap()).unwrap();
        assert_eq!((c.state, c.head, c.steps), (StateId(1), 1, 1));
        assert_eq!(step(&m, &c), Err(TmError::AlreadyHalted));
    }

    #[test]
    fn run_examples() {
        let halted = run(&m_halt(), &[], 10).unwrap();
        assert!(halted.is_halted());
        assert_eq!(halted.steps(), 1);

        let looped = run(&m_loop(), &[], 1000).unwrap();
        assert!(!looped.is_halted());
        assert_eq!(looped.steps(), 1000);

        let boundary = run(&m_halt(), &[], 1).unwrap();
        assert!(boundary.is_halted());
        assert_eq!(boundary.steps(), 1);

        assert_eq!(run(&m_halt(), &[], 0), Err(TmError::ZeroFuel));
    }

    #[test]
    fn resume_examples() {
        let m = m_loop();
        let five = run(&m, &[], 5).unwrap().into_config();
        let ten = resume(&m, five, 5).unwrap();
        assert!(!ten.is_halted());
        assert_eq!(ten.steps(), 10);

        let h = m_halt();
        let first = run(&h, &[], 1).unwrap();
        assert_eq!(resume(&h, first.clone().into_config(), 1), Err(TmError::AlreadyHalted));
        assert_eq!(first, run(&h, &[], 10).unwrap());
    }

    #[test]
    fn read_output_examples() {
        let m = Machine::canonical(RawMachine {
            states: 2,
            input_symbols: 0,
            symbols: 12,
            transitions: (0..12).map(|a| Transition::new(0, a, 1, a, Move::Right)).collect(),
            finals: vec![StateId(1)],
        })
        .unwrap();
        let threes = Configuration::with_cells(&m, StateId(1), 0, 0, [(0, SymbolId(3)), (1, SymbolId(3)), (2, SymbolId(3))]).unwrap();
        assert_eq!(read_output(&threes, 10), vec![3, 3, 3]);

        let empty = Configuration::with_cells(&m, StateId(1), 0, 0, []).unwrap();
        assert!(read_output(&empty, 10).is_empty());

        let mixed = Configuration::with_cells(&m, StateId(1), 0, 0, [(-1, SymbolId(9)), (0, SymbolId(10)), (1, SymbolId(5))]).unwrap();
        assert_eq!(read_output(&mixed, 10), vec![9]);
    }

    #[test]
    fn explicit_blanks_are_normalized() {
        let m = binary_machine();
        let a = Configuration::with_cells(&m, StateId(0), 0, 0, [(0, SymbolId(1)), (4, SymbolId(2))]).unwrap();
        let b = Configuration::with_cells(&m, StateId(0), 0, 0, [(0, SymbolId(1))]).unwrap();
        assert_eq!(a, b);
        let c = Configuration::with_cells(&m, StateId(0), 0, 0, [(0, SymbolId(3))]);
        assert!(matches!(c, Err(TmError::InvalidTapeSymbol { .. })));
    }

    #[test]
    fn copying_machine_halts_on_first_blank() {
        let m = binary_machine();
        let out = run(&m, &sym(&[1, 0, 1]), 100).unwrap();
        assert!(out.is_halted());
        assert_eq!(out.steps(), 4);
        assert_eq!(read_output(out.config(), 2), vec![1, 0, 1]);
    }

    #[test]
    fn tied_transition_keys_fall_back_to_state_and_symbol() {
        let a = Transition::new(1, 0, 2, 0, Move::Left);
        let b = Transition::new(2, 1, 0, 0, Move::Left);
        assert_eq!(a.key_bits(), b.key_bits());
        assert_eq!(compare_binary(&a.key_bits(), &b.key_bits()), Ordering::Equal);
        assert_eq!(a.canonical_cmp(&b), Ordering::Less);
    }

    #[test]
    fn key_order_is_numeric_not_lexicographic() {
        // "0"+"10"+"0"+"0"+"0" = 01000 (8) vs "1"+"0"+"0"+"0"+"0" = 10000 (16)
        let a = Transition::new(0, 2, 0, 0, Move::Left);
        let b = Transition::new(1, 0, 0, 0, Move::Left);
        assert_eq!(a.canonical_cmp(&b), Ordering::Less);
        // "0"+"0"+"1"+"0"+"1" = 00101 (5) vs "0"+"1"+"0"+"0"+"0" = 01000 (8)
        let c = Transition::new(0, 0, 1, 0, Move::Right);
        let d = Transition::new(0, 1, 0, 0, Move::Left);
        assert_eq!(c.canonical_cmp(&d), Ordering::Less);
    }
}
