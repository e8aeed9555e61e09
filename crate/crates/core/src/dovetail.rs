//! The halting approximation `H`: bit `i` of `H(n)` is 1 iff program `i`
//! halts within `n` steps.
//!
//! [`DovetailState`] keeps one slot per program index below the current
//! horizon. Running programs keep their configuration and are only advanced
//! by the horizon delta, so reaching horizon `N` costs at most `N * N`
//! simulated steps however many intermediate horizons were visited.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::enumerate::{EnumError, Program, ProgramIndex, ProgramNumbering};
use crate::tm::{initial_config, resume, Configuration, Machine, Outcome};

/// Supplies the program at each index, or `None` for a vacant index.
pub trait ProgramSource {
    fn program(&mut self, index: u64) -> Option<Program>;
}

impl ProgramSource for ProgramNumbering {
    fn program(&mut self, index: u64) -> Option<Program> {
        match self.program_of(ProgramIndex(index)) {
            Ok(p) => Some(p),
            Err(EnumError::VacantIndex { .. }) | Err(EnumError::MachineIndexOutOfRange(_)) => None,
            Err(e) => panic!("program numbering failed at {index}: {e}"),
        }
    }
}

/// An explicit finite list; indices past the end are vacant.
impl ProgramSource for [Program] {
    fn program(&mut self, index: u64) -> Option<Program> {
        usize::try_from(index).ok().and_then(|i| self.get(i)).cloned()
    }
}

impl ProgramSource for Vec<Program> {
    fn program(&mut self, index: u64) -> Option<Program> {
        self.as_mut_slice().program(index)
    }
}

/// Per-program progress.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Slot {
    /// No program has this index.
    Vacant,
    Running {
        machine: Machine,
        config: Configuration,
    },
    Halted {
        steps: u64,
    },
}

impl Slot {
    fn load(program: Option<Program>) -> Slot {
        match program {
            None => Slot::Vacant,
            Some(Program { machine, input }) => {
                let config = initial_config(&machine, &input).expect("program inputs are validated");
                Slot::Running { machine, config }
            }
        }
    }

    pub fn halted_within(&self, horizon: u64) -> bool {
        matches!(self, Slot::Halted { steps } if *steps <= horizon)
    }

    /// Simulates a running slot until it halts or has executed `horizon`
    /// steps in total. Returns the number of steps executed by this call.
    pub fn advance_to(&mut self, horizon: u64) -> u64 {
        let Slot::Running { machine, config } = self else {
            return 0;
        };
        if config.steps >= horizon {
            return 0;
        }
        let before = config.steps;
        let extra = horizon - before;
        let start = core::mem::take(config);
        // Running slots never sit in a final state.
        let outcome = resume(machine, start, extra).expect("running slots are resumable");
        let after = outcome.steps();
        match outcome {
            Outcome::Halted(_) => *self = Slot::Halted { steps: after },
            Outcome::OutOfFuel(c) => *config = c,
        }
        after - before
    }
}

/// Runs the per-slot simulations of one `advance`. Implementations may
/// split the slots across workers but must return the summed step count.
pub trait SlotExecutor {
    fn advance_slots(&self, slots: &mut [Slot], horizon: u64) -> u64;
}

/// Advances slots one after another on the calling thread.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl SlotExecutor for Sequential {
    fn advance_slots(&self, slots: &mut [Slot], horizon: u64) -> u64 {
        slots.iter_mut().map(|s| s.advance_to(horizon)).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DovetailError {
    #[error("new horizon {requested} must exceed the current horizon {current}")]
    HorizonNotIncreasing { current: u64, requested: u64 },
}

/// `H(n)` as a bit string; position `i` is program `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HaltingBits {
    pub horizon: u64,
    pub bits: Vec<bool>,
}

impl HaltingBits {
    pub fn get(&self, index: usize) -> Option<bool> {
        self.bits.get(index).copied()
    }

    /// Binary digits `d1 d2 ... dn` of the approximation of `h`.
    pub fn digits(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

impl fmt::Display for HaltingBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.digits())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DovetailState {
    horizon: u64,
    slots: Vec<Slot>,
    simulated_steps: u64,
    programs_loaded: u64,
}

impl DovetailState {
    pub fn new() -> DovetailState {
        DovetailState::default()
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    /// Total transitions simulated since the state was created.
    pub fn simulated_steps(&self) -> u64 {
        self.simulated_steps
    }

    /// Program lookups performed (decoding cost is not part of the step count).
    pub fn programs_loaded(&self) -> u64 {
        self.programs_loaded
    }

    pub fn advance<S: ProgramSource + ?Sized>(&mut self, source: &mut S, new_horizon: u64) -> Result<(), DovetailError> {
        self.advance_with(source, new_horizon, &Sequential)
    }

    pub fn advance_with<S, E>(&mut self, source: &mut S, new_horizon: u64, executor: &E) -> Result<(), DovetailError>
    where
        S: ProgramSource + ?Sized,
        E: SlotExecutor + ?Sized,
    {
        if new_horizon <= self.horizon {
            return Err(DovetailError::HorizonNotIncreasing {
                current: self.horizon,
                requested: new_horizon,
            });
        }
        for index in self.horizon..new_horizon {
            self.slots.push(Slot::load(source.program(index)));
            self.programs_loaded += 1;
        }
        self.simulated_steps += executor.advance_slots(&mut self.slots, new_horizon);
        self.horizon = new_horizon;
        Ok(())
    }

    pub fn bits(&self) -> HaltingBits {
        HaltingBits {
            horizon: self.horizon,
            bits: self.slots.iter().map(|s| s.halted_within(self.horizon)).collect(),
        }
    }
}

/// `H(n)` computed from scratch.
pub fn halting_bits<S: ProgramSource + ?Sized>(source: &mut S, n: u64) -> HaltingBits {
    let mut state = DovetailState::new();
    if n > 0 {
        state.advance(source, n).expect("horizon increases from zero");
    }
    state.bits()
}

/// First `n` binary digits of the approximation of `h` at horizon `n` over
/// the enumerated programs.
pub fn h_digit_stream(n: u64) -> String {
    halting_bits(&mut ProgramNumbering::enumerated(), n).digits()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples::{m_halt, m_halt3, m_loop};
    use alloc::vec;

    fn program(machine: Machine) -> Program {
        Program::new(machine, Vec::new()).unwrap()
    }

    #[test]
    fn two_program_universe() {
        let mut universe = vec![program(m_halt()), program(m_loop())];
        assert_eq!(halting_bits(&mut universe, 1).digits(), "1");
        assert_eq!(halting_bits(&mut universe, 2).digits(), "10");
        assert_eq!(halting_bits(&mut universe, 4).digits(), "1000");
    }

    #[test]
    fn all_loop_universe_is_zero() {
        let mut universe = vec![program(m_loop()); 12];
        assert_eq!(halting_bits(&mut universe, 12).digits(), "0".repeat(12));
    }

    #[test]
    fn incremental_equals_fresh() {
        let mut universe = vec![program(m_loop()), program(m_halt3()), program(m_halt()), program(m_halt3())];
        let mut state = DovetailState::new();
        state.advance(&mut universe, 5).unwrap();
        state.advance(&mut universe, 10).unwrap();
        assert_eq!(state.bits(), halting_bits(&mut universe, 10));
        assert_eq!(state.bits().digits(), "0111000000");
    }

    #[test]
    fn halt_bit_flips_at_halt_step_and_stays() {
        let mut universe = vec![program(m_loop()), program(m_loop()), program(m_halt3())];
        let mut state = DovetailState::new();
        for n in 1..=20 {
            state.advance(&mut universe, n).unwrap();
            let bit = state.bits().get(2);
            match n {
                1 | 2 => assert_eq!(bit, None),
                _ => assert_eq!(bit, Some(true)),
            }
        }
    }

    #[test]
    fn horizon_must_increase() {
        let mut universe: Vec<Program> = vec![];
        let mut state = DovetailState::new();
        state.advance(&mut universe, 3).unwrap();
        assert_eq!(
            state.advance(&mut universe, 3),
            Err(DovetailError::HorizonNotIncreasing { current: 3, requested: 3 })
        );
    }

    #[test]
    fn step_budget_on_enumerated_universe() {
        let mut numbering = ProgramNumbering::enumerated();
        let mut state = DovetailState::new();
        for n in 1..=60u64 {
            state.advance(&mut numbering, n).unwrap();
            assert!(state.simulated_steps() <= n * n);
        }
        let mut fresh = DovetailState::new();
        fresh.advance(&mut ProgramNumbering::enumerated(), 60).unwrap();
        assert_eq!(fresh.bits(), state.bits());
        assert_eq!(fresh.simulated_steps(), state.simulated_steps());
    }

    #[test]
    fn h_digits_of_enumerated_programs() {
        let digits = h_digit_stream(8);
        assert_eq!(digits.len(), 8);
        // Program 0 is the minimalist machine, which never halts.
        assert!(digits.starts_with('0'));
    }
}
