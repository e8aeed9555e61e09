//! Small hand-built machines used by the examples, tests and experiments.
//!
//! The digit printers work over `m = 11` symbols (numerals 0-9, blank 10)
//! with unary input (`k = 1`), so input `n` is `n` copies of symbol 0.

use alloc::vec;
use alloc::vec::Vec;

use crate::tm::{Machine, Move, RawMachine, StateId, Transition};

const BLANK: u32 = 10;

fn tiny(transitions: Vec<Transition>, states: u32) -> Machine {
    Machine::canonical(RawMachine {
        states,
        input_symbols: 0,
        symbols: 1,
        transitions,
        finals: vec![StateId(states - 1)],
    })
    .expect("sample machines are valid")
}

/// `({q0,q1},{b},∅,{(q0,b)->(q0,b,L)},{q1})`, loops left forever.
pub fn m_loop() -> Machine {
    tiny(vec![Transition::new(0, 0, 0, 0, Move::Left)], 2)
}

/// Halts after its single transition.
pub fn m_halt() -> Machine {
    tiny(vec![Transition::new(0, 0, 1, 0, Move::Right)], 2)
}

/// Walks through states 0, 1, 2 and halts on entering state 3, at step 3.
pub fn m_halt3() -> Machine {
    tiny(
        vec![
            Transition::new(0, 0, 1, 0, Move::Right),
            Transition::new(1, 0, 2, 0, Move::Right),
            Transition::new(2, 0, 3, 0, Move::Right),
        ],
        4,
    )
}

fn printer(states: u32, finals: &[u32], rule: impl Fn(u32, u32) -> Transition) -> Machine {
    let transitions: Vec<_> = (0..states)
        .filter(|s| !finals.contains(s))
        .flat_map(|s| (0..=BLANK).map(move |a| (s, a)))
        .map(|(s, a)| rule(s, a))
        .collect();
    Machine::canonical(RawMachine {
        states,
        input_symbols: 1,
        symbols: 11,
        transitions,
        finals: finals.iter().map(|&f| StateId(f)).collect(),
    })
    .expect("sample machines are valid")
}

/// `m_loop` widened to the printer alphabet; never halts on any input.
pub fn wide_loop() -> Machine {
    printer(2, &[1], |s, a| Transition::new(s, a, 0, a, Move::Left))
}

/// Replaces each input mark with a 3: prints `n` threes on input `n`.
pub fn threes() -> Machine {
    printer(2, &[1], |s, a| match a {
        0 => Transition::new(s, a, 0, 3, Move::Right),
        BLANK => Transition::new(s, a, 1, BLANK, Move::Left),
        _ => Transition::new(s, a, 0, a, Move::Right),
    })
}

/// Replaces the input marks with `0101...`: the first `n` digits of 1/99
/// in base 10.
pub fn alternating() -> Machine {
    // States 0 and 1 write 0 and 1 in turn, state 2 is final.
    printer(3, &[2], |s, a| match (s, a) {
        (s, 0) => Transition::new(s, a, 1 - s, s, Move::Right),
        (s, BLANK) => Transition::new(s, a, 2, BLANK, Move::Left),
        (s, a) => Transition::new(s, a, s, a, Move::Right),
    })
}

/// Prints `0` for `n < switch` and `5` afterwards.
pub fn two_phase(switch: u32) -> Machine {
    // States 0..switch count erased marks, `switch` erases the rest,
    // `switch + 1` is final.
    let done = switch + 1;
    printer(switch + 2, &[done], |s, a| match (s, a) {
        (s, 0) if s < switch => Transition::new(s, a, s + 1, BLANK, Move::Right),
        (s, BLANK) if s < switch => Transition::new(s, a, done, 0, Move::Right),
        (s, 0) if s == switch => Transition::new(s, a, s, BLANK, Move::Right),
        (s, BLANK) if s == switch => Transition::new(s, a, done, 5, Move::Right),
        (s, a) => Transition::new(s, a, s, a, Move::Right),
    })
}

/// Prints `1` for odd `n` and `0` for even `n`.
pub fn parity() -> Machine {
    // State 0: even count so far, state 1: odd, state 2 final.
    printer(3, &[2], |s, a| match (s, a) {
        (0, 0) => Transition::new(0, 0, 1, BLANK, Move::Right),
        (1, 0) => Transition::new(1, 0, 0, BLANK, Move::Right),
        (0, BLANK) => Transition::new(0, BLANK, 2, 0, Move::Right),
        (1, BLANK) => Transition::new(1, BLANK, 2, 1, Move::Right),
        (s, a) => Transition::new(s, a, s, a, Move::Right),
    })
}

/// Prints `35` on input 1 and `34` otherwise.
pub fn inconsistent() -> Machine {
    // 0: first mark, 1: after one mark, 2: erasing the rest, 3 final.
    printer(4, &[3], |s, a| match (s, a) {
        (0, 0) => Transition::new(0, 0, 1, 3, Move::Right),
        (1, BLANK) => Transition::new(1, BLANK, 3, 5, Move::Right),
        (1, 0) => Transition::new(1, 0, 2, 4, Move::Right),
        (2, 0) => Transition::new(2, 0, 2, BLANK, Move::Right),
        (2, BLANK) => Transition::new(2, BLANK, 3, BLANK, Move::Right),
        (s, a) => Transition::new(s, a, s, a, Move::Right),
    })
}
