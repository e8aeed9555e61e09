//! Turing machines in the `(Q, Γ, Σ, δ, F)` formalism with a canonical text
//! encoding and base-5 numbering, an enumeration of machines and programs,
//! the dovetailed halting approximation `H`, and finite-horizon checks for
//! computable and approachable digit streams together with the diagonal
//! operators over stream lists.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! threaded execution live in the `approachable` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod approx;
pub mod codec;
pub mod dovetail;
pub mod enumerate;
pub mod samples;
pub mod tm;
pub mod validate;

pub use codec::{decode, encode, from_number, to_number, MachineNumber};
pub use dovetail::{halting_bits, DovetailState, HaltingBits, ProgramSource};
pub use enumerate::{MachineIndex, Program, ProgramIndex};
pub use tm::{Configuration, Machine, Move, Outcome, RawMachine, StateId, SymbolId, Transition};
pub use validate::{validate, ValidityReport};
