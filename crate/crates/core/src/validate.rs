//! Structural rules a machine description must satisfy.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::tm::{RawMachine, StateId, Transition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    StateCount,
    SymbolCount,
    InputAlphabet,
    FinalsEmpty,
    FinalInitial,
    FinalRange,
    UnsortedFinals,
    TransitionRange,
    TransitionFromFinal,
    DuplicateTransition,
    MissingTransition,
    UnsortedTransitions,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::StateCount => "STATE_COUNT",
            Rule::SymbolCount => "SYMBOL_COUNT",
            Rule::InputAlphabet => "INPUT_ALPHABET",
            Rule::FinalsEmpty => "FINALS_EMPTY",
            Rule::FinalInitial => "FINAL_INITIAL",
            Rule::FinalRange => "FINAL_RANGE",
            Rule::UnsortedFinals => "UNSORTED_FINALS",
            Rule::TransitionRange => "TRANSITION_RANGE",
            Rule::TransitionFromFinal => "TRANSITION_FROM_FINAL",
            Rule::DuplicateTransition => "DUPLICATE_TRANSITION",
            Rule::MissingTransition => "MISSING_TRANSITION",
            Rule::UnsortedTransitions => "UNSORTED_TRANSITIONS",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: Rule,
    pub detail: String,
}

/// Every rule a description breaks, each listed once with its first instance.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidityReport {
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }

    fn push(&mut self, rule: Rule, detail: String) {
        if !self.has(rule) {
            self.violations.push(Violation { rule, detail });
        }
    }
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}: {}", v.rule, v.detail)?;
        }
        Ok(())
    }
}

impl core::error::Error for ValidityReport {}

fn show(t: &Transition) -> String {
    format!(
        "({},{})->({},{},{})",
        t.from.0, t.read.0, t.to.0, t.write.0, t.moves
    )
}

pub fn validate(raw: &RawMachine) -> ValidityReport {
    let mut report = ValidityReport::default();
    let n = raw.states;
    let m = raw.symbols;

    if n < 2 {
        report.push(Rule::StateCount, format!("n = {n}, need at least an initial and a final state"));
    }
    if m == 0 {
        report.push(Rule::SymbolCount, String::from("m = 0, the tape alphabet needs a blank symbol"));
    }
    if raw.input_symbols >= m.max(1) || m == 0 {
        report.push(
            Rule::InputAlphabet,
            format!("k = {} exceeds m - 1 = {}", raw.input_symbols, i64::from(m) - 1),
        );
    }

    if raw.finals.is_empty() {
        report.push(Rule::FinalsEmpty, String::from("no final state"));
    }
    for w in raw.finals.windows(2) {
        if w[0] >= w[1] {
            report.push(
                Rule::UnsortedFinals,
                format!("final {} listed before {}", w[0].0, w[1].0),
            );
        }
    }
    let mut finals = BTreeSet::new();
    for &f in &raw.finals {
        if f == StateId::INITIAL {
            report.push(Rule::FinalInitial, String::from("state 0 is initial and cannot be final"));
        }
        if f.0 >= n {
            report.push(Rule::FinalRange, format!("final state {} >= n = {n}", f.0));
        } else {
            finals.insert(f);
        }
    }

    let mut seen = BTreeSet::new();
    for t in &raw.transitions {
        let in_range = t.from.0 < n && t.to.0 < n && t.read.0 < m && t.write.0 < m;
        if !in_range {
            report.push(Rule::TransitionRange, format!("{} out of range for n = {n}, m = {m}", show(t)));
            continue;
        }
        if finals.contains(&t.from) {
            report.push(Rule::TransitionFromFinal, format!("{} leaves final state {}", show(t), t.from.0));
            continue;
        }
        if !seen.insert((t.from, t.read)) {
            report.push(
                Rule::DuplicateTransition,
                format!("more than one transition for ({},{})", t.from.0, t.read.0),
            );
        }
    }

    if n >= 1 && m >= 1 {
        let non_final = u64::from(n) - finals.len() as u64;
        let expected = non_final * u64::from(m);
        if (seen.len() as u64) < expected {
            if let Some((p, a)) = first_missing(n, m, &finals, &seen) {
                report.push(
                    Rule::MissingTransition,
                    format!("no transition for ({p},{a}); {} of {expected} defined", seen.len()),
                );
            }
        }
    }

    for w in raw.transitions.windows(2) {
        if w[0].canonical_cmp(&w[1]) == Ordering::Greater {
            report.push(
                Rule::UnsortedTransitions,
                format!("{} listed before {}", show(&w[0]), show(&w[1])),
            );
        }
    }

    report
}

fn first_missing(
    n: u32,
    m: u32,
    finals: &BTreeSet<StateId>,
    seen: &BTreeSet<(StateId, crate::tm::SymbolId)>,
) -> Option<(u32, u32)> {
    // `seen` is sorted by (state, symbol), so the first gap is found in O(|seen|).
    let mut present = seen.iter().peekable();
    for p in 0..n {
        if finals.contains(&StateId(p)) {
            continue;
        }
        for a in 0..m {
            match present.peek() {
                Some(&&(s, sym)) if s.0 == p && sym.0 == a => {
                    present.next();
                }
                _ => return Some((p, a)),
            }
        }
    }
    None
}
