//! Versioned JSON snapshots of a dovetail run.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use approachable_core::codec::{machine_of, MachineNumber};
use approachable_core::dovetail::{DovetailState, Slot};
use approachable_core::enumerate::ProgramNumbering;
use approachable_core::tm::Configuration;
use approachable_core::{Program, ProgramSource};

use crate::formats::{format_word, parse_word, FormatError};

pub const FORMAT: &str = "approachable-dovetail";
pub const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed checkpoint: {0}")]
    Json(#[from] serde_json::Error),
    #[error("not a dovetail checkpoint (format {0:?})")]
    Format(String),
    #[error("unsupported checkpoint version {found}, expected {VERSION}")]
    Version { found: u32 },
    #[error("inconsistent checkpoint: {0}")]
    Inconsistent(String),
    #[error("checkpoint program list, {0}")]
    Programs(FormatError),
    #[error("checkpoint covers a different program universe than requested")]
    UniverseMismatch,
}

/// One program of an explicit universe, as written in program files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramEntry {
    pub machine: MachineNumber,
    pub input: String,
}

/// Which programs the slots stand for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Universe {
    /// The enumerated programs in pairing order.
    Enumerated,
    /// A finite list; indices past its end are vacant.
    Explicit { programs: Vec<ProgramEntry> },
}

impl Universe {
    pub fn explicit(programs: &[(MachineNumber, Program)]) -> Universe {
        Universe::Explicit {
            programs: programs
                .iter()
                .map(|(number, p)| ProgramEntry {
                    machine: number.clone(),
                    input: format_word(&p.input),
                })
                .collect(),
        }
    }

    pub fn source(&self) -> Result<Box<dyn ProgramSource>, FormatError> {
        match self {
            Universe::Enumerated => Ok(Box::new(ProgramNumbering::enumerated())),
            Universe::Explicit { programs } => {
                let list = programs
                    .iter()
                    .enumerate()
                    .map(|(i, entry)| {
                        let bad = |m: String| FormatError {
                            line: i + 1,
                            message: m,
                        };
                        let machine = machine_of(&entry.machine).map_err(|e| bad(e.to_string()))?;
                        let input = parse_word(&entry.input).map_err(bad)?;
                        Program::new(machine, input).map_err(|e| bad(e.to_string()))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Box::new(list))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub universe: Universe,
    pub state: DovetailState,
}

impl Checkpoint {
    pub fn new(universe: Universe, state: DovetailState) -> Checkpoint {
        Checkpoint {
            format: FORMAT.to_owned(),
            version: VERSION,
            universe,
            state,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("checkpoints serialize")
    }

    pub fn from_json(text: &str) -> Result<Checkpoint, CheckpointError> {
        // Check the header first so that other formats get a clear message.
        #[derive(Deserialize)]
        struct Header {
            format: String,
            version: u32,
        }
        let header: Header = serde_json::from_str(text)?;
        if header.format != FORMAT {
            return Err(CheckpointError::Format(header.format));
        }
        if header.version != VERSION {
            return Err(CheckpointError::Version { found: header.version });
        }
        let checkpoint: Checkpoint = serde_json::from_str(text)?;
        checkpoint.check()?;
        Ok(checkpoint)
    }

    fn check(&self) -> Result<(), CheckpointError> {
        let state = &self.state;
        if state.slots().len() as u64 != state.horizon() {
            return Err(CheckpointError::Inconsistent(format!(
                "{} slots at horizon {}",
                state.slots().len(),
                state.horizon()
            )));
        }
        for (i, slot) in state.slots().iter().enumerate() {
            if let Slot::Running { machine, config } = slot {
                let rebuilt = Configuration::with_cells(machine, config.state, config.head, config.steps, config.cells());
                let ok = config.state.0 < machine.states()
                    && !machine.is_final(config.state)
                    && config.steps <= state.horizon()
                    && rebuilt.as_ref() == Ok(config);
                if !ok {
                    return Err(CheckpointError::Inconsistent(format!("slot {i} holds an impossible configuration")));
                }
            }
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<(), CheckpointError> {
        fs::write(path, self.to_json()).map_err(|source| CheckpointError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Checkpoint, CheckpointError> {
        let text = fs::read_to_string(path).map_err(|source| CheckpointError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Checkpoint::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approachable_core::codec::number_of;
    use approachable_core::samples;

    #[test]
    fn resumed_run_equals_fresh_run() {
        let mut state = DovetailState::new();
        state.advance(&mut ProgramNumbering::enumerated(), 30).unwrap();
        let text = Checkpoint::new(Universe::Enumerated, state).to_json();

        let mut loaded = Checkpoint::from_json(&text).unwrap();
        let mut source = loaded.universe.source().unwrap();
        loaded.state.advance(source.as_mut(), 70).unwrap();

        let mut fresh = DovetailState::new();
        fresh.advance(&mut ProgramNumbering::enumerated(), 70).unwrap();
        assert_eq!(loaded.state, fresh);
    }

    #[test]
    fn explicit_universe_round_trips() {
        let programs: Vec<_> = [samples::m_halt(), samples::m_loop(), samples::m_halt3()]
            .into_iter()
            .map(|m| (number_of(&m), Program::new(m, vec![]).unwrap()))
            .collect();
        let universe = Universe::explicit(&programs);
        let mut source = universe.source().unwrap();
        let mut state = DovetailState::new();
        state.advance(source.as_mut(), 2).unwrap();
        let loaded = Checkpoint::from_json(&Checkpoint::new(universe.clone(), state.clone()).to_json()).unwrap();
        assert_eq!(loaded.universe, universe);
        assert_eq!(loaded.state, state);
        assert_eq!(loaded.state.bits().digits(), "10");
    }

    #[test]
    fn header_is_checked() {
        let mut c = Checkpoint::new(Universe::Enumerated, DovetailState::new());
        c.version = 7;
        assert!(matches!(Checkpoint::from_json(&c.to_json()), Err(CheckpointError::Version { found: 7 })));
        c.version = VERSION;
        c.format = "other".into();
        assert!(matches!(Checkpoint::from_json(&c.to_json()), Err(CheckpointError::Format(_))));
        assert!(matches!(Checkpoint::from_json("[1,2]"), Err(CheckpointError::Json(_))));
    }

    #[test]
    fn slot_count_must_match_horizon() {
        let mut state = DovetailState::new();
        state.advance(&mut ProgramNumbering::enumerated(), 3).unwrap();
        let text = Checkpoint::new(Universe::Enumerated, state).to_json();
        let tampered = text.replacen("\"horizon\":3", "\"horizon\":4", 1);
        assert_ne!(text, tampered);
        assert!(matches!(Checkpoint::from_json(&tampered), Err(CheckpointError::Inconsistent(_))));
    }
}
