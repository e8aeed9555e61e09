//! File formats, checkpoints, threaded dovetailing, experiments and the
//! command-line front end for `approachable-core`.

pub mod checkpoint;
pub mod cli;
pub mod experiment;
pub mod formats;
pub mod parallel;
