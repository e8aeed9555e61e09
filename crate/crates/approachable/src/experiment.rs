//! Built-in reproducibility experiments with `key<TAB>value` reports.
//!
//! A configuration is a list of `key = value` lines; `experiment` names the
//! experiment and the other keys override its parameters. Every parameter,
//! defaulted or not, is echoed at the top of the report.

use std::collections::BTreeMap;
use std::fmt;
use std::num::NonZeroUsize;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use approachable_core::approx::{diagonal, diagonal_prime, DigitStream};
use approachable_core::codec::{decode, encode, from_number, to_number};
use approachable_core::dovetail::{DovetailState, Slot};
use approachable_core::enumerate::{enumerate_machines, numbers_of_length, ProgramNumbering};

use crate::parallel::Threaded;

pub const EXPERIMENTS: [&str; 5] = [
    "h-monotone",
    "roundtrip",
    "diagonal-differs",
    "first-machine",
    "schedule-independence",
];

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExperimentError {
    #[error("unknown experiment {0:?} (known: {list})", list = EXPERIMENTS.join(", "))]
    UnknownExperiment(String),
    #[error("configuration names no experiment")]
    MissingExperiment,
    #[error("line {0}: expected `key = value`")]
    Syntax(usize),
    #[error("parameter {key:?} is not used by {experiment}")]
    UnknownParameter { experiment: String, key: String },
    #[error("parameter {key} = {value:?}: {reason}")]
    BadParameter { key: String, value: String, reason: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub params: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn new(experiment: &str) -> ExperimentConfig {
        ExperimentConfig {
            experiment: experiment.to_owned(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: &str) -> ExperimentConfig {
        self.params.insert(key.to_owned(), value.to_owned());
        self
    }

    pub fn parse(text: &str) -> Result<ExperimentConfig, ExperimentError> {
        let mut config = ExperimentConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ExperimentError::Syntax(i + 1))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(ExperimentError::Syntax(i + 1));
            }
            if key == "experiment" {
                config.experiment = value.to_owned();
            } else {
                config.params.insert(key.to_owned(), value.to_owned());
            }
        }
        if config.experiment.is_empty() {
            return Err(ExperimentError::MissingExperiment);
        }
        Ok(config)
    }
}

/// Ordered `key<TAB>value` lines ending with `result<TAB>PASS|FAIL`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub entries: Vec<(String, String)>,
    pub passed: bool,
}

impl Report {
    fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k}\t{v}")?;
        }
        writeln!(f, "result\t{}", if self.passed { "PASS" } else { "FAIL" })
    }
}

/// Resolves parameters against their defaults, rejecting unknown keys.
struct Params<'a> {
    config: &'a ExperimentConfig,
    report: Report,
    used: Vec<&'static str>,
}

impl<'a> Params<'a> {
    fn new(config: &'a ExperimentConfig) -> Params<'a> {
        let mut report = Report::default();
        report.push("experiment", &config.experiment);
        Params {
            config,
            report,
            used: Vec::new(),
        }
    }

    fn raw(&mut self, key: &'static str, default: &str) -> String {
        self.used.push(key);
        let value = self.config.params.get(key).map_or(default, String::as_str).to_owned();
        self.report.push(key, &value);
        value
    }

    fn number<T: std::str::FromStr>(&mut self, key: &'static str, default: &str) -> Result<T, ExperimentError> {
        let value = self.raw(key, default);
        value.parse().map_err(|_| ExperimentError::BadParameter {
            key: key.to_owned(),
            value,
            reason: "expected a non-negative integer".to_owned(),
        })
    }

    fn list(&mut self, key: &'static str, default: &str) -> Result<Vec<usize>, ExperimentError> {
        let value = self.raw(key, default);
        value
            .split(',')
            .map(|w| w.trim().parse::<usize>().ok().filter(|&v| v > 0))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| ExperimentError::BadParameter {
                key: key.to_owned(),
                value,
                reason: "expected a comma-separated list of positive integers".to_owned(),
            })
    }

    /// Fails on parameters the experiment did not ask for.
    fn finish(self) -> Result<Report, ExperimentError> {
        if let Some(key) = self.config.params.keys().find(|k| !self.used.contains(&k.as_str())) {
            return Err(ExperimentError::UnknownParameter {
                experiment: self.config.experiment.clone(),
                key: key.clone(),
            });
        }
        Ok(self.report)
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Report, ExperimentError> {
    let mut params = Params::new(config);
    let body = match config.experiment.as_str() {
        "h-monotone" => h_monotone(&mut params)?,
        "roundtrip" => roundtrip(&mut params)?,
        "diagonal-differs" => diagonal_differs(&mut params)?,
        "first-machine" => first_machine(&mut params)?,
        "schedule-independence" => schedule_independence(&mut params)?,
        other => return Err(ExperimentError::UnknownExperiment(other.to_owned())),
    };
    let mut report = params.finish()?;
    report.passed = body.passed;
    report.entries.extend(body.entries);
    Ok(report)
}

fn executor(workers: usize) -> Threaded {
    Threaded::new(NonZeroUsize::new(workers).unwrap_or(NonZeroUsize::MIN))
}

/// Advances horizon by horizon, checking that no bit ever drops back to 0,
/// that the composed state equals a fresh run and that the step count stays
/// within `N * N`. Logs the horizon at which each bit turned on.
fn h_monotone(params: &mut Params) -> Result<Report, ExperimentError> {
    let n: u64 = params.number("N", "200")?;
    let workers: usize = params.number("workers", "1")?;
    let executor = executor(workers);
    let mut numbering = ProgramNumbering::enumerated();
    let mut state = DovetailState::new();
    let mut flips = Vec::new();
    let mut monotone = true;
    let mut previous: Vec<bool> = Vec::new();
    for h in 1..=n {
        state.advance_with(&mut numbering, h, &executor).expect("horizons increase");
        let bits = state.bits().bits;
        for (i, &bit) in bits.iter().enumerate() {
            let before = previous.get(i).copied();
            if before == Some(true) && !bit {
                monotone = false;
            }
            if bit && before != Some(true) {
                flips.push((i, h));
            }
        }
        previous = bits;
    }
    let mut fresh = DovetailState::new();
    if n > 0 {
        fresh
            .advance(&mut ProgramNumbering::enumerated(), n)
            .expect("horizon increases from zero");
    }
    let matches_fresh = fresh.bits() == state.bits();
    let within_bound = state.simulated_steps() <= n * n;
    let vacant = state.slots().iter().filter(|s| matches!(s, Slot::Vacant)).count();

    let mut r = Report::default();
    r.push("simulated_steps", state.simulated_steps());
    r.push("step_bound", n * n);
    r.push("halted", flips.len());
    r.push("vacant", vacant);
    r.push("monotone", monotone);
    r.push("matches_fresh", matches_fresh);
    r.push("bits", state.bits());
    for (index, horizon) in flips {
        r.push(format!("flip.{index}"), horizon);
    }
    r.passed = monotone && matches_fresh && within_bound;
    Ok(r)
}

/// Decodes and re-encodes every valid machine with a machine number of at
/// most `max-number-length` digits.
fn roundtrip(params: &mut Params) -> Result<Report, ExperimentError> {
    let max_len: usize = params.number("max-number-length", "30")?;
    let mut machines = 0u64;
    let mut failures = 0u64;
    let mut first_failure = None;
    for len in 0..=max_len {
        for number in numbers_of_length(len) {
            machines += 1;
            let text = from_number(&number);
            let ok = match decode(&text) {
                Ok(m) => encode(&m) == text && to_number(&encode(&m)).as_ref() == Ok(&number),
                Err(_) => false,
            };
            if !ok {
                failures += 1;
                first_failure.get_or_insert(number);
            }
        }
    }
    let mut r = Report::default();
    r.push("machines", machines);
    r.push("failures", failures);
    if let Some(number) = first_failure {
        r.push("first_failure", number);
    }
    r.passed = failures == 0;
    Ok(r)
}

/// Random stream lists: the diagonal differs from stream `i` at digit `i`
/// and equals the unshifted diagonal plus one.
fn diagonal_differs(params: &mut Params) -> Result<Report, ExperimentError> {
    let n: usize = params.number("n", "100")?;
    let base: u32 = params.number("base", "10")?;
    let lists: usize = params.number("lists", "1")?;
    let seed: u64 = params.number("seed", "0")?;
    if !(2..=36).contains(&base) {
        return Err(ExperimentError::BadParameter {
            key: "base".to_owned(),
            value: base.to_string(),
            reason: "base must lie in 2..=36".to_owned(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0u64;
    for _ in 0..lists {
        let streams = random_streams(&mut rng, base, n);
        let d = diagonal(&streams, n, base).expect("streams are long enough");
        let p = diagonal_prime(&streams, n).expect("streams are long enough");
        for i in 0..n {
            let differs = Some(d[i]) != streams[i].digit(i + 1);
            let shifted = u32::from(d[i]) == (u32::from(p[i]) + 1) % base;
            if !(differs && shifted) {
                violations += 1;
            }
        }
    }
    let mut r = Report::default();
    r.push("positions_checked", n * lists);
    r.push("violations", violations);
    r.passed = violations == 0;
    Ok(r)
}

/// `n` streams with `n` to `n + 10` digits each.
pub fn random_streams(rng: &mut impl Rng, base: u32, n: usize) -> Vec<DigitStream> {
    (0..n)
        .map(|_| {
            let len = n + rng.random_range(0..=10);
            let digits = (0..len).map(|_| rng.random_range(0..base) as u8).collect();
            DigitStream::new(base, digits).expect("digits are below the base")
        })
        .collect()
}

/// The smallest valid machine number, with its encoding.
fn first_machine(_params: &mut Params) -> Result<Report, ExperimentError> {
    let (_, machine) = enumerate_machines(1).remove(0);
    let text = encode(&machine);
    let number = to_number(&text).expect("encodings use the alphabet");
    let mut r = Report::default();
    r.push("encoding", &text);
    r.push("machine_number", &number);
    r.push("digits", number.len());
    r.passed = decode(&text).as_ref() == Ok(&machine);
    Ok(r)
}

/// `H(N)` computed with each worker count must be identical.
fn schedule_independence(params: &mut Params) -> Result<Report, ExperimentError> {
    let n: u64 = params.number("N", "500")?;
    let workers = params.list("workers", "1,2,8")?;
    let mut r = Report::default();
    let mut outputs = Vec::new();
    for &w in &workers {
        let mut state = DovetailState::new();
        if n > 0 {
            state
                .advance_with(&mut ProgramNumbering::enumerated(), n, &executor(w))
                .expect("horizon increases from zero");
        }
        let bits = state.bits();
        r.push(format!("ones.workers={w}"), bits.bits.iter().filter(|&&b| b).count());
        r.push(format!("steps.workers={w}"), state.simulated_steps());
        outputs.push(bits);
    }
    let identical = outputs.windows(2).all(|w| w[0] == w[1]);
    r.push("identical", identical);
    r.passed = identical;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_config() {
        let c = ExperimentConfig::parse("# pinned\nexperiment = h-monotone\nN = 50\n").unwrap();
        assert_eq!(c, ExperimentConfig::new("h-monotone").with("N", "50"));
        assert_eq!(ExperimentConfig::parse("N = 3\n"), Err(ExperimentError::MissingExperiment));
        assert_eq!(ExperimentConfig::parse("experiment\n"), Err(ExperimentError::Syntax(1)));
    }

    #[test]
    fn h_monotone_small() {
        let r = run_experiment(&ExperimentConfig::new("h-monotone").with("N", "60")).unwrap();
        assert!(r.passed, "{r}");
        assert_eq!(r.get("N"), Some("60"));
        assert_eq!(r.get("workers"), Some("1"));
        assert_eq!(r.get("monotone"), Some("true"));
    }

    #[test]
    fn roundtrip_counts_machines() {
        let r = run_experiment(&ExperimentConfig::new("roundtrip").with("max-number-length", "30")).unwrap();
        assert!(r.passed);
        assert_eq!(r.get("machines"), Some("10"));
    }

    #[test]
    fn diagonal_and_first_machine() {
        let r = run_experiment(&ExperimentConfig::new("diagonal-differs")).unwrap();
        assert!(r.passed);
        assert_eq!(r.get("seed"), Some("0"));
        assert_eq!(r.get("violations"), Some("0"));
        let r = run_experiment(&ExperimentConfig::new("first-machine")).unwrap();
        assert_eq!(r.get("encoding"), Some("(10,0,1,((0,0,0,0,0)),(1))"));
    }

    #[test]
    fn errors() {
        assert_eq!(
            run_experiment(&ExperimentConfig::new("nope")),
            Err(ExperimentError::UnknownExperiment("nope".into()))
        );
        assert!(matches!(
            run_experiment(&ExperimentConfig::new("roundtrip").with("N", "3")),
            Err(ExperimentError::UnknownParameter { .. })
        ));
        assert!(matches!(
            run_experiment(&ExperimentConfig::new("h-monotone").with("N", "x")),
            Err(ExperimentError::BadParameter { .. })
        ));
    }

    #[test]
    fn report_format() {
        let r = run_experiment(&ExperimentConfig::new("schedule-independence").with("N", "40")).unwrap();
        let text = r.to_string();
        assert!(text.starts_with("experiment\tschedule-independence\nN\t40\nworkers\t1,2,8\n"));
        assert!(text.ends_with("identical\ttrue\nresult\tPASS\n"));
    }
}
