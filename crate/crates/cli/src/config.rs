//! Flat `key = value` run configuration.
//!
//! Every problem found in a file is collected and reported together, each
//! with the line it came from.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::ValueEnum;
use num_complex::Complex64;
use qlg_core::{PairBranch, PairingMode};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Dirac1d,
    Dispersion,
    Bcs,
    Bdg,
    Superfluid,
    Verify,
    TrotterCompare,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Dirac1d => "dirac1d",
            Experiment::Dispersion => "dispersion",
            Experiment::Bcs => "bcs",
            Experiment::Bdg => "bdg",
            Experiment::Superfluid => "superfluid",
            Experiment::Verify => "verify",
            Experiment::TrotterCompare => "trotter-compare",
        }
    }

    fn required_keys(self) -> &'static [&'static str] {
        match self {
            Experiment::Dirac1d => &["sites", "steps", "m_tau"],
            Experiment::Dispersion => &["sites", "m_tau"],
            Experiment::Bcs => &["qubits", "pairs", "eps", "delta", "E_tau", "steps"],
            Experiment::Bdg => &["eps", "delta", "E_tau", "steps"],
            Experiment::Superfluid => &["sites", "steps", "lambda"],
            Experiment::Verify => &[],
            Experiment::TrotterCompare => &["k_ell", "m_tau", "steps"],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::value_variants()
            .iter()
            .copied()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown experiment `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Initial data for the field experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// Gaussian packet with equal weight in all four components.
    Packet,
    /// Seeded random field (or Fock state).
    Random,
    /// `(1, 1, 1, 1) / (2 sqrt(N))` on every site.
    Condensate,
    /// Empty Fock state.
    Vacuum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub experiment: Experiment,
    pub sites: usize,
    pub steps: usize,
    pub m_tau: f64,
    pub k_ell: f64,
    pub max_slices: u32,
    pub eps: f64,
    pub delta: Complex64,
    pub e_tau: f64,
    pub qubits: usize,
    pub pairs: Vec<(usize, usize)>,
    pub branch: PairBranch,
    pub lambda: f64,
    pub tau: f64,
    pub pairing_mode: PairingMode,
    pub initial: InitialState,
    pub packet_width: Option<f64>,
    pub packet_k: f64,
    pub rng_seed: u64,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl SimConfig {
    /// Defaults for everything but the experiment.
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            sites: 64,
            steps: 100,
            m_tau: 0.0,
            k_ell: 0.5,
            max_slices: 256,
            eps: 0.0,
            delta: Complex64::new(0.0, 0.0),
            e_tau: 0.5,
            qubits: 2,
            pairs: Vec::new(),
            branch: PairBranch::Plus,
            lambda: 0.0,
            tau: 1.0,
            pairing_mode: PairingMode::GlobalMean,
            initial: match experiment {
                Experiment::Superfluid => InitialState::Condensate,
                Experiment::Bcs => InitialState::Vacuum,
                Experiment::Bdg => InitialState::Random,
                _ => InitialState::Packet,
            },
            packet_width: None,
            packet_k: 0.5,
            rng_seed: 0,
            output: None,
            format: OutputFormat::Csv,
        }
    }

    /// `(key, value)` pairs for the report header, in a fixed order.
    pub fn parameters(&self) -> Vec<(String, String)> {
        let mut p = vec![
            ("experiment", self.experiment.to_string()),
            ("rng_seed", self.rng_seed.to_string()),
        ];
        let e = self.experiment;
        let uses = |k: &str| e.required_keys().contains(&k);
        if uses("sites") {
            p.push(("sites", self.sites.to_string()));
        }
        if uses("steps") {
            p.push(("steps", self.steps.to_string()));
        }
        if uses("m_tau") {
            p.push(("m_tau", self.m_tau.to_string()));
        }
        match e {
            Experiment::TrotterCompare => {
                p.push(("k_ell", self.k_ell.to_string()));
                p.push(("max_slices", self.max_slices.to_string()));
            }
            Experiment::Bcs | Experiment::Bdg => {
                p.push(("eps", self.eps.to_string()));
                p.push(("delta", self.delta.to_string()));
                p.push(("E_tau", self.e_tau.to_string()));
                p.push(("branch", format!("{:?}", self.branch).to_lowercase()));
                if e == Experiment::Bcs {
                    p.push(("qubits", self.qubits.to_string()));
                    let pairs: Vec<String> =
                        self.pairs.iter().map(|(a, b)| format!("{a}-{b}")).collect();
                    p.push(("pairs", pairs.join(",")));
                }
            }
            Experiment::Superfluid => {
                p.push(("lambda", self.lambda.to_string()));
                p.push(("delta", self.delta.to_string()));
                p.push(("tau", self.tau.to_string()));
                p.push(("pairing_mode", mode_name(self.pairing_mode).to_string()));
            }
            _ => {}
        }
        if matches!(
            e,
            Experiment::Dirac1d | Experiment::Superfluid | Experiment::Bcs | Experiment::Bdg
        ) {
            p.push(("initial", format!("{:?}", self.initial).to_lowercase()));
        }
        p.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }
}

pub fn mode_name(mode: PairingMode) -> &'static str {
    match mode {
        PairingMode::Uniform => "uniform",
        PairingMode::Local => "local",
        PairingMode::GlobalMean => "global_mean",
    }
}

/// One problem in a configuration file.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

const KNOWN_KEYS: &[&str] = &[
    "experiment",
    "sites",
    "steps",
    "m_tau",
    "k_ell",
    "max_slices",
    "eps",
    "delta",
    "E_tau",
    "qubits",
    "pairs",
    "branch",
    "lambda",
    "tau",
    "pairing_mode",
    "initial",
    "packet_width",
    "packet_k",
    "rng_seed",
    "output",
    "format",
];

struct Entries {
    map: BTreeMap<String, (usize, String)>,
    diags: Vec<Diagnostic>,
}

impl Entries {
    fn error(&mut self, line: Option<usize>, message: impl Into<String>) {
        self.diags.push(Diagnostic {
            line,
            message: message.into(),
        });
    }

    /// Parses `key` if present; bad values are recorded and yield `None`.
    fn get<T>(&mut self, key: &str, parse: impl FnOnce(&str) -> Result<T, String>) -> Option<T> {
        let (line, raw) = self.map.get(key).cloned()?;
        match parse(&raw) {
            Ok(v) => Some(v),
            Err(why) => {
                self.error(Some(line), format!("{key} = {raw}: {why}"));
                None
            }
        }
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.map.get(key).map(|(l, _)| *l)
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| "not a number".to_string())?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err("not finite".into())
    }
}

fn unit_interval(s: &str, key: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{key} ∉ [0,1]"))
    }
}

fn parse_count(s: &str, min: usize, max: usize) -> Result<usize, String> {
    let v: usize = s
        .parse()
        .map_err(|_| "not a non-negative integer".to_string())?;
    if (min..=max).contains(&v) {
        Ok(v)
    } else if max == usize::MAX {
        Err(format!("must be at least {min}"))
    } else {
        Err(format!("must be in {min}..={max}"))
    }
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let z = Complex64::from_str(&compact)
        .map_err(|_| "not a complex number (e.g. 0.3+0.4i)".to_string())?;
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err("not finite".into())
    }
}

fn parse_pairs(s: &str) -> Result<Vec<(usize, usize)>, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (a, b) = item
            .split_once('-')
            .ok_or_else(|| format!("pair `{item}` is not of the form a-b"))?;
        let a: usize = a
            .trim()
            .parse()
            .map_err(|_| format!("bad mode in `{item}`"))?;
        let b: usize = b
            .trim()
            .parse()
            .map_err(|_| format!("bad mode in `{item}`"))?;
        if a == b {
            return Err(format!("pair `{item}` couples a mode to itself"));
        }
        out.push((a, b));
    }
    if out.is_empty() {
        return Err("no pairs given".into());
    }
    Ok(out)
}

/// Parses and validates a configuration file.
pub fn parse_config(text: &str) -> Result<SimConfig, ConfigError> {
    let mut e = Entries {
        map: BTreeMap::new(),
        diags: Vec::new(),
    };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            e.error(
                Some(line),
                format!("expected `key = value`, found `{content}`"),
            );
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        if !KNOWN_KEYS.contains(&key) {
            e.error(Some(line), format!("unknown key `{key}`"));
            continue;
        }
        if let Some(first) = e.line(key) {
            e.error(
                Some(line),
                format!("duplicate key `{key}` (first set on line {first})"),
            );
            continue;
        }
        e.map.insert(key.to_string(), (line, value.to_string()));
    }

    let Some(experiment) = (match e.line("experiment") {
        None => {
            e.error(None, "missing required key `experiment`");
            None
        }
        Some(_) => e.get("experiment", |s| s.parse::<Experiment>()),
    }) else {
        return Err(ConfigError {
            diagnostics: e.diags,
        });
    };

    for key in experiment.required_keys() {
        if e.line(key).is_none() {
            e.error(
                None,
                format!("missing required key `{key}` for experiment {experiment}"),
            );
        }
    }

    let mut c = SimConfig::new(experiment);
    if let Some(v) = e.get("sites", |s| parse_count(s, 2, usize::MAX)) {
        c.sites = v;
    }
    if let Some(v) = e.get("steps", |s| parse_count(s, 1, usize::MAX)) {
        c.steps = v;
    }
    if let Some(v) = e.get("m_tau", |s| unit_interval(s, "m_tau")) {
        c.m_tau = v;
    }
    if let Some(v) = e.get("E_tau", |s| unit_interval(s, "E_tau")) {
        c.e_tau = v;
    }
    if let Some(v) = e.get("k_ell", |s| {
        let v = parse_f64(s)?;
        if v > -std::f64::consts::PI && v <= std::f64::consts::PI {
            Ok(v)
        } else {
            Err("k_ell ∉ (-pi, pi]".into())
        }
    }) {
        c.k_ell = v;
    }
    if let Some(v) = e.get("max_slices", |s| {
        let n: u32 = s
            .parse()
            .map_err(|_| "not a positive integer".to_string())?;
        if n.is_power_of_two() {
            Ok(n)
        } else {
            Err("must be a power of two".into())
        }
    }) {
        c.max_slices = v;
    }
    if let Some(v) = e.get("eps", parse_f64) {
        c.eps = v;
    }
    if let Some(v) = e.get("delta", parse_complex) {
        c.delta = v;
    }
    if let Some(v) = e.get("qubits", |s| parse_count(s, 2, qlg_core::fock::MAX_QUBITS)) {
        c.qubits = v;
    }
    if let Some(v) = e.get("pairs", parse_pairs) {
        c.pairs = v;
    }
    if let Some(v) = e.get("branch", |s| match s {
        "plus" => Ok(PairBranch::Plus),
        "minus" => Ok(PairBranch::Minus),
        _ => Err("expected plus or minus".into()),
    }) {
        c.branch = v;
    }
    if let Some(v) = e.get("lambda", parse_f64) {
        c.lambda = v;
    }
    if let Some(v) = e.get("tau", |s| {
        let v = parse_f64(s)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err("tau must be positive".into())
        }
    }) {
        c.tau = v;
    }
    if let Some(v) = e.get("pairing_mode", |s| match s {
        "uniform" => Ok(PairingMode::Uniform),
        "local" => Ok(PairingMode::Local),
        "global_mean" => Ok(PairingMode::GlobalMean),
        _ => Err("expected uniform, local or global_mean".into()),
    }) {
        c.pairing_mode = v;
    }
    if let Some(v) = e.get("initial", |s| match s {
        "packet" => Ok(InitialState::Packet),
        "random" => Ok(InitialState::Random),
        "condensate" => Ok(InitialState::Condensate),
        "vacuum" => Ok(InitialState::Vacuum),
        _ => Err("expected packet, random, condensate or vacuum".into()),
    }) {
        c.initial = v;
    }
    if let Some(v) = e.get("packet_width", |s| {
        let v = parse_f64(s)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err("packet_width must be positive".into())
        }
    }) {
        c.packet_width = Some(v);
    }
    if let Some(v) = e.get("packet_k", parse_f64) {
        c.packet_k = v;
    }
    if let Some(v) = e.get("rng_seed", |s| {
        s.parse::<u64>()
            .map_err(|_| "not a 64-bit unsigned integer".to_string())
    }) {
        c.rng_seed = v;
    }
    if let Some(v) = e.get("output", |s| {
        if s.is_empty() {
            Err("empty path".to_string())
        } else {
            Ok(PathBuf::from(s))
        }
    }) {
        c.output = Some(v);
    }
    if let Some(v) = e.get("format", |s| match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        _ => Err("expected csv or json".into()),
    }) {
        c.format = v;
    }

    cross_checks(&mut e, &c);
    if e.diags.is_empty() {
        Ok(c)
    } else {
        Err(ConfigError {
            diagnostics: e.diags,
        })
    }
}

fn cross_checks(e: &mut Entries, c: &SimConfig) {
    match c.experiment {
        Experiment::Bcs => {
            for &(a, b) in &c.pairs {
                for m in [a, b] {
                    if m == 0 || m > c.qubits {
                        let line = e.line("pairs");
                        e.error(line, format!("pairs: mode {m} outside 1..={}", c.qubits));
                    }
                }
            }
            if !matches!(c.initial, InitialState::Vacuum | InitialState::Random) {
                let line = e.line("initial");
                e.error(line, "bcs starts from vacuum or random");
            }
        }
        Experiment::Superfluid => {
            if c.delta.norm() * c.tau > 1.0 {
                let line = e.line("delta").or(e.line("tau"));
                e.error(
                    line,
                    format!("|delta| tau = {} ∉ [0,1]", c.delta.norm() * c.tau),
                );
            }
            if c.pairing_mode == PairingMode::Uniform && e.line("delta").is_none() {
                e.error(
                    None,
                    "missing required key `delta` for pairing_mode = uniform",
                );
            }
            if c.initial == InitialState::Vacuum {
                let line = e.line("initial");
                e.error(line, "vacuum is a Fock-space initial state");
            }
        }
        Experiment::Dirac1d => {
            if matches!(c.initial, InitialState::Vacuum) {
                let line = e.line("initial");
                e.error(line, "vacuum is a Fock-space initial state");
            }
        }
        Experiment::Bdg if c.eps.hypot(c.delta.norm()) == 0.0 => {
            e.error(
                e.line("eps"),
                "eps and delta both zero: no quasiparticle energy",
            );
        }
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dispersion_example_is_valid() {
        let c = parse_config("experiment = dispersion\nm_tau = 0.6\nsites = 64\n").unwrap();
        assert_eq!(c.experiment, Experiment::Dispersion);
        assert_eq!(c.m_tau, 0.6);
        assert_eq!(c.sites, 64);
    }

    #[test]
    fn domain_violation_has_line_number() {
        let err =
            parse_config("experiment = dispersion\n# mass\nm_tau = 1.5\nsites = 64\n").unwrap_err();
        assert_eq!(err.diagnostics.len(), 1);
        assert_eq!(err.diagnostics[0].line, Some(3));
        assert!(err.to_string().contains("m_tau ∉ [0,1]"), "{err}");
    }

    #[test]
    fn empty_file_reports_missing_experiment() {
        let err = parse_config("").unwrap_err();
        assert!(err
            .to_string()
            .contains("missing required key `experiment`"));
    }

    #[test]
    fn all_violations_are_reported() {
        let text = "experiment = dirac1d\nsites = 1\nbogus = 3\nm_tau = -0.1\nsites = 4\n";
        let err = parse_config(text).unwrap_err();
        let lines: Vec<Option<usize>> = err.diagnostics.iter().map(|d| d.line).collect();
        assert!(lines.contains(&Some(2)));
        assert!(lines.contains(&Some(3)));
        assert!(lines.contains(&Some(4)));
        assert!(lines.contains(&Some(5)));
        assert!(err.to_string().contains("missing required key `steps`"));
    }

    #[test]
    fn bcs_keys() {
        let text = "experiment = bcs\nqubits = 4\npairs = 1-2, 4-3\neps = 3\ndelta = 4+0i\nE_tau = 0.5\nsteps = 3\nbranch = minus\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.pairs, vec![(1, 2), (4, 3)]);
        assert_eq!(c.delta, Complex64::new(4.0, 0.0));
        assert_eq!(c.branch, PairBranch::Minus);
        let bad = parse_config(&text.replace("4-3", "4-5")).unwrap_err();
        assert!(bad.to_string().contains("mode 5 outside"));
    }

    #[test]
    fn superfluid_gap_domain_checked_at_parse_time() {
        let text = "experiment = superfluid\nsites = 8\nsteps = 2\nlambda = 1\ndelta = 0.9+0.9i\n";
        assert!(parse_config(text)
            .unwrap_err()
            .to_string()
            .contains("|delta| tau"));
    }

    #[test]
    fn comments_and_blank_lines() {
        let c = parse_config("  # header\n\nexperiment = verify   # trailing\n").unwrap();
        assert_eq!(c.experiment, Experiment::Verify);
    }
}
