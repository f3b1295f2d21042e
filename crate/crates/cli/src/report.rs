//! Run results: per-step scalars, tables, snapshots and checked residuals.

use num_complex::Complex64;
use qlg_core::SpinorField;
use serde::Serialize;

use crate::config::Experiment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Passes when `residual <= tolerance`.
    AtMost,
    /// Passes when `residual > tolerance`.
    Above,
}

/// A residual and the tolerance it was tested against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            comparison: Comparison::AtMost,
            // NaN fails
            passed: residual <= tolerance,
        }
    }

    pub fn above(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            residual: value,
            tolerance: threshold,
            comparison: Comparison::Above,
            passed: value > threshold,
        }
    }

    /// A failed check standing in for an error that stopped the computation.
    pub fn errored(name: impl Into<String>, why: &str) -> Self {
        Self {
            name: format!("{} ({why})", name.into()),
            residual: f64::NAN,
            tolerance: 0.0,
            comparison: Comparison::AtMost,
            passed: false,
        }
    }

    pub fn line(&self) -> String {
        let op = match self.comparison {
            Comparison::AtMost => "<=",
            Comparison::Above => ">",
        };
        format!(
            "{} {}: {:.3e} {op} {:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.residual,
            self.tolerance
        )
    }
}

/// Max of a residual sequence, NaN-propagating.
pub fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |acc, v| {
        if v.is_nan() || acc.is_nan() {
            f64::NAN
        } else {
            acc.max(v)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub norm: f64,
    pub delta_mean: f64,
    pub delta_max: f64,
    pub polarization: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersionRow {
    pub k_ell: f64,
    pub omega_tau: [f64; 4],
    pub p_eff_ell: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrotterRow {
    pub slices: u32,
    pub trotter_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Snapshot {
    Spinor(SpinorField),
    /// Amplitudes over basis labels.
    Amplitudes(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub experiment: Experiment,
    pub parameters: Vec<(String, String)>,
    pub timeseries: Vec<StepRecord>,
    pub dispersion: Vec<DispersionRow>,
    pub trotter: Vec<TrotterRow>,
    pub snapshot: Option<Snapshot>,
    pub checks: Vec<Check>,
    pub error: Option<String>,
}

impl RunReport {
    pub fn new(experiment: Experiment, parameters: Vec<(String, String)>) -> Self {
        Self {
            experiment,
            parameters,
            timeseries: Vec::new(),
            dispersion: Vec::new(),
            trotter: Vec::new(),
            snapshot: None,
            checks: Vec::new(),
            error: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.passed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_never_passes() {
        assert!(!Check::at_most("x", f64::NAN, 1.0).passed);
        assert!(!Check::above("x", f64::NAN, 1.0).passed);
        assert!(worst([1.0, f64::NAN, 0.0]).is_nan());
        assert_eq!(worst([1.0, 3.0]), 3.0);
    }

    #[test]
    fn check_line_format() {
        let c = Check::at_most("norm drift", 1e-15, 1e-10);
        assert_eq!(c.line(), "PASS norm drift: 1.000e-15 <= 1.0e-10");
    }
}
