//! CSV and JSON output.
//!
//! Floats are written with 17 significant digits so every value parses back
//! to the same binary64.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use qlg_core::field::COMPONENT_NAMES;
use qlg_core::sampling::RNG_ALGORITHM;
use qlg_core::{Spinor, SpinorField};
use serde::Serialize;

use crate::config::OutputFormat;
use crate::report::{Check, DispersionRow, RunReport, Snapshot, StepRecord, TrotterRow};

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
}

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> EmitError + '_ {
    move |source| EmitError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> EmitError + '_ {
    move |e| {
        let source = match e.into_kind() {
            csv::ErrorKind::Io(io) => io,
            other => std::io::Error::other(format!("{other:?}")),
        };
        EmitError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Writes a header row followed by `rows`; an empty table is header-only.
pub fn write_csv(
    path: &Path,
    header: &[String],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), EmitError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn names(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

pub fn timeseries_header() -> Vec<String> {
    names(&[
        "step",
        "norm",
        "delta_mean",
        "delta_max",
        "polarization",
        "energy",
    ])
}

fn timeseries_row(r: &StepRecord) -> Vec<String> {
    let mut row = vec![r.step.to_string()];
    row.extend([r.norm, r.delta_mean, r.delta_max, r.polarization, r.energy].map(fmt_float));
    row
}

pub fn dispersion_header() -> Vec<String> {
    names(&[
        "k_ell",
        "omega_tau_1",
        "omega_tau_2",
        "omega_tau_3",
        "omega_tau_4",
        "p_eff_ell",
        "residual",
    ])
}

fn dispersion_row(r: &DispersionRow) -> Vec<String> {
    let mut row = vec![fmt_float(r.k_ell)];
    row.extend(r.omega_tau.iter().map(|&w| fmt_float(w)));
    row.push(fmt_float(r.p_eff_ell));
    row.push(fmt_float(r.residual));
    row
}

pub fn snapshot_header() -> Vec<String> {
    COMPONENT_NAMES
        .iter()
        .flat_map(|c| [format!("re_{c}"), format!("im_{c}")])
        .collect()
}

fn spinor_row(s: &Spinor) -> Vec<String> {
    s.iter()
        .flat_map(|z| [fmt_float(z.re), fmt_float(z.im)])
        .collect()
}

fn amplitude_header() -> Vec<String> {
    names(&["basis", "re", "im"])
}

fn amplitude_rows(amps: &[Complex64]) -> impl Iterator<Item = Vec<String>> + '_ {
    amps.iter()
        .enumerate()
        .map(|(i, z)| vec![i.to_string(), fmt_float(z.re), fmt_float(z.im)])
}

pub fn write_snapshot(path: &Path, field: &SpinorField) -> Result<(), EmitError> {
    write_csv(
        path,
        &snapshot_header(),
        field.spinors().iter().map(spinor_row),
    )
}

/// Reads a spinor snapshot written by [`write_snapshot`].
pub fn read_snapshot(path: &Path) -> Result<SpinorField, EmitError> {
    let parse_err = |message: String| EmitError::Parse {
        path: path.to_path_buf(),
        message,
    };
    let file = File::open(path).map_err(io_err(path))?;
    let mut r = csv::Reader::from_reader(file);
    let header: Vec<String> = r
        .headers()
        .map_err(csv_err(path))?
        .iter()
        .map(str::to_string)
        .collect();
    if header != snapshot_header() {
        return Err(parse_err(format!("unexpected header {header:?}")));
    }
    let mut spinors = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record.map_err(csv_err(path))?;
        let v: Vec<f64> = record
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| parse_err(format!("row {}: {e}", i + 2)))?;
        if v.len() != 8 {
            return Err(parse_err(format!("row {}: expected 8 columns", i + 2)));
        }
        spinors.push(std::array::from_fn(|c| {
            Complex64::new(v[2 * c], v[2 * c + 1])
        }));
    }
    SpinorField::from_spinors(spinors).map_err(|e| parse_err(e.to_string()))
}

#[derive(Serialize)]
struct Tables<'a> {
    timeseries: &'a [StepRecord],
    dispersion: &'a [DispersionRow],
    trotter: &'a [TrotterRow],
    snapshot: Option<Vec<[f64; 2]>>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    tool: &'static str,
    version: &'static str,
    experiment: &'static str,
    rng: &'static str,
    parameters: BTreeMap<&'a str, &'a str>,
    passed: bool,
    error: Option<&'a str>,
    checks: &'a [Check],
    files: Vec<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tables: Option<Tables<'a>>,
}

fn flat_snapshot(s: &Snapshot) -> Vec<[f64; 2]> {
    match s {
        Snapshot::Spinor(f) => f.spinors().iter().flatten().map(|z| [z.re, z.im]).collect(),
        Snapshot::Amplitudes(a) => a.iter().map(|z| [z.re, z.im]).collect(),
    }
}

/// Writes all output files for a report into `dir` and returns their paths.
pub fn emit(
    report: &RunReport,
    dir: &Path,
    format: OutputFormat,
) -> Result<Vec<PathBuf>, EmitError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut files: Vec<&'static str> = Vec::new();
    if format == OutputFormat::Csv {
        if !report.timeseries.is_empty() {
            write_csv(
                &dir.join("timeseries.csv"),
                &timeseries_header(),
                report.timeseries.iter().map(timeseries_row),
            )?;
            files.push("timeseries.csv");
        }
        if report.experiment == crate::config::Experiment::Dispersion {
            write_csv(
                &dir.join("dispersion.csv"),
                &dispersion_header(),
                report.dispersion.iter().map(dispersion_row),
            )?;
            files.push("dispersion.csv");
        }
        if !report.trotter.is_empty() {
            write_csv(
                &dir.join("trotter.csv"),
                &names(&["slices", "trotter_error"]),
                report
                    .trotter
                    .iter()
                    .map(|r| vec![r.slices.to_string(), fmt_float(r.trotter_error)]),
            )?;
            files.push("trotter.csv");
        }
        match &report.snapshot {
            Some(Snapshot::Spinor(f)) => {
                write_snapshot(&dir.join("snapshot.csv"), f)?;
                files.push("snapshot.csv");
            }
            Some(Snapshot::Amplitudes(a)) => {
                write_csv(
                    &dir.join("snapshot.csv"),
                    &amplitude_header(),
                    amplitude_rows(a),
                )?;
                files.push("snapshot.csv");
            }
            None => {}
        }
    }
    files.push("report.json");

    let json = JsonReport {
        tool: "qlg",
        version: env!("CARGO_PKG_VERSION"),
        experiment: report.experiment.name(),
        rng: RNG_ALGORITHM,
        parameters: report
            .parameters
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_str()))
            .collect(),
        passed: report.passed(),
        error: report.error.as_deref(),
        checks: &report.checks,
        files: files.clone(),
        tables: (format == OutputFormat::Json).then(|| Tables {
            timeseries: &report.timeseries,
            dispersion: &report.dispersion,
            trotter: &report.trotter,
            snapshot: report.snapshot.as_ref().map(flat_snapshot),
        }),
    };
    let path = dir.join("report.json");
    let file = File::create(&path).map_err(io_err(&path))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, &json).map_err(|e| EmitError::Io {
        path: path.clone(),
        source: e.into(),
    })?;
    w.write_all(b"\n").map_err(io_err(&path))?;
    w.flush().map_err(io_err(&path))?;

    Ok(files.into_iter().map(|f| dir.join(f)).collect())
}
