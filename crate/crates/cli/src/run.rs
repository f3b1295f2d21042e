//! Experiment drivers.

use num_complex::Complex64;
use qlg_core::algebra::{gate_angle, TOL_EXACT};
use qlg_core::dirac::{measure_dispersion, step_energy};
use qlg_core::field::lattice_wavenumber;
use qlg_core::fock::{
    bcs_gate, bdg_hamiltonian, embed_bdg, pair_number_operator, step_bdg, BDG_EMBEDDING,
};
use qlg_core::sampling::{gaussian_complex, rng_from_seed};
use qlg_core::superfluid::{step_self_consistent, GapField, PairingParams};
use qlg_core::{
    c64, expm_oracle, step_dirac, BcsParams, DiracParams, FockSpace, PairBranch, PairingMode,
    SpinorField,
};

use crate::config::{Experiment, InitialState, SimConfig};
use crate::report::{worst, Check, DispersionRow, RunReport, Snapshot, StepRecord};
use crate::verify;

/// Runs the configured experiment. Errors that stop a run are recorded in
/// the report rather than returned.
pub fn execute(cfg: &SimConfig) -> RunReport {
    let mut report = RunReport::new(cfg.experiment, cfg.parameters());
    let outcome = match cfg.experiment {
        Experiment::Dirac1d => dirac1d(cfg, &mut report),
        Experiment::Dispersion => dispersion(cfg, &mut report),
        Experiment::Bcs => bcs(cfg, &mut report),
        Experiment::Bdg => bdg(cfg, &mut report),
        Experiment::Superfluid => superfluid(cfg, &mut report),
        Experiment::TrotterCompare => {
            let (rows, checks) =
                verify::trotter_checks(cfg.k_ell, cfg.m_tau, cfg.steps, cfg.max_slices);
            report.trotter = rows;
            report.checks = checks;
            Ok(())
        }
        Experiment::Verify => {
            report.checks = verification_checks(cfg.rng_seed);
            Ok(())
        }
    };
    if let Err(e) = outcome {
        report.error = Some(e.to_string());
    }
    report
}

/// The acceptance suite flattened into named checks.
pub fn verification_checks(seed: u64) -> Vec<Check> {
    verify::run_all(seed)
        .into_iter()
        .flat_map(|c| {
            let id = c.id;
            c.checks.into_iter().map(move |mut check| {
                check.name = format!("criterion {id}: {}", check.name);
                check
            })
        })
        .collect()
}

fn initial_field(cfg: &SimConfig) -> SpinorField {
    let n = cfg.sites;
    match cfg.initial {
        InitialState::Random => SpinorField::random(n, &mut rng_from_seed(cfg.rng_seed)),
        InitialState::Condensate | InitialState::Vacuum => {
            SpinorField::uniform(n, [c64(0.5, 0.0); 4])
        }
        InitialState::Packet => {
            let width = cfg.packet_width.unwrap_or((n as f64 / 16.0).max(1.0));
            SpinorField::gaussian_packet(n, (n / 2) as f64, width, cfg.packet_k, [c64(0.5, 0.0); 4])
        }
    }
}

fn dirac1d(cfg: &SimConfig, report: &mut RunReport) -> qlg_core::Result<()> {
    let params = DiracParams::new(cfg.m_tau)?;
    let mut field = initial_field(cfg);
    for step in 1..=cfg.steps {
        let next = step_dirac(&field, &params)?;
        report.timeseries.push(StepRecord {
            step,
            norm: next.norm_sqr().sqrt(),
            delta_mean: 0.0,
            delta_max: 0.0,
            polarization: 0.0,
            energy: step_energy(&field, &next)?,
        });
        field = next;
    }
    push_field_checks(report, 1e-10, Some(1e-10));
    report.snapshot = Some(Snapshot::Spinor(field));
    Ok(())
}

/// Norm deviation from the first row's starting value of one, and optionally
/// drift of the energy column.
fn push_field_checks(report: &mut RunReport, norm_tol: f64, energy_tol: Option<f64>) {
    let ts = &report.timeseries;
    let norm = worst(ts.iter().map(|r| (r.norm - 1.0).abs()));
    report.checks.push(Check::at_most(
        "max |norm - 1| over all steps",
        norm,
        norm_tol,
    ));
    if let (Some(tol), Some(first)) = (energy_tol, ts.first()) {
        let drift = worst(ts.iter().map(|r| (r.energy - first.energy).abs()));
        report
            .checks
            .push(Check::at_most("energy expectation drift", drift, tol));
    }
}

fn dispersion(cfg: &SimConfig, report: &mut RunReport) -> qlg_core::Result<()> {
    let mut ks: Vec<f64> = (0..cfg.sites)
        .map(|j| lattice_wavenumber(cfg.sites, j))
        .collect();
    ks.sort_by(f64::total_cmp);
    let mut failures = 0usize;
    for (k, row) in ks.iter().zip(measure_dispersion(cfg.m_tau, &ks)?) {
        match row {
            Ok(d) => report.dispersion.push(DispersionRow {
                k_ell: d.k_ell,
                omega_tau: [
                    d.omega_tau[0],
                    d.omega_tau[1],
                    d.omega_tau[2],
                    d.omega_tau[3],
                ],
                p_eff_ell: d.p_eff_ell,
                residual: d.residual(),
            }),
            Err(e) => {
                failures += 1;
                report.checks.push(Check::errored(
                    format!("dispersion at k_ell = {k}"),
                    &e.to_string(),
                ));
            }
        }
    }
    let res = worst(report.dispersion.iter().map(|r| r.residual));
    report.checks.push(Check::at_most(
        "lattice dispersion residual (cos and |sin| identities)",
        res,
        TOL_EXACT,
    ));
    report.checks.push(Check::at_most(
        "k-points without a dispersion record",
        failures as f64,
        0.0,
    ));
    Ok(())
}

fn bcs(cfg: &SimConfig, report: &mut RunReport) -> qlg_core::Result<()> {
    let p = BcsParams::with_e_tau(cfg.eps, cfg.delta, cfg.branch, cfg.e_tau)?;
    let n = pair_number_operator(&p);
    let gate = bcs_gate(&n, cfg.e_tau)?;
    let oracle = expm_oracle(&n.times_minus_i(gate_angle(cfg.e_tau)?))?;
    report.checks.push(Check::at_most(
        "BCS gate vs series exponential",
        gate.distance(&oracle),
        TOL_EXACT,
    ));

    let mut state = match cfg.initial {
        InitialState::Random => FockSpace::random(cfg.qubits, &mut rng_from_seed(cfg.rng_seed))?,
        _ => FockSpace::vacuum(cfg.qubits)?,
    };
    for step in 1..=cfg.steps {
        for &(a, b) in &cfg.pairs {
            state = qlg_core::fock::apply_pair_gate(&state, &gate, a, b)?;
        }
        let mut energy = 0.0;
        for &(a, b) in &cfg.pairs {
            energy += p.energy() * state.pair_expectation(&n, a, b)?;
        }
        report.timeseries.push(StepRecord {
            step,
            norm: state.norm_sqr().sqrt(),
            delta_mean: 0.0,
            delta_max: 0.0,
            polarization: 0.0,
            energy,
        });
    }
    push_field_checks(report, 1e-10, None);
    report.snapshot = Some(Snapshot::Amplitudes(state.amplitudes().to_vec()));
    Ok(())
}

fn bdg(cfg: &SimConfig, report: &mut RunReport) -> qlg_core::Result<()> {
    let p = BcsParams::with_e_tau(cfg.eps, cfg.delta, PairBranch::Plus, cfg.e_tau)?;
    let e = p.energy();
    let h = bdg_hamiltonian(cfg.eps, cfg.delta);
    let diff = &pair_number_operator(&p) - &pair_number_operator(&p.with_branch(PairBranch::Minus));
    report.checks.push(Check::at_most(
        "E (N+ - N-) = H_BdG",
        diff.scale_real(e).distance(&embed_bdg(&h)),
        TOL_EXACT,
    ));

    let mut psi: [Complex64; 4] = match cfg.initial {
        InitialState::Vacuum => [c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)],
        _ => {
            let mut rng = rng_from_seed(cfg.rng_seed);
            let v: [Complex64; 4] = std::array::from_fn(|_| gaussian_complex(&mut rng));
            let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.map(|z| z / n)
        }
    };
    let expectation = |v: &[Complex64; 4]| -> f64 {
        let hv = h.mul_vec(v);
        v.iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum()
    };
    let mut per_step: f64 = 0.0;
    for step in 1..=cfg.steps {
        let next = step_bdg(&psi, cfg.eps, cfg.delta, p.tau)?;
        let norm = |v: &[Complex64; 4]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        per_step = per_step.max((norm(&next) - norm(&psi)).abs());
        psi = next;
        report.timeseries.push(StepRecord {
            step,
            norm: norm(&psi),
            delta_mean: cfg.delta.norm(),
            delta_max: cfg.delta.norm(),
            polarization: 0.0,
            energy: expectation(&psi),
        });
    }
    report
        .checks
        .push(Check::at_most("norm change per step", per_step, 1e-14));
    push_field_checks(report, 1e-10, Some(1e-12));
    let mut amps = vec![c64(0.0, 0.0); 4];
    for (i, z) in psi.into_iter().enumerate() {
        amps[BDG_EMBEDDING[i]] = z;
    }
    report.snapshot = Some(Snapshot::Amplitudes(amps));
    Ok(())
}

fn superfluid(cfg: &SimConfig, report: &mut RunReport) -> qlg_core::Result<()> {
    let mut params = PairingParams::new(
        cfg.lambda,
        cfg.pairing_mode,
        cfg.tau,
        GapField::Uniform(cfg.delta),
    )?;
    let mut field = initial_field(cfg);
    for step in 1..=cfg.steps {
        let (next, update) = step_self_consistent(&field, &mut params)?;
        report.timeseries.push(StepRecord {
            step,
            norm: next.norm_sqr().sqrt(),
            delta_mean: update.gap.mean_abs(),
            delta_max: update.gap.max_abs(),
            polarization: update.polarization,
            energy: step_energy(&field, &next)?,
        });
        field = next;
    }
    let fixed_gap = cfg.pairing_mode == PairingMode::Uniform;
    push_field_checks(report, 1e-10, fixed_gap.then_some(1e-10));
    if !fixed_gap && cfg.initial == InitialState::Condensate {
        let ts = &report.timeseries;
        let hi = worst(ts.iter().map(|r| r.delta_max));
        let lo = ts
            .iter()
            .map(|r| r.delta_mean)
            .fold(f64::INFINITY, f64::min);
        report.checks.push(Check::at_most(
            "condensate |Delta| variation over the run",
            hi - lo,
            1e-10,
        ));
    }
    report.snapshot = Some(Snapshot::Spinor(field));
    Ok(())
}
