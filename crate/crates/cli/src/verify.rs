//! Acceptance suite: each criterion compares a library route against an
//! independent oracle and reports residuals with their tolerances.

use std::f64::consts::PI;

use num_complex::Complex64;
use qlg_core::algebra::{dirac_matrices, gate_angle, TOL_EXACT};
use qlg_core::dirac::{
    dirac_generator, dirac_product_form, dirac_step_matrix, dirac_step_matrix_1d,
    dispersion_of_matrix, measure_dispersion,
};
use qlg_core::eigen::normal_eigenpairs;
use qlg_core::field::{lattice_wavenumber, plane_wave_field};
use qlg_core::fock::{
    apply_pair_gate, bcs_gate, bcs_number_operator, bdg_hamiltonian, embed_bdg,
    embed_pair_operator, jordan_wigner_ops, pair_number_operator, step_bdg, BDG_EMBEDDING,
};
use qlg_core::sampling::{gaussian_complex, random_classified, random_spinor, rng_stream, QlgRng};
use qlg_core::superfluid::{
    njl_densities, nonlinear_algebra, step_self_consistent, superfluid_step_matrix, GapField,
    PairingParams,
};
use qlg_core::{
    c64, closed_form_exp, expm_oracle, step_dirac, trotter_product, BcsParams, DiracParams,
    FockSpace, NumberOperatorKind, PairBranch, PairingMode, SpinorField, SquareMatrix, ONE, ZERO,
};
use rand::Rng;

use crate::report::{worst, Check, TrotterRow};

/// One acceptance criterion and its checks.
#[derive(Debug, Clone)]
pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
}

impl Criterion {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn line(&self) -> String {
        format!(
            "{} criterion {}: {}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.title
        )
    }
}

fn record(checks: &mut Vec<Check>, name: &str, r: qlg_core::Result<Check>) {
    checks.push(r.unwrap_or_else(|e| Check::errored(name, &e.to_string())));
}

/// Criteria 1 to 8 in order.
pub fn run_all(seed: u64) -> Vec<Criterion> {
    vec![
        closed_form_unitaries(seed),
        dirac_product_decomposition(),
        continuum_limit(),
        exactness_vs_trotter(),
        bcs_operator_algebra(seed),
        bdg(seed),
        superfluid_algebra(seed),
        self_consistent_evolution(seed),
    ]
}

pub fn closed_form_unitaries(seed: u64) -> Criterion {
    const DRAWS: usize = 1000;
    let mut checks = Vec::new();
    for (stream, kind) in [
        NumberOperatorKind::InvolutionRegular,
        NumberOperatorKind::IdempotentRegular,
        NumberOperatorKind::TriIdempotentRegular,
    ]
    .into_iter()
    .enumerate()
    {
        let mut rng = rng_stream(seed, 100 + stream as u64);
        let name = format!("closed form vs series, {DRAWS} {} generators", kind.name());
        let r = (|| {
            let mut errs = Vec::with_capacity(DRAWS);
            for i in 0..DRAWS {
                let dim = 3 + i % 4;
                let n = random_classified(kind, dim, &mut rng);
                let theta = rng.random_range(0.0..PI);
                let closed = closed_form_exp(&n, theta)?;
                errs.push(closed.distance(&expm_oracle(&n.times_minus_i(theta))?));
            }
            Ok(Check::at_most(&name, worst(errs), TOL_EXACT))
        })();
        record(&mut checks, &name, r);
    }
    Criterion {
        id: 1,
        title: "closed-form unitaries match the series exponential",
        checks,
    }
}

pub fn dirac_product_decomposition() -> Criterion {
    const SITES: usize = 64;
    let mut checks = Vec::new();
    for m in [0.0, 0.1, 0.5, 0.9] {
        let name = format!("step on U(k) eigenmodes, m_tau = {m}");
        let r = (|| {
            let params = DiracParams::new(m)?;
            let mut errs = Vec::new();
            for j in 0..SITES {
                let k = lattice_wavenumber(SITES, j);
                let u = dirac_step_matrix_1d(k, m)?;
                for pair in normal_eigenpairs(&u, 1e-10)? {
                    let spinor = [
                        pair.vector[0],
                        pair.vector[1],
                        pair.vector[2],
                        pair.vector[3],
                    ];
                    let mode = plane_wave_field(SITES, j, spinor)?;
                    let stepped = step_dirac(&mode, &params)?;
                    errs.push(stepped.max_distance(&mode.scaled(pair.value))?);
                }
            }
            Ok(Check::at_most(&name, worst(errs), TOL_EXACT))
        })();
        record(&mut checks, &name, r);

        let ks: Vec<f64> = (0..SITES).map(|j| lattice_wavenumber(SITES, j)).collect();
        for (label, pick) in [
            (
                "cos",
                (|d: &qlg_core::DispersionRecord| d.cos_residual)
                    as fn(&qlg_core::DispersionRecord) -> f64,
            ),
            ("sin", |d: &qlg_core::DispersionRecord| d.sin_residual),
        ] {
            let name = format!("lattice dispersion {label} identity, m_tau = {m}");
            let r = measure_dispersion(m, &ks).and_then(|rows| {
                let mut errs = Vec::new();
                for row in rows {
                    errs.push(pick(&row?));
                }
                Ok(Check::at_most(&name, worst(errs), TOL_EXACT))
            });
            record(&mut checks, &name, r);
        }
    }
    Criterion {
        id: 2,
        title: "Dirac product decomposition and lattice dispersion",
        checks,
    }
}

pub fn continuum_limit() -> Criterion {
    let name = "|omega tau - sqrt(k^2 + m^2)| for m_tau, |k ell| <= 0.05";
    let r = (|| {
        let ks: Vec<f64> = (-10..=10).map(|i| 0.005 * f64::from(i)).collect();
        let mut errs = Vec::new();
        for m in [0.0, 0.01, 0.025, 0.05] {
            for row in measure_dispersion(m, &ks)? {
                errs.push(row?.continuum_deviation(m));
            }
        }
        Ok(Check::at_most(name, worst(errs), 1e-4))
    })();
    let mut checks = Vec::new();
    record(&mut checks, name, r);
    Criterion {
        id: 3,
        title: "continuum limit of the lattice dispersion",
        checks,
    }
}

/// Trotter error of `(alpha·k, beta m)` over `t = steps` against the series
/// exponential of the summed generator, for `n = 1, 2, 4, ..., max_slices`.
pub fn trotter_table(
    k_ell: f64,
    m_tau: f64,
    steps: usize,
    max_slices: u32,
) -> qlg_core::Result<Vec<TrotterRow>> {
    let d = dirac_matrices("chiral")?;
    let h0 = d.alpha_dot([0.0, 0.0, 1.0]).scale_real(k_ell);
    let h1 = d.beta.scale_real(m_tau);
    let t = steps as f64;
    let exact = expm_oracle(&(&h0 + &h1).times_minus_i(t))?;
    let mut rows = Vec::new();
    let mut n = 1u32;
    while n <= max_slices {
        let err = trotter_product(&h0, &h1, t, n)?.distance(&exact);
        rows.push(TrotterRow {
            slices: n,
            trotter_error: err,
        });
        n *= 2;
    }
    Ok(rows)
}

/// Error of `steps` applications of the product decomposition against the
/// series exponential of its generator.
pub fn product_sequence_error(k_ell: f64, m_tau: f64, steps: usize) -> qlg_core::Result<f64> {
    let u = dirac_product_form([0.0, 0.0, k_ell], m_tau)?;
    let oracle = dirac_generator([0.0, 0.0, k_ell], m_tau)?.evolution_oracle(steps as f64)?;
    Ok(u.powi(steps as u32).distance(&oracle))
}

/// Checks shared by criterion 4 and the trotter-compare experiment.
pub fn trotter_checks(
    k_ell: f64,
    m_tau: f64,
    steps: usize,
    max_slices: u32,
) -> (Vec<TrotterRow>, Vec<Check>) {
    let mut checks = Vec::new();
    let rows = match trotter_table(k_ell, m_tau, steps, max_slices) {
        Ok(rows) => rows,
        Err(e) => {
            checks.push(Check::errored("Trotter table", &e.to_string()));
            Vec::new()
        }
    };
    if !rows.is_empty() {
        let violations = rows
            .windows(2)
            .filter(|w| w[1].trotter_error.is_nan() || w[1].trotter_error >= w[0].trotter_error)
            .count();
        checks.push(Check::at_most(
            format!(
                "Trotter error strictly decreasing over n = 1..{max_slices} (non-decreasing steps)"
            ),
            violations as f64,
            0.0,
        ));
        let last = rows.last().expect("non-empty");
        checks.push(Check::above(
            format!("Trotter error at n = {}", last.slices),
            last.trotter_error,
            1e-6,
        ));
    }
    let name = format!("product decomposition over {steps} steps vs series oracle");
    let r =
        product_sequence_error(k_ell, m_tau, steps).map(|e| Check::at_most(&name, e, TOL_EXACT));
    record(&mut checks, &name, r);
    (rows, checks)
}

pub fn exactness_vs_trotter() -> Criterion {
    let (_, checks) = trotter_checks(0.5, 0.5, 64, 256);
    Criterion {
        id: 4,
        title: "exact product decomposition vs Trotter baseline",
        checks,
    }
}

fn random_bcs_params(rng: &mut QlgRng) -> qlg_core::Result<BcsParams> {
    // generic: |Δ|/E > 0.05 and |ℰ|/E < 0.999
    loop {
        let eps = rng.random_range(-3.0..3.0);
        let delta = gaussian_complex(rng) * 2.0;
        let e = f64::hypot(eps, delta.norm());
        if delta.norm() / e > 0.05 && eps.abs() / e < 0.999 {
            let branch = if rng.random() {
                PairBranch::Plus
            } else {
                PairBranch::Minus
            };
            return BcsParams::with_e_tau(eps, delta, branch, rng.random_range(0.0..=1.0));
        }
    }
}

pub fn bcs_operator_algebra(seed: u64) -> Criterion {
    let mut checks = Vec::new();

    let name = "Jordan-Wigner anticommutators, Q <= 6";
    let r = (|| {
        let mut errs = Vec::new();
        for q in 2..=6 {
            let dim = 1usize << q;
            let ops: Vec<_> = (1..=q)
                .map(|a| jordan_wigner_ops(q, a))
                .collect::<Result<_, _>>()?;
            let one = SquareMatrix::identity(dim);
            let zero = SquareMatrix::zeros(dim);
            for (a, (aa, aa_dag)) in ops.iter().enumerate() {
                for (b, (ab, ab_dag)) in ops.iter().enumerate() {
                    let expected = if a == b { &one } else { &zero };
                    errs.push(aa.anticommutator(ab_dag).distance(expected));
                    errs.push(aa.anticommutator(ab).max_norm());
                    errs.push(aa_dag.anticommutator(ab_dag).max_norm());
                }
            }
        }
        Ok(Check::at_most(name, worst(errs), TOL_EXACT))
    })();
    record(&mut checks, name, r);

    let mut rng = rng_stream(seed, 500);
    let r: qlg_core::Result<[Check; 3]> = (|| {
        let mut cube = Vec::new();
        let mut square = Vec::new();
        let mut gate = Vec::new();
        for i in 0..100 {
            let p = random_bcs_params(&mut rng)?;
            let q = 2 + i % 3;
            let alpha = 1 + rng.random_range(0..q);
            let beta = 1 + (alpha + rng.random_range(0..q - 1)) % q;
            let n = bcs_number_operator(q, alpha, beta, &p)?;
            let n2 = &n * &n;
            cube.push((&n2 * &n).distance(&n));
            square.push(n2.distance(&n));
            let u = bcs_gate(&n, p.e_tau())?;
            gate.push(u.distance(&expm_oracle(&n.times_minus_i(gate_angle(p.e_tau())?))?));
        }
        Ok([
            Check::at_most("N^3 = N, 100 generic draws", worst(cube), TOL_EXACT),
            Check::above(
                "min ||N^2 - N|| over 100 generic draws",
                square.iter().copied().fold(f64::INFINITY, f64::min),
                0.1,
            ),
            Check::at_most("BCS gate vs series exponential", worst(gate), TOL_EXACT),
        ])
    })();
    match r {
        Ok(cs) => checks.extend(cs),
        Err(e) => checks.push(Check::errored("BCS number operator draws", &e.to_string())),
    }

    let name = "disjoint-pair gate product vs exponential of summed generators";
    let r = (|| {
        let mut errs = Vec::new();
        for (i, layout) in [[(1, 2), (3, 4)], [(1, 4), (2, 3)], [(3, 1), (4, 2)]]
            .iter()
            .enumerate()
        {
            let p = random_bcs_params(&mut rng)?;
            let p2 = random_bcs_params(&mut rng)?;
            let p2 = BcsParams::with_e_tau(p2.eps, p2.delta, p2.branch, p.e_tau())?;
            let (n1, n2) = (pair_number_operator(&p), pair_number_operator(&p2));
            let theta = gate_angle(p.e_tau())?;
            let state = FockSpace::random(4 + i % 2, &mut rng)?;
            let q = state.qubits();
            let [(a1, b1), (a2, b2)] = *layout;
            let gated = apply_pair_gate(
                &apply_pair_gate(&state, &bcs_gate(&n1, p.e_tau())?, a1, b1)?,
                &bcs_gate(&n2, p.e_tau())?,
                a2,
                b2,
            )?;
            let summed =
                &embed_pair_operator(q, &n1, a1, b1)? + &embed_pair_operator(q, &n2, a2, b2)?;
            let expected = state.apply_dense(&expm_oracle(&summed.times_minus_i(theta))?)?;
            let diff = gated
                .amplitudes()
                .iter()
                .zip(expected.amplitudes())
                .map(|(x, y)| (x - y).norm());
            errs.push(worst(diff));
        }
        Ok(Check::at_most(name, worst(errs), TOL_EXACT))
    })();
    record(&mut checks, name, r);

    Criterion {
        id: 5,
        title: "BCS operator algebra",
        checks,
    }
}

pub fn bdg(seed: u64) -> Criterion {
    let mut checks = Vec::new();
    let mut rng = rng_stream(seed, 600);
    let r: qlg_core::Result<[Check; 2]> = (|| {
        let mut identity = Vec::new();
        let mut involution = Vec::new();
        for _ in 0..100 {
            let p = random_bcs_params(&mut rng)?;
            let e = p.energy();
            let plus = pair_number_operator(&p.with_branch(PairBranch::Plus));
            let minus = pair_number_operator(&p.with_branch(PairBranch::Minus));
            let h = bdg_hamiltonian(p.eps, p.delta);
            identity.push((&plus - &minus).scale_real(e).distance(&embed_bdg(&h)));
            // the |00>, |11> block carried by components 0 and 3
            let block = SquareMatrix::from_fn(2, |r, c| h[(3 * r, 3 * c)] / e);
            involution.push((&block * &block).distance(&SquareMatrix::identity(2)));
        }
        Ok([
            Check::at_most("E (N+ - N-) = H_BdG, 100 draws", worst(identity), TOL_EXACT),
            Check::at_most(
                "(H_BdG / E)^2 = 1 on its support, 100 draws",
                worst(involution),
                TOL_EXACT,
            ),
        ])
    })();
    match r {
        Ok(cs) => checks.extend(cs),
        Err(e) => checks.push(Check::errored("BdG draws", &e.to_string())),
    }

    let name = "BdG step norm change per step";
    let r = (|| {
        let mut errs = Vec::new();
        for _ in 0..20 {
            let p = random_bcs_params(&mut rng)?;
            let tau = p.e_tau() / p.energy();
            let mut psi: [Complex64; 4] = std::array::from_fn(|_| gaussian_complex(&mut rng));
            let n0 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            psi = psi.map(|z| z / n0);
            for _ in 0..500 {
                let next = step_bdg(&psi, p.eps, p.delta, tau)?;
                let before: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
                let after: f64 = next.iter().map(|z| z.norm_sqr()).sum();
                errs.push((after.sqrt() - before.sqrt()).abs());
                psi = next;
            }
        }
        Ok(Check::at_most(name, worst(errs), 1e-14))
    })();
    record(&mut checks, name, r);

    let name = "low-E remainder ||U - (1 - i E tau N)|| / (E tau)^2, E tau <= 0.1";
    let r = (|| {
        let mut ratios = Vec::new();
        for i in 0..100 {
            let p = random_bcs_params(&mut rng)?;
            let x = 0.1 * f64::from(i + 1) / 100.0;
            let p = BcsParams::with_e_tau(p.eps, p.delta, p.branch, x)?;
            let tau = x / p.energy();
            let one = SquareMatrix::identity(4);

            // BdG step, assembled column by column and moved to the qubit basis
            let n_bdg = &pair_number_operator(&p.with_branch(PairBranch::Plus))
                - &pair_number_operator(&p.with_branch(PairBranch::Minus));
            let mut u = SquareMatrix::zeros(4);
            for col in 0..4 {
                let mut e = [ZERO; 4];
                e[col] = ONE;
                let out = step_bdg(&e, p.eps, p.delta, tau)?;
                for row in 0..4 {
                    u[(BDG_EMBEDDING[row], BDG_EMBEDDING[col])] = out[row];
                }
            }
            let linear = &one + &n_bdg.times_minus_i(x);
            ratios.push(u.distance(&linear) / (x * x));

            let n = pair_number_operator(&p);
            let linear = &one + &n.times_minus_i(x);
            ratios.push(bcs_gate(&n, x)?.distance(&linear) / (x * x));
        }
        Ok(Check::at_most(name, worst(ratios), 1.0))
    })();
    record(&mut checks, name, r);

    Criterion {
        id: 6,
        title: "BdG involution, identity and grid step",
        checks,
    }
}

pub fn superfluid_algebra(seed: u64) -> Criterion {
    const DRAWS: usize = 10_000;
    let mut checks = Vec::new();
    let mut rng = rng_stream(seed, 700);
    let d = dirac_matrices("chiral").expect("chiral is supported");
    let r: qlg_core::Result<[Check; 2]> = (|| {
        let one = SquareMatrix::identity(2);
        let mut closure = Vec::new();
        let mut reduction = Vec::new();
        for _ in 0..DRAWS {
            let delta = gaussian_complex(&mut rng);
            let alg = nonlinear_algebra(delta)?;
            for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
                let comm = alg.sigma[a].commutator(&alg.sigma[b]);
                closure.push(comm.distance(&alg.sigma[c].scale(c64(0.0, 2.0))));
            }
            for s in &alg.sigma {
                closure.push((s * s).distance(&one));
            }
            for mu in 0..4 {
                reduction
                    .push((&alg.gamma[0] * &alg.gamma[mu]).distance(&(&d.gamma[0] * &d.gamma[mu])));
            }
        }
        Ok([
            Check::at_most(
                format!("SU(2) closure, {DRAWS} gap phases"),
                worst(closure),
                TOL_EXACT,
            ),
            Check::at_most(
                format!("Gamma0 Gamma^mu = gamma0 gamma^mu, {DRAWS} gap phases"),
                worst(reduction),
                TOL_EXACT,
            ),
        ])
    })();
    match r {
        Ok(cs) => checks.extend(cs),
        Err(e) => checks.push(Check::errored("nonlinear algebra draws", &e.to_string())),
    }

    let mut njl = Vec::new();
    for _ in 0..10 * DRAWS {
        let s = random_spinor(&mut rng);
        let lambda = rng.random_range(-10.0..10.0);
        njl.push(njl_densities(&s, lambda).mismatch() / f64::max(1.0, lambda.abs()));
    }
    checks.push(Check::at_most(
        format!(
            "NJL identity, {} spinors (relative to max(1, |lambda|))",
            10 * DRAWS
        ),
        worst(njl),
        TOL_EXACT,
    ));

    let name = "superfluid dispersion = Dirac dispersion at m = |Delta|";
    let r = (|| {
        let mut errs = Vec::new();
        for g in [0.1, 0.3, 0.6, 0.9] {
            for j in 0..64 {
                let k = -PI + (f64::from(j) + 0.5) * PI / 32.0;
                let delta = Complex64::from_polar(g, rng.random_range(-PI..PI));
                let sf = dispersion_of_matrix(
                    &superfluid_step_matrix([0.0, 0.0, k], delta, 1.0)?,
                    k,
                    g,
                )?;
                let dm = dispersion_of_matrix(&dirac_step_matrix([0.0, 0.0, k], g)?, k, g)?;
                errs.extend(
                    sf.omega_tau
                        .iter()
                        .zip(&dm.omega_tau)
                        .map(|(a, b)| (a - b).abs()),
                );
                errs.push(sf.residual());
            }
        }
        Ok(Check::at_most(name, worst(errs), TOL_EXACT))
    })();
    record(&mut checks, name, r);

    Criterion {
        id: 7,
        title: "superfluid algebra, NJL identity and dispersion",
        checks,
    }
}

pub fn self_consistent_evolution(seed: u64) -> Criterion {
    const SITES: usize = 256;
    const STEPS: usize = 1000;
    let mut checks = Vec::new();

    let name = format!("global norm drift, local gap, {SITES} sites x {STEPS} steps");
    let r = (|| {
        let mut f = SpinorField::random(SITES, &mut rng_stream(seed, 800));
        let mut p = PairingParams::new(100.0, PairingMode::Local, 1.0, GapField::Uniform(ZERO))?;
        let mut drift: f64 = 0.0;
        for _ in 0..STEPS {
            f = step_self_consistent(&f, &mut p)?.0;
            drift = drift.max((f.norm_sqr() - 1.0).abs());
        }
        Ok(Check::at_most(&name, drift, 1e-10))
    })();
    record(&mut checks, &name, r);

    let name = format!("uniform condensate |Delta| variation over {STEPS} steps");
    let r = (|| {
        let mut f = SpinorField::uniform(SITES, [c64(0.5, 0.0); 4]);
        // Δ = λ / (4N) for this field; λ = 2N gives |Δ| τ = 1/2
        let mut p = PairingParams::new(
            2.0 * SITES as f64,
            PairingMode::Local,
            1.0,
            GapField::Uniform(ZERO),
        )?;
        let mut mags = Vec::new();
        for _ in 0..STEPS {
            let (next, update) = step_self_consistent(&f, &mut p)?;
            if let GapField::Local(g) = &update.gap {
                mags.extend(g.iter().map(|d| d.norm()));
            }
            f = next;
        }
        let lo = mags.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = mags.iter().copied().fold(0.0, f64::max);
        Ok(Check::at_most(&name, hi - lo, 1e-10))
    })();
    record(&mut checks, &name, r);

    Criterion {
        id: 8,
        title: "self-consistent superfluid evolution",
        checks,
    }
}
