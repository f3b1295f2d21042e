//! Self-consistent relativistic Fermi superfluid.
//!
//! The pairing gap enters through the involution
//! `𝔑' = [[0, Δ], [Δ*, 0]] / |Δ|`, which plays the role of `beta` in the
//! free Dirac step. For a uniform gap the grid step collapses exactly as in
//! [`crate::dirac`]:
//!
//! ```text
//! psi(t + tau, x) = sqrt(1 - |Δ|^2 tau^2) (S psi)(x) - i tau (M(Δ) ⊗ 1) psi(t, x)
//! ```
//!
//! A site-dependent gap uses the collide-then-stream split `S C(x)` with a
//! local closed-form rotation `C(x)`; that split is unitary but is a modelling
//! choice, not a collapsed product.

use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::algebra::{identity2, sigma_z, DiracMatrices, GridUnits};
use crate::error::{Error, Result};
use crate::field::{pairwise_sum, SpinorField, L_DN, L_UP, R_DN, R_UP};
use crate::matrix::SquareMatrix;
use crate::{c64, Spinor, I};

/// Agreement required between the two NJL evaluations.
pub const NJL_IDENTITY_TOL: f64 = 1e-12;

fn dirac() -> &'static DiracMatrices {
    static CELL: OnceLock<DiracMatrices> = OnceLock::new();
    CELL.get_or_init(DiracMatrices::chiral)
}

/// `𝔑' = [[0, Δ/|Δ|], [Δ*/|Δ|, 0]]`.
pub fn pairing_involution(delta: Complex64) -> Result<SquareMatrix> {
    let phase = unit_phase(delta)?;
    let mut m = SquareMatrix::zeros(2);
    m[(0, 1)] = phase;
    m[(1, 0)] = phase.conj();
    Ok(m)
}

fn unit_phase(delta: Complex64) -> Result<Complex64> {
    let r = delta.norm();
    if r == 0.0 || !r.is_finite() {
        return Err(Error::ZeroGap);
    }
    Ok(delta / r)
}

/// Gap-dressed SU(2) generators and gamma matrices.
#[derive(Debug, Clone)]
pub struct NonlinearAlgebra {
    pub sigma: [SquareMatrix; 3],
    pub gamma: [SquareMatrix; 4],
}

pub fn nonlinear_algebra(delta: Complex64) -> Result<NonlinearAlgebra> {
    let phase = unit_phase(delta)?;
    let sx = pairing_involution(delta)?;
    let mut sy = SquareMatrix::zeros(2);
    sy[(0, 1)] = -I * phase;
    sy[(1, 0)] = I * phase.conj();
    let sz = sigma_z();
    let pauli = crate::algebra::pauli();
    let isy = sy.scale(I);
    let gamma = [
        sx.kron(&identity2()),
        isy.kron(&pauli[0]),
        isy.kron(&pauli[1]),
        isy.kron(&pauli[2]),
    ];
    Ok(NonlinearAlgebra {
        sigma: [sx, sy, sz],
        gamma,
    })
}

/// `M(Δ) ⊗ 1` with `M(Δ) = [[0, Δ], [Δ*, 0]]`.
pub fn gap_matrix(delta: Complex64) -> SquareMatrix {
    let mut m = SquareMatrix::zeros(2);
    m[(0, 1)] = delta;
    m[(1, 0)] = delta.conj();
    m.kron(&identity2())
}

#[inline]
fn apply_gap(s: &Spinor, delta: Complex64) -> Spinor {
    let dc = delta.conj();
    [delta * s[R_UP], delta * s[R_DN], dc * s[L_UP], dc * s[L_DN]]
}

/// `Δ ψ*_L↑ ψ_R↑ + Δ ψ*_L↓ ψ_R↓ + Δ* ψ*_R↑ ψ_L↑ + Δ* ψ*_R↓ ψ_L↓`.
pub fn nl_interaction_density(psi: &Spinor, delta: Complex64) -> f64 {
    let total = delta * psi[L_UP].conj() * psi[R_UP]
        + delta * psi[L_DN].conj() * psi[R_DN]
        + delta.conj() * psi[R_UP].conj() * psi[L_UP]
        + delta.conj() * psi[R_DN].conj() * psi[L_DN];
    let scale = delta.norm() * psi.iter().map(|z| z.norm_sqr()).sum::<f64>();
    debug_assert!(
        total.im.abs() <= 1e-14 * scale.max(1.0),
        "interaction density has imaginary part {}",
        total.im
    );
    total.re
}

/// Both sides of the NJL identity for one spinor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NjlDensity {
    /// `λ/4 [(ψ̄ψ)^2 - (ψ̄γ5ψ)^2]`
    pub scalar_pseudoscalar: f64,
    /// `λ (ψ_L† ψ_R)(ψ_R† ψ_L)`
    pub chiral: f64,
}

impl NjlDensity {
    pub fn mismatch(&self) -> f64 {
        (self.scalar_pseudoscalar - self.chiral).abs()
    }
}

fn bilinear(psi: &Spinor, m: &SquareMatrix) -> Complex64 {
    let mv = m.mul_vec(psi);
    psi.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
}

/// Evaluates the four-fermion NJL density both from the gamma matrices and
/// from chiral components.
pub fn njl_densities(psi: &Spinor, lambda: f64) -> NjlDensity {
    let d = dirac();
    let scalar = bilinear(psi, &d.gamma[0]);
    let pseudo = bilinear(psi, &(&d.gamma[0] * &d.gamma5));
    let scalar_pseudoscalar = (lambda / 4.0) * (scalar * scalar - pseudo * pseudo).re;
    let lr = psi[L_UP].conj() * psi[R_UP] + psi[L_DN].conj() * psi[R_DN];
    let rl = psi[R_UP].conj() * psi[L_UP] + psi[R_DN].conj() * psi[L_DN];
    let chiral = lambda * (lr * rl).re;
    NjlDensity {
        scalar_pseudoscalar,
        chiral,
    }
}

/// NJL interaction density; errors if the two evaluations disagree, which
/// would mean the gamma conventions are inconsistent.
pub fn njl_interaction_density(psi: &Spinor, lambda: f64) -> Result<f64> {
    let d = njl_densities(psi, lambda);
    let scale = lambda.abs() * psi.iter().map(|z| z.norm_sqr()).sum::<f64>().powi(2);
    if d.mismatch() > NJL_IDENTITY_TOL * scale.max(1.0) {
        return Err(Error::Invalid(format!(
            "NJL identity violated by {:.3e}: gamma convention bug",
            d.mismatch()
        )));
    }
    Ok(d.chiral)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairingMode {
    /// Gap held fixed.
    Uniform,
    /// Per-site bilinear.
    Local,
    /// Lattice average of the bilinear.
    #[default]
    GlobalMean,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GapField {
    Uniform(Complex64),
    Local(Vec<Complex64>),
}

impl GapField {
    pub fn at(&self, x: usize) -> Complex64 {
        match self {
            GapField::Uniform(d) => *d,
            GapField::Local(v) => v[x],
        }
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            GapField::Uniform(d) => d.norm(),
            GapField::Local(v) => v.iter().map(|d| d.norm()).fold(0.0, f64::max),
        }
    }

    pub fn mean_abs(&self) -> f64 {
        match self {
            GapField::Uniform(d) => d.norm(),
            GapField::Local(v) => {
                let mags: Vec<f64> = v.iter().map(|d| d.norm()).collect();
                pairwise_sum(&mags) / v.len() as f64
            }
        }
    }

    /// Rejects `|Δ(x)| tau > 1`, naming the first offending site.
    pub fn check_domain(&self, tau: f64) -> Result<()> {
        match self {
            GapField::Uniform(d) => {
                let v = d.norm() * tau;
                if v.is_nan() || v > 1.0 {
                    return Err(Error::GapOverflow {
                        site: None,
                        value: v,
                    });
                }
            }
            GapField::Local(gaps) => {
                if let Some((site, d)) = gaps.iter().enumerate().find(|(_, d)| {
                    let v = d.norm() * tau;
                    v.is_nan() || v > 1.0
                }) {
                    return Err(Error::GapOverflow {
                        site: Some(site),
                        value: d.norm() * tau,
                    });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairingParams {
    pub lambda: f64,
    pub mode: PairingMode,
    pub tau: f64,
    pub gap: GapField,
}

impl PairingParams {
    pub fn new(lambda: f64, mode: PairingMode, tau: f64, gap: GapField) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::Invalid("lambda must be finite".into()));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::Domain {
                name: "tau",
                value: tau,
                domain: "(0, inf)",
            });
        }
        gap.check_domain(tau)?;
        Ok(Self {
            lambda,
            mode,
            tau,
            gap,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapUpdate {
    pub gap: GapField,
    /// `λ |ψ*_R↑ψ_L↑ - ψ*_R↓ψ_L↓|`: largest over sites in local mode, of the
    /// lattice means otherwise. Zero for an unpolarized condensate.
    pub polarization: f64,
}

#[inline]
fn spin_bilinears(s: &Spinor) -> (Complex64, Complex64) {
    (s[R_UP].conj() * s[L_UP], s[R_DN].conj() * s[L_DN])
}

/// Recomputes the gap from the field: `Δ = λ ½(ψ*_R↑ψ_L↑ + ψ*_R↓ψ_L↓)`,
/// per site or averaged over the lattice according to the mode.
pub fn pairing_update(field: &SpinorField, p: &PairingParams) -> Result<GapUpdate> {
    let pairs: Vec<(Complex64, Complex64)> =
        field.spinors().par_iter().map(spin_bilinears).collect();
    let mean = |sel: fn(&(Complex64, Complex64)) -> Complex64| {
        let v: Vec<Complex64> = pairs.iter().map(sel).collect();
        pairwise_sum(&v) / pairs.len() as f64
    };
    let (mean_up, mean_dn) = (mean(|p| p.0), mean(|p| p.1));
    let update = match p.mode {
        PairingMode::Uniform => GapUpdate {
            gap: p.gap.clone(),
            polarization: p.lambda.abs() * (mean_up - mean_dn).norm(),
        },
        PairingMode::GlobalMean => GapUpdate {
            gap: GapField::Uniform((mean_up + mean_dn) * (0.5 * p.lambda)),
            polarization: p.lambda.abs() * (mean_up - mean_dn).norm(),
        },
        PairingMode::Local => GapUpdate {
            gap: GapField::Local(
                pairs
                    .iter()
                    .map(|(u, d)| (u + d) * (0.5 * p.lambda))
                    .collect(),
            ),
            polarization: pairs
                .iter()
                .map(|(u, d)| p.lambda.abs() * (u - d).norm())
                .fold(0.0, f64::max),
        },
    };
    update.gap.check_domain(p.tau)?;
    Ok(update)
}

/// One grid step for a given gap: collapsed product for a uniform gap,
/// collide-then-stream for a site-dependent one.
pub fn step_superfluid(field: &SpinorField, gap: &GapField, tau: f64) -> Result<SpinorField> {
    gap.check_domain(tau)?;
    if let GapField::Local(g) = gap {
        if g.len() != field.sites() {
            return Err(Error::Dimension {
                expected: field.sites(),
                actual: g.len(),
            });
        }
    }
    let src = field.spinors();
    let n = src.len();
    let out: Vec<Spinor> = match gap {
        GapField::Uniform(delta) => {
            let c = (1.0 - delta.norm_sqr() * tau * tau).sqrt();
            let mt = c64(0.0, -tau);
            (0..n)
                .into_par_iter()
                .map(|x| {
                    let (up, down) = ((x + 1) % n, (x + n - 1) % n);
                    let streamed = [
                        src[up][L_UP],
                        src[down][L_DN],
                        src[down][R_UP],
                        src[up][R_DN],
                    ];
                    let g = apply_gap(&src[x], *delta);
                    std::array::from_fn(|i| streamed[i] * c + g[i] * mt)
                })
                .collect()
        }
        GapField::Local(gaps) => {
            let collided: Vec<Spinor> = src
                .par_iter()
                .zip(gaps.par_iter())
                .map(|(s, &delta)| {
                    let c = (1.0 - delta.norm_sqr() * tau * tau).sqrt();
                    let g = apply_gap(s, delta);
                    std::array::from_fn(|i| s[i] * c + g[i] * c64(0.0, -tau))
                })
                .collect();
            (0..n)
                .into_par_iter()
                .map(|x| {
                    let (up, down) = ((x + 1) % n, (x + n - 1) % n);
                    [
                        collided[up][L_UP],
                        collided[down][L_DN],
                        collided[down][R_UP],
                        collided[up][R_DN],
                    ]
                })
                .collect()
        }
    };
    SpinorField::from_spinors(out)
}

/// Self-consistent step: refresh the gap from `ψ(t)` (unless the mode holds
/// it fixed), store it in `p`, then advance the field.
pub fn step_self_consistent(
    field: &SpinorField,
    p: &mut PairingParams,
) -> Result<(SpinorField, GapUpdate)> {
    let update = pairing_update(field, p)?;
    p.gap = update.gap.clone();
    let next = step_superfluid(field, &p.gap, p.tau)?;
    Ok((next, update))
}

/// `m = |Δ| / c^2`.
pub fn effective_mass(delta: Complex64, grid: &GridUnits) -> f64 {
    delta.norm() / grid.c().powi(2)
}

fn check_gap_tau(delta: Complex64, tau: f64) -> Result<f64> {
    let g = delta.norm() * tau;
    if g.is_nan() || g > 1.0 {
        return Err(Error::GapOverflow {
            site: None,
            value: g,
        });
    }
    Ok(g)
}

fn stream_matrix(k_ell: [f64; 3]) -> Result<(SquareMatrix, f64, [f64; 3])> {
    if k_ell.iter().any(|x| !x.is_finite()) {
        return Err(Error::Invalid(
            "wave vector has non-finite components".into(),
        ));
    }
    let k = k_ell.iter().map(|x| x * x).sum::<f64>().sqrt();
    let khat = if k == 0.0 {
        [0.0, 0.0, 1.0]
    } else {
        k_ell.map(|x| x / k)
    };
    let one = SquareMatrix::identity(4);
    let s = &one.scale_real(k.cos()) + &dirac().alpha_dot(khat).scale(I * k.sin());
    Ok((s, k, khat))
}

/// Collapsed momentum-space step for a uniform gap,
/// `sqrt(1 - |Δ|^2 tau^2) e^{i alpha·k ell} - i tau M(Δ) ⊗ 1`.
pub fn superfluid_step_matrix(k_ell: [f64; 3], delta: Complex64, tau: f64) -> Result<SquareMatrix> {
    let g = check_gap_tau(delta, tau)?;
    let (s, _, _) = stream_matrix(k_ell)?;
    Ok(&s.scale_real((1.0 - g * g).sqrt()) + &gap_matrix(delta).scale(c64(0.0, -tau)))
}

/// Hamiltonian form `± sqrt(1 - (E tau)^2) - i tau h_NL` with
/// `tau h_NL = -sqrt(1 - |Δ|^2 tau^2) sin(k ell) alpha·k̂ + tau M(Δ) ⊗ 1`
/// and `E^2 = p_eff^2 + |Δ|^2`. The sign of the scalar root follows
/// `cos(k ell)`, the phase choice that makes this equal to the collapsed step.
pub fn superfluid_hamiltonian_form(
    k_ell: [f64; 3],
    delta: Complex64,
    tau: f64,
) -> Result<SquareMatrix> {
    let g = check_gap_tau(delta, tau)?;
    let (_, k, khat) = stream_matrix(k_ell)?;
    let c = (1.0 - g * g).sqrt();
    let p_eff = c * k.sin().abs();
    let e_tau = p_eff.hypot(g);
    let root = (1.0 - e_tau * e_tau).max(0.0).sqrt() * if k.cos() < 0.0 { -1.0 } else { 1.0 };
    let tau_h =
        &dirac().alpha_dot(khat).scale_real(-c * k.sin()) + &gap_matrix(delta).scale_real(tau);
    Ok(&SquareMatrix::identity(4).scale_real(root) + &tau_h.scale(c64(0.0, -1.0)))
}

/// Momentum-space form of the collide-then-stream split, `e^{i alpha·k ell} C`.
pub fn superfluid_split_matrix(
    k_ell: [f64; 3],
    delta: Complex64,
    tau: f64,
) -> Result<SquareMatrix> {
    let g = check_gap_tau(delta, tau)?;
    let (s, _, _) = stream_matrix(k_ell)?;
    let collide = &SquareMatrix::identity(4).scale_real((1.0 - g * g).sqrt())
        + &gap_matrix(delta).scale(c64(0.0, -tau));
    Ok(&s * &collide)
}

/// Sum over sites of the partially contracted NJL interaction, with
/// `<·>` the lattice mean.
pub fn partially_contracted_njl(field: &SpinorField, lambda: f64) -> f64 {
    let n = field.sites() as f64;
    let mean = |f: &dyn Fn(&Spinor) -> Complex64| {
        let v: Vec<Complex64> = field.spinors().iter().map(f).collect();
        pairwise_sum(&v) / n
    };
    let lr_up = mean(&|s| s[L_UP].conj() * s[R_UP]);
    let lr_dn = mean(&|s| s[L_DN].conj() * s[R_DN]);
    let rl_up = mean(&|s| s[R_UP].conj() * s[L_UP]);
    let rl_dn = mean(&|s| s[R_DN].conj() * s[L_DN]);
    let terms: Vec<f64> = field
        .spinors()
        .iter()
        .map(|s| {
            let t = s[L_UP].conj() * s[R_UP] * rl_up
                + lr_up * s[R_DN].conj() * s[L_DN]
                + lr_dn * s[R_UP].conj() * s[L_UP]
                + s[L_DN].conj() * s[R_DN] * rl_dn;
            lambda * t.re
        })
        .collect();
    pairwise_sum(&terms)
}

/// Lattice sum of [`nl_interaction_density`] for a uniform gap.
pub fn total_interaction(field: &SpinorField, delta: Complex64) -> f64 {
    let terms: Vec<f64> = field
        .spinors()
        .iter()
        .map(|s| nl_interaction_density(s, delta))
        .collect();
    pairwise_sum(&terms)
}
