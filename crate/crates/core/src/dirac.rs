//! Free Dirac particles as a quantum lattice gas.
//!
//! One grid step is the product of a stream `e^{i alpha·p ell}` and a
//! chirality-breaking mass rotation. Because `beta` anticommutes with
//! `alpha`, the product collapses to
//!
//! ```text
//! psi(t + tau, x) = sqrt(1 - (m tau)^2) (S psi)(x) - i m tau beta psi(t, x)
//! ```
//!
//! with `S` the one-site chiral shift. Position-space stepping is 1+1D with
//! `alpha_3 = sigma_z ⊗ sigma_z` as the stream generator, which is diagonal
//! in the chiral basis: components 0 and 3 (`alpha_3 = +1`) move towards
//! lower `x`, components 1 and 2 towards higher `x`. Boundaries are periodic.
//!
//! Momentum-space matrices accept full 3-vectors.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::algebra::{
    closed_form_exp_with, gate_angle, DiracMatrices, GridUnits, NumberOperatorKind,
};
use crate::eigen::normal_eigenpairs;
use crate::error::{check_unit_interval, Error, Result};
use crate::field::{SpinorField, L_DN, L_UP, R_DN, R_UP};
use crate::matrix::SquareMatrix;
use crate::{c64, Spinor, I};

/// `alpha_3` eigenvalue of each spinor component in the chiral basis.
pub const STREAM_DIRECTION: [i8; 4] = [1, -1, -1, 1];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracParams {
    pub m_tau: f64,
    pub grid: GridUnits,
}

impl DiracParams {
    pub fn new(m_tau: f64) -> Result<Self> {
        check_unit_interval("m_tau", m_tau)?;
        Ok(Self {
            m_tau,
            grid: GridUnits::natural(),
        })
    }

    /// `(sqrt(1 - m^2 tau^2), m tau)`: cosine and sine of the mass gate angle.
    pub fn gate(&self) -> (f64, f64) {
        ((1.0 - self.m_tau * self.m_tau).sqrt(), self.m_tau)
    }
}

#[inline]
fn neighbours(x: usize, n: usize) -> (usize, usize) {
    ((x + 1) % n, (x + n - 1) % n)
}

#[inline]
fn streamed_site(src: &[Spinor], x: usize) -> Spinor {
    let (up, down) = neighbours(x, src.len());
    [
        src[up][L_UP],
        src[down][L_DN],
        src[down][R_UP],
        src[up][R_DN],
    ]
}

/// `beta psi` with `beta = sigma_x ⊗ 1`: swaps the chiral halves.
#[inline]
pub(crate) fn apply_beta(s: &Spinor) -> Spinor {
    [s[R_UP], s[R_DN], s[L_UP], s[L_DN]]
}

/// One-site chiral shift `e^{i alpha_3 p ell}`.
pub fn stream_1d(field: &SpinorField) -> SpinorField {
    let src = field.spinors();
    let out: Vec<Spinor> = (0..src.len())
        .into_par_iter()
        .map(|x| streamed_site(src, x))
        .collect();
    SpinorField::from_spinors(out).expect("non-empty lattice")
}

/// Exact grid step for uniform mass.
pub fn step_dirac(field: &SpinorField, params: &DiracParams) -> Result<SpinorField> {
    check_unit_interval("m_tau", params.m_tau)?;
    let (c, s) = params.gate();
    let mass = c64(0.0, -s);
    let src = field.spinors();
    let out: Vec<Spinor> = (0..src.len())
        .into_par_iter()
        .map(|x| {
            let streamed = streamed_site(src, x);
            let flipped = apply_beta(&src[x]);
            std::array::from_fn(|i| streamed[i] * c + flipped[i] * mass)
        })
        .collect();
    SpinorField::from_spinors(out)
}

/// Collide-then-stream step `S C(x)` for a site-dependent mass, with
/// `C(x) = sqrt(1 - m(x)^2 tau^2) - i m(x) tau beta`.
///
/// Exactly unitary, but for uniform mass it is not the same operator as
/// [`step_dirac`]: the mass term is streamed as well.
pub fn step_dirac_variable_mass(field: &SpinorField, m_tau: &[f64]) -> Result<SpinorField> {
    if m_tau.len() != field.sites() {
        return Err(Error::Dimension {
            expected: field.sites(),
            actual: m_tau.len(),
        });
    }
    for &m in m_tau {
        check_unit_interval("m_tau", m)?;
    }
    let collided: Vec<Spinor> = field
        .spinors()
        .par_iter()
        .zip(m_tau.par_iter())
        .map(|(s, &m)| {
            let c = (1.0 - m * m).sqrt();
            let flipped = apply_beta(s);
            std::array::from_fn(|i| s[i] * c + flipped[i] * c64(0.0, -m))
        })
        .collect();
    Ok(stream_1d(&SpinorField::from_spinors(collided)?))
}

fn split_wavevector(k: [f64; 3]) -> Result<(f64, [f64; 3])> {
    if k.iter().any(|x| !x.is_finite()) {
        return Err(Error::Invalid(
            "wave vector has non-finite components".into(),
        ));
    }
    let len = k.iter().map(|x| x * x).sum::<f64>().sqrt();
    if len == 0.0 {
        return Ok((0.0, [0.0, 0.0, 1.0]));
    }
    Ok((len, k.map(|x| x / len)))
}

/// Momentum-space step `U(k) = sqrt(1 - m^2 tau^2) e^{i alpha·k ell} - i m tau beta`.
pub fn dirac_step_matrix(k_ell: [f64; 3], m_tau: f64) -> Result<SquareMatrix> {
    check_unit_interval("m_tau", m_tau)?;
    let d = DiracMatrices::chiral();
    let (k, khat) = split_wavevector(k_ell)?;
    let c = (1.0 - m_tau * m_tau).sqrt();
    let one = SquareMatrix::identity(4);
    let stream = &one.scale_real(k.cos()) + &d.alpha_dot(khat).scale(I * k.sin());
    Ok(&stream.scale_real(c) + &d.beta.scale(c64(0.0, -m_tau)))
}

/// [`dirac_step_matrix`] along the streaming axis.
pub fn dirac_step_matrix_1d(k_ell: f64, m_tau: f64) -> Result<SquareMatrix> {
    dirac_step_matrix([0.0, 0.0, k_ell], m_tau)
}

/// The unsimplified product `e^{i p ell N_0} e^{-i theta N'}` with
/// `N_0 = alpha·p̂` and `N' = beta e^{i alpha·p ell}`, each factor built by
/// [`closed_form_exp_with`] as an involution.
pub fn dirac_product_form(k_ell: [f64; 3], m_tau: f64) -> Result<SquareMatrix> {
    check_unit_interval("m_tau", m_tau)?;
    let d = DiracMatrices::chiral();
    let (k, khat) = split_wavevector(k_ell)?;
    let n_stream = d.alpha_dot(khat);
    let stream = closed_form_exp_with(&n_stream, NumberOperatorKind::InvolutionRegular, -k)?;
    let n_mass = &d.beta * &stream;
    let mass = closed_form_exp_with(
        &n_mass,
        NumberOperatorKind::InvolutionRegular,
        gate_angle(m_tau)?,
    )?;
    Ok(&stream * &mass)
}

/// Hermitian generator of one lattice step at wavevector `k`.
#[derive(Debug, Clone)]
pub struct StepGenerator {
    /// `tau h = -sqrt(1 - m^2 tau^2) sin(k ell) alpha·k̂ + m tau beta`
    pub tau_h: SquareMatrix,
    /// `E tau = sqrt(p_eff^2 + m^2 tau^2)`
    pub energy_tau: f64,
    /// Scalar part of the step, `sqrt(1 - m^2 tau^2) cos(k ell)`.
    pub scalar: f64,
}

impl StepGenerator {
    /// Rotation angle `phi` with `U = exp(-i phi tau h / (E tau))`.
    ///
    /// Equals `arccos sqrt(1 - (E tau)^2)` while `cos(k ell) >= 0`; beyond
    /// `|k ell| = pi/2` the scalar part turns negative and the angle is
    /// taken on the other side of `pi/2`.
    pub fn angle(&self) -> f64 {
        self.energy_tau.atan2(self.scalar)
    }

    /// `exp(-i steps phi h / E)` evaluated by the series oracle.
    pub fn evolution_oracle(&self, steps: f64) -> Result<SquareMatrix> {
        if self.energy_tau == 0.0 {
            let phase = Complex64::from_polar(1.0, 0.0) * self.scalar.signum();
            return Ok(SquareMatrix::identity(4).scale(phase.powf(steps)));
        }
        let exponent = self
            .tau_h
            .times_minus_i(steps * self.angle() / self.energy_tau);
        crate::algebra::expm_oracle(&exponent)
    }
}

pub fn dirac_generator(k_ell: [f64; 3], m_tau: f64) -> Result<StepGenerator> {
    check_unit_interval("m_tau", m_tau)?;
    let d = DiracMatrices::chiral();
    let (k, khat) = split_wavevector(k_ell)?;
    let c = (1.0 - m_tau * m_tau).sqrt();
    let tau_h = &d.alpha_dot(khat).scale_real(-c * k.sin()) + &d.beta.scale_real(m_tau);
    let p_eff = c * k.sin().abs();
    Ok(StepGenerator {
        tau_h,
        energy_tau: p_eff.hypot(m_tau),
        scalar: c * k.cos(),
    })
}

/// `p_eff ell = sqrt(1 - m^2 tau^2) |sin k ell|`.
pub fn effective_momentum(k_ell: f64, m_tau: f64) -> f64 {
    (1.0 - m_tau * m_tau).sqrt() * k_ell.sin().abs()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionRecord {
    pub k_ell: f64,
    /// `omega tau = -arg(lambda)` for each eigenvalue, ascending.
    pub omega_tau: Vec<f64>,
    pub p_eff_ell: f64,
    /// Max over branches of `|cos(omega tau) - sqrt(1 - m^2 tau^2) cos(k ell)|`.
    pub cos_residual: f64,
    /// Max over branches of `||sin(omega tau)| - sqrt(p_eff^2 + m^2 tau^2)|`.
    pub sin_residual: f64,
}

impl DispersionRecord {
    pub fn residual(&self) -> f64 {
        self.cos_residual.max(self.sin_residual)
    }

    /// Max over branches of `||omega tau| - sqrt((k ell)^2 + (m tau)^2)|`.
    pub fn continuum_deviation(&self, m_tau: f64) -> f64 {
        let target = self.k_ell.hypot(m_tau);
        self.omega_tau
            .iter()
            .map(|w| (w.abs() - target).abs())
            .fold(0.0, f64::max)
    }
}

/// Eigenphases of a 4x4 unitary step matrix, with the lattice dispersion
/// residuals for a gap `m_tau` (mass, or `|Delta| tau` for the superfluid).
pub fn dispersion_of_matrix(u: &SquareMatrix, k_ell: f64, m_tau: f64) -> Result<DispersionRecord> {
    let pairs = normal_eigenpairs(u, 1e-10)?;
    let mut omega: Vec<f64> = pairs.iter().map(|p| -p.value.arg()).collect();
    omega.sort_by(f64::total_cmp);
    let c = (1.0 - m_tau * m_tau).sqrt();
    let p_eff = effective_momentum(k_ell, m_tau);
    let sin_target = p_eff.hypot(m_tau);
    let cos_target = c * k_ell.cos();
    let cos_residual = omega
        .iter()
        .map(|w| (w.cos() - cos_target).abs())
        .fold(0.0, f64::max);
    let sin_residual = omega
        .iter()
        .map(|w| (w.sin().abs() - sin_target).abs())
        .fold(0.0, f64::max);
    Ok(DispersionRecord {
        k_ell,
        omega_tau: omega,
        p_eff_ell: p_eff,
        cos_residual,
        sin_residual,
    })
}

/// Eigen-decomposes `U(k)` for every wavenumber; failures are reported per
/// entry and do not stop the sweep.
pub fn measure_dispersion(m_tau: f64, k_grid: &[f64]) -> Result<Vec<Result<DispersionRecord>>> {
    check_unit_interval("m_tau", m_tau)?;
    Ok(k_grid
        .par_iter()
        .map(|&k| {
            if !(k.is_finite() && k > -std::f64::consts::PI && k <= std::f64::consts::PI) {
                return Err(Error::Domain {
                    name: "k_ell",
                    value: k,
                    domain: "(-pi, pi]",
                });
            }
            dispersion_of_matrix(&dirac_step_matrix_1d(k, m_tau)?, k, m_tau)
        })
        .collect())
}

/// `-Im <psi|U psi>`: expectation of `tau h` for a step `U = c - i tau h`
/// with real scalar `c`.
pub fn step_energy(before: &SpinorField, after: &SpinorField) -> Result<f64> {
    Ok(-before.inner(after)?.im)
}
