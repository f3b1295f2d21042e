//! Periodic 1D lattice of four-component spinors.

use std::ops::Add;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::sampling::random_spinor;
use crate::{c64, Spinor, ZERO};

pub const L_UP: usize = 0;
pub const L_DN: usize = 1;
pub const R_UP: usize = 2;
pub const R_DN: usize = 3;

/// Component labels in storage order.
pub const COMPONENT_NAMES: [&str; 4] = ["L_up", "L_dn", "R_up", "R_dn"];

const PAIRWISE_LEAF: usize = 16;
const PAIRWISE_PAR: usize = 1 << 14;

/// Sum with a fixed binary tree over the index range.
///
/// The split points depend only on the length, so the result is the same
/// whether the halves run on one thread or many.
pub fn pairwise_sum<T>(values: &[T]) -> T
where
    T: Copy + Default + Add<Output = T> + Send + Sync,
{
    if values.len() <= PAIRWISE_LEAF {
        return values.iter().fold(T::default(), |acc, &v| acc + v);
    }
    let (lo, hi) = values.split_at(values.len() / 2);
    if values.len() >= PAIRWISE_PAR {
        let (a, b) = rayon::join(|| pairwise_sum(lo), || pairwise_sum(hi));
        a + b
    } else {
        pairwise_sum(lo) + pairwise_sum(hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    amps: Vec<Spinor>,
}

impl SpinorField {
    pub fn zeros(sites: usize) -> Self {
        assert!(sites > 0, "lattice needs at least one site");
        Self {
            amps: vec![[ZERO; 4]; sites],
        }
    }

    pub fn from_spinors(amps: Vec<Spinor>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::Invalid("lattice needs at least one site".into()));
        }
        Ok(Self { amps })
    }

    /// Every site holds the same spinor scaled by `1/sqrt(sites)`.
    pub fn uniform(sites: usize, spinor: Spinor) -> Self {
        let s = 1.0 / (sites as f64).sqrt();
        Self {
            amps: vec![spinor.map(|z| z * s); sites],
        }
    }

    pub fn random(sites: usize, rng: &mut impl Rng) -> Self {
        let mut f = Self {
            amps: (0..sites).map(|_| random_spinor(rng)).collect(),
        };
        f.normalize();
        f
    }

    /// Gaussian envelope centred at `center` with carrier wavenumber `k_ell`.
    pub fn gaussian_packet(
        sites: usize,
        center: f64,
        width: f64,
        k_ell: f64,
        spinor: Spinor,
    ) -> Self {
        let n = sites as f64;
        let amps = (0..sites)
            .map(|x| {
                // minimum-image distance on the ring
                let mut d = x as f64 - center;
                d -= n * (d / n).round();
                let env = (-0.25 * (d / width).powi(2)).exp();
                let w = Complex64::from_polar(env, k_ell * x as f64);
                spinor.map(|z| z * w)
            })
            .collect();
        let mut f = Self { amps };
        f.normalize();
        f
    }

    #[inline]
    pub fn sites(&self) -> usize {
        self.amps.len()
    }

    pub fn spinors(&self) -> &[Spinor] {
        &self.amps
    }

    pub fn spinors_mut(&mut self) -> &mut [Spinor] {
        &mut self.amps
    }

    pub fn into_spinors(self) -> Vec<Spinor> {
        self.amps
    }

    pub fn site(&self, x: usize) -> &Spinor {
        &self.amps[x]
    }

    pub fn density(&self) -> Vec<f64> {
        self.amps
            .iter()
            .map(|s| s.iter().map(|z| z.norm_sqr()).sum())
            .collect()
    }

    /// Global norm `sum_x sum_s |psi_s(x)|^2`, summed pairwise.
    pub fn norm_sqr(&self) -> f64 {
        pairwise_sum(&self.density())
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            for s in &mut self.amps {
                for z in s.iter_mut() {
                    *z /= n;
                }
            }
        }
    }

    /// `<self|other>` summed pairwise.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same_size(other)?;
        let terms: Vec<Complex64> = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum())
            .collect();
        Ok(pairwise_sum(&terms))
    }

    /// Largest per-component deviation from another field.
    pub fn max_distance(&self, other: &Self) -> Result<f64> {
        self.check_same_size(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            amps: self.amps.iter().map(|s| s.map(|z| z * factor)).collect(),
        }
    }

    fn check_same_size(&self, other: &Self) -> Result<()> {
        if self.sites() != other.sites() {
            return Err(Error::Dimension {
                expected: self.sites(),
                actual: other.sites(),
            });
        }
        Ok(())
    }
}

/// Plane wave `spinor * e^{i k x} / sqrt(N)` with `k = 2 pi k_index / N`.
pub fn plane_wave_field(sites: usize, k_index: usize, spinor: Spinor) -> Result<SpinorField> {
    if sites == 0 {
        return Err(Error::Invalid("lattice needs at least one site".into()));
    }
    if k_index >= sites {
        return Err(Error::Invalid(format!(
            "k_index {k_index} outside [0, {sites})"
        )));
    }
    let norm = spinor.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Invalid(format!(
            "spinor norm^2 = {norm}, expected 1"
        )));
    }
    let scale = 1.0 / (sites as f64).sqrt();
    let amps = (0..sites)
        .map(|x| {
            // reduce k x mod N in integers so the phase stays exact for large x
            let phase_index = (k_index * x) % sites;
            let phase = 2.0 * std::f64::consts::PI * phase_index as f64 / sites as f64;
            let w = Complex64::from_polar(scale, phase);
            spinor.map(|z| z * w)
        })
        .collect();
    Ok(SpinorField { amps })
}

/// `k ell` for lattice mode `k_index`, folded into `(-pi, pi]`.
pub fn lattice_wavenumber(sites: usize, k_index: usize) -> f64 {
    let j = k_index as i64 % sites as i64;
    let half = sites as i64 / 2;
    let folded = if j > half { j - sites as i64 } else { j };
    2.0 * std::f64::consts::PI * folded as f64 / sites as f64
}

#[cfg(test)]
pub(crate) fn spinor_from_slice(v: &[Complex64]) -> Spinor {
    [v[0], v[1], v[2], v[3]]
}

pub fn unit_spinor(component: usize) -> Spinor {
    let mut s = [ZERO; 4];
    s[component] = c64(1.0, 0.0);
    s
}
