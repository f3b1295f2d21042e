//! Seeded random draws for property sweeps.
//!
//! All randomness goes through ChaCha8, a counter-based generator with
//! independent streams, so sweeps reproduce bit-for-bit across platforms.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::NumberOperatorKind;
use crate::matrix::SquareMatrix;
use crate::{c64, Spinor, ZERO};

pub type QlgRng = ChaCha8Rng;

/// Name recorded in run metadata.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.9)";

pub fn rng_from_seed(seed: u64) -> QlgRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn rng_stream(seed: u64, stream: u64) -> QlgRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian_complex(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im)
}

/// Uniformly distributed unit spinor.
pub fn random_spinor(rng: &mut impl Rng) -> Spinor {
    let mut s = [ZERO; 4];
    for z in &mut s {
        *z = gaussian_complex(rng);
    }
    let norm = s.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    s.map(|z| z / norm)
}

/// Random unitary from Gram–Schmidt on a complex Gaussian matrix.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> SquareMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
        // two passes of modified Gram–Schmidt keep columns orthogonal to ~1e-16
        for _ in 0..2 {
            for u in &cols {
                let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= proj * y;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= norm);
        cols.push(v);
    }
    SquareMatrix::from_fn(dim, |r, c| cols[c][r])
}

/// Spectrum for a generator of the requested regular class, guaranteed not
/// to fall into a higher-precedence class.
pub fn class_spectrum(kind: NumberOperatorKind, dim: usize, rng: &mut impl Rng) -> Vec<f64> {
    use NumberOperatorKind::*;
    assert!(dim >= 2, "need at least two levels");
    let mut d: Vec<f64> = match kind {
        InvolutionRegular => (0..dim)
            .map(|_| if rng.random() { 1.0 } else { -1.0 })
            .collect(),
        IdempotentRegular => (0..dim)
            .map(|_| if rng.random() { 1.0 } else { 0.0 })
            .collect(),
        TriIdempotentRegular => (0..dim)
            .map(|_| [-1.0, 0.0, 1.0][rng.random_range(0..3)])
            .collect(),
        other => panic!("no sampler for {other:?}"),
    };
    match kind {
        IdempotentRegular => {
            // all ones would be the identity, an involution
            if d.iter().all(|&x| x == 1.0) {
                let i = rng.random_range(0..dim);
                d[i] = 0.0;
            }
        }
        TriIdempotentRegular => {
            // {-1, 0} alone is skew-idempotent, {-1, 1} an involution, {0, 1} idempotent
            assert!(dim >= 3, "a regular tri-idempotent needs three levels");
            let mut slots: Vec<usize> = (0..dim).collect();
            for (t, value) in [-1.0, 0.0, 1.0].into_iter().enumerate() {
                let pick = rng.random_range(t..dim);
                slots.swap(t, pick);
                d[slots[t]] = value;
            }
        }
        _ => {}
    }
    d
}

/// Random hermitian generator `V D V^dagger` of the requested regular class.
pub fn random_classified(kind: NumberOperatorKind, dim: usize, rng: &mut impl Rng) -> SquareMatrix {
    let d = class_spectrum(kind, dim, rng);
    let v = random_unitary(dim, rng);
    &(&v * &SquareMatrix::from_real_diagonal(&d)) * &v.adjoint()
}

/// Random hermitian matrix with Gaussian entries.
pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> SquareMatrix {
    let g = SquareMatrix::from_fn(dim, |_, _| gaussian_complex(rng));
    (&g + &g.adjoint()).scale_real(0.5)
}
