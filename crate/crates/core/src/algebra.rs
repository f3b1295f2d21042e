//! Number-operator algebra and the closed-form unitaries built on it.
//!
//! A hermitian generator `N` whose powers fold back onto lower powers
//! (`N^2 = 1`, `N^2 = N` or `N^3 = N`) has an exponential that is a finite
//! polynomial in `N`. [`closed_form_exp`] evaluates that polynomial directly;
//! [`expm_oracle`] is an independent series evaluation used to check it.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{check_unit_interval, Error, Result};
use crate::matrix::SquareMatrix;
use crate::{c64, I, ONE, ZERO};

/// Tolerance for classification and hermiticity/unitarity checks.
pub const TOL_ALG: f64 = 1e-10;

/// Tolerance for closed-form versus oracle comparisons.
pub const TOL_EXACT: f64 = 1e-12;

const EXPM_ORDER: u32 = 18;
const EXPM_SCALED_NORM: f64 = 0.5;

// ---------------------------------------------------------------------------
// Pauli and Dirac matrices

pub fn identity2() -> SquareMatrix {
    SquareMatrix::identity(2)
}

pub fn sigma_x() -> SquareMatrix {
    SquareMatrix::from_fn(2, |r, c| if r != c { ONE } else { ZERO })
}

pub fn sigma_y() -> SquareMatrix {
    SquareMatrix::from_fn(2, |r, c| match (r, c) {
        (0, 1) => -I,
        (1, 0) => I,
        _ => ZERO,
    })
}

pub fn sigma_z() -> SquareMatrix {
    SquareMatrix::from_real_diagonal(&[1.0, -1.0])
}

pub fn pauli() -> [SquareMatrix; 3] {
    [sigma_x(), sigma_y(), sigma_z()]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Representation {
    /// `gamma^0 = sigma_x ⊗ 1`, `gamma^i = i sigma_y ⊗ sigma_i`, spinor
    /// ordered `(L up, L down, R up, R down)`.
    #[default]
    Chiral,
}

impl FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "chiral" | "weyl" => Ok(Representation::Chiral),
            other => Err(Error::UnknownRepresentation(other.to_string())),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DiracMatrices {
    pub sigma: [SquareMatrix; 3],
    pub alpha: [SquareMatrix; 3],
    pub beta: SquareMatrix,
    pub gamma: [SquareMatrix; 4],
    pub gamma5: SquareMatrix,
}

impl DiracMatrices {
    pub fn new(representation: Representation) -> Self {
        match representation {
            Representation::Chiral => Self::chiral(),
        }
    }

    pub fn chiral() -> Self {
        let sigma = pauli();
        let one = identity2();
        let g0 = sigma_x().kron(&one);
        let isy = sigma_y().scale(I);
        let gamma = [
            g0.clone(),
            isy.kron(&sigma[0]),
            isy.kron(&sigma[1]),
            isy.kron(&sigma[2]),
        ];
        let sz = sigma_z();
        let alpha = [sz.kron(&sigma[0]), sz.kron(&sigma[1]), sz.kron(&sigma[2])];
        let gamma5 = (&(&(&gamma[0] * &gamma[1]) * &gamma[2]) * &gamma[3]).scale(I);
        Self {
            sigma,
            alpha,
            beta: g0,
            gamma,
            gamma5,
        }
    }

    /// `alpha · n` for an arbitrary 3-vector `n`.
    pub fn alpha_dot(&self, n: [f64; 3]) -> SquareMatrix {
        let mut out = SquareMatrix::zeros(4);
        for (a, &x) in self.alpha.iter().zip(&n) {
            out += &a.scale_real(x);
        }
        out
    }
}

pub fn dirac_matrices(tag: &str) -> Result<DiracMatrices> {
    Ok(DiracMatrices::new(tag.parse()?))
}

// ---------------------------------------------------------------------------
// Classification

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NumberOperatorKind {
    InvolutionRegular,
    InvolutionSkew,
    IdempotentRegular,
    IdempotentSkew,
    TriIdempotentRegular,
    TriIdempotentSkew,
    Unclassified,
}

impl NumberOperatorKind {
    pub fn is_regular(self) -> bool {
        matches!(
            self,
            Self::InvolutionRegular | Self::IdempotentRegular | Self::TriIdempotentRegular
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::InvolutionRegular => "involution",
            Self::InvolutionSkew => "skew-involution",
            Self::IdempotentRegular => "idempotent",
            Self::IdempotentSkew => "skew-idempotent",
            Self::TriIdempotentRegular => "tri-idempotent",
            Self::TriIdempotentSkew => "skew-tri-idempotent",
            Self::Unclassified => "unclassified",
        }
    }
}

impl fmt::Display for NumberOperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Max-norm deviation of every identity the classifier tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassResiduals {
    pub hermiticity: f64,
    /// `N^2 - 1`
    pub involution_regular: f64,
    /// `N^2 + 1`
    pub involution_skew: f64,
    /// `N^2 - N`
    pub idempotent_regular: f64,
    /// `N^2 + N`
    pub idempotent_skew: f64,
    /// `N^3 - N`
    pub tri_idempotent_regular: f64,
    /// `N^3 + N`
    pub tri_idempotent_skew: f64,
}

impl ClassResiduals {
    pub fn iter(&self) -> impl Iterator<Item = (&'static str, f64)> {
        [
            ("hermiticity", self.hermiticity),
            ("N^2-1", self.involution_regular),
            ("N^2+1", self.involution_skew),
            ("N^2-N", self.idempotent_regular),
            ("N^2+N", self.idempotent_skew),
            ("N^3-N", self.tri_idempotent_regular),
            ("N^3+N", self.tri_idempotent_skew),
        ]
        .into_iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumberOperatorClass {
    pub kind: NumberOperatorKind,
    pub residuals: ClassResiduals,
}

/// Sorts a candidate generator into the involution / idempotent /
/// tri-idempotent taxonomy.
///
/// Precedence is involution, then idempotent, then tri-idempotent, regular
/// before skew, so the identity matrix reports as an involution. Inputs that
/// are not hermitian within `tol` are `Unclassified`; their residuals are
/// still filled in.
pub fn classify_number_operator(n: &SquareMatrix, tol: f64) -> NumberOperatorClass {
    use NumberOperatorKind::*;

    let one = SquareMatrix::identity(n.dim());
    let n2 = n * n;
    let n3 = &n2 * n;
    let neg_n = -n;
    let residuals = ClassResiduals {
        hermiticity: n.hermiticity_residual(),
        involution_regular: n2.distance(&one),
        involution_skew: n2.distance(&-&one),
        idempotent_regular: n2.distance(n),
        idempotent_skew: n2.distance(&neg_n),
        tri_idempotent_regular: n3.distance(n),
        tri_idempotent_skew: n3.distance(&neg_n),
    };

    let kind = if !n.is_finite() || residuals.hermiticity > tol {
        Unclassified
    } else {
        [
            (residuals.involution_regular, InvolutionRegular),
            (residuals.involution_skew, InvolutionSkew),
            (residuals.idempotent_regular, IdempotentRegular),
            (residuals.idempotent_skew, IdempotentSkew),
            (residuals.tri_idempotent_regular, TriIdempotentRegular),
            (residuals.tri_idempotent_skew, TriIdempotentSkew),
        ]
        .into_iter()
        .find(|(r, _)| *r <= tol)
        .map_or(Unclassified, |(_, k)| k)
    };

    NumberOperatorClass { kind, residuals }
}

// ---------------------------------------------------------------------------
// Closed-form unitaries

/// `sqrt(1 - x^2) - 1`.
pub fn epsilon(x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() > 1.0 {
        return Err(Error::Domain {
            name: "E tau / hbar",
            value: x,
            domain: "[-1, 1]",
        });
    }
    Ok((1.0 - x * x).sqrt() - 1.0)
}

/// Gate angle `arccos sqrt(1 - x^2)` for `x = E tau / hbar` in `[0, 1]`.
pub fn gate_angle(x: f64) -> Result<f64> {
    check_unit_interval("E tau / hbar", x)?;
    Ok(x.atan2((1.0 - x * x).sqrt()))
}

/// `exp(-i theta N)` for a regular involution, idempotent or tri-idempotent `N`.
pub fn closed_form_exp(n: &SquareMatrix, theta: f64) -> Result<SquareMatrix> {
    let class = classify_number_operator(n, TOL_ALG);
    closed_form_exp_with(n, class.kind, theta)
}

/// As [`closed_form_exp`] with the class supplied by the caller.
pub fn closed_form_exp_with(
    n: &SquareMatrix,
    kind: NumberOperatorKind,
    theta: f64,
) -> Result<SquareMatrix> {
    use NumberOperatorKind::*;

    let dim = n.dim();
    let (c, s) = (theta.cos(), theta.sin());
    let one = SquareMatrix::identity(dim);
    let minus_i_sin_n = n.scale(c64(0.0, -s));
    let out = match kind {
        InvolutionRegular => &one.scale_real(c) + &minus_i_sin_n,
        IdempotentRegular => &(&one + &n.scale_real(c - 1.0)) + &minus_i_sin_n,
        TriIdempotentRegular => &(&one + &(n * n).scale_real(c - 1.0)) + &minus_i_sin_n,
        other => return Err(Error::NotClosedForm(other)),
    };
    Ok(out)
}

/// Grid-level building block `U = 1 + eps(x) P(N) - i x N` with `P(N)` equal to
/// `1`, `N` or `N^2` for the involution, idempotent and tri-idempotent class.
///
/// This is the same operator as `closed_form_exp(N, gate_angle(x))`, written
/// so that the first-order term is `-i tau H / hbar` with `H = E N`.
pub fn grid_unitary(n: &SquareMatrix, x: f64) -> Result<SquareMatrix> {
    use NumberOperatorKind::*;

    check_unit_interval("E tau / hbar", x)?;
    let eps = epsilon(x)?;
    let one = SquareMatrix::identity(n.dim());
    let kind = classify_number_operator(n, TOL_ALG).kind;
    let folded = match kind {
        InvolutionRegular => one.clone(),
        IdempotentRegular => n.clone(),
        TriIdempotentRegular => n * n,
        other => return Err(Error::NotClosedForm(other)),
    };
    Ok(&(&one + &folded.scale_real(eps)) + &n.scale(c64(0.0, -x)))
}

// ---------------------------------------------------------------------------
// Oracles

/// Matrix exponential `e^M` by scaling and squaring with a fixed order-18
/// Taylor polynomial. The scaled matrix has 1-norm at most 0.5.
pub fn expm_oracle(m: &SquareMatrix) -> Result<SquareMatrix> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let norm = m.one_norm();
    let mut squarings = 0u32;
    while norm / f64::from(1u32 << squarings.min(31)) > EXPM_SCALED_NORM {
        squarings += 1;
    }
    let scaled = if squarings > 0 {
        m.scale_real(0.5f64.powi(squarings as i32))
    } else {
        m.clone()
    };

    // Horner: I + A(I + A/2(I + A/3(...)))
    let one = SquareMatrix::identity(m.dim());
    let mut acc = one.clone();
    for k in (1..=EXPM_ORDER).rev() {
        acc = &one + &(&scaled * &acc).scale_real(1.0 / f64::from(k));
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    Ok(acc)
}

/// Lie–Trotter product `(e^{-i t h0 / n} e^{-i t h1 / n})^n`.
pub fn trotter_product(
    h0: &SquareMatrix,
    h1: &SquareMatrix,
    t: f64,
    n: u32,
) -> Result<SquareMatrix> {
    if n == 0 {
        return Err(Error::Invalid(
            "Trotter slice count must be positive".into(),
        ));
    }
    if h0.dim() != h1.dim() {
        return Err(Error::Dimension {
            expected: h0.dim(),
            actual: h1.dim(),
        });
    }
    let dt = t / f64::from(n);
    let slice = &expm_oracle(&h0.times_minus_i(dt))? * &expm_oracle(&h1.times_minus_i(dt))?;
    Ok(slice.powi(n))
}

// ---------------------------------------------------------------------------
// Units

/// Grid length, grid time and action scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridUnits {
    pub ell: f64,
    pub tau: f64,
    pub hbar: f64,
    pub m0: Option<f64>,
}

impl Default for GridUnits {
    fn default() -> Self {
        Self::natural()
    }
}

impl GridUnits {
    /// `hbar = 1`, `c = ell / tau = 1`.
    pub fn natural() -> Self {
        Self {
            ell: 1.0,
            tau: 1.0,
            hbar: 1.0,
            m0: None,
        }
    }

    /// Derives `hbar = m0 ell^2 / (2 pi tau)` from a mass unit.
    pub fn with_mass_unit(ell: f64, tau: f64, m0: f64) -> Result<Self> {
        let units = Self {
            ell,
            tau,
            hbar: m0 * ell * ell / (2.0 * PI * tau),
            m0: Some(m0),
        };
        units.validate()?;
        Ok(units)
    }

    pub fn c(&self) -> f64 {
        self.ell / self.tau
    }

    /// Dimensionless gate parameter `E tau / hbar`.
    pub fn gate_parameter(&self, energy: f64) -> f64 {
        energy * self.tau / self.hbar
    }

    /// Relative mismatch between `hbar` and `m0 ell^2 / (2 pi tau)`, zero
    /// when no mass unit is set.
    pub fn hbar_consistency(&self) -> f64 {
        match self.m0 {
            Some(m0) => {
                let derived = m0 * self.ell * self.ell / (2.0 * PI * self.tau);
                ((self.hbar - derived) / self.hbar).abs()
            }
            None => 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("ell", self.ell), ("tau", self.tau), ("hbar", self.hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain {
                    name,
                    value: v,
                    domain: "(0, inf)",
                });
            }
        }
        if self.hbar_consistency() > TOL_ALG {
            return Err(Error::Invalid(format!(
                "hbar = {} inconsistent with m0 ell^2 / (2 pi tau)",
                self.hbar
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complex_exp_i(phase: f64) -> crate::Complex64 {
        crate::Complex64::from_polar(1.0, phase)
    }
    use std::f64::consts::FRAC_PI_2;

    fn kron_delta(i: usize, j: usize) -> f64 {
        if i == j {
            1.0
        } else {
            0.0
        }
    }

    #[test]
    fn alphas_anticommute_to_delta() {
        let d = DiracMatrices::chiral();
        for i in 0..3 {
            for j in 0..3 {
                let expected = SquareMatrix::identity(4).scale_real(2.0 * kron_delta(i, j));
                assert!(d.alpha[i].anticommutator(&d.alpha[j]).distance(&expected) < 1e-15);
            }
            assert!(d.alpha[i].anticommutator(&d.beta).max_norm() < 1e-15);
        }
    }

    #[test]
    fn gamma_clifford_algebra() {
        let d = DiracMatrices::chiral();
        let metric = [1.0, -1.0, -1.0, -1.0];
        for (mu, (g, eta)) in d.gamma.iter().zip(metric).enumerate() {
            for (nu, h) in d.gamma.iter().enumerate() {
                let expected = SquareMatrix::identity(4).scale_real(2.0 * eta * kron_delta(mu, nu));
                assert!(g.anticommutator(h).distance(&expected) < 1e-15);
            }
            assert!(d.gamma5.anticommutator(g).max_norm() < 1e-15);
        }
        assert!((&d.gamma[0] * &d.gamma[0]).distance(&SquareMatrix::identity(4)) < 1e-15);
        assert!((&d.gamma5 * &d.gamma5).distance(&SquareMatrix::identity(4)) < 1e-15);
        // with gamma^i = i sigma_y ⊗ sigma_i the product gamma^0 gamma^i is -alpha_i;
        // alpha keeps the sigma_z ⊗ sigma form the stream operator is built on
        for i in 0..3 {
            assert!((&d.gamma[0] * &d.gamma[i + 1]).distance(&-&d.alpha[i]) < 1e-15);
        }
    }

    #[test]
    fn unknown_representation_rejected() {
        assert!(matches!(
            dirac_matrices("dirac"),
            Err(Error::UnknownRepresentation(_))
        ));
        assert!(dirac_matrices("chiral").is_ok());
    }

    #[test]
    fn classify_textbook_cases() {
        use NumberOperatorKind::*;
        assert_eq!(
            classify_number_operator(&sigma_x(), TOL_ALG).kind,
            InvolutionRegular
        );
        let proj = SquareMatrix::from_real_diagonal(&[1.0, 0.0]);
        assert_eq!(
            classify_number_operator(&proj, TOL_ALG).kind,
            IdempotentRegular
        );
        let tri = SquareMatrix::from_real_diagonal(&[1.0, 0.0, -1.0]);
        assert_eq!(
            classify_number_operator(&tri, TOL_ALG).kind,
            TriIdempotentRegular
        );
        let neg_proj = SquareMatrix::from_real_diagonal(&[-1.0, 0.0]);
        assert_eq!(
            classify_number_operator(&neg_proj, TOL_ALG).kind,
            IdempotentSkew
        );
        // identity satisfies N^2 = 1 and N^2 = N; involution wins
        assert_eq!(
            classify_number_operator(&SquareMatrix::identity(3), TOL_ALG).kind,
            InvolutionRegular
        );
        let generic = SquareMatrix::from_real_diagonal(&[0.3, 2.0]);
        assert_eq!(
            classify_number_operator(&generic, TOL_ALG).kind,
            Unclassified
        );
    }

    #[test]
    fn non_hermitian_is_unclassified_with_residuals() {
        // i sigma_x squares to -1 but is anti-hermitian
        let m = sigma_x().scale(I);
        let class = classify_number_operator(&m, TOL_ALG);
        assert_eq!(class.kind, NumberOperatorKind::Unclassified);
        assert!(class.residuals.involution_skew < 1e-15);
        assert!(class.residuals.hermiticity > 1.0);
    }

    #[test]
    fn epsilon_values() {
        assert_eq!(epsilon(0.0).unwrap(), 0.0);
        assert_eq!(epsilon(1.0).unwrap(), -1.0);
        assert!((epsilon(0.6).unwrap() + 0.2).abs() < 1e-15);
        assert!(epsilon(1.0 + 1e-9).is_err());
        assert!(epsilon(f64::NAN).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let u = closed_form_exp(&sigma_x(), FRAC_PI_2).unwrap();
        assert!(u.distance(&sigma_x().scale(-I)) < 1e-15);

        let theta = 0.37;
        let u = closed_form_exp(&SquareMatrix::from_real_diagonal(&[1.0, 0.0]), theta).unwrap();
        let expected = SquareMatrix::from_diagonal(&[complex_exp_i(-theta), ONE]);
        assert!(u.distance(&expected) < 1e-15);
    }

    #[test]
    fn closed_form_rejects_unclassified_and_skew() {
        let generic = SquareMatrix::from_real_diagonal(&[0.3, 2.0]);
        assert!(matches!(
            closed_form_exp(&generic, 0.1),
            Err(Error::NotClosedForm(NumberOperatorKind::Unclassified))
        ));
        let neg_proj = SquareMatrix::from_real_diagonal(&[-1.0, 0.0]);
        assert!(matches!(
            closed_form_exp(&neg_proj, 0.1),
            Err(Error::NotClosedForm(NumberOperatorKind::IdempotentSkew))
        ));
    }

    #[test]
    fn expm_oracle_known_values() {
        let zero = SquareMatrix::zeros(3);
        assert!(
            expm_oracle(&zero)
                .unwrap()
                .distance(&SquareMatrix::identity(3))
                < 1e-16
        );

        let rot = expm_oracle(&sigma_x().times_minus_i(FRAC_PI_2)).unwrap();
        assert!(rot.distance(&sigma_x().scale(-I)) < 1e-14);

        let d = [c64(1.5, -0.3), c64(-2.0, 4.0)];
        let e = expm_oracle(&SquareMatrix::from_diagonal(&d)).unwrap();
        let expected = SquareMatrix::from_diagonal(&[d[0].exp(), d[1].exp()]);
        assert!(e.distance(&expected) < 1e-13 * expected.max_norm());

        let mut bad = SquareMatrix::zeros(2);
        bad[(0, 1)] = c64(f64::INFINITY, 0.0);
        assert_eq!(expm_oracle(&bad), Err(Error::NonFinite));
    }

    #[test]
    fn trotter_single_slice_is_plain_product() {
        let (h0, h1) = (sigma_x(), sigma_z());
        let t = 0.8;
        let single = trotter_product(&h0, &h1, t, 1).unwrap();
        let direct = &expm_oracle(&h0.times_minus_i(t)).unwrap()
            * &expm_oracle(&h1.times_minus_i(t)).unwrap();
        assert!(single.distance(&direct) < 1e-15);
        assert!(trotter_product(&h0, &h1, t, 0).is_err());
    }

    #[test]
    fn trotter_exact_for_commuting_generators() {
        let h0 = SquareMatrix::from_real_diagonal(&[0.4, -1.1]);
        let h1 = SquareMatrix::from_real_diagonal(&[2.0, 0.25]);
        let exact = expm_oracle(&(&h0 + &h1).times_minus_i(1.3)).unwrap();
        for n in [1, 3, 16] {
            assert!(trotter_product(&h0, &h1, 1.3, n).unwrap().distance(&exact) < 1e-12);
        }
    }

    #[test]
    fn trotter_error_decreases_for_pauli_pair() {
        let exact = expm_oracle(&(&sigma_x() + &sigma_z()).times_minus_i(1.0)).unwrap();
        let errors: Vec<f64> = (0..=8)
            .map(|p| {
                trotter_product(&sigma_x(), &sigma_z(), 1.0, 1 << p)
                    .unwrap()
                    .distance(&exact)
            })
            .collect();
        for w in errors.windows(2) {
            assert!(w[1] < w[0], "{errors:?}");
        }
    }

    #[test]
    fn grid_units() {
        let n = GridUnits::natural();
        assert_eq!(n.c(), 1.0);
        assert_eq!(n.gate_parameter(0.25), 0.25);
        let u = GridUnits::with_mass_unit(2.0, 0.5, 3.0).unwrap();
        assert!((u.hbar - 3.0 * 4.0 / (2.0 * PI * 0.5)).abs() < 1e-15);
        assert_eq!(u.hbar_consistency(), 0.0);
        let broken = GridUnits { hbar: 1.0, ..u };
        assert!(broken.validate().is_err());
    }

    #[test]
    fn gate_angle_domain() {
        assert_eq!(gate_angle(0.0).unwrap(), 0.0);
        assert!((gate_angle(1.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!(gate_angle(1.01).is_err());
        assert!(gate_angle(-0.1).is_err());
    }
}
