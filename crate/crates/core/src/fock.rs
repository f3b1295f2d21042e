//! Fock-space BCS pairing on Jordan–Wigner qubits.
//!
//! Conventions:
//!
//! * qubit `alpha` (1-based) is the `alpha`-th tensor factor from the left,
//!   i.e. bit `Q - alpha` of the basis index;
//! * bit value 1 means occupied; `sigma_z |0> = +|0>`, `n = (1 - sigma_z)/2`;
//! * `a_alpha = sigma_z^{⊗ alpha-1} ⊗ a ⊗ 1^{⊗ Q-alpha}` with `a = [[0,1],[0,0]]`.
//!
//! With these conventions `a†_1 a†_2 |00> = +|11>` and `a†_2 a†_1 |00> = -|11>`.
//!
//! The 4-spinor of the BdG equation maps onto the two-qubit block as
//! `(psi_1, psi_2, psi_3, psi_4) -> (|11>, |10>, |01>, |00>)`; see
//! [`BDG_EMBEDDING`].

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::algebra::{epsilon, NumberOperatorKind, TOL_ALG};
use crate::error::{check_unit_interval, Error, Result};
use crate::matrix::SquareMatrix;
use crate::sampling::gaussian_complex;
use crate::{c64, ONE, ZERO};

pub const MAX_QUBITS: usize = 12;

/// Two-qubit basis index of each BdG spinor component.
pub const BDG_EMBEDDING: [usize; 4] = [3, 2, 1, 0];

fn check_qubits(q: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&q) {
        Ok(())
    } else {
        Err(Error::QubitCount(q))
    }
}

fn check_mode(q: usize, alpha: usize) -> Result<()> {
    if (1..=q).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::ModeIndex {
            index: alpha,
            modes: q,
        })
    }
}

#[inline]
fn mode_bit(q: usize, alpha: usize) -> usize {
    1 << (q - alpha)
}

/// Bits of the modes listed before `alpha`.
#[inline]
fn modes_before_mask(q: usize, alpha: usize) -> usize {
    let dim = 1usize << q;
    (dim - 1) & !((mode_bit(q, alpha) << 1) - 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockSpace {
    qubits: usize,
    amps: Vec<Complex64>,
}

impl FockSpace {
    pub fn vacuum(qubits: usize) -> Result<Self> {
        Self::basis_state(qubits, &[])
    }

    /// `prod a†_alpha |vac>` in ascending mode order.
    pub fn basis_state(qubits: usize, occupied: &[usize]) -> Result<Self> {
        check_qubits(qubits)?;
        let mut index = 0;
        for &alpha in occupied {
            check_mode(qubits, alpha)?;
            index |= mode_bit(qubits, alpha);
        }
        let mut amps = vec![ZERO; 1 << qubits];
        amps[index] = ONE;
        Ok(Self { qubits, amps })
    }

    pub fn from_amplitudes(qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_qubits(qubits)?;
        if amps.len() != 1 << qubits {
            return Err(Error::Dimension {
                expected: 1 << qubits,
                actual: amps.len(),
            });
        }
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Invalid(format!("state norm^2 = {norm}, expected 1")));
        }
        Ok(Self { qubits, amps })
    }

    pub fn random(qubits: usize, rng: &mut impl Rng) -> Result<Self> {
        check_qubits(qubits)?;
        let mut amps: Vec<Complex64> = (0..1 << qubits).map(|_| gaussian_complex(rng)).collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|z| *z /= norm);
        Ok(Self { qubits, amps })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        let terms: Vec<f64> = self.amps.iter().map(|z| z.norm_sqr()).collect();
        crate::field::pairwise_sum(&terms)
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        let terms: Vec<Complex64> = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .collect();
        Ok(crate::field::pairwise_sum(&terms))
    }

    /// Applies a dense operator on the full space.
    pub fn apply_dense(&self, op: &SquareMatrix) -> Result<Self> {
        if op.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                actual: op.dim(),
            });
        }
        Ok(Self {
            qubits: self.qubits,
            amps: op.mul_vec(&self.amps),
        })
    }

    /// `<n_alpha>`.
    pub fn occupation(&self, alpha: usize) -> Result<f64> {
        check_mode(self.qubits, alpha)?;
        let bit = mode_bit(self.qubits, alpha);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, z)| z.norm_sqr())
            .sum())
    }

    /// Expectation of an even two-mode operator embedded on `(alpha, beta)`.
    pub fn pair_expectation(&self, op: &SquareMatrix, alpha: usize, beta: usize) -> Result<f64> {
        let applied = apply_pair_operator(self, op, alpha, beta)?;
        Ok(self.inner(&applied)?.re)
    }
}

/// `(a_alpha, a†_alpha)` as dense `2^Q x 2^Q` matrices.
pub fn jordan_wigner_ops(qubits: usize, alpha: usize) -> Result<(SquareMatrix, SquareMatrix)> {
    check_qubits(qubits)?;
    check_mode(qubits, alpha)?;
    let dim = 1usize << qubits;
    let bit = mode_bit(qubits, alpha);
    let before = modes_before_mask(qubits, alpha);
    let mut a = SquareMatrix::zeros(dim);
    for j in (0..dim).filter(|j| j & bit != 0) {
        let sign = if (j & before).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        a[(j ^ bit, j)] = c64(sign, 0.0);
    }
    let a_dag = a.adjoint();
    Ok((a, a_dag))
}

pub fn number_operator(qubits: usize, alpha: usize) -> Result<SquareMatrix> {
    let (a, a_dag) = jordan_wigner_ops(qubits, alpha)?;
    Ok(&a_dag * &a)
}

/// Selects `N+` or `N-`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairBranch {
    #[default]
    Plus,
    Minus,
}

impl PairBranch {
    pub fn sign(self) -> f64 {
        match self {
            PairBranch::Plus => 1.0,
            PairBranch::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BcsParams {
    /// Quasiparticle energy.
    pub eps: f64,
    /// Complex gap.
    pub delta: Complex64,
    pub branch: PairBranch,
    pub tau: f64,
}

impl BcsParams {
    pub fn new(eps: f64, delta: Complex64, branch: PairBranch, tau: f64) -> Result<Self> {
        let p = Self {
            eps,
            delta,
            branch,
            tau,
        };
        if !(eps.is_finite() && delta.re.is_finite() && delta.im.is_finite()) {
            return Err(Error::Invalid("eps and delta must be finite".into()));
        }
        if p.energy() <= 0.0 {
            return Err(Error::Domain {
                name: "E",
                value: p.energy(),
                domain: "(0, inf)",
            });
        }
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(Error::Domain {
                name: "tau",
                value: tau,
                domain: "[0, inf)",
            });
        }
        Ok(p)
    }

    /// Chooses `tau` so that `E tau` equals `e_tau`.
    pub fn with_e_tau(eps: f64, delta: Complex64, branch: PairBranch, e_tau: f64) -> Result<Self> {
        check_unit_interval("E_tau", e_tau)?;
        let energy = eps.hypot(delta.norm());
        Self::new(
            eps,
            delta,
            branch,
            if energy > 0.0 { e_tau / energy } else { 0.0 },
        )
    }

    /// `E = sqrt(eps^2 + |delta|^2)`.
    pub fn energy(&self) -> f64 {
        self.eps.hypot(self.delta.norm())
    }

    pub fn e_tau(&self) -> f64 {
        self.energy() * self.tau
    }

    pub fn with_branch(self, branch: PairBranch) -> Self {
        Self { branch, ..self }
    }
}

/// Joint pairing number operator
/// `N± = ½(1 ± eps/E) a†_α a_α + ½(1 ∓ eps/E) a_β a†_β ± (Δ/2E) a†_α a†_β ± (Δ*/2E) a_β a_α`,
/// built verbatim on a `qubits`-mode space.
///
/// Every such operator satisfies `N^3 = N`. Its spectrum is `{0, 1}`: on the
/// `{|00>, |11>}` block of the pair the 2x2 matrix has trace 1 and
/// determinant `(1 - (eps^2 + |Δ|^2)/E^2)/4 = 0`, so `N±` is in fact a
/// projector. The difference `N+ - N-` has spectrum `{-1, 0, 0, 1}`.
pub fn bcs_number_operator(
    qubits: usize,
    alpha: usize,
    beta: usize,
    p: &BcsParams,
) -> Result<SquareMatrix> {
    if alpha == beta {
        return Err(Error::SamePair(alpha));
    }
    let (a_a, a_a_dag) = jordan_wigner_ops(qubits, alpha)?;
    let (a_b, a_b_dag) = jordan_wigner_ops(qubits, beta)?;
    let s = p.branch.sign();
    let e = p.energy();
    let x = p.eps / e;
    let mut n = (&a_a_dag * &a_a).scale_real(0.5 * (1.0 + s * x));
    n += &(&a_b * &a_b_dag).scale_real(0.5 * (1.0 - s * x));
    n += &(&a_a_dag * &a_b_dag).scale(p.delta * (s / (2.0 * e)));
    n += &(&a_b * &a_a).scale(p.delta.conj() * (s / (2.0 * e)));
    Ok(n)
}

/// `H^BCS = E N`.
pub fn bcs_hamiltonian(
    qubits: usize,
    alpha: usize,
    beta: usize,
    p: &BcsParams,
) -> Result<SquareMatrix> {
    Ok(bcs_number_operator(qubits, alpha, beta, p)?.scale_real(p.energy()))
}

/// Entangling gate `1 + eps(E tau) N^2 - i E tau N = exp(-i arccos sqrt(1-(E tau)^2) N)`.
///
/// `N` must satisfy `N^3 = N` (tri-idempotent, or idempotent in the gap-free
/// limit).
pub fn bcs_gate(n: &SquareMatrix, e_tau: f64) -> Result<SquareMatrix> {
    check_unit_interval("E_tau", e_tau)?;
    let n2 = n * n;
    let residual = (&n2 * n).distance(n);
    if residual > TOL_ALG || n.hermiticity_residual() > TOL_ALG {
        return Err(Error::NotClosedForm(
            crate::algebra::classify_number_operator(n, TOL_ALG).kind,
        ));
    }
    let one = SquareMatrix::identity(n.dim());
    Ok(&(&one + &n2.scale_real(epsilon(e_tau)?)) + &n.scale(c64(0.0, -e_tau)))
}

/// Same as [`bcs_gate`] but also reports the generator class.
pub fn bcs_gate_classified(
    n: &SquareMatrix,
    e_tau: f64,
) -> Result<(SquareMatrix, NumberOperatorKind)> {
    let kind = crate::algebra::classify_number_operator(n, TOL_ALG).kind;
    Ok((bcs_gate(n, e_tau)?, kind))
}

/// 4x4 BdG Hamiltonian with nonzero entries `(1,1) = eps`, `(1,4) = Δ`,
/// `(4,1) = Δ*`, `(4,4) = -eps`.
pub fn bdg_hamiltonian(eps: f64, delta: Complex64) -> SquareMatrix {
    let mut h = SquareMatrix::zeros(4);
    h[(0, 0)] = c64(eps, 0.0);
    h[(0, 3)] = delta;
    h[(3, 0)] = delta.conj();
    h[(3, 3)] = c64(-eps, 0.0);
    h
}

/// Re-expresses a 4x4 operator on BdG spinor components in the two-qubit
/// `(|00>, |01>, |10>, |11>)` basis.
pub fn embed_bdg(h: &SquareMatrix) -> SquareMatrix {
    let mut out = SquareMatrix::zeros(4);
    for i in 0..4 {
        for j in 0..4 {
            out[(BDG_EMBEDDING[i], BDG_EMBEDDING[j])] = h[(i, j)];
        }
    }
    out
}

/// Grid-level BdG step `exp(-i arccos sqrt(1 - (E tau)^2) H / E)`.
///
/// On the `(|00>, |11>)` block where `(H/E)^2 = 1` this is
/// `sqrt(1 - (E tau)^2) psi - i tau H psi`; the two components in the kernel
/// of `H` are left unchanged, so the step is exactly unitary.
pub fn step_bdg(
    psi: &[Complex64; 4],
    eps: f64,
    delta: Complex64,
    tau: f64,
) -> Result<[Complex64; 4]> {
    let e_tau = eps.hypot(delta.norm()) * tau;
    check_unit_interval("E_tau", e_tau)?;
    let c = (1.0 - e_tau * e_tau).sqrt();
    let mt = c64(0.0, -tau);
    Ok([
        psi[0] * c + mt * (psi[0] * eps + delta * psi[3]),
        psi[1],
        psi[2],
        psi[3] * c + mt * (delta.conj() * psi[0] - psi[3] * eps),
    ])
}

const PARITY_TOL: f64 = 1e-12;

/// Converts a two-mode operator written in mode order `(alpha, beta)` into
/// ascending mode order, returning it with the lower and higher mode.
fn canonical_pair(op: &SquareMatrix, alpha: usize, beta: usize) -> (SquareMatrix, usize, usize) {
    if alpha < beta {
        return (op.clone(), alpha, beta);
    }
    // |n_a n_b> -> |n_b n_a>; a†_a a†_b = -a†_b a†_a puts a sign on |11>
    let perm = [0usize, 2, 1, 3];
    let sign = [1.0, 1.0, 1.0, -1.0];
    let mut out = SquareMatrix::zeros(4);
    for i in 0..4 {
        for j in 0..4 {
            out[(perm[i], perm[j])] = op[(i, j)] * (sign[i] * sign[j]);
        }
    }
    (out, beta, alpha)
}

fn check_pair_operator(
    state: &FockSpace,
    op: &SquareMatrix,
    alpha: usize,
    beta: usize,
) -> Result<()> {
    if op.dim() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            actual: op.dim(),
        });
    }
    if alpha == beta {
        return Err(Error::SamePair(alpha));
    }
    check_mode(state.qubits, alpha)?;
    check_mode(state.qubits, beta)?;
    let parity = |i: usize| (i.count_ones() % 2) as u8;
    let odd = (0..4)
        .flat_map(|r| (0..4).map(move |c| (r, c)))
        .filter(|&(r, c)| parity(r) != parity(c))
        .map(|(r, c)| op[(r, c)].norm())
        .fold(0.0, f64::max);
    if odd > PARITY_TOL {
        return Err(Error::OddGate(odd));
    }
    Ok(())
}

/// Applies a parity-preserving two-mode operator (4x4 in the
/// `(|00>, |01>, |10>, |11>)` basis of modes `(alpha, beta)`) to the full
/// Fock state without building a `2^Q` matrix.
///
/// Elements that change both occupations pick up the Jordan–Wigner string
/// `(-1)^{n}` of the modes strictly between the pair.
pub fn apply_pair_operator(
    state: &FockSpace,
    op: &SquareMatrix,
    alpha: usize,
    beta: usize,
) -> Result<FockSpace> {
    check_pair_operator(state, op, alpha, beta)?;
    let q = state.qubits;
    let (g, lo, hi) = canonical_pair(op, alpha, beta);
    let bit_lo = mode_bit(q, lo);
    let bit_hi = mode_bit(q, hi);
    let between = (bit_lo - 1) & !((bit_hi << 1) - 1);
    let global = |base: usize, local: usize| {
        base | if local & 2 != 0 { bit_lo } else { 0 } | if local & 1 != 0 { bit_hi } else { 0 }
    };
    let src = &state.amps;
    let amps: Vec<Complex64> = (0..src.len())
        .into_par_iter()
        .map(|i| {
            let base = i & !(bit_lo | bit_hi);
            let row = (usize::from(i & bit_lo != 0) << 1) | usize::from(i & bit_hi != 0);
            let string = if (base & between).count_ones().is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            let mut acc = ZERO;
            for col in 0..4 {
                let m = g[(row, col)];
                if m == ZERO {
                    continue;
                }
                // same-parity and distinct means both modes flipped
                let m = if col != row { m * string } else { m };
                acc += m * src[global(base, col)];
            }
            acc
        })
        .collect();
    Ok(FockSpace { qubits: q, amps })
}

/// [`apply_pair_operator`] for a unitary gate.
pub fn apply_pair_gate(
    state: &FockSpace,
    gate: &SquareMatrix,
    alpha: usize,
    beta: usize,
) -> Result<FockSpace> {
    if gate.dim() == 4 && gate.unitarity_residual() > TOL_ALG {
        return Err(Error::Invalid("pair gate is not unitary".into()));
    }
    apply_pair_operator(state, gate, alpha, beta)
}

/// Dense `2^Q` matrix of a pair operator, column by column through
/// [`apply_pair_operator`].
pub fn embed_pair_operator(
    qubits: usize,
    op: &SquareMatrix,
    alpha: usize,
    beta: usize,
) -> Result<SquareMatrix> {
    check_qubits(qubits)?;
    let dim = 1usize << qubits;
    let mut out = SquareMatrix::zeros(dim);
    for col in 0..dim {
        let mut amps = vec![ZERO; dim];
        amps[col] = ONE;
        let image = apply_pair_operator(&FockSpace { qubits, amps }, op, alpha, beta)?;
        for (row, v) in image.amps.into_iter().enumerate() {
            out[(row, col)] = v;
        }
    }
    Ok(out)
}

/// Two-mode pairing operator `N±` in mode order `(alpha, beta)`, as used by
/// [`apply_pair_gate`].
pub fn pair_number_operator(p: &BcsParams) -> SquareMatrix {
    bcs_number_operator(2, 1, 2, p).expect("two-mode operator is always valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{classify_number_operator, expm_oracle, gate_angle, sigma_z};
    use crate::eigen::hermitian_eigenvalues;
    use crate::sampling::rng_from_seed;

    /// Independent construction from explicit Kronecker products.
    fn kron_annihilation(q: usize, alpha: usize) -> SquareMatrix {
        let single = SquareMatrix::from_fn(2, |r, c| if (r, c) == (0, 1) { ONE } else { ZERO });
        let mut acc: Option<SquareMatrix> = None;
        for k in 1..=q {
            let f = match k.cmp(&alpha) {
                std::cmp::Ordering::Less => sigma_z(),
                std::cmp::Ordering::Equal => single.clone(),
                std::cmp::Ordering::Greater => SquareMatrix::identity(2),
            };
            acc = Some(match acc {
                None => f,
                Some(m) => m.kron(&f),
            });
        }
        acc.unwrap()
    }

    fn generic_params() -> BcsParams {
        BcsParams::new(3.0, Complex64::from_polar(4.0, 0.7), PairBranch::Plus, 0.1).unwrap()
    }

    #[test]
    fn jw_matches_kronecker_construction() {
        for q in 1..=4 {
            for alpha in 1..=q {
                let (a, _) = jordan_wigner_ops(q, alpha).unwrap();
                assert_eq!(a, kron_annihilation(q, alpha));
            }
        }
    }

    #[test]
    fn single_mode_number_operator() {
        let n = number_operator(1, 1).unwrap();
        assert_eq!(n, SquareMatrix::from_real_diagonal(&[0.0, 1.0]));
    }

    #[test]
    fn cross_mode_anticommutator_vanishes() {
        let (a1, _) = jordan_wigner_ops(2, 1).unwrap();
        let (_, a2_dag) = jordan_wigner_ops(2, 2).unwrap();
        assert_eq!(a1.anticommutator(&a2_dag).max_norm(), 0.0);
    }

    #[test]
    fn anticommutation_relations_q4() {
        let q = 4;
        let ops: Vec<_> = (1..=q).map(|a| jordan_wigner_ops(q, a).unwrap()).collect();
        let one = SquareMatrix::identity(1 << q);
        for (i, (ai, ai_dag)) in ops.iter().enumerate() {
            for (j, (aj, aj_dag)) in ops.iter().enumerate() {
                let delta = if i == j {
                    one.clone()
                } else {
                    SquareMatrix::zeros(1 << q)
                };
                assert!(ai.anticommutator(aj_dag).distance(&delta) < 1e-12);
                assert!(ai.anticommutator(aj).max_norm() < 1e-12);
                assert!(ai_dag.anticommutator(aj_dag).max_norm() < 1e-12);
            }
        }
    }

    #[test]
    fn pair_creation_sign_is_stable() {
        let (_, c1) = jordan_wigner_ops(2, 1).unwrap();
        let (_, c2) = jordan_wigner_ops(2, 2).unwrap();
        let vac = FockSpace::vacuum(2).unwrap();
        let pair = vac.apply_dense(&(&c1 * &c2)).unwrap();
        assert_eq!(pair.amplitudes(), &[ZERO, ZERO, ZERO, ONE]);
        let swapped = vac.apply_dense(&(&c2 * &c1)).unwrap();
        assert_eq!(swapped.amplitudes()[3], -ONE);
    }

    #[test]
    fn mode_and_qubit_range_errors() {
        assert!(matches!(
            jordan_wigner_ops(3, 0),
            Err(Error::ModeIndex { .. })
        ));
        assert!(matches!(
            jordan_wigner_ops(3, 4),
            Err(Error::ModeIndex { .. })
        ));
        assert!(matches!(
            jordan_wigner_ops(13, 1),
            Err(Error::QubitCount(13))
        ));
        assert!(matches!(
            bcs_number_operator(3, 2, 2, &generic_params()),
            Err(Error::SamePair(2))
        ));
    }

    #[test]
    fn gap_free_operator_is_number_operator() {
        let p = BcsParams::new(2.0, ZERO, PairBranch::Plus, 0.1).unwrap();
        let n = bcs_number_operator(2, 1, 2, &p).unwrap();
        assert!(n.distance(&number_operator(2, 1).unwrap()) < 1e-15);
        assert_eq!(
            classify_number_operator(&n, TOL_ALG).kind,
            NumberOperatorKind::IdempotentRegular
        );
    }

    #[test]
    fn pairing_operator_folds_at_third_power() {
        for branch in [PairBranch::Plus, PairBranch::Minus] {
            let p = generic_params().with_branch(branch);
            let n = bcs_number_operator(3, 1, 3, &p).unwrap();
            assert!(n.hermiticity_residual() < 1e-15);
            assert!((&(&n * &n) * &n).distance(&n) < 1e-12);
            // verbatim operator is a projector (see bcs_number_operator docs)
            assert!((&n * &n).distance(&n) < 1e-12);
            for v in hermitian_eigenvalues(&n) {
                assert!(v.abs() < 1e-12 || (v - 1.0).abs() < 1e-12, "{v}");
            }
        }
    }

    #[test]
    fn branch_difference_is_tri_idempotent() {
        let p = generic_params();
        let diff =
            &pair_number_operator(&p) - &pair_number_operator(&p.with_branch(PairBranch::Minus));
        assert_eq!(
            classify_number_operator(&diff, TOL_ALG).kind,
            NumberOperatorKind::TriIdempotentRegular
        );
    }

    #[test]
    fn gate_boundaries() {
        let n = bcs_number_operator(2, 1, 2, &generic_params()).unwrap();
        assert!(
            bcs_gate(&n, 0.0)
                .unwrap()
                .distance(&SquareMatrix::identity(4))
                < 1e-16
        );
        let expected = &(&SquareMatrix::identity(4) - &(&n * &n)) + &n.scale(c64(0.0, -1.0));
        assert!(bcs_gate(&n, 1.0).unwrap().distance(&expected) < 1e-15);
        assert!(bcs_gate(&n, 1.0 + 1e-9).is_err());
        let not_folding = SquareMatrix::from_real_diagonal(&[0.5, 2.0, 0.0, 0.0]);
        assert!(bcs_gate(&not_folding, 0.3).is_err());
    }

    #[test]
    fn gate_matches_oracle() {
        let n = bcs_number_operator(3, 3, 1, &generic_params()).unwrap();
        for e_tau in [0.05, 0.4, 0.93] {
            let oracle = expm_oracle(&n.times_minus_i(gate_angle(e_tau).unwrap())).unwrap();
            let gate = bcs_gate(&n, e_tau).unwrap();
            assert!(gate.distance(&oracle) < 1e-12);
            assert!(gate.unitarity_residual() < 1e-12);
        }
    }

    #[test]
    fn bdg_examples() {
        let h = bdg_hamiltonian(2.5, ZERO);
        assert_eq!(h, SquareMatrix::from_real_diagonal(&[2.5, 0.0, 0.0, -2.5]));
        let h = bdg_hamiltonian(3.0, c64(4.0, 0.0));
        let ev = hermitian_eigenvalues(&h);
        for (v, e) in ev.iter().zip([-5.0, 0.0, 0.0, 5.0]) {
            assert!((v - e).abs() < 1e-13);
        }
    }

    #[test]
    fn branch_difference_reproduces_bdg_matrix() {
        let p = generic_params();
        let diff =
            &pair_number_operator(&p) - &pair_number_operator(&p.with_branch(PairBranch::Minus));
        let h = embed_bdg(&bdg_hamiltonian(p.eps, p.delta));
        assert!(diff.scale_real(p.energy()).distance(&h) < 1e-12);
    }

    #[test]
    fn step_bdg_examples() {
        let (eps, tau) = (0.6, 0.5);
        let out = step_bdg(&[ONE, ZERO, ZERO, ZERO], eps, ZERO, tau).unwrap();
        let expected = c64((1.0f64 - 0.09).sqrt(), -0.3);
        assert!((out[0] - expected).norm() < 1e-15);
        assert!((out[0].norm() - 1.0).abs() < 1e-15);

        let psi = [ZERO, ONE, ZERO, ZERO];
        let out = step_bdg(&psi, 0.3, c64(0.4, 0.1), 1.0).unwrap();
        assert_eq!(out, psi);
        assert!(step_bdg(&psi, 3.0, c64(4.0, 0.0), 0.25).is_err());
    }

    #[test]
    fn step_bdg_is_tri_idempotent_exponential() {
        let (eps, delta, tau) = (0.7f64, c64(-0.2, 0.5), 0.9);
        let e = eps.hypot(delta.norm());
        let n = bdg_hamiltonian(eps, delta).scale_real(1.0 / e);
        let u = expm_oracle(&n.times_minus_i(gate_angle(e * tau).unwrap())).unwrap();
        let mut rng = rng_from_seed(24);
        let psi: [Complex64; 4] = std::array::from_fn(|_| gaussian_complex(&mut rng));
        let out = step_bdg(&psi, eps, delta, tau).unwrap();
        let expected = u.mul_vec(&psi);
        for i in 0..4 {
            assert!((out[i] - expected[i]).norm() < 1e-13);
        }
        let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        assert!((norm(&out) - norm(&psi)).abs() < 1e-14);
    }

    #[test]
    fn step_bdg_eigenphase_accumulates() {
        let (eps, delta, tau) = (3.0, c64(0.0, 4.0), 0.15);
        let h = bdg_hamiltonian(eps, delta);
        let theta = gate_angle(5.0 * tau).unwrap();
        let pairs = crate::eigen::normal_eigenpairs(&h, 1e-12).unwrap();
        for pair in pairs.iter().filter(|p| p.value.norm() > 1.0) {
            let sign = pair.value.re.signum();
            let mut psi = crate::field::spinor_from_slice(&pair.vector);
            let start = psi;
            let steps = 37;
            for _ in 0..steps {
                psi = step_bdg(&psi, eps, delta, tau).unwrap();
            }
            let phase = Complex64::from_polar(1.0, -(steps as f64) * theta * sign);
            for i in 0..4 {
                assert!((psi[i] - start[i] * phase).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn pair_gate_on_two_modes_is_plain_product() {
        let mut rng = rng_from_seed(21);
        let state = FockSpace::random(2, &mut rng).unwrap();
        let gate = bcs_gate(&pair_number_operator(&generic_params()), 0.6).unwrap();
        let a = apply_pair_gate(&state, &gate, 1, 2).unwrap();
        let b = state.apply_dense(&gate).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn pair_gate_matches_dense_embedding() {
        let mut rng = rng_from_seed(22);
        let q = 5;
        let state = FockSpace::random(q, &mut rng).unwrap();
        let p = generic_params();
        let e_tau = 0.7;
        let small = bcs_gate(&pair_number_operator(&p), e_tau).unwrap();
        for &(alpha, beta) in &[(1, 2), (2, 5), (5, 1), (4, 2), (1, 4)] {
            let big = bcs_gate(&bcs_number_operator(q, alpha, beta, &p).unwrap(), e_tau).unwrap();
            let dense = state.apply_dense(&big).unwrap();
            let paired = apply_pair_gate(&state, &small, alpha, beta).unwrap();
            let err = dense
                .amplitudes()
                .iter()
                .zip(paired.amplitudes())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-13, "pair ({alpha},{beta}) err {err}");
            assert!((paired.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pair_gate_rejects_bad_input() {
        let state = FockSpace::vacuum(3).unwrap();
        assert!(apply_pair_gate(&state, &SquareMatrix::identity(2), 1, 2).is_err());
        assert!(apply_pair_gate(&state, &SquareMatrix::identity(4), 2, 2).is_err());
        assert!(apply_pair_gate(&state, &SquareMatrix::identity(4), 1, 4).is_err());
        // single-mode flip is parity odd
        let odd = crate::algebra::sigma_x().kron(&SquareMatrix::identity(2));
        assert!(matches!(
            apply_pair_gate(&state, &odd, 1, 2),
            Err(Error::OddGate(_))
        ));
        let identity = apply_pair_gate(&state, &SquareMatrix::identity(4), 1, 3).unwrap();
        assert_eq!(identity, state);
    }
}
