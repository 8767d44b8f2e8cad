//! Dense qudit gates: generalized Paulis, the Fourier (Hadamard) gate,
//! controlled gates, the one-level controlled-Z and diagonal phase gates.
//!
//! Registers of `n` qudits use the index `Σ_q l_q d^{n−1−q}`, so site 0 is
//! the most significant digit and `A ⊗ B` puts `A` on site 0.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{cis, max_diff_up_to_phase, unitarity_defect, CMatrix, CVector, ONE, ZERO};
use crate::optim::{levenberg_marquardt, LmOptions};

const UNITARY_TOL: f64 = 1e-10;

/// A dense operator on `site_count` qudits of dimension `dimension`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuditOperator {
    dimension: usize,
    site_count: usize,
    matrix: CMatrix,
    unitary: bool,
}

impl QuditOperator {
    pub fn new(dimension: usize, site_count: usize, matrix: CMatrix) -> Result<Self> {
        check_dimension(dimension)?;
        if site_count == 0 {
            return Err(invalid("an operator needs at least one site"));
        }
        let size = register_size(dimension, site_count)?;
        if matrix.nrows() != size || matrix.ncols() != size {
            return Err(Error::DimensionMismatch {
                expected: size,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self {
            dimension,
            site_count,
            matrix,
            unitary: false,
        })
    }

    /// Like [`QuditOperator::new`], but checks and records unitarity.
    pub fn unitary(dimension: usize, site_count: usize, matrix: CMatrix) -> Result<Self> {
        let mut op = Self::new(dimension, site_count, matrix)?;
        let defect = unitarity_defect(&op.matrix);
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary { defect });
        }
        op.unitary = true;
        Ok(op)
    }

    pub fn identity(dimension: usize, site_count: usize) -> Result<Self> {
        let size = register_size(dimension, site_count)?;
        Self::unitary(dimension, site_count, CMatrix::identity(size, size))
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn site_count(&self) -> usize {
        self.site_count
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            ..self.clone()
        }
    }

    /// Operator product `self · rhs` (`rhs` acts first).
    pub fn compose(&self, rhs: &QuditOperator) -> Result<Self> {
        self.check_same_register(rhs)?;
        Ok(Self {
            matrix: &self.matrix * &rhs.matrix,
            unitary: self.unitary && rhs.unitary,
            ..self.clone()
        })
    }

    /// `self ⊗ rhs`.
    pub fn tensor(&self, rhs: &QuditOperator) -> Result<Self> {
        if self.dimension != rhs.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: rhs.dimension,
            });
        }
        Ok(Self {
            dimension: self.dimension,
            site_count: self.site_count + rhs.site_count,
            matrix: self.matrix.kronecker(&rhs.matrix),
            unitary: self.unitary && rhs.unitary,
        })
    }

    /// Integer power; negative exponents use the adjoint and require unitarity.
    pub fn pow(&self, exponent: i64) -> Result<Self> {
        let base = if exponent < 0 {
            if !self.unitary {
                return Err(invalid("negative powers need a unitary operator"));
            }
            self.adjoint()
        } else {
            self.clone()
        };
        let size = self.matrix.nrows();
        let mut acc = CMatrix::identity(size, size);
        for _ in 0..exponent.unsigned_abs() {
            acc = &base.matrix * acc;
        }
        Ok(Self {
            matrix: acc,
            ..self.clone()
        })
    }

    pub fn apply(&self, state: &CVector) -> Result<CVector> {
        if state.len() != self.matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: self.matrix.ncols(),
                found: state.len(),
            });
        }
        Ok(&self.matrix * state)
    }

    /// Largest entrywise deviation from `other` after aligning one global phase.
    pub fn distance_up_to_phase(&self, other: &QuditOperator) -> f64 {
        if self.matrix.shape() != other.matrix.shape() {
            return f64::INFINITY;
        }
        max_diff_up_to_phase(self.matrix.as_slice(), other.matrix.as_slice())
    }

    pub fn distance(&self, other: &QuditOperator) -> f64 {
        if self.matrix.shape() != other.matrix.shape() {
            return f64::INFINITY;
        }
        (&self.matrix - &other.matrix).camax()
    }

    fn check_same_register(&self, rhs: &QuditOperator) -> Result<()> {
        if self.dimension != rhs.dimension || self.site_count != rhs.site_count {
            return Err(Error::DimensionMismatch {
                expected: self.matrix.nrows(),
                found: rhs.matrix.nrows(),
            });
        }
        Ok(())
    }
}

fn check_dimension(d: usize) -> Result<()> {
    if d < 2 {
        return Err(invalid(format!("qudit dimension must be at least 2, got {d}")));
    }
    Ok(())
}

pub(crate) fn register_size(d: usize, sites: usize) -> Result<usize> {
    u32::try_from(sites)
        .ok()
        .and_then(|s| d.checked_pow(s))
        .ok_or_else(|| invalid(format!("register {d}^{sites} is too large")))
}

/// `ω = e^{2πi/d}`.
pub fn omega(d: usize) -> Complex64 {
    cis(2.0 * PI / d as f64)
}

/// `ω^k` with the exponent reduced mod `d` first.
pub(crate) fn omega_pow(d: usize, k: i64) -> Complex64 {
    cis(2.0 * PI * k.rem_euclid(d as i64) as f64 / d as f64)
}

/// Shift `X|n⟩ = |n ⊕ 1⟩`.
pub fn pauli_x(d: usize) -> Result<QuditOperator> {
    check_dimension(d)?;
    let m = CMatrix::from_fn(d, d, |i, j| if i == (j + 1) % d { ONE } else { ZERO });
    QuditOperator::unitary(d, 1, m)
}

/// Clock `Z|n⟩ = ωⁿ|n⟩`.
pub fn pauli_z(d: usize) -> Result<QuditOperator> {
    check_dimension(d)?;
    let m = CMatrix::from_fn(d, d, |i, j| if i == j { omega_pow(d, i as i64) } else { ZERO });
    QuditOperator::unitary(d, 1, m)
}

/// Fourier gate `H_{nm} = ω^{nm}/√d`, the basis change with `H X H† = Z`.
pub fn hadamard(d: usize) -> Result<QuditOperator> {
    check_dimension(d)?;
    let s = 1.0 / (d as f64).sqrt();
    let m = CMatrix::from_fn(d, d, |i, j| omega_pow(d, (i * j) as i64) * s);
    QuditOperator::unitary(d, 1, m)
}

/// `CX = Σ |n⟩⟨n| ⊗ Xⁿ`: `|n, m⟩ ↦ |n, n ⊕ m⟩`.
pub fn controlled_x(d: usize) -> Result<QuditOperator> {
    check_dimension(d)?;
    let size = d * d;
    let m = CMatrix::from_fn(size, size, |row, col| {
        let (n, m) = (col / d, col % d);
        if row == n * d + (n + m) % d {
            ONE
        } else {
            ZERO
        }
    });
    QuditOperator::unitary(d, 2, m)
}

/// `CZ = Σ |n⟩⟨n| ⊗ Zⁿ`: `|n, m⟩ ↦ ω^{nm}|n, m⟩`.
pub fn controlled_z(d: usize) -> Result<QuditOperator> {
    check_dimension(d)?;
    diagonal(d, 2, |idx| omega_pow(d, ((idx / d) * (idx % d)) as i64))
}

/// One-level controlled-Z: phase `e^{2πi l/d}` on `|d−1, l⟩`, identity otherwise.
pub fn one_level_cz(d: usize) -> Result<QuditOperator> {
    check_dimension(d)?;
    diagonal(d, 2, |idx| {
        let (k, l) = (idx / d, idx % d);
        if k == d - 1 {
            omega_pow(d, l as i64)
        } else {
            ONE
        }
    })
}

/// Diagonal phase gate `P(θ)|n⟩ = e^{iθ_n}|n⟩`; the dimension is `θ.len()`.
pub fn phase_gate(theta: &[f64]) -> Result<QuditOperator> {
    let d = theta.len();
    check_dimension(d)?;
    if theta.iter().any(|t| !t.is_finite()) {
        return Err(invalid("phase angles must be finite"));
    }
    diagonal(d, 1, |n| cis(theta[n]))
}

/// Diagonal operator with entries `f(index)`.
pub fn diagonal(
    d: usize,
    sites: usize,
    f: impl Fn(usize) -> Complex64,
) -> Result<QuditOperator> {
    let size = register_size(d, sites)?;
    let m = CMatrix::from_diagonal(&CVector::from_fn(size, |i, _| f(i)));
    QuditOperator::unitary(d, sites, m)
}

/// Tensor-embeds `op` on `sites` (in that order) of an `n_total`-site register.
pub fn embed(op: &QuditOperator, sites: &[usize], n_total: usize) -> Result<QuditOperator> {
    let d = op.dimension;
    if sites.len() != op.site_count {
        return Err(Error::DimensionMismatch {
            expected: op.site_count,
            found: sites.len(),
        });
    }
    let mut seen = vec![false; n_total];
    for &s in sites {
        if s >= n_total {
            return Err(invalid(format!("site {s} out of range for {n_total} sites")));
        }
        if std::mem::replace(&mut seen[s], true) {
            return Err(invalid(format!("site {s} appears twice")));
        }
    }
    let size = register_size(d, n_total)?;
    let k = sites.len();
    let sub = op.matrix.nrows();
    let place = |digits: &mut [usize], local: usize| {
        let mut rem = local;
        for q in (0..k).rev() {
            digits[sites[q]] = rem % d;
            rem /= d;
        }
    };
    let mut full = CMatrix::zeros(size, size);
    let mut digits = vec![0usize; n_total];
    for col in 0..size {
        to_digits(col, d, &mut digits);
        let local_col = sites.iter().fold(0, |acc, &s| acc * d + digits[s]);
        for local_row in 0..sub {
            let v = op.matrix[(local_row, local_col)];
            if v == ZERO {
                continue;
            }
            place(&mut digits, local_row);
            full[(from_digits(&digits, d), col)] = v;
        }
    }
    Ok(QuditOperator {
        dimension: d,
        site_count: n_total,
        matrix: full,
        unitary: op.unitary,
    })
}

pub(crate) fn to_digits(mut index: usize, d: usize, digits: &mut [usize]) {
    for q in (0..digits.len()).rev() {
        digits[q] = index % d;
        index /= d;
    }
}

pub(crate) fn from_digits(digits: &[usize], d: usize) -> usize {
    digits.iter().fold(0, |acc, &x| acc * d + x)
}

/// `H P(θ)`, one teleportation step of a linear cluster.
pub fn hp(theta: &[f64]) -> Result<QuditOperator> {
    hadamard(theta.len())?.compose(&phase_gate(theta)?)
}

/// Factors a single-qudit unitary as `H P(θ_L) ⋯ H P(θ_1)` up to a global
/// phase. `factors[0]` acts first.
///
/// The factorization is found numerically (Levenberg–Marquardt on the
/// matrix residual, random restarts). `d + 1` factors are tried first and
/// more are added if no restart reaches the tolerance.
pub fn hp_factorize<R: Rng + ?Sized>(u: &QuditOperator, rng: &mut R) -> Result<HpFactorization> {
    if u.site_count != 1 {
        return Err(invalid("only single-qudit unitaries can be factorized"));
    }
    let d = u.dimension;
    if unitarity_defect(&u.matrix) > 1e-8 {
        return Err(Error::NotUnitary {
            defect: unitarity_defect(&u.matrix),
        });
    }
    let h = hadamard(d)?.into_matrix();
    for steps in (d + 1)..=(2 * d + 2) {
        for _ in 0..8 {
            let x0: Vec<f64> = (0..steps * d + 1)
                .map(|_| rng.random_range(-PI..PI))
                .collect();
            let residual = |x: &[f64], r: &mut Vec<f64>| {
                let v = hp_chain(&h, &x[..steps * d], d);
                let target = &u.matrix * cis(x[steps * d]);
                r.clear();
                for (a, b) in v.iter().zip(target.iter()) {
                    r.push(a.re - b.re);
                    r.push(a.im - b.im);
                }
            };
            let report = levenberg_marquardt(residual, &x0, &LmOptions::default());
            let thetas: Vec<Vec<f64>> = report.x[..steps * d]
                .chunks(d)
                .map(|c| c.iter().map(|t| t.rem_euclid(2.0 * PI)).collect())
                .collect();
            let rebuilt = hp_chain(&h, &thetas.concat(), d);
            let error = max_diff_up_to_phase(rebuilt.as_slice(), u.matrix.as_slice());
            if error < 1e-10 {
                return Ok(HpFactorization { factors: thetas, error });
            }
        }
    }
    Err(invalid("no H·P(θ) factorization converged"))
}

fn hp_chain(h: &CMatrix, thetas: &[f64], d: usize) -> CMatrix {
    let mut acc = CMatrix::identity(d, d);
    for theta in thetas.chunks(d) {
        for (j, t) in theta.iter().enumerate() {
            let ph = cis(*t);
            for i in 0..d {
                acc[(j, i)] *= ph;
            }
        }
        acc = h * acc;
    }
    acc
}

/// Phase-gate angles of an `H P(θ)` chain.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HpFactorization {
    /// `factors[k]` is the `θ` of the `k`-th step (applied in order).
    pub factors: Vec<Vec<f64>>,
    /// Reconstruction error (max entry deviation up to global phase).
    pub error: f64,
}

impl HpFactorization {
    pub fn recompose(&self) -> Result<QuditOperator> {
        let d = self.factors.first().map_or(0, Vec::len);
        let mut acc = QuditOperator::identity(d, 1)?;
        for theta in &self.factors {
            acc = hp(theta)?.compose(&acc)?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_unitary;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-12;

    fn kron(a: &QuditOperator, b: &QuditOperator) -> QuditOperator {
        a.tensor(b).unwrap()
    }

    #[test]
    fn qubit_cases_are_standard() {
        let x = pauli_x(2).unwrap();
        let z = pauli_z(2).unwrap();
        let h = hadamard(2).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let c = |v: f64| Complex64::new(v, 0.0);
        assert!((x.matrix() - CMatrix::from_row_slice(2, 2, &[c(0.), c(1.), c(1.), c(0.)])).camax() < TOL);
        assert!((z.matrix() - CMatrix::from_row_slice(2, 2, &[c(1.), c(0.), c(0.), c(-1.)])).camax() < TOL);
        assert!((h.matrix() - CMatrix::from_row_slice(2, 2, &[c(r), c(r), c(r), c(-r)])).camax() < TOL);
        let cnot = controlled_x(2).unwrap();
        let perm = [0, 1, 3, 2];
        for (col, &row) in perm.iter().enumerate() {
            assert_eq!(cnot.matrix()[(row, col)], ONE);
        }
        let cz = controlled_z(2).unwrap();
        let diag: Vec<_> = (0..4).map(|i| cz.matrix()[(i, i)]).collect();
        assert!(max_abs(&diag, &[c(1.), c(1.), c(1.), c(-1.)]) < TOL);
        assert!(one_level_cz(2).unwrap().distance(&cz) < TOL);
        let z_from_phase = phase_gate(&[0.0, PI]).unwrap();
        assert!(z_from_phase.distance(&z) < TOL);
    }

    fn max_abs(a: &[Complex64], b: &[Complex64]) -> f64 {
        crate::linalg::max_abs_diff(a, b)
    }

    #[test]
    fn qutrit_clock_and_one_level_cz() {
        let w = omega(3);
        let z = pauli_z(3).unwrap();
        let diag: Vec<_> = (0..3).map(|i| z.matrix()[(i, i)]).collect();
        assert!(max_abs(&diag, &[ONE, w, w * w]) < TOL);
        let czbar = one_level_cz(3).unwrap();
        let diag: Vec<_> = (0..9).map(|i| czbar.matrix()[(i, i)]).collect();
        assert!(max_abs(&diag, &[ONE, ONE, ONE, ONE, ONE, ONE, ONE, w, w * w]) < TOL);
        assert!(czbar.pow(3).unwrap().distance(&QuditOperator::identity(3, 2).unwrap()) < TOL);
    }

    #[test]
    fn algebraic_identities_all_dimensions() {
        for d in 2..=6 {
            let x = pauli_x(d).unwrap();
            let z = pauli_z(d).unwrap();
            let h = hadamard(d).unwrap();
            let id1 = QuditOperator::identity(d, 1).unwrap();
            let id2 = QuditOperator::identity(d, 2).unwrap();
            // order d
            assert!(x.pow(d as i64).unwrap().distance(&id1) < TOL);
            assert!(z.pow(d as i64).unwrap().distance(&id1) < TOL);
            // HXH† = Z
            let hxh = h.compose(&x).unwrap().compose(&h.adjoint()).unwrap();
            assert!(hxh.distance(&z) < TOL, "d={d}");
            // Weyl: ZX = ωXZ
            let zx = z.compose(&x).unwrap();
            let xz = x.compose(&z).unwrap();
            assert!((zx.matrix() - xz.matrix() * omega(d)).camax() < TOL);
            // CX = (1⊗H†) CZ (1⊗H)
            let cx = controlled_x(d).unwrap();
            let cz = controlled_z(d).unwrap();
            let via_cz = kron(&id1, &h.adjoint())
                .compose(&cz)
                .unwrap()
                .compose(&kron(&id1, &h))
                .unwrap();
            assert!(via_cz.distance(&cx) < TOL);
            for m in 0..d as i64 {
                let zm = z.pow(m).unwrap();
                let zmi = z.pow(-m).unwrap();
                // CX†(1⊗Z^m)CX = Z^m⊗Z^m
                let lhs = cx.adjoint().compose(&kron(&id1, &zm)).unwrap().compose(&cx).unwrap();
                assert!(lhs.distance(&kron(&zm, &zm)) < TOL);
                // CX(1⊗Z^{-m})CX† = Z^m⊗Z^{-m}
                let lhs = cx.compose(&kron(&id1, &zmi)).unwrap().compose(&cx.adjoint()).unwrap();
                assert!(lhs.distance(&kron(&zm, &zmi)) < TOL);
            }
            for g in [&x, &z, &h, &cx, &cz, &one_level_cz(d).unwrap()] {
                assert!(unitarity_defect(g.matrix()) < TOL);
            }
            assert!(id2.is_unitary());
        }
    }

    #[test]
    fn hadamard_prepares_plus() {
        for d in 2..=6 {
            let h = hadamard(d).unwrap();
            let mut zero = CVector::zeros(d);
            zero[0] = ONE;
            let plus = h.apply(&zero).unwrap();
            let amp = 1.0 / (d as f64).sqrt();
            assert!(plus.iter().all(|a| (a - Complex64::new(amp, 0.0)).norm() < TOL));
        }
    }

    #[test]
    fn small_dimensions_rejected() {
        assert!(pauli_x(1).is_err());
        assert!(hadamard(0).is_err());
        assert!(phase_gate(&[0.3]).is_err());
        assert!(phase_gate(&[0.3, f64::NAN]).is_err());
    }

    #[test]
    fn embedding() {
        let x = pauli_x(3).unwrap();
        assert!(embed(&x, &[0], 1).unwrap().distance(&x) < TOL);
        let z = pauli_z(3).unwrap();
        let id = QuditOperator::identity(3, 1).unwrap();
        assert!(embed(&z, &[1], 2).unwrap().distance(&kron(&id, &z)) < TOL);
        let cz = controlled_z(3).unwrap();
        assert!(embed(&cz, &[1, 0], 2).unwrap().distance(&cz) < TOL);
        // CX is not swap-symmetric
        let cx = controlled_x(3).unwrap();
        assert!(embed(&cx, &[1, 0], 2).unwrap().distance(&cx) > 0.5);
        assert!(embed(&cz, &[0, 0], 2).is_err());
        assert!(embed(&cz, &[0, 2], 2).is_err());
        // three sites, operator on the outer ones
        let e = embed(&cx, &[2, 0], 3).unwrap();
        let swapped = embed(&id, &[1], 3).unwrap();
        assert!(e.compose(&swapped).unwrap().is_unitary());
        // |a,b,c⟩ with control c, target a
        let mut digits = [0usize; 3];
        for col in 0..27 {
            to_digits(col, 3, &mut digits);
            let want = [(digits[0] + digits[2]) % 3, digits[1], digits[2]];
            assert_eq!(e.matrix()[(from_digits(&want, 3), col)], ONE);
        }
    }

    #[test]
    fn phase_gate_cases() {
        let id = QuditOperator::identity(4, 1).unwrap();
        assert!(phase_gate(&[0.0; 4]).unwrap().distance(&id) < TOL);
    }

    #[test]
    fn hp_factorization_of_random_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for d in [2, 3] {
            for _ in 0..5 {
                let u = QuditOperator::unitary(d, 1, random_unitary(d, &mut rng)).unwrap();
                let f = hp_factorize(&u, &mut rng).unwrap();
                assert!(f.recompose().unwrap().distance_up_to_phase(&u) < 1e-8);
            }
        }
    }
}
