use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cis, unitarity_defect, CMatrix, ZERO};

const UNITARY_TOL: f64 = 1e-8;

/// A variable beamsplitter on adjacent modes `(mode, mode + 1)`.
///
/// Acts on the pair as `[[e^{iφ}cos θ, −sin θ], [e^{iφ}sin θ, cos θ]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Beamsplitter {
    pub mode: usize,
    pub theta: f64,
    pub phi: f64,
}

/// The 2×2 block of a beamsplitter.
pub fn beamsplitter(theta: f64, phi: f64) -> CMatrix {
    let (s, c) = theta.sin_cos();
    let e = cis(phi);
    CMatrix::from_row_slice(
        2,
        2,
        &[e * c, Complex64::new(-s, 0.0), e * s, Complex64::new(c, 0.0)],
    )
}

impl Beamsplitter {
    /// The beamsplitter as a full `modes × modes` matrix.
    pub fn matrix(&self, modes: usize) -> CMatrix {
        let mut m = CMatrix::identity(modes, modes);
        let b = beamsplitter(self.theta, self.phi);
        let k = self.mode;
        m[(k, k)] = b[(0, 0)];
        m[(k, k + 1)] = b[(0, 1)];
        m[(k + 1, k)] = b[(1, 0)];
        m[(k + 1, k + 1)] = b[(1, 1)];
        m
    }
}

/// Rectangular nearest-neighbour mesh followed by output phases.
///
/// `beamsplitters` are listed in the order light meets them, so the
/// implemented unitary is `diag(e^{i·output_phases}) · T_K ⋯ T_1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeamsplitterMesh {
    pub modes: usize,
    pub beamsplitters: Vec<Beamsplitter>,
    pub output_phases: Vec<f64>,
}

impl BeamsplitterMesh {
    pub fn recompose(&self) -> CMatrix {
        let mut u = CMatrix::identity(self.modes, self.modes);
        for bs in &self.beamsplitters {
            apply_left(&mut u, bs);
        }
        for (k, &p) in self.output_phases.iter().enumerate() {
            let e = cis(p);
            for c in 0..self.modes {
                u[(k, c)] *= e;
            }
        }
        u
    }
}

/// `u ← T · u`
fn apply_left(u: &mut CMatrix, bs: &Beamsplitter) {
    let b = beamsplitter(bs.theta, bs.phi);
    let (i, j) = (bs.mode, bs.mode + 1);
    for c in 0..u.ncols() {
        let (x, y) = (u[(i, c)], u[(j, c)]);
        u[(i, c)] = b[(0, 0)] * x + b[(0, 1)] * y;
        u[(j, c)] = b[(1, 0)] * x + b[(1, 1)] * y;
    }
}

/// `u ← u · T†`
fn apply_right_inverse(u: &mut CMatrix, bs: &Beamsplitter) {
    let b = beamsplitter(bs.theta, bs.phi).adjoint();
    let (i, j) = (bs.mode, bs.mode + 1);
    for r in 0..u.nrows() {
        let (x, y) = (u[(r, i)], u[(r, j)]);
        u[(r, i)] = x * b[(0, 0)] + y * b[(1, 0)];
        u[(r, j)] = x * b[(0, 1)] + y * b[(1, 1)];
    }
}

// Chooses T on columns (n, n+1) so that (u·T†)[m, n] = 0.
fn null_right(m: usize, n: usize, u: &CMatrix) -> Beamsplitter {
    let (a, b) = (u[(m, n)], u[(m, n + 1)]);
    let (theta, phi) = if a == ZERO || a.norm() < 1e-15 {
        (0.0, 0.0)
    } else if b == ZERO {
        (PI / 2.0, 0.0)
    } else {
        let r = a / b;
        (r.norm().atan(), r.arg())
    };
    Beamsplitter { mode: n, theta, phi }
}

// Chooses T on rows (n-1, n) so that (T·u)[n, m] = 0.
fn null_left(n: usize, m: usize, u: &CMatrix) -> Beamsplitter {
    let (a, b) = (u[(n, m)], u[(n - 1, m)]);
    let (theta, phi) = if a == ZERO || a.norm() < 1e-15 {
        (0.0, 0.0)
    } else if b == ZERO {
        (PI / 2.0, 0.0)
    } else {
        let r = -a / b;
        (r.norm().atan(), r.arg())
    };
    Beamsplitter { mode: n - 1, theta, phi }
}

/// Rewrites `T† · D` as `D' · T'`, updating `phases` in place.
fn commute_phases(bs: &Beamsplitter, phases: &mut [f64]) -> Beamsplitter {
    let (m, n) = (bs.mode, bs.mode + 1);
    let (alpha, beta) = (phases[m], phases[n]);
    if bs.theta == 0.0 {
        phases[m] = alpha - bs.phi;
        return Beamsplitter { phi: 0.0, ..*bs };
    }
    phases[m] = beta - bs.phi + PI;
    Beamsplitter {
        phi: (alpha - beta + PI).rem_euclid(2.0 * PI),
        ..*bs
    }
}

/// Decomposes a unitary into `d(d−1)/2` nearest-neighbour beamsplitters in
/// the rectangular arrangement, plus output phases.
pub fn clements_compile(u: &CMatrix) -> Result<BeamsplitterMesh> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch {
            expected: u.nrows(),
            found: u.ncols(),
        });
    }
    let defect = unitarity_defect(u);
    if defect > UNITARY_TOL {
        return Err(Error::NotUnitary { defect });
    }
    let n = u.nrows();
    let mut v = u.clone();
    let mut right = Vec::new();
    let mut left = Vec::new();
    for (k, i) in (0..n.saturating_sub(1)).rev().enumerate() {
        if k % 2 == 0 {
            for j in (0..n - 1 - i).rev() {
                let bs = null_right(i + j + 1, j, &v);
                apply_right_inverse(&mut v, &bs);
                right.push(bs);
            }
        } else {
            for j in 0..n - 1 - i {
                let bs = null_left(i + j + 1, j, &v);
                apply_left(&mut v, &bs);
                left.push(bs);
            }
        }
    }
    // v is now diagonal: u = L⁻¹ · v · R⁻¹. Push the phases through L⁻¹.
    let mut phases: Vec<f64> = (0..n).map(|k| v[(k, k)].arg()).collect();
    let mut moved: Vec<Beamsplitter> = left
        .iter()
        .rev()
        .map(|bs| commute_phases(bs, &mut phases))
        .collect();
    let mut beamsplitters = right;
    beamsplitters.append(&mut moved);
    for p in &mut phases {
        *p = p.rem_euclid(2.0 * PI);
    }
    Ok(BeamsplitterMesh {
        modes: n,
        beamsplitters,
        output_phases: phases,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, random_unitary, ONE};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn check(u: &CMatrix) -> BeamsplitterMesh {
        let mesh = clements_compile(u).unwrap();
        let n = u.nrows();
        assert_eq!(mesh.beamsplitters.len(), n * (n - 1) / 2);
        assert!(mesh.beamsplitters.iter().all(|b| b.mode + 1 < n));
        let back = mesh.recompose();
        assert!(max_abs_diff(back.as_slice(), u.as_slice()) < 1e-10);
        mesh
    }

    #[test]
    fn random_unitaries_recompose() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=8 {
            for _ in 0..5 {
                check(&random_unitary(n, &mut rng));
            }
        }
    }

    #[test]
    fn identity_gives_trivial_mesh() {
        for n in 2..=6 {
            let mesh = check(&CMatrix::identity(n, n));
            for bs in &mesh.beamsplitters {
                let b = beamsplitter(bs.theta, bs.phi);
                assert!((b - CMatrix::identity(2, 2)).iter().all(|z| z.norm() < 1e-12));
            }
            assert!(mesh.output_phases.iter().all(|p| p.abs() < 1e-12));
        }
    }

    #[test]
    fn permutations_and_diagonals_recompose() {
        let mut p = CMatrix::zeros(4, 4);
        for (r, c) in [(0, 2), (1, 0), (2, 3), (3, 1)] {
            p[(r, c)] = ONE;
        }
        check(&p);
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(5, |k, _| cis(0.7 * k as f64)));
        check(&d);
    }

    #[test]
    fn non_unitary_rejected() {
        let m = CMatrix::from_element(2, 2, ONE);
        assert!(matches!(clements_compile(&m), Err(Error::NotUnitary { .. })));
        assert!(clements_compile(&CMatrix::zeros(2, 3)).is_err());
    }
}
