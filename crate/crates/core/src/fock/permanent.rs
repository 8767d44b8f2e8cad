use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, ONE, ZERO};

/// Matrix permanent by Ryser's formula with Gray-code subset ordering,
/// `O(2^k · k)` for a `k × k` matrix. The empty matrix has permanent 1.
pub fn permanent(a: &CMatrix) -> Result<Complex64> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    Ok(permanent_unchecked(a))
}

/// [`permanent`] without the shape check. Panics on non-square input.
pub fn permanent_unchecked(a: &CMatrix) -> Complex64 {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    if n == 0 {
        return ONE;
    }
    assert!(n < 64, "permanent of a {n}x{n} matrix is out of reach");

    // Per(A) = Σ_{S ⊆ cols} (−1)^{n−|S|} ∏_i Σ_{j∈S} a_ij
    let mut row_sums = vec![ZERO; n];
    let mut total = ZERO;
    let mut gray: u64 = 0;
    for k in 1u64..(1u64 << n) {
        let j = k.trailing_zeros() as usize;
        gray ^= 1 << j;
        if gray & (1 << j) != 0 {
            for (i, r) in row_sums.iter_mut().enumerate() {
                *r += a[(i, j)];
            }
        } else {
            for (i, r) in row_sums.iter_mut().enumerate() {
                *r -= a[(i, j)];
            }
        }
        let prod: Complex64 = row_sums.iter().product();
        if (n - gray.count_ones() as usize).is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_complex_matrix;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Definition: sum over all permutations.
    fn brute_force(a: &CMatrix) -> Complex64 {
        fn rec(a: &CMatrix, row: usize, used: &mut Vec<bool>) -> Complex64 {
            let n = a.nrows();
            if row == n {
                return ONE;
            }
            let mut s = ZERO;
            for j in 0..n {
                if !used[j] {
                    used[j] = true;
                    s += a[(row, j)] * rec(a, row + 1, used);
                    used[j] = false;
                }
            }
            s
        }
        rec(a, 0, &mut vec![false; a.nrows()])
    }

    #[test]
    fn small_cases() {
        assert_eq!(permanent(&CMatrix::identity(2, 2)).unwrap(), ONE);
        assert_eq!(permanent(&CMatrix::zeros(0, 0)).unwrap(), ONE);
        let (a, b, c, d) = (
            Complex64::new(1.0, 2.0),
            Complex64::new(-0.5, 0.3),
            Complex64::new(0.0, 1.0),
            Complex64::new(2.0, -1.0),
        );
        let m = CMatrix::from_row_slice(2, 2, &[a, b, c, d]);
        assert!((permanent(&m).unwrap() - (a * d + b * c)).norm() < 1e-14);
    }

    #[test]
    fn all_ones_4x4_is_24() {
        let ones = CMatrix::from_element(4, 4, ONE);
        // brute-force oracle first, then Ryser
        assert!((brute_force(&ones) - Complex64::new(24.0, 0.0)).norm() < 1e-12);
        assert!((permanent(&ones).unwrap() - Complex64::new(24.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn non_square_rejected() {
        assert!(permanent(&CMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn agrees_with_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=7 {
            let m = random_complex_matrix(n, n, &mut rng);
            let want = brute_force(&m);
            assert!((permanent(&m).unwrap() - want).norm() < 1e-10 * want.norm().max(1.0));
        }
    }

    proptest! {
        #[test]
        fn transpose_invariant(seed in any::<u64>(), n in 1usize..=6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_complex_matrix(n, n, &mut rng);
            let a = permanent(&m).unwrap();
            let b = permanent(&m.transpose()).unwrap();
            prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0));
        }
    }
}
