use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::permanent::permanent_unchecked;
use super::state::{FockBasis, FockState};
use crate::error::{invalid, Error, Result};
use crate::linalg::{binomial, factorial, unitarity_defect, CMatrix, CVector, ONE, ZERO};

const UNITARY_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-10;

/// A linear interferometer on `M` modes.
///
/// Only matrices built through [`Interferometer::unitary`] (or the identity)
/// carry the unitary flag; the synthesis optimizer works with arbitrary
/// square matrices through [`Interferometer::new`].
#[derive(Clone, Debug, PartialEq)]
pub struct Interferometer {
    matrix: CMatrix,
    unitary: bool,
}

impl Interferometer {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        Ok(Self {
            matrix,
            unitary: false,
        })
    }

    pub fn unitary(matrix: CMatrix) -> Result<Self> {
        let mut me = Self::new(matrix)?;
        let defect = unitarity_defect(&me.matrix);
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary { defect });
        }
        me.unitary = true;
        Ok(me)
    }

    pub fn identity(modes: usize) -> Self {
        Self {
            matrix: CMatrix::identity(modes, modes),
            unitary: true,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn mode_count(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    /// `next ∘ self`: `self` acts first.
    pub fn then(&self, next: &Interferometer) -> Result<Interferometer> {
        if next.mode_count() != self.mode_count() {
            return Err(Error::DimensionMismatch {
                expected: self.mode_count(),
                found: next.mode_count(),
            });
        }
        Ok(Self {
            matrix: &next.matrix * &self.matrix,
            unitary: self.unitary && next.unitary,
        })
    }

    /// Places `self` on `modes` of a `total`-mode interferometer, identity elsewhere.
    pub fn embed(&self, modes: &[usize], total: usize) -> Result<Interferometer> {
        if modes.len() != self.mode_count() {
            return Err(Error::DimensionMismatch {
                expected: self.mode_count(),
                found: modes.len(),
            });
        }
        check_distinct(modes, total)?;
        let mut m = CMatrix::identity(total, total);
        for (a, &i) in modes.iter().enumerate() {
            for (b, &j) in modes.iter().enumerate() {
                m[(i, j)] = self.matrix[(a, b)];
            }
        }
        Ok(Self {
            matrix: m,
            unitary: self.unitary,
        })
    }
}

fn check_distinct(modes: &[usize], total: usize) -> Result<()> {
    let mut seen = vec![false; total];
    for &m in modes {
        if m >= total {
            return Err(invalid(format!("mode {m} out of range for {total} modes")));
        }
        if std::mem::replace(&mut seen[m], true) {
            return Err(invalid(format!("mode {m} listed twice")));
        }
    }
    Ok(())
}

/// Amplitudes over a fixed-photon-number Fock basis.
#[derive(Clone, Debug)]
pub struct StateVector {
    basis: Arc<FockBasis>,
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(basis: Arc<FockBasis>, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: amplitudes.len(),
            });
        }
        Ok(Self { basis, amplitudes })
    }

    /// The basis state `state` with amplitude 1.
    pub fn basis_state(state: &FockState) -> Self {
        let basis = FockBasis::shared(state.mode_count(), state.photon_count());
        let mut amplitudes = CVector::zeros(basis.len());
        amplitudes[basis.index_of(state).expect("state in its own basis")] = ONE;
        Self { basis, amplitudes }
    }

    /// Superposition of Fock states that share mode and photon counts.
    pub fn from_terms(terms: &[(FockState, Complex64)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| invalid("a state needs at least one term"))?;
        let basis = FockBasis::shared(first.0.mode_count(), first.0.photon_count());
        let mut amplitudes = CVector::zeros(basis.len());
        for (s, a) in terms {
            let i = basis.index_of(s).ok_or_else(|| {
                invalid(format!("{s:?} is outside the basis of the first term"))
            })?;
            amplitudes[i] += a;
        }
        Ok(Self { basis, amplitudes })
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, state: &FockState) -> Complex64 {
        self.basis
            .index_of(state)
            .map_or(ZERO, |i| self.amplitudes[i])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    /// Nonzero terms in basis order.
    pub fn terms(&self) -> impl Iterator<Item = (&FockState, Complex64)> + '_ {
        self.basis
            .states()
            .iter()
            .zip(self.amplitudes.iter())
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(s, a)| (s, *a))
    }

    /// Applies `u` linearly without requiring unitarity or normalization.
    pub fn apply(&self, u: &CMatrix) -> Result<StateVector> {
        let modes = self.basis.mode_count();
        if u.nrows() != modes || u.ncols() != modes {
            return Err(Error::DimensionMismatch {
                expected: modes,
                found: u.nrows(),
            });
        }
        let inputs: Vec<(usize, Complex64)> = self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(i, a)| (i, *a))
            .collect();
        let states = self.basis.states();
        let out: Vec<Complex64> = states
            .par_iter()
            .map(|m| {
                inputs
                    .iter()
                    .map(|&(i, a)| {
                        AmplitudeKernel::new(&states[i], m)
                            .map_or(ZERO, |k| k.amplitude(u) * a)
                    })
                    .sum()
            })
            .collect();
        Ok(StateVector {
            basis: self.basis.clone(),
            amplitudes: CVector::from_vec(out),
        })
    }
}

/// `⟨output| U |input⟩`, through the permanent of the repeated-index matrix.
///
/// Zero when the photon numbers differ.
pub fn fock_amplitude(
    u: &Interferometer,
    input: &FockState,
    output: &FockState,
) -> Result<Complex64> {
    let m = u.mode_count();
    for s in [input, output] {
        if s.mode_count() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: s.mode_count(),
            });
        }
    }
    if input.photon_count() != output.photon_count() {
        return Ok(ZERO);
    }
    let rows = output.mode_list();
    let cols = input.mode_list();
    let sub = CMatrix::from_fn(rows.len(), cols.len(), |a, b| u.matrix()[(rows[a], cols[b])]);
    let norm: f64 = input
        .occupations()
        .iter()
        .chain(output.occupations())
        .map(|&n| factorial(n))
        .product();
    Ok(permanent_unchecked(&sub) / norm.sqrt())
}

/// Unitary evolution of a normalized state through a unitary interferometer.
pub fn evolve(u: &Interferometer, psi: &StateVector) -> Result<StateVector> {
    if !u.is_unitary() {
        return Err(invalid("evolve requires a unitary interferometer"));
    }
    if !psi.is_normalized() {
        return Err(invalid(format!(
            "evolve requires a normalized state (norm² = {})",
            psi.norm_sqr()
        )));
    }
    psi.apply(u.matrix())
}

/// Fock-space matrix of `u` on `basis` (`T[m, n] = ⟨m|U|n⟩`).
pub fn transition_matrix(u: &CMatrix, basis: &FockBasis) -> CMatrix {
    let states = basis.states();
    let n = states.len();
    let cols: Vec<Vec<Complex64>> = states
        .par_iter()
        .map(|input| {
            states
                .iter()
                .map(|output| {
                    AmplitudeKernel::new(input, output).map_or(ZERO, |k| k.amplitude(u))
                })
                .collect()
        })
        .collect();
    CMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Outcome of a photon-number-resolved postselection.
#[derive(Clone, Debug)]
pub enum Postselection {
    /// The renormalized conditional state on the remaining modes.
    Success {
        state: StateVector,
        probability: f64,
    },
    /// The requested pattern has zero probability.
    ZeroProbability,
}

impl Postselection {
    pub fn probability(&self) -> f64 {
        match self {
            Postselection::Success { probability, .. } => *probability,
            Postselection::ZeroProbability => 0.0,
        }
    }

    pub fn state(&self) -> Option<&StateVector> {
        match self {
            Postselection::Success { state, .. } => Some(state),
            Postselection::ZeroProbability => None,
        }
    }
}

/// Projects `ancilla_modes` onto the occupation `pattern`.
pub fn postselect(psi: &StateVector, ancilla_modes: &[usize], pattern: &[u32]) -> Result<Postselection> {
    let (state, probability) = project(psi, ancilla_modes, pattern)?;
    Ok(match state {
        Some(s) if probability > 0.0 => {
            let scale = Complex64::new(probability.sqrt().recip(), 0.0);
            Postselection::Success {
                state: StateVector {
                    basis: s.basis,
                    amplitudes: s.amplitudes * scale,
                },
                probability,
            }
        }
        _ => Postselection::ZeroProbability,
    })
}

/// Unnormalized projection; `None` when no basis state can match.
fn project(
    psi: &StateVector,
    ancilla_modes: &[usize],
    pattern: &[u32],
) -> Result<(Option<StateVector>, f64)> {
    let modes = psi.basis.mode_count();
    if ancilla_modes.len() != pattern.len() {
        return Err(Error::DimensionMismatch {
            expected: ancilla_modes.len(),
            found: pattern.len(),
        });
    }
    check_distinct(ancilla_modes, modes)?;
    let kept: Vec<usize> = (0..modes).filter(|m| !ancilla_modes.contains(m)).collect();
    let heralded: usize = pattern.iter().map(|&n| n as usize).sum();
    let Some(remaining) = psi.basis.photon_count().checked_sub(heralded) else {
        return Ok((None, 0.0));
    };
    let basis = FockBasis::shared(kept.len(), remaining);
    let mut amps = CVector::zeros(basis.len());
    for (s, a) in psi.terms() {
        let occ = s.occupations();
        if ancilla_modes.iter().zip(pattern).all(|(&m, &p)| occ[m] == p) {
            let reduced = FockState::new(kept.iter().map(|&m| occ[m]).collect());
            amps[basis.index_of(&reduced).expect("reduced state in basis")] += a;
        }
    }
    let probability = amps.norm_squared();
    Ok((
        Some(StateVector {
            basis,
            amplitudes: amps,
        }),
        probability,
    ))
}

/// A pure state whose components may carry different total photon numbers.
///
/// Linear optics never mixes photon-number sectors, so each sector is held
/// and evolved separately.
#[derive(Clone, Debug)]
pub struct FockSuperposition {
    modes: usize,
    sectors: BTreeMap<usize, StateVector>,
}

impl FockSuperposition {
    pub fn from_terms(modes: usize, terms: &[(FockState, Complex64)]) -> Result<Self> {
        let mut by_sector: BTreeMap<usize, Vec<(FockState, Complex64)>> = BTreeMap::new();
        for (s, a) in terms {
            if s.mode_count() != modes {
                return Err(Error::DimensionMismatch {
                    expected: modes,
                    found: s.mode_count(),
                });
            }
            by_sector
                .entry(s.photon_count())
                .or_default()
                .push((s.clone(), *a));
        }
        let sectors = by_sector
            .into_iter()
            .map(|(n, t)| Ok((n, StateVector::from_terms(&t)?)))
            .collect::<Result<_>>()?;
        Ok(Self { modes, sectors })
    }

    pub fn mode_count(&self) -> usize {
        self.modes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.sectors.values().map(StateVector::norm_sqr).sum()
    }

    pub fn amplitude(&self, state: &FockState) -> Complex64 {
        self.sectors
            .get(&state.photon_count())
            .map_or(ZERO, |s| s.amplitude(state))
    }

    /// Tensor product with a fixed Fock state on additional (trailing) modes.
    pub fn with_ancillas(&self, ancilla: &FockState) -> Result<Self> {
        let terms: Vec<_> = self
            .sectors
            .values()
            .flat_map(|s| s.terms().map(|(f, a)| (f.concat(ancilla), a)).collect::<Vec<_>>())
            .collect();
        Self::from_terms(self.modes + ancilla.mode_count(), &terms)
    }

    pub fn apply(&self, u: &CMatrix) -> Result<Self> {
        let sectors = self
            .sectors
            .iter()
            .map(|(&n, s)| Ok((n, s.apply(u)?)))
            .collect::<Result<_>>()?;
        Ok(Self {
            modes: self.modes,
            sectors,
        })
    }

    /// Postselection across all sectors. Returns the renormalized conditional
    /// state and the success probability (relative to the current norm).
    pub fn postselect(
        &self,
        ancilla_modes: &[usize],
        pattern: &[u32],
    ) -> Result<Option<(FockSuperposition, f64)>> {
        let total = self.norm_sqr();
        let mut sectors = BTreeMap::new();
        let mut weight = 0.0;
        for s in self.sectors.values() {
            if let (Some(p), w) = project(s, ancilla_modes, pattern)? {
                if w > 0.0 {
                    weight += w;
                    sectors.insert(p.basis.photon_count(), p);
                }
            }
        }
        if weight == 0.0 {
            return Ok(None);
        }
        let scale = Complex64::new(weight.sqrt().recip(), 0.0);
        for s in sectors.values_mut() {
            s.amplitudes *= scale;
        }
        Ok(Some((
            FockSuperposition {
                modes: self.modes - ancilla_modes.len(),
                sectors,
            },
            weight / total,
        )))
    }
}

/// Precomputed evaluation plan for one transition amplitude `⟨output|U|input⟩`.
///
/// Uses Ryser's formula over the *distinct* input modes with multiplicities,
/// so repeated photons cost `∏(n_j + 1)` terms instead of `2^N`. Also yields
/// the holomorphic derivative with respect to every entry of `u` that the
/// amplitude depends on.
#[derive(Clone, Debug)]
pub struct AmplitudeKernel {
    rows: Vec<(usize, u32)>,
    cols: Vec<(usize, u32)>,
    scale: f64,
    photons: u32,
    col_binomials: Vec<Vec<f64>>,
}

impl AmplitudeKernel {
    /// `None` when the photon numbers differ (the amplitude is identically zero).
    pub fn new(input: &FockState, output: &FockState) -> Option<Self> {
        if input.photon_count() != output.photon_count() {
            return None;
        }
        let distinct = |s: &FockState| -> Vec<(usize, u32)> {
            s.occupations()
                .iter()
                .enumerate()
                .filter(|(_, &n)| n > 0)
                .map(|(i, &n)| (i, n))
                .collect()
        };
        let rows = distinct(output);
        let cols = distinct(input);
        let norm: f64 = rows
            .iter()
            .chain(&cols)
            .map(|&(_, n)| factorial(n))
            .product();
        let col_binomials = cols
            .iter()
            .map(|&(_, n)| (0..=n).map(|s| binomial(n as u64, s as u64) as f64).collect())
            .collect();
        Some(Self {
            rows,
            cols,
            scale: norm.sqrt().recip(),
            photons: input.photon_count() as u32,
            col_binomials,
        })
    }

    /// Distinct output modes with multiplicities.
    pub fn rows(&self) -> &[(usize, u32)] {
        &self.rows
    }

    /// Distinct input modes with multiplicities.
    pub fn cols(&self) -> &[(usize, u32)] {
        &self.cols
    }

    pub fn amplitude(&self, u: &CMatrix) -> Complex64 {
        self.evaluate(u, None)
    }

    /// Returns the amplitude and writes `∂amp/∂u[row_a, col_b]` to
    /// `grad[a * cols.len() + b]`.
    pub fn amplitude_and_gradient(&self, u: &CMatrix, grad: &mut Vec<Complex64>) -> Complex64 {
        grad.clear();
        grad.resize(self.rows.len() * self.cols.len(), ZERO);
        self.evaluate(u, Some(grad))
    }

    fn evaluate(&self, u: &CMatrix, mut grad: Option<&mut Vec<Complex64>>) -> Complex64 {
        if self.photons == 0 {
            return ONE;
        }
        let nr = self.rows.len();
        let nc = self.cols.len();
        let mut s = vec![0u32; nc];
        let mut dir = vec![true; nc];
        let mut r = vec![ZERO; nr];
        let mut prefix = vec![ONE; nr + 1];
        let mut total = ZERO;
        let mut size = 0u32;
        loop {
            // Advance the reflected mixed-radix Gray code by one digit step.
            let mut j = 0;
            while j < nc {
                let max = self.cols[j].1;
                if dir[j] && s[j] < max {
                    s[j] += 1;
                    size += 1;
                    let col = self.cols[j].0;
                    for (a, ra) in r.iter_mut().enumerate() {
                        *ra += u[(self.rows[a].0, col)];
                    }
                    break;
                } else if !dir[j] && s[j] > 0 {
                    s[j] -= 1;
                    size -= 1;
                    let col = self.cols[j].0;
                    for (a, ra) in r.iter_mut().enumerate() {
                        *ra -= u[(self.rows[a].0, col)];
                    }
                    break;
                }
                dir[j] = !dir[j];
                j += 1;
            }
            if j == nc {
                break;
            }
            let mut weight: f64 = s
                .iter()
                .zip(&self.col_binomials)
                .map(|(&sj, b)| b[sj as usize])
                .product();
            if (self.photons - size) % 2 == 1 {
                weight = -weight;
            }
            for a in 0..nr {
                prefix[a + 1] = prefix[a] * r[a].powu(self.rows[a].1);
            }
            total += prefix[nr] * weight;
            if let Some(g) = grad.as_deref_mut() {
                let mut suffix = ONE;
                for a in (0..nr).rev() {
                    let m = self.rows[a].1;
                    let d = r[a].powu(m - 1) * f64::from(m) * prefix[a] * suffix * weight;
                    suffix *= r[a].powu(m);
                    let row = &mut g[a * nc..(a + 1) * nc];
                    for (b, gb) in row.iter_mut().enumerate() {
                        if s[b] > 0 {
                            *gb += d * f64::from(s[b]);
                        }
                    }
                }
            }
        }
        if let Some(g) = grad {
            for x in g.iter_mut() {
                *x *= self.scale;
            }
        }
        total * self.scale
    }
}
