use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hamiltonian::{qubit_cost_split, qubit_count, qudit_cost_hamiltonian, qudit_size, QUBIT_LAYER_CAP};
use super::instance::ColoringInstance;
use crate::error::{Error, Result};
use crate::linalg::{cis, CMatrix, ONE, ZERO};
use crate::qudit::QuditOperator;

/// Tolerance for the product form against the exponential.
pub const LAYER_TOLERANCE: f64 = 1e-10;
/// Largest register `to_operator` will densify.
pub const DENSE_CAP: usize = 1024;

/// Generalized permutation `|x⟩ ↦ phase[x] |perm[x]⟩`. Products of `CX` and
/// diagonal gates stay in this form, so the gate product is composed exactly
/// without dense matrices.
#[derive(Clone, Debug)]
pub(crate) struct Monomial {
    perm: Vec<usize>,
    phase: Vec<Complex64>,
}

impl Monomial {
    pub(crate) fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
            phase: vec![ONE; n],
        }
    }

    /// Applies the permutation `f` after `self`.
    pub(crate) fn then_permute(&mut self, f: impl Fn(usize) -> usize) {
        for p in &mut self.perm {
            *p = f(*p);
        }
    }

    /// Applies the diagonal `g` after `self`.
    pub(crate) fn then_phase(&mut self, g: impl Fn(usize) -> Complex64) {
        for (z, &p) in self.phase.iter_mut().zip(&self.perm) {
            *z *= g(p);
        }
    }

    /// Diagonal entries, if the permutation is trivial.
    pub(crate) fn diagonal(&self) -> Option<&[Complex64]> {
        self.perm
            .iter()
            .enumerate()
            .all(|(i, &p)| i == p)
            .then_some(self.phase.as_slice())
    }
}

/// A diagonal cost-layer unitary built as a gate product and checked
/// against the exponential of the Hamiltonian.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LayerUnitary {
    /// Dimension of each site (2 for the one-hot register).
    pub d: usize,
    pub sites: usize,
    /// Diagonal of the gate product.
    pub phases: Vec<Complex64>,
    /// Number of `CX · P · CX` blocks in the product.
    pub gate_count: usize,
    /// Global phase `γ` with product `= e^{iγ} exp(i·angle·H)`.
    pub global_phase: f64,
    /// Largest entrywise difference after removing `γ`.
    pub max_deviation: f64,
}

impl LayerUnitary {
    pub fn to_operator(&self) -> Result<QuditOperator> {
        let n = self.phases.len();
        if n > DENSE_CAP {
            return Err(Error::SizeCap {
                what: "dense layer unitary",
                size: n,
                cap: DENSE_CAP,
            });
        }
        let m = CMatrix::from_fn(n, n, |i, j| if i == j { self.phases[i] } else { ZERO });
        QuditOperator::unitary(self.d, self.sites, m)
    }
}

fn compare(product: &Monomial, exact: &[f64], angle: f64, global_phase: f64) -> Result<f64> {
    let diag = product
        .diagonal()
        .ok_or_else(|| Error::Verification("gate product is not diagonal".into()))?;
    let dev = diag
        .iter()
        .zip(exact)
        .map(|(z, e)| (z - cis(global_phase + angle * e)).norm())
        .fold(0.0, f64::max);
    if dev > LAYER_TOLERANCE {
        return Err(Error::Verification(format!(
            "gate product differs from the exponential by {dev:.3e}"
        )));
    }
    Ok(dev)
}

/// `e^{iβH₁}` for the one-hot register as `|V|·C(k,2) + k|E|` blocks
/// `CX (1 ⊗ e^{iθZ}) CX`, one per `ZZ` coupling, using
/// `e^{iθ Z⊗Z} = CX (1 ⊗ e^{iθZ}) CX`.
pub fn qubit_layer_unitary(beta: f64, inst: &ColoringInstance) -> Result<LayerUnitary> {
    let bits = qubit_count(inst, QUBIT_LAYER_CAP)?;
    let k = inst.k;
    let mask = |q: usize| 1usize << (bits - 1 - q);
    let mut couplings = Vec::new();
    for v in 0..inst.vertex_count() {
        for i in 0..k {
            for j in i + 1..k {
                couplings.push((k * v + i, k * v + j, inst.penalty / 2.0));
            }
        }
    }
    for &(u, v) in inst.edges() {
        for i in 0..k {
            couplings.push((k * u + i, k * v + i, inst.conflict / 4.0));
        }
    }
    let mut product = Monomial::identity(1 << bits);
    for &(c, t, w) in &couplings {
        let cx = |x: usize| if x & mask(c) != 0 { x ^ mask(t) } else { x };
        product.then_permute(cx);
        let theta = beta * w;
        product.then_phase(|x| cis(if x & mask(t) != 0 { -theta } else { theta }));
        product.then_permute(cx);
    }
    let (_, h1) = qubit_cost_split(inst)?;
    let max_deviation = compare(&product, &h1, beta, 0.0)?;
    Ok(LayerUnitary {
        d: 2,
        sites: bits,
        phases: product.phase,
        gate_count: couplings.len(),
        global_phase: 0.0,
        max_deviation,
    })
}

/// `e^{iαH_C}` for the qudit register as one `CX P(α) CX†` block per edge,
/// where `P(α)` multiplies `|0⟩` of the target by `e^{iαk}`.
///
/// The `i = 0` term of the cost contributes `k` per edge on every state,
/// and `P(α)` puts that same `k` only on conflicting pairs, so the product
/// equals the exponential exactly: `γ = 0`.
pub fn qudit_layer_unitary(alpha: f64, inst: &ColoringInstance) -> Result<LayerUnitary> {
    let size = qudit_size(inst)?;
    let k = inst.k;
    let n = inst.vertex_count();
    let stride = |v: usize| k.pow((n - 1 - v) as u32);
    let mut product = Monomial::identity(size);
    for &(c, t) in inst.edges() {
        let (sc, st) = (stride(c), stride(t));
        let shift = |x: usize, sign: usize| {
            let (xc, xt) = ((x / sc) % k, (x / st) % k);
            x - xt * st + ((xt + sign * xc) % k) * st
        };
        // CX† acts first.
        product.then_permute(|x| shift(x, k - 1));
        product.then_phase(|x| if (x / st) % k == 0 { cis(alpha * k as f64) } else { ONE });
        product.then_permute(|x| shift(x, 1));
    }
    let h = qudit_cost_hamiltonian(inst)?;
    let max_deviation = compare(&product, &h.diagonal, alpha, 0.0)?;
    Ok(LayerUnitary {
        d: k,
        sites: n,
        phases: product.phase,
        gate_count: inst.edges().len(),
        global_phase: 0.0,
        max_deviation,
    })
}
