use serde::{Deserialize, Serialize};

use super::instance::ColoringInstance;
use crate::error::{invalid, Error, Result};
use crate::qudit::{omega_pow, register_size, to_digits};

/// Largest one-hot register (`k|V|` qubits) for the cost Hamiltonian.
pub const QUBIT_CAP: usize = 14;
/// Largest one-hot register for the layer decomposition check.
pub const QUBIT_LAYER_CAP: usize = 12;
/// Largest qudit register `k^{|V|}`.
pub const QUDIT_CAP: usize = 59_049;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    /// One-hot encoding, `k` qubits per vertex.
    Qubit,
    /// One `k`-level qudit per vertex.
    Qudit,
}

impl std::str::FromStr for Formulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qubit" => Ok(Self::Qubit),
            "qudit" => Ok(Self::Qudit),
            other => Err(invalid(format!("unknown formulation `{other}` (qubit or qudit)"))),
        }
    }
}

/// Diagonal Hamiltonian over the computational basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostHamiltonian {
    pub formulation: Formulation,
    pub diagonal: Vec<f64>,
}

impl CostHamiltonian {
    pub fn len(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonal.is_empty()
    }

    pub fn ground_energy(&self) -> f64 {
        self.diagonal.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Basis indices within `tol` of the ground energy.
    pub fn ground_states(&self, tol: f64) -> Vec<usize> {
        let e0 = self.ground_energy();
        (0..self.len()).filter(|&i| self.diagonal[i] - e0 <= tol).collect()
    }
}

pub(crate) fn qubit_count(inst: &ColoringInstance, cap: usize) -> Result<usize> {
    let n = inst.k * inst.vertex_count();
    if n > cap {
        return Err(Error::SizeCap {
            what: "one-hot qubit register",
            size: n,
            cap,
        });
    }
    Ok(n)
}

pub(crate) fn qudit_size(inst: &ColoringInstance) -> Result<usize> {
    let size = register_size(inst.k, inst.vertex_count())?;
    if size > QUDIT_CAP {
        return Err(Error::SizeCap {
            what: "qudit register",
            size,
            cap: QUDIT_CAP,
        });
    }
    Ok(size)
}

/// Bit `(n, i)` of basis index `x` in a register of `bits` qubits, with
/// qubit `k·n + i` and the first qubit most significant.
pub(crate) fn bit(x: usize, qubit: usize, bits: usize) -> usize {
    (x >> (bits - 1 - qubit)) & 1
}

/// Binary cost of a one-hot string: `C Σ_n (1 − Σ_i x_{n,i})² +
/// D Σ_{{n,m}∈E} Σ_i x_{n,i} x_{m,i}`.
pub fn binary_cost(x: &[u8], inst: &ColoringInstance) -> Result<f64> {
    let k = inst.k;
    let n = inst.vertex_count();
    if x.len() != k * n {
        return Err(Error::DimensionMismatch {
            expected: k * n,
            found: x.len(),
        });
    }
    if x.iter().any(|&b| b > 1) {
        return Err(invalid("bit strings hold only 0 and 1"));
    }
    let penalty: f64 = (0..n)
        .map(|v| {
            let s: i64 = x[k * v..k * (v + 1)].iter().map(|&b| b as i64).sum();
            ((1 - s) * (1 - s)) as f64
        })
        .sum();
    let conflicts: usize = inst
        .edges()
        .iter()
        .map(|&(u, v)| (0..k).filter(|&i| x[k * u + i] == 1 && x[k * v + i] == 1).count())
        .sum();
    Ok(inst.penalty * penalty + inst.conflict * conflicts as f64)
}

/// The one-hot cost Hamiltonian written in Pauli `Z`s,
/// `C/4 Σ_n (2 − Σ_i (1 − Z_{n,i}))² + D/4 Σ_{{n,m}∈E} Σ_i (1 − Z_{n,i})(1 − Z_{m,i})`,
/// evaluated on every basis state.
pub fn qubit_cost_hamiltonian(inst: &ColoringInstance) -> Result<CostHamiltonian> {
    let bits = qubit_count(inst, QUBIT_CAP)?;
    let k = inst.k;
    let diagonal = (0..1usize << bits)
        .map(|x| {
            let z = |q: usize| 1.0 - 2.0 * bit(x, q, bits) as f64;
            let mut e = 0.0;
            for v in 0..inst.vertex_count() {
                let s: f64 = (0..k).map(|i| 1.0 - z(k * v + i)).sum();
                e += inst.penalty / 4.0 * (2.0 - s).powi(2);
            }
            for &(u, v) in inst.edges() {
                for i in 0..k {
                    e += inst.conflict / 4.0 * (1.0 - z(k * u + i)) * (1.0 - z(k * v + i));
                }
            }
            e
        })
        .collect();
    Ok(CostHamiltonian {
        formulation: Formulation::Qubit,
        diagonal,
    })
}

/// Splits the one-hot Hamiltonian into single-`Z` terms plus a constant
/// (`H₀`) and `ZZ` couplings (`H₁`). Returns the two diagonals.
///
/// `H₁ = C/2 Σ_n Σ_{i<j} Z_{n,i} Z_{n,j} + D/4 Σ_{{n,m}∈E} Σ_i Z_{n,i} Z_{m,i}`.
pub fn qubit_cost_split(inst: &ColoringInstance) -> Result<(Vec<f64>, Vec<f64>)> {
    let bits = qubit_count(inst, QUBIT_CAP)?;
    let (k, c, d) = (inst.k, inst.penalty, inst.conflict);
    let kf = k as f64;
    let nv = inst.vertex_count();
    let ne = inst.edges().len() as f64;
    let constant = c / 4.0 * nv as f64 * ((2.0 - kf).powi(2) + kf) + d / 4.0 * ne * kf;
    let deg = inst.graph.degrees();
    let mut h0 = Vec::with_capacity(1 << bits);
    let mut h1 = Vec::with_capacity(1 << bits);
    for x in 0..1usize << bits {
        let z = |q: usize| 1.0 - 2.0 * bit(x, q, bits) as f64;
        let mut lin = constant;
        let mut quad = 0.0;
        for v in 0..nv {
            for i in 0..k {
                lin += (c / 2.0 * (2.0 - kf) - d / 4.0 * deg[v] as f64) * z(k * v + i);
                for j in i + 1..k {
                    quad += c / 2.0 * z(k * v + i) * z(k * v + j);
                }
            }
        }
        for &(u, v) in inst.edges() {
            for i in 0..k {
                quad += d / 4.0 * z(k * u + i) * z(k * v + i);
            }
        }
        h0.push(lin);
        h1.push(quad);
    }
    Ok((h0, h1))
}

/// `Σ_{{n,m}∈E} Σ_{i<k} Z_n^i Z_m^{k−i}`, summed as clock phases and kept
/// real.
pub fn qudit_cost_hamiltonian(inst: &ColoringInstance) -> Result<CostHamiltonian> {
    let size = qudit_size(inst)?;
    let k = inst.k;
    let mut colors = vec![0; inst.vertex_count()];
    let mut max_imag: f64 = 0.0;
    let diagonal = (0..size)
        .map(|x| {
            to_digits(x, k, &mut colors);
            let mut e = num_complex::Complex64::new(0.0, 0.0);
            for &(u, v) in inst.edges() {
                for i in 0..k {
                    e += omega_pow(k, (i * colors[u]) as i64 + ((k - i) * colors[v]) as i64);
                }
            }
            max_imag = max_imag.max(e.im.abs());
            e.re
        })
        .collect();
    if max_imag > 1e-12 {
        return Err(Error::Verification(format!(
            "qudit cost is not Hermitian (imaginary part {max_imag:.3e})"
        )));
    }
    Ok(CostHamiltonian {
        formulation: Formulation::Qudit,
        diagonal,
    })
}

/// Whether basis state `x` encodes a proper coloring.
pub(crate) fn is_proper_state(inst: &ColoringInstance, formulation: Formulation, x: usize) -> bool {
    let n = inst.vertex_count();
    let k = inst.k;
    let mut colors = vec![0; n];
    match formulation {
        Formulation::Qudit => to_digits(x, k, &mut colors),
        Formulation::Qubit => {
            let bits = k * n;
            for (v, c) in colors.iter_mut().enumerate() {
                let set: Vec<usize> = (0..k).filter(|&i| bit(x, k * v + i, bits) == 1).collect();
                match set.as_slice() {
                    [i] => *c = *i,
                    _ => return false,
                }
            }
        }
    }
    inst.is_proper(&colors)
}
