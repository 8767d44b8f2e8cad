use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::REGISTER_CAP;
use crate::error::{invalid, Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::qudit::register_size;

/// Amplitudes over a list of cluster nodes (first node most significant).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuditState {
    pub d: usize,
    pub nodes: Vec<usize>,
    #[serde(with = "serde_cvector")]
    pub amplitudes: CVector,
}

mod serde_cvector {
    use crate::linalg::CVector;
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &CVector, s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CVector, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(CVector::from_iterator(
            pairs.len(),
            pairs.iter().map(|p| Complex64::new(p[0], p[1])),
        ))
    }
}

impl QuditState {
    pub fn new(d: usize, nodes: Vec<usize>, amplitudes: CVector) -> Result<Self> {
        if d < 2 {
            return Err(invalid(format!("qudit dimension must be at least 2, got {d}")));
        }
        let size = register_size(d, nodes.len())?;
        if amplitudes.len() != size {
            return Err(Error::DimensionMismatch {
                expected: size,
                found: amplitudes.len(),
            });
        }
        Ok(Self { d, nodes, amplitudes })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    fn position(&self, node: usize) -> Result<usize> {
        self.nodes
            .iter()
            .position(|&n| n == node)
            .ok_or_else(|| invalid(format!("node {node} is not in the register")))
    }

    fn stride(&self, pos: usize) -> usize {
        self.d.pow((self.nodes.len() - 1 - pos) as u32)
    }

    /// Appends `node` in `|+⟩` as the least significant site.
    pub(crate) fn push_plus(&mut self, node: usize) -> Result<()> {
        let size = self.amplitudes.len() * self.d;
        if size > REGISTER_CAP {
            return Err(Error::SizeCap {
                what: "cluster register",
                size,
                cap: REGISTER_CAP,
            });
        }
        let amp = Complex64::new((self.d as f64).sqrt().recip(), 0.0);
        let old = &self.amplitudes;
        self.amplitudes = CVector::from_fn(size, |i, _| old[i / self.d] * amp);
        self.nodes.push(node);
        Ok(())
    }

    /// Applies `CZ^{sign}` between two nodes.
    pub(crate) fn apply_cz(&mut self, a: usize, b: usize, sign: i8) -> Result<()> {
        let (pa, pb) = (self.position(a)?, self.position(b)?);
        let (sa, sb) = (self.stride(pa), self.stride(pb));
        let d = self.d;
        let table: Vec<Complex64> = (0..d)
            .map(|k| crate::qudit::omega_pow(d, k as i64))
            .collect();
        for (i, z) in self.amplitudes.iter_mut().enumerate() {
            let (x, y) = ((i / sa) % d, (i / sb) % d);
            let k = (sign as i64 * (x * y) as i64).rem_euclid(d as i64) as usize;
            if k != 0 {
                *z *= table[k];
            }
        }
        Ok(())
    }

    /// Applies a `d × d` matrix to one node.
    pub fn apply_single(&mut self, node: usize, m: &CMatrix) -> Result<()> {
        let d = self.d;
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: m.nrows(),
            });
        }
        let s = self.stride(self.position(node)?);
        let mut buf = vec![Complex64::default(); d];
        for base in 0..self.amplitudes.len() {
            if !(base / s).is_multiple_of(d) {
                continue;
            }
            for (k, b) in buf.iter_mut().enumerate() {
                *b = self.amplitudes[base + k * s];
            }
            for r in 0..d {
                self.amplitudes[base + r * s] = (0..d).map(|c| m[(r, c)] * buf[c]).sum();
            }
        }
        Ok(())
    }

    /// Unnormalized states of the other nodes for each outcome of measuring
    /// `node` in the basis whose outcome `m` has amplitude `Σ_n B[m,n]ψ_n`.
    pub(crate) fn branches(&self, node: usize, basis: &CMatrix) -> Result<Vec<CVector>> {
        let d = self.d;
        let pos = self.position(node)?;
        let s = self.stride(pos);
        let rest = self.amplitudes.len() / d;
        let mut out = vec![CVector::zeros(rest); d];
        for i in 0..self.amplitudes.len() {
            let n = (i / s) % d;
            let r = (i / (s * d)) * s + i % s;
            let a = self.amplitudes[i];
            for (m, o) in out.iter_mut().enumerate() {
                o[r] += basis[(m, n)] * a;
            }
        }
        Ok(out)
    }

    pub(crate) fn replace_after_measurement(&mut self, node: usize, amplitudes: CVector) {
        self.nodes.retain(|&n| n != node);
        self.amplitudes = amplitudes;
    }

    /// Amplitudes with the sites permuted into `order`.
    pub fn reordered(&self, order: &[usize]) -> Result<QuditState> {
        if order.len() != self.nodes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.nodes.len(),
                found: order.len(),
            });
        }
        let pos: Vec<usize> = order.iter().map(|&n| self.position(n)).collect::<Result<_>>()?;
        let strides: Vec<usize> = pos.iter().map(|&p| self.stride(p)).collect();
        let d = self.d;
        let n = order.len();
        let amps = CVector::from_fn(self.amplitudes.len(), |j, _| {
            let mut rem = j;
            let mut src = 0;
            for k in (0..n).rev() {
                src += (rem % d) * strides[k];
                rem /= d;
            }
            self.amplitudes[src]
        });
        QuditState::new(d, order.to_vec(), amps)
    }
}
