use super::graph::{ClusterGraph, Edge};
use super::pattern::{Measurement, MeasurementBasis, MeasurementPattern};
use crate::error::{invalid, Result};

/// Grows a cluster wire by wire while recording the measurements that drive
/// it.
///
/// `step` teleports the wire's state one node along with `H P(θ)` (basis
/// `HDagger`, `CZ` edge) or `H† P(θ)` (basis `H`, `CZ†` edge). `cross` joins
/// the current nodes of two wires, which applies `CZ^{±1}` to their states.
#[derive(Clone, Debug)]
pub struct PatternBuilder {
    d: usize,
    wires: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    measurements: Vec<Measurement>,
    labels: Vec<String>,
}

impl PatternBuilder {
    pub fn new(d: usize, wire_count: usize) -> Result<Self> {
        if d < 2 {
            return Err(invalid(format!("qudit dimension must be at least 2, got {d}")));
        }
        if wire_count == 0 {
            return Err(invalid("a pattern needs at least one wire"));
        }
        Ok(Self {
            d,
            wires: (0..wire_count).map(|w| vec![w]).collect(),
            edges: Vec::new(),
            measurements: Vec::new(),
            labels: (0..wire_count).map(|w| format!("w{}_0", w + 1)).collect(),
        })
    }

    fn head(&self, wire: usize) -> Result<usize> {
        self.wires
            .get(wire)
            .and_then(|w| w.last().copied())
            .ok_or_else(|| invalid(format!("no wire {wire}")))
    }

    pub fn step(&mut self, wire: usize, theta: &[f64], basis: MeasurementBasis) -> Result<&mut Self> {
        if theta.len() != self.d {
            return Err(invalid(format!("{} angles for d = {}", theta.len(), self.d)));
        }
        let j = self.head(wire)?;
        let s = self.labels.len();
        self.labels.push(format!("w{}_{}", wire + 1, self.wires[wire].len()));
        self.wires[wire].push(s);
        self.edges.push(Edge(j, s, basis.edge_sign()));
        self.measurements.push(Measurement {
            node: j,
            theta: theta.to_vec(),
            basis,
        });
        Ok(self)
    }

    pub fn cross(&mut self, wire_a: usize, wire_b: usize, sign: i8) -> Result<&mut Self> {
        if wire_a == wire_b {
            return Err(invalid("cannot join a wire to itself"));
        }
        let (a, b) = (self.head(wire_a)?, self.head(wire_b)?);
        self.edges.push(Edge(a, b, sign));
        Ok(self)
    }

    /// Appends the six-measurement block for `CX (1 ⊗ P(θ)) CX†` with
    /// `control` and `target` wires.
    pub fn cx_phase(&mut self, control: usize, target: usize, theta: &[f64]) -> Result<&mut Self> {
        use MeasurementBasis::{HDagger, H};
        let zero = vec![0.0; self.d];
        self.step(target, &zero, HDagger)?
            .cross(control, target, -1)?
            .step(control, &zero, HDagger)?
            .step(target, &zero, H)?
            .step(target, theta, HDagger)?
            .step(control, &zero, H)?
            .cross(control, target, 1)?
            .step(target, &zero, H)
    }

    pub fn finish(self) -> Result<(ClusterGraph, MeasurementPattern)> {
        let mut graph = ClusterGraph::new(self.d, self.labels.len(), self.edges, self.wires)?;
        graph.labels = self.labels;
        let pattern = MeasurementPattern::new(self.measurements);
        pattern.validate(&graph)?;
        Ok((graph, pattern))
    }
}

/// Two-wire pattern for `CX (1 ⊗ P(θ)) CX†`, the diagonal
/// `|n, k⟩ ↦ e^{iθ_{(k − n) mod d}}|n, k⟩`. Wire 0 is the control.
pub fn cx_phase_cx_dagger(theta: &[f64]) -> Result<(ClusterGraph, MeasurementPattern)> {
    let mut b = PatternBuilder::new(theta.len(), 2)?;
    b.cx_phase(0, 1, theta)?;
    b.finish()
}

/// `exp(iα Σ_{j<d} Z^j ⊗ Z^{−j})`, which is `e^{iαd}` on `|n, n⟩` and `1`
/// elsewhere; for qubits this is `e^{iα Z⊗Z}` up to global phase.
pub fn compile_zz_rotation(alpha: f64, d: usize) -> Result<(ClusterGraph, MeasurementPattern)> {
    if d < 2 {
        return Err(invalid(format!("qudit dimension must be at least 2, got {d}")));
    }
    let mut theta = vec![0.0; d];
    theta[0] = alpha * d as f64;
    cx_phase_cx_dagger(&theta)
}
