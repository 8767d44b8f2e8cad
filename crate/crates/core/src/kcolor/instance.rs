use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Simple undirected graph on vertices `0..vertex_count`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let g = Self { vertex_count, edges };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for &(u, v) in &self.edges {
            if u >= self.vertex_count || v >= self.vertex_count {
                return Err(invalid(format!(
                    "edge ({u}, {v}) out of range for {} vertices",
                    self.vertex_count
                )));
            }
            if u == v {
                return Err(invalid(format!("self-loop on vertex {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(invalid(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(())
    }

    /// Parses `u v` lines (0-indexed). Blank lines and `#` comments are
    /// skipped. The vertex count is one past the largest index unless a
    /// `# vertices: N` comment raises it.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        let mut declared = 0;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(n) = comment.trim().strip_prefix("vertices:") {
                    declared = n
                        .trim()
                        .parse()
                        .map_err(|_| invalid(format!("line {}: bad vertex count", lineno + 1)))?;
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| invalid(format!("line {}: `{s}` is not a vertex index", lineno + 1)))
            };
            match fields.as_slice() {
                [u, v] => edges.push((parse(u)?, parse(v)?)),
                _ => return Err(invalid(format!("line {}: expected `u v`", lineno + 1))),
            }
        }
        let implied = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
        Self::new(declared.max(implied), edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = format!("# vertices: {}\n", self.vertex_count);
        for (u, v) in &self.edges {
            s += &format!("{u} {v}\n");
        }
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: Self = serde_json::from_str(text)?;
        g.validate()?;
        Ok(g)
    }

    /// Reads JSON if the text starts with `{`, an edge list otherwise.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::parse_edge_list(text)
        }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Self { vertex_count: n, edges }
    }

    pub fn path(n: usize) -> Self {
        let edges = (1..n).map(|v| (v - 1, v)).collect();
        Self { vertex_count: n, edges }
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::path(n);
        if n > 2 {
            g.edges.push((n - 1, 0));
        }
        g
    }

    /// Erdős–Rényi `G(n, p)`.
    pub fn erdos_renyi<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("edge probability {p} outside [0, 1]")));
        }
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        Ok(Self { vertex_count: n, edges })
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Edges whose endpoints share a color.
    pub fn monochromatic_edges(&self, colors: &[usize]) -> usize {
        self.edges.iter().filter(|&&(u, v)| colors[u] == colors[v]).count()
    }
}

/// A graph to color with `k` colors.
///
/// `penalty` (`C`) and `conflict` (`D`) weight the one-hot penalty and the
/// monochromatic-edge count of the binary cost; the native qudit cost needs
/// neither. Edge sums run over each edge once.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColoringInstance {
    pub graph: Graph,
    pub k: usize,
    #[serde(default = "one")]
    pub penalty: f64,
    #[serde(default = "one")]
    pub conflict: f64,
}

fn one() -> f64 {
    1.0
}

impl ColoringInstance {
    pub fn new(graph: Graph, k: usize) -> Result<Self> {
        Self::with_weights(graph, k, 1.0, 1.0)
    }

    pub fn with_weights(graph: Graph, k: usize, penalty: f64, conflict: f64) -> Result<Self> {
        let inst = Self {
            graph,
            k,
            penalty,
            conflict,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        self.graph.validate()?;
        if self.k < 2 {
            return Err(invalid(format!("need at least 2 colors, got {}", self.k)));
        }
        if !(self.penalty > 0.0 && self.conflict > 0.0) || !(self.penalty.is_finite() && self.conflict.is_finite()) {
            return Err(invalid("penalty weights must be positive and finite"));
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.graph.edges
    }

    /// Whether `C > D · maxdeg`, which makes every ground state of the
    /// binary cost a one-hot optimal coloring. With the default `C = D = 1`
    /// this fails on any graph of degree one or more.
    pub fn penalty_dominates(&self) -> bool {
        self.penalty > self.conflict * self.graph.max_degree() as f64
    }

    pub fn is_proper(&self, colors: &[usize]) -> bool {
        self.graph.monochromatic_edges(colors) == 0
    }

    /// Number of proper colorings, by enumeration.
    pub fn count_proper_colorings(&self) -> Result<usize> {
        let n = self.vertex_count();
        let total = crate::qudit::register_size(self.k, n)?;
        let mut colors = vec![0; n];
        let mut count = 0;
        for idx in 0..total {
            crate::qudit::to_digits(idx, self.k, &mut colors);
            if self.is_proper(&colors) {
                count += 1;
            }
        }
        Ok(count)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::parse_edge_list("# triangle\n0 1\n1 2\n\n2 0\n").unwrap();
        assert_eq!(g.vertex_count, 3);
        assert_eq!(g.edges.len(), 3);
        assert_eq!(Graph::parse_edge_list(&g.to_edge_list()).unwrap(), g);
        let iso = Graph::parse_edge_list("# vertices: 5\n0 1\n").unwrap();
        assert_eq!(iso.vertex_count, 5);
    }

    #[test]
    fn json_and_text_both_parse() {
        let g = Graph::parse(r#"{"vertex_count": 3, "edges": [[0, 1], [1, 2]]}"#).unwrap();
        assert_eq!(g, Graph::path(3));
        assert_eq!(Graph::parse("0 1\n1 2").unwrap(), g);
    }

    #[test]
    fn malformed_graphs_rejected() {
        assert!(Graph::parse_edge_list("0 0").is_err());
        assert!(Graph::parse_edge_list("0 1\n1 0").is_err());
        assert!(Graph::parse_edge_list("0 1 2").is_err());
        assert!(Graph::parse_edge_list("0 x").is_err());
        assert!(Graph::new(2, vec![(0, 2)]).is_err());
        assert!(ColoringInstance::new(Graph::path(2), 1).is_err());
        assert!(ColoringInstance::with_weights(Graph::path(2), 2, 0.0, 1.0).is_err());
    }

    #[test]
    fn proper_coloring_counts() {
        let tri = ColoringInstance::new(Graph::complete(3), 3).unwrap();
        assert_eq!(tri.count_proper_colorings().unwrap(), 6);
        let tri2 = ColoringInstance::new(Graph::complete(3), 2).unwrap();
        assert_eq!(tri2.count_proper_colorings().unwrap(), 0);
        // Chromatic polynomial of a path: k (k − 1)^{n−1}.
        let p4 = ColoringInstance::new(Graph::path(4), 3).unwrap();
        assert_eq!(p4.count_proper_colorings().unwrap(), 3 * 8);
    }

    #[test]
    fn erdos_renyi_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(Graph::erdos_renyi(10, 0.0, &mut rng).unwrap().edges.is_empty());
        assert_eq!(Graph::erdos_renyi(10, 1.0, &mut rng).unwrap().edges.len(), 45);
        assert!(Graph::erdos_renyi(10, 1.5, &mut rng).is_err());
    }
}
