//! Intersection matrices and their dual graphs.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::json::JsonInt;
use crate::linalg;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("matrix is empty")]
    Empty,
    #[error("row {row} has length {len}, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("entries ({i},{j}) and ({j},{i}) differ")]
    NotSymmetric { i: usize, j: usize },
    #[error("entry ({i},{j}) has the wrong sign")]
    BadSign { i: usize, j: usize },
    #[error("leading {k}x{k} minor is {minor}, expected sign {}", if *.k % 2 == 0 { "+" } else { "-" })]
    NotNegativeDefinite { k: usize, minor: BigInt },
    #[error("{got} labels for {n} vertices")]
    LabelCount { got: usize, n: usize },
}

/// A symmetric negative-definite integer matrix with labeled vertices.
///
/// Construct through [`IntersectionMatrix::validate`]; values are immutable
/// afterwards.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MatrixInput", into = "MatrixJson")]
pub struct IntersectionMatrix {
    entries: Vec<Vec<BigInt>>,
    labels: Option<Vec<String>>,
    det: BigInt,
}

impl IntersectionMatrix {
    /// Checks squareness, symmetry, the sign pattern and negative
    /// definiteness, in that order, and reports the first failure.
    pub fn validate(entries: Vec<Vec<BigInt>>, labels: Option<Vec<String>>) -> Result<Self, MatrixError> {
        let n = entries.len();
        if n == 0 {
            return Err(MatrixError::Empty);
        }
        for (row, r) in entries.iter().enumerate() {
            if r.len() != n {
                return Err(MatrixError::NotSquare { row, len: r.len(), n });
            }
        }
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(MatrixError::LabelCount { got: l.len(), n });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if entries[i][j] != entries[j][i] {
                    return Err(MatrixError::NotSymmetric { i, j });
                }
            }
        }
        for (i, row) in entries.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let ok = if i == j { v.is_negative() } else { !v.is_negative() };
                if !ok {
                    return Err(MatrixError::BadSign { i, j });
                }
            }
        }
        let minors = linalg::leading_minors(&entries);
        for (idx, minor) in minors.iter().enumerate() {
            let k = idx + 1;
            let want_positive = k % 2 == 0;
            let ok = if want_positive {
                minor.is_positive()
            } else {
                minor.is_negative()
            };
            if !ok {
                return Err(MatrixError::NotNegativeDefinite {
                    k,
                    minor: minor.clone(),
                });
            }
        }
        let det = minors.last().cloned().unwrap_or_else(BigInt::one);
        Ok(IntersectionMatrix { entries, labels, det })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self, MatrixError> {
        let entries = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::validate(entries, None)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, MatrixError> {
        if labels.len() != self.n() {
            return Err(MatrixError::LabelCount {
                got: labels.len(),
                n: self.n(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<BigInt>] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i][j]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => format!("v{i}"),
        }
    }

    /// Exact determinant; its sign is always `(-1)^n`.
    pub fn exact_determinant(&self) -> &BigInt {
        &self.det
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        linalg::mat_vec(&self.entries, v)
    }

    /// `vᵀ N v`.
    pub fn quadratic_form(&self, v: &[BigInt]) -> BigInt {
        linalg::dot(v, &self.mul_vec(v))
    }

    /// Principal submatrix on `keep`, again a valid intersection matrix.
    pub fn principal(&self, keep: &[usize]) -> Option<IntersectionMatrix> {
        if keep.is_empty() {
            return None;
        }
        let entries = linalg::principal_submatrix(&self.entries, keep);
        let labels = self
            .labels
            .as_ref()
            .map(|l| keep.iter().map(|&i| l[i].clone()).collect());
        Self::validate(entries, labels).ok()
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).filter(move |&j| j != i && !self.entries[i][j].is_zero())
    }

    pub fn to_dual_graph(&self) -> DualGraph {
        DualGraph::from_matrix(self)
    }

    /// Graphviz rendering, one `graph` block. Parallel edges are repeated
    /// according to their multiplicity.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph \"{}\" {{", escape(name));
        for i in 0..self.n() {
            let _ = writeln!(
                out,
                "  n{i} [label=\"{} ({})\"];",
                escape(&self.label(i)),
                self.entries[i][i]
            );
        }
        for i in 0..self.n() {
            for j in (i + 1)..self.n() {
                let mult = self.entries[i][j].to_u64().unwrap_or(u64::MAX);
                for _ in 0..mult.min(64) {
                    let _ = writeln!(out, "  n{i} -- n{j};");
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    entries: Vec<Vec<JsonInt>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

/// The object form, or just the rows.
#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixInput {
    Object(MatrixJson),
    Rows(Vec<Vec<JsonInt>>),
}

impl TryFrom<MatrixInput> for IntersectionMatrix {
    type Error = MatrixError;

    fn try_from(m: MatrixInput) -> Result<Self, MatrixError> {
        match m {
            MatrixInput::Object(m) => m.try_into(),
            MatrixInput::Rows(rows) => MatrixJson {
                n: rows.len(),
                entries: rows,
                labels: None,
            }
            .try_into(),
        }
    }
}

impl TryFrom<MatrixJson> for IntersectionMatrix {
    type Error = MatrixError;

    fn try_from(m: MatrixJson) -> Result<Self, MatrixError> {
        let entries: Vec<Vec<BigInt>> = m
            .entries
            .into_iter()
            .map(|r| r.into_iter().map(|x| x.0).collect())
            .collect();
        if entries.len() != m.n {
            return Err(MatrixError::NotSquare {
                row: entries.len(),
                len: entries.len(),
                n: m.n,
            });
        }
        IntersectionMatrix::validate(entries, m.labels)
    }
}

impl From<IntersectionMatrix> for MatrixJson {
    fn from(m: IntersectionMatrix) -> Self {
        MatrixJson {
            n: m.n(),
            entries: m.entries.iter().map(|r| crate::json::ints(r)).collect(),
            labels: m.labels,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    Terminal,
    Node,
    Ordinary,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub label: String,
    pub self_intersection: BigInt,
    pub valency: u64,
    pub kind: VertexKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub multiplicity: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub connected: bool,
    pub is_tree: bool,
}

impl DualGraph {
    fn from_matrix(m: &IntersectionMatrix) -> Self {
        let n = m.n();
        let mut edges = Vec::new();
        let mut valency = vec![0u64; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let e = m.entry(i, j);
                if e.is_zero() {
                    continue;
                }
                let mult = e.to_u64().unwrap_or(u64::MAX);
                valency[i] = valency[i].saturating_add(mult);
                valency[j] = valency[j].saturating_add(mult);
                edges.push(Edge {
                    a: i,
                    b: j,
                    multiplicity: e.clone(),
                });
            }
        }
        let vertices = (0..n)
            .map(|i| Vertex {
                label: m.label(i),
                self_intersection: m.entry(i, i).clone(),
                valency: valency[i],
                kind: match valency[i] {
                    1 => VertexKind::Terminal,
                    v if v >= 3 => VertexKind::Node,
                    _ => VertexKind::Ordinary,
                },
            })
            .collect();
        let connected = is_connected(n, &edges);
        let total: BigInt = edges.iter().map(|e| &e.multiplicity).sum();
        let is_tree = connected && total == BigInt::from(n - 1);
        DualGraph {
            vertices,
            edges,
            connected,
            is_tree,
        }
    }

    pub fn nodes(&self) -> Vec<usize> {
        self.indices_of(VertexKind::Node)
    }

    pub fn terminals(&self) -> Vec<usize> {
        self.indices_of(VertexKind::Terminal)
    }

    fn indices_of(&self, kind: VertexKind) -> Vec<usize> {
        self.vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == kind)
            .map(|(i, _)| i)
            .collect()
    }
}

fn is_connected(n: usize, edges: &[Edge]) -> bool {
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.a].push(e.b);
        adj[e.b].push(e.a);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Connected components of the graph after deleting `removed`.
pub(crate) fn components_without(m: &IntersectionMatrix, removed: usize) -> Vec<Vec<usize>> {
    let n = m.n();
    let mut seen = vec![false; n];
    seen[removed] = true;
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut idx = 0;
        while idx < comp.len() {
            let v = comp[idx];
            idx += 1;
            for w in m.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(s: &[i64]) -> IntersectionMatrix {
        let n = s.len();
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            -s[i]
                        } else if i.abs_diff(j) == 1 {
                            1
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        IntersectionMatrix::from_i64(&rows).unwrap()
    }

    #[test]
    fn validate_accepts_basic_cases() {
        assert!(IntersectionMatrix::from_i64(&[vec![-2]]).is_ok());
        let a2 = IntersectionMatrix::from_i64(&[vec![-2, 1], vec![1, -2]]).unwrap();
        assert_eq!(a2.exact_determinant(), &BigInt::from(3));
        let m1 = IntersectionMatrix::from_i64(&[vec![-1]]).unwrap();
        assert_eq!(m1.exact_determinant(), &BigInt::from(-1));
    }

    #[test]
    fn validate_reports_first_failure() {
        let err = IntersectionMatrix::from_i64(&[vec![-1, 2], vec![2, -1]]).unwrap_err();
        assert_eq!(
            err,
            MatrixError::NotNegativeDefinite {
                k: 2,
                minor: BigInt::from(-3)
            }
        );
        let err = IntersectionMatrix::from_i64(&[vec![-2, 1], vec![0, -2]]).unwrap_err();
        assert_eq!(err, MatrixError::NotSymmetric { i: 0, j: 1 });
        let err = IntersectionMatrix::from_i64(&[vec![-2, -1], vec![-1, -2]]).unwrap_err();
        assert_eq!(err, MatrixError::BadSign { i: 0, j: 1 });
        let err = IntersectionMatrix::from_i64(&[vec![0]]).unwrap_err();
        assert_eq!(err, MatrixError::BadSign { i: 0, j: 0 });
        let err = IntersectionMatrix::from_i64(&[vec![-2, 1]]).unwrap_err();
        assert!(matches!(err, MatrixError::NotSquare { .. }));
        // Semidefinite: the affine D4 / A1-tilde pair.
        let err = IntersectionMatrix::from_i64(&[vec![-2, 2], vec![2, -2]]).unwrap_err();
        assert_eq!(
            err,
            MatrixError::NotNegativeDefinite {
                k: 2,
                minor: BigInt::zero()
            }
        );
    }

    #[test]
    fn a_chain_determinants() {
        for p in 2..=11i64 {
            let m = chain(&vec![2; (p - 1) as usize]);
            let sign = if (p - 1) % 2 == 0 { 1 } else { -1 };
            assert_eq!(m.exact_determinant(), &BigInt::from(sign * p));
        }
    }

    #[test]
    fn chain_graph_classification() {
        let g = chain(&[2, 2, 2]).to_dual_graph();
        assert_eq!(g.terminals(), vec![0, 2]);
        assert!(g.nodes().is_empty());
        assert!(g.is_tree && g.connected);
    }

    #[test]
    fn d4_graph_classification() {
        let d4 = IntersectionMatrix::from_i64(&[
            vec![-2, 1, 1, 1],
            vec![1, -2, 0, 0],
            vec![1, 0, -2, 0],
            vec![1, 0, 0, -2],
        ])
        .unwrap();
        let g = d4.to_dual_graph();
        assert_eq!(g.nodes(), vec![0]);
        assert_eq!(g.vertices[0].valency, 3);
        assert_eq!(g.terminals(), vec![1, 2, 3]);
        assert_eq!(d4.exact_determinant(), &BigInt::from(4));
    }

    #[test]
    fn disconnected_and_cyclic_graphs_are_not_trees() {
        let two = IntersectionMatrix::from_i64(&[vec![-2, 0], vec![0, -2]]).unwrap();
        let g = two.to_dual_graph();
        assert!(!g.connected && !g.is_tree);
        let double = IntersectionMatrix::from_i64(&[vec![-3, 2], vec![2, -3]]).unwrap();
        let g = double.to_dual_graph();
        assert!(g.connected && !g.is_tree);
        assert_eq!(g.vertices[0].valency, 2);
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let m = chain(&[2, 5]).with_labels(vec!["a".into(), "b".into()]).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(text, r#"{"n":2,"entries":[[-2,1],[1,-5]],"labels":["a","b"]}"#);
        let back: IntersectionMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
        let bad = r#"{"n":2,"entries":[[-1,2],[2,-1]]}"#;
        assert!(serde_json::from_str::<IntersectionMatrix>(bad).is_err());
        let strings = r#"{"n":1,"entries":[["-3"]]}"#;
        let m: IntersectionMatrix = serde_json::from_str(strings).unwrap();
        assert_eq!(m.entry(0, 0), &BigInt::from(-3));
    }

    #[test]
    fn dot_output_lists_vertices_and_edges() {
        let dot = chain(&[2, 3]).to_dot("demo");
        assert!(dot.starts_with("graph \"demo\" {"));
        assert!(dot.contains("n0 [label=\"v0 (-2)\"];"));
        assert!(dot.contains("n1 [label=\"v1 (-3)\"];"));
        assert!(dot.contains("n0 -- n1;"));
    }

    #[test]
    fn components_after_removing_node() {
        let d4 = IntersectionMatrix::from_i64(&[
            vec![-2, 1, 1, 1],
            vec![1, -2, 0, 0],
            vec![1, 0, -2, 0],
            vec![1, 0, 0, -2],
        ])
        .unwrap();
        assert_eq!(components_without(&d4, 0), vec![vec![1], vec![2], vec![3]]);
        assert_eq!(components_without(&d4, 1), vec![vec![0, 2, 3]]);
    }
}
