//! Sofic presentations: expansion bases, labeled digraphs and the restricted
//! adjacency matrices extracted from them.
//!
//! A label is a digit tuple `(d_1, ..., d_r)` with `d_i < m_i`. Prefixes of
//! labels are encoded as mixed-radix integers ("symbol codes") so the level-`i`
//! alphabet `D_i` is `0..alphabet_size(i)` and truncating a symbol to a shorter
//! prefix is an integer division.

use std::collections::HashMap;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Expansion integers `2 <= m_1 <= ... <= m_r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bases(Vec<u32>);

impl Bases {
    pub fn new(m: Vec<u32>) -> Result<Self> {
        if m.is_empty() {
            return Err(Error::InvalidBases("at least one base is required".into()));
        }
        if let Some(bad) = m.iter().find(|&&b| b < 2) {
            return Err(Error::InvalidBases(format!("base {bad} is smaller than 2")));
        }
        if let Some(w) = m.windows(2).find(|w| w[0] > w[1]) {
            return Err(Error::InvalidBases(format!(
                "bases must be nondecreasing, found {} before {}",
                w[0], w[1]
            )));
        }
        let total = m.iter().try_fold(1u64, |acc, &b| acc.checked_mul(b as u64));
        match total {
            Some(t) if t <= u32::MAX as u64 => Ok(Bases(m)),
            _ => Err(Error::InvalidBases(
                "label alphabet exceeds 2^32 symbols".into(),
            )),
        }
    }

    /// Dimension `r`.
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    /// Base of axis `axis` (0-based).
    pub fn base(&self, axis: usize) -> u32 {
        self.0[axis]
    }

    /// `|D_level|`, the number of prefixes of length `level`.
    pub fn alphabet_size(&self, level: usize) -> u32 {
        self.0[..level].iter().product()
    }

    /// Exponents `a_i = log m_i / log m_{i+1}` for `i = 1..r-1` (stored 0-based).
    pub fn exponents(&self) -> Vec<f64> {
        self.0
            .windows(2)
            .map(|w| {
                if w[0] == w[1] {
                    1.0
                } else {
                    (w[0] as f64).ln() / (w[1] as f64).ln()
                }
            })
            .collect()
    }

    pub fn encode(&self, digits: &[u32]) -> u32 {
        digits
            .iter()
            .zip(&self.0)
            .fold(0, |code, (&d, &m)| code * m + d)
    }

    pub fn decode(&self, level: usize, mut code: u32) -> Vec<u32> {
        let mut digits = vec![0; level];
        for axis in (0..level).rev() {
            digits[axis] = code % self.0[axis];
            code /= self.0[axis];
        }
        digits
    }

    /// Truncate a level-`from` symbol code to its level-`to` prefix.
    pub fn project(&self, code: u32, from: usize, to: usize) -> u32 {
        debug_assert!(to <= from);
        code / self.0[to..from].iter().product::<u32>()
    }

    /// Whether `digits` is a valid prefix (componentwise within the bases).
    pub fn contains_prefix(&self, digits: &[u32]) -> bool {
        digits.len() <= self.dim() && digits.iter().zip(&self.0).all(|(&d, &m)| d < m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub label: Vec<u32>,
}

/// A right-resolving labeled digraph whose labels live in `D_r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledDigraph {
    bases: Bases,
    vertices: usize,
    edges: Vec<Edge>,
}

impl LabeledDigraph {
    /// Validating constructor.
    pub fn new(bases: Bases, vertices: usize, edges: Vec<Edge>) -> Result<Self> {
        let r = bases.dim();
        let mut seen: HashMap<(usize, &[u32]), usize> = HashMap::new();
        for (index, e) in edges.iter().enumerate() {
            if e.from >= vertices || e.to >= vertices {
                return Err(Error::InvalidEdge {
                    index,
                    reason: format!("endpoint {} -> {} outside 0..{vertices}", e.from, e.to),
                });
            }
            if e.label.len() != r {
                return Err(Error::InvalidEdge {
                    index,
                    reason: format!("label has {} digits, expected {r}", e.label.len()),
                });
            }
            if let Some(axis) = (0..r).find(|&a| e.label[a] >= bases.base(a)) {
                return Err(Error::InvalidEdge {
                    index,
                    reason: format!(
                        "digit {} on axis {} is outside 0..{}",
                        e.label[axis],
                        axis + 1,
                        bases.base(axis)
                    ),
                });
            }
            if let Some(&first) = seen.get(&(e.from, e.label.as_slice())) {
                return Err(Error::NotRightResolving {
                    vertex: e.from,
                    first,
                    second: index,
                    label: e.label.clone(),
                });
            }
            seen.insert((e.from, e.label.as_slice()), index);
        }
        Ok(LabeledDigraph {
            bases,
            vertices,
            edges,
        })
    }

    pub fn bases(&self) -> &Bases {
        &self.bases
    }

    pub fn dim(&self) -> usize {
        self.bases.dim()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.vertices == 0
    }

    /// Symbol code of an edge label truncated to `level` digits.
    pub fn edge_code(&self, edge: &Edge, level: usize) -> u32 {
        self.bases.encode(&edge.label[..level])
    }

    /// Maximal subgraph in which every vertex has an outgoing edge, obtained
    /// by repeatedly deleting sinks. Surviving vertices keep their relative
    /// order and are renumbered densely.
    pub fn forward_prune(&self) -> LabeledDigraph {
        let mut alive = vec![true; self.vertices];
        loop {
            let mut out_degree = vec![0usize; self.vertices];
            for e in &self.edges {
                if alive[e.from] && alive[e.to] {
                    out_degree[e.from] += 1;
                }
            }
            let mut changed = false;
            for v in 0..self.vertices {
                if alive[v] && out_degree[v] == 0 {
                    alive[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut index = vec![usize::MAX; self.vertices];
        let mut next = 0;
        for v in 0..self.vertices {
            if alive[v] {
                index[v] = next;
                next += 1;
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| alive[e.from] && alive[e.to])
            .map(|e| Edge {
                from: index[e.from],
                to: index[e.to],
                label: e.label.clone(),
            })
            .collect();
        LabeledDigraph {
            bases: self.bases.clone(),
            vertices: next,
            edges,
        }
    }

    /// Whether every vertex already has an outgoing edge.
    pub fn is_pruned(&self) -> bool {
        let mut has_out = vec![false; self.vertices];
        for e in &self.edges {
            has_out[e.from] = true;
        }
        has_out.into_iter().all(|b| b)
    }

    /// Rename vertex `v` to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<LabeledDigraph> {
        let mut check = perm.to_vec();
        check.sort_unstable();
        if perm.len() != self.vertices || check.iter().enumerate().any(|(i, &p)| i != p) {
            return Err(Error::Unsupported("relabeling is not a permutation".into()));
        }
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                from: perm[e.from],
                to: perm[e.to],
                label: e.label.clone(),
            })
            .collect();
        LabeledDigraph::new(self.bases.clone(), self.vertices, edges)
    }

    /// `A_s`: edges whose label starts with the `r-1` digits of `prefix`.
    pub fn restricted_adjacency(&self, prefix: &[u32]) -> Result<NonnegMatrix> {
        let r = self.dim();
        if prefix.len() + 1 != r || !self.bases.contains_prefix(prefix) {
            return Err(Error::PrefixOutOfRange {
                prefix: prefix.to_vec(),
                bases: self.bases.as_slice().to_vec(),
            });
        }
        let mut m = DMatrix::zeros(self.vertices, self.vertices);
        for e in self.edges.iter().filter(|e| &e.label[..r - 1] == prefix) {
            m[(e.from, e.to)] += 1.0;
        }
        Ok(NonnegMatrix(m))
    }

    /// All restricted adjacency matrices indexed by level-`(r-1)` symbol code.
    /// Absent prefixes give zero matrices.
    pub fn restricted_family(&self) -> Vec<NonnegMatrix> {
        let r = self.dim();
        let size = self.bases.alphabet_size(r - 1) as usize;
        let mut family = vec![NonnegMatrix::zeros(self.vertices); size];
        for e in &self.edges {
            let s = self.edge_code(e, r - 1) as usize;
            family[s].0[(e.from, e.to)] += 1.0;
        }
        family
    }

    /// Plain edge-count adjacency matrix `A = sum_s A_s`.
    pub fn total_adjacency(&self) -> NonnegMatrix {
        let mut m = DMatrix::zeros(self.vertices, self.vertices);
        for e in &self.edges {
            m[(e.from, e.to)] += 1.0;
        }
        NonnegMatrix(m)
    }

    pub fn to_document(&self) -> SystemDocument {
        SystemDocument {
            name: None,
            bases: self.bases.as_slice().to_vec(),
            vertices: self.vertices,
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDocument {
                    from: e.from,
                    to: e.to,
                    label: e.label.clone(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("document serializes")
    }
}

/// On-disk form of a presentation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub bases: Vec<u32>,
    pub vertices: usize,
    pub edges: Vec<EdgeDocument>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDocument {
    pub from: usize,
    pub to: usize,
    pub label: Vec<u32>,
}

impl TryFrom<SystemDocument> for LabeledDigraph {
    type Error = Error;

    fn try_from(doc: SystemDocument) -> Result<Self> {
        let bases = Bases::new(doc.bases)?;
        let edges = doc
            .edges
            .into_iter()
            .map(|e| Edge {
                from: e.from,
                to: e.to,
                label: e.label,
            })
            .collect();
        LabeledDigraph::new(bases, doc.vertices, edges)
    }
}

/// Parse and validate a JSON system document.
pub fn parse_spec(text: &str) -> Result<LabeledDigraph> {
    let doc: SystemDocument =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.try_into()
}

/// Dense square matrix with nonnegative entries.
#[derive(Clone, Debug, PartialEq)]
pub struct NonnegMatrix(DMatrix<f64>);

impl NonnegMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Unsupported("matrix is not square".into()));
        }
        if m.iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(Error::Unsupported(
                "matrix has a negative or non-finite entry".into(),
            ));
        }
        Ok(NonnegMatrix(m))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Unsupported("matrix is not square".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn zeros(n: usize) -> Self {
        NonnegMatrix(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        NonnegMatrix(DMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn inner(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| self.0.row(i).iter().copied().collect())
            .collect()
    }

    /// Sum of all entries, the matrix norm used throughout.
    pub fn entry_sum(&self) -> f64 {
        self.0.sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0.0)
    }

    pub fn product(&self, other: &NonnegMatrix) -> NonnegMatrix {
        NonnegMatrix(&self.0 * &other.0)
    }

    pub fn sum(&self, other: &NonnegMatrix) -> NonnegMatrix {
        NonnegMatrix(&self.0 + &other.0)
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y = vec![0.0; n];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (j, yj) in y.iter_mut().enumerate() {
                *yj += xi * self.0[(i, j)];
            }
        }
        y
    }

    /// Matrix times column vector.
    pub fn right_apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.0[(i, j)] * x[j]).sum())
            .collect()
    }

    /// Conjugate by a vertex permutation: entry `(i, j)` moves to `(perm[i], perm[j])`.
    pub fn permuted(&self, perm: &[usize]) -> NonnegMatrix {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(perm[i], perm[j])] = self.0[(i, j)];
            }
        }
        NonnegMatrix(m)
    }

    fn support(&self) -> Vec<Vec<bool>> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.0[(i, j)] > 0.0).collect())
            .collect()
    }

    /// Smallest `k` with `A^k` entrywise positive, searched up to the Wielandt
    /// bound `(n-1)^2 + 1`.
    pub fn primitivity_exponent(&self) -> Option<usize> {
        let n = self.dim();
        if n == 0 {
            return None;
        }
        let base = self.support();
        let mut power = base.clone();
        let bound = (n - 1) * (n - 1) + 1;
        for k in 1..=bound {
            if power.iter().all(|row| row.iter().all(|&b| b)) {
                return Some(k);
            }
            let mut next = vec![vec![false; n]; n];
            for i in 0..n {
                for l in 0..n {
                    if power[i][l] {
                        for j in 0..n {
                            next[i][j] |= base[l][j];
                        }
                    }
                }
            }
            power = next;
        }
        None
    }

    pub fn is_primitive(&self) -> bool {
        self.primitivity_exponent().is_some()
    }
}

impl fmt::Display for NonnegMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim() {
            let row: Vec<String> = self.0.row(i).iter().map(|x| format!("{x}")).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
