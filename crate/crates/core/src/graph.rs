//! Undirected simple graphs with one adjacency bit row per vertex.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::bitset::{xor_and_count, VertexSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphError {
    VertexOutOfRange { vertex: usize, n: usize },
    SelfLoop(usize),
    DuplicateEdge(usize, usize),
    PatternArity { parts: usize, sizes: usize },
    AsymmetricPattern(usize, usize),
    MalformedPattern(String),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::VertexOutOfRange { vertex, n } => write!(f, "vertex {vertex} out of range for {n} vertices"),
            Self::SelfLoop(v) => write!(f, "self-loop at vertex {v}"),
            Self::DuplicateEdge(u, v) => write!(f, "duplicate edge {u}-{v}"),
            Self::PatternArity { parts, sizes } => {
                write!(f, "pattern has {parts} parts but {sizes} part sizes were given")
            }
            Self::AsymmetricPattern(i, j) => write!(f, "pattern entry ({i},{j}) differs from ({j},{i})"),
            Self::MalformedPattern(msg) => write!(f, "malformed pattern: {msg}"),
        }
    }
}

impl core::error::Error for GraphError {}

/// Immutable simple graph on `0..n`.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    rows: Vec<VertexSet>,
}

/// Mutable edge accumulator; call [`GraphBuilder::build`] to freeze.
#[derive(Clone, Debug)]
pub struct GraphBuilder {
    rows: Vec<VertexSet>,
}

impl GraphBuilder {
    pub fn new(n: usize) -> Self {
        Self { rows: vec![VertexSet::empty(n); n] }
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u].contains(v)
    }

    /// Panics on self-loops.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert_ne!(u, v, "self-loop at {u}");
        self.rows[u].insert(v);
        self.rows[v].insert(u);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.rows[u].remove(v);
        self.rows[v].remove(u);
    }

    pub fn toggle_edge(&mut self, u: usize, v: usize) {
        assert_ne!(u, v, "self-loop at {u}");
        self.rows[u].toggle(v);
        self.rows[v].toggle(u);
    }

    pub fn build(self) -> Graph {
        Graph { rows: self.rows }
    }
}

impl From<&Graph> for GraphBuilder {
    fn from(g: &Graph) -> Self {
        Self { rows: g.rows.clone() }
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        GraphBuilder::new(n).build()
    }

    pub fn complete(n: usize) -> Self {
        let rows = (0..n)
            .map(|v| {
                let mut r = VertexSet::full(n);
                r.remove(v);
                r
            })
            .collect();
        Self { rows }
    }

    /// Cycle `0-1-…-(n-1)-0`; `n >= 3`.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let mut b = GraphBuilder::new(n);
        for v in 0..n {
            b.add_edge(v, (v + 1) % n);
        }
        b.build()
    }

    pub fn path(n: usize) -> Self {
        let mut b = GraphBuilder::new(n);
        for v in 1..n {
            b.add_edge(v - 1, v);
        }
        b.build()
    }

    /// Validating constructor used by file readers.
    pub fn from_edges<I: IntoIterator<Item = (usize, usize)>>(n: usize, edges: I) -> Result<Self, GraphError> {
        let mut b = GraphBuilder::new(n);
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if b.has_edge(u, v) {
                return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
            }
            b.add_edge(u, v);
        }
        Ok(b.build())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &VertexSet {
        &self.rows[v]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u].contains(v)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].len()
    }

    /// `|N(v) ∩ set|`.
    pub fn degree_within(&self, v: usize, set: &VertexSet) -> usize {
        self.rows[v].intersection_len(set)
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n())
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(VertexSet::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows.iter().enumerate().flat_map(|(u, row)| row.iter().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Number of edges of the induced subgraph on `set`.
    pub fn edges_within(&self, set: &VertexSet) -> usize {
        set.iter().map(|v| self.degree_within(v, set)).sum::<usize>() / 2
    }

    pub fn complement(&self) -> Self {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(v, r)| {
                let mut c = r.complement();
                c.remove(v);
                c
            })
            .collect();
        Self { rows }
    }

    /// Induced subgraph on `set`, relabelled to `0..|set|` in increasing
    /// order. The second component maps new labels to old ones.
    pub fn induced(&self, set: &VertexSet) -> (Graph, Vec<usize>) {
        let map = set.to_vec();
        let m = map.len();
        let mut b = GraphBuilder::new(m);
        for (i, &u) in map.iter().enumerate() {
            for (j, &v) in map.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    b.add_edge(i, j);
                }
            }
        }
        (b.build(), map)
    }

    /// `|(N(u) △ N(v)) ∩ within|`.
    #[inline]
    pub fn sym_diff_size(&self, u: usize, v: usize, within: &VertexSet) -> usize {
        xor_and_count(self.rows[u].words(), self.rows[v].words(), within.words())
    }

    /// `|N(u) △ N(v)|` over all vertices.
    #[inline]
    pub fn sym_diff(&self, u: usize, v: usize) -> usize {
        self.rows[u].words().iter().zip(self.rows[v].words()).map(|(a, b)| (a ^ b).count_ones() as usize).sum()
    }

    /// Degrees inside `induced(self, set)`, in increasing vertex order.
    pub fn degree_profile(&self, set: &VertexSet) -> DegreeProfile {
        DegreeProfile::new(set.iter().map(|v| self.degree_within(v, set)).collect())
    }

    pub fn is_clique(&self, set: &VertexSet) -> bool {
        set.iter().all(|v| self.degree_within(v, set) + 1 == set.len())
    }

    pub fn is_independent(&self, set: &VertexSet) -> bool {
        set.iter().all(|v| self.degree_within(v, set) == 0)
    }

    /// Adjacency as one `u64` per vertex; requires `n <= 64`.
    pub fn adjacency_masks(&self) -> Vec<u64> {
        assert!(self.n() <= 64, "graph too large for single-word rows");
        self.rows.iter().map(VertexSet::to_mask).collect()
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph").field("n", &self.n()).field("edges", &self.edges().collect::<Vec<_>>()).finish()
    }
}

/// Degrees of an induced subgraph together with their number of distinct
/// values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeProfile {
    pub degrees: Vec<usize>,
    pub distinct_count: usize,
}

impl DegreeProfile {
    pub fn new(degrees: Vec<usize>) -> Self {
        let mut sorted = degrees.clone();
        sorted.sort_unstable();
        sorted.dedup();
        Self { distinct_count: sorted.len(), degrees }
    }
}

/// Symmetric complete/empty pattern between (and within) the parts of a
/// blowup; `true` means complete.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BlowupPattern {
    parts: usize,
    cells: Vec<bool>,
}

impl BlowupPattern {
    /// Row-major `parts × parts` cells; must be symmetric.
    pub fn new(parts: usize, cells: Vec<bool>) -> Result<Self, GraphError> {
        if cells.len() != parts * parts {
            return Err(GraphError::MalformedPattern(alloc::format!(
                "expected {} cells, got {}",
                parts * parts,
                cells.len()
            )));
        }
        for i in 0..parts {
            for j in 0..i {
                if cells[i * parts + j] != cells[j * parts + i] {
                    return Err(GraphError::AsymmetricPattern(i, j));
                }
            }
        }
        Ok(Self { parts, cells })
    }

    pub fn from_fn(parts: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut cells = vec![false; parts * parts];
        for i in 0..parts {
            for j in i..parts {
                let v = f(i, j);
                cells[i * parts + j] = v;
                cells[j * parts + i] = v;
            }
        }
        Self { parts, cells }
    }

    pub fn parts(&self) -> usize {
        self.parts
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells[i * self.parts + j]
    }

    /// Pattern with part `i` renamed to `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.parts);
        let mut cells = vec![false; self.cells.len()];
        for i in 0..self.parts {
            for j in 0..self.parts {
                cells[perm[i] * self.parts + perm[j]] = self.get(i, j);
            }
        }
        Self { parts: self.parts, cells }
    }
}

impl fmt::Debug for BlowupPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BlowupPattern({self})")
    }
}

/// Rows of `0`/`1` separated by `;`, e.g. `01;10`.
impl fmt::Display for BlowupPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.parts {
            if i > 0 {
                f.write_str(";")?;
            }
            for j in 0..self.parts {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
        }
        Ok(())
    }
}

impl FromStr for BlowupPattern {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self { parts: 0, cells: Vec::new() });
        }
        let rows: Vec<&str> = s.split(';').map(str::trim).collect();
        let parts = rows.len();
        let mut cells = Vec::with_capacity(parts * parts);
        for row in &rows {
            if row.len() != parts {
                return Err(GraphError::MalformedPattern(alloc::format!("row {row:?} should have {parts} cells")));
            }
            for c in row.chars() {
                cells.push(match c {
                    '0' => false,
                    '1' => true,
                    _ => return Err(GraphError::MalformedPattern(alloc::format!("unexpected character {c:?}"))),
                });
            }
        }
        Self::new(parts, cells)
    }
}
