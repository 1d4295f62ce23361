//! Exact brute-force references: `f(G)`, `hom(G)`, maximum diverse sets,
//! and control-graph verification.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use serde::{Deserialize, Serialize};

use crate::bitset::VertexSet;
use crate::control::ControlGraphWitness;
use crate::fraction::Fraction;
use crate::graph::Graph;

pub const DEFAULT_F_CAP: usize = 24;
pub const DEFAULT_HOM_CAP: usize = 64;
pub const DEFAULT_DIVERSE_CAP: usize = 40;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleError {
    CapExceeded { n: usize, cap: usize },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::CapExceeded { n, cap } => write!(f, "{n} vertices exceeds the exact-search cap of {cap}"),
        }
    }
}

impl core::error::Error for OracleError {}

/// An induced subgraph attaining `f(G)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FWitness {
    pub subset: VertexSet,
    pub distinct_count: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HomKind {
    Clique,
    Independent,
}

/// A maximum homogeneous set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomWitness {
    pub subset: VertexSet,
    pub kind: HomKind,
}

impl HomWitness {
    pub fn size(&self) -> usize {
        self.subset.len()
    }

    pub fn verify(&self, g: &Graph) -> bool {
        match self.kind {
            HomKind::Clique => g.is_clique(&self.subset),
            HomKind::Independent => g.is_independent(&self.subset),
        }
    }
}

pub fn exact_f(g: &Graph) -> Result<FWitness, OracleError> {
    exact_f_with_cap(g, DEFAULT_F_CAP)
}

/// `f(G)` by scanning every subset in Gray-code order.
///
/// Each step toggles one vertex and updates, in `O(deg)`, the degree of
/// every vertex into the current subset plus a histogram of the degrees of
/// subset members. The first subset (in Gray order) reaching the maximum
/// is the witness; the scan stops early at the absolute bound `n - 1`.
pub fn exact_f_with_cap(g: &Graph, cap: usize) -> Result<FWitness, OracleError> {
    let n = g.n();
    if n > cap.min(63) {
        return Err(OracleError::CapExceeded { n, cap: cap.min(63) });
    }
    if n == 0 {
        return Ok(FWitness { subset: VertexSet::empty(0), distinct_count: 0 });
    }
    let adj = g.adjacency_masks();
    let ceiling = if n >= 2 { n - 1 } else { 1 };

    let mut inside = 0u64;
    let mut deg = vec![0u32; n];
    let mut hist = vec![0u32; n];
    let mut distinct = 0usize;
    let mut best = 0usize;
    let mut best_code = 0u64;

    for step in 1u64..(1u64 << n) {
        let x = step.trailing_zeros() as usize;
        let bit = 1u64 << x;
        if inside & bit == 0 {
            let mut nb = adj[x] & inside;
            while nb != 0 {
                let y = nb.trailing_zeros() as usize;
                nb &= nb - 1;
                let d = deg[y] as usize;
                hist[d] -= 1;
                if hist[d] == 0 {
                    distinct -= 1;
                }
                if hist[d + 1] == 0 {
                    distinct += 1;
                }
                hist[d + 1] += 1;
            }
            let mut nb = adj[x];
            while nb != 0 {
                let y = nb.trailing_zeros() as usize;
                nb &= nb - 1;
                deg[y] += 1;
            }
            inside |= bit;
            let d = deg[x] as usize;
            if hist[d] == 0 {
                distinct += 1;
            }
            hist[d] += 1;
        } else {
            let d = deg[x] as usize;
            hist[d] -= 1;
            if hist[d] == 0 {
                distinct -= 1;
            }
            inside &= !bit;
            let mut nb = adj[x];
            while nb != 0 {
                let y = nb.trailing_zeros() as usize;
                nb &= nb - 1;
                deg[y] -= 1;
            }
            let mut nb = adj[x] & inside;
            while nb != 0 {
                let y = nb.trailing_zeros() as usize;
                nb &= nb - 1;
                let d = deg[y] as usize;
                hist[d + 1] -= 1;
                if hist[d + 1] == 0 {
                    distinct -= 1;
                }
                if hist[d] == 0 {
                    distinct += 1;
                }
                hist[d] += 1;
            }
        }
        if distinct > best {
            best = distinct;
            best_code = inside;
            if best == ceiling {
                break;
            }
        }
    }
    Ok(FWitness { subset: VertexSet::from_mask(n, best_code), distinct_count: best })
}

/// Maximum clique of a graph given by single-word adjacency rows, found by
/// branch and bound with greedy-colouring bounds. Ties go to the first
/// clique found when candidates are expanded from the highest colour class
/// down, with colour classes filled in increasing vertex order.
pub fn max_clique_mask(adj: &[u64]) -> u64 {
    let n = adj.len();
    assert!(n <= 64);
    if n == 0 {
        return 0;
    }
    let all = if n == 64 { !0 } else { (1u64 << n) - 1 };
    let mut best = 0u64;
    expand(adj, 0, all, &mut best);
    best
}

fn expand(adj: &[u64], current: u64, mut candidates: u64, best: &mut u64) {
    let mut order = [0u8; 64];
    let mut colour = [0u8; 64];
    let len = colour_sort(adj, candidates, &mut order, &mut colour);
    let size = current.count_ones();
    for idx in (0..len).rev() {
        if size + colour[idx] as u32 <= best.count_ones() {
            return;
        }
        let v = order[idx] as usize;
        let next = current | (1u64 << v);
        let rest = candidates & adj[v];
        if rest == 0 {
            if next.count_ones() > best.count_ones() {
                *best = next;
            }
        } else {
            expand(adj, next, rest, best);
        }
        candidates &= !(1u64 << v);
    }
}

fn colour_sort(adj: &[u64], candidates: u64, order: &mut [u8; 64], colour: &mut [u8; 64]) -> usize {
    let mut uncoloured = candidates;
    let mut len = 0;
    let mut c = 0u8;
    while uncoloured != 0 {
        c += 1;
        let mut class = uncoloured;
        while class != 0 {
            let v = class.trailing_zeros() as usize;
            class &= !(1u64 << v) & !adj[v];
            uncoloured &= !(1u64 << v);
            order[len] = v as u8;
            colour[len] = c;
            len += 1;
        }
    }
    len
}

pub fn exact_hom(g: &Graph) -> Result<HomWitness, OracleError> {
    exact_hom_with_cap(g, DEFAULT_HOM_CAP)
}

/// `hom(G)` as the larger of the maximum clique of `g` and of its
/// complement; a clique wins ties.
pub fn exact_hom_with_cap(g: &Graph, cap: usize) -> Result<HomWitness, OracleError> {
    let n = g.n();
    if n > cap.min(64) {
        return Err(OracleError::CapExceeded { n, cap: cap.min(64) });
    }
    let clique = max_clique_mask(&g.adjacency_masks());
    let independent = max_clique_mask(&g.complement().adjacency_masks());
    Ok(if independent.count_ones() > clique.count_ones() {
        HomWitness { subset: VertexSet::from_mask(n, independent), kind: HomKind::Independent }
    } else {
        HomWitness { subset: VertexSet::from_mask(n, clique), kind: HomKind::Clique }
    })
}

/// Independence number, exact for `n <= 64`.
pub fn independence_number(g: &Graph) -> Result<usize, OracleError> {
    if g.n() > 64 {
        return Err(OracleError::CapExceeded { n: g.n(), cap: 64 });
    }
    Ok(max_clique_mask(&g.complement().adjacency_masks()).count_ones() as usize)
}

/// Whether `u` and `v` are too similar to sit together in a `delta`-diverse
/// set of `g`.
#[inline]
pub(crate) fn conflicting(g: &Graph, u: usize, v: usize, delta: Fraction) -> bool {
    delta.exceeds(g.sym_diff(u, v) as u64, g.n() as u64)
}

pub fn is_diverse(g: &Graph, set: &VertexSet, delta: Fraction) -> bool {
    let members = set.to_vec();
    members.iter().enumerate().all(|(i, &u)| members[i + 1..].iter().all(|&v| !conflicting(g, u, v, delta)))
}

pub fn exact_max_diverse(g: &Graph, delta: Fraction) -> Result<VertexSet, OracleError> {
    exact_max_diverse_with_cap(g, delta, DEFAULT_DIVERSE_CAP)
}

/// Largest `U` with `|N(u) △ N(u')| >= delta * n` for all distinct
/// `u, u' ∈ U`: a maximum clique of the non-conflict graph.
pub fn exact_max_diverse_with_cap(g: &Graph, delta: Fraction, cap: usize) -> Result<VertexSet, OracleError> {
    let n = g.n();
    if n > cap.min(64) {
        return Err(OracleError::CapExceeded { n, cap: cap.min(64) });
    }
    let mut compatible = vec![0u64; n];
    for u in 0..n {
        for v in u + 1..n {
            if !conflicting(g, u, v, delta) {
                compatible[u] |= 1 << v;
                compatible[v] |= 1 << u;
            }
        }
    }
    Ok(VertexSet::from_mask(n, max_clique_mask(&compatible)))
}

/// Which clause of the control-graph definition a witness breaks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum ControlViolation {
    VertexOutOfRange { vertex: usize },
    Overlap { vertex: usize },
    CPartTooSmall { part: usize, size: usize, required: usize },
    MixedAdjacency { a: usize, part: usize },
    EqualDegrees { a: usize, b: usize, degree: usize },
}

impl fmt::Display for ControlViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::VertexOutOfRange { vertex } => write!(f, "vertex {vertex} is not in the graph"),
            Self::Overlap { vertex } => write!(f, "vertex {vertex} appears in more than one set"),
            Self::CPartTooSmall { part, size, required } => {
                write!(f, "C part {part} has {size} vertices, needs at least {required}")
            }
            Self::MixedAdjacency { a, part } => {
                write!(f, "A-vertex {a} is neither complete nor empty to C part {part}")
            }
            Self::EqualDegrees { a, b, degree } => write!(
                f,
                "A-vertices {a} and {b} share their C-neighbourhood and both have degree {degree} in F[A ∪ B]"
            ),
        }
    }
}

/// Checks the control-graph definition for `F = g[A ∪ B ∪ C]` with
/// `k = |A|`:
/// * every C part has at least `k² - 1` vertices,
/// * each `F[a, C_j]` is complete or empty,
/// * A-vertices with identical C-neighbourhoods have distinct degrees in
///   `F[A ∪ B]`.
pub fn verify_control_graph(g: &Graph, w: &ControlGraphWitness) -> Result<(), ControlViolation> {
    let n = g.n();
    let mut seen = VertexSet::empty(n);
    let all = w.a.iter().chain(w.b_parts.iter().flatten()).chain(w.c_parts.iter().flatten());
    for &v in all {
        if v >= n {
            return Err(ControlViolation::VertexOutOfRange { vertex: v });
        }
        if seen.contains(v) {
            return Err(ControlViolation::Overlap { vertex: v });
        }
        seen.insert(v);
    }
    let k = w.a.len();
    let required = (k * k).saturating_sub(1);
    let c_sets: Vec<VertexSet> = w.c_parts.iter().map(|p| VertexSet::from_vertices(n, p.iter().copied())).collect();
    for (j, part) in c_sets.iter().enumerate() {
        if part.len() < required {
            return Err(ControlViolation::CPartTooSmall { part: j, size: part.len(), required });
        }
    }
    let mut c_profile = Vec::with_capacity(k);
    for &a in &w.a {
        let mut profile = Vec::with_capacity(c_sets.len());
        for (j, part) in c_sets.iter().enumerate() {
            let hits = g.degree_within(a, part);
            if hits != 0 && hits != part.len() {
                return Err(ControlViolation::MixedAdjacency { a, part: j });
            }
            profile.push(hits != 0);
        }
        c_profile.push(profile);
    }
    let ab = VertexSet::from_vertices(n, w.a.iter().chain(w.b_parts.iter().flatten()).copied());
    let degrees: Vec<usize> = w.a.iter().map(|&a| g.degree_within(a, &ab)).collect();
    for i in 0..k {
        for j in i + 1..k {
            if c_profile[i] == c_profile[j] && degrees[i] == degrees[j] {
                return Err(ControlViolation::EqualDegrees { a: w.a[i], b: w.a[j], degree: degrees[i] });
            }
        }
    }
    Ok(())
}

pub fn is_control_graph(g: &Graph, w: &ControlGraphWitness) -> bool {
    verify_control_graph(g, w).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::turan;
    use crate::graph::GraphBuilder;

    /// Plain recursion over all subsets; independent of the Gray-code walk.
    fn brute_f(g: &Graph) -> usize {
        let n = g.n();
        (1u64..(1 << n)).map(|m| g.degree_profile(&VertexSet::from_mask(n, m)).distinct_count).max().unwrap_or(0)
    }

    fn brute_hom(g: &Graph) -> usize {
        let n = g.n();
        (0u64..(1 << n))
            .map(|m| VertexSet::from_mask(n, m))
            .filter(|s| g.is_clique(s) || g.is_independent(s))
            .map(|s| s.len())
            .max()
            .unwrap_or(0)
    }

    fn random_graph(n: usize, seed: u64) -> Graph {
        crate::generators::erdos_renyi(n, Fraction::HALF, seed)
    }

    #[test]
    fn exact_f_examples() {
        assert_eq!(exact_f(&Graph::complete(6)).unwrap().distinct_count, 1);
        assert_eq!(exact_f(&turan(2, 3)).unwrap().distinct_count, 2);
        assert_eq!(exact_f(&Graph::cycle(5)).unwrap().distinct_count, 2);
        assert_eq!(brute_f(&Graph::cycle(5)), 2);
        assert_eq!(exact_f(&Graph::empty(0)).unwrap().distinct_count, 0);
        assert_eq!(exact_f(&Graph::empty(1)).unwrap().distinct_count, 1);
        assert_eq!(exact_f(&Graph::empty(25)), Err(OracleError::CapExceeded { n: 25, cap: 24 }));
    }

    #[test]
    fn exact_f_matches_plain_enumeration() {
        for seed in 0..60 {
            let n = 1 + (seed as usize % 10);
            let g = random_graph(n, seed);
            let w = exact_f(&g).unwrap();
            assert_eq!(w.distinct_count, brute_f(&g), "seed {seed}");
            assert_eq!(g.degree_profile(&w.subset).distinct_count, w.distinct_count);
        }
    }

    #[test]
    fn exact_f_is_monotone_under_induction() {
        for seed in 0..10 {
            let g = random_graph(9, 100 + seed);
            let f = exact_f(&g).unwrap().distinct_count;
            for mask in [0b1_0101_0101u64, 0b0_1111_0000, 0b1_1000_0111] {
                let (h, _) = g.induced(&VertexSet::from_mask(9, mask));
                assert!(exact_f(&h).unwrap().distinct_count <= f);
            }
        }
    }

    #[test]
    fn exact_hom_examples() {
        let k7 = exact_hom(&Graph::complete(7)).unwrap();
        assert_eq!((k7.size(), k7.kind), (7, HomKind::Clique));
        let t = exact_hom(&turan(2, 3)).unwrap();
        assert_eq!((t.size(), t.kind), (3, HomKind::Independent));
        assert_eq!(exact_hom(&Graph::cycle(5)).unwrap().size(), 2);
        assert_eq!(brute_hom(&Graph::cycle(5)), 2);
    }

    #[test]
    fn exact_hom_matches_enumeration_and_complement() {
        for seed in 0..60 {
            let n = 1 + (seed as usize % 12);
            let g = random_graph(n, seed);
            let w = exact_hom(&g).unwrap();
            assert!(w.verify(&g));
            assert_eq!(w.size(), brute_hom(&g), "seed {seed}");
            let wc = exact_hom(&g.complement()).unwrap();
            assert_eq!(wc.size(), w.size());
            // Floor of half log2 n is a lower bound for every graph.
            let floor_half_log = (usize::BITS - 1 - n.leading_zeros()) as usize / 2;
            assert!(w.size() >= floor_half_log);
        }
    }

    #[test]
    fn max_diverse_examples() {
        let g = random_graph(12, 4);
        assert_eq!(exact_max_diverse(&g, Fraction::ZERO).unwrap(), g.vertices());
        let k = Graph::complete(8);
        // Every pair of K8 has symmetric difference 2 < 8/2.
        assert_eq!(exact_max_diverse(&k, Fraction::HALF).unwrap().len(), 1);
        let t = turan(3, 2);
        let best = exact_max_diverse(&t, Fraction::HALF).unwrap();
        assert_eq!(best.len(), 3);
        assert!(is_diverse(&t, &best, Fraction::HALF));
    }

    fn witness(a: &[usize], b: &[&[usize]], c: &[&[usize]]) -> ControlGraphWitness {
        ControlGraphWitness {
            a: a.to_vec(),
            b_parts: b.iter().map(|p| p.to_vec()).collect(),
            c_parts: c.iter().map(|p| p.to_vec()).collect(),
        }
    }

    #[test]
    fn control_verification_examples() {
        let g = Graph::empty(3);
        assert_eq!(verify_control_graph(&g, &witness(&[1], &[], &[])), Ok(()));

        // a1 = 0, a2 = 1, b = 2 with the single A ∪ B edge a2-b; C = {3,4,5}.
        let mut builder = GraphBuilder::new(6);
        builder.add_edge(1, 2);
        let g = builder.clone().build();
        let w = witness(&[0, 1], &[&[], &[2]], &[&[3, 4, 5]]);
        assert_eq!(verify_control_graph(&g, &w), Ok(()));

        builder.add_edge(0, 2);
        let g = builder.build();
        assert_eq!(
            verify_control_graph(&g, &w),
            Err(ControlViolation::EqualDegrees { a: 0, b: 1, degree: 1 })
        );
    }

    #[test]
    fn control_verification_rejects_malformed() {
        let g = Graph::from_edges(6, [(0, 3)]).unwrap();
        assert_eq!(
            verify_control_graph(&g, &witness(&[0, 1], &[&[], &[2]], &[&[3, 4, 5]])),
            Err(ControlViolation::MixedAdjacency { a: 0, part: 0 })
        );
        assert_eq!(
            verify_control_graph(&g, &witness(&[0, 1], &[&[], &[1]], &[])),
            Err(ControlViolation::Overlap { vertex: 1 })
        );
        assert_eq!(
            verify_control_graph(&g, &witness(&[0, 1], &[&[], &[2]], &[&[4, 5]])),
            Err(ControlViolation::CPartTooSmall { part: 0, size: 2, required: 3 })
        );
        assert_eq!(
            verify_control_graph(&g, &witness(&[9], &[], &[])),
            Err(ControlViolation::VertexOutOfRange { vertex: 9 })
        );
    }
}
