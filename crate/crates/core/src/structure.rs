//! Neighbourhood-similarity partitions and their refinement to a perturbed
//! non-degenerate blowup.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use rand::Rng;

use crate::anticonc::greedy_independent_set;
use crate::bitset::VertexSet;
use crate::graph::{BlowupPattern, Graph, GraphBuilder};
use crate::rng::stream;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StructureError {
    InvalidParams(&'static str),
    /// Two vertices of one side are further apart than the certified bound.
    PreconditionViolated { u: usize, v: usize, sym_diff: usize, bound: usize },
    /// The first side is smaller than `max(1, 2D)`.
    PartTooSmall { size: usize, required: usize },
    /// A vertex is neither sparse nor dense to the other side, and the
    /// similarity precondition held. Indicates a bug.
    DichotomyViolated { vertex: usize },
    /// Classification of the part pair `(left, right)` failed.
    StructureFailure { left: usize, right: usize, cause: Box<StructureError> },
    NotAPerturbation { deviation: usize, delta: usize },
    Degenerate { a: usize, b: usize },
}

impl fmt::Display for StructureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidParams(msg) => write!(f, "invalid structure parameters: {msg}"),
            Self::PreconditionViolated { u, v, sym_diff, bound } => {
                write!(f, "vertices {u} and {v} differ on {sym_diff} > {bound} neighbours")
            }
            Self::PartTooSmall { size, required } => write!(f, "part has {size} vertices, needs {required}"),
            Self::DichotomyViolated { vertex } => {
                write!(f, "vertex {vertex} is neither sparse nor dense to the other part")
            }
            Self::StructureFailure { left, right, cause } => {
                write!(f, "classifying parts {left} and {right} failed: {cause}")
            }
            Self::NotAPerturbation { deviation, delta } => {
                write!(f, "deviation {deviation} from the recovered blowup exceeds {delta}")
            }
            Self::Degenerate { a, b } => write!(f, "parts {a} and {b} could be merged"),
        }
    }
}

impl core::error::Error for StructureError {}

/// Partition of `V(g)` around a maximal set of pairwise dissimilar centers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimilarityPartition {
    pub parts: Vec<VertexSet>,
    pub centers: Vec<usize>,
    pub threshold: usize,
    /// Largest `|N(u) △ N(v)|` inside one part (at most `2·threshold`).
    pub bound: usize,
}

/// A partition of `W = V(g) ∖ R` with a complete/empty pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupDescription {
    pub parts: Vec<VertexSet>,
    pub pattern: BlowupPattern,
    pub delta: usize,
    pub exceptional: VertexSet,
    pub centers: Vec<usize>,
}

impl BlowupDescription {
    /// Description of a blowup on exactly `parts` with no exceptional set;
    /// the first vertex of each part is its center.
    pub fn exact(parts: Vec<VertexSet>, pattern: BlowupPattern, delta: usize) -> Self {
        let n = parts.first().map_or(0, VertexSet::universe);
        let centers = parts.iter().map(|p| p.first().unwrap_or(0)).collect();
        Self { parts, pattern, delta, exceptional: VertexSet::empty(n), centers }
    }

    /// `W`, the union of the parts.
    pub fn covered(&self) -> VertexSet {
        let n = self.exceptional.universe();
        self.parts.iter().fold(VertexSet::empty(n), |acc, p| acc.union(p))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Density {
    Sparse,
    Dense,
}

/// Thresholds for [`refine_to_blowup`].
///
/// `d2 = None` means `8·L·d1` with `L` the number of input parts. In
/// faithful mode [`StructureParams::check`] enforces
/// `T >= 5Δ >= 200 L² D1` and the default `d2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StructureParams {
    pub d1: usize,
    pub d2: Option<usize>,
    pub delta: usize,
    pub t: usize,
    pub paper_faithful: bool,
}

impl StructureParams {
    pub fn free(d1: usize, delta: usize, t: usize) -> Self {
        Self { d1, d2: None, delta, t, paper_faithful: false }
    }

    /// Smallest faithful-mode thresholds for `L` parts:
    /// `Δ = 40 L² D1`, `T = 5Δ`.
    pub fn paper_faithful(d1: usize, parts: usize) -> Self {
        let delta = 40 * parts * parts * d1;
        Self { d1, d2: None, delta, t: 5 * delta, paper_faithful: true }
    }

    pub fn d2(&self, parts: usize) -> usize {
        self.d2.unwrap_or(8 * parts * self.d1)
    }

    pub fn check(&self, parts: usize) -> Result<(), StructureError> {
        if !self.paper_faithful {
            return Ok(());
        }
        if self.d2.is_some_and(|d2| d2 != 8 * parts * self.d1) {
            return Err(StructureError::InvalidParams("D2 must equal 8·L·D1"));
        }
        let l2d1 = (parts as u128) * (parts as u128) * self.d1 as u128;
        if (self.t as u128) < 5 * self.delta as u128 || 5 * (self.delta as u128) < 200 * l2d1 {
            return Err(StructureError::InvalidParams("need T >= 5Δ >= 200·L²·D1"));
        }
        Ok(())
    }
}

/// Output of [`refine_to_blowup`] with its certificates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refinement {
    pub description: BlowupDescription,
    pub merges: usize,
    /// `D2` actually used.
    pub d2: usize,
    /// Largest `W`-restricted `△` inside one final part.
    pub diameter: usize,
    /// `L·(D1 + D2)`.
    pub merged_bound: usize,
}

/// Greedy maximal set of centers with pairwise `△ >= threshold` (scanning by
/// index); each vertex joins the lowest-index center with `△ < threshold`.
pub fn coarse_partition(g: &Graph, threshold: usize) -> Result<SimilarityPartition, StructureError> {
    if threshold == 0 {
        return Err(StructureError::InvalidParams("threshold must be at least 1"));
    }
    let n = g.n();
    let mut centers: Vec<usize> = Vec::new();
    for v in 0..n {
        if centers.iter().all(|&c| g.sym_diff(v, c) >= threshold) {
            centers.push(v);
        }
    }
    let mut parts = vec![VertexSet::empty(n); centers.len()];
    for v in 0..n {
        let home = centers.iter().position(|&c| g.sym_diff(v, c) < threshold).expect("centers are maximal");
        parts[home].insert(v);
    }
    let mut bound = 0;
    for part in &parts {
        let members = part.to_vec();
        for (i, &u) in members.iter().enumerate() {
            for &v in &members[i + 1..] {
                bound = bound.max(g.sym_diff(u, v));
            }
        }
    }
    assert!(bound < 2 * threshold, "triangle inequality for △ violated");
    Ok(SimilarityPartition { parts, centers, threshold, bound })
}

/// [`classify_pair_within`] with all of `V(g)` as scope.
pub fn classify_pair(g: &Graph, v1: &VertexSet, v2: &VertexSet, d: usize) -> Result<Density, StructureError> {
    classify_pair_within(g, &g.vertices(), v1, v2, d)
}

fn check_similar(g: &Graph, scope: &VertexSet, side: &VertexSet, d: usize) -> Result<(), StructureError> {
    let members = side.to_vec();
    for (i, &u) in members.iter().enumerate() {
        for &v in &members[i + 1..] {
            let sym_diff = g.sym_diff_size(u, v, scope);
            if sym_diff > d {
                return Err(StructureError::PreconditionViolated { u, v, sym_diff, bound: d });
            }
        }
    }
    Ok(())
}

/// Decides whether every `v ∈ v1` has at most `4D` neighbours in `v2`
/// (sparse) or misses at most `4D` of `v2 ∖ {v}` (dense).
///
/// Requires `|v1| >= max(1, 2D)` and `W`-restricted `△ <= D` inside both
/// sides, where `W = scope`. When both answers fit (possible only if
/// `|v2| <= 8D + 1`) the side with more edges wins.
pub fn classify_pair_within(
    g: &Graph,
    scope: &VertexSet,
    v1: &VertexSet,
    v2: &VertexSet,
    d: usize,
) -> Result<Density, StructureError> {
    let required = (2 * d).max(1);
    if v1.len() < required {
        return Err(StructureError::PartTooSmall { size: v1.len(), required });
    }
    check_similar(g, scope, v1, d)?;
    check_similar(g, scope, v2, d)?;
    let (mut sparse, mut dense) = (true, true);
    let (mut hits_total, mut room_total) = (0, 0);
    for v in v1.iter() {
        let hits = g.degree_within(v, v2);
        let room = v2.len() - usize::from(v2.contains(v));
        let s = hits <= 4 * d;
        let c = hits + 4 * d >= room;
        if !s && !c {
            return Err(StructureError::DichotomyViolated { vertex: v });
        }
        sparse &= s;
        dense &= c;
        hits_total += hits;
        room_total += room;
    }
    match (sparse, dense) {
        (true, true) if 2 * hits_total > room_total => Ok(Density::Dense),
        (true, _) => Ok(Density::Sparse),
        (false, true) => Ok(Density::Dense),
        (false, false) => {
            let vertex = v1.iter().next().expect("nonempty side");
            Err(StructureError::DichotomyViolated { vertex })
        }
    }
}

/// Largest deviation `|(N(v) ∩ Y) △ ideal(v, Y)|` over vertices `v` and parts
/// `Y`, where `ideal(v, Y)` is `Y ∖ {v}` for a complete cell and `∅`
/// otherwise. Vertices outside every part are ignored.
pub fn deviation(g: &Graph, parts: &[VertexSet], pattern: &BlowupPattern) -> usize {
    let mut worst = 0;
    for (x, part) in parts.iter().enumerate() {
        for v in part.iter() {
            for (y, other) in parts.iter().enumerate() {
                let hits = g.degree_within(v, other);
                let dev = if pattern.get(x, y) { other.len() - usize::from(other.contains(v)) - hits } else { hits };
                worst = worst.max(dev);
            }
        }
    }
    worst
}

/// Whether `g[W]` is a `bd.delta`-perturbation of the described blowup, in
/// the per-vertex form of [`deviation`]. Also checks that the parts are
/// disjoint, avoid `R`, and that the pattern has one row per part.
pub fn verify_perturbation(g: &Graph, bd: &BlowupDescription) -> bool {
    if bd.pattern.parts() != bd.parts.len() || bd.centers.len() != bd.parts.len() {
        return false;
    }
    let mut seen = bd.exceptional.clone();
    for (part, &center) in bd.parts.iter().zip(&bd.centers) {
        if part.universe() != g.n() || !seen.is_disjoint(part) || (!part.is_empty() && !part.contains(center)) {
            return false;
        }
        seen.union_with(part);
    }
    deviation(g, &bd.parts, &bd.pattern) <= bd.delta
}

/// First pair of parts `(a, b)` that could be merged into one part of a
/// blowup with fewer parts, if any.
pub fn mergeable_pair(pattern: &BlowupPattern) -> Option<(usize, usize)> {
    let m = pattern.parts();
    for a in 0..m {
        for b in a + 1..m {
            let within = pattern.get(a, a) == pattern.get(b, b) && pattern.get(a, a) == pattern.get(a, b);
            if within && (0..m).filter(|&z| z != a && z != b).all(|z| pattern.get(a, z) == pattern.get(b, z)) {
                return Some((a, b));
            }
        }
    }
    None
}

pub fn verify_nondegenerate(bd: &BlowupDescription) -> bool {
    mergeable_pair(&bd.pattern).is_none()
}

/// Drops parts smaller than `T` into `R`, merges parts whose closest
/// `W`-restricted `△` is at most `D2` (lowest-index pair first) and reads off
/// the pattern with [`classify_pair_within`], using the measured part
/// diameter as `D`.
pub fn refine_to_blowup(g: &Graph, sp: &SimilarityPartition, params: &StructureParams) -> Result<Refinement, StructureError> {
    let l = sp.parts.len();
    params.check(l)?;
    let n = g.n();
    let d2 = params.d2(l);
    let mut exceptional = VertexSet::empty(n);
    let mut parts: Vec<VertexSet> = Vec::new();
    for part in &sp.parts {
        if part.len() < params.t {
            exceptional.union_with(part);
        } else {
            parts.push(part.clone());
        }
    }
    let w = exceptional.complement();

    let m = parts.len();
    let mut closest = vec![vec![usize::MAX; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let mut best = usize::MAX;
            for x in parts[i].iter() {
                for y in parts[j].iter() {
                    best = best.min(g.sym_diff_size(x, y, &w));
                }
            }
            closest[i][j] = best;
            closest[j][i] = best;
        }
    }
    let mut merges = 0;
    'merge: loop {
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                if closest[i][j] > d2 {
                    continue;
                }
                for k in 0..parts.len() {
                    let value = closest[i][k].min(closest[j][k]);
                    closest[i][k] = value;
                    closest[k][i] = value;
                }
                closest[i][i] = usize::MAX;
                closest.remove(j);
                for row in closest.iter_mut() {
                    row.remove(j);
                }
                let absorbed = parts.remove(j);
                parts[i].union_with(&absorbed);
                merges += 1;
                continue 'merge;
            }
        }
        break;
    }
    assert!(merges + parts.len() == m);

    let mut diameter = 0;
    for part in &parts {
        let members = part.to_vec();
        for (a, &u) in members.iter().enumerate() {
            for &v in &members[a + 1..] {
                diameter = diameter.max(g.sym_diff_size(u, v, &w));
            }
        }
    }
    let k = parts.len();
    let mut cells = vec![false; k * k];
    for i in 0..k {
        for j in i..k {
            let density = classify_pair_within(g, &w, &parts[i], &parts[j], diameter)
                .map_err(|cause| StructureError::StructureFailure { left: i, right: j, cause: Box::new(cause) })?;
            cells[i * k + j] = density == Density::Dense;
            cells[j * k + i] = density == Density::Dense;
        }
    }
    let pattern = BlowupPattern::new(k, cells).expect("filled symmetrically");
    let centers = parts.iter().map(|p| p.first().expect("parts are nonempty")).collect();
    let description = BlowupDescription { parts, pattern, delta: params.delta, exceptional, centers };
    if !verify_perturbation(g, &description) {
        let dev = deviation(g, &description.parts, &description.pattern);
        return Err(StructureError::NotAPerturbation { deviation: dev, delta: params.delta });
    }
    if let Some((a, b)) = mergeable_pair(&description.pattern) {
        return Err(StructureError::Degenerate { a, b });
    }
    Ok(Refinement { description, merges, d2, diameter, merged_bound: l * (params.d1 + d2) })
}

/// Statistics of the random experiment behind the bound on the number of
/// centers: a uniform random `W`, the centers' degrees into `W`, and the
/// graph of center pairs with equal degree.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimilarityAudit {
    pub trials: u32,
    pub centers: usize,
    pub mean_collisions: f64,
    pub max_collisions: usize,
    /// Largest greedy independent set of the collision graph seen; each is a
    /// set of centers with distinct degrees into `W`.
    pub best_distinct: usize,
}

pub fn audit_similarity_partition(g: &Graph, sp: &SimilarityPartition, trials: u32, seed: u64) -> SimilarityAudit {
    let n = g.n();
    let s = sp.centers.len();
    let (mut total, mut max_collisions, mut best_distinct) = (0usize, 0, 0);
    for trial in 0..trials {
        let mut rng = stream(seed, trial as u64);
        let w = VertexSet::from_vertices(n, (0..n).filter(|_| rng.gen::<bool>()));
        let degrees: Vec<usize> = sp.centers.iter().map(|&c| g.degree_within(c, &w)).collect();
        let mut clash = GraphBuilder::new(s);
        let mut collisions = 0;
        for i in 0..s {
            for j in i + 1..s {
                if degrees[i] == degrees[j] {
                    clash.add_edge(i, j);
                    collisions += 1;
                }
            }
        }
        let clash = clash.build();
        total += collisions;
        max_collisions = max_collisions.max(collisions);
        best_distinct = best_distinct.max(greedy_independent_set(&clash, &clash.vertices()).len());
    }
    SimilarityAudit {
        trials,
        centers: s,
        mean_collisions: if trials == 0 { 0.0 } else { total as f64 / trials as f64 },
        max_collisions,
        best_distinct,
    }
}
