//! Control graphs: greedy construction in sparse graphs, extraction of
//! distinct degrees by random prefixes, and assembly across the parts of a
//! perturbed blowup.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bitset::VertexSet;
use crate::graph::Graph;
use crate::oracle::{
    exact_f_with_cap, exact_hom_with_cap, independence_number, verify_control_graph, ControlViolation, HomWitness,
    DEFAULT_F_CAP, DEFAULT_HOM_CAP,
};
use crate::rng::stream;
use crate::structure::{
    coarse_partition, mergeable_pair, refine_to_blowup, verify_perturbation, BlowupDescription, StructureParams,
};

/// `(A, B, C)` with `A = (a_1, ..., a_k)`, `B` split as `b_parts[i]`
/// (attached to `a[i]`) and `C` split into `c_parts`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlGraphWitness {
    pub a: Vec<usize>,
    pub b_parts: Vec<Vec<usize>>,
    pub c_parts: Vec<Vec<usize>>,
}

impl ControlGraphWitness {
    pub fn k(&self) -> usize {
        self.a.len()
    }

    /// `A ∪ B ∪ C` over `n` vertices.
    pub fn vertex_set(&self, n: usize) -> VertexSet {
        let all = self.a.iter().chain(self.b_parts.iter().flatten()).chain(self.c_parts.iter().flatten());
        VertexSet::from_vertices(n, all.copied())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ControlError {
    /// A hypothesis of the greedy construction fails; `clause` names it.
    PreconditionViolated { clause: &'static str },
    /// No vertex of degree `level - 1` remains, so the remaining graph has
    /// an independent set of size at least `n`.
    DegreeShortfall { level: usize, max_degree: usize },
    InvalidWitness(ControlViolation),
    RetriesExhausted { attempts: u32 },
    InvalidParams(&'static str),
    AssemblyFailure { round: usize, cause: String },
}

impl fmt::Display for ControlError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PreconditionViolated { clause } => write!(f, "precondition violated: {clause}"),
            Self::DegreeShortfall { level, max_degree } => write!(
                f,
                "no vertex of degree {} at level {level} (maximum {max_degree}); the independence number is at least n",
                level - 1
            ),
            Self::InvalidWitness(v) => write!(f, "not a control graph: {v}"),
            Self::RetriesExhausted { attempts } => write!(f, "no prefix choice separated A in {attempts} attempts"),
            Self::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            Self::AssemblyFailure { round, cause } => write!(f, "assembly failed in round {round}: {cause}"),
        }
    }
}

impl core::error::Error for ControlError {}

/// `⌈x / (n - 1)⌉`; requires `n >= 2`.
pub fn phi(x: usize, n: usize) -> usize {
    assert!(n >= 2, "phi needs n >= 2");
    x.div_ceil(n - 1)
}

/// Greedy `k`-control graph inside `g[W ∪ U]`.
///
/// Level `j = k, ..., 2` takes a maximum-degree vertex `a_j` of the current
/// graph (lowest index on ties) with its `j - 1` lowest-index neighbours as
/// `B_j`, then deletes `U`, `a_j` and `N(B_j ∪ {a_j})`. Level 1 takes the
/// lowest remaining vertex as `a_1` and `C = W ∖ N[a_1]` over what remains.
/// `C` is returned as one part, or none if it is smaller than `k² - 1`.
///
/// The independence-number hypothesis is checked exactly when
/// `|W ∪ U| <= 64` and assumed otherwise.
pub fn build_control_greedy(
    g: &Graph,
    k: usize,
    n: usize,
    delta: usize,
    w: &VertexSet,
    u: &VertexSet,
) -> Result<ControlGraphWitness, ControlError> {
    use ControlError::PreconditionViolated as Pre;
    if k == 0 {
        return Err(Pre { clause: "k >= 1" });
    }
    if !w.is_disjoint(u) {
        return Err(Pre { clause: "W and U disjoint" });
    }
    if (n as u128) < 4 * (k as u128) * (delta as u128) {
        return Err(Pre { clause: "n >= 4kΔ" });
    }
    let whole = w.union(u);
    let size = whole.len();
    if (size as u128) <= (k as u128 - 1) * (n as u128).saturating_sub(1) || size == 0 {
        return Err(Pre { clause: "N > (k-1)(n-1)" });
    }
    if 2 * u.len() > n {
        return Err(Pre { clause: "|U| <= n/2" });
    }
    if whole.iter().any(|v| g.degree_within(v, w) > delta) {
        return Err(Pre { clause: "every vertex has at most Δ neighbours in W" });
    }
    if size <= DEFAULT_HOM_CAP {
        let (sub, _) = g.induced(&whole);
        if independence_number(&sub).expect("within cap") >= n {
            return Err(Pre { clause: "α < n" });
        }
    }

    let mut alive = whole;
    let mut a = vec![0; k];
    let mut b_parts = vec![Vec::new(); k];
    let mut first = true;
    for level in (2..=k).rev() {
        let (best, max_degree) = alive
            .iter()
            .map(|v| (v, g.degree_within(v, &alive)))
            .fold((usize::MAX, 0), |acc, (v, d)| if acc.0 == usize::MAX || d > acc.1 { (v, d) } else { acc });
        if best == usize::MAX || max_degree < level - 1 {
            return Err(ControlError::DegreeShortfall { level, max_degree });
        }
        let b: Vec<usize> = g.neighbors(best).intersection(&alive).iter().take(level - 1).collect();
        let mut removed = VertexSet::from_vertices(g.n(), b.iter().copied());
        removed.insert(best);
        for &x in b.iter().chain(core::iter::once(&best)) {
            removed.union_with(g.neighbors(x));
        }
        removed.intersect_with(&alive);
        if first {
            removed.union_with(u);
        }
        let bound = 1 + delta + (level - 1) * delta.saturating_sub(1) + if first { u.len() } else { 0 };
        assert!(removed.len() <= bound, "deleted {} > {bound} vertices at level {level}", removed.len());
        alive.difference_with(&removed);
        first = false;
        a[level - 1] = best;
        b_parts[level - 1] = b;
    }
    if first {
        alive.difference_with(u);
        if alive.is_empty() {
            alive = u.clone();
        }
    }
    let a1 = alive.first().ok_or(ControlError::DegreeShortfall { level: 1, max_degree: 0 })?;
    a[0] = a1;
    let mut c = alive.intersection(w);
    c.difference_with(g.neighbors(a1));
    c.remove(a1);
    let c_parts = if c.len() + 1 >= k * k && !c.is_empty() { vec![c.to_vec()] } else { Vec::new() };
    let witness = ControlGraphWitness { a, b_parts, c_parts };
    if let Err(v) = verify_control_graph(g, &witness) {
        panic!("greedy construction produced an invalid control graph: {v}");
    }
    Ok(witness)
}

/// A vertex set on which the A-vertices of a control graph have pairwise
/// distinct degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControlExtraction {
    pub subset: VertexSet,
    pub attempts: u32,
}

/// Draws `m_j` uniformly from `[0, |C_j|]` and keeps the `m_j` smallest
/// vertices of each `C_j`, until `A` has pairwise distinct degrees in
/// `g[A ∪ B ∪ C']`. Attempt `t` uses stream `(seed, t)`.
pub fn distinct_from_control(
    g: &Graph,
    w: &ControlGraphWitness,
    seed: u64,
    retries: u32,
) -> Result<ControlExtraction, ControlError> {
    verify_control_graph(g, w).map_err(ControlError::InvalidWitness)?;
    let n = g.n();
    let core = VertexSet::from_vertices(n, w.a.iter().chain(w.b_parts.iter().flatten()).copied());
    let sorted: Vec<Vec<usize>> = w
        .c_parts
        .iter()
        .map(|p| {
            let mut p = p.clone();
            p.sort_unstable();
            p
        })
        .collect();
    for attempt in 0..retries {
        let mut rng = stream(seed, attempt as u64);
        let mut subset = core.clone();
        for part in &sorted {
            let m = rng.gen_range(0..=part.len());
            for &v in &part[..m] {
                subset.insert(v);
            }
        }
        let mut degrees: Vec<usize> = w.a.iter().map(|&a| g.degree_within(a, &subset)).collect();
        degrees.sort_unstable();
        if degrees.windows(2).all(|d| d[0] != d[1]) {
            return Ok(ControlExtraction { subset, attempts: attempt + 1 });
        }
    }
    Err(ControlError::RetriesExhausted { attempts: retries })
}

/// Exceptional vertices grouped by similarity to the part centers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Association {
    /// `U_i`: every `v ∈ R` with `|N(v, W) △ N(w_i, W)| <= Δ₁`.
    pub qualifying: Vec<VertexSet>,
    /// Each covered vertex in its lowest qualifying `U_i` only.
    pub assigned: Vec<VertexSet>,
    pub uncovered: VertexSet,
}

pub fn associate_exceptional(g: &Graph, bd: &BlowupDescription, delta1: usize) -> Association {
    let n = g.n();
    let w = bd.covered();
    let m = bd.parts.len();
    let mut qualifying = vec![VertexSet::empty(n); m];
    let mut assigned = vec![VertexSet::empty(n); m];
    let mut uncovered = VertexSet::empty(n);
    for v in bd.exceptional.iter() {
        let mut home = None;
        for (i, &center) in bd.centers.iter().enumerate() {
            if g.sym_diff_size(v, center, &w) <= delta1 {
                qualifying[i].insert(v);
                home.get_or_insert(i);
            }
        }
        match home {
            Some(i) => assigned[i].insert(v),
            None => uncovered.insert(v),
        }
    }
    Association { qualifying, assigned, uncovered }
}

/// Thresholds for [`assemble_from_blowup`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AssemblyParams {
    /// Target size of `A`; each round's `C` part has `k²` vertices.
    pub k: usize,
    pub n: usize,
    pub d1: u64,
    pub delta: usize,
    pub delta1: usize,
    pub t: u64,
    pub n0: u64,
    pub paper_faithful: bool,
}

impl AssemblyParams {
    /// User thresholds with `Δ₁ = 32Δk`.
    pub fn free(k: usize, n: usize, delta: usize) -> Self {
        Self { k, n, d1: 0, delta, delta1: 32 * delta * k, t: 0, n0: 0, paper_faithful: false }
    }

    /// `D1 = 2^11 k²`, `Δ = 2^25 k^4`, `Δ₁ = 2^5 Δ k`, `T = 2^4 Δ₁ k²`,
    /// `n_0 = 2^9 Δ₁ k^4`. `None` if any constant overflows 64 bits.
    pub fn faithful(k: usize, n: usize) -> Option<Self> {
        let k64 = k as u64;
        let k2 = k64.checked_mul(k64)?;
        let k4 = k2.checked_mul(k2)?;
        let d1 = k2.checked_mul(1 << 11)?;
        let delta = k4.checked_mul(1 << 25)?;
        let delta1 = delta.checked_mul(32)?.checked_mul(k64)?;
        let t = delta1.checked_mul(16)?.checked_mul(k2)?;
        let n0 = delta1.checked_mul(512)?.checked_mul(k4)?;
        Some(Self {
            k,
            n,
            d1,
            delta: usize::try_from(delta).ok()?,
            delta1: usize::try_from(delta1).ok()?,
            t,
            n0,
            paper_faithful: true,
        })
    }

    pub fn check(&self) -> Result<(), ControlError> {
        if self.n < 2 {
            return Err(ControlError::InvalidParams("n must be at least 2"));
        }
        if self.k == 0 {
            return Err(ControlError::InvalidParams("k must be at least 1"));
        }
        if self.paper_faithful && (self.n as u64) < self.n0 {
            return Err(ControlError::InvalidParams("faithful mode needs n >= n_0"));
        }
        Ok(())
    }
}

/// Bookkeeping for one assembly round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundReport {
    /// Index of the part in the input description.
    pub part: usize,
    pub available: usize,
    pub k: usize,
    pub complemented: bool,
    /// Vertices removed from later parts to align them with `E_i`.
    pub pruned: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assembly {
    pub witness: ControlGraphWitness,
    pub rounds: Vec<RoundReport>,
    pub a0: Option<usize>,
    /// Exceptional vertices absorbed into round 1.
    pub absorbed: usize,
}

fn fail(round: usize, cause: String) -> ControlError {
    ControlError::AssemblyFailure { round, cause }
}

/// `N_H(w, S)` for `w` in part `x`: the members of `S` lying in parts
/// complete to `x`, excluding `w`.
fn ideal_neighbours(bd: &BlowupDescription, x: usize, w: usize, s: &VertexSet) -> VertexSet {
    let mut out = VertexSet::empty(s.universe());
    for (y, part) in bd.parts.iter().enumerate() {
        if bd.pattern.get(x, y) {
            out.union_with(&part.intersection(s));
        }
    }
    out.remove(w);
    out
}

/// Combines control graphs found inside the parts of a perturbed blowup.
///
/// Parts are processed in decreasing size. Round `i` runs
/// [`build_control_greedy`] on the surviving vertices of part `i` (in the
/// complement when the part is complete inside) with
/// `k_i = min(φ(|W_i^i|), k - used)`, keeps `k²` vertices of its `C` and
/// removes from every later part the vertices not matching the pattern on
/// the round's vertex set `E_i`.
///
/// If every exceptional vertex is similar to a center and the largest part
/// has at least `n/2` vertices, its `U_1` joins round 1 with `2Δ₁` as the
/// degree bound. Otherwise an uncovered exceptional vertex `a_0` becomes a
/// one-vertex control graph on sets `C_{i,0}` of size `k²` that separate it
/// from each part's ideal neighbourhood, carved from the roomiest part; parts keep only vertices that
/// match the pattern on `C_0` and lie on the larger side of `N(a_0)`, so
/// that `a_0` sees every later `C` part completely or not at all.
pub fn assemble_from_blowup(g: &Graph, bd: &BlowupDescription, params: &AssemblyParams) -> Result<Assembly, ControlError> {
    params.check()?;
    if !verify_perturbation(g, bd) {
        return Err(fail(0, String::from("input is not a perturbation of the described blowup")));
    }
    if let Some((a, b)) = mergeable_pair(&bd.pattern) {
        return Err(fail(0, format!("parts {a} and {b} are mergeable")));
    }
    let n_vertices = g.n();
    let (k, n) = (params.k, params.n);
    let big_k = k * k;
    let m = bd.parts.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&i| core::cmp::Reverse(bd.parts[i].len()));

    let association = associate_exceptional(g, bd, params.delta1);
    let mut current: Vec<VertexSet> = bd.parts.clone();
    let mut witness = ControlGraphWitness::default();
    let mut a0 = None;
    let mut extra = VertexSet::empty(n_vertices);

    if let Some(v) = association.uncovered.first() {
        a0 = Some(v);
        let w = bd.covered();
        let seen = g.neighbors(v).intersection(&w);
        let mut used = VertexSet::empty(n_vertices);
        let mut c0 = VertexSet::empty(n_vertices);
        for &i in &order {
            let ideal = ideal_neighbours(bd, i, bd.centers[i], &w);
            let sides = [seen.difference(&ideal), ideal.difference(&seen)];
            // Prefer the part with the most unused vertices, then the lowest index.
            let mut by_room: Vec<&VertexSet> = bd.parts.iter().collect();
            by_room.sort_by_key(|part| core::cmp::Reverse(part.difference(&used).len()));
            let carved = by_room.into_iter().find_map(|part| {
                sides.iter().find_map(|side| {
                    let pool = side.intersection(part).difference(&used);
                    (pool.len() >= big_k).then(|| pool.prefix(big_k))
                })
            });
            let Some(set) = carved else {
                return Err(fail(0, format!("no C_0 set of size {big_k} separates a_0 from part {i}")));
            };
            used.union_with(&set);
            c0.union_with(&set);
            witness.c_parts.push(set.to_vec());
        }
        for (x, part) in current.iter_mut().enumerate() {
            let mut kept = VertexSet::empty(n_vertices);
            for y in part.difference(&c0).iter() {
                if g.neighbors(y).intersection(&c0) == ideal_neighbours(bd, x, y, &c0) {
                    kept.insert(y);
                }
            }
            let near = kept.intersection(g.neighbors(v));
            let far = kept.difference(&near);
            *part = if near.len() > far.len() { near } else { far };
        }
        witness.a.push(v);
        witness.b_parts.push(Vec::new());
    } else if let Some(&largest) = order.first() {
        if 2 * bd.parts[largest].len() >= n {
            extra = association.assigned[largest].clone();
        }
    }

    let mut remaining = k - usize::from(a0.is_some());
    let mut rounds = Vec::with_capacity(m);
    let mut complement: Option<Graph> = None;
    for (round, &i) in order.iter().enumerate() {
        let complemented = bd.pattern.get(i, i);
        let working = if complemented { complement.get_or_insert_with(|| g.complement()) } else { g };
        let absorb = round == 0 && !extra.is_empty();
        let pool = if absorb { current[i].union(&extra) } else { current[i].clone() };
        let available = pool.len();
        let k_i = phi(available, n).min(remaining);
        let mut e_i;
        if k_i == 0 {
            if available < big_k {
                return Err(fail(round + 1, format!("part {i} has {available} vertices left, needs {big_k}")));
            }
            let c = pool.prefix(big_k);
            witness.c_parts.push(c.to_vec());
            e_i = c;
        } else {
            let attempt = |u: &VertexSet, delta: usize| {
                build_control_greedy(working, k_i, n, delta, &pool.difference(u), u)
            };
            let built = if absorb {
                attempt(&extra, 2 * params.delta1)
                    .or_else(|_| attempt(&VertexSet::empty(n_vertices), params.delta))
            } else {
                attempt(&VertexSet::empty(n_vertices), params.delta)
            };
            let mut local = built.map_err(|e| fail(round + 1, format!("part {i}: {e}")))?;
            let c = local.c_parts.pop().unwrap_or_default();
            if c.len() < big_k {
                return Err(fail(round + 1, format!("part {i}: C has {} vertices, needs {big_k}", c.len())));
            }
            let c: Vec<usize> = c[..big_k].to_vec();
            e_i = VertexSet::from_vertices(n_vertices, c.iter().copied());
            for (&a, b) in local.a.iter().zip(&local.b_parts) {
                e_i.insert(a);
                for &x in b {
                    e_i.insert(x);
                }
            }
            witness.a.extend(local.a);
            witness.b_parts.extend(local.b_parts);
            witness.c_parts.push(c);
            remaining -= k_i;
        }
        let mut pruned = 0;
        for &j in &order[round + 1..] {
            let complete = bd.pattern.get(i, j);
            let before = current[j].len();
            let kept: Vec<usize> = current[j]
                .iter()
                .filter(|&y| !e_i.contains(y))
                .filter(|&y| {
                    let hits = g.degree_within(y, &e_i);
                    if complete {
                        hits == e_i.len()
                    } else {
                        hits == 0
                    }
                })
                .collect();
            current[j] = VertexSet::from_vertices(n_vertices, kept);
            pruned += before - current[j].len();
        }
        current[i] = VertexSet::empty(n_vertices);
        rounds.push(RoundReport { part: i, available, k: k_i, complemented, pruned });
    }
    if let Err(v) = verify_control_graph(g, &witness) {
        return Err(fail(m, format!("{v}")));
    }
    Ok(Assembly { witness, rounds, a0, absorbed: extra.len() })
}

/// Result of [`theorem3_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Theorem3Outcome {
    Homogeneous(HomWitness),
    /// An induced subgraph with at least `k` distinct degrees.
    Distinct { subset: VertexSet, stage: &'static str },
    Inconclusive(Vec<StageReport>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageReport {
    pub stage: &'static str,
    pub detail: String,
}

/// Desk-scale knobs for [`theorem3_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Theorem3Params {
    pub threshold: usize,
    pub delta: usize,
    pub t: usize,
    pub seed: u64,
    pub retries: u32,
}

impl Theorem3Params {
    pub fn desk(seed: u64) -> Self {
        Self { threshold: 8, delta: 2, t: 4, seed, retries: 20 }
    }
}

/// Looks for `hom(g) >= n` or `f(g) >= k`: first the exact homogeneous-set
/// search (up to 64 vertices), then partition, refinement, assembly and
/// extraction, then the exact `f` search (up to 24 vertices). Every
/// returned witness has been re-checked.
pub fn theorem3_check(g: &Graph, k: usize, n: usize, params: &Theorem3Params) -> Theorem3Outcome {
    let size = g.n();
    let mut reports = Vec::new();
    if k == 0 || n == 0 || (size as u128) <= (k as u128 - 1) * (n as u128 - 1) {
        reports.push(StageReport { stage: "precondition", detail: String::from("need k, n >= 1 and N > (k-1)(n-1)") });
        return Theorem3Outcome::Inconclusive(reports);
    }
    let distinct_enough = |subset: &VertexSet| g.degree_profile(subset).distinct_count >= k;

    match exact_hom_with_cap(g, DEFAULT_HOM_CAP) {
        Ok(hom) if hom.size() >= n && hom.verify(g) => return Theorem3Outcome::Homogeneous(hom),
        Ok(hom) => reports.push(StageReport { stage: "hom-oracle", detail: format!("hom = {} < {n}", hom.size()) }),
        Err(e) => reports.push(StageReport { stage: "hom-oracle", detail: format!("{e}") }),
    }

    let structural = (|| -> Result<VertexSet, String> {
        if n < 2 {
            return Err(String::from("n must be at least 2"));
        }
        let sp = coarse_partition(g, params.threshold.max(1)).map_err(|e| format!("{e}"))?;
        let sparams = StructureParams::free(sp.bound, params.delta, params.t);
        let refined = refine_to_blowup(g, &sp, &sparams).map_err(|e| format!("{e}"))?;
        let aparams = AssemblyParams::free(k, n, params.delta);
        let assembly = assemble_from_blowup(g, &refined.description, &aparams).map_err(|e| format!("{e}"))?;
        if assembly.witness.k() < k {
            return Err(format!("assembled a {}-control graph", assembly.witness.k()));
        }
        let found = distinct_from_control(g, &assembly.witness, params.seed, params.retries).map_err(|e| format!("{e}"))?;
        Ok(found.subset)
    })();
    match structural {
        Ok(subset) if distinct_enough(&subset) => return Theorem3Outcome::Distinct { subset, stage: "structure" },
        Ok(_) => reports.push(StageReport { stage: "structure", detail: String::from("too few distinct degrees") }),
        Err(detail) => reports.push(StageReport { stage: "structure", detail }),
    }

    match exact_f_with_cap(g, DEFAULT_F_CAP) {
        Ok(fw) if fw.distinct_count >= k && distinct_enough(&fw.subset) => {
            return Theorem3Outcome::Distinct { subset: fw.subset, stage: "f-oracle" }
        }
        Ok(fw) => reports.push(StageReport { stage: "f-oracle", detail: format!("f = {} < {k}", fw.distinct_count) }),
        Err(e) => reports.push(StageReport { stage: "f-oracle", detail: format!("{e}") }),
    }
    Theorem3Outcome::Inconclusive(reports)
}
