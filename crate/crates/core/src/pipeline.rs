//! From a diverse vertex set to an induced subgraph with many distinct
//! degrees.
//!
//! The construction has four stages:
//! 1. pick a `δ`-diverse set `U` (greedy on the conflict graph) and let `V`
//!    be the remaining vertices;
//! 2. draw integers `m_u ∈ [-|U|, |U|]` and set
//!    `p = ½·1 + Σ_u (m_u / |V|)·u`, where `u ∈ {-1, 1}^V` is the signed
//!    neighbourhood of `u`; truncate to `p' ∈ [0.1, 0.9]^V`;
//! 3. keep a subfamily `U'` of the good vertices whose expected degrees in
//!    `G(p')` are pairwise more than 1 apart;
//! 4. sample `W ⊆ V` from `p'`, keep the balanced vertices of `U'` and take
//!    an independent set of the equal-degree collision graph.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::anticonc::greedy_independent_set;
use crate::bitset::VertexSet;
use crate::fraction::Fraction;
use crate::graph::{Graph, GraphBuilder};
use crate::oracle::conflicting;
use crate::rng::{derive_seed, derive_seed2, stream};

pub const DEFAULT_RETRIES: u32 = 64;

#[derive(Clone, Debug, PartialEq)]
pub enum PipelineError {
    /// The sampling stage never met its acceptance test; the best attempt
    /// (largest distinct set) is attached.
    RetriesExhausted { attempts: u32, best: Box<Extraction> },
    /// No probability vector left a single good vertex.
    NoGoodVertices { attempts: u32 },
    InvalidParams(&'static str),
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::RetriesExhausted { attempts, best } => write!(
                f,
                "sampling failed its acceptance test in all {attempts} attempts (best distinct set: {})",
                best.distinct_set.len()
            ),
            Self::NoGoodVertices { attempts } => write!(f, "no good vertex in {attempts} probability vectors"),
            Self::InvalidParams(msg) => write!(f, "invalid pipeline parameters: {msg}"),
        }
    }
}

impl core::error::Error for PipelineError {}

/// Inclusion probabilities for the random induced subgraph `G(p)`, indexed
/// by vertex; entries outside `support` are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbVector {
    pub support: VertexSet,
    pub base: Vec<f64>,
    pub truncated: Vec<f64>,
    /// The integer offsets `m_u`, in increasing vertex order of `U`.
    pub offsets: Vec<(usize, i64)>,
}

/// `U'` together with the exact expected degrees used to separate it.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparatedFamily {
    pub uprime: Vec<usize>,
    pub expected: BTreeMap<usize, f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PipelineParams {
    pub delta: Fraction,
    /// Size of the diverse set before shrinking; defaults to `⌈½ N^{2/3}⌉`.
    pub u_target: Option<usize>,
    pub retries: u32,
    pub seed: u64,
    /// Multiplier `c` in the collision acceptance test `e(J) <= c·|U'|`;
    /// defaults to [`collision_factor`].
    pub collision_factor: Option<u64>,
}

impl PipelineParams {
    pub fn new(delta: Fraction, seed: u64) -> Self {
        Self { delta, u_target: None, retries: DEFAULT_RETRIES, seed, collision_factor: None }
    }
}

/// Outcome of one sampling stage.
#[derive(Clone, Debug, PartialEq)]
pub struct Extraction {
    pub w: VertexSet,
    pub distinct_set: VertexSet,
    pub balanced: usize,
    pub collisions: usize,
    pub attempts: u32,
}

/// One row of a scaling experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    #[serde(rename = "N")]
    pub n: usize,
    pub seed: u64,
    pub delta: Fraction,
    pub distinct_count: usize,
    pub u_size: usize,
    pub uprime_size: usize,
    pub balanced_size: usize,
    pub retries_used: u32,
    pub wall_ms: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineOutcome {
    /// `U ∪ W`.
    pub subset: VertexSet,
    /// Members of `U'` with pairwise distinct degrees in `g[U ∪ W]`.
    pub distinct_set: VertexSet,
    /// Distinct degrees of `g[U ∪ W]`, recomputed directly.
    pub distinct_count: usize,
    pub u: VertexSet,
    pub good: usize,
    pub record: ExperimentRecord,
}

/// `⌈½ n^{2/3}⌉`, i.e. the least `t` with `8t³ >= n²`.
pub fn half_two_thirds(n: usize) -> usize {
    let target = (n as u128) * (n as u128);
    let mut t = libm::cbrt(target as f64 / 8.0) as u128;
    t = t.saturating_sub(2);
    while 8 * t * t * t < target {
        t += 1;
    }
    t as usize
}

/// `2·max(1, ⌈16 δ^{-3/2}⌉)`; unbounded when `δ = 0`.
pub fn collision_factor(delta: Fraction) -> u64 {
    if delta.is_zero() {
        return u64::MAX;
    }
    let inv = delta.den() as f64 / delta.num() as f64;
    let c = libm::ceil(16.0 * libm::pow(inv, 1.5)) as u64;
    2 * c.max(1)
}

/// Greedy `δ`-diverse set: the greedy independent set of the conflict
/// graph (`uv` an edge iff `|N(u) △ N(v)| < δ·n`), truncated to its
/// `target` smallest members.
pub fn extract_diverse_set(g: &Graph, delta: Fraction, target: usize) -> VertexSet {
    let n = g.n();
    let mut conflicts = GraphBuilder::new(n);
    if !delta.is_zero() {
        for u in 0..n {
            for v in u + 1..n {
                if conflicting(g, u, v, delta) {
                    conflicts.add_edge(u, v);
                }
            }
        }
    }
    let conflicts = conflicts.build();
    greedy_independent_set(&conflicts, &conflicts.vertices()).prefix(target)
}

#[inline]
fn sign(g: &Graph, u: usize, v: usize) -> i64 {
    if g.has_edge(u, v) {
        1
    } else {
        -1
    }
}

/// Draws `m_u` uniformly from `[-|U|, |U|]` (stream `(seed, i)` for the
/// `i`-th member of `U`) and builds the probability vector and good set.
pub fn build_prob_vector(g: &Graph, u: &VertexSet, v: &VertexSet, delta: Fraction, seed: u64) -> (ProbVector, VertexSet) {
    let bound = u.len() as i64;
    let offsets: Vec<(usize, i64)> =
        u.iter().enumerate().map(|(i, x)| (x, stream(seed, i as u64).gen_range(-bound..=bound))).collect();
    build_prob_vector_with_offsets(g, v, delta, &offsets)
}

/// Deterministic core of [`build_prob_vector`] for given offsets; `U` is
/// the set of vertices listed in `offsets`.
///
/// With `N = |V|` and `S_v = Σ_u m_u u_v`, `p_v = ½ + S_v / N` and
/// `q^u_v = ½ + (S_v - m_u u_v) / N`. A vertex `u` is good when at most
/// `δN/2` coordinates have `q^u_v ∉ [0.2, 0.8]`. All of this is integer
/// arithmetic except the final division.
pub fn build_prob_vector_with_offsets(
    g: &Graph,
    v: &VertexSet,
    delta: Fraction,
    offsets: &[(usize, i64)],
) -> (ProbVector, VertexSet) {
    let n = g.n();
    let big_n = v.len() as i64;
    let mut sums = vec![0i64; n];
    for x in v.iter() {
        sums[x] = offsets.iter().map(|&(w, m)| m * sign(g, w, x)).sum();
    }
    let mut base = vec![0.0; n];
    let mut truncated = vec![0.0; n];
    for x in v.iter() {
        base[x] = 0.5 + sums[x] as f64 / big_n as f64;
        truncated[x] = base[x].clamp(0.1, 0.9);
    }
    let mut good = VertexSet::empty(n);
    for &(w, m) in offsets {
        // q^w_x ∈ [0.2, 0.8]  <=>  10 |S_x - m w_x| <= 3N.
        let outside = v.iter().filter(|&x| 10 * (sums[x] - m * sign(g, w, x)).abs() > 3 * big_n).count();
        if delta.at_least(2 * outside as u64, big_n as u64) {
            good.insert(w);
        }
    }
    (ProbVector { support: v.clone(), base, truncated, offsets: offsets.to_vec() }, good)
}

/// `E d_{G(p')}(u) = d_{G[U]}(u) + Σ_{v ∈ N(u) ∩ V} p'_v` for every
/// `u ∈ targets`, summed in increasing `v`.
pub fn expected_degrees(g: &Graph, u: &VertexSet, targets: &VertexSet, p: &ProbVector) -> BTreeMap<usize, f64> {
    targets
        .iter()
        .map(|x| {
            let inside = g.degree_within(x, u) as f64;
            let outside: f64 = g.neighbors(x).intersection(&p.support).iter().map(|y| p.truncated[y]).sum();
            (x, inside + outside)
        })
        .collect()
}

/// Greedy independent set of the event graph on `good` (`uu'` an edge iff
/// the expected degrees differ by at most 1).
pub fn select_separated(g: &Graph, u: &VertexSet, good: &VertexSet, p: &ProbVector) -> SeparatedFamily {
    let expected = expected_degrees(g, u, good, p);
    let members: Vec<(usize, f64)> = expected.iter().map(|(&x, &e)| (x, e)).collect();
    let m = members.len();
    let mut events = GraphBuilder::new(m);
    for i in 0..m {
        for j in i + 1..m {
            if (members[i].1 - members[j].1).abs() <= 1.0 {
                events.add_edge(i, j);
            }
        }
    }
    let events = events.build();
    let chosen = greedy_independent_set(&events, &events.vertices());
    let uprime: Vec<usize> = chosen.iter().map(|i| members[i].0).collect();
    let expected = uprime.iter().map(|x| (*x, expected[x])).collect();
    SeparatedFamily { uprime, expected }
}

/// Samples `W ⊆ V` with `P(v ∈ W) = p'_v` until the balanced set `B` holds
/// at least half of `U'` and the collision count `e(J)` is at most
/// `factor·|U'|`, then returns a greedy independent set of the collision
/// graph on `B`.
///
/// `B = {u ∈ U' : |d(u) - E d(u)| <= √|V|}` and `J` holds the pairs of `U'`
/// whose expected degrees are within `2√|V|` and whose realised degrees in
/// `g[U ∪ W]` coincide. Two balanced vertices with equal degree are
/// automatically such a pair, so the independent set has pairwise distinct
/// degrees.
#[allow(clippy::too_many_arguments)]
pub fn sample_and_extract(
    g: &Graph,
    family: &SeparatedFamily,
    u: &VertexSet,
    p: &ProbVector,
    factor: u64,
    seed: u64,
    retries: u32,
) -> Result<Extraction, PipelineError> {
    if retries == 0 {
        return Err(PipelineError::InvalidParams("retries must be at least 1"));
    }
    let n = g.n();
    let members = &family.uprime;
    let k = members.len();
    let root = libm::sqrt(p.support.len() as f64);
    let mut best: Option<Extraction> = None;
    for attempt in 0..retries {
        let mut rng = stream(seed, attempt as u64);
        let mut w = VertexSet::empty(n);
        for x in p.support.iter() {
            if rng.gen::<f64>() < p.truncated[x] {
                w.insert(x);
            }
        }
        let host = w.union(u);
        let degree: Vec<usize> = members.iter().map(|&x| g.degree_within(x, &host)).collect();
        let expected: Vec<f64> = members.iter().map(|x| family.expected[x]).collect();
        let balanced: Vec<bool> = (0..k).map(|i| (degree[i] as f64 - expected[i]).abs() <= root).collect();
        let balanced_count = balanced.iter().filter(|&&b| b).count();

        let mut collisions = 0usize;
        let mut clash = GraphBuilder::new(k);
        for i in 0..k {
            for j in i + 1..k {
                if degree[i] != degree[j] {
                    continue;
                }
                if (expected[i] - expected[j]).abs() <= 2.0 * root {
                    collisions += 1;
                }
                if balanced[i] && balanced[j] {
                    clash.add_edge(i, j);
                }
            }
        }
        let clash = clash.build();
        let in_b = VertexSet::from_vertices(k, (0..k).filter(|&i| balanced[i]));
        let independent = greedy_independent_set(&clash, &in_b);
        let distinct_set = VertexSet::from_vertices(n, independent.iter().map(|i| members[i]));
        let mut seen: Vec<usize> = independent.iter().map(|i| degree[i]).collect();
        seen.sort_unstable();
        assert!(seen.windows(2).all(|d| d[0] != d[1]), "extracted vertices share a degree");

        let accepted = 2 * balanced_count >= k && (collisions as u128) <= factor as u128 * k as u128;
        let current = Extraction { w, distinct_set, balanced: balanced_count, collisions, attempts: attempt + 1 };
        if accepted {
            return Ok(current);
        }
        if best.as_ref().is_none_or(|b| current.distinct_set.len() > b.distinct_set.len()) {
            best = Some(current);
        }
    }
    Err(PipelineError::RetriesExhausted { attempts: retries, best: Box::new(best.expect("at least one attempt")) })
}

/// Largest diverse-set size the probability-vector stage accepts:
/// `max(1, ⌊δ |V|^{2/3} / 5⌋)`.
pub fn shrink_bound(delta: Fraction, v_size: usize) -> usize {
    let root = libm::cbrt(v_size as f64);
    (libm::floor(delta.as_f64() * root * root / 5.0) as usize).max(1)
}

/// Runs all four stages on `g`.
///
/// `retries_used` counts failed attempts over the two randomized stages
/// (probability vector and sampling).
pub fn run_pipeline(g: &Graph, params: &PipelineParams) -> Result<PipelineOutcome, PipelineError> {
    if params.retries == 0 {
        return Err(PipelineError::InvalidParams("retries must be at least 1"));
    }
    let n = g.n();
    let delta = params.delta;
    let target = params.u_target.unwrap_or_else(|| half_two_thirds(n));
    let diverse = extract_diverse_set(g, delta, target);
    let keep = shrink_bound(delta, n - diverse.len()).min(diverse.len());
    let u = diverse.prefix(keep);
    let v = u.complement();

    let mut chosen: Option<(ProbVector, VertexSet)> = None;
    let mut vector_attempts = 0;
    for attempt in 0..params.retries {
        vector_attempts = attempt + 1;
        let (pv, good) = build_prob_vector(g, &u, &v, delta, derive_seed2(params.seed, 1, attempt as u64));
        let enough = 2 * good.len() >= u.len();
        if chosen.as_ref().is_none_or(|(_, best)| good.len() > best.len()) {
            chosen = Some((pv, good));
        }
        if enough {
            break;
        }
    }
    let (pv, good) = chosen.expect("at least one attempt");

    let mut record = ExperimentRecord {
        n,
        seed: params.seed,
        delta,
        distinct_count: 0,
        u_size: u.len(),
        uprime_size: 0,
        balanced_size: 0,
        retries_used: 0,
        wall_ms: 0,
    };
    if u.is_empty() {
        // Only the empty graph has no diverse vertex.
        return Ok(PipelineOutcome {
            subset: VertexSet::empty(n),
            distinct_set: VertexSet::empty(n),
            distinct_count: 0,
            u,
            good: 0,
            record,
        });
    }
    if good.is_empty() {
        return Err(PipelineError::NoGoodVertices { attempts: vector_attempts });
    }

    let family = select_separated(g, &u, &good, &pv);
    let factor = params.collision_factor.unwrap_or_else(|| collision_factor(delta));
    let extraction = sample_and_extract(g, &family, &u, &pv, factor, derive_seed(params.seed, 2), params.retries)?;

    let subset = u.union(&extraction.w);
    let distinct_count = g.degree_profile(&subset).distinct_count;
    assert!(distinct_count >= extraction.distinct_set.len());
    record.distinct_count = distinct_count;
    record.uprime_size = family.uprime.len();
    record.balanced_size = extraction.balanced;
    record.retries_used = (vector_attempts - 1) + (extraction.attempts - 1);
    Ok(PipelineOutcome { subset, distinct_set: extraction.distinct_set, distinct_count, u, good: good.len(), record })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::erdos_renyi;
    use crate::oracle::is_diverse;

    fn split(g: &Graph, members: &[usize]) -> (VertexSet, VertexSet) {
        let u = VertexSet::from_vertices(g.n(), members.iter().copied());
        let v = u.complement();
        (u, v)
    }

    #[test]
    fn half_two_thirds_values() {
        assert_eq!(half_two_thirds(0), 0);
        assert_eq!(half_two_thirds(1), 1);
        assert_eq!(half_two_thirds(8), 2);
        assert_eq!(half_two_thirds(512), 32);
        assert_eq!(half_two_thirds(4096), 128);
        assert_eq!(half_two_thirds(1000), 50);
        assert_eq!(half_two_thirds(1001), 51);
    }

    #[test]
    fn collision_factor_values() {
        // δ = 1/5: 16·5^{3/2} = 178.9 → 179, doubled.
        assert_eq!(collision_factor(Fraction::new(1, 5).unwrap()), 358);
        assert_eq!(collision_factor(Fraction::ONE), 32);
        assert_eq!(collision_factor(Fraction::ZERO), u64::MAX);
    }

    #[test]
    fn diverse_set_examples() {
        let g = erdos_renyi(60, Fraction::HALF, 8);
        assert_eq!(extract_diverse_set(&g, Fraction::ZERO, 7).len(), 7);
        let k = Graph::complete(12);
        assert_eq!(extract_diverse_set(&k, Fraction::HALF, 10).len(), 1);
    }

    #[test]
    fn diverse_set_in_random_graph() {
        let g = erdos_renyi(1000, Fraction::HALF, 17);
        let fifth = Fraction::new(1, 5).unwrap();
        let u = extract_diverse_set(&g, fifth, 100);
        assert_eq!(u.len(), 100);
        assert!(is_diverse(&g, &u, fifth));
    }

    #[test]
    fn empty_u_gives_flat_vector() {
        let g = erdos_renyi(20, Fraction::HALF, 1);
        let (u, v) = split(&g, &[]);
        let (pv, good) = build_prob_vector(&g, &u, &v, Fraction::HALF, 3);
        assert!(good.is_empty());
        assert!(pv.base.iter().all(|&p| p == 0.5));
    }

    #[test]
    fn zero_offsets_make_every_vertex_good() {
        let g = erdos_renyi(40, Fraction::HALF, 2);
        let (u, v) = split(&g, &[0, 1, 2, 3]);
        let offsets: Vec<(usize, i64)> = u.iter().map(|x| (x, 0)).collect();
        let (pv, good) = build_prob_vector_with_offsets(&g, &v, Fraction::new(1, 10).unwrap(), &offsets);
        assert_eq!(good, u);
        assert!(v.iter().all(|x| pv.base[x] == 0.5 && pv.truncated[x] == 0.5));
    }

    #[test]
    fn truncation_is_exact_clamp() {
        let g = erdos_renyi(60, Fraction::HALF, 4);
        let (u, v) = split(&g, &(0..12).collect::<Vec<_>>());
        for seed in 0..20 {
            let (pv, _) = build_prob_vector(&g, &u, &v, Fraction::new(1, 5).unwrap(), seed);
            for x in v.iter() {
                assert_eq!(pv.truncated[x], pv.base[x].clamp(0.1, 0.9));
                assert!((0.1..=0.9).contains(&pv.truncated[x]));
            }
            assert!(pv.offsets.iter().all(|&(_, m)| m.abs() <= 12));
        }
    }

    #[test]
    fn expected_degree_formula_examples() {
        // Star: 0 joined to 1..=6, U = {0}.
        let g = Graph::from_edges(7, (1..7).map(|x| (0, x))).unwrap();
        let (u, v) = split(&g, &[0]);
        let offsets = [(0usize, 0i64)];
        let (pv, _) = build_prob_vector_with_offsets(&g, &v, Fraction::HALF, &offsets);
        assert_eq!(expected_degrees(&g, &u, &u, &pv)[&0], 3.0);

        let g = Graph::from_edges(4, [(0, 1)]).unwrap();
        let (u, v) = split(&g, &[0, 1]);
        let offsets = [(0usize, 1i64), (1, -2)];
        let (pv, _) = build_prob_vector_with_offsets(&g, &v, Fraction::HALF, &offsets);
        assert_eq!(expected_degrees(&g, &u, &u, &pv)[&0], 1.0);
    }

    #[test]
    fn expected_degree_difference_identity() {
        let g = erdos_renyi(80, Fraction::HALF, 6);
        let (u, v) = split(&g, &(0..10).collect::<Vec<_>>());
        let (pv, _) = build_prob_vector(&g, &u, &v, Fraction::new(1, 5).unwrap(), 12);
        let e = expected_degrees(&g, &u, &u, &pv);
        for a in u.iter() {
            for b in u.iter() {
                let signed: f64 = v.iter().map(|x| (sign(&g, a, x) - sign(&g, b, x)) as f64 * pv.truncated[x]).sum();
                let rhs = g.degree_within(a, &u) as f64 - g.degree_within(b, &u) as f64 + signed / 2.0;
                assert!((e[&a] - e[&b] - rhs).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn expected_degree_matches_sampling() {
        let g = erdos_renyi(50, Fraction::HALF, 9);
        let (u, v) = split(&g, &[0, 1, 2, 3, 4]);
        let (pv, _) = build_prob_vector(&g, &u, &v, Fraction::new(1, 5).unwrap(), 1);
        let e = expected_degrees(&g, &u, &u, &pv);
        let samples = 100_000;
        let mut rng = stream(5, 5);
        let mut totals = [0f64; 5];
        for _ in 0..samples {
            let mut host = u.clone();
            for x in v.iter() {
                if rng.gen::<f64>() < pv.truncated[x] {
                    host.insert(x);
                }
            }
            for (i, total) in totals.iter_mut().enumerate() {
                *total += g.degree_within(i, &host) as f64;
            }
        }
        for (i, total) in totals.iter().enumerate() {
            let variance: f64 = g.neighbors(i).intersection(&v).iter().map(|x| pv.truncated[x] * (1.0 - pv.truncated[x])).sum();
            let se = libm::sqrt(variance / samples as f64);
            assert!((total / samples as f64 - e[&i]).abs() <= 3.0 * se + 1e-12, "vertex {i}");
        }
    }

    fn family(expected: &[(usize, f64)]) -> SeparatedFamily {
        SeparatedFamily { uprime: expected.iter().map(|e| e.0).collect(), expected: expected.iter().copied().collect() }
    }

    #[test]
    fn separated_family_examples() {
        // Isolated U-vertices with distinct V-degrees: 0 sees 0, 1 sees 3, 2 sees 6 V-vertices.
        let edges = (0..3).flat_map(|i| (0..3 * i).map(move |j| (i, 3 + j)));
        let g = Graph::from_edges(9, edges).unwrap();
        let (u, v) = split(&g, &[0, 1, 2]);
        let zero: Vec<(usize, i64)> = u.iter().map(|x| (x, 0)).collect();
        let (pv, good) = build_prob_vector_with_offsets(&g, &v, Fraction::ZERO, &zero);
        let fam = select_separated(&g, &u, &good, &pv);
        assert_eq!(fam.uprime, [0, 1, 2]);

        let g = Graph::empty(6);
        let (u, v) = split(&g, &[0, 1, 2]);
        let (pv, good) = build_prob_vector_with_offsets(&g, &v, Fraction::ZERO, &zero);
        assert_eq!(select_separated(&g, &u, &good, &pv).uprime.len(), 1);
    }

    #[test]
    fn single_member_family_always_succeeds() {
        let g = erdos_renyi(30, Fraction::HALF, 3);
        let (u, v) = split(&g, &[0]);
        let (pv, good) = build_prob_vector(&g, &u, &v, Fraction::HALF, 3);
        let fam = select_separated(&g, &u, &good, &pv);
        let ex = sample_and_extract(&g, &fam, &u, &pv, 32, 1, 64).unwrap();
        assert_eq!(ex.distinct_set.to_vec(), [0]);
    }

    #[test]
    fn far_apart_expectations_keep_all_balanced() {
        // Expected degrees far apart: P is empty, so J is empty and the output is B.
        let g = erdos_renyi(40, Fraction::HALF, 3);
        let (u, v) = split(&g, &[0, 1, 2]);
        let (pv, _) = build_prob_vector(&g, &u, &v, Fraction::HALF, 3);
        let fam = family(&[(0, -100.0), (1, 0.0), (2, 100.0)]);
        let ex = sample_and_extract(&g, &fam, &u, &pv, 32, 4, 8);
        // Nothing is balanced with these artificial expectations.
        assert!(matches!(ex, Err(PipelineError::RetriesExhausted { .. })));
        let real = expected_degrees(&g, &u, &u, &pv);
        let fam = family(&[(0, real[&0] - 100.0), (1, real[&1]), (2, real[&2] + 100.0)]);
        let ex = sample_and_extract(&g, &fam, &u, &pv, 0, 4, 64);
        if let Ok(ex) = ex {
            assert_eq!(ex.collisions, 0);
            assert!(2 * ex.balanced >= 3);
        }
    }

    #[test]
    fn good_vertices_majority_in_random_graph() {
        let g = erdos_renyi(2000, Fraction::HALF, 23);
        let fifth = Fraction::new(1, 5).unwrap();
        let u = extract_diverse_set(&g, fifth, shrink_bound(fifth, 2000));
        let v = u.complement();
        let wins = (0..100).filter(|&seed| 2 * build_prob_vector(&g, &u, &v, fifth, seed).1.len() >= u.len()).count();
        assert!(wins >= 50, "{wins}/100 seeds had a good majority");
    }

    #[test]
    fn pipeline_on_complete_graph() {
        let out = run_pipeline(&Graph::complete(20), &PipelineParams::new(Fraction::new(1, 5).unwrap(), 1)).unwrap();
        assert_eq!(out.u.len(), 1);
        assert!(out.distinct_count >= 1);
        assert_eq!(out.distinct_set.len(), 1);
    }

    #[test]
    fn pipeline_on_empty_vertex_set() {
        let out = run_pipeline(&Graph::empty(0), &PipelineParams::new(Fraction::HALF, 1)).unwrap();
        assert_eq!(out.distinct_count, 0);
    }

    #[test]
    fn pipeline_end_to_end_verifies() {
        let g = erdos_renyi(2000, Fraction::HALF, 31);
        let out = run_pipeline(&g, &PipelineParams::new(Fraction::new(1, 5).unwrap(), 31)).unwrap();
        let profile = g.degree_profile(&out.subset);
        assert_eq!(profile.distinct_count, out.distinct_count);
        assert!(out.distinct_count >= out.distinct_set.len());
        let mut degs: Vec<usize> = out.distinct_set.iter().map(|x| g.degree_within(x, &out.subset)).collect();
        degs.sort_unstable();
        degs.dedup();
        assert_eq!(degs.len(), out.distinct_set.len());
        assert!(out.distinct_set.is_subset(&out.u));
    }
}
