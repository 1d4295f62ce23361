//! Deterministic graph generators.

use alloc::vec;
use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::bitset::VertexSet;
use crate::fraction::Fraction;
use crate::graph::{BlowupPattern, Graph, GraphBuilder, GraphError};
use crate::rng::rng_from;

/// `G(n, p)`: every pair independently an edge with probability `p`.
///
/// Pairs are visited in lexicographic order and each draws one integer in
/// `0..den`, so the output is a pure function of `(n, p, seed)`.
pub fn erdos_renyi(n: usize, p: Fraction, seed: u64) -> Graph {
    assert!(p.is_probability(), "edge probability {p} exceeds 1");
    let mut b = GraphBuilder::new(n);
    if p.is_zero() {
        return b.build();
    }
    if p.num() == p.den() {
        return Graph::complete(n);
    }
    let mut rng = rng_from(seed);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_range(0..p.den()) < p.num() {
                b.add_edge(u, v);
            }
        }
    }
    b.build()
}

/// Complete `parts`-partite graph with every part of size `part_size`.
/// Part `i` holds vertices `i*part_size .. (i+1)*part_size`.
pub fn turan(parts: usize, part_size: usize) -> Graph {
    let pattern = BlowupPattern::from_fn(parts, |i, j| i != j);
    blowup(&pattern, &vec![part_size; parts]).expect("square pattern")
}

/// Consecutive vertex blocks of the given sizes.
pub fn blowup_parts(sizes: &[usize]) -> Vec<VertexSet> {
    let n = sizes.iter().sum();
    let mut start = 0;
    sizes
        .iter()
        .map(|&s| {
            let part = VertexSet::from_vertices(n, start..start + s);
            start += s;
            part
        })
        .collect()
}

/// Blowup of `pattern`: part `i` is a block of `sizes[i]` consecutive
/// vertices, and distinct `x ∈ X`, `y ∈ Y` are adjacent iff
/// `pattern[X][Y]` is complete.
pub fn blowup(pattern: &BlowupPattern, sizes: &[usize]) -> Result<Graph, GraphError> {
    if pattern.parts() != sizes.len() {
        return Err(GraphError::PatternArity { parts: pattern.parts(), sizes: sizes.len() });
    }
    let parts = blowup_parts(sizes);
    let n = sizes.iter().sum();
    let mut b = GraphBuilder::new(n);
    for (i, x) in parts.iter().enumerate() {
        for (j, y) in parts.iter().enumerate().skip(i) {
            if !pattern.get(i, j) {
                continue;
            }
            for u in x.iter() {
                for v in y.iter().filter(|&v| v != u) {
                    b.add_edge(u, v);
                }
            }
        }
    }
    Ok(b.build())
}

/// Randomly flips pairs of `g` so the result stays within `delta` of `g`
/// on every (vertex, part) pair.
///
/// Each (vertex, part) pair has a flip budget of `⌊delta/2⌋`, and a flip of
/// `uw` with `u ∈ X`, `w ∈ Y` spends one unit of both `(u, Y)` and `(w, X)`.
/// Vertices are processed in index order; for each part the vertex draws a
/// count uniformly in `0..=remaining budget` and flips that many partners
/// chosen uniformly among later vertices of the part with budget left.
///
/// Panics if `partition` does not partition the vertex set.
pub fn perturb(g: &Graph, partition: &[VertexSet], delta: usize, seed: u64) -> Graph {
    let n = g.n();
    let mut part_of = vec![usize::MAX; n];
    for (i, part) in partition.iter().enumerate() {
        assert_eq!(part.universe(), n, "part {i} over the wrong universe");
        for v in part.iter() {
            assert_eq!(part_of[v], usize::MAX, "vertex {v} in two parts");
            part_of[v] = i;
        }
    }
    assert!(part_of.iter().all(|&p| p != usize::MAX), "partition does not cover every vertex");

    let budget = delta / 2;
    let mut out = GraphBuilder::from(g);
    if budget == 0 {
        return out.build();
    }
    let parts = partition.len();
    let mut used = vec![0usize; n * parts];
    let mut rng = rng_from(seed);
    let mut candidates = Vec::new();
    for u in 0..n {
        let pu = part_of[u];
        for (y, part) in partition.iter().enumerate() {
            let remaining = budget - used[u * parts + y];
            if remaining == 0 {
                continue;
            }
            let want = rng.gen_range(0..=remaining);
            if want == 0 {
                continue;
            }
            candidates.clear();
            candidates.extend(part.iter().filter(|&w| w > u && used[w * parts + pu] < budget));
            let (chosen, _) = candidates.partial_shuffle(&mut rng, want);
            for &w in chosen.iter() {
                out.toggle_edge(u, w);
                used[u * parts + y] += 1;
                used[w * parts + pu] += 1;
            }
        }
    }
    out.build()
}
