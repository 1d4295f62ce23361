//! Seeded sweeps behind the acceptance criteria. Rows run on a rayon pool
//! of `jobs` threads and are returned in input order, so output depends
//! only on the arguments.

use std::time::Instant;

use ddeg_core::control::{build_control_greedy, distinct_from_control};
use ddeg_core::generators::{blowup, blowup_parts, erdos_renyi, perturb};
use ddeg_core::oracle::exact_f;
use ddeg_core::pipeline::{run_pipeline, ExperimentRecord, PipelineParams};
use ddeg_core::rng::{derive_seed, derive_seed2, stream};
use ddeg_core::structure::{coarse_partition, mergeable_pair, refine_to_blowup, StructureParams};
use ddeg_core::{BlowupPattern, Fraction, Graph, VertexSet};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::records::ScalingRow;

/// Stream tags separating the sweeps' seed spaces.
const SOUNDNESS: u64 = 2;
const STRUCTURE: u64 = 6;
const CONTROL: u64 = 7;

pub fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool").install(f)
}

/// Seed of trial `t` at size `n`.
pub fn trial_seed(master: u64, n: usize, t: usize) -> u64 {
    derive_seed2(master, n as u64, t as u64)
}

/// One pipeline run per `(N, trial)` on a fresh `G(N, 1/2)`. `wall_ms` is
/// only measured when `timing` is set, since it breaks byte-stability.
pub fn scaling(ns: &[usize], trials: usize, delta: Fraction, master: u64, jobs: usize, timing: bool) -> Vec<ScalingRow> {
    let cells: Vec<(usize, usize)> = ns.iter().flat_map(|&n| (0..trials).map(move |t| (n, t))).collect();
    with_jobs(jobs, || {
        cells
            .par_iter()
            .map(|&(n, t)| {
                let seed = trial_seed(master, n, t);
                let start = Instant::now();
                let g = erdos_renyi(n, Fraction::HALF, seed);
                let result = run_pipeline(&g, &PipelineParams::new(delta, seed));
                let wall_ms = if timing { start.elapsed().as_millis() as u64 } else { 0 };
                match result {
                    Ok(out) => ScalingRow { record: ExperimentRecord { wall_ms, ..out.record }, error: None },
                    Err(e) => ScalingRow {
                        record: ExperimentRecord {
                            n,
                            seed,
                            delta,
                            distinct_count: 0,
                            u_size: 0,
                            uprime_size: 0,
                            balanced_size: 0,
                            retries_used: 0,
                            wall_ms,
                        },
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect()
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SoundnessRow {
    pub index: usize,
    pub n: usize,
    pub p: Fraction,
    pub seed: u64,
    pub exact_f: usize,
    pub distinct_count: Option<usize>,
    pub violation: Option<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SoundnessReport {
    pub graphs: usize,
    pub violations: usize,
    pub failures: usize,
    pub rows: Vec<SoundnessRow>,
}

/// Runs the pipeline on `count` random graphs with `2 <= n <= max_n` and
/// edge probability in `{1/10, ..., 9/10}`, comparing against `exact_f` and
/// re-checking the witness.
pub fn soundness(count: usize, max_n: usize, delta: Fraction, master: u64, jobs: usize) -> SoundnessReport {
    let rows: Vec<SoundnessRow> = with_jobs(jobs, || {
        (0..count)
            .into_par_iter()
            .map(|index| {
                let seed = derive_seed2(master, SOUNDNESS, index as u64);
                let mut rng = stream(seed, 0);
                let n = rng.gen_range(2..=max_n);
                let p = Fraction::new(rng.gen_range(1..=9), 10).expect("nonzero denominator");
                let g = erdos_renyi(n, p, seed);
                let exact = exact_f(&g).expect("within cap").distinct_count;
                let mut row =
                    SoundnessRow { index, n, p, seed, exact_f: exact, distinct_count: None, violation: None, error: None };
                match run_pipeline(&g, &PipelineParams::new(delta, seed)) {
                    Ok(out) => {
                        row.distinct_count = Some(out.distinct_count);
                        row.violation = check_pipeline_witness(&g, &out.subset, &out.distinct_set, out.distinct_count, exact);
                    }
                    Err(e) => row.error = Some(e.to_string()),
                }
                row
            })
            .collect()
    });
    SoundnessReport {
        graphs: count,
        violations: rows.iter().filter(|r| r.violation.is_some()).count(),
        failures: rows.iter().filter(|r| r.error.is_some()).count(),
        rows,
    }
}

fn check_pipeline_witness(
    g: &Graph,
    subset: &VertexSet,
    distinct_set: &VertexSet,
    claimed: usize,
    exact: usize,
) -> Option<String> {
    let recomputed = g.degree_profile(subset).distinct_count;
    if recomputed != claimed {
        return Some(format!("claimed {claimed} distinct degrees, recomputed {recomputed}"));
    }
    if claimed > exact {
        return Some(format!("claimed {claimed} exceeds f(G) = {exact}"));
    }
    if !distinct_set.is_subset(subset) {
        return Some("distinct set is not inside the subset".into());
    }
    let mut degrees: Vec<usize> = distinct_set.iter().map(|v| g.degree_within(v, subset)).collect();
    degrees.sort_unstable();
    if degrees.windows(2).any(|w| w[0] == w[1]) {
        return Some("distinct set has a repeated degree".into());
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureRow {
    pub index: usize,
    pub seed: u64,
    pub parts: usize,
    pub delta0: usize,
    pub pattern: String,
    pub threshold: usize,
    pub coarse_parts: usize,
    pub d1: usize,
    pub d2: usize,
    pub recovered_parts: Option<usize>,
    pub recovered: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureReport {
    pub instances: usize,
    pub recovered: usize,
    pub rows: Vec<StructureRow>,
}

pub fn random_nondegenerate_pattern(rng: &mut impl Rng, parts: usize) -> BlowupPattern {
    loop {
        let cells: Vec<bool> = (0..parts * parts).map(|_| rng.gen()).collect();
        let pattern = BlowupPattern::from_fn(parts, |i, j| cells[i * parts + j]);
        if mergeable_pair(&pattern).is_none() {
            return pattern;
        }
    }
}

/// Blowup → perturbation → partition → refinement round trips.
///
/// Each instance draws `M` in `1..=max_parts`, a non-degenerate pattern and
/// `Δ0` in `0..=max_delta0`, uses parts of `part_size` vertices, partition
/// threshold `max(3, 8Δ0)`, `T = t`, `Δ = Δ0`, `D1` the measured
/// within-part bound of the partition and `D2 = 8·L·D1`.
pub fn structure_sweep(
    instances: usize,
    max_parts: usize,
    part_size: usize,
    max_delta0: usize,
    t: usize,
    master: u64,
    jobs: usize,
) -> StructureReport {
    let rows: Vec<StructureRow> = with_jobs(jobs, || {
        (0..instances)
            .into_par_iter()
            .map(|index| {
                let seed = derive_seed2(master, STRUCTURE, index as u64);
                let mut rng = stream(seed, 0);
                let parts = rng.gen_range(1..=max_parts);
                let pattern = random_nondegenerate_pattern(&mut rng, parts);
                let delta0 = rng.gen_range(0..=max_delta0);
                let sizes = vec![part_size; parts];
                let truth = blowup_parts(&sizes);
                let g = perturb(&blowup(&pattern, &sizes).expect("arity matches"), &truth, delta0, seed);
                let threshold = (8 * delta0).max(3);
                let sp = coarse_partition(&g, threshold).expect("positive threshold");
                let params = StructureParams::free(sp.bound, delta0, t);
                let mut row = StructureRow {
                    index,
                    seed,
                    parts,
                    delta0,
                    pattern: pattern.to_string(),
                    threshold,
                    coarse_parts: sp.parts.len(),
                    d1: sp.bound,
                    d2: params.d2(sp.parts.len()),
                    recovered_parts: None,
                    recovered: false,
                    error: None,
                };
                match refine_to_blowup(&g, &sp, &params) {
                    Ok(r) => {
                        let found = &r.description;
                        row.recovered_parts = Some(found.parts.len());
                        let perm: Option<Vec<usize>> =
                            truth.iter().map(|p| found.parts.iter().position(|q| q == p)).collect();
                        row.recovered = found.parts.len() == parts
                            && found.exceptional.is_empty()
                            && perm.is_some_and(|perm| pattern.relabel(&perm) == found.pattern);
                        if !row.recovered {
                            row.error = Some("recovered blowup differs from the generator".into());
                        }
                    }
                    Err(e) => row.error = Some(e.to_string()),
                }
                row
            })
            .collect()
    });
    StructureReport { instances, recovered: rows.iter().filter(|r| r.recovered).count(), rows }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ControlRow {
    pub index: usize,
    pub seed: u64,
    pub k: usize,
    pub n: usize,
    pub delta: usize,
    pub vertices: usize,
    pub attempts: Option<u32>,
    pub distinct_count: usize,
    pub ok: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ControlReport {
    pub witnesses: usize,
    pub successes: usize,
    pub rows: Vec<ControlRow>,
}

/// Disjoint copies of `K_t` on randomly relabelled vertices.
pub fn shuffled_cliques(count: usize, t: usize, seed: u64) -> Graph {
    let mut labels: Vec<usize> = (0..count * t).collect();
    labels.shuffle(&mut stream(seed, 1));
    let edges = (0..count).flat_map(|c| (0..t).flat_map(move |i| (i + 1..t).map(move |j| (c * t + i, c * t + j))));
    Graph::from_edges(count * t, edges.map(|(u, v)| (labels[u], labels[v])).collect::<Vec<_>>()).expect("simple graph")
}

/// Greedy control graphs on disjoint cliques `K_t` (`t = max(2, k)`, so a
/// perfect matching for `k <= 2`), followed by prefix extraction.
///
/// With `Δ = t - 1` and `n = 4kΔ`, the clique count `c` is drawn so that
/// `α = c < n` and `N = ct > (k - 1)(n - 1)`.
pub fn control_sweep(witnesses: usize, max_k: usize, retries: u32, master: u64, jobs: usize) -> ControlReport {
    let rows: Vec<ControlRow> = with_jobs(jobs, || {
        (0..witnesses)
            .into_par_iter()
            .map(|index| {
                let seed = derive_seed2(master, CONTROL, index as u64);
                let mut rng = stream(seed, 0);
                let k = 1 + index % max_k;
                let t = k.max(2);
                let delta = t - 1;
                let n = 4 * k * delta;
                let low = ((k - 1) * (n - 1)) / t + 1;
                let count = rng.gen_range(low.max(1)..n);
                let g = shuffled_cliques(count, t, seed);
                let all = g.vertices();
                let mut row = ControlRow {
                    index,
                    seed,
                    k,
                    n,
                    delta,
                    vertices: g.n(),
                    attempts: None,
                    distinct_count: 0,
                    ok: false,
                    error: None,
                };
                let built = build_control_greedy(&g, k, n, delta, &all, &VertexSet::empty(g.n()));
                match built.and_then(|w| distinct_from_control(&g, &w, derive_seed(seed, 2), retries)) {
                    Ok(found) => {
                        row.attempts = Some(found.attempts);
                        row.distinct_count = g.degree_profile(&found.subset).distinct_count;
                        row.ok = row.distinct_count >= k;
                        if !row.ok {
                            row.error = Some(format!("only {} distinct degrees", row.distinct_count));
                        }
                    }
                    Err(e) => row.error = Some(e.to_string()),
                }
                row
            })
            .collect()
    });
    ControlReport { witnesses, successes: rows.iter().filter(|r| r.ok).count(), rows }
}
