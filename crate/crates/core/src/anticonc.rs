//! Turán-type greedy independent sets and anti-concentration of weighted
//! Bernoulli sums.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::sync::atomic::{AtomicUsize, Ordering};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bitset::VertexSet;
use crate::graph::Graph;
use crate::rng::rng_from;

/// Default cap on the number of integer states tracked by
/// [`atom_probability_dp`].
pub const DEFAULT_DP_STATES: usize = 10_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum AnticoncError {
    ProbabilityOutOfRange { index: usize, p: f64 },
    ZeroWeight { index: usize },
    LengthMismatch { weights: usize, probs: usize },
    CapExceeded { states: u128, cap: usize },
    NoTrials,
}

impl fmt::Display for AnticoncError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ProbabilityOutOfRange { index, p } => write!(f, "probability {p} at index {index} is out of range"),
            Self::ZeroWeight { index } => write!(f, "weight at index {index} is zero"),
            Self::LengthMismatch { weights, probs } => {
                write!(f, "{weights} weights but {probs} probabilities")
            }
            Self::CapExceeded { states, cap } => write!(f, "{states} DP states exceeds the cap of {cap}"),
            Self::NoTrials => f.write_str("at least one trial is required"),
        }
    }
}

impl core::error::Error for AnticoncError {}

/// Number of [`greedy_independent_set`] calls so far in this process, each
/// of which checked its size bound.
pub static GREEDY_CALLS: AtomicUsize = AtomicUsize::new(0);

/// Greedy independent set of `g[within]`: repeatedly take a vertex of
/// minimum remaining degree (lowest index on ties) and delete its closed
/// neighbourhood.
///
/// The result always has at least `s / (d̄ + 1)` vertices, where `s =
/// |within|` and `d̄` is the average degree of `g[within]`; this is asserted
/// on every call.
pub fn greedy_independent_set(g: &Graph, within: &VertexSet) -> VertexSet {
    GREEDY_CALLS.fetch_add(1, Ordering::Relaxed);
    let n = g.n();
    let mut alive = within.clone();
    let mut degree = vec![0usize; n];
    let mut twice_edges = 0usize;
    for v in within.iter() {
        degree[v] = g.degree_within(v, within);
        twice_edges += degree[v];
    }
    let mut chosen = VertexSet::empty(n);
    while let Some(v) = alive.iter().min_by_key(|&v| degree[v]) {
        chosen.insert(v);
        let mut removed = g.neighbors(v).intersection(&alive);
        removed.insert(v);
        alive.difference_with(&removed);
        for r in removed.iter() {
            for y in g.neighbors(r).intersection(&alive).iter() {
                degree[y] -= 1;
            }
        }
    }
    let s = within.len();
    // |I| >= s / (2m/s + 1)  <=>  |I| (2m + s) >= s².
    assert!(
        chosen.len() * (twice_edges + s) >= s * s,
        "greedy independent set of size {} below the Turán bound for {s} vertices and {} edges",
        chosen.len(),
        twice_edges / 2
    );
    chosen
}

/// `p = w/2 + (1-w) z`, writing a `Be(p)` variable as `W·Y + (1-W)·Z` with
/// `W ~ Be(w)`, `Y ~ Be(1/2)`, `Z ~ Be(z)` independent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub w: f64,
    pub z: f64,
}

impl Decomposition {
    /// One draw of `W·Y + (1-W)·Z`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> bool {
        if rng.gen::<f64>() < self.w {
            rng.gen::<bool>()
        } else {
            rng.gen::<f64>() < self.z
        }
    }
}

/// For `p ∈ [0.1, 0.9]`: `(2p, 0)` when `p <= 1/2`, else `(2(1-p), 1)`.
/// Either way `w >= 0.2`.
pub fn bernoulli_decompose(p: f64) -> Result<Decomposition, AnticoncError> {
    if !(0.1..=0.9).contains(&p) {
        return Err(AnticoncError::ProbabilityOutOfRange { index: 0, p });
    }
    Ok(if p <= 0.5 { Decomposition { w: 2.0 * p, z: 0.0 } } else { Decomposition { w: 2.0 * (1.0 - p), z: 1.0 } })
}

/// Non-zero weights with probabilities in `[0.1, 0.9]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomDistribution {
    weights: Vec<f64>,
    probs: Vec<f64>,
}

impl AtomDistribution {
    pub fn new(weights: Vec<f64>, probs: Vec<f64>) -> Result<Self, AnticoncError> {
        if weights.len() != probs.len() {
            return Err(AnticoncError::LengthMismatch { weights: weights.len(), probs: probs.len() });
        }
        if let Some(index) = weights.iter().position(|&a| a == 0.0 || !a.is_finite()) {
            return Err(AnticoncError::ZeroWeight { index });
        }
        if let Some(index) = probs.iter().position(|p| !(0.1..=0.9).contains(p)) {
            return Err(AnticoncError::ProbabilityOutOfRange { index, p: probs[index] });
        }
        Ok(Self { weights, probs })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Most likely value of a weighted Bernoulli sum and its probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomPeak {
    pub x_star: i64,
    pub pmax: f64,
}

/// Exact law of `Σ a_i X_i` for integer weights: `(lowest value, masses)`
/// where `masses[j]` is the probability of `lowest + j`.
///
/// Convolves one variable at a time in ascending index order, in place,
/// tracking only the reachable window.
pub fn sum_distribution(weights: &[i64], probs: &[f64], cap: usize) -> Result<(i64, Vec<f64>), AnticoncError> {
    if weights.len() != probs.len() {
        return Err(AnticoncError::LengthMismatch { weights: weights.len(), probs: probs.len() });
    }
    if let Some(index) = probs.iter().position(|p| !(0.0..=1.0).contains(p)) {
        return Err(AnticoncError::ProbabilityOutOfRange { index, p: probs[index] });
    }
    let span: u128 = weights.iter().map(|a| a.unsigned_abs() as u128).sum::<u128>() + 1;
    if span > cap as u128 {
        return Err(AnticoncError::CapExceeded { states: span, cap });
    }
    let lowest: i64 = weights.iter().filter(|&&a| a < 0).sum();
    let mut mass = vec![0.0f64; span as usize];
    let origin = (-lowest) as usize;
    mass[origin] = 1.0;
    let (mut lo, mut hi) = (origin, origin);
    for (&a, &p) in weights.iter().zip(probs) {
        let q = 1.0 - p;
        let step = a.unsigned_abs() as usize;
        if step == 0 {
            continue;
        }
        if a > 0 {
            for s in (lo..=hi).rev() {
                mass[s + step] += p * mass[s];
                mass[s] *= q;
            }
            hi += step;
        } else {
            for s in lo..=hi {
                mass[s - step] += p * mass[s];
                mass[s] *= q;
            }
            lo -= step;
        }
    }
    Ok((lowest, mass))
}

pub fn atom_probability_dp(weights: &[i64], probs: &[f64]) -> Result<AtomPeak, AnticoncError> {
    atom_probability_dp_with_cap(weights, probs, DEFAULT_DP_STATES)
}

/// Exact `max_x P(Σ a_i X_i = x)`; the smallest maximiser is reported.
pub fn atom_probability_dp_with_cap(weights: &[i64], probs: &[f64], cap: usize) -> Result<AtomPeak, AnticoncError> {
    let (lowest, mass) = sum_distribution(weights, probs, cap)?;
    let (mut best_j, mut best) = (0usize, f64::NEG_INFINITY);
    for (j, &m) in mass.iter().enumerate() {
        if m > best {
            best = m;
            best_j = j;
        }
    }
    Ok(AtomPeak { x_star: lowest + best_j as i64, pmax: best })
}

/// How Monte-Carlo sums are grouped into atoms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Binning {
    /// Sums equal up to `1e-9` share a bin; exact for rational weights with
    /// small denominators.
    Exact,
    /// `floor(sum / width)`.
    Width(f64),
}

/// Empirical maximum bin mass of `Σ a_i X_i` over `trials` samples.
/// Each trial draws `X_1..X_n` in index order from one ChaCha stream.
pub fn atom_probability_mc(dist: &AtomDistribution, trials: usize, seed: u64, binning: Binning) -> Result<f64, AnticoncError> {
    if trials == 0 {
        return Err(AnticoncError::NoTrials);
    }
    let mut rng = rng_from(seed);
    let mut keys = Vec::with_capacity(trials);
    for _ in 0..trials {
        let mut sum = 0.0;
        for (&a, &p) in dist.weights.iter().zip(&dist.probs) {
            if rng.gen::<f64>() < p {
                sum += a;
            }
        }
        let key = match binning {
            Binning::Exact => libm::round(sum * 1e9) as i64,
            Binning::Width(w) => libm::floor(sum / w) as i64,
        };
        keys.push(key);
    }
    keys.sort_unstable();
    let mut best = 0usize;
    let mut run = 0usize;
    for (i, key) in keys.iter().enumerate() {
        run = if i > 0 && keys[i - 1] == *key { run + 1 } else { 1 };
        best = best.max(run);
    }
    Ok(best as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fraction::Fraction;
    use crate::generators::erdos_renyi;
    use crate::rng::stream;

    /// `C(n, k) / 2^n` via a log-space product, independent of the DP.
    fn central_binomial_mass(n: u64) -> f64 {
        let k = n / 2;
        let mut log = -(n as f64) * core::f64::consts::LN_2;
        for i in 0..k {
            log += libm::log((n - i) as f64) - libm::log((i + 1) as f64);
        }
        libm::exp(log)
    }

    #[test]
    fn greedy_examples() {
        let k = Graph::complete(7);
        assert_eq!(greedy_independent_set(&k, &k.vertices()).len(), 1);
        let e = Graph::empty(7);
        assert_eq!(greedy_independent_set(&e, &e.vertices()).len(), 7);
        let c = Graph::cycle(5);
        let i = greedy_independent_set(&c, &c.vertices());
        assert!(i.len() >= 2 && c.is_independent(&i));
        assert_eq!(greedy_independent_set(&c, &VertexSet::empty(5)).len(), 0);
    }

    #[test]
    fn greedy_respects_within() {
        let g = erdos_renyi(40, Fraction::HALF, 2);
        let within = VertexSet::from_vertices(40, (0..40).step_by(3));
        let i = greedy_independent_set(&g, &within);
        assert!(i.is_subset(&within));
        assert!(g.is_independent(&i));
    }

    #[test]
    fn decomposition_examples() {
        assert_eq!(bernoulli_decompose(0.3).unwrap(), Decomposition { w: 0.6, z: 0.0 });
        let d = bernoulli_decompose(0.7).unwrap();
        assert!((d.w - 0.6).abs() < 1e-12 && d.z == 1.0);
        assert_eq!(bernoulli_decompose(0.5).unwrap(), Decomposition { w: 1.0, z: 0.0 });
        assert!(bernoulli_decompose(0.95).is_err());
        for i in 0..=80 {
            let p = 0.1 + i as f64 * 0.01;
            let d = bernoulli_decompose(p).unwrap();
            assert!(d.w >= 0.2 - 1e-12);
            assert!((d.w / 2.0 + (1.0 - d.w) * d.z - p).abs() < 1e-12);
        }
    }

    #[test]
    fn decomposition_law_matches_bernoulli() {
        let samples = 100_000;
        for (i, p) in [0.1, 0.25, 0.5, 0.62, 0.9].into_iter().enumerate() {
            let d = bernoulli_decompose(p).unwrap();
            let mut rng = stream(77, i as u64);
            let hits = (0..samples).filter(|_| d.sample(&mut rng)).count() as f64;
            let sigma = libm::sqrt(samples as f64 * p * (1.0 - p));
            assert!((hits - samples as f64 * p).abs() <= 3.0 * sigma, "p = {p}");
        }
    }

    #[test]
    fn dp_examples() {
        assert_eq!(atom_probability_dp(&[1, 1], &[0.5, 0.5]).unwrap(), AtomPeak { x_star: 1, pmax: 0.5 });
        let peak = atom_probability_dp(&[1, 1, 1, 1], &[0.5; 4]).unwrap();
        assert_eq!(peak.x_star, 2);
        assert!((peak.pmax - 0.375).abs() < 1e-15);
        let peak = atom_probability_dp(&[1; 100], &[0.5; 100]).unwrap();
        assert_eq!(peak.x_star, 50);
        assert!((peak.pmax - central_binomial_mass(100)).abs() < 1e-12);
        assert!((peak.pmax - 0.0796).abs() < 1e-4);
    }

    #[test]
    fn dp_handles_negative_weights() {
        // -2 X1 + X2 with fair coins: values -2, -1, 0, 1 each with mass 1/4.
        let (lowest, mass) = sum_distribution(&[-2, 1], &[0.5, 0.5], 100).unwrap();
        assert_eq!(lowest, -2);
        assert_eq!(mass, [0.25, 0.25, 0.25, 0.25]);
        let peak = atom_probability_dp(&[-1, 1], &[0.3, 0.3]).unwrap();
        // Sum 0 when both or neither fire: 0.49 + 0.09.
        assert_eq!(peak.x_star, 0);
        assert!((peak.pmax - 0.58).abs() < 1e-12);
    }

    #[test]
    fn dp_errors() {
        assert!(matches!(atom_probability_dp_with_cap(&[5, 5], &[0.5, 0.5], 10), Err(AnticoncError::CapExceeded { .. })));
        assert!(matches!(atom_probability_dp(&[1], &[0.5, 0.5]), Err(AnticoncError::LengthMismatch { .. })));
        assert!(matches!(atom_probability_dp(&[1], &[1.5]), Err(AnticoncError::ProbabilityOutOfRange { .. })));
    }

    #[test]
    fn dp_mass_sums_to_one() {
        let mut rng = stream(3, 0);
        for _ in 0..20 {
            let n = rng.gen_range(1..60);
            let weights: Vec<i64> = (0..n)
                .map(|_| {
                    let a = rng.gen_range(1i64..=5);
                    if rng.gen() { a } else { -a }
                })
                .collect();
            let probs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..=0.9)).collect();
            let (_, mass) = sum_distribution(&weights, &probs, DEFAULT_DP_STATES).unwrap();
            assert!((mass.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn mc_examples() {
        let fair = AtomDistribution::new(vec![1.0, 1.0], vec![0.5, 0.5]).unwrap();
        let est = atom_probability_mc(&fair, 1_000_000, 5, Binning::Exact).unwrap();
        assert!((est - 0.5).abs() < 0.01);
        assert_eq!(atom_probability_mc(&fair, 1, 5, Binning::Exact).unwrap(), 1.0);
        assert_eq!(atom_probability_mc(&fair, 0, 5, Binning::Exact), Err(AnticoncError::NoTrials));
        assert_eq!(
            atom_probability_mc(&fair, 100, 9, Binning::Exact).unwrap(),
            atom_probability_mc(&fair, 100, 9, Binning::Exact).unwrap()
        );
    }

    #[test]
    fn mc_tracks_dp_for_400_unit_weights() {
        let dist = AtomDistribution::new(vec![1.0; 400], vec![0.5; 400]).unwrap();
        let est = atom_probability_mc(&dist, 1_000_000, 21, Binning::Exact).unwrap();
        let exact = atom_probability_dp(&[1; 400], &[0.5; 400]).unwrap().pmax;
        assert!((est - exact).abs() <= 0.15 * exact, "mc {est} vs dp {exact}");
    }

    #[test]
    fn mc_width_binning_merges_close_sums() {
        let dist = AtomDistribution::new(vec![0.1, 0.2, 0.3], vec![0.5; 3]).unwrap();
        // With width 1 every sum (at most 0.6) falls in bin 0.
        assert_eq!(atom_probability_mc(&dist, 1000, 1, Binning::Width(1.0)).unwrap(), 1.0);
    }

    #[test]
    fn atom_distribution_validation() {
        assert_eq!(AtomDistribution::new(vec![1.0, 0.0], vec![0.5, 0.5]), Err(AnticoncError::ZeroWeight { index: 1 }));
        assert!(matches!(
            AtomDistribution::new(vec![1.0], vec![0.05]),
            Err(AnticoncError::ProbabilityOutOfRange { index: 0, .. })
        ));
    }

    #[test]
    fn unit_weight_scaling_ratio() {
        // pmax(4n) / pmax(n) ≈ 1/2.
        for n in [64usize, 256, 1024] {
            let small = atom_probability_dp(&vec![1; n], &vec![0.5; n]).unwrap().pmax;
            let large = atom_probability_dp(&vec![1; 4 * n], &vec![0.5; 4 * n]).unwrap().pmax;
            let ratio = large / small;
            assert!((0.4..=0.6).contains(&ratio), "n = {n}: ratio {ratio}");
        }
    }
}
