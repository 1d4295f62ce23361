use ddeg_core::generators::{erdos_renyi, turan};
use ddeg_core::oracle::{exact_f, exact_hom, is_diverse};
use ddeg_core::pipeline::{extract_diverse_set, run_pipeline, PipelineParams};
use ddeg_core::rng::stream;
use ddeg_core::Fraction;
use rand::Rng;

#[test]
fn turan_graphs_are_extremal() {
    for (k, n) in [(3, 4), (3, 5), (4, 4), (2, 6)] {
        let g = turan(k - 1, n - 1);
        assert_eq!(exact_f(&g).unwrap().distinct_count, k - 1);
        assert_eq!(exact_hom(&g).unwrap().size(), n - 1);
    }
}

#[test]
fn pipeline_never_beats_the_oracle() {
    for seed in 0..60 {
        let mut rng = stream(seed, 0);
        let n = rng.gen_range(2..=16);
        let p = Fraction::new(rng.gen_range(1..=9), 10).unwrap();
        let g = erdos_renyi(n, p, seed);
        let params = PipelineParams::new(Fraction::new(1, 5).unwrap(), seed);
        let Ok(out) = run_pipeline(&g, &params) else { continue };
        assert!(out.distinct_count <= exact_f(&g).unwrap().distinct_count);
        assert_eq!(g.degree_profile(&out.subset).distinct_count, out.distinct_count);
    }
}

#[test]
fn diverse_sets_are_diverse() {
    let delta = Fraction::new(1, 4).unwrap();
    for seed in 0..10 {
        let g = erdos_renyi(120, Fraction::HALF, seed);
        let u = extract_diverse_set(&g, delta, 30);
        assert!(is_diverse(&g, &u, delta));
    }
}
