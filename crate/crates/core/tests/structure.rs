use ddeg_core::generators::{blowup, blowup_parts, perturb, turan};
use ddeg_core::oracle::exact_f;
use ddeg_core::rng::stream;
use ddeg_core::structure::*;
use ddeg_core::{BlowupPattern, Graph, GraphBuilder, VertexSet};
use rand::Rng;

fn same_partition(a: &[VertexSet], b: &[VertexSet]) -> Option<Vec<usize>> {
    if a.len() != b.len() {
        return None;
    }
    a.iter().map(|p| b.iter().position(|q| q == p)).collect()
}

#[test]
fn coarse_partition_examples() {
    let sp = coarse_partition(&Graph::empty(7), 1).unwrap();
    assert_eq!(sp.parts.len(), 1);
    let sp = coarse_partition(&Graph::complete(6), 3).unwrap();
    assert_eq!(sp.parts.len(), 1);
    assert_eq!(sp.bound, 2);
    assert!(coarse_partition(&Graph::empty(3), 0).is_err());

    let pattern: BlowupPattern = "01;10".parse().unwrap();
    let g = blowup(&pattern, &[5, 5]).unwrap();
    let sp = coarse_partition(&g, 3).unwrap();
    assert_eq!(sp.parts, blowup_parts(&[5, 5]));
    assert_eq!(sp.centers, [0, 5]);
}

#[test]
fn coarse_partition_invariants_on_random_graphs() {
    for seed in 0..30 {
        let mut rng = stream(seed, 1);
        let n = rng.gen_range(1..40);
        let mut b = GraphBuilder::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(0.3) {
                    b.add_edge(u, v);
                }
            }
        }
        let g = b.build();
        let threshold = rng.gen_range(1..12);
        let sp = coarse_partition(&g, threshold).unwrap();
        let total: usize = sp.parts.iter().map(VertexSet::len).sum();
        assert_eq!(total, n);
        for (i, &c) in sp.centers.iter().enumerate() {
            assert!(sp.parts[i].contains(c));
            for &d in &sp.centers[i + 1..] {
                assert!(g.sym_diff(c, d) >= threshold);
            }
            for v in sp.parts[i].iter() {
                assert!(g.sym_diff(v, c) < threshold);
            }
        }
        assert!(sp.bound < 2 * threshold);
    }
}

#[test]
fn few_parts_when_f_is_small() {
    // Turán graphs have f = parts and split into exactly their parts.
    for (parts, size) in [(2, 6), (3, 5), (4, 4)] {
        let g = turan(parts, size);
        let k = exact_f(&g).unwrap().distinct_count + 1;
        assert_eq!(k, parts + 1);
        let sp = coarse_partition(&g, 3).unwrap();
        assert_eq!(sp.parts.len(), parts);
        assert!(sp.parts.len() <= 4 * k);
        // The large threshold makes every vertex similar.
        let coarse = coarse_partition(&g, 1 << 10 << (2 * k.ilog2())).unwrap();
        assert!(coarse.parts.len() <= 4 * k);
    }
}

#[test]
fn classify_examples() {
    let pattern: BlowupPattern = "01;10".parse().unwrap();
    let g = blowup(&pattern, &[6, 6]).unwrap();
    let parts = blowup_parts(&[6, 6]);
    assert_eq!(classify_pair(&g, &parts[0], &parts[1], 0), Ok(Density::Dense));
    assert_eq!(classify_pair(&g, &parts[0], &parts[0], 0), Ok(Density::Sparse));
    let e = Graph::empty(12);
    assert_eq!(classify_pair(&e, &parts[0], &parts[1], 0), Ok(Density::Sparse));
    assert!(matches!(
        classify_pair(&g, &VertexSet::empty(12), &parts[1], 0),
        Err(StructureError::PartTooSmall { .. })
    ));
    let mixed = VertexSet::from_vertices(12, [0, 6]);
    assert!(matches!(classify_pair(&g, &mixed, &parts[1], 0), Err(StructureError::PreconditionViolated { .. })));
}

#[test]
fn classify_perturbed_complete_pair() {
    let pattern: BlowupPattern = "01;10".parse().unwrap();
    let sizes = [20, 20];
    let parts = blowup_parts(&sizes);
    for seed in 0..50 {
        let g = perturb(&blowup(&pattern, &sizes).unwrap(), &parts, 2, seed);
        let mut d = 0;
        for part in &parts {
            for u in part.iter() {
                for v in part.iter() {
                    d = d.max(g.sym_diff(u, v));
                }
            }
        }
        assert_eq!(classify_pair(&g, &parts[0], &parts[1], d), Ok(Density::Dense), "seed {seed}");
        assert!(parts[0].iter().all(|v| 20 - g.degree_within(v, &parts[1]) <= 4 * d));
    }
}

#[test]
fn verify_examples() {
    let pattern: BlowupPattern = "11;10".parse().unwrap();
    let sizes = [4, 5];
    let g = blowup(&pattern, &sizes).unwrap();
    let bd = BlowupDescription::exact(blowup_parts(&sizes), pattern.clone(), 0);
    assert!(verify_perturbation(&g, &bd));
    let mut b = GraphBuilder::from(&g);
    b.toggle_edge(4, 5);
    assert!(!verify_perturbation(&b.build(), &bd));

    let single = BlowupDescription::exact(blowup_parts(&[3]), "0".parse().unwrap(), 0);
    assert!(verify_nondegenerate(&single));
    let twins = BlowupDescription::exact(blowup_parts(&[3, 3]), "00;00".parse().unwrap(), 0);
    assert!(!verify_nondegenerate(&twins));
    let bip = BlowupDescription::exact(blowup_parts(&[3, 3]), "01;10".parse().unwrap(), 0);
    assert!(verify_nondegenerate(&bip));
}

fn random_nondegenerate(rng: &mut impl Rng, m: usize) -> BlowupPattern {
    loop {
        let bits: Vec<bool> = (0..m * m).map(|_| rng.gen()).collect();
        let p = BlowupPattern::from_fn(m, |i, j| bits[i * m + j]);
        if mergeable_pair(&p).is_none() {
            return p;
        }
    }
}

#[test]
fn exact_blowups_round_trip_with_zero_d1() {
    for seed in 0..40 {
        let mut rng = stream(seed, 2);
        let m = rng.gen_range(1..=4);
        let pattern = random_nondegenerate(&mut rng, m);
        let sizes: Vec<usize> = (0..m).map(|_| rng.gen_range(8..16)).collect();
        let g = blowup(&pattern, &sizes).unwrap();
        let sp = coarse_partition(&g, 3).unwrap();
        let r = refine_to_blowup(&g, &sp, &StructureParams::free(0, 0, 8)).unwrap();
        assert!(r.description.exceptional.is_empty());
        let perm = same_partition(&blowup_parts(&sizes), &r.description.parts).expect("parts recovered");
        assert_eq!(pattern.relabel(&perm), r.description.pattern, "seed {seed}");
    }
}

#[test]
fn small_part_goes_to_exceptional_set() {
    let pattern: BlowupPattern = "01;10".parse().unwrap();
    let g = blowup(&pattern, &[10, 9]).unwrap();
    let sp = coarse_partition(&g, 3).unwrap();
    let r = refine_to_blowup(&g, &sp, &StructureParams::free(0, 0, 10)).unwrap();
    assert_eq!(r.description.exceptional, blowup_parts(&[10, 9])[1]);
    assert_eq!(r.description.parts.len(), 1);
}

#[test]
fn perturbed_round_trip_with_generous_delta() {
    // D1 = 1 keeps D2 = 8L below the distance between distinct parts.
    let pattern: BlowupPattern = "0110;1001;1000;0100".parse().unwrap();
    assert!(mergeable_pair(&pattern).is_none());
    let sizes = [60; 4];
    let parts = blowup_parts(&sizes);
    for seed in 0..50 {
        let g = perturb(&blowup(&pattern, &sizes).unwrap(), &parts, 3, seed);
        let sp = coarse_partition(&g, 24).unwrap();
        let params = StructureParams { d1: 1, d2: None, delta: 12, t: 20, paper_faithful: false };
        let r = refine_to_blowup(&g, &sp, &params).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        assert!(verify_perturbation(&g, &r.description));
        let perm = same_partition(&parts, &r.description.parts).expect("parts recovered");
        assert_eq!(pattern.relabel(&perm), r.description.pattern);
    }
}

#[test]
fn merged_parts_stay_similar() {
    // Two twin classes that differ only on an exceptional vertex merge.
    let mut b = GraphBuilder::new(21);
    for v in 10..20 {
        b.add_edge(v, 20);
    }
    let g = b.build();
    let sp = coarse_partition(&g, 1).unwrap();
    assert_eq!(sp.parts.len(), 3);
    let params = StructureParams { d1: 2, d2: Some(0), delta: 0, t: 2, paper_faithful: false };
    let r = refine_to_blowup(&g, &sp, &params).unwrap();
    assert_eq!(r.merges, 1);
    assert_eq!(r.description.parts, [VertexSet::from_vertices(21, 0..20)]);
    assert_eq!(r.description.exceptional.to_vec(), [20]);
    assert!(r.diameter <= r.merged_bound);
}

#[test]
fn faithful_params_are_checked() {
    let p = StructureParams::paper_faithful(1, 2);
    assert_eq!((p.delta, p.t), (160, 800));
    assert!(p.check(2).is_ok());
    let bad = StructureParams { t: 10, ..p };
    assert!(bad.check(2).is_err());
    assert!(StructureParams::free(5, 0, 0).check(9).is_ok());
}

#[test]
fn audit_counts_collisions() {
    let g = turan(3, 6);
    let sp = coarse_partition(&g, 3).unwrap();
    let audit = audit_similarity_partition(&g, &sp, 50, 7);
    assert_eq!(audit.centers, 3);
    assert!(audit.best_distinct >= 1 && audit.best_distinct <= 3);
    assert!(audit.max_collisions <= 3);
}
