use ddeg_cli::dimacs::{self, DimacsError};
use ddeg_cli::records::{read_csv, summarize, write_csv, CsvError, ScalingRow, COLUMNS};
use ddeg_core::generators::erdos_renyi;
use ddeg_core::pipeline::ExperimentRecord;
use ddeg_core::{Fraction, Graph};
use proptest::prelude::*;

#[test]
fn dimacs_triangle() {
    let g = dimacs::parse("c a triangle\np edge 3 3\ne 1 2\n\ne 2 3\ne 1 3\n").unwrap();
    assert_eq!(g, Graph::complete(3));
    assert_eq!(dimacs::render(&g), "p edge 3 3\ne 1 2\ne 1 3\ne 2 3\n");
}

#[test]
fn dimacs_isolated_vertices_survive() {
    let g = dimacs::parse("p edge 5 1\ne 4 5\n").unwrap();
    assert_eq!(g.n(), 5);
    assert_eq!(dimacs::parse(&dimacs::render(&g)).unwrap(), g);
}

#[test]
fn dimacs_rejects_malformed_input() {
    let cases = [
        ("e 1 2\n", "header"),
        ("", "header"),
        ("p edge 3 1\ne 1 1\n", "self-loop"),
        ("p edge 3 1\ne 1 4\n", "out of range"),
        ("p edge 3 1\ne 0 2\n", "out of range"),
        ("p edge 3 2\ne 1 2\ne 2 1\n", "duplicate"),
        ("p edge 3 2\ne 1 2\n", "announces 2"),
        ("p col 3 0\n", "expected"),
        ("p edge 3 0\np edge 3 0\n", "second header"),
        ("p edge 3 1\ne 1 x\n", "not a nonnegative"),
        ("p edge 3 1\nx 1 2\n", "unknown line"),
    ];
    for (text, needle) in cases {
        let err = dimacs::parse(text).unwrap_err().to_string();
        assert!(err.contains(needle), "{text:?}: {err}");
    }
}

#[test]
fn dimacs_missing_file_is_io() {
    let err = dimacs::read(std::path::Path::new("/nonexistent/graph.dimacs")).unwrap_err();
    assert!(matches!(err, DimacsError::Io { .. }));
}

proptest! {
    #[test]
    fn dimacs_round_trip(n in 0usize..40, num in 0u64..=8, seed: u64) {
        let g = erdos_renyi(n, Fraction::new(num, 8).unwrap(), seed);
        let text = dimacs::render(&g);
        let back = dimacs::parse(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(dimacs::render(&back), text);
    }
}

fn row(n: usize, seed: u64, distinct: usize, error: Option<&str>) -> ScalingRow {
    ScalingRow {
        record: ExperimentRecord {
            n,
            seed,
            delta: Fraction::new(1, 5).unwrap(),
            distinct_count: distinct,
            u_size: 12,
            uprime_size: 10,
            balanced_size: 9,
            retries_used: 1,
            wall_ms: 0,
        },
        error: error.map(str::to_owned),
    }
}

#[test]
fn csv_round_trip_keeps_errors() {
    let rows = vec![row(64, 1, 7, None), row(128, 2, 0, Some("retries exhausted, \"quoted\"")), row(256, 3, 11, None)];
    let mut buf = Vec::new();
    write_csv(&mut buf, &rows).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with(&COLUMNS.join(",")));
    assert_eq!(read_csv(buf.as_slice()).unwrap(), rows);
}

#[test]
fn csv_rejects_other_versions() {
    let mut buf = Vec::new();
    write_csv(&mut buf, &[row(64, 1, 7, None)]).unwrap();
    let text = String::from_utf8(buf).unwrap();

    let header_v2 = text.replacen("v1,", "v2,", 1);
    assert!(matches!(read_csv(header_v2.as_bytes()), Err(CsvError::Version(v)) if v == "v2"));

    let (head, body) = text.split_once('\n').unwrap();
    let row_v0 = format!("{head}\n{}", body.replacen("v1,", "v0,", 1));
    assert!(matches!(read_csv(row_v0.as_bytes()), Err(CsvError::Version(v)) if v == "v0"));

    let bad = format!("{head}\n{}", body.replacen(",7,", ",seven,", 1));
    assert!(matches!(read_csv(bad.as_bytes()), Err(CsvError::Field { row: 1, .. })));
}

#[test]
fn summary_slope_of_exact_power_law() {
    // distinct = N^(2/3) on N = 8^i, exact in floating point.
    let rows: Vec<_> = [64usize, 512, 4096].iter().map(|&n| row(n, 0, (n as f64).powf(2.0 / 3.0).round() as usize, None)).collect();
    let s = summarize(&rows);
    assert!(!s.insufficient_points);
    assert!((s.slope.unwrap() - 2.0 / 3.0).abs() < 1e-9, "{:?}", s.slope);
}

#[test]
fn summary_needs_three_sizes() {
    let rows = [row(64, 0, 5, None), row(128, 0, 6, None), row(256, 0, 0, Some("failed"))];
    let s = summarize(&rows);
    assert!(s.insufficient_points);
    assert_eq!(s.slope, None);
    assert_eq!(s.points[2].failures, 1);
}
