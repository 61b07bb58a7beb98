use std::path::Path;
use std::process::{Command, Output};

use freqk::instance::{default_magnitude, edge_index};
use freqk::{gen_random, perturb, SubsetDp, SubsetSelection};

fn freqk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freqk")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

/// Data rows of a CSV written by the tool, provenance and header stripped.
fn rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# freqk, "));
    lines.next().unwrap();
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn out_dir() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

#[test]
fn freqgraph_vertex_sums_are_square() {
    let dir = out_dir();
    let d = dir.path().to_str().unwrap();
    let o = freqk(&["freqgraph", "--random", "8,4", "--perturb", "auto", "--out", d]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let vs = rows(&dir.path().join("freqgraph_vertices.csv"));
    assert_eq!(vs.len(), 8);
    for r in &vs {
        let t: u64 = r[1].parse().unwrap();
        let g: u64 = r[2].parse().unwrap();
        assert_eq!(t + g, 49);
    }
    let ranks = rows(&dir.path().join("freqgraph_ranks.csv"));
    let freqs: Vec<u64> = ranks.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(freqs.windows(2).all(|w| w[0] >= w[1]));
    let tour: Vec<&Vec<String>> = ranks.iter().filter(|r| r[2] == "1").collect();
    assert_eq!(tour.len(), 8);
    let min = tour.iter().map(|r| r[1].parse::<u64>().unwrap()).min().unwrap();
    for r in &ranks {
        let flagged = r[5] == "1";
        assert_eq!(flagged, r[2] == "1" && r[1].parse::<u64>().unwrap() == min);
    }
}

#[test]
fn freqgraph_prefix_uses_its_own_tour() {
    let dir = out_dir();
    let d = dir.path().to_str().unwrap();
    let o = freqk(&["freqgraph", "--random", "11,2", "--perturb", "auto", "--i", "9", "--out", d]);
    assert_eq!(code(&o), 0);
    let vs = rows(&dir.path().join("freqgraph_vertices.csv"));
    assert_eq!(vs.iter().map(|r| r[0].as_str()).collect::<Vec<_>>(), ["0", "1", "2", "3", "4", "5", "6", "7", "8"]);
    assert!(vs.iter().all(|r| r[1].parse::<u64>().unwrap() + r[2].parse::<u64>().unwrap() == 64));
}

#[test]
fn freqgraph_over_cap_names_the_flag() {
    let dir = out_dir();
    let o = freqk(&["freqgraph", "--random", "30,1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--cap"));
}

#[test]
fn missing_output_dir_is_an_error() {
    let dir = out_dir();
    let missing = dir.path().join("absent");
    let o = freqk(&["freqgraph", "--random", "6,1", "--out", missing.to_str().unwrap()]);
    assert_eq!(code(&o), 7);
    assert!(String::from_utf8_lossy(&o.stderr).contains("does not exist"));
}

#[test]
fn exactly_one_instance_source() {
    let dir = out_dir();
    let d = dir.path().to_str().unwrap();
    assert_eq!(code(&freqk(&["freqgraph", "--out", d])), 2);
    assert_eq!(code(&freqk(&["freqgraph", "--random", "6,1", "--instance", "x.tsp", "--out", d])), 2);
}

#[test]
fn tsplib_input_and_parse_errors() {
    let dir = out_dir();
    let tsp = dir.path().join("six.tsp");
    std::fs::write(
        &tsp,
        "NAME : six\nTYPE : TSP\nDIMENSION : 6\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n\
         1 0 0\n2 10 1\n3 21 0\n4 20 12\n5 9 11\n6 1 13\nEOF\n",
    )
    .unwrap();
    let d = dir.path().to_str().unwrap();
    let o = freqk(&["solve", "--instance", tsp.to_str().unwrap(), "--tour", "exact", "--out", d]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("match"));
    let tour = std::fs::read_to_string(dir.path().join("solve.tour")).unwrap();
    assert!(tour.contains("TOUR_SECTION") && tour.trim_end().ends_with("EOF"));

    std::fs::write(&tsp, "NAME : bad\nTYPE : TSP\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n1 0\nEOF\n")
        .unwrap();
    let o = freqk(&["freqgraph", "--instance", tsp.to_str().unwrap(), "--out", d]);
    assert_eq!(code(&o), 3);
    let o = freqk(&["freqgraph", "--instance", dir.path().join("nope.tsp").to_str().unwrap(), "--out", d]);
    assert_eq!(code(&o), 3);
}

#[test]
fn analytics_summary_and_minid_curve() {
    let dir = out_dir();
    let d = dir.path().to_str().unwrap();
    let o = freqk(&["analytics", "--n", "100,1000", "--minid", "1000..10000000", "--minid-points", "9", "--out", d]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = rows(&dir.path().join("analytics_summary.csv"));
    assert_eq!(&s[1][..3], ["1000", "80", "73"]);
    assert_eq!(&s[0][..3], ["100", "18", "16"]);
    assert_eq!(s[1][9], "546");
    let minid = rows(&dir.path().join("minid.csv"));
    assert_eq!(minid.len(), 9);
    for r in &minid {
        let id: f64 = r[1].parse().unwrap();
        let bound: f64 = r[3].parse().unwrap();
        assert!(id < bound, "{r:?}");
    }
    let p = rows(&dir.path().join("curve_p.csv"));
    assert_eq!(p.len(), (4..=100).count() + (4..=1000).count());
    assert_eq!(code(&freqk(&["analytics", "--n", "7", "--out", d])), 5);
}

#[test]
fn idsolve_prints_both_variants() {
    let o = freqk(&["idsolve", "--n", "10000"]);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "369");
    let o = freqk(&["idsolve", "--n", "10000", "--residual-corrected"]);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "335");
    assert_eq!(code(&freqk(&["idsolve", "--n", "5"])), 5);
}

#[test]
fn trajectory_rejects_empty_range() {
    let dir = out_dir();
    let d = dir.path().to_str().unwrap();
    assert_eq!(code(&freqk(&["trajectory", "--random", "9,1", "--i-range", "7..5", "--out", d])), 2);
    assert_eq!(code(&freqk(&["trajectory", "--random", "9,1", "--i-range", "3..5", "--out", d])), 5);
}

/// With exhaustive counts F_i = C(n-2,i-2) C(i,2) p_i, and that weight peaks
/// at P0. So F_P0 dominates every F_i reached from P0 through a stretch where
/// p moves towards P0 without dropping.
#[test]
fn tour_edge_totals_peak_at_p0_where_p_is_stable() {
    for (n, seed) in [(9usize, 11u64), (10, 12), (11, 13), (12, 14)] {
        let dir = out_dir();
        let d = dir.path().to_str().unwrap();
        let range = format!("4..{n}");
        let rs = format!("{n},{seed}");
        let o = freqk(&["trajectory", "--random", &rs, "--perturb", "auto", "--i-range", &range, "--exhaustive", "--out", d]);
        assert_eq!(code(&o), 0);
        let inst = gen_random(n, seed).unwrap();
        let inst = perturb(&inst, seed, default_magnitude(&inst)).unwrap();
        let tour = SubsetDp::default().ohc(&inst, &SubsetSelection::full(&inst)).unwrap();
        let steps = n - 3;
        let rs = rows(&dir.path().join("trajectory.csv"));
        let p0 = freqk::analytics::peak_index(n);
        for (u, v) in tour.edges() {
            let k = edge_index(n, u, v);
            let row = &rs[k * steps..(k + 1) * steps];
            let big_f: Vec<u64> = row.iter().map(|r| r[4].parse().unwrap()).collect();
            let p: Vec<f64> = row.iter().map(|r| r[6].parse().unwrap()).collect();
            for (s, r) in row.iter().enumerate() {
                let i = s + 4;
                let weight = freqk::sampling::binom_u128(n - 2, i - 2).unwrap() as f64 * (i * (i - 1) / 2) as f64;
                assert!((big_f[s] as f64 - weight * p[s]).abs() < 1e-6 * weight, "{r:?}");
            }
            let at = p0 - 4;
            let mut s = at;
            while s > 0 && p[s - 1] <= p[at] && p[s - 1] <= p[s] {
                s -= 1;
                assert!(big_f[s] <= big_f[at], "n = {n}, edge ({u},{v}), i = {}", s + 4);
            }
            let mut s = at;
            while s + 1 < steps && p[s + 1] <= p[s] {
                s += 1;
                assert!(big_f[s] <= big_f[at], "n = {n}, edge ({u},{v}), i = {}", s + 4);
            }
        }
    }
}

#[test]
fn outputs_do_not_depend_on_workers() {
    let a = out_dir();
    let b = out_dir();
    for (dir, w) in [(&a, "1"), (&b, "3")] {
        let o = freqk(&[
            "--workers", w, "trajectory", "--random", "12,5", "--perturb", "auto", "--i-range", "4..6",
            "--samples", "20", "--seed", "7", "--repeats", "2", "--tour", "exact", "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["trajectory.csv", "trajectory_summary.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap());
    }
    let rs = rows(&a.path().join("trajectory.csv"));
    assert!(rs.iter().filter(|r| r[2] == "5").all(|r| r[3] == "40"));
}

#[test]
fn sample_needs_a_tour_and_samples() {
    let dir = out_dir();
    let d = dir.path().to_str().unwrap();
    assert_eq!(code(&freqk(&["sample", "--random", "10,1", "--out", d])), 5);
    assert_eq!(code(&freqk(&["sample", "--random", "10,1", "--tour", "exact", "--samples", "0", "--out", d])), 5);
    let o = freqk(&["sample", "--random", "10,1", "--perturb", "auto", "--tour", "exact", "--samples", "40", "--out", d]);
    assert_eq!(code(&o), 0);
    let s = rows(&dir.path().join("sample.csv"));
    assert_eq!(s.len(), 5);
    for r in &s {
        let smallest: Vec<f64> = r[2..10].iter().map(|x| x.parse().unwrap()).collect();
        assert!(smallest.windows(2).all(|w| w[0] <= w[1]));
    }
    assert_eq!(rows(&dir.path().join("sample_err.csv")).len(), 4);
}

#[test]
fn sparsify_outputs_agree() {
    let dir = out_dir();
    let d = dir.path().to_str().unwrap();
    let o = freqk(&[
        "sparsify", "--random", "12,9", "--perturb", "auto", "--tour", "exact", "--exhaustive", "--i-range", "4..7",
        "--out", d,
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let edges = std::fs::read_to_string(dir.path().join("sparse.edges")).unwrap();
    assert!(edges.starts_with("# {"));
    let kept = edges.lines().skip(1).count();
    let verdicts = rows(&dir.path().join("sparsify_verdicts.csv"));
    assert_eq!(verdicts.len(), 66);
    assert_eq!(verdicts.iter().filter(|r| r[2] == "Keep").count(), kept);
    let summary = rows(&dir.path().join("sparsify_summary.csv"));
    assert_eq!(summary[0][0], kept.to_string());
    let cand = std::fs::read_to_string(dir.path().join("sparse.cand")).unwrap();
    assert!(cand.starts_with("12\n") && cand.ends_with("-1\nEOF\n"));

    let o = freqk(&["sparsify", "--random", "12,9", "--rule", "threshold", "--threshold", "kth:1", "--i", "6", "--out", d]);
    assert_eq!(code(&o), 5, "kth needs a tour");
    let o = freqk(&[
        "sparsify", "--random", "12,9", "--rule", "threshold", "--threshold", "kth:1", "--i", "6", "--tour", "exact",
        "--out", d,
    ]);
    assert_eq!(code(&o), 0);
    let summary = rows(&dir.path().join("sparsify_summary.csv"));
    assert_eq!(summary[0][1], "12", "the first-smallest tour threshold keeps every tour edge");
}

#[test]
fn solve_small_instance_matches_reference() {
    let dir = out_dir();
    let d = dir.path().to_str().unwrap();
    let o = freqk(&["solve", "--random", "7,3", "--perturb", "auto", "--tour", "exact", "--out", d]);
    assert_eq!(code(&o), 0);
    let s = rows(&dir.path().join("solve.csv"));
    assert_eq!(s[0].last().unwrap(), "match");
}

#[test]
fn reruns_are_byte_identical() {
    let a = out_dir();
    let b = out_dir();
    for dir in [&a, &b] {
        let o = freqk(&["sample", "--random", "11,2", "--tour", "exact", "--samples", "30", "--out", dir.path().to_str().unwrap()]);
        assert_eq!(code(&o), 0);
    }
    for f in ["sample.csv", "sample_err.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap());
    }
}
