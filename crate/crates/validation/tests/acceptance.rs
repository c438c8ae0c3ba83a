//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Positional arguments select criteria by id prefix, e.g.
//! `cargo test -p netsil-validation --test acceptance -- 3 9`. The airline
//! check reads `reachability.txt` and `reachability-meta.csv` from
//! `$NETSIL_AIRLINE_DIR`, falling back to `data/airline/` at the workspace
//! root.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use netsil_core::airline::{analyze, load_airline, preprocess, DEFAULT_SEED, EXPECTED_CITIES};
use netsil_core::graph::{adjacency_from_points, generate_rings};
use netsil_core::harness::{aggregate, run_scenario, run_specs, RunOptions, ScenarioSpec, ScenarioSummary};
use netsil_core::kmeans::KMeansConfig;
use netsil_core::spectral::{normalized_laplacian, symmetric_eigen};
use netsil_core::{adjusted_rand_index, select_k, silhouette, suites};
use netsil_core::{ClusterAssignment, DistanceMatrix, SelectKOptions, WeightedGraph};
use rand::{Rng, SeedableRng};

use netsil_validation::brute_force_ari;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn desk_scenario(id: &str) -> ScenarioSpec {
    suites::builtin_suites()
        .into_iter()
        .filter(|(name, _)| name.ends_with("_desk"))
        .flat_map(|(_, specs)| specs)
        .find(|s| s.id == id)
        .unwrap_or_else(|| panic!("no desk scenario '{id}'"))
}

fn run_desk(id: &str) -> (ScenarioSummary, Vec<f64>) {
    let spec = desk_scenario(id);
    assert_eq!(spec.replicates, 50);
    let records = run_scenario(&spec, &KMeansConfig::default()).unwrap();
    let aris = records.iter().filter_map(|r| r.ari).collect();
    (aggregate(&records).unwrap(), aris)
}

fn describe(s: &ScenarioSummary) -> String {
    format!(
        "{} prop_correct={:.2} K histogram {:?} ARI median {:.3}",
        s.scenario_id, s.proportion_correct, s.k_histogram, s.ari_median
    )
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let n = rng.random_range(2..=12);
        let a: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        let b: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        let got = adjusted_rand_index(&ClusterAssignment::from_raw_labels(&a), &ClusterAssignment::from_raw_labels(&b)).unwrap();
        if got != brute_force_ari(&a, &b) {
            mismatches += 1;
        }
    }
    let mut d = vec![0.6; 16];
    for i in 0..4 {
        d[i * 4 + i] = 0.0;
    }
    d[1] = 0.2;
    d[4] = 0.2;
    d[2 * 4 + 3] = 0.4;
    d[3 * 4 + 2] = 0.4;
    let s = silhouette(&DistanceMatrix::from_dense(4, d).unwrap(), &ClusterAssignment::new(vec![0, 0, 1, 1]).unwrap())
        .unwrap()
        .global;
    let elapsed = start.elapsed();
    verdict(
        mismatches == 0 && (s - 0.5).abs() <= 1e-12 && elapsed < Duration::from_secs(5),
        format!("ARI mismatches {mismatches}/1000, fixture s_G={s}, {elapsed:.2?}"),
    )
}

fn criterion_2() -> Verdict {
    let k3 = WeightedGraph::from_edges(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
    let (vals, _) = symmetric_eigen(&normalized_laplacian(&k3)).unwrap();
    let k3_ok = vals.iter().zip([0.0, 1.5, 1.5]).all(|(v, w)| (v - w).abs() <= 1e-8);

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
    let mut wrong = 0;
    for _ in 0..100 {
        let comps = rng.random_range(1..=6);
        let mut edges = Vec::new();
        let mut offset = 0;
        for _ in 0..comps {
            let size = rng.random_range(2..=8);
            for i in 1..size {
                let j = rng.random_range(0..i);
                edges.push((offset + j, offset + i, rng.random_range(0.05..=1.0)));
                for h in 0..i {
                    if h != j && rng.random::<f64>() < 0.3 {
                        edges.push((offset + h, offset + i, rng.random_range(0.05..=1.0)));
                    }
                }
            }
            offset += size;
        }
        let g = WeightedGraph::from_edges(offset, edges).unwrap();
        let (vals, _) = symmetric_eigen(&normalized_laplacian(&g)).unwrap();
        if vals.iter().filter(|v| v.abs() < 1e-8).count() != comps {
            wrong += 1;
        }
    }
    verdict(k3_ok && wrong == 0, format!("K_3 spectrum {vals:?}; component-count mismatches {wrong}/100"))
}

fn criterion_3(start: Instant) -> Vec<(&'static str, Verdict)> {
    let (a, _) = run_desk("unw_n600_k3_pw0.5_pb0.1_EQ");
    let (b, _) = run_desk("unw_n240_k3_pw0.3_pb0.05_EQ");
    let (c, _) = run_desk("unw_n240_k3_pw0.3_pb0.05_NE");
    let (d, _) = run_desk("unw_n240_k8_pw0.3_pb0.05_EQ");
    let elapsed = start.elapsed();
    let timing = format!(" [{elapsed:.1?} for criterion 3]");
    let in_time = elapsed < Duration::from_secs(600);
    vec![
        ("3a", verdict(a.proportion_correct >= 0.95 && in_time, format!("{} (need >= 0.95){timing}", describe(&a)))),
        ("3b", verdict((0.80..=1.0).contains(&b.proportion_correct) && in_time, format!("{} (need [0.80, 1.0])", describe(&b)))),
        ("3c", verdict(c.proportion_correct <= 0.05 && in_time, format!("{} (need <= 0.05)", describe(&c)))),
        ("3d", verdict(d.proportion_correct <= 0.15 && in_time, format!("{} (need <= 0.15)", describe(&d)))),
    ]
}

fn criterion_4() -> Vec<(&'static str, Verdict)> {
    let (a, _) = run_desk("weak_n240_pw0.3_pt0.1_EQ");
    let (b, _) = run_desk("weak_n240_pw0.3_pt0.15_EQ");
    vec![
        ("4a", verdict((0.60..=0.90).contains(&a.proportion_correct), format!("{} (need [0.60, 0.90])", describe(&a)))),
        ("4b", verdict(b.proportion_correct <= 0.10, format!("{} (need <= 0.10)", describe(&b)))),
    ]
}

fn criterion_5() -> Verdict {
    let (s, _) = run_desk("wtd_n240_pw0.6_pb0.1_wb0-0.2_EQ");
    verdict(
        s.proportion_correct >= 0.95 && s.ari_median >= 0.99,
        format!("{} (need prop >= 0.95, ARI median >= 0.99)", describe(&s)),
    )
}

fn criterion_6() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for id in ["fc_n240_wb0.3-0.5_EQ", "fc_n240_wb0.3-0.5_NE"] {
        let (s, aris) = run_desk(id);
        let min_ari = aris.iter().copied().fold(f64::INFINITY, f64::min);
        pass &= s.proportion_correct == 1.0 && aris.len() == 50 && min_ari == 1.0;
        parts.push(format!("{} min ARI {min_ari}", describe(&s)));
    }
    verdict(pass, parts.join("; "))
}

fn airline_dir() -> PathBuf {
    std::env::var_os("NETSIL_AIRLINE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            let root = Path::new(env!("CARGO_MANIFEST_DIR")).ancestors().nth(2).unwrap();
            root.join("data").join("airline")
        })
}

fn criterion_7() -> Verdict {
    let dir = airline_dir();
    let (edges, meta) = (dir.join("reachability.txt"), dir.join("reachability-meta.csv"));
    if !edges.is_file() || !meta.is_file() {
        return verdict(
            false,
            format!("airline data not found in {} (reachability.txt, reachability-meta.csv)", dir.display()),
        );
    }
    let start = Instant::now();
    let result = (|| {
        let data = load_airline(&edges, &meta, Some(EXPECTED_CITIES))?;
        let (g, report) = preprocess(&data.network)?;
        let analysis = analyze(&g, 20, DEFAULT_SEED)?;
        Ok::<_, netsil_core::Error>((report, analysis))
    })();
    let elapsed = start.elapsed();
    let (report, analysis) = match result {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("pipeline error: {e}")),
    };
    let sizes = &analysis.density.sizes;
    let diag = analysis.density.diagonal();
    let want_sizes = [141.0, 103.0, 96.0, 76.0, 40.0];
    let want_diag = [60.0, 60.0, 45.0, 51.0, 52.0];
    let k_ok = analysis.selection.best_k == 5;
    let sizes_ok = k_ok && sizes.iter().zip(want_sizes).all(|(&s, w)| (s as f64 - w).abs() <= 15.0);
    let diag_ok = k_ok && diag.iter().zip(want_diag).all(|(&d, w)| (d - w).abs() <= 5.0);
    let pass = report.nodes == 456
        && report.edges == 34_011
        && k_ok
        && sizes_ok
        && diag_ok
        && elapsed < Duration::from_secs(120);
    let diag_txt: Vec<String> = diag.iter().map(|d| format!("{d:.1}")).collect();
    verdict(
        pass,
        format!(
            "nodes={} edges={} (zero-weight mutual pairs {}) best_k={} sizes={sizes:?} diagonal=[{}] {elapsed:.1?}",
            report.nodes,
            report.edges,
            report.zero_weight_pairs,
            analysis.selection.best_k,
            diag_txt.join(", ")
        ),
    )
}

fn criterion_8() -> Verdict {
    let seed = suites::DEFAULT_MASTER_SEED;
    let pc = generate_rings(&suites::RING_COUNTS, &suites::RING_RADII, seed).unwrap();
    let g = adjacency_from_points(&pc).unwrap();
    let sel = select_k(&g, seed, &SelectKOptions::with_k_max(20)).unwrap();
    verdict(sel.best_k >= 10, format!("best_k={} (need >= 10)", sel.best_k))
}

fn criterion_9() -> Verdict {
    let mut specs: Vec<ScenarioSpec> = suites::fully_connected(10).into_iter().filter(|s| s.n == 240).collect();
    specs.extend(suites::unweighted(10).into_iter().filter(|s| s.n == 240 && s.k_true == 3).take(4));
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for jobs in [1, 8] {
        let out = dir.path().join(format!("jobs{jobs}"));
        let opts = RunOptions { jobs: Some(jobs), ..RunOptions::default() };
        run_specs(specs.clone(), &out, &opts, |_, _| {}).unwrap();
        files.push(std::fs::read(out.join("replicates.csv")).unwrap());
    }
    verdict(
        files[0] == files[1],
        format!("{} scenarios x 10 replicates, replicates.csv {} bytes, identical={}", specs.len(), files[0].len(), files[0] == files[1]),
    )
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let wanted = |id: &str| filters.is_empty() || filters.iter().any(|f| id.starts_with(f.as_str()));

    let mut results: Vec<(&str, Verdict)> = Vec::new();
    let mut report = |id: &'static str, v: Verdict| {
        println!("{} criterion {id}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        results.push((id, v));
    };
    if wanted("1") {
        report("1", criterion_1());
    }
    if wanted("2") {
        report("2", criterion_2());
    }
    if wanted("3") {
        for (id, v) in criterion_3(Instant::now()) {
            report(id, v);
        }
    }
    if wanted("4") {
        for (id, v) in criterion_4() {
            report(id, v);
        }
    }
    if wanted("5") {
        report("5", criterion_5());
    }
    if wanted("6") {
        report("6", criterion_6());
    }
    if wanted("7") {
        report("7", criterion_7());
    }
    if wanted("8") {
        report("8", criterion_8());
    }
    if wanted("9") {
        report("9", criterion_9());
    }
    let failed: Vec<&str> = results.iter().filter(|(_, v)| !v.pass).map(|(id, _)| *id).collect();
    println!("acceptance: {} passed, {} failed {:?}", results.len() - failed.len(), failed.len(), failed);
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
