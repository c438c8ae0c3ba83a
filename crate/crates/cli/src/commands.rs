use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context};
use netsil_core::airline::{self, EXPECTED_CITIES};
use netsil_core::edgelist::read_edge_list;
use netsil_core::harness::{self, write_atomic, RunOptions};
use netsil_core::{rng, suites, silhouette, select_k, SelectKOptions};
use serde_json::json;

use crate::{AirlineArgs, ClusterArgs, RingsArgs, SimulateArgs, SuitesArgs};

/// Bad flags, paths or configs map to 2; everything else to 1.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    let usage = e.chain().any(|c| {
        c.downcast_ref::<netsil_core::Error>().is_some_and(|e| e.is_usage()) || c.is::<Usage>()
    });
    if usage {
        2
    } else {
        1
    }
}

#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn ensure_out_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir)
        .map_err(|e| Usage(format!("cannot create output directory {}: {e}", dir.display())))?;
    Ok(())
}

fn curve_csv(curve: &std::collections::BTreeMap<usize, f64>) -> String {
    let mut out = String::from("k,silhouette\n");
    for (k, s) in curve {
        out.push_str(&format!("{k},{s}\n"));
    }
    out
}

pub fn simulate(a: SimulateArgs) -> anyhow::Result<ExitCode> {
    let mut specs = match (&a.suite, &a.config) {
        (Some(name), _) => suites::builtin_suite(name).ok_or_else(|| {
            Usage(format!(
                "unknown suite '{name}'; available: {}",
                suites::builtin_names().join(", ")
            ))
        })?,
        (None, Some(path)) => harness::load_suite(path)?,
        (None, None) => bail!(Usage("one of --suite or --config is required".into())),
    };
    if let Some(seed) = a.seed {
        for s in &mut specs {
            s.master_seed = seed;
        }
    }
    let opts = RunOptions {
        jobs: a.jobs.map(|j| j as usize),
        replicates: a.replicates.map(|r| r as usize),
        record_timing: a.record_timing,
        ..RunOptions::default()
    };
    let outcome = harness::run_specs(specs, &a.out, &opts, |spec, summary| match summary {
        Ok(s) => println!(
            "{}: R={} prop_correct={:.3} ari_median={:.4} failed={}",
            spec.id, s.replicates, s.proportion_correct, s.ari_median, s.failed
        ),
        Err(e) => println!("{}: FAILED ({e})", spec.id),
    })?;
    let failed = outcome.failed_scenarios();
    if failed.is_empty() {
        println!("wrote {}", a.out.display());
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("{} scenario(s) failed: {}", failed.len(), failed.join(", "));
        Ok(ExitCode::from(1))
    }
}

pub fn cluster(a: ClusterArgs) -> anyhow::Result<ExitCode> {
    let g = read_edge_list(&a.edges)?;
    let kmax = a.kmax as usize;
    if kmax > g.n() {
        bail!(Usage(format!("--kmax {kmax} exceeds the {} nodes in {}", g.n(), a.edges.display())));
    }
    if let Some(out) = &a.out {
        ensure_out_dir(out)?;
    }
    let sel = select_k(&g, a.seed, &SelectKOptions::with_k_max(kmax))?;
    let curve = curve_csv(&sel.curve);
    println!("best_k={}", sel.best_k);
    print!("{curve}");

    if let Some(out) = &a.out {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["node", "cluster"])?;
        for i in 0..g.n() {
            w.write_record([g.node_label(i), sel.assignment.label(i).to_string()])?;
        }
        write_atomic(&out.join("assignment.csv"), &w.into_inner()?)?;
        write_atomic(&out.join("curve.csv"), curve.as_bytes())?;
        let manifest = json!({
            "software": format!("netsil {}", netsil_core::VERSION),
            "generator": rng::GENERATOR,
            "edges": a.edges,
            "seed": a.seed,
            "kmax": kmax,
            "best_k": sel.best_k,
            "curve": sel.curve,
        });
        write_atomic(&out.join("cluster.json"), serde_json::to_string_pretty(&manifest)?.as_bytes())?;
        if a.emit_silhouette {
            let report = silhouette(&g.distance_matrix(), &sel.assignment)?;
            write_atomic(&out.join("silhouette.json"), serde_json::to_string_pretty(&report)?.as_bytes())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn airline(a: AirlineArgs) -> anyhow::Result<ExitCode> {
    for p in [&a.edges, &a.meta] {
        if !p.is_file() {
            bail!(Usage(format!("no such file: {}", p.display())));
        }
    }
    ensure_out_dir(&a.out)?;
    let data = airline::load_airline(&a.edges, &a.meta, Some(EXPECTED_CITIES))?;
    let (g, report) = airline::preprocess(&data.network)?;
    let kmax = a.kmax as usize;
    if kmax > g.n() {
        bail!(Usage(format!("--kmax {kmax} exceeds the {} nodes", g.n())));
    }
    let analysis = airline::analyze(&g, kmax, a.seed)?;
    let z = &analysis.selection.assignment;

    write_atomic(&a.out.join("airline_clusters.csv"), airline::clusters_csv(&g, z, &data.cities)?.as_bytes())?;
    write_atomic(&a.out.join("airline_density.csv"), analysis.density.to_csv().as_bytes())?;
    let omitted = airline::export_geojson(&a.out.join("airline_map.geojson"), &g, z, &data.cities)?;
    write_atomic(&a.out.join("airline_curve.csv"), curve_csv(&analysis.selection.curve).as_bytes())?;
    let manifest = json!({
        "software": format!("netsil {}", netsil_core::VERSION),
        "generator": rng::GENERATOR,
        "edges": a.edges,
        "meta": a.meta,
        "seed": a.seed,
        "kmax": kmax,
        "preprocess": report,
        "best_k": analysis.selection.best_k,
        "sizes": analysis.density.sizes,
        "curve": analysis.selection.curve,
        "omitted_from_map": omitted,
        "warnings": data.warnings,
    });
    write_atomic(&a.out.join("airline.json"), serde_json::to_string_pretty(&manifest)?.as_bytes())?;

    println!(
        "nodes={} edges={} zero_weight_pairs={} one_way_pairs={}",
        report.nodes, report.edges, report.zero_weight_pairs, report.one_way_pairs
    );
    println!("best_k={}", analysis.selection.best_k);
    let sizes: Vec<String> = analysis.density.sizes.iter().map(|s| s.to_string()).collect();
    let diag: Vec<String> = analysis.density.diagonal().iter().map(|d| format!("{d:.1}")).collect();
    println!("sizes={} within_density={}", sizes.join(","), diag.join(","));
    Ok(ExitCode::SUCCESS)
}

pub fn rings(a: RingsArgs) -> anyhow::Result<ExitCode> {
    use netsil_core::graph::{adjacency_from_points, generate_rings};
    ensure_out_dir(&a.out)?;
    let pc = generate_rings(&suites::RING_COUNTS, &suites::RING_RADII, a.seed)?;
    let g = adjacency_from_points(&pc)?;
    let sel = select_k(&g, a.seed, &SelectKOptions::with_k_max(a.kmax as usize))
        .context("clustering the ring points")?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "y", "true_ring", "cluster"])?;
    for (i, p) in pc.points.iter().enumerate() {
        w.write_record([
            p[0].to_string(),
            p[1].to_string(),
            pc.labels[i].to_string(),
            sel.assignment.label(i).to_string(),
        ])?;
    }
    write_atomic(&a.out.join("rings_points.csv"), &w.into_inner()?)?;
    write_atomic(&a.out.join("rings_curve.csv"), curve_csv(&sel.curve).as_bytes())?;
    let manifest = json!({
        "software": format!("netsil {}", netsil_core::VERSION),
        "generator": rng::GENERATOR,
        "seed": a.seed,
        "kmax": a.kmax,
        "counts": suites::RING_COUNTS,
        "radii": suites::RING_RADII,
        "best_k": sel.best_k,
        "curve": sel.curve,
    });
    write_atomic(&a.out.join("rings.json"), serde_json::to_string_pretty(&manifest)?.as_bytes())?;
    println!("best_k={}", sel.best_k);
    Ok(ExitCode::SUCCESS)
}

pub fn suites(a: SuitesArgs) -> anyhow::Result<ExitCode> {
    match a.write {
        None => {
            for (name, specs) in suites::builtin_suites() {
                println!("{name}\t{} scenarios", specs.len());
            }
        }
        Some(dir) => {
            ensure_out_dir(&dir)?;
            for (name, specs) in suites::builtin_suites() {
                let path = dir.join(format!("{name}.json"));
                let mut text = serde_json::to_string_pretty(&specs)?;
                text.push('\n');
                write_atomic(&path, text.as_bytes())?;
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn version() -> anyhow::Result<ExitCode> {
    println!("netsil {}", netsil_core::VERSION);
    println!("generator: {}", rng::GENERATOR);
    Ok(ExitCode::SUCCESS)
}
