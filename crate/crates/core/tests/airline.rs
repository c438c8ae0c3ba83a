use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;

use netsil_core::airline::{
    analyze, clusters_csv, export_geojson, load_airline, preprocess, rescaled_weights, Arc, BlockDensityTable,
    DirectedWeightedNetwork,
};
use netsil_core::{adjusted_rand_index, ClusterAssignment, Error};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

/// Four regions; within-region pairs are reachable both ways with short
/// travel times, cross-region pairs mostly one way or not at all.
fn synthetic(seed: u64) -> (String, String, Vec<usize>) {
    let sizes = [30, 25, 20, 15];
    let region: Vec<usize> = sizes.iter().enumerate().flat_map(|(r, &s)| std::iter::repeat_n(r, s)).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut edges = String::from("# synthetic reachability\n");
    for i in 0..region.len() {
        for j in 0..region.len() {
            if i == j {
                continue;
            }
            let same = region[i] == region[j];
            let p = if same { 0.9 } else { 0.08 };
            if rng.random::<f64>() < p {
                let minutes = if same { rng.random_range(60..240) } else { rng.random_range(300..900) };
                writeln!(edges, "{} {} -{}", 100 + i, 100 + j, minutes).unwrap();
            }
        }
    }
    let mut meta = String::from("id,name,lat,lon,population\n");
    for (i, r) in region.iter().enumerate() {
        writeln!(meta, "{},\"City {i}, R{r}\",{},{},{}", 100 + i, 30.0 + *r as f64, -100.0 + i as f64 * 0.1, 1000 * (i + 1)).unwrap();
    }
    (edges, meta, region)
}

fn write_fixture(dir: &std::path::Path, edges: &str, meta: &str) -> (std::path::PathBuf, std::path::PathBuf) {
    let e = dir.join("edges.txt");
    let m = dir.join("meta.csv");
    fs::write(&e, edges).unwrap();
    fs::write(&m, meta).unwrap();
    (e, m)
}

#[test]
fn synthetic_network_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, meta, region) = synthetic(1);
    let (e, m) = write_fixture(dir.path(), &edges, &meta);
    let data = load_airline(&e, &m, Some(90)).unwrap();
    assert!(data.warnings.is_empty(), "{:?}", data.warnings);
    assert_eq!(data.network.node_ids.len(), 90);
    assert_eq!(data.cities[3].as_ref().unwrap().name, "City 3, R0");

    let (g, report) = preprocess(&data.network).unwrap();
    g.validate().unwrap();
    assert_eq!(report.nodes, 90);
    assert_eq!(report.edges, g.edge_count());
    assert_eq!(report.edges + report.zero_weight_pairs, report.mutual_pairs);

    let analysis = analyze(&g, 10, 5).unwrap();
    assert_eq!(analysis.selection.best_k, 4);
    let z = &analysis.selection.assignment;
    let truth = ClusterAssignment::new(region).unwrap();
    assert!(adjusted_rand_index(z, &truth).unwrap() > 0.95);
    assert_eq!(analysis.density.sizes, z.sizes());
    assert!(analysis.density.sizes.windows(2).all(|w| w[0] >= w[1]));
    for a in 0..4 {
        assert!(analysis.density.get(a, a) > 60.0);
        for b in a + 1..4 {
            assert!(analysis.density.get(a, b) < 10.0);
        }
    }

    let path = dir.path().join("map.geojson");
    assert_eq!(export_geojson(&path, &g, z, &data.cities).unwrap(), 0);
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let features = doc["features"].as_array().unwrap();
    assert_eq!(features.len(), 90);
    for (i, f) in features.iter().enumerate() {
        assert_eq!(f["type"], "Feature");
        assert_eq!(f["geometry"]["type"], "Point");
        let c = f["properties"]["cluster"].as_u64().unwrap() as usize;
        assert_eq!(c, z.label(i));
        let s = f["properties"]["strength"].as_f64().unwrap();
        assert!((s - g.row(i).iter().sum::<f64>()).abs() < 1e-12);
        let lon = f["geometry"]["coordinates"][0].as_f64().unwrap();
        assert!((-180.0..=180.0).contains(&lon));
    }

    let csv_text = clusters_csv(&g, z, &data.cities).unwrap();
    let mut rdr = csv::Reader::from_reader(csv_text.as_bytes());
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["city_id", "name", "cluster", "strength"]);
    assert_eq!(rdr.records().count(), 90);
}

#[test]
fn loader_errors_and_warnings() {
    let dir = tempfile::tempdir().unwrap();
    let meta = "node_id,name,latitude,longitude,metro_pop\n1,A,40,-70,10\n2,B,41,-71,20\n";

    let (e, m) = write_fixture(dir.path(), "1 2 -5\n# c\n2 1 -6\n1 2 -7\n", meta);
    match load_airline(&e, &m, None) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("expected parse error, got {other:?}"),
    }

    let (e, m) = write_fixture(dir.path(), "1 2 -5\n2 1 -6\n3 1 -9\n1 1 -2\n", meta);
    let data = load_airline(&e, &m, Some(456)).unwrap();
    assert_eq!(data.network.node_ids, ["1", "2", "3"]);
    assert!(data.cities[2].is_none());
    assert_eq!(data.network.arcs.len(), 3);
    let all = data.warnings.join("\n");
    assert!(all.contains("self-arcs"), "{all}");
    assert!(all.contains("no metadata"), "{all}");
    assert!(all.contains("expected 456 nodes, found 3"), "{all}");

    let (e, m) = write_fixture(dir.path(), "1 2 x\n", meta);
    assert!(matches!(load_airline(&e, &m, None), Err(Error::Parse { line: 1, .. })));

    let (e, m) = write_fixture(dir.path(), "1 2 -1\n", "id,name,lat,lon,population\n1,A,95,0,1\n");
    assert!(matches!(load_airline(&e, &m, None), Err(Error::Parse { line: 2, .. })));

    let (e, m) = write_fixture(dir.path(), "1 2 -1\n", "id,name,lat\n1,A,3\n");
    assert!(load_airline(&e, &m, None).is_err());
}

#[test]
fn density_of_complete_block_is_full() {
    let mut edges = Vec::new();
    for i in 0..5 {
        for j in i + 1..5 {
            edges.push((i, j, 0.3));
        }
    }
    edges.push((5, 6, 0.9));
    let g = netsil_core::WeightedGraph::from_edges(8, edges).unwrap();
    let z = ClusterAssignment::new(vec![0, 0, 0, 0, 0, 1, 1, 1]).unwrap();
    let t = BlockDensityTable::compute(&g, &z).unwrap();
    assert_eq!(t.get(0, 0), 100.0);
    assert_eq!(t.get(1, 1), 100.0 / 3.0);
    assert_eq!(t.get(0, 1), 0.0);
    assert_eq!(t.upper[1].len(), 1);
}

fn network_strategy() -> impl Strategy<Value = DirectedWeightedNetwork> {
    (3usize..12).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n, -1000i32..0), 2..60).prop_map(move |raw| {
            let mut seen = HashSet::new();
            let arcs: Vec<Arc> = raw
                .into_iter()
                .filter(|&(s, d, _)| s != d && seen.insert((s, d)))
                .map(|(src, dst, w)| Arc { src, dst, weight: w as f64 })
                .collect();
            DirectedWeightedNetwork { node_ids: (0..n).map(|i| i.to_string()).collect(), arcs }
        })
    })
}

proptest! {
    #[test]
    fn edge_set_is_mutual_pairs(net in network_strategy()) {
        let Ok((g, report)) = preprocess(&net) else {
            return Ok(());
        };
        prop_assert!(g.validate().is_ok());
        let arcs: HashSet<(usize, usize)> = net.arcs.iter().map(|a| (a.src, a.dst)).collect();
        let r = rescaled_weights(&net).unwrap();
        let lookup = |s: usize, d: usize| net.arcs.iter().position(|a| a.src == s && a.dst == d).map(|i| r[i]);
        let mut mutual = 0;
        for i in 0..g.n() {
            for j in i + 1..g.n() {
                let both = arcs.contains(&(i, j)) && arcs.contains(&(j, i));
                if both {
                    mutual += 1;
                    let want = 0.5 * (lookup(i, j).unwrap() + lookup(j, i).unwrap());
                    prop_assert_eq!(g.weight(i, j), want);
                } else {
                    prop_assert_eq!(g.weight(i, j), 0.0);
                }
            }
        }
        prop_assert_eq!(report.mutual_pairs, mutual);
    }

    #[test]
    fn rescale_preserves_order(net in network_strategy()) {
        let Ok(r) = rescaled_weights(&net) else {
            return Ok(());
        };
        prop_assert!(r.contains(&0.0) && r.contains(&1.0));
        for a in 0..r.len() {
            for b in 0..r.len() {
                if net.arcs[a].weight < net.arcs[b].weight {
                    prop_assert!(r[a] < r[b]);
                }
                if net.arcs[a].weight == net.arcs[b].weight {
                    prop_assert_eq!(r[a], r[b]);
                }
            }
        }
    }
}
