//! Airline reachability case study: a directed network whose arc weights
//! are negative travel times is rescaled to `[0, 1]`, symmetrized over
//! mutually reachable pairs, and clustered with silhouette-selected K.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::graph::{ClusterAssignment, WeightedGraph};
use crate::harness::write_atomic;
use crate::spectral::{select_k, KSelectionResult, SelectKOptions};

/// Node count of the published network.
pub const EXPECTED_CITIES: usize = 456;
/// Seed pinned for the reference analysis.
pub const DEFAULT_SEED: u64 = 2016;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
}

/// Directed network; at most one arc per ordered pair, no self-arcs.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectedWeightedNetwork {
    pub node_ids: Vec<String>,
    pub arcs: Vec<Arc>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CityMetadata {
    pub id: String,
    pub name: String,
    pub latitude: f64,
    pub longitude: f64,
    pub population: f64,
}

/// Loaded network plus metadata aligned with its nodes.
#[derive(Clone, Debug)]
pub struct AirlineData {
    pub network: DirectedWeightedNetwork,
    /// `cities[i]` describes `network.node_ids[i]`, if metadata exists.
    pub cities: Vec<Option<CityMetadata>>,
    pub warnings: Vec<String>,
}

fn parse_error(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

/// Reads a city metadata CSV with a header row. Columns are matched by
/// name: `id`/`node_id`, `name`, `lat`/`latitude`, `lon`/`lng`/`longitude`,
/// `population`/`metro_pop`.
pub fn read_metadata(path: &Path) -> Result<Vec<CityMetadata>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => parse_error(path, 1, format!("{other:?}")),
        })?;
    let headers = reader.headers()?.clone();
    let col = |names: &[&str]| {
        headers
            .iter()
            .position(|h| names.iter().any(|n| h.eq_ignore_ascii_case(n)))
            .ok_or_else(|| parse_error(path, 1, format!("missing column {}", names.join("/"))))
    };
    let id = col(&["id", "node_id"])?;
    let name = col(&["name"])?;
    let lat = col(&["lat", "latitude"])?;
    let lon = col(&["lon", "lng", "longitude"])?;
    let pop = col(&["population", "metro_pop"])?;

    let mut out = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let line = row + 2;
        let record = record.map_err(|e| parse_error(path, line, e.to_string()))?;
        let field = |i: usize| record.get(i).unwrap_or("");
        let num = |i: usize, what: &str| {
            field(i)
                .parse::<f64>()
                .map_err(|_| parse_error(path, line, format!("bad {what} '{}'", field(i))))
        };
        let city = CityMetadata {
            id: field(id).to_string(),
            name: field(name).to_string(),
            latitude: num(lat, "latitude")?,
            longitude: num(lon, "longitude")?,
            population: num(pop, "population")?,
        };
        if !(-90.0..=90.0).contains(&city.latitude)
            || !(-180.0..=180.0).contains(&city.longitude)
            || city.population < 0.0
        {
            return Err(parse_error(path, line, format!("coordinates or population out of range for '{}'", city.id)));
        }
        out.push(city);
    }
    Ok(out)
}

/// Parses a whitespace-separated `src dst weight` arc list (`#` comments).
/// Self-arcs are skipped with a warning; a repeated ordered pair is an error.
pub fn parse_arcs(text: &str, path: &Path, node_ids: &mut Vec<String>, warnings: &mut Vec<String>) -> Result<Vec<Arc>> {
    let mut index: HashMap<String, usize> = node_ids.iter().cloned().enumerate().map(|(i, id)| (id, i)).collect();
    let mut seen = std::collections::HashSet::new();
    let mut arcs = Vec::new();
    let mut self_arcs = 0;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_error(path, lineno + 1, format!("expected 'src dst weight', got {} fields", fields.len())));
        }
        let weight: f64 = fields[2]
            .parse()
            .ok()
            .filter(|w: &f64| w.is_finite())
            .ok_or_else(|| parse_error(path, lineno + 1, format!("bad weight '{}'", fields[2])))?;
        let mut node = |id: &str| {
            *index.entry(id.to_string()).or_insert_with(|| {
                node_ids.push(id.to_string());
                node_ids.len() - 1
            })
        };
        let (src, dst) = (node(fields[0]), node(fields[1]));
        if src == dst {
            self_arcs += 1;
            continue;
        }
        if !seen.insert((src, dst)) {
            return Err(parse_error(path, lineno + 1, format!("duplicate arc {} -> {}", fields[0], fields[1])));
        }
        arcs.push(Arc { src, dst, weight });
    }
    if self_arcs > 0 {
        warnings.push(format!("skipped {self_arcs} self-arcs"));
    }
    Ok(arcs)
}

/// Loads the arc list and metadata. Nodes are the metadata ids in file
/// order followed by any arc endpoints without metadata. Missing metadata
/// and a node count other than `expected_nodes` produce warnings.
pub fn load_airline(edges: &Path, meta: &Path, expected_nodes: Option<usize>) -> Result<AirlineData> {
    let metadata = read_metadata(meta)?;
    let mut warnings = Vec::new();
    let mut node_ids: Vec<String> = Vec::with_capacity(metadata.len());
    let mut by_id = HashMap::new();
    for city in metadata {
        if by_id.contains_key(&city.id) {
            return Err(Error::Config(format!("{}: duplicate city id '{}'", meta.display(), city.id)));
        }
        node_ids.push(city.id.clone());
        by_id.insert(city.id.clone(), city);
    }
    let text = fs::read_to_string(edges).map_err(|e| Error::io(edges, e))?;
    let arcs = parse_arcs(&text, edges, &mut node_ids, &mut warnings)?;
    let cities: Vec<Option<CityMetadata>> = node_ids.iter().map(|id| by_id.remove(id)).collect();
    let missing = cities.iter().filter(|c| c.is_none()).count();
    if missing > 0 {
        warnings.push(format!("{missing} nodes have no metadata; kept without coordinates"));
    }
    if let Some(expected) = expected_nodes {
        if node_ids.len() != expected {
            warnings.push(format!("expected {expected} nodes, found {}", node_ids.len()));
        }
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(AirlineData {
        network: DirectedWeightedNetwork { node_ids, arcs },
        cities,
        warnings,
    })
}

/// Counts from preprocessing.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PreprocessReport {
    pub nodes: usize,
    pub arcs: usize,
    /// Unordered pairs with arcs in both directions.
    pub mutual_pairs: usize,
    /// Mutual pairs whose averaged weight is nonzero (the edge set).
    pub edges: usize,
    /// Mutual pairs whose averaged weight came out exactly 0.
    pub zero_weight_pairs: usize,
    /// Mutual pairs where one direction rescaled to 0 but the mean did not.
    pub one_sided_zero_pairs: usize,
    /// Pairs reachable in one direction only (dropped).
    pub one_way_pairs: usize,
}

/// Affine map of every arc weight onto `[0, 1]`, in arc order: the most
/// negative weight goes to 0, the largest to 1.
pub fn rescaled_weights(net: &DirectedWeightedNetwork) -> Result<Vec<f64>> {
    if net.arcs.len() < 2 {
        return Err(Error::Degenerate("need at least two arcs".into()));
    }
    let lo = net.arcs.iter().map(|a| a.weight).fold(f64::INFINITY, f64::min);
    let hi = net.arcs.iter().map(|a| a.weight).fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return Err(Error::Degenerate("all arc weights are equal (zero range)".into()));
    }
    Ok(net.arcs.iter().map(|a| ((a.weight - lo) / (hi - lo)).clamp(0.0, 1.0)).collect())
}

/// Min-max rescales all arc weights to `[0, 1]`, then keeps each pair with
/// arcs in both directions at the mean of its two rescaled weights.
pub fn preprocess(net: &DirectedWeightedNetwork) -> Result<(WeightedGraph, PreprocessReport)> {
    let rescaled = rescaled_weights(net)?;
    let forward: HashMap<(usize, usize), f64> =
        net.arcs.iter().zip(rescaled).map(|(a, w)| ((a.src, a.dst), w)).collect();

    let n = net.node_ids.len();
    let mut g = WeightedGraph::empty(n);
    let mut report = PreprocessReport {
        nodes: n,
        arcs: net.arcs.len(),
        mutual_pairs: 0,
        edges: 0,
        zero_weight_pairs: 0,
        one_sided_zero_pairs: 0,
        one_way_pairs: 0,
    };
    for (&(a, b), &w_ab) in &forward {
        match forward.get(&(b, a)) {
            None => report.one_way_pairs += 1,
            Some(&w_ba) if a < b => {
                report.mutual_pairs += 1;
                let w = 0.5 * (w_ab + w_ba);
                if w == 0.0 {
                    report.zero_weight_pairs += 1;
                } else {
                    if w_ab == 0.0 || w_ba == 0.0 {
                        report.one_sided_zero_pairs += 1;
                    }
                    report.edges += 1;
                    g.set_pair(a, b, w);
                }
            }
            Some(_) => {}
        }
    }
    let g = g.with_node_ids(net.node_ids.clone())?;
    Ok((g, report))
}

/// Within- and between-cluster edge densities in percent. Only the upper
/// triangle is stored: `upper[k][l - k]` for `l >= k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockDensityTable {
    pub sizes: Vec<usize>,
    pub upper: Vec<Vec<f64>>,
}

impl BlockDensityTable {
    /// Density of nonzero-weight pairs; diagonal blocks over `C(n_k, 2)`
    /// pairs, off-diagonal over `n_k * n_l`. A block with no possible pairs
    /// has density 0.
    pub fn compute(g: &WeightedGraph, z: &ClusterAssignment) -> Result<Self> {
        if g.n() != z.n() {
            return Err(Error::Dimension {
                expected: g.n(),
                got: z.n(),
            });
        }
        let k = z.k();
        let sizes = z.sizes();
        let mut counts = vec![0usize; k * k];
        for (i, j, _) in g.edges() {
            let (a, b) = (z.label(i), z.label(j));
            counts[a.min(b) * k + a.max(b)] += 1;
        }
        let upper = (0..k)
            .map(|a| {
                (a..k)
                    .map(|b| {
                        let possible = if a == b {
                            sizes[a] * sizes[a].saturating_sub(1) / 2
                        } else {
                            sizes[a] * sizes[b]
                        };
                        if possible == 0 {
                            0.0
                        } else {
                            100.0 * counts[a * k + b] as f64 / possible as f64
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Self { sizes, upper })
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        let (lo, hi) = (a.min(b), a.max(b));
        self.upper[lo][hi - lo]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.k()).map(|a| self.get(a, a)).collect()
    }

    /// `cluster,size,c0,...` with the strict lower triangle left blank.
    pub fn to_csv(&self) -> String {
        let k = self.k();
        let mut out = String::from("cluster,size");
        for b in 0..k {
            let _ = write!(out, ",c{b}");
        }
        out.push('\n');
        for a in 0..k {
            let _ = write!(out, "{a},{}", self.sizes[a]);
            for b in 0..k {
                if b < a {
                    out.push(',');
                } else {
                    let _ = write!(out, ",{:.2}", self.get(a, b));
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Selected partition (clusters numbered by descending size) and its
/// density table.
#[derive(Clone, Debug, Serialize)]
pub struct AirlineAnalysis {
    pub selection: KSelectionResult,
    pub density: BlockDensityTable,
}

pub fn analyze(g: &WeightedGraph, k_max: usize, seed: u64) -> Result<AirlineAnalysis> {
    let mut selection = select_k(g, seed, &SelectKOptions::with_k_max(k_max))?;
    selection.assignment = selection.assignment.relabeled_by_size();
    let density = BlockDensityTable::compute(g, &selection.assignment)?;
    Ok(AirlineAnalysis { selection, density })
}

/// `city_id,name,cluster,strength` rows.
pub fn clusters_csv(g: &WeightedGraph, z: &ClusterAssignment, cities: &[Option<CityMetadata>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["city_id", "name", "cluster", "strength"])?;
    for i in 0..g.n() {
        let name = cities.get(i).and_then(|c| c.as_ref()).map(|c| c.name.as_str()).unwrap_or("");
        w.write_record([g.node_label(i), name.to_string(), z.label(i).to_string(), g.strength(i).to_string()])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv buffer: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// GeoJSON FeatureCollection of city points carrying `cluster`, `strength`,
/// `name` and `population`. Returns the document and the number of nodes
/// left out for lack of coordinates.
pub fn geojson(g: &WeightedGraph, z: &ClusterAssignment, cities: &[Option<CityMetadata>]) -> (serde_json::Value, usize) {
    let mut features = Vec::new();
    let mut omitted = 0;
    for i in 0..g.n() {
        let Some(city) = cities.get(i).and_then(|c| c.as_ref()) else {
            omitted += 1;
            continue;
        };
        features.push(json!({
            "type": "Feature",
            "geometry": { "type": "Point", "coordinates": [city.longitude, city.latitude] },
            "properties": {
                "id": city.id,
                "name": city.name,
                "cluster": z.label(i),
                "strength": g.strength(i),
                "population": city.population,
            }
        }));
    }
    (json!({ "type": "FeatureCollection", "features": features }), omitted)
}

pub fn export_geojson(path: &Path, g: &WeightedGraph, z: &ClusterAssignment, cities: &[Option<CityMetadata>]) -> Result<usize> {
    let (doc, omitted) = geojson(g, z, cities);
    write_atomic(path, serde_json::to_string_pretty(&doc)?.as_bytes())?;
    if omitted > 0 {
        log::warn!("{omitted} nodes without coordinates omitted from {}", path.display());
    }
    Ok(omitted)
}
