//! Tab-separated weighted edge lists.
//!
//! One undirected edge per line, `src<TAB>dst<TAB>weight`, node ids as
//! strings. Lines starting with `#` and blank lines are ignored. Nodes are
//! indexed in order of first appearance. A zero weight declares both nodes
//! without adding an edge. The writer emits each nonzero edge once with
//! `src < dst` lexicographically, sorted, plus a zero-weight line for every
//! isolated node.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

pub fn parse_edge_list(text: &str, source: &str) -> Result<WeightedGraph> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut ids: Vec<String> = Vec::new();
    let mut edges: HashMap<(usize, usize), f64> = HashMap::new();
    let err = |line: usize, msg: String| Error::Parse {
        path: source.to_string(),
        line,
        msg,
    };
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(err(lineno + 1, format!("expected 3 tab-separated fields, got {}", fields.len())));
        }
        let w: f64 = fields[2]
            .parse()
            .map_err(|_| err(lineno + 1, format!("bad weight '{}'", fields[2])))?;
        if !(0.0..=1.0).contains(&w) {
            return Err(err(lineno + 1, format!("weight {w} outside [0, 1]")));
        }
        let mut node = |id: &str| {
            *index.entry(id.to_string()).or_insert_with(|| {
                ids.push(id.to_string());
                ids.len() - 1
            })
        };
        let (a, b) = (node(fields[0]), node(fields[1]));
        if a == b {
            return Err(err(lineno + 1, format!("self-loop on '{}'", fields[0])));
        }
        let key = (a.min(b), a.max(b));
        if let Some(prev) = edges.insert(key, w) {
            if prev != w {
                return Err(err(
                    lineno + 1,
                    format!("edge {}-{} repeated with a different weight", fields[0], fields[1]),
                ));
            }
        }
    }
    let n = ids.len();
    let g = WeightedGraph::from_edges(n, edges.into_iter().map(|((a, b), w)| (a, b, w)))?;
    g.with_node_ids(ids)
}

pub fn read_edge_list(path: &Path) -> Result<WeightedGraph> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text, &path.display().to_string())
}

pub fn format_edge_list(g: &WeightedGraph) -> String {
    let mut lines: Vec<(String, String, f64)> = g
        .edges()
        .map(|(i, j, w)| {
            let (a, b) = (g.node_label(i), g.node_label(j));
            if a <= b { (a, b, w) } else { (b, a, w) }
        })
        .collect();
    // Isolated nodes are declared by a zero-weight line so they survive a
    // round trip.
    if g.n() > 1 {
        for i in (0..g.n()).filter(|&i| g.strength(i) == 0.0) {
            let other = if i == 0 { 1 } else { 0 };
            let (a, b) = (g.node_label(i), g.node_label(other));
            lines.push(if a <= b { (a, b, 0.0) } else { (b, a, 0.0) });
        }
    }
    lines.sort_by(|x, y| (&x.0, &x.1).cmp(&(&y.0, &y.1)));
    lines.dedup_by(|x, y| x.0 == y.0 && x.1 == y.1);
    let mut out = String::new();
    for (a, b, w) in lines {
        let _ = writeln!(out, "{a}\t{b}\t{w}");
    }
    out
}

pub fn write_edge_list(g: &WeightedGraph, path: &Path) -> Result<()> {
    crate::harness::write_atomic(path, format_edge_list(g).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_ids() {
        let g = parse_edge_list("# header\nb\ta\t0.5\n\na\tc\t1\nc\td\t0\n", "t").unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.node_ids().unwrap(), &["b", "a", "c", "d"]);
        assert_eq!(g.weight(0, 1), 0.5);
        assert_eq!(g.weight(1, 2), 1.0);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn reports_line_numbers() {
        let e = parse_edge_list("a\tb\t0.5\na\tb\n", "f.tsv").unwrap_err();
        assert!(e.to_string().starts_with("f.tsv:2:"), "{e}");
        assert!(parse_edge_list("a\tb\t1.5\n", "f").is_err());
        assert!(parse_edge_list("a\ta\t0.5\n", "f").is_err());
        assert!(parse_edge_list("a\tb\t0.5\nb\ta\t0.6\n", "f").is_err());
    }

    #[test]
    fn writer_orders_endpoints() {
        let g = parse_edge_list("z\ty\t0.25\ny\tx\t1\n", "t").unwrap();
        assert_eq!(format_edge_list(&g), "x\ty\t1\ny\tz\t0.25\n");
    }
}
