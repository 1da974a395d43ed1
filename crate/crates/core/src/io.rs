//! Graph files.
//!
//! Edge lists are UTF-8 lines `u v [w]` with `#` comments; a line holding a
//! single id declares a vertex. Ids are arbitrary nonnegative integers and are
//! densified to `0..n` in ascending order. JSON graphs are
//! `{"n": int, "edges": [[u, v, w], ...]}` with ids already in `0..n`.
//! Weights are written with 17 significant digits.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    EdgeList,
    Json,
}

impl GraphFormat {
    /// `.json` selects JSON, anything else is an edge list.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => GraphFormat::Json,
            _ => GraphFormat::EdgeList,
        }
    }
}

pub fn load_graph(path: &Path, format: GraphFormat, options: GraphOptions) -> Result<Graph> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    match format {
        GraphFormat::EdgeList => parse_edge_list(&text, options),
        GraphFormat::Json => parse_json(&text, options),
    }
}

pub fn parse_edge_list(text: &str, options: GraphOptions) -> Result<Graph> {
    let mut raw: Vec<(u64, u64, f64)> = Vec::new();
    let mut ids: BTreeMap<u64, usize> = BTreeMap::new();
    // First line each unordered pair was seen on, for error messages.
    let mut seen: BTreeMap<(u64, u64), (f64, usize)> = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        let parse_id = |s: &str| -> Result<u64> {
            s.parse::<u64>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("'{s}' is not a nonnegative integer vertex id"),
            })
        };
        match fields.len() {
            1 => {
                ids.entry(parse_id(fields[0])?).or_insert(0);
            }
            2 | 3 => {
                let u = parse_id(fields[0])?;
                let v = parse_id(fields[1])?;
                let w = match fields.get(2) {
                    Some(s) => s.parse::<f64>().map_err(|_| Error::Parse {
                        line: lineno,
                        message: format!("'{s}' is not a number"),
                    })?,
                    None => 1.0,
                };
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::InvalidWeight { u, v, weight: w });
                }
                if u == v && !options.allow_loops && w > 0.0 {
                    return Err(Error::SelfLoop(u));
                }
                let key = (u.min(v), u.max(v));
                if let Some(&(prev, _)) = seen.get(&key) {
                    if prev != w {
                        return Err(Error::ConflictingEdge {
                            u: key.0,
                            v: key.1,
                            first: prev,
                            second: w,
                        });
                    }
                    continue;
                }
                seen.insert(key, (w, lineno));
                ids.entry(u).or_insert(0);
                ids.entry(v).or_insert(0);
                raw.push((u, v, w));
            }
            k => {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected 'u v [w]', found {k} fields"),
                })
            }
        }
    }
    if ids.is_empty() {
        return Err(Error::EmptyGraph);
    }
    for (i, slot) in ids.values_mut().enumerate() {
        *slot = i;
    }
    let labels: Vec<u64> = ids.keys().copied().collect();
    let edges: Vec<(usize, usize, f64)> = raw.iter().map(|&(u, v, w)| (ids[&u], ids[&v], w)).collect();
    let g = Graph::from_edges(labels.len(), &edges, options).map_err(|e| match e {
        Error::IsolatedVertex(v) => Error::IsolatedVertex(labels[v as usize]),
        other => other,
    })?;
    Ok(g.with_labels(labels))
}

#[derive(Deserialize)]
struct JsonGraph {
    n: usize,
    edges: Vec<Vec<f64>>,
}

pub fn parse_json(text: &str, options: GraphOptions) -> Result<Graph> {
    let parsed: JsonGraph = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    let mut edges = Vec::with_capacity(parsed.edges.len());
    for (i, e) in parsed.edges.iter().enumerate() {
        if !(e.len() == 2 || e.len() == 3) {
            return Err(Error::Parse {
                line: 0,
                message: format!("edge {i} must be [u, v] or [u, v, w]"),
            });
        }
        let id = |x: f64| -> Result<usize> {
            if x < 0.0 || x.fract() != 0.0 {
                return Err(Error::Parse {
                    line: 0,
                    message: format!("edge {i}: vertex id {x} is not a nonnegative integer"),
                });
            }
            Ok(x as usize)
        };
        edges.push((id(e[0])?, id(e[1])?, e.get(2).copied().unwrap_or(1.0)));
    }
    Graph::from_edges(parsed.n, &edges, options)
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Edge list using original ids.
pub fn to_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    for (u, v, w) in g.edges() {
        let _ = writeln!(out, "{} {} {}", g.original_id(u), g.original_id(v), format_float(w));
    }
    out
}

pub fn to_json(g: &Graph) -> String {
    let mut out = format!("{{\"n\": {}, \"edges\": [", g.n());
    for (i, (u, v, w)) in g.edges().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "[{u}, {v}, {}]", format_float(w));
    }
    out.push_str("]}\n");
    out
}

pub fn write_graph(g: &Graph, path: &Path, format: GraphFormat) -> Result<()> {
    let text = match format {
        GraphFormat::EdgeList => to_edge_list(g),
        GraphFormat::Json => to_json(g),
    };
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const OPTS: GraphOptions = GraphOptions { allow_loops: false };

    #[test]
    fn reads_path_and_weighted_edge() {
        let g = parse_edge_list("0 1\n1 2", OPTS).unwrap();
        assert_eq!(g.degrees(), &[1.0, 2.0, 1.0]);
        let k2 = parse_edge_list("0 1 2.5", OPTS).unwrap();
        assert_eq!(k2.weight(0, 1), 2.5);
        assert_eq!(k2.volume(), 5.0);
    }

    #[test]
    fn comments_blank_lines_and_densification() {
        let g = parse_edge_list("# header\n\n10 30 # trailing\n30 20\n", OPTS).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.original_id(2), 30);
        assert_eq!(g.degrees(), &[1.0, 1.0, 2.0]);
    }

    #[test]
    fn isolated_vertex_reports_original_id() {
        let err = parse_edge_list("0 1\n5\n", OPTS).unwrap_err();
        assert!(matches!(err, Error::IsolatedVertex(5)), "{err}");
        let err = parse_edge_list("0 1\n1 5 0\n", OPTS).unwrap_err();
        assert!(matches!(err, Error::IsolatedVertex(5)), "{err}");
    }

    #[test]
    fn malformed_line_carries_line_number() {
        match parse_edge_list("0 1\n1 x\n", OPTS) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_edge_list("0 1 -2", OPTS),
            Err(Error::InvalidWeight { .. })
        ));
        assert!(matches!(
            parse_edge_list("0 1 1\n1 0 2", OPTS),
            Err(Error::ConflictingEdge { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let g = parse_json(r#"{"n": 3, "edges": [[0, 1, 0.1], [1, 2]]}"#, OPTS).unwrap();
        let back = parse_json(&to_json(&g), OPTS).unwrap();
        assert_eq!(back, g);
        let el = parse_edge_list(&to_edge_list(&g), OPTS).unwrap();
        assert_eq!(el.adjacency_matrix(), g.adjacency_matrix());
    }

    #[test]
    fn floats_use_seventeen_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(2.5).parse::<f64>().unwrap(), 2.5);
    }
}
