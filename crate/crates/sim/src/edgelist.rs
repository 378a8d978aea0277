//! Plain-text edge lists for established topologies.
//!
//! A file holds one slot's links: a header `# t=<start> dt=<length>`
//! followed by one line per link, each endpoint written as
//! `LAYER:plane:index`, for example `LEO:3:7 GEO:0:1`. Endpoint order within
//! a line and line order both follow ascending flat node indices, so a
//! snapshot always serializes to the same bytes.

use std::collections::HashMap;
use std::fmt::Write as _;

use dwrosn_core::topology::TopologyError;
use dwrosn_core::{ConstellationSpec, NodeSet, SatelliteId, TopologySnapshot};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EdgeListError {
    #[error("missing `# t=<s> dt=<s>` header")]
    MissingHeader,
    #[error("line {line}: expected two endpoints")]
    BadLine { line: usize },
    #[error("line {line}: malformed endpoint `{endpoint}`")]
    BadEndpoint { line: usize, endpoint: String },
    #[error("line {line}: `{endpoint}` is not in the node set")]
    UnknownSatellite { line: usize, endpoint: String },
    #[error("line {line}: {source}")]
    Topology { line: usize, source: TopologyError },
}

/// `LAYER:plane:index` name of a satellite, e.g. `GEO:0:2`.
pub fn sat_label(spec: &ConstellationSpec, sat: SatelliteId) -> String {
    format!("{}:{}:{}", spec.layers[sat.layer].kind.label(), sat.plane, sat.slot)
}

/// Renders a snapshot as edge-list text.
pub fn write_edge_list(
    spec: &ConstellationSpec,
    nodes: &NodeSet,
    snapshot: &TopologySnapshot,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# t={} dt={}", snapshot.slot_start_s(), snapshot.slot_len_s());
    for (i, j) in snapshot.edges() {
        let _ = writeln!(
            out,
            "{} {}",
            sat_label(spec, nodes.sat(i)),
            sat_label(spec, nodes.sat(j))
        );
    }
    out
}

/// Parses edge-list text back into a snapshot over `nodes`.
pub fn parse_edge_list(
    text: &str,
    spec: &ConstellationSpec,
    nodes: &NodeSet,
) -> Result<TopologySnapshot, EdgeListError> {
    let mut lines = text.lines().enumerate();
    let (t_s, dt_s) = loop {
        let (_, raw) = lines.next().ok_or(EdgeListError::MissingHeader)?;
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        break parse_header(raw).ok_or(EdgeListError::MissingHeader)?;
    };

    let index: HashMap<String, usize> = (0..nodes.len())
        .map(|i| (sat_label(spec, nodes.sat(i)), i))
        .collect();

    let mut snapshot = TopologySnapshot::new(nodes.len(), t_s, dt_s);
    for (idx, raw) in lines {
        let line = idx + 1;
        let raw = raw.trim();
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let mut parts = raw.split_whitespace();
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(EdgeListError::BadLine { line });
        };
        let resolve = |endpoint: &str| {
            if endpoint.splitn(3, ':').count() != 3 {
                return Err(EdgeListError::BadEndpoint { line, endpoint: endpoint.into() });
            }
            index
                .get(endpoint)
                .copied()
                .ok_or_else(|| EdgeListError::UnknownSatellite { line, endpoint: endpoint.into() })
        };
        let (i, j) = (resolve(a)?, resolve(b)?);
        snapshot
            .add_edge(i, j)
            .map_err(|source| EdgeListError::Topology { line, source })?;
    }
    Ok(snapshot)
}

fn parse_header(line: &str) -> Option<(f64, f64)> {
    let rest = line.strip_prefix('#')?.trim();
    let mut t = None;
    let mut dt = None;
    for field in rest.split_whitespace() {
        if let Some(v) = field.strip_prefix("t=") {
            t = v.parse().ok();
        } else if let Some(v) = field.strip_prefix("dt=") {
            dt = v.parse().ok();
        }
    }
    Some((t?, dt?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> (ConstellationSpec, NodeSet) {
        let spec = ConstellationSpec::reference();
        let nodes = NodeSet::by_layer(&spec, &[5, 6]).unwrap();
        (spec, nodes)
    }

    #[test]
    fn labels_follow_layer_plane_index() {
        let (spec, nodes) = fixture();
        assert_eq!(sat_label(&spec, nodes.sat(0)), "LEO:0:0");
        assert_eq!(sat_label(&spec, nodes.sat(13)), "LEO:1:1");
        assert_eq!(sat_label(&spec, nodes.sat(122)), "GEO:0:2");
    }

    #[test]
    fn round_trips_a_snapshot() {
        let (spec, nodes) = fixture();
        let mut snap = TopologySnapshot::new(nodes.len(), 2000.0, 2000.0);
        snap.add_edge(0, 1).unwrap();
        snap.add_edge(0, 120).unwrap();
        snap.add_edge(119, 122).unwrap();
        let text = write_edge_list(&spec, &nodes, &snap);
        assert!(text.starts_with("# t=2000 dt=2000\n"));
        assert!(text.contains("LEO:0:0 GEO:0:0"));
        let back = parse_edge_list(&text, &spec, &nodes).unwrap();
        assert_eq!(back, snap);
    }

    #[test]
    fn serialization_is_stable() {
        let (spec, nodes) = fixture();
        let mut snap = TopologySnapshot::new(nodes.len(), 0.0, 2000.0);
        snap.add_edge(5, 2).unwrap();
        snap.add_edge(1, 2).unwrap();
        let a = write_edge_list(&spec, &nodes, &snap);
        let b = write_edge_list(&spec, &nodes, &snap);
        assert_eq!(a, b);
        // Ascending flat order regardless of insertion order.
        let lines: Vec<&str> = a.lines().collect();
        assert_eq!(lines[1], "LEO:0:1 LEO:0:2");
        assert_eq!(lines[2], "LEO:0:2 LEO:0:5");
    }

    #[test]
    fn malformed_input_is_rejected() {
        let (spec, nodes) = fixture();
        assert!(matches!(
            parse_edge_list("LEO:0:0 LEO:0:1\n", &spec, &nodes),
            Err(EdgeListError::MissingHeader)
        ));
        let text = "# t=0 dt=2000\nLEO:0:0\n";
        assert!(matches!(parse_edge_list(text, &spec, &nodes), Err(EdgeListError::BadLine { line: 2 })));
        let text = "# t=0 dt=2000\nLEO:0:0 MEO:0:1\n";
        assert!(matches!(
            parse_edge_list(text, &spec, &nodes),
            Err(EdgeListError::UnknownSatellite { line: 2, .. })
        ));
        let text = "# t=0 dt=2000\nLEO:0:0 LEO:0:1\nLEO:0:1 LEO:0:0\n";
        assert!(matches!(
            parse_edge_list(text, &spec, &nodes),
            Err(EdgeListError::Topology { line: 3, .. })
        ));
    }
}
