//! Brute-force reference implementations used to check `dwrosn-core`.
//!
//! Everything here favors obviousness over speed and deliberately avoids the
//! algorithms used by the main crate: hop distances come from Floyd-Warshall
//! instead of BFS, shortest-path counts from adjacency-matrix powers or
//! exhaustive path enumeration instead of layered counting, and importance
//! scores from full recomputation with each candidate edge added.

use dwrosn_core::topology::{NodeSet, PotentialLinkMatrix, TopologySnapshot};
use dwrosn_core::SatelliteId;
use rand::Rng;

/// All-pairs hop counts by Floyd-Warshall; unreachable pairs get sentinel `n`.
pub fn floyd_warshall_hops(n: usize, edges: &[(usize, usize)]) -> Vec<u32> {
    const INF: u32 = u32::MAX / 4;
    let mut dist = vec![INF; n * n];
    for i in 0..n {
        dist[i * n + i] = 0;
    }
    for &(i, j) in edges {
        dist[i * n + j] = 1;
        dist[j * n + i] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            let dik = dist[i * n + k];
            if dik == INF {
                continue;
            }
            for j in 0..n {
                let cand = dik + dist[k * n + j];
                if cand < dist[i * n + j] {
                    dist[i * n + j] = cand;
                }
            }
        }
    }
    dist.iter().map(|&d| if d >= INF { n as u32 } else { d }).collect()
}

/// All-pairs shortest-path counts via adjacency-matrix powers.
///
/// A walk whose length equals the pair distance cannot repeat a vertex, so
/// entry `(i, j)` of `A^dist(i,j)` counts exactly the shortest paths.
/// Diagonal entries are defined as 1; unreachable pairs give 0.
pub fn matrix_power_path_counts(n: usize, edges: &[(usize, usize)], hops: &[u32]) -> Vec<u64> {
    let sentinel = n as u32;
    let mut adj = vec![0u64; n * n];
    for &(i, j) in edges {
        adj[i * n + j] = 1;
        adj[j * n + i] = 1;
    }
    // powers[d] = A^d
    let mut powers: Vec<Vec<u64>> = Vec::new();
    let mut ident = vec![0u64; n * n];
    for i in 0..n {
        ident[i * n + i] = 1;
    }
    powers.push(ident);
    let max_dist = hops.iter().filter(|&&h| h < sentinel).max().copied().unwrap_or(0);
    for _ in 0..max_dist {
        let prev = powers.last().unwrap();
        let mut next = vec![0u64; n * n];
        for i in 0..n {
            for k in 0..n {
                let p = prev[i * n + k];
                if p == 0 {
                    continue;
                }
                for j in 0..n {
                    next[i * n + j] += p * adj[k * n + j];
                }
            }
        }
        powers.push(next);
    }

    let mut counts = vec![0u64; n * n];
    for i in 0..n {
        for j in 0..n {
            let h = hops[i * n + j];
            counts[i * n + j] = if i == j {
                1
            } else if h >= sentinel {
                0
            } else {
                powers[h as usize][i * n + j]
            };
        }
    }
    counts
}

/// Every simple path from `s` to `d` with at most `max_hops` edges, by DFS.
pub fn all_simple_paths(
    n: usize,
    edges: &[(usize, usize)],
    s: usize,
    d: usize,
    max_hops: usize,
) -> Vec<Vec<usize>> {
    let adj = adjacency(n, edges);
    let mut found = Vec::new();
    let mut visited = vec![false; n];
    let mut path = vec![s];
    visited[s] = true;
    dfs(&adj, d, max_hops, &mut visited, &mut path, &mut found);
    found
}

fn dfs(
    adj: &[Vec<usize>],
    d: usize,
    max_hops: usize,
    visited: &mut [bool],
    path: &mut Vec<usize>,
    found: &mut Vec<Vec<usize>>,
) {
    let u = *path.last().unwrap();
    if u == d {
        found.push(path.clone());
        return;
    }
    if path.len() > max_hops {
        return;
    }
    for &v in &adj[u] {
        if !visited[v] {
            visited[v] = true;
            path.push(v);
            dfs(adj, d, max_hops, visited, path, found);
            path.pop();
            visited[v] = false;
        }
    }
}

/// Shortest-path count for one pair by filtering the exhaustive enumeration.
pub fn enumerated_shortest_count(n: usize, edges: &[(usize, usize)], s: usize, d: usize) -> u64 {
    if s == d {
        return 1;
    }
    let paths = all_simple_paths(n, edges, s, d, n.saturating_sub(1));
    let min = paths.iter().map(|p| p.len()).min();
    match min {
        None => 0,
        Some(m) => paths.iter().filter(|p| p.len() == m).count() as u64,
    }
}

/// Candidate paths for one pair exactly as the routing contract defines
/// them: simple paths within `max_hops`, sorted by hop count, then by total
/// delay (left-fold over `delay(u, v)`), then by node sequence, truncated to
/// `k_cap`.
pub fn enumerated_candidate_paths(
    n: usize,
    edges: &[(usize, usize)],
    s: usize,
    d: usize,
    max_hops: usize,
    k_cap: usize,
    delay: impl Fn(usize, usize) -> f64,
) -> Vec<(Vec<usize>, f64)> {
    let mut paths: Vec<(Vec<usize>, f64)> = all_simple_paths(n, edges, s, d, max_hops)
        .into_iter()
        .map(|p| {
            let mut total = 0.0;
            for w in p.windows(2) {
                total += delay(w[0], w[1]);
            }
            (p, total)
        })
        .collect();
    paths.sort_by(|(pa, da), (pb, db)| {
        (pa.len(), da, pa).partial_cmp(&(pb.len(), db, pb)).unwrap()
    });
    paths.truncate(k_cap);
    paths
}

/// Importance scores recomputed from scratch: for every feasible potential
/// edge, rebuild the hop and path-count matrices with the edge added and
/// accumulate per-ordered-pair hop decreases (into `a`) and same-distance
/// path gains (into `b`).
pub fn brute_importance(
    snapshot: &TopologySnapshot,
    nodes: &NodeSet,
    l: &PotentialLinkMatrix,
) -> (Vec<u64>, Vec<u64>) {
    let n = snapshot.n();
    let edges: Vec<(usize, usize)> = snapshot.edges().collect();
    let h0 = floyd_warshall_hops(n, &edges);
    let k0 = matrix_power_path_counts(n, &edges, &h0);

    let mut a = vec![0u64; n * n];
    let mut b = vec![0u64; n * n];
    for i in 0..n {
        for j in i + 1..n {
            if !l.get(i, j)
                || snapshot.used_terminals(i) >= nodes.degree(i)
                || snapshot.used_terminals(j) >= nodes.degree(j)
            {
                continue;
            }
            let mut with_edge = edges.clone();
            with_edge.push((i, j));
            let h1 = floyd_warshall_hops(n, &with_edge);
            let k1 = matrix_power_path_counts(n, &with_edge, &h1);
            let mut hop_gain = 0u64;
            let mut path_gain = 0u64;
            for s in 0..n {
                for t in 0..n {
                    if s == t {
                        continue;
                    }
                    let before = h0[s * n + t];
                    let after = h1[s * n + t];
                    if after < before {
                        hop_gain += u64::from(before - after);
                    } else {
                        path_gain += k1[s * n + t] - k0[s * n + t];
                    }
                }
            }
            a[i * n + j] = hop_gain;
            a[j * n + i] = hop_gain;
            b[i * n + j] = path_gain;
            b[j * n + i] = path_gain;
        }
    }
    (a, b)
}

/// Position on a circular orbit built from explicit rotation matrices:
/// in-plane point rotated by inclination about x, then right ascension
/// about z.
pub fn rotated_circular_position(
    radius: f64,
    incl_rad: f64,
    raan_rad: f64,
    phase_rad: f64,
) -> (f64, f64, f64) {
    let (x1, y1, z1) = (radius * phase_rad.cos(), radius * phase_rad.sin(), 0.0);
    let (x2, y2, z2) = (
        x1,
        y1 * incl_rad.cos() - z1 * incl_rad.sin(),
        y1 * incl_rad.sin() + z1 * incl_rad.cos(),
    );
    (
        x2 * raan_rad.cos() - y2 * raan_rad.sin(),
        x2 * raan_rad.sin() + y2 * raan_rad.cos(),
        z2,
    )
}

/// Neighbor lists in ascending order.
pub fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(i, j) in edges {
        adj[i].push(j);
        adj[j].push(i);
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    adj
}

/// Random undirected graph: each pair becomes an edge with probability `p`.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// Node set with fabricated satellite identities and random budgets in
/// `1..=max_degree`.
pub fn synthetic_nodes(rng: &mut impl Rng, n: usize, max_degree: u32) -> NodeSet {
    let sats: Vec<SatelliteId> =
        (0..n).map(|i| SatelliteId { layer: 0, plane: 0, slot: i as u32 }).collect();
    let degrees: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=max_degree)).collect();
    NodeSet::new(sats, degrees).unwrap()
}

/// Random synthetic assignment instance: a potential matrix over `n` nodes
/// plus budgets, as consumed by the link assignment schemes.
pub fn random_instance(
    rng: &mut impl Rng,
    n: usize,
    p: f64,
    max_degree: u32,
) -> (PotentialLinkMatrix, NodeSet) {
    let edges = random_graph(rng, n, p);
    let matrix = PotentialLinkMatrix::from_pairs(n, &edges, 0.0, 2000.0).unwrap();
    (matrix, synthetic_nodes(rng, n, max_degree))
}

/// Snapshot built from an explicit edge list.
pub fn snapshot_from_edges(n: usize, edges: &[(usize, usize)]) -> TopologySnapshot {
    let mut snap = TopologySnapshot::new(n, 0.0, 2000.0);
    for &(i, j) in edges {
        snap.add_edge(i, j).unwrap();
    }
    snap
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floyd_warshall_on_a_path() {
        let hops = floyd_warshall_hops(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(hops[0 * 4 + 3], 3);
        assert_eq!(hops[1 * 4 + 3], 2);
        let split = floyd_warshall_hops(4, &[(0, 1), (2, 3)]);
        assert_eq!(split[0 * 4 + 2], 4);
    }

    #[test]
    fn square_cycle_has_two_shortest_paths_across() {
        let edges = [(0, 1), (1, 2), (2, 3), (3, 0)];
        let hops = floyd_warshall_hops(4, &edges);
        let counts = matrix_power_path_counts(4, &edges, &hops);
        assert_eq!(counts[0 * 4 + 2], 2);
        assert_eq!(counts[0 * 4 + 1], 1);
        assert_eq!(enumerated_shortest_count(4, &edges, 0, 2), 2);
    }

    #[test]
    fn simple_path_enumeration_respects_hop_cap() {
        let edges = [(0, 1), (1, 2), (2, 3), (3, 0)];
        let within_one = all_simple_paths(4, &edges, 0, 2, 1);
        assert!(within_one.is_empty());
        let within_two = all_simple_paths(4, &edges, 0, 2, 2);
        assert_eq!(within_two.len(), 2);
        let all = all_simple_paths(4, &edges, 0, 2, 3);
        assert_eq!(all.len(), 2);
    }

    #[test]
    fn candidate_paths_sort_by_hops_then_delay() {
        // Triangle with a slow direct edge: the 1-hop path still sorts first.
        let edges = [(0, 1), (1, 2), (0, 2)];
        let delay = |u: usize, v: usize| if (u, v) == (0, 2) || (v, u) == (0, 2) { 9.0 } else { 1.0 };
        let paths = enumerated_candidate_paths(3, &edges, 0, 2, 4, 10, delay);
        assert_eq!(paths[0].0, vec![0, 2]);
        assert_eq!(paths[1].0, vec![0, 1, 2]);
    }

    #[test]
    fn rotation_oracle_keeps_radius() {
        let (x, y, z) = rotated_circular_position(7000.0, 0.9, 2.1, 4.3);
        let r = (x * x + y * y + z * z).sqrt();
        assert!((r - 7000.0).abs() < 1e-9);
    }
}
