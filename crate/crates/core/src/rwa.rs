//! Routing and wavelength assignment over an established topology.
//!
//! Every ordered node pair requests one lightpath. Candidate routes are
//! k-shortest loopless paths ordered by hop count, then total delay, then
//! node sequence; channels are picked first-fit, scanning candidate paths in
//! order and wavelengths within each path. When no (path, wavelength) pair is
//! admissible the pool grows by one wavelength and the request takes the best
//! path on the fresh channel, so a request only goes unserved when it has no
//! candidate path at all.

use alloc::collections::{BTreeSet, BinaryHeap, VecDeque};
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::las;
use crate::matrix::SquareMatrix;
use crate::metrics;
use crate::orbital::{self, ConstellationSpec, OrbitalError};
use crate::topology::{NodeSet, TopologySnapshot};

/// Propagation speed used to turn inter-satellite distance into delay.
pub const SPEED_OF_LIGHT_KM_S: f64 = 299_792.458;

/// Per-hop switching delay in milliseconds.
pub const DEFAULT_PROCESSING_DELAY_MS: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RwaError {
    /// Node set and snapshot disagree on the node count.
    DimensionMismatch,
    /// Source equals target or lies outside the node range.
    BadRequest,
    /// A path is shorter than one edge or uses an edge missing from the
    /// snapshot.
    BadPath,
    /// The requested channel is already occupied on some edge of the path.
    ChannelBusy,
    /// A parameter is out of range, e.g. a zero candidate cap.
    BadParameters,
    Orbital(OrbitalError),
}

impl fmt::Display for RwaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RwaError::DimensionMismatch => f.write_str("node set and snapshot sizes differ"),
            RwaError::BadRequest => f.write_str("request endpoints are invalid"),
            RwaError::BadPath => f.write_str("path is empty or leaves the established edges"),
            RwaError::ChannelBusy => f.write_str("channel is already occupied on the path"),
            RwaError::BadParameters => f.write_str("parameter out of range"),
            RwaError::Orbital(e) => e.fmt(f),
        }
    }
}

impl From<OrbitalError> for RwaError {
    fn from(e: OrbitalError) -> Self {
        RwaError::Orbital(e)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for RwaError {}

/// One lightpath demand between a pair of nodes, `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TrafficRequest {
    pub a: usize,
    pub b: usize,
}

/// A loopless route with its cost at the evaluation instant.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidatePath {
    pub nodes: Vec<usize>,
    pub hops: u32,
    /// Propagation plus per-hop processing delay in milliseconds.
    pub delay_ms: f64,
}

/// A served request: the chosen route and channel.
#[derive(Clone, Debug, PartialEq)]
pub struct RouteAssignment {
    pub request: TrafficRequest,
    pub path: Vec<usize>,
    /// 1-based wavelength index.
    pub wavelength: usize,
    pub hops: u32,
    pub propagation_delay_ms: f64,
    pub processing_delay_ms: f64,
}

impl RouteAssignment {
    pub fn total_delay_ms(&self) -> f64 {
        self.propagation_delay_ms + self.processing_delay_ms
    }
}

/// Outcome of assigning the full request mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct RwaResult {
    pub assignments: Vec<RouteAssignment>,
    pub unserved: Vec<TrafficRequest>,
    /// Final wavelength pool size.
    pub n_lambda: usize,
    /// Fraction of ordered pairs connected within the run's hop bound.
    pub beta: f64,
    pub max_hops: u32,
    pub eval_time_s: f64,
}

/// Per-edge channel occupancy. Wavelength indices are 1-based and the pool
/// starts with a single wavelength.
#[derive(Clone, Debug)]
pub struct WavelengthState {
    edge_ids: SquareMatrix<u32>,
    edge_count: usize,
    occupancy: Vec<Vec<bool>>,
}

const NO_EDGE: u32 = u32::MAX;

impl WavelengthState {
    pub fn new(snapshot: &TopologySnapshot) -> Self {
        let n = snapshot.n();
        let mut edge_ids = SquareMatrix::filled(n, NO_EDGE);
        let mut edge_count = 0usize;
        for (i, j) in snapshot.edges() {
            edge_ids.set_sym(i, j, edge_count as u32);
            edge_count += 1;
        }
        WavelengthState { edge_ids, edge_count, occupancy: alloc::vec![alloc::vec![false; edge_count]] }
    }

    pub fn n_lambda(&self) -> usize {
        self.occupancy.len()
    }

    /// Appends a fresh wavelength and returns its 1-based index.
    pub fn add_wavelength(&mut self) -> usize {
        self.occupancy.push(alloc::vec![false; self.edge_count]);
        self.occupancy.len()
    }

    fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        if u >= self.edge_ids.n() || v >= self.edge_ids.n() || u == v {
            return None;
        }
        let id = self.edge_ids.get(u, v);
        (id != NO_EDGE).then_some(id as usize)
    }

    /// True when `lambda` is unoccupied on every edge of the path. Unknown
    /// edges and out-of-range wavelengths are never free.
    pub fn is_free(&self, path: &[usize], lambda: usize) -> bool {
        if lambda == 0 || lambda > self.occupancy.len() || path.len() < 2 {
            return false;
        }
        let row = &self.occupancy[lambda - 1];
        path.windows(2).all(|w| match self.edge_id(w[0], w[1]) {
            Some(id) => !row[id],
            None => false,
        })
    }

    /// Marks `lambda` busy on every edge of the path. The state is unchanged
    /// on error.
    pub fn occupy(&mut self, path: &[usize], lambda: usize) -> Result<(), RwaError> {
        if lambda == 0 || lambda > self.occupancy.len() {
            return Err(RwaError::BadParameters);
        }
        if path.len() < 2 {
            return Err(RwaError::BadPath);
        }
        let mut ids = Vec::with_capacity(path.len() - 1);
        for w in path.windows(2) {
            ids.push(self.edge_id(w[0], w[1]).ok_or(RwaError::BadPath)?);
        }
        let row = &mut self.occupancy[lambda - 1];
        if ids.iter().any(|&id| row[id]) {
            return Err(RwaError::ChannelBusy);
        }
        for id in ids {
            row[id] = true;
        }
        Ok(())
    }

    /// Number of occupied channels on one edge.
    pub fn edge_load(&self, u: usize, v: usize) -> usize {
        match self.edge_id(u, v) {
            Some(id) => self.occupancy.iter().filter(|row| row[id]).count(),
            None => 0,
        }
    }
}

/// Total order over f64 via `total_cmp`; delays are finite sums of finite
/// weights, so the exotic orderings never surface.
#[derive(Clone, Copy, Debug, PartialEq)]
struct TotalF64(f64);

impl Eq for TotalF64 {}

impl PartialOrd for TotalF64 {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TotalF64 {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Candidate ordering key: hop count, then delay, then node sequence.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct CandidateKey {
    hops: u32,
    delay: TotalF64,
    nodes: Vec<u32>,
}

/// Symmetric per-edge delays at the evaluation instant.
struct EdgeDelays {
    prop_ms: SquareMatrix<f64>,
    per_hop_ms: f64,
}

impl EdgeDelays {
    fn build(
        spec: &ConstellationSpec,
        nodes: &NodeSet,
        snapshot: &TopologySnapshot,
        eval_time_s: f64,
        per_hop_ms: f64,
    ) -> Result<Self, RwaError> {
        let n = snapshot.n();
        let mut positions = Vec::with_capacity(n);
        for i in 0..n {
            positions.push(orbital::position(spec, nodes.sat(i), eval_time_s)?);
        }
        let mut prop_ms = SquareMatrix::filled(n, f64::INFINITY);
        for (i, j) in snapshot.edges() {
            let ms = positions[i].distance_km(&positions[j]) / SPEED_OF_LIGHT_KM_S * 1e3;
            prop_ms.set_sym(i, j, ms);
        }
        Ok(EdgeDelays { prop_ms, per_hop_ms })
    }

    fn weight(&self, u: u32, v: u32) -> f64 {
        self.prop_ms.get(u as usize, v as usize) + self.per_hop_ms
    }

    fn fold(&self, nodes: &[u32]) -> TotalF64 {
        let mut total = 0.0;
        for w in nodes.windows(2) {
            total += self.weight(w[0], w[1]);
        }
        TotalF64(total)
    }
}

/// Shortest path by (hops, delay) from `source` to `target`, avoiding banned
/// nodes and banned first steps. The search starts from `(init_hops,
/// init_delay_ms)` and stops extending at `hop_budget` total hops, so a spur
/// search seeded with its root prefix cost compares candidates by their full
/// path cost, folded in exactly the emission order. Near-equal sums would
/// otherwise reorder between suffix-local and full-path folds.
#[allow(clippy::too_many_arguments)]
fn lex_dijkstra(
    adj: &[Vec<u32>],
    delays: &EdgeDelays,
    source: u32,
    target: u32,
    hop_budget: u32,
    banned_node: &[bool],
    banned_second: &BTreeSet<u32>,
    init_hops: u32,
    init_delay_ms: f64,
) -> Option<Vec<u32>> {
    let n = adj.len();
    let mut best: Vec<Option<(u32, TotalF64)>> = alloc::vec![None; n];
    let mut pred: Vec<u32> = alloc::vec![NO_EDGE; n];
    let mut heap = BinaryHeap::new();
    best[source as usize] = Some((init_hops, TotalF64(init_delay_ms)));
    heap.push(Reverse((init_hops, TotalF64(init_delay_ms), source)));
    while let Some(Reverse((hops, delay, u))) = heap.pop() {
        if best[u as usize] != Some((hops, delay)) {
            continue;
        }
        if u == target {
            break;
        }
        if hops >= hop_budget {
            continue;
        }
        for &v in &adj[u as usize] {
            if banned_node[v as usize] || (hops == init_hops && banned_second.contains(&v)) {
                continue;
            }
            let next = (hops + 1, TotalF64(delay.0 + delays.weight(u, v)));
            if best[v as usize].map_or(true, |cur| next < cur) {
                best[v as usize] = Some(next);
                pred[v as usize] = u;
                heap.push(Reverse((next.0, next.1, v)));
            }
        }
    }
    best[target as usize]?;
    let mut nodes = alloc::vec![target];
    let mut at = target;
    while at != source {
        at = pred[at as usize];
        nodes.push(at);
    }
    nodes.reverse();
    Some(nodes)
}

/// Lazy loopless k-shortest-path enumeration in (hops, delay, node sequence)
/// order. Deviations of the last discovered path are folded into a candidate
/// set, so pulling one more path costs at most one spur search per node of
/// the previous path.
///
/// Discovery order only respects (hops, delay): a path can surface one step
/// after an exactly tied sibling when it is a deviation of that sibling. The
/// iterator therefore drains each exact tie class completely and reorders it
/// by node sequence before emitting.
struct KShortest<'a> {
    adj: &'a [Vec<u32>],
    delays: &'a EdgeDelays,
    source: u32,
    target: u32,
    max_hops: u32,
    yielded: Vec<CandidateKey>,
    seen: BTreeSet<CandidateKey>,
    candidates: BTreeSet<CandidateKey>,
    ready: VecDeque<CandidateKey>,
    primed: bool,
    deviations_done: bool,
    exhausted: bool,
}

impl<'a> KShortest<'a> {
    fn new(
        adj: &'a [Vec<u32>],
        delays: &'a EdgeDelays,
        source: u32,
        target: u32,
        max_hops: u32,
    ) -> Self {
        KShortest {
            adj,
            delays,
            source,
            target,
            max_hops,
            yielded: Vec::new(),
            seen: BTreeSet::new(),
            candidates: BTreeSet::new(),
            ready: VecDeque::new(),
            primed: false,
            deviations_done: false,
            exhausted: false,
        }
    }

    fn accept(&mut self, key: CandidateKey) -> CandidateKey {
        self.seen.insert(key.clone());
        self.yielded.push(key.clone());
        self.deviations_done = false;
        key
    }

    /// Registers every spur deviation of the most recently accepted path in
    /// the candidate set, once per path.
    fn register_deviations(&mut self) {
        if self.deviations_done {
            return;
        }
        self.deviations_done = true;
        let prev = self.yielded.last().expect("primed iterator has a path").nodes.clone();
        for spur_idx in 0..prev.len() - 1 {
            let root = &prev[..=spur_idx];
            let spur = prev[spur_idx];
            let banned_second: BTreeSet<u32> = self
                .yielded
                .iter()
                .filter(|p| p.nodes.len() > spur_idx + 1 && p.nodes[..=spur_idx] == *root)
                .map(|p| p.nodes[spur_idx + 1])
                .collect();
            let mut banned_node = alloc::vec![false; self.adj.len()];
            for &r in &root[..spur_idx] {
                banned_node[r as usize] = true;
            }
            // Seeding with the root cost keeps the spur search's fold order
            // identical to the full-path fold, so ulp-close alternatives
            // cannot swap between discovery and emission.
            let root_delay = self.delays.fold(root);
            if let Some(spur_nodes) = lex_dijkstra(
                self.adj,
                self.delays,
                spur,
                self.target,
                self.max_hops,
                &banned_node,
                &banned_second,
                spur_idx as u32,
                root_delay.0,
            ) {
                let mut nodes = root[..spur_idx].to_vec();
                nodes.extend_from_slice(&spur_nodes);
                let key = CandidateKey {
                    hops: (nodes.len() - 1) as u32,
                    delay: self.delays.fold(&nodes),
                    nodes,
                };
                if !self.seen.contains(&key) {
                    self.candidates.insert(key);
                }
            }
        }
    }

    /// Classic deviation step: surfaces the cheapest path not yet accepted.
    fn advance(&mut self) -> Option<CandidateKey> {
        if self.exhausted {
            return None;
        }
        if !self.primed {
            self.primed = true;
            let banned = alloc::vec![false; self.adj.len()];
            match lex_dijkstra(
                self.adj,
                self.delays,
                self.source,
                self.target,
                self.max_hops,
                &banned,
                &BTreeSet::new(),
                0,
                0.0,
            ) {
                Some(nodes) => {
                    let key = CandidateKey {
                        hops: (nodes.len() - 1) as u32,
                        delay: self.delays.fold(&nodes),
                        nodes,
                    };
                    return Some(self.accept(key));
                }
                None => {
                    self.exhausted = true;
                    return None;
                }
            }
        }
        self.register_deviations();
        match self.candidates.pop_first() {
            Some(key) => Some(self.accept(key)),
            None => {
                self.exhausted = true;
                None
            }
        }
    }

    fn next_path(&mut self) -> Option<CandidateKey> {
        if let Some(key) = self.ready.pop_front() {
            return Some(key);
        }
        let first = self.advance()?;
        let mut class = alloc::vec![first];
        // An exactly tied sibling can be a deviation of a class member, so
        // register the newest member's deviations before testing whether the
        // class is complete.
        loop {
            self.register_deviations();
            let tied = match self.candidates.first() {
                Some(c) => c.hops == class[0].hops && c.delay == class[0].delay,
                None => false,
            };
            if !tied {
                break;
            }
            let key = self.candidates.pop_first().expect("tie check saw a candidate");
            let key = self.accept(key);
            class.push(key);
        }
        class.sort();
        self.ready.extend(class);
        self.ready.pop_front()
    }
}

fn to_candidate(key: CandidateKey) -> CandidatePath {
    CandidatePath {
        nodes: key.nodes.iter().map(|&v| v as usize).collect(),
        hops: key.hops,
        delay_ms: key.delay.0,
    }
}

/// Up to `k_cap` candidate routes between two nodes, in assignment order.
pub fn enumerate_candidate_paths(
    spec: &ConstellationSpec,
    nodes: &NodeSet,
    snapshot: &TopologySnapshot,
    source: usize,
    target: usize,
    max_hops: u32,
    k_cap: usize,
    eval_time_s: f64,
) -> Result<Vec<CandidatePath>, RwaError> {
    let n = snapshot.n();
    if nodes.len() != n {
        return Err(RwaError::DimensionMismatch);
    }
    if source >= n || target >= n || source == target {
        return Err(RwaError::BadRequest);
    }
    if k_cap == 0 {
        return Err(RwaError::BadParameters);
    }
    let delays = EdgeDelays::build(spec, nodes, snapshot, eval_time_s, DEFAULT_PROCESSING_DELAY_MS)?;
    let adj = snapshot.adjacency();
    let mut iter = KShortest::new(&adj, &delays, source as u32, target as u32, max_hops);
    let mut paths = Vec::new();
    while paths.len() < k_cap {
        match iter.next_path() {
            Some(key) => paths.push(to_candidate(key)),
            None => break,
        }
    }
    Ok(paths)
}

/// First admissible (path, wavelength) pair, scanning paths in candidate
/// order and wavelengths in ascending order within each path. Returns the
/// path index and the 1-based wavelength.
pub fn first_fit(paths: &[CandidatePath], state: &WavelengthState) -> Option<(usize, usize)> {
    for (idx, path) in paths.iter().enumerate() {
        for lambda in 1..=state.n_lambda() {
            if state.is_free(&path.nodes, lambda) {
                return Some((idx, lambda));
            }
        }
    }
    None
}

/// Total delay of a route at the evaluation instant: per-edge propagation
/// plus a fixed per-hop processing charge, folded edge by edge.
pub fn path_delay(
    spec: &ConstellationSpec,
    nodes: &NodeSet,
    path: &[usize],
    eval_time_s: f64,
    per_hop_ms: f64,
) -> Result<f64, RwaError> {
    if path.len() < 2 || path.iter().any(|&v| v >= nodes.len()) {
        return Err(RwaError::BadPath);
    }
    let mut total = 0.0;
    for w in path.windows(2) {
        let a = orbital::position(spec, nodes.sat(w[0]), eval_time_s)?;
        let b = orbital::position(spec, nodes.sat(w[1]), eval_time_s)?;
        total += a.distance_km(&b) / SPEED_OF_LIGHT_KM_S * 1e3 + per_hop_ms;
    }
    Ok(total)
}

fn propagation_ms(delays: &EdgeDelays, nodes: &[usize]) -> f64 {
    let mut total = 0.0;
    for w in nodes.windows(2) {
        total += delays.prop_ms.get(w[0], w[1]);
    }
    total
}

/// Serves one lightpath request per node pair, in an order shuffled by `rng`.
///
/// Requests take the first free (path, wavelength) pair; when every channel
/// of every candidate is busy the pool grows by one wavelength and the best
/// path is assigned on it. `max_hops` bounds candidate length (`u32::MAX`
/// leaves it unbounded) and `k_cap` bounds the candidate count per request.
pub fn rwa_run<R: Rng>(
    spec: &ConstellationSpec,
    nodes: &NodeSet,
    snapshot: &TopologySnapshot,
    max_hops: u32,
    k_cap: usize,
    eval_time_s: f64,
    rng: &mut R,
) -> Result<RwaResult, RwaError> {
    let n = snapshot.n();
    if nodes.len() != n {
        return Err(RwaError::DimensionMismatch);
    }
    if k_cap == 0 {
        return Err(RwaError::BadParameters);
    }
    let delays = EdgeDelays::build(spec, nodes, snapshot, eval_time_s, DEFAULT_PROCESSING_DELAY_MS)?;
    let adj = snapshot.adjacency();

    let mut requests = Vec::with_capacity(n.saturating_sub(1) * n / 2);
    for a in 0..n {
        for b in a + 1..n {
            requests.push(TrafficRequest { a, b });
        }
    }
    requests.shuffle(rng);

    let mut state = WavelengthState::new(snapshot);
    let mut assignments = Vec::new();
    let mut unserved = Vec::new();
    for req in requests {
        let mut iter = KShortest::new(&adj, &delays, req.a as u32, req.b as u32, max_hops);
        let mut cached: Vec<CandidatePath> = Vec::new();
        let mut hit = None;
        // Paths are pulled lazily; the state is fixed during the scan, so
        // checking each new path against all wavelengths reproduces a full
        // first-fit sweep over the capped candidate list.
        while cached.len() < k_cap {
            let Some(key) = iter.next_path() else { break };
            let path = to_candidate(key);
            let lambda = (1..=state.n_lambda()).find(|&l| state.is_free(&path.nodes, l));
            cached.push(path);
            if let Some(lambda) = lambda {
                hit = Some((cached.len() - 1, lambda));
                break;
            }
        }
        let (idx, lambda) = match hit {
            Some(pair) => pair,
            None => {
                if cached.is_empty() {
                    unserved.push(req);
                    continue;
                }
                (0, state.add_wavelength())
            }
        };
        let path = &cached[idx];
        state.occupy(&path.nodes, lambda)?;
        let propagation = propagation_ms(&delays, &path.nodes);
        assignments.push(RouteAssignment {
            request: req,
            path: path.nodes.clone(),
            wavelength: lambda,
            hops: path.hops,
            propagation_delay_ms: propagation,
            processing_delay_ms: f64::from(path.hops) * DEFAULT_PROCESSING_DELAY_MS,
        });
    }

    let beta = metrics::connectivity_from_hops(&las::hop_matrix(snapshot), max_hops);
    Ok(RwaResult {
        n_lambda: state.n_lambda(),
        assignments,
        unserved,
        beta,
        max_hops,
        eval_time_s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbital::{LayerKind, LayerSpec, SatelliteId};
    use crate::rng::StreamSeed;
    use approx::assert_relative_eq;

    /// Positions only feed delays here, so any real constellation works as a
    /// node supply for hand-built snapshots.
    fn fixture(n: usize) -> (ConstellationSpec, NodeSet) {
        let spec = ConstellationSpec::reference();
        let sats: Vec<SatelliteId> = (0..n).map(|i| spec.satellite(i).unwrap()).collect();
        let nodes = NodeSet::new(sats, alloc::vec![8; n]).unwrap();
        (spec, nodes)
    }

    fn snapshot(n: usize, edges: &[(usize, usize)]) -> TopologySnapshot {
        let mut s = TopologySnapshot::new(n, 0.0, 2000.0);
        for &(i, j) in edges {
            s.add_edge(i, j).unwrap();
        }
        s
    }

    #[test]
    fn star_requests_open_one_wavelength_each() {
        let (spec, nodes) = fixture(4);
        let snap = snapshot(4, &[(0, 1), (0, 2), (0, 3)]);
        let mut state = WavelengthState::new(&snap);
        let mut picks = Vec::new();
        for (a, b) in [(1, 2), (1, 3), (2, 3)] {
            let paths =
                enumerate_candidate_paths(&spec, &nodes, &snap, a, b, 8, 16, 0.0).unwrap();
            assert_eq!(paths.len(), 1);
            assert_eq!(paths[0].nodes, alloc::vec![a, 0, b]);
            let lambda = match first_fit(&paths, &state) {
                Some((0, lambda)) => lambda,
                Some(_) => unreachable!("only one candidate"),
                None => state.add_wavelength(),
            };
            state.occupy(&paths[0].nodes, lambda).unwrap();
            picks.push(lambda);
        }
        assert_eq!(picks, alloc::vec![1, 2, 3]);
        assert_eq!(state.n_lambda(), 3);
        // Each spoke carries two of the three leaf pairs, one channel apiece.
        for leaf in 1..4 {
            assert_eq!(state.edge_load(0, leaf), 2);
        }
    }

    #[test]
    fn first_fit_prefers_earlier_paths_over_earlier_wavelengths() {
        let (spec, nodes) = fixture(4);
        let snap = snapshot(4, &[(0, 1), (1, 2), (0, 3), (3, 2)]);
        let paths = enumerate_candidate_paths(&spec, &nodes, &snap, 0, 2, 8, 16, 0.0).unwrap();
        assert_eq!(paths.len(), 2);
        let mut state = WavelengthState::new(&snap);
        state.add_wavelength();
        state.occupy(&[paths[0].nodes[0], paths[0].nodes[1]], 1).unwrap();
        let (idx, lambda) = first_fit(&paths, &state).unwrap();
        assert_eq!(idx, 0, "a later wavelength on the best path wins");
        assert_eq!(lambda, 2);
    }

    #[test]
    fn candidates_come_out_sorted_and_bounded() {
        let (spec, nodes) = fixture(3);
        let snap = snapshot(3, &[(0, 1), (1, 2), (0, 2)]);
        let paths = enumerate_candidate_paths(&spec, &nodes, &snap, 0, 1, 8, 16, 0.0).unwrap();
        assert_eq!(paths.len(), 2);
        assert_eq!(paths[0].nodes, alloc::vec![0, 1]);
        assert_eq!(paths[0].hops, 1);
        assert_eq!(paths[1].nodes, alloc::vec![0, 2, 1]);
        assert_eq!(paths[1].hops, 2);
        assert!(paths[0].delay_ms < paths[1].delay_ms);

        let direct_only =
            enumerate_candidate_paths(&spec, &nodes, &snap, 0, 1, 1, 16, 0.0).unwrap();
        assert_eq!(direct_only.len(), 1);
        let capped = enumerate_candidate_paths(&spec, &nodes, &snap, 0, 1, 8, 1, 0.0).unwrap();
        assert_eq!(capped, paths[..1]);
    }

    #[test]
    fn hop_bound_can_empty_the_candidate_set() {
        let (spec, nodes) = fixture(3);
        let snap = snapshot(3, &[(0, 1), (1, 2)]);
        let paths = enumerate_candidate_paths(&spec, &nodes, &snap, 0, 2, 1, 16, 0.0).unwrap();
        assert!(paths.is_empty());
    }

    #[test]
    fn enumerated_delay_matches_path_delay() {
        let (spec, nodes) = fixture(5);
        let snap = snapshot(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)]);
        for target in 1..5 {
            let paths =
                enumerate_candidate_paths(&spec, &nodes, &snap, 0, target, 8, 64, 500.0).unwrap();
            assert!(!paths.is_empty());
            for p in &paths {
                let folded =
                    path_delay(&spec, &nodes, &p.nodes, 500.0, DEFAULT_PROCESSING_DELAY_MS)
                        .unwrap();
                assert_eq!(folded, p.delay_ms, "same fold, same value");
            }
        }
    }

    #[test]
    fn occupancy_is_validated_before_commit() {
        let snap = snapshot(3, &[(0, 1), (1, 2)]);
        let mut state = WavelengthState::new(&snap);
        assert!(state.is_free(&[0, 1, 2], 1));
        state.occupy(&[0, 1], 1).unwrap();
        assert!(!state.is_free(&[0, 1, 2], 1));
        assert!(state.is_free(&[1, 2], 1));
        assert_eq!(state.occupy(&[0, 1, 2], 1), Err(RwaError::ChannelBusy));
        assert!(state.is_free(&[1, 2], 1), "failed occupy must not leak");
        assert_eq!(state.occupy(&[0, 2], 1), Err(RwaError::BadPath));
        assert_eq!(state.occupy(&[0, 1], 2), Err(RwaError::BadParameters));
        assert!(!state.is_free(&[0, 1], 0));
    }

    #[test]
    fn single_edge_mesh_needs_one_wavelength() {
        let (spec, nodes) = fixture(2);
        let snap = snapshot(2, &[(0, 1)]);
        let mut rng = StreamSeed::new(7).rng();
        let result = rwa_run(&spec, &nodes, &snap, 8, 16, 0.0, &mut rng).unwrap();
        assert_eq!(result.n_lambda, 1);
        assert_eq!(result.assignments.len(), 1);
        assert_eq!(result.assignments[0].wavelength, 1);
        assert!(result.unserved.is_empty());
        assert_eq!(result.beta, 1.0);
    }

    #[test]
    fn antipodal_pair_delay_is_one_hundred_ten_ms() {
        let radius_km = SPEED_OF_LIGHT_KM_S / 2.0 * 0.1;
        let spec = ConstellationSpec {
            layers: alloc::vec![LayerSpec {
                kind: LayerKind::Leo,
                total_sats: 2,
                planes: 1,
                phase_factor: 0,
                altitude_km: radius_km - 6378.137,
                inclination_deg: 0.0,
                period_s: 7200.0,
            }],
            earth_radius_km: 6378.137,
            clearance_km: 100.0,
        };
        let sats = alloc::vec![
            SatelliteId { layer: 0, plane: 0, slot: 0 },
            SatelliteId { layer: 0, plane: 0, slot: 1 },
        ];
        let nodes = NodeSet::new(sats, alloc::vec![1; 2]).unwrap();
        let snap = snapshot(2, &[(0, 1)]);
        let delay = path_delay(&spec, &nodes, &[0, 1], 0.0, 10.0).unwrap();
        assert_relative_eq!(delay, 110.0, max_relative = 1e-9);

        let mut rng = StreamSeed::new(2).rng();
        let result = rwa_run(&spec, &nodes, &snap, 8, 16, 0.0, &mut rng).unwrap();
        assert_relative_eq!(result.assignments[0].propagation_delay_ms, 100.0, max_relative = 1e-9);
        assert_eq!(result.assignments[0].processing_delay_ms, 10.0);
    }

    #[test]
    fn run_serves_every_pair_or_explains_why() {
        let master = StreamSeed::new(41);
        for trial in 0..12 {
            let mut rng = master.child(trial).rng();
            let n = 5 + (trial as usize % 4);
            let edges = dwrosn_testkit::random_graph(&mut rng, n, 0.4);
            if edges.is_empty() {
                continue;
            }
            let (spec, nodes) = fixture(n);
            let snap = snapshot(n, &edges);
            let max_hops = 3;
            let result = rwa_run(&spec, &nodes, &snap, max_hops, 8, 0.0, &mut rng).unwrap();

            let hops = las::hop_matrix(&snap);
            assert_eq!(
                result.assignments.len() + result.unserved.len(),
                n * (n - 1) / 2
            );
            for req in &result.unserved {
                assert!(
                    hops.get(req.a, req.b) > max_hops,
                    "unserved pair must lack a short enough path"
                );
            }
            let mut channels = BTreeSet::new();
            for a in &result.assignments {
                assert!(a.hops <= max_hops);
                assert_eq!(a.hops as usize, a.path.len() - 1);
                assert_eq!(a.path.first(), Some(&a.request.a));
                assert_eq!(a.path.last(), Some(&a.request.b));
                assert!(a.wavelength >= 1 && a.wavelength <= result.n_lambda);
                for w in a.path.windows(2) {
                    assert!(snap.has_edge(w[0], w[1]));
                    let key = (w[0].min(w[1]), w[0].max(w[1]), a.wavelength);
                    assert!(channels.insert(key), "channel reused: {key:?}");
                }
            }
        }
    }

    #[test]
    fn runs_are_deterministic_per_seed() {
        let (spec, nodes) = fixture(6);
        let snap = snapshot(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (1, 4)]);
        let run = |seed: u64| {
            let mut rng = StreamSeed::new(seed).rng();
            rwa_run(&spec, &nodes, &snap, 8, 16, 0.0, &mut rng).unwrap()
        };
        assert_eq!(run(3), run(3));
        let other = run(4);
        let base = run(3);
        assert_ne!(
            base.assignments.iter().map(|a| a.request).collect::<Vec<_>>(),
            other.assignments.iter().map(|a| a.request).collect::<Vec<_>>(),
            "different seeds shuffle the request order"
        );
    }

    #[test]
    fn bad_arguments_are_rejected() {
        let (spec, nodes) = fixture(3);
        let snap = snapshot(3, &[(0, 1), (1, 2)]);
        assert_eq!(
            enumerate_candidate_paths(&spec, &nodes, &snap, 0, 0, 8, 16, 0.0),
            Err(RwaError::BadRequest)
        );
        assert_eq!(
            enumerate_candidate_paths(&spec, &nodes, &snap, 0, 3, 8, 16, 0.0),
            Err(RwaError::BadRequest)
        );
        assert_eq!(
            enumerate_candidate_paths(&spec, &nodes, &snap, 0, 1, 8, 0, 0.0),
            Err(RwaError::BadParameters)
        );
        let (_, small) = fixture(2);
        let mut rng = StreamSeed::new(1).rng();
        assert_eq!(
            rwa_run(&spec, &small, &snap, 8, 16, 0.0, &mut rng),
            Err(RwaError::DimensionMismatch)
        );
        assert_eq!(path_delay(&spec, &nodes, &[0], 0.0, 10.0), Err(RwaError::BadPath));
    }
}
