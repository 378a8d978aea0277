//! Link assignment schemes: given the potential link matrix of a slot and
//! per-node terminal budgets, decide which links to establish.
//!
//! Three schemes share the same bookkeeping and differ only in how they pick
//! the next edge:
//!
//! * **PEIM** scores every feasible potential edge by how much it improves
//!   all-pairs reachability (hop decreases plus added equal-length shortest
//!   paths) and picks the best, breaking ties toward scarce visibility.
//! * **ACT** picks uniformly at random.
//! * **Greedy** walks the nodes in random order and links each to its
//!   nearest feasible neighbor until it runs out of terminals or candidates.
//!
//! Every scheme runs until no potential edge with two free endpoints
//! remains, so the resulting topology is always maximal. On top of a single
//! run, [`generate_and_select`] draws a pool of connected candidates and
//! keeps the one with the smallest average hop distance.

use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::matrix::SquareMatrix;
use crate::metrics;
use crate::orbital::ConstellationSpec;
use crate::rng::StreamSeed;
use crate::topology::{
    self, NodeSet, PotentialLinkMatrix, TopologyError, TopologySnapshot,
};

/// Attempts per pool slot before a scheme is declared unable to produce a
/// connected topology.
pub const MAX_MEMBER_ATTEMPTS: u32 = 10;

/// All-pairs hop counts of a snapshot; unreachable pairs hold the sentinel
/// value `n` (never a valid hop count, orders above every real distance).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HopMatrix {
    cells: SquareMatrix<u32>,
}

impl HopMatrix {
    pub fn n(&self) -> usize {
        self.cells.n()
    }

    /// Value stored for unreachable pairs.
    pub fn sentinel(&self) -> u32 {
        self.cells.n() as u32
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.cells.get(i, j)
    }

    pub fn is_reachable(&self, i: usize, j: usize) -> bool {
        self.get(i, j) < self.sentinel()
    }

    pub fn row(&self, i: usize) -> &[u32] {
        self.cells.row(i)
    }
}

/// All-pairs shortest-path counts; diagonal entries are 1, unreachable
/// pairs 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathCountMatrix {
    cells: SquareMatrix<u64>,
}

impl PathCountMatrix {
    pub fn n(&self) -> usize {
        self.cells.n()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.cells.get(i, j)
    }

    pub fn row(&self, i: usize) -> &[u64] {
        self.cells.row(i)
    }
}

/// Hop-decrease and path-gain scores for every feasible potential edge.
#[derive(Clone, Debug, PartialEq)]
pub struct ImportanceMatrices {
    /// Sum over ordered pairs of the hop-count decrease the edge causes.
    pub hop_gain: SquareMatrix<u64>,
    /// Sum over ordered pairs of added same-length shortest paths.
    pub path_gain: SquareMatrix<u64>,
    /// Normalized combination used for selection.
    pub combined: SquareMatrix<f64>,
}

/// Surviving candidates of a tie break, after filtering to the minimum
/// inter-node visibility count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TieBreak {
    /// Tied edges `(i, j)` with `i < j`.
    pub candidates: Vec<(usize, usize)>,
    /// The minimum inter-node visibility count they share.
    pub ivc: u32,
}

/// Pool outcome of [`generate_and_select`].
#[derive(Clone, Debug, PartialEq)]
pub struct PoolSelection {
    /// The pool member with the smallest average hop distance (first such
    /// member on ties).
    pub snapshot: TopologySnapshot,
    /// Its average hop distance.
    pub avg_hops: f64,
    /// Average hop distance of every pool member, in generation order.
    pub pool_avg_hops: Vec<f64>,
    /// Index of the selected member.
    pub selected: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LasError {
    /// Potential matrix and node set disagree on the node count.
    DimensionMismatch,
    /// Tie-break selection needs at least one potential edge.
    NoPotentialEdges,
    /// Pool generation needs a positive count.
    InvalidCount,
    /// A pool slot failed to produce a connected topology.
    PoolExhausted { attempts: u32 },
    Topology(TopologyError),
}

impl fmt::Display for LasError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LasError::DimensionMismatch => {
                f.write_str("potential matrix and node set sizes differ")
            }
            LasError::NoPotentialEdges => f.write_str("no potential edges to select from"),
            LasError::InvalidCount => f.write_str("pool count must be positive"),
            LasError::PoolExhausted { attempts } => {
                write!(f, "no connected topology in {attempts} attempts")
            }
            LasError::Topology(e) => write!(f, "topology: {e}"),
        }
    }
}

impl From<TopologyError> for LasError {
    fn from(e: TopologyError) -> Self {
        LasError::Topology(e)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for LasError {}

/// Link assignment scheme selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    Peim,
    Act,
    Greedy,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Peim, Scheme::Act, Scheme::Greedy];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Peim => "peim",
            Scheme::Act => "act",
            Scheme::Greedy => "greedy",
        }
    }

    /// Runs one assignment pass of this scheme.
    pub fn assign(
        self,
        l0: &PotentialLinkMatrix,
        nodes: &NodeSet,
        rng: &mut impl Rng,
    ) -> Result<TopologySnapshot, LasError> {
        match self {
            Scheme::Peim => peim_assign(l0, nodes, rng),
            Scheme::Act => act_assign(l0, nodes, rng),
            Scheme::Greedy => greedy_assign(l0, nodes, rng),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for Scheme {
    type Err = LasError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|scheme| s.eq_ignore_ascii_case(scheme.name()))
            .ok_or(LasError::NoPotentialEdges)
    }
}

/// BFS hop counts from every node.
pub fn hop_matrix(snapshot: &TopologySnapshot) -> HopMatrix {
    hops_and_counts(snapshot).0
}

/// BFS shortest-path counts from every node.
pub fn shortest_path_counts(snapshot: &TopologySnapshot) -> PathCountMatrix {
    hops_and_counts(snapshot).1
}

/// Computes hop counts and shortest-path counts in one BFS sweep per node.
pub fn hops_and_counts(snapshot: &TopologySnapshot) -> (HopMatrix, PathCountMatrix) {
    let n = snapshot.n();
    let sentinel = n as u32;
    let adj = snapshot.adjacency();
    let mut hops = SquareMatrix::filled(n, sentinel);
    let mut counts = SquareMatrix::filled(n, 0u64);
    let mut queue: Vec<u32> = Vec::with_capacity(n);

    for s in 0..n {
        let dist = hops.row_mut(s);
        let cnt = counts.row_mut(s);
        dist[s] = 0;
        cnt[s] = 1;
        queue.clear();
        queue.push(s as u32);
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head] as usize;
            head += 1;
            let next = dist[u] + 1;
            for &v in &adj[u] {
                let v = v as usize;
                if dist[v] == sentinel {
                    dist[v] = next;
                    cnt[v] = cnt[u];
                    queue.push(v as u32);
                } else if dist[v] == next {
                    cnt[v] += cnt[u];
                }
            }
        }
    }
    (HopMatrix { cells: hops }, PathCountMatrix { cells: counts })
}

/// Hop-decrease scores: entry `(i, j)` sums, over all ordered node pairs,
/// the drop in hop count caused by adding edge `(i, j)` to the snapshot.
/// Only potential edges whose endpoints both have free terminals get a
/// score.
pub fn hop_gain_matrix(
    snapshot: &TopologySnapshot,
    nodes: &NodeSet,
    l: &PotentialLinkMatrix,
) -> Result<SquareMatrix<u64>, LasError> {
    Ok(importance_scan(snapshot, nodes, l)?.0)
}

/// Path-gain scores: entry `(i, j)` sums, over ordered pairs whose hop
/// count the edge leaves unchanged, the number of added equal-length
/// shortest paths.
pub fn path_gain_matrix(
    snapshot: &TopologySnapshot,
    nodes: &NodeSet,
    l: &PotentialLinkMatrix,
) -> Result<SquareMatrix<u64>, LasError> {
    Ok(importance_scan(snapshot, nodes, l)?.1)
}

/// Normalizes both score matrices by their maxima and adds them. A matrix
/// whose maximum is zero contributes zero everywhere.
pub fn combine_importance(
    hop_gain: &SquareMatrix<u64>,
    path_gain: &SquareMatrix<u64>,
) -> SquareMatrix<f64> {
    let n = hop_gain.n();
    let max_a = hop_gain.cells().iter().copied().max().unwrap_or(0);
    let max_b = path_gain.cells().iter().copied().max().unwrap_or(0);
    let mut combined = SquareMatrix::filled(n, 0.0f64);
    for i in 0..n {
        for j in 0..n {
            let mut score = 0.0;
            if max_a > 0 {
                score += hop_gain.get(i, j) as f64 / max_a as f64;
            }
            if max_b > 0 {
                score += path_gain.get(i, j) as f64 / max_b as f64;
            }
            combined.set(i, j, score);
        }
    }
    combined
}

/// Both importance matrices plus their combination, in one pass.
pub fn importance_matrices(
    snapshot: &TopologySnapshot,
    nodes: &NodeSet,
    l: &PotentialLinkMatrix,
) -> Result<ImportanceMatrices, LasError> {
    let (hop_gain, path_gain) = importance_scan(snapshot, nodes, l)?;
    let combined = combine_importance(&hop_gain, &path_gain);
    Ok(ImportanceMatrices { hop_gain, path_gain, combined })
}

/// Computes hop-gain and path-gain for every feasible potential edge.
///
/// Adding a single edge `(i, j)` changes the distance of a pair `(k, t)` to
/// `min(d(k,t), d(k,i)+1+d(j,t), d(k,j)+1+d(i,t))`, and every new shortest
/// path through the edge splits into a shortest `k..i` prefix and a
/// shortest `j..t` suffix of the old graph (or the mirrored pair), so one
/// all-pairs BFS of the current snapshot prices every candidate without
/// rebuilding anything. Both scores count ordered pairs; unreachable pairs
/// enter at the sentinel distance `n`.
fn importance_scan(
    snapshot: &TopologySnapshot,
    nodes: &NodeSet,
    l: &PotentialLinkMatrix,
) -> Result<(SquareMatrix<u64>, SquareMatrix<u64>), LasError> {
    let n = snapshot.n();
    if nodes.len() != n || l.n() != n {
        return Err(LasError::DimensionMismatch);
    }
    let sentinel = n as u32;
    let (hops, counts) = hops_and_counts(snapshot);

    let mut hop_gain = SquareMatrix::filled(n, 0u64);
    let mut path_gain = SquareMatrix::filled(n, 0u64);
    // Nodes that can reach either endpoint; pairs outside this set keep
    // their distance and path count, so the scan skips them.
    let mut members: Vec<u32> = Vec::with_capacity(n);

    for i in 0..n {
        if snapshot.used_terminals(i) >= nodes.degree(i) {
            continue;
        }
        let h_i = hops.row(i);
        let k_i = counts.row(i);
        for j in i + 1..n {
            if !l.get(i, j) || snapshot.used_terminals(j) >= nodes.degree(j) {
                continue;
            }
            // An edge that already exists changes neither distances nor path
            // counts; leave its score at zero instead of re-pricing it.
            if snapshot.has_edge(i, j) {
                continue;
            }
            let h_j = hops.row(j);
            let k_j = counts.row(j);

            members.clear();
            for v in 0..n {
                if h_i[v] < sentinel || h_j[v] < sentinel {
                    members.push(v as u32);
                }
            }

            let mut a = 0u64;
            let mut b = 0u64;
            for (pos, &k_raw) in members.iter().enumerate() {
                let k = k_raw as usize;
                let d_ki = h_i[k];
                let d_kj = h_j[k];
                let h_k = hops.row(k);
                let c_k = counts.row(k);
                for &t_raw in &members[pos + 1..] {
                    let t = t_raw as usize;
                    let old = h_k[t];
                    let via_ij = d_ki + 1 + h_j[t];
                    let via_ji = d_kj + 1 + h_i[t];
                    let best = via_ij.min(via_ji);
                    if best < old {
                        a += u64::from(old - best);
                    } else {
                        if via_ij == old {
                            b += c_k[i] * k_j[t];
                        }
                        if via_ji == old {
                            b += c_k[j] * k_i[t];
                        }
                    }
                }
            }
            // The pair sums are symmetric in (k, t); double the unordered
            // scan to get the ordered-pair totals.
            hop_gain.set_sym(i, j, a * 2);
            path_gain.set_sym(i, j, b * 2);
        }
    }
    Ok((hop_gain, path_gain))
}

/// Filters tied candidate edges down to those sharing the minimum
/// inter-node visibility count (the smaller of the two endpoints' remaining
/// potential-link counts) so scarce nodes connect first. `tied` must be
/// non-empty.
fn min_ivc_filter(mut tied: Vec<(usize, usize)>, l: &PotentialLinkMatrix) -> TieBreak {
    let nvc: Vec<u32> = (0..l.n()).map(|v| l.row_degree(v)).collect();
    let ivc = |&(i, j): &(usize, usize)| nvc[i].min(nvc[j]);
    let min_ivc = tied.iter().map(ivc).min().unwrap();
    tied.retain(|pair| ivc(pair) == min_ivc);
    TieBreak { candidates: tied, ivc: min_ivc }
}

/// Candidates tied at the maximum combined score, filtered to the minimum
/// inter-node visibility count.
pub fn tie_break_candidates(
    combined: &SquareMatrix<f64>,
    l: &PotentialLinkMatrix,
) -> Result<TieBreak, LasError> {
    if combined.n() != l.n() {
        return Err(LasError::DimensionMismatch);
    }
    let mut best = f64::NEG_INFINITY;
    let mut tied: Vec<(usize, usize)> = Vec::new();
    for (i, j) in l.pairs() {
        let score = combined.get(i, j);
        if score > best {
            best = score;
            tied.clear();
            tied.push((i, j));
        } else if score == best {
            tied.push((i, j));
        }
    }
    if tied.is_empty() {
        return Err(LasError::NoPotentialEdges);
    }
    Ok(min_ivc_filter(tied, l))
}

/// Picks the winning edge: maximum combined score, minimum inter-node
/// visibility count, then uniformly at random among what remains.
pub fn tie_break_select(
    combined: &SquareMatrix<f64>,
    l: &PotentialLinkMatrix,
    rng: &mut impl Rng,
) -> Result<(usize, usize), LasError> {
    let tie = tie_break_candidates(combined, l)?;
    Ok(tie.candidates[rng.gen_range(0..tie.candidates.len())])
}

/// Establishes an edge and maintains the working potential matrix: the pair
/// is consumed, and a node whose budget fills drops out entirely.
fn establish(
    snapshot: &mut TopologySnapshot,
    l: &mut PotentialLinkMatrix,
    nodes: &NodeSet,
    i: usize,
    j: usize,
) -> Result<(), LasError> {
    snapshot.add_edge(i, j)?;
    l.clear(i, j);
    if snapshot.used_terminals(i) >= nodes.degree(i) {
        l.clear_node(i);
    }
    if snapshot.used_terminals(j) >= nodes.degree(j) {
        l.clear_node(j);
    }
    Ok(())
}

fn check_dims(l0: &PotentialLinkMatrix, nodes: &NodeSet) -> Result<(), LasError> {
    if l0.n() == nodes.len() {
        Ok(())
    } else {
        Err(LasError::DimensionMismatch)
    }
}

/// Connected-component labels of the established graph.
fn component_labels(snapshot: &TopologySnapshot) -> Vec<u32> {
    let n = snapshot.n();
    let adj = snapshot.adjacency();
    let mut label = alloc::vec![u32::MAX; n];
    let mut queue: Vec<u32> = Vec::new();
    let mut next = 0u32;
    for s in 0..n {
        if label[s] != u32::MAX {
            continue;
        }
        label[s] = next;
        queue.clear();
        queue.push(s as u32);
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head] as usize;
            head += 1;
            for &v in &adj[u] {
                if label[v as usize] == u32::MAX {
                    label[v as usize] = next;
                    queue.push(v);
                }
            }
        }
        next += 1;
    }
    label
}

/// Importance-driven assignment: repeatedly establish the most valuable
/// feasible potential edge until none remain.
///
/// An edge between two components connects previously unreachable pairs, so
/// its hop gain is off the finite scale; all such edges tie ahead of any
/// finite score and the scarcity filter plus chance decide among them. Only
/// once no candidate bridges components does the finite scoring (hop gain
/// plus path gain) rank the remaining shortcut edges.
pub fn peim_assign(
    l0: &PotentialLinkMatrix,
    nodes: &NodeSet,
    rng: &mut impl Rng,
) -> Result<TopologySnapshot, LasError> {
    check_dims(l0, nodes)?;
    let mut l = l0.clone();
    let mut snapshot = TopologySnapshot::new(l0.n(), l0.slot_start_s(), l0.slot_len_s());
    while l.any() {
        let comp = component_labels(&snapshot);
        let bridging: Vec<(usize, usize)> =
            l.pairs().filter(|&(i, j)| comp[i] != comp[j]).collect();
        let (i, j) = if bridging.is_empty() {
            let (hop_gain, path_gain) = importance_scan(&snapshot, nodes, &l)?;
            let combined = combine_importance(&hop_gain, &path_gain);
            tie_break_select(&combined, &l, rng)?
        } else {
            let tie = min_ivc_filter(bridging, &l);
            tie.candidates[rng.gen_range(0..tie.candidates.len())]
        };
        establish(&mut snapshot, &mut l, nodes, i, j)?;
    }
    Ok(snapshot)
}

/// Random assignment: establishes uniformly random feasible edges until
/// none remain.
pub fn act_assign(
    l0: &PotentialLinkMatrix,
    nodes: &NodeSet,
    rng: &mut impl Rng,
) -> Result<TopologySnapshot, LasError> {
    check_dims(l0, nodes)?;
    let mut l = l0.clone();
    let mut snapshot = TopologySnapshot::new(l0.n(), l0.slot_start_s(), l0.slot_len_s());
    while l.any() {
        let candidates: Vec<(usize, usize)> = l.pairs().collect();
        let (i, j) = candidates[rng.gen_range(0..candidates.len())];
        establish(&mut snapshot, &mut l, nodes, i, j)?;
    }
    Ok(snapshot)
}

/// Nearest-neighbor greedy assignment: visits the nodes in a random order
/// and links each one to its closest feasible neighbor (by the matrix's
/// recorded pair separation, ties uniform) until the node is saturated or
/// out of candidates.
///
/// Feasibility only shrinks as links are established, so once every node
/// has been visited no feasible pair can remain and the result is maximal
/// like the other schemes.
pub fn greedy_assign(
    l0: &PotentialLinkMatrix,
    nodes: &NodeSet,
    rng: &mut impl Rng,
) -> Result<TopologySnapshot, LasError> {
    check_dims(l0, nodes)?;
    let n = l0.n();
    let mut l = l0.clone();
    let mut snapshot = TopologySnapshot::new(n, l0.slot_start_s(), l0.slot_len_s());
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for &v in &order {
        loop {
            let mut best = f64::INFINITY;
            let mut tied: Vec<usize> = Vec::new();
            for u in 0..n {
                if !l.get(v, u) {
                    continue;
                }
                let d = l.distance_km(v, u);
                if d < best {
                    best = d;
                    tied.clear();
                    tied.push(u);
                } else if d == best {
                    tied.push(u);
                }
            }
            if tied.is_empty() {
                break;
            }
            let u = tied[rng.gen_range(0..tied.len())];
            establish(&mut snapshot, &mut l, nodes, v.min(u), v.max(u))?;
        }
    }
    Ok(snapshot)
}

/// Runs `scheme` until it yields a connected topology, retrying with fresh
/// randomness from the member's stream, and returns it with its average hop
/// distance. Gives up after [`MAX_MEMBER_ATTEMPTS`] disconnected tries.
pub fn generate_connected_member(
    l0: &PotentialLinkMatrix,
    nodes: &NodeSet,
    scheme: Scheme,
    seed: StreamSeed,
) -> Result<(TopologySnapshot, f64), LasError> {
    let mut rng = seed.rng();
    for _ in 0..MAX_MEMBER_ATTEMPTS {
        let snapshot = scheme.assign(l0, nodes, &mut rng)?;
        if topology::is_connected(&snapshot) {
            let hops = hop_matrix(&snapshot);
            let avg = metrics::avg_distance_from_hops(&hops)
                .expect("connected topology has finite distances");
            return Ok((snapshot, avg));
        }
    }
    Err(LasError::PoolExhausted { attempts: MAX_MEMBER_ATTEMPTS })
}

/// Pool generation over a prebuilt potential matrix: draws `count`
/// connected candidates (member `i` uses the seed's `i`-th child stream)
/// and selects the one with the smallest average hop distance, first index
/// winning ties.
pub fn generate_and_select_from(
    l0: &PotentialLinkMatrix,
    nodes: &NodeSet,
    scheme: Scheme,
    count: usize,
    seed: StreamSeed,
) -> Result<PoolSelection, LasError> {
    if count == 0 {
        return Err(LasError::InvalidCount);
    }
    check_dims(l0, nodes)?;
    let mut members = Vec::with_capacity(count);
    for i in 0..count {
        members.push(generate_connected_member(l0, nodes, scheme, seed.child(i as u64))?);
    }
    Ok(select_pool_member(members))
}

/// Picks the minimum-average-hops member from an ordered, non-empty pool.
/// Exposed so a parallel pool generator can reuse the exact selection rule.
pub fn select_pool_member(members: Vec<(TopologySnapshot, f64)>) -> PoolSelection {
    let pool_avg_hops: Vec<f64> = members.iter().map(|(_, h)| *h).collect();
    let mut selected = 0;
    for (i, &h) in pool_avg_hops.iter().enumerate() {
        if h < pool_avg_hops[selected] {
            selected = i;
        }
    }
    let avg_hops = pool_avg_hops[selected];
    let snapshot = members.into_iter().nth(selected).unwrap().0;
    PoolSelection { snapshot, avg_hops, pool_avg_hops, selected }
}

/// Full per-slot pipeline: builds the potential matrix for the slot
/// `[t_s, t_s + dt_s)` and runs pool generation and selection over it.
#[allow(clippy::too_many_arguments)]
pub fn generate_and_select(
    scheme: Scheme,
    spec: &ConstellationSpec,
    nodes: &NodeSet,
    t_s: f64,
    dt_s: f64,
    step_s: f64,
    count: usize,
    seed: StreamSeed,
) -> Result<PoolSelection, LasError> {
    let l0 = topology::build_potential_matrix(spec, nodes, t_s, dt_s, step_s)?;
    generate_and_select_from(&l0, nodes, scheme, count, seed)
}
