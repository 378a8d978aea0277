//! Per-time-slot network structure: which links *could* exist (potential
//! link matrix), which links *do* exist (topology snapshot), and census
//! counts by link class.
//!
//! Time is divided into slots of fixed length. A pair of satellites is a
//! *potential* link for a slot when it keeps line of sight at every sample
//! of the slot window, so an established link never has to be torn down
//! mid-slot.

use alloc::vec::Vec;
use core::fmt;

use crate::matrix::SquareMatrix;
use crate::orbital::{self, ConstellationSpec, OrbitalError, SatelliteId};

/// Relationship of a satellite pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LinkClass {
    /// Same layer, same orbital plane.
    IntraOrbit,
    /// Same layer, different planes.
    InterOrbitSameLayer,
    /// Different layers.
    InterLayer,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TopologyError {
    /// Node index outside the node set.
    InvalidNode,
    /// Links connect two distinct satellites.
    SelfLink,
    /// At most one link per satellite pair.
    DuplicateEdge,
    /// Node and degree lists must align and degrees must be positive.
    InvalidDegrees,
    /// Geometry failure while sampling positions.
    Orbital(OrbitalError),
}

impl fmt::Display for TopologyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyError::InvalidNode => f.write_str("node index out of range"),
            TopologyError::SelfLink => f.write_str("self links are not allowed"),
            TopologyError::DuplicateEdge => f.write_str("edge already established"),
            TopologyError::InvalidDegrees => {
                f.write_str("degree list must match nodes and stay positive")
            }
            TopologyError::Orbital(e) => write!(f, "orbital: {e}"),
        }
    }
}

impl From<OrbitalError> for TopologyError {
    fn from(e: OrbitalError) -> Self {
        TopologyError::Orbital(e)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for TopologyError {}

/// Ordered satellites with their terminal budgets.
///
/// Flat node indices used across the crate are positions in this list.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeSet {
    sats: Vec<SatelliteId>,
    degrees: Vec<u32>,
}

impl NodeSet {
    pub fn new(sats: Vec<SatelliteId>, degrees: Vec<u32>) -> Result<Self, TopologyError> {
        if sats.len() != degrees.len() || degrees.iter().any(|&d| d == 0) {
            return Err(TopologyError::InvalidDegrees);
        }
        Ok(NodeSet { sats, degrees })
    }

    /// All satellites of `spec` in flat-index order, with one terminal
    /// budget per layer (`per_layer[i]` applies to `spec.layers[i]`).
    pub fn by_layer(spec: &ConstellationSpec, per_layer: &[u32]) -> Result<Self, TopologyError> {
        if per_layer.len() != spec.layers.len() || per_layer.iter().any(|&d| d == 0) {
            return Err(TopologyError::InvalidDegrees);
        }
        let sats: Vec<SatelliteId> = spec.satellites().collect();
        let degrees = sats.iter().map(|s| per_layer[s.layer]).collect();
        Ok(NodeSet { sats, degrees })
    }

    pub fn len(&self) -> usize {
        self.sats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sats.is_empty()
    }

    pub fn sat(&self, i: usize) -> SatelliteId {
        self.sats[i]
    }

    /// Terminal budget `d` of node `i`.
    pub fn degree(&self, i: usize) -> u32 {
        self.degrees[i]
    }

    pub fn sats(&self) -> &[SatelliteId] {
        &self.sats
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn total_degree(&self) -> u64 {
        self.degrees.iter().map(|&d| u64::from(d)).sum()
    }
}

/// Symmetric boolean matrix of links that stay feasible for a whole slot,
/// plus each pair's mid-slot separation as a locality signal for assignment.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialLinkMatrix {
    cells: SquareMatrix<bool>,
    dist_km: SquareMatrix<f64>,
    slot_start_s: f64,
    slot_len_s: f64,
}

impl PotentialLinkMatrix {
    pub fn empty(n: usize, slot_start_s: f64, slot_len_s: f64) -> Self {
        PotentialLinkMatrix {
            cells: SquareMatrix::filled(n, false),
            dist_km: SquareMatrix::filled(n, 0.0),
            slot_start_s,
            slot_len_s,
        }
    }

    /// Builds a matrix from explicit pairs; used for synthetic instances.
    pub fn from_pairs(
        n: usize,
        pairs: &[(usize, usize)],
        slot_start_s: f64,
        slot_len_s: f64,
    ) -> Result<Self, TopologyError> {
        let mut m = Self::empty(n, slot_start_s, slot_len_s);
        for &(i, j) in pairs {
            if i >= n || j >= n {
                return Err(TopologyError::InvalidNode);
            }
            if i == j {
                return Err(TopologyError::SelfLink);
            }
            m.cells.set_sym(i, j, true);
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.cells.n()
    }

    pub fn slot_start_s(&self) -> f64 {
        self.slot_start_s
    }

    pub fn slot_len_s(&self) -> f64 {
        self.slot_len_s
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells.get(i, j)
    }

    /// Pair separation at the middle of the slot, in kilometres. Zero unless
    /// recorded, so synthetic matrices treat every pair as equally near.
    #[inline]
    pub fn distance_km(&self, i: usize, j: usize) -> f64 {
        self.dist_km.get(i, j)
    }

    pub fn set_distance_km(&mut self, i: usize, j: usize, km: f64) {
        self.dist_km.set_sym(i, j, km);
    }

    /// Number of potential links incident to `i` (node visibility count).
    pub fn row_degree(&self, i: usize) -> u32 {
        self.cells.row(i).iter().map(|&b| u32::from(b)).sum()
    }

    pub fn edge_count(&self) -> usize {
        self.cells.cells().iter().filter(|&&b| b).count() / 2
    }

    pub fn any(&self) -> bool {
        self.cells.cells().iter().any(|&b| b)
    }

    /// Potential pairs with `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n();
        (0..n).flat_map(move |i| {
            (i + 1..n).filter_map(move |j| self.get(i, j).then_some((i, j)))
        })
    }

    pub(crate) fn clear(&mut self, i: usize, j: usize) {
        self.cells.set_sym(i, j, false);
    }

    pub(crate) fn clear_node(&mut self, i: usize) {
        for j in 0..self.n() {
            self.cells.set_sym(i, j, false);
        }
    }
}

/// Established links for one slot, plus per-node used-terminal counts.
#[derive(Clone, Debug, PartialEq)]
pub struct TopologySnapshot {
    edges: SquareMatrix<bool>,
    used: Vec<u32>,
    slot_start_s: f64,
    slot_len_s: f64,
}

impl TopologySnapshot {
    pub fn new(n: usize, slot_start_s: f64, slot_len_s: f64) -> Self {
        TopologySnapshot {
            edges: SquareMatrix::filled(n, false),
            used: alloc::vec![0; n],
            slot_start_s,
            slot_len_s,
        }
    }

    pub fn n(&self) -> usize {
        self.edges.n()
    }

    pub fn slot_start_s(&self) -> f64 {
        self.slot_start_s
    }

    pub fn slot_len_s(&self) -> f64 {
        self.slot_len_s
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.get(i, j)
    }

    /// Terminals already used by node `i` (its established-link count).
    pub fn used_terminals(&self, i: usize) -> u32 {
        self.used[i]
    }

    pub fn edge_count(&self) -> usize {
        self.used.iter().map(|&u| u as usize).sum::<usize>() / 2
    }

    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<(), TopologyError> {
        let n = self.n();
        if i >= n || j >= n {
            return Err(TopologyError::InvalidNode);
        }
        if i == j {
            return Err(TopologyError::SelfLink);
        }
        if self.edges.get(i, j) {
            return Err(TopologyError::DuplicateEdge);
        }
        self.edges.set_sym(i, j, true);
        self.used[i] += 1;
        self.used[j] += 1;
        Ok(())
    }

    /// Established pairs with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n();
        (0..n).flat_map(move |i| {
            (i + 1..n).filter_map(move |j| self.has_edge(i, j).then_some((i, j)))
        })
    }

    /// Neighbor lists in ascending node order.
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let n = self.n();
        let mut adj = alloc::vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                if self.has_edge(i, j) {
                    adj[i].push(j as u32);
                }
            }
        }
        adj
    }
}

/// Classifies the relationship of two distinct satellites.
pub fn classify_link(a: SatelliteId, b: SatelliteId) -> Result<LinkClass, TopologyError> {
    if a == b {
        return Err(TopologyError::SelfLink);
    }
    Ok(if a.layer != b.layer {
        LinkClass::InterLayer
    } else if a.plane == b.plane {
        LinkClass::IntraOrbit
    } else {
        LinkClass::InterOrbitSameLayer
    })
}

/// Potential link matrix for the slot `[t_s, t_s + dt_s)` sampled every
/// `step_s` seconds: a pair is potential iff visible at every sample.
pub fn build_potential_matrix(
    spec: &ConstellationSpec,
    nodes: &NodeSet,
    t_s: f64,
    dt_s: f64,
    step_s: f64,
) -> Result<PotentialLinkMatrix, TopologyError> {
    if !(dt_s > 0.0) || !(step_s > 0.0) {
        return Err(TopologyError::Orbital(OrbitalError::InvalidWindow));
    }
    let n = nodes.len();
    let mut live: Vec<(u32, u32)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            live.push((i as u32, j as u32));
        }
    }

    let mut k = 0u64;
    while !live.is_empty() {
        let tau = t_s + (k as f64) * step_s;
        if tau >= t_s + dt_s {
            break;
        }
        let positions = sample_positions(spec, nodes, tau)?;
        let mut survivors = Vec::with_capacity(live.len());
        for &(i, j) in &live {
            let visible = orbital::is_visible(
                &positions[i as usize],
                &positions[j as usize],
                spec.earth_radius_km,
                spec.clearance_km,
            )?;
            if visible {
                survivors.push((i, j));
            }
        }
        live = survivors;
        k += 1;
    }

    let mut matrix = PotentialLinkMatrix::empty(n, t_s, dt_s);
    for (i, j) in live {
        matrix.cells.set_sym(i as usize, j as usize, true);
    }
    let mid = sample_positions(spec, nodes, t_s + dt_s / 2.0)?;
    for i in 0..n {
        for j in i + 1..n {
            matrix.dist_km.set_sym(i, j, mid[i].distance_km(&mid[j]));
        }
    }
    Ok(matrix)
}

/// Whether the established links form one component spanning all nodes.
pub fn is_connected(snapshot: &TopologySnapshot) -> bool {
    let n = snapshot.n();
    if n <= 1 {
        return true;
    }
    let adj = snapshot.adjacency();
    let mut seen = alloc::vec![false; n];
    let mut stack = alloc::vec![0usize];
    seen[0] = true;
    let mut reached = 1;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            let v = v as usize;
            if !seen[v] {
                seen[v] = true;
                reached += 1;
                stack.push(v);
            }
        }
    }
    reached == n
}

/// Pair counts split by [`LinkClass`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ClassCounts {
    pub intra_orbit: u32,
    pub inter_orbit_same_layer: u32,
    pub inter_layer: u32,
}

impl ClassCounts {
    fn bump(&mut self, class: LinkClass) {
        match class {
            LinkClass::IntraOrbit => self.intra_orbit += 1,
            LinkClass::InterOrbitSameLayer => self.inter_orbit_same_layer += 1,
            LinkClass::InterLayer => self.inter_layer += 1,
        }
    }

    pub fn same_layer(&self) -> u32 {
        self.intra_orbit + self.inter_orbit_same_layer
    }

    pub fn total(&self) -> u32 {
        self.same_layer() + self.inter_layer
    }
}

/// Census entry for one node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeCensus {
    pub sat: SatelliteId,
    /// Links visible at the slot start instant.
    pub visible: ClassCounts,
    /// Links that stay visible for the whole slot.
    pub potential: ClassCounts,
}

/// Visible and potential link counts for one slot, per node and aggregate.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkCensus {
    pub slot_start_s: f64,
    pub slot_len_s: f64,
    /// Aggregate pair counts (each pair counted once).
    pub visible: ClassCounts,
    pub potential: ClassCounts,
    pub per_node: Vec<NodeCensus>,
}

/// Counts instantaneously-visible links at the slot start and potential
/// links over the slot window, split by link class.
pub fn link_census(
    spec: &ConstellationSpec,
    nodes: &NodeSet,
    t_s: f64,
    dt_s: f64,
    step_s: f64,
) -> Result<LinkCensus, TopologyError> {
    let n = nodes.len();
    let potential = build_potential_matrix(spec, nodes, t_s, dt_s, step_s)?;
    let positions = sample_positions(spec, nodes, t_s)?;

    let mut census = LinkCensus {
        slot_start_s: t_s,
        slot_len_s: dt_s,
        visible: ClassCounts::default(),
        potential: ClassCounts::default(),
        per_node: nodes
            .sats()
            .iter()
            .map(|&sat| NodeCensus {
                sat,
                visible: ClassCounts::default(),
                potential: ClassCounts::default(),
            })
            .collect(),
    };

    for i in 0..n {
        for j in i + 1..n {
            let class = classify_link(nodes.sat(i), nodes.sat(j))?;
            if orbital::is_visible(
                &positions[i],
                &positions[j],
                spec.earth_radius_km,
                spec.clearance_km,
            )? {
                census.visible.bump(class);
                census.per_node[i].visible.bump(class);
                census.per_node[j].visible.bump(class);
            }
            if potential.get(i, j) {
                census.potential.bump(class);
                census.per_node[i].potential.bump(class);
                census.per_node[j].potential.bump(class);
            }
        }
    }
    Ok(census)
}

fn sample_positions(
    spec: &ConstellationSpec,
    nodes: &NodeSet,
    t_s: f64,
) -> Result<Vec<orbital::EciPosition>, TopologyError> {
    nodes
        .sats()
        .iter()
        .map(|&sat| orbital::position(spec, sat, t_s).map_err(TopologyError::from))
        .collect()
}
