//! Topology quality metrics: terminal utilization, average hop distance,
//! bounded-hop connectivity, and hop distributions.
//!
//! Pair-based metrics count ordered pairs, so a symmetric relation simply
//! appears twice; ratios are unaffected and the counts match the ordered
//! definitions used by the assignment scores.

use alloc::vec::Vec;
use core::fmt;

use crate::las::{self, HopMatrix};
use crate::topology::{NodeSet, TopologySnapshot};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricsError {
    /// Average distance is undefined on a disconnected topology.
    Disconnected,
    /// Snapshot and node set disagree on the node count.
    DimensionMismatch,
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::Disconnected => f.write_str("topology is not connected"),
            MetricsError::DimensionMismatch => f.write_str("snapshot and node set sizes differ"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for MetricsError {}

/// Fraction of ordered pairs at each hop count.
#[derive(Clone, Debug, PartialEq)]
pub struct HopDistribution {
    /// `fractions[h]` is the fraction of ordered pairs at exactly `h` hops;
    /// index 0 is always zero and the vector stops at the largest finite
    /// distance.
    pub fractions: Vec<f64>,
    /// Fraction of ordered pairs with no path at all.
    pub unreachable: f64,
}

/// Mean, minimum, and maximum of a non-empty sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StatSummary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl StatSummary {
    /// Summarizes in input order (the mean folds left to right).
    pub fn from_values(values: &[f64]) -> Option<StatSummary> {
        if values.is_empty() {
            return None;
        }
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for &v in values {
            min = if v < min { v } else { min };
            max = if v > max { v } else { max };
            sum += v;
        }
        Some(StatSummary { mean: sum / values.len() as f64, min, max })
    }
}

/// Everything the experiment tables report about one topology.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsReport {
    pub utilization: f64,
    pub avg_hops: f64,
    /// Connectivity ratio per hop bound, ascending.
    pub connectivity: Vec<(u32, f64)>,
    pub hop_distribution: HopDistribution,
    /// Wavelength demand over RWA repetitions, when run.
    pub wavelengths: Option<StatSummary>,
    /// Request delay in milliseconds over served assignments, when run.
    pub delay_ms: Option<StatSummary>,
}

/// Fraction of terminal budget spent: sum of used terminals over sum of
/// degrees.
pub fn utilization(snapshot: &TopologySnapshot, nodes: &NodeSet) -> Result<f64, MetricsError> {
    let n = snapshot.n();
    if nodes.len() != n {
        return Err(MetricsError::DimensionMismatch);
    }
    let total = nodes.total_degree();
    if total == 0 {
        return Ok(0.0);
    }
    let used: u64 = (0..n).map(|i| u64::from(snapshot.used_terminals(i))).sum();
    Ok(used as f64 / total as f64)
}

/// Mean hop count over ordered node pairs.
pub fn avg_distance(snapshot: &TopologySnapshot) -> Result<f64, MetricsError> {
    avg_distance_from_hops(&las::hop_matrix(snapshot))
}

/// [`avg_distance`] on an already-computed hop matrix.
pub fn avg_distance_from_hops(hops: &HopMatrix) -> Result<f64, MetricsError> {
    let n = hops.n();
    if n <= 1 {
        return Ok(0.0);
    }
    let mut sum = 0u64;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if !hops.is_reachable(i, j) {
                return Err(MetricsError::Disconnected);
            }
            sum += u64::from(hops.get(i, j));
        }
    }
    Ok(sum as f64 / (n * (n - 1)) as f64)
}

/// Fraction of ordered pairs connected within `max_hops`.
pub fn connectivity(snapshot: &TopologySnapshot, max_hops: u32) -> f64 {
    connectivity_from_hops(&las::hop_matrix(snapshot), max_hops)
}

/// [`connectivity`] on an already-computed hop matrix.
pub fn connectivity_from_hops(hops: &HopMatrix, max_hops: u32) -> f64 {
    let n = hops.n();
    if n <= 1 {
        return 1.0;
    }
    let sentinel = hops.sentinel();
    let mut within = 0u64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let h = hops.get(i, j);
                if h < sentinel && h <= max_hops {
                    within += 1;
                }
            }
        }
    }
    within as f64 / (n * (n - 1)) as f64
}

/// Hop-count distribution over ordered pairs.
pub fn hop_distribution(snapshot: &TopologySnapshot) -> HopDistribution {
    hop_distribution_from_hops(&las::hop_matrix(snapshot))
}

/// [`hop_distribution`] on an already-computed hop matrix.
pub fn hop_distribution_from_hops(hops: &HopMatrix) -> HopDistribution {
    let n = hops.n();
    if n <= 1 {
        return HopDistribution { fractions: Vec::new(), unreachable: 0.0 };
    }
    let sentinel = hops.sentinel();
    let mut counts: Vec<u64> = Vec::new();
    let mut unreachable = 0u64;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let h = hops.get(i, j);
            if h >= sentinel {
                unreachable += 1;
            } else {
                let h = h as usize;
                if counts.len() <= h {
                    counts.resize(h + 1, 0);
                }
                counts[h] += 1;
            }
        }
    }
    let pairs = (n * (n - 1)) as f64;
    HopDistribution {
        fractions: counts.iter().map(|&c| c as f64 / pairs).collect(),
        unreachable: unreachable as f64 / pairs,
    }
}
