//! Model of a dual-layer (LEO + GEO) optical satellite network with
//! wavelength-routed inter-satellite links.
//!
//! The crate covers the full pipeline from geometry to traffic service:
//!
//! * [`orbital`] — Walker-Delta constellation propagation and line-of-sight
//!   visibility between satellites.
//! * [`topology`] — per-time-slot potential link matrices, link census, and
//!   topology snapshots with per-node terminal budgets.
//! * [`las`] — link assignment schemes that choose which potential links to
//!   establish: path-efficiency importance (PEIM), random (ACT), and
//!   nearest-neighbor greedy.
//! * [`rwa`] — first-fit routing and wavelength assignment over an
//!   established topology.
//! * [`metrics`] — terminal utilization, average hop distance, connectivity
//!   ratio, and hop distributions.
//! * [`rng`] — deterministic derivation of independent random streams so
//!   every experiment cell is reproducible from one master seed.
//!
//! The crate is `no_std` (with `alloc`); everything here is pure
//! computation. File formats, CSV emission, and the experiment driver live
//! in the companion `dwrosn-sim` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod las;
pub mod matrix;
pub mod metrics;
pub mod orbital;
pub mod rng;
pub mod rwa;
pub mod topology;

pub use self::{
    las::{PoolSelection, Scheme},
    orbital::{ConstellationSpec, EciPosition, LayerKind, LayerSpec, SatelliteId},
    rng::StreamSeed,
    topology::{LinkClass, NodeSet, PotentialLinkMatrix, TopologySnapshot},
};
