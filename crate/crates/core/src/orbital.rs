//! Walker-Delta constellation geometry: satellite positions over time and
//! line-of-sight visibility between satellites.
//!
//! A layer is a `T/P/F` Walker-Delta shell on a circular orbit: `T`
//! satellites spread over `P` equally-spaced planes with inter-plane phase
//! factor `F`. Positions are returned in an Earth-centered inertial frame
//! with the equator in the `xy` plane; the Earth is modeled as a sphere for
//! occlusion tests.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use core::fmt;

/// Role of a layer in the dual-layer scenario.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LayerKind {
    Leo,
    Geo,
}

impl LayerKind {
    /// Uppercase label used in topology files ("LEO", "GEO").
    pub fn label(self) -> &'static str {
        match self {
            LayerKind::Leo => "LEO",
            LayerKind::Geo => "GEO",
        }
    }
}

/// One Walker-Delta shell.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerSpec {
    pub kind: LayerKind,
    /// Total satellites `T`; must be a multiple of `planes`.
    pub total_sats: u32,
    /// Orbital planes `P`, equally spaced in right ascension.
    pub planes: u32,
    /// Walker phase factor `F` in `0..planes`.
    pub phase_factor: u32,
    /// Altitude above the Earth surface, km.
    pub altitude_km: f64,
    /// Inclination, degrees.
    pub inclination_deg: f64,
    /// Orbital period, seconds.
    pub period_s: f64,
}

impl LayerSpec {
    /// Satellites per plane `M = T / P`.
    pub fn sats_per_plane(&self) -> u32 {
        self.total_sats / self.planes
    }

    /// Mean motion, rad/s.
    pub fn angular_velocity_rad_s(&self) -> f64 {
        TAU / self.period_s
    }

    /// Orbit radius about the Earth center, km.
    pub fn orbit_radius_km(&self, earth_radius_km: f64) -> f64 {
        earth_radius_km + self.altitude_km
    }

    pub fn validate(&self) -> Result<(), OrbitalError> {
        let ok = self.planes >= 1
            && self.total_sats >= 1
            && self.total_sats % self.planes == 0
            && self.phase_factor < self.planes
            && self.altitude_km > 0.0
            && self.period_s > 0.0
            && self.inclination_deg.is_finite();
        if ok {
            Ok(())
        } else {
            Err(OrbitalError::InvalidLayer)
        }
    }
}

/// Full constellation: one or more layers plus the occlusion model.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstellationSpec {
    /// Layers in flat-index order (the dual-layer scenario lists LEO first).
    pub layers: Vec<LayerSpec>,
    /// Occluding sphere radius, km.
    pub earth_radius_km: f64,
    /// Extra line-of-sight clearance above the sphere, km.
    pub clearance_km: f64,
}

impl ConstellationSpec {
    /// Dual-layer scenario: a 120/10/1 LEO shell at 1200 km, 55 deg
    /// inclination, plus 3 equatorial GEO satellites.
    pub fn reference() -> Self {
        ConstellationSpec {
            layers: alloc::vec![
                LayerSpec {
                    kind: LayerKind::Leo,
                    total_sats: 120,
                    planes: 10,
                    phase_factor: 1,
                    altitude_km: 1200.0,
                    inclination_deg: 55.0,
                    period_s: 6565.0,
                },
                LayerSpec {
                    kind: LayerKind::Geo,
                    total_sats: 3,
                    planes: 1,
                    phase_factor: 0,
                    altitude_km: 35_786.0,
                    inclination_deg: 0.0,
                    period_s: 86_400.0,
                },
            ],
            earth_radius_km: 6378.137,
            clearance_km: 100.0,
        }
    }

    pub fn validate(&self) -> Result<(), OrbitalError> {
        if self.layers.is_empty()
            || self.earth_radius_km <= 0.0
            || self.clearance_km < 0.0
        {
            return Err(OrbitalError::InvalidLayer);
        }
        for layer in &self.layers {
            layer.validate()?;
        }
        Ok(())
    }

    /// Total satellite count `N` across layers.
    pub fn total_sats(&self) -> usize {
        self.layers.iter().map(|l| l.total_sats as usize).sum()
    }

    /// Flat index of a satellite: layers in order, plane-major within a
    /// layer, slot order within a plane.
    pub fn flat_index(&self, sat: SatelliteId) -> Option<usize> {
        let layer = self.layers.get(sat.layer)?;
        if sat.plane >= layer.planes || sat.slot >= layer.sats_per_plane() {
            return None;
        }
        let before: usize = self.layers[..sat.layer]
            .iter()
            .map(|l| l.total_sats as usize)
            .sum();
        Some(before + (sat.plane * layer.sats_per_plane() + sat.slot) as usize)
    }

    /// Inverse of [`flat_index`](Self::flat_index).
    pub fn satellite(&self, mut flat: usize) -> Option<SatelliteId> {
        for (layer_idx, layer) in self.layers.iter().enumerate() {
            let count = layer.total_sats as usize;
            if flat < count {
                let m = layer.sats_per_plane() as usize;
                return Some(SatelliteId {
                    layer: layer_idx,
                    plane: (flat / m) as u32,
                    slot: (flat % m) as u32,
                });
            }
            flat -= count;
        }
        None
    }

    /// All satellites in flat-index order.
    pub fn satellites(&self) -> impl Iterator<Item = SatelliteId> + '_ {
        self.layers.iter().enumerate().flat_map(|(layer, spec)| {
            let m = spec.sats_per_plane();
            (0..spec.planes).flat_map(move |plane| {
                (0..m).map(move |slot| SatelliteId { layer, plane, slot })
            })
        })
    }
}

/// Satellite identity within a [`ConstellationSpec`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SatelliteId {
    /// Index into [`ConstellationSpec::layers`].
    pub layer: usize,
    /// Orbital plane `p` within the layer.
    pub plane: u32,
    /// Position `m` within the plane (not a time slot).
    pub slot: u32,
}

/// Earth-centered inertial position at a given epoch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EciPosition {
    pub x_km: f64,
    pub y_km: f64,
    pub z_km: f64,
    pub epoch_s: f64,
}

impl EciPosition {
    pub fn norm_km(&self) -> f64 {
        libm::sqrt(self.x_km * self.x_km + self.y_km * self.y_km + self.z_km * self.z_km)
    }

    pub fn distance_km(&self, other: &EciPosition) -> f64 {
        let dx = self.x_km - other.x_km;
        let dy = self.y_km - other.y_km;
        let dz = self.z_km - other.z_km;
        libm::sqrt(dx * dx + dy * dy + dz * dz)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitalError {
    /// Layer or constellation parameters violate the Walker constraints.
    InvalidLayer,
    /// Satellite identity does not exist in the constellation.
    InvalidSatellite,
    /// Propagation time is negative.
    NegativeTime,
    /// Visibility is undefined for coincident positions.
    CoincidentPositions,
    /// A window query needs two distinct satellites.
    SameSatellite,
    /// Window bounds must satisfy `t0 < t1` with a positive step.
    InvalidWindow,
}

impl fmt::Display for OrbitalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            OrbitalError::InvalidLayer => "invalid layer or constellation parameters",
            OrbitalError::InvalidSatellite => "satellite not in constellation",
            OrbitalError::NegativeTime => "propagation time must be non-negative",
            OrbitalError::CoincidentPositions => "visibility undefined for coincident positions",
            OrbitalError::SameSatellite => "window query needs two distinct satellites",
            OrbitalError::InvalidWindow => "window needs t0 < t1 and step > 0",
        };
        f.write_str(msg)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for OrbitalError {}

/// Position of `sat` at `t_s` seconds past epoch.
///
/// The in-plane phase is `w*t + 2*pi*(m/M + p*F/(P*M))` and the plane is
/// rotated to right ascension `2*pi*p/P` at inclination `I`.
pub fn position(
    spec: &ConstellationSpec,
    sat: SatelliteId,
    t_s: f64,
) -> Result<EciPosition, OrbitalError> {
    let layer = spec.layers.get(sat.layer).ok_or(OrbitalError::InvalidSatellite)?;
    if sat.plane >= layer.planes || sat.slot >= layer.sats_per_plane() {
        return Err(OrbitalError::InvalidSatellite);
    }
    if !(t_s >= 0.0) {
        return Err(OrbitalError::NegativeTime);
    }

    let p = f64::from(sat.plane);
    let m = f64::from(sat.slot);
    let planes = f64::from(layer.planes);
    let per_plane = f64::from(layer.sats_per_plane());
    let f = f64::from(layer.phase_factor);

    let radius = layer.orbit_radius_km(spec.earth_radius_km);
    let incl = layer.inclination_deg * (PI / 180.0);
    let raan = TAU * p / planes;
    let phase =
        layer.angular_velocity_rad_s() * t_s + TAU * (m / per_plane + p * f / (planes * per_plane));

    let (sin_phase, cos_phase) = (libm::sin(phase), libm::cos(phase));
    let (sin_raan, cos_raan) = (libm::sin(raan), libm::cos(raan));
    let (sin_incl, cos_incl) = (libm::sin(incl), libm::cos(incl));

    Ok(EciPosition {
        x_km: radius * (cos_phase * cos_raan - sin_phase * cos_incl * sin_raan),
        y_km: radius * (cos_phase * sin_raan + sin_phase * cos_incl * cos_raan),
        z_km: radius * sin_phase * sin_incl,
        epoch_s: t_s,
    })
}

/// Whether the straight segment between two positions clears the occluding
/// sphere by at least `clearance_km`.
pub fn is_visible(
    a: &EciPosition,
    b: &EciPosition,
    earth_radius_km: f64,
    clearance_km: f64,
) -> Result<bool, OrbitalError> {
    let ab = (b.x_km - a.x_km, b.y_km - a.y_km, b.z_km - a.z_km);
    let len_sq = ab.0 * ab.0 + ab.1 * ab.1 + ab.2 * ab.2;
    if len_sq < 1e-9 {
        return Err(OrbitalError::CoincidentPositions);
    }
    // Closest point of the segment to the origin, clamped to the endpoints.
    let t = (-(a.x_km * ab.0 + a.y_km * ab.1 + a.z_km * ab.2) / len_sq).clamp(0.0, 1.0);
    let cx = a.x_km + t * ab.0;
    let cy = a.y_km + t * ab.1;
    let cz = a.z_km + t * ab.2;
    let closest = libm::sqrt(cx * cx + cy * cy + cz * cz);
    Ok(closest >= earth_radius_km + clearance_km)
}

/// Whether two satellites keep line of sight at every sample of the
/// half-open window `[t0, t1)` taken every `step_s` seconds.
pub fn visible_over_window(
    spec: &ConstellationSpec,
    a: SatelliteId,
    b: SatelliteId,
    t0_s: f64,
    t1_s: f64,
    step_s: f64,
) -> Result<bool, OrbitalError> {
    if a == b {
        return Err(OrbitalError::SameSatellite);
    }
    if !(t0_s < t1_s) || !(step_s > 0.0) {
        return Err(OrbitalError::InvalidWindow);
    }
    let mut k = 0u64;
    loop {
        let t = t0_s + (k as f64) * step_s;
        if t >= t1_s {
            return Ok(true);
        }
        let pa = position(spec, a, t)?;
        let pb = position(spec, b, t)?;
        if !is_visible(&pa, &pb, spec.earth_radius_km, spec.clearance_km)? {
            return Ok(false);
        }
        k += 1;
    }
}
