//! Spherical-Earth geometry and kinematics.
//!
//! Positions live in an Earth-centered frame with the Earth treated as a
//! non-rotating sphere of radius [`EARTH_RADIUS`]. Satellites follow circular
//! Keplerian orbits, aircraft follow constant-speed great circles.

use std::f64::consts::PI;
use std::ops::Sub;

use serde::{Deserialize, Serialize};

use crate::error::GeomError;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Mean spherical Earth radius, m.
pub const EARTH_RADIUS: f64 = 6_371_000.0;
/// Earth gravitational parameter, m^3/s^2.
pub const EARTH_MU: f64 = 3.986_004_418e14;

/// Lowest altitude accepted for an orbital shell, m.
pub const MIN_ORBIT_ALTITUDE: f64 = 160_000.0;

/// Cartesian position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EcefPosition {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl EcefPosition {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &EcefPosition) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn scale(&self, k: f64) -> EcefPosition {
        EcefPosition::new(self.x * k, self.y * k, self.z * k)
    }

    fn add(&self, other: &EcefPosition) -> EcefPosition {
        EcefPosition::new(self.x + other.x, self.y + other.y, self.z + other.z)
    }

    fn unit(&self) -> EcefPosition {
        self.scale(1.0 / self.norm())
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Sub for EcefPosition {
    type Output = EcefPosition;

    fn sub(self, rhs: EcefPosition) -> EcefPosition {
        EcefPosition::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

/// Latitude/longitude in degrees plus altitude above the sphere in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodeticPoint {
    pub latitude: f64,
    pub longitude: f64,
    pub altitude: f64,
}

impl GeodeticPoint {
    pub fn new(latitude: f64, longitude: f64, altitude: f64) -> Result<Self, GeomError> {
        let p = Self {
            latitude,
            longitude,
            altitude,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), GeomError> {
        if !(-90.0..=90.0).contains(&self.latitude) {
            return Err(GeomError::Latitude(self.latitude));
        }
        if !(self.longitude > -180.0 && self.longitude <= 180.0) {
            return Err(GeomError::Longitude(self.longitude));
        }
        if !(self.altitude >= 0.0) || !self.altitude.is_finite() {
            return Err(GeomError::Altitude(self.altitude));
        }
        Ok(())
    }

    /// Same horizontal location at a different altitude.
    pub fn at_altitude(&self, altitude: f64) -> GeodeticPoint {
        GeodeticPoint { altitude, ..*self }
    }
}

/// A Walker-style shell of circular orbits.
///
/// Plane `p` has its ascending node at `raan_offset + p * raan_spacing` and
/// its first slot advanced by `p * phase_offset`; slots within a plane are
/// evenly spaced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitShell {
    pub plane_count: usize,
    pub sats_per_plane: usize,
    /// meters above the sphere
    pub altitude: f64,
    /// degrees
    pub inclination: f64,
    /// degrees between adjacent ascending nodes
    pub raan_spacing: f64,
    /// degrees, ascending node of plane 0
    #[serde(default)]
    pub raan_offset: f64,
    /// degrees of along-track phase added per plane index
    pub phase_offset: f64,
    /// seconds; slot positions are referenced to this instant
    pub epoch: f64,
}

impl OrbitShell {
    /// 6 x 11 polar shell at 781 km.
    pub fn iridium_next() -> Self {
        Self {
            plane_count: 6,
            sats_per_plane: 11,
            altitude: 781_000.0,
            inclination: 86.4,
            raan_spacing: 31.6,
            raan_offset: 0.0,
            phase_offset: 360.0 / 22.0,
            epoch: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), GeomError> {
        if self.plane_count == 0 || self.sats_per_plane == 0 {
            return Err(GeomError::EmptyShell);
        }
        if !(self.altitude > MIN_ORBIT_ALTITUDE) || !self.altitude.is_finite() {
            return Err(GeomError::OrbitAltitude(self.altitude));
        }
        Ok(())
    }

    pub fn total_satellites(&self) -> usize {
        self.plane_count * self.sats_per_plane
    }

    pub fn radius(&self) -> f64 {
        EARTH_RADIUS + self.altitude
    }

    /// Mean motion in rad/s.
    pub fn angular_rate(&self) -> f64 {
        (EARTH_MU / self.radius().powi(3)).sqrt()
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.angular_rate()
    }
}

/// Constant-speed great-circle flight at a single cruise altitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlightRoute {
    pub origin: GeodeticPoint,
    pub destination: GeodeticPoint,
    /// meters
    pub cruise_altitude: f64,
    /// seconds
    pub departure: f64,
    /// meters/second along the cruise-altitude sphere
    pub speed: f64,
}

impl FlightRoute {
    pub fn validate(&self) -> Result<(), GeomError> {
        self.origin.validate()?;
        self.destination.validate()?;
        if !(self.speed > 0.0) || !self.speed.is_finite() {
            return Err(GeomError::Speed(self.speed));
        }
        if !(self.cruise_altitude >= 0.0) {
            return Err(GeomError::Altitude(self.cruise_altitude));
        }
        if central_angle(
            &geodetic_to_ecef(&self.origin),
            &geodetic_to_ecef(&self.destination),
        ) < 1e-12
        {
            return Err(GeomError::DegenerateRoute);
        }
        Ok(())
    }

    fn cruise_radius(&self) -> f64 {
        EARTH_RADIUS + self.cruise_altitude
    }

    /// Central angle between origin and destination, radians.
    pub fn total_angle(&self) -> f64 {
        central_angle(
            &geodetic_to_ecef(&self.origin),
            &geodetic_to_ecef(&self.destination),
        )
    }

    pub fn arrival(&self) -> f64 {
        self.departure + self.total_angle() * self.cruise_radius() / self.speed
    }
}

/// Geocentric angle between two positions, radians.
pub fn central_angle(a: &EcefPosition, b: &EcefPosition) -> f64 {
    let cos = (a.dot(b) / (a.norm() * b.norm())).clamp(-1.0, 1.0);
    cos.acos()
}

pub fn geodetic_to_ecef(p: &GeodeticPoint) -> EcefPosition {
    let r = EARTH_RADIUS + p.altitude;
    let lat = p.latitude.to_radians();
    let lon = p.longitude.to_radians();
    EcefPosition::new(
        r * lat.cos() * lon.cos(),
        r * lat.cos() * lon.sin(),
        r * lat.sin(),
    )
}

pub fn ecef_to_geodetic(p: &EcefPosition) -> GeodeticPoint {
    let r = p.norm();
    let latitude = (p.z / r).clamp(-1.0, 1.0).asin().to_degrees();
    let mut longitude = p.y.atan2(p.x).to_degrees();
    if longitude <= -180.0 {
        longitude += 360.0;
    }
    GeodeticPoint {
        latitude,
        longitude,
        altitude: (r - EARTH_RADIUS).max(0.0),
    }
}

pub fn propagate_satellite(
    shell: &OrbitShell,
    plane: usize,
    slot: usize,
    t: f64,
) -> Result<EcefPosition, GeomError> {
    if plane >= shell.plane_count {
        return Err(GeomError::PlaneIndex {
            plane,
            planes: shell.plane_count,
        });
    }
    if slot >= shell.sats_per_plane {
        return Err(GeomError::SlotIndex {
            slot,
            slots: shell.sats_per_plane,
        });
    }
    let r = shell.radius();
    let raan = (shell.raan_offset + plane as f64 * shell.raan_spacing).to_radians();
    let inc = shell.inclination.to_radians();
    let slot_angle = 2.0 * PI * slot as f64 / shell.sats_per_plane as f64;
    // Reduce the time term modulo one period first so that whole periods map
    // back onto the epoch position without accumulating rounding.
    let elapsed = (t - shell.epoch).rem_euclid(shell.period());
    let u = (plane as f64 * shell.phase_offset).to_radians()
        + slot_angle
        + shell.angular_rate() * elapsed;

    let (su, cu) = u.sin_cos();
    let (so, co) = raan.sin_cos();
    let (si, ci) = inc.sin_cos();
    Ok(EcefPosition::new(
        r * (co * cu - so * su * ci),
        r * (so * cu + co * su * ci),
        r * su * si,
    ))
}

/// Aircraft position at `t`, or `None` before departure and after arrival.
pub fn propagate_aircraft(route: &FlightRoute, t: f64) -> Option<EcefPosition> {
    if t < route.departure || t > route.arrival() {
        return None;
    }
    let a = geodetic_to_ecef(&route.origin).unit();
    let b = geodetic_to_ecef(&route.destination).unit();
    let total = central_angle(&a, &b);
    let angle = (route.speed * (t - route.departure) / route.cruise_radius()).min(total);
    let sin_total = total.sin();
    let dir = if sin_total.abs() < 1e-15 {
        a
    } else {
        let wa = (total - angle).sin() / sin_total;
        let wb = angle.sin() / sin_total;
        a.scale(wa).add(&b.scale(wb)).unit()
    };
    Some(dir.scale(route.cruise_radius()))
}

pub fn distance(a: &EcefPosition, b: &EcefPosition) -> f64 {
    (*a - *b).norm()
}

/// Segment visibility against a spherical clearance shell.
///
/// When either endpoint sits below `EARTH_RADIUS + clearance_altitude` the
/// test falls back to the Earth's surface itself; otherwise the whole
/// segment must stay outside the clearance shell.
pub fn line_of_sight(a: &EcefPosition, b: &EcefPosition, clearance_altitude: f64) -> bool {
    let shell = EARTH_RADIUS + clearance_altitude;
    let threshold = if a.norm() >= shell && b.norm() >= shell {
        shell
    } else {
        EARTH_RADIUS
    };
    let ab = *b - *a;
    let len2 = ab.dot(&ab);
    let closest = if len2 == 0.0 {
        *a
    } else {
        let s = (-a.dot(&ab) / len2).clamp(0.0, 1.0);
        a.add(&ab.scale(s))
    };
    // millimeter slack so that surface endpoints are not self-occluding
    closest.norm() >= threshold - 1e-3
}

/// Elevation of `sky` above the local horizontal plane at `ground`, degrees.
pub fn elevation_angle(ground: &EcefPosition, sky: &EcefPosition) -> f64 {
    let v = *sky - *ground;
    let n = v.norm();
    if n == 0.0 {
        return 90.0;
    }
    let up = ground.unit();
    (v.dot(&up) / n).clamp(-1.0, 1.0).asin().to_degrees()
}

/// One-way propagation delay over `d` meters.
pub fn propagation_latency(d: f64) -> f64 {
    d / SPEED_OF_LIGHT
}
