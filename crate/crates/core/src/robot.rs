//! Robot parameters and the spring-loaded wall-press model.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{Bend, PipeSpec, Segment};

pub const NUM_MODULES: usize = 3;
pub const ROLLERS_PER_MODULE: usize = 3;
pub const DEFAULT_MAX_COMPRESSION: f64 = 16.0;
pub const DEFAULT_SPRING_STIFFNESS: f64 = 2.0;
pub const DEFAULT_MAX_TILT_DEG: f64 = 10.0;

/// Angular offset of module `i` from the robot reference, in radians.
pub fn module_angle(i: usize) -> f64 {
    2.0 * PI * i as f64 / NUM_MODULES as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotConfig {
    /// Driving sprocket radius in mm.
    pub sprocket_radius: f64,
    /// Rigid body length `L` in mm.
    pub length: f64,
    /// Spring stiffness in N/mm.
    pub spring_stiffness: f64,
    /// Spring compression at which the contact sits at `nominal_body_radius`, in mm.
    pub preload_compression: f64,
    pub max_compression: f64,
    /// Largest asymmetric (front/rear) tilt a module tolerates, in degrees.
    pub max_tilt_deg: f64,
    /// Contact radius measured from the robot axis at preload compression, in mm.
    pub nominal_body_radius: f64,
}

impl RobotConfig {
    pub fn check(&self) -> Result<()> {
        let positive = [
            ("sprocket_radius", self.sprocket_radius),
            ("length", self.length),
            ("spring_stiffness", self.spring_stiffness),
            ("max_tilt", self.max_tilt_deg),
            ("nominal_body_radius", self.nominal_body_radius),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.preload_compression.is_finite() && self.preload_compression >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "preload compression must be >= 0, got {}",
                self.preload_compression
            )));
        }
        if !(self.max_compression.is_finite()
            && self.preload_compression <= self.max_compression)
        {
            return Err(Error::InvalidArgument(format!(
                "preload compression {} exceeds max compression {}",
                self.preload_compression, self.max_compression
            )));
        }
        Ok(())
    }

    /// Spring force in N at compression `delta`.
    pub fn spring_force(&self, delta: f64) -> f64 {
        self.spring_stiffness * delta
    }
}

/// Per-module spring state at one robot pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModuleState {
    pub compression: [f64; NUM_MODULES],
    pub tilt_deg: [f64; NUM_MODULES],
    pub contact_radius: [f64; NUM_MODULES],
}

impl ModuleState {
    pub fn max_compression(&self) -> f64 {
        self.compression.iter().copied().fold(f64::MIN, f64::max)
    }

    pub fn max_abs_tilt(&self) -> f64 {
        self.tilt_deg.iter().map(|t| t.abs()).fold(0.0, f64::max)
    }
}

/// Chord height of a rigid body of length `length` spanning an arc of radius `radius`.
pub fn sagitta(length: f64, radius: f64) -> f64 {
    length * length / (8.0 * radius)
}

fn check_limit(cfg: &RobotConfig, delta: f64, what: &str) -> Result<()> {
    if delta > cfg.max_compression {
        return Err(Error::NoFit(format!(
            "{what} requires {delta:.3} mm compression, limit is {} mm",
            cfg.max_compression
        )));
    }
    Ok(())
}

/// Compression of each module in a straight pipe of `spec`.
pub fn compression_in_straight(cfg: &RobotConfig, spec: &PipeSpec) -> Result<[f64; NUM_MODULES]> {
    cfg.check()?;
    let delta = cfg.preload_compression + (cfg.nominal_body_radius - spec.inner_radius);
    if delta < 0.0 {
        return Err(Error::NoFit(format!(
            "pipe radius {} mm exceeds the robot's reach; tracks lose wall contact",
            spec.inner_radius
        )));
    }
    check_limit(cfg, delta, "straight pipe")?;
    Ok([delta; NUM_MODULES])
}

/// Compression of each module inside `bend`. The rigid body's chord across
/// the bend shrinks the clear bore by the sagitta `L²/(8R)`, which every module
/// absorbs on top of its straight-pipe compression.
pub fn compression_in_bend(
    cfg: &RobotConfig,
    spec: &PipeSpec,
    bend: &Bend,
    roll: f64,
) -> Result<[f64; NUM_MODULES]> {
    if !roll.is_finite() {
        return Err(Error::InvalidArgument("roll must be finite".into()));
    }
    let straight = compression_in_straight(cfg, spec)?;
    let extra = sagitta(cfg.length, bend.radius);
    let compression = straight.map(|d| d + extra);
    for d in compression {
        check_limit(cfg, d, "bend")?;
    }
    Ok(compression)
}

/// Front/rear tilt of each module inside `bend`, in degrees. The chord meets
/// the arc at `atan(L / 2R)`; each module sees the bend-plane component.
pub fn tilt_in_bend(cfg: &RobotConfig, bend: &Bend, roll: f64) -> [f64; NUM_MODULES] {
    let chord_angle = (cfg.length / (2.0 * bend.radius)).atan().to_degrees();
    std::array::from_fn(|i| chord_angle * (roll + module_angle(i)).cos())
}

/// Distance from the pipe axis to a module's contact point at compression `delta`.
pub fn contact_radius(cfg: &RobotConfig, delta: f64) -> Result<f64> {
    if !(delta.is_finite() && delta >= 0.0 && delta <= cfg.max_compression) {
        return Err(Error::InvalidArgument(format!(
            "compression {delta} outside [0, {}]",
            cfg.max_compression
        )));
    }
    Ok((cfg.nominal_body_radius - (delta - cfg.preload_compression)).max(0.0))
}

/// Full spring state for the robot on `segment`, enforcing compression and tilt limits.
pub fn module_state(
    cfg: &RobotConfig,
    spec: &PipeSpec,
    segment: &Segment,
    roll: f64,
) -> Result<ModuleState> {
    let (compression, tilt_deg) = match segment {
        Segment::Straight(_) => (compression_in_straight(cfg, spec)?, [0.0; NUM_MODULES]),
        Segment::Bend(b) => (
            compression_in_bend(cfg, spec, b, roll)?,
            tilt_in_bend(cfg, b, roll),
        ),
    };
    for (i, t) in tilt_deg.iter().enumerate() {
        if t.abs() > cfg.max_tilt_deg {
            return Err(Error::NoFit(format!(
                "module {i} tilts {:.3}°, limit is {}°",
                t.abs(),
                cfg.max_tilt_deg
            )));
        }
    }
    let mut contact = [0.0; NUM_MODULES];
    for (c, d) in contact.iter_mut().zip(compression) {
        *c = contact_radius(cfg, d)?;
    }
    Ok(ModuleState {
        compression,
        tilt_deg,
        contact_radius: contact,
    })
}
