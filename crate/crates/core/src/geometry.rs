//! Pipe networks as arc-length parameterized chains of straights and bends.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Rotation3, Unit, Vector3};

use crate::error::{Error, Result};

/// Maximum angular mismatch allowed between consecutive tangents, in radians.
pub const CONTINUITY_TOLERANCE: f64 = 1e-9;

/// Largest bend sweep a network may contain, in degrees.
pub const MAX_SWEEP_DEG: f64 = 180.0;

/// Bend plane normal used when a scenario does not specify one.
pub fn default_bend_normal() -> Vector3<f64> {
    Vector3::y()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipeSpec {
    /// Inner radius `r` in mm.
    pub inner_radius: f64,
    pub standard_label: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Straight {
    pub length: f64,
    pub axis: Vector3<f64>,
}

/// A circular bend of the centerline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bend {
    /// Centerline bend radius `R` in mm.
    pub radius: f64,
    pub sweep_deg: f64,
    /// Axis the tangent rotates about (right-hand rule).
    pub normal: Vector3<f64>,
}

impl Bend {
    pub fn sweep_rad(&self) -> f64 {
        self.sweep_deg.to_radians()
    }

    pub fn length(&self) -> f64 {
        self.radius * self.sweep_rad()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Straight(Straight),
    Bend(Bend),
}

impl Segment {
    pub fn straight(length: f64, axis: Vector3<f64>) -> Self {
        Segment::Straight(Straight { length, axis })
    }

    pub fn bend(radius: f64, sweep_deg: f64, normal: Vector3<f64>) -> Self {
        Segment::Bend(Bend {
            radius,
            sweep_deg,
            normal,
        })
    }

    /// Centerline length in mm.
    pub fn length(&self) -> f64 {
        match self {
            Segment::Straight(s) => s.length,
            Segment::Bend(b) => b.length(),
        }
    }

    pub fn as_bend(&self) -> Option<&Bend> {
        match self {
            Segment::Bend(b) => Some(b),
            Segment::Straight(_) => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Segment::Straight(_) => "straight",
            Segment::Bend(_) => "bend",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipeNetwork {
    pub spec: PipeSpec,
    pub segments: Vec<Segment>,
    /// Optional human-readable name per segment ("vertical", "elbow", ...).
    pub labels: Vec<Option<String>>,
    /// Centerline tangent at arc length 0.
    pub start_tangent: Vector3<f64>,
}

impl PipeNetwork {
    /// Builds a network starting at the origin. The start tangent is taken from
    /// the first straight's axis, or +z when the network opens with a bend.
    pub fn new(spec: PipeSpec, segments: Vec<Segment>) -> Self {
        let start_tangent = match segments.first() {
            Some(Segment::Straight(s)) => s.axis,
            _ => Vector3::z(),
        };
        let labels = vec![None; segments.len()];
        Self {
            spec,
            segments,
            labels,
            start_tangent,
        }
    }

    pub fn with_labels(mut self, labels: Vec<Option<String>>) -> Self {
        self.labels = labels;
        self.labels.resize(self.segments.len(), None);
        self
    }

    pub fn with_start_tangent(mut self, tangent: Vector3<f64>) -> Self {
        self.start_tangent = tangent;
        self
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.labels.get(index).and_then(|l| l.as_deref())
    }

    /// Arc length at which each segment begins.
    pub fn segment_starts(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.segments
            .iter()
            .map(|seg| {
                let start = acc;
                acc += seg.length();
                start
            })
            .collect()
    }

    /// Entry point and tangent of every segment, plus the exit frame of the last one.
    pub fn frames(&self) -> Vec<Frame> {
        let mut frames = Vec::with_capacity(self.segments.len() + 1);
        let mut frame = Frame {
            point: Vector3::zeros(),
            tangent: normalize_or(self.start_tangent, Vector3::z()),
        };
        frames.push(frame);
        for seg in &self.segments {
            frame = frame.advance(seg, seg.length());
            frames.push(frame);
        }
        frames
    }
}

/// A point on the centerline together with its unit tangent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub point: Vector3<f64>,
    pub tangent: Vector3<f64>,
}

impl Frame {
    /// Moves `offset` mm along `seg`, starting from this frame.
    fn advance(&self, seg: &Segment, offset: f64) -> Frame {
        match seg {
            Segment::Straight(s) => {
                let axis = normalize_or(s.axis, self.tangent);
                Frame {
                    point: self.point + axis * offset,
                    tangent: axis,
                }
            }
            Segment::Bend(b) => {
                let normal = Unit::new_normalize(normalize_or(b.normal, default_bend_normal()));
                let toward_center = normal.cross(&self.tangent);
                let center = self.point + toward_center * b.radius;
                let rot = Rotation3::from_axis_angle(&normal, offset / b.radius);
                Frame {
                    point: center + rot * (-toward_center * b.radius),
                    tangent: rot * self.tangent,
                }
            }
        }
    }
}

fn normalize_or(v: Vector3<f64>, fallback: Vector3<f64>) -> Vector3<f64> {
    v.try_normalize(f64::EPSILON).unwrap_or(fallback)
}

fn angle_between(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

pub fn total_length(net: &PipeNetwork) -> f64 {
    net.segments.iter().fold(0.0, |acc, seg| acc + seg.length())
}

/// Result of looking up an arc-length position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Location {
    pub segment: usize,
    /// Distance from the start of the segment in mm.
    pub offset: f64,
    pub point: Vector3<f64>,
    pub tangent: Vector3<f64>,
}

/// Finds the segment containing arc length `s`. A position exactly on a
/// joint belongs to the later segment; `s == total_length` maps to the end of
/// the last one.
pub fn locate(net: &PipeNetwork, s: f64) -> Result<Location> {
    if net.segments.is_empty() {
        return Err(Error::OutOfBounds("network has no segments".into()));
    }
    let total = total_length(net);
    if !(s >= 0.0 && s <= total) {
        return Err(Error::OutOfBounds(format!(
            "arc length {s} outside [0, {total}]"
        )));
    }
    let starts = net.segment_starts();
    let segment = starts.partition_point(|&start| start <= s).saturating_sub(1);
    let offset = (s - starts[segment]).min(net.segments[segment].length());
    let entry = net.frames()[segment];
    let frame = entry.advance(&net.segments[segment], offset);
    Ok(Location {
        segment,
        offset,
        point: frame.point,
        tangent: frame.tangent,
    })
}

/// Radius of the path traced by module `module_index`'s contact point inside `bend`.
///
/// `roll` is the robot's roll orientation, zero when module 0 faces the bend
/// center, and `contact_radius` is the distance from the pipe axis to the
/// contact point. The three path radii always average to `R`.
pub fn module_path_radius(
    bend: &Bend,
    roll: f64,
    module_index: usize,
    contact_radius: f64,
) -> Result<f64> {
    if module_index >= 3 {
        return Err(Error::InvalidArgument(format!(
            "module index {module_index} out of range"
        )));
    }
    if !roll.is_finite() || !contact_radius.is_finite() {
        return Err(Error::InvalidArgument(
            "roll and contact radius must be finite".into(),
        ));
    }
    if contact_radius >= bend.radius {
        return Err(Error::InvalidGeometry(format!(
            "contact radius {contact_radius} mm must be smaller than bend radius {} mm",
            bend.radius
        )));
    }
    let angle = roll + 2.0 * PI * module_index as f64 / 3.0;
    Ok(bend.radius - contact_radius * angle.cos())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    EmptyNetwork,
    PipeRadius,
    Length,
    Axis,
    Radius,
    Sweep,
    Normal,
    Continuity,
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::EmptyNetwork => "empty-network",
            Rule::PipeRadius => "pipe-radius-violation",
            Rule::Length => "length-violation",
            Rule::Axis => "axis-violation",
            Rule::Radius => "radius-violation",
            Rule::Sweep => "sweep-violation",
            Rule::Normal => "normal-violation",
            Rule::Continuity => "continuity-violation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Site {
    Network,
    Segment(usize),
    /// Joint between segment `k` and `k + 1`.
    Joint(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub site: Site,
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.site {
            Site::Network => write!(f, "{}: {}", self.rule.name(), self.detail),
            Site::Segment(k) => write!(f, "{} @ seg {k}: {}", self.rule.name(), self.detail),
            Site::Joint(k) => write!(f, "{} @ joint {k}: {}", self.rule.name(), self.detail),
        }
    }
}

fn is_unit(v: &Vector3<f64>) -> bool {
    v.iter().all(|c| c.is_finite()) && (v.norm() - 1.0).abs() < 1e-9
}

/// Checks every segment invariant and tangent continuity. An empty list means
/// the network is valid.
pub fn validate(net: &PipeNetwork) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |site, rule, detail: String| out.push(Violation { site, rule, detail });

    let r = net.spec.inner_radius;
    if !(r.is_finite() && r > 0.0) {
        push(
            Site::Network,
            Rule::PipeRadius,
            format!("inner radius must be > 0, got {r}"),
        );
    }
    if net.segments.is_empty() {
        push(Site::Network, Rule::EmptyNetwork, "no segments".into());
        return out;
    }
    if !is_unit(&net.start_tangent) {
        push(
            Site::Network,
            Rule::Axis,
            "start tangent must be a unit vector".into(),
        );
    }

    let mut tangent = normalize_or(net.start_tangent, Vector3::z());
    for (k, seg) in net.segments.iter().enumerate() {
        let site = Site::Segment(k);
        match seg {
            Segment::Straight(s) => {
                if !(s.length.is_finite() && s.length > 0.0) {
                    push(site, Rule::Length, format!("length must be > 0, got {}", s.length));
                }
                if !is_unit(&s.axis) {
                    push(site, Rule::Axis, "axis must be a unit vector".into());
                } else {
                    let mismatch = angle_between(&tangent, &s.axis);
                    if mismatch >= CONTINUITY_TOLERANCE {
                        let joint = if k == 0 { Site::Network } else { Site::Joint(k - 1) };
                        push(
                            joint,
                            Rule::Continuity,
                            format!("tangent mismatch of {mismatch:e} rad entering seg {k}"),
                        );
                    }
                }
            }
            Segment::Bend(b) => {
                if !(b.radius.is_finite() && b.radius > r) {
                    push(
                        site,
                        Rule::Radius,
                        format!("bend radius {} mm must exceed pipe radius {r} mm", b.radius),
                    );
                }
                if !(b.sweep_deg.is_finite() && b.sweep_deg > 0.0 && b.sweep_deg <= MAX_SWEEP_DEG)
                {
                    push(
                        site,
                        Rule::Sweep,
                        format!("sweep {}° outside (0, {MAX_SWEEP_DEG}]", b.sweep_deg),
                    );
                }
                if !is_unit(&b.normal) {
                    push(site, Rule::Normal, "bend normal must be a unit vector".into());
                } else if b.normal.dot(&tangent).abs() >= CONTINUITY_TOLERANCE {
                    push(
                        site,
                        Rule::Normal,
                        "bend normal must be perpendicular to the entry tangent".into(),
                    );
                }
            }
        }
        let entry = Frame {
            point: Vector3::zeros(),
            tangent,
        };
        tangent = entry.advance(seg, seg.length().max(0.0)).tangent;
    }
    out
}
