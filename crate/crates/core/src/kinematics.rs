//! Track speeds required by the pipe geometry and the speeds the differential
//! actually delivers, with slip and APE diagnostics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{module_path_radius, PipeSpec, Segment};
use crate::robot::{module_state, ModuleState, RobotConfig};
use crate::transmission::{solve_output_speeds, GearTrainConfig, Load, LoadState};
use crate::util::{ensure_finite, mean3};

pub const TRACK_NAMES: [&str; 3] = ["A", "B", "C"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpeedSource {
    Theoretical,
    Resolved,
}

/// Linear track speeds at the sprockets, in mm/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackSpeeds {
    pub speeds: [f64; 3],
    pub source: SpeedSource,
}

impl TrackSpeeds {
    pub fn mean(&self) -> f64 {
        mean3(self.speeds)
    }
}

/// Linear speed every track runs at when all loads are equal: `n · ω_u · r_sprocket`.
pub fn nominal_speed(gear: &GearTrainConfig, robot: &RobotConfig, input_speed: f64) -> f64 {
    gear.ratio() * input_speed * robot.sprocket_radius
}

/// Speeds the geometry requires for rolling without slip.
///
/// In a straight every track runs at `v_nominal`. In a bend track `i` follows
/// a path of radius `ρ_i` and must run at `v_nominal · ρ_i / R`, so the inner
/// track slows down, the outer ones speed up, and the mean is unchanged.
pub fn theoretical_speeds(
    segment: &Segment,
    roll: f64,
    v_nominal: f64,
    contact_radius: f64,
) -> Result<TrackSpeeds> {
    ensure_finite("nominal speed", v_nominal)?;
    let speeds = match segment {
        Segment::Straight(_) => [v_nominal; 3],
        Segment::Bend(b) => {
            let mut v = [0.0; 3];
            for (i, vi) in v.iter_mut().enumerate() {
                *vi = v_nominal * module_path_radius(b, roll, i, contact_radius)? / b.radius;
            }
            v
        }
    };
    Ok(TrackSpeeds {
        speeds,
        source: SpeedSource::Theoretical,
    })
}

/// Speeds delivered by the differential when the wall imposes the geometric
/// speeds on each track.
pub fn resolved_speeds(
    gear: &GearTrainConfig,
    robot: &RobotConfig,
    spec: &PipeSpec,
    segment: &Segment,
    roll: f64,
    input_speed: f64,
) -> Result<TrackSpeeds> {
    let state = module_state(robot, spec, segment, roll)?;
    let theo = theoretical_for_state(gear, robot, &state, segment, roll, input_speed)?;
    resolve_imposed(gear, robot, input_speed, theo.speeds, [0.0; 3])
}

pub(crate) fn theoretical_for_state(
    gear: &GearTrainConfig,
    robot: &RobotConfig,
    state: &ModuleState,
    segment: &Segment,
    roll: f64,
    input_speed: f64,
) -> Result<TrackSpeeds> {
    let v_nominal = nominal_speed(gear, robot, input_speed);
    theoretical_speeds(segment, roll, v_nominal, mean3(state.contact_radius))
}

/// Feeds wall-required linear speeds (plus zero-sum contact offsets) to the
/// differential as imposed output speeds and converts the solution back to
/// linear speeds.
pub(crate) fn resolve_imposed(
    gear: &GearTrainConfig,
    robot: &RobotConfig,
    input_speed: f64,
    required: [f64; 3],
    offsets: [f64; 3],
) -> Result<TrackSpeeds> {
    let rs = robot.sprocket_radius;
    let loads: [Load; 3] = std::array::from_fn(|i| Load::ImposedSpeed((required[i] + offsets[i]) / rs));
    let solution = solve_output_speeds(gear, input_speed, &LoadState::new(loads)?)?;
    Ok(TrackSpeeds {
        speeds: solution.speeds.map(|w| w * rs),
        source: SpeedSource::Resolved,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlipReport {
    /// `|resolved − theoretical|` per track, mm/s.
    pub slip: [f64; 3],
    /// Absolute percentage error per track; `None` when the theoretical speed
    /// is zero while the resolved one is not.
    pub ape: [Option<f64>; 3],
}

impl SlipReport {
    pub fn max_slip(&self) -> f64 {
        self.slip.iter().copied().fold(0.0, f64::max)
    }
}

pub fn slip_and_ape(resolved: &TrackSpeeds, theoretical: &TrackSpeeds) -> SlipReport {
    let mut slip = [0.0; 3];
    let mut ape = [None; 3];
    for i in 0..3 {
        let (r, t) = (resolved.speeds[i], theoretical.speeds[i]);
        slip[i] = (r - t).abs();
        ape[i] = if t != 0.0 {
            Some(100.0 * slip[i] / t.abs())
        } else if slip[i] == 0.0 {
            Some(0.0)
        } else {
            None
        };
    }
    SlipReport { slip, ape }
}

/// Seeded source of per-track contact irregularity.
///
/// A pattern `u_i ~ U[-1, 1]` is drawn on entry to each segment and held
/// until the next one. Offsets are `a · v_min · (u_i − u_{i+1}) / 2`, where
/// `v_min` is the slowest required track speed. They sum to zero, so the
/// differential can always absorb them, and each track's relative error
/// stays within `a`.
#[derive(Debug, Clone)]
pub struct Disturbance {
    amplitude: f64,
    rng: ChaCha8Rng,
    held: Option<(usize, [f64; 3])>,
}

impl Disturbance {
    pub fn new(amplitude: f64, seed: u64) -> Result<Self> {
        if !(amplitude.is_finite() && amplitude >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "disturbance amplitude must be >= 0, got {amplitude}"
            )));
        }
        Ok(Self {
            amplitude,
            rng: ChaCha8Rng::seed_from_u64(seed),
            held: None,
        })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// Offsets for the given segment and required track speeds.
    pub fn sample(&mut self, segment: usize, required: [f64; 3]) -> [f64; 3] {
        if self.amplitude == 0.0 {
            return [0.0; 3];
        }
        let u = match self.held {
            Some((k, u)) if k == segment => u,
            _ => {
                let u: [f64; 3] = std::array::from_fn(|_| self.rng.gen_range(-1.0..=1.0));
                self.held = Some((segment, u));
                u
            }
        };
        let v_min = required.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
        let scale = self.amplitude * v_min / 2.0;
        std::array::from_fn(|i| scale * (u[i] - u[(i + 1) % 3]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector3;
    use std::f64::consts::PI;

    fn bend(radius: f64) -> Segment {
        Segment::bend(radius, 90.0, Vector3::y())
    }

    fn assert_close(a: [f64; 3], b: [f64; 3], tol: f64) {
        for i in 0..3 {
            assert!((a[i] - b[i]).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn straight_speeds_are_nominal() {
        let seg = Segment::straight(100.0, Vector3::z());
        let v = theoretical_speeds(&seg, 0.7, 50.0, 40.0).unwrap();
        assert_eq!(v.speeds, [50.0; 3]);
    }

    #[test]
    fn bend_speeds_follow_path_radius() {
        // ρ = (160, 220, 220) for R = 200, r_c = 40, θ = 0.
        let v = theoretical_speeds(&bend(200.0), 0.0, 50.0, 40.0).unwrap();
        assert_close(v.speeds, [40.0, 55.0, 55.0], 1e-12);
        let v = theoretical_speeds(&bend(200.0), PI, 50.0, 40.0).unwrap();
        assert_close(v.speeds, [60.0, 45.0, 45.0], 1e-12);
        assert!((v.speeds.iter().sum::<f64>() - 150.0).abs() < 1e-12);
        assert!(theoretical_speeds(&bend(200.0), 0.0, 50.0, 200.0).is_err());
    }

    #[test]
    fn resolved_matches_theoretical() {
        let gear = GearTrainConfig::default();
        let robot = RobotConfig {
            sprocket_radius: 10.0,
            length: 50.0,
            spring_stiffness: 2.0,
            preload_compression: 0.0,
            max_compression: 16.0,
            max_tilt_deg: 10.0,
            nominal_body_radius: 40.0,
        };
        let spec = PipeSpec {
            inner_radius: 40.0,
            standard_label: String::new(),
        };
        // R = 200 makes the sagitta 50²/1600 = 1.5625, so r_c = 38.4375.
        let seg = bend(200.0);
        let resolved = resolved_speeds(&gear, &robot, &spec, &seg, 0.0, 5.0).unwrap();
        let rc = 40.0 - 50.0 * 50.0 / 1600.0;
        let theo = theoretical_speeds(&seg, 0.0, 50.0, rc).unwrap();
        assert_eq!(resolved.source, SpeedSource::Resolved);
        assert_close(resolved.speeds, theo.speeds, 1e-12);
        assert!((resolved.mean() - 50.0).abs() < 1e-12);

        let straight = Segment::straight(10.0, Vector3::z());
        let r = resolved_speeds(&gear, &robot, &spec, &straight, 0.0, 5.0).unwrap();
        assert_close(r.speeds, [50.0; 3], 1e-12);
    }

    #[test]
    fn imposing_the_worked_example() {
        let gear = GearTrainConfig::default();
        let robot = RobotConfig {
            sprocket_radius: 10.0,
            length: 50.0,
            spring_stiffness: 2.0,
            preload_compression: 0.0,
            max_compression: 16.0,
            max_tilt_deg: 10.0,
            nominal_body_radius: 40.0,
        };
        let r = resolve_imposed(&gear, &robot, 5.0, [40.0, 55.0, 55.0], [0.0; 3]).unwrap();
        assert_close(r.speeds, [40.0, 55.0, 55.0], 1e-12);
        // Requirements that disagree with the input are rejected.
        assert!(resolve_imposed(&gear, &robot, 5.0, [40.0, 40.0, 40.0], [0.0; 3]).is_err());
    }

    #[test]
    fn ape_examples() {
        let t = TrackSpeeds {
            speeds: [100.0, 40.0, 55.0],
            source: SpeedSource::Theoretical,
        };
        let same = slip_and_ape(&TrackSpeeds { source: SpeedSource::Resolved, ..t }, &t);
        assert_eq!(same.slip, [0.0; 3]);
        assert_eq!(same.ape, [Some(0.0); 3]);

        let r = TrackSpeeds {
            speeds: [97.5, 40.0, 55.0],
            source: SpeedSource::Resolved,
        };
        let rep = slip_and_ape(&r, &t);
        assert!((rep.ape[0].unwrap() - 2.5).abs() < 1e-12);
        assert_eq!(rep.slip[0], 2.5);
    }

    #[test]
    fn zero_theoretical_flags_ape() {
        let t = TrackSpeeds {
            speeds: [0.0, 1.0, 1.0],
            source: SpeedSource::Theoretical,
        };
        let r = TrackSpeeds {
            speeds: [0.5, 1.0, 1.0],
            source: SpeedSource::Resolved,
        };
        let rep = slip_and_ape(&r, &t);
        assert_eq!(rep.ape[0], None);
        assert_eq!(rep.slip[0], 0.5);
    }

    #[test]
    fn disturbance_is_zero_sum_and_bounded() {
        let mut d = Disturbance::new(0.025, 7).unwrap();
        let required = [33.6, 70.7, 70.7];
        for k in 0..1000 {
            let o = d.sample(k, required);
            assert!(o.iter().sum::<f64>().abs() < 1e-12);
            for i in 0..3 {
                assert!(o[i].abs() <= 0.025 * required[i] + 1e-12);
            }
        }
        let mut a = Disturbance::new(0.025, 7).unwrap();
        let mut b = Disturbance::new(0.025, 7).unwrap();
        assert_eq!(a.sample(0, required), b.sample(0, required));
        assert_eq!(Disturbance::new(0.0, 1).unwrap().sample(0, required), [0.0; 3]);
        assert!(Disturbance::new(-0.1, 1).is_err());
    }

    #[test]
    fn disturbance_is_held_within_a_segment() {
        let mut d = Disturbance::new(0.025, 3).unwrap();
        let first = d.sample(0, [60.0; 3]);
        assert_eq!(d.sample(0, [60.0; 3]), first);
        assert_ne!(d.sample(1, [60.0; 3]), first);
    }
}
