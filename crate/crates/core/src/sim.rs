//! Fixed-step traversal of a pipe network.
//!
//! The robot's reference point advances along the centerline at the mean of
//! the three resolved track speeds. Each step uses the speeds evaluated at
//! the start of the step (rectangle rule) to accumulate track distances, then
//! re-evaluates springs, speeds and slip at the new position.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{locate, total_length, validate, PipeNetwork};
use crate::kinematics::{
    nominal_speed, resolve_imposed, slip_and_ape, theoretical_for_state, Disturbance,
    SpeedSource, TrackSpeeds, TRACK_NAMES,
};
use crate::robot::{module_state, RobotConfig};
use crate::transmission::GearTrainConfig;
use crate::util::mean3;

pub const DEFAULT_DT: f64 = 0.01;

/// Fraction of each segment's arc, centered on its midpoint, used for speed averaging.
pub const MIDPOINT_WINDOW: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisturbanceConfig {
    /// Relative amplitude, e.g. 0.025 for 2.5 %.
    pub amplitude: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    pub dt: f64,
    /// Constant input shaft speed in rad/s.
    pub input_speed: f64,
    /// Robot roll orientation in radians; held for the whole run.
    pub roll: f64,
    pub disturbance: Option<DisturbanceConfig>,
    pub t_max: Option<f64>,
}

impl SimParams {
    pub fn new(input_speed: f64) -> Self {
        Self {
            dt: DEFAULT_DT,
            input_speed,
            roll: 0.0,
            disturbance: None,
            t_max: None,
        }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.input_speed.is_finite() && self.input_speed > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "input speed must be > 0, got {}",
                self.input_speed
            )));
        }
        if !self.roll.is_finite() {
            return Err(Error::InvalidArgument("roll must be finite".into()));
        }
        if let Some(t) = self.t_max {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::InvalidArgument(format!("t_max must be > 0, got {t}")));
            }
        }
        Ok(())
    }
}

/// One row of the trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub t: f64,
    pub s: f64,
    pub segment: usize,
    pub roll: f64,
    pub resolved: [f64; 3],
    pub theoretical: [f64; 3],
    pub compression: [f64; 3],
    pub tilt_deg: [f64; 3],
    pub slip: [f64; 3],
    pub distance: [f64; 3],
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub records: Vec<Record>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&Record> {
        self.records.last()
    }
}

/// Everything carried from one step to the next.
#[derive(Debug, Clone)]
pub struct SimState {
    pub step: u64,
    pub record: Record,
    disturbance: Option<Disturbance>,
}

struct Pose {
    segment: usize,
    compression: [f64; 3],
    tilt_deg: [f64; 3],
    resolved: TrackSpeeds,
    theoretical: TrackSpeeds,
}

fn evaluate(
    net: &PipeNetwork,
    robot: &RobotConfig,
    gear: &GearTrainConfig,
    params: &SimParams,
    s: f64,
    disturbance: Option<&mut Disturbance>,
) -> Result<Pose> {
    let loc = locate(net, s)?;
    let segment = &net.segments[loc.segment];
    let state = module_state(robot, &net.spec, segment, params.roll).map_err(|e| match e {
        Error::NoFit(msg) => Error::NoFit(format!("segment {}: {msg}", loc.segment)),
        other => other,
    })?;
    let theoretical =
        theoretical_for_state(gear, robot, &state, segment, params.roll, params.input_speed)?;
    let offsets = match disturbance {
        Some(d) => d.sample(loc.segment, theoretical.speeds),
        None => [0.0; 3],
    };
    let resolved = resolve_imposed(gear, robot, params.input_speed, theoretical.speeds, offsets)?;
    Ok(Pose {
        segment: loc.segment,
        compression: state.compression,
        tilt_deg: state.tilt_deg,
        resolved,
        theoretical,
    })
}

fn make_record(t: f64, s: f64, roll: f64, pose: &Pose, distance: [f64; 3]) -> Record {
    Record {
        t,
        s,
        segment: pose.segment,
        roll,
        resolved: pose.resolved.speeds,
        theoretical: pose.theoretical.speeds,
        compression: pose.compression,
        tilt_deg: pose.tilt_deg,
        slip: slip_and_ape(&pose.resolved, &pose.theoretical).slip,
        distance,
    }
}

/// State at `t = 0` with the robot's reference point at the network entry.
pub fn initial_state(
    net: &PipeNetwork,
    robot: &RobotConfig,
    gear: &GearTrainConfig,
    params: &SimParams,
) -> Result<SimState> {
    params.check()?;
    robot.check()?;
    let mut disturbance = params
        .disturbance
        .map(|d| Disturbance::new(d.amplitude, d.seed))
        .transpose()?;
    let pose = evaluate(net, robot, gear, params, 0.0, disturbance.as_mut())?;
    Ok(SimState {
        step: 0,
        record: make_record(0.0, 0.0, params.roll, &pose, [0.0; 3]),
        disturbance,
    })
}

/// Advances one time step. Returns `Error::OutOfBounds` once the robot has
/// reached the end of the network.
pub fn step(
    state: SimState,
    net: &PipeNetwork,
    robot: &RobotConfig,
    gear: &GearTrainConfig,
    params: &SimParams,
) -> Result<SimState> {
    let total = total_length(net);
    let prev = state.record;
    if prev.s >= total {
        return Err(Error::OutOfBounds("robot reached the end of the network".into()));
    }
    let advance = mean3(prev.resolved) * params.dt;
    if !(advance > 0.0) {
        return Err(Error::InvalidArgument("robot is not advancing".into()));
    }
    let (s, fraction) = if prev.s + advance >= total {
        (total, (total - prev.s) / advance)
    } else {
        (prev.s + advance, 1.0)
    };
    let distance: [f64; 3] =
        std::array::from_fn(|i| prev.distance[i] + prev.resolved[i] * params.dt * fraction);

    let mut disturbance = state.disturbance;
    let pose = evaluate(net, robot, gear, params, s, disturbance.as_mut())?;
    let step = state.step + 1;
    Ok(SimState {
        step,
        record: make_record(step as f64 * params.dt, s, params.roll, &pose, distance),
        disturbance,
    })
}

/// Distance the robot travels from fully inserted to fully emerged.
pub fn effective_robot_path(net: &PipeNetwork, robot: &RobotConfig) -> Result<f64> {
    let total = total_length(net);
    if total < robot.length {
        return Err(Error::InvalidScenario(format!(
            "network length {total} mm is shorter than the robot ({} mm)",
            robot.length
        )));
    }
    Ok(total - robot.length)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentSummary {
    pub index: usize,
    pub kind: String,
    pub label: Option<String>,
    pub length: f64,
    pub entry_t: Option<f64>,
    pub exit_t: Option<f64>,
    pub mean_speed: [f64; 3],
    pub min_speed: [f64; 3],
    pub max_speed: [f64; 3],
    pub mean_theoretical: [f64; 3],
    /// Mean resolved speed over the midpoint window.
    pub window_speed: Option<[f64; 3]>,
    /// APE of the window-averaged speeds, percent.
    pub window_ape: [Option<f64>; 3],
    pub max_compression: f64,
    pub max_tilt_deg: f64,
    pub compression_ok: bool,
    pub tilt_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrackSummary {
    pub name: String,
    pub mean_speed: f64,
    pub max_slip: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Limits {
    pub max_compression: f64,
    pub max_tilt_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryReport {
    pub roll_deg: f64,
    pub dt: f64,
    pub nominal_speed: f64,
    pub total_length: f64,
    pub effective_robot_path: Option<f64>,
    pub completed: bool,
    /// Why the run ended early, if it did.
    pub abort: Option<String>,
    pub total_time: f64,
    pub max_compression: f64,
    pub max_tilt_deg: f64,
    pub max_slip: f64,
    pub segments: Vec<SegmentSummary>,
    pub tracks: Vec<TrackSummary>,
    pub limits: Limits,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trace: Trace,
    pub summary: SummaryReport,
    /// The error that aborted the run, if any.
    pub error: Option<Error>,
}

/// Runs the robot through `net` until it reaches the end, `t_max` elapses or
/// a limit is violated. Only an invalid network or parameter set is returned
/// as `Err`; aborts keep the partial trace and record the cause.
pub fn run(
    net: &PipeNetwork,
    robot: &RobotConfig,
    gear: &GearTrainConfig,
    params: &SimParams,
) -> Result<RunOutput> {
    let violations = validate(net);
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(Error::InvalidScenario(list.join("; ")));
    }
    params.check()?;
    robot.check()?;

    let mut trace = Trace::default();
    let mut error = None;
    let mut completed = false;
    match initial_state(net, robot, gear, params) {
        Err(e) => error = Some(e),
        Ok(mut state) => {
            trace.records.push(state.record);
            loop {
                if params.t_max.is_some_and(|t| state.record.t >= t) {
                    break;
                }
                match step(state, net, robot, gear, params) {
                    Ok(next) => {
                        trace.records.push(next.record);
                        state = next;
                    }
                    Err(Error::OutOfBounds(_)) => {
                        completed = true;
                        break;
                    }
                    Err(e) => {
                        error = Some(e);
                        break;
                    }
                }
            }
        }
    }
    let summary = summarize(net, robot, gear, params, &trace, completed, error.as_ref());
    Ok(RunOutput {
        trace,
        summary,
        error,
    })
}

fn fold3(records: &[&Record], pick: impl Fn(&Record) -> [f64; 3], init: f64, f: fn(f64, f64) -> f64) -> [f64; 3] {
    let mut acc = [init; 3];
    for r in records {
        let v = pick(r);
        for i in 0..3 {
            acc[i] = f(acc[i], v[i]);
        }
    }
    acc
}

fn mean_of(records: &[&Record], pick: impl Fn(&Record) -> [f64; 3]) -> [f64; 3] {
    if records.is_empty() {
        return [0.0; 3];
    }
    // Shifted by the first sample so constant runs average exactly.
    let base = pick(records[0]);
    let mut acc = [0.0; 3];
    for r in records {
        let v = pick(r);
        for i in 0..3 {
            acc[i] += v[i] - base[i];
        }
    }
    let n = records.len() as f64;
    std::array::from_fn(|i| base[i] + acc[i] / n)
}

fn summarize(
    net: &PipeNetwork,
    robot: &RobotConfig,
    gear: &GearTrainConfig,
    params: &SimParams,
    trace: &Trace,
    completed: bool,
    error: Option<&Error>,
) -> SummaryReport {
    let starts = net.segment_starts();
    let all: Vec<&Record> = trace.records.iter().collect();
    let total_time = trace.last().map_or(0.0, |r| r.t);

    let segments = net
        .segments
        .iter()
        .enumerate()
        .map(|(k, seg)| {
            let in_seg: Vec<&Record> = all.iter().copied().filter(|r| r.segment == k).collect();
            let length = seg.length();
            let lo = starts[k] + length * (1.0 - MIDPOINT_WINDOW) / 2.0;
            let hi = starts[k] + length * (1.0 + MIDPOINT_WINDOW) / 2.0;
            let window: Vec<&Record> = in_seg
                .iter()
                .copied()
                .filter(|r| r.s >= lo && r.s <= hi)
                .collect();
            let (window_speed, window_ape) = if window.is_empty() {
                (None, [None; 3])
            } else {
                let resolved = TrackSpeeds {
                    speeds: mean_of(&window, |r| r.resolved),
                    source: SpeedSource::Resolved,
                };
                let theoretical = TrackSpeeds {
                    speeds: mean_of(&window, |r| r.theoretical),
                    source: SpeedSource::Theoretical,
                };
                (
                    Some(resolved.speeds),
                    slip_and_ape(&resolved, &theoretical).ape,
                )
            };
            let entry_t = in_seg.first().map(|r| r.t);
            let exit_t = all
                .iter()
                .find(|r| r.segment > k)
                .map(|r| r.t)
                .or_else(|| (completed && k + 1 == net.segments.len()).then_some(total_time));
            let max_compression = in_seg
                .iter()
                .flat_map(|r| r.compression)
                .fold(0.0, f64::max);
            let max_tilt_deg = in_seg
                .iter()
                .flat_map(|r| r.tilt_deg)
                .map(f64::abs)
                .fold(0.0, f64::max);
            SegmentSummary {
                index: k,
                kind: seg.kind().to_string(),
                label: net.label(k).map(str::to_string),
                length,
                entry_t,
                exit_t,
                mean_speed: mean_of(&in_seg, |r| r.resolved),
                min_speed: if in_seg.is_empty() {
                    [0.0; 3]
                } else {
                    fold3(&in_seg, |r| r.resolved, f64::INFINITY, f64::min)
                },
                max_speed: if in_seg.is_empty() {
                    [0.0; 3]
                } else {
                    fold3(&in_seg, |r| r.resolved, f64::NEG_INFINITY, f64::max)
                },
                mean_theoretical: mean_of(&in_seg, |r| r.theoretical),
                window_speed,
                window_ape,
                max_compression,
                max_tilt_deg,
                compression_ok: max_compression <= robot.max_compression,
                tilt_ok: max_tilt_deg <= robot.max_tilt_deg,
            }
        })
        .collect::<Vec<_>>();

    let mean_speed = mean_of(&all, |r| r.resolved);
    let max_slip = fold3(&all, |r| r.slip, 0.0, f64::max);
    let last_distance = trace.last().map_or([0.0; 3], |r| r.distance);
    let tracks = (0..3)
        .map(|i| TrackSummary {
            name: TRACK_NAMES[i].to_string(),
            mean_speed: mean_speed[i],
            max_slip: max_slip[i],
            distance: last_distance[i],
        })
        .collect();

    SummaryReport {
        roll_deg: params.roll.to_degrees(),
        dt: params.dt,
        nominal_speed: nominal_speed(gear, robot, params.input_speed),
        total_length: total_length(net),
        effective_robot_path: effective_robot_path(net, robot).ok(),
        completed,
        abort: error.map(ToString::to_string),
        total_time,
        max_compression: segments.iter().map(|s| s.max_compression).fold(0.0, f64::max),
        max_tilt_deg: segments.iter().map(|s| s.max_tilt_deg).fold(0.0, f64::max),
        max_slip: max_slip.iter().copied().fold(0.0, f64::max),
        segments,
        tracks,
        limits: Limits {
            max_compression: robot.max_compression,
            max_tilt_deg: robot.max_tilt_deg,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{PipeSpec, Segment};
    use nalgebra::Vector3;

    fn robot() -> RobotConfig {
        RobotConfig {
            sprocket_radius: 10.0,
            length: 50.0,
            spring_stiffness: 2.0,
            preload_compression: 2.0,
            max_compression: 16.0,
            max_tilt_deg: 10.0,
            nominal_body_radius: 40.0,
        }
    }

    fn net() -> PipeNetwork {
        PipeNetwork::new(
            PipeSpec {
                inner_radius: 40.0,
                standard_label: String::new(),
            },
            vec![
                Segment::straight(100.0, Vector3::z()),
                Segment::bend(200.0, 90.0, Vector3::y()),
                Segment::straight(100.0, Vector3::x()),
            ],
        )
    }

    #[test]
    fn straight_step_advances_by_v_dt() {
        let params = SimParams::new(5.0);
        let gear = GearTrainConfig::default();
        let s0 = initial_state(&net(), &robot(), &gear, &params).unwrap();
        let s1 = step(s0, &net(), &robot(), &gear, &params).unwrap();
        assert!((s1.record.s - 0.5).abs() < 1e-12);
        assert_eq!(s1.record.t, 0.01);
        assert_eq!(s1.step, 1);
    }

    #[test]
    fn bend_step_keeps_mean_speed() {
        let params = SimParams::new(5.0);
        let gear = GearTrainConfig::default();
        let mut st = initial_state(&net(), &robot(), &gear, &params).unwrap();
        while st.record.segment == 0 {
            st = step(st, &net(), &robot(), &gear, &params).unwrap();
        }
        let before = st.record.s;
        assert_ne!(st.record.resolved[0], st.record.resolved[1]);
        let next = step(st, &net(), &robot(), &gear, &params).unwrap();
        assert!((next.record.s - before - 0.5).abs() < 1e-9);
    }

    #[test]
    fn end_of_network_signals_completion() {
        let params = SimParams::new(5.0);
        let gear = GearTrainConfig::default();
        let mut st = initial_state(&net(), &robot(), &gear, &params).unwrap();
        loop {
            match step(st.clone(), &net(), &robot(), &gear, &params) {
                Ok(next) => st = next,
                Err(e) => {
                    assert!(matches!(e, Error::OutOfBounds(_)));
                    break;
                }
            }
        }
        assert_eq!(st.record.s, total_length(&net()));
    }

    #[test]
    fn run_completes_and_counts_rows() {
        let out = run(&net(), &robot(), &GearTrainConfig::default(), &SimParams::new(5.0)).unwrap();
        assert!(out.summary.completed);
        assert!(out.error.is_none());
        let t_ideal = total_length(&net()) / 50.0;
        let steps = (t_ideal / 0.01).ceil() as usize;
        assert_eq!(out.trace.len(), steps + 1);
        assert_eq!(out.summary.segments[2].exit_t, Some(out.summary.total_time));
    }

    #[test]
    fn t_max_stops_early() {
        let mut p = SimParams::new(5.0);
        p.t_max = Some(1.0);
        let out = run(&net(), &robot(), &GearTrainConfig::default(), &p).unwrap();
        assert!(!out.summary.completed);
        assert!(out.error.is_none());
        assert!((out.trace.last().unwrap().t - 1.0).abs() < 1e-9);
    }

    #[test]
    fn effective_path_examples() {
        let mut r = robot();
        r.length = 200.0;
        let spec = net().spec;
        let long = PipeNetwork::new(spec.clone(), vec![Segment::straight(2000.0, Vector3::z())]);
        assert_eq!(effective_robot_path(&long, &r).unwrap(), 1800.0);
        let mid = PipeNetwork::new(spec.clone(), vec![Segment::straight(350.0, Vector3::z())]);
        assert_eq!(effective_robot_path(&mid, &r).unwrap(), 150.0);
        let short = PipeNetwork::new(spec, vec![Segment::straight(100.0, Vector3::z())]);
        assert!(matches!(
            effective_robot_path(&short, &r),
            Err(Error::InvalidScenario(_))
        ));
    }

    #[test]
    fn invalid_network_is_rejected() {
        let mut n = net();
        n.segments[1] = Segment::bend(20.0, 90.0, Vector3::y());
        assert!(matches!(
            run(&n, &robot(), &GearTrainConfig::default(), &SimParams::new(5.0)),
            Err(Error::InvalidScenario(_))
        ));
    }

    #[test]
    fn bad_params_rejected() {
        let mut p = SimParams::new(5.0);
        p.dt = 0.0;
        assert!(p.check().is_err());
        assert!(SimParams::new(0.0).check().is_err());
    }
}
