//! Single-input, three-output differential gear train.
//!
//! The train is built from three two-output bevel differentials arranged in a
//! cycle. Every unit's ring gear is driven by the input at `ratio · ω_u`; its
//! right side gear is rigidly coupled to the left side gear of the next unit
//! and each coupled pair drives one robot output. A ring turns at the mean of
//! its two side gears, so summing over the three units gives the only
//! kinematic constraint the outputs see:
//!
//! ```text
//! ω_A + ω_B + ω_C = 3 · n · ω_u
//! ```
//!
//! The individual speeds float with the loads applied to the outputs, while
//! the torque is shared equally.

use crate::error::{Error, Result};
use crate::util::{ensure_finite, sum3};

pub const NUM_OUTPUTS: usize = 3;

/// Relative tolerance used to decide whether imposed speeds agree with the sum constraint.
pub const INFEASIBLE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A side gear, addressed by its differential unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SideGear {
    pub unit: usize,
    pub side: Side,
}

/// Two side gears of adjacent units locked together and driving one output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoupledPair {
    pub output: usize,
    pub gears: [SideGear; 2],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GearTrainConfig {
    ratio: f64,
}

impl Default for GearTrainConfig {
    fn default() -> Self {
        Self { ratio: 1.0 }
    }
}

impl GearTrainConfig {
    /// `ratio` is the input-to-ring gear ratio `n`; it must be finite and positive.
    pub fn new(ratio: f64) -> Result<Self> {
        if !(ratio.is_finite() && ratio > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "gear ratio must be finite and > 0, got {ratio}"
            )));
        }
        Ok(Self { ratio })
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    /// Sum every admissible output speed triple must satisfy for input speed `input_speed`.
    pub fn output_speed_sum(&self, input_speed: f64) -> f64 {
        3.0 * (self.ratio * input_speed)
    }

    /// The cyclic coupling: output `k` is fed by unit `k`'s right side gear and
    /// unit `k + 1`'s left side gear.
    pub fn coupled_pairs(&self) -> [CoupledPair; NUM_OUTPUTS] {
        std::array::from_fn(|k| CoupledPair {
            output: k,
            gears: [
                SideGear {
                    unit: k,
                    side: Side::Right,
                },
                SideGear {
                    unit: (k + 1) % NUM_OUTPUTS,
                    side: Side::Left,
                },
            ],
        })
    }

    /// Ring-gear speed of each unit implied by a set of output speeds.
    pub fn ring_speeds(&self, outputs: [f64; NUM_OUTPUTS]) -> Result<[f64; NUM_OUTPUTS]> {
        let mut sides = [[0.0; 2]; NUM_OUTPUTS];
        for pair in self.coupled_pairs() {
            for gear in pair.gears {
                let slot = match gear.side {
                    Side::Left => 0,
                    Side::Right => 1,
                };
                sides[gear.unit][slot] = outputs[pair.output];
            }
        }
        let mut rings = [0.0; NUM_OUTPUTS];
        for (ring, [left, right]) in rings.iter_mut().zip(sides) {
            *ring = ring_speed(left, right)?;
        }
        Ok(rings)
    }
}

/// Constraint applied to one output by the environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Load {
    Free,
    /// Output speed in rad/s dictated by the track contact.
    ImposedSpeed(f64),
    /// Resisting torque in N·mm.
    ImposedTorque(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadState {
    loads: [Load; NUM_OUTPUTS],
}

impl LoadState {
    pub fn new(loads: [Load; NUM_OUTPUTS]) -> Result<Self> {
        for (i, load) in loads.iter().enumerate() {
            match *load {
                Load::Free => {}
                Load::ImposedSpeed(v) => ensure_finite(&format!("imposed speed on output {i}"), v)?,
                Load::ImposedTorque(v) => {
                    ensure_finite(&format!("imposed torque on output {i}"), v)?
                }
            }
        }
        Ok(Self { loads })
    }

    pub fn free() -> Self {
        Self {
            loads: [Load::Free; NUM_OUTPUTS],
        }
    }

    pub fn loads(&self) -> [Load; NUM_OUTPUTS] {
        self.loads
    }

    pub fn imposed_speed_count(&self) -> usize {
        self.loads
            .iter()
            .filter(|l| matches!(l, Load::ImposedSpeed(_)))
            .count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedSolution {
    /// Output angular speeds in rad/s, indexed A, B, C.
    pub speeds: [f64; NUM_OUTPUTS],
    /// Absolute violation of the sum constraint in rad/s.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorqueSolution {
    /// Output torques in N·mm.
    pub torques: [f64; NUM_OUTPUTS],
    /// Output torque sum reflected back through the gear ratio.
    pub input_reflected: f64,
}

/// Ring-gear speed of a two-output differential: the mean of its side gears.
pub fn ring_speed(side_left: f64, side_right: f64) -> Result<f64> {
    ensure_finite("left side gear speed", side_left)?;
    ensure_finite("right side gear speed", side_right)?;
    Ok((side_left + side_right) / 2.0)
}

/// `|ω_A + ω_B + ω_C − 3·n·ω_u|`.
pub fn constraint_residual(cfg: &GearTrainConfig, input_speed: f64, speeds: [f64; 3]) -> f64 {
    (sum3(speeds) - cfg.output_speed_sum(input_speed)).abs()
}

/// Resolve the three output speeds for a given input speed and load state.
///
/// Imposed speeds are honored exactly. The remaining share of the sum
/// constraint is split evenly between the other outputs; when they carry
/// unequal torques, speed is routed away from the more heavily loaded ones in
/// proportion to their normalized deviation from the mean load. Three imposed
/// speeds are accepted only when they agree with the sum constraint.
pub fn solve_output_speeds(
    cfg: &GearTrainConfig,
    input_speed: f64,
    loads: &LoadState,
) -> Result<SpeedSolution> {
    ensure_finite("input speed", input_speed)?;
    let target = cfg.output_speed_sum(input_speed);
    let tolerance = INFEASIBLE_TOLERANCE * target.abs().max(1.0);

    let mut speeds = [0.0; NUM_OUTPUTS];
    let mut floating = Vec::with_capacity(NUM_OUTPUTS);
    let mut imposed_sum = 0.0;
    for (i, load) in loads.loads.iter().enumerate() {
        match *load {
            Load::ImposedSpeed(w) => {
                speeds[i] = w;
                imposed_sum += w;
            }
            Load::Free => floating.push((i, 0.0)),
            Load::ImposedTorque(t) => floating.push((i, t)),
        }
    }

    if floating.is_empty() {
        let residual = constraint_residual(cfg, input_speed, speeds);
        if residual > tolerance {
            return Err(Error::Infeasible(format!(
                "imposed speeds {speeds:?} sum to {} but the input requires {target}",
                sum3(speeds)
            )));
        }
        return Ok(SpeedSolution { speeds, residual });
    }

    let share = if floating.len() == NUM_OUTPUTS {
        cfg.ratio * input_speed
    } else {
        // With one imposed output the sum is a single term; with two it is a
        // commutative pair, so the result does not depend on labeling.
        (target - imposed_sum) / floating.len() as f64
    };

    let torques: Vec<f64> = floating.iter().map(|&(_, t)| t).collect();
    let all_equal = torques.windows(2).all(|w| w[0] == w[1]);
    if all_equal {
        for &(i, _) in &floating {
            speeds[i] = share;
        }
    } else {
        let (total, magnitude) = symmetric_sums(&torques);
        let mean = total / torques.len() as f64;
        for &(i, t) in &floating {
            speeds[i] = share * (1.0 - (t - mean) / magnitude);
        }
    }

    let residual = constraint_residual(cfg, input_speed, speeds);
    Ok(SpeedSolution { speeds, residual })
}

/// Sum and absolute sum of up to three torques, computed in sorted order.
fn symmetric_sums(torques: &[f64]) -> (f64, f64) {
    let mut sorted = torques.to_vec();
    sorted.sort_by(f64::total_cmp);
    let total = sorted.iter().fold(0.0, |acc, t| acc + t);
    let mut magnitudes: Vec<f64> = sorted.iter().map(|t| t.abs()).collect();
    magnitudes.sort_by(f64::total_cmp);
    let magnitude = magnitudes.iter().fold(0.0, |acc, t| acc + t);
    (total, magnitude)
}

/// Lossless torque split: every output carries `τ_input / (3n)`.
pub fn solve_output_torques(cfg: &GearTrainConfig, input_torque: f64) -> Result<TorqueSolution> {
    ensure_finite("input torque", input_torque)?;
    let each = input_torque / (3.0 * cfg.ratio);
    let torques = [each; NUM_OUTPUTS];
    Ok(TorqueSolution {
        torques,
        input_reflected: cfg.ratio * sum3(torques),
    })
}
