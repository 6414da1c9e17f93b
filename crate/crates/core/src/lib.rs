//! Kinematics of a three-track in-pipe robot driven by a passive
//! three-output differential.
//!
//! The crate is organized bottom-up:
//!
//! - [`transmission`]: the differential gear train and its speed/torque split.
//! - [`geometry`]: pipe networks made of straights and bends.
//! - [`robot`]: robot parameters and the spring-loaded wall-press model.
//! - [`kinematics`]: geometry-required and differential-resolved track speeds, slip and APE.
//! - [`sim`]: the fixed-step simulator and its run summary.
//! - [`scenario`], [`report`], [`cli`]: scenario files, trace/report output and the command line.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod kinematics;
pub mod report;
pub mod robot;
pub mod scenario;
pub mod sim;
pub mod transmission;
mod util;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/transmission.md")]
    pub struct Transmission;
    #[doc = include_str!("../../../book/src/geometry.md")]
    pub struct Geometry;
    #[doc = include_str!("../../../book/src/springs.md")]
    pub struct Springs;
    #[doc = include_str!("../../../book/src/kinematics.md")]
    pub struct Kinematics;
    #[doc = include_str!("../../../book/src/simulation.md")]
    pub struct Simulation;
    #[doc = include_str!("../../../book/src/scenario.md")]
    pub struct Scenario;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
    #[doc = include_str!("../../../book/src/output.md")]
    pub struct Output;
}
