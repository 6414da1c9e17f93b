//! Scenario files.
//!
//! A scenario is a sectioned `key = value` text file:
//!
//! ```text
//! # comment
//! [pipe]
//! inner_radius = 238.91 mm
//! standard = ASME B16.9 NPS 20 Sch 40
//!
//! [segment]
//! type = straight
//! length = 525 mm
//! axis = 0 0 1
//!
//! [segment]
//! type = bend
//! radius = 560 mm
//! sweep = 90 deg
//!
//! [robot]
//! sprocket_radius = 25 mm
//! length = 82 mm
//! nominal_body_radius = 238.91 mm
//! preload_compression = 5 mm
//!
//! [sim]
//! input_speed = 2.3333 rad/s
//! ```
//!
//! `[segment]` may repeat and is read in order; every other section appears
//! at most once. Numeric values may carry a unit suffix, which must match the
//! key's declared unit. The full grammar is in the book's scenario chapter.

use std::fmt::{self, Write as _};

use nalgebra::Vector3;

use crate::geometry::{default_bend_normal, validate, PipeNetwork, PipeSpec, Segment, Site};
use crate::robot::{
    RobotConfig, DEFAULT_MAX_COMPRESSION, DEFAULT_MAX_TILT_DEG, DEFAULT_SPRING_STIFFNESS,
    ROLLERS_PER_MODULE,
};
use crate::sim::{DisturbanceConfig, SimParams, DEFAULT_DT};
use crate::transmission::GearTrainConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Millimeter,
    Second,
    RadPerSecond,
    Degree,
    NewtonPerMm,
    Dimensionless,
}

impl Unit {
    pub fn symbol(&self) -> &'static str {
        match self {
            Unit::Millimeter => "mm",
            Unit::Second => "s",
            Unit::RadPerSecond => "rad/s",
            Unit::Degree => "deg",
            Unit::NewtonPerMm => "N/mm",
            Unit::Dimensionless => "",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownSection,
    UnknownKey,
    DuplicateKey,
    DuplicateBlock,
    MissingBlock,
    MissingKey,
    Unit,
    Invariant,
}

impl ParseErrorKind {
    pub fn name(&self) -> &'static str {
        match self {
            ParseErrorKind::Syntax => "syntax error",
            ParseErrorKind::UnknownSection => "unknown section",
            ParseErrorKind::UnknownKey => "unknown key",
            ParseErrorKind::DuplicateKey => "duplicate key",
            ParseErrorKind::DuplicateBlock => "duplicate block",
            ParseErrorKind::MissingBlock => "missing block",
            ParseErrorKind::MissingKey => "missing key",
            ParseErrorKind::Unit => "unit violation",
            ParseErrorKind::Invariant => "invariant violation",
        }
    }
}

/// A diagnostic tied to a 1-based line number (0 when it concerns the whole file).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}: {}", self.kind.name(), self.message)
        } else {
            write!(f, "line {}: {}: {}", self.line, self.kind.name(), self.message)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    pub dt: f64,
    pub input_speed: f64,
    pub theta_deg: f64,
    pub t_max: Option<f64>,
    pub disturbance_amplitude: f64,
    pub seed: u64,
}

impl SimSettings {
    pub fn params(&self) -> SimParams {
        SimParams {
            dt: self.dt,
            input_speed: self.input_speed,
            roll: self.theta_deg.to_radians(),
            disturbance: (self.disturbance_amplitude > 0.0).then_some(DisturbanceConfig {
                amplitude: self.disturbance_amplitude,
                seed: self.seed,
            }),
            t_max: self.t_max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportOptions {
    /// Track indices (0 = A) to include, ascending.
    pub tracks: Vec<usize>,
    /// Segment indices to include; `None` means all.
    pub segments: Option<Vec<usize>>,
    pub ape: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            tracks: vec![0, 1, 2],
            segments: None,
            ape: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub network: PipeNetwork,
    pub robot: RobotConfig,
    pub gear: GearTrainConfig,
    pub sim: SimSettings,
    pub report: ReportOptions,
}

struct Entry<'a> {
    key: &'a str,
    value: &'a str,
    line: usize,
}

struct Block<'a> {
    name: &'a str,
    line: usize,
    entries: Vec<Entry<'a>>,
}

struct Ctx {
    errors: Vec<ParseError>,
}

impl Ctx {
    fn err(&mut self, line: usize, kind: ParseErrorKind, message: impl Into<String>) {
        self.errors.push(ParseError {
            line,
            kind,
            message: message.into(),
        });
    }

    fn check_keys(&mut self, block: &Block, allowed: &[&str]) {
        let mut seen: Vec<&str> = Vec::new();
        for e in &block.entries {
            if !allowed.contains(&e.key) {
                self.err(
                    e.line,
                    ParseErrorKind::UnknownKey,
                    format!("`{}` is not a key of [{}]", e.key, block.name),
                );
            } else if seen.contains(&e.key) {
                self.err(
                    e.line,
                    ParseErrorKind::DuplicateKey,
                    format!("`{}` repeated in [{}]", e.key, block.name),
                );
            }
            seen.push(e.key);
        }
    }

    fn number(&mut self, block: &Block, key: &str, unit: Unit) -> Option<f64> {
        let e = block.entries.iter().find(|e| e.key == key)?;
        let mut tokens = e.value.split_whitespace();
        let Some(first) = tokens.next() else {
            self.err(e.line, ParseErrorKind::Syntax, format!("`{key}` has no value"));
            return None;
        };
        let value = match first.parse::<f64>() {
            Ok(v) if v.is_finite() => v,
            _ => {
                self.err(
                    e.line,
                    ParseErrorKind::Syntax,
                    format!("`{key}`: `{first}` is not a finite number"),
                );
                return None;
            }
        };
        match (tokens.next(), tokens.next()) {
            (None, _) => Some(value),
            (Some(u), None) if u == unit.symbol() && unit != Unit::Dimensionless => Some(value),
            (Some(u), None) => {
                let expected = match unit {
                    Unit::Dimensionless => "no unit".to_string(),
                    other => format!("`{}`", other.symbol()),
                };
                self.err(
                    e.line,
                    ParseErrorKind::Unit,
                    format!("`{key}` is given in `{u}`, expected {expected}"),
                );
                None
            }
            (Some(_), Some(_)) => {
                self.err(
                    e.line,
                    ParseErrorKind::Syntax,
                    format!("`{key}`: trailing tokens after value"),
                );
                None
            }
        }
    }

    fn required_number(&mut self, block: &Block, key: &str, unit: Unit) -> Option<f64> {
        if !block.entries.iter().any(|e| e.key == key) {
            self.err(
                block.line,
                ParseErrorKind::MissingKey,
                format!("[{}] requires `{key}`", block.name),
            );
            return None;
        }
        self.number(block, key, unit)
    }

    fn vector(&mut self, block: &Block, key: &str) -> Option<Vector3<f64>> {
        let e = block.entries.iter().find(|e| e.key == key)?;
        let parts: Vec<_> = e.value.split_whitespace().map(str::parse::<f64>).collect();
        match parts.as_slice() {
            [Ok(x), Ok(y), Ok(z)] if x.is_finite() && y.is_finite() && z.is_finite() => {
                Some(Vector3::new(*x, *y, *z))
            }
            _ => {
                self.err(
                    e.line,
                    ParseErrorKind::Syntax,
                    format!("`{key}` must be three finite numbers"),
                );
                None
            }
        }
    }

    fn text<'a>(&mut self, block: &Block<'a>, key: &str) -> Option<&'a str> {
        block.entries.iter().find(|e| e.key == key).map(|e| e.value)
    }

    fn line_of(&self, block: &Block, key: &str) -> usize {
        block
            .entries
            .iter()
            .find(|e| e.key == key)
            .map_or(block.line, |e| e.line)
    }
}

const SECTIONS: [&str; 6] = ["pipe", "segment", "robot", "gear", "sim", "report"];

fn split_blocks<'a>(text: &'a str, ctx: &mut Ctx) -> Vec<Block<'a>> {
    let mut blocks: Vec<Block<'a>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with(';') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                ctx.err(line, ParseErrorKind::Syntax, "unterminated section header");
                continue;
            };
            let name = name.trim();
            if !SECTIONS.contains(&name) {
                ctx.err(
                    line,
                    ParseErrorKind::UnknownSection,
                    format!("[{name}] is not a known section"),
                );
            }
            blocks.push(Block {
                name,
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            ctx.err(line, ParseErrorKind::Syntax, "expected `key = value`");
            continue;
        };
        let key = key.trim();
        if key.is_empty() {
            ctx.err(line, ParseErrorKind::Syntax, "empty key");
            continue;
        }
        match blocks.last_mut() {
            Some(b) => b.entries.push(Entry {
                key,
                value: value.trim(),
                line,
            }),
            None => ctx.err(line, ParseErrorKind::Syntax, "key outside of any section"),
        }
    }
    blocks
}

fn single<'b, 'a>(blocks: &'b [Block<'a>], name: &str, ctx: &mut Ctx) -> Option<&'b Block<'a>> {
    let mut found = blocks.iter().filter(|b| b.name == name);
    let first = found.next();
    for dup in found {
        ctx.err(
            dup.line,
            ParseErrorKind::DuplicateBlock,
            format!("[{name}] appears more than once"),
        );
    }
    first
}

fn parse_pipe(block: &Block, ctx: &mut Ctx) -> Option<(PipeSpec, Option<Vector3<f64>>)> {
    ctx.check_keys(block, &["inner_radius", "standard", "start_tangent"]);
    let r = ctx.required_number(block, "inner_radius", Unit::Millimeter);
    let standard = ctx.text(block, "standard").unwrap_or("").to_string();
    let tangent = ctx.vector(block, "start_tangent");
    Some((
        PipeSpec {
            inner_radius: r?,
            standard_label: standard,
        },
        tangent,
    ))
}

fn parse_segment(block: &Block, ctx: &mut Ctx) -> Option<(Segment, Option<String>)> {
    let label = ctx
        .text(block, "label")
        .filter(|l| !l.is_empty())
        .map(str::to_string);
    match ctx.text(block, "type") {
        Some("straight") => {
            ctx.check_keys(block, &["type", "label", "length", "axis"]);
            let length = ctx.required_number(block, "length", Unit::Millimeter);
            let axis = ctx.vector(block, "axis");
            if axis.is_none() && !block.entries.iter().any(|e| e.key == "axis") {
                ctx.err(block.line, ParseErrorKind::MissingKey, "[segment] requires `axis`");
            }
            Some((Segment::straight(length?, axis?), label))
        }
        Some("bend") => {
            ctx.check_keys(block, &["type", "label", "radius", "sweep", "normal"]);
            let radius = ctx.required_number(block, "radius", Unit::Millimeter);
            let sweep = ctx.required_number(block, "sweep", Unit::Degree);
            let has_normal = block.entries.iter().any(|e| e.key == "normal");
            let normal = ctx.vector(block, "normal");
            if has_normal && normal.is_none() {
                return None;
            }
            Some((
                Segment::bend(radius?, sweep?, normal.unwrap_or_else(default_bend_normal)),
                label,
            ))
        }
        Some(other) => {
            ctx.err(
                ctx.line_of(block, "type"),
                ParseErrorKind::Syntax,
                format!("segment type must be `straight` or `bend`, got `{other}`"),
            );
            None
        }
        None => {
            ctx.err(block.line, ParseErrorKind::MissingKey, "[segment] requires `type`");
            None
        }
    }
}

fn parse_robot(block: &Block, ctx: &mut Ctx) -> Option<RobotConfig> {
    ctx.check_keys(
        block,
        &[
            "sprocket_radius",
            "length",
            "nominal_body_radius",
            "preload_compression",
            "spring_stiffness",
            "max_compression",
            "max_tilt",
            "rollers_per_module",
        ],
    );
    let sprocket_radius = ctx.required_number(block, "sprocket_radius", Unit::Millimeter);
    let length = ctx.required_number(block, "length", Unit::Millimeter);
    let nominal = ctx.required_number(block, "nominal_body_radius", Unit::Millimeter);
    let preload = ctx.required_number(block, "preload_compression", Unit::Millimeter);
    let stiffness = ctx
        .number(block, "spring_stiffness", Unit::NewtonPerMm)
        .unwrap_or(DEFAULT_SPRING_STIFFNESS);
    let max_compression = ctx
        .number(block, "max_compression", Unit::Millimeter)
        .unwrap_or(DEFAULT_MAX_COMPRESSION);
    let max_tilt = ctx
        .number(block, "max_tilt", Unit::Degree)
        .unwrap_or(DEFAULT_MAX_TILT_DEG);
    if let Some(rollers) = ctx.number(block, "rollers_per_module", Unit::Dimensionless) {
        if rollers != ROLLERS_PER_MODULE as f64 {
            ctx.err(
                ctx.line_of(block, "rollers_per_module"),
                ParseErrorKind::Invariant,
                format!("rollers_per_module must be {ROLLERS_PER_MODULE}"),
            );
        }
    }
    let cfg = RobotConfig {
        sprocket_radius: sprocket_radius?,
        length: length?,
        spring_stiffness: stiffness,
        preload_compression: preload?,
        max_compression,
        max_tilt_deg: max_tilt,
        nominal_body_radius: nominal?,
    };
    if let Err(e) = cfg.check() {
        ctx.err(block.line, ParseErrorKind::Invariant, e.to_string());
        return None;
    }
    Some(cfg)
}

fn parse_gear(block: Option<&Block>, ctx: &mut Ctx) -> Option<GearTrainConfig> {
    let Some(block) = block else {
        return Some(GearTrainConfig::default());
    };
    ctx.check_keys(block, &["ratio"]);
    let ratio = ctx.number(block, "ratio", Unit::Dimensionless).unwrap_or(1.0);
    match GearTrainConfig::new(ratio) {
        Ok(g) => Some(g),
        Err(e) => {
            ctx.err(ctx.line_of(block, "ratio"), ParseErrorKind::Invariant, e.to_string());
            None
        }
    }
}

fn parse_sim(block: &Block, ctx: &mut Ctx) -> Option<SimSettings> {
    ctx.check_keys(
        block,
        &[
            "input_speed",
            "dt",
            "theta",
            "t_max",
            "disturbance_amplitude",
            "seed",
        ],
    );
    let input_speed = ctx.required_number(block, "input_speed", Unit::RadPerSecond);
    let dt = ctx.number(block, "dt", Unit::Second).unwrap_or(DEFAULT_DT);
    let theta_deg = ctx.number(block, "theta", Unit::Degree).unwrap_or(0.0);
    let t_max = ctx.number(block, "t_max", Unit::Second);
    let amplitude = ctx
        .number(block, "disturbance_amplitude", Unit::Dimensionless)
        .unwrap_or(0.0);
    let seed = match ctx.text(block, "seed") {
        None => 0,
        Some(v) => match v.parse::<u64>() {
            Ok(s) => s,
            Err(_) => {
                ctx.err(
                    ctx.line_of(block, "seed"),
                    ParseErrorKind::Syntax,
                    format!("seed must be a non-negative integer, got `{v}`"),
                );
                0
            }
        },
    };
    let settings = SimSettings {
        dt,
        input_speed: input_speed?,
        theta_deg,
        t_max,
        disturbance_amplitude: amplitude,
        seed,
    };
    if let Err(e) = settings.params().check() {
        ctx.err(block.line, ParseErrorKind::Invariant, e.to_string());
        return None;
    }
    if !(amplitude >= 0.0) {
        ctx.err(
            ctx.line_of(block, "disturbance_amplitude"),
            ParseErrorKind::Invariant,
            "disturbance_amplitude must be >= 0",
        );
        return None;
    }
    Some(settings)
}

fn parse_report(block: Option<&Block>, segment_count: usize, ctx: &mut Ctx) -> ReportOptions {
    let mut opts = ReportOptions::default();
    let Some(block) = block else {
        return opts;
    };
    ctx.check_keys(block, &["tracks", "segments", "ape"]);
    if let Some(v) = ctx.text(block, "tracks") {
        let mut tracks = Vec::new();
        for tok in v.split_whitespace() {
            match tok {
                "A" => tracks.push(0),
                "B" => tracks.push(1),
                "C" => tracks.push(2),
                other => ctx.err(
                    ctx.line_of(block, "tracks"),
                    ParseErrorKind::Syntax,
                    format!("unknown track `{other}` (expected A, B or C)"),
                ),
            }
        }
        tracks.sort_unstable();
        tracks.dedup();
        opts.tracks = tracks;
    }
    if let Some(v) = ctx.text(block, "segments") {
        if v != "all" {
            let mut list = Vec::new();
            for tok in v.split_whitespace() {
                match tok.parse::<usize>() {
                    Ok(i) if i < segment_count => list.push(i),
                    _ => ctx.err(
                        ctx.line_of(block, "segments"),
                        ParseErrorKind::Invariant,
                        format!("`{tok}` is not a segment index below {segment_count}"),
                    ),
                }
            }
            list.sort_unstable();
            list.dedup();
            opts.segments = Some(list);
        }
    }
    if let Some(v) = ctx.text(block, "ape") {
        match v {
            "on" | "true" => opts.ape = true,
            "off" | "false" => opts.ape = false,
            other => ctx.err(
                ctx.line_of(block, "ape"),
                ParseErrorKind::Syntax,
                format!("ape must be `on` or `off`, got `{other}`"),
            ),
        }
    }
    opts
}

/// Parses and validates a scenario, collecting every diagnostic.
pub fn parse_scenario(text: &str) -> Result<Scenario, Vec<ParseError>> {
    let mut ctx = Ctx { errors: Vec::new() };
    let blocks = split_blocks(text, &mut ctx);

    let missing = |name: &str, ctx: &mut Ctx| {
        ctx.err(0, ParseErrorKind::MissingBlock, format!("[{name}] block is required"));
    };

    let pipe_block = single(&blocks, "pipe", &mut ctx);
    let robot_block = single(&blocks, "robot", &mut ctx);
    let sim_block = single(&blocks, "sim", &mut ctx);
    let gear_block = single(&blocks, "gear", &mut ctx);
    let report_block = single(&blocks, "report", &mut ctx);
    let segment_blocks: Vec<&Block> = blocks.iter().filter(|b| b.name == "segment").collect();

    let pipe = match pipe_block {
        Some(b) => parse_pipe(b, &mut ctx),
        None => {
            missing("pipe", &mut ctx);
            None
        }
    };
    if segment_blocks.is_empty() {
        missing("segment", &mut ctx);
    }
    let segments: Vec<_> = segment_blocks
        .iter()
        .map(|b| parse_segment(b, &mut ctx))
        .collect();
    let robot = match robot_block {
        Some(b) => parse_robot(b, &mut ctx),
        None => {
            missing("robot", &mut ctx);
            None
        }
    };
    let sim = match sim_block {
        Some(b) => parse_sim(b, &mut ctx),
        None => {
            missing("sim", &mut ctx);
            None
        }
    };
    let gear = parse_gear(gear_block, &mut ctx);
    let report = parse_report(report_block, segment_blocks.len(), &mut ctx);

    let network = match (pipe, segments.iter().all(Option::is_some)) {
        (Some((spec, tangent)), true) if !segments.is_empty() => {
            let (segs, labels): (Vec<_>, Vec<_>) = segments.into_iter().flatten().unzip();
            let mut net = PipeNetwork::new(spec, segs).with_labels(labels);
            if let Some(t) = tangent {
                net = net.with_start_tangent(t);
            }
            for v in validate(&net) {
                let line = match v.site {
                    Site::Segment(k) => segment_blocks[k].line,
                    Site::Joint(k) => segment_blocks[k + 1].line,
                    Site::Network => pipe_block.map_or(0, |b| b.line),
                };
                ctx.err(line, ParseErrorKind::Invariant, v.to_string());
            }
            Some(net)
        }
        _ => None,
    };

    match (network, robot, gear, sim) {
        (Some(network), Some(robot), Some(gear), Some(sim)) if ctx.errors.is_empty() => {
            Ok(Scenario {
                network,
                robot,
                gear,
                sim,
                report,
            })
        }
        _ => {
            let mut errors = ctx.errors;
            errors.sort_by_key(|e| e.line);
            Err(errors)
        }
    }
}

fn fmt_vec(v: &Vector3<f64>) -> String {
    format!("{} {} {}", v.x, v.y, v.z)
}

impl Scenario {
    pub fn sim_params(&self) -> SimParams {
        self.sim.params()
    }

    /// Serializes the scenario with every key spelled out; parsing the result
    /// yields an equal scenario.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let net = &self.network;
        let _ = writeln!(out, "[pipe]");
        let _ = writeln!(out, "inner_radius = {} mm", net.spec.inner_radius);
        let _ = writeln!(out, "standard = {}", net.spec.standard_label);
        let _ = writeln!(out, "start_tangent = {}", fmt_vec(&net.start_tangent));
        for (k, seg) in net.segments.iter().enumerate() {
            let _ = writeln!(out, "\n[segment]");
            match seg {
                Segment::Straight(s) => {
                    let _ = writeln!(out, "type = straight");
                    let _ = writeln!(out, "length = {} mm", s.length);
                    let _ = writeln!(out, "axis = {}", fmt_vec(&s.axis));
                }
                Segment::Bend(b) => {
                    let _ = writeln!(out, "type = bend");
                    let _ = writeln!(out, "radius = {} mm", b.radius);
                    let _ = writeln!(out, "sweep = {} deg", b.sweep_deg);
                    let _ = writeln!(out, "normal = {}", fmt_vec(&b.normal));
                }
            }
            if let Some(l) = net.label(k) {
                let _ = writeln!(out, "label = {l}");
            }
        }
        let r = &self.robot;
        let _ = writeln!(out, "\n[robot]");
        let _ = writeln!(out, "sprocket_radius = {} mm", r.sprocket_radius);
        let _ = writeln!(out, "length = {} mm", r.length);
        let _ = writeln!(out, "nominal_body_radius = {} mm", r.nominal_body_radius);
        let _ = writeln!(out, "preload_compression = {} mm", r.preload_compression);
        let _ = writeln!(out, "spring_stiffness = {} N/mm", r.spring_stiffness);
        let _ = writeln!(out, "max_compression = {} mm", r.max_compression);
        let _ = writeln!(out, "max_tilt = {} deg", r.max_tilt_deg);
        let _ = writeln!(out, "\n[gear]");
        let _ = writeln!(out, "ratio = {}", self.gear.ratio());
        let s = &self.sim;
        let _ = writeln!(out, "\n[sim]");
        let _ = writeln!(out, "input_speed = {} rad/s", s.input_speed);
        let _ = writeln!(out, "dt = {} s", s.dt);
        let _ = writeln!(out, "theta = {} deg", s.theta_deg);
        if let Some(t) = s.t_max {
            let _ = writeln!(out, "t_max = {t} s");
        }
        let _ = writeln!(out, "disturbance_amplitude = {}", s.disturbance_amplitude);
        let _ = writeln!(out, "seed = {}", s.seed);
        let rep = &self.report;
        let _ = writeln!(out, "\n[report]");
        let tracks: Vec<&str> = rep.tracks.iter().map(|&i| ["A", "B", "C"][i]).collect();
        let _ = writeln!(out, "tracks = {}", tracks.join(" "));
        match &rep.segments {
            None => {
                let _ = writeln!(out, "segments = all");
            }
            Some(list) => {
                let ids: Vec<String> = list.iter().map(ToString::to_string).collect();
                let _ = writeln!(out, "segments = {}", ids.join(" "));
            }
        }
        let _ = writeln!(out, "ape = {}", if rep.ape { "on" } else { "off" });
        out
    }
}
