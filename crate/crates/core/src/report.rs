//! Trace CSV and run report serialization.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::kinematics::TRACK_NAMES;
use crate::scenario::ReportOptions;
use crate::sim::{SummaryReport, Trace};

pub const TRACE_HEADER: &str = "t,s,segment,theta,vA,vB,vC,vA_theo,vB_theo,vC_theo,dA,dB,dC,slipA,slipB,slipC,distA,distB,distC";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
}

fn fixed(out: &mut String, v: f64) {
    // -0.0 would otherwise print as "-0.000000".
    let v = if v == 0.0 { 0.0 } else { v };
    let _ = write!(out, "{v:.6}");
}

/// Renders the trace as CSV: the fixed header, then one row per record with
/// every real value printed to six decimals.
pub fn trace_csv(trace: &Trace) -> String {
    let mut out = String::with_capacity(64 + trace.len() * 200);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in &trace.records {
        fixed(&mut out, r.t);
        out.push(',');
        fixed(&mut out, r.s);
        let _ = write!(out, ",{},", r.segment);
        fixed(&mut out, r.roll);
        for group in [r.resolved, r.theoretical, r.compression, r.slip, r.distance] {
            for v in group {
                out.push(',');
                fixed(&mut out, v);
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_trace(trace: &Trace, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(trace_csv(trace).as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

fn status(summary: &SummaryReport) -> String {
    match (&summary.abort, summary.completed) {
        (Some(cause), _) => format!("aborted: {cause}"),
        (None, true) => "completed".to_string(),
        (None, false) => "stopped at t_max".to_string(),
    }
}

fn opt_t(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |t| format!("{t:.3}"))
}

fn flag(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

fn selected_segments<'a>(
    summary: &'a SummaryReport,
    opts: &'a ReportOptions,
) -> impl Iterator<Item = &'a crate::sim::SegmentSummary> {
    summary
        .segments
        .iter()
        .filter(move |s| opts.segments.as_ref().is_none_or(|list| list.contains(&s.index)))
}

/// Renders a run summary as a per-segment table or as JSON.
pub fn write_report(summary: &SummaryReport, format: ReportFormat, opts: &ReportOptions) -> String {
    match format {
        ReportFormat::Text => text_report(summary, opts),
        ReportFormat::Json => {
            serde_json::to_string_pretty(&json_report(summary, opts)).expect("report serializes")
                + "\n"
        }
    }
}

fn text_report(summary: &SummaryReport, opts: &ReportOptions) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "status: {}", status(summary));
    let _ = writeln!(
        out,
        "roll {:.3} deg, dt {} s, nominal speed {:.3} mm/s",
        summary.roll_deg, summary.dt, summary.nominal_speed
    );
    let _ = writeln!(
        out,
        "network length {:.3} mm, effective robot path {}, total time {:.3} s",
        summary.total_length,
        summary
            .effective_robot_path
            .map_or_else(|| "-".to_string(), |p| format!("{p:.3} mm")),
        summary.total_time
    );
    let _ = writeln!(
        out,
        "max compression {:.3} mm (limit {}), max tilt {:.3} deg (limit {}), max slip {:.6} mm/s",
        summary.max_compression,
        summary.limits.max_compression,
        summary.max_tilt_deg,
        summary.limits.max_tilt_deg,
        summary.max_slip
    );

    for seg in selected_segments(summary, opts) {
        let label = seg.label.as_deref().map(|l| format!(", {l}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "\nsegment {} ({}{label}) length {:.3} mm",
            seg.index, seg.kind, seg.length
        );
        let _ = writeln!(
            out,
            "  entry {} s, exit {} s, max compression {:.3} mm [{}], max tilt {:.3} deg [{}]",
            opt_t(seg.entry_t),
            opt_t(seg.exit_t),
            seg.max_compression,
            flag(seg.compression_ok),
            seg.max_tilt_deg,
            flag(seg.tilt_ok)
        );
        let _ = write!(
            out,
            "  {:<5} {:>10} {:>10} {:>10} {:>10} {:>10}",
            "track", "mean", "min", "max", "theo", "window"
        );
        if opts.ape {
            let _ = write!(out, " {:>8}", "APE%");
        }
        out.push('\n');
        for &i in &opts.tracks {
            let window = seg
                .window_speed
                .map_or_else(|| "-".to_string(), |w| format!("{:.3}", w[i]));
            let _ = write!(
                out,
                "  {:<5} {:>10.3} {:>10.3} {:>10.3} {:>10.3} {:>10}",
                TRACK_NAMES[i],
                seg.mean_speed[i],
                seg.min_speed[i],
                seg.max_speed[i],
                seg.mean_theoretical[i],
                window
            );
            if opts.ape {
                let ape = seg.window_ape[i].map_or_else(|| "-".to_string(), |a| format!("{a:.3}"));
                let _ = write!(out, " {ape:>8}");
            }
            out.push('\n');
        }
    }
    out
}

/// JSON document with `segments[]`, `tracks[]` and `limits{}`.
pub fn json_report(summary: &SummaryReport, opts: &ReportOptions) -> Value {
    let segments: Vec<Value> = selected_segments(summary, opts)
        .map(|seg| {
            let tracks: Vec<Value> = opts
                .tracks
                .iter()
                .map(|&i| {
                    let mut t = json!({
                        "name": TRACK_NAMES[i],
                        "mean_speed": seg.mean_speed[i],
                        "min_speed": seg.min_speed[i],
                        "max_speed": seg.max_speed[i],
                        "mean_theoretical": seg.mean_theoretical[i],
                        "window_speed": seg.window_speed.map(|w| w[i]),
                    });
                    if opts.ape {
                        t["window_ape"] = json!(seg.window_ape[i]);
                    }
                    t
                })
                .collect();
            json!({
                "index": seg.index,
                "kind": seg.kind,
                "label": seg.label,
                "length": seg.length,
                "entry_t": seg.entry_t,
                "exit_t": seg.exit_t,
                "max_compression": seg.max_compression,
                "max_tilt_deg": seg.max_tilt_deg,
                "compression_ok": seg.compression_ok,
                "tilt_ok": seg.tilt_ok,
                "tracks": tracks,
            })
        })
        .collect();
    let tracks: Vec<Value> = opts
        .tracks
        .iter()
        .map(|&i| serde_json::to_value(&summary.tracks[i]).expect("track serializes"))
        .collect();
    json!({
        "status": status(summary),
        "completed": summary.completed,
        "abort": summary.abort,
        "roll_deg": summary.roll_deg,
        "dt": summary.dt,
        "nominal_speed": summary.nominal_speed,
        "total_length": summary.total_length,
        "effective_robot_path": summary.effective_robot_path,
        "total_time": summary.total_time,
        "max_compression": summary.max_compression,
        "max_tilt_deg": summary.max_tilt_deg,
        "max_slip": summary.max_slip,
        "segments": segments,
        "tracks": tracks,
        "limits": summary.limits,
    })
}

/// Aggregate report for a set of runs at different roll orientations.
pub fn write_sweep_report(runs: &[SummaryReport], format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let entries: Vec<Value> = runs
                .iter()
                .map(|r| {
                    let means: Vec<f64> = r.tracks.iter().map(|t| t.mean_speed).collect();
                    let bends: Vec<Value> = r
                        .segments
                        .iter()
                        .filter(|s| s.kind == "bend")
                        .map(|s| {
                            json!({
                                "index": s.index,
                                "label": s.label,
                                "window_speed": s.window_speed,
                                "window_ape": s.window_ape,
                            })
                        })
                        .collect();
                    json!({
                        "roll_deg": r.roll_deg,
                        "status": status(r),
                        "total_time": r.total_time,
                        "track_mean_speed": means,
                        "mean_speed": means.iter().sum::<f64>() / 3.0,
                        "max_slip": r.max_slip,
                        "bends": bends,
                    })
                })
                .collect();
            serde_json::to_string_pretty(&json!({ "runs": entries })).expect("report serializes")
                + "\n"
        }
        ReportFormat::Text => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "{:>9} {:>10} {:>10} {:>10} {:>10} {:>10}  status",
                "roll_deg", "time_s", "mean_A", "mean_B", "mean_C", "mean"
            );
            for r in runs {
                let m: Vec<f64> = r.tracks.iter().map(|t| t.mean_speed).collect();
                let _ = writeln!(
                    out,
                    "{:>9.3} {:>10.3} {:>10.3} {:>10.3} {:>10.3} {:>10.3}  {}",
                    r.roll_deg,
                    r.total_time,
                    m[0],
                    m[1],
                    m[2],
                    m.iter().sum::<f64>() / 3.0,
                    status(r)
                );
                for s in r.segments.iter().filter(|s| s.kind == "bend") {
                    if let Some(w) = s.window_speed {
                        let _ = writeln!(
                            out,
                            "{:>9} bend {} window speeds A {:.3} B {:.3} C {:.3}",
                            "", s.index, w[0], w[1], w[2]
                        );
                    }
                }
            }
            out
        }
    }
}
