//! File formats: trajectory and risk CSV, SVG track plots.

use std::fmt::Write as _;

use navsim_core::agent::TrajectoryRow;
use navsim_core::angle::deg;
use navsim_core::env::{Obstacle, Point};
use navsim_core::{CrAssessment, HydroParams};

pub const TRAJECTORY_HEADER: [&str; 13] = [
    "t",
    "x",
    "y",
    "psi_deg",
    "u",
    "v",
    "r_deg",
    "delta_deg",
    "d_c",
    "chi_e_deg",
    "d_wp",
    "cr",
    "reward",
];

pub const RISK_HEADER: [&str; 9] = [
    "t",
    "obstacle_id",
    "range",
    "rel_speed",
    "dcpa",
    "tcpa",
    "cr",
    "critical_id",
    "step",
];

/// First line of every CSV: the scales that turn the columns back into
/// physical units.
pub fn units_comment(params: &HydroParams) -> String {
    format!(
        "# L = {} m, U = {} m/s; lengths in L, speeds in U, time in L/U, angles in degrees\n",
        params.length, params.speed
    )
}

fn num(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v}")
    }
}

fn finish(mut text: Vec<u8>, w: csv::Writer<Vec<u8>>) -> anyhow::Result<String> {
    text.extend(w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?);
    Ok(String::from_utf8(text)?)
}

pub fn trajectory_csv(params: &HydroParams, rows: &[TrajectoryRow]) -> anyhow::Result<String> {
    let head = units_comment(params).into_bytes();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TRAJECTORY_HEADER)?;
    for r in rows {
        w.write_record([
            num(r.t),
            num(r.x),
            num(r.y),
            num(deg(r.psi)),
            num(r.u),
            num(r.v),
            num(deg(r.r)),
            num(deg(r.delta)),
            num(r.d_c),
            num(deg(r.chi_e)),
            num(r.d_wp),
            num(r.cr),
            num(r.reward),
        ])?;
    }
    finish(head, w)
}

/// Per-step risk records: every obstacle at every step, plus the critical
/// obstacle id at that step (empty when there is none).
pub struct RiskStep {
    pub step: usize,
    pub t: f64,
    pub assessments: Vec<CrAssessment>,
    pub critical: Option<u32>,
}

pub fn risk_csv(params: &HydroParams, steps: &[RiskStep]) -> anyhow::Result<String> {
    let head = units_comment(params).into_bytes();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RISK_HEADER)?;
    for s in steps {
        let critical = s.critical.map(|c| c.to_string()).unwrap_or_default();
        for a in &s.assessments {
            w.write_record([
                num(s.t),
                a.obstacle_id.to_string(),
                num(a.range),
                num(a.rel_speed),
                num(a.dcpa),
                num(a.tcpa),
                num(a.cr),
                critical.clone(),
                s.step.to_string(),
            ])?;
        }
    }
    finish(head, w)
}

/// What goes into one track plot.
pub struct Plot<'a> {
    pub title: &'a str,
    pub waypoints: &'a [Point],
    pub success_radius: f64,
    /// Obstacles at their initial positions.
    pub obstacles: &'a [Obstacle],
    /// Centre paths of the obstacles, drawn for those that move.
    pub obstacle_tracks: &'a [Vec<Point>],
    pub ship_tracks: &'a [Vec<Point>],
}

const PX_PER_L: f64 = 30.0;
const MARGIN: f64 = 1.5;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Fixed four decimals, without a sign on zero.
fn f4(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

fn points(track: &[Point]) -> String {
    track
        .iter()
        .map(|p| format!("{},{}", f4(p[0]), f4(-p[1])))
        .collect::<Vec<_>>()
        .join(" ")
}

/// North-up plot in ship lengths: one polyline per vessel track (own ship
/// and each moving obstacle), circles for obstacles and waypoint zones, a
/// dashed line for the planned route.
pub fn render_svg(plot: &Plot) -> String {
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    let mut add = |p: Point, r: f64| {
        xs.extend([p[0] - r, p[0] + r]);
        ys.extend([-p[1] - r, -p[1] + r]);
    };
    plot.waypoints
        .iter()
        .for_each(|&p| add(p, plot.success_radius));
    plot.obstacles
        .iter()
        .for_each(|o| add(o.position(), o.radius));
    for t in plot.obstacle_tracks.iter().chain(plot.ship_tracks) {
        t.iter().for_each(|&p| add(p, 0.0));
    }
    let lo = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min) - MARGIN;
    let hi = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max) + MARGIN;
    let (x0, y0) = (lo(&xs), lo(&ys));
    let (w, h) = (hi(&xs) - x0, hi(&ys) - y0);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{:.0}" height="{:.0}" viewBox="{} {} {} {}">"#,
        w * PX_PER_L,
        h * PX_PER_L,
        f4(x0),
        f4(y0),
        f4(w),
        f4(h)
    );
    let _ = writeln!(s, "  <title>{}</title>", escape(plot.title));
    let _ = writeln!(
        s,
        r##"  <rect x="{}" y="{}" width="{}" height="{}" fill="#ffffff"/>"##,
        f4(x0),
        f4(y0),
        f4(w),
        f4(h)
    );
    if let Some((first, rest)) = plot.waypoints.split_first() {
        let mut d = format!("M {} {}", f4(first[0]), f4(-first[1]));
        for p in rest {
            let _ = write!(d, " L {} {}", f4(p[0]), f4(-p[1]));
        }
        let _ = writeln!(
            s,
            r##"  <path class="route" d="{d}" fill="none" stroke="#888888" stroke-width="0.05" stroke-dasharray="0.3 0.2"/>"##
        );
    }
    for p in plot.waypoints {
        let _ = writeln!(
            s,
            r##"  <circle class="waypoint" cx="{}" cy="{}" r="{}" fill="none" stroke="#2a9d3a" stroke-width="0.05"/>"##,
            f4(p[0]),
            f4(-p[1]),
            f4(plot.success_radius)
        );
    }
    for o in plot.obstacles {
        let _ = writeln!(
            s,
            r##"  <circle class="obstacle" cx="{}" cy="{}" r="{}" fill="#d62728" fill-opacity="0.45" stroke="#d62728" stroke-width="0.04"/>"##,
            f4(o.x),
            f4(-o.y),
            f4(o.radius)
        );
    }
    for (o, track) in plot.obstacles.iter().zip(plot.obstacle_tracks) {
        if o.vx == 0.0 && o.vy == 0.0 || track.len() < 2 {
            continue;
        }
        let _ = writeln!(
            s,
            r##"  <polyline class="obstacle-track" points="{}" fill="none" stroke="#d62728" stroke-width="0.05"/>"##,
            points(track)
        );
    }
    for track in plot.ship_tracks {
        let _ = writeln!(
            s,
            r##"  <polyline class="ship-track" points="{}" fill="none" stroke="#1f4e9c" stroke-width="0.08"/>"##,
            points(track)
        );
    }
    s.push_str("</svg>\n");
    s
}
