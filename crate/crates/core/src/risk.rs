//! Closest point of approach and collision risk.
//!
//! `DCPA = R sin(χ_R − θ − π)` and `TCPA = (R / V_R) cos(χ_R − θ − π)`, with
//! `θ` the bearing of the obstacle from the ship and `χ_R` the azimuth of the
//! obstacle's velocity relative to the ship. The risk index is
//! `CR = exp(−|DCPA| − TCPA)` while the approach lies ahead, zero otherwise.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angle::{azimuth, wrap};

/// Relative speeds at or below this are treated as no relative motion.
pub const STATIONARY_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum RiskError {
    #[error("no relative motion between ship and obstacle")]
    StationaryRelative,
    #[error("no obstacles to assess")]
    EmptyList,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeKinematics {
    pub range: f64,
    pub rel_speed: f64,
    pub chi_r: f64,
    pub chi_os: f64,
    pub theta: f64,
}

/// Per-obstacle risk record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrAssessment {
    pub obstacle_id: u32,
    pub range: f64,
    pub rel_speed: f64,
    pub chi_r: f64,
    pub chi_os: f64,
    pub theta: f64,
    pub dcpa: f64,
    pub tcpa: f64,
    pub cr: f64,
}

pub fn relative_kinematics(
    ship_pos: [f64; 2],
    ship_vel: [f64; 2],
    obs_pos: [f64; 2],
    obs_vel: [f64; 2],
) -> RelativeKinematics {
    let dx = obs_pos[0] - ship_pos[0];
    let dy = obs_pos[1] - ship_pos[1];
    let wx = obs_vel[0] - ship_vel[0];
    let wy = obs_vel[1] - ship_vel[1];
    let obs_speed = obs_vel[0].hypot(obs_vel[1]);
    RelativeKinematics {
        range: dx.hypot(dy),
        rel_speed: wx.hypot(wy),
        chi_r: azimuth(wx, wy),
        chi_os: if obs_speed > 0.0 {
            azimuth(obs_vel[0], obs_vel[1])
        } else {
            0.0
        },
        theta: azimuth(dx, dy),
    }
}

/// Signed DCPA and TCPA.
pub fn dcpa_tcpa(rel: &RelativeKinematics) -> Result<(f64, f64), RiskError> {
    if rel.rel_speed <= STATIONARY_THRESHOLD {
        return Err(RiskError::StationaryRelative);
    }
    let angle = wrap(rel.chi_r - rel.theta - PI);
    Ok((
        rel.range * angle.sin(),
        rel.range / rel.rel_speed * angle.cos(),
    ))
}

pub fn collision_risk(dcpa: f64, tcpa: f64) -> f64 {
    if tcpa > 0.0 {
        (-dcpa.abs() - tcpa).exp()
    } else {
        0.0
    }
}

/// Full assessment of one obstacle. Without relative motion the approach
/// never happens: DCPA is the current range, TCPA is infinite and CR is zero.
pub fn assess(
    obstacle_id: u32,
    ship_pos: [f64; 2],
    ship_vel: [f64; 2],
    obs_pos: [f64; 2],
    obs_vel: [f64; 2],
) -> CrAssessment {
    let rel = relative_kinematics(ship_pos, ship_vel, obs_pos, obs_vel);
    let (dcpa, tcpa, cr) = match dcpa_tcpa(&rel) {
        Ok((d, t)) => (d, t, collision_risk(d, t)),
        Err(_) => (rel.range, f64::INFINITY, 0.0),
    };
    CrAssessment {
        obstacle_id,
        range: rel.range,
        rel_speed: rel.rel_speed,
        chi_r: rel.chi_r,
        chi_os: rel.chi_os,
        theta: rel.theta,
        dcpa,
        tcpa,
        cr,
    }
}

/// Id of the obstacle with the highest risk; when nothing is at risk, the
/// nearest one. Ties go to the smallest id.
pub fn critical_obstacle(assessments: &[CrAssessment]) -> Result<u32, RiskError> {
    let any_risk = assessments.iter().any(|a| a.cr > 0.0);
    let key = |a: &CrAssessment| if any_risk { -a.cr } else { a.range };
    assessments
        .iter()
        .min_by(|a, b| {
            key(a)
                .total_cmp(&key(b))
                .then(a.obstacle_id.cmp(&b.obstacle_id))
        })
        .map(|a| a.obstacle_id)
        .ok_or(RiskError::EmptyList)
}
