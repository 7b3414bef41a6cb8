//! 3-DOF (surge, sway, yaw) MMG maneuvering model.
//!
//! Conventions: the global frame has `psi` measured counterclockwise from
//! +X; the body frame has x forward and y to port. A positive rudder angle
//! turns the bow to starboard, so it produces a negative yaw rate.

mod integrate;
mod mmg;
mod params;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use integrate::{rk4, rk4_step, rudder_update, simulate};
pub use mmg::{kinematic_rates, mmg_accelerations, self_propulsion_rate, Accelerations};
pub use params::{
    HullDerivatives, HydroParams, MassTerms, ParamsFile, Propeller, Rudder, VesselBlock,
    PARAMS_SCHEMA_VERSION,
};

/// Integration substep in non-dim time.
pub const DT: f64 = 0.1;
/// RK4 substeps per agent action.
pub const SUBSTEPS_PER_ACTION: usize = 3;
/// Upper bound of the propeller-rate search.
pub const N_MAX: f64 = 1.0e4;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("missing coefficient `{0}`")]
    MissingCoefficient(String),
    #[error("unknown coefficient `{0}`")]
    UnknownCoefficient(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error("unsupported parameters schema version {0}")]
    UnsupportedSchema(u32),
    #[error("effective inertia terms are not positive definite")]
    SingularMassMatrix,
    #[error("no self-propulsion equilibrium for n in (0, {N_MAX}]")]
    NoEquilibrium,
    #[error("integration produced a non-finite state")]
    NonFiniteState,
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parsing parameters: {0}")]
    Parse(String),
}

/// Ownship state in non-dimensional units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VesselState {
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub u: f64,
    pub v: f64,
    pub r: f64,
    /// Actual rudder angle.
    pub delta: f64,
    /// Commanded rudder angle.
    pub delta_c: f64,
    /// Propeller rate, held constant through an episode.
    pub n: f64,
}

impl VesselState {
    /// Straight running along +X from the origin at unit surge speed.
    pub fn initial(n: f64) -> Self {
        Self {
            x: 0.0,
            y: 0.0,
            psi: 0.0,
            u: 1.0,
            v: 0.0,
            r: 0.0,
            delta: 0.0,
            delta_c: 0.0,
            n,
        }
    }

    /// Velocity over ground in the global frame.
    pub fn velocity_gcs(&self) -> [f64; 2] {
        let (s, c) = self.psi.sin_cos();
        [self.u * c - self.v * s, self.u * s + self.v * c]
    }

    pub fn position(&self) -> [f64; 2] {
        [self.x, self.y]
    }

    pub fn is_finite(&self) -> bool {
        [
            self.x,
            self.y,
            self.psi,
            self.u,
            self.v,
            self.r,
            self.delta,
            self.delta_c,
            self.n,
        ]
        .iter()
        .all(|v| v.is_finite())
    }

    /// Negative surge speed. Not forbidden, only reported.
    pub fn is_reversing(&self) -> bool {
        self.u < 0.0
    }
}
