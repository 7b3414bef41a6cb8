//! Hull, propeller and rudder coefficient sets.
//!
//! Coefficients are loaded from a versioned JSON document. Every block is a
//! named map so that a missing or misspelled coefficient is reported by name.
//! Hull and mass terms are stored already non-dimensionalized in prime-II
//! form (forces by ½ρL²U², moments by ½ρL³U², mass by ½ρL³); propeller
//! diameter is given in metres and scaled by `L` on load.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::DynamicsError;

pub const PARAMS_SCHEMA_VERSION: u32 = 1;

const MASS_KEYS: &[&str] = &["mass", "mx", "my", "izz", "jzz", "xg"];
const HULL_KEYS: &[&str] = &[
    "R0", "X_vv", "X_vr", "X_rr", "X_vvvv", "Y_v", "Y_r", "Y_vvv", "Y_vvr", "Y_vrr", "Y_rrr",
    "N_v", "N_r", "N_vvv", "N_vvr", "N_vrr", "N_rrr",
];
const PROPELLER_KEYS: &[&str] = &["diameter_m", "t_p", "w_p0", "x_p", "k0", "k1", "k2"];
const RUDDER_KEYS: &[&str] = &[
    "area_ratio",
    "aspect_ratio",
    "t_r",
    "a_h",
    "x_h",
    "x_r",
    "epsilon",
    "kappa",
    "gamma_r",
    "l_r",
    "max_deflection_deg",
    "max_rate_deg_per_s",
];

/// On-disk layout of a parameters file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub schema_version: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub vessel: VesselBlock,
    pub mass: BTreeMap<String, f64>,
    pub hull: BTreeMap<String, f64>,
    pub propeller: BTreeMap<String, f64>,
    pub rudder: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VesselBlock {
    #[serde(rename = "L")]
    pub length_m: f64,
    #[serde(rename = "U")]
    pub speed_m_s: f64,
}

/// Hull force derivatives (MMG polynomial form, ship frame with y to
/// starboard).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HullDerivatives {
    pub r0: f64,
    pub x_vv: f64,
    pub x_vr: f64,
    pub x_rr: f64,
    pub x_vvvv: f64,
    pub y_v: f64,
    pub y_r: f64,
    pub y_vvv: f64,
    pub y_vvr: f64,
    pub y_vrr: f64,
    pub y_rrr: f64,
    pub n_v: f64,
    pub n_r: f64,
    pub n_vvv: f64,
    pub n_vvr: f64,
    pub n_vrr: f64,
    pub n_rrr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propeller {
    /// Diameter in units of L.
    pub diameter: f64,
    pub t_p: f64,
    pub w_p0: f64,
    pub x_p: f64,
    pub k0: f64,
    pub k1: f64,
    pub k2: f64,
}

impl Propeller {
    pub fn thrust_coefficient(&self, advance_ratio: f64) -> f64 {
        self.k0 + self.k1 * advance_ratio + self.k2 * advance_ratio * advance_ratio
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rudder {
    /// Rudder area over L².
    pub area: f64,
    pub aspect_ratio: f64,
    /// Propeller diameter over rudder span.
    pub eta: f64,
    /// Rudder lift gradient from the Fujii formula.
    pub f_alpha: f64,
    pub t_r: f64,
    pub a_h: f64,
    pub x_h: f64,
    pub x_r: f64,
    pub epsilon: f64,
    pub kappa: f64,
    pub gamma_r: f64,
    pub l_r: f64,
    /// Maximum deflection (rad).
    pub delta_max: f64,
    /// Maximum slew rate (rad per non-dim time unit).
    pub slew_rate: f64,
}

/// Complete coefficient set of the ownship.
#[derive(Debug, Clone, PartialEq)]
pub struct HydroParams {
    pub name: String,
    /// Length between perpendiculars (m).
    pub length: f64,
    /// Design speed (m/s).
    pub speed: f64,
    pub mass: f64,
    pub mx: f64,
    pub my: f64,
    pub izz: f64,
    pub jzz: f64,
    pub xg: f64,
    pub hull: HullDerivatives,
    pub propeller: Propeller,
    pub rudder: Rudder,
}

struct Block<'a> {
    name: &'static str,
    map: &'a BTreeMap<String, f64>,
}

impl<'a> Block<'a> {
    fn new(
        name: &'static str,
        map: &'a BTreeMap<String, f64>,
        known: &[&str],
    ) -> Result<Self, DynamicsError> {
        if let Some(unknown) = map.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(DynamicsError::UnknownCoefficient(format!(
                "{name}.{unknown}"
            )));
        }
        Ok(Self { name, map })
    }

    fn get(&self, key: &str) -> Result<f64, DynamicsError> {
        let v = *self
            .map
            .get(key)
            .ok_or_else(|| DynamicsError::MissingCoefficient(format!("{}.{key}", self.name)))?;
        if !v.is_finite() {
            return Err(DynamicsError::InvalidParameter {
                name: format!("{}.{key}", self.name),
                reason: "not finite".into(),
            });
        }
        Ok(v)
    }
}

fn invalid(name: &str, reason: &str) -> DynamicsError {
    DynamicsError::InvalidParameter {
        name: name.to_string(),
        reason: reason.to_string(),
    }
}

impl HydroParams {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, DynamicsError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| DynamicsError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, DynamicsError> {
        let file: ParamsFile =
            serde_json::from_str(text).map_err(|e| DynamicsError::Parse(e.to_string()))?;
        Self::from_file(&file)
    }

    /// The shipped KCS-like set, compiled into the binary.
    pub fn kcs_like() -> Self {
        Self::from_json(include_str!("../../../../params/kcs_like.json"))
            .expect("shipped parameter set is valid")
    }

    pub fn from_file(file: &ParamsFile) -> Result<Self, DynamicsError> {
        if file.schema_version != PARAMS_SCHEMA_VERSION {
            return Err(DynamicsError::UnsupportedSchema(file.schema_version));
        }
        let length = file.vessel.length_m;
        let speed = file.vessel.speed_m_s;
        if !(length > 0.0) {
            return Err(invalid("vessel.L", "must be positive"));
        }
        if !(speed > 0.0) {
            return Err(invalid("vessel.U", "must be positive"));
        }

        let m = Block::new("mass", &file.mass, MASS_KEYS)?;
        let h = Block::new("hull", &file.hull, HULL_KEYS)?;
        let p = Block::new("propeller", &file.propeller, PROPELLER_KEYS)?;
        let r = Block::new("rudder", &file.rudder, RUDDER_KEYS)?;

        let hull = HullDerivatives {
            r0: h.get("R0")?,
            x_vv: h.get("X_vv")?,
            x_vr: h.get("X_vr")?,
            x_rr: h.get("X_rr")?,
            x_vvvv: h.get("X_vvvv")?,
            y_v: h.get("Y_v")?,
            y_r: h.get("Y_r")?,
            y_vvv: h.get("Y_vvv")?,
            y_vvr: h.get("Y_vvr")?,
            y_vrr: h.get("Y_vrr")?,
            y_rrr: h.get("Y_rrr")?,
            n_v: h.get("N_v")?,
            n_r: h.get("N_r")?,
            n_vvv: h.get("N_vvv")?,
            n_vvr: h.get("N_vvr")?,
            n_vrr: h.get("N_vrr")?,
            n_rrr: h.get("N_rrr")?,
        };

        let diameter_m = p.get("diameter_m")?;
        if !(diameter_m > 0.0) {
            return Err(invalid("propeller.diameter_m", "must be positive"));
        }
        let propeller = Propeller {
            diameter: diameter_m / length,
            t_p: p.get("t_p")?,
            w_p0: p.get("w_p0")?,
            x_p: p.get("x_p")?,
            k0: p.get("k0")?,
            k1: p.get("k1")?,
            k2: p.get("k2")?,
        };
        if !(propeller.k0 > 0.0) {
            return Err(invalid("propeller.k0", "bollard thrust must be positive"));
        }

        let area = r.get("area_ratio")?;
        let aspect_ratio = r.get("aspect_ratio")?;
        if !(area > 0.0) || !(aspect_ratio > 0.0) {
            return Err(invalid(
                "rudder.area_ratio",
                "area and aspect ratio must be positive",
            ));
        }
        let span = (aspect_ratio * area).sqrt();
        let delta_max = r.get("max_deflection_deg")?.to_radians();
        if !(delta_max > 0.0) {
            return Err(invalid("rudder.max_deflection_deg", "must be positive"));
        }
        // deg/s scaled to one non-dim time unit L/U
        let slew_rate = r.get("max_rate_deg_per_s")?.to_radians() * length / speed;
        if !(slew_rate > 0.0) {
            return Err(invalid("rudder.max_rate_deg_per_s", "must be positive"));
        }
        let rudder = Rudder {
            area,
            aspect_ratio,
            eta: propeller.diameter / span,
            f_alpha: 6.13 * aspect_ratio / (aspect_ratio + 2.25),
            t_r: r.get("t_r")?,
            a_h: r.get("a_h")?,
            x_h: r.get("x_h")?,
            x_r: r.get("x_r")?,
            epsilon: r.get("epsilon")?,
            kappa: r.get("kappa")?,
            gamma_r: r.get("gamma_r")?,
            l_r: r.get("l_r")?,
            delta_max,
            slew_rate,
        };

        let params = HydroParams {
            name: file.name.clone(),
            length,
            speed,
            mass: m.get("mass")?,
            mx: m.get("mx")?,
            my: m.get("my")?,
            izz: m.get("izz")?,
            jzz: m.get("jzz")?,
            xg: m.get("xg")?,
            hull,
            propeller,
            rudder,
        };
        if !(params.mass > 0.0) {
            return Err(invalid("mass.mass", "must be positive"));
        }
        params.mass_terms()?;
        Ok(params)
    }

    /// Seconds per non-dimensional time unit.
    pub fn time_scale(&self) -> f64 {
        self.length / self.speed
    }

    /// Effective surge, sway-yaw inertia terms; fails when the sway-yaw block
    /// is not positive definite.
    pub fn mass_terms(&self) -> Result<MassTerms, DynamicsError> {
        let m11 = self.mass + self.mx;
        let m22 = self.mass + self.my;
        let m23 = self.xg * self.mass;
        let m33 = self.izz + self.xg * self.xg * self.mass + self.jzz;
        let det = m22 * m33 - m23 * m23;
        if !(m11 > 0.0 && m22 > 0.0 && m33 > 0.0 && det > 0.0) {
            return Err(DynamicsError::SingularMassMatrix);
        }
        Ok(MassTerms {
            m11,
            m22,
            m23,
            m33,
            det,
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MassTerms {
    pub m11: f64,
    pub m22: f64,
    pub m23: f64,
    pub m33: f64,
    pub det: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shipped() -> ParamsFile {
        serde_json::from_str(include_str!("../../../../params/kcs_like.json")).unwrap()
    }

    #[test]
    fn shipped_set_loads() {
        let p = HydroParams::kcs_like();
        assert!((p.rudder.delta_max - 35f64.to_radians()).abs() < 1e-15);
        assert!(p.rudder.slew_rate > 0.0);
        assert!(p.propeller.k0 > 0.0);
        assert!(p.izz + p.jzz > 0.0);
    }

    #[test]
    fn missing_coefficient_is_named() {
        let mut f = shipped();
        f.hull.remove("Y_vvr");
        match HydroParams::from_file(&f) {
            Err(DynamicsError::MissingCoefficient(name)) => assert_eq!(name, "hull.Y_vvr"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_coefficient_rejected() {
        let mut f = shipped();
        f.rudder.insert("flap".into(), 1.0);
        assert!(matches!(
            HydroParams::from_file(&f),
            Err(DynamicsError::UnknownCoefficient(_))
        ));
    }

    #[test]
    fn unknown_top_level_key_rejected() {
        let text = include_str!("../../../../params/kcs_like.json").replacen(
            "\"schema_version\"",
            "\"extra\": 1, \"schema_version\"",
            1,
        );
        assert!(matches!(
            HydroParams::from_json(&text),
            Err(DynamicsError::Parse(_))
        ));
    }

    #[test]
    fn negative_inertia_is_singular() {
        let mut f = shipped();
        f.mass.insert("jzz".into(), -1.0);
        assert!(matches!(
            HydroParams::from_file(&f),
            Err(DynamicsError::SingularMassMatrix)
        ));
    }

    #[test]
    fn wrong_schema_version() {
        let mut f = shipped();
        f.schema_version = 7;
        assert!(matches!(
            HydroParams::from_file(&f),
            Err(DynamicsError::UnsupportedSchema(7))
        ));
    }
}
