//! MMG force model and equations of motion.
//!
//! Forces are evaluated in the conventional ship frame (y to starboard,
//! positive r to starboard) where the standard-method coefficients are
//! defined, then mapped back to the port-positive body frame used by the
//! rest of the crate.

use super::params::{HydroParams, MassTerms};
use super::{DynamicsError, VesselState, N_MAX};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accelerations {
    pub udot: f64,
    pub vdot: f64,
    pub rdot: f64,
}

/// Global-frame rates `(xdot, ydot, psidot)` from body velocities.
pub fn kinematic_rates(state: &VesselState) -> (f64, f64, f64) {
    let (s, c) = state.psi.sin_cos();
    (
        state.u * c - state.v * s,
        state.u * s + state.v * c,
        state.r,
    )
}

/// Body-frame accelerations for the current velocities, rudder angle and
/// propeller rate.
pub fn mmg_accelerations(
    state: &VesselState,
    params: &HydroParams,
) -> Result<Accelerations, DynamicsError> {
    let mass = params.mass_terms()?;
    Ok(accelerations(
        params,
        &mass,
        state.u,
        state.v,
        state.r,
        state.delta,
        state.n,
    ))
}

#[derive(Debug, Clone, Copy, Default)]
struct Forces {
    x: f64,
    y: f64,
    n: f64,
}

pub(crate) fn accelerations(
    p: &HydroParams,
    m: &MassTerms,
    u: f64,
    v: f64,
    r: f64,
    delta: f64,
    n: f64,
) -> Accelerations {
    // ship frame
    let vs = -v;
    let rs = -r;
    let f = hull_forces(p, u, vs, rs);
    let fp = propeller_thrust(p, u, vs, rs, n);
    let fr = rudder_forces(p, u, vs, rs, delta, n);

    let x = f.x + fp + fr.x;
    let y = f.y + fr.y;
    let nz = f.n + fr.n;

    let udot = (x + (p.mass + p.my) * vs * rs + p.xg * p.mass * rs * rs) / m.m11;
    let by = y - (p.mass + p.mx) * u * rs;
    let bn = nz - p.xg * p.mass * u * rs;
    let vdot_s = (m.m33 * by - m.m23 * bn) / m.det;
    let rdot_s = (m.m22 * bn - m.m23 * by) / m.det;

    Accelerations {
        udot,
        vdot: -vdot_s,
        rdot: -rdot_s,
    }
}

fn total_speed(u: f64, v: f64) -> f64 {
    (u * u + v * v).sqrt()
}

/// Hull forces, scaled by the instantaneous speed so that the polynomial
/// derivatives stay in their usual speed-normalized form.
fn hull_forces(p: &HydroParams, u: f64, v: f64, r: f64) -> Forces {
    let ut = total_speed(u, v);
    if ut < 1e-12 {
        return Forces::default();
    }
    let h = &p.hull;
    let x = -h.r0 * ut * ut
        + h.x_vv * v * v
        + h.x_vr * v * r
        + h.x_rr * r * r
        + h.x_vvvv * v * v * v * v / (ut * ut);
    let y = (h.y_v * v + h.y_r * r) * ut
        + (h.y_vvv * v * v * v + h.y_vvr * v * v * r + h.y_vrr * v * r * r + h.y_rrr * r * r * r)
            / ut;
    let n = (h.n_v * v + h.n_r * r) * ut
        + (h.n_vvv * v * v * v + h.n_vvr * v * v * r + h.n_vrr * v * r * r + h.n_rrr * r * r * r)
            / ut;
    Forces { x, y, n }
}

/// Drift angle and its value at a longitudinal station `x_station`.
fn drift_at(u: f64, v: f64, r: f64, x_station: f64) -> f64 {
    let ut = total_speed(u, v);
    let beta = (-v).atan2(u);
    if ut < 1e-12 {
        beta
    } else {
        beta - x_station * r / ut
    }
}

/// Propeller advance speed `u (1 - w_P)`.
fn advance_speed(p: &HydroParams, u: f64, v: f64, r: f64) -> f64 {
    let beta_p = drift_at(u, v, r, p.propeller.x_p);
    let wake = p.propeller.w_p0 * (-4.0 * beta_p * beta_p).exp();
    u * (1.0 - wake)
}

/// `n² D² K_T(J)` written without the advance ratio, so it stays finite at
/// `n = 0`.
fn thrust_loading(p: &HydroParams, ua: f64, n: f64) -> f64 {
    let pr = &p.propeller;
    let nd = n * pr.diameter;
    pr.k0 * nd * nd + pr.k1 * nd * ua + pr.k2 * ua * ua
}

fn propeller_thrust(p: &HydroParams, u: f64, v: f64, r: f64, n: f64) -> f64 {
    let ua = advance_speed(p, u, v, r);
    let d = p.propeller.diameter;
    // X_P / (½ρL²U²) = 2 (1 - t_P) n'² D'⁴ K_T
    2.0 * (1.0 - p.propeller.t_p) * d * d * thrust_loading(p, ua, n)
}

fn rudder_forces(p: &HydroParams, u: f64, v: f64, r: f64, delta: f64, n: f64) -> Forces {
    let rd = &p.rudder;
    let ua = advance_speed(p, u, v, r);
    let slip = (ua * ua + 8.0 * thrust_loading(p, ua, n) / std::f64::consts::PI).max(0.0);
    let accelerated = ua + rd.kappa * (slip.sqrt() - ua);
    let u_r = rd.epsilon * (rd.eta * accelerated * accelerated + (1.0 - rd.eta) * ua * ua).sqrt();

    let ut = total_speed(u, v);
    let beta = (-v).atan2(u);
    let v_r = rd.gamma_r * (ut * beta - rd.l_r * r);

    let alpha = delta - v_r.atan2(u_r);
    let normal = rd.area * (u_r * u_r + v_r * v_r) * rd.f_alpha * alpha.sin();
    let (sd, cd) = delta.sin_cos();
    Forces {
        x: -(1.0 - rd.t_r) * normal * sd,
        y: -(1.0 + rd.a_h) * normal * cd,
        n: -(rd.x_r + rd.a_h * rd.x_h) * normal * cd,
    }
}

/// Propeller rate at which thrust balances resistance in straight running at
/// design speed.
pub fn self_propulsion_rate(params: &HydroParams) -> Result<f64, DynamicsError> {
    let mass = params.mass_terms()?;
    let surge = |n: f64| accelerations(params, &mass, 1.0, 0.0, 0.0, 0.0, n).udot;

    let mut lo = 0.0;
    if surge(lo) >= 0.0 {
        return Err(DynamicsError::NoEquilibrium);
    }
    let mut hi = 1.0;
    while surge(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > N_MAX {
            if surge(N_MAX) < 0.0 {
                return Err(DynamicsError::NoEquilibrium);
            }
            hi = N_MAX;
            break;
        }
    }

    let mut best = hi;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f = surge(mid);
        if f.abs() < surge(best).abs() {
            best = mid;
        }
        if f == 0.0 || mid <= lo || mid >= hi {
            break;
        }
        if f < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if surge(best).abs() < 1e-10 {
        Ok(best)
    } else {
        Err(DynamicsError::NoEquilibrium)
    }
}
