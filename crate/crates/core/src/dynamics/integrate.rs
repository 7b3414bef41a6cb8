use super::mmg::accelerations;
use super::params::HydroParams;
use super::{DynamicsError, VesselState};
use crate::angle::wrap;

/// One classical fourth-order Runge-Kutta step of `y' = f(y)`.
pub fn rk4<const N: usize>(
    y: &[f64; N],
    dt: f64,
    mut f: impl FnMut(&[f64; N]) -> [f64; N],
) -> [f64; N] {
    let axpy = |a: &[f64; N], h: f64, k: &[f64; N]| {
        let mut out = *a;
        for (o, ki) in out.iter_mut().zip(k) {
            *o += h * ki;
        }
        out
    };
    let k1 = f(y);
    let k2 = f(&axpy(y, 0.5 * dt, &k1));
    let k3 = f(&axpy(y, 0.5 * dt, &k2));
    let k4 = f(&axpy(y, dt, &k3));
    let mut out = *y;
    for i in 0..N {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Rate-limited steering gear: moves `delta` toward `delta_c` by at most
/// `max_step`, never past the command and never beyond `±delta_max`.
pub fn rudder_update(delta: f64, delta_c: f64, max_step: f64, delta_max: f64) -> f64 {
    let target = delta_c.clamp(-delta_max, delta_max);
    let diff = target - delta;
    let next = if diff.abs() <= max_step {
        target
    } else {
        delta + max_step.copysign(diff)
    };
    next.clamp(-delta_max, delta_max)
}

/// Advances the ownship by `dt`. The rudder moves once, then is held for the
/// whole step; the propeller rate is unchanged.
pub fn rk4_step(
    state: &VesselState,
    params: &HydroParams,
    dt: f64,
) -> Result<VesselState, DynamicsError> {
    let mass = params.mass_terms()?;
    let rd = &params.rudder;
    let delta = rudder_update(state.delta, state.delta_c, rd.slew_rate * dt, rd.delta_max);
    let n = state.n;

    let y0 = [state.x, state.y, state.psi, state.u, state.v, state.r];
    let y1 = rk4(&y0, dt, |s| {
        let (sin, cos) = s[2].sin_cos();
        let a = accelerations(params, &mass, s[3], s[4], s[5], delta, n);
        [
            s[3] * cos - s[4] * sin,
            s[3] * sin + s[4] * cos,
            s[5],
            a.udot,
            a.vdot,
            a.rdot,
        ]
    });

    let next = VesselState {
        x: y1[0],
        y: y1[1],
        psi: wrap(y1[2]),
        u: y1[3],
        v: y1[4],
        r: y1[5],
        delta,
        delta_c: state.delta_c,
        n,
    };
    if next.is_finite() {
        Ok(next)
    } else {
        Err(DynamicsError::NonFiniteState)
    }
}

/// Integrates `steps` substeps of size `dt` and returns every state,
/// including the initial one.
pub fn simulate(
    initial: &VesselState,
    params: &HydroParams,
    dt: f64,
    steps: usize,
) -> Result<Vec<VesselState>, DynamicsError> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(*initial);
    let mut s = *initial;
    for _ in 0..steps {
        s = rk4_step(&s, params, dt)?;
        out.push(s);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{self_propulsion_rate, DT};

    #[test]
    fn rudder_examples() {
        let five = 5f64.to_radians();
        let max = 35f64.to_radians();
        assert_eq!(rudder_update(0.0, 0.0, five, max), 0.0);
        assert!((rudder_update(0.0, max, five, max) - five).abs() < 1e-15);
        assert_eq!(rudder_update(34f64.to_radians(), max, five, max), max);
        assert!((rudder_update(0.0, -max, five, max) + five).abs() < 1e-15);
    }

    #[test]
    fn scalar_decay() {
        let y = rk4(&[1.0], 0.1, |y| [-y[0]]);
        assert!((y[0] - 0.904_837_42).abs() < 1e-7);
        assert!((y[0] - (-0.1f64).exp()).abs() < 1e-7);
    }

    #[test]
    fn rest_is_a_fixed_point() {
        let p = HydroParams::kcs_like();
        let s = VesselState {
            u: 0.0,
            ..VesselState::initial(0.0)
        };
        let next = rk4_step(&s, &p, DT).unwrap();
        assert_eq!(next, s);
    }

    #[test]
    fn nan_state_is_rejected() {
        let p = HydroParams::kcs_like();
        let s = VesselState {
            u: f64::NAN,
            ..VesselState::initial(1.0)
        };
        assert!(matches!(
            rk4_step(&s, &p, DT),
            Err(DynamicsError::NonFiniteState)
        ));
    }

    #[test]
    fn calibrated_straight_run_holds_speed() {
        let p = HydroParams::kcs_like();
        let n = self_propulsion_rate(&p).unwrap();
        let traj = simulate(&VesselState::initial(n), &p, DT, 200).unwrap();
        for s in &traj {
            assert!((s.u - 1.0).abs() < 1e-6);
            assert_eq!(s.y, 0.0);
            assert_eq!(s.psi, 0.0);
        }
    }
}
