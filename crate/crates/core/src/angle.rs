//! Angle helpers shared by every module.

use std::f64::consts::{PI, TAU};

/// Wraps an angle to `(-π, π]`.
pub fn wrap(angle: f64) -> f64 {
    if angle > -PI && angle <= PI {
        return angle;
    }
    let mut a = angle.rem_euclid(TAU);
    if a > PI {
        a -= TAU;
    }
    // rem_euclid maps -π onto π already; the only remaining edge is a == -π
    if a <= -PI {
        a += TAU;
    }
    a
}

/// Azimuth of a 2-D vector in `(-π, π]`, measured counterclockwise from +X.
pub fn azimuth(x: f64, y: f64) -> f64 {
    wrap(y.atan2(x))
}

pub fn deg(rad: f64) -> f64 {
    rad.to_degrees()
}

pub fn rad(deg: f64) -> f64 {
    deg.to_radians()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wrap_boundaries() {
        assert_eq!(wrap(PI), PI);
        assert_eq!(wrap(-PI), PI);
        assert_eq!(wrap(0.0), 0.0);
        assert!((wrap(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap(-0.5 * PI) + 0.5 * PI).abs() < 1e-15);
    }

    #[test]
    fn azimuth_of_negative_x_is_plus_pi() {
        assert_eq!(azimuth(-1.0, 0.0), PI);
        assert_eq!(azimuth(-1.0, -0.0), PI);
    }

    proptest! {
        #[test]
        fn wrap_stays_in_range(a in -100.0f64..100.0) {
            let w = wrap(a);
            prop_assert!(w > -PI && w <= PI);
            prop_assert!(((a - w) / TAU - ((a - w) / TAU).round()).abs() < 1e-9);
        }
    }
}
