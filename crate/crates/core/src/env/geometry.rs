use super::EnvError;
use crate::angle::{azimuth, wrap};

pub type Point = [f64; 2];

/// Signed perpendicular distance from `ship` to the line through the
/// waypoints, positive to port of the track direction.
pub fn cross_track_error(ship: Point, start: Point, dest: Point) -> Result<f64, EnvError> {
    let tx = dest[0] - start[0];
    let ty = dest[1] - start[1];
    let len = tx.hypot(ty);
    if len == 0.0 {
        return Err(EnvError::DegeneratePath);
    }
    let sx = ship[0] - start[0];
    let sy = ship[1] - start[1];
    Ok((tx * sy - ty * sx) / len)
}

/// Track azimuth minus the ship's course over ground, wrapped to (-π, π].
/// Heading stands in for course when the ship is (almost) stopped.
pub fn course_angle_error(ship_vel: Point, heading: f64, start: Point, dest: Point) -> f64 {
    let track = azimuth(dest[0] - start[0], dest[1] - start[1]);
    let course = if ship_vel[0].hypot(ship_vel[1]) < 1e-9 {
        heading
    } else {
        azimuth(ship_vel[0], ship_vel[1])
    };
    wrap(track - course)
}

pub fn distance(a: Point, b: Point) -> f64 {
    (b[0] - a[0]).hypot(b[1] - a[1])
}
