//! Shaped per-step reward and episode termination.

use serde::{Deserialize, Serialize};

use super::geometry::{distance, Point};
use super::{Mode, Obstacle};
use crate::dynamics::VesselState;

pub const SUCCESS_REWARD: f64 = 20.0;
pub const STATIC_COLLISION_REWARD: f64 = -100.0;
pub const DYNAMIC_COLLISION_REWARD: f64 = -200.0;
/// Half a ship length, added to the obstacle radius for collision tests.
pub const SHIP_HALF_LENGTH: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardTerms {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub total: f64,
}

/// Cross-track, course-error and distance-to-go terms.
pub fn reward_step(d_c: f64, chi_e: f64, d_wp: f64) -> RewardTerms {
    let r1 = 2.0 * (-d_c * d_c / 12.5).exp() - 1.0;
    let r2 = 1.3 * (-10.0 * chi_e.abs()).exp() - 0.3;
    let r3 = -d_wp / 4.0;
    RewardTerms {
        r1,
        r2,
        r3,
        total: r1 + r2 + r3,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Running,
    Success,
    Collision,
    Diverged,
    StepLimit,
}

impl Status {
    pub fn is_terminal(self) -> bool {
        self != Status::Running
    }
}

/// Everything the terminal test needs about the current leg.
#[derive(Debug, Clone, Copy)]
pub struct LegContext {
    pub start: Point,
    pub dest: Point,
    pub final_leg: bool,
    pub success_radius: f64,
    pub mode: Mode,
    pub max_steps: usize,
}

/// Classifies the step. Collision wins over success, success over
/// divergence, divergence over the step limit. Only the final leg can
/// succeed; reaching an intermediate waypoint is handled by the caller.
pub fn terminal_check(
    ship: &VesselState,
    obstacles: &[Obstacle],
    leg: &LegContext,
    step_count: usize,
) -> (Status, f64) {
    let pos = ship.position();
    if obstacles
        .iter()
        .any(|o| distance(pos, [o.x, o.y]) <= o.radius + SHIP_HALF_LENGTH)
    {
        let penalty = match leg.mode {
            Mode::Static => STATIC_COLLISION_REWARD,
            Mode::Dynamic => DYNAMIC_COLLISION_REWARD,
        };
        return (Status::Collision, penalty);
    }
    if leg.final_leg && distance(pos, leg.dest) <= leg.success_radius {
        return (Status::Success, SUCCESS_REWARD);
    }
    let v1 = [leg.dest[0] - leg.start[0], leg.dest[1] - leg.start[1]];
    let v2 = [leg.dest[0] - pos[0], leg.dest[1] - pos[1]];
    let vel = ship.velocity_gcs();
    let dot = |a: [f64; 2], b: [f64; 2]| a[0] * b[0] + a[1] * b[1];
    if dot(v1, v2) < 0.0 && dot(vel, v2) < 0.0 {
        return (Status::Diverged, 0.0);
    }
    if step_count >= leg.max_steps {
        return (Status::StepLimit, 0.0);
    }
    (Status::Running, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn leg(mode: Mode) -> LegContext {
        LegContext {
            start: [0.0, 0.0],
            dest: [10.0, 0.0],
            final_leg: true,
            success_radius: 0.5,
            mode,
            max_steps: 160,
        }
    }

    fn ship_at(x: f64, y: f64) -> VesselState {
        VesselState {
            x,
            y,
            ..VesselState::initial(1.0)
        }
    }

    fn obstacle(x: f64, y: f64, radius: f64) -> Obstacle {
        Obstacle {
            id: 0,
            x,
            y,
            vx: 0.0,
            vy: 0.0,
            radius,
        }
    }

    #[test]
    fn reward_examples() {
        let t = reward_step(0.0, 0.0, 0.0);
        assert_eq!((t.r1, t.r2, t.r3, t.total), (1.0, 1.0, 0.0, 2.0));
        let t = reward_step(5.0, 0.0, 0.0);
        assert!((t.r1 - (2.0 * (-2.0f64).exp() - 1.0)).abs() < 1e-12);
        assert!((t.r1 + 0.729_329_433_526_774_6).abs() < 1e-12);
        let t = reward_step(0.0, 0.0, 12.0);
        assert_eq!(t.r3, -3.0);
        assert_eq!(t.total, -1.0);
    }

    #[test]
    fn success_inside_radius() {
        let s = ship_at(9.6, 0.0);
        assert_eq!(
            terminal_check(&s, &[], &leg(Mode::Static), 10),
            (Status::Success, 20.0)
        );
        let mut intermediate = leg(Mode::Static);
        intermediate.final_leg = false;
        assert_eq!(
            terminal_check(&s, &[], &intermediate, 10).0,
            Status::Running
        );
    }

    #[test]
    fn collision_envelope() {
        let s = ship_at(5.0, 0.0);
        let obs = [obstacle(5.9, 0.0, 0.5)];
        assert_eq!(
            terminal_check(&s, &obs, &leg(Mode::Static), 3),
            (Status::Collision, -100.0)
        );
        assert_eq!(
            terminal_check(&s, &obs, &leg(Mode::Dynamic), 3),
            (Status::Collision, -200.0)
        );
        let clear = [obstacle(6.1, 0.0, 0.5)];
        assert_eq!(
            terminal_check(&s, &clear, &leg(Mode::Static), 3).0,
            Status::Running
        );
    }

    #[test]
    fn collision_beats_success() {
        let s = ship_at(9.8, 0.0);
        let obs = [obstacle(10.0, 0.0, 0.2)];
        assert_eq!(
            terminal_check(&s, &obs, &leg(Mode::Static), 3).0,
            Status::Collision
        );
    }

    #[test]
    fn overshooting_ship_diverges() {
        let s = ship_at(12.0, 0.3);
        assert_eq!(
            terminal_check(&s, &[], &leg(Mode::Static), 3),
            (Status::Diverged, 0.0)
        );
        // past the goal but turning back
        let back = VesselState {
            psi: std::f64::consts::PI,
            ..s
        };
        assert_eq!(
            terminal_check(&back, &[], &leg(Mode::Static), 3).0,
            Status::Running
        );
    }

    #[test]
    fn step_limit() {
        let s = ship_at(1.0, 0.0);
        assert_eq!(
            terminal_check(&s, &[], &leg(Mode::Static), 159).0,
            Status::Running
        );
        assert_eq!(
            terminal_check(&s, &[], &leg(Mode::Static), 160).0,
            Status::StepLimit
        );
    }

    proptest! {
        #[test]
        fn reward_bounds(d_c in -15.0f64..15.0, chi in -3.15f64..3.15, d_wp in 0.0f64..18.0) {
            let t = reward_step(d_c, chi, d_wp);
            prop_assert!(t.r1 > -1.0 && t.r1 <= 1.0);
            prop_assert!(t.r2 > -0.3 && t.r2 <= 1.0);
            prop_assert!(t.r3 >= -4.5 && t.r3 <= 0.0);
            prop_assert!(t.total > -5.8 && t.total <= 2.0);
            let best = reward_step(0.0, 0.0, d_wp);
            prop_assert!(t.r1 <= best.r1 && t.r2 <= best.r2);
        }
    }
}
