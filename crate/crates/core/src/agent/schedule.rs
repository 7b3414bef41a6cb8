/// Exploration rate, linear from 1 at the first episode to 0 at `total`.
pub fn epsilon_at(episode: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    (1.0 - episode as f64 / total as f64).clamp(0.0, 1.0)
}

/// Exponentially decaying learning rate. With `staircase` the exponent is
/// floored to whole decay periods.
pub fn lr_at(
    update_step: u64,
    lr0: f64,
    decay_steps: f64,
    decay_rate: f64,
    staircase: bool,
) -> f64 {
    let mut p = update_step as f64 / decay_steps;
    if staircase {
        p = p.floor();
    }
    lr0 * decay_rate.powf(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_endpoints_and_midpoint() {
        assert_eq!(epsilon_at(0, 9000), 1.0);
        assert_eq!(epsilon_at(9000, 9000), 0.0);
        assert_eq!(epsilon_at(4500, 9000), 0.5);
    }

    #[test]
    fn learning_rate_examples() {
        assert_eq!(lr_at(0, 7.5e-4, 50_000.0, 0.4, false), 7.5e-4);
        assert!((lr_at(50_000, 7.5e-4, 50_000.0, 0.4, false) - 3.0e-4).abs() < 1e-15);
        let half = lr_at(25_000, 7.5e-4, 50_000.0, 0.4, false);
        assert!((half - 7.5e-4 * 0.4f64.sqrt()).abs() < 1e-15);
        assert!((half - 4.743e-4).abs() < 1e-7);
    }

    #[test]
    fn staircase_holds_within_a_period() {
        assert_eq!(lr_at(49_999, 7.5e-4, 50_000.0, 0.4, true), 7.5e-4);
        assert!((lr_at(50_000, 7.5e-4, 50_000.0, 0.4, true) - 3.0e-4).abs() < 1e-15);
    }
}
