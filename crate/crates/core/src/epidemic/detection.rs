use serde::{Deserialize, Serialize};

use super::InfectionTrajectory;
use crate::error::{Error, Result};
use crate::params::DetectionRule;

/// Distribution of the first day on which routine testing finds an infection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionStats {
    /// Expected detection day `tau_bar`.
    pub tau_bar: f64,
    /// `k = n / tau` tests per day, kept real-valued.
    pub tests_per_day: f64,
    /// `d(t)` for `t = 1..=tau`: first detection happens on day `t`.
    pub daily_detection_probs: Vec<f64>,
    /// Probability of no detection within `tau` days.
    pub residual_mass: f64,
}

/// Expected time to detect an infection when `n / tau` employees are tested per day.
///
/// With `Pr(t) = E[n_I(t)] / n` and `q(t) = (1 - Pr(t))^k`, the first detection
/// happens on day `t` with probability `d(t) = (1 - q(t)) * prod_{s<t} q(s)`.
/// Under [`DetectionRule::ResidualAtInterval`] the leftover mass
/// `prod_{s<=tau} q(s)` is placed on day `tau`, which keeps `1 <= tau_bar <= tau`.
pub fn expected_detection_time(
    trajectory: &InfectionTrajectory,
    n: u32,
    tau: u32,
    rule: DetectionRule,
) -> Result<DetectionStats> {
    if tau < 1 {
        return Err(Error::Argument("test interval must be at least one day".into()));
    }
    if n == 0 {
        return Err(Error::Argument("cannot test an empty organization".into()));
    }
    let days = tau as usize;
    if trajectory.horizon < days {
        return Err(Error::Argument(format!(
            "trajectory horizon {} is shorter than the test interval {tau}",
            trajectory.horizon
        )));
    }
    let nf = f64::from(n);
    let k = nf / f64::from(tau);

    let mut probs = Vec::with_capacity(days);
    let mut undetected = 1.0;
    let mut tau_bar = 0.0;
    for (t, &expected) in trajectory.expected_infected[1..=days].iter().enumerate() {
        // Rounding can push E slightly past n.
        let pr = (expected / nf).clamp(0.0, 1.0);
        let miss = (1.0 - pr).powf(k);
        let d = (1.0 - miss) * undetected;
        tau_bar += (t + 1) as f64 * d;
        probs.push(d);
        undetected *= miss;
    }
    if rule == DetectionRule::ResidualAtInterval {
        tau_bar += f64::from(tau) * undetected;
    }
    if !tau_bar.is_finite() {
        return Err(Error::NonFinite {
            context: "detection time",
        });
    }
    Ok(DetectionStats {
        tau_bar,
        tests_per_day: k,
        daily_detection_probs: probs,
        residual_mass: undetected,
    })
}

impl DetectionStats {
    /// Detection day rounded to the nearest whole day within `[1, tau]`.
    pub fn detection_day(&self, tau: u32) -> usize {
        let max = tau.max(1) as usize;
        (self.tau_bar.round().max(1.0) as usize).min(max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epidemic::trajectory_single_group;

    fn flat(n: u32, value: f64, horizon: usize) -> InfectionTrajectory {
        let mut t = trajectory_single_group(n, 0.0, 0.0, 0.0, horizon).unwrap();
        t.expected_infected = vec![value; horizon + 1];
        t
    }

    #[test]
    fn certain_infection_detected_on_day_one() {
        let t = flat(100, 100.0, 7);
        let s = expected_detection_time(&t, 100, 7, DetectionRule::ResidualAtInterval).unwrap();
        assert_eq!(s.daily_detection_probs[0], 1.0);
        assert_eq!(s.tau_bar, 1.0);
    }

    #[test]
    fn vanishing_spread_pushes_detection_to_interval() {
        let t = flat(100, 1e-9, 14);
        let s = expected_detection_time(&t, 100, 14, DetectionRule::ResidualAtInterval).unwrap();
        assert!(s.tau_bar > 13.99 && s.tau_bar <= 14.0, "{}", s.tau_bar);
        assert!(literal_small(&t));
        let literal = expected_detection_time(&t, 100, 14, DetectionRule::Literal).unwrap();
        assert!(literal.tau_bar < s.tau_bar);
        assert!((literal.tau_bar + 14.0 * literal.residual_mass - s.tau_bar).abs() < 1e-12);
    }

    fn literal_small(t: &InfectionTrajectory) -> bool {
        expected_detection_time(t, 100, 14, DetectionRule::Literal)
            .unwrap()
            .tau_bar
            < 1e-6
    }

    #[test]
    fn tests_per_day_is_real_valued() {
        let t = flat(100, 1.0, 7);
        let s = expected_detection_time(&t, 100, 7, DetectionRule::ResidualAtInterval).unwrap();
        assert_eq!(s.tests_per_day, 100.0 / 7.0);
        assert_eq!(s.daily_detection_probs.len(), 7);
    }

    #[test]
    fn argument_errors() {
        let t = flat(100, 1.0, 5);
        assert!(expected_detection_time(&t, 100, 0, DetectionRule::Literal).is_err());
        assert!(expected_detection_time(&t, 100, 7, DetectionRule::Literal).is_err());
    }

    #[test]
    fn detection_day_rounding() {
        let mut s = DetectionStats {
            tau_bar: 3.49,
            tests_per_day: 1.0,
            daily_detection_probs: vec![],
            residual_mass: 0.0,
        };
        assert_eq!(s.detection_day(7), 3);
        s.tau_bar = 3.5;
        assert_eq!(s.detection_day(7), 4);
        s.tau_bar = 0.2;
        assert_eq!(s.detection_day(7), 1);
        s.tau_bar = 9.0;
        assert_eq!(s.detection_day(7), 7);
    }
}
