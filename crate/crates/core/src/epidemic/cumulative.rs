use super::InfectionTrajectory;
use crate::error::{Error, Result};

/// Overlap-corrected cumulative infection count over days `0..=days`:
///
/// `Z(1) = E(0) + E(1) - E(1) E(0) / n` and
/// `Z(T) = E(T) + Z(T-1) - E(1) Z(T-1) / n` for `T >= 2`.
pub fn cumulative_z(trajectory: &InfectionTrajectory, days: usize) -> Result<f64> {
    cumulative_z_counted(trajectory, days).map(|(z, _)| z)
}

/// `rho * Z(days)`.
pub fn cumulative_infections(trajectory: &InfectionTrajectory, rho: f64, days: usize) -> Result<f64> {
    if !rho.is_finite() || !(0.0..=1.0).contains(&rho) {
        return Err(Error::Argument(format!(
            "arrival probability must lie in [0, 1], got {rho}"
        )));
    }
    Ok(rho * cumulative_z(trajectory, days)?)
}

pub(crate) fn cumulative_z_counted(trajectory: &InfectionTrajectory, days: usize) -> Result<(f64, usize)> {
    if days == 0 {
        return Err(Error::Argument("cumulative window must cover at least one day".into()));
    }
    if days > trajectory.horizon {
        return Err(Error::Argument(format!(
            "cumulative window of {days} days exceeds trajectory horizon {}",
            trajectory.horizon
        )));
    }
    let n = f64::from(trajectory.n);
    let e = &trajectory.expected_infected;
    let first = e[1];
    let mut z = e[0] + first - first * e[0] / n;
    let mut steps = 1;
    for &e_t in &e[2..=days] {
        z = e_t + z - first * z / n;
        steps += 1;
    }
    Ok((z, steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epidemic::trajectory_single_group;
    use approx::assert_relative_eq;

    #[test]
    fn no_spread_first_day() {
        let t = trajectory_single_group(100, 0.0, 10.0, 1.0, 5).unwrap();
        assert_relative_eq!(cumulative_z(&t, 1).unwrap(), 1.99, max_relative = 1e-15);
        assert_relative_eq!(cumulative_infections(&t, 1.0, 1).unwrap(), 1.99, max_relative = 1e-15);
    }

    #[test]
    fn zero_arrival_means_zero() {
        let t = trajectory_single_group(100, 0.3, 10.0, 1.0, 14).unwrap();
        for days in 1..=14 {
            assert_eq!(cumulative_infections(&t, 0.0, days).unwrap(), 0.0);
        }
    }

    #[test]
    fn window_bounds() {
        let t = trajectory_single_group(100, 0.3, 10.0, 1.0, 3).unwrap();
        assert!(matches!(cumulative_z(&t, 0), Err(Error::Argument(_))));
        assert!(matches!(cumulative_z(&t, 4), Err(Error::Argument(_))));
        assert!(cumulative_infections(&t, 1.5, 2).is_err());
    }

    #[test]
    fn step_count_is_window_length() {
        let t = trajectory_single_group(100, 0.05, 10.0, 1.0, 200).unwrap();
        for days in [1, 2, 14, 200] {
            assert_eq!(cumulative_z_counted(&t, days).unwrap().1, days);
        }
    }
}
