//! Closed-form evaluation of workplace spread after a single infection arrives.
//!
//! Everything here is a pure function of its inputs. The recursions run
//! bottom-up, so a trajectory over `T` days costs `T` steps.

mod cumulative;
mod detection;
mod productivity;
mod trajectory;

pub use cumulative::{cumulative_infections, cumulative_z};
pub use detection::{expected_detection_time, DetectionStats};
pub use productivity::{normalized_productivity, total_productivity};
pub use trajectory::{trajectory_single_group, trajectory_two_group, InfectionTrajectory, SpreadModel};

use crate::error::{Error, Result};
use crate::params::{ArrivalPeriod, OrganizationParams};

const PER_CAPITA: f64 = 100_000.0;

fn weekly_per_capita(incidence_7day: f64) -> Result<f64> {
    if !incidence_7day.is_finite() || incidence_7day < 0.0 {
        return Err(Error::param(
            "incidence_7day",
            format!("must be finite and >= 0, got {incidence_7day}"),
        ));
    }
    let risk = incidence_7day / PER_CAPITA;
    if risk > 1.0 {
        return Err(Error::param(
            "incidence_7day",
            format!("incidence {incidence_7day} per 100000 exceeds certainty"),
        ));
    }
    Ok(risk)
}

/// Probability that a single employee catches an infection in the community
/// during one period.
pub fn per_employee_risk_for(incidence_7day: f64, period: ArrivalPeriod) -> Result<f64> {
    let weekly = weekly_per_capita(incidence_7day)?;
    Ok(match period {
        ArrivalPeriod::Weekly => weekly,
        ArrivalPeriod::Daily => 1.0 - (1.0 - weekly).powf(1.0 / 7.0),
    })
}

/// Probability that at least one of `n` employees brings an infection in
/// during one period: `1 - (1 - incidence / 100000)^n` for the weekly period.
pub fn arrival_probability_for(n: u32, incidence_7day: f64, period: ArrivalPeriod) -> Result<f64> {
    if n == 0 {
        return Err(Error::param("n", "need at least one employee"));
    }
    let weekly = weekly_per_capita(incidence_7day)?;
    let exponent = match period {
        ArrivalPeriod::Weekly => f64::from(n),
        ArrivalPeriod::Daily => f64::from(n) / 7.0,
    };
    Ok(1.0 - (1.0 - weekly).powf(exponent))
}

/// Background risk `rho` for the organization.
pub fn arrival_probability(params: &OrganizationParams) -> Result<f64> {
    arrival_probability_for(params.n, params.incidence_7day, params.arrival_period)
}

/// Per-employee community risk, for display next to the organization-level value.
pub fn per_employee_risk(params: &OrganizationParams) -> Result<f64> {
    per_employee_risk_for(params.incidence_7day, params.arrival_period)
}

/// Mean contacts per present employee per day at occupancy `occup`.
pub fn contacts_per_day(params: &OrganizationParams, occup: f64) -> f64 {
    params.contact_base + params.contact_slope * occup * params.n_f64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn arrival_probability_reference_values() {
        let p = arrival_probability_for(100, 500.0, ArrivalPeriod::Weekly).unwrap();
        assert_relative_eq!(p, 1.0 - 0.995f64.powi(100), max_relative = 1e-14);
        assert!((p - 0.394).abs() < 1e-3);
        assert_eq!(arrival_probability_for(37, 0.0, ArrivalPeriod::Weekly).unwrap(), 0.0);
        assert_relative_eq!(
            arrival_probability_for(1, 500.0, ArrivalPeriod::Weekly).unwrap(),
            0.005,
            max_relative = 1e-12
        );
    }

    #[test]
    fn daily_period_compounds_to_weekly() {
        let day = arrival_probability_for(100, 500.0, ArrivalPeriod::Daily).unwrap();
        let week = arrival_probability_for(100, 500.0, ArrivalPeriod::Weekly).unwrap();
        assert_relative_eq!(1.0 - (1.0 - day).powi(7), week, max_relative = 1e-12);
        let per = per_employee_risk_for(500.0, ArrivalPeriod::Daily).unwrap();
        assert_relative_eq!(1.0 - (1.0 - per).powi(7), 0.005, max_relative = 1e-12);
    }

    #[test]
    fn incidence_above_certainty_is_rejected() {
        let err = arrival_probability_for(10, 100_001.0, ArrivalPeriod::Weekly).unwrap_err();
        assert_eq!(err.field(), Some("incidence_7day"));
        assert!(arrival_probability_for(10, -1.0, ArrivalPeriod::Weekly).is_err());
    }

    #[test]
    fn contact_model() {
        let mut p = OrganizationParams {
            n: 100,
            contact_base: 5.0,
            contact_slope: 0.10,
            ..Default::default()
        };
        assert_relative_eq!(contacts_per_day(&p, 1.0), 15.0);
        p.contact_slope = 0.20;
        assert_relative_eq!(contacts_per_day(&p, 0.5), 15.0);
        p.contact_slope = 0.0;
        assert_eq!(contacts_per_day(&p, 0.37), 5.0);
    }
}
