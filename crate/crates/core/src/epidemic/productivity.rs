use crate::error::{Error, Result};

/// `occup (n - E) + prod (1 - occup) (n - E)`: healthy employees work on site
/// at full productivity or from home at ratio `prod`; infected ones contribute nothing.
pub fn total_productivity(n: u32, expected_infections: f64, prod: f64, occup: f64) -> Result<f64> {
    let nf = f64::from(n);
    if !expected_infections.is_finite() || !(0.0..=nf).contains(&expected_infections) {
        return Err(Error::Argument(format!(
            "expected infections must lie in [0, {n}], got {expected_infections}"
        )));
    }
    if !occup.is_finite() || !(0.0..=1.0).contains(&occup) {
        return Err(Error::Argument(format!("occupancy must lie in [0, 1], got {occup}")));
    }
    if !prod.is_finite() || prod < 0.0 {
        return Err(Error::Argument(format!("productivity ratio must be >= 0, got {prod}")));
    }
    let healthy = nf - expected_infections;
    Ok(occup * healthy + prod * (1.0 - occup) * healthy)
}

/// [`total_productivity`] divided by `n`, in `[0, 1]` for `prod < 1`.
pub fn normalized_productivity(n: u32, expected_infections: f64, prod: f64, occup: f64) -> Result<f64> {
    Ok(total_productivity(n, expected_infections, prod, occup)? / f64::from(n))
}
