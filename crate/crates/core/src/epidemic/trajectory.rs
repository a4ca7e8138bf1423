use serde::{Deserialize, Serialize};

use super::contacts_per_day;
use crate::error::{Error, Result};
use crate::params::OrganizationParams;

/// Day-indexed infection probabilities after one unvaccinated source
/// employee becomes infectious on day 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfectionTrajectory {
    pub n: u32,
    pub n_v: u32,
    pub occup: f64,
    pub kappa: f64,
    pub horizon: usize,
    /// `P^u_I(t)` for an unvaccinated employee other than the source.
    pub p_u: Vec<f64>,
    /// `P^v_I(t)` for a vaccinated employee. Empty for single-group runs.
    pub p_v: Vec<f64>,
    /// Expected number of infected employees, the source included.
    pub expected_infected: Vec<f64>,
    #[serde(skip)]
    steps: usize,
}

impl InfectionTrajectory {
    /// Number of recursion steps performed to build this trajectory.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn expected_at(&self, day: usize) -> Option<f64> {
        self.expected_infected.get(day).copied()
    }

    /// `1 + (n - n_v - 1) p_u(t) + n_v p_v(t)` from the stored probabilities.
    pub fn reconstruct_expected(&self, day: usize) -> f64 {
        let n = f64::from(self.n);
        let n_v = f64::from(self.n_v);
        let pv = self.p_v.get(day).copied().unwrap_or(0.0);
        1.0 + (n - n_v - 1.0) * self.p_u[day] + n_v * pv
    }
}

/// Spread inputs for a two-group (unvaccinated / vaccinated) workforce with a
/// fixed daily contact count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpreadModel {
    pub n: u32,
    pub n_v: u32,
    pub beta_u: f64,
    pub beta_v: f64,
    pub kappa: f64,
}

fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::param(name, format!("must lie in [0, 1], got {value}")))
    }
}

fn check_common(n: u32, beta: f64, kappa: f64, occup: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::param(
            "n",
            format!("need n >= 2 employees (the recursion divides by n - 1), got {n}"),
        ));
    }
    check_probability("beta_u", beta)?;
    if !kappa.is_finite() || kappa < 0.0 {
        return Err(Error::param("kappa", format!("must be finite and >= 0, got {kappa}")));
    }
    check_probability("occup", occup)
}

fn finite(value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite {
            context: "infection recursion",
        })
    }
}

/// Single-group recursion:
///
/// `P(t) = 1 - (1 - P(t-1)) [(1 - b)^(o^2 k / (n-1)) (1 - P(t-1) b)^(o k (1 - 1/(n-1)))]`
///
/// with `P(0) = 0` and `E[n_I(t)] = 1 + (n - 1) P(t)`.
pub fn trajectory_single_group(
    n: u32,
    beta_u: f64,
    kappa: f64,
    occup: f64,
    horizon: usize,
) -> Result<InfectionTrajectory> {
    check_common(n, beta_u, kappa, occup)?;
    let nf = f64::from(n);
    let source = occup * occup * kappa / (nf - 1.0);
    let others = occup * (kappa * (1.0 - 1.0 / (nf - 1.0)));

    let mut p_u = Vec::with_capacity(horizon + 1);
    let mut expected = Vec::with_capacity(horizon + 1);
    let mut p = 0.0;
    p_u.push(p);
    expected.push(1.0 + (nf - 1.0) * p);
    let mut steps = 0;
    for _ in 0..horizon {
        let stay = (1.0 - beta_u).powf(source) * (1.0 - p * beta_u).powf(others);
        p = finite(1.0 - (1.0 - p) * stay)?;
        steps += 1;
        p_u.push(p);
        expected.push(1.0 + (nf - 1.0) * p);
    }
    Ok(InfectionTrajectory {
        n,
        n_v: 0,
        occup,
        kappa,
        horizon,
        p_u,
        p_v: Vec::new(),
        expected_infected: expected,
        steps,
    })
}

impl SpreadModel {
    pub fn validate(&self) -> Result<()> {
        check_common(self.n, self.beta_u, self.kappa, 0.0)?;
        check_probability("beta_v", self.beta_v)?;
        if self.n_v >= self.n {
            return Err(Error::ModelDomain(format!(
                "n_v = {} leaves no unvaccinated source among n = {} employees (need n_v <= n - 1)",
                self.n_v, self.n
            )));
        }
        Ok(())
    }

    /// Two-group recursion, one step per day.
    ///
    /// Exponents: source contact `o^2 k / (n-1)`, unvaccinated others
    /// `o (n - n_v - 1)/(n-1) k (1 - 1/(n-1))`, vaccinated others
    /// `o n_v/(n-1) k (1 - 1/(n-1))`. The susceptible's own transmission
    /// probability applies to source and unvaccinated contacts; contacts with
    /// infected vaccinated employees transmit with `beta_v`.
    pub fn trajectory(&self, occup: f64, horizon: usize) -> Result<InfectionTrajectory> {
        self.validate()?;
        check_probability("occup", occup)?;
        let SpreadModel {
            n,
            n_v,
            beta_u,
            beta_v,
            kappa,
        } = *self;
        let nf = f64::from(n);
        let nvf = f64::from(n_v);
        let source = occup * occup * kappa / (nf - 1.0);
        let mix = kappa * (1.0 - 1.0 / (nf - 1.0));
        let unvacc = occup * ((nf - nvf - 1.0) / (nf - 1.0)) * mix;
        let vacc = occup * (nvf / (nf - 1.0)) * mix;

        let advance = |p_self: f64, beta_self: f64, pu: f64, pv: f64| {
            let stay =
                (1.0 - beta_self).powf(source) * (1.0 - pu * beta_self).powf(unvacc) * (1.0 - pv * beta_v).powf(vacc);
            1.0 - (1.0 - p_self) * stay
        };
        let expected_of = |pu: f64, pv: f64| 1.0 + (nf - nvf - 1.0) * pu + nvf * pv;

        let mut p_u = Vec::with_capacity(horizon + 1);
        let mut p_v = Vec::with_capacity(horizon + 1);
        let mut expected = Vec::with_capacity(horizon + 1);
        let (mut pu, mut pv) = (0.0, 0.0);
        p_u.push(pu);
        p_v.push(pv);
        expected.push(expected_of(pu, pv));
        let mut steps = 0;
        for _ in 0..horizon {
            let next_u = finite(advance(pu, beta_u, pu, pv))?;
            let next_v = finite(advance(pv, beta_v, pu, pv))?;
            pu = next_u;
            pv = next_v;
            steps += 1;
            p_u.push(pu);
            p_v.push(pv);
            expected.push(expected_of(pu, pv));
        }
        Ok(InfectionTrajectory {
            n,
            n_v,
            occup,
            kappa,
            horizon,
            p_u,
            p_v,
            expected_infected: expected,
            steps,
        })
    }
}

/// Two-group trajectory for an organization at occupancy `occup`, with the
/// contact rate taken from the organization's contact model.
pub fn trajectory_two_group(params: &OrganizationParams, occup: f64, horizon: usize) -> Result<InfectionTrajectory> {
    check_probability("occup", occup)?;
    let model = SpreadModel {
        n: params.n,
        n_v: params.n_v,
        beta_u: params.beta_u,
        beta_v: params.beta_v,
        kappa: contacts_per_day(params, occup),
    };
    model.trajectory(occup, horizon)
}
