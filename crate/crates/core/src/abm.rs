//! Agent-based Monte Carlo simulation of workplace spread.
//!
//! This is the independent check on the closed-form recursion: it never
//! touches the recursion's probabilities, only individual agents and coin flips.
//!
//! Each day every agent is on site with probability `occup`. Every present,
//! still-susceptible agent draws `floor(kappa)` contact partners (plus one more
//! with probability `frac(kappa)`) uniformly with replacement from the other
//! `n - 1` agents. A contact counts only if the partner is also present, and
//! an infectious partner transmits with the susceptible agent's own
//! probability (`beta_u` or `beta_v`). New cases become infectious the next
//! day; nobody recovers or is tested within the horizon.
//!
//! Run `r` draws from ChaCha8 stream `r` under the configured seed, so runs are
//! order-independent and can execute in parallel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::epidemic::SpreadModel;
use crate::error::{Error, Result};

pub const DEFAULT_HORIZON_DAYS: usize = 29;
pub const DEFAULT_RUNS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub n: u32,
    pub n_v: u32,
    pub beta_u: f64,
    pub beta_v: f64,
    pub kappa: f64,
    pub occup: f64,
    #[serde(default = "default_horizon")]
    pub horizon_days: usize,
    #[serde(default = "default_runs")]
    pub runs: usize,
    pub rng_seed: u64,
}

fn default_horizon() -> usize {
    DEFAULT_HORIZON_DAYS
}

fn default_runs() -> usize {
    DEFAULT_RUNS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    /// Mean infected count per day over all runs, days `0..=horizon`.
    pub mean_infected: Vec<f64>,
    /// Infected count per run and day.
    pub per_run_infected: Vec<Vec<u32>>,
    /// MAPE of the two-group recursion against `mean_infected` over days `1..=horizon`.
    pub mape_vs_recursion: f64,
}

impl SimulationConfig {
    pub fn spread_model(&self) -> SpreadModel {
        SpreadModel {
            n: self.n,
            n_v: self.n_v,
            beta_u: self.beta_u,
            beta_v: self.beta_v,
            kappa: self.kappa,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs < 1 {
            return Err(Error::param("runs", "need at least one run"));
        }
        if self.horizon_days < 1 {
            return Err(Error::param("horizon_days", "need at least one simulated day"));
        }
        if !self.occup.is_finite() || !(0.0..=1.0).contains(&self.occup) {
            return Err(Error::param("occup", format!("must lie in [0, 1], got {}", self.occup)));
        }
        // Shares the recursion's domain: n >= 2, probabilities in [0, 1],
        // kappa >= 0 and an unvaccinated seed.
        self.spread_model().validate()
    }
}

/// Mean absolute percentage error of `estimate` against `reference`.
pub fn mape(estimate: &[f64], reference: &[f64]) -> Result<f64> {
    if estimate.len() != reference.len() {
        return Err(Error::Argument(format!(
            "series lengths differ: {} vs {}",
            estimate.len(),
            reference.len()
        )));
    }
    if reference.is_empty() {
        return Err(Error::Argument("MAPE needs at least one point".into()));
    }
    let mut total = 0.0;
    for (t, (&a, &b)) in estimate.iter().zip(reference).enumerate() {
        if b == 0.0 || !b.is_finite() {
            return Err(Error::Argument(format!(
                "reference entry {t} is {b}; MAPE is undefined"
            )));
        }
        total += ((a - b) / b).abs();
    }
    Ok(total / reference.len() as f64)
}

fn run_once(config: &SimulationConfig, run: usize) -> Vec<u32> {
    let n = config.n as usize;
    let first_vaccinated = n - config.n_v as usize;
    let whole = config.kappa.floor() as usize;
    let frac = config.kappa - config.kappa.floor();

    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    rng.set_stream(run as u64);

    let mut infected = vec![false; n];
    let mut present = vec![false; n];
    let mut newly = Vec::new();
    // Agent 0 is the unvaccinated source.
    infected[0] = true;
    let mut count = 1u32;
    let mut series = Vec::with_capacity(config.horizon_days + 1);
    series.push(count);

    for _day in 1..=config.horizon_days {
        for slot in present.iter_mut() {
            *slot = rng.random::<f64>() < config.occup;
        }
        newly.clear();
        for agent in 0..n {
            if !present[agent] || infected[agent] {
                continue;
            }
            let beta = if agent >= first_vaccinated {
                config.beta_v
            } else {
                config.beta_u
            };
            let mut draws = whole;
            if frac > 0.0 && rng.random::<f64>() < frac {
                draws += 1;
            }
            let mut caught = false;
            for _ in 0..draws {
                let mut partner = rng.random_range(0..n - 1);
                if partner >= agent {
                    partner += 1;
                }
                if present[partner] && infected[partner] && rng.random::<f64>() < beta {
                    caught = true;
                }
            }
            if caught {
                newly.push(agent);
            }
        }
        for &agent in &newly {
            infected[agent] = true;
        }
        count += newly.len() as u32;
        series.push(count);
    }
    series
}

/// Runs the configured number of independent simulations and compares their
/// mean with the recursion.
pub fn simulate(config: &SimulationConfig) -> Result<SimulationResult> {
    config.validate()?;
    let per_run: Vec<Vec<u32>> = (0..config.runs)
        .into_par_iter()
        .map(|run| run_once(config, run))
        .collect();

    let days = config.horizon_days + 1;
    let mut mean = vec![0.0; days];
    for series in &per_run {
        for (m, &c) in mean.iter_mut().zip(series) {
            *m += f64::from(c);
        }
    }
    let runs = config.runs as f64;
    mean.iter_mut().for_each(|m| *m /= runs);

    let recursion = config.spread_model().trajectory(config.occup, config.horizon_days)?;
    let mape_vs_recursion = mape(&recursion.expected_infected[1..], &mean[1..])?;
    Ok(SimulationResult {
        mean_infected: mean,
        per_run_infected: per_run,
        mape_vs_recursion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> SimulationConfig {
        SimulationConfig {
            n: 40,
            n_v: 10,
            beta_u: 0.1,
            beta_v: 0.015,
            kappa: 6.5,
            occup: 0.8,
            horizon_days: 10,
            runs: 8,
            rng_seed: 7,
        }
    }

    #[test]
    fn mape_reference_cases() {
        let b = [1.0, 2.0, 4.0];
        assert_eq!(mape(&b, &b).unwrap(), 0.0);
        let a: Vec<f64> = b.iter().map(|x| 1.1 * x).collect();
        assert!((mape(&a, &b).unwrap() - 0.1).abs() < 1e-12);
        assert!(mape(&[1.0], &[0.0]).is_err());
        assert!(mape(&[1.0, 2.0], &[1.0]).is_err());
        assert!(mape(&[], &[]).is_err());
    }

    #[test]
    fn no_transmission_keeps_single_case() {
        let c = SimulationConfig {
            beta_u: 0.0,
            beta_v: 0.0,
            ..config()
        };
        let r = simulate(&c).unwrap();
        assert!(r.per_run_infected.iter().flatten().all(|&x| x == 1));
        assert_eq!(r.mape_vs_recursion, 0.0);
    }

    #[test]
    fn empty_workplace_keeps_single_case() {
        let c = SimulationConfig { occup: 0.0, ..config() };
        let r = simulate(&c).unwrap();
        assert!(r.mean_infected.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn same_seed_same_matrix() {
        let a = simulate(&config()).unwrap();
        let b = simulate(&config()).unwrap();
        assert_eq!(a.per_run_infected, b.per_run_infected);
        let c = simulate(&SimulationConfig {
            rng_seed: 8,
            ..config()
        })
        .unwrap();
        assert_ne!(a.per_run_infected, c.per_run_infected);
    }

    #[test]
    fn run_streams_do_not_depend_on_run_count() {
        let a = simulate(&config()).unwrap();
        let b = simulate(&SimulationConfig { runs: 3, ..config() }).unwrap();
        assert_eq!(&a.per_run_infected[..3], &b.per_run_infected[..]);
    }

    #[test]
    fn counts_are_monotone_and_bounded() {
        let r = simulate(&SimulationConfig {
            beta_u: 0.5,
            beta_v: 0.2,
            ..config()
        })
        .unwrap();
        for series in &r.per_run_infected {
            assert_eq!(series[0], 1);
            assert!(series.windows(2).all(|w| w[0] <= w[1]));
            assert!(series.iter().all(|&x| x <= 40));
        }
        assert!(r.mean_infected.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn invalid_configs() {
        assert!(simulate(&SimulationConfig { runs: 0, ..config() }).is_err());
        assert!(simulate(&SimulationConfig {
            horizon_days: 0,
            ..config()
        })
        .is_err());
        assert!(simulate(&SimulationConfig {
            beta_u: -0.1,
            ..config()
        })
        .is_err());
        assert!(simulate(&SimulationConfig {
            kappa: -1.0,
            ..config()
        })
        .is_err());
        assert!(simulate(&SimulationConfig { n_v: 40, ..config() }).is_err());
    }

    #[test]
    fn more_contacts_than_colleagues_is_allowed() {
        let r = simulate(&SimulationConfig {
            kappa: 100.0,
            ..config()
        })
        .unwrap();
        assert_eq!(r.mean_infected.len(), 11);
    }
}
