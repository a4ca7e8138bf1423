//! Occupancy strategies, their two objectives, and the non-dominated set.
//!
//! Candidates are the occupancies `i / n` for `i = 0..=n` at or above the
//! occupancy threshold. Each is scored on expected infections (minimised)
//! and total productivity (maximised).

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::epidemic::{
    arrival_probability, cumulative_z, expected_detection_time, total_productivity, trajectory_two_group,
};
use crate::error::{Error, Result};
use crate::params::{InfectionEstimator, OrganizationParams};

/// One scored occupancy strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoPoint {
    pub occup: f64,
    pub present_count: u32,
    pub expected_infections: f64,
    pub total_productivity: f64,
    pub tau_bar: f64,
}

impl ParetoPoint {
    /// Weakly better on both objectives and strictly better on at least one.
    pub fn dominates(&self, other: &ParetoPoint) -> bool {
        self.expected_infections <= other.expected_infections
            && self.total_productivity >= other.total_productivity
            && (self.expected_infections < other.expected_infections
                || self.total_productivity > other.total_productivity)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParetoFrontier {
    /// Non-dominated strategies in ascending occupancy.
    pub points: Vec<ParetoPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl ParetoFrontier {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn occupancies(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.occup).collect()
    }

    /// Checks the ordering and non-domination invariants.
    pub fn check_invariants(&self) -> Result<()> {
        for w in self.points.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if !(a.occup < b.occup
                && a.expected_infections < b.expected_infections
                && a.total_productivity < b.total_productivity)
            {
                return Err(Error::ModelDomain(format!(
                    "frontier not strictly increasing between occup {} and {}",
                    a.occup, b.occup
                )));
            }
        }
        for a in &self.points {
            if let Some(b) = self.points.iter().find(|b| b.dominates(a)) {
                return Err(Error::ModelDomain(format!(
                    "frontier point at occup {} is dominated by occup {}",
                    a.occup, b.occup
                )));
            }
        }
        Ok(())
    }

    /// CSV with columns `occup,present_count,expected_infections,total_productivity_normalized,tau_bar`.
    pub fn write_csv<W: Write>(&self, n: u32, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for p in &self.points {
            w.serialize(FrontierRow::from_point(p, n))?;
        }
        if self.points.is_empty() {
            w.write_record(FrontierRow::HEADER)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self, n: u32) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(n, &mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Parses rows written by [`ParetoFrontier::write_csv`].
    pub fn read_csv<R: Read>(input: R) -> Result<Vec<FrontierRow>> {
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers()?.clone();
        if header.iter().ne(FrontierRow::HEADER.iter().copied()) {
            return Err(Error::Parse(format!("unexpected frontier header: {header:?}")));
        }
        r.deserialize().map(|row| row.map_err(Error::from)).collect()
    }

    pub fn rows(&self, n: u32) -> Vec<FrontierRow> {
        self.points.iter().map(|p| FrontierRow::from_point(p, n)).collect()
    }
}

/// Plot-ready frontier row with productivity normalised by head count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierRow {
    pub occup: f64,
    pub present_count: u32,
    pub expected_infections: f64,
    pub total_productivity_normalized: f64,
    pub tau_bar: f64,
}

impl FrontierRow {
    pub const HEADER: [&'static str; 5] = [
        "occup",
        "present_count",
        "expected_infections",
        "total_productivity_normalized",
        "tau_bar",
    ];

    pub fn from_point(p: &ParetoPoint, n: u32) -> Self {
        FrontierRow {
            occup: p.occup,
            present_count: p.present_count,
            expected_infections: p.expected_infections,
            total_productivity_normalized: p.total_productivity / f64::from(n),
            tau_bar: p.tau_bar,
        }
    }
}

/// All occupancies `i / n` that satisfy the threshold, ascending.
pub fn enumerate_candidates(params: &OrganizationParams) -> Result<Vec<f64>> {
    Ok(candidate_counts(params)?
        .into_iter()
        .map(|i| f64::from(i) / params.n_f64())
        .collect())
}

fn candidate_counts(params: &OrganizationParams) -> Result<Vec<u32>> {
    if params.n < 2 {
        return Err(Error::param("n", format!("need n >= 2 employees, got {}", params.n)));
    }
    if params.occupancy_threshold > 1.0 {
        log::warn!(
            "occupancy threshold {} exceeds 1; no feasible strategy",
            params.occupancy_threshold
        );
        return Ok(Vec::new());
    }
    let n = params.n_f64();
    Ok((0..=params.n)
        .filter(|&i| f64::from(i) / n >= params.occupancy_threshold)
        .collect())
}

/// Expected-infection objective for one occupancy, composed as selected by
/// `params.estimator`. Returns `(expected_infections, tau_bar)`.
fn infection_objective(params: &OrganizationParams, rho: f64, occup: f64) -> Result<(f64, f64)> {
    let tau = params.tau;
    let trajectory = trajectory_two_group(params, occup, tau as usize)?;
    let detection = expected_detection_time(&trajectory, params.n, tau, params.detection_rule)?;
    let day = detection.detection_day(tau);
    let expected = |d: usize| trajectory.expected_infected[d];
    let infections = match params.estimator {
        InfectionEstimator::PresentArrival => rho * occup * expected(day),
        InfectionEstimator::CumulativeArrival => rho * cumulative_z(&trajectory, day)?,
        InfectionEstimator::DetectionHorizon => expected(day),
        InfectionEstimator::TestInterval => expected(tau as usize),
    };
    Ok((infections, detection.tau_bar))
}

fn evaluate_count(params: &OrganizationParams, rho: f64, present: u32) -> Result<ParetoPoint> {
    let occup = f64::from(present) / params.n_f64();
    let (infections, tau_bar) = infection_objective(params, rho, occup)?;
    // Productivity saturates once every employee is expected to be infected.
    let healthy_basis = infections.min(params.n_f64());
    let tp = total_productivity(params.n, healthy_basis, params.prod, occup)?;
    Ok(ParetoPoint {
        occup,
        present_count: present,
        expected_infections: infections,
        total_productivity: tp,
        tau_bar,
    })
}

/// Scores a single occupancy. `occup` is snapped to the nearest multiple of `1 / n`.
pub fn evaluate_strategy(params: &OrganizationParams, occup: f64) -> Result<ParetoPoint> {
    params.validate()?;
    if !occup.is_finite() || !(0.0..=1.0).contains(&occup) {
        return Err(Error::param("occup", format!("must lie in [0, 1], got {occup}")));
    }
    let rho = arrival_probability(params)?;
    let present = (occup * params.n_f64()).round() as u32;
    evaluate_count(params, rho, present)
}

/// Scores every candidate occupancy, ascending.
pub fn evaluate_all(params: &OrganizationParams) -> Result<Vec<ParetoPoint>> {
    params.validate()?;
    let rho = arrival_probability(params)?;
    candidate_counts(params)?
        .into_par_iter()
        .map(|i| evaluate_count(params, rho, i))
        .collect()
}

/// Sweep-line filter over already-scored candidates.
///
/// Candidates are visited from the fewest expected infections to the most
/// (ties: higher productivity first); a candidate is kept only if its
/// productivity strictly exceeds everything kept so far. When infections
/// grow with occupancy this is exactly the ascending-occupancy scan.
pub fn sweep_filter(candidates: &[ParetoPoint]) -> Vec<ParetoPoint> {
    let mut order: Vec<&ParetoPoint> = candidates.iter().collect();
    order.sort_by(|a, b| {
        a.expected_infections
            .total_cmp(&b.expected_infections)
            .then(b.total_productivity.total_cmp(&a.total_productivity))
            .then(a.occup.total_cmp(&b.occup))
    });
    let mut kept: Vec<ParetoPoint> = Vec::new();
    let mut max_prod = f64::NEG_INFINITY;
    for p in order {
        let duplicate = kept.last().is_some_and(|last| {
            last.expected_infections == p.expected_infections && last.total_productivity == p.total_productivity
        });
        if p.total_productivity > max_prod || duplicate {
            max_prod = max_prod.max(p.total_productivity);
            kept.push(p.clone());
        }
    }
    kept.sort_by(|a, b| a.occup.total_cmp(&b.occup));
    kept
}

/// Pareto-optimal occupancy strategies for the organization.
pub fn pareto_sweep(params: &OrganizationParams) -> Result<ParetoFrontier> {
    let candidates = evaluate_all(params)?;
    if candidates.is_empty() {
        return Ok(ParetoFrontier {
            points: Vec::new(),
            diagnostic: Some(format!(
                "no candidate occupancy satisfies the threshold {}",
                params.occupancy_threshold
            )),
        });
    }
    Ok(ParetoFrontier {
        points: sweep_filter(&candidates),
        diagnostic: None,
    })
}

/// Pairwise O(m^2) dominance filter. Kept independent of the sweep so it can
/// serve as its oracle.
pub fn brute_force_frontier(points: &[ParetoPoint]) -> ParetoFrontier {
    let mut kept: Vec<ParetoPoint> = points
        .iter()
        .filter(|a| !points.iter().any(|b| b.dominates(a)))
        .cloned()
        .collect();
    kept.sort_by(|a, b| a.occup.total_cmp(&b.occup));
    ParetoFrontier {
        points: kept,
        diagnostic: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(occup: f64, inf: f64, tp: f64) -> ParetoPoint {
        ParetoPoint {
            occup,
            present_count: 0,
            expected_infections: inf,
            total_productivity: tp,
            tau_bar: 1.0,
        }
    }

    #[test]
    fn candidates_on_the_grid() {
        let mut p = OrganizationParams {
            n: 4,
            n_v: 0,
            ..Default::default()
        };
        assert_eq!(enumerate_candidates(&p).unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        p.occupancy_threshold = 0.6;
        assert_eq!(enumerate_candidates(&p).unwrap(), vec![0.75, 1.0]);
        let p = OrganizationParams {
            occupancy_threshold: 0.5,
            ..Default::default()
        };
        assert_eq!(enumerate_candidates(&p).unwrap().len(), 51);
    }

    #[test]
    fn threshold_above_one_gives_empty_set() {
        let p = OrganizationParams {
            occupancy_threshold: 1.2,
            ..Default::default()
        };
        assert!(enumerate_candidates(&p).unwrap().is_empty());
    }

    #[test]
    fn dominance_relation() {
        let a = point(0.1, 1.0, 10.0);
        assert!(!a.dominates(&a));
        assert!(a.dominates(&point(0.2, 1.0, 9.0)));
        assert!(a.dominates(&point(0.2, 2.0, 10.0)));
        assert!(!a.dominates(&point(0.2, 2.0, 11.0)));
    }

    #[test]
    fn brute_force_small_cases() {
        let single = vec![point(0.3, 1.0, 1.0)];
        assert_eq!(brute_force_frontier(&single).points, single);
        let pair = vec![point(0.3, 1.0, 2.0), point(0.4, 2.0, 1.0)];
        assert_eq!(brute_force_frontier(&pair).occupancies(), vec![0.3]);
    }

    #[test]
    fn sweep_handles_infection_dips() {
        // Third candidate has fewer infections and more output than the second.
        let pts = vec![
            point(0.0, 0.1, 1.0),
            point(0.5, 0.5, 2.0),
            point(0.6, 0.4, 2.5),
            point(1.0, 0.9, 3.0),
        ];
        assert_eq!(sweep_filter(&pts), brute_force_frontier(&pts).points);
        assert_eq!(brute_force_frontier(&pts).occupancies(), vec![0.0, 0.6, 1.0]);
    }

    #[test]
    fn sweep_keeps_exact_duplicates_like_brute_force() {
        let pts = vec![point(0.1, 1.0, 1.0), point(0.2, 1.0, 1.0), point(0.3, 2.0, 2.0)];
        assert_eq!(sweep_filter(&pts), brute_force_frontier(&pts).points);
    }

    #[test]
    fn disease_free_frontier_is_full_presence() {
        let p = OrganizationParams {
            beta_u: 0.0,
            beta_v: 0.0,
            ..Default::default()
        };
        let f = pareto_sweep(&p).unwrap();
        // PresentArrival still charges rho * occup for the arriving case itself.
        f.check_invariants().unwrap();
        assert_eq!(f.len(), 101);
        let p = OrganizationParams {
            beta_u: 0.0,
            beta_v: 0.0,
            estimator: InfectionEstimator::CumulativeArrival,
            ..Default::default()
        };
        assert_eq!(pareto_sweep(&p).unwrap().occupancies(), vec![1.0]);
    }

    #[test]
    fn full_threshold_gives_single_point() {
        let p = OrganizationParams {
            occupancy_threshold: 1.0,
            ..Default::default()
        };
        assert_eq!(pareto_sweep(&p).unwrap().occupancies(), vec![1.0]);
    }

    #[test]
    fn empty_candidate_set_has_diagnostic() {
        let p = OrganizationParams {
            n: 3,
            n_v: 0,
            occupancy_threshold: 1.0,
            ..Default::default()
        };
        assert_eq!(pareto_sweep(&p).unwrap().len(), 1);
        let p = OrganizationParams {
            occupancy_threshold: 1.5,
            ..Default::default()
        };
        // Validation rejects thresholds above one before the sweep.
        assert!(pareto_sweep(&p).is_err());
        assert!(candidate_counts(&p).unwrap().is_empty());
    }

    #[test]
    fn evaluate_snaps_to_grid() {
        let p = OrganizationParams::default();
        let a = evaluate_strategy(&p, 0.643).unwrap();
        assert_eq!(a.present_count, 64);
        assert_eq!(a.occup, 0.64);
    }

    #[test]
    fn trivial_optimum_rejected() {
        let p = OrganizationParams {
            prod: 1.0,
            ..Default::default()
        };
        assert!(matches!(pareto_sweep(&p), Err(Error::TrivialOptimum { .. })));
    }

    #[test]
    fn csv_round_trip() {
        let p = OrganizationParams::default();
        let f = pareto_sweep(&p).unwrap();
        let text = f.to_csv_string(p.n).unwrap();
        assert!(text.starts_with("occup,present_count,expected_infections,total_productivity_normalized,tau_bar\n"));
        let rows = ParetoFrontier::read_csv(text.as_bytes()).unwrap();
        assert_eq!(rows, f.rows(p.n));
        let empty = ParetoFrontier::default().to_csv_string(10).unwrap();
        assert!(ParetoFrontier::read_csv(empty.as_bytes()).unwrap().is_empty());
    }
}
