//! Batch scenarios for a 100-employee organization at an incidence of 500
//! per 100,000, plus the two-curve test-interval comparison.
//!
//! Scenario tables are CSV files with the columns
//! `id,tau,prod,vaccination_rate,contact_level,beta_u,n,incidence`.
//! [`run_all`] writes one `scenario_<id>.csv` per row, a `summary.csv` and a
//! `metadata.json` describing the modelling conventions.

use std::io::Read;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::epidemic::arrival_probability;
use crate::error::{Error, Result};
use crate::io::write_atomic;
use crate::params::{InfectionEstimator, OrganizationParams};
use crate::pareto::{evaluate_all, pareto_sweep, ParetoFrontier};

/// Protection conferred by vaccination: `beta_v = (1 - VACCINE_EFFICACY) * beta_u`.
pub const VACCINE_EFFICACY: f64 = 0.80;
/// Contacts every on-site employee has regardless of occupancy.
pub const CONTACT_BASE: f64 = 5.0;
/// Contact slope used for the test-interval comparison curves.
pub const COMPARISON_CONTACT_SLOPE: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ContactLevel {
    Low,
    High,
}

impl ContactLevel {
    /// Extra contacts per on-site employee as a share of those present.
    pub fn slope(self) -> f64 {
        match self {
            ContactLevel::Low => 0.10,
            ContactLevel::High => 0.20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub id: String,
    pub tau: u32,
    pub prod: f64,
    pub vaccination_rate: f64,
    pub contact_level: ContactLevel,
    pub beta_u: f64,
    pub n: u32,
    pub incidence: f64,
}

impl ScenarioConfig {
    fn row(id: char, tau: u32, prod: f64, vaccination_rate: f64, contact_level: ContactLevel, beta_u: f64) -> Self {
        ScenarioConfig {
            id: id.to_string(),
            tau,
            prod,
            vaccination_rate,
            contact_level,
            beta_u,
            n: 100,
            incidence: 500.0,
        }
    }

    /// Vaccinated head count, rounded to the nearest employee.
    pub fn vaccinated(&self) -> u32 {
        (self.vaccination_rate * f64::from(self.n)).round() as u32
    }

    pub fn params(&self) -> OrganizationParams {
        self.params_with(InfectionEstimator::default())
    }

    pub fn params_with(&self, estimator: InfectionEstimator) -> OrganizationParams {
        OrganizationParams {
            n: self.n,
            n_v: self.vaccinated(),
            beta_u: self.beta_u,
            beta_v: (1.0 - VACCINE_EFFICACY) * self.beta_u,
            prod: self.prod,
            tau: self.tau,
            contact_base: CONTACT_BASE,
            contact_slope: self.contact_level.slope(),
            incidence_7day: self.incidence,
            occupancy_threshold: 0.0,
            estimator,
            ..Default::default()
        }
    }
}

/// The fifteen reference settings `a` through `o`.
pub fn reference_table() -> Vec<ScenarioConfig> {
    use ContactLevel::{High, Low};
    vec![
        ScenarioConfig::row('a', 7, 0.6, 0.5, Low, 0.04),
        ScenarioConfig::row('b', 7, 0.6, 0.8, Low, 0.04),
        ScenarioConfig::row('c', 14, 0.9, 0.5, Low, 0.04),
        ScenarioConfig::row('d', 14, 0.6, 0.8, Low, 0.04),
        ScenarioConfig::row('e', 7, 0.9, 0.5, High, 0.04),
        ScenarioConfig::row('f', 14, 0.6, 0.5, High, 0.04),
        ScenarioConfig::row('g', 14, 0.9, 0.5, High, 0.04),
        ScenarioConfig::row('h', 7, 0.9, 0.5, Low, 0.1),
        ScenarioConfig::row('i', 7, 0.9, 0.8, Low, 0.1),
        ScenarioConfig::row('j', 14, 0.6, 0.5, Low, 0.1),
        ScenarioConfig::row('k', 14, 0.9, 0.8, Low, 0.1),
        ScenarioConfig::row('l', 7, 0.6, 0.8, High, 0.1),
        ScenarioConfig::row('m', 14, 0.9, 0.5, High, 0.1),
        ScenarioConfig::row('n', 14, 0.6, 0.8, High, 0.1),
        ScenarioConfig::row('o', 14, 0.9, 0.8, High, 0.1),
    ]
}

pub fn scenario(id: &str) -> Option<ScenarioConfig> {
    reference_table().into_iter().find(|s| s.id == id)
}

pub fn read_table<R: Read>(input: R) -> Result<Vec<ScenarioConfig>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let rows = r
        .deserialize()
        .collect::<std::result::Result<Vec<ScenarioConfig>, _>>()?;
    Ok(rows)
}

pub fn load_table(path: &Path) -> Result<Vec<ScenarioConfig>> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Io(format!("cannot open scenario table {}: {e}", path.display())))?;
    read_table(file)
}

pub fn table_to_csv(table: &[ScenarioConfig]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in table {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

/// A point read off the frontier by linear interpolation between neighbours.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveReading {
    pub occup: f64,
    pub expected_infections: f64,
    /// Normalized productivity.
    pub productivity: f64,
}

fn lerp(a: f64, b: f64, w: f64) -> f64 {
    a + w * (b - a)
}

/// First crossing of `value(point) >= target` along the frontier.
fn crossing(
    frontier: &ParetoFrontier,
    n: u32,
    target: f64,
    value: impl Fn(&CurveReading) -> f64,
) -> Option<CurveReading> {
    let nf = f64::from(n);
    let readings: Vec<CurveReading> = frontier
        .points
        .iter()
        .map(|p| CurveReading {
            occup: p.occup,
            expected_infections: p.expected_infections,
            productivity: p.total_productivity / nf,
        })
        .collect();
    let i = readings.iter().position(|r| value(r) >= target)?;
    if i == 0 {
        return Some(readings[0]);
    }
    let (lo, hi) = (readings[i - 1], readings[i]);
    let w = (target - value(&lo)) / (value(&hi) - value(&lo));
    Some(CurveReading {
        occup: lerp(lo.occup, hi.occup, w),
        expected_infections: lerp(lo.expected_infections, hi.expected_infections, w),
        productivity: lerp(lo.productivity, hi.productivity, w),
    })
}

/// Smallest occupancy at which the frontier's expected infections reach `risk`.
pub fn background_intersection(frontier: &ParetoFrontier, n: u32, risk: f64) -> Option<CurveReading> {
    crossing(frontier, n, risk, |r| r.expected_infections)
}

/// Smallest occupancy reaching normalized productivity `target`, with the
/// infection risk at that occupancy. `None` when the target is unreachable.
pub fn whatif_productivity_target(frontier: &ParetoFrontier, n: u32, target: f64) -> Option<CurveReading> {
    crossing(frontier, n, target, |r| r.productivity)
}

/// Frontier for one organization together with the background risk it is
/// compared against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierReport {
    pub engine_version: String,
    pub params: OrganizationParams,
    pub background_risk: f64,
    pub intersection: Option<CurveReading>,
    pub frontier: ParetoFrontier,
}

pub fn frontier_report(params: &OrganizationParams) -> Result<FrontierReport> {
    let frontier = pareto_sweep(params)?;
    let background_risk = arrival_probability(params)?;
    Ok(FrontierReport {
        engine_version: crate::ENGINE_VERSION.to_string(),
        params: params.clone(),
        background_risk,
        intersection: background_intersection(&frontier, params.n, background_risk),
        frontier,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub id: String,
    pub n: u32,
    pub estimator: InfectionEstimator,
    pub frontier: ParetoFrontier,
    pub background_risk: f64,
    pub intersection_occup: Option<f64>,
    pub productivity_at_intersection: Option<f64>,
}

impl ScenarioResult {
    pub fn summary(&self) -> SummaryRow {
        SummaryRow {
            id: self.id.clone(),
            background_risk: self.background_risk,
            intersection_occup: self.intersection_occup,
            productivity_at_intersection: self.productivity_at_intersection,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub id: String,
    pub background_risk: f64,
    pub intersection_occup: Option<f64>,
    pub productivity_at_intersection: Option<f64>,
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioResult> {
    run_scenario_with(config, InfectionEstimator::default())
}

pub fn run_scenario_with(config: &ScenarioConfig, estimator: InfectionEstimator) -> Result<ScenarioResult> {
    let params = config.params_with(estimator);
    let frontier = pareto_sweep(&params)?;
    let background_risk = arrival_probability(&params)?;
    let hit = background_intersection(&frontier, params.n, background_risk);
    Ok(ScenarioResult {
        id: config.id.clone(),
        n: params.n,
        estimator,
        frontier,
        background_risk,
        intersection_occup: hit.map(|h| h.occup),
        productivity_at_intersection: hit.map(|h| h.productivity),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub engine_version: String,
    pub estimator: InfectionEstimator,
    pub contact_model: String,
    pub vaccinated_transmission: String,
    pub vaccination_counts: String,
    pub productivity_column: String,
    pub notes: Vec<String>,
}

impl RunMetadata {
    pub fn new(estimator: InfectionEstimator) -> Self {
        RunMetadata {
            engine_version: crate::ENGINE_VERSION.to_string(),
            estimator,
            contact_model: format!(
                "kappa = {CONTACT_BASE} + slope * occup * n; Low slope 0.10, High slope 0.20; \
                 test-interval comparison curves use slope {COMPARISON_CONTACT_SLOPE}"
            ),
            vaccinated_transmission: format!("beta_v = {} * beta_u", 1.0 - VACCINE_EFFICACY),
            vaccination_counts: "n_v = round(vaccination_rate * n)".into(),
            productivity_column: "total productivity divided by n".into(),
            notes: vec![
                "reference rows use vaccination rates 0.5 and 0.8; a rate of 0.4 is described \
                 in accompanying prose but appears in no row"
                    .into(),
            ],
        }
    }
}

fn summary_csv(results: &[ScenarioResult]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in results {
        w.serialize(r.summary())?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_summary<R: Read>(input: R) -> Result<Vec<SummaryRow>> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<std::result::Result<Vec<SummaryRow>, _>>()?)
}

/// Runs every scenario; when `out_dir` is given, also writes the per-scenario
/// frontiers, `summary.csv` and `metadata.json` there.
pub fn run_all(
    table: &[ScenarioConfig],
    estimator: InfectionEstimator,
    out_dir: Option<&Path>,
) -> Result<Vec<ScenarioResult>> {
    let results = table
        .par_iter()
        .map(|c| run_scenario_with(c, estimator))
        .collect::<Result<Vec<_>>>()?;
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        results.par_iter().try_for_each(|r| {
            let csv = r.frontier.to_csv_string(r.n)?;
            write_atomic(&dir.join(format!("scenario_{}.csv", r.id)), csv.as_bytes())
        })?;
        write_atomic(&dir.join("summary.csv"), summary_csv(&results)?.as_bytes())?;
        let meta = serde_json::to_string_pretty(&RunMetadata::new(estimator))?;
        write_atomic(&dir.join("metadata.json"), meta.as_bytes())?;
    }
    Ok(results)
}

/// Dense, unfiltered objective curves for one test interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveCurve {
    pub tau: u32,
    pub occup: Vec<f64>,
    pub expected_infections: Vec<f64>,
    pub productivity: Vec<f64>,
}

impl ObjectiveCurve {
    pub fn argmax_productivity(&self) -> f64 {
        let best = self
            .productivity
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        self.occup[best]
    }
}

/// Half-vaccinated 100-employee organization with home productivity 0.9,
/// baseline transmissibility and the infection objective taken after one
/// full test interval.
pub fn interval_comparison_params() -> OrganizationParams {
    OrganizationParams {
        n: 100,
        n_v: 50,
        beta_u: 0.04,
        beta_v: (1.0 - VACCINE_EFFICACY) * 0.04,
        prod: 0.9,
        tau: 7,
        contact_base: CONTACT_BASE,
        contact_slope: COMPARISON_CONTACT_SLOPE,
        incidence_7day: 500.0,
        occupancy_threshold: 0.0,
        estimator: InfectionEstimator::TestInterval,
        ..Default::default()
    }
}

/// Objective curves over every occupancy `0, 1/n, ..., 1` for weekly and
/// fortnightly testing.
pub fn interval_comparison_curves(params: &OrganizationParams) -> Result<[ObjectiveCurve; 2]> {
    let curve = |tau: u32| -> Result<ObjectiveCurve> {
        let p = OrganizationParams {
            tau,
            occupancy_threshold: 0.0,
            ..params.clone()
        };
        let points = evaluate_all(&p)?;
        let nf = p.n_f64();
        Ok(ObjectiveCurve {
            tau,
            occup: points.iter().map(|x| x.occup).collect(),
            expected_infections: points.iter().map(|x| x.expected_infections).collect(),
            productivity: points.iter().map(|x| x.total_productivity / nf).collect(),
        })
    };
    Ok([curve(7)?, curve(14)?])
}

pub const OCCUPANCY_TOLERANCE: f64 = 0.07;
pub const PRODUCTIVITY_TOLERANCE: f64 = 0.05;

/// A published operating point and what one estimator makes of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatingPointCheck {
    pub label: String,
    pub scenario: String,
    pub estimator: InfectionEstimator,
    pub expected_occup: f64,
    pub expected_productivity: f64,
    pub measured: Option<CurveReading>,
    pub background_risk: f64,
    pub within_tolerance: bool,
}

/// The quoted operating points of scenarios `a`, `o`, `b` and `l`.
pub fn operating_point_checks(estimator: InfectionEstimator) -> Result<Vec<OperatingPointCheck>> {
    let get = |id: &str| {
        let cfg = scenario(id).ok_or_else(|| Error::Argument(format!("unknown scenario {id}")))?;
        run_scenario_with(&cfg, estimator)
    };
    let close = |m: &CurveReading, occ: f64, prod: f64| {
        (m.occup - occ).abs() <= OCCUPANCY_TOLERANCE && (m.productivity - prod).abs() <= PRODUCTIVITY_TOLERANCE
    };
    let mut out = Vec::new();
    for (id, occ, prod) in [("a", 0.64, 0.85), ("o", 0.46, 0.94), ("l", 0.54, 0.81)] {
        let r = get(id)?;
        let measured = background_intersection(&r.frontier, r.n, r.background_risk);
        let mut ok = measured.as_ref().is_some_and(|m| close(m, occ, prod));
        if id == "o" {
            ok &= measured.as_ref().is_some_and(|m| m.productivity > 0.94);
        }
        out.push(OperatingPointCheck {
            label: format!("background-risk intersection of scenario {id}"),
            scenario: id.into(),
            estimator,
            expected_occup: occ,
            expected_productivity: prod,
            measured,
            background_risk: r.background_risk,
            within_tolerance: ok,
        });
    }
    let r = get("b")?;
    let measured = whatif_productivity_target(&r.frontier, r.n, 0.70);
    let ok = measured
        .as_ref()
        .is_some_and(|m| close(m, 0.25, 0.70) && m.expected_infections <= 0.5 * r.background_risk);
    out.push(OperatingPointCheck {
        label: "productivity target 0.70 in scenario b".into(),
        scenario: "b".into(),
        estimator,
        expected_occup: 0.25,
        expected_productivity: 0.70,
        measured,
        background_risk: r.background_risk,
        within_tolerance: ok,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pareto::ParetoPoint;

    fn frontier(points: &[(f64, f64, f64)]) -> ParetoFrontier {
        ParetoFrontier {
            points: points
                .iter()
                .map(|&(occup, inf, tp)| ParetoPoint {
                    occup,
                    present_count: 0,
                    expected_infections: inf,
                    total_productivity: tp,
                    tau_bar: 1.0,
                })
                .collect(),
            diagnostic: None,
        }
    }

    #[test]
    fn table_has_fifteen_rows() {
        let t = reference_table();
        assert_eq!(t.len(), 15);
        let a = &t[0];
        assert_eq!(
            (a.tau, a.prod, a.vaccination_rate, a.contact_level, a.beta_u),
            (7, 0.6, 0.5, ContactLevel::Low, 0.04)
        );
        let o = &t[14];
        assert_eq!(
            (o.tau, o.prod, o.vaccination_rate, o.contact_level, o.beta_u),
            (14, 0.9, 0.8, ContactLevel::High, 0.1)
        );
    }

    #[test]
    fn scenario_params() {
        let p = scenario("l").unwrap().params();
        assert_eq!(p.n_v, 80);
        assert!((p.beta_v - 0.02).abs() < 1e-15);
        assert_eq!(p.contact_slope, 0.20);
        p.validate().unwrap();
    }

    #[test]
    fn table_csv_round_trip() {
        let t = reference_table();
        let text = table_to_csv(&t).unwrap();
        assert!(text.starts_with("id,tau,prod,vaccination_rate,contact_level,beta_u,n,incidence\n"));
        assert_eq!(read_table(text.as_bytes()).unwrap(), t);
    }

    #[test]
    fn interpolated_crossings() {
        let f = frontier(&[(0.0, 0.0, 50.0), (0.5, 0.2, 70.0), (1.0, 0.6, 90.0)]);
        let hit = background_intersection(&f, 100, 0.4).unwrap();
        assert!((hit.occup - 0.75).abs() < 1e-12);
        assert!((hit.productivity - 0.8).abs() < 1e-12);
        let w = whatif_productivity_target(&f, 100, 0.6).unwrap();
        assert!((w.occup - 0.25).abs() < 1e-12);
        assert!((w.expected_infections - 0.1).abs() < 1e-12);
        assert!(whatif_productivity_target(&f, 100, 0.95).is_none());
        assert!(background_intersection(&f, 100, 0.7).is_none());
        assert_eq!(background_intersection(&f, 100, 0.0).unwrap().occup, 0.0);
    }

    #[test]
    fn background_risk_matches_arrival() {
        let r = run_scenario(&scenario("a").unwrap()).unwrap();
        assert!((r.background_risk - (1.0 - 0.995f64.powi(100))).abs() < 1e-12);
        r.frontier.check_invariants().unwrap();
    }

    #[test]
    fn missing_table_file_is_io_error() {
        assert!(matches!(
            load_table(Path::new("/nonexistent/table.csv")),
            Err(Error::Io(_))
        ));
    }
}
