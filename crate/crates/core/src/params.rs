//! Organization-level model inputs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Longest supported mean test interval, in days.
pub const MAX_TEST_INTERVAL: u32 = 14;

/// How the per-strategy infection objective is composed from the recursion.
///
/// Every variant first builds the trajectory up to the test interval `tau`
/// and derives the detection day `T* = round(tau_bar)` clamped to `[1, tau]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfectionEstimator {
    /// `rho * occup * E[n_I(T*)]`: an arriving infection only seeds workplace
    /// spread when the infected employee is on site.
    #[default]
    PresentArrival,
    /// `rho * Z(T*)`: arrival probability times the overlap-corrected
    /// cumulative infection count.
    CumulativeArrival,
    /// `E[n_I(T*)]`: expected infections at the detection day, unweighted.
    DetectionHorizon,
    /// `E[n_I(tau)]`: expected infections after one full test interval.
    TestInterval,
}

impl InfectionEstimator {
    pub const ALL: [InfectionEstimator; 4] = [
        InfectionEstimator::PresentArrival,
        InfectionEstimator::CumulativeArrival,
        InfectionEstimator::DetectionHorizon,
        InfectionEstimator::TestInterval,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InfectionEstimator::PresentArrival => "present_arrival",
            InfectionEstimator::CumulativeArrival => "cumulative_arrival",
            InfectionEstimator::DetectionHorizon => "detection_horizon",
            InfectionEstimator::TestInterval => "test_interval",
        }
    }
}

impl std::str::FromStr for InfectionEstimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InfectionEstimator::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::param("estimator", format!("unknown estimator `{s}`")))
    }
}

/// Period over which the community arrival probability is expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrivalPeriod {
    /// The 7-day incidence is read directly as a weekly per-employee risk.
    #[default]
    Weekly,
    /// The weekly per-employee risk is spread evenly across seven days.
    Daily,
}

/// How the probability mass left undetected after `tau` days is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionRule {
    /// Residual mass is assigned to day `tau`, so `1 <= tau_bar <= tau`.
    #[default]
    ResidualAtInterval,
    /// The plain truncated sum; `tau_bar` tends to 0 when spread is negligible.
    Literal,
}

/// Per-contact transmission probabilities shipped as named presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaPreset {
    /// Baseline variant, 0.04 per contact.
    Delta,
    /// 2.5-fold more transmissible variant, 0.10 per contact.
    Omicron,
    /// Well-ventilated office with high-efficiency masks, 0.4 %.
    OfficeLow,
    /// Ventilated office with medium-efficiency masks, 2.3 %.
    OfficeHigh,
}

impl BetaPreset {
    pub const ALL: [BetaPreset; 4] = [
        BetaPreset::Delta,
        BetaPreset::Omicron,
        BetaPreset::OfficeLow,
        BetaPreset::OfficeHigh,
    ];

    pub fn beta(self) -> f64 {
        match self {
            BetaPreset::Delta => 0.04,
            BetaPreset::Omicron => 0.10,
            BetaPreset::OfficeLow => 0.004,
            BetaPreset::OfficeHigh => 0.023,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BetaPreset::Delta => "delta",
            BetaPreset::Omicron => "omicron",
            BetaPreset::OfficeLow => "office_low",
            BetaPreset::OfficeHigh => "office_high",
        }
    }
}

impl std::str::FromStr for BetaPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BetaPreset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::param("beta_u", format!("unknown beta preset `{s}`")))
    }
}

/// All inputs describing one organization.
///
/// Field names follow the usual notation: `n` employees of which `n_v` are
/// fully vaccinated, per-contact transmission probabilities `beta_u` and
/// `beta_v`, home productivity ratio `prod`, mean test interval `tau`, and
/// the affine contact model `kappa = contact_base + contact_slope * occup * n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrganizationParams {
    pub n: u32,
    pub n_v: u32,
    pub beta_u: f64,
    pub beta_v: f64,
    pub prod: f64,
    pub tau: u32,
    pub contact_base: f64,
    pub contact_slope: f64,
    /// Reported 7-day cases per 100,000 inhabitants.
    pub incidence_7day: f64,
    pub occupancy_threshold: f64,
    #[serde(default)]
    pub estimator: InfectionEstimator,
    #[serde(default)]
    pub arrival_period: ArrivalPeriod,
    #[serde(default)]
    pub detection_rule: DetectionRule,
}

impl Default for OrganizationParams {
    /// Mid-sized organization: 100 employees, half vaccinated with 80 %
    /// protection, baseline transmissibility, weekly tests, low contact.
    fn default() -> Self {
        OrganizationParams {
            n: 100,
            n_v: 50,
            beta_u: 0.04,
            beta_v: 0.2 * 0.04,
            prod: 0.6,
            tau: 7,
            contact_base: 5.0,
            contact_slope: 0.10,
            incidence_7day: 500.0,
            occupancy_threshold: 0.0,
            estimator: InfectionEstimator::default(),
            arrival_period: ArrivalPeriod::default(),
            detection_rule: DetectionRule::default(),
        }
    }
}

fn check_unit(field: &'static str, value: f64, out: &mut Vec<Error>) {
    if !value.is_finite() || !(0.0..=1.0).contains(&value) {
        out.push(Error::param(field, format!("must lie in [0, 1], got {value}")));
    }
}

fn check_non_negative(field: &'static str, value: f64, out: &mut Vec<Error>) {
    if !value.is_finite() || value < 0.0 {
        out.push(Error::param(field, format!("must be finite and >= 0, got {value}")));
    }
}

impl OrganizationParams {
    /// Every violated invariant, in field order. `prod >= 1` is reported as
    /// [`Error::TrivialOptimum`].
    pub fn violations(&self) -> Vec<Error> {
        let mut out = Vec::new();
        if self.n < 2 {
            out.push(Error::param(
                "n",
                format!("need n >= 2 employees (the recursion divides by n - 1), got {}", self.n),
            ));
        }
        if self.n_v > self.n {
            out.push(Error::param(
                "n_v",
                format!("need 0 <= n_v <= n, got n_v = {} with n = {}", self.n_v, self.n),
            ));
        }
        check_unit("beta_u", self.beta_u, &mut out);
        check_unit("beta_v", self.beta_v, &mut out);
        if self.beta_v > self.beta_u {
            out.push(Error::param(
                "beta_v",
                format!(
                    "vaccinated transmission must not exceed unvaccinated: beta_v = {} > beta_u = {}",
                    self.beta_v, self.beta_u
                ),
            ));
        }
        if !self.prod.is_finite() || self.prod < 0.0 {
            out.push(Error::param("prod", format!("must lie in [0, 1), got {}", self.prod)));
        } else if self.prod >= 1.0 {
            out.push(Error::TrivialOptimum { prod: self.prod });
        }
        if !(1..=MAX_TEST_INTERVAL).contains(&self.tau) {
            out.push(Error::param(
                "tau",
                format!(
                    "test interval must be within 1..={MAX_TEST_INTERVAL} days, got {}",
                    self.tau
                ),
            ));
        }
        check_non_negative("contact_base", self.contact_base, &mut out);
        check_non_negative("contact_slope", self.contact_slope, &mut out);
        check_non_negative("incidence_7day", self.incidence_7day, &mut out);
        if self.incidence_7day > 100_000.0 {
            out.push(Error::param(
                "incidence_7day",
                format!("cannot exceed 100000 per 100000, got {}", self.incidence_7day),
            ));
        }
        check_unit("occupancy_threshold", self.occupancy_threshold, &mut out);
        out
    }

    /// First violated invariant. Field errors take precedence over the
    /// trivial-optimum rejection so that callers can tell the two apart.
    pub fn validate(&self) -> Result<()> {
        let mut violations = self.violations();
        if violations.is_empty() {
            return Ok(());
        }
        let pos = violations
            .iter()
            .position(|e| !matches!(e, Error::TrivialOptimum { .. }))
            .unwrap_or(0);
        Err(violations.swap_remove(pos))
    }

    pub fn with_beta_preset(mut self, preset: BetaPreset, vaccine_efficacy: f64) -> Self {
        self.beta_u = preset.beta();
        self.beta_v = (1.0 - vaccine_efficacy) * self.beta_u;
        self
    }

    pub(crate) fn n_f64(&self) -> f64 {
        f64::from(self.n)
    }
}
