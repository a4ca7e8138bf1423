//! Recursion-versus-simulation validation grid and its report.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::abm::{simulate, SimulationConfig};
use crate::error::{Error, Result};
use crate::io::write_atomic;

/// One `(kappa, occup, n_v)` cell of the grid; every cell is run for each `beta_u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationSetting {
    pub id: String,
    pub kappa: f64,
    pub occup: f64,
    pub n_v: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationManifest {
    pub n: u32,
    pub beta_u: Vec<f64>,
    /// `beta_v = beta_v_ratio * beta_u`.
    pub beta_v_ratio: f64,
    pub horizon_days: usize,
    pub runs: usize,
    pub seed: u64,
    pub mape_threshold: f64,
    /// Rows with fewer runs than this are reported but never fail the check.
    pub gate_min_runs: usize,
    pub settings: Vec<ValidationSetting>,
}

impl Default for ValidationManifest {
    /// 150 agents at full occupancy, two vaccination levels and three contact
    /// rates, 29 days, 100 runs.
    fn default() -> Self {
        let settings = [15.0, 20.0, 30.0]
            .into_iter()
            .flat_map(|kappa| [0u32, 75].map(|n_v| (kappa, n_v)))
            .zip('a'..)
            .map(|((kappa, n_v), id)| ValidationSetting {
                id: id.to_string(),
                kappa,
                occup: 1.0,
                n_v,
            })
            .collect();
        ValidationManifest {
            n: 150,
            beta_u: vec![0.05, 0.10, 0.15],
            beta_v_ratio: 0.15,
            horizon_days: 29,
            runs: 100,
            seed: 42,
            mape_threshold: 0.10,
            gate_min_runs: 100,
            settings,
        }
    }
}

impl ValidationManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, serde_json::to_string_pretty(self)?.as_bytes())
    }

    pub fn config(&self, setting: &ValidationSetting, beta_u: f64, runs: usize) -> SimulationConfig {
        SimulationConfig {
            n: self.n,
            n_v: setting.n_v,
            beta_u,
            beta_v: self.beta_v_ratio * beta_u,
            kappa: setting.kappa,
            occup: setting.occup,
            horizon_days: self.horizon_days,
            runs,
            rng_seed: self.seed,
        }
    }
}

/// One row per setting and run count; `mape[i]` belongs to `beta_u[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub setting: String,
    pub kappa: f64,
    pub occup: f64,
    pub n_v: u32,
    pub runs: usize,
    pub mape: Vec<f64>,
    pub gated: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub manifest: ValidationManifest,
    pub rows: Vec<ValidationRow>,
    /// Mean MAPE per `beta_u` over gated rows.
    pub average_mape: Vec<f64>,
    pub passed: bool,
}

/// Runs every setting at every requested run count.
pub fn run_validation(manifest: &ValidationManifest, run_counts: &[usize]) -> Result<ValidationReport> {
    if manifest.beta_u.is_empty() || manifest.settings.is_empty() {
        return Err(Error::Argument("validation manifest has no cells".into()));
    }
    let counts: Vec<usize> = if run_counts.is_empty() {
        vec![manifest.runs]
    } else {
        run_counts.to_vec()
    };
    let mut rows = Vec::new();
    for &runs in &counts {
        for setting in &manifest.settings {
            let mape = manifest
                .beta_u
                .iter()
                .map(|&b| simulate(&manifest.config(setting, b, runs)).map(|r| r.mape_vs_recursion))
                .collect::<Result<Vec<_>>>()?;
            let gated = runs >= manifest.gate_min_runs;
            let within = mape.iter().all(|&m| m <= manifest.mape_threshold);
            rows.push(ValidationRow {
                setting: setting.id.clone(),
                kappa: setting.kappa,
                occup: setting.occup,
                n_v: setting.n_v,
                runs,
                mape,
                gated,
                passed: within || !gated,
            });
        }
    }
    let gated: Vec<&ValidationRow> = rows.iter().filter(|r| r.gated).collect();
    let average_mape = (0..manifest.beta_u.len())
        .map(|i| {
            if gated.is_empty() {
                f64::NAN
            } else {
                gated.iter().map(|r| r.mape[i]).sum::<f64>() / gated.len() as f64
            }
        })
        .collect();
    let passed = rows.iter().all(|r| r.passed);
    Ok(ValidationReport {
        manifest: manifest.clone(),
        rows,
        average_mape,
        passed,
    })
}

impl ValidationReport {
    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![
            "setting".to_string(),
            "kappa".into(),
            "occup".into(),
            "n_v".into(),
            "runs".into(),
        ];
        header.extend(self.manifest.beta_u.iter().map(|b| format!("mape_beta_u_{b}")));
        header.extend(["gated".to_string(), "passed".into()]);
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![
                r.setting.clone(),
                r.kappa.to_string(),
                r.occup.to_string(),
                r.n_v.to_string(),
                r.runs.to_string(),
            ];
            rec.extend(r.mape.iter().map(|m| m.to_string()));
            rec.extend([r.gated.to_string(), r.passed.to_string()]);
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }
}
