//! Serializable result documents.
//!
//! High-precision quantities (eigenvalues, coefficients, yields) are decimal
//! strings carrying every digit of the working precision; residuals and plot
//! series are plain `f64`.

use serde::{Deserialize, Serialize};

use crate::config::{MethodArg, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Design,
    Spectrum,
    Baseline,
    Sweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub command: Command,
    pub config: ConfigEcho,
    /// Design and baseline: the optimal root only. Spectrum: every root, ascending.
    pub roots: Vec<RootReport>,
    /// Number of stationary yields `N+2-M` of the instance.
    pub eigenvalue_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_method: Option<Vec<MethodDelta>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<BaselineReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub series: Vec<Series>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConfigEcho {
    Run(RunConfig),
    Sweep(SweepConfig),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub band_limit: usize,
    pub constraints: Option<usize>,
    pub a_values: Option<Vec<String>>,
    pub m_values: Option<Vec<usize>>,
    pub interval: Option<String>,
    pub precision: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootReport {
    /// 1-based ascending index `i` of `λ_i`.
    pub index: usize,
    pub eigenvalue: String,
    pub coefficients: Vec<String>,
    pub yield_algebraic: String,
    pub yield_quadrature: String,
    pub crossings: usize,
    pub energy: String,
    pub constraint_residual: f64,
    pub secular_residual: f64,
    pub stationarity_residual: f64,
    pub deflated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodDelta {
    pub index: usize,
    pub secular: String,
    pub polynomial: String,
    pub relative_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineReport {
    /// Energy of the minimum-energy interpolant.
    pub fk_energy: String,
    /// `‖μ̃‖²`; equal to `fk_energy` up to rounding.
    pub mu_tilde_energy: String,
    pub fk_yield: String,
    pub fk_coefficients: Vec<String>,
    /// Optimal constrained yield for comparison.
    pub lambda_max: String,
    pub optimal_energy: String,
    /// Unconstrained concentration modes, descending.
    pub slepian: Vec<ModeReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeReport {
    pub eigenvalue: String,
    pub coefficients: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    Scaling,
    Monotonicity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub kind: SweepKind,
    pub rows: Vec<SweepRowReport>,
    pub slopes: Vec<SlopeReport>,
    pub violations: Vec<ViolationReport>,
    pub failures: Vec<FailureReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRowReport {
    pub a: String,
    pub m: usize,
    pub index: usize,
    pub eigenvalue: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalized: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeReport {
    pub index: usize,
    pub slope: f64,
    pub expected: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub index: usize,
    pub m_low: usize,
    pub m_high: usize,
    pub value_low: String,
    pub value_high: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureReport {
    pub a: f64,
    pub m: usize,
    pub message: String,
}

/// Uniform samples of one signal over one range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub index: usize,
    /// `"period"` for (-π, π) or `"domain"` for the hull of the domain.
    pub range: String,
    pub t: Vec<f64>,
    pub value: Vec<f64>,
    /// `log10 |f|`, `null` where `f = 0`.
    pub log10_abs: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub seed: u64,
    pub precision: String,
    pub method: Option<MethodArg>,
    pub removed_constraints: usize,
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl ResultDocument {
    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// One row per eigenvalue: `index,eigenvalue,yield_quadrature,crossings`;
    /// sweeps use `a,m,index,eigenvalue,normalized`.
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if let Some(sweep) = &self.sweep {
            w.write_record(["a", "m", "index", "eigenvalue", "normalized"])?;
            for r in &sweep.rows {
                w.write_record([
                    r.a.as_str(),
                    &r.m.to_string(),
                    &r.index.to_string(),
                    &r.eigenvalue,
                    r.normalized.as_deref().unwrap_or(""),
                ])?;
            }
        } else if let Some(baseline) = &self.baseline {
            w.write_record(["kind", "index", "eigenvalue", "yield_quadrature", "crossings"])?;
            for r in &self.roots {
                w.write_record([
                    "optimal",
                    &r.index.to_string(),
                    &r.eigenvalue,
                    &r.yield_quadrature,
                    &r.crossings.to_string(),
                ])?;
            }
            w.write_record(["fk", "0", "", &baseline.fk_yield, ""])?;
            for (i, mode) in baseline.slepian.iter().enumerate() {
                w.write_record(["slepian", &(i + 1).to_string(), &mode.eigenvalue, "", ""])?;
            }
        } else {
            w.write_record(["index", "eigenvalue", "yield_quadrature", "crossings"])?;
            for r in &self.roots {
                w.write_record([&r.index.to_string(), &r.eigenvalue, &r.yield_quadrature, &r.crossings.to_string()])?;
            }
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
    }
}

impl Series {
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["range", "t", "value", "log10_abs"])?;
        for ((t, v), l) in self.t.iter().zip(&self.value).zip(&self.log10_abs) {
            let log = l.map(|x| x.to_string()).unwrap_or_default();
            w.write_record([self.range.as_str(), &t.to_string(), &v.to_string(), &log])?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
    }
}
