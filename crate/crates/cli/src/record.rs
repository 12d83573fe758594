//! The machine-readable result record and its output formats.
//!
//! JSON output keeps the struct's field order, so identical inputs with
//! the same seed produce byte-identical records except for
//! `wall_time_seconds`.

use serde::{Deserialize, Serialize};

/// Output format of the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

/// One result of one command, flat so the schema is stable across
/// commands; fields a command does not produce stay `null`/empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub scenario: String,
    pub command: String,
    pub s: i64,
    pub psi_rows: u64,
    pub psi_cols: u64,
    pub classification: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_std: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_error_rel: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nearest_integer: Option<u128>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub wall_time_seconds: f64,
    pub tool_version: String,
}

impl ResultRecord {
    pub fn new(command: &str, scenario: &iacount_core::Scenario) -> Self {
        let dims = scenario.dims();
        ResultRecord {
            scenario: scenario.render(),
            command: command.to_string(),
            s: dims.s,
            psi_rows: dims.psi_rows as u64,
            psi_cols: dims.psi_cols as u64,
            classification: dims.properness().to_string(),
            method: None,
            verdict: None,
            sigma_min: None,
            sigma_max: None,
            count: None,
            mean: None,
            sample_std: None,
            std_error_rel: None,
            n_samples: None,
            nearest_integer: None,
            converged: None,
            epsilon: None,
            seed: None,
            wall_time_seconds: 0.0,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub const CSV_HEADER: &'static str = "scenario,command,s,psi_rows,psi_cols,classification,\
method,verdict,sigma_min,sigma_max,count,mean,sample_std,std_error_rel,n_samples,\
nearest_integer,converged,epsilon,seed,wall_time_seconds,tool_version";

    pub fn to_csv_row(&self) -> String {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map(T::to_string).unwrap_or_default()
        }
        let fields = [
            format!("\"{}\"", self.scenario),
            self.command.clone(),
            self.s.to_string(),
            self.psi_rows.to_string(),
            self.psi_cols.to_string(),
            self.classification.clone(),
            opt(&self.method),
            opt(&self.verdict),
            opt(&self.sigma_min),
            opt(&self.sigma_max),
            opt(&self.count),
            opt(&self.mean),
            opt(&self.sample_std),
            opt(&self.std_error_rel),
            opt(&self.n_samples),
            opt(&self.nearest_integer),
            opt(&self.converged),
            opt(&self.epsilon),
            opt(&self.seed),
            self.wall_time_seconds.to_string(),
            self.tool_version.clone(),
        ];
        fields.join(",")
    }

    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "scenario        {}", self.scenario);
        let _ = writeln!(
            out,
            "s               {} ({})",
            self.s, self.classification
        );
        let _ = writeln!(
            out,
            "jacobian        {} x {}",
            self.psi_rows, self.psi_cols
        );
        if let Some(m) = &self.method {
            let _ = writeln!(out, "method          {m}");
        }
        if let Some(v) = &self.verdict {
            let _ = writeln!(out, "verdict         {v}");
        }
        if let (Some(lo), Some(hi)) = (self.sigma_min, self.sigma_max) {
            let _ = writeln!(out, "sigma_min/max   {lo:.3e} / {hi:.3e}");
        }
        if let Some(c) = &self.count {
            let _ = writeln!(out, "count           {c}");
        }
        if let Some(mean) = self.mean {
            match self.nearest_integer {
                Some(k) => {
                    let _ = writeln!(out, "count           ~ {k}  (estimate {mean:.6e})");
                }
                None => {
                    let _ = writeln!(out, "estimate        {mean:.6e}");
                }
            }
        }
        if let (Some(rel), Some(n)) = (self.std_error_rel, self.n_samples) {
            let _ = writeln!(out, "std error       {:.2}% of mean ({n} samples)", rel * 100.0);
        }
        if let (Some(true), Some(eps)) = (self.converged, self.epsilon) {
            let _ = writeln!(
                out,
                "confidence      relative error <= {:.0}% with 95% probability",
                2.0 * eps * 100.0
            );
        } else if self.converged == Some(false) {
            let _ = writeln!(out, "confidence      NOT converged (sample budget exhausted)");
        }
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "seed            {seed}");
        }
        let _ = writeln!(out, "wall time       {:.3}s", self.wall_time_seconds);
        out
    }

    pub fn render_as(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_text(),
            Format::Json => self.to_json(),
            Format::Csv => format!("{}\n{}", Self::CSV_HEADER, self.to_csv_row()),
        }
    }
}
