//! Experiment configuration, CSV and JSON output, the sweep commands and
//! the invariant registry behind `verify`.

pub mod commands;
pub mod verify;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::operators::FAMILY_VERSION;
use crate::quadrature::build_polar_rule;
use crate::weights::WeightFamily;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 42;

fn default_r_min() -> f64 {
    1e-4
}
fn default_quad() -> [usize; 2] {
    [128, 256]
}
fn default_mc() -> usize {
    1_000_000
}
fn default_grid_level() -> usize {
    3
}
fn default_refine_levels() -> Vec<usize> {
    vec![2, 4]
}
fn default_delta0() -> f64 {
    crate::bekolle_bonami::DEFAULT_DELTA0
}
fn default_family_version() -> u32 {
    FAMILY_VERSION
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub p: Vec<f64>,
    #[serde(default)]
    pub weight: Option<String>,
    #[serde(default)]
    pub w2: Vec<[f64; 2]>,
    #[serde(default = "default_r_min")]
    pub r_min: f64,
    #[serde(default = "default_quad")]
    pub quad: [usize; 2],
    #[serde(default = "default_mc")]
    pub mc: usize,
    #[serde(default = "default_grid_level")]
    pub grid_level: usize,
    #[serde(default = "default_refine_levels")]
    pub refine_levels: Vec<usize>,
    #[serde(default = "default_delta0")]
    pub delta0: f64,
    #[serde(default = "default_family_version")]
    pub family_version: u32,
    #[serde(default, skip_serializing)]
    pub out: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            seed: Some(DEFAULT_SEED),
            p: Vec::new(),
            weight: None,
            w2: Vec::new(),
            r_min: default_r_min(),
            quad: default_quad(),
            mc: default_mc(),
            grid_level: default_grid_level(),
            refine_levels: default_refine_levels(),
            delta0: default_delta0(),
            family_version: default_family_version(),
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        build_polar_rule(self.quad[0], self.quad[1])?;
        if !(self.r_min > 0.0 && self.r_min < 1.0) {
            return Err(Error::Config(format!("r_min must lie in (0, 1), got {}", self.r_min)));
        }
        if self.grid_level == 0 || self.refine_levels.is_empty() || self.refine_levels.contains(&0) {
            return Err(Error::Config("grid levels must be positive".into()));
        }
        if self.mc < 1000 {
            return Err(Error::TooFewSamples(self.mc));
        }
        if let Some(w) = &self.weight {
            w.parse::<WeightFamily>()?;
        }
        for p in &self.p {
            if *p <= 1.0 {
                return Err(Error::InvalidExponent(*p));
            }
        }
        for w in &self.w2 {
            if C64::new(w[0], w[1]).norm() >= 1.0 {
                return Err(Error::Config(format!("w2 = {}:{} lies outside the disk", w[0], w[1])));
            }
        }
        Ok(())
    }

    pub fn require_seed(&self) -> Result<u64> {
        self.seed.ok_or(Error::SeedRequired)
    }

    pub fn w2_points(&self) -> Vec<C64> {
        self.w2.iter().map(|w| C64::new(w[0], w[1])).collect()
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            config_hash: self.hash(),
            seed: self.seed,
            n_r: self.quad[0],
            n_theta: self.quad[1],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: Option<u64>,
    pub n_r: usize,
    pub n_theta: usize,
}

pub const PROVENANCE_COLUMNS: [&str; 4] = ["config_hash", "seed", "n_r", "n_theta"];

/// 17 significant digits.
pub fn fmt_f(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f).unwrap_or_default()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    provenance: Provenance,
}

impl CsvTable {
    pub fn new(columns: &[&str], provenance: Provenance) -> Self {
        let mut header: Vec<String> = columns.iter().map(|c| c.to_string()).collect();
        header.extend(PROVENANCE_COLUMNS.iter().map(|c| c.to_string()));
        Self {
            header,
            rows: Vec::new(),
            provenance,
        }
    }

    pub fn push(&mut self, mut fields: Vec<String>) {
        let p = &self.provenance;
        fields.push(p.config_hash.clone());
        fields.push(p.seed.map(|s| s.to_string()).unwrap_or_default());
        fields.push(p.n_r.to_string());
        fields.push(p.n_theta.to_string());
        assert_eq!(fields.len(), self.header.len(), "row width");
        self.rows.push(fields);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let escaped: Vec<String> = row
                .iter()
                .map(|f| if f.contains(',') || f.contains('"') { format!("\"{}\"", f.replace('"', "\"\"")) } else { f.clone() })
                .collect();
            out.push_str(&escaped.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub suite: String,
    pub case: String,
    pub status: String,
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
}

impl ReportEntry {
    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

/// Output of a command: a table, plus the names of asserted checks that failed.
#[derive(Clone, Debug)]
pub struct CommandOutput {
    pub table: CsvTable,
    pub failures: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip_and_defaults() {
        let cfg = ExperimentConfig::from_json(r#"{"schema_version": 1, "seed": 7}"#).unwrap();
        assert_eq!(cfg.seed, Some(7));
        assert_eq!(cfg.quad, [128, 256]);
        assert!(ExperimentConfig::from_json(r#"{"schema_version": 2}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"schema_version": 1, "bogus": 1}"#).is_err());
        let unseeded = ExperimentConfig::from_json(r#"{"schema_version": 1}"#).unwrap();
        assert_eq!(unseeded.require_seed(), Err(Error::SeedRequired));
        let mut bad = ExperimentConfig::default();
        bad.quad = [1, 256];
        assert!(matches!(bad.validate(), Err(Error::InvalidRule(_))));
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.out = Some("x.csv".into());
        assert_eq!(a.hash(), b.hash());
        b.seed = Some(1);
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 16);
    }

    #[test]
    fn csv_rows_carry_provenance() {
        let cfg = ExperimentConfig::default();
        let mut t = CsvTable::new(&["x"], cfg.provenance());
        t.push(vec![fmt_f(0.1)]);
        let text = t.render();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "x,config_hash,seed,n_r,n_theta");
        let row = lines.next().unwrap();
        assert!(row.starts_with("1.0000000000000001e-1,"));
        assert!(row.ends_with(",42,128,256"));
    }
}
