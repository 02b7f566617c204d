//! Run configuration: parameter validation, config-file layering, and
//! point descriptors.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cinfty::{CInfty, PrecisionBudget};
use crate::error::{Error, Result};
use crate::lattice::OmegaPoint;
use crate::norm::rat_pair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub q: u32,
    pub r: usize,
    /// guaranteed θ-digits (P)
    pub digits: i64,
    /// t-series truncation (N)
    pub t_trunc: usize,
    /// Z-series truncation (M)
    pub z_trunc: usize,
    /// brute-force sum degree bound (D)
    pub degree_bound: i64,
    /// module pipeline degree bound
    pub module_degree_bound: i64,
    pub point: String,
    pub route: String,
    pub suites: Vec<String>,
    pub output: OutputFormat,
    /// difference-quotient step valuation
    pub m_step: i64,
    pub seed: u64,
    /// forced-bug branch flip (generator power) for sensitivity checks
    pub mutate_beta: Option<u64>,
}

impl RunConfig {
    pub fn defaults(q: u32, r: usize) -> RunConfig {
        let b = PrecisionBudget::default_for(q.max(2), r.max(2));
        RunConfig {
            q,
            r,
            digits: b.digits,
            t_trunc: b.t_trunc,
            z_trunc: b.z_trunc,
            degree_bound: b.degree_bound,
            module_degree_bound: b.module_degree_bound,
            point: "canonical".into(),
            route: "u".into(),
            suites: vec!["default".into()],
            output: OutputFormat::Json,
            m_step: 28,
            seed: 0x5eed,
            mutate_beta: None,
        }
    }

    pub fn validate(&self, need_omega_point: bool) -> Result<()> {
        crate::field::split_prime_power(self.q)?;
        if need_omega_point && self.r < 2 {
            return Err(Error::InvalidConfig(format!(
                "r = {} is below 2; Ω^r commands need rank at least 2",
                self.r
            )));
        }
        if self.r < 1 || self.r > 4 {
            return Err(Error::InvalidConfig(format!(
                "r = {} outside the supported range 1..=4",
                self.r
            )));
        }
        if !(8..=512).contains(&self.digits) {
            return Err(Error::InvalidConfig(format!(
                "theta-precision {} outside the safe range 8..=512",
                self.digits
            )));
        }
        if !(2..=64).contains(&self.t_trunc) || !(1..=128).contains(&self.z_trunc) {
            return Err(Error::InvalidConfig(
                "t-trunc must be in 2..=64 and z-trunc in 1..=128".into(),
            ));
        }
        if !(0..=8).contains(&self.degree_bound) || !(2..=20).contains(&self.module_degree_bound) {
            return Err(Error::InvalidConfig(
                "degree-bound must be in 0..=8 and module-degree-bound in 2..=20".into(),
            ));
        }
        Ok(())
    }

    pub fn budget(&self) -> PrecisionBudget {
        PrecisionBudget::new(self.digits, self.degree_bound, self.t_trunc, self.z_trunc)
            .with_module_degree(self.module_degree_bound)
    }

    pub fn resolve_point(&self) -> Result<OmegaPoint> {
        resolve_point_desc(&self.point, self.q, self.r)
    }

    /// Flat key=value overrides (config file / environment).
    pub fn apply_kv(&mut self, kv: &BTreeMap<String, String>) -> Result<()> {
        for (k, v) in kv {
            match k.as_str() {
                "q" => self.q = parse_num(k, v)?,
                "r" => self.r = parse_num(k, v)?,
                "digits" | "theta-precision" => self.digits = parse_num(k, v)?,
                "t-trunc" => self.t_trunc = parse_num(k, v)?,
                "z-trunc" => self.z_trunc = parse_num(k, v)?,
                "degree-bound" => self.degree_bound = parse_num(k, v)?,
                "module-degree-bound" => self.module_degree_bound = parse_num(k, v)?,
                "point" => self.point = v.clone(),
                "route" => self.route = v.clone(),
                "suite" | "suites" => {
                    self.suites = v.split(',').map(|s| s.trim().to_string()).collect()
                }
                "output" => {
                    self.output = match v.as_str() {
                        "json" => OutputFormat::Json,
                        "text" => OutputFormat::Text,
                        other => {
                            return Err(Error::InvalidConfig(format!(
                                "unknown output format '{other}'"
                            )))
                        }
                    }
                }
                "m-step" => self.m_step = parse_num(k, v)?,
                "seed" => self.seed = parse_num(k, v)?,
                "mutate-beta" => self.mutate_beta = Some(parse_num(k, v)?),
                other => {
                    return Err(Error::InvalidConfig(format!("unknown config key '{other}'")))
                }
            }
        }
        Ok(())
    }
}

fn parse_num<T: std::str::FromStr>(k: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::InvalidConfig(format!("bad value '{v}' for key '{k}'")))
}

/// Parses a flat key=value config file (one pair per line, # comments).
pub fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidConfig(format!("cannot read config {path:?}: {e}")))?;
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::InvalidConfig(format!(
                "config line {} is not key=value",
                lineno + 1
            )));
        };
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Explicit point data for user-supplied points.
#[derive(Serialize, Deserialize)]
struct PointJson {
    entries: Vec<CInfty>,
    vals: Vec<(i64, i64)>,
}

/// Resolves a point descriptor: `canonical`, `tall`,
/// `canonical:q=..,r=..` (validated against the config), or
/// `file:<path>` with an explicit JSON vector (marked untrusted).
pub fn resolve_point_desc(desc: &str, q: u32, r: usize) -> Result<OmegaPoint> {
    if desc == "canonical" {
        return Ok(OmegaPoint::canonical_cm(q, r));
    }
    if desc == "tall" || desc == "canonical-tall" {
        return Ok(OmegaPoint::canonical_tall(q, r));
    }
    if let Some(rest) = desc.strip_prefix("canonical:") {
        let mut dq = None;
        let mut dr = None;
        for part in rest.split(',') {
            match part.trim().split_once('=') {
                Some(("q", v)) => dq = v.parse::<u32>().ok(),
                Some(("r", v)) => dr = v.parse::<usize>().ok(),
                _ => return Err(Error::InvalidConfig(format!("bad point descriptor '{desc}'"))),
            }
        }
        if dq != Some(q) || dr != Some(r) {
            return Err(Error::InvalidConfig(format!(
                "point descriptor '{desc}' disagrees with q={q}, r={r}"
            )));
        }
        return Ok(OmegaPoint::canonical_cm(q, r));
    }
    if let Some(path) = desc.strip_prefix("file:") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read point file: {e}")))?;
        let pj: PointJson = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("bad point JSON: {e}")))?;
        let vals = pj.vals.iter().map(|&(n, d)| rat_pair(n, d)).collect();
        return OmegaPoint::from_entries(pj.entries, vals);
    }
    Err(Error::InvalidConfig(format!("unknown point descriptor '{desc}'")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_validation() {
        let c = RunConfig::defaults(3, 2);
        assert!(c.validate(true).is_ok());
        let mut bad = c.clone();
        bad.q = 6;
        assert!(bad.validate(true).is_err());
        let mut bad = c.clone();
        bad.r = 1;
        assert!(bad.validate(true).is_err());
        assert!(bad.validate(false).is_ok());
    }

    #[test]
    fn kv_overlay() {
        let mut c = RunConfig::defaults(2, 2);
        let mut kv = BTreeMap::new();
        kv.insert("digits".to_string(), "100".to_string());
        kv.insert("suite".to_string(), "pdet,tmain".to_string());
        c.apply_kv(&kv).unwrap();
        assert_eq!(c.digits, 100);
        assert_eq!(c.suites, vec!["pdet", "tmain"]);
        let mut kv = BTreeMap::new();
        kv.insert("nope".to_string(), "1".to_string());
        assert!(c.apply_kv(&kv).is_err());
    }

    #[test]
    fn point_descriptors() {
        assert!(resolve_point_desc("canonical", 3, 2).is_ok());
        assert!(resolve_point_desc("tall", 3, 2).is_ok());
        assert!(resolve_point_desc("canonical:q=3,r=2", 3, 2).is_ok());
        assert!(resolve_point_desc("canonical:q=2,r=2", 3, 2).is_err());
        assert!(resolve_point_desc("bogus", 3, 2).is_err());
    }

    #[test]
    fn explicit_point_from_file() {
        let z = OmegaPoint::canonical_cm(3, 2);
        let pj = PointJson {
            entries: z.entries().to_vec(),
            vals: vec![(1, 2), (0, 1)],
        };
        let dir = std::env::temp_dir().join(format!("drforms-pt-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("point.json");
        std::fs::write(&path, serde_json::to_string(&pj).unwrap()).unwrap();
        let desc = format!("file:{}", path.display());
        let loaded = resolve_point_desc(&desc, 3, 2).unwrap();
        // user points carry no independence certificate
        assert!(!loaded.is_trusted());
        assert_eq!(loaded.entries(), z.entries());
        // declared valuations must match the entries
        let bad = PointJson {
            entries: z.entries().to_vec(),
            vals: vec![(1, 3), (0, 1)],
        };
        std::fs::write(&path, serde_json::to_string(&bad).unwrap()).unwrap();
        assert!(resolve_point_desc(&desc, 3, 2).is_err());
        std::fs::remove_dir_all(&dir).ok();
    }
}
