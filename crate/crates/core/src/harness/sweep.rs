//! One-parameter sweeps over a base configuration.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

use super::config::{RunConfig, SetError};
use super::run::{resolve_output_dir, run, FIT_SERIES};

/// `key=v1,v2,…` from the command line.
#[derive(Clone, Debug, PartialEq)]
pub struct Variation {
    pub key: String,
    pub values: Vec<String>,
}

impl FromStr for Variation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: String| Error::OutOfRange { key: "--vary".into(), reason };
        let (key, list) = s.split_once('=').ok_or_else(|| bad(format!("expected key=v1,v2,…, got `{s}`")))?;
        let values: Vec<String> = list.split(',').map(|v| v.trim().to_string()).collect();
        if values.iter().any(String::is_empty) {
            return Err(bad(format!("empty value in `{list}`")));
        }
        let key = key.trim().to_string();
        if matches!(RunConfig::default().set(&key, &values[0]), Err(SetError::Unknown)) {
            return Err(bad(format!("unknown key `{key}`")));
        }
        Ok(Self { key, values })
    }
}

/// One line of `sweep-summary.csv`.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub value: String,
    pub exit_code: i32,
    pub status: String,
    /// Power-law exponents in [`FIT_SERIES`] order.
    pub exponents: Vec<Option<f64>>,
    pub final_energies: Option<[f64; 3]>,
}

fn summary_header() -> String {
    let fits: Vec<String> = FIT_SERIES.iter().map(|s| format!("{s}_exponent")).collect();
    format!("key,value,exit,status,{},e0,e1,e2", fits.join(","))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

/// Runs one variant per value, each in `<root>/<key>=<value>`, and writes
/// `<root>/sweep-summary.csv`. Variants run one after another.
pub fn sweep(base: &RunConfig, variation: &Variation, root: Option<&Path>) -> Result<Vec<SweepRow>> {
    let root: PathBuf = resolve_output_dir(root.unwrap_or(&base.output.dir));
    let mut rows = Vec::new();
    for value in &variation.values {
        let mut cfg = base.clone();
        let prepared = match cfg.set(&variation.key, value) {
            Ok(()) => cfg.validate(),
            Err(SetError::Invalid(message)) => Err(Error::Parse { line: 0, message }),
            Err(SetError::Unknown) => Err(Error::UnknownKey { line: 0, name: variation.key.clone() }),
        };
        let dir = root.join(format!("{}={}", variation.key, value));
        let row = match prepared.and_then(|_| run(&cfg, Some(&dir))) {
            Ok(out) => SweepRow {
                value: value.clone(),
                exit_code: out.exit_code(),
                status: match &out.abort {
                    None => "completed".into(),
                    Some(e) => e.to_string(),
                },
                exponents: out.fits.iter().map(|f| f.power.as_ref().ok().map(|f| f.slope)).collect(),
                final_energies: out.final_energies(),
            },
            Err(e) => SweepRow {
                value: value.clone(),
                exit_code: super::exit_code(&e),
                status: e.to_string(),
                exponents: vec![None; FIT_SERIES.len()],
                final_energies: None,
            },
        };
        rows.push(row);
    }
    fs::create_dir_all(&root)?;
    let mut csv = summary_header();
    csv.push('\n');
    for r in &rows {
        let status = r.status.replace(['"', ','], " ");
        let _ = write!(csv, "{},{},{},{}", variation.key, r.value, r.exit_code, status);
        for e in &r.exponents {
            let _ = write!(csv, ",{}", opt(*e));
        }
        for i in 0..3 {
            let _ = write!(csv, ",{}", opt(r.final_energies.map(|e| e[i])));
        }
        csv.push('\n');
    }
    fs::write(root.join("sweep-summary.csv"), csv)?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_variations() {
        let v: Variation = "params.a=0, 0.5,1".parse().unwrap();
        assert_eq!(v.key, "params.a");
        assert_eq!(v.values, ["0", "0.5", "1"]);
        assert!("params.a".parse::<Variation>().is_err());
        assert!("params.z=1".parse::<Variation>().is_err());
        assert!("params.a=1,,2".parse::<Variation>().is_err());
    }

    #[test]
    fn invalid_variant_is_reported_not_run() {
        let dir = tempfile::tempdir().unwrap();
        let mut base = RunConfig::default();
        base.n = 8;
        base.init.kmax = 2.0;
        base.time.t_end = 0.02;
        base.time.dt = 0.01;
        let v: Variation = "grid.n=7,8".parse().unwrap();
        let rows = sweep(&base, &v, Some(dir.path())).unwrap();
        assert_eq!(rows[0].exit_code, 1);
        assert_eq!(rows[1].exit_code, 0);
        assert!(!dir.path().join("grid.n=7").exists());
        assert!(dir.path().join("grid.n=8/energies.csv").exists());
        let summary = fs::read_to_string(dir.path().join("sweep-summary.csv")).unwrap();
        assert_eq!(summary.lines().count(), 3);
        assert!(summary.starts_with("key,value,exit,status,u_h2_exponent"));
    }
}
