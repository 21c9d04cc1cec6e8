//! Artifacts, inline checks and their serialized forms.

use ahrad_core::fields::{FourierField, RadiationField};
use ahrad_core::goursat::ModeField;
use ahrad_core::Mode;
use serde::Serialize;

use crate::error::Result;

/// Full-precision scientific notation, 17 significant digits.
pub fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

/// Mode label: `k` for n = 1, `k1:k2` for n = 2.
pub fn mode_label(n: usize, k: Mode) -> String {
    if n == 1 {
        k.0[0].to_string()
    } else {
        format!("{}:{}", k.0[0], k.0[1])
    }
}

/// A file produced by a run, held in memory until the run completes.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    /// RFC-4180 CSV with a header row.
    pub fn csv(name: impl Into<String>, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Self> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
        Ok(Artifact { name: name.into(), bytes })
    }

    pub fn json(name: impl Into<String>, value: &impl Serialize) -> Result<Self> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        Ok(Artifact { name: name.into(), bytes })
    }

    pub fn text(&self) -> &str {
        std::str::from_utf8(&self.bytes).unwrap_or("")
    }
}

/// Field CSV: `k,s,re_F,im_F`.
pub fn field_csv(name: impl Into<String>, n: usize, f: &RadiationField) -> Result<Artifact> {
    let rows = f.modes.iter().flat_map(|fm| {
        let k = mode_label(n, fm.mode);
        fm.values.iter().enumerate().map(move |(i, v)| vec![k.clone(), sci(f.s_at(i)), sci(v.re), sci(v.im)])
    });
    Artifact::csv(name, &["k", "s", "re_F", "im_F"], rows)
}

/// Fourier CSV: `k,lambda,re,im`.
pub fn fourier_csv(name: impl Into<String>, n: usize, f: &FourierField) -> Result<Artifact> {
    let rows = f.modes.iter().flat_map(|fm| {
        let k = mode_label(n, fm.mode);
        fm.values.iter().zip(&f.lambdas).map(move |(v, l)| vec![k.clone(), sci(*l), sci(v.re), sci(v.im)])
    });
    Artifact::csv(name, &["k", "lambda", "re", "im"], rows)
}

/// ModeField CSV: `i,j,x_prime,t_prime,re_W,im_W` on every `stride`-th node.
pub fn mode_field_csv(name: impl Into<String>, f: &ModeField, stride: usize) -> Result<Artifact> {
    let rows = f.nodes().filter(|(a, b, _)| a % stride == 0 && b % stride == 0).map(|(a, b, w)| {
        vec![a.to_string(), b.to_string(), sci(a as f64 * f.delta), sci(b as f64 * f.delta), sci(w.re), sci(w.im)]
    });
    Artifact::csv(name, &["i", "j", "x_prime", "t_prime", "re_W", "im_W"], rows)
}

/// An inline invariant check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: &'static str,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check { name: name.into(), value, relation: "<=", limit, passed: value <= limit }
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check { name: name.into(), value, relation: ">=", limit, passed: value >= limit }
    }

    /// Strict decrease: `value < limit`.
    pub fn below(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check { name: name.into(), value, relation: "<", limit, passed: value < limit }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        let v = if ok { 1.0 } else { 0.0 };
        Check { name: name.into(), value: v, relation: "==", limit: 1.0, passed: ok }
    }
}

/// Artifacts and checks of one experiment.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn artifact(&self, name: &str) -> Option<&Artifact> {
        self.artifacts.iter().find(|a| a.name == name)
    }
}
