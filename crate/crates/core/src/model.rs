//! Plain-text model files.
//!
//! ```text
//! l01svm-model 1
//! n 2
//! C 0.5
//! sigma 1.4142135623730951
//! eta 1.618
//! tol 0.001
//! max_iter 1000
//! b -0.0123
//! w 1.25 -0.5
//! scaling on
//! scale_min -2.1 -9.7
//! scale_max 2.3 8.8
//! support 3 4 17 52
//! tni 14
//! sws_per_iter 6.5
//! converged true
//! max_theta 0.00071
//! ```
//!
//! One `key value...` pair per line, in this order. `support` lists its count
//! followed by 0-based sample indices. `scale_min`/`scale_max` appear only
//! with `scaling on`. Floats use the shortest exact decimal form.

use std::fmt::Write as _;

use crate::dataio::{apply_scaler, Dataset, ScalingMap};
use crate::error::{Error, Result};
use crate::solver::{predict, SolverConfig, SolverResult};

const MAGIC: &str = "l01svm-model";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub config: SolverConfig,
    pub w: Vec<f64>,
    pub b: f64,
    pub scaler: Option<ScalingMap>,
    pub support: Vec<usize>,
    pub tni: usize,
    pub sws_per_iter: f64,
    pub converged: bool,
    pub max_theta: f64,
}

impl Model {
    pub fn from_result(res: &SolverResult, config: SolverConfig, scaler: Option<ScalingMap>) -> Self {
        Self {
            config,
            w: res.w.clone(),
            b: res.b,
            scaler,
            support: res.support_indices.clone(),
            tni: res.trace.tni(),
            sws_per_iter: res.trace.sws_per_iter(),
            converged: res.converged,
            max_theta: res.residuals.max_theta,
        }
    }

    pub fn feature_count(&self) -> usize {
        self.w.len()
    }

    /// Applies the stored scaling, then the sign rule.
    pub fn predict(&self, d: &Dataset) -> Result<Vec<f64>> {
        if d.feature_count() != self.feature_count() {
            return Err(Error::DimensionMismatch { expected: self.feature_count(), found: d.feature_count() });
        }
        match &self.scaler {
            Some(s) => {
                let scaled = apply_scaler(d, s)?;
                predict(&self.w, self.b, scaled.x())
            }
            None => predict(&self.w, self.b, d.x()),
        }
    }

    pub fn to_text(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let mut s = String::new();
        let _ = writeln!(s, "{MAGIC} {VERSION}");
        let _ = writeln!(s, "n {}", self.w.len());
        let _ = writeln!(s, "C {}", self.config.c);
        let _ = writeln!(s, "sigma {}", self.config.sigma);
        let _ = writeln!(s, "eta {}", self.config.eta);
        let _ = writeln!(s, "tol {}", self.config.tol);
        let _ = writeln!(s, "max_iter {}", self.config.max_iter);
        let _ = writeln!(s, "b {}", self.b);
        let _ = writeln!(s, "w {}", join(&self.w));
        match &self.scaler {
            Some(sc) => {
                let _ = writeln!(s, "scaling on");
                let _ = writeln!(s, "scale_min {}", join(&sc.mins));
                let _ = writeln!(s, "scale_max {}", join(&sc.maxs));
            }
            None => {
                let _ = writeln!(s, "scaling off");
            }
        }
        let _ = write!(s, "support {}", self.support.len());
        for i in &self.support {
            let _ = write!(s, " {i}");
        }
        s.push('\n');
        let _ = writeln!(s, "tni {}", self.tni);
        let _ = writeln!(s, "sws_per_iter {}", self.sws_per_iter);
        let _ = writeln!(s, "converged {}", self.converged);
        let _ = writeln!(s, "max_theta {}", self.max_theta);
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = Lines::new(text);

        let (lineno, head) = lines.next_line()?;
        match head.split_ascii_whitespace().collect::<Vec<_>>().as_slice() {
            [MAGIC, v] if v.parse::<u32>().ok() == Some(VERSION) => {}
            _ => return Err(Error::ModelFormat { line: lineno, msg: format!("expected '{MAGIC} {VERSION}' header") }),
        }

        let n: usize = lines.scalar("n")?;
        let config = SolverConfig {
            c: lines.scalar("C")?,
            sigma: lines.scalar("sigma")?,
            eta: lines.scalar("eta")?,
            tol: lines.scalar("tol")?,
            max_iter: lines.scalar("max_iter")?,
        };
        let b: f64 = lines.scalar("b")?;
        let w: Vec<f64> = lines.list("w", Some(n))?;
        let scaler = match lines.scalar::<String>("scaling")?.as_str() {
            "on" => {
                let mins: Vec<f64> = lines.list("scale_min", Some(n))?;
                let maxs: Vec<f64> = lines.list("scale_max", Some(n))?;
                let constant = mins.iter().zip(&maxs).map(|(a, b)| a == b).collect();
                Some(ScalingMap { mins, maxs, constant })
            }
            "off" => None,
            other => return Err(lines.error(format!("scaling must be on or off, got {other:?}"))),
        };
        let support_raw: Vec<usize> = lines.list("support", None)?;
        let (count, support) = support_raw
            .split_first()
            .ok_or_else(|| lines.error("support needs a count".into()))?;
        if *count != support.len() {
            return Err(lines.error(format!("support count {count} but {} indices", support.len())));
        }
        let support = support.to_vec();
        let tni = lines.scalar("tni")?;
        let sws_per_iter = lines.scalar("sws_per_iter")?;
        let converged = lines.scalar("converged")?;
        let max_theta = lines.scalar("max_theta")?;

        if !b.is_finite() || w.iter().any(|v| !v.is_finite()) {
            return Err(Error::ModelFormat { line: 0, msg: "non-finite weights".into() });
        }
        Ok(Self { config, w, b, scaler, support, tni, sws_per_iter, converged, max_theta })
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    current: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self { inner: text.lines().enumerate(), current: 0 }
    }

    fn error(&self, msg: String) -> Error {
        Error::ModelFormat { line: self.current, msg }
    }

    fn next_line(&mut self) -> Result<(usize, &'a str)> {
        for (i, l) in self.inner.by_ref() {
            let l = l.trim();
            if !l.is_empty() {
                self.current = i + 1;
                return Ok((i + 1, l));
            }
        }
        Err(Error::ModelFormat { line: self.current + 1, msg: "unexpected end of file".into() })
    }

    fn values(&mut self, key: &str) -> Result<Vec<&'a str>> {
        let (_, line) = self.next_line()?;
        let mut it = line.split_ascii_whitespace();
        match it.next() {
            Some(k) if k == key => Ok(it.collect()),
            other => Err(self.error(format!("expected key {key:?}, found {:?}", other.unwrap_or("")))),
        }
    }

    fn scalar<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        match self.values(key)?.as_slice() {
            [v] => v.parse().map_err(|_| self.error(format!("bad value {v:?} for {key}"))),
            _ => Err(self.error(format!("{key} takes exactly one value"))),
        }
    }

    fn list<T: std::str::FromStr>(&mut self, key: &str, len: Option<usize>) -> Result<Vec<T>> {
        let vals = self.values(key)?;
        if let Some(len) = len {
            if vals.len() != len {
                return Err(self.error(format!("{key} needs {len} values, found {}", vals.len())));
            }
        }
        vals.iter()
            .map(|v| v.parse().map_err(|_| self.error(format!("bad value {v:?} for {key}"))))
            .collect()
    }
}
