//! LIBSVM text I/O, [-1, 1] feature scaling and the signed design matrix.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Labelled samples: `x` is `m x n`, `y` holds `m` labels in `{-1, +1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    x: Matrix,
    y: Vec<f64>,
}

impl Dataset {
    pub fn new(x: Matrix, y: Vec<f64>) -> Result<Self> {
        if y.is_empty() || x.cols() == 0 {
            return Err(Error::EmptyInput);
        }
        if x.rows() != y.len() {
            return Err(Error::DimensionMismatch { expected: x.rows(), found: y.len() });
        }
        if let Some(i) = y.iter().position(|&l| l != 1.0 && l != -1.0) {
            return Err(Error::Parse { line: i + 1, msg: format!("label {} is not -1 or +1", y[i]) });
        }
        if let Some(p) = x.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::Parse { line: p / x.cols() + 1, msg: "non-finite feature value".into() });
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &Matrix {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn sample_count(&self) -> usize {
        self.y.len()
    }

    pub fn feature_count(&self) -> usize {
        self.x.cols()
    }

    /// `(m_plus, m_minus)`.
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.y.iter().filter(|&&l| l > 0.0).count();
        (pos, self.y.len() - pos)
    }

    /// Rows listed in `idx`, in order.
    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset { x: self.x.select_rows(idx), y: idx.iter().map(|&i| self.y[i]).collect() }
    }

    /// Same features, replaced labels. Labels must be `±1`.
    pub(crate) fn with_labels(&self, y: Vec<f64>) -> Dataset {
        debug_assert_eq!(y.len(), self.y.len());
        Dataset { x: self.x.clone(), y }
    }
}

/// Parses LIBSVM text (`<label> <idx>:<val> ...`, 1-based increasing indices)
/// into a dense dataset. Label `0` is read as `-1`. The feature count is the
/// largest index seen or `n_hint`, whichever is larger.
pub fn parse_libsvm(text: &str, n_hint: Option<usize>) -> Result<Dataset> {
    let mut labels = Vec::new();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut max_idx = 0usize;

    for (lineno, raw) in text.split('\n').enumerate() {
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() {
            continue;
        }
        let lineno = lineno + 1;
        let err = |msg: String| Error::Parse { line: lineno, msg };

        let mut tokens = line.split_ascii_whitespace();
        let label_tok = tokens.next().ok_or_else(|| err("missing label".into()))?;
        let label: f64 = label_tok
            .parse()
            .map_err(|_| err(format!("malformed label {label_tok:?}")))?;
        let label = if label == 1.0 {
            1.0
        } else if label == -1.0 || label == 0.0 {
            -1.0
        } else {
            return Err(err(format!("label {label_tok} outside {{-1, 0, +1}}")));
        };

        let mut entries = Vec::new();
        let mut last = 0usize;
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| err(format!("malformed feature {tok:?}")))?;
            let idx: usize = idx.parse().map_err(|_| err(format!("malformed index {idx:?}")))?;
            let val: f64 = val.parse().map_err(|_| err(format!("malformed value {val:?}")))?;
            if idx == 0 {
                return Err(err("feature indices are 1-based".into()));
            }
            if idx <= last {
                return Err(err(format!("index {idx} does not increase (previous {last})")));
            }
            if !val.is_finite() {
                return Err(err(format!("non-finite value at index {idx}")));
            }
            last = idx;
            entries.push((idx - 1, val));
        }
        max_idx = max_idx.max(last);
        labels.push(label);
        rows.push(entries);
    }

    if labels.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = max_idx.max(n_hint.unwrap_or(0));
    if n == 0 {
        return Err(Error::Parse { line: 1, msg: "no features and no feature count given".into() });
    }
    let mut x = Matrix::zeros(labels.len(), n);
    for (i, entries) in rows.iter().enumerate() {
        let row = x.row_mut(i);
        for &(j, v) in entries {
            row[j] = v;
        }
    }
    Dataset::new(x, labels)
}

/// Writes every coordinate (zeros included) so the feature count survives a
/// round trip. Values use the shortest representation that parses back
/// exactly.
pub fn write_libsvm(d: &Dataset) -> String {
    let mut out = String::new();
    for i in 0..d.sample_count() {
        out.push_str(if d.y[i] > 0.0 { "+1" } else { "-1" });
        for (j, v) in d.x.row(i).iter().enumerate() {
            let _ = write!(out, " {}:{}", j + 1, v);
        }
        out.push('\n');
    }
    out
}

/// Per-feature `(min, max)` recorded from training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingMap {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
    pub constant: Vec<bool>,
}

impl ScalingMap {
    pub fn feature_count(&self) -> usize {
        self.mins.len()
    }

    #[inline]
    fn scale(&self, j: usize, v: f64) -> f64 {
        if self.constant[j] {
            return 0.0;
        }
        // Halving keeps `max - min` finite for extreme inputs.
        let (lo, hi) = (self.mins[j] * 0.5, self.maxs[j] * 0.5);
        2.0 * ((v * 0.5 - lo) / (hi - lo)) - 1.0
    }
}

pub fn fit_scaler(d: &Dataset) -> ScalingMap {
    let n = d.feature_count();
    let mut mins = vec![f64::INFINITY; n];
    let mut maxs = vec![f64::NEG_INFINITY; n];
    for i in 0..d.sample_count() {
        for (j, &v) in d.x.row(i).iter().enumerate() {
            mins[j] = mins[j].min(v);
            maxs[j] = maxs[j].max(v);
        }
    }
    let constant = mins.iter().zip(&maxs).map(|(lo, hi)| lo == hi).collect();
    ScalingMap { mins, maxs, constant }
}

/// Maps each feature through `2 (x - min) / (max - min) - 1`. Values outside
/// the fitted range are extrapolated, not clipped.
pub fn apply_scaler(d: &Dataset, s: &ScalingMap) -> Result<Dataset> {
    if d.feature_count() != s.feature_count() {
        return Err(Error::DimensionMismatch { expected: s.feature_count(), found: d.feature_count() });
    }
    let mut x = d.x.clone();
    for i in 0..x.rows() {
        for (j, v) in x.row_mut(i).iter_mut().enumerate() {
            *v = s.scale(j, *v);
        }
    }
    Ok(Dataset { x, y: d.y.clone() })
}

/// `A = [y_1 x_1, ..., y_m x_m]^T` together with `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedDesign {
    a: Matrix,
    y: Vec<f64>,
}

impl SignedDesign {
    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn sample_count(&self) -> usize {
        self.y.len()
    }

    pub fn feature_count(&self) -> usize {
        self.a.cols()
    }

    /// The all-ones vector of length `m`.
    pub fn ones(&self) -> Vec<f64> {
        vec![1.0; self.y.len()]
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.y.iter().filter(|&&l| l > 0.0).count();
        (pos, self.y.len() - pos)
    }
}

pub fn signed_design(d: &Dataset) -> SignedDesign {
    let mut a = d.x.clone();
    for (i, &yi) in d.y.iter().enumerate() {
        if yi < 0.0 {
            a.row_mut(i).iter_mut().for_each(|v| *v = -*v);
        }
    }
    SignedDesign { a, y: d.y.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ds(rows: &[&[f64]], y: &[f64]) -> Dataset {
        Dataset::new(Matrix::from_rows(rows).unwrap(), y.to_vec()).unwrap()
    }

    #[test]
    fn parses_sparse_lines_into_dense_rows() {
        let d = parse_libsvm("+1 1:0.5 3:-1.2\n-1 2:2", Some(3)).unwrap();
        assert_eq!(d.x().row(0), &[0.5, 0.0, -1.2]);
        assert_eq!(d.x().row(1), &[0.0, 2.0, 0.0]);
        assert_eq!(d.y(), &[1.0, -1.0]);
    }

    #[test]
    fn zero_label_is_negative() {
        let d = parse_libsvm("1 1:1\n0 1:2", None).unwrap();
        assert_eq!(d.y(), &[1.0, -1.0]);
    }

    #[test]
    fn n_hint_only_widens() {
        let d = parse_libsvm("1 4:1", Some(2)).unwrap();
        assert_eq!(d.feature_count(), 4);
        let d = parse_libsvm("1 1:1", Some(5)).unwrap();
        assert_eq!(d.feature_count(), 5);
    }

    #[test]
    fn crlf_and_blank_lines() {
        let d = parse_libsvm("+1 1:1\r\n\r\n-1 1:-1\r\n", None).unwrap();
        assert_eq!(d.sample_count(), 2);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_libsvm("", None), Err(Error::EmptyInput)));
        assert!(matches!(parse_libsvm("  \n\n", Some(2)), Err(Error::EmptyInput)));
        assert!(matches!(parse_libsvm("+1 1:1\n2 1:1", None), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_libsvm("+1 2:1 1:1", None), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_libsvm("+1 1:1 1:2", None), Err(Error::Parse { .. })));
        assert!(matches!(parse_libsvm("+1 0:1", None), Err(Error::Parse { .. })));
        assert!(matches!(parse_libsvm("-1 1:1\n+1 1=2", None), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_libsvm("x 1:1", None), Err(Error::Parse { .. })));
        assert!(matches!(parse_libsvm("1 1:nan", None), Err(Error::Parse { .. })));
    }

    #[test]
    fn write_then_parse_is_identity() {
        let d = ds(&[&[0.1, -3.0, 0.0], &[1e-300, 0.0, 2.5]], &[1.0, -1.0]);
        let back = parse_libsvm(&write_libsvm(&d), None).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn scaler_fit_examples() {
        let s = fit_scaler(&ds(&[&[-2.0], &[2.0]], &[1.0, -1.0]));
        assert_eq!((s.mins[0], s.maxs[0]), (-2.0, 2.0));
        assert!(!s.constant[0]);

        let s = fit_scaler(&ds(&[&[5.0], &[5.0]], &[1.0, -1.0]));
        assert!(s.constant[0]);

        let s = fit_scaler(&ds(&[&[0.0, 1.0], &[4.0, 3.0]], &[1.0, -1.0]));
        assert_eq!(s.mins, vec![0.0, 1.0]);
        assert_eq!(s.maxs, vec![4.0, 3.0]);
    }

    #[test]
    fn scaler_apply_examples() {
        let s = ScalingMap { mins: vec![-2.0], maxs: vec![2.0], constant: vec![false] };
        let d = ds(&[&[0.0], &[2.0], &[4.0]], &[1.0, 1.0, -1.0]);
        let out = apply_scaler(&d, &s).unwrap();
        assert_eq!(out.x().as_slice(), &[0.0, 1.0, 2.0]);
        assert_eq!(out.y(), d.y());
    }

    #[test]
    fn constant_feature_maps_to_zero() {
        let d = ds(&[&[5.0, 1.0], &[5.0, 3.0]], &[1.0, -1.0]);
        let out = apply_scaler(&d, &fit_scaler(&d)).unwrap();
        assert_eq!(out.x().row(0), &[0.0, -1.0]);
        assert_eq!(out.x().row(1), &[0.0, 1.0]);
    }

    #[test]
    fn scaler_dimension_mismatch() {
        let s = ScalingMap { mins: vec![0.0], maxs: vec![1.0], constant: vec![false] };
        let d = ds(&[&[1.0, 2.0]], &[1.0]);
        assert!(matches!(apply_scaler(&d, &s), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn signed_design_examples() {
        let sd = signed_design(&ds(&[&[1.0, 2.0]], &[-1.0]));
        assert_eq!(sd.a().row(0), &[-1.0, -2.0]);

        let d = ds(&[&[1.0, 0.0], &[0.0, 1.0]], &[1.0, 1.0]);
        assert_eq!(signed_design(&d).a(), d.x());

        let sd = signed_design(&ds(&[&[3.0]], &[1.0]));
        assert_eq!(sd.a().row(0), &[3.0]);
        assert_eq!(sd.ones(), vec![1.0]);
    }

    fn arb_dataset() -> impl Strategy<Value = Dataset> {
        (1usize..12, 1usize..5).prop_flat_map(|(m, n)| {
            (
                proptest::collection::vec(-1e300f64..1e300, m * n),
                proptest::collection::vec(prop::bool::ANY, m),
            )
                .prop_map(move |(x, y)| {
                    let y = y.into_iter().map(|b| if b { 1.0 } else { -1.0 }).collect();
                    Dataset::new(Matrix::from_row_major(m, n, x).unwrap(), y).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn fitted_scaling_stays_in_unit_box(d in arb_dataset()) {
            let out = apply_scaler(&d, &fit_scaler(&d)).unwrap();
            for &v in out.x().as_slice() {
                prop_assert!((-1.0..=1.0).contains(&v), "{v}");
            }
        }

        #[test]
        fn signed_design_round_trips(d in arb_dataset()) {
            let sd = signed_design(&d);
            for i in 0..d.sample_count() {
                let back: Vec<f64> = sd.a().row(i).iter().map(|v| v * sd.y()[i]).collect();
                prop_assert_eq!(back.as_slice(), d.x().row(i));
            }
        }
    }
}
