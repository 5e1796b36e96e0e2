//! Seeded synthetic data: two Gaussian classes in the plane, optionally with
//! label-flip outliers.
//!
//! Every draw comes from a `ChaCha8Rng` seeded with `seed_from_u64(seed)`.
//! Normal variates are `rand_distr::StandardNormal` scaled by the per-axis
//! standard deviation and shifted by the class mean; positives are drawn
//! first, then negatives, each sample drawing its `x1` then `x2` coordinate.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dataio::Dataset;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSpec {
    pub mu_pos: [f64; 2],
    pub mu_neg: [f64; 2],
    /// Diagonal of the shared covariance.
    pub variance: [f64; 2],
    /// Samples per class.
    pub m: usize,
    pub seed: u64,
}

impl GaussianSpec {
    pub fn new(m: usize, seed: u64) -> Self {
        Self { mu_pos: [0.5, -3.0], mu_neg: [-0.5, 3.0], variance: [0.2, 3.0], m, seed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipSpec {
    pub r: f64,
    pub seed: u64,
}

const TRAIN_FLIP_OFFSET: u64 = 1_000_003;
const TEST_FLIP_OFFSET: u64 = 2_000_003;

/// Draws `m` samples per class and splits them into equally sized train and
/// test sets.
///
/// The `i`-th positive (1-based) goes to train when `i` is odd, the `i`-th
/// negative when `i` is even; everything else goes to test. Both sets have `m`
/// samples and are class-balanced for even `m`. Samples are stored
/// interleaved `+, −, +, −, ...` in generation order.
pub fn gen_two_gaussians(spec: &GaussianSpec) -> Result<(Dataset, Dataset)> {
    if spec.m == 0 {
        return Err(Error::EmptyInput);
    }
    if spec.variance.iter().any(|v| v.is_nan() || *v <= 0.0) {
        return Err(Error::InvalidConfig("covariance diagonal must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let sd = [spec.variance[0].sqrt(), spec.variance[1].sqrt()];
    let mut draw = |mu: [f64; 2]| -> [f64; 2] {
        let z0: f64 = StandardNormal.sample(&mut rng);
        let z1: f64 = StandardNormal.sample(&mut rng);
        [mu[0] + sd[0] * z0, mu[1] + sd[1] * z1]
    };
    let pos: Vec<[f64; 2]> = (0..spec.m).map(|_| draw(spec.mu_pos)).collect();
    let neg: Vec<[f64; 2]> = (0..spec.m).map(|_| draw(spec.mu_neg)).collect();

    let (mut train_x, mut train_y) = (Vec::new(), Vec::new());
    let (mut test_x, mut test_y) = (Vec::new(), Vec::new());
    for i in 0..spec.m {
        // 0-based even index == 1-based odd index.
        let pos_to_train = i % 2 == 0;
        for (x, label, to_train) in [(pos[i], 1.0, pos_to_train), (neg[i], -1.0, !pos_to_train)] {
            let (xs, ys) = if to_train { (&mut train_x, &mut train_y) } else { (&mut test_x, &mut test_y) };
            xs.extend_from_slice(&x);
            ys.push(label);
        }
    }
    let build = |x: Vec<f64>, y: Vec<f64>| Dataset::new(Matrix::from_row_major(y.len(), 2, x)?, y);
    Ok((build(train_x, train_y)?, build(test_x, test_y)?))
}

/// Number of labels flipped in a class of `size` samples at ratio `r`.
pub fn flip_count(size: usize, r: f64) -> usize {
    // The small slack absorbs products such as 0.29 * 100 = 28.999999999999996.
    (size as f64 * r + 1e-9).floor() as usize
}

/// Negates `⌊size·r⌋` uniformly chosen labels in each class independently,
/// positives first. Features are untouched.
pub fn flip_labels(d: &Dataset, f: &FlipSpec) -> Result<Dataset> {
    if !(0.0..0.5).contains(&f.r) {
        return Err(Error::InvalidFlipRatio(f.r));
    }
    let (pos, neg) = d.class_counts();
    if pos == 0 || neg == 0 {
        return Err(Error::MissingClass);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(f.seed);
    let mut y = d.y().to_vec();
    for class in [1.0, -1.0] {
        let members: Vec<usize> = (0..y.len()).filter(|&i| d.y()[i] == class).collect();
        let k = flip_count(members.len(), f.r);
        for j in sample(&mut rng, members.len(), k) {
            let i = members[j];
            y[i] = -y[i];
        }
    }
    Ok(d.with_labels(y))
}

/// Example data at flip ratio `r`: `gen_two_gaussians` with seed `seed`, then
/// (for `r > 0`) labels flipped per class in each split. The training split
/// uses flip seed `seed + 1_000_003`, the test split `seed + 2_000_003`.
pub fn gen_example(m: usize, r: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(0.0..0.5).contains(&r) {
        return Err(Error::InvalidFlipRatio(r));
    }
    let (train, test) = gen_two_gaussians(&GaussianSpec::new(m, seed))?;
    if r == 0.0 {
        return Ok((train, test));
    }
    Ok((
        flip_labels(&train, &FlipSpec { r, seed: seed.wrapping_add(TRAIN_FLIP_OFFSET) })?,
        flip_labels(&test, &FlipSpec { r, seed: seed.wrapping_add(TEST_FLIP_OFFSET) })?,
    ))
}

/// Bayes decision boundary `2.5 x1 − x2 + 0 = 0` of the default spec.
pub fn bayes_reference() -> ([f64; 2], f64) {
    ([2.5, -1.0], 0.0)
}
