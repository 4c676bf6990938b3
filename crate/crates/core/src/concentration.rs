//! Monte Carlo checks of the Gaussian and random-vector tail estimates.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{ensure, Result};
use crate::matrix::{frobenius_norm, norm_sqr, spectral_norm, trace_norm, ComplexMatrix, DensityMatrix};
use crate::measure::{frobenius_tv_experiment, median, MeasurementMode};
use crate::random::{gram_schmidt, map_trials, sample_gaussian_vector, sample_unit_vector, RngStream};

/// Constant in the Gram-Schmidt perturbation threshold `C0 sqrt(M r / n)`.
pub const GS_CONSTANT: f64 = 6.0;
/// Constant in the rank-r counterexample threshold `C1 r^(-1/4)`.
pub const HIGH_RANK_CONSTANT: f64 = 8.0;
/// Minimum tail mass required on each side of the weighted chi-square mean.
pub const WEIGHTED_TAIL_MIN: f64 = 0.01;

/// Result of one tail experiment.
///
/// `statistic` is the headline number (usually `empirical_prob`; for the
/// norm and perturbation experiments the worst observed value). `pass` is
/// `None` when the experiment has no applicable criterion.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailReport {
    pub experiment: String,
    pub params: BTreeMap<String, f64>,
    pub trials: usize,
    pub empirical_prob: f64,
    pub std_err: f64,
    pub statistic: f64,
    pub bound: Option<f64>,
    pub pass: Option<bool>,
    pub extras: BTreeMap<String, f64>,
}

impl TailReport {
    fn new(experiment: &str, params: &[(&str, f64)], trials: usize, hits: usize) -> Self {
        let p = hits as f64 / trials as f64;
        Self {
            experiment: experiment.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            trials,
            empirical_prob: p,
            std_err: std_err(p, trials),
            statistic: p,
            bound: None,
            pass: None,
            extras: BTreeMap::new(),
        }
    }

    pub const CSV_HEADER: [&'static str; 7] = ["experiment", "params", "trials", "statistic", "bound", "std_err", "pass"];

    /// Row matching [`TailReport::CSV_HEADER`]. Params render as `k=v;k=v`.
    pub fn csv_record(&self) -> [String; 7] {
        let params = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";");
        [
            self.experiment.clone(),
            params,
            self.trials.to_string(),
            format!("{:e}", self.statistic),
            self.bound.map_or_else(String::new, |b| format!("{b:e}")),
            format!("{:e}", self.std_err),
            self.pass.map_or_else(String::new, |p| p.to_string()),
        ]
    }
}

pub fn std_err(p: f64, trials: usize) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// `(exp(-eps/2) sqrt(1+eps))^n`, the Chernoff bound on the chi-square tail
/// `Pr[X > n(1+eps)]` (`eps >= 0`) or `Pr[X < n(1+eps)]` (`eps < 0`).
pub fn chi_square_bound(n: f64, eps: f64) -> f64 {
    (n * (-eps / 2.0 + 0.5 * (1.0 + eps).ln())).exp()
}

fn real_chi_square<R: Rng + ?Sized>(n: usize, rng: &mut R) -> f64 {
    (0..n)
        .map(|_| {
            let g: f64 = rng.sample(StandardNormal);
            g * g
        })
        .sum()
}

/// Tail of a chi-square variable with `n` degrees of freedom beyond
/// `n (1 + eps)`: the upper tail for `eps >= 0`, the lower tail otherwise.
/// Passes when the empirical frequency is within three standard errors of
/// the analytic bound or below it.
pub fn chi_square_tail(n: usize, eps: f64, trials: usize, rng: RngStream) -> Result<TailReport> {
    ensure!(n >= 1, "need n >= 1");
    ensure!(eps > -1.0, "eps must exceed -1, got {eps}");
    ensure!(trials >= 1000, "need at least 1000 trials, got {trials}");
    let level = n as f64 * (1.0 + eps);
    let hits = map_trials(trials, rng, |_, g| {
        let x = real_chi_square(n, g);
        if eps >= 0.0 { x > level } else { x < level }
    })
    .into_iter()
    .filter(|&h| h)
    .count();
    let mut r = TailReport::new("chi-square", &[("n", n as f64), ("eps", eps)], trials, hits);
    let bound = chi_square_bound(n as f64, eps);
    r.bound = Some(bound);
    r.pass = Some(r.empirical_prob <= bound + 3.0 * r.std_err);
    Ok(r)
}

/// Which event `projection_tail` measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProjectionSide {
    /// `||P v||^2 > t k / n`.
    UpperT,
    /// `(1 - eps) k/n <= ||P v||^2 <= (1 + eps) k/n`.
    TwoSidedEps,
}

/// Squared length of a random unit vector of `C^n` projected onto a fixed
/// `k`-dimensional coordinate subspace. By unitary invariance this has the
/// same law as for any fixed `k`-dimensional subspace.
///
/// Upper mode passes when the empirical tail is at most the analytic union
/// bound plus three standard errors; two-sided mode passes when the
/// empirical concentration probability is at least the analytic lower bound
/// minus three standard errors.
pub fn projection_tail(
    n: usize,
    k: usize,
    t_or_eps: f64,
    side: ProjectionSide,
    trials: usize,
    rng: RngStream,
) -> Result<TailReport> {
    ensure!(trials >= 1, "need at least one trial");
    ensure!(k >= 1 && k <= n, "need 1 <= k <= n, got k={k}, n={n}");
    let (kf, nf) = (k as f64, n as f64);
    let (lo, hi, bound, name) = match side {
        ProjectionSide::UpperT => {
            let t = t_or_eps;
            ensure!(4 * k <= n, "upper-t mode needs k <= n/4, got k={k}, n={n}");
            ensure!(t >= 4.0 && t <= nf / kf, "upper-t mode needs 4 <= t <= n/k, got t={t}");
            // ||Pv||^2 = A / S with A ~ chi2(2k), S ~ chi2(2n). The event needs
            // S < n or A > t k.
            let b = chi_square_bound(2.0 * kf, t / 2.0 - 1.0) + chi_square_bound(2.0 * nf, -0.5);
            (t * kf / nf, f64::INFINITY, b.min(1.0), "projection-upper")
        }
        ProjectionSide::TwoSidedEps => {
            let eps = t_or_eps;
            ensure!((0.0..=0.5).contains(&eps), "two-sided mode needs 0 <= eps <= 1/2, got {eps}");
            let e = eps / 3.0;
            // A and S both within a factor 1 +- eps/3 of their means suffices.
            let fail = if k == n {
                0.0
            } else {
                chi_square_bound(2.0 * kf, e)
                    + chi_square_bound(2.0 * kf, -e)
                    + chi_square_bound(2.0 * nf, e)
                    + chi_square_bound(2.0 * nf, -e)
            };
            ((1.0 - eps) * kf / nf, (1.0 + eps) * kf / nf, (1.0 - fail).max(0.0), "projection-two-sided")
        }
    };
    let values = map_trials(trials, rng, |_, g| {
        let v = sample_unit_vector(n, g).expect("n >= 1");
        norm_sqr(&v[..k]) / norm_sqr(&v)
    });
    let hits = values
        .iter()
        .filter(|&&x| match side {
            ProjectionSide::UpperT => x > lo,
            ProjectionSide::TwoSidedEps => lo - 1e-12 <= x && x <= hi + 1e-12,
        })
        .count();
    let param = match side {
        ProjectionSide::UpperT => "t",
        ProjectionSide::TwoSidedEps => "eps",
    };
    let mut r = TailReport::new(name, &[("n", nf), ("k", kf), (param, t_or_eps)], trials, hits);
    r.bound = Some(bound);
    r.pass = Some(match side {
        ProjectionSide::UpperT => r.empirical_prob <= bound + 3.0 * r.std_err,
        ProjectionSide::TwoSidedEps => r.empirical_prob >= bound - 3.0 * r.std_err,
    });
    r.extras.insert("mean".into(), values.iter().sum::<f64>() / trials as f64);
    Ok(r)
}

/// Perturbation `max_i ||b'_i b'_i^dagger - b~_i b~_i^dagger||_tr` between
/// `r` random unit vectors and their Gram-Schmidt orthonormalisation.
///
/// For unit vectors the trace norm of a difference of two rank-one
/// projectors is `2 sqrt(1 - |<b'|b~>|^2)`, which is evaluated as twice the
/// length of the residual of `b~` after projection onto `b'`. The first
/// vector is only normalised and contributes zero. `pass` applies the
/// threshold `GS_CONSTANT sqrt(M r / n)` when `r < n`.
pub fn gram_schmidt_perturbation(n: usize, r: usize, m: f64, trials: usize, rng: RngStream) -> Result<TailReport> {
    ensure!(trials >= 1, "need at least one trial");
    ensure!(r >= 1 && r <= n, "need 1 <= r <= n, got r={r}, n={n}");
    ensure!(m > 1.0, "need M > 1, got {m}");
    let threshold = GS_CONSTANT * (m * r as f64 / n as f64).sqrt();
    let stats: Vec<f64> = map_trials(trials, rng, |_, g| {
        let raw: Vec<_> = (0..r).map(|_| sample_unit_vector(n, g).expect("n >= 1")).collect();
        let ortho = gram_schmidt(&raw).expect("random vectors are independent");
        raw.iter()
            .zip(&ortho)
            .skip(1)
            .map(|(b, q)| {
                let c = crate::matrix::inner(b, q);
                let residual: f64 = q.iter().zip(b).map(|(qi, bi)| (qi - c * bi).norm_sqr()).sum();
                2.0 * residual.sqrt()
            })
            .fold(0.0, f64::max)
    });
    let hits = stats.iter().filter(|&&s| s > threshold).count();
    let mut rep = TailReport::new("gram-schmidt", &[("n", n as f64), ("r", r as f64), ("M", m)], trials, hits);
    rep.statistic = stats.iter().copied().fold(0.0, f64::max);
    rep.bound = Some(threshold);
    rep.pass = (r < n).then_some(rep.statistic <= threshold);
    rep.extras.insert("median".into(), median(&stats));
    Ok(rep)
}

/// Spectral norm of an `n x n` matrix with independent complex Gaussian
/// entries (unit variance per real part). Passes when every trial is at most
/// `4 sqrt(n ln n)`.
pub fn gaussian_matrix_norm(n: usize, trials: usize, rng: RngStream) -> Result<TailReport> {
    ensure!(n >= 2, "need n >= 2");
    ensure!(trials >= 1, "need at least one trial");
    let bound = 4.0 * (n as f64 * (n as f64).ln()).sqrt();
    let norms: Vec<f64> = map_trials(trials, rng, |_, g| {
        let data = sample_gaussian_vector(n * n, g).expect("n >= 2");
        spectral_norm(&ComplexMatrix::new(n, n, data).expect("shape"))
    });
    let hits = norms.iter().filter(|&&x| x > bound).count();
    let mut r = TailReport::new("gaussian-norm", &[("n", n as f64)], trials, hits);
    let max = norms.iter().copied().fold(0.0, f64::max);
    let med = median(&norms);
    let sqrt_n = (n as f64).sqrt();
    r.statistic = max;
    r.bound = Some(bound);
    r.pass = Some(hits == 0);
    r.extras.insert("median".into(), med);
    r.extras.insert("max_over_sqrt_n".into(), max / sqrt_n);
    r.extras.insert("median_over_sqrt_n".into(), med / sqrt_n);
    r.extras.insert("edge".into(), 2.0 * (2.0 * n as f64).sqrt());
    Ok(r)
}

/// Both tails of `X = sum_i lambda_i G_i^2` around its mean `t = sum lambda_i`:
/// `Pr[X > t + f]` and `Pr[X < t]` with `f = sqrt(sum lambda_i^2)`.
///
/// `statistic` and `empirical_prob` hold the smaller of the two; the extras
/// carry each tail and the sample mean with its standard error. Passes when
/// both tails are at least `WEIGHTED_TAIL_MIN`.
pub fn weighted_chisquare_tails(lambdas: &[f64], trials: usize, rng: RngStream) -> Result<TailReport> {
    ensure!(!lambdas.is_empty(), "need at least one weight");
    ensure!(
        lambdas.iter().all(|&l| l > 0.0 && l <= 1.0),
        "weights must lie in (0, 1]"
    );
    let t: f64 = lambdas.iter().sum();
    ensure!(t <= 1.0 + 1e-12, "weights sum to {t}, more than 1");
    ensure!(trials >= 10_000, "need at least 10^4 trials, got {trials}");
    let f = lambdas.iter().map(|l| l * l).sum::<f64>().sqrt();
    let xs: Vec<f64> = map_trials(trials, rng, |_, g| {
        lambdas
            .iter()
            .map(|&l| {
                let z: f64 = g.sample(StandardNormal);
                l * z * z
            })
            .sum()
    });
    let n = trials as f64;
    let upper = xs.iter().filter(|&&x| x > t + f).count() as f64 / n;
    let lower = xs.iter().filter(|&&x| x < t).count() as f64 / n;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let mean_se = (var / n).sqrt();
    let worst = upper.min(lower);
    let mut r = TailReport::new("weighted-chi-square", &[("m", lambdas.len() as f64), ("t", t), ("f", f)], trials, 0);
    r.empirical_prob = worst;
    r.std_err = std_err(worst, trials);
    r.statistic = worst;
    r.bound = Some(WEIGHTED_TAIL_MIN);
    r.pass = Some(upper >= WEIGHTED_TAIL_MIN && lower >= WEIGHTED_TAIL_MIN);
    r.extras.insert("upper".into(), upper);
    r.extras.insert("lower".into(), lower);
    r.extras.insert("mean".into(), mean);
    r.extras.insert("mean_se".into(), mean_se);
    Ok(r)
}

/// Named weight profiles for [`weighted_chisquare_tails`], each of length `m`
/// and summing to 1: `uniform`, `geometric` (ratio 1/2), `slow-geometric`
/// (ratio 0.9), `spike` (`1/2` then `1/2 * 1e-6`), `two-scale` (the first
/// half 100 times heavier than the second).
pub fn lambda_profile(name: &str, m: usize) -> Result<Vec<f64>> {
    ensure!(m >= 1, "profile needs at least one weight");
    let raw: Vec<f64> = match name {
        "uniform" => vec![1.0; m],
        "geometric" => (0..m).map(|i| 0.5f64.powi(i as i32)).collect(),
        "slow-geometric" => (0..m).map(|i| 0.9f64.powi(i as i32)).collect(),
        "spike" => return Ok((0..m).map(|i| if i == 0 { 0.5 } else { 0.5e-6 }).collect()),
        "two-scale" => (0..m).map(|i| if 2 * i < m { 100.0 } else { 1.0 }).collect(),
        _ => return Err(crate::Error::Contract(format!("unknown weight profile {name:?}"))),
    };
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|x| x / total).collect())
}

/// The pair of completely mixed states on the first `r` and the next `r`
/// coordinates of `C^n`.
pub fn orthogonal_mixed_pair(n: usize, r: usize) -> Result<(DensityMatrix, DensityMatrix)> {
    ensure!(r >= 1 && 2 * r <= n, "need 1 <= r and 2r <= n, got r={r}, n={n}");
    Ok((
        DensityMatrix::coordinate_mixture(n, 0..r)?,
        DensityMatrix::coordinate_mixture(n, r..2 * r)?,
    ))
}

/// Haar-basis total variation between two orthogonal rank-`r` completely
/// mixed states. Their trace distance is 2 while their Frobenius distance is
/// only `sqrt(2/r)`; the median TV is compared with `HIGH_RANK_CONSTANT r^(-1/4)`
/// when `r > 1`. `empirical_prob` is the fraction of trials above that level.
pub fn high_rank_counterexample(n: usize, r: usize, trials: usize, rng: RngStream) -> Result<TailReport> {
    let (a, b) = orthogonal_mixed_pair(n, r)?;
    let diff = a.matrix() - b.matrix();
    let tn = trace_norm(&diff)?;
    let fr = frobenius_norm(&diff);
    ensure!((tn - 2.0).abs() <= 1e-9, "trace distance {tn} differs from 2");
    ensure!((fr - (2.0 / r as f64).sqrt()).abs() <= 1e-12, "frobenius distance {fr} differs from sqrt(2/r)");
    let exp = frobenius_tv_experiment(&a, &b, MeasurementMode::HaarBasis, trials, rng)?;
    let bound = HIGH_RANK_CONSTANT * (r as f64).powf(-0.25);
    let hits = exp.records.iter().filter(|t| t.tv > bound).count();
    let mut rep = TailReport::new("high-rank", &[("n", n as f64), ("r", r as f64)], trials, hits);
    rep.statistic = exp.median_tv;
    rep.bound = Some(bound);
    rep.pass = (r > 1).then_some(exp.median_tv <= bound);
    rep.extras.insert("trace_norm".into(), tn);
    rep.extras.insert("frobenius".into(), fr);
    rep.extras.insert("min_tv".into(), exp.min_tv);
    rep.extras.insert("mean_tv".into(), exp.mean_tv);
    Ok(rep)
}
