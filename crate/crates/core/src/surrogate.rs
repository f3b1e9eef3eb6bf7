//! Gaussian-process regression with a Matérn-5/2 ARD kernel.
//!
//! One model per objective. Outputs are standardized at fit time; the
//! hyperparameters (signal variance, per-dimension lengthscales, noise
//! variance) live in that standardized scale and are chosen by maximizing
//! the exact log marginal likelihood from several random starts.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{numeric, validation, Result};
use crate::linalg::Cholesky;
use crate::math::LN_2PI;

const SQRT5: f64 = 2.236_067_977_499_79;

/// Smallest admissible noise variance.
pub const NOISE_FLOOR: f64 = 1e-10;
/// Largest jitter added while factoring the posterior covariance for sampling.
pub const SAMPLE_JITTER_MAX: f64 = 1e-8;
/// Largest jitter added to the training kernel matrix.
pub const KERNEL_JITTER_MAX: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpHyperparameters {
    pub signal_variance: f64,
    pub lengthscales: Vec<f64>,
    pub noise_variance: f64,
}

impl GpHyperparameters {
    pub fn new(signal_variance: f64, lengthscales: Vec<f64>, noise_variance: f64) -> Self {
        Self { signal_variance, lengthscales, noise_variance }
    }

    pub fn dim(&self) -> usize {
        self.lengthscales.len()
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.lengthscales.len() != dim {
            return Err(validation(format!(
                "{} lengthscales for {dim}-dimensional inputs",
                self.lengthscales.len()
            )));
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.signal_variance) || !self.lengthscales.iter().all(|&l| positive(l)) {
            return Err(validation("signal variance and lengthscales must be > 0"));
        }
        if !(self.noise_variance.is_finite() && self.noise_variance >= NOISE_FLOOR) {
            return Err(validation(format!(
                "noise variance {} below the jitter floor {NOISE_FLOOR:e}",
                self.noise_variance
            )));
        }
        Ok(())
    }

    fn from_log(t: &[f64]) -> Self {
        let d = t.len() - 2;
        Self {
            signal_variance: libm::exp(t[0]),
            lengthscales: t[1..=d].iter().map(|&v| libm::exp(v)).collect(),
            noise_variance: libm::exp(t[d + 1]),
        }
    }
}

/// Lengthscale-scaled Euclidean distance.
fn scaled_distance(lengthscales: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let s: f64 = a
        .iter()
        .zip(b)
        .zip(lengthscales)
        .map(|((x, y), l)| {
            let t = (x - y) / l;
            t * t
        })
        .sum();
    libm::sqrt(s)
}

fn matern52_of_distance(signal_variance: f64, r: f64) -> f64 {
    let sr = SQRT5 * r;
    signal_variance * (1.0 + sr + sr * sr / 3.0) * libm::exp(-sr)
}

/// Matérn-5/2 covariance between two points.
pub fn matern52(hyper: &GpHyperparameters, a: &[f64], b: &[f64]) -> f64 {
    matern52_of_distance(hyper.signal_variance, scaled_distance(&hyper.lengthscales, a, b))
}

/// Signal-only kernel matrix over flat row-major inputs.
fn kernel_matrix(hyper: &GpHyperparameters, x: &[f64], n: usize, d: usize) -> Vec<f64> {
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        k[i * n + i] = hyper.signal_variance;
        for j in 0..i {
            let v = matern52(hyper, &x[i * d..(i + 1) * d], &x[j * d..(j + 1) * d]);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    k
}

/// Public kernel matrix over a list of points, including `noise·I` when asked.
pub fn covariance_matrix(hyper: &GpHyperparameters, points: &[Vec<f64>], with_noise: bool) -> Vec<f64> {
    let d = hyper.dim();
    let flat: Vec<f64> = points.iter().flatten().copied().collect();
    let mut k = kernel_matrix(hyper, &flat, points.len(), d);
    if with_noise {
        for i in 0..points.len() {
            k[i * points.len() + i] += hyper.noise_variance;
        }
    }
    k
}

fn flatten_inputs(x: &[Vec<f64>]) -> Result<(Vec<f64>, usize)> {
    let d = x.first().map(|p| p.len()).ok_or_else(|| validation("no training inputs"))?;
    if d == 0 || x.iter().any(|p| p.len() != d) {
        return Err(validation("training inputs must share a non-zero dimension"));
    }
    Ok((x.iter().flatten().copied().collect(), d))
}

/// Exact log marginal likelihood of `y` under a zero-mean GP with the given
/// hyperparameters. No standardization is applied.
pub fn log_marginal_likelihood(hyper: &GpHyperparameters, x: &[Vec<f64>], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || y.is_empty() {
        return Err(validation("need equally many inputs and outputs (≥ 1)"));
    }
    let (flat, d) = flatten_inputs(x)?;
    hyper.validate(d)?;
    let n = y.len();
    let mut k = kernel_matrix(hyper, &flat, n, d);
    for i in 0..n {
        k[i * n + i] += hyper.noise_variance;
    }
    let (chol, _) = Cholesky::factor_with_jitter(&k, n, KERNEL_JITTER_MAX)?;
    let alpha = chol.solve(y);
    let fit: f64 = y.iter().zip(&alpha).map(|(a, b)| a * b).sum();
    Ok(-0.5 * fit - 0.5 * chol.log_det() - 0.5 * n as f64 * LN_2PI)
}

/// Factored kernel, `α = K⁻¹y` and the LML at log hyperparameters `theta`.
fn lml_parts(x: &[f64], n: usize, d: usize, y: &[f64], theta: &[f64]) -> Option<(GpHyperparameters, Vec<f64>, Cholesky, Vec<f64>, f64)> {
    let hyper = GpHyperparameters::from_log(theta);
    let signal = kernel_matrix(&hyper, x, n, d);
    let mut k = signal.clone();
    for i in 0..n {
        k[i * n + i] += hyper.noise_variance;
    }
    let chol = Cholesky::factor(&k, n)?;
    let alpha = chol.solve(y);
    let fit: f64 = y.iter().zip(&alpha).map(|(a, b)| a * b).sum();
    let lml = -0.5 * fit - 0.5 * chol.log_det() - 0.5 * n as f64 * LN_2PI;
    lml.is_finite().then_some((hyper, signal, chol, alpha, lml))
}

fn lml_only(x: &[f64], n: usize, d: usize, y: &[f64], theta: &[f64]) -> Option<f64> {
    lml_parts(x, n, d, y, theta).map(|p| p.4)
}

/// LML and its gradient with respect to the log hyperparameters. `None` when
/// the kernel matrix cannot be factored.
fn lml_with_gradient(x: &[f64], n: usize, d: usize, y: &[f64], theta: &[f64]) -> Option<(f64, Vec<f64>)> {
    let (hyper, signal, chol, alpha, lml) = lml_parts(x, n, d, y, theta)?;

    // W = ααᵀ − K⁻¹; dLML/dθ = ½ tr(W ∂K/∂θ).
    let mut w = chol.inverse();
    for i in 0..n {
        for j in 0..n {
            w[i * n + j] = alpha[i] * alpha[j] - w[i * n + j];
        }
    }
    let mut grad = vec![0.0; d + 2];
    let mut trace_signal = 0.0;
    let mut trace_noise = 0.0;
    for i in 0..n {
        trace_noise += w[i * n + i];
        trace_signal += w[i * n + i] * signal[i * n + i];
        let xi = &x[i * d..(i + 1) * d];
        for j in 0..i {
            let wij = 2.0 * w[i * n + j];
            trace_signal += wij * signal[i * n + j];
            let xj = &x[j * d..(j + 1) * d];
            let r = scaled_distance(&hyper.lengthscales, xi, xj);
            let sr = SQRT5 * r;
            let common = wij * hyper.signal_variance * (5.0 / 3.0) * (1.0 + sr) * libm::exp(-sr);
            for (dim, l) in hyper.lengthscales.iter().enumerate() {
                let t = (xi[dim] - xj[dim]) / l;
                grad[1 + dim] += common * t * t;
            }
        }
    }
    grad[0] = trace_signal;
    grad[d + 1] = trace_noise * hyper.noise_variance;
    for g in &mut grad {
        *g *= 0.5;
    }
    Some((lml, grad))
}

/// Search box and effort for [`GpModel::fit`].
#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub restarts: usize,
    pub max_iterations: usize,
    pub lengthscale_range: (f64, f64),
    pub signal_variance_range: (f64, f64),
    pub noise_variance_range: (f64, f64),
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_iterations: 60,
            lengthscale_range: (0.05, 20.0),
            signal_variance_range: (0.05, 20.0),
            noise_variance_range: (1e-8, 1.0),
        }
    }
}

impl FitOptions {
    fn log_bounds(&self, d: usize) -> (Vec<f64>, Vec<f64>) {
        let ln = |v: f64| libm::log(v);
        let mut lo = vec![ln(self.signal_variance_range.0)];
        let mut hi = vec![ln(self.signal_variance_range.1)];
        lo.extend(core::iter::repeat_n(ln(self.lengthscale_range.0), d));
        hi.extend(core::iter::repeat_n(ln(self.lengthscale_range.1), d));
        lo.push(ln(self.noise_variance_range.0));
        hi.push(ln(self.noise_variance_range.1));
        (lo, hi)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

const LBFGS_MEMORY: usize = 6;

/// L-BFGS two-loop recursion producing an ascent direction from `grad`.
fn lbfgs_direction(grad: &[f64], history: &[(Vec<f64>, Vec<f64>)]) -> Vec<f64> {
    let mut q = grad.to_vec();
    let mut coeffs = Vec::with_capacity(history.len());
    for (s, y) in history.iter().rev() {
        let rho = 1.0 / dot(y, s);
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        coeffs.push((rho, a));
    }
    if let Some((s, y)) = history.last() {
        let gamma = dot(s, y) / dot(y, y);
        for qi in &mut q {
            *qi *= gamma;
        }
    }
    for ((s, y), (rho, a)) in history.iter().zip(coeffs.into_iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    q
}

/// Projected L-BFGS ascent in log-hyperparameter space with Armijo
/// backtracking. Trial points are scored without the gradient.
fn ascend(
    x: &[f64],
    n: usize,
    d: usize,
    y: &[f64],
    start: Vec<f64>,
    lo: &[f64],
    hi: &[f64],
    max_iterations: usize,
) -> Option<(f64, Vec<f64>)> {
    let project = |t: &mut [f64]| {
        for ((v, &l), &h) in t.iter_mut().zip(lo).zip(hi) {
            *v = v.clamp(l, h);
        }
    };
    let mut theta = start;
    project(&mut theta);
    let (mut value, mut grad) = lml_with_gradient(x, n, d, y, &theta)?;
    // Curvature pairs in the minimization convention: (Δθ, −Δ∇LML).
    let mut history: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for _ in 0..max_iterations {
        let scale = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if scale < 1e-8 {
            break;
        }
        let mut direction = lbfgs_direction(&grad, &history);
        if history.is_empty() || dot(&direction, &grad) <= 0.0 {
            history.clear();
            direction = grad.iter().map(|g| 0.5 * g / scale).collect();
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..20 {
            let mut cand: Vec<f64> = theta.iter().zip(&direction).map(|(t, p)| t + step * p).collect();
            project(&mut cand);
            let moved: Vec<f64> = cand.iter().zip(&theta).map(|(a, b)| a - b).collect();
            let predicted = dot(&moved, &grad);
            if predicted <= 1e-14 {
                break;
            }
            match lml_only(x, n, d, y, &cand) {
                Some(v) if v >= value + 1e-4 * predicted => {
                    accepted = Some((cand, moved));
                    break;
                }
                _ => step *= 0.5,
            }
        }
        let Some((cand, moved)) = accepted else { break };
        let Some((v, g)) = lml_with_gradient(x, n, d, y, &cand) else { break };
        let gain = v - value;
        let change: Vec<f64> = grad.iter().zip(&g).map(|(a, b)| a - b).collect();
        if dot(&moved, &change) > 1e-12 {
            if history.len() == LBFGS_MEMORY {
                history.remove(0);
            }
            history.push((moved, change));
        }
        theta = cand;
        value = v;
        grad = g;
        if gain < 1e-7 * (1.0 + value.abs()) {
            break;
        }
    }
    Some((value, theta))
}

/// A fitted GP posterior for one objective.
#[derive(Debug, Clone)]
pub struct GpModel {
    hyper: GpHyperparameters,
    dim: usize,
    n: usize,
    inputs: Vec<f64>,
    outputs: Vec<f64>,
    y_mean: f64,
    y_scale: f64,
    chol: Cholesky,
    alpha: Vec<f64>,
}

fn standardize(y: &[f64]) -> (Vec<f64>, f64, f64) {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let sd = libm::sqrt(var);
    let scale = if sd > 1e-12 * (1.0 + mean.abs()) { sd } else { 1.0 };
    (y.iter().map(|v| (v - mean) / scale).collect(), mean, scale)
}

impl GpModel {
    /// Fits hyperparameters by multi-start LML maximization.
    pub fn fit<R: Rng + ?Sized>(x: &[Vec<f64>], y: &[f64], rng: &mut R) -> Result<Self> {
        Self::fit_with(x, y, &FitOptions::default(), rng)
    }

    pub fn fit_with<R: Rng + ?Sized>(
        x: &[Vec<f64>],
        y: &[f64],
        options: &FitOptions,
        rng: &mut R,
    ) -> Result<Self> {
        if x.len() != y.len() || y.len() < 2 {
            return Err(validation("fit needs equally many inputs and outputs (≥ 2)"));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(validation("non-finite training output"));
        }
        let (flat, d) = flatten_inputs(x)?;
        let n = y.len();
        let (ys, y_mean, y_scale) = standardize(y);
        let (lo, hi) = options.log_bounds(d);

        let mut best: Option<(f64, Vec<f64>)> = None;
        for restart in 0..options.restarts.max(1) {
            let start: Vec<f64> = if restart == 0 {
                let mut t = vec![0.0; d + 2];
                for v in &mut t[1..=d] {
                    *v = libm::log(0.5);
                }
                t[d + 1] = libm::log(1e-2);
                t
            } else {
                lo.iter().zip(&hi).map(|(l, h)| l + (h - l) * rng.random::<f64>()).collect()
            };
            if let Some((value, theta)) = ascend(&flat, n, d, &ys, start, &lo, &hi, options.max_iterations) {
                if best.as_ref().is_none_or(|(b, _)| value > *b) {
                    best = Some((value, theta));
                }
            }
        }
        let (_, theta) = best.ok_or_else(|| numeric("every hyperparameter restart failed to factor the kernel"))?;
        let hyper = GpHyperparameters::from_log(&theta);
        Self::build(hyper, flat, d, ys, y_mean, y_scale)
    }

    /// Conditions a GP with fixed hyperparameters (in standardized units).
    pub fn with_hyperparameters(x: &[Vec<f64>], y: &[f64], hyper: GpHyperparameters) -> Result<Self> {
        if x.len() != y.len() || y.is_empty() {
            return Err(validation("need equally many inputs and outputs (≥ 1)"));
        }
        let (flat, d) = flatten_inputs(x)?;
        hyper.validate(d)?;
        let (ys, y_mean, y_scale) = standardize(y);
        Self::build(hyper, flat, d, ys, y_mean, y_scale)
    }

    fn build(
        hyper: GpHyperparameters,
        inputs: Vec<f64>,
        dim: usize,
        outputs: Vec<f64>,
        y_mean: f64,
        y_scale: f64,
    ) -> Result<Self> {
        let n = outputs.len();
        let mut k = kernel_matrix(&hyper, &inputs, n, dim);
        for i in 0..n {
            k[i * n + i] += hyper.noise_variance;
        }
        let (chol, _) = Cholesky::factor_with_jitter(&k, n, KERNEL_JITTER_MAX)?;
        let alpha = chol.solve(&outputs);
        Ok(Self { hyper, dim, n, inputs, outputs, y_mean, y_scale, chol, alpha })
    }

    pub fn hyperparameters(&self) -> &GpHyperparameters {
        &self.hyper
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.dim..(i + 1) * self.dim]
    }

    /// Training outputs in standardized units.
    pub fn standardized_outputs(&self) -> &[f64] {
        &self.outputs
    }

    /// `(mean, scale)` mapping standardized values back to native units.
    pub fn standardization(&self) -> (f64, f64) {
        (self.y_mean, self.y_scale)
    }

    pub(crate) fn cross_covariance(&self, u: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| matern52(&self.hyper, u, self.input(i))).collect()
    }

    /// Posterior mean and latent variance in standardized units.
    pub fn predict_standardized(&self, u: &[f64]) -> (f64, f64) {
        let mut k = self.cross_covariance(u);
        let mean: f64 = k.iter().zip(&self.alpha).map(|(a, b)| a * b).sum();
        self.chol.solve_lower_in_place(&mut k);
        let reduction: f64 = k.iter().map(|v| v * v).sum();
        (mean, (self.hyper.signal_variance - reduction).max(0.0))
    }

    /// Posterior mean and variance of the latent function, in native units.
    pub fn predict(&self, u: &[f64]) -> (f64, f64) {
        let (m, v) = self.predict_standardized(u);
        (self.y_mean + self.y_scale * m, self.y_scale * self.y_scale * v)
    }

    /// Joint posterior draws of the latent function at `points`, standardized.
    pub(crate) fn sample_joint_standardized<R: Rng + ?Sized>(
        &self,
        points: &[Vec<f64>],
        rng: &mut R,
        samples: usize,
    ) -> Result<Vec<Vec<f64>>> {
        let m = points.len();
        let mut means = Vec::with_capacity(m);
        let mut v = Vec::with_capacity(m);
        for p in points {
            if p.len() != self.dim {
                return Err(validation("sample point dimension mismatch"));
            }
            let mut k = self.cross_covariance(p);
            means.push(k.iter().zip(&self.alpha).map(|(a, b)| a * b).sum::<f64>());
            self.chol.solve_lower_in_place(&mut k);
            v.push(k);
        }
        let mut cov = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..=i {
                let prior = matern52(&self.hyper, &points[i], &points[j]);
                let red: f64 = v[i].iter().zip(&v[j]).map(|(a, b)| a * b).sum();
                cov[i * m + j] = prior - red;
                cov[j * m + i] = prior - red;
            }
        }
        let chol = match Cholesky::factor_semidefinite(&cov, m, 1e-12) {
            Some(c) => c,
            None => Cholesky::factor_with_jitter(&cov, m, SAMPLE_JITTER_MAX)?.0,
        };
        Ok((0..samples)
            .map(|_| {
                let z: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
                chol.mul_lower(&z).iter().zip(&means).map(|(a, b)| a + b).collect()
            })
            .collect())
    }

    /// `samples` joint draws of the noiseless latent function at `points`.
    pub fn sample_joint<R: Rng + ?Sized>(
        &self,
        points: &[Vec<f64>],
        rng: &mut R,
        samples: usize,
    ) -> Result<Vec<Vec<f64>>> {
        if samples == 0 {
            return Err(validation("need at least one sample"));
        }
        let draws = self.sample_joint_standardized(points, rng, samples)?;
        Ok(draws
            .into_iter()
            .map(|d| d.into_iter().map(|v| self.y_mean + self.y_scale * v).collect())
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn grid(n: usize) -> Vec<Vec<f64>> {
        (0..n).map(|i| vec![i as f64 / (n - 1) as f64]).collect()
    }

    #[test]
    fn single_point_likelihood() {
        let h = GpHyperparameters::new(1.0, vec![1.0], 1.0);
        let lml = log_marginal_likelihood(&h, &[vec![0.3]], &[0.0]).unwrap();
        let expected = -0.5 * libm::log(2.0 * core::f64::consts::PI * 2.0);
        assert!((lml - expected).abs() < 1e-12);
        assert!((lml + 1.2655).abs() < 1e-4);
    }

    #[test]
    fn zero_noise_duplicate_inputs_is_an_error() {
        let h = GpHyperparameters::new(1.0, vec![1.0], 0.0);
        assert!(log_marginal_likelihood(&h, &[vec![0.3], vec![0.3]], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn inflated_noise_lowers_likelihood_on_linear_data() {
        let x = grid(10);
        let y: Vec<f64> = x.iter().map(|p| 2.0 * p[0] - 1.0).collect();
        let tight = GpHyperparameters::new(1.0, vec![1.0], 1e-6);
        let loose = GpHyperparameters::new(1.0, vec![1.0], 10.0);
        assert!(log_marginal_likelihood(&tight, &x, &y).unwrap() > log_marginal_likelihood(&loose, &x, &y).unwrap());
    }

    #[test]
    fn analytic_gradient_matches_central_differences() {
        let mut rng = stream(11);
        let x: Vec<Vec<f64>> = (0..9).map(|_| vec![rng.random(), rng.random()]).collect();
        let y: Vec<f64> = x.iter().map(|p| libm::sin(4.0 * p[0]) + p[1]).collect();
        let flat: Vec<f64> = x.iter().flatten().copied().collect();
        let theta = vec![0.2, -0.7, 0.1, -3.0];
        let (_, g) = lml_with_gradient(&flat, 9, 2, &y, &theta).unwrap();
        for i in 0..theta.len() {
            let h = 1e-5;
            let mut p = theta.clone();
            let mut m = theta.clone();
            p[i] += h;
            m[i] -= h;
            let fd = (lml_with_gradient(&flat, 9, 2, &y, &p).unwrap().0
                - lml_with_gradient(&flat, 9, 2, &y, &m).unwrap().0)
                / (2.0 * h);
            assert!((fd - g[i]).abs() <= 1e-5 * (1.0 + fd.abs()), "component {i}: fd {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn fit_on_smooth_noiseless_data_has_small_noise() {
        let x = grid(12);
        let y: Vec<f64> = x.iter().map(|p| libm::sin(6.0 * p[0])).collect();
        let m = GpModel::fit(&x, &y, &mut stream(5)).unwrap();
        assert!(m.hyperparameters().noise_variance <= 1e-3, "{:?}", m.hyperparameters());
    }

    #[test]
    fn constant_outputs_predict_the_constant() {
        let x = grid(6);
        let y = vec![3.25; 6];
        let m = GpModel::fit(&x, &y, &mut stream(1)).unwrap();
        for u in [0.0, 0.13, 0.5, 0.99] {
            assert!((m.predict(&[u]).0 - 3.25).abs() < 1e-9);
        }
    }

    #[test]
    fn fit_is_seed_deterministic() {
        let x = grid(8);
        let y: Vec<f64> = x.iter().map(|p| p[0] * p[0]).collect();
        let a = GpModel::fit(&x, &y, &mut stream(9)).unwrap();
        let b = GpModel::fit(&x, &y, &mut stream(9)).unwrap();
        assert_eq!(a.hyperparameters(), b.hyperparameters());
    }

    #[test]
    fn noiseless_interpolation_and_far_field() {
        let x = grid(5);
        let y = vec![1.0, -0.5, 2.0, 0.3, 0.9];
        let h = GpHyperparameters::new(1.0, vec![0.3], 1e-10);
        let m = GpModel::with_hyperparameters(&x, &y, h).unwrap();
        for (p, t) in x.iter().zip(&y) {
            assert!((m.predict(p).0 - t).abs() <= 1e-6);
        }
        let h = GpHyperparameters::new(1.0, vec![0.05, 0.05], 1e-4);
        let m = GpModel::with_hyperparameters(&[vec![0.0, 0.0], vec![0.1, 0.0]], &[1.0, 3.0], h).unwrap();
        let (mean, var) = m.predict(&[1.0, 1.0]);
        let (y_mean, y_scale) = m.standardization();
        assert!((mean - y_mean).abs() < 1e-9);
        assert!((var - y_scale * y_scale).abs() < 1e-9);
        assert!(m.predict(&[0.0, 0.0]).1 <= var);
    }

    #[test]
    fn degenerate_posterior_draws_equal_the_mean() {
        let x = grid(4);
        let y = vec![0.0, 1.0, 0.5, -1.0];
        let h = GpHyperparameters::new(1.0, vec![0.4], 1e-10);
        let m = GpModel::with_hyperparameters(&x, &y, h).unwrap();
        let draws = m.sample_joint(&x, &mut stream(2), 5).unwrap();
        for d in draws {
            for (v, p) in d.iter().zip(&x) {
                assert!((v - m.predict(p).0).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn sample_joint_is_seed_deterministic() {
        let x = grid(5);
        let y = vec![0.0, 1.0, 0.5, -1.0, 0.2];
        let h = GpHyperparameters::new(1.0, vec![0.4], 0.1);
        let m = GpModel::with_hyperparameters(&x, &y, h).unwrap();
        let pts = vec![vec![0.1], vec![0.7]];
        assert_eq!(
            m.sample_joint(&pts, &mut stream(4), 3).unwrap(),
            m.sample_joint(&pts, &mut stream(4), 3).unwrap()
        );
        assert!(m.sample_joint(&pts, &mut stream(4), 0).is_err());
    }
}
