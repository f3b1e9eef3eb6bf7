//! Acquisition functions: closed-form EI, Monte Carlo noisy EI, random
//! Dirichlet scalarization across objectives, and prior weighting with a
//! hyperbolically decaying exponent.
//!
//! Everything here assumes maximization.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::linalg::Cholesky;
use crate::math::{normal_cdf, normal_pdf};
use crate::param_space::check_unit;
use crate::priors::PriorDensity;
use crate::surrogate::{matern52, GpModel, KERNEL_JITTER_MAX};

/// Closed-form expected improvement of `N(mean, variance)` over `incumbent`.
pub fn expected_improvement(mean: f64, variance: f64, incumbent: f64) -> f64 {
    let sigma = libm::sqrt(variance.max(0.0));
    let diff = mean - incumbent;
    if sigma <= 0.0 {
        return diff.max(0.0);
    }
    let z = diff / sigma;
    (sigma * (z * normal_cdf(z) + normal_pdf(z))).max(0.0)
}

/// Noisy EI for one model: `S` joint draws of the latent function at the
/// training inputs, each conditioning a noiseless GP whose own best value is
/// the incumbent for that draw.
///
/// The draws are taken once at construction so every candidate is scored
/// against the same samples.
#[derive(Debug, Clone)]
pub struct NoisyEi<'a> {
    model: &'a GpModel,
    noiseless: Cholesky,
    weights: Vec<Vec<f64>>,
    incumbents: Vec<f64>,
}

impl<'a> NoisyEi<'a> {
    pub fn new<R: Rng + ?Sized>(model: &'a GpModel, samples: usize, rng: &mut R) -> Result<Self> {
        if samples == 0 {
            return Err(validation("noisy EI needs at least one Monte Carlo sample"));
        }
        let n = model.len();
        let inputs: Vec<Vec<f64>> = (0..n).map(|i| model.input(i).to_vec()).collect();
        let draws = model.sample_joint_standardized(&inputs, rng, samples)?;

        let hyper = model.hyperparameters();
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = matern52(hyper, &inputs[i], &inputs[j]);
                k[i * n + j] = v;
                k[j * n + i] = v;
            }
        }
        let (noiseless, _) = Cholesky::factor_with_jitter(&k, n, KERNEL_JITTER_MAX)?;
        let incumbents = draws.iter().map(|d| d.iter().copied().fold(f64::NEG_INFINITY, f64::max)).collect();
        let weights = draws.iter().map(|d| noiseless.solve(d)).collect();
        Ok(Self { model, noiseless, weights, incumbents })
    }

    pub fn samples(&self) -> usize {
        self.incumbents.len()
    }

    /// Estimate in the model's standardized output units.
    pub fn value_standardized(&self, u: &[f64]) -> f64 {
        let hyper = self.model.hyperparameters();
        let mut k = self.model.cross_covariance(u);
        let means: Vec<f64> = self
            .weights
            .iter()
            .map(|w| k.iter().zip(w).map(|(a, b)| a * b).sum())
            .collect();
        self.noiseless.solve_lower_in_place(&mut k);
        let variance = (hyper.signal_variance - k.iter().map(|v| v * v).sum::<f64>()).max(0.0);
        let total: f64 = means
            .iter()
            .zip(&self.incumbents)
            .map(|(&m, &best)| expected_improvement(m, variance, best))
            .sum();
        total / self.incumbents.len() as f64
    }

    /// Estimate in native output units.
    pub fn value(&self, u: &[f64]) -> f64 {
        self.value_standardized(u) * self.model.standardization().1
    }
}

/// Monte Carlo noisy EI of a single point, in native units.
pub fn noisy_ei<R: Rng + ?Sized>(model: &GpModel, u: &[f64], samples: usize, rng: &mut R) -> Result<f64> {
    if u.len() != model.dim() {
        return Err(validation("point dimension does not match the model"));
    }
    Ok(NoisyEi::new(model, samples, rng)?.value(u))
}

/// Convex weights over the objectives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScalarizationWeights(Vec<f64>);

impl ScalarizationWeights {
    pub fn new(lambda: Vec<f64>) -> Result<Self> {
        if lambda.is_empty() || lambda.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(validation("scalarization weights must be non-negative"));
        }
        let sum: f64 = lambda.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(validation(format!("scalarization weights sum to {sum}, not 1")));
        }
        Ok(Self(lambda))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `λ ~ Dirichlet(α, …, α)` from normalized Gamma draws.
pub fn sample_scalarization<R: Rng + ?Sized>(rng: &mut R, k: usize, alpha: f64) -> Result<ScalarizationWeights> {
    if k == 0 || !(alpha > 0.0 && alpha.is_finite()) {
        return Err(validation("Dirichlet needs K ≥ 1 and α > 0"));
    }
    if k == 1 {
        return Ok(ScalarizationWeights(vec![1.0]));
    }
    let gamma = Gamma::new(alpha, 1.0).map_err(|e| validation(format!("gamma: {e}")))?;
    let mut draws: Vec<f64> = (0..k).map(|_| gamma.sample(rng)).collect();
    let sum: f64 = draws.iter().sum();
    if sum > 0.0 && sum.is_finite() {
        for d in &mut draws {
            *d /= sum;
        }
    } else {
        draws = vec![1.0 / k as f64; k];
    }
    Ok(ScalarizationWeights(draws))
}

/// `Σ_k λ_k α_k`.
pub fn scalarized_acq(values: &[f64], weights: &ScalarizationWeights) -> Result<f64> {
    if values.len() != weights.len() {
        return Err(validation(format!(
            "{} acquisition values for {} weights",
            values.len(),
            weights.len()
        )));
    }
    Ok(values.iter().zip(&weights.0).map(|(v, l)| v * l).sum())
}

/// `acq · π(x)^(β/n)`: the prior's exponent decays as the iteration index grows.
pub fn prior_weighted(acq: f64, prior_log_density: f64, iteration: usize, beta: f64) -> f64 {
    let exponent = beta / iteration.max(1) as f64;
    acq * libm::exp(prior_log_density * exponent)
}

/// Composition of the candidate set used to maximize the acquisition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CandidateSettings {
    pub prior_samples: usize,
    pub uniform_samples: usize,
    pub local_samples: usize,
    pub local_sigma: f64,
}

impl Default for CandidateSettings {
    fn default() -> Self {
        Self { prior_samples: 512, uniform_samples: 512, local_samples: 64, local_sigma: 0.02 }
    }
}

impl CandidateSettings {
    pub fn total(&self) -> usize {
        self.prior_samples + self.uniform_samples + self.local_samples
    }
}

/// Everything the acquisition maximizer needs besides the models.
#[derive(Debug, Clone)]
pub struct AcquisitionContext<'a> {
    pub prior: &'a PriorDensity,
    pub weights: &'a ScalarizationWeights,
    /// Post-DoE iteration index, starting at 1.
    pub iteration: usize,
    pub beta: f64,
    pub nei_samples: usize,
    pub candidates: &'a CandidateSettings,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcquisitionChoice {
    pub point: Vec<f64>,
    pub value: f64,
    pub index: usize,
    pub candidates: Vec<Vec<f64>>,
    pub values: Vec<f64>,
}

/// Index of the observed point with the best scalarized standardized outputs.
fn best_scalarized_index(models: &[GpModel], weights: &ScalarizationWeights) -> usize {
    let n = models[0].len();
    let score = |i: usize| -> f64 {
        models
            .iter()
            .zip(weights.as_slice())
            .map(|(m, l)| l * m.standardized_outputs()[i])
            .sum()
    };
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for i in 0..n {
        let s = score(i);
        if s > best_score {
            best = i;
            best_score = s;
        }
    }
    best
}

/// Builds the candidate set: prior draws, uniform draws, and Gaussian
/// perturbations of the best scalarized observation, all inside the cube.
pub fn candidate_set<R: Rng + ?Sized>(
    models: &[GpModel],
    prior: &PriorDensity,
    weights: &ScalarizationWeights,
    settings: &CandidateSettings,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>> {
    let d = models[0].dim();
    let mut out = prior.sample(rng, settings.prior_samples)?;
    out.extend((0..settings.uniform_samples).map(|_| (0..d).map(|_| rng.random::<f64>()).collect::<Vec<f64>>()));
    let anchor = models[0].input(best_scalarized_index(models, weights)).to_vec();
    for _ in 0..settings.local_samples {
        out.push(
            anchor
                .iter()
                .map(|&a| {
                    let z: f64 = rng.sample(StandardNormal);
                    (a + settings.local_sigma * z).clamp(0.0, 1.0)
                })
                .collect(),
        );
    }
    Ok(out)
}

/// Prior-weighted, scalarized noisy EI of every candidate. The per-objective
/// estimates are combined in standardized units.
pub fn score_candidates(
    estimators: &[NoisyEi<'_>],
    candidates: &[Vec<f64>],
    ctx: &AcquisitionContext<'_>,
) -> Result<Vec<f64>> {
    if estimators.len() != ctx.weights.len() {
        return Err(validation("need one estimator per scalarization weight"));
    }
    let mut per_objective = vec![0.0; estimators.len()];
    candidates
        .iter()
        .map(|c| {
            check_unit(c, ctx.prior.dim())?;
            for (slot, est) in per_objective.iter_mut().zip(estimators) {
                *slot = est.value_standardized(c);
            }
            let acq = scalarized_acq(&per_objective, ctx.weights)?;
            Ok(prior_weighted(acq, ctx.prior.log_density_unchecked(c), ctx.iteration, ctx.beta))
        })
        .collect()
}

/// Index of the largest value; the lowest index wins ties.
pub fn argmax_first(values: &[f64]) -> usize {
    let mut index = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[index] {
            index = i;
        }
    }
    index
}

/// Maximizes the prior-weighted, scalarized noisy EI over a candidate set.
/// Ties go to the lowest candidate index.
pub fn maximize_acquisition<R: Rng + ?Sized>(
    models: &[GpModel],
    ctx: &AcquisitionContext<'_>,
    rng: &mut R,
) -> Result<AcquisitionChoice> {
    if models.is_empty() || models.len() != ctx.weights.len() {
        return Err(validation("need one model per scalarization weight"));
    }
    if models.iter().any(|m| m.len() != models[0].len() || m.dim() != ctx.prior.dim()) {
        return Err(validation("models and prior must share inputs and dimension"));
    }
    let estimators = models
        .iter()
        .map(|m| NoisyEi::new(m, ctx.nei_samples, rng))
        .collect::<Result<Vec<_>>>()?;
    let candidates = candidate_set(models, ctx.prior, ctx.weights, ctx.candidates, rng)?;
    let values = score_candidates(&estimators, &candidates, ctx)?;
    let index = argmax_first(&values);
    Ok(AcquisitionChoice {
        point: candidates[index].clone(),
        value: values[index],
        index,
        candidates,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::surrogate::GpHyperparameters;

    #[test]
    fn ei_closed_form_examples() {
        assert_eq!(expected_improvement(1.0, 0.0, 0.5), 0.5);
        assert_eq!(expected_improvement(0.2, 0.0, 0.5), 0.0);
        assert!((expected_improvement(0.3, 1.0, 0.3) - 0.398_942_280_401_432_7).abs() < 1e-12);
        let tail = expected_improvement(-10.0, 1.0, 0.0);
        assert!((0.0..1e-20).contains(&tail));
    }

    #[test]
    fn ei_grows_with_variance_at_the_incumbent() {
        let mut last = 0.0;
        for v in [0.01, 0.1, 0.5, 1.0, 4.0] {
            let e = expected_improvement(1.0, v, 1.0);
            assert!(e > last);
            last = e;
        }
    }

    #[test]
    fn scalarization_examples() {
        let w = ScalarizationWeights::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(scalarized_acq(&[2.0, 4.0], &w).unwrap(), 2.0);
        let w = ScalarizationWeights::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(scalarized_acq(&[2.0, 4.0], &w).unwrap(), 3.0);
        let third = 1.0 / 3.0;
        let w = ScalarizationWeights::new(vec![third; 3]).unwrap();
        assert!((scalarized_acq(&[3.0; 3], &w).unwrap() - 3.0).abs() < 1e-15);
        assert!(scalarized_acq(&[1.0], &w).is_err());
    }

    #[test]
    fn dirichlet_draws() {
        let mut rng = stream(8);
        assert_eq!(sample_scalarization(&mut rng, 1, 1.0).unwrap().as_slice(), &[1.0]);
        for k in 2..6 {
            let w = sample_scalarization(&mut rng, k, 0.7).unwrap();
            assert!((w.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(w.as_slice().iter().all(|&l| l >= 0.0));
        }
        assert!(sample_scalarization(&mut rng, 2, 0.0).is_err());
    }

    #[test]
    fn prior_weight_examples() {
        assert_eq!(prior_weighted(0.7, 0.0, 1, 10.0), 0.7);
        assert_eq!(prior_weighted(0.7, 0.0, 1000, 10.0), 0.7);
        let log_pi = libm::log(3.5);
        assert!((prior_weighted(2.0, log_pi, 10, 10.0) - 7.0).abs() < 1e-12);
    }

    #[test]
    fn nei_is_nonnegative_and_seeded() {
        let x: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64 / 5.0]).collect();
        let y = vec![0.1, 0.5, 0.2, 0.9, 0.4, 0.3];
        let m = GpModel::with_hyperparameters(&x, &y, GpHyperparameters::new(1.0, vec![0.3], 0.05)).unwrap();
        let a = noisy_ei(&m, &[0.55], 1, &mut stream(3)).unwrap();
        let b = noisy_ei(&m, &[0.55], 1, &mut stream(3)).unwrap();
        assert_eq!(a, b);
        let est = NoisyEi::new(&m, 8, &mut stream(4)).unwrap();
        for i in 0..=20 {
            assert!(est.value(&[i as f64 / 20.0]) >= 0.0);
        }
        assert!(noisy_ei(&m, &[0.5, 0.5], 4, &mut stream(3)).is_err());
    }

    #[test]
    fn maximizer_returns_the_best_candidate() {
        let x: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64 / 7.0, (i * 3 % 8) as f64 / 7.0]).collect();
        let y1: Vec<f64> = x.iter().map(|p| p[0] - p[1]).collect();
        let y2: Vec<f64> = x.iter().map(|p| p[1] * p[1]).collect();
        let h = GpHyperparameters::new(1.0, vec![0.4, 0.4], 1e-3);
        let models = vec![
            GpModel::with_hyperparameters(&x, &y1, h.clone()).unwrap(),
            GpModel::with_hyperparameters(&x, &y2, h).unwrap(),
        ];
        let prior = PriorDensity::truncated_gaussian(vec![0.3, 0.6], vec![0.2, 0.2], 1e-12).unwrap();
        let weights = ScalarizationWeights::new(vec![0.3, 0.7]).unwrap();
        let settings = CandidateSettings { prior_samples: 50, uniform_samples: 50, local_samples: 10, local_sigma: 0.02 };
        let ctx = AcquisitionContext { prior: &prior, weights: &weights, iteration: 2, beta: 5.0, nei_samples: 8, candidates: &settings };
        let a = maximize_acquisition(&models, &ctx, &mut stream(12)).unwrap();
        let b = maximize_acquisition(&models, &ctx, &mut stream(12)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.candidates.len(), 110);
        assert!(a.point.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(a.values.iter().all(|v| *v <= a.value));
        assert!(a.values[..a.index].iter().all(|v| *v < a.value));
    }
}
