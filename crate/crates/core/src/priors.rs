//! Prior densities over the location of the optimum, defined on the unit cube.
//!
//! Three families are supported: the uniform density, a product of
//! per-dimension Gaussians truncated and renormalized to `[0, 1]` (operator
//! priors), and an equal-weight Gaussian mixture with one component per
//! earlier Pareto-optimal configuration (transfer priors). Every density is
//! floored at a small positive value so that weighting an acquisition
//! function by it never removes a region from consideration.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::math::{log_sum_exp, normal_cdf, normal_log_pdf, sample_std};
use crate::param_space::{check_unit, Configuration, ParameterSpace};

pub const DEFAULT_FLOOR: f64 = 1e-12;
/// Lower bound on the per-dimension spread used for KDE bandwidths.
pub const KDE_MIN_SPREAD: f64 = 0.05;
/// Rejection attempts allowed per draw before the prior is declared degenerate.
pub const MAX_REJECTIONS: usize = 10_000;

fn default_floor() -> f64 {
    DEFAULT_FLOOR
}

/// Serialized form; also the validation boundary for deserialized priors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PriorRepr {
    Uniform {
        dim: usize,
    },
    #[serde(rename = "independent-truncated-gaussian")]
    TruncatedGaussian {
        means: Vec<f64>,
        stddevs: Vec<f64>,
        #[serde(default = "default_floor")]
        floor: f64,
    },
    KdeMixture {
        centers: Vec<Vec<f64>>,
        bandwidths: Vec<f64>,
        #[serde(default = "default_floor")]
        floor: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Uniform,
    TruncatedGaussian {
        means: Vec<f64>,
        stddevs: Vec<f64>,
        /// Σ_j log(σ_j Z_j), where Z_j is the Gaussian mass inside [0, 1].
        log_norm: f64,
    },
    Kde {
        centers: Vec<Vec<f64>>,
        bandwidths: Vec<f64>,
        /// Per component: Σ_j log(h_j Z_cj).
        log_norms: Vec<f64>,
    },
}

/// A probability density on `[0, 1]^D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PriorRepr", into = "PriorRepr")]
pub struct PriorDensity {
    dim: usize,
    floor: f64,
    kind: Kind,
}

/// `log(σ · P(0 ≤ N(μ, σ²) ≤ 1))`.
fn log_truncated_norm(mu: f64, sigma: f64) -> f64 {
    let mass = normal_cdf((1.0 - mu) / sigma) - normal_cdf(-mu / sigma);
    libm::log(sigma) + libm::log(mass.max(f64::MIN_POSITIVE))
}

fn check_positive(values: &[f64], what: &str) -> Result<()> {
    if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(validation(format!("{what} must be finite and > 0")));
    }
    Ok(())
}

fn check_floor(floor: f64) -> Result<()> {
    if !(floor.is_finite() && floor > 0.0) {
        return Err(validation("density floor must be > 0"));
    }
    Ok(())
}

impl PriorDensity {
    pub fn uniform(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(validation("prior dimension must be ≥ 1"));
        }
        Ok(Self { dim, floor: DEFAULT_FLOOR, kind: Kind::Uniform })
    }

    /// Independent Gaussians truncated to the cube, in unit coordinates.
    pub fn truncated_gaussian(means: Vec<f64>, stddevs: Vec<f64>, floor: f64) -> Result<Self> {
        if means.is_empty() || means.len() != stddevs.len() {
            return Err(validation("means and stddevs must be non-empty and of equal length"));
        }
        check_unit(&means, means.len())?;
        check_positive(&stddevs, "stddevs")?;
        check_floor(floor)?;
        let log_norm = means.iter().zip(&stddevs).map(|(&m, &s)| log_truncated_norm(m, s)).sum();
        Ok(Self {
            dim: means.len(),
            floor,
            kind: Kind::TruncatedGaussian { means, stddevs, log_norm },
        })
    }

    /// Equal-weight mixture of product Gaussians sharing per-dimension bandwidths.
    pub fn kde_mixture(centers: Vec<Vec<f64>>, bandwidths: Vec<f64>, floor: f64) -> Result<Self> {
        if centers.is_empty() {
            return Err(validation("KDE prior needs at least one center"));
        }
        let dim = bandwidths.len();
        if dim == 0 {
            return Err(validation("KDE bandwidths must be non-empty"));
        }
        for c in &centers {
            check_unit(c, dim)?;
        }
        check_positive(&bandwidths, "bandwidths")?;
        check_floor(floor)?;
        let log_norms = centers
            .iter()
            .map(|c| c.iter().zip(&bandwidths).map(|(&m, &h)| log_truncated_norm(m, h)).sum())
            .collect();
        Ok(Self { dim, floor, kind: Kind::Kde { centers, bandwidths, log_norms } })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self.kind, Kind::Uniform)
    }

    /// Number of mixture components (1 for the non-mixture families).
    pub fn components(&self) -> usize {
        match &self.kind {
            Kind::Kde { centers, .. } => centers.len(),
            _ => 1,
        }
    }

    /// `log max(π(u), floor)`.
    pub fn log_density(&self, u: &[f64]) -> Result<f64> {
        check_unit(u, self.dim)?;
        Ok(self.log_density_unchecked(u))
    }

    /// Density without the floor; used to check normalization.
    pub fn raw_log_density(&self, u: &[f64]) -> Result<f64> {
        check_unit(u, self.dim)?;
        Ok(self.raw_log_density_unchecked(u))
    }

    pub(crate) fn log_density_unchecked(&self, u: &[f64]) -> f64 {
        self.raw_log_density_unchecked(u).max(libm::log(self.floor))
    }

    fn raw_log_density_unchecked(&self, u: &[f64]) -> f64 {
        match &self.kind {
            Kind::Uniform => 0.0,
            Kind::TruncatedGaussian { means, stddevs, log_norm } => {
                let quad: f64 = u
                    .iter()
                    .zip(means.iter().zip(stddevs))
                    .map(|(&x, (&m, &s))| normal_log_pdf((x - m) / s))
                    .sum();
                quad - log_norm
            }
            Kind::Kde { centers, bandwidths, log_norms } => {
                let terms: Vec<f64> = centers
                    .iter()
                    .zip(log_norms)
                    .map(|(c, ln)| {
                        let quad: f64 = u
                            .iter()
                            .zip(c.iter().zip(bandwidths))
                            .map(|(&x, (&m, &h))| normal_log_pdf((x - m) / h))
                            .sum();
                        quad - ln
                    })
                    .collect();
                log_sum_exp(&terms) - libm::log(centers.len() as f64)
            }
        }
    }

    /// Draws `n` i.i.d. points inside the unit cube.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Result<Vec<Vec<f64>>> {
        (0..n).map(|_| self.sample_one(rng)).collect()
    }

    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        match &self.kind {
            Kind::Uniform => Ok((0..self.dim).map(|_| rng.random::<f64>()).collect()),
            Kind::TruncatedGaussian { means, stddevs, .. } => means
                .iter()
                .zip(stddevs)
                .map(|(&m, &s)| {
                    for _ in 0..MAX_REJECTIONS {
                        let z: f64 = rng.sample(StandardNormal);
                        let x = m + s * z;
                        if (0.0..=1.0).contains(&x) {
                            return Ok(x);
                        }
                    }
                    Err(Error::DegeneratePrior(format!(
                        "no draw of N({m}, {s}²) landed in [0, 1] after {MAX_REJECTIONS} tries"
                    )))
                })
                .collect(),
            Kind::Kde { centers, bandwidths, .. } => {
                let c = &centers[rng.random_range(0..centers.len())];
                let mut x = vec![0.0; self.dim];
                for _ in 0..MAX_REJECTIONS {
                    for ((xi, &m), &h) in x.iter_mut().zip(c).zip(bandwidths) {
                        let z: f64 = rng.sample(StandardNormal);
                        *xi = m + h * z;
                    }
                    if x.iter().all(|v| (0.0..=1.0).contains(v)) {
                        return Ok(x);
                    }
                }
                Err(Error::DegeneratePrior(format!(
                    "KDE component draw left the cube {MAX_REJECTIONS} times"
                )))
            }
        }
    }
}

impl TryFrom<PriorRepr> for PriorDensity {
    type Error = Error;

    fn try_from(r: PriorRepr) -> Result<Self> {
        match r {
            PriorRepr::Uniform { dim } => Self::uniform(dim),
            PriorRepr::TruncatedGaussian { means, stddevs, floor } => {
                Self::truncated_gaussian(means, stddevs, floor)
            }
            PriorRepr::KdeMixture { centers, bandwidths, floor } => {
                Self::kde_mixture(centers, bandwidths, floor)
            }
        }
    }
}

impl From<PriorDensity> for PriorRepr {
    fn from(p: PriorDensity) -> Self {
        match p.kind {
            Kind::Uniform => PriorRepr::Uniform { dim: p.dim },
            Kind::TruncatedGaussian { means, stddevs, .. } => {
                PriorRepr::TruncatedGaussian { means, stddevs, floor: p.floor }
            }
            Kind::Kde { centers, bandwidths, .. } => {
                PriorRepr::KdeMixture { centers, bandwidths, floor: p.floor }
            }
        }
    }
}

/// Operator prior: Gaussians centered on `means` (native units) with the same
/// unit-cube standard deviation in every dimension.
pub fn build_operator_prior(
    space: &ParameterSpace,
    means: &Configuration,
    stddev_fraction: f64,
) -> Result<PriorDensity> {
    if !(stddev_fraction > 0.0 && stddev_fraction <= 1.0) {
        return Err(validation(format!("stddev_fraction {stddev_fraction} outside (0, 1]")));
    }
    let mu = space.to_unit(means)?;
    let sigma = vec![stddev_fraction; space.dim()];
    PriorDensity::truncated_gaussian(mu, sigma, DEFAULT_FLOOR)
}

/// Scott's-rule bandwidth for one dimension.
pub fn scott_bandwidth(values: &[f64], dim: usize) -> f64 {
    let spread = sample_std(values).max(KDE_MIN_SPREAD);
    spread * libm::pow(values.len() as f64, -1.0 / (dim as f64 + 4.0))
}

/// Transfer prior: one Gaussian per configuration of an earlier Pareto front.
pub fn build_kde_prior(front: &[Configuration], space: &ParameterSpace) -> Result<PriorDensity> {
    if front.is_empty() {
        return Err(validation("cannot build a KDE prior from an empty front"));
    }
    let centers = front.iter().map(|c| space.to_unit(c)).collect::<Result<Vec<_>>>()?;
    let dim = space.dim();
    let bandwidths = (0..dim)
        .map(|j| {
            let column: Vec<f64> = centers.iter().map(|c| c[j]).collect();
            scott_bandwidth(&column, dim)
        })
        .collect();
    PriorDensity::kde_mixture(centers, bandwidths, DEFAULT_FLOOR)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param_space::Parameter;
    use crate::rng::stream;

    fn space(d: usize) -> ParameterSpace {
        ParameterSpace::new(
            (0..d).map(|i| Parameter::new(&format!("x{i}"), 0.0, 10.0, "")).collect(),
        )
        .unwrap()
    }

    #[test]
    fn uniform_log_density_is_zero() {
        let p = PriorDensity::uniform(2).unwrap();
        assert_eq!(p.log_density(&[0.3, 0.9]).unwrap(), 0.0);
        assert!(p.log_density(&[1.3, 0.9]).is_err());
    }

    #[test]
    fn truncated_gaussian_is_unimodal() {
        let p = PriorDensity::truncated_gaussian(vec![0.5], vec![0.1], DEFAULT_FLOOR).unwrap();
        assert!(p.log_density(&[0.5]).unwrap() > p.log_density(&[0.7]).unwrap());
    }

    #[test]
    fn single_center_kde_peaks_at_center() {
        let c = vec![0.3, 0.8];
        let p = PriorDensity::kde_mixture(vec![c.clone()], vec![0.05, 0.05], DEFAULT_FLOOR).unwrap();
        let at = p.log_density(&c).unwrap();
        for probe in [[0.31, 0.8], [0.3, 0.79], [0.2, 0.7], [0.0, 1.0]] {
            assert!(at > p.log_density(&probe).unwrap());
        }
    }

    #[test]
    fn operator_prior_at_midpoint() {
        let s = space(3);
        let p = build_operator_prior(&s, &s.midpoint(), 0.2).unwrap();
        match PriorRepr::from(p) {
            PriorRepr::TruncatedGaussian { means, stddevs, .. } => {
                assert_eq!(means, vec![0.5; 3]);
                assert_eq!(stddevs, vec![0.2; 3]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(build_operator_prior(&s, &s.midpoint(), 0.0).is_err());
        assert!(build_operator_prior(&s, &s.midpoint(), 1.5).is_err());
        let outside = Configuration::new(vec![11.0, 5.0, 5.0]);
        assert!(matches!(
            build_operator_prior(&s, &outside, 0.2),
            Err(Error::Parameter { .. })
        ));
    }

    #[test]
    fn misleading_prior_peaks_at_corner() {
        let s = space(4);
        let p = build_operator_prior(&s, &s.lower_corner(), 0.1).unwrap();
        let corner = p.log_density(&[0.0; 4]).unwrap();
        assert!(corner > p.log_density(&[0.5; 4]).unwrap());
        assert!(corner > p.log_density(&[0.05; 4]).unwrap());
    }

    #[test]
    fn wide_operator_prior_is_nearly_flat() {
        // Per dimension the ratio is at most exp(½ (1/σ)²) with σ = 1.
        let d = 3;
        let s = space(d);
        let p = build_operator_prior(&s, &s.midpoint(), 1.0).unwrap();
        let mut rng = stream(3);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for _ in 0..2000 {
            let u: Vec<f64> = (0..d).map(|_| rng.random()).collect();
            let v = p.log_density(&u).unwrap();
            lo = lo.min(v);
            hi = hi.max(v);
        }
        assert!(hi - lo <= 0.5 * d as f64);
    }

    #[test]
    fn kde_single_point_uses_floor_bandwidth() {
        let s = space(2);
        let p = build_kde_prior(&[Configuration::new(vec![2.0, 7.0])], &s).unwrap();
        match PriorRepr::from(p) {
            PriorRepr::KdeMixture { centers, bandwidths, .. } => {
                assert_eq!(centers.len(), 1);
                assert_eq!(bandwidths, vec![KDE_MIN_SPREAD; 2]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(build_kde_prior(&[], &s).is_err());
    }

    #[test]
    fn scott_multiplier_for_sixteen_points_in_four_dims() {
        // Evenly spread column with a known sample deviation well above the floor.
        let column: Vec<f64> = (0..16).map(|i| i as f64 / 15.0).collect();
        let h = scott_bandwidth(&column, 4);
        let multiplier = h / sample_std(&column);
        assert!((multiplier - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn separated_kde_modes() {
        let p = PriorDensity::kde_mixture(
            vec![vec![0.2, 0.2], vec![0.8, 0.8]],
            vec![0.05, 0.05],
            DEFAULT_FLOOR,
        )
        .unwrap();
        let mid = p.log_density(&[0.5, 0.5]).unwrap();
        assert!(p.log_density(&[0.2, 0.2]).unwrap() > mid);
        assert!(p.log_density(&[0.8, 0.8]).unwrap() > mid);
    }

    #[test]
    fn floor_keeps_density_finite() {
        let p = PriorDensity::truncated_gaussian(vec![0.0], vec![0.01], DEFAULT_FLOOR).unwrap();
        let far = p.log_density(&[1.0]).unwrap();
        assert_eq!(far, libm::log(DEFAULT_FLOOR));
    }
}
