//! Monte Carlo moments of the Gaussian beta ensemble from the tridiagonal
//! beta-Hermite matrix.
//!
//! The tridiagonal model has eigenvalue density proportional to
//! `prod |mu_i - mu_j|^beta exp(-sum mu_i^2 / 2)`. Matching
//! `exp(-(N kappa / T) lambda^2 / 2)` gives `lambda = mu sqrt(T / (N kappa))`.

use gbe_core::moments::MomentPoly;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum McError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("no exact moment polynomial for k = {0}")]
    MissingMoment(usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct McConfig {
    pub n: usize,
    pub kappa: f64,
    pub t: f64,
    pub samples: u64,
    pub seed: u64,
    pub k_max: usize,
}

impl McConfig {
    pub fn validate(&self) -> Result<(), McError> {
        if self.n == 0 {
            return Err(McError::Config("N must be at least 1".into()));
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) || !(self.t > 0.0 && self.t.is_finite()) {
            return Err(McError::Config("kappa and T must be positive".into()));
        }
        if self.samples == 0 {
            return Err(McError::Config("need at least one sample".into()));
        }
        if self.k_max == 0 {
            return Err(McError::Config("k_max must be at least 1".into()));
        }
        Ok(())
    }

    pub fn beta(&self) -> f64 {
        2.0 * self.kappa
    }

    /// `lambda = scale * mu`.
    pub fn scale(&self) -> f64 {
        (self.t / (self.n as f64 * self.kappa)).sqrt()
    }
}

/// Mean of `sum_i lambda_i^(2k)` for `k = 1..=k_max`.
#[derive(Clone, Debug, Serialize)]
pub struct McEstimate {
    pub mean: Vec<f64>,
    pub std_err: Vec<f64>,
    pub samples: u64,
    pub rejected: u64,
}

/// The eigenvalues of sample `index`, each sample on its own ChaCha stream.
/// `None` if the eigen-solver does not converge.
pub fn sample_spectrum(cfg: &McConfig, index: u64) -> Option<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    let n = cfg.n;
    let s = cfg.scale();
    // diagonal N(0, 2) / sqrt 2, off-diagonal chi_{beta (N - i)} / sqrt 2
    let diag: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    if n == 1 {
        return Some(vec![s * diag[0]]);
    }
    let mut m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
    for i in 1..n {
        let dof = cfg.beta() * (n - i) as f64;
        let chi2: f64 = ChiSquared::new(dof).ok()?.sample(&mut rng);
        let b = (chi2 / 2.0).sqrt();
        m[(i - 1, i)] = b;
        m[(i, i - 1)] = b;
    }
    let eig = SymmetricEigen::try_new(m, 1e-14, 10_000)?;
    Some(eig.eigenvalues.iter().map(|mu| s * mu).collect())
}

/// Iterator over the sampled spectra, rejected samples skipped.
pub fn spectra(cfg: &McConfig) -> impl Iterator<Item = Vec<f64>> + '_ {
    (0..cfg.samples).filter_map(move |i| sample_spectrum(cfg, i))
}

#[derive(Clone, Default)]
struct Acc {
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
    count: u64,
    rejected: u64,
}

impl Acc {
    fn new(k_max: usize) -> Acc {
        Acc { sum: vec![0.0; k_max], sum_sq: vec![0.0; k_max], count: 0, rejected: 0 }
    }

    fn push(&mut self, lambdas: Option<Vec<f64>>) {
        let Some(l) = lambdas else {
            self.rejected += 1;
            return;
        };
        let sq: Vec<f64> = l.iter().map(|v| v * v).collect();
        let mut pow = sq.clone();
        for k in 0..self.sum.len() {
            let p: f64 = pow.iter().sum();
            self.sum[k] += p;
            self.sum_sq[k] += p * p;
            for (a, b) in pow.iter_mut().zip(&sq) {
                *a *= b;
            }
        }
        self.count += 1;
    }

    fn merge(mut self, other: &Acc) -> Acc {
        for k in 0..self.sum.len() {
            self.sum[k] += other.sum[k];
            self.sum_sq[k] += other.sum_sq[k];
        }
        self.count += other.count;
        self.rejected += other.rejected;
        self
    }
}

const CHUNK: u64 = 1 << 12;

/// Sample means and standard errors. Chunks are fixed and reduced in order,
/// so the result does not depend on the number of threads.
pub fn estimate(cfg: &McConfig) -> Result<McEstimate, McError> {
    cfg.validate()?;
    let chunks = cfg.samples.div_ceil(CHUNK);
    let parts: Vec<Acc> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = Acc::new(cfg.k_max);
            for i in c * CHUNK..((c + 1) * CHUNK).min(cfg.samples) {
                acc.push(sample_spectrum(cfg, i));
            }
            acc
        })
        .collect();
    let total = parts.iter().fold(Acc::new(cfg.k_max), |a, b| a.merge(b));
    let n = total.count as f64;
    let mean: Vec<f64> = total.sum.iter().map(|s| s / n).collect();
    let std_err = total
        .sum_sq
        .iter()
        .zip(&mean)
        .map(|(sq, m)| {
            if total.count < 2 {
                return f64::INFINITY;
            }
            let var = ((sq - n * m * m) / (n - 1.0)).max(0.0);
            (var / n).sqrt()
        })
        .collect();
    Ok(McEstimate { mean, std_err, samples: total.count, rejected: total.rejected })
}

#[derive(Clone, Debug, Serialize)]
pub struct ZRow {
    pub k: usize,
    pub exact: f64,
    pub mean: f64,
    pub std_err: f64,
    pub z: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct McReport {
    pub config: McConfig,
    pub estimate: McEstimate,
    pub rows: Vec<ZRow>,
}

impl McReport {
    pub fn max_abs_z(&self) -> f64 {
        self.rows.iter().map(|r| r.z.abs()).fold(0.0, f64::max)
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.rows.iter().all(|r| r.z.is_finite() && r.z.abs() < tol)
    }
}

/// z-scores of the simulation against exact moments, `moments[k - 1]` being
/// the polynomial for `sum lambda^(2k)`.
pub fn compare(cfg: &McConfig, moments: &[MomentPoly]) -> Result<McReport, McError> {
    let est = estimate(cfg)?;
    let mut rows = Vec::new();
    for k in 1..=cfg.k_max {
        let m = moments.iter().find(|m| m.k == k).ok_or(McError::MissingMoment(k))?;
        let exact = m.value.eval(cfg.n as f64, cfg.kappa, cfg.t);
        let (mean, se) = (est.mean[k - 1], est.std_err[k - 1]);
        rows.push(ZRow { k, exact, mean, std_err: se, z: (mean - exact) / se });
    }
    Ok(McReport { config: cfg.clone(), estimate: est, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, kappa: f64, samples: u64) -> McConfig {
        McConfig { n, kappa, t: 1.0, samples, seed: 7, k_max: 2 }
    }

    #[test]
    fn scale_at_one_point() {
        // a single Gaussian of variance T / kappa
        let c = McConfig { n: 1, kappa: 2.0, t: 3.0, samples: 1, seed: 0, k_max: 1 };
        assert!((c.scale().powi(2) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn streams_are_reproducible() {
        let c = cfg(4, 1.5, 10);
        assert_eq!(sample_spectrum(&c, 3), sample_spectrum(&c, 3));
        assert_ne!(sample_spectrum(&c, 3), sample_spectrum(&c, 4));
    }

    #[test]
    fn spectrum_is_finite() {
        let c = cfg(5, 0.75, 1);
        let l = sample_spectrum(&c, 0).unwrap();
        assert_eq!(l.len(), 5);
        assert!(l.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn rejects_bad_config() {
        assert!(cfg(0, 1.0, 1).validate().is_err());
        assert!(cfg(2, -1.0, 1).validate().is_err());
        assert!(cfg(2, 1.0, 0).validate().is_err());
    }
}
