//! Empirical spectral measures and their reference laws.
//!
//! Eigenvalues of an ensemble draw are scaled by sqrt(c)/n, where `c` is the
//! number of eigenvalues that are not trivially zero for that pattern (N for
//! circulant rings, N for the 2N x 2N concentric even matrices whose rows
//! repeat). Pooled scaled spectra are compared against the symmetrized
//! Rayleigh density |x| e^{-x^2} via moments and the Kolmogorov-Smirnov
//! statistic.

use rayon::prelude::*;
use serde::Serialize;

use crate::ensembles::{EntryDistribution, PatternFamily, PatternSpec};
use crate::error::{Error, Result};
use crate::link;
use crate::matrix::{sym_eigenvalues, DenseMatrix};

/// Eigenvalues below `1e-8 * ||m||_inf` count as trivially zero.
pub const ZERO_EIG_REL_TOL: f64 = 1e-8;

/// Histogram export defaults: 81 uniform bins on [-4, 4]. The reference
/// density carries less than 1e-6 of its mass outside that window.
pub const HISTOGRAM_BINS: usize = 81;
pub const HISTOGRAM_RANGE: (f64, f64) = (-4.0, 4.0);

/// Pooled scaled eigenvalues from a Monte Carlo run.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralSample {
    /// All pooled scaled eigenvalues, ascending; length = c * trials.
    pub scaled_eigs: Vec<f64>,
    /// Matrix dimension of each draw.
    pub n: usize,
    /// Nontrivial eigenvalue count per draw.
    pub c: usize,
    pub trials: u64,
    pub ensemble: PatternSpec,
    pub seed: u64,
    /// Trials whose numerical rank disagreed with `c` (ties at the zero
    /// threshold are reported here rather than silently resolved).
    pub flagged_trials: u64,
}

/// Number of nontrivial eigenvalues for one draw of the given pattern.
///
/// Circulant rings and the exchange matrix have full nontrivial spectrum N.
/// Concentric even matrices (2N x 2N) repeat half their rows, leaving N.
/// For (s,t)-link patterns the count is the generic pattern rank, computed
/// once by exact modular elimination.
pub fn nontrivial_eigenvalue_count(spec: &PatternSpec) -> usize {
    match spec.family {
        PatternFamily::CirculantHankel
        | PatternFamily::CirculantToeplitz
        | PatternFamily::Exchange
        | PatternFamily::ConcentricEven => spec.n,
        PatternFamily::LinkST => {
            let (count, labels) =
                link::position_classes(spec.n, spec.s, spec.t, spec.symmetric_link);
            link::generic_pattern_rank(spec.n, &labels, count, 0x5eed)
        }
    }
}

/// The `c` largest-magnitude eigenvalues of a symmetric matrix, scaled by
/// sqrt(c)/n and sorted ascending.
pub fn scaled_spectrum(m: &DenseMatrix, c: usize) -> Result<Vec<f64>> {
    if c > m.n() {
        return Err(Error::InvalidArgument(format!(
            "c = {c} exceeds dimension {}",
            m.n()
        )));
    }
    let eigs = sym_eigenvalues(m, m.default_symmetry_tol())?;
    Ok(scale_top_eigs(&eigs, c, m.n()))
}

fn scale_top_eigs(eigs: &[f64], c: usize, n: usize) -> Vec<f64> {
    let mut by_magnitude: Vec<f64> = eigs.to_vec();
    by_magnitude.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    let factor = (c as f64).sqrt() / n as f64;
    let mut top: Vec<f64> = by_magnitude[..c].iter().map(|v| v * factor).collect();
    top.sort_by(f64::total_cmp);
    top
}

/// Pools scaled spectra of `trials` independent draws. Trial `t` draws from
/// the distribution's stream `t`, so the result is deterministic given
/// (spec, dist, trials) and independent of scheduling.
pub fn run_monte_carlo(
    spec: &PatternSpec,
    dist: &EntryDistribution,
    trials: u64,
) -> Result<SpectralSample> {
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let c = nontrivial_eigenvalue_count(spec);
    let per_trial: Vec<(Vec<f64>, bool)> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<(Vec<f64>, bool)> {
            let m = spec.build(dist, trial).map_err(|e| Error::Trial {
                trial,
                source: Box::new(e),
            })?;
            let eigs = sym_eigenvalues(&m, m.default_symmetry_tol()).map_err(|e| Error::Trial {
                trial,
                source: Box::new(e),
            })?;
            let zero_tol = ZERO_EIG_REL_TOL * m.norm_inf().max(1.0);
            let numerical_rank = eigs.iter().filter(|v| v.abs() > zero_tol).count();
            Ok((scale_top_eigs(&eigs, c, m.n()), numerical_rank != c))
        })
        .collect::<Result<_>>()?;

    let flagged_trials = per_trial.iter().filter(|(_, flag)| *flag).count() as u64;
    let mut scaled_eigs: Vec<f64> = per_trial.into_iter().flat_map(|(v, _)| v).collect();
    scaled_eigs.sort_by(f64::total_cmp);

    Ok(SpectralSample {
        scaled_eigs,
        n: spec.matrix_dim(),
        c,
        trials,
        ensemble: spec.clone(),
        seed: dist.seed,
        flagged_trials,
    })
}

impl SpectralSample {
    /// Monte Carlo estimate of the k-th spectral moment:
    /// the mean of x^k over the pooled scaled eigenvalues.
    pub fn moment(&self, k: usize) -> Result<f64> {
        sample_moment_of(&self.scaled_eigs, k)
    }

    pub fn ks_statistic(&self, d: &ReferenceDistribution) -> Result<f64> {
        ks_statistic_sorted(&self.scaled_eigs, d)
    }
}

pub fn sample_moment(s: &SpectralSample, k: usize) -> Result<f64> {
    s.moment(k)
}

fn sample_moment_of(xs: &[f64], k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("moment order must be >= 1".into()));
    }
    if xs.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(xs.iter().map(|x| x.powi(k as i32)).sum::<f64>() / xs.len() as f64)
}

/// Kolmogorov-Smirnov distance between a sample and a reference CDF,
/// using both one-sided limits of the empirical step function.
pub fn ks_statistic(s: &SpectralSample, d: &ReferenceDistribution) -> Result<f64> {
    s.ks_statistic(d)
}

fn ks_statistic_sorted(sorted: &[f64], d: &ReferenceDistribution) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = sorted.len() as f64;
    let mut sup: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = d.cdf(x);
        let below = i as f64 / n;
        let above = (i + 1) as f64 / n;
        sup = sup.max((below - f).abs()).max((above - f).abs());
    }
    Ok(sup)
}

/// Reference spectral laws with closed-form density, CDF, and moments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ReferenceDistribution {
    /// Density |x| e^{-x^2}; even moments m_{2k} = k!.
    SymmetrizedRayleigh,
    /// Weibull(lambda, shape) reflected to the whole line; even moments
    /// lambda^{2n} Gamma(2n/shape + 1).
    SymmetrizedWeibull { lambda: f64, shape: f64 },
}

impl ReferenceDistribution {
    pub fn symmetrized_weibull(lambda: f64, shape: f64) -> Result<Self> {
        if !(lambda > 0.0) || !(shape > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "Weibull parameters must be positive, got lambda={lambda}, shape={shape}"
            )));
        }
        Ok(ReferenceDistribution::SymmetrizedWeibull { lambda, shape })
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            ReferenceDistribution::SymmetrizedRayleigh => x.abs() * (-x * x).exp(),
            ReferenceDistribution::SymmetrizedWeibull { lambda, shape } => {
                let a = x.abs();
                if a == 0.0 && shape < 1.0 {
                    return f64::INFINITY;
                }
                let z = a / lambda;
                0.5 * (shape / lambda) * z.powf(shape - 1.0) * (-z.powf(shape)).exp()
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            ReferenceDistribution::SymmetrizedRayleigh => {
                let half_tail = 0.5 * (-x * x).exp();
                if x >= 0.0 {
                    1.0 - half_tail
                } else {
                    half_tail
                }
            }
            ReferenceDistribution::SymmetrizedWeibull { lambda, shape } => {
                let half_tail = 0.5 * (-(x.abs() / lambda).powf(shape)).exp();
                if x >= 0.0 {
                    1.0 - half_tail
                } else {
                    half_tail
                }
            }
        }
    }

    /// Exact moment of order k. Odd moments vanish by symmetry.
    pub fn moment(&self, k: usize) -> f64 {
        if k % 2 == 1 {
            return 0.0;
        }
        match *self {
            ReferenceDistribution::SymmetrizedRayleigh => {
                // m_{2j} = j!
                (1..=k / 2).map(|i| i as f64).product()
            }
            ReferenceDistribution::SymmetrizedWeibull { lambda, shape } => {
                lambda.powi(k as i32) * statrs::function::gamma::gamma(k as f64 / shape + 1.0)
            }
        }
    }
}

/// One exported histogram bin; `density` integrates to 1 over the in-range
/// sample.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HistogramBin {
    pub left: f64,
    pub right: f64,
    pub density: f64,
}

/// Equal-width histogram normalized to a density over the values that fall
/// inside [lo, hi]; the out-of-range count is returned alongside.
pub fn histogram(values: &[f64], bins: usize, lo: f64, hi: f64) -> (Vec<HistogramBin>, usize) {
    assert!(bins > 0 && hi > lo);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    let mut outside = 0usize;
    for &v in values {
        if v < lo || v > hi || v.is_nan() {
            outside += 1;
            continue;
        }
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let in_range: u64 = counts.iter().sum();
    let norm = if in_range == 0 {
        0.0
    } else {
        1.0 / (in_range as f64 * width)
    };
    let out = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| HistogramBin {
            left: lo + i as f64 * width,
            right: lo + (i + 1) as f64 * width,
            density: c as f64 * norm,
        })
        .collect();
    (out, outside)
}
