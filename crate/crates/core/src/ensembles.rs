//! Seeded entry distributions and constructors for every patterned matrix
//! family: circulant Hankel/Toeplitz rings, the exchange matrix, concentric
//! even (swirl) matrices, and general (s,t)-link patterns.
//!
//! Reproducibility contract: a given `(kind, seed)` always produces the
//! identical value stream, and trial `t` of a Monte Carlo run draws from the
//! independent ChaCha stream with id `t`, so parallel runs never share RNG
//! state.

use num::{BigInt, BigRational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link;
use crate::matrix::DenseMatrix;
use crate::swirl;

/// The entry laws used throughout: mean 0, variance 1, all moments finite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistributionKind {
    StandardNormal,
    Rademacher,
}

impl DistributionKind {
    /// Exact even moments p_2, p_4, ..., p_{2m}.
    /// Normal: (2m-1)!!. Rademacher: identically 1.
    pub fn even_moments(self, count: usize) -> Vec<BigRational> {
        match self {
            DistributionKind::StandardNormal => {
                let mut out = Vec::with_capacity(count);
                let mut acc = BigInt::from(1);
                for m in 1..=count {
                    acc *= BigInt::from(2 * m as u64 - 1);
                    out.push(BigRational::from(acc.clone()));
                }
                out
            }
            DistributionKind::Rademacher => {
                vec![BigRational::from(BigInt::from(1)); count]
            }
        }
    }

    /// Moments p_1, p_2, ..., p_power (odd moments are zero for both laws).
    pub fn moments_through(self, power: usize) -> Vec<BigRational> {
        let even = self.even_moments(power / 2 + 1);
        (1..=power)
            .map(|k| {
                if k % 2 == 0 {
                    even[k / 2 - 1].clone()
                } else {
                    BigRational::from(BigInt::from(0))
                }
            })
            .collect()
    }
}

/// A seeded source of i.i.d. reals with mean 0 and variance 1.
#[derive(Clone, Debug, PartialEq)]
pub struct EntryDistribution {
    pub kind: DistributionKind,
    pub seed: u64,
    /// Exact even moments p_2, p_4, ... (p_2 is always 1).
    pub even_moments: Vec<BigRational>,
}

impl EntryDistribution {
    pub fn new(kind: DistributionKind, seed: u64) -> Self {
        Self {
            kind,
            seed,
            even_moments: kind.even_moments(8),
        }
    }

    pub fn standard_normal(seed: u64) -> Self {
        Self::new(DistributionKind::StandardNormal, seed)
    }

    pub fn rademacher(seed: u64) -> Self {
        Self::new(DistributionKind::Rademacher, seed)
    }

    fn rng_for_stream(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self.kind {
            DistributionKind::StandardNormal => rng.sample(StandardNormal),
            DistributionKind::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    /// The base deterministic stream (stream id 0).
    pub fn sample_sequence(&self, count: usize) -> Vec<f64> {
        self.sample_trial_sequence(0, count)
    }

    /// The deterministic stream for Monte Carlo trial `trial`.
    pub fn sample_trial_sequence(&self, trial: u64, count: usize) -> Vec<f64> {
        let mut rng = self.rng_for_stream(trial);
        (0..count).map(|_| self.draw(&mut rng)).collect()
    }
}

/// The patterned matrix families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatternFamily {
    CirculantHankel,
    CirculantToeplitz,
    Exchange,
    ConcentricEven,
    LinkST,
}

/// Which patterned ensemble to draw from, and at what size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternSpec {
    pub family: PatternFamily,
    /// Base dimension N. Concentric even matrices are 2N x 2N.
    pub n: usize,
    pub s: i64,
    pub t: i64,
    pub symmetric_link: bool,
}

impl PatternSpec {
    pub fn new(family: PatternFamily, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("pattern dimension must be >= 1".into()));
        }
        Ok(Self {
            family,
            n,
            s: 0,
            t: 0,
            symmetric_link: false,
        })
    }

    /// An (s,t)-link pattern; (s, t) are reduced mod N and must not both
    /// vanish.
    pub fn link(n: usize, s: i64, t: i64, symmetric_link: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("pattern dimension must be >= 1".into()));
        }
        let s = s.rem_euclid(n as i64);
        let t = t.rem_euclid(n as i64);
        if s == 0 && t == 0 {
            return Err(Error::DegenerateLink);
        }
        Ok(Self {
            family: PatternFamily::LinkST,
            n,
            s,
            t,
            symmetric_link,
        })
    }

    /// Matrix dimension of a draw.
    pub fn matrix_dim(&self) -> usize {
        match self.family {
            PatternFamily::ConcentricEven => 2 * self.n,
            _ => self.n,
        }
    }

    /// Number of fresh i.i.d. values one draw consumes.
    pub fn value_count(&self) -> usize {
        match self.family {
            PatternFamily::CirculantHankel
            | PatternFamily::CirculantToeplitz
            | PatternFamily::ConcentricEven => self.n,
            PatternFamily::Exchange => 0,
            PatternFamily::LinkST => {
                let (count, _) =
                    link::position_classes(self.n, self.s, self.t, self.symmetric_link);
                count
            }
        }
    }

    /// Builds the matrix for one Monte Carlo trial.
    pub fn build(&self, dist: &EntryDistribution, trial: u64) -> Result<DenseMatrix> {
        let values = dist.sample_trial_sequence(trial, self.value_count());
        self.build_from_values(&values)
    }

    /// Builds the matrix from explicit values (must supply `value_count`).
    pub fn build_from_values(&self, values: &[f64]) -> Result<DenseMatrix> {
        match self.family {
            PatternFamily::CirculantHankel => build_circulant_hankel(values),
            PatternFamily::CirculantToeplitz => build_circulant_toeplitz(values),
            PatternFamily::Exchange => build_exchange(self.n),
            PatternFamily::ConcentricEven => build_concentric_even(values),
            PatternFamily::LinkST => build_link_matrix(self, values),
        }
    }
}

/// Circulant Hankel matrix: entry(i, j) = values[(i + j) mod N].
pub fn build_circulant_hankel(values: &[f64]) -> Result<DenseMatrix> {
    let n = values.len();
    if n == 0 {
        return Err(Error::EmptyInput("circulant Hankel needs at least one value"));
    }
    DenseMatrix::from_fn(n, |i, j| values[(i + j) % n])
        .map(|m| m.with_label(format!("circulant-hankel n={n}")))
}

/// Circulant Toeplitz matrix: entry(i, j) = values[(j - i) mod N].
pub fn build_circulant_toeplitz(values: &[f64]) -> Result<DenseMatrix> {
    let n = values.len();
    if n == 0 {
        return Err(Error::EmptyInput("circulant Toeplitz needs at least one value"));
    }
    DenseMatrix::from_fn(n, |i, j| {
        values[(j as i64 - i as i64).rem_euclid(n as i64) as usize]
    })
    .map(|m| m.with_label(format!("circulant-toeplitz n={n}")))
}

/// Exchange matrix J: ones on the antidiagonal. J^2 = I.
pub fn build_exchange(n: usize) -> Result<DenseMatrix> {
    if n == 0 {
        return Err(Error::EmptyInput("exchange matrix needs n >= 1"));
    }
    DenseMatrix::from_fn(n, |i, j| if i + j == n - 1 { 1.0 } else { 0.0 })
        .map(|m| m.with_label(format!("exchange n={n}")))
}

/// Concentric even matrix (2N x 2N): the swirl of a circulant Toeplitz ring
/// with the exchange matrix. Centrosymmetric; every ring value appears
/// exactly 4N times.
pub fn build_concentric_even(values: &[f64]) -> Result<DenseMatrix> {
    let n = values.len();
    if n == 0 {
        return Err(Error::EmptyInput("concentric even needs at least one value"));
    }
    let a = build_circulant_toeplitz(values)?;
    let j = build_exchange(n)?;
    Ok(swirl::swirl_matrix(&a, &j)?.with_label(format!("concentric-even n={n}")))
}

/// Matrix for an (s,t)-link pattern: one fresh value per position class,
/// with class labels exactly as produced by [`link::position_classes`].
pub fn build_link_matrix(spec: &PatternSpec, values: &[f64]) -> Result<DenseMatrix> {
    if spec.family != PatternFamily::LinkST {
        return Err(Error::InvalidArgument(
            "build_link_matrix requires a LinkST pattern".into(),
        ));
    }
    if spec.s.rem_euclid(spec.n as i64) == 0 && spec.t.rem_euclid(spec.n as i64) == 0 {
        return Err(Error::DegenerateLink);
    }
    let n = spec.n;
    let (count, labels) = link::position_classes(n, spec.s, spec.t, spec.symmetric_link);
    if values.len() < count {
        return Err(Error::InvalidArgument(format!(
            "link pattern needs {count} values, got {}",
            values.len()
        )));
    }
    DenseMatrix::from_fn(n, |i, j| values[labels[i * n + j] as usize]).map(|m| {
        m.with_label(format!(
            "link n={n} s={} t={} symmetric={}",
            spec.s, spec.t, spec.symmetric_link
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rademacher_support_and_determinism() {
        let d = EntryDistribution::rademacher(99);
        let xs = d.sample_sequence(4);
        assert!(xs.iter().all(|&v| v == 1.0 || v == -1.0));
        assert_eq!(xs, d.sample_sequence(4));
        // Different trials get different streams.
        assert_ne!(d.sample_trial_sequence(1, 64), d.sample_trial_sequence(2, 64));
    }

    #[test]
    fn normal_stream_deterministic() {
        let d = EntryDistribution::standard_normal(7);
        assert_eq!(d.sample_sequence(128), d.sample_sequence(128));
    }

    #[test]
    fn normal_moments_within_clt_bands() {
        let d = EntryDistribution::standard_normal(123);
        let xs = d.sample_sequence(1_000_000);
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        // 5-sigma CLT bands around 0 and 1.
        assert!(mean.abs() < 5.0 / n.sqrt(), "mean {mean}");
        assert!((var - 1.0).abs() < 5.0 * 2f64.sqrt() / n.sqrt(), "var {var}");
        assert!((0.99..=1.01).contains(&var));
    }

    #[test]
    fn exact_even_moments() {
        let normal = DistributionKind::StandardNormal.even_moments(4);
        let expect: Vec<i64> = vec![1, 3, 15, 105];
        for (m, e) in normal.iter().zip(expect) {
            assert_eq!(*m, BigRational::from(BigInt::from(e)));
        }
        let rad = DistributionKind::Rademacher.even_moments(3);
        assert!(rad.iter().all(|m| *m == BigRational::from(BigInt::from(1))));
    }

    #[test]
    fn hankel_pattern() {
        let m = build_circulant_hankel(&[10.0, 20.0, 30.0]).unwrap();
        let expect = DenseMatrix::from_rows(&[
            &[10.0, 20.0, 30.0],
            &[20.0, 30.0, 10.0],
            &[30.0, 10.0, 20.0],
        ])
        .unwrap();
        assert_eq!(m.as_slice(), expect.as_slice());

        let single = build_circulant_hankel(&[5.0]).unwrap();
        assert_eq!(single.as_slice(), &[5.0]);

        let ind = build_circulant_hankel(&[1.0, 0.0, 0.0]).unwrap();
        let expect = DenseMatrix::from_rows(&[
            &[1.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0],
            &[0.0, 1.0, 0.0],
        ])
        .unwrap();
        assert_eq!(ind.as_slice(), expect.as_slice());
    }

    #[test]
    fn hankel_always_symmetric() {
        let d = EntryDistribution::standard_normal(3);
        for n in 1..=24 {
            let m = build_circulant_hankel(&d.sample_trial_sequence(n as u64, n)).unwrap();
            assert_eq!(m.symmetry_deviation(), 0.0);
        }
    }

    #[test]
    fn toeplitz_pattern() {
        let m = build_circulant_toeplitz(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let expect = DenseMatrix::from_rows(&[
            &[1.0, 2.0, 3.0, 4.0],
            &[4.0, 1.0, 2.0, 3.0],
            &[3.0, 4.0, 1.0, 2.0],
            &[2.0, 3.0, 4.0, 1.0],
        ])
        .unwrap();
        assert_eq!(m.as_slice(), expect.as_slice());
        assert_eq!(build_circulant_toeplitz(&[9.0]).unwrap().as_slice(), &[9.0]);
        assert!(build_circulant_toeplitz(&[]).is_err());
    }

    #[test]
    fn toeplitz_times_exchange_is_hankel() {
        // A*J is a circulant Hankel matrix on the reversed ring.
        let d = EntryDistribution::standard_normal(17);
        for n in 1..=8 {
            let v = d.sample_trial_sequence(n as u64, n);
            let a = build_circulant_toeplitz(&v).unwrap();
            let j = build_exchange(n).unwrap();
            let prod = a.mat_mul(&j).unwrap();
            let reindexed: Vec<f64> = (0..n)
                .map(|m| v[(n as i64 - 1 - m as i64).rem_euclid(n as i64) as usize])
                .collect();
            let hankel = build_circulant_hankel(&reindexed).unwrap();
            assert_eq!(prod.as_slice(), hankel.as_slice());
        }
    }

    #[test]
    fn exchange_basics() {
        let j2 = build_exchange(2).unwrap();
        assert_eq!(j2.as_slice(), &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(build_exchange(1).unwrap().as_slice(), &[1.0]);
        let j3 = build_exchange(3).unwrap();
        assert_eq!(
            j3.mat_mul(&j3).unwrap().as_slice(),
            DenseMatrix::identity(3).as_slice()
        );
        assert!(build_exchange(0).is_err());
    }

    #[test]
    fn concentric_even_small() {
        let m = build_concentric_even(&[4.0]).unwrap();
        assert_eq!(m.as_slice(), &[4.0, 4.0, 4.0, 4.0]);

        let m = build_concentric_even(&[1.0, 2.0]).unwrap();
        let expect = DenseMatrix::from_rows(&[
            &[2.0, 1.0, 1.0, 2.0],
            &[1.0, 2.0, 2.0, 1.0],
            &[1.0, 2.0, 2.0, 1.0],
            &[2.0, 1.0, 1.0, 2.0],
        ])
        .unwrap();
        assert_eq!(m.as_slice(), expect.as_slice());
    }

    #[test]
    fn concentric_even_is_centrosymmetric_with_4n_copies() {
        let d = EntryDistribution::standard_normal(5);
        for n in [1usize, 2, 3, 4, 8] {
            let v = d.sample_trial_sequence(n as u64, n);
            let m = build_concentric_even(&v).unwrap();
            let dim = 2 * n;
            for i in 0..dim {
                for j in 0..dim {
                    assert_eq!(m.get(i, j), m.get(dim - 1 - i, dim - 1 - j));
                }
            }
            for &val in &v {
                let count = m.as_slice().iter().filter(|&&x| x == val).count();
                assert_eq!(count, 4 * n);
            }
        }
    }

    /// The 8x8 concentric even matrix built from (x3, x0, x1, x2) reproduces
    /// the canonical ring layout: entry classes match position by position.
    #[test]
    fn concentric_even_matches_ring_display() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let m = build_concentric_even(&[x[3], x[0], x[1], x[2]]).unwrap();
        let display: [[usize; 8]; 8] = [
            [2, 1, 0, 3, 3, 0, 1, 2],
            [1, 0, 3, 2, 2, 3, 0, 1],
            [0, 3, 2, 1, 1, 2, 3, 0],
            [3, 2, 1, 0, 0, 1, 2, 3],
            [3, 2, 1, 0, 0, 1, 2, 3],
            [0, 3, 2, 1, 1, 2, 3, 0],
            [1, 0, 3, 2, 2, 3, 0, 1],
            [2, 1, 0, 3, 3, 0, 1, 2],
        ];
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(m.get(i, j), x[display[i][j]], "at ({i},{j})");
            }
        }
    }

    #[test]
    fn link_matrix_matches_named_patterns() {
        // (1,1) is exactly the circulant Hankel pattern.
        let d = EntryDistribution::standard_normal(11);
        for n in [2usize, 3, 5, 8] {
            let spec = PatternSpec::link(n, 1, 1, false).unwrap();
            let v = d.sample_trial_sequence(n as u64, spec.value_count());
            let m = build_link_matrix(&spec, &v).unwrap();
            let hankel = build_circulant_hankel(&v[..n]).unwrap();
            // Same equality pattern: entries equal exactly when ring indices match.
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            assert_eq!(
                                m.get(i, j) == m.get(k, l),
                                hankel.get(i, j) == hankel.get(k, l)
                            );
                        }
                    }
                }
            }
        }
        // (1, N-1) is the circulant Toeplitz pattern.
        for n in [3usize, 4, 6] {
            let spec = PatternSpec::link(n, 1, n as i64 - 1, false).unwrap();
            let v = d.sample_trial_sequence(n as u64, spec.value_count());
            let m = build_link_matrix(&spec, &v).unwrap();
            let toep = build_circulant_toeplitz(&v[..n]).unwrap();
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            assert_eq!(
                                m.get(i, j) == m.get(k, l),
                                toep.get(i, j) == toep.get(k, l)
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn link_matrix_1_2_has_four_values() {
        let spec = PatternSpec::link(4, 1, 2, false).unwrap();
        assert_eq!(spec.value_count(), 4);
        let v = [1.0, 2.0, 3.0, 4.0];
        let m = build_link_matrix(&spec, &v).unwrap();
        let mut distinct: Vec<f64> = m.as_slice().to_vec();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        assert_eq!(distinct.len(), 4);
        // Each class covers N^2 / 4 = 4 positions.
        for &val in &v {
            assert_eq!(m.as_slice().iter().filter(|&&x| x == val).count(), 4);
        }
    }

    #[test]
    fn degenerate_link_rejected() {
        assert!(matches!(
            PatternSpec::link(4, 0, 0, false),
            Err(Error::DegenerateLink)
        ));
        assert!(matches!(
            PatternSpec::link(4, 4, 8, true),
            Err(Error::DegenerateLink)
        ));
    }

    #[test]
    fn pattern_build_deterministic() {
        let d = EntryDistribution::rademacher(21);
        let spec = PatternSpec::new(PatternFamily::CirculantHankel, 16).unwrap();
        let a = spec.build(&d, 3).unwrap();
        let b = spec.build(&d, 3).unwrap();
        assert_eq!(a.as_slice(), b.as_slice());
        let c = spec.build(&d, 4).unwrap();
        assert_ne!(a.as_slice(), c.as_slice());
    }

    #[test]
    fn pattern_spec_json_roundtrip() {
        let spec = PatternSpec::link(12, 3, 5, true).unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        let back: PatternSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(spec, back);
    }
}
