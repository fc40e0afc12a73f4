//! Exact limiting spectral moments by pair-partition combinatorics.
//!
//! The 2k-th limiting moment of the circulant Hankel ensemble counts the
//! perfect matchings of the 2k trace factors whose index-congruence system
//! has the maximal nullity k+1; each such matching contributes exactly 1 and
//! they are precisely the odd-even matchings, k! of them. Everything here
//! runs over exact integers or rationals — the whole point of the module is
//! that the limit values carry no floating-point error.
//!
//! A finite-N oracle evaluates the expected trace of any power by direct
//! summation over all index tuples, giving an exact rational to validate the
//! counting against Monte Carlo at small N.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// Full matching enumeration cap: (2k-1)!! = 10395 at k = 6.
pub const MAX_MATCHING_K: usize = 6;
/// Odd-even counting cap; the count is k! so enumeration stays tiny.
pub const MAX_ODD_EVEN_K: usize = 8;
/// Tuple budget for the finite-N oracle.
pub const MAX_ORACLE_TUPLES: u64 = 100_000_000;

/// A perfect matching of positions {1, ..., 2k}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    k: usize,
    /// Pairs (a, b) with a < b, sorted by first element.
    pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// True when every pair joins an odd position to an even one.
    pub fn is_odd_even(&self) -> bool {
        self.pairs.iter().all(|(a, b)| (a + b) % 2 == 1)
    }

    /// The involution on {0, ..., 2k-1} swapping each pair.
    pub fn as_involution(&self) -> Vec<usize> {
        let mut pi: Vec<usize> = (0..2 * self.k).collect();
        for &(a, b) in &self.pairs {
            pi[a - 1] = b - 1;
            pi[b - 1] = a - 1;
        }
        pi
    }
}

impl std::fmt::Display for Matching {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (a, b) in &self.pairs {
            write!(f, "({a},{b})")?;
        }
        Ok(())
    }
}

/// All (2k-1)!! perfect matchings of {1, ..., 2k} in canonical order: the
/// smallest unmatched position is always paired first, partners ascending.
pub fn enumerate_matchings(k: usize) -> Result<Vec<Matching>> {
    if k == 0 || k > MAX_MATCHING_K {
        return Err(Error::BudgetExceeded {
            what: "matching enumeration order k",
            requested: k as u64,
            limit: MAX_MATCHING_K as u64,
        });
    }
    let mut out = Vec::new();
    let mut used = vec![false; 2 * k + 1];
    let mut pairs = Vec::with_capacity(k);
    enumerate_rec(k, &mut used, &mut pairs, &mut out, |_| true);
    Ok(out)
}

fn enumerate_rec(
    k: usize,
    used: &mut [bool],
    pairs: &mut Vec<(usize, usize)>,
    out: &mut Vec<Matching>,
    admissible: impl Fn(&(usize, usize)) -> bool + Copy,
) {
    let Some(a) = (1..=2 * k).find(|&p| !used[p]) else {
        out.push(Matching {
            k,
            pairs: pairs.clone(),
        });
        return;
    };
    used[a] = true;
    for b in a + 1..=2 * k {
        if used[b] || !admissible(&(a, b)) {
            continue;
        }
        used[b] = true;
        pairs.push((a, b));
        enumerate_rec(k, used, pairs, out, admissible);
        pairs.pop();
        used[b] = false;
    }
    used[a] = false;
}

/// Number of matchings pairing odd positions to even positions only.
/// Enumerates just the admissible branches, so the cap is higher than for
/// the full enumeration.
pub fn count_odd_even_matchings(k: usize) -> Result<u64> {
    if k == 0 || k > MAX_ODD_EVEN_K {
        return Err(Error::BudgetExceeded {
            what: "odd-even matching order k",
            requested: k as u64,
            limit: MAX_ODD_EVEN_K as u64,
        });
    }
    let mut out = Vec::new();
    let mut used = vec![false; 2 * k + 1];
    let mut pairs = Vec::with_capacity(k);
    enumerate_rec(k, &mut used, &mut pairs, &mut out, |&(a, b)| (a + b) % 2 == 1);
    Ok(out.len() as u64)
}

/// The index-congruence system of a matching.
///
/// Trace factor p carries the entry class determined by positions p and p+1
/// (cyclically), so matching factors a and b imposes the row
/// e_a + e_{a+1} - e_b - e_{b+1} on the 2k index variables.
#[derive(Clone, Debug)]
pub struct EquationSystem {
    pub matching: Matching,
    pub n_cols: usize,
    pub matrix: IntMatrix,
}

impl EquationSystem {
    pub fn nullity(&self) -> Result<usize> {
        self.matrix.exact_nullity()
    }
}

pub fn equation_matrix(m: &Matching) -> EquationSystem {
    let cols = 2 * m.k;
    let mut mat = IntMatrix::zeros(m.k, cols);
    for (row, &(a, b)) in m.pairs.iter().enumerate() {
        // Position p occupies column p-1; the cyclic successor of 2k is 1.
        let bump = |mat: &mut IntMatrix, pos: usize, delta: i128| {
            let col = (pos - 1) % cols;
            mat.set(row, col, mat.get(row, col) + delta);
        };
        bump(&mut mat, a, 1);
        bump(&mut mat, a + 1, 1);
        bump(&mut mat, b, -1);
        bump(&mut mat, b + 1, -1);
    }
    EquationSystem {
        matching: m.clone(),
        n_cols: cols,
        matrix: mat,
    }
}

/// The limiting even moment M_{2k}: the number of matchings whose equation
/// system attains the maximal nullity k+1. Each contributes exactly 1.
pub fn limit_even_moment(k: usize) -> Result<u64> {
    let matchings = enumerate_matchings(k)?;
    let target = k + 1;
    let mut count = 0u64;
    for m in &matchings {
        if equation_matrix(m).nullity()? == target {
            count += 1;
        }
    }
    Ok(count)
}

/// Cyclic band matrix with `s` on the diagonal and `t` on the superdiagonal
/// (wrapping at the bottom-left corner).
pub fn build_b(n: usize, s: i128, t: i128) -> Result<IntMatrix> {
    if n < 2 {
        return Err(Error::InvalidArgument(
            "cyclic band matrix needs n >= 2".into(),
        ));
    }
    let mut m = IntMatrix::zeros(n, n);
    for i in 0..n {
        m.set(i, i, s);
        m.set(i, (i + 1) % n, t);
    }
    Ok(m)
}

/// The difference system (I - P_pi) * B_n(s, t): row a of the result is
/// row_a(B) - row_{pi(a)}(B). The permutation is given as images
/// pi[a] in 0-based form.
pub fn m_pi(pi: &[usize], s: i128, t: i128) -> Result<IntMatrix> {
    let n = pi.len();
    let mut seen = vec![false; n];
    for &image in pi {
        if image >= n || seen[image] {
            return Err(Error::InvalidPermutation(format!(
                "images must form a permutation of 0..{n}"
            )));
        }
        seen[image] = true;
    }
    let b = build_b(n, s, t)?;
    let mut out = IntMatrix::zeros(n, n);
    for a in 0..n {
        for j in 0..n {
            out.set(a, j, b.get(a, j) - b.get(pi[a], j));
        }
    }
    Ok(out)
}

/// Exact expected trace of the `power`-th matrix power at finite N, by
/// summation over all N^power index tuples. `dist_moments[m-1]` is the m-th
/// moment of the entry law; the first two must be 0 and 1.
///
/// Factor j of a tuple (i_1, ..., i_power) carries the entry class
/// (i_j + i_{j+1}) mod N with cyclic wrap; a tuple contributes the product
/// of the moments of its class multiplicities.
pub fn finite_n_expected_trace(
    n: usize,
    power: usize,
    dist_moments: &[BigRational],
) -> Result<BigRational> {
    if n == 0 || power == 0 {
        return Err(Error::InvalidArgument(
            "oracle needs N >= 1 and power >= 1".into(),
        ));
    }
    let tuple_count = (n as u64).checked_pow(power as u32);
    if !tuple_count.is_some_and(|t| t <= MAX_ORACLE_TUPLES) {
        return Err(Error::BudgetExceeded {
            what: "oracle tuple count N^power",
            requested: tuple_count.unwrap_or(u64::MAX),
            limit: MAX_ORACLE_TUPLES,
        });
    }
    if dist_moments.len() < power {
        return Err(Error::MissingMoments {
            needed: power,
            given: dist_moments.len(),
        });
    }
    if !dist_moments[0].is_zero() {
        return Err(Error::InvalidArgument("first moment must be 0".into()));
    }
    if power >= 2 && !dist_moments[1].is_one() {
        return Err(Error::InvalidArgument("second moment must be 1".into()));
    }

    // Count tuples per multiplicity profile (the sorted multiset of class
    // multiplicities); only the profile decides the moment product.
    let profiles: BTreeMap<Vec<u8>, u64> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut local: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
            let mut tuple = vec![0usize; power];
            tuple[0] = first;
            let mut classes = vec![0u32; power];
            let mut sorted = vec![0u32; power];
            loop {
                for j in 0..power {
                    classes[j] = ((tuple[j] + tuple[(j + 1) % power]) % n) as u32;
                }
                sorted.copy_from_slice(&classes);
                sorted.sort_unstable();
                let mut profile: Vec<u8> = Vec::with_capacity(4);
                let mut run = 1u8;
                for idx in 1..power {
                    if sorted[idx] == sorted[idx - 1] {
                        run += 1;
                    } else {
                        profile.push(run);
                        run = 1;
                    }
                }
                profile.push(run);
                profile.sort_unstable();
                *local.entry(profile).or_insert(0) += 1;

                // Advance the odometer over positions 1..power.
                let mut pos = power - 1;
                loop {
                    if pos == 0 {
                        return local;
                    }
                    tuple[pos] += 1;
                    if tuple[pos] < n {
                        break;
                    }
                    tuple[pos] = 0;
                    pos -= 1;
                }
            }
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (key, count) in b {
                *a.entry(key).or_insert(0) += count;
            }
            a
        });

    let mut total = BigRational::zero();
    for (profile, count) in profiles {
        let mut term = BigRational::from(BigInt::from(count));
        for &mult in &profile {
            term *= dist_moments[mult as usize - 1].clone();
        }
        total += term;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::FromPrimitive;

    fn rat(v: i64) -> BigRational {
        BigRational::from_i64(v).unwrap()
    }

    /// Moments p_1..p_power of the standard normal: odd 0, p_{2m} = (2m-1)!!.
    fn gaussian_moments(power: usize) -> Vec<BigRational> {
        crate::ensembles::DistributionKind::StandardNormal.moments_through(power)
    }

    #[test]
    fn enumeration_counts_and_order() {
        let m1 = enumerate_matchings(1).unwrap();
        assert_eq!(m1.len(), 1);
        assert_eq!(m1[0].pairs(), &[(1, 2)]);

        let m2 = enumerate_matchings(2).unwrap();
        assert_eq!(m2.len(), 3);
        assert_eq!(m2[0].pairs(), &[(1, 2), (3, 4)]);
        assert_eq!(m2[1].pairs(), &[(1, 3), (2, 4)]);
        assert_eq!(m2[2].pairs(), &[(1, 4), (2, 3)]);

        assert_eq!(enumerate_matchings(3).unwrap().len(), 15);
        assert_eq!(enumerate_matchings(5).unwrap().len(), 945);
        assert!(enumerate_matchings(7).is_err());
        assert!(enumerate_matchings(0).is_err());
    }

    #[test]
    fn equation_rows_match_hand_computation() {
        let m2 = enumerate_matchings(2).unwrap();

        // {(1,3),(2,4)}: rows (1,1,-1,-1) and (-1,1,1,-1); nullity 2.
        let sys = equation_matrix(&m2[1]);
        assert_eq!(sys.matrix.row(0), &[1, 1, -1, -1]);
        assert_eq!(sys.matrix.row(1), &[-1, 1, 1, -1]);
        assert_eq!(sys.nullity().unwrap(), 2);

        // {(1,2),(3,4)}: rows (1,0,-1,0) and (-1,0,1,0); nullity 3.
        let sys = equation_matrix(&m2[0]);
        assert_eq!(sys.matrix.row(0), &[1, 0, -1, 0]);
        assert_eq!(sys.matrix.row(1), &[-1, 0, 1, 0]);
        assert_eq!(sys.nullity().unwrap(), 3);

        // k = 1: the single pair cancels to the zero row; nullity 2 = k+1.
        let m1 = enumerate_matchings(1).unwrap();
        let sys = equation_matrix(&m1[0]);
        assert_eq!(sys.matrix.row(0), &[0, 0]);
        assert_eq!(sys.nullity().unwrap(), 2);
    }

    #[test]
    fn equation_rows_sum_to_zero_with_small_entries() {
        for k in 1..=4 {
            for m in enumerate_matchings(k).unwrap() {
                let sys = equation_matrix(&m);
                for r in 0..k {
                    let row = sys.matrix.row(r);
                    assert_eq!(row.iter().sum::<i128>(), 0);
                    assert!(row.iter().all(|v| (-2..=2).contains(v)));
                }
            }
        }
    }

    #[test]
    fn limit_moments_are_factorials() {
        assert_eq!(limit_even_moment(1).unwrap(), 1);
        assert_eq!(limit_even_moment(2).unwrap(), 2);
        assert_eq!(limit_even_moment(3).unwrap(), 6);
        assert_eq!(limit_even_moment(4).unwrap(), 24);
    }

    #[test]
    fn odd_even_counts_are_factorials() {
        assert_eq!(count_odd_even_matchings(1).unwrap(), 1);
        assert_eq!(count_odd_even_matchings(2).unwrap(), 2);
        assert_eq!(count_odd_even_matchings(4).unwrap(), 24);
        assert_eq!(count_odd_even_matchings(8).unwrap(), 40320);
        assert!(count_odd_even_matchings(9).is_err());
    }

    #[test]
    fn nullity_ceiling_and_odd_even_characterization() {
        // Nullity never exceeds k+1, and the maximum is attained exactly by
        // the odd-even matchings.
        for k in 1..=4usize {
            for m in enumerate_matchings(k).unwrap() {
                let nullity = equation_matrix(&m).nullity().unwrap();
                assert!(nullity <= k + 1, "{m}: nullity {nullity}");
                assert_eq!(nullity == k + 1, m.is_odd_even(), "{m}");
            }
        }
    }

    #[test]
    fn matching_count_consistency() {
        for k in 1..=5usize {
            let all = enumerate_matchings(k).unwrap();
            let flagged = all.iter().filter(|m| m.is_odd_even()).count() as u64;
            assert_eq!(flagged, count_odd_even_matchings(k).unwrap());
            let factorial: u64 = (1..=k as u64).product();
            assert_eq!(flagged, factorial);
        }
    }

    #[test]
    fn band_matrix_layout() {
        let b = build_b(4, 7, -3).unwrap();
        assert_eq!(b.row(0), &[7, -3, 0, 0]);
        assert_eq!(b.row(1), &[0, 7, -3, 0]);
        assert_eq!(b.row(2), &[0, 0, 7, -3]);
        assert_eq!(b.row(3), &[-3, 0, 0, 7]);

        let b2 = build_b(2, 1, 1).unwrap();
        assert_eq!(b2.row(0), &[1, 1]);
        assert_eq!(b2.row(1), &[1, 1]);

        assert!(build_b(1, 1, 1).is_err());

        // Row sums vanish for (1, -1), dropping the rank by one.
        let b = build_b(4, 1, -1).unwrap();
        assert_eq!(b.exact_rank().unwrap(), 3);
    }

    #[test]
    fn m_pi_cases() {
        // Identity permutation: zero matrix, full nullity.
        let id: Vec<usize> = (0..4).collect();
        let m = m_pi(&id, 1, 1).unwrap();
        assert!((0..4).all(|i| m.row(i).iter().all(|&v| v == 0)));
        assert_eq!(m.exact_nullity().unwrap(), 4);

        // Double transposition (0<->2)(1<->3).
        let m = m_pi(&[2, 3, 0, 1], 1, 1).unwrap();
        assert_eq!(m.row(0), &[1, 1, -1, -1]);
        assert_eq!(m.row(1), &[-1, 1, 1, -1]);
        assert_eq!(m.row(2), &[-1, -1, 1, 1]);
        assert_eq!(m.row(3), &[1, -1, -1, 1]);
        assert_eq!(m.exact_nullity().unwrap(), 2);

        // The 4-cycle: the all-matched index system, nullity 2.
        let m = m_pi(&[1, 2, 3, 0], 1, 1).unwrap();
        assert_eq!(m.exact_nullity().unwrap(), 2);

        assert!(m_pi(&[0, 0, 1, 2], 1, 1).is_err());
        assert!(m_pi(&[0, 5, 1, 2], 1, 1).is_err());
    }

    #[test]
    fn equation_matrix_agrees_with_difference_system() {
        // The matching's equation system and (I - P_pi) B(1,1) for the
        // pair-swapping involution have the same nullity.
        for k in 1..=4usize {
            for m in enumerate_matchings(k).unwrap() {
                let via_rows = equation_matrix(&m).nullity().unwrap();
                let via_pi = m_pi(&m.as_involution(), 1, 1)
                    .unwrap()
                    .exact_nullity()
                    .unwrap();
                assert_eq!(via_rows, via_pi, "{m}");
            }
        }
    }

    #[test]
    fn oracle_power_two_is_n_squared() {
        for n in 1..=32usize {
            let got = finite_n_expected_trace(n, 2, &gaussian_moments(2)).unwrap();
            assert_eq!(got, rat((n * n) as i64), "N={n}");
        }
    }

    #[test]
    fn oracle_single_site() {
        // N=1: one tuple, one class of full multiplicity.
        let got = finite_n_expected_trace(1, 4, &gaussian_moments(4)).unwrap();
        assert_eq!(got, rat(3));
        let got = finite_n_expected_trace(1, 6, &gaussian_moments(6)).unwrap();
        assert_eq!(got, rat(15));
    }

    #[test]
    fn oracle_fourth_power_closed_form() {
        // E[tr(H^4)] = p4*N^2 + 2*N^2*(N-1) + N^2*[N even], derived by
        // splitting tuples over exact coincidence patterns of the four
        // entry classes.
        for n in 2..=16usize {
            let even = if n % 2 == 0 { 1 } else { 0 };
            let expect = (3 * n * n + 2 * n * n * (n - 1) + even * n * n) as i64;
            let got = finite_n_expected_trace(n, 4, &gaussian_moments(4)).unwrap();
            assert_eq!(got, rat(expect), "N={n}");
        }
        // Rademacher entries have p4 = 1.
        let rad = crate::ensembles::DistributionKind::Rademacher.moments_through(4);
        for n in [4usize, 6] {
            let expect = (n * n + 2 * n * n * (n - 1) + n * n) as i64;
            assert_eq!(finite_n_expected_trace(n, 4, &rad).unwrap(), rat(expect));
        }
    }

    #[test]
    fn oracle_odd_power_vanishes() {
        for n in [2usize, 5, 8] {
            let got = finite_n_expected_trace(n, 3, &gaussian_moments(3)).unwrap();
            assert!(got.is_zero(), "N={n}");
        }
    }

    #[test]
    fn oracle_guards() {
        assert!(matches!(
            finite_n_expected_trace(100, 5, &gaussian_moments(5)),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(matches!(
            finite_n_expected_trace(4, 6, &gaussian_moments(4)),
            Err(Error::MissingMoments { .. })
        ));
        let mut bad = gaussian_moments(4);
        bad[0] = rat(1);
        assert!(finite_n_expected_trace(4, 4, &bad).is_err());
    }

    #[test]
    fn oracle_normalized_trend_towards_factorial() {
        // M_4(N) = E[tr(H^4)]/N^3 approaches 2 from above as N grows.
        let mut prev = f64::INFINITY;
        for n in [4usize, 8, 12, 16] {
            let exact = finite_n_expected_trace(n, 4, &gaussian_moments(4)).unwrap();
            let val = rational_to_f64(&exact) / (n as f64).powi(3);
            assert!(val > 2.0 && val < prev, "N={n}: {val} (prev {prev})");
            prev = val;
        }
        assert!(prev - 2.0 <= 0.35);
    }

    fn rational_to_f64(r: &BigRational) -> f64 {
        use num::ToPrimitive;
        r.to_f64().unwrap()
    }
}
