//! The swirl block construction `sw(A, X) = [[AX, A], [XAX, XA]]`, its
//! iterates, and exact verification of the trace identities it satisfies:
//!
//! * `tr(sw(A,X)^k) = 2^k tr((AX)^k)` for any A, X;
//! * `tr(sw^l(A,X)^k) = 2^{kl} tr((AX)^k)` when `X^2 = I`;
//! * `tr((S S^T)^k) = 2^{2k} tr((A A^T)^k)` for `S = sw(A,X)` with X a
//!   permutation matrix.
//!
//! Verification computes matrix powers by repeated multiplication so the
//! check never routes through the eigensolver it is meant to corroborate.
//! The identities are exact in exact arithmetic, so integer-valued inputs
//! are held to exact equality whenever every intermediate stays inside the
//! integer range of f64.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Relative error below which a floating-point identity check passes.
pub const DEFAULT_TRACE_TOL: f64 = 1e-10;

/// Max |X^2 - I| tolerated by the iterated identities.
const INVOLUTION_TOL: f64 = 1e-12;

/// Last f64 magnitude at which products of integers are still exact.
const EXACT_INT_LIMIT: f64 = 4.503599627370496e15; // 2^52

/// A swirl matrix together with the provenance of its inputs.
#[derive(Clone, Debug)]
pub struct SwirlResult {
    pub matrix: DenseMatrix,
    pub a_ref: Option<String>,
    pub x_ref: Option<String>,
}

impl SwirlResult {
    /// Extracts block (bi, bj) of the 2x2 block layout, each N x N.
    pub fn block(&self, bi: usize, bj: usize) -> DenseMatrix {
        let half = self.matrix.n() / 2;
        DenseMatrix::from_fn(half, |i, j| self.matrix.get(bi * half + i, bj * half + j))
            .expect("block of a finite matrix is finite")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TraceIdentity {
    Swirl,
    IteratedSwirl,
    TransposeProduct,
}

/// Outcome of one identity check at one power.
#[derive(Clone, Debug, Serialize)]
pub struct TraceIdentityReport {
    pub identity: TraceIdentity,
    pub k: usize,
    /// Swirl depth; 1 except for the iterated identity.
    pub ell: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    /// True when the check holds: exact equality on the integer fast path,
    /// rel_err <= 1e-10 otherwise.
    pub passed: bool,
    /// Whether exact equality was required.
    pub exact_mode: bool,
}

impl TraceIdentityReport {
    fn new(identity: TraceIdentity, k: usize, ell: usize, lhs: f64, rhs: f64, exact: bool) -> Self {
        let abs_err = (lhs - rhs).abs();
        let rel_err = abs_err / rhs.abs().max(1.0);
        let passed = if exact {
            abs_err == 0.0
        } else {
            rel_err <= DEFAULT_TRACE_TOL
        };
        Self {
            identity,
            k,
            ell,
            lhs,
            rhs,
            abs_err,
            rel_err,
            passed,
            exact_mode: exact,
        }
    }

    pub fn passes_at(&self, tol: f64) -> bool {
        if self.exact_mode {
            self.abs_err == 0.0
        } else {
            self.rel_err <= tol
        }
    }
}

fn check_same_dim(a: &DenseMatrix, x: &DenseMatrix) -> Result<()> {
    if a.n() != x.n() {
        return Err(Error::DimensionMismatch {
            left_rows: a.n(),
            left_cols: a.n(),
            right_rows: x.n(),
            right_cols: x.n(),
        });
    }
    Ok(())
}

/// Assembles the 2N x 2N block matrix [[AX, A], [XAX, XA]].
pub(crate) fn swirl_matrix(a: &DenseMatrix, x: &DenseMatrix) -> Result<DenseMatrix> {
    check_same_dim(a, x)?;
    let n = a.n();
    let ax = a.mat_mul(x)?;
    let xa = x.mat_mul(a)?;
    let xax = x.mat_mul(&ax)?;
    DenseMatrix::from_fn(2 * n, |i, j| match (i < n, j < n) {
        (true, true) => ax.get(i, j),
        (true, false) => a.get(i, j - n),
        (false, true) => xax.get(i - n, j),
        (false, false) => xa.get(i - n, j - n),
    })
}

/// The swirl of two N x N matrices.
pub fn swirl(a: &DenseMatrix, x: &DenseMatrix) -> Result<SwirlResult> {
    Ok(SwirlResult {
        matrix: swirl_matrix(a, x)?,
        a_ref: a.label().map(str::to_owned),
        x_ref: x.label().map(str::to_owned),
    })
}

fn involution_deviation(x: &DenseMatrix) -> Result<f64> {
    let xx = x.mat_mul(x)?;
    let n = x.n();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((xx.get(i, j) - expect).abs());
        }
    }
    Ok(dev)
}

fn require_involution(x: &DenseMatrix) -> Result<()> {
    let dev = involution_deviation(x)?;
    if dev > INVOLUTION_TOL {
        return Err(Error::NotInvolution { max_dev: dev });
    }
    Ok(())
}

/// Anti-diagonal block doubling: X -> [[0, X], [X, 0]].
fn antidiagonal_double(x: &DenseMatrix) -> DenseMatrix {
    let n = x.n();
    DenseMatrix::from_fn(2 * n, |i, j| match (i < n, j < n) {
        (true, false) => x.get(i, j - n),
        (false, true) => x.get(i - n, j),
        _ => 0.0,
    })
    .expect("doubling preserves finiteness")
}

/// The l-fold swirl sw(...sw(sw(A, X), X_2)..., X_l), where X_k is the
/// anti-diagonal block matrix carrying 2^{k-1} copies of X. Requires
/// `X^2 = I`; the iterated identities are only proven there, so anything
/// else is refused rather than silently computed. Output dimension is
/// N * 2^l; the full tiling is materialized.
pub fn iterated_swirl(a: &DenseMatrix, x: &DenseMatrix, ell: usize) -> Result<DenseMatrix> {
    if ell == 0 {
        return Err(Error::InvalidArgument("iterated swirl needs l >= 1".into()));
    }
    check_same_dim(a, x)?;
    require_involution(x)?;
    let mut m = swirl_matrix(a, x)?;
    let mut xk = x.clone();
    for _ in 2..=ell {
        xk = antidiagonal_double(&xk);
        m = swirl_matrix(&m, &xk)?;
    }
    Ok(m)
}

/// tr(m^k) by repeated multiplication, tracking the largest intermediate
/// entry so callers can tell whether integer arithmetic stayed exact.
fn trace_of_power(m: &DenseMatrix, k: usize) -> Result<(f64, f64)> {
    let mut acc = m.clone();
    let mut max_seen = m.max_abs();
    for _ in 1..k {
        acc = acc.mat_mul(m)?;
        max_seen = max_seen.max(acc.max_abs());
    }
    Ok((acc.trace(), max_seen))
}

fn exact_mode(inputs_integer: bool, max_seen: f64, rhs_scale: f64) -> bool {
    inputs_integer && max_seen <= EXACT_INT_LIMIT && rhs_scale <= EXACT_INT_LIMIT
}

/// Checks tr(sw(A,X)^k) = 2^k tr((AX)^k).
pub fn verify_trace_identity(
    a: &DenseMatrix,
    x: &DenseMatrix,
    k: usize,
) -> Result<TraceIdentityReport> {
    if k == 0 {
        return Err(Error::InvalidArgument("trace identity needs k >= 1".into()));
    }
    check_same_dim(a, x)?;
    let s = swirl_matrix(a, x)?;
    let (lhs, lhs_max) = trace_of_power(&s, k)?;
    let ax = a.mat_mul(x)?;
    let (tr_ax, rhs_max) = trace_of_power(&ax, k)?;
    let rhs = 2f64.powi(k as i32) * tr_ax;
    let exact = exact_mode(
        a.is_integer_valued() && x.is_integer_valued(),
        lhs_max.max(rhs_max),
        rhs.abs(),
    );
    Ok(TraceIdentityReport::new(
        TraceIdentity::Swirl,
        k,
        1,
        lhs,
        rhs,
        exact,
    ))
}

/// Checks tr(sw^l(A,X)^k) = 2^{kl} tr((AX)^k); requires X^2 = I.
pub fn verify_iterated_trace_identity(
    a: &DenseMatrix,
    x: &DenseMatrix,
    k: usize,
    ell: usize,
) -> Result<TraceIdentityReport> {
    if k == 0 {
        return Err(Error::InvalidArgument("trace identity needs k >= 1".into()));
    }
    let m = iterated_swirl(a, x, ell)?;
    let (lhs, lhs_max) = trace_of_power(&m, k)?;
    let ax = a.mat_mul(x)?;
    let (tr_ax, rhs_max) = trace_of_power(&ax, k)?;
    let rhs = 2f64.powi((k * ell) as i32) * tr_ax;
    let exact = exact_mode(
        a.is_integer_valued() && x.is_integer_valued(),
        lhs_max.max(rhs_max),
        rhs.abs(),
    );
    Ok(TraceIdentityReport::new(
        TraceIdentity::IteratedSwirl,
        k,
        ell,
        lhs,
        rhs,
        exact,
    ))
}

fn require_permutation(x: &DenseMatrix) -> Result<()> {
    let n = x.n();
    let mut row_ones = vec![0usize; n];
    let mut col_ones = vec![0usize; n];
    for i in 0..n {
        for j in 0..n {
            let v = x.get(i, j);
            if v == 1.0 {
                row_ones[i] += 1;
                col_ones[j] += 1;
            } else if v != 0.0 {
                return Err(Error::NotPermutation);
            }
        }
    }
    if row_ones.iter().any(|&c| c != 1) || col_ones.iter().any(|&c| c != 1) {
        return Err(Error::NotPermutation);
    }
    Ok(())
}

/// Checks tr((S S^T)^k) = 2^{2k} tr((A A^T)^k) for S = sw(A,X), X a
/// permutation matrix.
pub fn verify_transpose_identity(
    a: &DenseMatrix,
    x: &DenseMatrix,
    k: usize,
) -> Result<TraceIdentityReport> {
    if k == 0 {
        return Err(Error::InvalidArgument("trace identity needs k >= 1".into()));
    }
    check_same_dim(a, x)?;
    require_permutation(x)?;
    let s = swirl_matrix(a, x)?;
    let sst = s.mat_mul(&s.transpose())?;
    let (lhs, lhs_max) = trace_of_power(&sst, k)?;
    let aat = a.mat_mul(&a.transpose())?;
    let (tr_aat, rhs_max) = trace_of_power(&aat, k)?;
    let rhs = 2f64.powi(2 * k as i32) * tr_aat;
    let exact = exact_mode(
        a.is_integer_valued() && x.is_integer_valued(),
        lhs_max.max(rhs_max),
        rhs.abs(),
    );
    Ok(TraceIdentityReport::new(
        TraceIdentity::TransposeProduct,
        k,
        1,
        lhs,
        rhs,
        exact,
    ))
}
