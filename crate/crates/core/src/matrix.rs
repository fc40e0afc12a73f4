//! Dense real and exact integer matrix kernels.
//!
//! [`DenseMatrix`] is a square, row-major `f64` matrix whose constructors
//! reject non-finite entries. [`IntMatrix`] carries exact integers and
//! supports fraction-free (Bareiss) rank/nullity so that degree-of-freedom
//! counts never pass through floating point.

use crate::eigen;
use crate::error::{Error, Result};

/// A square matrix of reals with optional provenance label.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
    label: Option<String>,
}

impl DenseMatrix {
    /// Builds an `n x n` matrix from a row-major buffer.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "need {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            n,
            data,
            label: None,
        })
    }

    /// Builds an `n x n` matrix by evaluating `f(i, j)` at every position.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self::from_row_major(n, data)
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("rows must form a square matrix".into()));
        }
        Self::from_row_major(n, rows.iter().flat_map(|r| r.iter().copied()).collect())
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self {
            n,
            data,
            label: None,
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// Dimension (rows == cols).
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn transpose(&self) -> DenseMatrix {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j];
            }
        }
        Self {
            n,
            data,
            label: None,
        }
    }

    /// Induced infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest deviation from symmetry, `max |m_ij - m_ji|`.
    pub fn symmetry_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                dev = dev.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        dev
    }

    /// Default tolerance used when callers do not supply one:
    /// `1e-10 * ||m||_inf` (with a floor so the zero matrix is symmetric).
    pub fn default_symmetry_tol(&self) -> f64 {
        1e-10 * self.norm_inf().max(1.0)
    }

    pub fn is_symmetric_within(&self, tol: f64) -> bool {
        self.symmetry_deviation() <= tol
    }

    /// True when every entry is an exact integer.
    pub fn is_integer_valued(&self) -> bool {
        self.data.iter().all(|v| v.fract() == 0.0)
    }

    pub fn mat_mul(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        mat_mul(self, rhs)
    }

    /// `self^k` by repeated multiplication, `k >= 1`.
    pub fn power(&self, k: usize) -> Result<DenseMatrix> {
        if k == 0 {
            return Err(Error::InvalidArgument("power requires k >= 1".into()));
        }
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.mat_mul(self)?;
        }
        Ok(acc)
    }

    /// Writes the matrix as row-major CSV at full precision.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        for i in 0..self.n {
            let row = self.row(i);
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    write!(w, ",")?;
                }
                write!(w, "{v:.16e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Standard matrix product.
pub fn mat_mul(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch {
            left_rows: a.n,
            left_cols: a.n,
            right_rows: b.n,
            right_cols: b.n,
        });
    }
    let n = a.n;
    let mut out = vec![0.0; n * n];
    // i-k-j loop order keeps the inner accesses contiguous.
    for i in 0..n {
        for k in 0..n {
            let aik = a.data[i * n + k];
            if aik == 0.0 {
                continue;
            }
            let brow = &b.data[k * n..(k + 1) * n];
            let orow = &mut out[i * n..(i + 1) * n];
            for j in 0..n {
                orow[j] += aik * brow[j];
            }
        }
    }
    Ok(DenseMatrix {
        n,
        data: out,
        label: None,
    })
}

/// All eigenvalues of a symmetric matrix, ascending (ties kept).
///
/// The input must be symmetric within `tol`; pass
/// [`DenseMatrix::default_symmetry_tol`] when in doubt. Fails with
/// [`Error::NonConvergence`] rather than returning unreliable values.
pub fn sym_eigenvalues(m: &DenseMatrix, tol: f64) -> Result<Vec<f64>> {
    let dev = m.symmetry_deviation();
    if dev > tol {
        return Err(Error::Asymmetric { max_dev: dev, tol });
    }
    let mut work = m.data.clone();
    eigen::symmetric_eigenvalues(m.n, &mut work)
}

/// A rectangular matrix of exact integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i128>,
}

impl IntMatrix {
    pub fn from_rows(rows: Vec<Vec<i128>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidArgument(
                "all rows must have the same length".into(),
            ));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i128) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i128] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Rank over the rationals via fraction-free Bareiss elimination.
    pub fn exact_rank(&self) -> Result<usize> {
        bareiss_rank(self.rows, self.cols, self.data.clone())
    }

    /// Nullity over the rationals: `cols - rank`.
    pub fn exact_nullity(&self) -> Result<usize> {
        Ok(self.cols - self.exact_rank()?)
    }
}

/// Nullity of an exact integer matrix (columns minus rank), never touching
/// floating point.
pub fn exact_nullity(m: &IntMatrix) -> Result<usize> {
    m.exact_nullity()
}

pub fn exact_rank(m: &IntMatrix) -> Result<usize> {
    m.exact_rank()
}

fn checked_mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or(Error::IntegerOverflow)
}

/// Bareiss fraction-free elimination. Every intermediate entry is a minor
/// determinant of the input, so the division by the previous pivot is exact.
fn bareiss_rank(rows: usize, cols: usize, mut a: Vec<i128>) -> Result<usize> {
    let mut rank = 0usize;
    let mut prev: i128 = 1;
    let mut col = 0usize;
    while rank < rows && col < cols {
        // Smallest nonzero pivot in magnitude keeps growth down.
        let pivot_row = (rank..rows)
            .filter(|&r| a[r * cols + col] != 0)
            .min_by_key(|&r| a[r * cols + col].unsigned_abs());
        let Some(p) = pivot_row else {
            col += 1;
            continue;
        };
        if p != rank {
            for j in 0..cols {
                a.swap(rank * cols + j, p * cols + j);
            }
        }
        let pivot = a[rank * cols + col];
        for r in rank + 1..rows {
            let head = a[r * cols + col];
            for j in col + 1..cols {
                let num = checked_mul(pivot, a[r * cols + j])?
                    .checked_sub(checked_mul(head, a[rank * cols + j])?)
                    .ok_or(Error::IntegerOverflow)?;
                assert_eq!(num % prev, 0, "Bareiss division must be exact");
                a[r * cols + j] = num / prev;
            }
            a[r * cols + col] = 0;
        }
        prev = pivot;
        rank += 1;
        col += 1;
    }
    Ok(rank)
}
