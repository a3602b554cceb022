//! Dense complex matrices and the operator types built on them.
//!
//! Everything here is small and dense: pointer bases in this crate have at
//! most a few dozen states, and the superoperator oracle squares that. The
//! storage is an `nalgebra::DMatrix<Complex64>`; the exponential and the
//! invariant checks are implemented locally.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default absolute tolerance for [`ComplexMatrix::approx_eq`].
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Hermiticity tolerance applied at construction of operator types.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
/// Trace tolerance for density matrices.
pub const TRACE_TOLERANCE: f64 = 1e-10;
/// Lowest eigenvalue a density matrix may carry.
pub const POSITIVITY_TOLERANCE: f64 = 1e-10;

/// Largest entry change allowed between a Taylor sum of order `m` and
/// order `2m` on the scaled generator.
const EXP_ORDER_TOLERANCE: f64 = 1e-12;
/// Scaled generators are brought below this 1-norm before the Taylor sum.
const EXP_SCALED_NORM: f64 = 0.5;

/// Square complex matrix with at least one row.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    data: DMatrix<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        Ok(Self {
            data: DMatrix::zeros(dim, dim),
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        Ok(Self {
            data: DMatrix::identity(dim, dim),
        })
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Result<Self> {
        let mut m = Self::zeros(diag.len())?;
        for (i, &d) in diag.iter().enumerate() {
            m.data[(i, i)] = d;
        }
        Ok(m)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let diag: Vec<Complex64> = diag.iter().map(|&d| Complex64::new(d, 0.0)).collect();
        Self::from_diagonal(&diag)
    }

    /// Builds a matrix from `dim * dim` entries in row-major order.
    pub fn from_row_major(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        let expected = dim.checked_mul(dim).ok_or(Error::BadStorage {
            dim,
            expected: usize::MAX,
            got: entries.len(),
        })?;
        if entries.len() != expected {
            return Err(Error::BadStorage {
                dim,
                expected,
                got: entries.len(),
            });
        }
        Ok(Self {
            data: DMatrix::from_row_slice(dim, dim, entries),
        })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        let flat: Vec<Complex64> = rows.iter().flatten().copied().collect();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::BadStorage {
                dim,
                expected: dim * dim,
                got: flat.len(),
            });
        }
        Self::from_row_major(dim, &flat)
    }

    pub fn from_fn<F>(dim: usize, f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Complex64,
    {
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        Ok(Self {
            data: DMatrix::from_fn(dim, dim, f),
        })
    }

    pub(crate) fn from_dmatrix(data: DMatrix<Complex64>) -> Self {
        debug_assert!(data.is_square() && data.nrows() > 0);
        Self { data }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[(row, col)] = value;
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let d = self.dim();
        (0..d * d).map(|k| self.data[(k / d, k % d)]).collect()
    }

    pub fn dagger(&self) -> Self {
        Self {
            data: self.data.adjoint(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            data: self.data.transpose(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            data: &self.data * factor,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        Ok(Self {
            data: &self.data + &other.data,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        Ok(Self {
            data: &self.data - &other.data,
        })
    }

    pub fn check_finite(&self) -> Result<()> {
        let d = self.dim();
        for col in 0..d {
            for row in 0..d {
                let z = self.data[(row, col)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row, col });
                }
            }
        }
        Ok(())
    }

    /// Largest entry-wise modulus of `self - other`; infinite on dimension mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        self.data
            .column_iter()
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest deviation `|a[i][j] - conj(a[j][i])|` and where it occurs.
    pub fn hermiticity_defect(&self) -> (f64, usize, usize) {
        let d = self.dim();
        let mut worst = (0.0, 0, 0);
        for i in 0..d {
            for j in i..d {
                let dev = (self.data[(i, j)] - self.data[(j, i)].conj()).norm();
                if dev > worst.0 {
                    worst = (dev, i, j);
                }
            }
        }
        worst
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self {
            data: self.data.kronecker(&other.data),
        }
    }
}

fn check_dims(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dims(a, b)?;
    Ok(ComplexMatrix {
        data: &a.data * &b.data,
    })
}

pub fn trace(a: &ComplexMatrix) -> Complex64 {
    a.data.diagonal().iter().sum()
}

/// `exp(a * t)` by scaling and squaring around an adaptive Taylor sum.
///
/// The generator is scaled by `2^-s` until its 1-norm is at most 0.5. The
/// Taylor order starts at 8 and doubles until going from order `m` to `2m`
/// moves no entry of the scaled exponential by more than 1e-12.
pub fn matrix_exp(a: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    a.check_finite()?;
    if !t.is_finite() {
        return Err(Error::OutOfDomain {
            name: "t",
            requirement: "finite",
            value: t,
        });
    }
    let dim = a.dim();
    let generator = &a.data * Complex64::new(t, 0.0);
    let norm = ComplexMatrix::from_dmatrix(generator.clone()).norm_one();

    let mut squarings = 0u32;
    if norm > EXP_SCALED_NORM {
        squarings = (norm / EXP_SCALED_NORM).log2().ceil() as u32;
    }
    let scaled = generator * Complex64::new((-(squarings as f64)).exp2(), 0.0);

    let mut order = 8usize;
    let mut result = loop {
        let (low, high) = taylor_pair(&scaled, order, dim);
        let change = low
            .iter()
            .zip(high.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        if change <= EXP_ORDER_TOLERANCE || order >= 256 {
            break high;
        }
        order *= 2;
    };

    for _ in 0..squarings {
        result = &result * &result;
    }
    let out = ComplexMatrix::from_dmatrix(result);
    out.check_finite()?;
    Ok(out)
}

/// Partial Taylor sums of `exp(x)` truncated at `order` and `2 * order`.
fn taylor_pair(
    x: &DMatrix<Complex64>,
    order: usize,
    dim: usize,
) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let mut sum = DMatrix::<Complex64>::identity(dim, dim);
    let mut term = DMatrix::<Complex64>::identity(dim, dim);
    let mut low = None;
    for k in 1..=(2 * order) {
        term = &term * x * Complex64::new(1.0 / k as f64, 0.0);
        sum += &term;
        if k == order {
            low = Some(sum.clone());
        }
    }
    (low.unwrap_or_else(|| sum.clone()), sum)
}

/// Complex matrix that equals its own conjugate transpose within 1e-12.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        m.check_finite()?;
        let (deviation, row, col) = m.hermiticity_defect();
        if deviation > HERMITIAN_TOLERANCE {
            return Err(Error::NotHermitian {
                row,
                col,
                deviation,
            });
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_inner(self) -> ComplexMatrix {
        self.0
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.0)
    }
}

/// Eigenvalues of the Hermitian part `(a + a†)/2`, ascending.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Vec<f64> {
    let herm = (&a.data + a.data.adjoint()) * Complex64::new(0.5, 0.0);
    let mut values: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Statistical operator: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let herm = HermitianMatrix::new(m)?;
        let m = herm.into_inner();
        let tr = trace(&m);
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOLERANCE {
            return Err(Error::TraceNotUnity { trace: tr.re });
        }
        if let Some(&lowest) = hermitian_eigenvalues(&m).first() {
            if lowest < -POSITIVITY_TOLERANCE {
                return Err(Error::NotPositive { eigenvalue: lowest });
            }
        }
        Ok(Self(m))
    }

    /// Diagonal state from a population vector that already sums to one.
    pub fn from_populations(populations: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diagonal(populations)?)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// True when every off-diagonal entry is below `tol` in modulus.
    pub fn is_diagonal(&self, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| i == j || self.0.get(i, j).norm() <= tol))
    }
}
