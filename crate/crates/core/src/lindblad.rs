//! Dephasing dynamics `∂ρ/∂t = -i[H, ρ] - K[X, [X, ρ]]`.
//!
//! `H` and `X` share the pointer basis, so every matrix element evolves on
//! its own:
//!
//! ```text
//! ρ_{ξξ′}(t) = exp[(-i(E_ξ - E_ξ′) - K(ξ - ξ′)²) t] ρ_{ξξ′}(0)
//! ```
//!
//! [`evolve_analytic`] applies that factor directly. [`evolve_superop_oracle`]
//! builds the full `dim² × dim²` generator and exponentiates it; it exists to
//! check the fast path and is limited to small bases.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{matmul, matrix_exp, ComplexMatrix, DensityMatrix};
use crate::models::ModelSystem;

/// Largest basis accepted by the superoperator oracle.
pub const ORACLE_MAX_DIM: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagationMethod {
    Analytic,
    Superoperator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationResult {
    pub state: ComplexMatrix,
    pub time: f64,
    pub method: PropagationMethod,
}

fn check_time(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if !t.is_finite() {
        return Err(Error::OutOfDomain {
            name: "t",
            requirement: "finite",
            value: t,
        });
    }
    Ok(())
}

fn check_shape(model: &ModelSystem, m: &ComplexMatrix) -> Result<()> {
    if m.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            left: model.dim(),
            right: m.dim(),
        });
    }
    Ok(())
}

/// Generator of the `(ξ, ξ′)` element: `-i(E_ξ - E_ξ′) - K(ξ - ξ′)²`.
pub(crate) fn element_rate(model: &ModelSystem, row: usize, col: usize) -> Complex64 {
    let e = model.energies();
    let x = model.lindblad_values();
    let dx = x[row] - x[col];
    Complex64::new(-model.decoherence_k() * dx * dx, -(e[row] - e[col]))
}

/// Exact entry-wise propagator. `rho0` may be any matrix, Hermitian or not.
pub fn evolve_analytic(model: &ModelSystem, rho0: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    check_time(t)?;
    check_shape(model, rho0)?;
    ComplexMatrix::from_fn(model.dim(), |i, j| {
        if i == j {
            rho0.get(i, j)
        } else {
            (element_rate(model, i, j) * t).exp() * rho0.get(i, j)
        }
    })
}

/// Column-stacking vectorisation: entry `(i, j)` goes to `i + j·dim`.
fn vectorize(m: &ComplexMatrix) -> Vec<Complex64> {
    let d = m.dim();
    (0..d * d).map(|k| m.get(k % d, k / d)).collect()
}

fn devectorize(v: &[Complex64], d: usize) -> Result<ComplexMatrix> {
    ComplexMatrix::from_fn(d, |i, j| v[i + j * d])
}

fn apply(op: &ComplexMatrix, v: &[Complex64]) -> Vec<Complex64> {
    let n = op.dim();
    (0..n)
        .map(|r| (0..n).map(|c| op.get(r, c) * v[c]).sum())
        .collect()
}

/// Matrix of `L(ρ) = -i[H, ρ] - K[X, [X, ρ]]` acting on column-stacked `ρ`,
/// assembled from Kronecker products with `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.
pub fn lindbladian_superoperator(model: &ModelSystem) -> Result<ComplexMatrix> {
    let d = model.dim();
    if d > ORACLE_MAX_DIM {
        return Err(Error::OracleTooLarge {
            dim: d,
            limit: ORACLE_MAX_DIM,
        });
    }
    let id = ComplexMatrix::identity(d)?;
    let h = model.hamiltonian();
    let x = model.lindblad_operator();
    let x2 = matmul(&x, &x)?;
    let k = model.decoherence_k();

    let commutator_h = id.kron(&h).sub(&h.transpose().kron(&id))?;
    let double_commutator = id
        .kron(&x2)
        .sub(&x.transpose().kron(&x).scale(Complex64::new(2.0, 0.0)))?
        .add(&x2.transpose().kron(&id))?;
    commutator_h
        .scale(Complex64::new(0.0, -1.0))
        .sub(&double_commutator.scale(Complex64::new(k, 0.0)))
}

/// `ρ(t) = e^{Lt} ρ(0)` with the superoperator built and exponentiated densely.
pub fn evolve_superop_oracle(
    model: &ModelSystem,
    rho0: &ComplexMatrix,
    t: f64,
) -> Result<ComplexMatrix> {
    check_time(t)?;
    check_shape(model, rho0)?;
    let propagator = matrix_exp(&lindbladian_superoperator(model)?, t)?;
    devectorize(&apply(&propagator, &vectorize(rho0)), model.dim())
}

/// Heisenberg-picture `e^{L†t} A` through the dense superoperator, where
/// `L†` is defined by `Tr((L Y) Z) = Tr(Y (L† Z))`.
///
/// With column stacking `Tr(P Z) = vec(Zᵀ) · vec(P)`, so
/// `L† Z = [unvec(Lᵀ vec(Zᵀ))]ᵀ`.
pub fn evolve_heisenberg_superop_oracle(
    model: &ModelSystem,
    observable: &ComplexMatrix,
    t: f64,
) -> Result<ComplexMatrix> {
    check_time(t)?;
    check_shape(model, observable)?;
    let generator = lindbladian_superoperator(model)?.transpose();
    let propagator = matrix_exp(&generator, t)?;
    let v = apply(&propagator, &vectorize(&observable.transpose()));
    Ok(devectorize(&v, model.dim())?.transpose())
}

/// Regression-theorem state `ρ_B(t) = e^{Lt}(B ρ(0))`, so that
/// `⟨A(t) B⟩ = Tr(A ρ_B(t))`.
pub fn evolve_rho_b(
    model: &ModelSystem,
    b: &ComplexMatrix,
    rho0: &DensityMatrix,
    t: f64,
) -> Result<ComplexMatrix> {
    check_shape(model, b)?;
    let initial = matmul(b, rho0.matrix())?;
    evolve_analytic(model, &initial, t)
}

pub fn propagate(
    model: &ModelSystem,
    rho0: &ComplexMatrix,
    t: f64,
    method: PropagationMethod,
) -> Result<PropagationResult> {
    let state = match method {
        PropagationMethod::Analytic => evolve_analytic(model, rho0, t)?,
        PropagationMethod::Superoperator => evolve_superop_oracle(model, rho0, t)?,
    };
    Ok(PropagationResult {
        state,
        time: t,
        method,
    })
}
