#![allow(dead_code)]

use attoscatter::linalg::{matmul, trace, ComplexMatrix, DensityMatrix};
use attoscatter::lindblad::{evolve_analytic, lindbladian_superoperator};
use attoscatter::{build_custom, ModelSystem};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const Q: f64 = 1.0;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| {
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
    .unwrap()
}

/// `G G† / Tr(G G†)`.
pub fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
    let g = random_matrix(rng, dim);
    let p = matmul(&g, &g.dagger()).unwrap();
    let tr = trace(&p).re;
    let m = p.scale(c(1.0 / tr, 0.0));
    // exact Hermitian symmetrisation so the constructor's check passes
    let h = m.add(&m.dagger()).unwrap().scale(c(0.5, 0.0));
    DensityMatrix::new(h).unwrap()
}

/// Random model with energies and Lindblad values in `[0, 1)`, `n(±Q)` a
/// random matrix and its adjoint.
pub fn random_model(rng: &mut ChaCha8Rng, dim: usize, k_max: f64) -> ModelSystem {
    let energies: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..1.0)).collect();
    let xs: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..1.0)).collect();
    let k = rng.random_range(0.0..k_max);
    let n = random_matrix(rng, dim);
    let lambda = rng.random_range(0.5..1.5);
    build_custom(
        energies,
        xs,
        k,
        vec![(Q, n.clone()), (-Q, n.dagger())],
        lambda,
    )
    .unwrap()
}

/// Entry-wise triple loop.
pub fn naive_matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let d = a.dim();
    ComplexMatrix::from_fn(d, |i, j| {
        let mut s = c(0.0, 0.0);
        for k in 0..d {
            s += a.get(i, k) * b.get(k, j);
        }
        s
    })
    .unwrap()
}

/// `Σ_{k<terms} (a t)^k / k!`, no scaling.
pub fn taylor_exp(a: &ComplexMatrix, t: f64, terms: usize) -> ComplexMatrix {
    let d = a.dim();
    let at = a.scale(c(t, 0.0));
    let mut term = ComplexMatrix::identity(d).unwrap();
    let mut sum = term.clone();
    for k in 1..terms {
        term = naive_matmul(&term, &at).scale(c(1.0 / k as f64, 0.0));
        sum = sum.add(&term).unwrap();
    }
    sum
}

fn column_stack(m: &ComplexMatrix) -> Vec<Complex64> {
    let d = m.dim();
    (0..d * d).map(|k| m.get(k % d, k / d)).collect()
}

fn unstack(v: &[Complex64], d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, |i, j| v[i + j * d]).unwrap()
}

fn matvec(m: &ComplexMatrix, v: &[Complex64]) -> Vec<Complex64> {
    (0..m.dim())
        .map(|r| (0..m.dim()).map(|k| m.get(r, k) * v[k]).sum())
        .collect()
}

/// `C(q, η)` and `C(q, -η)` at `η = j·h`, `j = 0..nodes`, propagated by
/// repeated application of the dense one-step superoperator `e^{L h}`.
///
/// `C(η) = Tr[n(-q) e^{Lη}(n(q)ρ)]`, `C(-η) = Tr[n(q) e^{Lη}(ρ n(-q))]`.
pub fn correlation_table(
    model: &ModelSystem,
    rho: &DensityMatrix,
    q: f64,
    h: f64,
    nodes: usize,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let d = model.dim();
    let step = taylor_exp(&lindbladian_superoperator(model).unwrap(), h, 40);
    let (n_plus, n_minus) = model.n_pair(q).unwrap();
    let mut fwd = column_stack(&naive_matmul(n_plus, rho.matrix()));
    let mut bwd = column_stack(&naive_matmul(rho.matrix(), n_minus));
    let mut forward = Vec::with_capacity(nodes);
    let mut backward = Vec::with_capacity(nodes);
    for _ in 0..nodes {
        forward.push(trace(&naive_matmul(n_minus, &unstack(&fwd, d))));
        backward.push(trace(&naive_matmul(n_plus, &unstack(&bwd, d))));
        fwd = matvec(&step, &fwd);
        bwd = matvec(&step, &bwd);
    }
    (forward, backward)
}

pub fn trapezoid(values: &[Complex64], h: f64) -> Complex64 {
    let n = values.len();
    let inner: Complex64 = values[1..n - 1].iter().sum();
    (inner + (values[0] + values[n - 1]) * 0.5) * h
}

/// `λ² ∫_0^τ [C(η) + C(-η)] dη` by the trapezoid rule on `nodes` points.
pub fn rate_by_quadrature(
    model: &ModelSystem,
    rho: &DensityMatrix,
    q: f64,
    tau: f64,
    nodes: usize,
) -> Complex64 {
    let h = tau / (nodes - 1) as f64;
    let (f, b) = correlation_table(model, rho, q, h, nodes);
    (trapezoid(&f, h) + trapezoid(&b, h)) * model.coupling_lambda().powi(2)
}

/// `λ² ∫∫_{[0,τ]²} C(t″ - t′)` by the 2-D trapezoid rule on `nodes²` points.
pub fn w_by_quadrature(
    model: &ModelSystem,
    rho: &DensityMatrix,
    q: f64,
    tau: f64,
    nodes: usize,
) -> Complex64 {
    let h = tau / (nodes - 1) as f64;
    let (f, b) = correlation_table(model, rho, q, h, nodes);
    let weight = |i: usize| if i == 0 || i == nodes - 1 { 0.5 } else { 1.0 };
    let mut total = c(0.0, 0.0);
    for i in 0..nodes {
        let wi = weight(i);
        let mut row = c(0.0, 0.0);
        for j in 0..nodes {
            let lag = if j >= i { f[j - i] } else { b[i - j] };
            row += lag * weight(j);
        }
        total += row * wi;
    }
    total * h * h * model.coupling_lambda().powi(2)
}

/// Pure-matrix `e^{-iHt}` for a diagonal `H`.
pub fn diagonal_unitary(energies: &[f64], t: f64) -> ComplexMatrix {
    let phases: Vec<Complex64> = energies
        .iter()
        .map(|&e| Complex64::from_polar(1.0, -e * t))
        .collect();
    ComplexMatrix::from_diagonal(&phases).unwrap()
}

/// `Tr[n(q) ρ U† n(-q) U]` at lag `t`, `U = e^{-iHt}`: the closed-system
/// correlation straight from the Heisenberg picture.
pub fn heisenberg_correlation(
    model: &ModelSystem,
    rho: &DensityMatrix,
    q: f64,
    t: f64,
) -> Complex64 {
    let (n_plus, n_minus) = model.n_pair(q).unwrap();
    let u = diagonal_unitary(model.energies(), t);
    let evolved = naive_matmul(&naive_matmul(&u.dagger(), n_minus), &u);
    trace(&naive_matmul(&naive_matmul(n_plus, rho.matrix()), &evolved))
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn evolve(model: &ModelSystem, m: &ComplexMatrix, t: f64) -> ComplexMatrix {
    evolve_analytic(model, m, t).unwrap()
}
