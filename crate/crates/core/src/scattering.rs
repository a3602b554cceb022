//! Correlation functions, spectra and finite-time transition rates.
//!
//! The correlation function of the density operator is
//!
//! ```text
//! C(q, τ) = Tr[n(q) ρ n(-q, τ)] = Tr[n(-q) ρ_B(τ)],   ρ_B(0) = n(q) ρ
//! ```
//!
//! and with the pointer-basis dynamics it is a finite sum of damped
//! exponentials `Σ M_{ξξ′} exp(-z_{ξξ′} τ)` with
//! `z_{ξξ′} = i(E_ξ′ - E_ξ) + K(ξ′ - ξ)²` and
//! `M_{ξξ′} = ⟨ξ|n(-q)|ξ′⟩⟨ξ′|n(q)ρ|ξ⟩`. Every time integral below is taken
//! term by term in closed form.
//!
//! Negative lags use the reversed ordering `C(q, -η) = Tr[n(q) e^{Lη}(ρ n(-q))]`,
//! which equals `conj C(q, η)` for Hermitian `ρ`. The rate is
//!
//! ```text
//! Ẇ = λ² ∫_0^τsc [C(q, η) + C(q, -η)] dη
//! ```
//!
//! i.e. `2λ² ∫ C` for a real correlation function, and real for any valid
//! state without discarding anything by hand.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::linalg::{matmul, trace, ComplexMatrix, DensityMatrix};
use crate::lindblad::{element_rate, evolve_rho_b};
use crate::models::ModelSystem;

/// Relative bound on the imaginary part of quantities that must be real.
pub const REALITY_TOLERANCE: f64 = 1e-9;

/// Below this `|z| τ` the exponential integrals switch to their power series.
const SERIES_THRESHOLD: f64 = 0.1;
const SERIES_TERMS: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSeries {
    pub q: f64,
    pub taus: Vec<f64>,
    pub values: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSeries {
    pub q: f64,
    pub omegas: Vec<f64>,
    pub s_values: Vec<f64>,
}

impl SpectrumSeries {
    pub fn omega_step(&self) -> f64 {
        match self.omegas.as_slice() {
            [a, b, ..] => b - a,
            _ => 0.0,
        }
    }

    /// `Δω Σ S(q, ω)`, which reproduces `F(q, 0)`.
    pub fn sum_rule(&self) -> f64 {
        self.omega_step() * self.s_values.iter().sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralWindow {
    None,
    /// Multiplies `F(q, t)` by `exp(-t²/(2σ²))` before transforming.
    Gaussian {
        sigma: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult {
    pub q: f64,
    pub tau_sc: f64,
    pub k: f64,
    /// Double-integral transition probability `W(τsc)` at this `K`.
    pub w_total: f64,
    pub rate: f64,
    pub rate_decoherence_free: f64,
    pub anomaly_ratio: f64,
}

/// One `(ξ, ξ′)` contribution `weight · exp(-decay · τ)`.
#[derive(Debug, Clone, Copy)]
struct PairTerm {
    row: usize,
    col: usize,
    weight: Complex64,
    decay: Complex64,
}

/// `Tr(A ρ_B(τ))` with `ρ_B(0) = initial`, split into pair terms.
fn regression_terms(
    model: &ModelSystem,
    a: &ComplexMatrix,
    initial: &ComplexMatrix,
) -> Vec<PairTerm> {
    let d = model.dim();
    let mut terms = Vec::with_capacity(d * d);
    for row in 0..d {
        for col in 0..d {
            let weight = a.get(row, col) * initial.get(col, row);
            if weight != Complex64::new(0.0, 0.0) {
                terms.push(PairTerm {
                    row,
                    col,
                    weight,
                    decay: -element_rate(model, col, row),
                });
            }
        }
    }
    terms
}

/// Terms of `C(q, τ)` and of `C(q, -τ)` for `τ ≥ 0`.
struct CorrelationTerms {
    forward: Vec<PairTerm>,
    backward: Vec<PairTerm>,
}

fn correlation_terms(model: &ModelSystem, rho: &DensityMatrix, q: f64) -> Result<CorrelationTerms> {
    check_dim(model, rho)?;
    let (n_plus, n_minus) = model.n_pair(q)?;
    let forward = regression_terms(model, n_minus, &matmul(n_plus, rho.matrix())?);
    let backward = regression_terms(model, n_plus, &matmul(rho.matrix(), n_minus)?);
    Ok(CorrelationTerms { forward, backward })
}

fn check_dim(model: &ModelSystem, rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            left: model.dim(),
            right: rho.dim(),
        });
    }
    Ok(())
}

fn check_tau_sc(tau_sc: f64) -> Result<()> {
    if !(tau_sc > 0.0 && tau_sc.is_finite()) {
        return Err(Error::OutOfDomain {
            name: "tau_sc",
            requirement: "> 0 and finite",
            value: tau_sc,
        });
    }
    Ok(())
}

fn check_lag(tau: f64) -> Result<()> {
    if tau.is_nan() || tau < 0.0 {
        return Err(Error::NegativeTime(tau));
    }
    Ok(())
}

fn sum_terms(terms: &[PairTerm], tau: f64) -> Complex64 {
    terms
        .iter()
        .map(|t| t.weight * (-t.decay * tau).exp())
        .sum()
}

/// `∫_0^τ e^{-zη} dη`; exactly `τ` at `z = 0`.
pub fn exp_integral(z: Complex64, tau: f64) -> Complex64 {
    let x = z * tau;
    if x.norm() < SERIES_THRESHOLD {
        // τ Σ (-x)^k / (k+1)!
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 1..SERIES_TERMS {
            term = term * (-x) / (k as f64 + 1.0);
            sum += term;
        }
        sum * tau
    } else {
        (Complex64::new(1.0, 0.0) - (-x).exp()) / z
    }
}

/// `∫_0^τ (τ - η) e^{-zη} dη`; exactly `τ²/2` at `z = 0`.
pub fn ramp_exp_integral(z: Complex64, tau: f64) -> Complex64 {
    let x = z * tau;
    if x.norm() < SERIES_THRESHOLD {
        // τ² Σ (-x)^k / (k+2)!
        let mut term = Complex64::new(0.5, 0.0);
        let mut sum = term;
        for k in 1..SERIES_TERMS {
            term = term * (-x) / (k as f64 + 2.0);
            sum += term;
        }
        sum * tau * tau
    } else {
        tau / z - (Complex64::new(1.0, 0.0) - (-x).exp()) / (z * z)
    }
}

/// Sums `weight · kernel(decay)` over both orderings and checks that the
/// imaginary part is negligible against the sum of term magnitudes.
fn real_total<F>(terms: &CorrelationTerms, quantity: &'static str, kernel: F) -> Result<f64>
where
    F: Fn(&PairTerm) -> Complex64,
{
    let mut total = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for t in terms.forward.iter().chain(&terms.backward) {
        let c = t.weight * kernel(t);
        total += c;
        scale += c.norm();
    }
    if total.im.abs() > REALITY_TOLERANCE * scale {
        return Err(Error::ComplexResidue {
            quantity,
            residue: total.im.abs() / scale,
        });
    }
    Ok(total.re)
}

/// `C(q, τ)` through the regression theorem: `Tr[n(-q) ρ_B(τ)]` with
/// `ρ_B(0) = n(q) ρ(0)`.
pub fn correlation(
    model: &ModelSystem,
    rho: &DensityMatrix,
    q: f64,
    tau: f64,
) -> Result<Complex64> {
    check_dim(model, rho)?;
    let (n_plus, n_minus) = model.n_pair(q)?;
    let rho_b = evolve_rho_b(model, n_plus, rho, tau)?;
    Ok(trace(&matmul(n_minus, &rho_b)?))
}

/// `F(q, t) ≡ C(q, t)` sampled on `taus`.
pub fn intermediate_function(
    model: &ModelSystem,
    rho: &DensityMatrix,
    q: f64,
    taus: &[f64],
) -> Result<CorrelationSeries> {
    for &t in taus {
        check_lag(t)?;
    }
    let terms = correlation_terms(model, rho, q)?;
    let values = taus.iter().map(|&t| sum_terms(&terms.forward, t)).collect();
    Ok(CorrelationSeries {
        q,
        taus: taus.to_vec(),
        values,
    })
}

/// `S(q, ω)` on the frequency grid conjugate to the sampled lags.
///
/// The series must start at `τ = 0` on a uniform grid. It is extended to
/// negative lags with `F(q, -t) = conj F(q, t)` and transformed over the
/// `2N - 1` samples, giving `ω_j = 2πj / ((2N - 1)Δt)` for
/// `|j| ≤ N - 1` and `Δω Σ_j S_j = Re F(q, 0)` exactly.
///
/// Positive `ω` is energy given to the scattering system: a term
/// `e^{-iω₀t}` of `C` (an excitation by `ω₀`) lands at `+ω₀`. This is the
/// transform `(1/2π)∫ e^{-iωt} F(t) dt` applied to the time-reversed
/// ordering `F(t) = C(q, -t)`.
pub fn dynamic_structure_factor(
    series: &CorrelationSeries,
    window: SpectralWindow,
) -> Result<SpectrumSeries> {
    let n = series.taus.len();
    if n < 2 || series.values.len() != n {
        return Err(Error::NonUniformGrid(format!(
            "need at least two samples with one value each, got {} lags and {} values",
            n,
            series.values.len()
        )));
    }
    let dt = series.taus[1] - series.taus[0];
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::NonUniformGrid(format!(
            "first step {dt} is not positive"
        )));
    }
    if series.taus[0].abs() > 1e-12 * dt {
        return Err(Error::NonUniformGrid(format!(
            "grid must start at t = 0, starts at {}",
            series.taus[0]
        )));
    }
    for (k, w) in series.taus.windows(2).enumerate() {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt {
            return Err(Error::NonUniformGrid(format!(
                "step {k} is {} but the first step is {dt}",
                w[1] - w[0]
            )));
        }
    }
    if let SpectralWindow::Gaussian { sigma } = window {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::OutOfDomain {
                name: "window sigma",
                requirement: "> 0",
                value: sigma,
            });
        }
    }

    let taper = |t: f64| match window {
        SpectralWindow::None => 1.0,
        SpectralWindow::Gaussian { sigma } => (-t * t / (2.0 * sigma * sigma)).exp(),
    };
    let m = 2 * n - 1;
    let mut buffer = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..n {
        let t = k as f64 * dt;
        let f = series.values[k] * taper(t);
        buffer[k] = f;
        if k > 0 {
            buffer[m - k] = f.conj();
        }
    }
    // inverse FFT: X_j = Σ_m x_m e^{+2πi jm/M}
    FftPlanner::<f64>::new()
        .plan_fft_inverse(m)
        .process(&mut buffer);

    let d_omega = 2.0 * PI / (m as f64 * dt);
    let half = (n - 1) as isize;
    let mut omegas = Vec::with_capacity(m);
    let mut s_values = Vec::with_capacity(m);
    for j in -half..=half {
        let idx = j.rem_euclid(m as isize) as usize;
        omegas.push(j as f64 * d_omega);
        s_values.push(buffer[idx].re * dt / (2.0 * PI));
    }
    Ok(SpectrumSeries {
        q: series.q,
        omegas,
        s_values,
    })
}

/// Exact double-time-integral transition probability
/// `W(τsc) = λ² ∫_0^τsc ∫_0^τsc C(q, t″ - t′) dt′ dt″`.
pub fn w_exact(model: &ModelSystem, rho: &DensityMatrix, q: f64, tau_sc: f64) -> Result<f64> {
    check_tau_sc(tau_sc)?;
    let terms = correlation_terms(model, rho, q)?;
    let lambda2 = model.coupling_lambda().powi(2);
    Ok(lambda2 * real_total(&terms, "W(tau_sc)", |t| ramp_exp_integral(t.decay, tau_sc))?)
}

/// Finite-time rate `Ẇ = λ² ∫_0^τsc [C(q, η) + C(q, -η)] dη` at the
/// model's own `K`.
pub fn rate_standard(model: &ModelSystem, rho: &DensityMatrix, q: f64, tau_sc: f64) -> Result<f64> {
    check_tau_sc(tau_sc)?;
    let terms = correlation_terms(model, rho, q)?;
    let lambda2 = model.coupling_lambda().powi(2);
    Ok(lambda2 * real_total(&terms, "transition rate", |t| exp_integral(t.decay, tau_sc))?)
}

/// Rate at the model's `K` together with its decoherence-free reference.
pub fn rate_decohered(
    model: &ModelSystem,
    rho: &DensityMatrix,
    q: f64,
    tau_sc: f64,
) -> Result<RateResult> {
    let rate = rate_standard(model, rho, q, tau_sc)?;
    let rate_decoherence_free = rate_standard(&model.with_decoherence(0.0)?, rho, q, tau_sc)?;
    let w_total = w_exact(model, rho, q, tau_sc)?;
    Ok(RateResult {
        q,
        tau_sc,
        k: model.decoherence_k(),
        w_total,
        rate,
        rate_decoherence_free,
        anomaly_ratio: ratio(rate, rate_decoherence_free)?,
    })
}

fn ratio(rate: f64, reference: f64) -> Result<f64> {
    if reference == 0.0 {
        return Err(Error::OutOfDomain {
            name: "decoherence-free rate",
            requirement: "non-zero to form the anomaly ratio",
            value: reference,
        });
    }
    Ok(rate / reference)
}

/// Decoherence-free rate from the Heisenberg picture,
/// `n(-q, η) = e^{iHη} n(-q) e^{-iHη}`, summed over the energy spectrum.
///
/// Shares no code with the pointer-basis regression path and serves as the
/// reference for the `K → 0` limit.
pub fn rate_spectral_sum(
    model: &ModelSystem,
    rho: &DensityMatrix,
    q: f64,
    tau_sc: f64,
) -> Result<f64> {
    check_tau_sc(tau_sc)?;
    check_dim(model, rho)?;
    let (n_plus, n_minus) = model.n_pair(q)?;
    let left = matmul(n_plus, rho.matrix())?;
    let right = matmul(rho.matrix(), n_minus)?;
    let e = model.energies();
    let d = model.dim();

    // ∫_0^τ e^{iωη} dη = τ e^{iωτ/2} sinc(ωτ/2)
    let phase_integral = |omega: f64| {
        let x = 0.5 * omega * tau_sc;
        let sinc = if x == 0.0 { 1.0 } else { x.sin() / x };
        Complex64::from_polar(tau_sc * sinc, x)
    };
    let mut total = Complex64::new(0.0, 0.0);
    for a in 0..d {
        for b in 0..d {
            let phase = phase_integral(e[a] - e[b]);
            // C(η):  (n(q)ρ)_{ba} n(-q)_{ab} e^{i(E_a - E_b)η}
            total += left.get(b, a) * n_minus.get(a, b) * phase;
            // C(-η): n(q)_{ab} e^{i(E_a - E_b)η} (ρ n(-q))_{ba}
            total += n_plus.get(a, b) * right.get(b, a) * phase;
        }
    }
    Ok(model.coupling_lambda().powi(2) * total.re)
}

/// `K → ∞` limit of the rate: only pairs with equal Lindblad values
/// survive, undamped. For a non-degenerate `X` this is
/// `2λ² τsc Re Σ_ξ ⟨ξ|n(-q)|ξ⟩⟨ξ|n(q)ρ|ξ⟩`.
pub fn diagonal_limit_rate(
    model: &ModelSystem,
    rho: &DensityMatrix,
    q: f64,
    tau_sc: f64,
) -> Result<f64> {
    check_tau_sc(tau_sc)?;
    let undamped = model.with_decoherence(0.0)?;
    let mut terms = correlation_terms(&undamped, rho, q)?;
    let x = model.lindblad_values();
    let keep = |t: &PairTerm| x[t.row] == x[t.col];
    terms.forward.retain(keep);
    terms.backward.retain(keep);
    let lambda2 = model.coupling_lambda().powi(2);
    Ok(lambda2
        * real_total(&terms, "diagonal-limit rate", |t| {
            exp_integral(t.decay, tau_sc)
        })?)
}

/// `(K, Ẇ(K)/Ẇ(0))` over an ascending grid of non-negative `K`.
/// The ratio at `K = 0` is exactly 1.
pub fn anomaly_curve(
    model: &ModelSystem,
    rho: &DensityMatrix,
    q: f64,
    tau_sc: f64,
    k_grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    validate_k_grid(k_grid)?;
    let reference = rate_standard(&model.with_decoherence(0.0)?, rho, q, tau_sc)?;
    k_grid
        .iter()
        .map(|&k| {
            let rate = rate_standard(&model.with_decoherence(k)?, rho, q, tau_sc)?;
            Ok((
                k,
                if k == 0.0 {
                    1.0
                } else {
                    ratio(rate, reference)?
                },
            ))
        })
        .collect()
}

pub fn validate_k_grid(k_grid: &[f64]) -> Result<()> {
    if k_grid.is_empty() {
        return Err(Error::InvalidKGrid("grid is empty".into()));
    }
    if let Some(k) = k_grid.iter().find(|k| !(**k >= 0.0 && k.is_finite())) {
        return Err(Error::InvalidKGrid(format!(
            "K = {k} violates \"K is real and K>0\" (K = 0 allowed)"
        )));
    }
    if k_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidKGrid(
            "values must be strictly ascending".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;
    use crate::models::build_custom;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Two levels, ρ = |0⟩⟨0|, n(q) with a single `|1⟩⟨0|` element `b`.
    fn single_pair(delta_e: f64, k: f64, b: Complex64) -> (ModelSystem, DensityMatrix) {
        let mut n = ComplexMatrix::zeros(2).unwrap();
        n.set(1, 0, b);
        let model = build_custom(
            vec![0.0, delta_e],
            vec![0.0, 1.0],
            k,
            vec![(1.0, n.clone()), (-1.0, n.dagger())],
            1.0,
        )
        .unwrap();
        (model, DensityMatrix::from_populations(&[1.0, 0.0]).unwrap())
    }

    #[test]
    fn series_and_closed_forms_agree_at_threshold() {
        for z in [c(0.3, 0.0), c(0.0, 0.3), c(-0.2, 0.25), c(1e-3, -2e-3)] {
            let tau = SERIES_THRESHOLD / z.norm();
            let below = exp_integral(z * 0.999_999, tau);
            let above = exp_integral(z * 1.000_001, tau);
            assert!((below - above).norm() < 1e-6 * tau);
            let below = ramp_exp_integral(z * 0.999_999, tau);
            let above = ramp_exp_integral(z * 1.000_001, tau);
            assert!((below - above).norm() < 1e-6 * tau * tau);
        }
        assert_eq!(exp_integral(c(0.0, 0.0), 2.5), c(2.5, 0.0));
        assert_eq!(ramp_exp_integral(c(0.0, 0.0), 2.0), c(2.0, 0.0));
    }

    #[test]
    fn correlation_at_zero_lag() {
        let (model, rho) = single_pair(0.8, 0.3, c(0.6, 0.2));
        let (n_plus, n_minus) = model.n_pair(1.0).unwrap();
        let direct = trace(&matmul(&matmul(n_plus, rho.matrix()).unwrap(), n_minus).unwrap());
        let got = correlation(&model, &rho, 1.0, 0.0).unwrap();
        assert!((got - direct).norm() < 1e-15);
    }

    #[test]
    fn correlation_single_pair_closed_form() {
        let b = c(0.6, 0.2);
        let (model, rho) = single_pair(0.8, 0.3, b);
        let tau = 1.7;
        let expected = b.norm_sqr() * (c(-0.3, -0.8) * tau).exp();
        let got = correlation(&model, &rho, 1.0, tau).unwrap();
        assert!((got - expected).norm() < 1e-14);
        let series = intermediate_function(&model, &rho, 1.0, &[0.0, tau]).unwrap();
        assert!((series.values[1] - expected).norm() < 1e-14);
    }

    #[test]
    fn missing_partner_matrix() {
        let model = build_custom(
            vec![0.0, 1.0],
            vec![0.0, 1.0],
            0.0,
            vec![(2.0, ComplexMatrix::identity(2).unwrap())],
            1.0,
        )
        .unwrap();
        let rho = DensityMatrix::from_populations(&[1.0, 0.0]).unwrap();
        assert_eq!(
            correlation(&model, &rho, 2.0, 0.0).unwrap_err(),
            Error::MissingMomentum(-2.0)
        );
        assert_eq!(
            rate_standard(&model, &rho, 3.0, 1.0).unwrap_err(),
            Error::MissingMomentum(3.0)
        );
    }

    #[test]
    fn two_level_w_is_sinc_squared() {
        let b = c(0.6, 0.2);
        let gap = 1.3;
        let (model, rho) = single_pair(gap, 0.0, b);
        for tau in [0.05, 0.9, 4.0] {
            let expected = b.norm_sqr() * 2.0 * (1.0 - (gap * tau).cos()) / (gap * gap);
            let got = w_exact(&model, &rho, 1.0, tau).unwrap();
            assert!(
                (got - expected).abs() < 1e-10 * expected.max(1e-300),
                "{got} {expected}"
            );
        }
    }

    #[test]
    fn w_grows_quadratically_at_short_times() {
        let (model, rho) = single_pair(1.3, 0.4, c(0.6, 0.2));
        let ratio =
            w_exact(&model, &rho, 1.0, 1e-6).unwrap() / w_exact(&model, &rho, 1.0, 1e-3).unwrap();
        assert!((ratio / 1e-6 - 1.0).abs() < 0.05);
        let rate = rate_standard(&model, &rho, 1.0, 1e-6).unwrap() / 1e-6;
        assert!(rate.abs() < 1.0);
    }

    #[test]
    fn nonpositive_tau_sc_rejected() {
        let (model, rho) = single_pair(1.0, 0.0, c(1.0, 0.0));
        assert!(w_exact(&model, &rho, 1.0, 0.0).is_err());
        assert!(rate_standard(&model, &rho, 1.0, -1.0).is_err());
        assert!(intermediate_function(&model, &rho, 1.0, &[0.0, -0.1]).is_err());
    }

    #[test]
    fn zero_k_ratio_is_exactly_one() {
        let (model, rho) = single_pair(1.0, 0.0, c(1.0, 0.0));
        let r = rate_decohered(&model, &rho, 1.0, 0.7).unwrap();
        assert_eq!(r.rate, r.rate_decoherence_free);
        assert_eq!(r.anomaly_ratio, 1.0);
        let curve = anomaly_curve(&model, &rho, 1.0, 0.7, &[0.0, 0.5]).unwrap();
        assert_eq!(curve[0], (0.0, 1.0));
    }

    #[test]
    fn k_grid_validation() {
        let (model, rho) = single_pair(1.0, 0.0, c(1.0, 0.0));
        for grid in [vec![], vec![0.0, -1.0], vec![1.0, 0.5], vec![f64::NAN]] {
            assert!(anomaly_curve(&model, &rho, 1.0, 0.7, &grid).is_err());
        }
        let err = validate_k_grid(&[-2.0]).unwrap_err();
        assert!(err.to_string().contains("K is real and K>0"));
    }

    #[test]
    fn constant_correlation_spectrum_is_a_single_bin() {
        let series = CorrelationSeries {
            q: 0.0,
            taus: (0..64).map(|k| k as f64 * 0.1).collect(),
            values: vec![c(1.0, 0.0); 64],
        };
        let s = dynamic_structure_factor(&series, SpectralWindow::None).unwrap();
        let dw = s.omega_step();
        for (w, v) in s.omegas.iter().zip(&s.s_values) {
            let expected = if *w == 0.0 { 1.0 / dw } else { 0.0 };
            assert!((v - expected).abs() * dw < 1e-9, "{w} {v}");
        }
    }

    #[test]
    fn single_mode_peaks_at_its_frequency() {
        let n = 200;
        let dt = 0.05;
        let m = (2 * n - 1) as f64;
        let omega0 = 2.0 * PI * 7.0 / (m * dt);
        let taus: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();
        let values = taus.iter().map(|&t| c(0.0, -omega0 * t).exp()).collect();
        let s = dynamic_structure_factor(
            &CorrelationSeries {
                q: 1.0,
                taus,
                values,
            },
            SpectralWindow::None,
        )
        .unwrap();
        let (peak, _) = s
            .s_values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        assert!((s.omegas[peak] - omega0).abs() < 1e-9);
        assert!((s.sum_rule() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_window_keeps_sum_rule() {
        let taus: Vec<f64> = (0..100).map(|k| k as f64 * 0.1).collect();
        let values = taus
            .iter()
            .map(|&t| c(-0.2 * t, -1.1 * t).exp() * 0.8)
            .collect();
        let s = dynamic_structure_factor(
            &CorrelationSeries {
                q: 1.0,
                taus,
                values,
            },
            SpectralWindow::Gaussian { sigma: 3.0 },
        )
        .unwrap();
        assert!((s.sum_rule() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn spectrum_grid_errors() {
        let bad = CorrelationSeries {
            q: 1.0,
            taus: vec![0.0, 0.1, 0.25],
            values: vec![c(1.0, 0.0); 3],
        };
        assert!(matches!(
            dynamic_structure_factor(&bad, SpectralWindow::None).unwrap_err(),
            Error::NonUniformGrid(_)
        ));
        let shifted = CorrelationSeries {
            q: 1.0,
            taus: vec![0.1, 0.2, 0.3],
            values: vec![c(1.0, 0.0); 3],
        };
        assert!(dynamic_structure_factor(&shifted, SpectralWindow::None).is_err());
    }
}
