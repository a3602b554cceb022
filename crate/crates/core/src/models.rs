//! Finite pointer-basis models of a single scattering particle.
//!
//! A [`ModelSystem`] stores everything the dephasing dynamics and the
//! scattering engine need: the energies and Lindblad eigenvalues of the
//! shared eigenbasis of `H` and `X`, the dephasing constant `K`, and the
//! matrices `⟨ξ|n(q)|ξ′⟩` of the density operator for each stored momentum
//! transfer.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{matrix_exp, ComplexMatrix, DensityMatrix};

/// Tolerance on `n(-q) = n(q)†`.
pub const PAIR_TOLERANCE: f64 = 1e-10;
/// Weight the two highest oscillator states may carry in a checked column.
pub const TRUNCATION_WEIGHT_LIMIT: f64 = 1e-8;

/// How the Lindblad variable `X` is read off the energy eigenbasis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LindbladCoupling {
    /// `ξ = 0, 1, 2, …`
    EnergyIndex,
    /// `ξ = E_ξ`
    EnergyValue,
}

/// Truncated harmonic oscillator, in natural units (ħ = 1, eV, Å).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorSpec {
    /// ħω in eV.
    pub omega: f64,
    /// Mass in 1/(eV·Å²).
    pub mass: f64,
    pub dim: usize,
    pub x_coupling: LindbladCoupling,
}

impl OscillatorSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::OutOfDomain {
                name: "omega",
                requirement: "> 0",
                value: self.omega,
            });
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::OutOfDomain {
                name: "mass",
                requirement: "> 0",
                value: self.mass,
            });
        }
        if self.dim < 2 {
            return Err(Error::OutOfDomain {
                name: "dim",
                requirement: ">= 2",
                value: self.dim as f64,
            });
        }
        Ok(())
    }

    /// Zero-point length `1/sqrt(2mω)` in Å.
    pub fn zero_point_length(&self) -> f64 {
        (2.0 * self.mass * self.omega).sqrt().recip()
    }

    /// Recoil-to-quantum ratio `q²/(2mω)`.
    pub fn recoil_ratio(&self, q: f64) -> f64 {
        q * q / (2.0 * self.mass * self.omega)
    }

    /// Root-mean-square velocity `sqrt(⟨p²⟩)/m` of the thermal state at
    /// inverse temperature `beta` (1/eV), in Å per natural time unit.
    pub fn rms_velocity(&self, beta: f64) -> f64 {
        let x = beta * self.omega / 2.0;
        let coth = if x > 350.0 { 1.0 } else { 1.0 / x.tanh() };
        (self.omega * coth / (2.0 * self.mass)).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSystem {
    energies: Vec<f64>,
    lindblad_values: Vec<f64>,
    decoherence_k: f64,
    n_of_q: Arc<Vec<(f64, ComplexMatrix)>>,
    coupling_lambda: f64,
}

fn same_q(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

impl ModelSystem {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn lindblad_values(&self) -> &[f64] {
        &self.lindblad_values
    }

    pub fn decoherence_k(&self) -> f64 {
        self.decoherence_k
    }

    pub fn coupling_lambda(&self) -> f64 {
        self.coupling_lambda
    }

    /// Same model with a different dephasing constant. The `n(q)` table is shared.
    pub fn with_decoherence(&self, k: f64) -> Result<Self> {
        check_k(k)?;
        Ok(Self {
            decoherence_k: k,
            ..self.clone()
        })
    }

    pub fn with_coupling(&self, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self {
            coupling_lambda: lambda,
            ..self.clone()
        })
    }

    pub fn q_labels(&self) -> Vec<f64> {
        self.n_of_q.iter().map(|(q, _)| *q).collect()
    }

    pub fn n_of_q(&self, q: f64) -> Option<&ComplexMatrix> {
        self.n_of_q
            .iter()
            .find(|(k, _)| same_q(*k, q))
            .map(|(_, m)| m)
    }

    /// `(n(q), n(-q))`, both of which must be stored.
    pub fn n_pair(&self, q: f64) -> Result<(&ComplexMatrix, &ComplexMatrix)> {
        let plus = self.n_of_q(q).ok_or(Error::MissingMomentum(q))?;
        let minus = self.n_of_q(-q).ok_or(Error::MissingMomentum(-q))?;
        Ok((plus, minus))
    }

    /// `H = diag(E_ξ)`.
    pub fn hamiltonian(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&self.energies).expect("dim >= 1")
    }

    /// `X = diag(ξ)`.
    pub fn lindblad_operator(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&self.lindblad_values).expect("dim >= 1")
    }

    /// Smallest non-zero `(ξ′ - ξ)²`, or `None` when all Lindblad values coincide.
    pub fn min_lindblad_gap_sq(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for (i, a) in self.lindblad_values.iter().enumerate() {
            for b in &self.lindblad_values[i + 1..] {
                let d2 = (a - b) * (a - b);
                if d2 > 0.0 && best.is_none_or(|x| d2 < x) {
                    best = Some(d2);
                }
            }
        }
        best
    }
}

fn check_k(k: f64) -> Result<()> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::InvalidModel(format!(
            "decoherence constant K = {k} violates \"K is real and K>0\" (K = 0 is the decoherence-free limit)"
        )));
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !lambda.is_finite() {
        return Err(Error::InvalidModel(format!(
            "coupling lambda = {lambda} is not finite"
        )));
    }
    Ok(())
}

/// Validated construction from explicit data.
///
/// Every `n` matrix must be `dim × dim`. When both `q` and `-q` are
/// supplied they must satisfy `n(-q) = n(q)†` within 1e-10.
pub fn build_custom(
    energies: Vec<f64>,
    lindblad_values: Vec<f64>,
    decoherence_k: f64,
    n_matrices: Vec<(f64, ComplexMatrix)>,
    coupling_lambda: f64,
) -> Result<ModelSystem> {
    let dim = energies.len();
    if dim == 0 {
        return Err(Error::InvalidModel("energies must not be empty".into()));
    }
    if lindblad_values.len() != dim {
        return Err(Error::InvalidModel(format!(
            "energies has length {dim} but lindblad_values has length {}",
            lindblad_values.len()
        )));
    }
    if let Some(e) = energies
        .iter()
        .chain(&lindblad_values)
        .find(|x| !x.is_finite())
    {
        return Err(Error::InvalidModel(format!(
            "energies and lindblad_values must be finite, found {e}"
        )));
    }
    check_k(decoherence_k)?;
    check_lambda(coupling_lambda)?;

    for (i, (q, m)) in n_matrices.iter().enumerate() {
        if !q.is_finite() {
            return Err(Error::InvalidModel(format!(
                "momentum label {q} is not finite"
            )));
        }
        if m.dim() != dim {
            return Err(Error::InvalidModel(format!(
                "n(q = {q}) is {0}x{0} but the model has dim {dim}",
                m.dim()
            )));
        }
        m.check_finite()?;
        if n_matrices[..i].iter().any(|(p, _)| same_q(*p, *q)) {
            return Err(Error::InvalidModel(format!(
                "n(q = {q}) supplied more than once"
            )));
        }
    }
    for (q, m) in &n_matrices {
        if let Some((_, partner)) = n_matrices.iter().find(|(p, _)| same_q(*p, -q)) {
            let deviation = partner.max_abs_diff(&m.dagger());
            if deviation > PAIR_TOLERANCE {
                return Err(Error::InvalidModel(format!(
                    "n†(q)=n(−q) violated at q = {q}: max deviation {deviation:e}"
                )));
            }
        }
    }

    Ok(ModelSystem {
        energies,
        lindblad_values,
        decoherence_k,
        n_of_q: Arc::new(n_matrices),
        coupling_lambda,
    })
}

/// Single particle in a truncated harmonic well.
///
/// `n(q) = exp(-i q X̂)` with `X̂ = (a + a†)/sqrt(2mω)`, for every `q` in
/// `q_list` and its negative. The model starts with `K = 0` and `λ = 1`.
///
/// Columns `j < max(1, dim/4)` are checked: the two highest basis states
/// must carry less than 1e-8 of `Σ_m |⟨m|n(q)|j⟩|²`, otherwise the
/// truncation is reported as insufficient.
pub fn build_oscillator(spec: &OscillatorSpec, q_list: &[f64]) -> Result<ModelSystem> {
    spec.validate()?;
    let dim = spec.dim;
    let x0 = spec.zero_point_length();
    let position = ComplexMatrix::from_fn(dim, |i, j| {
        let hop = if j == i + 1 {
            (j as f64).sqrt()
        } else if i == j + 1 {
            (i as f64).sqrt()
        } else {
            0.0
        };
        Complex64::new(x0 * hop, 0.0)
    })?;

    let mut labels: Vec<f64> = Vec::new();
    for &q in q_list {
        if !q.is_finite() {
            return Err(Error::InvalidModel(format!(
                "momentum label {q} is not finite"
            )));
        }
        for s in [q, -q] {
            let s = if s == 0.0 { 0.0 } else { s };
            if !labels.iter().any(|&p| same_q(p, s)) {
                labels.push(s);
            }
        }
    }

    let checked_columns = (dim / 4).max(1);
    let mut n_matrices = Vec::with_capacity(labels.len());
    for q in labels {
        let generator = position.scale(Complex64::new(0.0, -q));
        let n = matrix_exp(&generator, 1.0)?;
        for col in 0..checked_columns {
            let total: f64 = (0..dim).map(|m| n.get(m, col).norm_sqr()).sum();
            let top: f64 = (dim - 2..dim).map(|m| n.get(m, col).norm_sqr()).sum();
            let weight = top / total.max(f64::MIN_POSITIVE);
            if weight >= TRUNCATION_WEIGHT_LIMIT {
                return Err(Error::TruncationInsufficient { q, dim, weight });
            }
        }
        n_matrices.push((q, n));
    }

    let energies: Vec<f64> = (0..dim).map(|n| spec.omega * (n as f64 + 0.5)).collect();
    let lindblad_values = match spec.x_coupling {
        LindbladCoupling::EnergyIndex => (0..dim).map(|n| n as f64).collect(),
        LindbladCoupling::EnergyValue => energies.clone(),
    };
    build_custom(energies, lindblad_values, 0.0, n_matrices, 1.0)
}

/// Canonical state `e^{-βH}/Z`, diagonal in the pointer basis.
///
/// `beta` is in 1/eV; `f64::INFINITY` gives the (uniformly mixed) ground
/// manifold. Energies are shifted by their minimum before exponentiating.
pub fn thermal_state(model: &ModelSystem, beta: f64) -> Result<DensityMatrix> {
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::OutOfDomain {
            name: "beta",
            requirement: ">= 0",
            value: beta,
        });
    }
    let e_min = model
        .energies()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = model
        .energies()
        .iter()
        .map(|&e| {
            let gap = e - e_min;
            if gap == 0.0 {
                1.0
            } else {
                (-beta * gap).exp()
            }
        })
        .collect();
    let z: f64 = weights.iter().sum();
    let populations: Vec<f64> = weights.iter().map(|w| w / z).collect();
    DensityMatrix::from_populations(&populations)
}
