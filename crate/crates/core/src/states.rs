//! The noisy partially-entangled state family
//! ρ(p, θ) = p |ψ_θ⟩⟨ψ_θ| + (1 − p) ρ_A ⊗ I/2, with |ψ_θ⟩ = cos θ |00⟩ + sin θ |11⟩.
//!
//! Basis order is |00⟩, |01⟩, |10⟩, |11⟩ (Alice is the left factor).

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::qmat::{self, re, ComplexMatrix, C64};

/// Trace and Hermiticity tolerance for a valid density matrix.
pub const STATE_TOL: f64 = 1e-10;

/// Mixing weight `p` and Schmidt angle `theta`. γ = cot²θ is derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateParams {
    p: f64,
    theta: f64,
}

impl StateParams {
    pub fn new(p: f64, theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return domain(format!("p = {p} outside [0, 1]"));
        }
        check_theta(theta)?;
        Ok(Self { p, theta: theta.min(FRAC_PI_4) })
    }

    pub fn from_gamma(p: f64, gamma: f64) -> Result<Self> {
        Self::new(p, gamma_to_theta(gamma)?)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn gamma(&self) -> f64 {
        theta_to_gamma(self.theta)
    }

    pub fn sin_2theta(&self) -> f64 {
        (2.0 * self.theta).sin()
    }

    pub fn cos_2theta(&self) -> f64 {
        (2.0 * self.theta).cos()
    }

    /// Same noise level with the Schmidt angle moved to π/4 (the Werner state).
    pub fn balanced(&self) -> Self {
        Self { p: self.p, theta: FRAC_PI_4 }
    }
}

pub(crate) fn check_theta(theta: f64) -> Result<()> {
    // allow π/4 computed through arctan/arccot to land one ulp above
    if !(theta > 0.0 && theta <= FRAC_PI_4 * (1.0 + 4.0 * f64::EPSILON)) {
        return domain(format!("theta = {theta} outside (0, pi/4]"));
    }
    Ok(())
}

/// θ = arccot √γ, for γ ≥ 1.
pub fn gamma_to_theta(gamma: f64) -> Result<f64> {
    if !gamma.is_finite() || gamma < 1.0 {
        return domain(format!("gamma = {gamma} must be finite and >= 1"));
    }
    if gamma == 1.0 {
        return Ok(FRAC_PI_4);
    }
    Ok((1.0 / gamma.sqrt()).atan())
}

pub fn theta_to_gamma(theta: f64) -> f64 {
    let t = theta.tan();
    1.0 / (t * t)
}

/// A validated two-qubit density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    rho: ComplexMatrix,
}

impl TwoQubitState {
    /// Validates Hermiticity, unit trace and positivity (eigenvalues ≥ −1e−9).
    pub fn new(rho: ComplexMatrix) -> Result<Self> {
        if rho.rows() != 4 || rho.cols() != 4 {
            return Err(Error::Dimension(format!(
                "two-qubit state needs a 4x4 matrix, got {}x{}",
                rho.rows(),
                rho.cols()
            )));
        }
        let deviation = rho.hermitian_deviation();
        if deviation > STATE_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min = *qmat::hermitian_eigenvalues(&rho)?.last().expect("4 eigenvalues");
        if min < -qmat::PSD_TOL {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        Ok(Self { rho })
    }

    /// Wraps a matrix already known to satisfy the invariants.
    pub(crate) fn from_trusted(rho: ComplexMatrix) -> Self {
        debug_assert!(rho.rows() == 4 && rho.cols() == 4);
        Self { rho }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.rho
    }

    pub fn maximally_mixed() -> Self {
        Self::from_trusted(ComplexMatrix::identity(4).scale_real(0.25))
    }

    /// Expectation value Tr[O ρ] of a Hermitian observable.
    pub fn expectation(&self, observable: &ComplexMatrix) -> f64 {
        observable.trace_product(&self.rho).re
    }

    /// Alice's reduced state Tr_B ρ.
    pub fn reduced_a(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(2, 2);
        for a in 0..2 {
            for a2 in 0..2 {
                out[(a, a2)] = (0..2).map(|b| self.rho[(2 * a + b, 2 * a2 + b)]).sum();
            }
        }
        out
    }

    /// Bob's reduced state Tr_A ρ.
    pub fn reduced_b(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(2, 2);
        for b in 0..2 {
            for b2 in 0..2 {
                out[(b, b2)] = (0..2).map(|a| self.rho[(2 * a + b, 2 * a + b2)]).sum();
            }
        }
        out
    }

    /// Fidelity ⟨ψ|ρ|ψ⟩ with a pure state given by its amplitudes.
    pub fn fidelity_with_pure(&self, psi: &[C64; 4]) -> f64 {
        let mut acc = C64::default();
        for i in 0..4 {
            for j in 0..4 {
                acc += psi[i].conj() * self.rho[(i, j)] * psi[j];
            }
        }
        acc.re
    }
}

/// Amplitudes of cos θ |00⟩ + sin θ |11⟩.
pub fn pure_amplitudes(theta: f64) -> [C64; 4] {
    [re(theta.cos()), re(0.0), re(0.0), re(theta.sin())]
}

pub fn pure_state(theta: f64) -> Result<TwoQubitState> {
    check_theta(theta)?;
    let psi = pure_amplitudes(theta);
    Ok(TwoQubitState::from_trusted(ComplexMatrix::outer(&psi, &psi)))
}

pub fn noisy_state(params: StateParams) -> TwoQubitState {
    let theta = params.theta();
    let p = params.p();
    let psi = pure_amplitudes(theta);
    let projector = ComplexMatrix::outer(&psi, &psi);
    let (c2, s2) = (theta.cos().powi(2), theta.sin().powi(2));
    let rho_a = ComplexMatrix::from_real_diag(&[c2, s2]);
    let noise = qmat::kron(&rho_a, &ComplexMatrix::identity(2).scale_real(0.5));
    let rho = &projector.scale_real(p) + &noise.scale_real(1.0 - p);
    TwoQubitState::from_trusted(rho)
}

/// p · Bell + (1 − p) · I/4.
pub fn werner_state(p: f64) -> Result<TwoQubitState> {
    Ok(noisy_state(StateParams::new(p, FRAC_PI_4)?))
}

/// JSON form: row-major real and imaginary parts plus optional (p, θ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub p: f64,
    pub theta: f64,
}

impl StateJson {
    pub fn from_state(state: &TwoQubitState, params: Option<StateParams>) -> Self {
        Self {
            re: state.matrix().real_parts(),
            im: state.matrix().imag_parts(),
            provenance: params.map(|s| Provenance { p: s.p(), theta: s.theta() }),
        }
    }

    pub fn to_state(&self) -> Result<TwoQubitState> {
        if self.re.len() != 16 || self.im.len() != 16 {
            return Err(Error::Dimension(format!(
                "state JSON needs 16 real and 16 imaginary entries, got {} and {}",
                self.re.len(),
                self.im.len()
            )));
        }
        if let Some(prov) = self.provenance {
            StateParams::new(prov.p, prov.theta)?;
        }
        TwoQubitState::new(ComplexMatrix::from_parts(4, 4, &self.re, &self.im)?)
    }
}
