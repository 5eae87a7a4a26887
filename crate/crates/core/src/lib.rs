//! Two-qubit correlation analysis for the noisy family
//! ρ(p, θ) = p|ψθ⟩⟨ψθ| + (1 − p) ρ_A ⊗ I/2, |ψθ⟩ = cos θ|00⟩ + sin θ|11⟩:
//! concurrence, CHSH, fine-grained steering, an unsteerability certificate,
//! local filtering, phase-diagram scans and a photon-counting simulator.

pub mod correlations;
pub mod error;
pub mod expsim;
pub mod filters;
pub mod phasemap;
pub mod qmat;
pub mod states;

pub use error::{Error, Result};
