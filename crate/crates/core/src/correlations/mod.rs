//! Entanglement, Bell nonlocality and steering measures evaluated on
//! density matrices, plus the labels derived from them.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::filters::Filtering;
use crate::qmat::{self, kron, pauli, re, ComplexMatrix};
use crate::states::{noisy_state, StateParams, TwoQubitState};

pub mod closed;
pub mod crosscheck;
pub mod thresholds;

pub use thresholds::{threshold_p, Criterion, Method};

/// Local-hidden-variable bound of the CHSH expression.
pub const CHSH_LOCAL_BOUND: f64 = 2.0;
/// Bound of the fine-grained steering inequality.
pub const STEERING_BOUND: f64 = 0.75;
/// T_U at or below this value certifies unsteerability.
pub const UNSTEER_BOUND: f64 = 0.5;
/// A bound counts as violated only when exceeded by more than this.
pub const LABEL_MARGIN: f64 = 1e-9;

/// Eigenvalues of ρ below this fraction of the largest are treated as zero
/// when forming √ρ.
const RANK_CUTOFF: f64 = 1e-14;

/// A projective qubit measurement along a unit Bloch vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSetting {
    bloch: [f64; 3],
}

impl MeasurementSetting {
    pub fn new(bloch: [f64; 3]) -> Result<Self> {
        let norm = bloch.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return domain(format!("Bloch vector {bloch:?} is not a unit vector"));
        }
        Ok(Self { bloch })
    }

    /// cos φ σ_z + sin φ σ_x.
    pub fn xz_angle(phi: f64) -> Self {
        Self { bloch: [phi.sin(), 0.0, phi.cos()] }
    }

    pub fn sigma_x() -> Self {
        Self { bloch: [1.0, 0.0, 0.0] }
    }

    pub fn sigma_y() -> Self {
        Self { bloch: [0.0, 1.0, 0.0] }
    }

    pub fn sigma_z() -> Self {
        Self { bloch: [0.0, 0.0, 1.0] }
    }

    pub fn bloch(&self) -> [f64; 3] {
        self.bloch
    }

    /// n · σ.
    pub fn observable(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(2, 2);
        for (k, &n) in self.bloch.iter().enumerate() {
            if n != 0.0 {
                m = &m + &pauli(k + 1).scale_real(n);
            }
        }
        m
    }

    /// Projector for outcome 0 (the +1 eigenvector) or 1 (the −1 eigenvector).
    pub fn projector(&self, outcome: u8) -> ComplexMatrix {
        let sign = if outcome == 0 { 0.5 } else { -0.5 };
        &ComplexMatrix::identity(2).scale_real(0.5) + &self.observable().scale_real(sign)
    }
}

/// Pauli correlation matrix Λ_ij = Tr[σ_i ⊗ σ_j ρ], i, j ∈ {x, y, z}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix(pub [[f64; 3]; 3]);

impl CorrelationMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    fn as_complex(&self) -> ComplexMatrix {
        let data = self.0.iter().flatten().map(|&x| re(x)).collect();
        ComplexMatrix::new(3, 3, data).expect("3x3 finite")
    }

    /// Singular values of Λ, descending. Their squares are the eigenvalues of ΛᵀΛ.
    pub fn singular_values(&self) -> [f64; 3] {
        let sv = qmat::singular_values(&self.as_complex()).expect("Jacobi SVD converges for 3x3");
        [sv[0], sv[1], sv[2]]
    }
}

pub fn correlation_matrix(state: &TwoQubitState) -> CorrelationMatrix {
    let mut t = [[0.0; 3]; 3];
    for (i, row) in t.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = state.expectation(&kron(&pauli(i + 1), &pauli(j + 1)));
        }
    }
    CorrelationMatrix(t)
}

/// The two largest eigenvalues of ΛᵀΛ, Γ₁ ≥ Γ₂.
pub fn horodecki_gammas(state: &TwoQubitState) -> (f64, f64) {
    let sv = correlation_matrix(state).singular_values();
    (sv[0] * sv[0], sv[1] * sv[1])
}

/// Maximal CHSH value over all local qubit observables, 2√(Γ₁ + Γ₂).
pub fn horodecki_s(state: &TwoQubitState) -> f64 {
    let sv = correlation_matrix(state).singular_values();
    2.0 * sv[0].hypot(sv[1])
}

/// Square roots of the eigenvalues of ρ·ρ̃ (ρ̃ = σ_y⊗σ_y ρ* σ_y⊗σ_y),
/// descending. Obtained as singular values of √ρ·√ρ̃, whose squares are the
/// eigenvalues of the Hermitian matrix √ρ ρ̃ √ρ.
pub fn concurrence_roots(state: &TwoQubitState) -> [f64; 4] {
    let yy = kron(&pauli(2), &pauli(2));
    let sqrt_rho = qmat::psd_sqrt_truncated(state.matrix(), RANK_CUTOFF).expect("valid state is Hermitian PSD");
    let sqrt_tilde = &(&yy * &sqrt_rho.conj()) * &yy;
    let sv = qmat::singular_values(&(&sqrt_rho * &sqrt_tilde)).expect("Jacobi SVD converges for 4x4");
    [sv[0], sv[1], sv[2], sv[3]]
}

/// Eigenvalues λ₁ ≥ … ≥ λ₄ ≥ 0 of ρ·ρ̃.
pub fn concurrence_spectrum(state: &TwoQubitState) -> [f64; 4] {
    concurrence_roots(state).map(|x| x * x)
}

/// √λ₁ − √λ₂ − √λ₃ − √λ₄, positive exactly for entangled states.
pub fn concurrence_margin(state: &TwoQubitState) -> f64 {
    let r = concurrence_roots(state);
    r[0] - r[1] - r[2] - r[3]
}

pub fn concurrence(state: &TwoQubitState) -> f64 {
    concurrence_margin(state).max(0.0)
}

/// ⟨(a·σ) ⊗ (b·σ)⟩.
pub fn correlator(state: &TwoQubitState, a: &MeasurementSetting, b: &MeasurementSetting) -> f64 {
    state.expectation(&kron(&a.observable(), &b.observable()))
}

/// Alice's two and Bob's two CHSH observables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSettings {
    pub a1: MeasurementSetting,
    pub a2: MeasurementSetting,
    pub b1: MeasurementSetting,
    pub b2: MeasurementSetting,
}

impl ChshSettings {
    /// The four (A_i, B_j) pairs in CHSH order with their signs.
    pub fn pairs(&self) -> [(MeasurementSetting, MeasurementSetting, f64); 4] {
        [(self.a1, self.b1, 1.0), (self.a1, self.b2, 1.0), (self.a2, self.b1, 1.0), (self.a2, self.b2, -1.0)]
    }
}

/// Tr[(A₁B₁ + A₁B₂ + A₂B₁ − A₂B₂) ρ].
pub fn chsh_value(
    state: &TwoQubitState,
    a1: &MeasurementSetting,
    a2: &MeasurementSetting,
    b1: &MeasurementSetting,
    b2: &MeasurementSetting,
) -> f64 {
    correlator(state, a1, b1) + correlator(state, a1, b2) + correlator(state, a2, b1) - correlator(state, a2, b2)
}

pub fn chsh_with(state: &TwoQubitState, settings: &ChshSettings) -> f64 {
    chsh_value(state, &settings.a1, &settings.a2, &settings.b1, &settings.b2)
}

/// Bob's angles φ₁, φ₂ (B = cos φ σ_z + sin φ σ_x) maximizing CHSH with
/// A₁ = σ_x, A₂ = σ_z for the unfiltered, F- or G-filtered family member.
///
/// For Λ = diag(x, −x, z) the CHSH value is x(sin φ₁ + sin φ₂) + z(cos φ₁ − cos φ₂),
/// maximized by tan φ₁ = x/z, φ₂ = π − φ₁.
pub fn optimal_bob_angles(params: StateParams, filtering: Filtering) -> (f64, f64) {
    let ratio = match filtering {
        Filtering::None => params.sin_2theta(),
        Filtering::F => 1.0,
        Filtering::G => {
            let p = params.p();
            4.0 * p / ((p + 1.0) * closed::csc_sec(params.theta()) + 2.0 * (p - 1.0))
        }
    };
    let phi1 = ratio.atan();
    (phi1, std::f64::consts::PI - phi1)
}

pub fn optimal_chsh_settings(params: StateParams, filtering: Filtering) -> ChshSettings {
    let (phi1, phi2) = optimal_bob_angles(params, filtering);
    ChshSettings {
        a1: MeasurementSetting::sigma_x(),
        a2: MeasurementSetting::sigma_z(),
        b1: MeasurementSetting::xz_angle(phi1),
        b2: MeasurementSetting::xz_angle(phi2),
    }
}

/// Operational conditional P(b on B | a on A) = Tr[(Π_a ⊗ Π_b) ρ] / Tr[(Π_a ⊗ I) ρ].
pub fn conditional_probability(
    state: &TwoQubitState,
    alice: &MeasurementSetting,
    bob: &MeasurementSetting,
    a: u8,
    b: u8,
) -> Result<f64> {
    let pa = alice.projector(a);
    let joint = state.expectation(&kron(&pa, &bob.projector(b)));
    let marginal = state.expectation(&kron(&pa, &ComplexMatrix::identity(2)));
    if marginal <= 1e-12 {
        return Err(Error::UndefinedConditional { outcome: a, marginal });
    }
    Ok(joint / marginal)
}

/// Fine-grained steering parameter T = ½[P(b|a)₁ + P(b|a)₂].
pub fn steering_t(
    state: &TwoQubitState,
    alice1: &MeasurementSetting,
    bob1: &MeasurementSetting,
    alice2: &MeasurementSetting,
    bob2: &MeasurementSetting,
    (a, b): (u8, u8),
) -> Result<f64> {
    let first = conditional_probability(state, alice1, bob1, a, b)?;
    let second = conditional_probability(state, alice2, bob2, a, b)?;
    Ok(0.5 * (first + second))
}

/// T with both parties measuring σ_z then σ_x, outcomes a = b = 0.
pub fn steering_t_zx(state: &TwoQubitState) -> Result<f64> {
    let (z, x) = (MeasurementSetting::sigma_z(), MeasurementSetting::sigma_x());
    steering_t(state, &z, &z, &x, &x, (0, 0))
}

/// Sufficient unsteerability certificate T_U = (A² + 2|B|)/2 for ρ(p, θ)
/// (Alice to Bob); T_U ≤ 1/2 guarantees a local-hidden-state model.
pub fn unsteerability_tu(params: StateParams) -> f64 {
    let (p, c) = (params.p(), params.cos_2theta());
    let denom = 1.0 - p * p * c * c;
    let a = (1.0 - p * p) * c / denom;
    let b = p * (1.0 - c * c) / denom;
    (a * a + 2.0 * b.abs()) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Separable,
    Entangled,
    BellNonlocal,
    Steerable,
    UnsteerCertified,
    Indeterminate,
}

impl Label {
    pub fn name(self) -> &'static str {
        match self {
            Label::Separable => "Separable",
            Label::Entangled => "Entangled",
            Label::BellNonlocal => "BellNonlocal",
            Label::Steerable => "Steerable",
            Label::UnsteerCertified => "UnsteerCertified",
            Label::Indeterminate => "Indeterminate",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Concurrence, CHSH and steering values of one state with its labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub concurrence: f64,
    #[serde(rename = "bell_S")]
    pub bell_s: f64,
    #[serde(rename = "steering_T")]
    pub steering_t: f64,
    /// Only defined for members of the unfiltered family.
    #[serde(rename = "unsteer_TU")]
    pub unsteer_tu: Option<f64>,
    pub labels: BTreeSet<Label>,
}

impl CorrelationReport {
    pub fn for_state(state: &TwoQubitState, unsteer_tu: Option<f64>) -> Result<Self> {
        let concurrence = concurrence(state);
        let bell_s = horodecki_s(state);
        let steering_t = steering_t_zx(state)?;
        Ok(Self {
            concurrence,
            bell_s,
            steering_t,
            unsteer_tu,
            labels: classify(concurrence, bell_s, steering_t, unsteer_tu),
        })
    }

    pub fn for_params(params: StateParams) -> Result<Self> {
        Self::for_state(&noisy_state(params), Some(unsteerability_tu(params)))
    }

    pub fn has(&self, label: Label) -> bool {
        self.labels.contains(&label)
    }
}

/// Label assignment. Bell nonlocality implies steerability, which implies
/// entanglement; labels are closed under these implications.
pub fn classify(concurrence: f64, bell_s: f64, steering_t: f64, unsteer_tu: Option<f64>) -> BTreeSet<Label> {
    let bell = bell_s > CHSH_LOCAL_BOUND + LABEL_MARGIN;
    let steerable = bell || steering_t > STEERING_BOUND + LABEL_MARGIN;
    let entangled = steerable || concurrence > LABEL_MARGIN;
    let certified = unsteer_tu.is_some_and(|tu| tu <= UNSTEER_BOUND + LABEL_MARGIN);

    let mut labels = BTreeSet::new();
    labels.insert(if entangled { Label::Entangled } else { Label::Separable });
    if bell {
        labels.insert(Label::BellNonlocal);
    }
    if steerable {
        labels.insert(Label::Steerable);
    }
    if certified {
        labels.insert(Label::UnsteerCertified);
    }
    if entangled && !steerable && !certified {
        labels.insert(Label::Indeterminate);
    }
    labels
}
