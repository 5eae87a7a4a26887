//! Closed-form expressions for the family ρ(p, θ) and its filtered images.
//! These serve as cross-checks on the matrix path.
//!
//! Functions with a `_reference` suffix reproduce expressions exactly as
//! they circulate for this family. That includes the ones that disagree
//! with the density matrix; the crosscheck module quantifies the gap.

use crate::filters::Filtering;
use crate::states::StateParams;

/// csc θ sec θ = 1/(sin θ cos θ), ≥ 2 on (0, π/4].
pub fn csc_sec(theta: f64) -> f64 {
    1.0 / (theta.sin() * theta.cos())
}

/// Twice the unnormalized trace of the G-filtered state (filter scaled so the
/// corner entries stay p sinθ cosθ): (p+1) csc θ sec θ − 2p + 2.
pub fn g_norm(params: StateParams) -> f64 {
    let p = params.p();
    (p + 1.0) * csc_sec(params.theta()) - 2.0 * p + 2.0
}

/// Pauli correlations (x, −x, z) of the G-filtered state.
pub fn g_correlations(params: StateParams) -> (f64, f64) {
    let p = params.p();
    let n = g_norm(params);
    let z = ((p + 1.0) * csc_sec(params.theta()) - 2.0 + 2.0 * p) / n;
    (4.0 * p / n, z)
}

pub fn concurrence_closed(params: StateParams, filtering: Filtering) -> f64 {
    let p = params.p();
    let value = match filtering {
        Filtering::None => (3.0 * p - 1.0) * params.theta().sin() * params.theta().cos(),
        Filtering::F => (3.0 * p - 1.0) / 2.0,
        Filtering::G => (6.0 * p - 2.0) / g_norm(params),
    };
    value.max(0.0)
}

/// Eigenvalues λ₁ ≥ λ₂ = λ₃ = λ₄ of ρ·ρ̃.
pub fn concurrence_spectrum_closed(params: StateParams, filtering: Filtering) -> [f64; 4] {
    let p = params.p();
    let (big, small) = match filtering {
        Filtering::None => {
            let sc = params.theta().sin() * params.theta().cos();
            (sc * (1.0 + 3.0 * p) / 2.0, sc * (1.0 - p) / 2.0)
        }
        Filtering::F => ((1.0 + 3.0 * p) / 4.0, (1.0 - p) / 4.0),
        Filtering::G => {
            let n = g_norm(params);
            ((3.0 * p + 1.0) / n, (1.0 - p) / n)
        }
    };
    [big * big, small * small, small * small, small * small]
}

/// The ρ_G spectrum in its reference form, with λ₂..₄ left unsquared.
pub fn concurrence_spectrum_g_reference(params: StateParams) -> [f64; 4] {
    let p = params.p();
    let n = g_norm(params);
    let small = (1.0 - p) / n;
    [((3.0 * p + 1.0) / n).powi(2), small, small, small]
}

/// (Γ₁, Γ₂), the two largest eigenvalues of ΛᵀΛ, sorted descending.
pub fn horodecki_gammas_closed(params: StateParams, filtering: Filtering) -> (f64, f64) {
    let p = params.p();
    let (a, b) = match filtering {
        Filtering::None => (p * p, (p * params.sin_2theta()).powi(2)),
        Filtering::F => (p * p, p * p),
        Filtering::G => {
            let (x, z) = g_correlations(params);
            (x * x, z * z)
        }
    };
    (a.max(b), a.min(b))
}

pub fn horodecki_s_closed(params: StateParams, filtering: Filtering) -> f64 {
    let (g1, g2) = horodecki_gammas_closed(params, filtering);
    2.0 * (g1 + g2).sqrt()
}

/// S of ρ_G in its expanded rational reference form. `None` at p = 0,
/// θ = π/4, where it is 0/0.
pub fn horodecki_s_g_reference(params: StateParams) -> Option<f64> {
    let p = params.p();
    let k = csc_sec(params.theta());
    let csc2 = 1.0 / params.sin_2theta().powi(2);
    let num = 8.0 * ((p * p - 1.0) * k + (p + 1.0).powi(2) * csc2 + p * (5.0 * p - 2.0) + 1.0);
    let root = (16.0 * p * p / ((p + 1.0) * k + 2.0 * (p - 1.0)).powi(2) + 1.0).sqrt();
    let den = (4.0 * (p + 1.0).powi(2) * csc2 - 4.0 * (p - 1.0).powi(2)) * root;
    (den.abs() > 1e-12).then(|| num / den)
}

/// The reference polynomial inequality for Bell nonlocality of ρ_G.
pub fn bell_condition_g_reference(params: StateParams) -> bool {
    let p = params.p();
    let k = csc_sec(params.theta());
    let csc2 = 1.0 / params.sin_2theta().powi(2);
    let lhs = (p * p - 1.0) * k + 5.0 * p * p + (p + 1.0).powi(2) * csc2 - 2.0 * p + 1.0;
    lhs > 0.5 * g_norm(params).powi(2)
}

/// Γ₁ + Γ₂ > 1 for ρ_G reduces to 2p² > (1 − p²) csc θ sec θ.
pub fn bell_condition_g(params: StateParams) -> bool {
    let p = params.p();
    2.0 * p * p > (1.0 - p * p) * csc_sec(params.theta())
}

/// P(0|0) for σ_z on both sides of ρ_G.
pub fn g_conditional_z(params: StateParams) -> f64 {
    let p = params.p();
    let ct = 1.0 / params.theta().tan();
    (p + 1.0) * ct / ((p + 1.0) * ct - p + 1.0)
}

/// P(0|0) for σ_x on both sides of ρ_G: (1 + ⟨XX⟩)/2, Alice's σ_x marginal being ½.
pub fn g_conditional_x(params: StateParams) -> f64 {
    0.5 + 2.0 * params.p() / g_norm(params)
}

pub fn g_conditional_x_reference(params: StateParams) -> f64 {
    2.0 * params.p() / g_norm(params)
}

/// T for outcomes a = b = 0 with σ_z then σ_x on both sides.
pub fn steering_t_closed(params: StateParams, filtering: Filtering) -> f64 {
    let p = params.p();
    match filtering {
        Filtering::None => (2.0 + p + p * params.sin_2theta()) / 4.0,
        Filtering::F => (1.0 + p) / 2.0,
        Filtering::G => 0.5 * (g_conditional_z(params) + g_conditional_x(params)),
    }
}

/// T of ρ_G in its reference form; differs from the matrix value by exactly ¼.
pub fn steering_t_g_reference(params: StateParams) -> f64 {
    let p = params.p();
    let t = params.theta().tan();
    1.0 / (2.0 - 2.0 * (p - 1.0) * t / (p + 1.0)) + p / g_norm(params)
}

/// |denominator| below which δ(θ) is treated as the 0/0 point θ = π/4.
pub const DELTA_SINGULAR: f64 = 1e-7;

/// Reference expression for the onset of steerability of ρ_G. `None` near
/// θ = π/4, where numerator and denominator both vanish.
pub fn delta_closed(theta: f64) -> Option<f64> {
    let (s, c) = theta.sin_cos();
    let cot = c / s;
    let (s2, c2) = (2.0 * theta).sin_cos();
    let den = 2.0 * (-2.0 * s2 + c2 + 2.0);
    if den.abs() < DELTA_SINGULAR {
        return None;
    }
    let radicand = 6.0 * s2 + 5.0 * (4.0 * theta).sin() + 6.0 * c2 + 10.0;
    let num = cot - c * c * (cot + 2.0) - 7.0 * s * c + radicand.sqrt();
    Some(num / den)
}

/// Onset of ρ_G steerability solved from T_G = ¾ with the corrected
/// conditionals: with u = (p+1)cot θ, w = 1 − p and N = (p+1)k + 2w,
/// u/(u+w) + 2p/N = 1 ⇔ 2p(u + w) = wN, a quadratic in p.
pub fn delta_corrected(theta: f64) -> f64 {
    let cot = 1.0 / theta.tan();
    let k = csc_sec(theta);
    // 2p((p+1)cot + 1 − p) − (1 − p)((p+1)k + 2 − 2p) = a p² + b p + c₀
    let a = 2.0 * cot + k - 4.0;
    let b = 2.0 * cot + 6.0;
    let c0 = -(k + 2.0);
    // b > 0 and c₀ < 0: the positive root in cancellation-free form
    2.0 * c0 / (-b - (b * b - 4.0 * a * c0).sqrt())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_4;

    use super::*;

    fn params(p: f64, gamma: f64) -> StateParams {
        StateParams::from_gamma(p, gamma).unwrap()
    }

    #[test]
    fn concurrence_examples() {
        assert!((concurrence_closed(StateParams::new(1.0, FRAC_PI_4).unwrap(), Filtering::None) - 1.0).abs() < 1e-15);
        for f in [Filtering::None, Filtering::G] {
            assert!(concurrence_closed(params(1.0 / 3.0, 7.0), f).abs() < 1e-15);
        }
        assert!((concurrence_closed(params(0.5, 9.0), Filtering::G) - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn g_norm_at_gamma_nine() {
        assert!((csc_sec(params(0.5, 9.0).theta()) - 10.0 / 3.0).abs() < 1e-14);
        assert!((g_norm(params(0.8, 9.0)) - 6.4).abs() < 1e-13);
        let (x, z) = g_correlations(params(0.8, 9.0));
        assert!((x - 0.5).abs() < 1e-14 && (z - 0.875).abs() < 1e-14);
    }

    #[test]
    fn s_reference_matches_gammas() {
        for (p, gamma) in [(0.5, 1.0), (0.8, 9.0), (0.95, 40.0), (0.2, 3.0)] {
            let prm = params(p, gamma);
            let a = horodecki_s_g_reference(prm).unwrap();
            let b = horodecki_s_closed(prm, Filtering::G);
            assert!((a - b).abs() < 1e-12, "p={p} γ={gamma}: {a} vs {b}");
        }
    }

    #[test]
    fn s_reference_singular_point() {
        assert!(horodecki_s_g_reference(StateParams::new(0.0, FRAC_PI_4).unwrap()).is_none());
    }

    #[test]
    fn reference_bell_inequality_never_fires_below_pure_bell_state() {
        // 2.0156 > 2 at (0.8, γ=9), yet the polynomial inequality is false
        let prm = params(0.8, 9.0);
        assert!(bell_condition_g(prm));
        assert!(!bell_condition_g_reference(prm));
    }

    #[test]
    fn bell_condition_g_threshold() {
        // 2p² > (1 − p²)k  ⇔  p > 1/√(1 + sin 2θ)
        for gamma in [1.0, 4.0, 9.0, 60.0] {
            let prm = params(0.5, gamma);
            let pc = 1.0 / (1.0 + prm.sin_2theta()).sqrt();
            assert!(bell_condition_g(params(pc + 1e-9, gamma)));
            assert!(!bell_condition_g(params(pc - 1e-9, gamma)));
        }
    }

    #[test]
    fn steering_g_values() {
        let prm = params(0.5, 9.0);
        assert!((g_conditional_z(prm) - 0.9).abs() < 1e-14);
        assert!((g_conditional_x(prm) - 2.0 / 3.0).abs() < 1e-14);
        let bell = StateParams::new(1.0, FRAC_PI_4).unwrap();
        assert!((g_conditional_x_reference(bell) - 0.5).abs() < 1e-15);
        assert!((steering_t_closed(bell, Filtering::G) - 1.0).abs() < 1e-15);
        for (p, gamma) in [(0.3, 2.0), (0.5, 9.0), (0.9, 70.0)] {
            let prm = params(p, gamma);
            let gap = steering_t_closed(prm, Filtering::G) - steering_t_g_reference(prm);
            assert!((gap - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn delta_matches_corrected_root() {
        // values from an independent root finder
        let table = [(4.0, 0.4083189158), (9.0, 0.3801993223), (25.0, 0.3595211699), (100.0, 0.3455326205)];
        for (gamma, expected) in table {
            let theta = params(0.5, gamma).theta();
            let d = delta_closed(theta).unwrap();
            assert!((d - expected).abs() < 1e-9, "γ={gamma}: {d}");
            assert!((delta_corrected(theta) - expected).abs() < 1e-9);
        }
        assert!(delta_closed(FRAC_PI_4).is_none());
        assert!((delta_corrected(FRAC_PI_4) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn delta_corrected_solves_t_equals_three_quarters() {
        for gamma in [1.5, 9.0, 33.0] {
            let theta = params(0.5, gamma).theta();
            let d = delta_corrected(theta);
            let t = steering_t_closed(StateParams::new(d, theta).unwrap(), Filtering::G);
            assert!((t - 0.75).abs() < 1e-13);
        }
    }
}
