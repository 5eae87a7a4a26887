//! Diagonal local filters K_A ⊗ K_B (polarization-dependent loss) and their
//! action on two-qubit states.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::qmat::{kron, ComplexMatrix};
use crate::states::{check_theta, TwoQubitState};

/// Smallest unnormalized trace accepted after filtering.
pub const MIN_FILTERED_TRACE: f64 = 1e-12;

/// The named filter pairs used throughout the analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Filtering {
    #[serde(rename = "none")]
    None,
    /// K_A = diag(1/cos θ, 1/sin θ), K_B = I: maps ρ(p, θ) to the Werner state.
    #[serde(rename = "f")]
    F,
    /// K_A = diag(1/√cos θ, 1/√sin θ), K_B = diag(1/√sin θ, 1/√cos θ).
    #[serde(rename = "g")]
    G,
}

impl Filtering {
    pub fn name(self) -> &'static str {
        match self {
            Filtering::None => "none",
            Filtering::F => "f",
            Filtering::G => "g",
        }
    }

    pub fn kind(self) -> FilterKind {
        match self {
            Filtering::None => FilterKind::Identity,
            Filtering::F => FilterKind::F,
            Filtering::G => FilterKind::G,
        }
    }
}

impl fmt::Display for Filtering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Filtering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" | "identity" => Ok(Filtering::None),
            "f" => Ok(Filtering::F),
            "g" => Ok(Filtering::G),
            other => domain(format!("unknown filter '{other}' (expected none, f or g)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterKind {
    F,
    G,
    Identity,
    /// Diagonals of K_A and K_B.
    Custom {
        alice: [f64; 2],
        bob: [f64; 2],
    },
}

/// A pair of diagonal, non-negative single-qubit filters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFilter {
    alice: [f64; 2],
    bob: [f64; 2],
}

fn check_side(side: &str, d: [f64; 2]) -> Result<()> {
    if d.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return domain(format!("{side} filter entries must be finite and non-negative, got {d:?}"));
    }
    if d.iter().all(|&x| x == 0.0) {
        return domain(format!("{side} filter is identically zero"));
    }
    Ok(())
}

impl LocalFilter {
    pub fn new(alice: [f64; 2], bob: [f64; 2]) -> Result<Self> {
        check_side("alice", alice)?;
        check_side("bob", bob)?;
        Ok(Self { alice, bob })
    }

    pub fn identity() -> Self {
        Self { alice: [1.0, 1.0], bob: [1.0, 1.0] }
    }

    /// Builds the requested filter at Schmidt angle `theta`, normalized.
    pub fn make(kind: FilterKind, theta: f64) -> Result<Self> {
        let raw = match kind {
            FilterKind::Identity => Self::identity(),
            FilterKind::Custom { alice, bob } => Self::new(alice, bob)?,
            FilterKind::F => {
                check_theta(theta)?;
                Self::new([1.0 / theta.cos(), 1.0 / theta.sin()], [1.0, 1.0])?
            }
            FilterKind::G => {
                check_theta(theta)?;
                let (rc, rs) = (1.0 / theta.cos().sqrt(), 1.0 / theta.sin().sqrt());
                Self::new([rc, rs], [rs, rc])?
            }
        };
        Ok(raw.normalize())
    }

    pub fn named(filtering: Filtering, theta: f64) -> Result<Self> {
        Self::make(filtering.kind(), theta)
    }

    /// Scales each side so its largest entry is 1.
    pub fn normalize(&self) -> Self {
        let unit = |d: [f64; 2]| {
            let m = d[0].max(d[1]);
            [d[0] / m, d[1] / m]
        };
        Self { alice: unit(self.alice), bob: unit(self.bob) }
    }

    pub fn alice(&self) -> [f64; 2] {
        self.alice
    }

    pub fn bob(&self) -> [f64; 2] {
        self.bob
    }

    pub fn alice_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_diag(&self.alice)
    }

    pub fn bob_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_diag(&self.bob)
    }

    /// K_A ⊗ K_B.
    pub fn operator(&self) -> ComplexMatrix {
        kron(&self.alice_matrix(), &self.bob_matrix())
    }

    /// Applies the filter and renormalizes. `success_prob` is the
    /// unnormalized trace, a probability when the filter is normalized.
    pub fn apply(&self, state: &TwoQubitState) -> Result<Filtered> {
        let k = self.operator();
        let unnormalized = &(&k * state.matrix()) * &k.adjoint();
        let trace = unnormalized.trace().re;
        if trace <= MIN_FILTERED_TRACE {
            return Err(Error::FilteredToZero { trace });
        }
        Ok(Filtered { state: TwoQubitState::from_trusted(unnormalized.scale_real(1.0 / trace)), success_prob: trace })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Filtered {
    pub state: TwoQubitState,
    pub success_prob: f64,
}

/// Applies the named filter at the state's own Schmidt angle.
pub fn apply_named(filtering: Filtering, theta: f64, state: &TwoQubitState) -> Result<Filtered> {
    LocalFilter::named(filtering, theta)?.apply(state)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_4;

    use super::*;
    use crate::qmat::{hermitian_eigenvalues, re};
    use crate::states::{gamma_to_theta, noisy_state, pure_state, StateParams};

    #[test]
    fn f_and_g_balanced_are_identity() {
        for kind in [FilterKind::F, FilterKind::G] {
            let k = LocalFilter::make(kind, FRAC_PI_4).unwrap();
            assert!(k.alice().iter().chain(k.bob().iter()).all(|x| (x - 1.0).abs() < 1e-15));
        }
    }

    #[test]
    fn f_at_gamma_nine() {
        let theta = gamma_to_theta(9.0).unwrap();
        // raw diag(√10/3, √10) divided by √10
        let f = LocalFilter::make(FilterKind::F, theta).unwrap();
        assert!((f.alice()[0] - 1.0 / 3.0).abs() < 1e-15 && f.alice()[1] == 1.0);
        assert_eq!(f.bob(), [1.0, 1.0]);
    }

    #[test]
    fn normalize_examples() {
        let f = LocalFilter::new([2.0, 4.0], [1.0, 1.0]).unwrap().normalize();
        assert_eq!(f.alice(), [0.5, 1.0]);
        assert_eq!(LocalFilter::identity().normalize(), LocalFilter::identity());
    }

    #[test]
    fn invalid_filters() {
        assert!(LocalFilter::new([0.0, 0.0], [1.0, 1.0]).is_err());
        assert!(LocalFilter::new([1.0, -0.1], [1.0, 1.0]).is_err());
        assert!(LocalFilter::make(FilterKind::F, 0.0).is_err());
        assert!(LocalFilter::make(FilterKind::G, 1.0).is_err());
        assert!(LocalFilter::make(FilterKind::Custom { alice: [1.0, 0.0], bob: [0.0, 0.0] }, 0.5).is_err());
    }

    #[test]
    fn identity_filter_is_noop() {
        let rho = noisy_state(StateParams::new(0.37, 0.4).unwrap());
        let out = LocalFilter::identity().apply(&rho).unwrap();
        assert!(out.state.matrix().max_abs_diff(rho.matrix()) < 1e-15);
        assert!((out.success_prob - 1.0).abs() < 1e-15);
    }

    #[test]
    fn filtered_to_zero() {
        // kill |0⟩ on Alice's side of |00⟩
        let product = pure_state(FRAC_PI_4).unwrap();
        let mut m = crate::qmat::ComplexMatrix::zeros(4, 4);
        m[(0, 0)] = re(1.0);
        let ket00 = TwoQubitState::new(m).unwrap();
        let f = LocalFilter::new([0.0, 1.0], [1.0, 1.0]).unwrap();
        assert!(matches!(f.apply(&ket00), Err(Error::FilteredToZero { .. })));
        assert!(f.apply(&product).is_ok());
    }

    #[test]
    fn g_leaves_pure_state_unchanged() {
        for theta in [0.1, 0.32, 0.6, FRAC_PI_4] {
            let psi = pure_state(theta).unwrap();
            let g = LocalFilter::make(FilterKind::G, theta).unwrap();
            // explicit K ρ K† with the 4x4 product written out
            let k = g.operator();
            let mut direct = crate::qmat::ComplexMatrix::zeros(4, 4);
            for i in 0..4 {
                for j in 0..4 {
                    direct[(i, j)] = k[(i, i)] * psi.matrix()[(i, j)] * k[(j, j)];
                }
            }
            let tr = direct.trace().re;
            let direct = direct.scale_real(1.0 / tr);
            let out = g.apply(&psi).unwrap();
            assert!(out.state.matrix().max_abs_diff(&direct) < 1e-14);
            assert!(out.state.matrix().max_abs_diff(psi.matrix()) < 1e-14);
        }
    }

    #[test]
    fn f_produces_werner_on_grid() {
        for i in 0..20 {
            for j in 0..20 {
                let p = i as f64 / 19.0;
                let theta = FRAC_PI_4 * (j as f64 + 1.0) / 20.0;
                let params = StateParams::new(p, theta).unwrap();
                let out = apply_named(Filtering::F, theta, &noisy_state(params)).unwrap();
                let werner = noisy_state(params.balanced());
                assert!(out.state.matrix().max_abs_diff(werner.matrix()) < 1e-10);
                assert!(out.success_prob > 0.0 && out.success_prob <= 1.0 + 1e-15);
            }
        }
    }

    #[test]
    fn success_probability_below_one_for_lossy_filters() {
        let params = StateParams::from_gamma(0.5, 9.0).unwrap();
        let rho = noisy_state(params);
        for filtering in [Filtering::F, Filtering::G] {
            let out = apply_named(filtering, params.theta(), &rho).unwrap();
            assert!(out.success_prob > 0.0 && out.success_prob < 1.0);
            let min = *hermitian_eigenvalues(out.state.matrix()).unwrap().last().unwrap();
            assert!(min >= -1e-9);
        }
    }

    #[test]
    fn filter_names() {
        assert_eq!("G".parse::<Filtering>().unwrap(), Filtering::G);
        assert_eq!("none".parse::<Filtering>().unwrap(), Filtering::None);
        assert!("h".parse::<Filtering>().is_err());
    }
}
