//! Critical mixing parameters p*(γ) for each correlation criterion.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::closed::delta_closed;
use super::{concurrence_margin, horodecki_s, steering_t_zx, unsteerability_tu};
use crate::error::{domain, Error, Result};
use crate::filters::{apply_named, Filtering};
use crate::states::{gamma_to_theta, noisy_state, StateParams};

pub const BISECTION_ITERATIONS: usize = 40;
const MONOTONE_SAMPLES: usize = 11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Criterion {
    Entangled,
    BellNonlocal,
    Steerable,
    /// T_U ≤ ½. Holds below its threshold; p* is the largest certified p.
    UnsteerCertified,
    /// Steerability of the filtered state.
    HiddenSteerF,
    HiddenSteerG,
    /// Bell nonlocality of the filtered state.
    HiddenBellF,
    HiddenBellG,
}

impl Criterion {
    pub const ALL: [Criterion; 8] = [
        Criterion::Entangled,
        Criterion::BellNonlocal,
        Criterion::Steerable,
        Criterion::UnsteerCertified,
        Criterion::HiddenSteerF,
        Criterion::HiddenSteerG,
        Criterion::HiddenBellF,
        Criterion::HiddenBellG,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Entangled => "entangled",
            Criterion::BellNonlocal => "bell",
            Criterion::Steerable => "steer",
            Criterion::UnsteerCertified => "unsteer_root",
            Criterion::HiddenSteerF => "hidden_steer_f",
            Criterion::HiddenSteerG => "hidden_steer_g",
            Criterion::HiddenBellF => "hidden_bell_f",
            Criterion::HiddenBellG => "hidden_bell_g",
        }
    }

    fn filtering(self) -> Filtering {
        match self {
            Criterion::HiddenSteerF | Criterion::HiddenBellF => Filtering::F,
            Criterion::HiddenSteerG | Criterion::HiddenBellG => Filtering::G,
            _ => Filtering::None,
        }
    }

    /// Continuous function of p whose sign change marks the threshold;
    /// positive means the criterion is violated (for UnsteerCertified:
    /// the certificate is lost).
    pub fn margin(self, params: StateParams) -> Result<f64> {
        if self == Criterion::UnsteerCertified {
            return Ok(unsteerability_tu(params) - super::UNSTEER_BOUND);
        }
        let rho = noisy_state(params);
        let state = match self.filtering() {
            Filtering::None => rho,
            f => apply_named(f, params.theta(), &rho)?.state,
        };
        Ok(match self {
            Criterion::Entangled => concurrence_margin(&state),
            Criterion::BellNonlocal | Criterion::HiddenBellF | Criterion::HiddenBellG => {
                horodecki_s(&state) - super::CHSH_LOCAL_BOUND
            }
            _ => steering_t_zx(&state)? - super::STEERING_BOUND,
        })
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .map_or_else(|| domain(format!("unknown criterion '{s}'")), Ok)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    ClosedForm,
    Bisection,
}

/// Critical p at Schmidt ratio γ, or `None` when the margin never changes
/// sign on [0, 1].
pub fn threshold_p(criterion: Criterion, gamma: f64, method: Method) -> Result<Option<f64>> {
    let theta = gamma_to_theta(gamma)?;
    match method {
        Method::ClosedForm => Ok(Some(closed_threshold(criterion, theta))),
        Method::Bisection => bisect(|p| criterion.margin(StateParams::new(p, theta)?), gamma),
    }
}

fn closed_threshold(criterion: Criterion, theta: f64) -> f64 {
    let s2 = (2.0 * theta).sin();
    match criterion {
        Criterion::Entangled => 1.0 / 3.0,
        Criterion::BellNonlocal => 1.0 / (1.0 + s2 * s2).sqrt(),
        Criterion::Steerable => 1.0 / (1.0 + s2),
        Criterion::UnsteerCertified => unsteer_root((2.0 * theta).cos()),
        Criterion::HiddenSteerF => 0.5,
        Criterion::HiddenBellF => std::f64::consts::FRAC_1_SQRT_2,
        // G is the identity at θ = π/4 where the expression is 0/0
        Criterion::HiddenSteerG => delta_closed(theta).unwrap_or(0.5),
        Criterion::HiddenBellG => 1.0 / (1.0 + s2).sqrt(),
    }
}

/// Root in [0, 1] of T_U(p) = ½ at c = cos 2θ, from the quartic
/// f(q) = D² − (1 − q²)²c² − 2q(1 − c²)D, D = 1 − q²c², by safeguarded Newton.
/// f(0) = 1 − c² ≥ 0 and f(1) = −(1 − c²)² ≤ 0.
pub fn unsteer_root(c: f64) -> f64 {
    let c2 = c * c;
    let f = |q: f64| {
        let d = 1.0 - q * q * c2;
        d * d - (1.0 - q * q).powi(2) * c2 - 2.0 * q * (1.0 - c2) * d
    };
    let df = |q: f64| {
        let d = 1.0 - q * q * c2;
        let dd = -2.0 * q * c2;
        2.0 * d * dd + 4.0 * q * (1.0 - q * q) * c2 - 2.0 * (1.0 - c2) * (d + q * dd)
    };
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut q = 0.5;
    for _ in 0..200 {
        let fq = f(q);
        if fq == 0.0 {
            return q;
        }
        if fq > 0.0 {
            lo = q;
        } else {
            hi = q;
        }
        let step = fq / df(q);
        let next = q - step;
        q = if next.is_finite() && next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        if hi - lo < 1e-15 || step.abs() < 1e-16 {
            break;
        }
    }
    q
}

/// Locates the single sign change of `margin` on [0, 1].
fn bisect(mut margin: impl FnMut(f64) -> Result<f64>, gamma: f64) -> Result<Option<f64>> {
    let samples = (0..MONOTONE_SAMPLES)
        .map(|i| {
            let p = i as f64 / (MONOTONE_SAMPLES - 1) as f64;
            margin(p).map(|m| (p, m > 0.0))
        })
        .collect::<Result<Vec<_>>>()?;
    let flips = samples.windows(2).filter(|w| w[0].1 != w[1].1).count();
    if flips > 1 || (flips == 1 && samples[0].1) {
        return Err(Error::NotMonotone { gamma });
    }
    if samples[0].1 {
        return Ok(Some(0.0));
    }
    let Some(i) = samples.iter().position(|s| s.1) else {
        return Ok(None);
    };
    let (mut lo, mut hi) = (samples[i - 1].0, samples[i].0);
    for _ in 0..BISECTION_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if margin(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}
