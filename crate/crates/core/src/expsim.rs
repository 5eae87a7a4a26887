//! Photon-counting simulation: joint detection probabilities, coincidence
//! sampling with accidental background, count-based estimators and
//! tomography of the source state.

use std::f64::consts::FRAC_PI_4;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlations::{
    chsh_with, optimal_chsh_settings, steering_t_zx, unsteerability_tu, ChshSettings, MeasurementSetting,
};
use crate::error::{domain, Error, Result};
use crate::filters::{apply_named, Filtering};
use crate::qmat::{hermitian_eigen, kron, pauli, ComplexMatrix};
use crate::states::{pure_state, StateParams, TwoQubitState};

/// P(a, b) indexed `[a][b]`, outcome 0 being the +1 eigenvector.
pub type ProbTable = [[f64; 2]; 2];

pub const DEFAULT_N_PER_SETTING: u64 = 2000;
pub const DEFAULT_ACCIDENTALS: f64 = 10.0;
pub const DEFAULT_SETS: usize = 10;
pub const DURATION_TAG: &str = "5s";
pub const RNG_ALGORITHM: &str = "ChaCha20 (rand_chacha), seeded by seed, stream = set index";
pub const NOISE_MODEL: &str =
    "isotropic white noise on the two-photon state, then Bob-side depolarizing channel, then local filter";
/// Frobenius distance above which the model fit is rejected.
pub const FIT_RESIDUAL_LIMIT: f64 = 0.1;
const THETA_FLOOR: f64 = 1e-6;

pub fn joint_probs(state: &TwoQubitState, a: &MeasurementSetting, b: &MeasurementSetting) -> ProbTable {
    let mut out = [[0.0; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = state.expectation(&kron(&a.projector(i as u8), &b.projector(j as u8)));
        }
    }
    out
}

/// Bob-side channel ρ ↦ pρ + (1 − p)·¼Σ_k (I⊗σ_k) ρ (I⊗σ_k), σ₀ = I.
pub fn apply_depolarizing(state: &TwoQubitState, p: f64) -> Result<TwoQubitState> {
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("depolarizing parameter must lie in [0, 1], got {p}"));
    }
    let mut twirl = ComplexMatrix::zeros(4, 4);
    for k in 0..4 {
        let u = kron(&ComplexMatrix::identity(2), &pauli(k));
        twirl = &twirl + &(&(&u * state.matrix()) * &u);
    }
    let mixed = &state.matrix().scale_real(p) + &twirl.scale_real((1.0 - p) / 4.0);
    Ok(TwoQubitState::from_trusted(mixed))
}

/// f'|ψθ⟩⟨ψθ| + (1 − f') I/4 with f' = (4f − 1)/3, so that ⟨ψθ|ρ|ψθ⟩ = f.
pub fn source_state(theta: f64, fidelity: f64) -> Result<TwoQubitState> {
    if !(fidelity > 0.25 && fidelity <= 1.0) {
        return domain(format!("fidelity must lie in (0.25, 1], got {fidelity}"));
    }
    let psi = pure_state(theta)?;
    let weight = (4.0 * fidelity - 1.0) / 3.0;
    let mixed = &psi.matrix().scale_real(weight) + &ComplexMatrix::identity(4).scale_real((1.0 - weight) / 4.0);
    Ok(TwoQubitState::from_trusted(mixed))
}

/// Counts for one pair of settings accumulated over one acquisition window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceRecord {
    pub setting_pair: String,
    pub counts: [[u64; 2]; 2],
    pub accidentals_expected: f64,
    pub duration_tag: String,
}

impl CoincidenceRecord {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Counts as reals, optionally minus the expected accidentals per cell
    /// (clamped at zero).
    pub fn cells(&self, subtract_accidentals: bool) -> ProbTable {
        let bg = if subtract_accidentals { self.accidentals_expected / 4.0 } else { 0.0 };
        self.counts.map(|row| row.map(|c| (c as f64 - bg).max(0.0)))
    }
}

fn check_probs(probs: &ProbTable) -> Result<ProbTable> {
    let flat = probs.iter().flatten();
    if flat.clone().any(|p| !p.is_finite() || *p < -1e-12) {
        return domain(format!("probabilities must be finite and non-negative, got {probs:?}"));
    }
    let sum: f64 = flat.map(|p| p.max(0.0)).sum();
    if (sum - 1.0).abs() > 1e-9 {
        return domain(format!("probabilities sum to {sum}, not 1"));
    }
    Ok(probs.map(|row| row.map(|p| p.max(0.0) / sum)))
}

/// Multinomial draw of `n_total` pairs plus Poisson(accidentals/4) per cell.
pub fn sample_counts_with<R: Rng + ?Sized>(
    rng: &mut R,
    setting_pair: &str,
    probs: &ProbTable,
    n_total: u64,
    accidentals: f64,
) -> Result<CoincidenceRecord> {
    if n_total == 0 {
        return domain("n_total must be positive");
    }
    if !accidentals.is_finite() || accidentals < 0.0 {
        return domain(format!("accidentals must be finite and ≥ 0, got {accidentals}"));
    }
    let probs = check_probs(probs)?;
    let flat = [probs[0][0], probs[0][1], probs[1][0], probs[1][1]];
    let mut cells = [0u64; 4];
    let (mut remaining, mut mass) = (n_total, 1.0);
    for (i, &p) in flat.iter().enumerate().take(3) {
        if remaining == 0 {
            break;
        }
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let k = Binomial::new(remaining, q).map_err(|e| Error::Domain(e.to_string()))?.sample(rng);
        cells[i] = k;
        remaining -= k;
        mass -= p;
    }
    cells[3] = remaining;
    if accidentals > 0.0 {
        let poisson = Poisson::new(accidentals / 4.0).map_err(|e| Error::Domain(e.to_string()))?;
        for c in &mut cells {
            *c += poisson.sample(rng) as u64;
        }
    }
    Ok(CoincidenceRecord {
        setting_pair: setting_pair.to_string(),
        counts: [[cells[0], cells[1]], [cells[2], cells[3]]],
        accidentals_expected: accidentals,
        duration_tag: DURATION_TAG.to_string(),
    })
}

pub fn sample_counts(probs: &ProbTable, n_total: u64, accidentals: f64, rng_seed: u64) -> Result<CoincidenceRecord> {
    let mut rng = ChaCha20Rng::seed_from_u64(rng_seed);
    sample_counts_with(&mut rng, "custom", probs, n_total, accidentals)
}

/// Σ(−1)^{a+b} C(a, b) / Σ C(a, b).
pub fn correlator_from_cells(cells: &ProbTable, setting: &str) -> Result<f64> {
    let total: f64 = cells.iter().flatten().sum();
    if total <= 0.0 {
        return Err(Error::ZeroCounts { setting: setting.to_string() });
    }
    Ok((cells[0][0] - cells[0][1] - cells[1][0] + cells[1][1]) / total)
}

/// C(a, a) / (C(a, 0) + C(a, 1)).
pub fn conditional_from_cells(cells: &ProbTable, outcome: u8, setting: &str) -> Result<f64> {
    let row = cells[usize::from(outcome.min(1))];
    let sum = row[0] + row[1];
    if sum <= 0.0 {
        return Err(Error::ZeroConditioningCounts { setting: setting.to_string(), outcome });
    }
    Ok(row[usize::from(outcome.min(1))] / sum)
}

/// T̂ = ½[Ĉ_z + Ĉ_x] with conditioning outcome a = b = `outcome`.
pub fn estimate_t(zz: &CoincidenceRecord, xx: &CoincidenceRecord, outcome: u8, subtract: bool) -> Result<f64> {
    let cz = conditional_from_cells(&zz.cells(subtract), outcome, &zz.setting_pair)?;
    let cx = conditional_from_cells(&xx.cells(subtract), outcome, &xx.setting_pair)?;
    Ok(0.5 * (cz + cx))
}

/// Ŝ = E₁₁ + E₁₂ + E₂₁ − E₂₂ from records ordered (A₁B₁, A₁B₂, A₂B₁, A₂B₂).
pub fn estimate_s(records: &[CoincidenceRecord; 4], subtract: bool) -> Result<f64> {
    let mut s = 0.0;
    for (k, r) in records.iter().enumerate() {
        let e = correlator_from_cells(&r.cells(subtract), &r.setting_pair)?;
        s += if k == 3 { -e } else { e };
    }
    Ok(s)
}

pub const PAULI_LABELS: [char; 3] = ['X', 'Y', 'Z'];

/// The nine two-sided Pauli settings, row-major over (Alice, Bob) ∈ {X, Y, Z}².
pub fn tomography_settings() -> [(MeasurementSetting, MeasurementSetting, String); 9] {
    let axes = [MeasurementSetting::sigma_x(), MeasurementSetting::sigma_y(), MeasurementSetting::sigma_z()];
    std::array::from_fn(|k| {
        let (i, j) = (k / 3, k % 3);
        (axes[i], axes[j], format!("{}{}", PAULI_LABELS[i], PAULI_LABELS[j]))
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TomographyFit {
    pub state_hat: TwoQubitState,
    pub p_hat: f64,
    pub theta_hat: f64,
    pub tu_hat: f64,
    /// ‖ρ̂ − ρ(p̂, θ̂)‖_F.
    pub residual: f64,
}

/// Linear inversion of nine count tables (any non-negative scale) followed
/// by PSD projection and a least-squares fit of ρ(p, θ).
pub fn tomography_fit(tables: &[ProbTable; 9]) -> Result<TomographyFit> {
    let labels = tomography_settings().map(|s| s.2);
    let mut r = [[0.0; 4]; 4];
    r[0][0] = 1.0;
    for (k, cells) in tables.iter().enumerate() {
        let (i, j) = (k / 3 + 1, k % 3 + 1);
        let total: f64 = cells.iter().flatten().sum();
        if total <= 0.0 {
            return Err(Error::ZeroCounts { setting: labels[k].clone() });
        }
        r[i][j] = correlator_from_cells(cells, &labels[k])?;
        // single-side marginals averaged over the partner's three settings
        r[i][0] += (cells[0][0] + cells[0][1] - cells[1][0] - cells[1][1]) / total / 3.0;
        r[0][j] += (cells[0][0] + cells[1][0] - cells[0][1] - cells[1][1]) / total / 3.0;
    }
    let mut rho = ComplexMatrix::zeros(4, 4);
    for (mu, row) in r.iter().enumerate() {
        for (nu, &v) in row.iter().enumerate() {
            if v != 0.0 {
                rho = &rho + &kron(&pauli(mu), &pauli(nu)).scale_real(v / 4.0);
            }
        }
    }
    let state_hat = project_psd(&rho)?;
    let (p_hat, theta_hat) = fit_family(&state_hat, r[1][1], r[3][3], r[3][0])?;
    let model = crate::states::noisy_state(StateParams::new(p_hat, theta_hat)?);
    let residual = (state_hat.matrix() - model.matrix()).frobenius_norm();
    if residual.is_nan() || residual > FIT_RESIDUAL_LIMIT {
        return Err(Error::FitDiverged { residual });
    }
    Ok(TomographyFit {
        tu_hat: unsteerability_tu(StateParams::new(p_hat, theta_hat)?),
        state_hat,
        p_hat,
        theta_hat,
        residual,
    })
}

pub fn tomography_fit_records(records: &[CoincidenceRecord; 9], subtract: bool) -> Result<TomographyFit> {
    for r in records {
        if r.total() == 0 {
            return Err(Error::ZeroCounts { setting: r.setting_pair.clone() });
        }
    }
    tomography_fit(&records.each_ref().map(|r| r.cells(subtract)))
}

/// Nearest trace-one PSD matrix in spectral form: negative eigenvalues
/// clamped to zero, then renormalized.
fn project_psd(m: &ComplexMatrix) -> Result<TwoQubitState> {
    let eig = hermitian_eigen(m)?;
    let clamped = eig.reconstruct_with(|l| l.max(0.0));
    let tr = clamped.trace().re;
    if tr <= 0.0 {
        return Err(Error::InvalidState("reconstruction has no positive spectrum".into()));
    }
    Ok(TwoQubitState::from_trusted(clamped.scale_real(1.0 / tr)))
}

/// Model entries (d00, d01, d10, d11, off) and their (∂p, ∂θ) derivatives.
fn model_entries(p: f64, theta: f64) -> ([f64; 5], [[f64; 2]; 5]) {
    let (s, c) = theta.sin_cos();
    let (s2t, c2t) = (2.0 * theta).sin_cos();
    let (cc, ss) = (c * c, s * s);
    let values = [cc * (1.0 + p) / 2.0, cc * (1.0 - p) / 2.0, ss * (1.0 - p) / 2.0, ss * (1.0 + p) / 2.0, p * s * c];
    let jac = [
        [cc / 2.0, -s2t * (1.0 + p) / 2.0],
        [-cc / 2.0, -s2t * (1.0 - p) / 2.0],
        [-ss / 2.0, s2t * (1.0 - p) / 2.0],
        [ss / 2.0, s2t * (1.0 + p) / 2.0],
        [s2t / 2.0, p * c2t],
    ];
    (values, jac)
}

/// Levenberg–Marquardt on the Frobenius distance between ρ̂ and ρ(p, θ),
/// seeded by p₀ = Λ_zz and sin 2θ₀ = Λ_xx/Λ_zz (or cos 2θ₀ = ⟨Z⊗I⟩ when
/// Λ_zz is too small to divide by).
fn fit_family(state: &TwoQubitState, lxx: f64, lzz: f64, z_marginal: f64) -> Result<(f64, f64)> {
    let m = state.matrix();
    let off_target = 0.5 * (m[(0, 3)].re + m[(3, 0)].re);
    let target = [m[(0, 0)].re, m[(1, 1)].re, m[(2, 2)].re, m[(3, 3)].re, off_target];
    // the off-diagonal pair appears twice in the Frobenius norm
    let weight = [1.0, 1.0, 1.0, 1.0, 2.0];

    let clamp = |p: f64, t: f64| (p.clamp(0.0, 1.0), t.clamp(THETA_FLOOR, FRAC_PI_4));
    let theta0 =
        if lzz >= 0.05 { 0.5 * (lxx / lzz).clamp(0.0, 1.0).asin() } else { 0.5 * z_marginal.clamp(-1.0, 1.0).acos() };
    let (mut p, mut theta) = clamp(lzz, theta0);

    let cost = |p: f64, t: f64| {
        let (v, _) = model_entries(p, t);
        (0..5).map(|k| weight[k] * (v[k] - target[k]).powi(2)).sum::<f64>()
    };
    let mut lambda = 1e-3;
    let mut current = cost(p, theta);
    for _ in 0..200 {
        let (v, jac) = model_entries(p, theta);
        let (mut a, mut g) = ([[0.0; 2]; 2], [0.0; 2]);
        for k in 0..5 {
            let res = v[k] - target[k];
            for i in 0..2 {
                g[i] += weight[k] * jac[k][i] * res;
                for j in 0..2 {
                    a[i][j] += weight[k] * jac[k][i] * jac[k][j];
                }
            }
        }
        let mut improved = false;
        for _ in 0..30 {
            let (a00, a11) = (a[0][0] * (1.0 + lambda), a[1][1] * (1.0 + lambda));
            let det = a00 * a11 - a[0][1] * a[1][0];
            if det.abs() < f64::MIN_POSITIVE {
                lambda *= 10.0;
                continue;
            }
            let dp = -(a11 * g[0] - a[0][1] * g[1]) / det;
            let dt = -(a00 * g[1] - a[1][0] * g[0]) / det;
            let (np, nt) = clamp(p + dp, theta + dt);
            let next = cost(np, nt);
            if next <= current {
                let moved = (np - p).abs() + (nt - theta).abs();
                (p, theta, current) = (np, nt, next);
                lambda = (lambda / 10.0).max(1e-12);
                improved = moved > 1e-15;
                break;
            }
            lambda *= 10.0;
        }
        if !improved || current < 1e-30 {
            break;
        }
    }
    if !(p.is_finite() && theta.is_finite()) {
        return Err(Error::FitDiverged { residual: f64::NAN });
    }
    Ok((p, theta))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub params: StateParams,
    pub filter: Filtering,
    pub n_per_setting: u64,
    pub accidentals: f64,
    pub sets: usize,
    pub fidelity: f64,
    pub seed: u64,
    pub subtract_accidentals: bool,
}

impl ExperimentConfig {
    /// Defaults: 2000 pairs per setting, 10 accidentals, 10 sets, fidelity 1.
    pub fn new(params: StateParams, filter: Filtering, seed: u64) -> Self {
        Self {
            params,
            filter,
            n_per_setting: DEFAULT_N_PER_SETTING,
            accidentals: DEFAULT_ACCIDENTALS,
            sets: DEFAULT_SETS,
            fidelity: 1.0,
            seed,
            subtract_accidentals: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_per_setting == 0 {
            return domain("n_per_setting must be positive");
        }
        if self.sets == 0 {
            return domain("sets must be positive");
        }
        if !self.accidentals.is_finite() || self.accidentals < 0.0 {
            return domain(format!("accidentals must be finite and ≥ 0, got {}", self.accidentals));
        }
        if !(self.fidelity > 0.25 && self.fidelity <= 1.0) {
            return domain(format!("fidelity must lie in (0.25, 1], got {}", self.fidelity));
        }
        Ok(())
    }
}

/// States and settings an experiment measures.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSetup {
    /// Source after noise, before filtering; tomography target.
    pub source: TwoQubitState,
    /// Post-selected state after the filter.
    pub measured: TwoQubitState,
    pub success_prob: f64,
    pub chsh: ChshSettings,
}

pub fn setup(config: &ExperimentConfig) -> Result<ExperimentSetup> {
    config.validate()?;
    let theta = config.params.theta();
    let source = apply_depolarizing(&source_state(theta, config.fidelity)?, config.params.p())?;
    let filtered = apply_named(config.filter, theta, &source)?;
    Ok(ExperimentSetup {
        source,
        measured: filtered.state,
        success_prob: filtered.success_prob,
        chsh: optimal_chsh_settings(config.params, config.filter),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetResult {
    pub index: usize,
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "TU")]
    pub tu: f64,
    pub p_hat: f64,
    pub theta_hat: f64,
    pub records: Vec<CoincidenceRecord>,
}

fn run_set(config: &ExperimentConfig, setup: &ExperimentSetup, index: usize) -> Result<SetResult> {
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);
    let (n, acc, sub) = (config.n_per_setting, config.accidentals, config.subtract_accidentals);

    let names = ["A1B1", "A1B2", "A2B1", "A2B2"];
    let pairs = setup.chsh.pairs();
    let mut chsh_records = Vec::with_capacity(4);
    for (k, (a, b, _)) in pairs.iter().enumerate() {
        chsh_records.push(sample_counts_with(&mut rng, names[k], &joint_probs(&setup.measured, a, b), n, acc)?);
    }
    let chsh_records: [CoincidenceRecord; 4] = chsh_records.try_into().expect("four records");
    let s = estimate_s(&chsh_records, sub)?;

    let (z, x) = (MeasurementSetting::sigma_z(), MeasurementSetting::sigma_x());
    let zz = sample_counts_with(&mut rng, "ZZ", &joint_probs(&setup.measured, &z, &z), n, acc)?;
    let xx = sample_counts_with(&mut rng, "XX", &joint_probs(&setup.measured, &x, &x), n, acc)?;
    let t = estimate_t(&zz, &xx, 0, sub)?;

    let mut tomo = Vec::with_capacity(9);
    for (a, b, name) in tomography_settings() {
        tomo.push(sample_counts_with(&mut rng, &format!("tomo_{name}"), &joint_probs(&setup.source, &a, &b), n, acc)?);
    }
    let tomo: [CoincidenceRecord; 9] = tomo.try_into().expect("nine records");
    let fit = tomography_fit_records(&tomo, sub)?;

    let mut records = chsh_records.to_vec();
    records.extend([zz, xx]);
    records.extend(tomo);
    Ok(SetResult { index, s, t, tu: fit.tu_hat, p_hat: fit.p_hat, theta_hat: fit.theta_hat, records })
}

/// Mean, sample standard deviation and standard error over the sorted values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub sem: f64,
}

pub fn summarize(values: &[f64]) -> Summary {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let std = if v.len() > 1 { (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() } else { 0.0 };
    Summary { mean, std, sem: std / n.sqrt() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerSetValues {
    #[serde(rename = "S")]
    pub s: Vec<f64>,
    #[serde(rename = "T")]
    pub t: Vec<f64>,
    #[serde(rename = "TU")]
    pub tu: Vec<f64>,
    pub p_hat: Vec<f64>,
    pub theta_hat: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    #[serde(rename = "S_mean")]
    pub s_mean: f64,
    #[serde(rename = "S_std")]
    pub s_std: f64,
    #[serde(rename = "S_sem")]
    pub s_sem: f64,
    #[serde(rename = "T_mean")]
    pub t_mean: f64,
    #[serde(rename = "T_std")]
    pub t_std: f64,
    #[serde(rename = "T_sem")]
    pub t_sem: f64,
    #[serde(rename = "TU_mean")]
    pub tu_mean: f64,
    #[serde(rename = "TU_std")]
    pub tu_std: f64,
    #[serde(rename = "TU_sem")]
    pub tu_sem: f64,
    /// Values of the simulated state in the infinite-count limit.
    #[serde(rename = "S_exact")]
    pub s_exact: f64,
    #[serde(rename = "T_exact")]
    pub t_exact: f64,
    #[serde(rename = "TU_exact")]
    pub tu_exact: f64,
    pub sets: usize,
    pub n_per_setting: u64,
    pub accidentals: f64,
    pub fidelity: f64,
    pub seed: u64,
    pub filter: Filtering,
    pub success_prob: f64,
    pub subtract_accidentals: bool,
    pub p: f64,
    pub gamma: f64,
    pub theta: f64,
    pub rng: String,
    pub noise_model: String,
    pub per_set_values: PerSetValues,
}

/// Exact S, T and tomographic T_U of the configured experiment.
pub fn exact_values(config: &ExperimentConfig) -> Result<(f64, f64, f64)> {
    let su = setup(config)?;
    let tables = tomography_settings().map(|(a, b, _)| joint_probs(&su.source, &a, &b));
    let tu = tomography_fit(&tables)?.tu_hat;
    Ok((chsh_with(&su.measured, &su.chsh), steering_t_zx(&su.measured)?, tu))
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let (report, _) = run_experiment_with_records(config)?;
    Ok(report)
}

/// Also returns every set's raw coincidence records.
pub fn run_experiment_with_records(config: &ExperimentConfig) -> Result<(ExperimentReport, Vec<SetResult>)> {
    let su = setup(config)?;
    let results: Vec<SetResult> =
        (0..config.sets).into_par_iter().map(|i| run_set(config, &su, i)).collect::<Result<_>>()?;
    let col = |f: fn(&SetResult) -> f64| results.iter().map(f).collect::<Vec<f64>>();
    let per = PerSetValues {
        s: col(|r| r.s),
        t: col(|r| r.t),
        tu: col(|r| r.tu),
        p_hat: col(|r| r.p_hat),
        theta_hat: col(|r| r.theta_hat),
    };
    let (s, t, tu) = (summarize(&per.s), summarize(&per.t), summarize(&per.tu));
    let (s_exact, t_exact, tu_exact) = exact_values(config)?;
    let report = ExperimentReport {
        s_mean: s.mean,
        s_std: s.std,
        s_sem: s.sem,
        t_mean: t.mean,
        t_std: t.std,
        t_sem: t.sem,
        tu_mean: tu.mean,
        tu_std: tu.std,
        tu_sem: tu.sem,
        s_exact,
        t_exact,
        tu_exact,
        sets: config.sets,
        n_per_setting: config.n_per_setting,
        accidentals: config.accidentals,
        fidelity: config.fidelity,
        seed: config.seed,
        filter: config.filter,
        success_prob: su.success_prob,
        subtract_accidentals: config.subtract_accidentals,
        p: config.params.p(),
        gamma: config.params.gamma(),
        theta: config.params.theta(),
        rng: RNG_ALGORITHM.to_string(),
        noise_model: NOISE_MODEL.to_string(),
        per_set_values: per,
    };
    Ok((report, results))
}
