//! Acceptance gate. Each criterion runs at its stated tolerance and prints
//! one PASS/FAIL line; the process exits non-zero if any criterion fails.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, SQRT_2};
use std::time::{Duration, Instant};

use hiddencorr::correlations::crosscheck::{crosscheck, default_points};
use hiddencorr::correlations::{
    chsh_with, concurrence, horodecki_s, optimal_chsh_settings, steering_t_zx, threshold_p, unsteerability_tu,
    Criterion, Method,
};
use hiddencorr::expsim::{
    joint_probs, run_experiment, sample_counts, tomography_fit, tomography_fit_records, tomography_settings,
    CoincidenceRecord, ExperimentConfig, ProbTable,
};
use hiddencorr::filters::{apply_named, Filtering};
use hiddencorr::qmat::C64;
use hiddencorr::states::{noisy_state, StateParams, TwoQubitState};

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn theta_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|j| FRAC_PI_4 * j as f64 / n as f64).collect()
}

fn p_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

fn params(p: f64, theta: f64) -> StateParams {
    StateParams::new(p, theta).expect("grid point in domain")
}

fn filtered(f: Filtering, prm: StateParams) -> TwoQubitState {
    apply_named(f, prm.theta(), &noisy_state(prm)).expect("filter succeeds").state
}

/// Tr[ρ (σ_a ⊗ σ_b)] from raw entries, a, b ∈ {x, z}.
fn pauli_correlation(rho: &TwoQubitState, a: char, b: char) -> f64 {
    let sigma = |c: char| -> [[f64; 2]; 2] {
        match c {
            'x' => [[0.0, 1.0], [1.0, 0.0]],
            _ => [[1.0, 0.0], [0.0, -1.0]],
        }
    };
    let (sa, sb) = (sigma(a), sigma(b));
    let m = rho.matrix();
    let mut tr = C64::new(0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            let o = sa[j / 2][i / 2] * sb[j % 2][i % 2];
            tr += m[(i, j)] * o;
        }
    }
    tr.re
}

/// Brute-force max over Bob angles with A₁ = σx, A₂ = σz. The objective
/// separates in φ₁ and φ₂; each is maximized on a fine grid then refined by
/// golden-section search.
fn numeric_chsh_max(rho: &TwoQubitState) -> f64 {
    let (txx, txz, tzx, tzz) = (
        pauli_correlation(rho, 'x', 'x'),
        pauli_correlation(rho, 'x', 'z'),
        pauli_correlation(rho, 'z', 'x'),
        pauli_correlation(rho, 'z', 'z'),
    );
    let maximize = |f: &dyn Fn(f64) -> f64| {
        let n = 7200;
        let step = 2.0 * std::f64::consts::PI / n as f64;
        let best = (0..n).map(|k| k as f64 * step).max_by(|a, b| f(*a).total_cmp(&f(*b))).unwrap();
        let (mut lo, mut hi) = (best - step, best + step);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..100 {
            let (m1, m2) = (hi - g * (hi - lo), lo + g * (hi - lo));
            if f(m1) < f(m2) {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        f(0.5 * (lo + hi))
    };
    // E(A, B(φ)) = t_{a x} sin φ + t_{a z} cos φ
    let first = |phi: f64| (txx + tzx) * phi.sin() + (txz + tzz) * phi.cos();
    let second = |phi: f64| (txx - tzx) * phi.sin() + (txz - tzz) * phi.cos();
    maximize(&first) + maximize(&second)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let (mut dc, mut ds, mut dt) = (0.0f64, 0.0f64, 0.0f64);
    for &theta in &theta_grid(50) {
        for &p in &p_grid(50) {
            let rho = noisy_state(params(p, theta));
            let s2 = (2.0 * theta).sin();
            let c = ((3.0 * p - 1.0) * theta.sin() * theta.cos()).max(0.0);
            dc = dc.max((concurrence(&rho) - c).abs());
            ds = ds.max((horodecki_s(&rho) - 2.0 * p * (1.0 + s2 * s2).sqrt()).abs());
            dt = dt.max((steering_t_zx(&rho).unwrap() - (2.0 + p + p * s2) / 4.0).abs());
        }
    }
    let elapsed = start.elapsed();
    check(
        dc <= 1e-10 && ds <= 1e-10 && dt <= 1e-12 && elapsed < Duration::from_secs(10),
        format!("max |dC| {dc:.2e}, |dS| {ds:.2e}, |dT| {dt:.2e}, {:.2}s", elapsed.as_secs_f64()),
    )
}

fn criterion_2() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (c, expected) in
        [(Criterion::Entangled, 1.0 / 3.0), (Criterion::Steerable, 0.5), (Criterion::BellNonlocal, FRAC_1_SQRT_2)]
    {
        let got = threshold_p(c, 1.0, Method::Bisection).unwrap().unwrap();
        ok &= (got - expected).abs() <= 1e-6;
        parts.push(format!("{c} {got:.9}"));
    }
    check(ok, parts.join(", "))
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    for &theta in &theta_grid(20) {
        for &p in &p_grid(20) {
            let out = filtered(Filtering::F, params(p, theta));
            let werner = noisy_state(params(p, FRAC_PI_4));
            for i in 0..4 {
                for j in 0..4 {
                    worst = worst.max((out.matrix()[(i, j)] - werner.matrix()[(i, j)]).norm());
                }
            }
        }
    }
    check(worst <= 1e-10, format!("max entrywise deviation {worst:.2e} over 20x20"))
}

fn criterion_4() -> Outcome {
    let steer = threshold_p(Criterion::Steerable, 9.0, Method::Bisection).unwrap().unwrap();
    let root = threshold_p(Criterion::UnsteerCertified, 9.0, Method::Bisection).unwrap().unwrap();
    let bell = threshold_p(Criterion::BellNonlocal, 9.0, Method::Bisection).unwrap().unwrap();
    check(
        (steer - 0.625).abs() <= 1e-6 && (root - 0.595).abs() <= 1e-3 && (bell - 1.0 / 1.36f64.sqrt()).abs() <= 1e-6,
        format!("steer {steer:.9}, T_U root {root:.9}, bell {bell:.9}"),
    )
}

fn criterion_5() -> Outcome {
    let prm = StateParams::from_gamma(0.5, 9.0).unwrap();
    let tu = unsteerability_tu(prm);
    let t_g = steering_t_zx(&filtered(Filtering::G, prm)).unwrap();
    let t_f = steering_t_zx(&filtered(Filtering::F, prm)).unwrap();
    // P(0z|0z) = 0.9 and P(0x|0x) = 1/2 + 2p/N = 2/3 at N = 6
    let oracle = 0.5 * (0.9 + 2.0 / 3.0);
    check(
        tu < 0.5 && t_g > 0.75 && (t_g - oracle).abs() <= 1e-10 && (t_f - 0.75).abs() <= 1e-12,
        format!("T_U {tu:.9}, T_G {t_g:.9} (oracle {oracle:.9}), T_F {t_f:.12}"),
    )
}

fn criterion_6() -> Outcome {
    let prm = StateParams::from_gamma(0.8, 9.0).unwrap();
    let s = horodecki_s(&noisy_state(prm));
    let s_f = horodecki_s(&filtered(Filtering::F, prm));
    let s_g = horodecki_s(&filtered(Filtering::G, prm));
    // ρ_G correlation diagonal (x, −x, z) with N = 6.4, x = 4p/N, z = ((1+p)k − 2 + 2p)/N, k = 10/3
    let (x, z): (f64, f64) = (3.2 / 6.4, (1.8 * 10.0 / 3.0 - 2.0 + 1.6) / 6.4);
    let s_g_oracle = 2.0 * (x * x + z * z).sqrt();
    let analytic_ok = (s - 1.6 * 1.36f64.sqrt()).abs() <= 1e-4
        && s < 2.0
        && (s_f - 1.6 * SQRT_2).abs() <= 1e-4
        && s_f > 2.0
        && (s_g - s_g_oracle).abs() <= 1e-4
        && (s_g - 2.0156).abs() <= 1e-4
        && s_g > 2.0;

    let seeds = 50u64;
    let below = (0..seeds)
        .filter(|&seed| {
            let mut cfg = ExperimentConfig::new(prm, Filtering::G, seed);
            cfg.fidelity = 0.97;
            run_experiment(&cfg).unwrap().s_mean < 2.0
        })
        .count() as u64;
    check(
        analytic_ok && 2 * below > seeds,
        format!("S {s:.6}, S_F {s_f:.6}, S_G {s_g:.6} (oracle {s_g_oracle:.6}); fidelity 0.97: S_G mean < 2 in {below}/{seeds} seeds"),
    )
}

fn criterion_7() -> Outcome {
    let mut worst_rho = 0.0f64;
    for &theta in &theta_grid(50) {
        for &p in &p_grid(50) {
            let prm = params(p, theta);
            let rho = noisy_state(prm);
            let chsh = chsh_with(&rho, &optimal_chsh_settings(prm, Filtering::None));
            worst_rho = worst_rho.max((chsh - horodecki_s(&rho)).abs());
        }
    }
    let (mut worst_g, mut worst_oracle) = (0.0f64, 0.0f64);
    for i in 0..20 {
        let p = 0.05 + 0.047 * i as f64;
        let gamma = 1.0 + 5.2 * i as f64;
        let prm = StateParams::from_gamma(p, gamma).unwrap();
        let g = filtered(Filtering::G, prm);
        let s = horodecki_s(&g);
        worst_g = worst_g.max((chsh_with(&g, &optimal_chsh_settings(prm, Filtering::G)) - s).abs());
        worst_oracle = worst_oracle.max((numeric_chsh_max(&g) - s).abs());
    }
    check(
        worst_rho <= 1e-9 && worst_g <= 1e-9 && worst_oracle <= 1e-6,
        format!("rho grid {worst_rho:.2e}, rho_G {worst_g:.2e}, numeric oracle {worst_oracle:.2e}"),
    )
}

fn criterion_8() -> Outcome {
    let prm = StateParams::from_gamma(0.8, 1.0).unwrap();
    let cfg = ExperimentConfig::new(prm, Filtering::None, 2024);
    let start = Instant::now();
    let r = run_experiment(&cfg).unwrap();
    let elapsed = start.elapsed();
    let (s_true, t_true) = (1.6 * SQRT_2, (2.0 + 0.8 + 0.8) / 4.0);
    let within_factor_3 = |x: f64, order: f64| x >= order / 3.0 && x <= order * 3.0;
    let ok = within_factor_3(r.s_std, 1e-2)
        && within_factor_3(r.t_std, 1e-3)
        && (r.s_mean - s_true).abs() <= 3.0 * r.s_std
        && (r.t_mean - t_true).abs() <= 3.0 * r.t_std
        && elapsed < Duration::from_secs(5);
    // binomial floor: T averages two conditionals P = 0.9, each on n/2 conditioning events
    let t_floor = (0.9f64 * 0.1 / cfg.n_per_setting as f64).sqrt();
    check(
        ok,
        format!(
            "S {:.4} std {:.4} (sem {:.4}), T {:.4} std {:.5} (sem {:.5}, binomial floor {t_floor:.5}), {:.2}s",
            r.s_mean,
            r.s_std,
            r.s_sem,
            r.t_mean,
            r.t_std,
            r.t_sem,
            elapsed.as_secs_f64()
        ),
    )
}

fn exact_tables(rho: &TwoQubitState) -> [ProbTable; 9] {
    tomography_settings().map(|(a, b, _)| joint_probs(rho, &a, &b))
}

fn sample_tables(tables: &[ProbTable; 9], n: u64, seed: u64) -> [CoincidenceRecord; 9] {
    let mut k = 0u64;
    tables.each_ref().map(|t| {
        k += 1;
        sample_counts(t, n, 0.0, seed.wrapping_mul(1000).wrapping_add(k)).unwrap()
    })
}

fn std_dev(v: &[f64]) -> f64 {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

fn criterion_9() -> Outcome {
    let mut exact_err = 0.0f64;
    for &(p, gamma) in &[(0.2, 1.5), (0.5, 9.0), (0.8, 4.0), (0.95, 50.0), (0.61, 9.0)] {
        let prm = StateParams::from_gamma(p, gamma).unwrap();
        let fit = tomography_fit(&exact_tables(&noisy_state(prm))).unwrap();
        exact_err = exact_err.max((fit.p_hat - p).abs()).max((fit.theta_hat - prm.theta()).abs());
    }

    let prm = StateParams::from_gamma(0.6, 9.0).unwrap();
    let n = 2000;
    let fit = tomography_fit_records(&sample_tables(&exact_tables(&noisy_state(prm)), n, 5), false).unwrap();
    let observed = sample_tables(&exact_tables(&noisy_state(prm)), n, 5).map(|r| {
        let t = r.total() as f64;
        r.cells(false).map(|row| row.map(|c| c / t))
    });
    let (mut boot_p, mut boot_t) = (Vec::new(), Vec::new());
    for b in 0..200 {
        let fit_b = tomography_fit_records(&sample_tables(&observed, n, 10_000 + b), false).unwrap();
        boot_p.push(fit_b.p_hat);
        boot_t.push(fit_b.theta_hat);
    }
    let (sp, st) = (std_dev(&boot_p), std_dev(&boot_t));
    let finite_ok = (fit.p_hat - 0.6).abs() <= 3.0 * sp && (fit.theta_hat - prm.theta()).abs() <= 3.0 * st;

    // T_U crossing of 1/2 along p at γ = 9 from simulated tomography
    let ps: Vec<f64> = (0..=10).map(|i| 0.55 + 0.01 * i as f64).collect();
    let runs: Vec<(f64, f64, f64)> = ps
        .iter()
        .map(|&p| {
            let mut cfg = ExperimentConfig::new(StateParams::from_gamma(p, 9.0).unwrap(), Filtering::None, 77);
            cfg.subtract_accidentals = true;
            let r = run_experiment(&cfg).unwrap();
            (p, r.tu_mean, r.tu_sem)
        })
        .collect();
    let crossing = runs.windows(2).find(|w| w[0].1 <= 0.5 && w[1].1 > 0.5).map(|w| {
        let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
        let p_star = w[0].0 + (0.5 - w[0].1) / slope;
        (p_star, 0.5 * (w[0].2 + w[1].2) / slope)
    });
    let crossing_ok = crossing.is_some_and(|(p_star, sigma)| (p_star - 0.595).abs() <= 1e-3 + 3.0 * sigma);
    let crossing_text = crossing.map_or("no crossing".to_string(), |(p, s)| format!("{p:.4} ± {s:.4}"));
    check(
        exact_err <= 1e-9 && finite_ok && crossing_ok,
        format!(
            "exact max err {exact_err:.2e}; n={n}: p_hat {:.4} (boot σ {sp:.4}), θ_hat {:.4} (true {:.4}, boot σ {st:.4}); T_U crossing {crossing_text}",
            fit.p_hat,
            fit.theta_hat,
            prm.theta()
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut points = default_points();
    points.push(params(1.0, FRAC_PI_4));
    let report = crosscheck(&points).unwrap();
    let json = serde_json::to_value(&report).unwrap();
    let t_g = report.quantity("T_G").unwrap();
    let bell_pt = report
        .entries
        .iter()
        .find(|e| e.quantity == "P_x_given_x_G" && e.p == Some(1.0) && (e.theta - FRAC_PI_4).abs() < 1e-15)
        .unwrap();
    let agreeing = ["C_G", "Gamma1_G", "Gamma2_G", "S_G"];
    let agree_ok = agreeing.iter().all(|q| {
        let s = report.quantity(q).unwrap();
        s.agrees && s.max_abs_diff <= 1e-10
    });
    let noted = json["summary"]
        .as_array()
        .unwrap()
        .iter()
        .any(|q| q["quantity"] == "T_G" && q["agrees"] == false && !q["note"].as_str().unwrap().is_empty());
    check(
        !t_g.agrees
            && noted
            && (bell_pt.closed_form - 0.5).abs() < 1e-12
            && (bell_pt.matrix - 1.0).abs() < 1e-10
            && agree_ok,
        format!(
            "T_G flagged (max diff {:.4}); P(0x|0x) at p=1, θ=π/4: closed form {:.3} vs operational {:.3}; C_G/Γ/S_G agree",
            t_g.max_abs_diff, bell_pt.closed_form, bell_pt.matrix
        ),
    )
}

fn main() {
    let criteria: [Check; 10] = [
        ("closed-form concordance", criterion_1),
        ("Werner thresholds by bisection", criterion_2),
        ("filter F gives a Werner state", criterion_3),
        ("gamma = 9 landmarks", criterion_4),
        ("hidden steering at p = 0.5, gamma = 9", criterion_5),
        ("hidden Bell nonlocality at p = 0.8, gamma = 9", criterion_6),
        ("CHSH settings consistency", criterion_7),
        ("estimator statistics", criterion_8),
        ("tomography round trip", criterion_9),
        ("discrepancy report", criterion_10),
    ];
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let n = k + 1;
        match run() {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail}"),
            Err(detail) => {
                println!("criterion {n:>2} FAIL  {name}: {detail}");
                failed.push(n);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", criteria.len());
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
