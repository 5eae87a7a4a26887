//! Sweeps of the (p, γ) plane: per-point classification, boundary curves
//! and table export.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::correlations::closed::delta_closed;
use crate::correlations::{
    concurrence, horodecki_s, steering_t_zx, threshold_p, unsteerability_tu, Criterion, Method, CHSH_LOCAL_BOUND,
    LABEL_MARGIN, STEERING_BOUND, UNSTEER_BOUND,
};
use crate::error::{domain, Result};
use crate::filters::{apply_named, Filtering};
use crate::states::{gamma_to_theta, noisy_state, StateParams};

/// Column order of the exported tables.
pub const CSV_COLUMNS: [&str; 14] =
    ["gamma", "theta", "p", "C", "S", "T", "TU", "S_F", "T_F", "C_F", "S_G", "T_G", "C_G", "labels"];

pub const SIGNIFICANT_DIGITS: usize = 9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    p_min: f64,
    p_max: f64,
    p_steps: usize,
    gammas: Vec<f64>,
    filters: BTreeSet<Filtering>,
}

impl GridSpec {
    pub fn new(p_min: f64, p_max: f64, p_steps: usize, gammas: Vec<f64>, filters: BTreeSet<Filtering>) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_min) || !(0.0..=1.0).contains(&p_max) || p_min >= p_max {
            return domain(format!("need 0 ≤ p_min < p_max ≤ 1, got [{p_min}, {p_max}]"));
        }
        if p_steps < 2 {
            return domain(format!("p_steps must be at least 2, got {p_steps}"));
        }
        if gammas.is_empty() {
            return domain("at least one gamma value is required");
        }
        if let Some(g) = gammas.iter().find(|g| !g.is_finite() || **g < 1.0) {
            return domain(format!("gamma must be finite and ≥ 1, got {g}"));
        }
        let filters = filters.into_iter().filter(|f| *f != Filtering::None).collect();
        Ok(Self { p_min, p_max, p_steps, gammas, filters })
    }

    /// 200 values of p in [0, 1] against 100 log-spaced γ in [1, 100], both filters.
    pub fn default_grid() -> Self {
        Self::new(0.0, 1.0, 200, log_gammas(1.0, 100.0, 100).expect("valid range"), [Filtering::F, Filtering::G].into())
            .expect("valid grid")
    }

    pub fn p_values(&self) -> Vec<f64> {
        let n = self.p_steps;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    self.p_max
                } else {
                    self.p_min + (self.p_max - self.p_min) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn filters(&self) -> &BTreeSet<Filtering> {
        &self.filters
    }

    pub fn len(&self) -> usize {
        self.gammas.len() * self.p_steps
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `n` log-spaced values from `min` to `max` with exact endpoints.
pub fn log_gammas(min: f64, max: f64, n: usize) -> Result<Vec<f64>> {
    check_range(min, max, n)?;
    if n == 1 {
        return Ok(vec![min]);
    }
    let (a, b) = (min.ln(), max.ln());
    Ok((0..n)
        .map(|i| match i {
            0 => min,
            _ if i == n - 1 => max,
            _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect())
}

/// `n` evenly spaced values from `min` to `max` with exact endpoints.
pub fn linear_gammas(min: f64, max: f64, n: usize) -> Result<Vec<f64>> {
    check_range(min, max, n)?;
    if n == 1 {
        return Ok(vec![min]);
    }
    Ok((0..n).map(|i| if i == n - 1 { max } else { min + (max - min) * i as f64 / (n - 1) as f64 }).collect())
}

fn check_range(min: f64, max: f64, n: usize) -> Result<()> {
    if !(min.is_finite() && max.is_finite()) || min < 1.0 || max < min || n == 0 || (n > 1 && max == min) {
        return domain(format!("invalid gamma range {min}:{max}:{n}"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RegionLabel {
    Separable,
    EntangledOnly,
    Steerable,
    BellNonlocal,
    UnsteerCertified,
    Indeterminate,
    #[serde(rename = "HiddenBell_F")]
    HiddenBellF,
    #[serde(rename = "HiddenBell_G")]
    HiddenBellG,
    #[serde(rename = "HiddenSteer_F")]
    HiddenSteerF,
    #[serde(rename = "HiddenSteer_G")]
    HiddenSteerG,
}

impl RegionLabel {
    pub fn name(self) -> &'static str {
        match self {
            RegionLabel::Separable => "Separable",
            RegionLabel::EntangledOnly => "EntangledOnly",
            RegionLabel::Steerable => "Steerable",
            RegionLabel::BellNonlocal => "BellNonlocal",
            RegionLabel::UnsteerCertified => "UnsteerCertified",
            RegionLabel::Indeterminate => "Indeterminate",
            RegionLabel::HiddenBellF => "HiddenBell_F",
            RegionLabel::HiddenBellG => "HiddenBell_G",
            RegionLabel::HiddenSteerF => "HiddenSteer_F",
            RegionLabel::HiddenSteerG => "HiddenSteer_G",
        }
    }

    fn hidden_bell(f: Filtering) -> Self {
        if f == Filtering::F {
            RegionLabel::HiddenBellF
        } else {
            RegionLabel::HiddenBellG
        }
    }

    fn hidden_steer(f: Filtering) -> Self {
        if f == Filtering::F {
            RegionLabel::HiddenSteerF
        } else {
            RegionLabel::HiddenSteerG
        }
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Concurrence, Bell value and steering value of a filtered state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilteredMeasures {
    pub c: f64,
    pub s: f64,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub gamma: f64,
    pub theta: f64,
    pub p: f64,
    pub c: f64,
    pub s: f64,
    pub t: f64,
    pub tu: f64,
    pub f: Option<FilteredMeasures>,
    pub g: Option<FilteredMeasures>,
    pub labels: BTreeSet<RegionLabel>,
}

impl PointRecord {
    pub fn has(&self, label: RegionLabel) -> bool {
        self.labels.contains(&label)
    }

    pub fn filtered(&self, f: Filtering) -> Option<&FilteredMeasures> {
        match f {
            Filtering::None => None,
            Filtering::F => self.f.as_ref(),
            Filtering::G => self.g.as_ref(),
        }
    }

    pub fn labels_joined(&self) -> String {
        self.labels.iter().map(|l| l.name()).collect::<Vec<_>>().join(";")
    }

    /// Values in `CSV_COLUMNS` order, `None` for absent filtered measures.
    fn numeric_columns(&self) -> [Option<f64>; 13] {
        let f = |m: Option<&FilteredMeasures>| m.map_or([None; 3], |m| [Some(m.s), Some(m.t), Some(m.c)]);
        let [sf, tf, cf] = f(self.f.as_ref());
        let [sg, tg, cg] = f(self.g.as_ref());
        [
            Some(self.gamma),
            Some(self.theta),
            Some(self.p),
            Some(self.c),
            Some(self.s),
            Some(self.t),
            Some(self.tu),
            sf,
            tf,
            cf,
            sg,
            tg,
            cg,
        ]
    }
}

fn violates_bell(s: f64) -> bool {
    s > CHSH_LOCAL_BOUND + LABEL_MARGIN
}

fn violates_steering(t: f64) -> bool {
    t > STEERING_BOUND + LABEL_MARGIN
}

/// Classifies ρ(p, γ) with both filters.
pub fn classify_point(p: f64, gamma: f64) -> Result<PointRecord> {
    classify_with(StateParams::from_gamma(p, gamma)?, &[Filtering::F, Filtering::G].into())
}

pub fn classify_with(params: StateParams, filters: &BTreeSet<Filtering>) -> Result<PointRecord> {
    let rho = noisy_state(params);
    let (c, s, t, tu) = (concurrence(&rho), horodecki_s(&rho), steering_t_zx(&rho)?, unsteerability_tu(params));

    let bell = violates_bell(s);
    let steerable = bell || violates_steering(t);
    let entangled = steerable || c > LABEL_MARGIN;
    let certified = tu <= UNSTEER_BOUND + LABEL_MARGIN;

    let mut labels = BTreeSet::new();
    if !entangled {
        labels.insert(RegionLabel::Separable);
    } else if !steerable {
        labels.insert(RegionLabel::EntangledOnly);
    }
    if steerable {
        labels.insert(RegionLabel::Steerable);
    }
    if bell {
        labels.insert(RegionLabel::BellNonlocal);
    }
    if certified {
        labels.insert(RegionLabel::UnsteerCertified);
    }
    if entangled && !steerable && !certified {
        labels.insert(RegionLabel::Indeterminate);
    }

    let mut record = PointRecord {
        gamma: params.gamma(),
        theta: params.theta(),
        p: params.p(),
        c,
        s,
        t,
        tu,
        f: None,
        g: None,
        labels,
    };
    for &filtering in filters.iter().filter(|f| **f != Filtering::None) {
        let out = apply_named(filtering, params.theta(), &rho)?.state;
        let m = FilteredMeasures { c: concurrence(&out), s: horodecki_s(&out), t: steering_t_zx(&out)? };
        if !bell && violates_bell(m.s) {
            record.labels.insert(RegionLabel::hidden_bell(filtering));
        }
        if certified && violates_steering(m.t) {
            record.labels.insert(RegionLabel::hidden_steer(filtering));
        }
        match filtering {
            Filtering::F => record.f = Some(m),
            _ => record.g = Some(m),
        }
    }
    Ok(record)
}

/// One record per grid point, γ-major then p ascending.
pub fn scan(grid: &GridSpec) -> Result<Vec<PointRecord>> {
    let ps = grid.p_values();
    let points: Vec<(f64, f64)> = grid.gammas.iter().flat_map(|&g| ps.iter().map(move |&p| (g, p))).collect();
    points
        .par_iter()
        .map(|&(gamma, p)| {
            let theta = gamma_to_theta(gamma)?;
            let mut rec = classify_with(StateParams::new(p, theta)?, &grid.filters)?;
            rec.gamma = gamma;
            Ok(rec)
        })
        .collect()
}

/// p*(γ) by bisection on the operational margin, per γ.
pub fn boundary_curve(criterion: Criterion, gammas: &[f64]) -> Result<Vec<(f64, Option<f64>)>> {
    gammas.par_iter().map(|&g| Ok((g, threshold_p(criterion, g, Method::Bisection)?))).collect()
}

/// Every named threshold at one γ, plus both tracks of the G-filtered
/// steering onset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub gamma: f64,
    pub theta: f64,
    pub entangled: Option<f64>,
    pub steer: Option<f64>,
    pub bell: Option<f64>,
    pub unsteer_root: Option<f64>,
    pub hidden_steer_f: Option<f64>,
    pub hidden_steer_g: Option<f64>,
    pub hidden_bell_f: Option<f64>,
    pub hidden_bell_g: Option<f64>,
    pub delta_closed: Option<f64>,
    pub delta_operational: Option<f64>,
}

impl ThresholdRow {
    pub fn get(&self, c: Criterion) -> Option<f64> {
        match c {
            Criterion::Entangled => self.entangled,
            Criterion::Steerable => self.steer,
            Criterion::BellNonlocal => self.bell,
            Criterion::UnsteerCertified => self.unsteer_root,
            Criterion::HiddenSteerF => self.hidden_steer_f,
            Criterion::HiddenSteerG => self.hidden_steer_g,
            Criterion::HiddenBellF => self.hidden_bell_f,
            Criterion::HiddenBellG => self.hidden_bell_g,
        }
    }
}

pub fn threshold_row(gamma: f64, method: Method) -> Result<ThresholdRow> {
    let theta = gamma_to_theta(gamma)?;
    let at = |c| threshold_p(c, gamma, method);
    let delta_operational = threshold_p(Criterion::HiddenSteerG, gamma, Method::Bisection)?;
    Ok(ThresholdRow {
        gamma,
        theta,
        entangled: at(Criterion::Entangled)?,
        steer: at(Criterion::Steerable)?,
        bell: at(Criterion::BellNonlocal)?,
        unsteer_root: at(Criterion::UnsteerCertified)?,
        hidden_steer_f: at(Criterion::HiddenSteerF)?,
        hidden_steer_g: at(Criterion::HiddenSteerG)?,
        hidden_bell_f: at(Criterion::HiddenBellF)?,
        hidden_bell_g: at(Criterion::HiddenBellG)?,
        delta_closed: delta_closed(theta),
        delta_operational,
    })
}

pub fn threshold_table(gammas: &[f64], method: Method) -> Result<Vec<ThresholdRow>> {
    gammas.par_iter().map(|&g| threshold_row(g, method)).collect()
}

/// `%g`-style formatting with `digits` significant digits.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x` rounded to `SIGNIFICANT_DIGITS` significant digits.
pub fn round_sig(x: f64) -> f64 {
    format_sig(x, SIGNIFICANT_DIGITS).parse().unwrap_or(x)
}

pub fn write_csv<W: Write>(records: &[PointRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "{}", CSV_COLUMNS.join(","))?;
    for r in records {
        let cells: Vec<String> = r
            .numeric_columns()
            .iter()
            .map(|v| v.map_or_else(String::new, |x| format_sig(x, SIGNIFICANT_DIGITS)))
            .collect();
        writeln!(out, "{},{}", cells.join(","), r.labels_joined())?;
    }
    Ok(())
}

fn json_number(x: Option<f64>) -> Value {
    x.and_then(|v| serde_json::Number::from_f64(round_sig(v))).map_or(Value::Null, Value::Number)
}

/// One object per record with the CSV column names as keys; labels as an array.
pub fn records_to_json(records: &[PointRecord]) -> Value {
    Value::Array(
        records
            .iter()
            .map(|r| {
                let mut m = Map::new();
                for (key, v) in CSV_COLUMNS.iter().zip(r.numeric_columns()) {
                    m.insert((*key).to_string(), json_number(v));
                }
                m.insert("labels".into(), r.labels.iter().map(|l| Value::from(l.name())).collect());
                Value::Object(m)
            })
            .collect(),
    )
}

pub fn thresholds_to_json(rows: &[ThresholdRow]) -> Value {
    let rounded: Vec<ThresholdRow> = rows
        .iter()
        .map(|r| {
            let o = |x: Option<f64>| x.map(round_sig);
            ThresholdRow {
                gamma: round_sig(r.gamma),
                theta: round_sig(r.theta),
                entangled: o(r.entangled),
                steer: o(r.steer),
                bell: o(r.bell),
                unsteer_root: o(r.unsteer_root),
                hidden_steer_f: o(r.hidden_steer_f),
                hidden_steer_g: o(r.hidden_steer_g),
                hidden_bell_f: o(r.hidden_bell_f),
                hidden_bell_g: o(r.hidden_bell_g),
                delta_closed: o(r.delta_closed),
                delta_operational: o(r.delta_operational),
            }
        })
        .collect();
    serde_json::to_value(rounded).expect("plain data serializes")
}

pub const THRESHOLD_COLUMNS: [&str; 12] = [
    "gamma",
    "theta",
    "entangled",
    "steer",
    "bell",
    "unsteer_root",
    "hidden_steer_f",
    "hidden_steer_g",
    "hidden_bell_f",
    "hidden_bell_g",
    "delta_closed",
    "delta_operational",
];

pub fn write_thresholds_csv<W: Write>(rows: &[ThresholdRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{}", THRESHOLD_COLUMNS.join(","))?;
    for r in rows {
        let vals = [
            Some(r.gamma),
            Some(r.theta),
            r.entangled,
            r.steer,
            r.bell,
            r.unsteer_root,
            r.hidden_steer_f,
            r.hidden_steer_g,
            r.hidden_bell_f,
            r.hidden_bell_g,
            r.delta_closed,
            r.delta_operational,
        ];
        let cells: Vec<String> =
            vals.iter().map(|v| v.map_or_else(String::new, |x| format_sig(x, SIGNIFICANT_DIGITS))).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}
