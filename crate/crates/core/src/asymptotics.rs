//! Long-time phase limits from edge series, short-time coefficients, and the
//! windows of certain sign they imply.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::oscquad::{self, EdgeHint, Integrand, TailHint};
use crate::series::{is_natural, is_odd_natural, AsymptoticSeries, SeriesClass};
use crate::spectral::{thermal_factor, GapSpec, QubitParams, SeriesTarget, SpectralModel};

/// Tolerance for comparing limit angles modulo `2π`.
pub const ANGLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesSource {
    Omega,
    Lambda0,
    LambdaT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseTag {
    NegAlpha,
    NonNaturalPositive,
    EvenNatural,
    OddWithLog,
    OddZeroLogNonoddNext,
    OddZeroLogOddNext,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseLimitReport {
    /// The case formula's output in `[0, 2π]`; `None` when indeterminate.
    pub value: Option<f64>,
    pub case_used: Option<CaseTag>,
    /// Index of the exponent level that decided an odd-edge case.
    pub selected_index: Option<usize>,
    pub source_series: SeriesSource,
    pub alpha0: f64,
    pub note: String,
}

impl PhaseLimitReport {
    pub fn is_determinate(&self) -> bool {
        self.value.is_some()
    }

    /// The limit reduced to `[0, 2π)`.
    pub fn reduced(&self) -> Option<f64> {
        self.value.map(reduce_angle)
    }

    /// The reduced limit, or `Indeterminate`.
    pub fn require(&self) -> Result<f64> {
        self.reduced().ok_or_else(|| Error::Indeterminate(self.note.clone()))
    }
}

pub fn reduce_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if TAU - r < ANGLE_TOL {
        0.0
    } else {
        r
    }
}

/// Equality of angles modulo `2π`.
pub fn angles_match(a: f64, b: f64, tol: f64) -> bool {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d) <= tol
}

fn parity_sign(m: i64) -> f64 {
    if m % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Dispatch over the case formulas, shared by all three limits.
fn classify(series: &AsymptoticSeries, source: SeriesSource) -> Result<PhaseLimitReport> {
    let levels = series.levels();
    let Some(lead) = levels.first() else {
        return Err(Error::Truncated("empty series".into()));
    };
    let a0 = lead.alpha;
    if !(a0 > -1.0) {
        return Err(invalid("alpha0", format!("must exceed -1, got {a0}")));
    }
    let report = |value: f64, case: CaseTag, k: Option<usize>, note: String| PhaseLimitReport {
        value: Some(value),
        case_used: Some(case),
        selected_index: k,
        source_series: source,
        alpha0: a0,
        note,
    };

    if is_natural(a0) {
        let n = a0.round() as i64;
        if n % 2 == 0 {
            let m = n / 2;
            return Ok(report(
                FRAC_PI_2 * (2.0 - parity_sign(m)),
                CaseTag::EvenNatural,
                None,
                format!("alpha0 = 2m with m = {m}"),
            ));
        }
        let m = (n - 1) / 2;
        if lead.logpow != 0.0 {
            return Ok(report(
                FRAC_PI_2 * (3.0 - parity_sign(m)),
                CaseTag::OddWithLog,
                None,
                format!("alpha0 = 1+2m with m = {m}, log power {}", lead.logpow),
            ));
        }
        // first level breaking the odd-exponent, zero-log pattern
        let factor = parity_sign(m) - 1.0;
        for (k, level) in levels.iter().enumerate().skip(1) {
            if !is_odd_natural(level.alpha) {
                let sign = (FRAC_PI_2 * level.alpha).cos().signum();
                return Ok(report(
                    FRAC_PI_2 * (2.0 + factor * sign),
                    CaseTag::OddZeroLogNonoddNext,
                    Some(k),
                    format!("m = {m}; level {k} has non-odd exponent {}", level.alpha),
                ));
            }
            if level.logpow != 0.0 {
                let mk = ((level.alpha.round() as i64) - 1) / 2;
                return Ok(report(
                    FRAC_PI_2 * (2.0 + parity_sign(mk) * factor),
                    CaseTag::OddZeroLogOddNext,
                    Some(k),
                    format!(
                        "m = {m}; level {k} has odd exponent {} with log power {}",
                        level.alpha, level.logpow
                    ),
                ));
            }
        }
        let horizon = match series.resolved_below {
            Some(b) => format!("exponents below {b}"),
            None => "the exact expansion".to_string(),
        };
        return Ok(PhaseLimitReport {
            value: None,
            case_used: None,
            selected_index: None,
            source_series: source,
            alpha0: a0,
            note: format!(
                "alpha0 = {a0} odd with zero log power and every level within {horizon} \
                 is odd with zero log power"
            ),
        });
    }
    if a0 < 0.0 {
        return Ok(report(
            FRAC_PI_2 * (1.0 + a0),
            CaseTag::NegAlpha,
            None,
            format!("-1 < alpha0 = {a0} < 0"),
        ));
    }
    let half = 0.5 * (1.0 + a0);
    let theta = if (FRAC_PI_2 * a0).cos() < 0.0 { 1.0 } else { 0.0 };
    Ok(report(
        PI * (half - half.floor() + theta),
        CaseTag::NonNaturalPositive,
        None,
        format!("alpha0 = {a0} positive, not natural"),
    ))
}

/// `φ(∞)` from the edge series of `Λ0`.
pub fn limit_phi(series: &AsymptoticSeries) -> Result<PhaseLimitReport> {
    classify(series, SeriesSource::Lambda0)
}

/// `ψ(∞)` from the edge series of `Ω`.
pub fn limit_psi(series: &AsymptoticSeries) -> Result<PhaseLimitReport> {
    classify(series, SeriesSource::Omega)
}

/// `ξ(∞)` from the edge series of `Λ_T`.
pub fn limit_xi(series: &AsymptoticSeries) -> Result<PhaseLimitReport> {
    classify(series, SeriesSource::LambdaT)
}

/// The three limits of a model; `ξ` uses `Λ0` when `temperature = 0`.
pub fn model_limits(
    model: &SpectralModel,
    temperature: f64,
    order: usize,
) -> Result<(PhaseLimitReport, PhaseLimitReport, PhaseLimitReport)> {
    let phi = limit_phi(&model.derive_series(SeriesTarget::Lambda0, order)?)?;
    let psi = limit_psi(&model.derive_series(SeriesTarget::Omega, order)?)?;
    let xi = if temperature > 0.0 {
        limit_xi(&model.derive_series(SeriesTarget::LambdaT { temperature }, order)?)?
    } else {
        let mut r = classify(&model.derive_series(SeriesTarget::Lambda0, order)?, SeriesSource::Lambda0)?;
        r.note = format!("{} (zero temperature)", r.note);
        r
    };
    Ok((phi, psi, xi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShortTimeCoeffs {
    pub eta1: f64,
    pub l00: f64,
    pub l01: f64,
    pub l02: f64,
    pub l_t0: f64,
    pub l_t1: f64,
    pub l_t2: f64,
    pub l_e: f64,
    pub l_t: f64,
}

/// `ω_s^{k+1} ∫ Ω(ν) coth(ω/2T) ν^k/(ν0+ν) dν = ∫ J_T(ω)/ω (ω-ω_g)^k dω`.
fn moment(model: &SpectralModel, temperature: f64, k: i32, tol: f64) -> Result<f64> {
    let nu0 = model.gap.nu0;
    let (wg, ws) = (model.gap.omega_g, model.gap.omega_s);
    let edge = model.edge();
    let tail = match model.tail() {
        TailHint::Algebraic { exponent } => TailHint::Algebraic {
            exponent: exponent + 1.0 - k as f64,
        },
        other => other,
    };
    let g = Integrand::new(
        move |nu: f64| {
            let om = model.omega(nu);
            if om == 0.0 {
                return 0.0;
            }
            om * thermal_factor(temperature, wg + ws * nu) * nu.powi(k) / (nu0 + nu)
        },
        EdgeHint {
            alpha: edge.alpha + k as f64,
            logpow: edge.logpow,
        },
        tail,
    )?;
    let r = oscquad::integrate(&g, tol)?.require("short-time moment")?;
    Ok(ws.powi(k + 1) * r.value)
}

/// Coefficients of `Δε ~ l_E t²` and `γ_T ~ l_T t`. Refuses models whose
/// high-frequency decay is too slow for these laws.
pub fn short_time_coeffs(model: &SpectralModel, temperature: f64, d0: f64, tol: f64) -> Result<ShortTimeCoeffs> {
    if let Some(chi0) = model.chi0 {
        let need = match model.class() {
            SeriesClass::First => 1.0,
            SeriesClass::Second => 3.0,
        };
        if !(chi0 > need) {
            return Err(invalid(
                "chi0",
                format!(
                    "short-time laws need chi0 > {need} for this class of profile, got {chi0}"
                ),
            ));
        }
    }
    if !(temperature >= 0.0) {
        return Err(invalid("temperature", "must be >= 0"));
    }
    let l00 = moment(model, 0.0, 0, tol)?;
    let l01 = moment(model, 0.0, 1, tol)?;
    let l02 = 0.5 * moment(model, 0.0, 2, tol)?;
    let (l_t0, l_t1, l_t2) = if temperature > 0.0 {
        (
            moment(model, temperature, 0, tol)?,
            moment(model, temperature, 1, tol)?,
            0.5 * moment(model, temperature, 2, tol)?,
        )
    } else {
        (l00, l01, l02)
    };
    let wg = model.gap.omega_g;
    Ok(ShortTimeCoeffs {
        eta1: l00,
        l00,
        l01,
        l02,
        l_t0,
        l_t1,
        l_t2,
        l_e: d0 * (0.5 * wg * wg * l00 + wg * l01 + l02),
        l_t: wg * l_t0 + l_t1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    EnergyUp,
    EnergyDown,
    InfoLoss,
    InfoBackflow,
}

impl WindowKind {
    /// Whether the quantity is positive inside the window.
    pub fn positive(self) -> bool {
        matches!(self, WindowKind::EnergyUp | WindowKind::InfoLoss)
    }

    pub fn name(self) -> &'static str {
        match self {
            WindowKind::EnergyUp => "energy_up",
            WindowKind::EnergyDown => "energy_down",
            WindowKind::InfoLoss => "info_loss",
            WindowKind::InfoBackflow => "info_backflow",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Predicted,
    AsymptoticLimit,
    Detected,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub n: u64,
    pub t_start: f64,
    pub t_end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowSet {
    pub kind: WindowKind,
    pub eps0: f64,
    /// Inclusive range of `n`.
    pub n_range: (u64, u64),
    pub provenance: Provenance,
    pub limit_angle: f64,
    pub intervals: Vec<Window>,
}

/// `n̄ = 2 + ⌊ω_g/ω_s⌋`; the default range starts at `10 n̄` and covers ten windows.
pub fn default_n_range(gap: &GapSpec) -> (u64, u64) {
    let nbar = 2 + (gap.omega_g / gap.omega_s).floor() as u64;
    (10 * nbar, 10 * nbar + 9)
}

/// Windows `[t1, t2]` over which the sign of `sin(ω_g t + L)` is certain once
/// the phase is within `eps0` of its limit `L`. `eps0 = 0` with
/// `Provenance::AsymptoticLimit` gives the open limiting intervals.
pub fn predict_windows(
    limit: &PhaseLimitReport,
    gap: &GapSpec,
    eps0: f64,
    n_range: (u64, u64),
    kind: WindowKind,
) -> Result<WindowSet> {
    if !(eps0 > 0.0 && eps0 < FRAC_PI_2) {
        return Err(invalid("eps0", format!("must lie in (0, π/2), got {eps0}")));
    }
    build_windows(limit.require()?, gap, eps0, n_range, kind, Provenance::Predicted)
}

/// The `eps0 → 0⁺` limits of the predicted windows.
pub fn limiting_windows(
    limit: &PhaseLimitReport,
    gap: &GapSpec,
    n_range: (u64, u64),
    kind: WindowKind,
) -> Result<WindowSet> {
    build_windows(limit.require()?, gap, 0.0, n_range, kind, Provenance::AsymptoticLimit)
}

fn build_windows(
    angle: f64,
    gap: &GapSpec,
    eps0: f64,
    n_range: (u64, u64),
    kind: WindowKind,
    provenance: Provenance,
) -> Result<WindowSet> {
    if n_range.0 > n_range.1 {
        return Err(invalid("n_range", "start exceeds end"));
    }
    let offset = if kind.positive() { 0.0 } else { PI };
    let intervals = (n_range.0..=n_range.1)
        .map(|n| {
            let base = TAU * n as f64 + offset - angle;
            Window {
                n,
                t_start: (base + eps0) / gap.omega_g,
                t_end: (base + PI - eps0) / gap.omega_g,
            }
        })
        .collect();
    Ok(WindowSet {
        kind,
        eps0,
        n_range,
        provenance,
        limit_angle: angle,
        intervals,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Holds,
    Fails,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceVerdict {
    pub outcome: Outcome,
    pub psi: PhaseLimitReport,
    pub xi: PhaseLimitReport,
    /// Odd natural edge exponent with zero log power, where the two limits
    /// are decided by different series.
    pub at_risk: bool,
    /// Whether the raw case outputs agree before the `2π ≡ 0` identification.
    pub raw_equal: Option<bool>,
    pub t_fact: f64,
}

/// Compares `ψ(∞)` (energy, from `Ω`) with `ξ(∞)` (information, from `Λ_T` at `T_fact`).
pub fn correspondence_verdict(model: &SpectralModel, q: &QubitParams, order: usize) -> Result<CorrespondenceVerdict> {
    let (_, psi, xi) = model_limits(model, q.t_fact, order)?;
    let lead = model
        .omega_series
        .levels()
        .first()
        .copied()
        .ok_or_else(|| Error::Truncated("empty series".into()))?;
    let at_risk = is_odd_natural(lead.alpha) && lead.logpow == 0.0;
    let (outcome, raw_equal) = match (psi.value, xi.value) {
        (Some(a), Some(b)) => {
            let out = if angles_match(a, b, ANGLE_TOL) {
                Outcome::Holds
            } else {
                Outcome::Fails
            };
            (out, Some((a - b).abs() <= ANGLE_TOL))
        }
        _ => (Outcome::Indeterminate, None),
    };
    Ok(CorrespondenceVerdict {
        outcome,
        psi,
        xi,
        at_risk,
        raw_equal,
        t_fact: q.t_fact,
    })
}
