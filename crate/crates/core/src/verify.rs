//! Acceptance checks with their oracles. Each check returns a report rather
//! than panicking so the CLI and the test suite can share them.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::{
    angles_match, correspondence_verdict, limit_phi, limit_psi, model_limits, predict_windows, Outcome,
    WindowKind, ANGLE_TOL,
};
use crate::dynamics::{
    bath_energy_delta, bath_energy_rate, d0_param, dephasing_factor, dephasing_rate, eta1, transform_pair, Weight,
};
use crate::error::Result;
use crate::measures::{
    default_resolution, detect_sign_intervals, non_markovianity_of, universal_bounds, window_conformance,
    SignIntervals,
};
use crate::oscquad::{integrate, EdgeHint, Integrand, TailHint};
use crate::spectral::{GapSpec, Profile, QubitParams, SeriesTarget, SpectralModel, DEFAULT_SERIES_ORDER};

const QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    /// Largest observed error in the criterion's own metric.
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2} {}: worst {:.3e} (tol {:.1e}) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.worst,
            self.tolerance,
            self.detail
        )
    }
}

pub const TITLES: [&str; 10] = [
    "closed-form transform oracle",
    "angle oracle and limits",
    "limit formula table",
    "short-time laws",
    "derivative consistency",
    "universal backflow bounds",
    "window containment",
    "energy asymptotic envelope",
    "energy/information correspondence",
    "measure unit oracle",
];

/// Runs one criterion; numeric errors become failed reports.
pub fn run_criterion(id: u8) -> CriterionReport {
    let res = match id {
        1 => transform_oracle(),
        2 => angle_oracle(),
        3 => limit_table(),
        4 => short_time_laws(),
        5 => derivative_consistency(),
        6 => backflow_bounds(),
        7 => window_containment(),
        8 => energy_envelope(),
        9 => correspondence(),
        10 => measure_oracle(),
        _ => {
            return CriterionReport {
                id,
                title: "unknown",
                passed: false,
                worst: f64::NAN,
                tolerance: f64::NAN,
                detail: format!("no criterion {id}"),
            }
        }
    };
    let title = TITLES[id as usize - 1];
    match res {
        Ok((worst, tolerance, detail)) => CriterionReport {
            id,
            title,
            passed: worst <= tolerance,
            worst,
            tolerance,
            detail,
        },
        Err(e) => CriterionReport {
            id,
            title,
            passed: false,
            worst: f64::INFINITY,
            tolerance: f64::NAN,
            detail: format!("error: {e}"),
        },
    }
}

pub fn run_all() -> Vec<CriterionReport> {
    (1..=10).map(run_criterion).collect()
}

type Check = Result<(f64, f64, String)>;

fn bm(alpha: f64) -> Result<SpectralModel> {
    SpectralModel::benchmark(alpha, 1.0, 1.0)
}

fn angle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// `Γ(α+1)/(1-iτ)^{α+1}` in polar form.
fn laplace_oracle(alpha: f64, tau: f64) -> (f64, f64) {
    let r = statrs::function::gamma::gamma(alpha + 1.0) * (1.0 + tau * tau).powf(-(alpha + 1.0) / 2.0);
    (r, (alpha + 1.0) * tau.atan())
}

const ALPHAS: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 3.0];
const TAUS: [f64; 4] = [0.1, 1.0, 10.0, 100.0];

fn transform_oracle() -> Check {
    let errs: Vec<(f64, f64, f64)> = ALPHAS
        .iter()
        .flat_map(|&a| TAUS.iter().map(move |&t| (a, t)))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(a, tau)| {
            let p = transform_pair(&bm(a)?, Weight::Plain, 0.0, tau, QUAD_TOL)?;
            let (r, th) = laplace_oracle(a, tau);
            let err = (p.c - r * th.cos()).hypot(p.s - r * th.sin()) / r;
            Ok((a, tau, err))
        })
        .collect::<Result<_>>()?;
    let worst = errs.iter().copied().fold((0.0, 0.0, 0.0), |m, e| if e.2 > m.2 { e } else { m });
    Ok((worst.2, 1e-8, format!("over 20 (alpha, tau) pairs; worst at alpha={} tau={}", worst.0, worst.1)))
}

fn angle_oracle() -> Check {
    let mut worst_angle: f64 = 0.0;
    for &a in &ALPHAS {
        let m = bm(a)?;
        for &tau in &TAUS {
            let p = transform_pair(&m, Weight::Plain, 0.0, tau, QUAD_TOL)?;
            let got = p.angle.ok_or(crate::Error::UndefinedAngle)?;
            worst_angle = worst_angle.max(angle_dist(got, (a + 1.0) * tau.atan()));
        }
    }
    // long-time angle against the case formula
    let big = 1e4;
    let mut worst_limit: f64 = 0.0;
    let mut notes = Vec::new();
    for &a in &ALPHAS {
        let m = bm(a)?;
        let lim = limit_psi(&m.omega_series)?.require()?;
        let d = if a <= 1.0 {
            let p = transform_pair(&m, Weight::Plain, 0.0, big, 1e-10)?;
            angle_dist(p.angle.ok_or(crate::Error::UndefinedAngle)?, lim)
        } else {
            // the transform is O(τ^{-α-1}) here, below quadrature resolution;
            // compare against the limit of the verified closed form instead
            angle_dist((a + 1.0) * FRAC_PI_2, lim)
        };
        worst_limit = worst_limit.max(d);
        notes.push(format!("{a}:{d:.1e}"));
    }
    let hard = SpectralModel::new(
        GapSpec::new(1.0, 1.0)?,
        Profile::HardCutoff {
            alpha: -0.5,
            nu_max: 1.0,
            edge_power: 2.0,
            weight: 1.0,
        },
    )?;
    let lim = limit_psi(&hard.omega_series)?.require()?;
    let p = transform_pair(&hard, Weight::Plain, 0.0, big, 1e-10)?;
    let d = angle_dist(p.angle.ok_or(crate::Error::UndefinedAngle)?, lim);
    worst_limit = worst_limit.max(d);
    notes.push(format!("-0.5(hard):{d:.1e}"));
    // report both metrics on one scale: the limit error relative to its 1e-3 bound
    let scaled = worst_angle.max(worst_limit * 1e-8 / 1e-3);
    Ok((
        scaled,
        1e-8,
        format!(
            "finite-time angle err {worst_angle:.1e} (tol 1e-8); limit err {worst_limit:.1e} (tol 1e-3) [{}]",
            notes.join(" ")
        ),
    ))
}

fn limit_table() -> Check {
    let cases = [(-0.5, 1.0), (0.0, 2.0), (0.5, 3.0), (2.0, 6.0)];
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    for (a, k) in cases {
        let m = bm(a)?;
        let want = k * FRAC_PI_4;
        let phi = limit_phi(&m.derive_series(SeriesTarget::Lambda0, DEFAULT_SERIES_ORDER)?)?.require()?;
        let psi = limit_psi(&m.omega_series)?.require()?;
        worst = worst.max((phi - want).abs()).max((psi - want).abs());
        notes.push(format!("{a}->{k}pi/4"));
    }
    Ok((worst, 4.0 * f64::EPSILON * TAU, notes.join(", ")))
}

/// `∫ J(ω) ω^k coth(ω/2T)^{[thermal]} dω` on the band by plain quadrature.
fn band_moment(model: &SpectralModel, temperature: f64, k: i32) -> Result<f64> {
    let g = model.gap;
    let m = model.clone();
    let f = move |x: f64| {
        let w = g.omega_g + x;
        let j = if temperature > 0.0 {
            m.eval_jt(temperature, w).unwrap_or(f64::NAN)
        } else {
            m.eval_j(w).unwrap_or(f64::NAN)
        };
        j * w.powi(k)
    };
    let integrand = Integrand::new(
        f,
        EdgeHint::power(model.profile.alpha()),
        TailHint::Exponential { rate: 1.0 / g.omega_s },
    )?;
    Ok(integrate(&integrand, 1e-13)?.require("band moment")?.value)
}

fn short_time_laws() -> Check {
    let t = 1e-3;
    let temp = 1.0;
    let q = QubitParams::new(0.5, 1.0, 1.0, temp)?;
    let d0 = d0_param(&q)?;
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    for a in [0.0, 0.5, 2.0] {
        let m = bm(a)?;
        let l_t = band_moment(&m, temp, 0)?;
        let l_e = 0.5 * d0 * band_moment(&m, 0.0, 1)?;
        let g = dephasing_rate(&m, temp, t, QUAD_TOL)?.value / t;
        let e = bath_energy_delta(&m, &q, t, QUAD_TOL)?.value / (t * t);
        let (rt, re) = (((g - l_t) / l_t).abs(), ((e - l_e) / l_e).abs());
        worst = worst.max(rt).max(re);
        notes.push(format!("BM({a}): gamma {rt:.1e}, energy {re:.1e}"));
    }
    Ok((worst, 1e-4, notes.join("; ")))
}

fn derivative_consistency() -> Check {
    let m = bm(0.0)?;
    let h = 1e-3;
    let tol = 1e-13;
    let times: Vec<f64> = (0..10).map(|k| 0.5 + 0.5 * k as f64).collect();
    let mut worst: f64 = 0.0;
    for temp in [0.0, 1.0] {
        let q = QubitParams::new(0.5, 1.0, temp, temp)?;
        let d0 = d0_param(&q)?;
        let errs: Vec<f64> = times
            .par_iter()
            .map(|&t| {
                let fd_xi = (dephasing_factor(&m, temp, t + h, tol)?.value
                    - dephasing_factor(&m, temp, t - h, tol)?.value)
                    / (2.0 * h);
                let gamma = dephasing_rate(&m, temp, t, tol)?.value;
                let env_g = transform_pair(&m, Weight::OverOmega, temp, t, tol)?.r;
                let fd_e = (bath_energy_delta(&m, &q, t + h, tol)?.value - bath_energy_delta(&m, &q, t - h, tol)?.value)
                    / (2.0 * h);
                let rate = bath_energy_rate(&m, &q, t, tol)?.value;
                let env_e = d0 * transform_pair(&m, Weight::Plain, 0.0, t, tol)?.r;
                let e1 = (fd_xi - gamma).abs() / gamma.abs().max(env_g);
                let e2 = (fd_e - rate).abs() / rate.abs().max(env_e);
                Ok(e1.max(e2))
            })
            .collect::<Result<_>>()?;
        worst = errs.iter().copied().fold(worst, f64::max);
    }
    Ok((
        worst,
        1e-5,
        "BM(0), T in {0, 1}, ten times in [0.5, 5], central step 1e-3; relative to max(|f|, envelope)".into(),
    ))
}

fn backflow_bounds() -> Check {
    let m = bm(0.0)?;
    let temp = 1.0;
    let horizon = 20.0 * PI + FRAC_PI_2;
    let scan = detect_sign_intervals(
        |t| Ok(dephasing_rate(&m, temp, t, 1e-11)?.value),
        0.0,
        horizon,
        default_resolution(&m.gap),
    )?;
    let bounds = universal_bounds(&scan, &m.gap, false, 10);
    let failed: Vec<u64> = bounds.iter().filter(|b| !b.ok).map(|b| b.n).collect();
    let worst = bounds
        .iter()
        .map(|b| {
            let s = b.start.map_or(f64::INFINITY, |s| s - b.start_bound);
            let e = b.end.map_or(f64::INFINITY, |e| e - b.end_bound);
            s.max(e)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((
        worst.max(0.0) + if failed.is_empty() { 0.0 } else { 1.0 },
        0.0,
        format!(
            "{} negative intervals found, largest bound slack {:.3}, failing n: {:?}",
            scan.negative_intervals.len(),
            -worst,
            failed
        ),
    ))
}

fn scan_window(model: &SpectralModel, lo: f64, hi: f64, f: impl Fn(f64) -> Result<f64> + Sync) -> Result<SignIntervals> {
    detect_sign_intervals(f, lo.max(0.0), hi, default_resolution(&model.gap))
}

fn window_containment() -> Check {
    let eps0 = 0.3;
    let n_range = (20, 30);
    let mut total = 0;
    let mut misses = Vec::new();
    for a in [0.0, 0.5, 2.0] {
        let m = bm(a)?;
        for (t_corr, t_fact) in [(1.0, 1.0), (1.0, 2.0)] {
            let q = QubitParams::new(0.5, 1.0, t_corr, t_fact)?;
            let (_, psi, xi) = model_limits(&m, t_fact, DEFAULT_SERIES_ORDER)?;
            let period = PI / m.gap.omega_g;
            for (lim, kinds, energy) in [
                (&psi, [WindowKind::EnergyUp, WindowKind::EnergyDown], true),
                (&xi, [WindowKind::InfoLoss, WindowKind::InfoBackflow], false),
            ] {
                let sets = kinds
                    .iter()
                    .map(|&k| predict_windows(lim, &m.gap, eps0, n_range, k))
                    .collect::<Result<Vec<_>>>()?;
                let lo = sets.iter().flat_map(|s| &s.intervals).map(|w| w.t_start).fold(f64::INFINITY, f64::min);
                let hi = sets.iter().flat_map(|s| &s.intervals).map(|w| w.t_end).fold(0.0, f64::max);
                let scan = if energy {
                    scan_window(&m, lo - period, hi + period, |t| Ok(bath_energy_rate(&m, &q, t, 1e-11)?.value))?
                } else {
                    scan_window(&m, lo - period, hi + period, |t| Ok(dephasing_rate(&m, t_fact, t, 1e-11)?.value))?
                };
                for set in &sets {
                    let rep = window_conformance(&scan, set, &m.gap);
                    total += rep.verdicts.len();
                    if !rep.all_contained() {
                        misses.push(format!(
                            "BM({a}) Tc={t_corr} Tf={t_fact} {}: {} unmatched, {} uncovered",
                            set.kind.name(),
                            rep.unmatched,
                            rep.uncovered
                        ));
                    }
                }
            }
        }
    }
    Ok((
        misses.len() as f64,
        0.0,
        if misses.is_empty() {
            format!("{total} predicted windows contained")
        } else {
            misses.join("; ")
        },
    ))
}

fn energy_envelope() -> Check {
    let q = QubitParams::new(0.5, 1.0, 1.0, 1.0)?;
    let d0 = d0_param(&q)?;
    let times: Vec<f64> = (0..50).map(|k| 40.0 + 0.8 * k as f64).collect();
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    for a in [0.0, 0.5] {
        let m = bm(a)?;
        let phi_inf = limit_phi(&m.derive_series(SeriesTarget::Lambda0, DEFAULT_SERIES_ORDER)?)?.require()?;
        let offset = d0 * eta1(&m, QUAD_TOL)?;
        let rows: Vec<(f64, f64, f64, f64, f64)> = times
            .par_iter()
            .map(|&t| {
                let p = transform_pair(&m, Weight::OverOmega, 0.0, t, 1e-11)?;
                let de = bath_energy_delta(&m, &q, t, 1e-11)?;
                let phi = p.angle.ok_or(crate::Error::UndefinedAngle)?;
                Ok((t, p.r, phi, de.value, de.abs_err))
            })
            .collect::<Result<_>>()?;
        let eps0 = 1.01 * rows.iter().map(|r| angle_dist(r.2, phi_inf)).fold(0.0, f64::max) + 1e-12;
        let mut violation: f64 = 0.0;
        for &(t, r1, _, de, err) in &rows {
            let slack = err + 1e-12;
            let wt = m.gap.omega_g * t + phi_inf;
            violation = violation.max((de - offset).abs() - d0 * r1 * (1.0 + eps0) - slack);
            let upper = offset - d0 * r1 * (wt.cos() - eps0);
            let lower = offset - d0 * r1 * (wt.cos() + eps0);
            violation = violation.max(de - upper - slack).max(lower - de - slack);
        }
        worst = worst.max(violation.max(0.0));
        notes.push(format!("BM({a}): eps0 {eps0:.2e}"));
    }
    Ok((worst, 0.0, format!("50 times in [40, 79.2]; {}", notes.join(", "))))
}

fn correspondence() -> Check {
    let mut fails = Vec::new();
    let temps = [0.1, 1.0, 10.0];
    for a in [-0.5, 0.0, 0.5, 2.0, 1.0] {
        let m = bm(a)?;
        let mut seen: Option<f64> = None;
        for &tf in &temps {
            let q = QubitParams::new(0.5, 1.0, 1.0, tf)?;
            let v = correspondence_verdict(&m, &q, DEFAULT_SERIES_ORDER)?;
            let (psi, xi) = (v.psi.value, v.xi.value);
            let ok = v.outcome == Outcome::Holds
                && match (psi, xi) {
                    (Some(p), Some(x)) => {
                        let stable = seen.is_none_or(|s| angles_match(s, x, ANGLE_TOL));
                        seen = Some(x);
                        let pi_case = a != 1.0 || (angles_match(p, PI, ANGLE_TOL) && angles_match(x, PI, ANGLE_TOL));
                        stable && pi_case
                    }
                    _ => false,
                };
            if !ok {
                fails.push(format!("alpha0={a} T_fact={tf}: {:?} psi={psi:?} xi={xi:?}", v.outcome));
            }
        }
    }
    Ok((
        fails.len() as f64,
        0.0,
        if fails.is_empty() {
            "holds for alpha0 in {-0.5, 0, 0.5, 2, 1} at T_fact in {0.1, 1, 10}".into()
        } else {
            fails.join("; ")
        },
    ))
}

fn measure_oracle() -> Check {
    let want = 1.0 - (-2.0f64).exp();
    let r = non_markovianity_of(|t: f64| Ok(t.sin()), |t: f64| Ok(1.0 - t.cos()), TAU, PI / 32.0, 1e-13)?;
    let zero = non_markovianity_of(|t: f64| Ok(t.sin().abs() + 0.1), |t: f64| Ok(t), 20.0, 0.05, 1e-12)?;
    let err = (r.value - want).abs();
    let worst = if zero.value == 0.0 { err } else { f64::INFINITY };
    Ok((worst, 1e-9, format!("synthetic value {} ; nonnegative rate gives {}", r.value, zero.value)))
}

/// One row of the odd-edge correspondence search.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub family: String,
    pub alpha0: f64,
    pub logpow: f64,
    pub t_fact: f64,
    pub outcome: Outcome,
    pub psi: Option<f64>,
    pub xi: Option<f64>,
    pub raw_equal: Option<bool>,
    pub at_risk: bool,
}

/// Odd natural edge exponents, with and without log factors, at several
/// factorized temperatures. Reported only.
pub fn odd_edge_sweep() -> Result<Vec<SweepRow>> {
    let gap = GapSpec::new(1.0, 1.0)?;
    let mut profiles = Vec::new();
    for alpha in [1.0, 3.0] {
        profiles.push(Profile::exp_cutoff(alpha));
        for beta in [1.0, 2.0, 3.0] {
            profiles.push(Profile::LogPerturbed { alpha, beta, weight: 1.0 });
        }
        profiles.push(Profile::AlgebraicTail { alpha, chi0: 4.0, weight: 1.0 });
        profiles.push(Profile::HardCutoff {
            alpha,
            nu_max: 2.0,
            edge_power: 1.0,
            weight: 1.0,
        });
    }
    let cases: Vec<(Profile, f64)> = profiles
        .iter()
        .flat_map(|p| [0.1, 1.0, 10.0].into_iter().map(move |t| (*p, t)))
        .collect();
    cases
        .par_iter()
        .map(|&(p, tf)| {
            let m = SpectralModel::new(gap, p)?;
            let q = QubitParams::new(0.5, 1.0, 1.0, tf)?;
            let v = correspondence_verdict(&m, &q, DEFAULT_SERIES_ORDER)?;
            let logpow = match p {
                Profile::LogPerturbed { beta, .. } => beta,
                _ => 0.0,
            };
            Ok(SweepRow {
                family: p.name().to_owned(),
                alpha0: p.alpha(),
                logpow,
                t_fact: tf,
                outcome: v.outcome,
                psi: v.psi.value,
                xi: v.xi.value,
                raw_equal: v.raw_equal,
                at_risk: v.at_risk,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_at_zero_time() {
        let (r, th) = laplace_oracle(2.0, 0.0);
        assert!((r - 2.0).abs() < 1e-14);
        assert_eq!(th, 0.0);
    }

    #[test]
    fn unknown_criterion_fails() {
        assert!(!run_criterion(11).passed);
    }

    #[test]
    fn angle_distance_wraps() {
        assert!(angle_dist(0.0, TAU - 1e-12) < 1e-11);
        assert!((angle_dist(0.0, PI) - PI).abs() < 1e-15);
    }
}
