//! Time-domain quantities of the dephasing channel. All integrals over
//! `ω ∈ [ω_g, ∞)` are evaluated on the shifted variable `ω = ω_g + ω_s ν`.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::oscquad::{self, Integrand, Kernel, QuadResult, TailHint};
use crate::spectral::{thermal_factor, QubitParams, SpectralModel};

pub const DEFAULT_TOL: f64 = 1e-10;

/// Points on `[0, 1/ω_s]` at the head of the default grid.
const HEAD_POINTS: usize = 64;

/// Whether the transforms carry `J/ω` or `J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weight {
    OverOmega,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscPair {
    pub c: f64,
    pub s: f64,
    pub r: f64,
    /// `None` when both transforms vanish.
    pub angle: Option<f64>,
    pub c_err: f64,
    pub s_err: f64,
}

impl OscPair {
    pub fn new(c: f64, s: f64) -> Self {
        Self::with_errors(c, s, 0.0, 0.0)
    }

    fn with_errors(c: f64, s: f64, c_err: f64, s_err: f64) -> Self {
        OscPair {
            c,
            s,
            r: c.hypot(s),
            angle: polar_angle(c, s).ok(),
            c_err,
            s_err,
        }
    }

    /// Bound on the error of `r` from the transform errors.
    pub fn r_err(&self) -> f64 {
        self.c_err.hypot(self.s_err)
    }
}

/// Angle of `(c, s)` in `[0, 2π)`: `arccot(c/s)` for `s > 0`,
/// `π + arccot(c/s)` for `s < 0`, and `0` or `π` on the real axis.
pub fn polar_angle(c: f64, s: f64) -> Result<f64> {
    if c == 0.0 && s == 0.0 {
        return Err(Error::UndefinedAngle);
    }
    if !c.is_finite() || !s.is_finite() {
        return Err(Error::Domain(format!("non-finite pair ({c}, {s})")));
    }
    let a = s.atan2(c);
    let a = if a < 0.0 { a + TAU } else { a };
    // atan2 can round up to exactly 2π for tiny negative s
    Ok(if a >= TAU { 0.0 } else { a })
}

/// Removes `2π` jumps between consecutive samples, for reporting only.
pub fn unwrap_angles(angles: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(angles.len());
    let mut offset = 0.0;
    for (i, &a) in angles.iter().enumerate() {
        if i > 0 {
            let prev = angles[i - 1];
            let d = a - prev;
            if d > PI {
                offset -= TAU;
            } else if d < -PI {
                offset += TAU;
            }
        }
        out.push(a + offset);
    }
    out
}

/// `d0` of the correlated preparation, from `s = ⟨φ₀|σ₃|φ₀⟩` and `ω0/T_corr`.
pub fn d0_param(q: &QubitParams) -> Result<f64> {
    let s = q.s;
    if !(s.abs() <= 1.0) {
        return Err(Error::Domain(format!("|s| must be <= 1, got {s}")));
    }
    if s.abs() == 1.0 {
        return Ok(0.0);
    }
    let th = if q.t_corr == 0.0 {
        q.omega0.signum() * (q.omega0 != 0.0) as i32 as f64
    } else {
        (q.omega0 / q.t_corr).tanh()
    };
    // sinh/cosh ratio divided through by cosh
    Ok(2.0 * (1.0 + s * (th - s) / (1.0 - s * th)))
}

/// `Ω(ν)·coth(ω/2T)/(ν0+ν)^power`, the shifted integrand of the transforms.
fn shifted_integrand(
    model: &SpectralModel,
    temperature: f64,
    power: i32,
) -> Result<Integrand<impl Fn(f64) -> f64 + '_>> {
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(invalid("temperature", format!("must be >= 0, got {temperature}")));
    }
    let nu0 = model.gap.nu0;
    let omega_g = model.gap.omega_g;
    let omega_s = model.gap.omega_s;
    let f = move |nu: f64| {
        let om = model.omega(nu);
        if om == 0.0 {
            return 0.0;
        }
        let th = thermal_factor(temperature, omega_g + omega_s * nu);
        om * th / (nu0 + nu).powi(power)
    };
    let tail = match model.tail() {
        TailHint::Algebraic { exponent } => TailHint::Algebraic {
            exponent: exponent + power as f64,
        },
        other => other,
    };
    Integrand::new(f, model.edge(), tail)
}

fn weight_power(weight: Weight) -> i32 {
    match weight {
        Weight::OverOmega => 1,
        Weight::Plain => 0,
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("time must be finite and >= 0, got {t}")))
    }
}

/// `(c, s)` = cosine and sine transforms of `J(ω_g+ω')` (`Plain`) or
/// `J(ω_g+ω')/(ω_g+ω')` (`OverOmega`), with `J_T` in place of `J` when `T > 0`.
/// `(φ_c, φ_s)`, `(θ_c, θ_s)` and `(υ_c, υ_s)` are the three cases in use.
pub fn transform_pair(
    model: &SpectralModel,
    weight: Weight,
    temperature: f64,
    t: f64,
    tol: f64,
) -> Result<OscPair> {
    check_time(t)?;
    let power = weight_power(weight);
    let g = shifted_integrand(model, temperature, power)?;
    let tau = model.gap.tau(t);
    let c = oscquad::fourier(&g, tau, Kernel::Cos, tol)?.require("cosine transform")?;
    let s = oscquad::fourier(&g, tau, Kernel::Sin, tol)?.require("sine transform")?;
    let scale = model.gap.omega_s.powi(2 - power);
    Ok(OscPair::with_errors(
        scale * c.value,
        scale * s.value,
        scale * c.abs_err_estimate,
        scale * s.abs_err_estimate,
    ))
}

/// A value together with its quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub abs_err: f64,
}

impl From<QuadResult> for Estimate {
    fn from(r: QuadResult) -> Self {
        Estimate {
            value: r.value,
            abs_err: r.abs_err_estimate,
        }
    }
}

/// `∫_0^∞ g(ν) dν` for the shifted integrand.
fn shifted_integral(model: &SpectralModel, temperature: f64, power: i32, tol: f64) -> Result<Estimate> {
    let g = shifted_integrand(model, temperature, power)?;
    Ok(oscquad::integrate(&g, tol)?.require("moment integral")?.into())
}

/// `∫_0^∞ g(ν)(1 - cos((ν0+ν)τ)) dν`, i.e. `∫ (…)(1 - cos ωt)` over the band.
fn one_minus_cos(
    model: &SpectralModel,
    temperature: f64,
    power: i32,
    t: f64,
    tol: f64,
) -> Result<Estimate> {
    check_time(t)?;
    let tau = model.gap.tau(t);
    if tau == 0.0 {
        return Ok(Estimate {
            value: 0.0,
            abs_err: 0.0,
        });
    }
    let nu0 = model.gap.nu0;
    let g = shifted_integrand(model, temperature, power)?;
    if (nu0 + 1.0) * tau <= 1.0 {
        // short times: 1 - cos x = 2 sin²(x/2) avoids the cancellation
        let h = Integrand::new(
            |nu: f64| {
                let v = g.eval(nu);
                if v == 0.0 {
                    return 0.0;
                }
                let half = 0.5 * (nu0 + nu) * tau;
                2.0 * v * half.sin().powi(2)
            },
            g.edge(),
            g.tail(),
        )?;
        return Ok(oscquad::integrate(&h, tol)?.require("short-time integral")?.into());
    }
    let k = oscquad::integrate(&g, tol)?.require("moment integral")?;
    let c = oscquad::fourier(&g, tau, Kernel::Cos, tol)?.require("cosine transform")?;
    let s = oscquad::fourier(&g, tau, Kernel::Sin, tol)?.require("sine transform")?;
    let (sn, cs) = (nu0 * tau).sin_cos();
    Ok(Estimate {
        value: k.value - (c.value * cs - s.value * sn),
        abs_err: k.abs_err_estimate + c.abs_err_estimate + s.abs_err_estimate,
    })
}

/// `η1 = ∫ J(ω)/ω dω`.
pub fn eta1(model: &SpectralModel, tol: f64) -> Result<f64> {
    Ok(model.gap.omega_s * shifted_integral(model, 0.0, 1, tol)?.value)
}

/// `Π(t) = φ_c cos(ω_g t) - φ_s sin(ω_g t)`.
pub fn pi_of_t(model: &SpectralModel, t: f64, tol: f64) -> Result<f64> {
    let p = transform_pair(model, Weight::OverOmega, 0.0, t, tol)?;
    let (sn, cs) = (model.gap.omega_g * t).sin_cos();
    Ok(p.c * cs - p.s * sn)
}

/// `Δε(t) = ε_E(t) - ε_E(0) = d0 (η1 - Π(t))`.
pub fn bath_energy_delta(model: &SpectralModel, q: &QubitParams, t: f64, tol: f64) -> Result<Estimate> {
    let d0 = d0_param(q)?;
    let e = one_minus_cos(model, 0.0, 1, t, tol)?;
    let scale = d0 * model.gap.omega_s;
    Ok(Estimate {
        value: scale * e.value,
        abs_err: scale * e.abs_err,
    })
}

/// `Δε(∞) = d0 η1`.
pub fn bath_energy_offset(model: &SpectralModel, q: &QubitParams, tol: f64) -> Result<f64> {
    Ok(d0_param(q)? * eta1(model, tol)?)
}

/// Absolute `ε_E(0) = ∫ ω r(ω)/(e^{ω/T}-1) dω + η1` for a mode density `r`
/// that is bounded at the origin and grows at most algebraically.
pub fn initial_energy<R: Fn(f64) -> f64>(
    model: &SpectralModel,
    mode_density: R,
    t_corr: f64,
    tol: f64,
) -> Result<f64> {
    if !(t_corr > 0.0) {
        return eta1(model, tol);
    }
    let g = Integrand::new(
        |omega: f64| {
            let x = omega / t_corr;
            if x > 700.0 {
                return 0.0;
            }
            let occ = if x == 0.0 { t_corr } else { omega / x.exp_m1() };
            occ * mode_density(omega)
        },
        oscquad::EdgeHint::power(0.0),
        TailHint::Exponential { rate: 1.0 / t_corr },
    )?;
    let thermal = oscquad::integrate(&g, tol)?.require("thermal energy")?;
    Ok(thermal.value + eta1(model, tol)?)
}

/// `ε̇_E(t) = d0 (θ_c sin(ω_g t) + θ_s cos(ω_g t))`.
pub fn bath_energy_rate(model: &SpectralModel, q: &QubitParams, t: f64, tol: f64) -> Result<Estimate> {
    let d0 = d0_param(q)?;
    let p = transform_pair(model, Weight::Plain, 0.0, t, tol)?;
    let (sn, cs) = (model.gap.omega_g * t).sin_cos();
    Ok(Estimate {
        value: d0 * (p.c * sn + p.s * cs),
        abs_err: d0 * (p.c_err + p.s_err),
    })
}

/// `γ(t) = ∫ J_T(ω)/ω sin(ωt) dω = υ_c sin(ω_g t) + υ_s cos(ω_g t)`; `T = 0`
/// gives `γ₀`.
pub fn dephasing_rate(model: &SpectralModel, temperature: f64, t: f64, tol: f64) -> Result<Estimate> {
    let p = transform_pair(model, Weight::OverOmega, temperature, t, tol)?;
    let (sn, cs) = (model.gap.omega_g * t).sin_cos();
    Ok(Estimate {
        value: p.c * sn + p.s * cs,
        abs_err: p.c_err + p.s_err,
    })
}

/// `Ξ(t) = ∫ J_T(ω)/ω² (1 - cos ωt) dω`.
pub fn dephasing_factor(model: &SpectralModel, temperature: f64, t: f64, tol: f64) -> Result<Estimate> {
    let e = one_minus_cos(model, temperature, 2, t, tol)?;
    Ok(Estimate {
        value: e.value.max(0.0),
        abs_err: e.abs_err,
    })
}

/// `e^{-Ξ(t)}`, the factor multiplying `|ρ₀₁(0)|`.
pub fn coherence_factor(model: &SpectralModel, temperature: f64, t: f64, tol: f64) -> Result<f64> {
    Ok((-dephasing_factor(model, temperature, t, tol)?.value).exp())
}

/// `0`, then 63 geometric points up to `1/ω_s`, then uniform steps of
/// `π/(16 ω_g)` up to `horizon`.
pub fn default_grid(model: &SpectralModel, horizon: f64) -> Result<Vec<f64>> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(invalid("horizon", format!("must be positive, got {horizon}")));
    }
    let head_end = (1.0 / model.gap.omega_s).min(horizon);
    let lo = head_end * 1e-3;
    let n = HEAD_POINTS - 1;
    let mut times = vec![0.0];
    let ratio = (head_end / lo).ln() / (n - 1) as f64;
    times.extend((0..n).map(|k| lo * (ratio * k as f64).exp()));
    *times.last_mut().expect("nonempty") = head_end;
    let step = PI / (16.0 * model.gap.omega_g);
    let mut k = 1;
    loop {
        let t = head_end + k as f64 * step;
        if t > horizon * (1.0 + 1e-12) {
            break;
        }
        times.push(t);
        k += 1;
    }
    Ok(times)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    EnergyDelta,
    EnergyRate,
    DephasingRate,
    DephasingFactor,
    Coherence,
    Pi,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::EnergyDelta => "energy_delta",
            Quantity::EnergyRate => "energy_rate",
            Quantity::DephasingRate => "dephasing_rate",
            Quantity::DephasingFactor => "dephasing_factor",
            Quantity::Coherence => "coherence",
            Quantity::Pi => "pi",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub quantity: Quantity,
    pub params_digest: String,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest error estimate, for run summaries.
    pub fn max_error(&self) -> f64 {
        self.errors.iter().cloned().fold(0.0, f64::max)
    }
}

/// Evaluates `quantity` on `times` in parallel; output order follows `times`.
pub fn sample(
    model: &SpectralModel,
    q: &QubitParams,
    quantity: Quantity,
    times: &[f64],
    tol: f64,
    params_digest: &str,
) -> Result<TimeSeries> {
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("times", "must be strictly increasing"));
    }
    let point = |t: f64| -> Result<Estimate> {
        match quantity {
            Quantity::EnergyDelta => bath_energy_delta(model, q, t, tol),
            Quantity::EnergyRate => bath_energy_rate(model, q, t, tol),
            Quantity::DephasingRate => dephasing_rate(model, q.t_fact, t, tol),
            Quantity::DephasingFactor => dephasing_factor(model, q.t_fact, t, tol),
            Quantity::Coherence => {
                let x = dephasing_factor(model, q.t_fact, t, tol)?;
                let v = (-x.value).exp();
                Ok(Estimate {
                    value: v,
                    abs_err: v * x.abs_err,
                })
            }
            Quantity::Pi => {
                let p = transform_pair(model, Weight::OverOmega, 0.0, t, tol)?;
                let (sn, cs) = (model.gap.omega_g * t).sin_cos();
                Ok(Estimate {
                    value: p.c * cs - p.s * sn,
                    abs_err: p.c_err + p.s_err,
                })
            }
        }
    };
    let results: Vec<Estimate> = times
        .par_iter()
        .map(|&t| point(t))
        .collect::<Result<Vec<_>>>()?;
    Ok(TimeSeries {
        quantity,
        params_digest: params_digest.to_string(),
        times: times.to_vec(),
        values: results.iter().map(|e| e.value).collect(),
        errors: results.iter().map(|e| e.abs_err).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const ETA1_BM0: f64 = 0.596_347_362_323_194_1;

    fn bm(alpha: f64) -> SpectralModel {
        SpectralModel::benchmark(alpha, 1.0, 1.0).unwrap()
    }

    fn qubit() -> QubitParams {
        QubitParams::new(0.0, 1.0, 1.0, 1.0).unwrap()
    }

    /// Composite Simpson on `[0, top]` with `n` panels; the independent oracle.
    fn simpson(f: impl Fn(f64) -> f64, top: f64, n: usize) -> f64 {
        let h = top / n as f64;
        let mut acc = f(0.0) + f(top);
        for k in 1..n {
            acc += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc * h / 3.0
    }

    #[test]
    fn polar_angle_branches() {
        assert_eq!(polar_angle(1.0, 0.0).unwrap(), 0.0);
        assert_eq!(polar_angle(-1.0, 0.0).unwrap(), PI);
        assert_relative_eq!(polar_angle(0.0, 1.0).unwrap(), PI / 2.0);
        assert_relative_eq!(polar_angle(1.0, -1.0).unwrap(), 7.0 * PI / 4.0);
        assert_eq!(polar_angle(0.0, 0.0), Err(Error::UndefinedAngle));
        assert_eq!(polar_angle(-1.0, -0.0).unwrap(), PI);
    }

    #[test]
    fn polar_angle_matches_arccot_rules() {
        let arccot = |x: f64| PI / 2.0 - x.atan();
        for &(c, s) in &[(0.3, 0.7), (-2.0, 0.1), (1.5, -0.4), (-0.2, -3.0)] {
            let want = if s > 0.0 { arccot(c / s) } else { PI + arccot(c / s) };
            assert_relative_eq!(polar_angle(c, s).unwrap(), want, max_relative = 1e-15);
        }
    }

    #[test]
    fn unwrap_removes_jumps() {
        let u = unwrap_angles(&[6.0, 0.1, 0.3]);
        assert_relative_eq!(u[1], 0.1 + TAU);
    }

    #[test]
    fn d0_values() {
        let q = |s: f64, w: f64, t: f64| QubitParams::new(s, w, t, 1.0).unwrap();
        assert_eq!(d0_param(&q(1.0, 1.0, 1.0)).unwrap(), 0.0);
        assert_eq!(d0_param(&q(-1.0, 1.0, 1.0)).unwrap(), 0.0);
        assert_eq!(d0_param(&q(0.0, 1.0, 1.0)).unwrap(), 2.0);
        // direct sinh/cosh evaluation
        let (sh, ch) = (1f64.sinh(), 1f64.cosh());
        let want = 2.0 * (1.0 + 0.5 * (sh - 0.5 * ch) / (ch - 0.5 * sh));
        assert_relative_eq!(d0_param(&q(0.5, 1.0, 1.0)).unwrap(), want, max_relative = 1e-14);
        assert_relative_eq!(want, 2.422_469_188, epsilon = 1e-9);
        assert!(d0_param(&q(0.5, 1.0, 0.0)).unwrap() > 0.0);
    }

    #[test]
    fn plain_pair_at_unit_time() {
        let p = transform_pair(&bm(0.0), Weight::Plain, 0.0, 1.0, 1e-12).unwrap();
        assert_relative_eq!(p.c, 0.5, epsilon = 1e-12);
        assert_relative_eq!(p.s, 0.5, epsilon = 1e-12);
        assert_relative_eq!(p.angle.unwrap(), PI / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn pairs_at_zero_time() {
        let p = transform_pair(&bm(0.0), Weight::Plain, 0.0, 0.0, 1e-12).unwrap();
        assert_relative_eq!(p.c, 1.0, epsilon = 1e-12);
        assert_eq!(p.s, 0.0);
        let p = transform_pair(&bm(0.0), Weight::OverOmega, 0.0, 0.0, 1e-12).unwrap();
        assert_relative_eq!(p.c, ETA1_BM0, epsilon = 1e-12);
        assert_eq!(p.angle, Some(0.0));
    }

    #[test]
    fn eta1_of_bm0() {
        assert_relative_eq!(eta1(&bm(0.0), 1e-12).unwrap(), ETA1_BM0, epsilon = 1e-13);
    }

    #[test]
    fn pi_matches_fine_grid_quadrature() {
        let m = bm(0.0);
        let t = 10.0;
        let got = pi_of_t(&m, t, 1e-12).unwrap();
        // Π(t) = ∫ J(ω)/ω cos(ωt) dω over [1, 1+60]
        let oracle = simpson(|x| (-x).exp() / (1.0 + x) * ((1.0 + x) * t).cos(), 60.0, 400_000);
        assert_relative_eq!(got, oracle, epsilon = 1e-10);
        assert_relative_eq!(pi_of_t(&m, 0.0, 1e-12).unwrap(), ETA1_BM0, epsilon = 1e-12);
    }

    #[test]
    fn energy_delta_values() {
        let m = bm(0.0);
        let q = qubit();
        assert_eq!(bath_energy_delta(&m, &q, 0.0, 1e-10).unwrap().value, 0.0);
        let t = 5.0;
        let got = bath_energy_delta(&m, &q, t, 1e-12).unwrap().value;
        let pi = simpson(|x| (-x).exp() / (1.0 + x) * ((1.0 + x) * t).cos(), 60.0, 400_000);
        assert_relative_eq!(got, 2.0 * (ETA1_BM0 - pi), epsilon = 1e-10);
        // long times approach d0 η1 within the R1 envelope
        let t = 200.0;
        let got = bath_energy_delta(&m, &q, t, 1e-10).unwrap().value;
        let r1 = transform_pair(&m, Weight::OverOmega, 0.0, t, 1e-10).unwrap().r;
        assert!((got - 2.0 * ETA1_BM0).abs() <= 2.0 * r1 * (1.0 + 1e-6));
    }

    #[test]
    fn short_time_branch_is_continuous() {
        let m = bm(0.0);
        let q = qubit();
        // the short-time branch is used up to (ν0+1)τ = 1
        let below = bath_energy_delta(&m, &q, 0.5 * (1.0 - 1e-9), 1e-12).unwrap().value;
        let above = bath_energy_delta(&m, &q, 0.5 * (1.0 + 1e-9), 1e-12).unwrap().value;
        assert_relative_eq!(below, above, max_relative = 1e-8);
    }

    #[test]
    fn rate_values() {
        let m = bm(0.0);
        let q = qubit();
        assert_eq!(bath_energy_rate(&m, &q, 0.0, 1e-10).unwrap().value, 0.0);
        assert!(bath_energy_rate(&m, &q, 1e-3, 1e-10).unwrap().value > 0.0);
        assert_eq!(dephasing_rate(&m, 1.0, 0.0, 1e-10).unwrap().value, 0.0);
    }

    #[test]
    fn dephasing_rate_matches_fine_grid_quadrature() {
        let m = bm(0.0);
        let t = 1.0;
        let got = dephasing_rate(&m, 1.0, t, 1e-12).unwrap().value;
        let oracle = simpson(
            |x| {
                let w = 1.0 + x;
                (-x).exp() / w / (w / 2.0).tanh() * (w * t).sin()
            },
            60.0,
            200_000,
        );
        assert_relative_eq!(got, oracle, epsilon = 1e-11);
    }

    #[test]
    fn low_temperature_rate_approaches_zero_temperature() {
        let m = bm(0.0);
        let g0 = dephasing_rate(&m, 0.0, 1.0, 1e-12).unwrap().value;
        let gt = dephasing_rate(&m, 1e-4, 1.0, 1e-12).unwrap().value;
        assert!(((gt - g0) / g0).abs() <= 1e-4);
    }

    #[test]
    fn gap_translation_identity() {
        // ∫ J/ω sin(ωt) dω directly on the band versus the shifted form
        let m = SpectralModel::benchmark(0.5, 2.0, 1.0).unwrap();
        let t = 3.0;
        let got = dephasing_rate(&m, 0.0, t, 1e-12).unwrap().value;
        let oracle = simpson(
            |x| {
                let w = 2.0 + x;
                x.sqrt() * (-x).exp() / w * (w * t).sin()
            },
            60.0,
            2_000_000,
        );
        assert_relative_eq!(got, oracle, epsilon = 1e-8);
    }

    #[test]
    fn dephasing_factor_start_and_derivative() {
        let m = bm(0.0);
        assert_eq!(dephasing_factor(&m, 0.0, 0.0, 1e-10).unwrap().value, 0.0);
        assert_eq!(coherence_factor(&m, 0.0, 0.0, 1e-10).unwrap(), 1.0);
        let t = 2.0;
        let h = 1e-4;
        let xp = dephasing_factor(&m, 0.0, t + h, 1e-13).unwrap().value;
        let xm = dephasing_factor(&m, 0.0, t - h, 1e-13).unwrap().value;
        let gamma = dephasing_rate(&m, 0.0, t, 1e-13).unwrap().value;
        assert_relative_eq!((xp - xm) / (2.0 * h), gamma, max_relative = 1e-5);
    }

    #[test]
    fn default_grid_shape() {
        let g = default_grid(&bm(0.0), 10.0).unwrap();
        assert_eq!(g[0], 0.0);
        assert_relative_eq!(g[63], 1.0);
        assert_relative_eq!(g[64] - g[63], PI / 16.0, max_relative = 1e-12);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn sample_preserves_order() {
        let m = bm(0.0);
        let times = [0.0, 0.5, 1.0, 2.0];
        let ts = sample(&m, &qubit(), Quantity::DephasingFactor, &times, 1e-10, "x").unwrap();
        assert_eq!(ts.times, times);
        for (t, v) in ts.times.iter().zip(&ts.values) {
            let direct = dephasing_factor(&m, 1.0, *t, 1e-10).unwrap().value;
            assert_eq!(*v, direct);
        }
        assert!(sample(&m, &qubit(), Quantity::Pi, &[1.0, 1.0], 1e-10, "x").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn polar_reconstructs_pair(c in -10.0f64..10.0, s in -10.0f64..10.0) {
            prop_assume!(c.hypot(s) > 1e-6);
            let p = OscPair::new(c, s);
            let a = p.angle.unwrap();
            prop_assert!((0.0..TAU).contains(&a));
            prop_assert!((p.r * a.cos() - c).abs() <= 1e-12 * p.r);
            prop_assert!((p.r * a.sin() - s).abs() <= 1e-12 * p.r);
        }

        #[test]
        fn decomposition_identity(t in 0.1f64..30.0) {
            let m = bm(0.5);
            let p = transform_pair(&m, Weight::OverOmega, 0.0, t, 1e-10).unwrap();
            let wt = m.gap.omega_g * t;
            let direct = p.c * wt.cos() - p.s * wt.sin();
            let polar = p.r * (wt + p.angle.unwrap()).cos();
            prop_assert!((direct - polar).abs() <= 1e-12);
        }

        #[test]
        fn pi_bounded_by_envelope(t in 0.0f64..40.0) {
            let m = bm(0.0);
            let p = transform_pair(&m, Weight::OverOmega, 0.0, t, 1e-10).unwrap();
            let pi = pi_of_t(&m, t, 1e-10).unwrap();
            prop_assert!(pi.abs() <= p.r * (1.0 + 1e-12));
        }

        #[test]
        fn coherence_in_unit_interval(t in 0.0f64..20.0, temp in 0.0f64..3.0) {
            let c = coherence_factor(&bm(0.0), temp, t, 1e-10).unwrap();
            prop_assert!(c > 0.0 && c <= 1.0);
        }

        #[test]
        fn d0_nonnegative(s in -1.0f64..=1.0, w in -5.0f64..5.0, t in 0.0f64..5.0) {
            let d = d0_param(&QubitParams::new(s, w, t, 1.0).unwrap()).unwrap();
            prop_assert!(d >= -1e-12);
        }
    }
}
