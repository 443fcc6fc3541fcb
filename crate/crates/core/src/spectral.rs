//! Gapped spectral densities. `J(ω) = 0` below the gap edge `ω_g`, and above
//! it `J(ω_g + ω_s ν) = ω_s Ω(ν)` for a dimensionless profile `Ω`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::oscquad::{self, EdgeHint, Integrand, TailHint};
use crate::series::{binomial, is_natural, AsymptoticSeries, EdgeTerm, PowerSeries, SeriesClass};

pub const DEFAULT_SERIES_ORDER: usize = 8;

/// Points in the geometric validation grid.
const VALIDATION_POINTS: usize = 10_000;
/// Upper end of the validation grid in units of `ω_s` above the gap.
const VALIDATION_SPAN: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapSpec {
    pub omega_g: f64,
    pub omega_s: f64,
    pub nu0: f64,
}

impl GapSpec {
    pub fn new(omega_g: f64, omega_s: f64) -> Result<Self> {
        if !(omega_g > 0.0 && omega_g.is_finite()) {
            return Err(invalid("omega_g", format!("must be positive, got {omega_g}")));
        }
        if !(omega_s > 0.0 && omega_s.is_finite()) {
            return Err(invalid("omega_s", format!("must be positive, got {omega_s}")));
        }
        Ok(GapSpec {
            omega_g,
            omega_s,
            nu0: omega_g / omega_s,
        })
    }

    /// `τ = ω_s t`
    pub fn tau(&self, t: f64) -> f64 {
        self.omega_s * t
    }

    /// `ν1 = 2T/ω_s`
    pub fn nu1(&self, temperature: f64) -> f64 {
        2.0 * temperature / self.omega_s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitParams {
    /// `⟨φ₀|σ₃|φ₀⟩`
    pub s: f64,
    pub omega0: f64,
    /// Temperature used to prepare the correlated state.
    pub t_corr: f64,
    /// Temperature of the bath in the factorized preparation.
    pub t_fact: f64,
}

impl QubitParams {
    pub fn new(s: f64, omega0: f64, t_corr: f64, t_fact: f64) -> Result<Self> {
        if !(s.abs() <= 1.0) {
            return Err(invalid("s", format!("must lie in [-1, 1], got {s}")));
        }
        if !omega0.is_finite() {
            return Err(invalid("omega0", "must be finite"));
        }
        if !(t_corr >= 0.0 && t_corr.is_finite()) {
            return Err(invalid("t_corr", format!("must be >= 0, got {t_corr}")));
        }
        if !(t_fact >= 0.0 && t_fact.is_finite()) {
            return Err(invalid("t_fact", format!("must be >= 0, got {t_fact}")));
        }
        Ok(QubitParams {
            s,
            omega0,
            t_corr,
            t_fact,
        })
    }
}

/// Analytic families for `Ω(ν)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// `w ν^α e^{-ν}`
    ExpCutoff {
        alpha: f64,
        #[serde(default = "unit")]
        weight: f64,
    },
    /// `w ν^α [ln(1 + 1/ν)]^β e^{-ν}`, which behaves as `w ν^α (-ln ν)^β` at the edge.
    LogPerturbed {
        alpha: f64,
        beta: f64,
        #[serde(default = "unit")]
        weight: f64,
    },
    /// `w ν^α (1 - ν/ν_M)^p` on `[0, ν_M]`, zero beyond.
    HardCutoff {
        alpha: f64,
        nu_max: f64,
        #[serde(default = "two")]
        edge_power: f64,
        #[serde(default = "unit")]
        weight: f64,
    },
    /// `w ν^α (1 + ν)^{-(α + 1 + χ0)}`, so `Ω = O(ν^{-1-χ0})`.
    AlgebraicTail {
        alpha: f64,
        chi0: f64,
        #[serde(default = "unit")]
        weight: f64,
    },
}

fn unit() -> f64 {
    1.0
}

fn two() -> f64 {
    2.0
}

impl Profile {
    pub fn exp_cutoff(alpha: f64) -> Self {
        Profile::ExpCutoff { alpha, weight: 1.0 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Profile::ExpCutoff { .. } => "exp_cutoff",
            Profile::LogPerturbed { .. } => "log_perturbed",
            Profile::HardCutoff { .. } => "hard_cutoff",
            Profile::AlgebraicTail { .. } => "algebraic_tail",
        }
    }

    pub fn alpha(&self) -> f64 {
        match *self {
            Profile::ExpCutoff { alpha, .. }
            | Profile::LogPerturbed { alpha, .. }
            | Profile::HardCutoff { alpha, .. }
            | Profile::AlgebraicTail { alpha, .. } => alpha,
        }
    }

    fn weight(&self) -> f64 {
        match *self {
            Profile::ExpCutoff { weight, .. }
            | Profile::LogPerturbed { weight, .. }
            | Profile::HardCutoff { weight, .. }
            | Profile::AlgebraicTail { weight, .. } => weight,
        }
    }

    fn logpow(&self) -> f64 {
        match *self {
            Profile::LogPerturbed { beta, .. } => beta,
            _ => 0.0,
        }
    }

    pub fn class(&self) -> SeriesClass {
        if is_natural(self.logpow()) {
            SeriesClass::First
        } else {
            SeriesClass::Second
        }
    }

    fn check(&self) -> Result<()> {
        let alpha = self.alpha();
        if !(alpha > -1.0 && alpha.is_finite()) {
            return Err(invalid("alpha", format!("edge exponent must exceed -1, got {alpha}")));
        }
        let w = self.weight();
        if !(w > 0.0 && w.is_finite()) {
            return Err(invalid(
                "weight",
                format!("leading coefficient must be positive, got {w}"),
            ));
        }
        match *self {
            Profile::LogPerturbed { beta, .. } => {
                if !beta.is_finite() {
                    return Err(invalid("beta", "must be finite"));
                }
                if alpha == 0.0 && beta != 0.0 {
                    return Err(invalid(
                        "beta",
                        "a vanishing edge exponent requires a vanishing log power",
                    ));
                }
            }
            Profile::HardCutoff {
                nu_max, edge_power, ..
            } => {
                if !(nu_max > 0.0 && nu_max.is_finite()) {
                    return Err(invalid("nu_max", format!("must be positive, got {nu_max}")));
                }
                if !(edge_power >= 0.0 && edge_power.is_finite()) {
                    return Err(invalid("edge_power", format!("must be >= 0, got {edge_power}")));
                }
            }
            Profile::AlgebraicTail { chi0, .. } => {
                if !(chi0 > 0.0 && chi0.is_finite()) {
                    return Err(invalid("chi0", format!("must be positive, got {chi0}")));
                }
            }
            Profile::ExpCutoff { .. } => {}
        }
        Ok(())
    }

    /// `Ω(ν)` for `ν ≥ 0`; `+∞` at the origin when the edge diverges.
    fn eval(&self, nu: f64) -> f64 {
        let alpha = self.alpha();
        let w = self.weight();
        if nu == 0.0 {
            return match alpha.partial_cmp(&0.0) {
                Some(std::cmp::Ordering::Greater) => 0.0,
                Some(std::cmp::Ordering::Equal) => w,
                _ => f64::INFINITY,
            };
        }
        let edge = w * nu.powf(alpha);
        match *self {
            Profile::ExpCutoff { .. } => edge * (-nu).exp(),
            Profile::LogPerturbed { beta, .. } => {
                edge * (1.0 / nu).ln_1p().powf(beta) * (-nu).exp()
            }
            Profile::HardCutoff {
                nu_max, edge_power, ..
            } => {
                if nu >= nu_max {
                    0.0
                } else {
                    edge * (1.0 - nu / nu_max).powf(edge_power)
                }
            }
            Profile::AlgebraicTail { chi0, .. } => edge * (1.0 + nu).powf(-(alpha + 1.0 + chi0)),
        }
    }

    /// `Ω'(ν)` for `ν > 0`.
    fn eval_prime(&self, nu: f64) -> f64 {
        let alpha = self.alpha();
        let omega = self.eval(nu);
        if omega == 0.0 {
            return 0.0;
        }
        let log_deriv = alpha / nu
            + match *self {
                Profile::ExpCutoff { .. } => -1.0,
                Profile::LogPerturbed { beta, .. } => {
                    let l = (1.0 / nu).ln_1p();
                    -1.0 - beta / (nu * (1.0 + nu) * l)
                }
                Profile::HardCutoff {
                    nu_max, edge_power, ..
                } => -edge_power / (nu_max - nu),
                Profile::AlgebraicTail { chi0, .. } => -(alpha + 1.0 + chi0) / (1.0 + nu),
            };
        omega * log_deriv
    }

    fn tail(&self) -> TailHint {
        match *self {
            Profile::ExpCutoff { .. } | Profile::LogPerturbed { .. } => {
                TailHint::Exponential { rate: 1.0 }
            }
            Profile::HardCutoff { nu_max, .. } => TailHint::Cutoff { nu_max },
            Profile::AlgebraicTail { chi0, .. } => TailHint::Algebraic {
                exponent: 1.0 + chi0,
            },
        }
    }

    fn chi0(&self) -> Option<f64> {
        match *self {
            Profile::AlgebraicTail { chi0, .. } => Some(chi0),
            _ => None,
        }
    }

    /// Edge expansion of `Ω` through `order` exponent levels.
    fn series(&self, order: usize) -> AsymptoticSeries {
        let alpha = self.alpha();
        let w = self.weight();
        let n = order + 1;
        let exp_neg = exp_taylor(-1.0, n);
        let mut terms = Vec::new();
        let mut exact = false;
        match *self {
            Profile::ExpCutoff { .. } => {
                for (k, c) in exp_neg.coeffs().iter().enumerate() {
                    terms.push(term(alpha + k as f64, 0.0, w * c));
                }
            }
            Profile::LogPerturbed { beta, .. } => {
                // [ln(1+1/ν)]^β = (L + ε)^β with L = -ln ν, ε = ln(1+ν)
                let eps = log1p_taylor(n);
                let mut eps_pow = PowerSeries::constant(1.0, n);
                for j in 0..n {
                    let cj = binomial(beta, j);
                    if cj != 0.0 {
                        let prod = eps_pow.mul(&exp_neg);
                        for (k, c) in prod.coeffs().iter().enumerate() {
                            terms.push(term(alpha + k as f64, beta - j as f64, w * cj * c));
                        }
                    }
                    eps_pow = eps_pow.mul(&eps);
                }
            }
            Profile::HardCutoff {
                nu_max, edge_power, ..
            } => {
                exact = is_natural(edge_power);
                let top = if exact {
                    edge_power.round() as usize + 1
                } else {
                    n
                };
                for k in 0..top {
                    let c = binomial(edge_power, k) * (-1.0 / nu_max).powi(k as i32);
                    terms.push(term(alpha + k as f64, 0.0, w * c));
                }
            }
            Profile::AlgebraicTail { chi0, .. } => {
                let a = -(alpha + 1.0 + chi0);
                for k in 0..n {
                    terms.push(term(alpha + k as f64, 0.0, w * binomial(a, k)));
                }
            }
        }
        let resolved = if exact { None } else { Some(alpha + n as f64) };
        AsymptoticSeries::from_terms(self.class(), terms, order, resolved)
    }
}

fn term(alpha: f64, logpow: f64, coeff: f64) -> EdgeTerm {
    EdgeTerm {
        alpha,
        logpow,
        coeff,
    }
}

/// Taylor series of `e^{rate·ν}`.
fn exp_taylor(rate: f64, n: usize) -> PowerSeries {
    let mut c = vec![0.0; n];
    let mut v = 1.0;
    for (k, slot) in c.iter_mut().enumerate() {
        if k > 0 {
            v *= rate / k as f64;
        }
        *slot = v;
    }
    PowerSeries::new(c)
}

/// Taylor series of `ln(1+ν)`.
fn log1p_taylor(n: usize) -> PowerSeries {
    let c = (0..n)
        .map(|k| {
            if k == 0 {
                0.0
            } else if k % 2 == 1 {
                1.0 / k as f64
            } else {
                -1.0 / k as f64
            }
        })
        .collect();
    PowerSeries::new(c)
}

/// `coth x` for `x > 0` without overflow.
pub fn coth(x: f64) -> f64 {
    if x > 20.0 {
        1.0 + 2.0 * (-2.0 * x).exp()
    } else {
        1.0 / x.tanh()
    }
}

/// `coth(ω/2T)`, taken as 1 at `T = 0`.
pub fn thermal_factor(temperature: f64, omega: f64) -> f64 {
    if temperature == 0.0 {
        1.0
    } else {
        coth(omega / (2.0 * temperature))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "snake_case")]
pub enum SeriesTarget {
    Omega,
    Lambda0,
    LambdaT { temperature: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralModel {
    pub gap: GapSpec,
    pub profile: Profile,
    pub omega_series: AsymptoticSeries,
    pub chi0: Option<f64>,
    pub omega_max: Option<f64>,
}

/// Constants of `Q_T`: `ν1`, `q1 = coth(ν0/ν1)`, `q0 = q1/ν0` and
/// `κ = q1 - 1/q1`, which lets `Q_T` be written without cancellation as
/// `q0/(1+ν/ν0)·(1 - κ t/(1 + q1 t))`, `t = tanh(ν/ν1)`.
#[derive(Debug, Clone, Copy)]
struct QtConstants {
    nu1: f64,
    q0: f64,
    q1: f64,
    kappa: f64,
}

impl SpectralModel {
    pub fn new(gap: GapSpec, profile: Profile) -> Result<Self> {
        Self::with_order(gap, profile, DEFAULT_SERIES_ORDER)
    }

    pub fn with_order(gap: GapSpec, profile: Profile, order: usize) -> Result<Self> {
        profile.check()?;
        if order == 0 {
            return Err(invalid("series_order", "must be at least 1"));
        }
        let omega_max = match profile {
            Profile::HardCutoff { nu_max, .. } => Some(gap.omega_g + gap.omega_s * nu_max),
            _ => None,
        };
        Ok(SpectralModel {
            gap,
            profile,
            omega_series: profile.series(order),
            chi0: profile.chi0(),
            omega_max,
        })
    }

    /// Convenience constructor for `ν^α e^{-ν}`.
    pub fn benchmark(alpha: f64, omega_g: f64, omega_s: f64) -> Result<Self> {
        Self::new(GapSpec::new(omega_g, omega_s)?, Profile::exp_cutoff(alpha))
    }

    pub fn class(&self) -> SeriesClass {
        self.profile.class()
    }

    pub fn edge(&self) -> EdgeHint {
        EdgeHint {
            alpha: self.profile.alpha(),
            logpow: self.profile.logpow(),
        }
    }

    /// Decay of `Ω` at large `ν`.
    pub fn tail(&self) -> TailHint {
        self.profile.tail()
    }

    fn check_nu(nu: f64) -> Result<()> {
        if nu >= 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!("nu must be >= 0, got {nu}")))
        }
    }

    pub fn eval_omega(&self, nu: f64) -> Result<f64> {
        Self::check_nu(nu)?;
        Ok(self.profile.eval(nu))
    }

    /// `Ω` without the domain check, for integrands on `ν > 0`.
    pub fn omega(&self, nu: f64) -> f64 {
        self.profile.eval(nu)
    }

    pub fn eval_omega_prime(&self, nu: f64) -> Result<f64> {
        if !(nu > 0.0) {
            return Err(Error::Domain(format!("nu must be > 0, got {nu}")));
        }
        Ok(self.profile.eval_prime(nu))
    }

    pub fn eval_j(&self, omega: f64) -> Result<f64> {
        if !(omega >= 0.0) {
            return Err(Error::Domain(format!("omega must be >= 0, got {omega}")));
        }
        if omega < self.gap.omega_g {
            return Ok(0.0);
        }
        let nu = (omega - self.gap.omega_g) / self.gap.omega_s;
        Ok(self.gap.omega_s * self.profile.eval(nu))
    }

    pub fn eval_jt(&self, temperature: f64, omega: f64) -> Result<f64> {
        if !(temperature > 0.0) {
            return Err(Error::Domain(format!(
                "temperature must be > 0, got {temperature}"
            )));
        }
        if omega == 0.0 {
            // J vanishes inside the gap, so J_T(0) = 0·∞ cannot arise
            return Err(Error::Singular("J_T at omega = 0".into()));
        }
        if !(omega > 0.0) {
            return Err(Error::Domain(format!("omega must be > 0, got {omega}")));
        }
        let j = self.eval_j(omega)?;
        if j == 0.0 {
            return Ok(0.0);
        }
        Ok(j * coth(omega / (2.0 * temperature)))
    }

    pub fn eval_lambda0(&self, nu: f64) -> Result<f64> {
        Self::check_nu(nu)?;
        Ok(self.profile.eval(nu) / (1.0 + nu / self.gap.nu0))
    }

    fn qt_constants(&self, temperature: f64) -> Result<QtConstants> {
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::Domain(format!(
                "Q_T needs temperature > 0 (use Λ0 at zero temperature), got {temperature}"
            )));
        }
        let nu0 = self.gap.nu0;
        let nu1 = self.gap.nu1(temperature);
        let a = nu0 / nu1;
        let q1 = coth(a);
        let kappa = 2.0 / (2.0 * a).sinh();
        Ok(QtConstants {
            nu1,
            q0: q1 / nu0,
            q1,
            kappa,
        })
    }

    pub fn eval_qt(&self, temperature: f64, nu: f64) -> Result<f64> {
        Self::check_nu(nu)?;
        let c = self.qt_constants(temperature)?;
        let t = (nu / c.nu1).tanh();
        Ok(c.q0 / (1.0 + nu / self.gap.nu0) * (1.0 - c.kappa * t / (1.0 + c.q1 * t)))
    }

    pub fn eval_lambda_t(&self, temperature: f64, nu: f64) -> Result<f64> {
        let q = self.eval_qt(temperature, nu)?;
        let omega = self.profile.eval(nu);
        if omega == 0.0 {
            return Ok(0.0);
        }
        Ok(q * omega)
    }

    /// Taylor series of `Q_T` at the origin with `n` coefficients.
    fn qt_taylor(&self, temperature: f64, n: usize) -> Result<PowerSeries> {
        let c = self.qt_constants(temperature)?;
        let geo = PowerSeries::linear(1.0, 1.0 / self.gap.nu0, n).recip()?;
        let th = PowerSeries::tanh_linear(c.nu1, n);
        let denom = PowerSeries::constant(1.0, n).add(&th.scale(c.q1)).recip()?;
        let inner = PowerSeries::constant(1.0, n).add(&th.mul(&denom).scale(-c.kappa));
        Ok(geo.mul(&inner).scale(c.q0))
    }

    /// Edge series of `Ω`, `Λ0` or `Λ_T` through `order` exponent levels.
    pub fn derive_series(&self, target: SeriesTarget, order: usize) -> Result<AsymptoticSeries> {
        let source = if order <= self.omega_series.order {
            &self.omega_series
        } else {
            return Err(Error::Truncated(format!(
                "model carries {} levels of the Ω series, {order} requested",
                self.omega_series.order
            )));
        };
        match target {
            SeriesTarget::Omega => Ok(AsymptoticSeries::from_terms(
                source.class,
                source.terms.clone(),
                order,
                source.resolved_below,
            )),
            SeriesTarget::Lambda0 => {
                let geo = PowerSeries::linear(1.0, 1.0 / self.gap.nu0, order).recip()?;
                source.times(&geo, order)
            }
            SeriesTarget::LambdaT { temperature } => {
                let q = self.qt_taylor(temperature, order)?;
                source.times(&q, order)
            }
        }
    }

    /// Checks the model's constraints on a dense sample.
    pub fn validate(&self, temperature: Option<f64>) -> ValidationReport {
        let mut checks = Vec::new();
        let lead = self.omega_series.leading();
        checks.push(match lead {
            Some(t) if t.coeff > 0.0 && t.alpha > -1.0 => ConstraintCheck::pass(
                "leading_coefficient",
                format!("c0 = {} at alpha0 = {}", t.coeff, t.alpha),
            ),
            _ => ConstraintCheck::fail("leading_coefficient", "no positive leading term", None),
        });

        let nu0 = self.gap.nu0;
        let eta = Integrand::new(
            |nu: f64| self.omega(nu) / (nu0 + nu),
            self.edge(),
            self.tail(),
        )
        .and_then(|g| oscquad::integrate(&g, 1e-10));
        checks.push(match eta {
            Ok(r) if r.converged && r.value.is_finite() => {
                ConstraintCheck::pass("integrability", format!("∫J/ω = {}", r.value))
            }
            Ok(r) => ConstraintCheck::fail(
                "integrability",
                format!("∫J/ω did not converge: {} ± {}", r.value, r.abs_err_estimate),
                None,
            ),
            Err(e) => ConstraintCheck::fail("integrability", e.to_string(), None),
        });

        let grid = self.validation_grid();
        let mut nonneg = ConstraintCheck::pass("nonnegative", "Ω ≥ 0 on grid");
        let mut zero_t = ConstraintCheck::pass("derivative_zero_t", "J' < J/ω on grid");
        let mut finite_t = temperature.map(|t| {
            ConstraintCheck::pass("derivative_finite_t", format!("J' < (1/ω + cosech(ω/T)/T)J on grid, T = {t}"))
        });
        for &nu in &grid {
            let om = self.omega(nu);
            let dom = self.profile.eval_prime(nu);
            if !om.is_finite() || !dom.is_finite() {
                let f = ConstraintCheck::fail("finite", "non-finite Ω or Ω'", Some(nu));
                checks.push(f);
                return ValidationReport { checks };
            }
            if om < 0.0 && nonneg.passed {
                nonneg = ConstraintCheck::fail("nonnegative", format!("Ω = {om}"), Some(nu));
            }
            // J'(ω) = Ω'(ν) and J/ω = Ω/(ν0+ν)
            if !(dom < om / (nu0 + nu)) && zero_t.passed {
                zero_t = ConstraintCheck::fail(
                    "derivative_zero_t",
                    format!("Ω' = {dom} ≥ Ω/(ν0+ν) = {}", om / (nu0 + nu)),
                    Some(nu),
                );
            }
            if let (Some(check), Some(t)) = (finite_t.as_mut(), temperature) {
                let omega = self.gap.omega_g + self.gap.omega_s * nu;
                let x = omega / t;
                let csch = if x > 700.0 { 0.0 } else { 1.0 / x.sinh() };
                let rhs = om * (1.0 / (nu0 + nu) + self.gap.omega_s * csch / t);
                if !(dom < rhs) && check.passed {
                    *check = ConstraintCheck::fail(
                        "derivative_finite_t",
                        format!("Ω' = {dom} ≥ {rhs}"),
                        Some(nu),
                    );
                }
            }
        }
        checks.push(nonneg);
        checks.push(zero_t);
        checks.extend(finite_t);
        ValidationReport { checks }
    }

    /// Geometric grid of `ν` over `[1e-8·top, top]`, `top = min(50, ν_M)`.
    fn validation_grid(&self) -> Vec<f64> {
        let top = match self.profile {
            Profile::HardCutoff { nu_max, .. } => nu_max.min(VALIDATION_SPAN) * (1.0 - 1e-9),
            _ => VALIDATION_SPAN,
        };
        let lo = top * 1e-8;
        let ratio = (top / lo).ln() / (VALIDATION_POINTS - 1) as f64;
        (0..VALIDATION_POINTS)
            .map(|k| lo * (ratio * k as f64).exp())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    /// `ν` where the check first failed.
    pub location: Option<f64>,
}

impl ConstraintCheck {
    fn pass(name: &str, detail: impl Into<String>) -> Self {
        ConstraintCheck {
            name: name.to_string(),
            passed: true,
            detail: detail.into(),
            location: None,
        }
    }

    fn fail(name: &str, detail: impl Into<String>, location: Option<f64>) -> Self {
        ConstraintCheck {
            name: name.to_string(),
            passed: false,
            detail: detail.into(),
            location,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<ConstraintCheck>,
}

impl ValidationReport {
    pub fn get(&self, name: &str) -> Option<&ConstraintCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn passed(&self, name: &str) -> bool {
        self.get(name).is_some_and(|c| c.passed)
    }

    /// The hard requirements: positivity, integrability, finiteness.
    pub fn admissible(&self) -> bool {
        self.checks
            .iter()
            .filter(|c| !c.name.starts_with("derivative"))
            .all(|c| c.passed)
    }
}
