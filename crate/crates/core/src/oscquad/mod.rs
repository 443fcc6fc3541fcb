//! Semi-infinite Fourier-type and plain integrals over `[0, ∞)` for integrands
//! with an algebraic/logarithmic endpoint singularity at the origin.
//!
//! The Fourier engine splits the half line into three parts:
//!
//! * a singular head `[0, ν_cut]`, `ν_cut = min(1, π/(4τ))`, integrated after the
//!   substitution `ν = ν_cut·u^p` with `p = ⌈2/(1+α)⌉` (for `α < 1`), which
//!   turns `ν^α` into a smooth enough power of `u`;
//! * a bridge from `ν_cut` to the first zero of the kernel;
//! * half-period panels between consecutive kernel zeros, summed with
//!   compensated arithmetic and accelerated by iterated averaging.
//!
//! Tolerances are relative to the result, with a floor proportional to the
//! absolute mass `∫|g·kernel|` below which cancellation makes any further
//! claim meaningless.

mod accel;
mod gk;
mod sum;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use accel::{euler_average, MAX_DEPTH};
use gk::{adaptive, Adaptive};
use sum::NeumaierSum;

/// Maximum number of half-period panels before giving up.
pub const SEGMENT_BUDGET: usize = 10_000;

/// Adaptive subdivisions allowed inside one head, bridge or panel.
const PIECE_LIMIT: usize = 400;

/// Noise floor of the whole computation, in machine epsilons of `∫|integrand|`.
const MASS_FLOOR_ULPS: f64 = 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    Sin,
    Cos,
}

impl Kernel {
    fn eval(self, x: f64) -> f64 {
        match self {
            Kernel::Sin => x.sin(),
            Kernel::Cos => x.cos(),
        }
    }
}

/// Behaviour `g(ν) ~ ν^alpha (-ln ν)^logpow` as `ν → 0⁺`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeHint {
    pub alpha: f64,
    pub logpow: f64,
}

impl EdgeHint {
    pub fn power(alpha: f64) -> Self {
        EdgeHint { alpha, logpow: 0.0 }
    }
}

/// Large-`ν` behaviour of an integrand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailHint {
    /// `g(ν) = O(e^{-rate·ν})` up to algebraic factors.
    Exponential { rate: f64 },
    /// `g(ν) = O(ν^{-exponent})`.
    Algebraic { exponent: f64 },
    /// `g(ν) = 0` for `ν > nu_max`.
    Cutoff { nu_max: f64 },
}

/// An integrand on `[0, ∞)` together with its endpoint and tail descriptions.
pub struct Integrand<F> {
    f: F,
    edge: EdgeHint,
    tail: TailHint,
}

impl<F: Fn(f64) -> f64> Integrand<F> {
    pub fn new(f: F, edge: EdgeHint, tail: TailHint) -> Result<Self> {
        if !(edge.alpha > -1.0) || !edge.alpha.is_finite() {
            return Err(invalid(
                "alpha",
                format!("edge exponent must exceed -1, got {}", edge.alpha),
            ));
        }
        if !edge.logpow.is_finite() {
            return Err(invalid("logpow", "must be finite"));
        }
        match tail {
            TailHint::Exponential { rate } if !(rate > 0.0) => {
                return Err(invalid("rate", "exponential decay rate must be positive"))
            }
            TailHint::Algebraic { exponent } if !(exponent > 0.0) => {
                return Err(invalid("exponent", "algebraic decay exponent must be positive"))
            }
            TailHint::Cutoff { nu_max } if !(nu_max > 0.0 && nu_max.is_finite()) => {
                return Err(invalid("nu_max", "cutoff must be positive and finite"))
            }
            _ => {}
        }
        Ok(Integrand { f, edge, tail })
    }

    pub fn eval(&self, nu: f64) -> f64 {
        (self.f)(nu)
    }

    pub fn edge(&self) -> EdgeHint {
        self.edge
    }

    pub fn tail(&self) -> TailHint {
        self.tail
    }

    fn nu_max(&self) -> f64 {
        match self.tail {
            TailHint::Cutoff { nu_max } => nu_max,
            _ => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub abs_err_estimate: f64,
    pub segments_used: usize,
    pub converged: bool,
}

impl QuadResult {
    /// Turns a non-converged result into an error naming `quantity`.
    pub fn require(self, quantity: &str) -> Result<Self> {
        if self.converged && self.value.is_finite() {
            Ok(self)
        } else {
            Err(Error::NonConvergence {
                quantity: quantity.to_string(),
                value: self.value,
                abs_err: self.abs_err_estimate,
            })
        }
    }
}

fn substitution_power(alpha: f64) -> i32 {
    if alpha < 1.0 {
        (2.0 / (1.0 + alpha)).ceil() as i32
    } else {
        1
    }
}

fn piece_epsrel(tol: f64) -> f64 {
    (1e-3 * tol).max(4.0 * f64::EPSILON)
}

/// `∫_0^len h(ν) dν` for `h ~ ν^alpha` at the origin, via `ν = len·u^p`.
fn singular_head(h: &dyn Fn(f64) -> f64, len: f64, alpha: f64, epsrel: f64) -> Adaptive {
    let p = substitution_power(alpha);
    let pf = p as f64;
    let mapped = move |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let up1 = u.powi(p - 1);
        let nu = len * up1 * u;
        let v = h(nu);
        if v == 0.0 {
            0.0
        } else {
            v * len * pf * up1
        }
    };
    adaptive(&mapped, 0.0, 1.0, 0.0, epsrel, PIECE_LIMIT)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(invalid("tol", format!("must be positive, got {tol}")))
    }
}

/// `∫_0^∞ g(ν) dν`.
pub fn integrate<F: Fn(f64) -> f64>(g: &Integrand<F>, tol: f64) -> Result<QuadResult> {
    check_tol(tol)?;
    let epsrel = piece_epsrel(tol);
    let nu_max = g.nu_max();
    let head_len = nu_max.min(1.0);
    let f = |nu: f64| g.eval(nu);

    let head = singular_head(&f, head_len, g.edge.alpha, epsrel);
    let tail = match g.tail {
        TailHint::Cutoff { nu_max } if nu_max > head_len => {
            Some(adaptive(&f, head_len, nu_max, 0.0, epsrel, PIECE_LIMIT))
        }
        TailHint::Cutoff { .. } => None,
        TailHint::Exponential { .. } | TailHint::Algebraic { .. } => {
            // ∫_1^∞ g(ν) dν = ∫_0^1 g(1/u) u^{-2} du
            let edge = match g.tail {
                TailHint::Algebraic { exponent } => {
                    if exponent <= 1.0 {
                        return Err(invalid(
                            "exponent",
                            format!("integrand decays as ν^-{exponent}, not integrable"),
                        ));
                    }
                    exponent - 2.0
                }
                _ => 1.0,
            };
            let mapped = |u: f64| {
                if u <= 0.0 {
                    0.0
                } else {
                    let v = g.eval(1.0 / u);
                    if v == 0.0 {
                        0.0
                    } else {
                        v / (u * u)
                    }
                }
            };
            Some(singular_head(&mapped, 1.0, edge, epsrel))
        }
    };

    let mut total = NeumaierSum::default();
    total.add(head.value);
    let mut err = head.abs_err;
    let mut mass = head.abs_mass;
    let mut pieces = head.pieces;
    if let Some(t) = tail {
        total.add(t.value);
        err += t.abs_err;
        mass += t.abs_mass;
        pieces += t.pieces;
    }
    let value = total.total();
    let target = (tol * value.abs()).max(MASS_FLOOR_ULPS * f64::EPSILON * mass);
    Ok(QuadResult {
        value,
        abs_err_estimate: err,
        segments_used: pieces,
        converged: value.is_finite() && err <= target,
    })
}

/// `∫_a^b f(x) dx` for a smooth `f` on a finite interval.
pub fn integrate_interval<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    check_tol(tol)?;
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(Error::Domain(format!("need finite a <= b, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_err_estimate: 0.0,
            segments_used: 0,
            converged: true,
        });
    }
    let r = adaptive(&f, a, b, 0.0, tol, PIECE_LIMIT);
    let floor = MASS_FLOOR_ULPS * f64::EPSILON * r.abs_mass;
    Ok(QuadResult {
        value: r.value,
        abs_err_estimate: r.abs_err,
        segments_used: r.pieces,
        converged: r.value.is_finite() && (r.converged || r.abs_err <= floor),
    })
}

/// `∫_0^∞ g(ν)·kernel(ντ) dν`.
pub fn fourier<F: Fn(f64) -> f64>(
    g: &Integrand<F>,
    tau: f64,
    kind: Kernel,
    tol: f64,
) -> Result<QuadResult> {
    check_tol(tol)?;
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::Domain(format!("tau must be finite and >= 0, got {tau}")));
    }
    if tau == 0.0 {
        return match kind {
            Kernel::Cos => integrate(g, tol),
            Kernel::Sin => Ok(QuadResult {
                value: 0.0,
                abs_err_estimate: 0.0,
                segments_used: 0,
                converged: true,
            }),
        };
    }
    if let TailHint::Algebraic { exponent } = g.tail {
        if exponent <= 0.0 {
            return Err(invalid("exponent", "tail must decay"));
        }
    }

    let epsrel = piece_epsrel(tol);
    let nu_max = g.nu_max();
    let weighted = |nu: f64| {
        let v = g.eval(nu);
        if v == 0.0 {
            0.0
        } else {
            v * kind.eval(nu * tau)
        }
    };

    let period = PI / tau;
    let nu_cut = (PI / (4.0 * tau)).min(1.0).min(nu_max);
    let head = singular_head(&weighted, nu_cut, g.edge.alpha, epsrel);

    let mut base = NeumaierSum::default();
    base.add(head.value);
    let mut err = head.abs_err;
    let mut mass = head.abs_mass;
    let mut segments = 1usize;

    let phase = match kind {
        Kernel::Sin => 0.0,
        Kernel::Cos => 0.5,
    };
    let first_zero = ((nu_cut / period - phase).ceil() + phase) * period;
    let bridge_end = first_zero.min(nu_max);
    if bridge_end > nu_cut {
        let b = adaptive(&weighted, nu_cut, bridge_end, 0.0, epsrel, PIECE_LIMIT);
        base.add(b.value);
        err += b.abs_err;
        mass += b.abs_mass;
        segments += 1;
    }
    if bridge_end >= nu_max {
        let value = base.total();
        let target = (tol * value.abs()).max(MASS_FLOOR_ULPS * f64::EPSILON * mass);
        return Ok(QuadResult {
            value,
            abs_err_estimate: err,
            segments_used: segments,
            converged: value.is_finite() && err <= target,
        });
    }

    let base_value = base.total();
    let mut panels: Vec<f64> = Vec::new();
    let mut running = NeumaierSum::default();
    running.add(base_value);
    let mut history: Vec<(f64, f64)> = Vec::new(); // (raw partial sum, accelerated)
    let mut k = 0usize;
    let mut tail_err = f64::INFINITY;
    let mut estimate = base_value;
    let mut done = false;

    while k < SEGMENT_BUDGET {
        let a = first_zero + k as f64 * period;
        if a >= nu_max {
            tail_err = 0.0;
            estimate = running.total();
            done = true;
            break;
        }
        let b = (first_zero + (k + 1) as f64 * period).min(nu_max);
        let p = adaptive(&weighted, a, b, 0.0, epsrel, PIECE_LIMIT);
        err += p.abs_err;
        mass += p.abs_mass;
        segments += 1;
        running.add(p.value);
        panels.push(p.value);
        k += 1;

        if b >= nu_max {
            tail_err = 0.0;
            estimate = running.total();
            done = true;
            break;
        }

        let raw = running.total();
        let acc = euler_average(base_value, &panels, MAX_DEPTH);
        history.push((raw, acc));
        let n = history.len();
        if n < 3 {
            continue;
        }
        let raw_err = panels[n - 1].abs();
        let acc_err = (history[n - 1].1 - history[n - 2].1)
            .abs()
            .max((history[n - 2].1 - history[n - 3].1).abs());
        let (cand, cand_err) = if acc_err < raw_err {
            (acc, acc_err)
        } else {
            (raw, raw_err)
        };
        let target = (tol * cand.abs()).max(MASS_FLOOR_ULPS * f64::EPSILON * mass);
        let shrinking = panels[n - 1].abs() <= panels[n - 2].abs();
        if cand_err < tail_err {
            tail_err = cand_err;
            estimate = cand;
        }
        if shrinking && cand_err <= 0.5 * target {
            tail_err = cand_err;
            estimate = cand;
            done = true;
            break;
        }
    }

    let total_err = err + tail_err;
    let target = (tol * estimate.abs()).max(MASS_FLOOR_ULPS * f64::EPSILON * mass);
    Ok(QuadResult {
        value: estimate,
        abs_err_estimate: total_err,
        segments_used: segments,
        converged: done && estimate.is_finite() && total_err <= target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expo(alpha: f64) -> Integrand<impl Fn(f64) -> f64> {
        Integrand::new(
            move |nu: f64| nu.powf(alpha) * (-nu).exp(),
            EdgeHint::power(alpha),
            TailHint::Exponential { rate: 1.0 },
        )
        .unwrap()
    }

    #[test]
    fn exponential_cosine_transform() {
        let r = fourier(&expo(0.0), 1.0, Kernel::Cos, 1e-12).unwrap();
        assert!(r.converged);
        assert!((r.value - 0.5).abs() < 1e-13);
    }

    #[test]
    fn sine_at_zero_time_vanishes() {
        let r = fourier(&expo(0.0), 0.0, Kernel::Sin, 1e-12).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.converged);
    }

    #[test]
    fn inverse_square_root_edge() {
        let r = fourier(&expo(-0.5), 0.0, Kernel::Cos, 1e-12).unwrap();
        assert!(r.converged);
        assert!((r.value - PI.sqrt()).abs() < 1e-12, "{}", r.value);
    }

    #[test]
    fn plain_integrals() {
        assert!((integrate(&expo(0.0), 1e-12).unwrap().value - 1.0).abs() < 1e-13);
        assert!((integrate(&expo(1.0), 1e-12).unwrap().value - 1.0).abs() < 1e-13);
    }

    #[test]
    fn finite_interval() {
        let r = integrate_interval(|x: f64| x.sin(), 0.0, PI, 1e-12).unwrap();
        assert!(r.converged);
        assert!((r.value - 2.0).abs() < 1e-13);
        assert_eq!(integrate_interval(|x: f64| x, 1.0, 1.0, 1e-12).unwrap().value, 0.0);
        assert!(integrate_interval(|x: f64| x, 2.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn alpha_at_or_below_minus_one_is_rejected() {
        let r = Integrand::new(|x: f64| x, EdgeHint::power(-1.0), TailHint::Cutoff { nu_max: 1.0 });
        assert!(r.is_err());
    }

    #[test]
    fn cutoff_integrates_exactly_to_end() {
        // ∫_0^2 cos(3ν) dν = sin(6)/3
        let g = Integrand::new(|_| 1.0, EdgeHint::power(0.0), TailHint::Cutoff { nu_max: 2.0 }).unwrap();
        let r = fourier(&g, 3.0, Kernel::Cos, 1e-12).unwrap();
        assert!((r.value - 6f64.sin() / 3.0).abs() < 1e-14);
    }

    #[test]
    fn algebraic_tail_is_accelerated() {
        // ∫_0^∞ sin(ν)/(1+ν)^{1/2}... use 1/(1+ν): ∫ sin ν/(1+ν) dν = Ci(1) sin 1 + (π/2 - Si(1)) cos 1
        let g = Integrand::new(
            |nu: f64| 1.0 / (1.0 + nu),
            EdgeHint::power(0.0),
            TailHint::Algebraic { exponent: 1.0 },
        )
        .unwrap();
        let r = fourier(&g, 1.0, Kernel::Sin, 1e-10).unwrap();
        let ci1 = 0.337_403_922_900_968_1;
        let si1 = 0.946_083_070_367_183;
        let exact = ci1 * 1f64.sin() + (PI / 2.0 - si1) * 1f64.cos();
        assert!(r.converged, "{r:?}");
        assert!((r.value - exact).abs() < 1e-9, "{} vs {exact}", r.value);
    }
}
