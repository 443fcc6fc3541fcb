//! Edge expansions `Σ c·ν^α(-ln ν)^ℓ` as `ν → 0⁺` and the truncated power
//! series used to multiply them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponents closer than this are the same level.
pub const ALPHA_EPS: f64 = 1e-10;

/// A coefficient is treated as an exact zero when it is below this many
/// machine epsilons of the absolute sum of the products that formed it.
const CANCEL_ULPS: f64 = 64.0;

/// Natural-valued log powers (first class) or arbitrary real ones (second).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesClass {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeTerm {
    pub alpha: f64,
    pub logpow: f64,
    pub coeff: f64,
}

/// One exponent level of a series: the exponent and the dominant (largest)
/// log power carried by a nonzero coefficient there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub alpha: f64,
    pub logpow: f64,
    pub coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticSeries {
    pub class: SeriesClass,
    pub terms: Vec<EdgeTerm>,
    /// Number of exponent levels requested.
    pub order: usize,
    /// Every term with exponent below this bound is present; `None` when the
    /// expansion is exact (finitely many terms).
    pub resolved_below: Option<f64>,
}

pub fn is_natural(x: f64) -> bool {
    x > -ALPHA_EPS && (x - x.round()).abs() < ALPHA_EPS
}

pub fn is_odd_natural(x: f64) -> bool {
    is_natural(x) && (x.round() as i64) % 2 == 1
}

impl AsymptoticSeries {
    /// Builds a series from raw terms: merges duplicates, drops zeros, sorts
    /// by `(alpha, -logpow)` and keeps the first `order` exponent levels.
    pub fn from_terms(
        class: SeriesClass,
        terms: impl IntoIterator<Item = EdgeTerm>,
        order: usize,
        resolved_below: Option<f64>,
    ) -> Self {
        let raw: Vec<(EdgeTerm, f64)> = terms
            .into_iter()
            .map(|t| (t, t.coeff.abs()))
            .collect();
        Self::from_weighted(class, raw, order, resolved_below)
    }

    fn from_weighted(
        class: SeriesClass,
        mut raw: Vec<(EdgeTerm, f64)>,
        order: usize,
        resolved_below: Option<f64>,
    ) -> Self {
        raw.sort_by(|a, b| {
            a.0.alpha
                .total_cmp(&b.0.alpha)
                .then(b.0.logpow.total_cmp(&a.0.logpow))
        });
        let mut merged: Vec<(EdgeTerm, f64)> = Vec::new();
        for (t, mass) in raw {
            if let Some((last, m)) = merged.last_mut() {
                if (last.alpha - t.alpha).abs() < ALPHA_EPS
                    && (last.logpow - t.logpow).abs() < ALPHA_EPS
                {
                    last.coeff += t.coeff;
                    *m += mass;
                    continue;
                }
            }
            merged.push((t, mass));
        }

        let mut terms = Vec::new();
        let mut levels = 0usize;
        let mut last_alpha = f64::NEG_INFINITY;
        let mut bound = resolved_below;
        for (t, mass) in merged {
            if let Some(b) = resolved_below {
                if t.alpha >= b - ALPHA_EPS {
                    break;
                }
            }
            if t.coeff == 0.0 || t.coeff.abs() <= CANCEL_ULPS * f64::EPSILON * mass {
                continue;
            }
            if (t.alpha - last_alpha).abs() >= ALPHA_EPS {
                if levels == order {
                    bound = Some(t.alpha);
                    break;
                }
                levels += 1;
                last_alpha = t.alpha;
            }
            terms.push(t);
        }
        AsymptoticSeries {
            class,
            terms,
            order,
            resolved_below: bound,
        }
    }

    pub fn leading(&self) -> Option<&EdgeTerm> {
        self.terms.first()
    }

    /// Exponent levels in increasing order.
    pub fn levels(&self) -> Vec<Level> {
        let mut out: Vec<Level> = Vec::new();
        for t in &self.terms {
            match out.last() {
                Some(l) if (l.alpha - t.alpha).abs() < ALPHA_EPS => {}
                // terms are sorted by decreasing log power within a level
                _ => out.push(Level {
                    alpha: t.alpha,
                    logpow: t.logpow,
                    coeff: t.coeff,
                }),
            }
        }
        out
    }

    pub fn is_exact(&self) -> bool {
        self.resolved_below.is_none()
    }

    /// Evaluates the truncated expansion at `nu > 0`.
    pub fn eval(&self, nu: f64) -> f64 {
        let l = -nu.ln();
        self.terms
            .iter()
            .map(|t| {
                let lp = if t.logpow == 0.0 { 1.0 } else { l.powf(t.logpow) };
                t.coeff * nu.powf(t.alpha) * lp
            })
            .sum()
    }

    /// Formal product with a power series `Σ a_k ν^k`, truncated to `order`
    /// levels and to the range where both factors are fully resolved.
    pub fn times(&self, p: &PowerSeries, order: usize) -> Result<AsymptoticSeries> {
        let Some(lead) = self.leading() else {
            return Err(Error::Truncated("empty source series".into()));
        };
        let mut bound = lead.alpha + p.len() as f64;
        if let Some(b) = self.resolved_below {
            bound = bound.min(b);
        }
        let mut raw = Vec::new();
        for t in &self.terms {
            for (k, a) in p.coeffs().iter().enumerate() {
                let alpha = t.alpha + k as f64;
                if alpha >= bound - ALPHA_EPS {
                    break;
                }
                let c = t.coeff * a;
                raw.push((
                    EdgeTerm {
                        alpha,
                        logpow: t.logpow,
                        coeff: c,
                    },
                    c.abs(),
                ));
            }
        }
        let out = Self::from_weighted(self.class, raw, order, Some(bound));
        let have = out.levels().len();
        if have < order && !self.is_exact() {
            let source_levels = self.levels().len();
            if source_levels < order {
                return Err(Error::Truncated(format!(
                    "source resolves {source_levels} levels, {order} requested"
                )));
            }
        }
        Ok(out)
    }
}

/// Truncated Taylor series `Σ_{k<n} a_k ν^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries(Vec<f64>);

impl PowerSeries {
    pub fn new(coeffs: Vec<f64>) -> Self {
        PowerSeries(coeffs)
    }

    pub fn constant(c: f64, n: usize) -> Self {
        let mut v = vec![0.0; n];
        if n > 0 {
            v[0] = c;
        }
        PowerSeries(v)
    }

    /// `a + b·ν`
    pub fn linear(a: f64, b: f64, n: usize) -> Self {
        let mut v = vec![0.0; n];
        if n > 0 {
            v[0] = a;
        }
        if n > 1 {
            v[1] = b;
        }
        PowerSeries(v)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scale(&self, s: f64) -> Self {
        PowerSeries(self.0.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        PowerSeries(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.len().min(other.len());
        let mut out = vec![0.0; n];
        for i in 0..n {
            for j in 0..n - i {
                out[i + j] += self.0[i] * other.0[j];
            }
        }
        PowerSeries(out)
    }

    /// `1/self`; requires a nonzero constant term.
    pub fn recip(&self) -> Result<Self> {
        let n = self.len();
        let a0 = self.0.first().copied().unwrap_or(0.0);
        if a0 == 0.0 {
            return Err(Error::Singular("reciprocal of series with zero constant term".into()));
        }
        let mut out = vec![0.0; n];
        out[0] = 1.0 / a0;
        for k in 1..n {
            let s: f64 = (1..=k).map(|i| self.0[i] * out[k - i]).sum();
            out[k] = -s / a0;
        }
        Ok(PowerSeries(out))
    }

    /// Taylor series of `tanh(ν/scale)` from `T' = (1 - T²)/scale`.
    pub fn tanh_linear(scale: f64, n: usize) -> Self {
        let mut t = vec![0.0; n];
        for k in 0..n.saturating_sub(1) {
            let sq: f64 = (0..=k).map(|i| t[i] * t[k - i]).sum();
            let rhs = if k == 0 { 1.0 - sq } else { -sq };
            t[k + 1] = rhs / (scale * (k + 1) as f64);
        }
        PowerSeries(t)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// Generalized binomial coefficient `C(beta, j)` for real `beta`.
pub fn binomial(beta: f64, j: usize) -> f64 {
    let mut c = 1.0;
    for i in 0..j {
        c *= (beta - i as f64) / (i + 1) as f64;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_series(alpha: f64, n: usize) -> AsymptoticSeries {
        let mut fact = 1.0;
        let terms = (0..n + 1).map(|k| {
            if k > 0 {
                fact *= k as f64;
            }
            EdgeTerm {
                alpha: alpha + k as f64,
                logpow: 0.0,
                coeff: if k % 2 == 0 { 1.0 } else { -1.0 } / fact,
            }
        });
        AsymptoticSeries::from_terms(SeriesClass::First, terms.collect::<Vec<_>>(), n, None)
    }

    #[test]
    fn from_terms_truncates_levels() {
        let s = exp_series(0.0, 3);
        assert_eq!(s.terms.len(), 3);
        assert_eq!(s.resolved_below, Some(3.0));
    }

    #[test]
    fn hand_expansion_of_nu_exp_over_one_plus_nu() {
        // ν e^{-ν} / (1+ν) = ν - 2ν² + 5/2 ν³ + O(ν⁴)
        let src = exp_series(1.0, 8);
        let geo = PowerSeries::linear(1.0, 1.0, 8).recip().unwrap();
        let out = src.times(&geo, 3).unwrap();
        let c: Vec<f64> = out.terms.iter().map(|t| t.coeff).collect();
        let a: Vec<f64> = out.terms.iter().map(|t| t.alpha).collect();
        assert_eq!(a, vec![1.0, 2.0, 3.0]);
        assert!((c[0] - 1.0).abs() < 1e-15);
        assert!((c[1] + 2.0).abs() < 1e-15);
        assert!((c[2] - 2.5).abs() < 1e-15);
    }

    #[test]
    fn tanh_taylor_coefficients() {
        // tanh x = x - x³/3 + 2x⁵/15 - 17x⁷/315
        let t = PowerSeries::tanh_linear(1.0, 8);
        let want = [0.0, 1.0, 0.0, -1.0 / 3.0, 0.0, 2.0 / 15.0, 0.0, -17.0 / 315.0];
        for (a, b) in t.coeffs().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        let t2 = PowerSeries::tanh_linear(2.0, 8);
        assert!((t2.eval(0.1) - (0.05f64).tanh()).abs() < 1e-12);
    }

    #[test]
    fn cancellation_is_recognised_as_zero() {
        let s = AsymptoticSeries::from_terms(
            SeriesClass::First,
            vec![
                EdgeTerm { alpha: 1.0, logpow: 0.0, coeff: 1.0 },
                EdgeTerm { alpha: 2.0, logpow: 0.0, coeff: 0.1 + 0.2 },
                EdgeTerm { alpha: 2.0, logpow: 0.0, coeff: -0.3 },
                EdgeTerm { alpha: 3.0, logpow: 0.0, coeff: 1.0 },
            ],
            8,
            None,
        );
        let alphas: Vec<f64> = s.levels().iter().map(|l| l.alpha).collect();
        assert_eq!(alphas, vec![1.0, 3.0]);
    }

    #[test]
    fn natural_predicates() {
        assert!(is_natural(0.0));
        assert!(is_odd_natural(3.0));
        assert!(!is_odd_natural(2.0));
        assert!(!is_natural(-1.0));
        assert!(!is_natural(0.5));
    }
}
