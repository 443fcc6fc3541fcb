//! Sign intervals of sampled time functions, the non-Markovianity measure and
//! conformance of detected intervals with predicted windows.

use std::f64::consts::PI;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{Provenance, Window, WindowKind, WindowSet};
use crate::dynamics::{dephasing_factor, dephasing_rate};
use crate::error::{invalid, Error, Result};
use crate::oscquad::integrate_interval;
use crate::spectral::{GapSpec, SpectralModel};

/// Roots are refined until the bracket is below this fraction of `max(|t|, resolution)`.
pub const ROOT_RTOL: f64 = 1e-8;

/// A same-sign sample whose magnitude is below this fraction of both
/// neighbours is reported as a possible double root.
const TANGENCY_RATIO: f64 = 1e-3;

/// Default scan step in units of `π/ω_g`.
pub const DEFAULT_RESOLUTION_FRACTION: f64 = 1.0 / 32.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub t: f64,
    pub bracket: (f64, f64),
    /// `|f(t)|` at the refined location.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignIntervals {
    pub t_start: f64,
    pub t_end: f64,
    pub resolution: f64,
    pub negative_intervals: Vec<(f64, f64)>,
    pub positive_intervals: Vec<(f64, f64)>,
    pub roots: Vec<Root>,
    /// Sample times where a double root may hide below the scan resolution.
    pub degenerate: Vec<f64>,
}

impl SignIntervals {
    pub fn intervals(&self, positive: bool) -> &[(f64, f64)] {
        if positive {
            &self.positive_intervals
        } else {
            &self.negative_intervals
        }
    }

    /// Detected intervals of the sign matching `kind`, as a window set.
    pub fn as_window_set(&self, kind: WindowKind) -> WindowSet {
        let intervals: Vec<Window> = self
            .intervals(kind.positive())
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| Window {
                n: i as u64 + 1,
                t_start: a,
                t_end: b,
            })
            .collect();
        let n = intervals.len() as u64;
        WindowSet {
            kind,
            eps0: 0.0,
            n_range: (1.min(n), n),
            provenance: Provenance::Detected,
            limit_angle: f64::NAN,
            intervals,
        }
    }
}

/// Default scan step `π/(32 ω_g)`.
pub fn default_resolution(gap: &GapSpec) -> f64 {
    DEFAULT_RESOLUTION_FRACTION * PI / gap.omega_g
}

/// Scans `f` on `[t_start, t_end]` with step `resolution`, brackets every sign
/// change and bisects it.
pub fn detect_sign_intervals<F>(f: F, t_start: f64, t_end: f64, resolution: f64) -> Result<SignIntervals>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if !(t_end > t_start && t_start.is_finite() && t_end.is_finite()) {
        return Err(invalid("horizon", format!("need t_start < t_end, got [{t_start}, {t_end}]")));
    }
    if !(resolution > 0.0) {
        return Err(invalid("resolution", format!("must be positive, got {resolution}")));
    }
    let steps = ((t_end - t_start) / resolution).ceil().max(1.0) as usize;
    let times: Vec<f64> = (0..=steps)
        .map(|k| {
            if k == steps {
                t_end
            } else {
                t_start + k as f64 * resolution
            }
        })
        .collect();
    let values: Vec<f64> = times.par_iter().map(|&t| f(t)).collect::<Result<_>>()?;
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "scanned function",
            at: times[i],
        });
    }

    let mut brackets: Vec<(f64, f64, f64, f64)> = Vec::new();
    let mut exact: Vec<f64> = Vec::new();
    let mut degenerate = Vec::new();
    for k in 0..times.len() - 1 {
        let (a, b) = (values[k], values[k + 1]);
        if a * b < 0.0 {
            brackets.push((times[k], times[k + 1], a, b));
        }
    }
    for k in 1..times.len() - 1 {
        let (l, c, r) = (values[k - 1], values[k], values[k + 1]);
        if c == 0.0 {
            if l * r < 0.0 {
                exact.push(times[k]);
            } else if l * r > 0.0 {
                degenerate.push(times[k]);
            }
        } else if l * c > 0.0
            && c * r > 0.0
            && c.abs() < TANGENCY_RATIO * l.abs()
            && c.abs() < TANGENCY_RATIO * r.abs()
        {
            degenerate.push(times[k]);
        }
    }

    let mut roots: Vec<Root> = brackets
        .par_iter()
        .map(|&(a, b, fa, _)| bisect(&f, a, b, fa, resolution))
        .collect::<Result<_>>()?;
    roots.extend(exact.into_iter().map(|t| Root {
        t,
        bracket: (t, t),
        residual: 0.0,
    }));
    roots.sort_by(|x, y| x.t.total_cmp(&y.t));

    // segment signs from any interior sample, or the midpoint if none
    let mut bounds = vec![t_start];
    bounds.extend(roots.iter().map(|r| r.t));
    bounds.push(t_end);
    let mut negative = Vec::new();
    let mut positive = Vec::new();
    for w in bounds.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let inside = times
            .iter()
            .zip(&values)
            .find(|(t, v)| **t > a && **t < b && **v != 0.0)
            .map(|(_, v)| *v);
        let sign = match inside {
            Some(v) => v,
            None => f(0.5 * (a + b))?,
        };
        if sign < 0.0 {
            negative.push((a, b));
        } else if sign > 0.0 {
            positive.push((a, b));
        }
    }
    Ok(SignIntervals {
        t_start,
        t_end,
        resolution,
        negative_intervals: negative,
        positive_intervals: positive,
        roots,
        degenerate,
    })
}

fn bisect<F>(f: &F, mut a: f64, mut b: f64, mut fa: f64, resolution: f64) -> Result<Root>
where
    F: Fn(f64) -> Result<f64>,
{
    let (a0, b0) = (a, b);
    let target = ROOT_RTOL * b.abs().max(resolution);
    let mut fm = fa;
    let mut mid = 0.5 * (a + b);
    while b - a > target {
        mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        fm = f(mid)?;
        if fm == 0.0 {
            break;
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    if fm != 0.0 {
        mid = 0.5 * (a + b);
        fm = f(mid)?;
    }
    Ok(Root {
        t: mid,
        bracket: (a0, b0),
        residual: fm.abs(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureResult {
    /// `∫_{γ<0} |γ| e^{-Ξ} dt` over the scanned horizon; a lower bound to the
    /// untruncated measure.
    pub value: f64,
    pub abs_err: f64,
    pub horizon: f64,
    pub intervals_used: usize,
    pub truncated: bool,
}

/// The measure for arbitrary `γ` and `Ξ`.
pub fn non_markovianity_of<G, X>(gamma: G, xi: X, horizon: f64, resolution: f64, tol: f64) -> Result<MeasureResult>
where
    G: Fn(f64) -> Result<f64> + Sync,
    X: Fn(f64) -> Result<f64> + Sync,
{
    if !(horizon > 0.0) {
        return Err(invalid("horizon", format!("must be positive, got {horizon}")));
    }
    let scan = detect_sign_intervals(&gamma, 0.0, horizon, resolution)?;
    let pieces: Vec<(f64, f64)> = scan
        .negative_intervals
        .par_iter()
        .map(|&(a, b)| {
            let failure: Mutex<Option<Error>> = Mutex::new(None);
            let integrand = |t: f64| match (gamma(t), xi(t)) {
                (Ok(g), Ok(x)) => g.min(0.0).abs() * (-x).exp(),
                (Err(e), _) | (_, Err(e)) => {
                    failure.lock().expect("lock").get_or_insert(e);
                    f64::NAN
                }
            };
            let r = integrate_interval(integrand, a, b, tol)?;
            if let Some(e) = failure.into_inner().expect("lock") {
                return Err(e);
            }
            let r = r.require("non-Markovianity panel")?;
            Ok((r.value, r.abs_err_estimate))
        })
        .collect::<Result<_>>()?;
    Ok(MeasureResult {
        // an empty f64 sum is -0.0
        value: pieces.iter().fold(0.0, |acc, p| acc + p.0),
        abs_err: pieces.iter().fold(0.0, |acc, p| acc + p.1),
        horizon,
        intervals_used: pieces.len(),
        truncated: true,
    })
}

/// `𝒩` for the channel at bath temperature `T` over `[0, horizon]`.
pub fn non_markovianity(
    model: &SpectralModel,
    temperature: f64,
    horizon: f64,
    resolution: f64,
    tol: f64,
) -> Result<MeasureResult> {
    non_markovianity_of(
        |t| Ok(dephasing_rate(model, temperature, t, tol)?.value),
        |t| Ok(dephasing_factor(model, temperature, t, tol)?.value),
        horizon,
        resolution,
        tol.max(1e-9),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContainmentVerdict {
    pub n: u64,
    pub t_start: f64,
    pub t_end: f64,
    pub contained: bool,
    /// `false` when the window lies outside the scanned horizon.
    pub covered: bool,
    pub parent: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub n: u64,
    pub start: Option<f64>,
    pub end: Option<f64>,
    pub start_bound: f64,
    pub end_bound: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformanceReport {
    pub kind: WindowKind,
    pub verdicts: Vec<ContainmentVerdict>,
    pub matched: usize,
    pub unmatched: usize,
    pub uncovered: usize,
    pub bounds: Vec<BoundCheck>,
    /// The universal start/end bounds hold for every episode inside the scan.
    pub first_backflow_bounds_ok: bool,
    /// Episodes near the predicted windows last at most `π/ω_g`.
    pub episode_lengths_ok: bool,
    pub coverage_note: Option<String>,
}

impl ConformanceReport {
    pub fn all_contained(&self) -> bool {
        self.unmatched == 0 && self.uncovered == 0
    }
}

/// Bounds on the `n`th episode of a sign: negative episodes of `γ` start by
/// `(2n-1)π/ω_g` and end by `2nπ/ω_g`; positive episodes of `ε̇` start by
/// `2(n-1)π/ω_g` and end by `(2n-1)π/ω_g`.
pub fn universal_bounds(detected: &SignIntervals, gap: &GapSpec, positive: bool, n_max: u64) -> Vec<BoundCheck> {
    let list = detected.intervals(positive);
    let shift = if positive { 1.0 } else { 0.0 };
    (1..=n_max)
        .map(|n| {
            let start_bound = (2.0 * n as f64 - 1.0 - shift) * PI / gap.omega_g;
            let end_bound = (2.0 * n as f64 - shift) * PI / gap.omega_g;
            let iv = list.get(n as usize - 1).copied();
            // an episode cut by the scan end has no verified end
            let ended = iv.filter(|&(_, b)| b < detected.t_end);
            let ok = match (iv, ended) {
                (Some((a, _)), Some((_, b))) => a <= start_bound && b <= end_bound,
                _ => false,
            };
            BoundCheck {
                n,
                start: iv.map(|p| p.0),
                end: ended.map(|p| p.1),
                start_bound,
                end_bound,
                ok,
            }
        })
        .collect()
}

/// Checks predicted windows against detected intervals and the universal bounds.
pub fn window_conformance(detected: &SignIntervals, predicted: &WindowSet, gap: &GapSpec) -> ConformanceReport {
    let positive = predicted.kind.positive();
    let parents = detected.intervals(positive);
    let verdicts: Vec<ContainmentVerdict> = predicted
        .intervals
        .iter()
        .map(|w| {
            let covered = w.t_start >= detected.t_start && w.t_end <= detected.t_end;
            let parent = parents
                .iter()
                .copied()
                .find(|&(a, b)| a <= w.t_start && w.t_end <= b);
            ContainmentVerdict {
                n: w.n,
                t_start: w.t_start,
                t_end: w.t_end,
                contained: parent.is_some(),
                covered,
                parent,
            }
        })
        .collect();
    let uncovered = verdicts.iter().filter(|v| !v.covered).count();
    let matched = verdicts.iter().filter(|v| v.covered && v.contained).count();
    let unmatched = verdicts.iter().filter(|v| v.covered && !v.contained).count();

    let period = PI / gap.omega_g;
    let n_complete = parents.iter().filter(|&&(_, b)| b < detected.t_end).count() as u64;
    let bounds = universal_bounds(detected, gap, positive, n_complete);
    let first_ok = bounds.iter().all(|b| b.ok);

    let lo = predicted.intervals.first().map_or(f64::INFINITY, |w| w.t_start - period);
    let hi = predicted.intervals.last().map_or(f64::NEG_INFINITY, |w| w.t_end + period);
    let lengths_ok = parents
        .iter()
        .filter(|&&(a, b)| a >= lo && b <= hi && a > detected.t_start && b < detected.t_end)
        .all(|&(a, b)| b - a <= period + 4.0 * ROOT_RTOL * b.abs().max(detected.resolution));

    let coverage_note = (uncovered > 0).then(|| {
        format!(
            "{uncovered} predicted windows fall outside the scanned horizon [{}, {}]",
            detected.t_start, detected.t_end
        )
    });
    ConformanceReport {
        kind: predicted.kind,
        verdicts,
        matched,
        unmatched,
        uncovered,
        bounds,
        first_backflow_bounds_ok: first_ok,
        episode_lengths_ok: lengths_ok,
        coverage_note,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::{limit_psi, predict_windows};
    use crate::series::{AsymptoticSeries, EdgeTerm, SeriesClass};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn sin_scan(t_end: f64) -> SignIntervals {
        detect_sign_intervals(|t: f64| Ok(t.sin()), 0.0, t_end, PI / 32.0).unwrap()
    }

    #[test]
    fn sine_intervals() {
        let s = sin_scan(4.0 * PI);
        assert_eq!(s.negative_intervals.len(), 2);
        let (a, b) = s.negative_intervals[0];
        assert_relative_eq!(a, PI, max_relative = 1e-8);
        assert_relative_eq!(b, 2.0 * PI, max_relative = 1e-8);
        let (a, b) = s.negative_intervals[1];
        assert_relative_eq!(a, 3.0 * PI, max_relative = 1e-8);
        assert_relative_eq!(b, 4.0 * PI, max_relative = 1e-8);
    }

    #[test]
    fn constant_has_no_negative_intervals() {
        let s = detect_sign_intervals(|_| Ok(1.0), 0.0, 10.0, 0.1).unwrap();
        assert!(s.negative_intervals.is_empty());
        assert_eq!(s.positive_intervals, vec![(0.0, 10.0)]);
    }

    #[test]
    fn tangency_is_flagged() {
        let s = detect_sign_intervals(|t: f64| Ok((t - 1.0).powi(2) + 1e-12), 0.0, 2.0, 0.1).unwrap();
        assert!(s.negative_intervals.is_empty());
        assert_eq!(s.degenerate.len(), 1);
        assert_relative_eq!(s.degenerate[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bad_inputs() {
        assert!(detect_sign_intervals(|_| Ok(1.0), 1.0, 1.0, 0.1).is_err());
        assert!(detect_sign_intervals(|_| Ok(1.0), 0.0, 1.0, 0.0).is_err());
        assert!(detect_sign_intervals(|_| Ok(f64::NAN), 0.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn synthetic_measure() {
        let r = non_markovianity_of(
            |t: f64| Ok(t.sin()),
            |t: f64| Ok(1.0 - t.cos()),
            2.0 * PI,
            PI / 32.0,
            1e-12,
        )
        .unwrap();
        assert!((r.value - (1.0 - (-2f64).exp())).abs() <= 1e-9, "{}", r.value);
    }

    #[test]
    fn nonnegative_rate_gives_zero() {
        let r = non_markovianity_of(|t: f64| Ok(t.sin().abs()), |_| Ok(0.0), 10.0, 0.1, 1e-10).unwrap();
        assert_eq!(r.value.to_bits(), 0f64.to_bits());
        assert_eq!(r.intervals_used, 0);
    }

    fn flat_limit(alpha: f64) -> crate::asymptotics::PhaseLimitReport {
        let s = AsymptoticSeries::from_terms(
            SeriesClass::First,
            vec![EdgeTerm { alpha, logpow: 0.0, coeff: 1.0 }],
            1,
            Some(alpha + 1.0),
        );
        limit_psi(&s).unwrap()
    }

    #[test]
    fn exact_match_conforms() {
        // γ = sin(t + π/2) has limit phase π/2 and windows matching the intervals
        let gap = GapSpec::new(1.0, 1.0).unwrap();
        let scan = detect_sign_intervals(|t: f64| Ok((t + PI / 2.0).sin()), 0.0, 40.0 * PI, PI / 32.0).unwrap();
        let lim = flat_limit(0.0);
        let w = predict_windows(&lim, &gap, 0.3, (5, 10), WindowKind::InfoBackflow).unwrap();
        let rep = window_conformance(&scan, &w, &gap);
        assert!(rep.all_contained());
        assert!(rep.first_backflow_bounds_ok);
        assert!(rep.episode_lengths_ok);
        let w = predict_windows(&lim, &gap, 0.3, (5, 10), WindowKind::InfoLoss).unwrap();
        assert!(window_conformance(&scan, &w, &gap).all_contained());
    }

    #[test]
    fn overhanging_window_fails() {
        let gap = GapSpec::new(1.0, 1.0).unwrap();
        let scan = detect_sign_intervals(|t: f64| Ok((t + PI / 2.0).sin()), 0.0, 40.0 * PI, PI / 32.0).unwrap();
        // wrong limit angle shifts the windows across the roots
        let w = predict_windows(&flat_limit(1.5), &gap, 0.1, (5, 10), WindowKind::InfoBackflow).unwrap();
        let rep = window_conformance(&scan, &w, &gap);
        assert_eq!(rep.matched, 0);
        assert_eq!(rep.unmatched, 6);
        let far = predict_windows(&flat_limit(0.0), &gap, 0.1, (50, 51), WindowKind::InfoBackflow).unwrap();
        let rep = window_conformance(&scan, &far, &gap);
        assert_eq!(rep.uncovered, 2);
        assert!(rep.coverage_note.is_some());
    }

    #[test]
    fn universal_bounds_on_shifted_sine() {
        let gap = GapSpec::new(2.0, 1.0).unwrap();
        let scan = detect_sign_intervals(|t: f64| Ok((2.0 * t + 1.0).sin()), 0.0, 11.0 * PI / 2.0, PI / 64.0).unwrap();
        let b = universal_bounds(&scan, &gap, false, 5);
        assert!(b.iter().all(|c| c.ok), "{b:?}");
        let b = universal_bounds(&scan, &gap, true, 5);
        assert!(b.iter().all(|c| c.ok), "{b:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn measure_monotone_in_horizon(h in 1.0f64..20.0, extra in 0.0f64..10.0) {
            let g = |t: f64| Ok((2.0 * t).sin() * (-0.1 * t).exp());
            let x = |t: f64| Ok(0.1 * t);
            let a = non_markovianity_of(g, x, h, 0.05, 1e-10).unwrap().value;
            let b = non_markovianity_of(g, x, h + extra, 0.05, 1e-10).unwrap().value;
            prop_assert!(b >= a - 1e-12);
        }

        #[test]
        fn intervals_tile_the_scan(phase in 0.0f64..6.0, end in 3.0f64..30.0) {
            let s = detect_sign_intervals(|t: f64| Ok((t + phase).sin()), 0.0, end, 0.05).unwrap();
            let mut all: Vec<(f64, f64)> = s.negative_intervals.iter().chain(&s.positive_intervals).copied().collect();
            all.sort_by(|a, b| a.0.total_cmp(&b.0));
            prop_assert_eq!(all.first().unwrap().0, 0.0);
            prop_assert_eq!(all.last().unwrap().1, end);
            for w in all.windows(2) {
                prop_assert_eq!(w[0].1, w[1].0);
            }
        }
    }
}
