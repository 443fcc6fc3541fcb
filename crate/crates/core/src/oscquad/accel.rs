//! Iterated averaging (Euler transform) of partial sums of an alternating series.

/// Deepest averaging level applied to the half-period partial sums.
pub const MAX_DEPTH: usize = 12;

/// Applies `depth` rounds of pairwise averaging to the last `depth + 1`
/// partial sums of `terms`, where `base` is the sum of everything before
/// `terms`. Returns the accelerated limit estimate.
///
/// Averaging is done on offsets from the oldest retained partial sum so the
/// large common part cancels exactly.
pub fn euler_average(base: f64, terms: &[f64], depth: usize) -> f64 {
    let n = terms.len();
    if n == 0 {
        return base;
    }
    let depth = depth.min(n - 1);
    let start = n - 1 - depth;
    let anchor: f64 = base + terms[..=start].iter().sum::<f64>();

    // offsets S_{start+j} - S_start for j = 0..=depth
    let mut row = Vec::with_capacity(depth + 1);
    let mut acc = 0.0;
    row.push(0.0);
    for t in &terms[start + 1..] {
        acc += t;
        row.push(acc);
    }
    for _ in 0..depth {
        for j in 0..row.len() - 1 {
            row[j] = 0.5 * (row[j] + row[j + 1]);
        }
        row.pop();
    }
    anchor + row[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accelerates_alternating_harmonic() {
        // 1 - 1/2 + 1/3 - ... = ln 2
        let terms: Vec<f64> = (1..=20)
            .map(|k| if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64)
            .collect();
        let raw: f64 = terms.iter().sum();
        let acc = euler_average(0.0, &terms, MAX_DEPTH);
        let ln2 = std::f64::consts::LN_2;
        assert!((raw - ln2).abs() > 1e-2);
        assert!((acc - ln2).abs() < 1e-7, "{}", acc - ln2);
    }

    #[test]
    fn depth_zero_is_plain_sum() {
        let terms = [1.0, 2.0, 3.0];
        assert_eq!(euler_average(0.5, &terms, 0), 6.5);
    }
}
