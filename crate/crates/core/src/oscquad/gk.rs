//! 21-point Gauss–Kronrod rule and a globally adaptive driver built on it.

// node tables are kept at their published precision
#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::sum::NeumaierSum;

/// Kronrod abscissae on [-1, 1]; odd indices are the embedded 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_452_720,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights paired with `XGK[1], XGK[3], .., XGK[9]`.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Per-rule roundoff floor, in units of machine epsilon times ∫|f|.
const ROUNDOFF_ULPS: f64 = 4.0;

#[derive(Debug, Clone, Copy)]
pub(crate) struct RuleResult {
    pub value: f64,
    pub abs_err: f64,
    /// Kronrod approximation of ∫|f|.
    pub abs_mass: f64,
}

pub(crate) fn qk21<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> RuleResult {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);

    let mut gauss = 0.0;
    let mut kronrod = fc * WGK[10];
    let mut abs_mass = (fc * WGK[10]).abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_mass += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    // ∫|f - mean| for the QUADPACK error rescaling
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let width = half.abs();
    let value = kronrod * half;
    let abs_mass = abs_mass * width;
    let asc = asc * width;

    let mut err = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    err = err.max(ROUNDOFF_ULPS * f64::EPSILON * abs_mass);

    RuleResult {
        value,
        abs_err: err,
        abs_mass,
    }
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    rule: RuleResult,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.rule.abs_err == other.rule.abs_err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rule.abs_err.total_cmp(&other.rule.abs_err)
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Adaptive {
    pub value: f64,
    pub abs_err: f64,
    pub abs_mass: f64,
    pub pieces: usize,
    pub converged: bool,
}

/// Globally adaptive bisection: always split the piece with the largest error
/// until `abs_err <= max(epsabs, epsrel * |value|)` or `limit` pieces exist.
pub(crate) fn adaptive<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    epsabs: f64,
    epsrel: f64,
    limit: usize,
) -> Adaptive {
    let first = qk21(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, rule: first });

    let totals = |heap: &BinaryHeap<Piece>| {
        let mut v = NeumaierSum::default();
        let (mut e, mut m) = (0.0, 0.0);
        for p in heap.iter() {
            v.add(p.rule.value);
            e += p.rule.abs_err;
            m += p.rule.abs_mass;
        }
        (v.total(), e, m)
    };

    let (mut value, mut err, mut mass) = (first.value, first.abs_err, first.abs_mass);
    loop {
        let target = epsabs.max(epsrel * value.abs());
        if err <= target {
            return Adaptive {
                value,
                abs_err: err,
                abs_mass: mass,
                pieces: heap.len(),
                converged: true,
            };
        }
        if heap.len() >= limit {
            break;
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        // no representable midpoint left: roundoff has won
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let left = qk21(f, worst.a, mid);
        let right = qk21(f, mid, worst.b);
        heap.push(Piece {
            a: worst.a,
            b: mid,
            rule: left,
        });
        heap.push(Piece {
            a: mid,
            b: worst.b,
            rule: right,
        });
        (value, err, mass) = totals(&heap);
    }

    let (value, err, mass) = totals(&heap);
    Adaptive {
        value,
        abs_err: err,
        abs_mass: mass,
        pieces: heap.len(),
        converged: err <= epsabs.max(epsrel * value.abs()),
    }
}
