use std::f64::consts::PI;

use gapdeph::asymptotics::{model_limits, predict_windows, WindowKind};
use gapdeph::dynamics::{dephasing_rate, sample, Quantity};
use gapdeph::export::{write_intervals_csv, write_timeseries_csv};
use gapdeph::measures::{detect_sign_intervals, non_markovianity, window_conformance};
use gapdeph::spectral::{GapSpec, Profile, QubitParams, SpectralModel, DEFAULT_SERIES_ORDER};

fn hard_cutoff() -> SpectralModel {
    SpectralModel::new(
        GapSpec::new(2.0, 1.0).unwrap(),
        Profile::HardCutoff {
            alpha: 0.5,
            nu_max: 3.0,
            edge_power: 2.0,
            weight: 1.0,
        },
    )
    .unwrap()
}

#[test]
fn profile_json_round_trip() {
    let p = Profile::LogPerturbed {
        alpha: 1.0,
        beta: 2.0,
        weight: 0.5,
    };
    let text = serde_json::to_string(&p).unwrap();
    assert!(text.contains("\"family\":\"log_perturbed\""));
    let back: Profile = serde_json::from_str(&text).unwrap();
    assert_eq!(back, p);
    assert!(serde_json::from_str::<Profile>(r#"{"family":"exp_cutoff","alpha":0,"bogus":1}"#).is_err());
}

#[test]
fn hard_cutoff_windows_conform() {
    let m = hard_cutoff();
    let t_fact = 1.0;
    let (_, _, xi) = model_limits(&m, t_fact, DEFAULT_SERIES_ORDER).unwrap();
    let set = predict_windows(&xi, &m.gap, 0.3, (15, 20), WindowKind::InfoBackflow).unwrap();
    let hi = set.intervals.last().unwrap().t_end + PI / m.gap.omega_g;
    let scan = detect_sign_intervals(
        |t| Ok(dephasing_rate(&m, t_fact, t, 1e-11)?.value),
        0.0,
        hi,
        PI / (32.0 * m.gap.omega_g),
    )
    .unwrap();
    let rep = window_conformance(&scan, &set, &m.gap);
    assert!(rep.all_contained(), "{rep:?}");
    assert!(rep.first_backflow_bounds_ok);
}

#[test]
fn measure_grows_with_horizon() {
    let m = SpectralModel::benchmark(0.0, 1.0, 1.0).unwrap();
    let a = non_markovianity(&m, 1.0, 10.0, PI / 32.0, 1e-10).unwrap();
    let b = non_markovianity(&m, 1.0, 20.0, PI / 32.0, 1e-10).unwrap();
    assert!(a.value > 0.0);
    assert!(b.value >= a.value);
    assert!(b.intervals_used > a.intervals_used);
    assert!(b.truncated);
}

#[test]
fn exports_are_deterministic() {
    let m = SpectralModel::benchmark(0.5, 1.0, 1.0).unwrap();
    let q = QubitParams::new(0.0, 1.0, 1.0, 1.0).unwrap();
    let times: Vec<f64> = (0..40).map(|k| 0.25 * k as f64).collect();
    let render = || {
        let ts = sample(&m, &q, Quantity::EnergyRate, &times, 1e-10, "d").unwrap();
        let mut buf = Vec::new();
        write_timeseries_csv(&ts, &mut buf).unwrap();
        buf
    };
    assert_eq!(render(), render());

    let scan = detect_sign_intervals(|t| Ok(dephasing_rate(&m, 1.0, t, 1e-10)?.value), 0.0, 10.0, 0.1).unwrap();
    let mut buf = Vec::new();
    write_intervals_csv(&scan, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let rows = text.lines().count() - 1;
    assert_eq!(rows, scan.negative_intervals.len() + scan.positive_intervals.len());
}
