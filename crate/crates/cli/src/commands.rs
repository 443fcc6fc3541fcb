use std::f64::consts::{PI, TAU};
use std::path::Path;

use gapdeph::asymptotics::{
    correspondence_verdict, default_n_range, limiting_windows, model_limits, predict_windows, Outcome,
    WindowKind, WindowSet,
};
use gapdeph::dynamics::{bath_energy_rate, default_grid, dephasing_rate, sample, Quantity};
use gapdeph::export::{
    fmt_float, timeseries_json, to_json, write_intervals_csv, write_timeseries_csv, write_windows_csv,
};
use gapdeph::measures::{
    default_resolution, detect_sign_intervals, non_markovianity, non_markovianity_of, window_conformance,
    MeasureResult,
};
use gapdeph::spectral::{Profile, SpectralModel};
use gapdeph::verify::{odd_edge_sweep, run_all, run_criterion};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::manifest::Run;
use crate::CliError;

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> gapdeph::Result<()>) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    f(&mut buf).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(buf)
}

fn json(value: &(impl Serialize + ?Sized)) -> Result<String, CliError> {
    to_json(value).map_err(|e| CliError::Io(e.to_string()))
}

pub fn limits(cfg: &RunConfig) -> Result<(), CliError> {
    let model = cfg.model.build()?;
    let q = cfg.qubit.build()?;
    let (phi, psi, xi) = model_limits(&model, q.t_fact, cfg.model.series_order)?;
    let verdict = correspondence_verdict(&model, &q, cfg.model.series_order)?;
    #[derive(Serialize)]
    struct Doc<'a> {
        phi: &'a gapdeph::asymptotics::PhaseLimitReport,
        psi: &'a gapdeph::asymptotics::PhaseLimitReport,
        xi: &'a gapdeph::asymptotics::PhaseLimitReport,
        verdict: Outcome,
        at_risk: bool,
        raw_equal: Option<bool>,
        t_fact: f64,
    }
    let text = json(&Doc {
        phi: &phi,
        psi: &psi,
        xi: &xi,
        verdict: verdict.outcome,
        at_risk: verdict.at_risk,
        raw_equal: verdict.raw_equal,
        t_fact: q.t_fact,
    })?;
    let mut run = Run::start(&cfg.output.dir, "limits", Some(cfg))?;
    run.write("limits.json", text.as_bytes())?;
    run.finish()?;
    print!("{text}");
    Ok(())
}

fn grid(cfg: &RunConfig, model: &SpectralModel) -> Result<Vec<f64>, CliError> {
    let horizon = cfg.numerics.horizon;
    match cfg.numerics.grid_step {
        None => Ok(default_grid(model, horizon)?),
        Some(h) => {
            let n = (horizon / h).floor() as usize;
            Ok((0..=n).map(|k| k as f64 * h).collect())
        }
    }
}

pub fn simulate(cfg: &RunConfig) -> Result<(), CliError> {
    let model = cfg.model.build()?;
    let q = cfg.qubit.build()?;
    let times = grid(cfg, &model)?;
    let digest = cfg.digest();
    let mut run = Run::start(&cfg.output.dir, "simulate", Some(cfg))?;
    for quantity in [
        Quantity::EnergyDelta,
        Quantity::EnergyRate,
        Quantity::DephasingRate,
        Quantity::DephasingFactor,
        Quantity::Coherence,
    ] {
        let ts = sample(&model, &q, quantity, &times, cfg.numerics.tol, &digest)?;
        run.record_error(quantity.name(), ts.max_error());
        if cfg.output.wants(Format::Csv) {
            let bytes = csv_bytes(|b| write_timeseries_csv(&ts, b))?;
            run.write(&format!("{}.csv", quantity.name()), &bytes)?;
        }
        if cfg.output.wants(Format::Json) {
            let text = timeseries_json(&ts).map_err(|e| CliError::Io(e.to_string()))?;
            run.write(&format!("{}.json", quantity.name()), text.as_bytes())?;
        }
    }
    let manifest = run.finish()?;
    println!("{} samples per quantity; manifest {}", times.len(), manifest.display());
    Ok(())
}

pub fn intervals(cfg: &RunConfig) -> Result<(), CliError> {
    let model = cfg.model.build()?;
    let q = cfg.qubit.build()?;
    let order = cfg.model.series_order;
    let (_, psi, xi) = model_limits(&model, q.t_fact, order)?;
    let n_range = cfg.numerics.n_range.unwrap_or_else(|| default_n_range(&model.gap));
    let eps0 = cfg.numerics.eps0;
    let resolution = cfg.numerics.resolution.unwrap_or_else(|| default_resolution(&model.gap));
    let tol = cfg.numerics.tol;

    let mut predicted = Vec::new();
    let mut limiting = Vec::new();
    for kind in [
        WindowKind::EnergyUp,
        WindowKind::EnergyDown,
        WindowKind::InfoLoss,
        WindowKind::InfoBackflow,
    ] {
        let lim = if matches!(kind, WindowKind::EnergyUp | WindowKind::EnergyDown) {
            &psi
        } else {
            &xi
        };
        predicted.push(predict_windows(lim, &model.gap, eps0, n_range, kind)?);
        limiting.push(limiting_windows(lim, &model.gap, n_range, kind)?);
    }
    // scan from zero so the universal bounds can be checked too
    let t_end = predicted
        .iter()
        .flat_map(|s| &s.intervals)
        .map(|w| w.t_end)
        .fold(cfg.numerics.horizon, f64::max)
        + PI / model.gap.omega_g;
    let energy = detect_sign_intervals(
        |t| Ok(bath_energy_rate(&model, &q, t, tol)?.value),
        0.0,
        t_end,
        resolution,
    )?;
    let info = detect_sign_intervals(
        |t| Ok(dephasing_rate(&model, q.t_fact, t, tol)?.value),
        0.0,
        t_end,
        resolution,
    )?;
    let reports: Vec<_> = predicted
        .iter()
        .map(|set| {
            let scan = if matches!(set.kind, WindowKind::EnergyUp | WindowKind::EnergyDown) {
                &energy
            } else {
                &info
            };
            window_conformance(scan, set, &model.gap)
        })
        .collect();
    let detected: Vec<WindowSet> = vec![
        energy.as_window_set(WindowKind::EnergyUp),
        energy.as_window_set(WindowKind::EnergyDown),
        info.as_window_set(WindowKind::InfoLoss),
        info.as_window_set(WindowKind::InfoBackflow),
    ];

    let mut run = Run::start(&cfg.output.dir, "intervals", Some(cfg))?;
    if cfg.output.wants(Format::Csv) {
        run.write("windows.csv", &csv_bytes(|b| write_windows_csv(&predicted, b))?)?;
        run.write("intervals_energy.csv", &csv_bytes(|b| write_intervals_csv(&energy, b))?)?;
        run.write("intervals_info.csv", &csv_bytes(|b| write_intervals_csv(&info, b))?)?;
    }
    if cfg.output.wants(Format::Json) {
        #[derive(Serialize)]
        struct Windows<'a> {
            predicted: &'a [WindowSet],
            limiting: &'a [WindowSet],
            detected: &'a [WindowSet],
        }
        let text = json(&Windows {
            predicted: &predicted,
            limiting: &limiting,
            detected: &detected,
        })?;
        run.write("windows.json", text.as_bytes())?;
        #[derive(Serialize)]
        struct Scans<'a> {
            energy_rate: &'a gapdeph::measures::SignIntervals,
            dephasing_rate: &'a gapdeph::measures::SignIntervals,
        }
        run.write(
            "intervals.json",
            json(&Scans {
                energy_rate: &energy,
                dephasing_rate: &info,
            })?
            .as_bytes(),
        )?;
    }
    // the conformance report is the point of the command, so it is always written
    run.write("conformance.json", json(&reports)?.as_bytes())?;
    run.finish()?;
    for r in &reports {
        println!(
            "{:<13} matched {:>3} unmatched {:>3} uncovered {:>3} bounds {} lengths {}",
            r.kind.name(),
            r.matched,
            r.unmatched,
            r.uncovered,
            if r.first_backflow_bounds_ok { "ok" } else { "violated" },
            if r.episode_lengths_ok { "ok" } else { "long" }
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct MeasureDoc<'a> {
    source: &'static str,
    t_fact: Option<f64>,
    #[serde(flatten)]
    result: &'a MeasureResult,
}

pub fn measure(cfg: Option<&RunConfig>, synthetic: bool, out_dir: &Path) -> Result<(), CliError> {
    let (result, t_fact) = if synthetic {
        let r = non_markovianity_of(|t: f64| Ok(t.sin()), |t: f64| Ok(1.0 - t.cos()), TAU, PI / 32.0, 1e-13)?;
        (r, None)
    } else {
        let cfg = cfg.ok_or_else(|| CliError::Config("`measure` needs --config".into()))?;
        let model = cfg.model.build()?;
        let q = cfg.qubit.build()?;
        let res = cfg.numerics.resolution.unwrap_or_else(|| default_resolution(&model.gap));
        let r = non_markovianity(&model, q.t_fact, cfg.numerics.horizon, res, cfg.numerics.tol)?;
        (r, Some(q.t_fact))
    };
    let doc = MeasureDoc {
        source: if synthetic { "synthetic" } else { "model" },
        t_fact,
        result: &result,
    };
    let mut run = Run::start(out_dir, "measure", cfg)?;
    run.record_error("non_markovianity", result.abs_err);
    run.write("measure.json", json(&doc)?.as_bytes())?;
    run.finish()?;
    println!("{}", fmt_float(result.value));
    Ok(())
}

fn with_alpha(p: Profile, a: f64) -> Profile {
    match p {
        Profile::ExpCutoff { weight, .. } => Profile::ExpCutoff { alpha: a, weight },
        Profile::LogPerturbed { beta, weight, .. } => Profile::LogPerturbed { alpha: a, beta, weight },
        Profile::HardCutoff {
            nu_max,
            edge_power,
            weight,
            ..
        } => Profile::HardCutoff {
            alpha: a,
            nu_max,
            edge_power,
            weight,
        },
        Profile::AlgebraicTail { chi0, weight, .. } => Profile::AlgebraicTail { alpha: a, chi0, weight },
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

pub fn sweep(cfg: &RunConfig) -> Result<(), CliError> {
    let base = cfg.model.build()?;
    let q0 = cfg.qubit.build()?;
    let order = cfg.model.series_order;
    let points: Vec<(f64, f64)> = cfg
        .sweep
        .alphas
        .iter()
        .flat_map(|&a| cfg.sweep.t_facts.iter().map(move |&t| (a, t)))
        .collect();
    // rows keep grid order whatever order the points finish in
    let rows: Vec<Vec<String>> = points
        .par_iter()
        .enumerate()
        .map(|(i, &(a, tf))| {
            let mut row = vec![i.to_string(), base.profile.name().to_owned(), fmt_float(a), fmt_float(tf)];
            let q = gapdeph::spectral::QubitParams { t_fact: tf, ..q0 };
            let res = SpectralModel::with_order(base.gap, with_alpha(base.profile, a), order).and_then(|m| {
                let (phi, psi, xi) = model_limits(&m, tf, order)?;
                let v = correspondence_verdict(&m, &q, order)?;
                Ok((phi, psi, xi, v))
            });
            match res {
                Ok((phi, psi, xi, v)) => row.extend([
                    opt(phi.value),
                    opt(psi.value),
                    opt(xi.value),
                    format!("{:?}", v.outcome).to_lowercase(),
                    v.at_risk.to_string(),
                    v.raw_equal.map(|b| b.to_string()).unwrap_or_default(),
                    String::new(),
                ]),
                Err(e) => row.extend([
                    String::new(),
                    String::new(),
                    String::new(),
                    "error".into(),
                    String::new(),
                    String::new(),
                    e.to_string(),
                ]),
            }
            row
        })
        .collect();
    let mut buf = Vec::new();
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut buf);
        let header = [
            "index", "family", "alpha", "t_fact", "phi", "psi", "xi", "outcome", "at_risk", "raw_equal", "note",
        ];
        w.write_record(header).map_err(|e| CliError::Io(e.to_string()))?;
        for r in &rows {
            w.write_record(r).map_err(|e| CliError::Io(e.to_string()))?;
        }
        w.flush()?;
    }
    let mut run = Run::start(&cfg.output.dir, "sweep", Some(cfg))?;
    run.write("sweep.csv", &buf)?;
    run.finish()?;
    print!("{}", String::from_utf8_lossy(&buf));
    Ok(())
}

pub fn verify(cfg: Option<&RunConfig>, criterion: Option<u8>, out_dir: &Path) -> Result<(), CliError> {
    let reports = match criterion {
        Some(id) if (1..=10).contains(&id) => vec![run_criterion(id)],
        Some(id) => return Err(CliError::Config(format!("--criterion: expected 1-10, got {id}"))),
        None => run_all(),
    };
    for r in &reports {
        println!("{}", r.line());
    }
    let sweep = if criterion.is_none() {
        let rows = odd_edge_sweep()?;
        let fails = rows.iter().filter(|r| r.outcome == Outcome::Fails).count();
        println!("[INFO] odd-edge correspondence search: {} cases, {} fail", rows.len(), fails);
        Some(rows)
    } else {
        None
    };
    #[derive(Serialize)]
    struct Doc<'a> {
        criteria: &'a [gapdeph::verify::CriterionReport],
        odd_edge_sweep: Option<Vec<gapdeph::verify::SweepRow>>,
    }
    let mut run = Run::start(out_dir, "verify", cfg)?;
    run.write(
        "verify.json",
        json(&Doc {
            criteria: &reports,
            odd_edge_sweep: sweep,
        })?
        .as_bytes(),
    )?;
    run.finish()?;
    let failed: Vec<String> = reports.iter().filter(|r| !r.passed).map(|r| r.id.to_string()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(format!("criteria {}", failed.join(", "))))
    }
}
