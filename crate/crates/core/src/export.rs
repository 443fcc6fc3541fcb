//! CSV and JSON emission. Floats use the shortest decimal form that parses
//! back to the same `f64`, so identical inputs give identical bytes.

use std::io::Write;

use serde::Serialize;

use crate::asymptotics::WindowSet;
use crate::dynamics::TimeSeries;
use crate::error::{Error, Result};
use crate::measures::SignIntervals;

/// Shortest round-trip decimal; exponent form outside `[1e-5, 1e16)`.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        // keep the sign of negative zero out of the tables
        return "0".to_owned();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let a = x.abs();
    if (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Domain(format!("write failed: {e}"))
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

/// Columns `t,value,err_estimate`.
pub fn write_timeseries_csv<W: Write>(ts: &TimeSeries, out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["t", "value", "err_estimate"]).map_err(io_err)?;
    for ((t, v), e) in ts.times.iter().zip(&ts.values).zip(&ts.errors) {
        w.write_record([fmt_float(*t), fmt_float(*v), fmt_float(*e)]).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Columns `kind,n,t_start,t_end`, one row per window.
pub fn write_windows_csv<W: Write>(sets: &[WindowSet], out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["kind", "n", "t_start", "t_end"]).map_err(io_err)?;
    for set in sets {
        for win in &set.intervals {
            w.write_record([
                set.kind.name().to_owned(),
                win.n.to_string(),
                fmt_float(win.t_start),
                fmt_float(win.t_end),
            ])
            .map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)
}

/// Columns `kind,t_start,t_end` with kind `negative` or `positive`, in time order.
pub fn write_intervals_csv<W: Write>(iv: &SignIntervals, out: W) -> Result<()> {
    let mut rows: Vec<(&str, f64, f64)> = iv
        .negative_intervals
        .iter()
        .map(|&(a, b)| ("negative", a, b))
        .chain(iv.positive_intervals.iter().map(|&(a, b)| ("positive", a, b)))
        .collect();
    rows.sort_by(|x, y| x.1.total_cmp(&y.1));
    let mut w = writer(out);
    w.write_record(["kind", "t_start", "t_end"]).map_err(io_err)?;
    for (k, a, b) in rows {
        w.write_record([k.to_owned(), fmt_float(a), fmt_float(b)]).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

#[derive(Serialize)]
struct Record {
    t: f64,
    value: f64,
    err_estimate: f64,
}

/// Time series as a JSON object with a `records` array.
pub fn timeseries_json(ts: &TimeSeries) -> Result<String> {
    #[derive(Serialize)]
    struct Doc<'a> {
        quantity: &'a str,
        params_digest: &'a str,
        records: Vec<Record>,
    }
    let records = ts
        .times
        .iter()
        .zip(&ts.values)
        .zip(&ts.errors)
        .map(|((&t, &value), &err_estimate)| Record { t, value, err_estimate })
        .collect();
    to_json(&Doc {
        quantity: ts.quantity.name(),
        params_digest: &ts.params_digest,
        records,
    })
}

/// Pretty JSON with a trailing newline. Non-finite floats become `null`.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(io_err)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::{Provenance, Window, WindowKind};
    use crate::dynamics::Quantity;
    use proptest::prelude::*;

    fn series() -> TimeSeries {
        TimeSeries {
            quantity: Quantity::DephasingRate,
            params_digest: "abc".into(),
            times: vec![0.0, 0.1, 1e-7],
            values: vec![0.0, -0.25, 1.0 / 3.0],
            errors: vec![0.0, 1e-12, 2.5e-17],
        }
    }

    #[test]
    fn float_forms() {
        assert_eq!(fmt_float(0.0), "0");
        assert_eq!(fmt_float(-0.0), "0");
        assert_eq!(fmt_float(1.0), "1");
        assert_eq!(fmt_float(0.1), "0.1");
        assert_eq!(fmt_float(1e-7), "1e-7");
        assert_eq!(fmt_float(1e300), "1e300");
        assert_eq!(fmt_float(f64::NAN), "NaN");
    }

    #[test]
    fn timeseries_layout() {
        let mut buf = Vec::new();
        write_timeseries_csv(&series(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,value,err_estimate");
        assert_eq!(lines[1], "0,0,0");
        assert_eq!(lines[2], "0.1,-0.25,1e-12");
        assert_eq!(lines[3], "1e-7,0.3333333333333333,2.5e-17");
    }

    #[test]
    fn windows_and_intervals_layout() {
        let set = WindowSet {
            kind: WindowKind::InfoBackflow,
            eps0: 0.3,
            n_range: (2, 2),
            provenance: Provenance::Predicted,
            limit_angle: 0.0,
            intervals: vec![Window { n: 2, t_start: 1.5, t_end: 2.5 }],
        };
        let mut buf = Vec::new();
        write_windows_csv(&[set], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "kind,n,t_start,t_end\ninfo_backflow,2,1.5,2.5\n");

        let iv = SignIntervals {
            t_start: 0.0,
            t_end: 3.0,
            resolution: 0.1,
            negative_intervals: vec![(1.0, 2.0)],
            positive_intervals: vec![(0.0, 1.0), (2.0, 3.0)],
            roots: vec![],
            degenerate: vec![],
        };
        let mut buf = Vec::new();
        write_intervals_csv(&iv, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "kind,t_start,t_end\npositive,0,1\nnegative,1,2\npositive,2,3\n"
        );
    }

    #[test]
    fn json_is_stable() {
        let a = timeseries_json(&series()).unwrap();
        let b = timeseries_json(&series()).unwrap();
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["records"][1]["value"], -0.25);
        assert_eq!(v["quantity"], "dephasing_rate");
    }

    proptest! {
        #[test]
        fn floats_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            let s = fmt_float(x);
            prop_assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }
}
