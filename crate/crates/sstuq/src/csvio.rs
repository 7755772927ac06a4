//! CSV serialization for every artifact the pipeline emits.
//!
//! Numbers are written with Rust's shortest round-trip `Display`
//! formatting, so parsing a written file recovers the exact f64 bits
//! (stronger than 17 significant digits). Headers are mandatory, exact,
//! and checked on ingestion; parse errors carry 1-based line numbers.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::FreqGrid;
use crate::recon::{ComponentEstimate, Ridge};
use crate::series::TimeSeries;
use crate::simgen::AhmTruth;
use crate::tfr::{Tfr, TfrKind};
use crate::uq::{Bands, ThresholdSurface};

/// Header of a plain series file.
pub const SERIES_HEADER: &str = "time_s,value";
/// Header of a single-column series file (rate supplied out of band).
pub const SERIES_HEADER_BARE: &str = "value";
/// Header of a simulated series file carrying ground truth.
pub const AHM_HEADER: &str = "time_s,value,am,if_hz,phase_cycles";
/// Header of a long-format transform file.
pub const TFR_HEADER: &str = "time_s,freq_hz,re,im";
/// Header of a reconstructed component file.
pub const COMPONENT_HEADER: &str = "time_s,re,im,amplitude,phase_cycles";
/// Header of a ridge file.
pub const RIDGE_HEADER: &str = "time_s,if_hz,band_halfwidth_hz,quality";
/// Header of a confidence-band file.
pub const BANDS_HEADER: &str = "time_s,freq_hz,lower,upper";
/// Header of a threshold-surface file.
pub const THRESHOLD_HEADER: &str = "time_s,freq_hz,threshold";

fn write_row(out: &mut String, cells: &[f64]) {
    for (i, v) in cells.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "{v}").expect("write to String cannot fail");
    }
    out.push('\n');
}

/// Serializes a series as `time_s,value` rows.
pub fn series_to_csv(ts: &TimeSeries) -> String {
    let mut out = String::with_capacity(ts.len() * 40 + 16);
    out.push_str(SERIES_HEADER);
    out.push('\n');
    for (i, &x) in ts.samples.iter().enumerate() {
        write_row(&mut out, &[ts.start_time_s + i as f64 / ts.rate_hz, x]);
    }
    out
}

/// Serializes a simulated signal together with its ground-truth
/// amplitude, instantaneous frequency, and phase columns.
pub fn ahm_series_to_csv(truth: &AhmTruth) -> String {
    let ts = &truth.f;
    let mut out = String::with_capacity(ts.len() * 90 + 16);
    out.push_str(AHM_HEADER);
    out.push('\n');
    for (i, &x) in ts.samples.iter().enumerate() {
        write_row(
            &mut out,
            &[
                ts.start_time_s + i as f64 / ts.rate_hz,
                x,
                truth.am[i],
                truth.inst_freq[i],
                truth.phase[i],
            ],
        );
    }
    out
}

/// Serializes a transform in long format, outer loop over time rows,
/// inner loop over ascending frequency bins.
pub fn tfr_to_csv(t: &Tfr) -> String {
    let d = t.n_freqs();
    let mut out = String::with_capacity(t.n_times() * d * 60 + 16);
    out.push_str(TFR_HEADER);
    out.push('\n');
    for (l, &time) in t.time_axis.iter().enumerate() {
        let row = t.row(l);
        for (k, &f) in t.freq_axis.freqs_hz.iter().enumerate() {
            write_row(&mut out, &[time, f, row[k].re, row[k].im]);
        }
    }
    out
}

/// Serializes a reconstructed component over the full time axis; rows
/// outside `valid_range` are included (the range itself is run metadata).
pub fn component_to_csv(c: &ComponentEstimate) -> String {
    let mut out = String::with_capacity(c.time_axis.len() * 80 + 16);
    out.push_str(COMPONENT_HEADER);
    out.push('\n');
    for i in 0..c.time_axis.len() {
        write_row(
            &mut out,
            &[
                c.time_axis[i],
                c.complex_f[i].re,
                c.complex_f[i].im,
                c.amplitude[i],
                c.phase_cycles[i],
            ],
        );
    }
    out
}

/// Serializes a ridge path; the scalar band halfwidth is repeated per row
/// so the file is self-contained.
pub fn ridge_to_csv(r: &Ridge, time_axis: &[f64]) -> String {
    let mut out = String::with_capacity(time_axis.len() * 60 + 16);
    out.push_str(RIDGE_HEADER);
    out.push('\n');
    for i in 0..time_axis.len() {
        write_row(
            &mut out,
            &[time_axis[i], r.if_hz[i], r.band_halfwidth_hz, r.quality[i]],
        );
    }
    out
}

/// Serializes confidence bands in long format.
pub fn bands_to_csv(b: &Bands) -> String {
    let d = b.freq_axis.len();
    let mut out = String::with_capacity(b.time_axis.len() * d * 60 + 16);
    out.push_str(BANDS_HEADER);
    out.push('\n');
    for (l, &time) in b.time_axis.iter().enumerate() {
        for (k, &f) in b.freq_axis.freqs_hz.iter().enumerate() {
            write_row(
                &mut out,
                &[time, f, b.lower[l * d + k], b.upper[l * d + k]],
            );
        }
    }
    out
}

/// Serializes a threshold surface in long format.
pub fn threshold_to_csv(t: &ThresholdSurface) -> String {
    let d = t.freq_axis.len();
    let mut out = String::with_capacity(t.time_axis.len() * d * 50 + 16);
    out.push_str(THRESHOLD_HEADER);
    out.push('\n');
    for (l, &time) in t.time_axis.iter().enumerate() {
        for (k, &f) in t.freq_axis.freqs_hz.iter().enumerate() {
            write_row(&mut out, &[time, f, t.values[l * d + k]]);
        }
    }
    out
}

fn parse_cell(cell: &str, line: usize) -> Result<f64> {
    cell.trim().parse::<f64>().map_err(|_| Error::CsvParse {
        line,
        msg: format!("not a number: {cell:?}"),
    })
}

/// Parses a CSV body under an exact expected header into row-major f64
/// rows; every data row must have exactly as many cells as the header.
pub fn parse_rows(text: &str, expected_header: &str) -> Result<Vec<Vec<f64>>> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("").trim_end_matches('\r');
    if header != expected_header {
        return Err(Error::CsvParse {
            line: 1,
            msg: format!("expected header {expected_header:?}, got {header:?}"),
        });
    }
    let n_cols = expected_header.split(',').count();
    let mut rows = Vec::new();
    for (i, raw) in lines.enumerate() {
        let line_no = i + 2;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != n_cols {
            return Err(Error::CsvParse {
                line: line_no,
                msg: format!("expected {n_cols} columns, got {}", cells.len()),
            });
        }
        let mut row = Vec::with_capacity(n_cols);
        for cell in cells {
            row.push(parse_cell(cell, line_no)?);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Parses a series file. A `time_s,value` file carries its own clock:
/// the rate is inferred from the (required uniform) time column and
/// `rate_hz` is ignored. A bare `value` file needs `rate_hz` and starts
/// its clock at `1/rate_hz`, matching the simulated-series convention.
pub fn series_from_csv(text: &str, rate_hz: Option<f64>) -> Result<TimeSeries> {
    let header = text.lines().next().unwrap_or("").trim_end_matches('\r');
    if header == SERIES_HEADER_BARE {
        let rate = rate_hz.ok_or_else(|| Error::CsvParse {
            line: 1,
            msg: "single-column series requires rate_hz".into(),
        })?;
        let rows = parse_rows(text, SERIES_HEADER_BARE)?;
        let samples: Vec<f64> = rows.into_iter().map(|r| r[0]).collect();
        return TimeSeries::new(samples, rate, 1.0 / rate);
    }
    let rows = parse_rows(text, SERIES_HEADER)?;
    if rows.len() < 2 {
        return Err(Error::CsvParse {
            line: 2,
            msg: format!("need at least 2 rows to infer the rate, got {}", rows.len()),
        });
    }
    let n = rows.len();
    let t0 = rows[0][0];
    let t_last = rows[n - 1][0];
    if !(t_last > t0) {
        return Err(Error::CsvParse {
            line: n + 1,
            msg: "time column must be strictly increasing".into(),
        });
    }
    let dt = (t_last - t0) / (n - 1) as f64;
    for (i, row) in rows.iter().enumerate() {
        let expected = t0 + i as f64 * dt;
        if (row[0] - expected).abs() > 1e-6 * dt {
            return Err(Error::CsvParse {
                line: i + 2,
                msg: format!(
                    "non-uniform sampling: time {} deviates from the uniform grid value {expected}",
                    row[0]
                ),
            });
        }
    }
    let samples: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    TimeSeries::new(samples, 1.0 / dt, t0)
}

/// Parses a long-format transform file written by [`tfr_to_csv`]. The
/// frequency axis is taken from the first time block and must repeat
/// bitwise in every later block; `c_max` is recovered as the last (top)
/// frequency of the axis.
pub fn tfr_from_csv(text: &str, kind: TfrKind) -> Result<Tfr> {
    let rows = parse_rows(text, TFR_HEADER)?;
    if rows.is_empty() {
        return Err(Error::CsvParse {
            line: 2,
            msg: "transform file has no data rows".into(),
        });
    }
    let t0 = rows[0][0];
    let d = rows
        .iter()
        .position(|r| r[0] != t0)
        .unwrap_or(rows.len());
    if rows.len() % d != 0 {
        return Err(Error::CsvParse {
            line: rows.len() + 1,
            msg: format!(
                "{} rows do not tile into blocks of {d} frequency bins",
                rows.len()
            ),
        });
    }
    let freqs: Vec<f64> = rows[..d].iter().map(|r| r[1]).collect();
    let n_times = rows.len() / d;
    let mut time_axis = Vec::with_capacity(n_times);
    let mut values = Vec::with_capacity(rows.len());
    for l in 0..n_times {
        let block = &rows[l * d..(l + 1) * d];
        time_axis.push(block[0][0]);
        for (k, row) in block.iter().enumerate() {
            if row[0] != block[0][0] || row[1] != freqs[k] {
                return Err(Error::CsvParse {
                    line: l * d + k + 2,
                    msg: "time/frequency axes do not repeat consistently".into(),
                });
            }
            values.push(Complex64::new(row[2], row[3]));
        }
    }
    let c_max = *freqs.last().expect("d >= 1");
    let bin_width = if d > 1 { freqs[1] - freqs[0] } else { c_max };
    let grid = FreqGrid {
        freqs_hz: freqs,
        c_max_hz: c_max,
        bin_width_hz: bin_width,
    };
    Tfr::new(values, time_axis, grid, kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::uniform_grid;
    use crate::simgen::{gen_ahm, gen_null};
    use crate::stft::stft;
    use crate::window::{make_window, WindowFamily};
    use std::f64::consts::PI;

    #[test]
    fn null_series_round_trips_bitwise() {
        let ts = gen_null(256, 9);
        let csv = series_to_csv(&ts);
        let back = series_from_csv(&csv, None).unwrap();
        assert_eq!(ts.len(), back.len());
        for (a, b) in ts.samples.iter().zip(&back.samples) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert!((back.rate_hz - ts.rate_hz).abs() / ts.rate_hz <= 1e-12);
        assert_eq!(back.start_time_s.to_bits(), ts.start_time_s.to_bits());
    }

    #[test]
    fn ahm_truth_columns_round_trip_bitwise() {
        let truth = gen_ahm(1024, 2);
        let csv = ahm_series_to_csv(&truth);
        let rows = parse_rows(&csv, AHM_HEADER).unwrap();
        assert_eq!(rows.len(), 1024);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row[1].to_bits(), truth.f.samples[i].to_bits());
            assert_eq!(row[2].to_bits(), truth.am[i].to_bits());
            assert_eq!(row[3].to_bits(), truth.inst_freq[i].to_bits());
            assert_eq!(row[4].to_bits(), truth.phase[i].to_bits());
        }
    }

    #[test]
    fn single_column_series_needs_a_rate() {
        let csv = "value\n1.5\n-2.25\n0.125\n";
        match series_from_csv(csv, None) {
            Err(Error::CsvParse { msg, .. }) => assert!(msg.contains("rate_hz")),
            other => panic!("expected CsvParse, got {other:?}"),
        }
        let ts = series_from_csv(csv, Some(8.0)).unwrap();
        assert_eq!(ts.samples, vec![1.5, -2.25, 0.125]);
        assert_eq!(ts.rate_hz, 8.0);
        assert_eq!(ts.start_time_s, 0.125);
    }

    #[test]
    fn tfr_round_trips_bitwise() {
        let n = 64;
        let rate = 16.0;
        let x: Vec<f64> = (1..=n)
            .map(|i| (2.0 * PI * 3.0 * i as f64 / rate).cos())
            .collect();
        let ts = TimeSeries::new(x, rate, 1.0 / rate).unwrap();
        let win = make_window(WindowFamily::Bump { beta_s: 0.5 }, rate).unwrap();
        let grid = uniform_grid(6.0, 12).unwrap();
        let v = stft(&ts, &win, &grid, false).unwrap();
        let csv = tfr_to_csv(&v);
        let back = tfr_from_csv(&csv, TfrKind::Stft).unwrap();
        assert_eq!(back.kind, TfrKind::Stft);
        assert_eq!(back.n_times(), v.n_times());
        assert_eq!(back.n_freqs(), v.n_freqs());
        for (a, b) in v.values().iter().zip(back.values()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
        for (a, b) in v.time_axis.iter().zip(&back.time_axis) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        for (a, b) in v.freq_axis.freqs_hz.iter().zip(&back.freq_axis.freqs_hz) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn surface_and_path_files_parse_losslessly() {
        let grid = uniform_grid(2.0 * PI, 4).unwrap();
        let times = vec![0.1, 0.2, 0.3];
        let vals: Vec<f64> = (0..12).map(|i| (i as f64 + 0.5).sqrt() * PI).collect();
        let bands = Bands {
            lower: vals.iter().map(|v| v * 0.5).collect(),
            upper: vals.clone(),
            time_axis: times.clone(),
            freq_axis: grid.clone(),
        };
        let rows = parse_rows(&bands_to_csv(&bands), BANDS_HEADER).unwrap();
        assert_eq!(rows.len(), 12);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row[2].to_bits(), (vals[i] * 0.5).to_bits());
            assert_eq!(row[3].to_bits(), vals[i].to_bits());
        }

        let surf = ThresholdSurface {
            values: vals.clone(),
            time_axis: times.clone(),
            freq_axis: grid,
        };
        let rows = parse_rows(&threshold_to_csv(&surf), THRESHOLD_HEADER).unwrap();
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row[2].to_bits(), vals[i].to_bits());
        }

        let ridge = Ridge {
            if_hz: vec![1.0 / 3.0, 2.0 / 3.0, PI / 3.0],
            band_halfwidth_hz: 0.7,
            quality: vec![0.1, 0.2, 0.3],
            bins: vec![0, 1, 2],
        };
        let rows = parse_rows(&ridge_to_csv(&ridge, &times), RIDGE_HEADER).unwrap();
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row[1].to_bits(), ridge.if_hz[i].to_bits());
            assert_eq!(row[2].to_bits(), 0.7f64.to_bits());
            assert_eq!(row[3].to_bits(), ridge.quality[i].to_bits());
        }

        let comp = ComponentEstimate {
            complex_f: vec![
                Complex64::new(PI, -1.0 / 7.0),
                Complex64::new(0.0, 2.5),
                Complex64::new(-3.25, 0.0),
            ],
            amplitude: vec![1.0, 2.0, 3.0],
            phase_cycles: vec![0.25, 0.5, 0.75],
            valid_range: 1..2,
            time_axis: times,
        };
        let rows = parse_rows(&component_to_csv(&comp), COMPONENT_HEADER).unwrap();
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row[1].to_bits(), comp.complex_f[i].re.to_bits());
            assert_eq!(row[2].to_bits(), comp.complex_f[i].im.to_bits());
            assert_eq!(row[3].to_bits(), comp.amplitude[i].to_bits());
            assert_eq!(row[4].to_bits(), comp.phase_cycles[i].to_bits());
        }
    }

    #[test]
    fn malformed_inputs_are_rejected_with_line_numbers() {
        match parse_rows("wrong,header\n1,2\n", SERIES_HEADER) {
            Err(Error::CsvParse { line: 1, .. }) => {}
            other => panic!("expected header error, got {other:?}"),
        }
        match parse_rows("time_s,value\n1,2\n3\n", SERIES_HEADER) {
            Err(Error::CsvParse { line: 3, msg }) => assert!(msg.contains("columns")),
            other => panic!("expected column-count error, got {other:?}"),
        }
        match parse_rows("time_s,value\n1,abc\n", SERIES_HEADER) {
            Err(Error::CsvParse { line: 2, msg }) => assert!(msg.contains("abc")),
            other => panic!("expected number error, got {other:?}"),
        }
        match series_from_csv("time_s,value\n0.5,1.0\n", None) {
            Err(Error::CsvParse { msg, .. }) => assert!(msg.contains("2 rows")),
            other => panic!("expected short-file error, got {other:?}"),
        }
        let jitter = "time_s,value\n0.0,1.0\n1.0,1.0\n2.5,1.0\n3.0,1.0\n";
        match series_from_csv(jitter, None) {
            Err(Error::CsvParse { msg, .. }) => assert!(msg.contains("non-uniform")),
            other => panic!("expected uniformity error, got {other:?}"),
        }
    }
}
