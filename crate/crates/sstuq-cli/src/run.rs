//! Subcommand pipelines: ingestion, transform, and artifact emission.
//!
//! Failures split into two classes: configuration problems (bad flag or
//! file values, unusable paths) name the offending field and exit 2;
//! numeric failures inside the pipeline name the stage and exit 3.

use std::path::{Path, PathBuf};

use image::{ImageBuffer, Luma};

use sstuq::csvio;
use sstuq::tvar::fit_tvar_with;
use sstuq::{
    apply_threshold, bootstrap_bands, data_driven_nu, extract_ridge, gen_ahm, gen_null,
    magnitude_raster, make_window, noise_threshold, overlay_ridge, reassign, reconstruct,
    stft, surface_raster, synchrosqueeze, uniform_grid, BandSpec, FreqGrid, GrayImage,
    PipelineCfg, Ridge, SstParams, Tfr, TimeSeries, TvarModel, WindowFamily, WindowPair,
};

use crate::config::{Resolved, RunConfig, WindowName};
use crate::CliError;

fn config_err(field: &str, msg: impl Into<String>) -> CliError {
    CliError::Config {
        field: field.into(),
        msg: msg.into(),
    }
}

fn stage_err(stage: &'static str) -> impl Fn(sstuq::Error) -> CliError {
    move |source| CliError::Stage { stage, source }
}

/// Minimum simulated lengths below which the generators' structural
/// guarantees (window fit, smoothing supports) do not hold.
const MIN_NULL_N: usize = 64;
const MIN_AHM_N: usize = 1024;

/// Produces the input series, either simulated or ingested from CSV.
fn ingest(cfg: &RunConfig) -> Result<TimeSeries, CliError> {
    match (cfg.simulate, &cfg.input) {
        (Some("null"), _) => {
            if cfg.sim_n < MIN_NULL_N {
                return Err(config_err("n", format!("null model needs n >= {MIN_NULL_N}")));
            }
            Ok(gen_null(cfg.sim_n, cfg.seed))
        }
        (Some("ahm"), _) => {
            if cfg.sim_n < MIN_AHM_N {
                return Err(config_err("n", format!("ahm model needs n >= {MIN_AHM_N}")));
            }
            Ok(gen_ahm(cfg.sim_n, cfg.seed).f)
        }
        (Some(other), _) => Err(config_err("simulate", format!("unknown model {other:?}"))),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                config_err("input", format!("cannot read {}: {e}", path.display()))
            })?;
            csvio::series_from_csv(&text, cfg.rate_flag).map_err(|e| match &e {
                sstuq::Error::CsvParse { msg, .. } if msg.contains("rate_hz") => {
                    config_err("rate_hz", msg.clone())
                }
                _ => config_err("input", e.to_string()),
            })
        }
        (None, None) => Err(config_err("input", "provide --input or --simulate")),
    }
}

/// Everything the transform stages produce, plus the resolved values the
/// manifest needs.
struct Transform {
    win: WindowPair,
    grid: FreqGrid,
    v_h: Tfr,
    sst: Tfr,
    resolved: Resolved,
}

/// Runs window construction, STFT, reassignment, and synchrosqueezing,
/// resolving the data-dependent defaults along the way.
fn transform(cfg: &RunConfig, ts: &TimeSeries) -> Result<Transform, CliError> {
    let rate = ts.rate_hz;
    let n = ts.len();
    let family = match cfg.window {
        WindowName::Bump => WindowFamily::Bump { beta_s: cfg.beta_s },
        WindowName::Truncgauss => WindowFamily::TruncGauss {
            beta_s: cfg.beta_s,
            s: cfg.gauss_s,
        },
    };
    let win = make_window(family, rate).map_err(|e| config_err("beta-s", e.to_string()))?;
    let c_max = cfg.c_max_flag.unwrap_or(rate / 2.0);
    let bins = cfg.bins_flag.unwrap_or_else(|| (n / 3).max(32));
    let grid = uniform_grid(c_max, bins).map_err(|e| config_err("c-max", e.to_string()))?;
    let v_h = stft(ts, &win, &grid, false).map_err(stage_err("stft"))?;
    let v_dh = stft(ts, &win, &grid, true).map_err(stage_err("stft"))?;
    let nu = cfg
        .nu_flag
        .unwrap_or_else(|| data_driven_nu(&v_h, &win, cfg.nu_quantile));
    let delta_r = cfg
        .delta_r_flag
        .unwrap_or(crate::config::DEFAULT_DELTA_R_BINS * grid.bin_width_hz);
    let sst_alpha = cfg
        .sst_alpha_flag
        .unwrap_or_else(|| (delta_r / 2.0) * (delta_r / 2.0));
    let map = reassign(&v_h, &v_dh, nu).map_err(stage_err("reassign"))?;
    let params = SstParams {
        alpha: sst_alpha,
        nu,
        out_grid: grid.clone(),
        real_part_only: false,
    };
    let sst = synchrosqueeze(&v_h, &map, &params).map_err(stage_err("sst"))?;
    Ok(Transform {
        win,
        grid,
        v_h,
        sst,
        resolved: Resolved {
            rate_hz: rate,
            n,
            c_max_hz: c_max,
            bins,
            sst_alpha,
            nu,
            delta_r_hz: delta_r,
        },
    })
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    std::fs::write(&path, body)
        .map_err(|e| config_err("out-dir", format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn write_png(dir: &Path, name: &str, img: &GrayImage) -> Result<(), CliError> {
    let path = dir.join(name);
    let buf: ImageBuffer<Luma<u8>, Vec<u8>> =
        ImageBuffer::from_raw(img.width as u32, img.height as u32, img.pixels.clone())
            .expect("pixel buffer matches dimensions");
    buf.save(&path)
        .map_err(|e| config_err("out-dir", format!("cannot write {}: {e}", path.display())))
}

fn ensure_out_dir(cfg: &RunConfig) -> Result<&Path, CliError> {
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| {
        config_err(
            "out-dir",
            format!("cannot create {}: {e}", cfg.out_dir.display()),
        )
    })?;
    Ok(&cfg.out_dir)
}

/// `simulate`: generate a series and write it (with truth columns for the
/// amplitude/frequency-modulated model) plus the manifest.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<(), CliError> {
    let dir = ensure_out_dir(cfg)?;
    let (csv, rate, n) = match cfg.simulate {
        Some("ahm") => {
            if cfg.sim_n < MIN_AHM_N {
                return Err(config_err("n", format!("ahm model needs n >= {MIN_AHM_N}")));
            }
            let truth = gen_ahm(cfg.sim_n, cfg.seed);
            (csvio::ahm_series_to_csv(&truth), truth.f.rate_hz, truth.f.len())
        }
        _ => {
            if cfg.sim_n < MIN_NULL_N {
                return Err(config_err("n", format!("null model needs n >= {MIN_NULL_N}")));
            }
            let ts = gen_null(cfg.sim_n, cfg.seed);
            (csvio::series_to_csv(&ts), ts.rate_hz, ts.len())
        }
    };
    write_file(dir, "series.csv", &csv)?;
    let resolved = Resolved {
        rate_hz: rate,
        n,
        c_max_hz: rate / 2.0,
        bins: (n / 3).max(32),
        sst_alpha: f64::NAN,
        nu: f64::NAN,
        delta_r_hz: f64::NAN,
    };
    write_file(dir, "run_manifest.txt", &cfg.manifest(&resolved))?;
    Ok(())
}

/// `analyze`: STFT, SST, ridge, reconstruction artifacts.
pub fn cmd_analyze(cfg: &RunConfig) -> Result<(), CliError> {
    let dir = ensure_out_dir(cfg)?;
    let ts = ingest(cfg)?;
    let t = transform(cfg, &ts)?;
    write_file(dir, "stft.csv", &csvio::tfr_to_csv(&t.v_h))?;
    write_file(dir, "sst.csv", &csvio::tfr_to_csv(&t.sst))?;
    let mut ridge_opt: Option<Ridge> = None;
    if !cfg.skip_recon {
        let ridge = extract_ridge(&t.sst, cfg.lambda, t.resolved.delta_r_hz)
            .map_err(stage_err("ridge"))?;
        let comp = reconstruct(&t.sst, &ridge, &t.win).map_err(stage_err("reconstruct"))?;
        write_file(dir, "ridge.csv", &csvio::ridge_to_csv(&ridge, &t.sst.time_axis))?;
        write_file(dir, "component.csv", &csvio::component_to_csv(&comp))?;
        ridge_opt = Some(ridge);
    }
    if cfg.emit_png {
        let map = cfg.raster_map.to_raster();
        write_png(dir, "stft.png", &magnitude_raster(&t.v_h, map))?;
        let mut img = magnitude_raster(&t.sst, map);
        if let Some(ridge) = &ridge_opt {
            overlay_ridge(&mut img, ridge);
        }
        write_png(dir, "sst.png", &img)?;
    }
    write_file(dir, "run_manifest.txt", &cfg.manifest(&t.resolved))?;
    Ok(())
}

/// Shared tail of `bootstrap` and `threshold`: reconstruct (unless the
/// null is assumed), take residuals, and fit the noise model. Returns the
/// fitted model and the deterministic signal estimate (None under the
/// null assumption, where the estimate is identically zero).
fn fit_noise_model(
    cfg: &RunConfig,
    ts: &TimeSeries,
    t: &Transform,
) -> Result<(TvarModel, Option<TimeSeries>), CliError> {
    let (resid, signal) = if cfg.assume_null {
        (ts.clone(), None)
    } else {
        let ridge = extract_ridge(&t.sst, cfg.lambda, t.resolved.delta_r_hz)
            .map_err(stage_err("ridge"))?;
        let comp = reconstruct(&t.sst, &ridge, &t.win).map_err(stage_err("reconstruct"))?;
        let est: Vec<f64> = comp.complex_f.iter().map(|z| z.re).collect();
        let resid: Vec<f64> = ts
            .samples
            .iter()
            .zip(&est)
            .map(|(x, f)| x - f)
            .collect();
        let resid = TimeSeries::new(resid, ts.rate_hz, ts.start_time_s)
            .map_err(stage_err("residual"))?;
        let est = TimeSeries::new(est, ts.rate_hz, ts.start_time_s)
            .map_err(stage_err("residual"))?;
        (resid, Some(est))
    };
    let model = fit_tvar_with(&resid, cfg.order_b, cfg.basis_m, cfg.half_window)
        .map_err(stage_err("fit-tvar"))?;
    Ok((model, signal))
}

/// Endpoint-inclusive coarse node indices over an axis of length `len`.
fn coarse_nodes(len: usize, count: usize) -> Vec<usize> {
    (0..count).map(|i| i * (len - 1) / (count - 1)).collect()
}

fn band_spec(cfg: &RunConfig, n: usize, bins: usize) -> Result<BandSpec, CliError> {
    for (field, count, len) in [
        ("coarse-times", cfg.coarse_times, n),
        ("coarse-freqs", cfg.coarse_freqs, bins),
    ] {
        if count < 4 {
            return Err(config_err(field, "spline lift needs at least 4 nodes"));
        }
        if count > len {
            return Err(config_err(
                field,
                format!("{count} nodes exceed the axis length {len}"),
            ));
        }
    }
    Ok(BandSpec {
        grid_times: coarse_nodes(n, cfg.coarse_times),
        grid_freq_idx: coarse_nodes(bins, cfg.coarse_freqs),
        alpha_level: cfg.alpha_level,
        n_boot: cfg.m_boot,
    })
}

fn pipeline_cfg(t: &Transform) -> PipelineCfg {
    PipelineCfg {
        win: t.win.clone(),
        grid: t.grid.clone(),
        sst_alpha: t.resolved.sst_alpha,
        nu: t.resolved.nu,
        real_part_only: false,
    }
}

/// `bootstrap`: percentile confidence bands for |SST|, optionally plus a
/// noise threshold surface, from the residual noise model.
pub fn cmd_bootstrap(cfg: &RunConfig) -> Result<(), CliError> {
    let dir = ensure_out_dir(cfg)?;
    let ts = ingest(cfg)?;
    let t = transform(cfg, &ts)?;
    let (model, signal) = fit_noise_model(cfg, &ts, &t)?;
    let spec = band_spec(cfg, ts.len(), t.resolved.bins)?;
    let pcfg = pipeline_cfg(&t);
    let bands = bootstrap_bands(signal.as_ref(), &model, &spec, &pcfg, cfg.seed)
        .map_err(stage_err("bootstrap"))?;
    write_file(dir, "bands.csv", &csvio::bands_to_csv(&bands))?;
    write_file(dir, "model.txt", &model.to_text())?;
    if cfg.emit_png {
        let map = cfg.raster_map.to_raster();
        let d = bands.freq_axis.len();
        write_png(
            dir,
            "bands_upper.png",
            &surface_raster(&bands.upper, bands.time_axis.len(), d, map),
        )?;
    }
    if cfg.emit_threshold {
        let thr = noise_threshold(&model, &spec, &pcfg, cfg.seed)
            .map_err(stage_err("threshold"))?;
        write_file(dir, "threshold.csv", &csvio::threshold_to_csv(&thr))?;
        if cfg.emit_png {
            let d = thr.freq_axis.len();
            write_png(
                dir,
                "threshold.png",
                &surface_raster(
                    &thr.values,
                    thr.time_axis.len(),
                    d,
                    cfg.raster_map.to_raster(),
                ),
            )?;
        }
    }
    write_file(dir, "run_manifest.txt", &cfg.manifest(&t.resolved))?;
    Ok(())
}

/// `threshold`: noise threshold surface from the residual model, applied
/// to the observed SST.
pub fn cmd_threshold(cfg: &RunConfig) -> Result<(), CliError> {
    let dir = ensure_out_dir(cfg)?;
    let ts = ingest(cfg)?;
    let t = transform(cfg, &ts)?;
    let (model, _signal) = fit_noise_model(cfg, &ts, &t)?;
    let spec = band_spec(cfg, ts.len(), t.resolved.bins)?;
    let pcfg = pipeline_cfg(&t);
    let thr = noise_threshold(&model, &spec, &pcfg, cfg.seed).map_err(stage_err("threshold"))?;
    let kept = apply_threshold(&t.sst, &thr.values).map_err(stage_err("threshold"))?;
    write_file(dir, "threshold.csv", &csvio::threshold_to_csv(&thr))?;
    write_file(dir, "sst_thresholded.csv", &csvio::tfr_to_csv(&kept))?;
    write_file(dir, "model.txt", &model.to_text())?;
    if cfg.emit_png {
        let d = thr.freq_axis.len();
        write_png(
            dir,
            "threshold.png",
            &surface_raster(
                &thr.values,
                thr.time_axis.len(),
                d,
                cfg.raster_map.to_raster(),
            ),
        )?;
    }
    write_file(dir, "run_manifest.txt", &cfg.manifest(&t.resolved))?;
    Ok(())
}
