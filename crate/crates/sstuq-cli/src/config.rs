//! Run configuration: defaults, key=value config files, and the merge
//! with command-line flags (flags win over the file, the file wins over
//! defaults). Every effective value is echoed into `run_manifest.txt`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::CliError;

/// Default relative std of the truncated Gaussian window.
pub const DEFAULT_GAUSS_S: f64 = 0.25;
/// Default window half-support in seconds.
pub const DEFAULT_BETA_S: f64 = 0.5;
/// Default ridge smoothness penalty (Hz^-2 scale).
pub const DEFAULT_LAMBDA: f64 = 1.0;
/// Default reconstruction band halfwidth, in analysis bins.
pub const DEFAULT_DELTA_R_BINS: f64 = 3.0;
/// Default off-ridge quantile for the data-driven suppression level.
pub const DEFAULT_NU_QUANTILE: f64 = 0.95;
/// Default tvAR order.
pub const DEFAULT_ORDER_B: usize = 2;
/// Default basis order per lag.
pub const DEFAULT_BASIS_M: usize = 4;
/// Default half window of the local innovation-std estimate.
pub const DEFAULT_HALF_WINDOW: usize = 20;
/// Default bootstrap replicate count.
pub const DEFAULT_M_BOOT: usize = 1000;
/// Default band/threshold level.
pub const DEFAULT_ALPHA_LEVEL: f64 = 0.05;
/// Default coarse grid nodes per axis.
pub const DEFAULT_COARSE_NODES: usize = 32;
/// Default simulated series length.
pub const DEFAULT_SIM_N: usize = 2048;

/// A parsed `key=value` config file; keys use the flag spelling without
/// the leading dashes (for example `m-boot=200`).
#[derive(Debug, Default)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

/// Keys the config file may set; anything else is rejected so typos
/// cannot silently fall back to defaults.
const KNOWN_KEYS: &[&str] = &[
    "seed",
    "jobs",
    "out-dir",
    "rate",
    "window",
    "beta-s",
    "gauss-s",
    "c-max",
    "bins",
    "sst-alpha",
    "nu",
    "nu-quantile",
    "lambda",
    "delta-r",
    "order-b",
    "basis-m",
    "half-window",
    "m-boot",
    "alpha-level",
    "coarse-times",
    "coarse-freqs",
    "raster-map",
    "n",
];

impl ConfigFile {
    /// Parses a config file body. Blank lines and `#` comments are
    /// allowed; every other line must be `key=value` with a known key.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| CliError::Config {
                field: "config".into(),
                msg: format!("line {}: expected key=value, got {line:?}", i + 1),
            })?;
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(CliError::Config {
                    field: key.to_string(),
                    msg: format!("unknown config key at line {}", i + 1),
                });
            }
            entries.insert(key.to_string(), value.trim().to_string());
        }
        Ok(ConfigFile { entries })
    }

    /// Loads and parses the file at `path` when given.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(ConfigFile::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Config {
                    field: "config".into(),
                    msg: format!("cannot read {}: {e}", p.display()),
                })?;
                ConfigFile::parse(&text)
            }
        }
    }

    /// Flag-over-file resolution: returns `flag` when set, otherwise the
    /// parsed file value, otherwise `None`.
    pub fn resolve<T: FromStr + Clone>(
        &self,
        flag: Option<T>,
        key: &str,
    ) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.entries.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| CliError::Config {
                field: key.to_string(),
                msg: format!("cannot parse config value {raw:?}"),
            }),
        }
    }
}

/// Magnitude-to-intensity map name, mirrored from the library enum so it
/// can be parsed from flags and config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MapName {
    Linear,
    Log1p,
}

impl FromStr for MapName {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "linear" => Ok(MapName::Linear),
            "log1p" => Ok(MapName::Log1p),
            _ => Err(()),
        }
    }
}

impl MapName {
    pub fn as_str(self) -> &'static str {
        match self {
            MapName::Linear => "linear",
            MapName::Log1p => "log1p",
        }
    }
    pub fn to_raster(self) -> sstuq::RasterMap {
        match self {
            MapName::Linear => sstuq::RasterMap::Linear,
            MapName::Log1p => sstuq::RasterMap::Log1p,
        }
    }
}

/// Window family name, parsed from flags and config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum WindowName {
    Bump,
    Truncgauss,
}

impl FromStr for WindowName {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "bump" => Ok(WindowName::Bump),
            "truncgauss" => Ok(WindowName::Truncgauss),
            _ => Err(()),
        }
    }
}

impl WindowName {
    pub fn as_str(self) -> &'static str {
        match self {
            WindowName::Bump => "bump",
            WindowName::Truncgauss => "truncgauss",
        }
    }
}

/// Fully resolved run configuration; every field is echoed into the
/// manifest so a run can be reproduced from its output directory alone.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub subcommand: &'static str,
    pub seed: u64,
    pub jobs: usize,
    pub out_dir: PathBuf,
    pub input: Option<PathBuf>,
    pub simulate: Option<&'static str>,
    pub sim_n: usize,
    pub rate_flag: Option<f64>,
    pub window: WindowName,
    pub beta_s: f64,
    pub gauss_s: f64,
    pub c_max_flag: Option<f64>,
    pub bins_flag: Option<usize>,
    pub sst_alpha_flag: Option<f64>,
    pub nu_flag: Option<f64>,
    pub nu_quantile: f64,
    pub lambda: f64,
    pub delta_r_flag: Option<f64>,
    pub order_b: usize,
    pub basis_m: usize,
    pub half_window: usize,
    pub m_boot: usize,
    pub alpha_level: f64,
    pub coarse_times: usize,
    pub coarse_freqs: usize,
    pub assume_null: bool,
    pub emit_png: bool,
    pub emit_threshold: bool,
    pub skip_recon: bool,
    pub raster_map: MapName,
}

/// Values that are only known once the input series and grid exist; they
/// complete the manifest.
#[derive(Debug, Clone, Copy, Default)]
pub struct Resolved {
    pub rate_hz: f64,
    pub n: usize,
    pub c_max_hz: f64,
    pub bins: usize,
    pub sst_alpha: f64,
    pub nu: f64,
    pub delta_r_hz: f64,
}

impl RunConfig {
    /// Renders the manifest: one `key=value` line per effective setting,
    /// in a fixed order, including values that defaulted.
    pub fn manifest(&self, r: &Resolved) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k}={v}");
        };
        // values a subcommand never resolves (e.g. nu under `simulate`)
        // are carried as NaN and echoed as "auto"
        let fv = |v: f64| {
            if v.is_finite() {
                v.to_string()
            } else {
                "auto".to_string()
            }
        };
        kv("subcommand", self.subcommand.into());
        kv("seed", self.seed.to_string());
        kv("jobs", self.jobs.to_string());
        kv("out-dir", self.out_dir.display().to_string());
        kv(
            "input",
            self.input
                .as_ref()
                .map_or("none".into(), |p| p.display().to_string()),
        );
        kv("simulate", self.simulate.unwrap_or("none").into());
        kv("n", r.n.to_string());
        kv("rate-hz", r.rate_hz.to_string());
        kv("window", self.window.as_str().into());
        kv("beta-s", self.beta_s.to_string());
        kv("gauss-s", self.gauss_s.to_string());
        kv("c-max-hz", r.c_max_hz.to_string());
        kv("bins", r.bins.to_string());
        kv("sst-alpha", fv(r.sst_alpha));
        kv("nu", fv(r.nu));
        kv("nu-quantile", self.nu_quantile.to_string());
        kv("lambda", self.lambda.to_string());
        kv("delta-r-hz", fv(r.delta_r_hz));
        kv("order-b", self.order_b.to_string());
        kv("basis-m", self.basis_m.to_string());
        kv("half-window", self.half_window.to_string());
        kv("m-boot", self.m_boot.to_string());
        kv("alpha-level", self.alpha_level.to_string());
        kv("coarse-times", self.coarse_times.to_string());
        kv("coarse-freqs", self.coarse_freqs.to_string());
        kv("assume-null", self.assume_null.to_string());
        kv("emit-png", self.emit_png.to_string());
        kv("emit-threshold", self.emit_threshold.to_string());
        kv("skip-recon", self.skip_recon.to_string());
        kv("raster-map", self.raster_map.as_str().into());
        out
    }
}
