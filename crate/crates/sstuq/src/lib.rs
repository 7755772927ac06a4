//! STFT-based synchrosqueezing with bootstrap uncertainty quantification.
//!
//! The pipeline: window a real series into a discretized STFT on an
//! arbitrary positive-frequency grid, reassign each coefficient to its
//! estimated instantaneous frequency (synchrosqueezing), extract ridges and
//! reconstruct oscillatory components, and quantify uncertainty under
//! locally stationary noise by fitting a time-varying AR model and
//! bootstrapping percentile bands / noise thresholds for the |SST| surface.
//!
//! All numeric entry points are pure; heavy loops run data-parallel when
//! the default `parallel` feature is on and results are bit-identical to
//! the sequential build.

pub mod csvio;
pub mod error;
pub mod grid;
pub mod par;
pub mod raster;
pub mod recon;
pub mod series;
pub mod simgen;
pub mod spline;
pub mod sst;
pub mod stats;
pub mod stft;
pub mod tfr;
pub mod tvar;
pub mod uq;
pub mod window;

pub use error::{Error, Result};
pub use grid::{uniform_grid, FreqGrid};
pub use recon::{
    data_driven_nu, extract_ridge, extract_ridge_with, reconstruct, ComponentEstimate, Ridge,
};
pub use series::{validate_series, TimeSeries};
pub use simgen::{gen_ahm, gen_null, gaussianity_check, AhmTruth, GaussianityReport};
pub use sst::{reassign, synchrosqueeze, ReassignMap, SstParams};
pub use tvar::{fit_tvar, innovations, local_std, sample_bootstrap, TvarModel};
pub use uq::{
    apply_threshold, bootstrap_bands, noise_threshold, BandSpec, Bands, PipelineCfg,
    ThresholdSurface,
};
pub use raster::{magnitude_raster, overlay_ridge, surface_raster, GrayImage, RasterMap};
pub use stft::{stft, stft_at_rows, stft_oracle};
pub use tfr::{Tfr, TfrKind};
pub use window::{make_window, WindowFamily, WindowPair};
