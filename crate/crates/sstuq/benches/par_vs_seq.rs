//! Benchmarks the numeric core so the data-parallel path can be compared
//! with the sequential fallback: run `cargo bench -p sstuq` for the
//! parallel numbers and `cargo bench -p sstuq --no-default-features` for
//! the sequential baseline, then compare the matching benchmark names.

use criterion::{criterion_group, criterion_main, Criterion};

use sstuq::uq::{bootstrap_bands, BandSpec, PipelineCfg};
use sstuq::*;

fn protocol(n: usize, d: usize) -> (TimeSeries, WindowPair, FreqGrid) {
    let rate = (n as f64).sqrt();
    let ts = gen_null(n, 1);
    let win = make_window(WindowFamily::Bump { beta_s: 0.5 }, rate).unwrap();
    let grid = uniform_grid(rate / 2.0, d).unwrap();
    (ts, win, grid)
}

fn bench_stft(c: &mut Criterion) {
    let (ts, win, grid) = protocol(1024, 128);
    c.bench_function("stft_1024x128", |b| {
        b.iter(|| stft(&ts, &win, &grid, false).unwrap())
    });
}

fn bench_synchrosqueeze(c: &mut Criterion) {
    let (ts, win, grid) = protocol(1024, 128);
    let v_h = stft(&ts, &win, &grid, false).unwrap();
    let v_dh = stft(&ts, &win, &grid, true).unwrap();
    let map = reassign(&v_h, &v_dh, 1e-6).unwrap();
    let params = SstParams::for_grid(grid);
    c.bench_function("synchrosqueeze_1024x128", |b| {
        b.iter(|| synchrosqueeze(&v_h, &map, &params).unwrap())
    });
}

fn bench_bootstrap_bands(c: &mut Criterion) {
    let n = 512usize;
    let (ts, win, grid) = protocol(n, 96);
    let model = fit_tvar(&ts, 2, 4).unwrap();
    let spacing = grid.bin_width_hz;
    let cfg = PipelineCfg {
        win,
        grid,
        sst_alpha: (4.0 * spacing) * (4.0 * spacing),
        nu: 1e-6,
        real_part_only: false,
    };
    let nodes = |len: usize, count: usize| -> Vec<usize> {
        (0..count).map(|i| i * (len - 1) / (count - 1)).collect()
    };
    let spec = BandSpec {
        grid_times: nodes(n, 8),
        grid_freq_idx: nodes(96, 8),
        alpha_level: 0.05,
        n_boot: 40,
    };
    // Each iteration runs the full 40-replicate resampling pipeline, so a
    // small sample count keeps the suite quick without losing the
    // parallel-vs-sequential contrast.
    let mut group = c.benchmark_group("uq");
    group.sample_size(10);
    group.bench_function("bootstrap_bands_512x96_m40", |b| {
        b.iter(|| bootstrap_bands(None, &model, &spec, &cfg, 42).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_stft, bench_synchrosqueeze, bench_bootstrap_bands);
criterion_main!(benches);
