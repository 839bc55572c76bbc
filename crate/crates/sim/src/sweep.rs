//! Batch execution and the client/slot-ratio crossover study.
//!
//! Every run is independent, so batches execute data-parallel under the
//! `parallel` feature (default) and sequentially without it. The crossover
//! sweep runs paired oscar/dtls scenarios per client count with identical
//! seeds and interpolates the ratio where the oscar server energy first
//! drops below the dtls baseline.

use crate::config::{ConfigError, Mode, ScenarioConfig};
use crate::engine::run_scenario;
use crate::metrics::MetricsReport;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Runs every scenario, sequentially. Always available; the baseline the
/// benchmarks compare against.
pub fn run_batch_sequential(configs: &[ScenarioConfig]) -> Result<Vec<MetricsReport>, ConfigError> {
    configs.iter().map(run_scenario).collect()
}

/// Runs every scenario, in parallel when the `parallel` feature is on.
pub fn run_batch(configs: &[ScenarioConfig]) -> Result<Vec<MetricsReport>, ConfigError> {
    #[cfg(feature = "parallel")]
    {
        configs.par_iter().map(run_scenario).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_batch_sequential(configs)
    }
}

/// One client count of the sweep: seed-averaged server energies per mode,
/// with 95% confidence half-widths over the seeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub n_clients: u32,
    pub ratio: f64,
    pub oscar_server_j: f64,
    pub oscar_ci95_j: f64,
    pub dtls_server_j: f64,
    pub dtls_ci95_j: f64,
}

/// Sample mean and 95% confidence half-width (Student t, two-sided).
fn mean_ci95(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    // t quantiles for the seed counts in practical use.
    let t = match n - 1 {
        1 => 12.706,
        2 => 4.303,
        3 => 3.182,
        4 => 2.776,
        5 => 2.571,
        6 => 2.447,
        7 => 2.365,
        8 => 2.306,
        9 => 2.262,
        _ => 1.984,
    };
    (mean, t * (var / n as f64).sqrt())
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub points: Vec<SweepPoint>,
    /// Ratio where oscar first crosses below dtls, linearly interpolated
    /// between adjacent points; `None` when no crossing happens in range.
    pub crossover_ratio: Option<f64>,
    /// Every individual run (modes × counts × seeds), in CSV row order.
    pub reports: Vec<MetricsReport>,
}

/// Runs paired scenarios over `client_counts` × `seeds` and finds the
/// energy crossover.
pub fn sweep_crossover(
    base: &ScenarioConfig,
    client_counts: &[u32],
    seeds: &[u64],
) -> Result<SweepOutcome, ConfigError> {
    if client_counts.is_empty() {
        return Err(ConfigError::Field("clients", "sweep needs at least one client count".into()));
    }
    if seeds.is_empty() {
        return Err(ConfigError::Field("seed", "sweep needs at least one seed".into()));
    }

    let mut configs = Vec::with_capacity(client_counts.len() * seeds.len() * 2);
    for &n in client_counts {
        for mode in [Mode::Oscar, Mode::DtlsPsk] {
            for &seed in seeds {
                let mut cfg = base.clone();
                cfg.mode = mode;
                cfg.n_clients = n;
                cfg.rng_seed = seed;
                configs.push(cfg);
            }
        }
    }
    let reports = run_batch(&configs)?;

    let per_seed = seeds.len();
    let points: Vec<SweepPoint> = client_counts
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let base_idx = i * 2 * per_seed;
            let stats = |offset: usize| {
                let samples: Vec<f64> = reports[base_idx + offset..base_idx + offset + per_seed]
                    .iter()
                    .map(|r| r.server_total_j())
                    .collect();
                mean_ci95(&samples)
            };
            let (oscar_server_j, oscar_ci95_j) = stats(0);
            let (dtls_server_j, dtls_ci95_j) = stats(per_seed);
            SweepPoint {
                n_clients: n,
                ratio: n as f64 / base.max_slots as f64,
                oscar_server_j,
                oscar_ci95_j,
                dtls_server_j,
                dtls_ci95_j,
            }
        })
        .collect();

    let crossover_ratio = find_crossover(&points);
    Ok(SweepOutcome { points, crossover_ratio, reports })
}

/// First sign change of (oscar − dtls) from positive to non-positive,
/// interpolated on the ratio axis.
fn find_crossover(points: &[SweepPoint]) -> Option<f64> {
    let margin = |p: &SweepPoint| p.oscar_server_j - p.dtls_server_j;
    if let Some(first) = points.first() {
        if margin(first) <= 0.0 {
            return Some(first.ratio);
        }
    }
    for pair in points.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let (da, db) = (margin(a), margin(b));
        if da > 0.0 && db <= 0.0 {
            let t = da / (da - db);
            return Some(a.ratio + t * (b.ratio - a.ratio));
        }
    }
    None
}
