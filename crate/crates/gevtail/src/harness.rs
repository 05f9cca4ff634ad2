//! Seeded Monte Carlo experiment engine: per-elemental and combination
//! sweeps, relative efficiency, consistency-in-n studies, the
//! [-1, x_mid, 1] study, idealized-sample curves, and elemental-vs-MLE
//! scatter runs.
//!
//! Reproducibility contract: every replicate draws from its own RNG
//! stream, `stream_id + (cell_index << 40) + replicate`, and chunk
//! statistics are merged in a fixed order, so identical configs and seeds
//! give bit-identical outputs regardless of thread count.

use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::{
    gev_quantile, weibullrel_quantile, GevParams, RngSpec, WeibullRelParams,
};
use crate::error::{Error, Result};
use crate::estimator::{
    combined_estimate, order_sample, weight_vector, ElementalBattery, Family, OrderedSample,
    WeightScheme,
};
use crate::mle::{fit_mle, FitOptions, MleStatus};
use rand::distributions::Open01;
use rand::Rng;

/// Replicates per parallel work unit; fixed so the merge order (and hence
/// the output) does not depend on the thread count.
pub const SWEEP_CHUNK: usize = 4096;

/// Cell index shift inside the stream id; leaves 2^40 replicate streams
/// per grid cell.
pub const CELL_STREAM_SHIFT: u32 = 40;

/// One-pass mean/variance accumulator with an order-stable merge.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Accum {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Accum {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Accum) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let na = self.n as f64;
        let nb = other.n as f64;
        let n = na + nb;
        let delta = other.mean - self.mean;
        self.mean += delta * nb / n;
        self.m2 += other.m2 + delta * delta * na * nb / n;
        self.n += other.n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            f64::NAN
        } else {
            self.mean
        }
    }

    pub fn m2(&self) -> f64 {
        self.m2
    }

    /// Sample variance (n-1 denominator).
    pub fn sample_var(&self) -> f64 {
        if self.n < 2 {
            f64::NAN
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn sample_std(&self) -> f64 {
        self.sample_var().sqrt()
    }

    /// Mean squared error about `target`: bias^2 + m2/n.
    pub fn mse_about(&self, target: f64) -> f64 {
        if self.n == 0 {
            return f64::NAN;
        }
        let bias = self.mean - target;
        bias * bias + self.m2 / self.n as f64
    }

    pub fn rmse_about(&self, target: f64) -> f64 {
        self.mse_about(target).sqrt()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepConfig {
    pub n: usize,
    pub xi_grid: Vec<f64>,
    pub replicates: usize,
    pub schemes: Vec<WeightScheme>,
    pub family: Family,
    pub seed: RngSpec,
    pub per_elemental: bool,
}

impl SweepConfig {
    fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::config(format!("sweep needs n >= 3, got {}", self.n)));
        }
        if self.replicates < 1 {
            return Err(Error::config("replicates must be >= 1"));
        }
        if self.xi_grid.is_empty() {
            return Err(Error::config("xi grid is empty"));
        }
        if self.xi_grid.iter().any(|x| !x.is_finite()) {
            return Err(Error::config("xi grid contains a non-finite value"));
        }
        if self.schemes.is_empty() && !self.per_elemental {
            return Err(Error::config("no estimators requested"));
        }
        if self.family == Family::Gpd {
            return Err(Error::config(
                "no sampler exists for the gpd family; sweep over gev or weibull",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub xi_true: f64,
    pub n: usize,
    pub estimator: String,
    pub mean: f64,
    pub bias: f64,
    pub std: f64,
    pub rmse: f64,
    pub replicates: u64,
    pub rejected: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
}

struct CellStats {
    schemes: Vec<Accum>,
    elems: Vec<Accum>,
    rejected: u64,
}

impl CellStats {
    fn new(n_schemes: usize, n_elems: usize) -> Self {
        CellStats {
            schemes: vec![Accum::default(); n_schemes],
            elems: vec![Accum::default(); n_elems],
            rejected: 0,
        }
    }

    fn merge(&mut self, other: &CellStats) {
        for (a, b) in self.schemes.iter_mut().zip(&other.schemes) {
            a.merge(b);
        }
        for (a, b) in self.elems.iter_mut().zip(&other.elems) {
            a.merge(b);
        }
        self.rejected += other.rejected;
    }
}

fn draw_sorted(family: Family, xi: f64, n: usize, spec: RngSpec) -> Result<OrderedSample> {
    let mut r = spec.rng();
    let mut vals = Vec::with_capacity(n);
    match family {
        Family::Gev => {
            let p = GevParams::new(0.0, 1.0, xi)?;
            for _ in 0..n {
                let u: f64 = r.sample(Open01);
                vals.push(gev_quantile(u, &p).expect("Open01 draw lies in (0,1)"));
            }
        }
        Family::Weibull => {
            let p = WeibullRelParams::new(0.0, 1.0, xi)?;
            for _ in 0..n {
                let u: f64 = r.sample(Open01);
                vals.push(weibullrel_quantile(u, &p).expect("Open01 draw lies in (0,1)"));
            }
        }
        Family::Gpd => return Err(Error::config("no sampler exists for the gpd family")),
    }
    vals.sort_unstable_by(|a, b| b.partial_cmp(a).expect("samples are finite"));
    Ok(OrderedSample::from_descending_unchecked(vals))
}

fn replicate_stream(base: u64, cell: usize, rep: usize) -> u64 {
    base.wrapping_add((cell as u64) << CELL_STREAM_SHIFT)
        .wrapping_add(rep as u64)
}

fn dot_skip_zero(w: &[f64], e: &[f64]) -> f64 {
    let mut acc = 0.0;
    for k in 0..w.len() {
        if w[k] == 0.0 {
            continue;
        }
        acc += w[k] * e[k];
    }
    acc
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let battery = ElementalBattery::new(cfg.n, cfg.family)?;
    let weights: Vec<Vec<f64>> = cfg
        .schemes
        .iter()
        .map(|s| weight_vector(s, cfg.n))
        .collect::<Result<_>>()?;
    let n_elems = battery.elementals().len();

    // (cell, chunk) work units in a fixed order.
    let mut units: Vec<(usize, usize, usize)> = Vec::new();
    for ci in 0..cfg.xi_grid.len() {
        let mut start = 0;
        while start < cfg.replicates {
            let len = SWEEP_CHUNK.min(cfg.replicates - start);
            units.push((ci, start, len));
            start += len;
        }
    }

    let per_elem = cfg.per_elemental;
    let chunk_stats: Vec<(usize, CellStats)> = units
        .par_iter()
        .map(|&(ci, start, len)| {
            let xi = cfg.xi_grid[ci];
            let mut stats = CellStats::new(weights.len(), if per_elem { n_elems } else { 0 });
            let mut ests = Vec::with_capacity(n_elems);
            for rep in start..start + len {
                let spec = RngSpec::new(cfg.seed.seed, replicate_stream(cfg.seed.stream_id, ci, rep));
                let s = draw_sorted(cfg.family, xi, cfg.n, spec).expect("validated config");
                match battery.estimates_into(&s, &mut ests) {
                    Ok(()) => {}
                    Err(Error::DegenerateSpacing { .. }) => {
                        stats.rejected += 1;
                        continue;
                    }
                    Err(e) => panic!("unexpected estimator failure: {e}"),
                }
                for (si, w) in weights.iter().enumerate() {
                    stats.schemes[si].push(dot_skip_zero(w, &ests));
                }
                if per_elem {
                    for (k, &v) in ests.iter().enumerate() {
                        stats.elems[k].push(v);
                    }
                }
            }
            (ci, stats)
        })
        .collect();

    let mut cells: Vec<CellStats> = (0..cfg.xi_grid.len())
        .map(|_| CellStats::new(weights.len(), if per_elem { n_elems } else { 0 }))
        .collect();
    for (ci, stats) in &chunk_stats {
        cells[*ci].merge(stats);
    }

    let mut rows = Vec::new();
    for (ci, &xi) in cfg.xi_grid.iter().enumerate() {
        let cell = &cells[ci];
        for (si, scheme) in cfg.schemes.iter().enumerate() {
            rows.push(stat_row(&cell.schemes[si], xi, cfg, scheme.name().to_string(), cell.rejected));
        }
        if per_elem {
            for (k, e) in battery.elementals().iter().enumerate() {
                rows.push(stat_row(
                    &cell.elems[k],
                    xi,
                    cfg,
                    format!("elem({};{})", e.i, e.j),
                    cell.rejected,
                ));
            }
        }
    }
    Ok(SweepResult {
        config: cfg.clone(),
        rows,
    })
}

fn stat_row(a: &Accum, xi: f64, cfg: &SweepConfig, estimator: String, rejected: u64) -> SweepRow {
    SweepRow {
        xi_true: xi,
        n: cfg.n,
        estimator,
        mean: a.mean(),
        bias: a.mean() - xi,
        std: a.sample_std(),
        rmse: a.rmse_about(xi),
        replicates: a.count(),
        rejected,
        seed: cfg.seed.seed,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EfficiencyRow {
    pub xi_true: f64,
    pub n: usize,
    pub estimator: String,
    pub rmse_ratio: f64,
}

/// Per-cell RMSE ratio of `a` against baseline `b`. Rows are matched by
/// (xi, n, estimator) when `b` has the same estimator, otherwise `b` must
/// carry exactly one estimator for the cell.
pub fn relative_efficiency(a: &SweepResult, b: &SweepResult) -> Result<Vec<EfficiencyRow>> {
    use std::collections::HashMap;
    let mut exact: HashMap<(u64, usize, &str), f64> = HashMap::new();
    let mut per_cell: HashMap<(u64, usize), Vec<f64>> = HashMap::new();
    for row in &b.rows {
        exact.insert((row.xi_true.to_bits(), row.n, row.estimator.as_str()), row.rmse);
        per_cell
            .entry((row.xi_true.to_bits(), row.n))
            .or_default()
            .push(row.rmse);
    }
    let mut out = Vec::with_capacity(a.rows.len());
    for row in &a.rows {
        let cell_key = (row.xi_true.to_bits(), row.n);
        let base = match exact.get(&(cell_key.0, cell_key.1, row.estimator.as_str())) {
            Some(&r) => r,
            None => match per_cell.get(&cell_key) {
                Some(v) if v.len() == 1 => v[0],
                Some(_) => {
                    return Err(Error::config(format!(
                        "baseline is ambiguous for cell (xi={}, n={}): several estimators, \
                         none matching '{}'",
                        row.xi_true, row.n, row.estimator
                    )))
                }
                None => {
                    return Err(Error::config(format!(
                        "baseline grid is missing cell (xi={}, n={})",
                        row.xi_true, row.n
                    )))
                }
            },
        };
        out.push(EfficiencyRow {
            xi_true: row.xi_true,
            n: row.n,
            estimator: row.estimator.clone(),
            rmse_ratio: row.rmse / base,
        });
    }
    Ok(out)
}

/// Plotting abscissa for consistency curves.
pub fn consistency_abscissa(n: usize) -> f64 {
    1.0 - (2.0 / n as f64).sqrt()
}

#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyRow {
    pub n: usize,
    pub xi_true: f64,
    pub rmse: f64,
    pub abscissa: f64,
    pub replicates: u64,
    pub rejected: u64,
}

/// RMSE of one scheme across sample sizes; each n gets its own stream
/// block so cells never share draws.
pub fn run_consistency(
    n_list: &[usize],
    xi_list: &[f64],
    replicates: usize,
    scheme: &WeightScheme,
    seed: RngSpec,
) -> Result<Vec<ConsistencyRow>> {
    if n_list.is_empty() {
        return Err(Error::config("n list is empty"));
    }
    for &n in n_list {
        if n < 3 {
            return Err(Error::config(format!("consistency needs n >= 3, got {n}")));
        }
    }
    let mut rows = Vec::new();
    for (ni, &n) in n_list.iter().enumerate() {
        let cfg = SweepConfig {
            n,
            xi_grid: xi_list.to_vec(),
            replicates,
            schemes: vec![scheme.clone()],
            family: Family::Gev,
            seed: RngSpec::new(seed.seed, seed.stream_id.wrapping_add((ni as u64) << 52)),
            per_elemental: false,
        };
        let result = run_sweep(&cfg)?;
        for row in result.rows {
            rows.push(ConsistencyRow {
                n,
                xi_true: row.xi_true,
                rmse: row.rmse,
                abscissa: consistency_abscissa(n),
                replicates: row.replicates,
                rejected: row.rejected,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct MidpointRow {
    pub x_mid: f64,
    pub estimate: f64,
    pub mle_xi: Option<f64>,
    pub mle_status: Option<MleStatus>,
}

/// The [-1, x_mid, 1] study: the single elemental estimate as the middle
/// point moves, optionally with an MLE fit alongside.
pub fn run_midpoint_study(grid: &[f64], with_mle: bool) -> Result<Vec<MidpointRow>> {
    if grid.is_empty() {
        return Err(Error::config("midpoint grid is empty"));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for &x in grid {
        if !x.is_finite() || x.abs() > 1.0 {
            return Err(Error::config(format!(
                "midpoint x_mid={x} lies outside (-1, 1)"
            )));
        }
        // x = +-1 falls through: the tied sample raises the degenerate
        // spacing error itself.
        let s = order_sample(&[1.0, x, -1.0])?;
        let estimate = combined_estimate(&s, &WeightScheme::Equal, Family::Gev)?;
        let (mle_xi, mle_status) = if with_mle {
            let fit = fit_mle(&s, &FitOptions::default())?;
            (Some(fit.params.xi()), Some(fit.status))
        } else {
            (None, None)
        };
        rows.push(MidpointRow {
            x_mid: x,
            estimate,
            mle_xi,
            mle_status,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct IdealizedRow {
    pub n: usize,
    pub xi_nominal: f64,
    pub estimate: f64,
}

/// Equal-weight estimate on deterministic samples at uniformly spaced
/// midpoint quantiles, per (n, nominal xi).
pub fn run_idealized_study(n_list: &[usize], xi_grid: &[f64]) -> Result<Vec<IdealizedRow>> {
    if n_list.is_empty() || xi_grid.is_empty() {
        return Err(Error::config("idealized study needs a nonempty n list and xi grid"));
    }
    let mut rows = Vec::with_capacity(n_list.len() * xi_grid.len());
    for &n in n_list {
        for &xi in xi_grid {
            let p = GevParams::new(0.0, 1.0, xi)?;
            let s = crate::distributions::idealized_sample(&p, n)?;
            let estimate = combined_estimate(&s, &WeightScheme::Equal, Family::Gev)?;
            rows.push(IdealizedRow {
                n,
                xi_nominal: xi,
                estimate,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareConfig {
    pub n: usize,
    pub replicates: usize,
    pub xi_min: f64,
    pub xi_max: f64,
    pub scheme: WeightScheme,
    pub seed: RngSpec,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        let opts = FitOptions::default();
        CompareConfig {
            n: 7,
            replicates: 10_000,
            xi_min: -10.0,
            xi_max: 10.0,
            scheme: WeightScheme::Equal,
            seed: RngSpec::new(0, 0),
            max_iter: opts.max_iter,
            tol: opts.tol,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub replicate: u64,
    pub xi_true: f64,
    pub elemental: f64,
    pub mle_xi: f64,
    pub mle_negloglik: f64,
    pub mle_status: MleStatus,
    pub mle_iterations: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareResult {
    pub config: CompareConfig,
    pub rejected: u64,
    pub rows: Vec<CompareRow>,
}

/// Per-replicate elemental-vs-MLE scatter with xi_true drawn uniformly
/// from [xi_min, xi_max). MLE failures are recorded in the row, never
/// raised.
pub fn compare_mle(cfg: &CompareConfig) -> Result<CompareResult> {
    if cfg.n < 3 {
        return Err(Error::config(format!("comparison needs n >= 3, got {}", cfg.n)));
    }
    if cfg.replicates < 1 {
        return Err(Error::config("replicates must be >= 1"));
    }
    if !(cfg.xi_min.is_finite() && cfg.xi_max.is_finite() && cfg.xi_min < cfg.xi_max) {
        return Err(Error::config(format!(
            "invalid xi range [{}, {}]",
            cfg.xi_min, cfg.xi_max
        )));
    }
    let battery = ElementalBattery::new(cfg.n, Family::Gev)?;
    let weights = weight_vector(&cfg.scheme, cfg.n)?;
    let opts = FitOptions {
        max_iter: cfg.max_iter,
        tol: cfg.tol,
        ..FitOptions::default()
    };

    let mut units: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    while start < cfg.replicates {
        let len = SWEEP_CHUNK.min(cfg.replicates - start);
        units.push((start, len));
        start += len;
    }

    let chunks: Vec<(Vec<CompareRow>, u64)> = units
        .par_iter()
        .map(|&(start, len)| {
            let mut rows = Vec::with_capacity(len);
            let mut rejected = 0_u64;
            for rep in start..start + len {
                let spec = RngSpec::new(cfg.seed.seed, replicate_stream(cfg.seed.stream_id, 0, rep));
                let mut r = spec.rng();
                let u: f64 = r.sample(Open01);
                let xi_true = cfg.xi_min + u * (cfg.xi_max - cfg.xi_min);
                let p = GevParams::new(0.0, 1.0, xi_true).expect("validated range");
                let mut vals = Vec::with_capacity(cfg.n);
                for _ in 0..cfg.n {
                    let u: f64 = r.sample(Open01);
                    vals.push(gev_quantile(u, &p).expect("Open01 draw lies in (0,1)"));
                }
                vals.sort_unstable_by(|a, b| b.partial_cmp(a).expect("samples are finite"));
                let s = OrderedSample::from_descending_unchecked(vals);
                let elemental = match battery.combined(&s, &weights, false) {
                    Ok(v) => v,
                    Err(Error::DegenerateSpacing { .. }) => {
                        rejected += 1;
                        continue;
                    }
                    Err(e) => panic!("unexpected estimator failure: {e}"),
                };
                let fit = fit_mle(&s, &opts).expect("n >= 3 checked");
                rows.push(CompareRow {
                    replicate: rep as u64,
                    xi_true,
                    elemental,
                    mle_xi: fit.params.xi(),
                    mle_negloglik: fit.negloglik,
                    mle_status: fit.status,
                    mle_iterations: fit.iterations as u64,
                });
            }
            (rows, rejected)
        })
        .collect();

    let mut rows = Vec::with_capacity(cfg.replicates);
    let mut rejected = 0;
    for (chunk_rows, chunk_rejected) in chunks {
        rows.extend(chunk_rows);
        rejected += chunk_rejected;
    }
    Ok(CompareResult {
        config: cfg.clone(),
        rejected,
        rows,
    })
}
