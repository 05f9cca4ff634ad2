//! Maximum-likelihood baseline: GEV negative log-likelihood and a
//! derivative-free simplex fit over (mu, log sigma, xi).
//!
//! Deliberately plain. The point of the baseline is to reproduce the
//! known ML pathologies honestly (the likelihood is unbounded along the
//! boundary surface 1 + xi (x_max - mu)/sigma = 0), not to hide them: a
//! fit that drifts toward that boundary is reported as `BoundarySuspect`,
//! never as converged.

use serde::Serialize;

use crate::distributions::{GevParams, XI_ZERO_EPS};
use crate::error::{Error, Result};
use crate::estimator::{combined_estimate, Family, OrderedSample, WeightScheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MleStatus {
    Converged,
    MaxIter,
    BoundarySuspect,
    Failed,
}

impl MleStatus {
    pub fn name(self) -> &'static str {
        match self {
            MleStatus::Converged => "converged",
            MleStatus::MaxIter => "max_iter",
            MleStatus::BoundarySuspect => "boundary_suspect",
            MleStatus::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MleResult {
    pub params: GevParams,
    pub negloglik: f64,
    pub status: MleStatus,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub enum Init {
    /// xi from the equal-weight elemental combination, mu from the sample
    /// median, sigma from the interquartile range.
    Elemental,
    /// Gumbel moment matching: sigma = std sqrt(6)/pi, mu = mean - gamma
    /// sigma, xi = 0.
    Moments,
    Explicit(GevParams),
}

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub max_iter: usize,
    pub tol: f64,
    pub init: Init,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iter: 500,
            tol: 1e-9,
            init: Init::Elemental,
        }
    }
}

/// Negative log-likelihood of the sample under p; +inf when any point
/// falls outside the support.
pub fn gev_negloglik(p: &GevParams, s: &OrderedSample) -> f64 {
    nll_raw(p.mu(), p.sigma(), p.xi(), s.values())
}

fn nll_raw(mu: f64, sigma: f64, xi: f64, xs: &[f64]) -> f64 {
    if !mu.is_finite() || !sigma.is_finite() || !xi.is_finite() || sigma <= 0.0 {
        return f64::INFINITY;
    }
    let ln_sigma = sigma.ln();
    let mut acc = 0.0;
    if xi.abs() < XI_ZERO_EPS {
        for &x in xs {
            let z = (x - mu) / sigma;
            acc += ln_sigma + z + (-z).exp();
        }
    } else {
        for &x in xs {
            let z = (x - mu) / sigma;
            let s1 = 1.0 + xi * z;
            if !(s1 > 0.0) || !s1.is_finite() {
                return f64::INFINITY;
            }
            let ln_s1 = s1.ln();
            acc += ln_sigma + (1.0 + 1.0 / xi) * ln_s1 + (-ln_s1 / xi).exp();
        }
    }
    if acc.is_nan() {
        f64::INFINITY
    } else {
        acc
    }
}

fn percentile(sorted_desc: &[f64], q: f64) -> f64 {
    // Linear interpolation on the ascending order statistics.
    let n = sorted_desc.len();
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    let asc = |k: usize| sorted_desc[n - 1 - k];
    asc(lo) + frac * (asc(hi) - asc(lo))
}

// IQR of a unit Gumbel: ln(ln 4) - ln(ln(4/3)) =~ 1.5725.
const GUMBEL_IQR: f64 = 1.572_534_533_557_158;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn initial_point(s: &OrderedSample, init: Init) -> (f64, f64, f64) {
    match init {
        Init::Explicit(p) => (p.mu(), p.sigma().ln(), p.xi()),
        Init::Moments => {
            let n = s.n() as f64;
            let mean = s.values().iter().sum::<f64>() / n;
            let var = s
                .values()
                .iter()
                .map(|&x| (x - mean) * (x - mean))
                .sum::<f64>()
                / (n - 1.0);
            let sigma = (var.sqrt() * 6.0_f64.sqrt() / std::f64::consts::PI).max(1e-12);
            (mean - EULER_GAMMA * sigma, sigma.ln(), 0.0)
        }
        Init::Elemental => {
            let xi0 = combined_estimate(s, &WeightScheme::Equal, Family::Gev).unwrap_or(0.0);
            let mu0 = percentile(s.values(), 0.5);
            let iqr = percentile(s.values(), 0.75) - percentile(s.values(), 0.25);
            let sigma0 = (iqr / GUMBEL_IQR).max(1e-12);
            (mu0, sigma0.ln(), xi0)
        }
    }
}

/// Fits (mu, sigma, xi) by Nelder-Mead on (mu, log sigma, xi).
pub fn fit_mle(s: &OrderedSample, opts: &FitOptions) -> Result<MleResult> {
    if s.n() < 3 {
        return Err(Error::domain(format!("MLE fit needs n >= 3, got {}", s.n())));
    }
    let xs = s.values();
    let f = |v: &[f64; 3]| nll_raw(v[0], v[1].exp(), v[2], xs);

    let (mu0, ln_sigma0, xi0) = initial_point(s, opts.init);
    let mut v0 = [mu0, ln_sigma0, xi0];
    let f_init = {
        // Degenerate starts (e.g. xi0 deep in infeasible territory) get
        // pulled toward a flat Gumbel before giving up.
        let mut tries = 0;
        loop {
            let fv = f(&v0);
            if fv.is_finite() || tries >= 60 {
                break fv;
            }
            v0[1] += std::f64::consts::LN_2;
            v0[2] *= 0.5;
            tries += 1;
        }
    };
    if !f_init.is_finite() {
        return Ok(MleResult {
            params: GevParams::new(v0[0], v0[1].exp().max(1e-300), v0[2])?,
            negloglik: f_init,
            status: MleStatus::Failed,
            iterations: 0,
        });
    }

    // Standard simplex moves: reflect 1, expand 2, contract 1/2, shrink 1/2.
    let steps = [0.1 * v0[1].exp().max(1e-6), 0.25, 0.25];
    let mut pts: Vec<[f64; 3]> = vec![v0];
    for d in 0..3 {
        let mut p = v0;
        p[d] += steps[d];
        pts.push(p);
    }
    let mut fv: Vec<f64> = pts.iter().map(|p| f(p)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        let mut order: Vec<usize> = (0..4).collect();
        order.sort_by(|&a, &b| fv[a].partial_cmp(&fv[b]).expect("nll is never NaN"));
        let best = order[0];
        let worst = order[3];
        let second_worst = order[2];

        if fv[worst] - fv[best] <= opts.tol * (fv[best].abs() + opts.tol) {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = [0.0_f64; 3];
        for &k in &order[..3] {
            for d in 0..3 {
                centroid[d] += pts[k][d] / 3.0;
            }
        }
        let reflect = |c: &[f64; 3], w: &[f64; 3], coef: f64| {
            let mut p = [0.0; 3];
            for d in 0..3 {
                p[d] = c[d] + coef * (c[d] - w[d]);
            }
            p
        };

        let xr = reflect(&centroid, &pts[worst], 1.0);
        let fr = f(&xr);
        if fr < fv[best] {
            let xe = reflect(&centroid, &pts[worst], 2.0);
            let fe = f(&xe);
            if fe < fr {
                pts[worst] = xe;
                fv[worst] = fe;
            } else {
                pts[worst] = xr;
                fv[worst] = fr;
            }
        } else if fr < fv[second_worst] {
            pts[worst] = xr;
            fv[worst] = fr;
        } else {
            let (xc, fc) = if fr < fv[worst] {
                let p = reflect(&centroid, &pts[worst], 0.5);
                let fp = f(&p);
                (p, fp)
            } else {
                let p = reflect(&centroid, &pts[worst], -0.5);
                let fp = f(&p);
                (p, fp)
            };
            if fc < fv[worst].min(fr) {
                pts[worst] = xc;
                fv[worst] = fc;
            } else {
                for k in 0..4 {
                    if k == best {
                        continue;
                    }
                    for d in 0..3 {
                        pts[k][d] = pts[best][d] + 0.5 * (pts[k][d] - pts[best][d]);
                    }
                    fv[k] = f(&pts[k]);
                }
            }
        }
    }

    let best = (0..4)
        .min_by(|&a, &b| fv[a].partial_cmp(&fv[b]).expect("nll is never NaN"))
        .expect("nonempty simplex");
    let (mu, sigma, xi) = (pts[best][0], pts[best][1].exp().max(1e-300), pts[best][2]);
    let nll = fv[best];
    if !mu.is_finite() || !sigma.is_finite() || !xi.is_finite() {
        return Ok(MleResult {
            params: GevParams::new(mu0, ln_sigma0.exp().max(1e-300), xi0)?,
            negloglik: f64::INFINITY,
            status: MleStatus::Failed,
            iterations,
        });
    }

    let range = xs[0] - xs[xs.len() - 1];
    let boundary = {
        let sigma_collapsed = sigma < 1e-8 * range.max(f64::MIN_POSITIVE);
        let support_margin = if xi.abs() < XI_ZERO_EPS {
            1.0
        } else {
            let extreme = if xi < 0.0 { xs[0] } else { xs[xs.len() - 1] };
            1.0 + xi * (extreme - mu) / sigma
        };
        sigma_collapsed || support_margin < 1e-10
    };

    let status = if boundary {
        MleStatus::BoundarySuspect
    } else if converged {
        MleStatus::Converged
    } else {
        MleStatus::MaxIter
    };

    Ok(MleResult {
        params: GevParams::new(mu, sigma, xi)?,
        negloglik: nll,
        status,
        iterations,
    })
}
