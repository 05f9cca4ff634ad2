//! GEV and reflected-Weibull distribution functions, quantiles, sampling,
//! and the idealized uniformly-spaced-F sample construction.

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimator::OrderedSample;

/// |xi| below this uses the Gumbel branch; the general branch would
/// divide a cancellation-prone expm1 by a near-zero xi.
pub const XI_ZERO_EPS: f64 = 1e-9;

/// Name of the generator backing all sampling, recorded in run metadata.
pub const GENERATOR: &str = "chacha8";

/// GEV parameters (mu, sigma, xi). F(x) = exp(-(1 + xi z)^(-1/xi)) with
/// z = (x - mu)/sigma, reading the xi = 0 case as its limit exp(-e^-z).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GevParams {
    mu: f64,
    sigma: f64,
    xi: f64,
}

impl GevParams {
    pub fn new(mu: f64, sigma: f64, xi: f64) -> Result<Self> {
        if !mu.is_finite() || !sigma.is_finite() || !xi.is_finite() {
            return Err(Error::domain("GEV parameters must be finite"));
        }
        if sigma <= 0.0 {
            return Err(Error::domain(format!("sigma must be positive, got {sigma}")));
        }
        Ok(GevParams { mu, sigma, xi })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }
}

/// Reflected-Weibull parameters (mu, sigma, zeta):
/// F(x) = 1 - exp(-(1 - zeta z)^(-1/zeta)), zeta = 0 read as its limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeibullRelParams {
    mu: f64,
    sigma: f64,
    zeta: f64,
}

impl WeibullRelParams {
    pub fn new(mu: f64, sigma: f64, zeta: f64) -> Result<Self> {
        if !mu.is_finite() || !sigma.is_finite() || !zeta.is_finite() {
            return Err(Error::domain("parameters must be finite"));
        }
        if sigma <= 0.0 {
            return Err(Error::domain(format!("sigma must be positive, got {sigma}")));
        }
        Ok(WeibullRelParams { mu, sigma, zeta })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }
}

/// Seed plus stream id; the same pair reproduces the same draws on every
/// platform. Streams are independent, so parallel work units each get
/// their own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RngSpec {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngSpec {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngSpec { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

pub fn gev_cdf(x: f64, p: &GevParams) -> f64 {
    let z = (x - p.mu) / p.sigma;
    if p.xi.abs() < XI_ZERO_EPS {
        (-(-z).exp()).exp()
    } else {
        let s = 1.0 + p.xi * z;
        if s <= 0.0 {
            // Outside the support: below it for xi > 0, above it for xi < 0.
            return if p.xi > 0.0 { 0.0 } else { 1.0 };
        }
        // (1 + xi z)^(-1/xi) = exp(-ln(s)/xi)
        (-(-s.ln() / p.xi).exp()).exp()
    }
}

pub fn gev_quantile(prob: f64, p: &GevParams) -> Result<f64> {
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::domain(format!(
            "quantile probability must lie in (0,1), got {prob}"
        )));
    }
    let w = (-prob.ln()).ln();
    if p.xi.abs() < XI_ZERO_EPS {
        Ok(p.mu - p.sigma * w)
    } else {
        // ((-ln F)^(-xi) - 1)/xi, written with expm1 for small exponents.
        Ok(p.mu + p.sigma * (-p.xi * w).exp_m1() / p.xi)
    }
}

/// `count` independent draws by the probability integral transform, with
/// uniforms on the open interval so every quantile is finite.
pub fn sample_gev(p: &GevParams, count: usize, rng: RngSpec) -> Vec<f64> {
    let mut r = rng.rng();
    (0..count)
        .map(|_| {
            let u: f64 = r.sample(Open01);
            gev_quantile(u, p).expect("Open01 draw lies in (0,1)")
        })
        .collect()
}

/// Deterministic sample at the quantiles of the n midpoints (k - 1/2)/n,
/// ordered descending.
pub fn idealized_sample(p: &GevParams, n: usize) -> Result<OrderedSample> {
    if n < 3 {
        return Err(Error::domain(format!("idealized sample needs n >= 3, got {n}")));
    }
    let mut values = Vec::with_capacity(n);
    for k in (1..=n).rev() {
        let f = (k as f64 - 0.5) / n as f64;
        values.push(gev_quantile(f, p)?);
    }
    OrderedSample::from_descending(values)
}

pub fn weibullrel_cdf(x: f64, p: &WeibullRelParams) -> f64 {
    let z = (x - p.mu) / p.sigma;
    if p.zeta.abs() < XI_ZERO_EPS {
        -(-(z.exp())).exp_m1()
    } else {
        let s = 1.0 - p.zeta * z;
        if s <= 0.0 {
            return if p.zeta > 0.0 { 1.0 } else { 0.0 };
        }
        -(-(-s.ln() / p.zeta).exp()).exp_m1()
    }
}

pub fn weibullrel_quantile(prob: f64, p: &WeibullRelParams) -> Result<f64> {
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::domain(format!(
            "quantile probability must lie in (0,1), got {prob}"
        )));
    }
    // y = -ln(1 - prob)
    let y = -(-prob).ln_1p();
    if p.zeta.abs() < XI_ZERO_EPS {
        Ok(p.mu + p.sigma * y.ln())
    } else {
        Ok(p.mu - p.sigma * (-p.zeta * y.ln()).exp_m1() / p.zeta)
    }
}

pub fn sample_weibullrel(p: &WeibullRelParams, count: usize, rng: RngSpec) -> Vec<f64> {
    let mut r = rng.rng();
    (0..count)
        .map(|_| {
            let u: f64 = r.sample(Open01);
            weibullrel_quantile(u, p).expect("Open01 draw lies in (0,1)")
        })
        .collect()
}
