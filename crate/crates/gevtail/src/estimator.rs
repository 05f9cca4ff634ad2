//! Elemental tail-parameter estimates and their unit-sum combinations.
//!
//! An elemental picks two non-adjacent order statistics X_I > X_J
//! (J >= I+2) of a descending-ordered sample, forms the spacing ratios
//!
//! ```text
//! tau = (X_I - X_{J-1}) / (X_I - X_J)
//! t   = (X_{I+1} - X_J) / (X_I - X_J)
//! ```
//!
//! and returns `a log tau - b log t` with (a, b) taken from the family's
//! coefficient set. A sample of size n carries (n-1)(n-2)/2 elementals,
//! which can be averaged under several unit-sum weighting schemes.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::coefficients::{cached_table, gpd_coefficients};
use crate::error::{Error, Result};

/// A real sample ordered descending: values[0] is the maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedSample {
    values: Vec<f64>,
}

/// Sorts a raw sample descending. Rejects empty input and non-finite
/// values; duplicates are preserved (stable sort).
pub fn order_sample(raw: &[f64]) -> Result<OrderedSample> {
    if raw.is_empty() {
        return Err(Error::input("empty sample"));
    }
    for (k, &v) in raw.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::input(format!(
                "sample value #{} is not finite ({v})",
                k + 1
            )));
        }
    }
    let mut values = raw.to_vec();
    values.sort_by(|a, b| b.partial_cmp(a).expect("finite values compare"));
    Ok(OrderedSample { values })
}

impl OrderedSample {
    /// Accepts a vector already ordered descending.
    pub fn from_descending(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::input("empty sample"));
        }
        for (k, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::input(format!(
                    "sample value #{} is not finite ({v})",
                    k + 1
                )));
            }
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::input("values are not ordered descending"));
        }
        Ok(OrderedSample { values })
    }

    pub(crate) fn from_descending_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0] >= w[1]));
        OrderedSample { values }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// 1-based order statistic: x(1) is the maximum, x(n) the minimum.
    pub fn x(&self, k: usize) -> f64 {
        self.values[k - 1]
    }
}

/// A valid elemental index (I, J, N) with 1 <= I and I+2 <= J <= N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ElementalIndex {
    pub i: usize,
    pub j: usize,
    pub n: usize,
}

impl ElementalIndex {
    pub fn new(i: usize, j: usize, n: usize) -> Result<Self> {
        if i < 1 || j < i + 2 || j > n {
            return Err(Error::domain(format!(
                "invalid elemental index (i={i}, j={j}, n={n}): need 1 <= i and i+2 <= j <= n"
            )));
        }
        Ok(ElementalIndex { i, j, n })
    }
}

impl fmt::Display for ElementalIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(i={}, j={}, n={})", self.i, self.j, self.n)
    }
}

/// The two spacing ratios of an elemental, each in (0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpacingRatios {
    pub tau: f64,
    pub t: f64,
}

/// Computes (tau, t). Any tie among the four involved order statistics is
/// a hard degenerate-spacing error: a zero ratio has no finite log, and a
/// zero outer spacing has no ratios at all.
pub fn spacing_ratios(s: &OrderedSample, e: ElementalIndex) -> Result<SpacingRatios> {
    if e.n != s.n() {
        return Err(Error::domain(format!(
            "elemental index {e} does not match sample size n={}",
            s.n()
        )));
    }
    let xi = s.x(e.i);
    let xj = s.x(e.j);
    let outer = xi - xj;
    if outer == 0.0 {
        return Err(Error::DegenerateSpacing {
            i: e.i,
            j: e.j,
            what: "outer spacing X_I - X_J is zero",
        });
    }
    let tau = (xi - s.x(e.j - 1)) / outer;
    let t = (s.x(e.i + 1) - xj) / outer;
    if tau == 0.0 {
        return Err(Error::DegenerateSpacing {
            i: e.i,
            j: e.j,
            what: "tau = 0 (X_I tied with X_{J-1})",
        });
    }
    if t == 0.0 {
        return Err(Error::DegenerateSpacing {
            i: e.i,
            j: e.j,
            what: "t = 0 (X_{I+1} tied with X_J)",
        });
    }
    Ok(SpacingRatios { tau, t })
}

/// Which coefficient set feeds the elemental form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Gev,
    Gpd,
    Weibull,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Gev => "gev",
            Family::Gpd => "gpd",
            Family::Weibull => "weibull",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        match s {
            "gev" => Ok(Family::Gev),
            "gpd" => Ok(Family::Gpd),
            "weibull" => Ok(Family::Weibull),
            other => Err(Error::config(format!(
                "unknown family '{other}' (expected gev|gpd|weibull)"
            ))),
        }
    }
}

fn family_coefficients(family: Family, e: ElementalIndex) -> Result<(f64, f64)> {
    match family {
        Family::Gev => {
            let table = cached_table(e.n)?;
            Ok((table.a(e.j)?, table.b(e.i)?))
        }
        Family::Gpd => gpd_coefficients(e.i, e.j),
        Family::Weibull => {
            // Same values as weibull_coefficients, off the shared table.
            let table = cached_table(e.n)?;
            Ok((-table.b(e.n + 1 - e.j)?, -table.a(e.n + 1 - e.i)?))
        }
    }
}

/// One elemental estimate `a log tau - b log t`.
pub fn elemental_estimate(s: &OrderedSample, e: ElementalIndex, family: Family) -> Result<f64> {
    let r = spacing_ratios(s, e)?;
    let (a, b) = family_coefficients(family, e)?;
    Ok(a * r.tau.ln() - b * r.t.ln())
}

/// All elemental indices for sample size n, lexicographic in (i, j).
pub fn enumerate_elementals(n: usize) -> Result<Vec<ElementalIndex>> {
    if n < 3 {
        return Err(Error::domain(format!(
            "no elementals exist for n={n}: need n >= 3"
        )));
    }
    let mut out = Vec::with_capacity((n - 1) * (n - 2) / 2);
    for i in 1..=n - 2 {
        for j in i + 2..=n {
            out.push(ElementalIndex { i, j, n });
        }
    }
    Ok(out)
}

/// Unit-sum weighting schemes over the elementals of a sample.
///
/// The named schemes weight elemental (I, J) proportionally to 1, N-J+1,
/// J-1-I, I, or a pairwise sum of the last three. `Custom` carries raw
/// nonnegative weights keyed by (i, j); pairs not listed get weight 0.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightScheme {
    Equal,
    Nj1,
    Jmi,
    I,
    Nj1PlusJmi,
    JmiPlusI,
    Nj1PlusI,
    Custom(Vec<(usize, usize, f64)>),
}

/// The seven named schemes, in presentation order.
pub const NAMED_SCHEMES: [WeightScheme; 7] = [
    WeightScheme::Equal,
    WeightScheme::Nj1,
    WeightScheme::Jmi,
    WeightScheme::I,
    WeightScheme::Nj1PlusJmi,
    WeightScheme::JmiPlusI,
    WeightScheme::Nj1PlusI,
];

impl WeightScheme {
    pub fn name(&self) -> &'static str {
        match self {
            WeightScheme::Equal => "equal",
            WeightScheme::Nj1 => "nj1",
            WeightScheme::Jmi => "jmi",
            WeightScheme::I => "i",
            WeightScheme::Nj1PlusJmi => "nj1+jmi",
            WeightScheme::JmiPlusI => "jmi+i",
            WeightScheme::Nj1PlusI => "nj1+i",
            WeightScheme::Custom(_) => "custom",
        }
    }

    fn raw_weight(&self, e: ElementalIndex) -> f64 {
        let nj1 = (e.n - e.j + 1) as f64;
        let jmi = (e.j - 1 - e.i) as f64;
        let i = e.i as f64;
        match self {
            WeightScheme::Equal => 1.0,
            WeightScheme::Nj1 => nj1,
            WeightScheme::Jmi => jmi,
            WeightScheme::I => i,
            WeightScheme::Nj1PlusJmi => nj1 + jmi,
            WeightScheme::JmiPlusI => jmi + i,
            WeightScheme::Nj1PlusI => nj1 + i,
            WeightScheme::Custom(_) => unreachable!("custom handled separately"),
        }
    }
}

impl Serialize for WeightScheme {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl FromStr for WeightScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<WeightScheme> {
        match s {
            "equal" => Ok(WeightScheme::Equal),
            "nj1" => Ok(WeightScheme::Nj1),
            "jmi" => Ok(WeightScheme::Jmi),
            "i" => Ok(WeightScheme::I),
            "nj1+jmi" => Ok(WeightScheme::Nj1PlusJmi),
            "jmi+i" => Ok(WeightScheme::JmiPlusI),
            "nj1+i" => Ok(WeightScheme::Nj1PlusI),
            other => Err(Error::config(format!(
                "unknown weight scheme '{other}' \
                 (expected equal|nj1|jmi|i|nj1+jmi|jmi+i|nj1+i)"
            ))),
        }
    }
}

/// Normalized weights aligned with `enumerate_elementals(n)` order.
pub fn weight_vector(scheme: &WeightScheme, n: usize) -> Result<Vec<f64>> {
    let els = enumerate_elementals(n)?;
    let raw: Vec<f64> = match scheme {
        WeightScheme::Custom(list) => {
            let mut map: HashMap<(usize, usize), f64> = HashMap::new();
            for &(i, j, w) in list {
                ElementalIndex::new(i, j, n).map_err(|_| {
                    Error::config(format!(
                        "custom weight entry (i={i}, j={j}) is not a valid elemental for n={n}"
                    ))
                })?;
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::config(format!(
                        "custom weight for (i={i}, j={j}) must be finite and nonnegative, got {w}"
                    )));
                }
                if map.insert((i, j), w).is_some() {
                    return Err(Error::config(format!(
                        "duplicate custom weight entry for (i={i}, j={j})"
                    )));
                }
            }
            els.iter()
                .map(|e| map.get(&(e.i, e.j)).copied().unwrap_or(0.0))
                .collect()
        }
        named => els.iter().map(|&e| named.raw_weight(e)).collect(),
    };
    let sum: f64 = raw.iter().sum();
    if sum <= 0.0 {
        return Err(Error::config("weights are all zero"));
    }
    Ok(raw.into_iter().map(|w| w / sum).collect())
}

/// Normalized weights keyed by elemental index.
pub fn combination_weights(
    scheme: &WeightScheme,
    n: usize,
) -> Result<Vec<(ElementalIndex, f64)>> {
    let els = enumerate_elementals(n)?;
    let w = weight_vector(scheme, n)?;
    Ok(els.into_iter().zip(w).collect())
}

/// Precomputed elemental indices and family coefficients for one sample
/// size, reusable across many samples.
#[derive(Debug, Clone)]
pub struct ElementalBattery {
    n: usize,
    family: Family,
    els: Vec<ElementalIndex>,
    coef: Vec<(f64, f64)>,
}

impl ElementalBattery {
    pub fn new(n: usize, family: Family) -> Result<Self> {
        let els = enumerate_elementals(n)?;
        let coef = els
            .iter()
            .map(|&e| family_coefficients(family, e))
            .collect::<Result<Vec<_>>>()?;
        Ok(ElementalBattery {
            n,
            family,
            els,
            coef,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn elementals(&self) -> &[ElementalIndex] {
        &self.els
    }

    /// All elemental estimates into `out` (cleared first); errors on the
    /// first degenerate spacing.
    pub fn estimates_into(&self, s: &OrderedSample, out: &mut Vec<f64>) -> Result<()> {
        out.clear();
        for (k, &e) in self.els.iter().enumerate() {
            let r = spacing_ratios(s, e)?;
            let (a, b) = self.coef[k];
            out.push(a * r.tau.ln() - b * r.t.ln());
        }
        Ok(())
    }

    /// Weighted combination under `weights` (aligned with `elementals()`,
    /// normalized to unit sum). With `skip_degenerate`, elementals that
    /// hit ties are dropped and the surviving weights renormalized.
    pub fn combined(
        &self,
        s: &OrderedSample,
        weights: &[f64],
        skip_degenerate: bool,
    ) -> Result<f64> {
        assert_eq!(weights.len(), self.els.len(), "weight vector length");
        let mut acc = 0.0;
        let mut wsum = 0.0;
        for (k, &e) in self.els.iter().enumerate() {
            let w = weights[k];
            if w == 0.0 {
                continue;
            }
            match spacing_ratios(s, e) {
                Ok(r) => {
                    let (a, b) = self.coef[k];
                    acc += w * (a * r.tau.ln() - b * r.t.ln());
                    wsum += w;
                }
                Err(err @ Error::DegenerateSpacing { .. }) => {
                    if skip_degenerate {
                        continue;
                    }
                    return Err(err);
                }
                Err(err) => return Err(err),
            }
        }
        if skip_degenerate {
            if wsum == 0.0 {
                return Err(Error::input(
                    "every nonzero-weight elemental has degenerate spacing",
                ));
            }
            Ok(acc / wsum)
        } else {
            Ok(acc)
        }
    }
}

/// Unit-sum weighted combination of all elemental estimates.
pub fn combined_estimate(s: &OrderedSample, scheme: &WeightScheme, family: Family) -> Result<f64> {
    combined_estimate_opts(s, scheme, family, false)
}

/// As `combined_estimate`; `skip_degenerate` renormalizes over the
/// evaluable elementals instead of failing on ties (off by default
/// because dropping elementals silently changes the weighting).
pub fn combined_estimate_opts(
    s: &OrderedSample,
    scheme: &WeightScheme,
    family: Family,
    skip_degenerate: bool,
) -> Result<f64> {
    let battery = ElementalBattery::new(s.n(), family)?;
    let weights = weight_vector(scheme, s.n())?;
    battery.combined(s, &weights, skip_degenerate)
}
