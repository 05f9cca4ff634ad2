//! Elemental estimator coefficients a_N(J) and b_N(I).
//!
//! The GEV coefficients are defined through the weighted alternating sum
//!
//! ```text
//! beta_N(I) = C(N,I) * sum_{m=0..I} C(I,m) (-1)^m log(N - I + m)
//! ```
//!
//! with `b_N(I) = -1/beta_N(I)` and `a_N(K) = b_N(K-1)`. The sum is only
//! usable directly for small N (the alternation cancels catastrophically),
//! so the default path builds the triangle by the recursion
//!
//! ```text
//! beta_N(I+1) = (N/(I+1)) beta_{N-1}(I) - ((N-I)/(I+1)) beta_N(I)
//! ```
//!
//! seeded by `beta_N(1) = N log(1 - 1/N)`, and switches to a closed-form
//! approximation above a configurable sample-size threshold.

use std::collections::HashMap;
use std::str::FromStr;
use std::sync::{Arc, LazyLock, Mutex};

use serde::Serialize;

use crate::error::{Error, Result};

/// Sample size above which `Method::Auto` switches from the recursion to
/// the asymptotic approximation.
pub const DEFAULT_METHOD_THRESHOLD: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Auto,
    Direct,
    Recursion,
    Approximation,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Auto => "auto",
            Method::Direct => "direct",
            Method::Recursion => "recursion",
            Method::Approximation => "approximation",
        }
    }

    /// Resolves `Auto` to a concrete method for sample size `n`.
    pub fn resolve(self, n: usize, threshold: usize) -> Method {
        match self {
            Method::Auto => {
                if n <= threshold {
                    Method::Recursion
                } else {
                    Method::Approximation
                }
            }
            m => m,
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        match s {
            "auto" => Ok(Method::Auto),
            "direct" => Ok(Method::Direct),
            "recursion" => Ok(Method::Recursion),
            "approx" | "approximation" => Ok(Method::Approximation),
            other => Err(Error::config(format!(
                "unknown coefficient method '{other}' (expected auto|direct|recursion|approx)"
            ))),
        }
    }
}

/// One evaluated beta sum, tagged with the method that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaSum {
    pub n: usize,
    pub i: usize,
    pub value: f64,
    pub method: Method,
}

fn check_index(n: usize, i: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::domain(format!("sample size n={n} must be >= 2")));
    }
    if i < 1 || i > n - 1 {
        return Err(Error::domain(format!(
            "index i={i} out of range 1..={} for n={n}",
            n - 1
        )));
    }
    Ok(())
}

// Double-double helpers for the alternating sum below. The terms
// C(I,m) log(N-I+m) reach ~2e3 while the sum is ~1e-4 already at N = 15,
// so plain f64 log calls alone put a ~1e-9 relative floor on the result.
// Error-free transforms plus 106-bit log constants push the floor down to
// a few ulps.

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let t = s - a;
    (s, (a - (s - t)) + (b - t))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn split(a: f64) -> (f64, f64) {
    let c = 134_217_729.0 * a;
    let hi = c - (c - a);
    (hi, a - hi)
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

fn dd_add(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let (s, e) = two_sum(a.0, b.0);
    quick_two_sum(s, e + a.1 + b.1)
}

fn dd_mul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let (p, e) = two_prod(a.0, b.0);
    quick_two_sum(p, e + a.0 * b.1 + a.1 * b.0)
}

/// log p rounded to a hi/lo pair, for every prime up to 97.
const LN_PRIME_DD: &[(usize, f64, f64)] = &[
    (2, 0.6931471805599453, 2.3190468138462996e-17),
    (3, 1.0986122886681098, -9.07129723500153e-17),
    (5, 1.6094379124341003, 9.280081691085902e-17),
    (7, 1.9459101490553132, 7.323586207904907e-17),
    (11, 2.3978952727983707, -1.253584211423161e-16),
    (13, 2.5649493574615367, -2.5580975097208856e-18),
    (17, 2.833213344056216, -8.500696635386325e-17),
    (19, 2.9444389791664403, 1.9776172119535626e-16),
    (23, 3.1354942159291497, 1.5758359867283186e-17),
    (29, 3.367295829986474, -1.1553104240685565e-16),
    (31, 3.4339872044851463, -2.5863763694297672e-17),
    (37, 3.6109179126442243, 9.643918385970854e-17),
    (41, 3.713572066704308, -1.4628004942704776e-16),
    (43, 3.7612001156935624, 3.879508085699725e-17),
    (47, 3.8501476017100584, 1.5534199491592608e-16),
    (53, 3.970291913552122, -1.3098078310631424e-16),
    (59, 4.07753744390572, -2.5451232614395796e-16),
    (61, 4.110873864173311, -1.0515756814070423e-16),
    (67, 4.204692619390966, 3.3533479800665464e-16),
    (71, 4.2626798770413155, -3.579070851354337e-17),
    (73, 4.290459441148391, 1.7802138532613648e-16),
    (79, 4.3694478524670215, -3.884474562096486e-18),
    (83, 4.418840607796598, -3.397594828607531e-16),
    (89, 4.48863636973214, 1.9677598067823275e-16),
    (97, 4.574710978503383, 3.2451073313026223e-18),
];

/// log k over the prime table; factors beyond it fall back to one plain
/// f64 log, so every k <= 100 stays exact to ~106 bits.
fn ln_int_dd(k: usize) -> (f64, f64) {
    let mut rem = k;
    let mut acc = (0.0, 0.0);
    for &(p, hi, lo) in LN_PRIME_DD {
        while rem % p == 0 {
            acc = dd_add(acc, (hi, lo));
            rem /= p;
        }
    }
    if rem > 1 {
        acc = dd_add(acc, ((rem as f64).ln(), 0.0));
    }
    acc
}

/// C(n, k) exactly, or None on u64 overflow. Each interleaved step is an
/// exact division because the running value is C(n-k+j, j).
fn binom_u64(n: usize, k: usize) -> Option<u64> {
    let k = k.min(n - k);
    let mut c: u64 = 1;
    for j in 1..=k {
        c = c.checked_mul((n - k + j) as u64)? / j as u64;
    }
    Some(c)
}

fn u64_to_dd(c: u64) -> (f64, f64) {
    let hi = c as f64;
    (hi, (c as i128 - hi as i128) as f64)
}

/// The compensated path; None when a binomial exceeds u64, at which point
/// the sum is far past rescuing anyway.
fn beta_direct_dd(n: usize, i: usize) -> Option<f64> {
    let mut sum = (0.0, 0.0);
    for m in 0..=i {
        let c = binom_u64(i, m)?;
        let (th, tl) = dd_mul(u64_to_dd(c), ln_int_dd(n - i + m));
        let term = if m % 2 == 0 { (th, tl) } else { (-th, -tl) };
        sum = dd_add(sum, term);
    }
    let value = dd_mul(sum, u64_to_dd(binom_u64(n, i)?));
    Some(value.0 + value.1)
}

/// Plain f64 fallback for indices whose binomials overflow u64.
fn beta_direct_f64(n: usize, i: usize) -> f64 {
    let mut binom = 1.0_f64;
    for k in 1..=i {
        binom *= (n - i + k) as f64 / k as f64;
    }
    let mut cim = 1.0_f64;
    let mut sign = 1.0_f64;
    let mut sum = 0.0_f64;
    for m in 0..=i {
        sum += sign * cim * ((n - i + m) as f64).ln();
        cim *= (i - m) as f64 / (m + 1) as f64;
        sign = -sign;
    }
    binom * sum
}

/// Evaluates the beta sum by direct summation.
///
/// Intended as an oracle for small n; the alternating sum cancels
/// catastrophically as n grows and is rejected outright once the result
/// stops being credibly negative or finite.
pub fn beta_direct(n: usize, i: usize) -> Result<f64> {
    check_index(n, i)?;
    let value = match beta_direct_dd(n, i) {
        Some(v) => v,
        None => beta_direct_f64(n, i),
    };
    if !value.is_finite() {
        return Err(Error::numeric(format!(
            "direct summation overflowed at (n={n}, i={i}); use recursion or approximation"
        )));
    }
    if value >= 0.0 {
        return Err(Error::numeric(format!(
            "direct summation lost all precision at (n={n}, i={i}): beta must be negative; \
             use recursion or approximation"
        )));
    }
    Ok(value)
}

/// Triangular table of beta sums for 2 <= N <= n_max, 1 <= I <= N-1,
/// filled row by row from the seed identity and the two-point recursion.
#[derive(Debug, Clone)]
pub struct BetaTable {
    n_max: usize,
    // rows[n] holds beta_n(1..=n-1); rows 0 and 1 stay empty.
    rows: Vec<Vec<f64>>,
}

pub fn beta_recursion_table(n_max: usize) -> Result<BetaTable> {
    if n_max < 2 {
        return Err(Error::domain(format!("n_max={n_max} must be >= 2")));
    }
    let mut rows: Vec<Vec<f64>> = vec![Vec::new(); n_max + 1];
    for n in 2..=n_max {
        let nf = n as f64;
        let mut row = Vec::with_capacity(n - 1);
        row.push(nf * (-1.0 / nf).ln_1p());
        for i in 2..n {
            let i_f = i as f64;
            let prev_n = rows[n - 1][i - 2];
            let prev_i = row[i - 2];
            row.push((nf / i_f) * prev_n - ((nf - i_f + 1.0) / i_f) * prev_i);
        }
        rows[n] = row;
    }
    Ok(BetaTable { n_max, rows })
}

impl BetaTable {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn get(&self, n: usize, i: usize) -> Result<f64> {
        check_index(n, i)?;
        if n > self.n_max {
            return Err(Error::domain(format!(
                "n={n} exceeds table n_max={}",
                self.n_max
            )));
        }
        Ok(self.rows[n][i - 1])
    }

    /// All entries in (N, I) lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = BetaSum> + '_ {
        (2..=self.n_max).flat_map(move |n| {
            self.rows[n].iter().enumerate().map(move |(k, &value)| BetaSum {
                n,
                i: k + 1,
                value,
                method: Method::Recursion,
            })
        })
    }
}

/// The asymptotic form `b_N(I) ~ N [-(1-x) log(1-x) - (x/(12N)) log(1-x)]`
/// with x = I/N.
pub fn approx_b(n: usize, i: usize) -> Result<f64> {
    check_index(n, i)?;
    let nf = n as f64;
    let x = i as f64 / nf;
    let one_minus_x = (n - i) as f64 / nf;
    // ln(1-x) without cancellation on either side of x = 1/2.
    let ln1mx = if 2 * i <= n {
        (-x).ln_1p()
    } else {
        one_minus_x.ln()
    };
    Ok(nf * (-one_minus_x * ln1mx - x / (12.0 * nf) * ln1mx))
}

/// b_N(I), by the requested method.
///
/// `i = n-1` is formally meaningless for an elemental on its own but is
/// accepted so that a_N(N) exists.
pub fn b_coefficient(n: usize, i: usize, method: Method) -> Result<f64> {
    b_coefficient_with_threshold(n, i, method, DEFAULT_METHOD_THRESHOLD)
}

pub fn b_coefficient_with_threshold(
    n: usize,
    i: usize,
    method: Method,
    threshold: usize,
) -> Result<f64> {
    check_index(n, i)?;
    match method.resolve(n, threshold) {
        Method::Direct => Ok(-1.0 / beta_direct(n, i)?),
        Method::Recursion => {
            let table = beta_recursion_table(n)?;
            Ok(-1.0 / table.get(n, i)?)
        }
        Method::Approximation => approx_b(n, i),
        Method::Auto => unreachable!("resolve never returns Auto"),
    }
}

/// a_N(K) = b_N(K-1).
pub fn a_coefficient(n: usize, j: usize, method: Method) -> Result<f64> {
    if j < 2 || j > n {
        return Err(Error::domain(format!(
            "index j={j} out of range 2..={n} for a_N(J)"
        )));
    }
    b_coefficient(n, j - 1, method)
}

/// GPD elemental coefficients (a, b) = (J-1, I); independent of n.
pub fn gpd_coefficients(i: usize, j: usize) -> Result<(f64, f64)> {
    if i < 1 || j < i + 2 {
        return Err(Error::domain(format!(
            "invalid elemental pair (i={i}, j={j}): need i >= 1 and j >= i+2"
        )));
    }
    Ok(((j - 1) as f64, i as f64))
}

/// Weibull-reflected coefficients
/// (a_W, b_W) = (-b_N(N+1-J), -a_N(N+1-I)).
pub fn weibull_coefficients(n: usize, i: usize, j: usize) -> Result<(f64, f64)> {
    if i < 1 || j < i + 2 || j > n {
        return Err(Error::domain(format!(
            "invalid elemental index (i={i}, j={j}, n={n})"
        )));
    }
    let a_w = -b_coefficient(n, n + 1 - j, Method::Auto)?;
    let b_w = -a_coefficient(n, n + 1 - i, Method::Auto)?;
    Ok((a_w, b_w))
}

/// Immutable per-n coefficient table: b_N(I) for I = 1..=N-1 along with
/// the beta values and the concrete method that produced them.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    n: usize,
    method_threshold: usize,
    method: Method,
    beta: Vec<f64>,
    b: Vec<f64>,
}

impl CoefficientTable {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_threshold(n, DEFAULT_METHOD_THRESHOLD)
    }

    pub fn with_threshold(n: usize, threshold: usize) -> Result<Self> {
        check_index(n, 1)?;
        let method = Method::Auto.resolve(n, threshold);
        let (beta, b) = match method {
            Method::Recursion => {
                let table = beta_recursion_table(n)?;
                let beta: Vec<f64> = (1..n).map(|i| table.rows[n][i - 1]).collect();
                let b = beta.iter().map(|&v| -1.0 / v).collect();
                (beta, b)
            }
            Method::Approximation => {
                let b: Vec<f64> = (1..n).map(|i| approx_b(n, i)).collect::<Result<_>>()?;
                let beta = b.iter().map(|&v| -1.0 / v).collect();
                (beta, b)
            }
            _ => unreachable!("resolve never returns Auto or Direct here"),
        };
        Ok(CoefficientTable {
            n,
            method_threshold: threshold,
            method,
            beta,
            b,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn method_threshold(&self) -> usize {
        self.method_threshold
    }

    pub fn b(&self, i: usize) -> Result<f64> {
        check_index(self.n, i)?;
        Ok(self.b[i - 1])
    }

    pub fn a(&self, j: usize) -> Result<f64> {
        if j < 2 || j > self.n {
            return Err(Error::domain(format!(
                "index j={j} out of range 2..={} for a_N(J)",
                self.n
            )));
        }
        Ok(self.b[j - 2])
    }

    pub fn beta(&self, i: usize) -> Result<f64> {
        check_index(self.n, i)?;
        Ok(self.beta[i - 1])
    }
}

static TABLE_CACHE: LazyLock<Mutex<HashMap<usize, Arc<CoefficientTable>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// Shared coefficient table for `n` at the default threshold, built once.
pub fn cached_table(n: usize) -> Result<Arc<CoefficientTable>> {
    let mut cache = TABLE_CACHE.lock().expect("coefficient cache poisoned");
    if let Some(t) = cache.get(&n) {
        return Ok(Arc::clone(t));
    }
    let table = Arc::new(CoefficientTable::new(n)?);
    cache.insert(n, Arc::clone(&table));
    Ok(table)
}
