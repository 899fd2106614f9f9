//! Exact statistics on 2×2 contingency tables.
//!
//! Point probabilities of the hypergeometric distribution are evaluated in
//! log space. `ln C(n, k)` uses `lgamma` for small `n` and a Stirling
//! decomposition with an explicit remainder series for large `n`, which keeps
//! the absolute error near one ulp of the result instead of the ulp of
//! `ln n!`.

use crate::{Error, Result};

/// `[a, b; c, d]`: rows are inside/outside NPs, columns are the candidate
/// and all other candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ContingencyTable {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl ContingencyTable {
    pub const fn new(a: u64, b: u64, c: u64, d: u64) -> Self {
        Self { a, b, c, d }
    }

    pub fn total(&self) -> u64 {
        self.a + self.b + self.c + self.d
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a, self.c, self.b, self.d)
    }
}

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Largest `n` for which `ln C(n, k)` is taken straight from `lgamma`.
const LGAMMA_DIRECT_MAX: u64 = 1024;

/// Terms more than this many nats below the mode cannot change a sum that
/// already contains the mode.
const LOG_CUTOFF: f64 = 800.0;

/// Relative slack when deciding whether a table is no more likely than the
/// observed one.
const TIE_SLACK: f64 = 1e-12;

/// `ln n! - ((n + 1/2) ln n - n + ln sqrt(2π))`, the Stirling remainder.
fn stirling_remainder(n: u64) -> f64 {
    debug_assert!(n > 0);
    let x = n as f64;
    if n < 16 {
        return libm::lgamma(x + 1.0) - ((x + 0.5) * libm::log(x) - x + LN_SQRT_2PI);
    }
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    let x2 = x * x;
    (S0 - (S1 - (S2 - (S3 - S4 / x2) / x2) / x2) / x2) / x
}

/// `ln n!`.
pub fn ln_factorial(n: u64) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// `ln C(n, k)`.
pub fn log_choose(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(Error::ChooseDomain { n, k });
    }
    Ok(log_choose_unchecked(n, k))
}

fn log_choose_unchecked(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    if k == 0 {
        return 0.0;
    }
    let m = n - k;
    if n <= LGAMMA_DIRECT_MAX {
        return ln_factorial(n) - ln_factorial(k) - ln_factorial(m);
    }
    let (nf, kf, mf) = (n as f64, k as f64, m as f64);
    // n ln n - k ln k - m ln m, written so that no large terms cancel
    let entropy = kf * libm::log(nf / kf) - mf * libm::log1p(-kf / nf);
    let prefactor = 0.5 * libm::log(nf / (2.0 * core::f64::consts::PI * kf * mf));
    entropy + prefactor + stirling_remainder(n) - stirling_remainder(k) - stirling_remainder(m)
}

/// Two-sided Fisher exact test.
///
/// Sums the hypergeometric probabilities of every table with the observed
/// margins whose point probability does not exceed the observed one.
pub fn fisher_exact_two_sided(t: &ContingencyTable) -> Result<f64> {
    let n = t.total();
    if n == 0 {
        return Err(Error::EmptyTable);
    }
    let row1 = t.a + t.b;
    let row2 = t.c + t.d;
    let col1 = t.a + t.c;
    let lo = col1.saturating_sub(row2);
    let hi = row1.min(col1);

    let log_weight = |x: u64| log_choose_unchecked(row1, x) + log_choose_unchecked(row2, col1 - x);

    let mode = (((row1 as u128 + 1) * (col1 as u128 + 1)) / (n as u128 + 2)) as u64;
    let mode = mode.clamp(lo, hi);
    let log_mode = log_weight(mode);
    let observed = libm::exp(log_weight(t.a) - log_mode);
    let limit = observed * (1.0 + TIE_SLACK);

    let mut total = 0.0;
    let mut extreme = 0.0;
    let mut visit = |x: u64| -> bool {
        let rel = log_weight(x) - log_mode;
        if rel < -LOG_CUTOFF {
            return false;
        }
        let w = libm::exp(rel);
        total += w;
        if x == t.a || w <= limit {
            extreme += w;
        }
        true
    };

    // the pmf is log-concave, so it falls monotonically away from the mode
    let mut x = mode;
    loop {
        if !visit(x) || x == lo {
            break;
        }
        x -= 1;
    }
    let mut x = mode;
    while x < hi {
        x += 1;
        if !visit(x) {
            break;
        }
    }

    Ok((extreme / total).clamp(0.0, 1.0))
}

/// Sample odds ratio `(a·d)/(b·c)`, `+inf` when only the denominator vanishes.
pub fn odds_ratio(t: &ContingencyTable) -> Result<f64> {
    let ad = t.a as f64 * t.d as f64;
    let bc = t.b as f64 * t.c as f64;
    if bc == 0.0 {
        if ad == 0.0 {
            Err(Error::UndefinedOddsRatio)
        } else {
            Ok(f64::INFINITY)
        }
    } else {
        Ok(ad / bc)
    }
}
