use std::collections::BTreeMap;

use crate::scalar::Real;
use crate::sim::OutputHistogram;

use super::OracleError;

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const MAX_ITERATIONS: usize = 10_000;

/// ln Γ(x) for x > 0.
pub fn ln_gamma<T: Real>(x: T) -> T {
    let half = T::from_f64_lossy(0.5);
    if x < half {
        // reflection
        let pi = T::PI();
        return (pi / (pi * x).sin()).ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut acc = T::from_f64_lossy(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + T::from_f64_lossy(c) / (x + T::from_usize_lossy(i));
    }
    let t = x + T::from_f64_lossy(LANCZOS_G) + half;
    let ln_sqrt_2pi = T::from_f64_lossy(0.918_938_533_204_672_8);
    ln_sqrt_2pi + (x + half) * t.ln() - t + acc.ln()
}

/// Regularized upper incomplete gamma Q(a, x) = Γ(a, x) / Γ(a).
///
/// Series for P below `x = a + 1`, Lentz continued fraction above.
pub fn gamma_q<T: Real>(a: T, x: T) -> T {
    if x <= T::zero() {
        return T::one();
    }
    if x < a + T::one() {
        T::one() - gamma_p_series(a, x)
    } else {
        gamma_q_continued_fraction(a, x)
    }
}

fn gamma_p_series<T: Real>(a: T, x: T) -> T {
    let eps = T::epsilon();
    let mut ap = a;
    let mut term = T::one() / a;
    let mut sum = term;
    for _ in 0..MAX_ITERATIONS {
        ap = ap + T::one();
        term = term * x / ap;
        sum = sum + term;
        if term.abs() < sum.abs() * eps {
            break;
        }
    }
    sum * (a * x.ln() - x - ln_gamma(a)).exp()
}

fn gamma_q_continued_fraction<T: Real>(a: T, x: T) -> T {
    let eps = T::epsilon();
    let tiny = T::min_positive_value() / eps;
    let two = T::from_f64_lossy(2.0);
    let mut b = x + T::one() - a;
    let mut c = T::one() / tiny;
    let mut d = T::one() / b;
    let mut h = d;
    for i in 1..MAX_ITERATIONS {
        let i = T::from_usize_lossy(i);
        let an = -i * (i - a);
        b = b + two;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = T::one() / d;
        let delta = d * c;
        h = h * delta;
        if (delta - T::one()).abs() < eps {
            break;
        }
    }
    (a * x.ln() - x - ln_gamma(a)).exp() * h
}

/// Pearson statistic of `observed` against `expected` probabilities and its
/// degrees of freedom (`|support| - 1`).
///
/// Outputs in `expected` that were never observed contribute with count 0.
/// Every observed output must have positive expected probability.
pub fn chi_square_statistic<T: Real>(
    observed: &OutputHistogram,
    expected: &BTreeMap<String, T>,
) -> Result<(T, usize), OracleError> {
    if observed.total() == 0 {
        return Err(OracleError::EmptyHistogram);
    }
    if let Some((h, _)) = observed
        .iter()
        .find(|(h, _)| expected.get(*h).is_none_or(|p| *p <= T::zero()))
    {
        return Err(OracleError::ZeroExpected(h.to_string()));
    }
    let total = T::from_u64(observed.total()).expect("count fits the scalar");
    let mut stat = T::zero();
    for (h, &p) in expected {
        if p <= T::zero() {
            continue;
        }
        let e = total * p;
        let o = T::from_u64(observed.count(h)).expect("count fits the scalar");
        stat = stat + (o - e) * (o - e) / e;
    }
    let support = expected.values().filter(|p| **p > T::zero()).count();
    Ok((stat, support.saturating_sub(1)))
}

/// Upper-tail probability of the chi-square distribution with `df` degrees
/// of freedom at `statistic`, i.e. Q(df/2, statistic/2).
pub fn chi_square_pvalue<T: Real>(statistic: T, df: usize) -> Result<T, OracleError> {
    if df < 1 {
        return Err(OracleError::DegreesOfFreedom(df));
    }
    if statistic.is_nan() || statistic < T::zero() {
        return Err(OracleError::NegativeStatistic(statistic.to_f64_lossy()));
    }
    let half = T::from_f64_lossy(0.5);
    let q = gamma_q(T::from_usize_lossy(df) * half, statistic * half);
    Ok(q.max(T::zero()).min(T::one()))
}
