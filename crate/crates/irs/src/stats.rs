//! Histogram distances, permutation and chi-square tests, and least squares.

use std::collections::BTreeMap;

use irs_core::shift::{sample_stream, unit_float};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Significance level of every test, before correction.
pub const ALPHA: f64 = 0.01;
/// Level for declaring a violation in the negative control.
pub const CONTROL_ALPHA: f64 = 0.001;
/// Shuffles per permutation test.
pub const SHUFFLES: usize = 1000;

pub fn histogram<T: Ord + Clone>(xs: &[T]) -> BTreeMap<T, usize> {
    let mut h = BTreeMap::new();
    for x in xs {
        *h.entry(x.clone()).or_insert(0) += 1;
    }
    h
}

/// Total variation distance between the empirical laws of two samples.
pub fn tv_distance<T: Ord + Clone>(a: &[T], b: &[T]) -> f64 {
    let (ha, hb) = (histogram(a), histogram(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut keys: Vec<&T> = ha.keys().chain(hb.keys()).collect();
    keys.sort();
    keys.dedup();
    0.5 * keys
        .into_iter()
        .map(|k| {
            let pa = ha.get(k).copied().unwrap_or(0) as f64 / na;
            let pb = hb.get(k).copied().unwrap_or(0) as f64 / nb;
            (pa - pb).abs()
        })
        .sum::<f64>()
}

/// Total variation distance between two laws given as probability maps.
pub fn tv_between_laws<T: Ord>(a: &BTreeMap<T, f64>, b: &BTreeMap<T, f64>) -> f64 {
    let mut d = 0.0;
    for (k, p) in a {
        d += (p - b.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, q) in b {
        if !a.contains_key(k) {
            d += q;
        }
    }
    0.5 * d
}

/// Paired permutation test of `law(x) = law(y)` for exchangeable pairs
/// `(x_i, y_i)`, with the TV distance of the two marginals as statistic.
/// Each shuffle swaps every pair independently with probability 1/2.
/// Returns `(tv, p)` with `p = (1 + #{tv* ≥ tv}) / (1 + shuffles)`.
pub fn paired_permutation_test<T: Ord + Clone>(x: &[T], y: &[T], shuffles: usize, seed: u64) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    let mut ids: BTreeMap<&T, usize> = BTreeMap::new();
    for v in x.iter().chain(y) {
        let next = ids.len();
        ids.entry(v).or_insert(next);
    }
    let xi: Vec<usize> = x.iter().map(|v| ids[v]).collect();
    let yi: Vec<usize> = y.iter().map(|v| ids[v]).collect();
    let k = ids.len();
    // diff = count_x − count_y per category; a swap of pair i moves 2 from
    // x_i's entry to y_i's entry.
    let mut base = vec![0i64; k];
    for i in 0..n {
        base[xi[i]] += 1;
        base[yi[i]] -= 1;
    }
    let tv_of = |d: &[i64]| d.iter().map(|v| v.unsigned_abs()).sum::<u64>() as f64 / (2.0 * n as f64);
    let observed = tv_of(&base);
    let discordant: Vec<usize> = (0..n).filter(|&i| xi[i] != yi[i]).collect();
    let mut rng = sample_stream(seed, u64::MAX);
    let mut extreme = 0;
    let mut d = vec![0i64; k];
    for _ in 0..shuffles {
        d.copy_from_slice(&base);
        for &i in &discordant {
            if unit_float(&mut rng) < 0.5 {
                d[xi[i]] -= 2;
                d[yi[i]] += 2;
            }
        }
        if tv_of(&d) >= observed - 1e-12 {
            extreme += 1;
        }
    }
    (observed, (1 + extreme) as f64 / (1 + shuffles) as f64)
}

/// Pearson goodness-of-fit: `(statistic, degrees of freedom, p-value)`.
/// Categories with zero expectation must have zero counts.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> (f64, usize, f64) {
    assert_eq!(observed.len(), expected.len());
    let total: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut cells: usize = 0;
    for (&o, &p) in observed.iter().zip(expected) {
        if p == 0.0 {
            if o != 0 {
                return (f64::INFINITY, 0, 0.0);
            }
            continue;
        }
        let e = p * total as f64;
        stat += (o as f64 - e).powi(2) / e;
        cells += 1;
    }
    let df = cells.saturating_sub(1);
    if df == 0 {
        return (stat, 0, 1.0);
    }
    let dist = ChiSquared::new(df as f64).expect("positive degrees of freedom");
    (stat, df, 1.0 - dist.cdf(stat))
}

/// Chi-square test of independence on a contingency table.
pub fn chi_square_independence(table: &[Vec<u64>]) -> (f64, usize, f64) {
    let rows: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let cols = table.first().map_or(0, |r| r.len());
    let col_sums: Vec<f64> = (0..cols).map(|j| table.iter().map(|r| r[j]).sum::<u64>() as f64).collect();
    let total: f64 = rows.iter().sum();
    let mut stat = 0.0;
    for (i, r) in table.iter().enumerate() {
        for (j, &o) in r.iter().enumerate() {
            let e = rows[i] * col_sums[j] / total;
            if e > 0.0 {
                stat += (o as f64 - e).powi(2) / e;
            }
        }
    }
    let live_rows = rows.iter().filter(|&&r| r > 0.0).count();
    let live_cols = col_sums.iter().filter(|&&c| c > 0.0).count();
    let df = live_rows.saturating_sub(1) * live_cols.saturating_sub(1);
    if df == 0 {
        return (stat, 0, 1.0);
    }
    let dist = ChiSquared::new(df as f64).expect("positive degrees of freedom");
    (stat, df, 1.0 - dist.cdf(stat))
}

/// Least-squares line through `(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(LinearFit { slope, intercept: my - slope * mx, r_squared })
}

/// Standard error of a proportion.
pub fn proportion_stderr(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}
