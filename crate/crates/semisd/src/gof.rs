//! Pearson chi-square goodness of fit for count data.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    /// Pooled bins as `(first count, last count)`, the last one open-ended.
    pub bins: Vec<(u64, Option<u64>)>,
}

/// Expected count every pooled bin must reach.
pub const MIN_EXPECTED: f64 = 5.0;

/// Tests `counts` against the pmf `pmf[k]` (mass beyond the slice goes to the
/// last bin). Adjacent values are pooled left to right until each bin
/// expects at least five observations; degrees of freedom are bins - 1.
pub fn chi_square_gof(counts: &[u64], pmf: &[f64]) -> Option<GofResult> {
    let n = counts.len() as f64;
    if counts.is_empty() || pmf.is_empty() {
        return None;
    }
    let max = counts.iter().copied().max().unwrap_or(0) as usize;
    let len = pmf.len().max(max + 1);
    let mut observed = vec![0u64; len];
    for &k in counts {
        observed[k as usize] += 1;
    }
    let mass = |k: usize| pmf.get(k).copied().unwrap_or(0.0).max(0.0);

    // pool into [start, end) bins
    let mut bins: Vec<(usize, usize, f64, u64)> = Vec::new();
    let (mut start, mut exp, mut obs) = (0usize, 0.0, 0u64);
    for k in 0..len {
        exp += n * mass(k);
        obs += observed[k];
        if exp >= MIN_EXPECTED {
            bins.push((start, k + 1, exp, obs));
            start = k + 1;
            exp = 0.0;
            obs = 0;
        }
    }
    // the open tail, with the mass the pmf puts past `len`
    let covered: f64 = (0..len).map(mass).sum();
    exp += n * (1.0 - covered).max(0.0);
    match bins.last_mut() {
        Some(last) if exp < MIN_EXPECTED || start >= len => {
            last.1 = len;
            last.2 += exp;
            last.3 += obs;
        }
        _ => bins.push((start, len, exp, obs)),
    }
    if bins.len() < 2 {
        return None;
    }
    let statistic: f64 = bins
        .iter()
        .map(|&(_, _, e, o)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum();
    let df = bins.len() - 1;
    let p_value = ChiSquared::new(df as f64).ok()?.sf(statistic);
    let last = bins.len() - 1;
    Some(GofResult {
        statistic,
        df,
        p_value,
        bins: bins
            .iter()
            .enumerate()
            .map(|(i, &(a, b, _, _))| (a as u64, if i == last { None } else { Some(b as u64 - 1) }))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_frequencies_give_zero_statistic() {
        let pmf = [0.25, 0.5, 0.25];
        let mut counts = vec![0u64; 100];
        counts.extend(vec![1u64; 200]);
        counts.extend(vec![2u64; 100]);
        let r = chi_square_gof(&counts, &pmf).unwrap();
        assert!(r.statistic.abs() < 1e-12);
        assert_eq!(r.df, 2);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sparse_tail_is_pooled() {
        let pmf = [0.9, 0.09, 0.009, 0.001];
        let counts: Vec<u64> = (0..1000).map(|i| if i < 900 { 0 } else if i < 990 { 1 } else { 2 }).collect();
        let r = chi_square_gof(&counts, &pmf).unwrap();
        // 900, 90, then 9 + 1 expected pooled into the open tail
        assert_eq!(r.bins.len(), 3);
        assert_eq!(r.bins[2], (2, None));
    }

    #[test]
    fn wrong_law_is_rejected() {
        let pmf = [0.5, 0.5];
        let counts: Vec<u64> = (0..1000).map(|i| u64::from(i % 10 == 0)).collect();
        assert!(chi_square_gof(&counts, &pmf).unwrap().p_value < 1e-10);
    }
}
