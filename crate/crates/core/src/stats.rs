//! Small statistics helpers for experiment reports.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MoodTest {
    pub chi_square: f64,
    pub p_value: f64,
    /// Counts `[[a above, a below], [b above, b below]]` of the pooled median.
    pub table: [[u64; 2]; 2],
    pub pooled_median: f64,
}

/// Pearson chi-square of a 2x2 table, without continuity correction, with
/// its upper-tail p-value on one degree of freedom. A table with an empty
/// row or column gives `(0, 1)`.
pub fn chi_square_2x2(table: [[u64; 2]; 2]) -> (f64, f64) {
    let t = table.map(|r| r.map(|v| v as f64));
    let rows = [t[0][0] + t[0][1], t[1][0] + t[1][1]];
    let cols = [t[0][0] + t[1][0], t[0][1] + t[1][1]];
    let n = rows[0] + rows[1];
    if rows.contains(&0.0) || cols.contains(&0.0) {
        return (0.0, 1.0);
    }
    let mut chi = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let expected = rows[i] * cols[j] / n;
            chi += (t[i][j] - expected).powi(2) / expected;
        }
    }
    let dist = ChiSquared::new(1.0).expect("one degree of freedom");
    (chi, dist.sf(chi).clamp(0.0, 1.0))
}

/// Mood's median test: do `a` and `b` share a population median?
/// Values equal to the pooled median are left out of the table.
pub fn mood_median_test(a: &[f64], b: &[f64]) -> Result<MoodTest> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidSample("both samples must be non-empty".into()));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::InvalidSample("samples contain NaN".into()));
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let pooled_median = percentile(&pooled, 50.0)?;
    let count = |s: &[f64]| {
        [
            s.iter().filter(|&&v| v > pooled_median).count() as u64,
            s.iter().filter(|&&v| v < pooled_median).count() as u64,
        ]
    };
    let table = [count(a), count(b)];
    let (chi_square, p_value) = chi_square_2x2(table);
    Ok(MoodTest { chi_square, p_value, table, pooled_median })
}

/// `q`-th percentile (0..=100) with linear interpolation between order
/// statistics.
pub fn percentile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidSample("percentile of an empty sample".into()));
    }
    if !(0.0..=100.0).contains(&q) {
        return Err(Error::InvalidSample(format!("percentile {q} outside [0, 100]")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pos = q / 100.0 * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Ok(sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo]))
}

/// 25th, 50th and 75th percentiles; `None` for an empty sample.
pub fn quartiles(values: &[f64]) -> Option<[f64; 3]> {
    if values.is_empty() {
        return None;
    }
    let q = |p| percentile(values, p).expect("non-empty sample");
    Some([q(25.0), q(50.0), q(75.0)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_table() {
        let (chi, p) = chi_square_2x2([[30, 20], [20, 30]]);
        assert!((chi - 4.0).abs() < 1e-12);
        assert!((p - 0.0455).abs() < 1e-4);
    }

    #[test]
    fn separated_samples() {
        let a: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..100).map(|i| 1000.0 + i as f64).collect();
        let t = mood_median_test(&a, &b).unwrap();
        assert_eq!(t.table, [[0, 100], [100, 0]]);
        assert!((t.chi_square - 200.0).abs() < 1e-9);
        assert!(t.p_value < 1e-15);
    }

    #[test]
    fn identical_samples() {
        let a = [0.1, 0.5, 0.2, 0.9, 0.4];
        let t = mood_median_test(&a, &a).unwrap();
        assert!(t.chi_square.abs() < 1e-12);
        assert!((t.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_ties_is_degenerate() {
        let t = mood_median_test(&[0.0; 5], &[0.0; 7]).unwrap();
        assert_eq!(t.table, [[0, 0], [0, 0]]);
        assert_eq!((t.chi_square, t.p_value), (0.0, 1.0));
    }

    #[test]
    fn rejects_empty() {
        assert!(mood_median_test(&[], &[1.0]).is_err());
        assert!(percentile(&[], 50.0).is_err());
    }

    #[test]
    fn percentiles_interpolate() {
        let v = [4.0, 1.0, 3.0, 2.0];
        assert_eq!(percentile(&v, 0.0).unwrap(), 1.0);
        assert_eq!(percentile(&v, 100.0).unwrap(), 4.0);
        assert!((percentile(&v, 50.0).unwrap() - 2.5).abs() < 1e-15);
        assert!((percentile(&v, 25.0).unwrap() - 1.75).abs() < 1e-15);
        assert_eq!(quartiles(&[]), None);
    }
}
