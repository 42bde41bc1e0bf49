//! Stick-breaking coordinates for points on a probability simplex.
//!
//! A distribution over `m` states is encoded by `m - 1` numbers on the unit
//! line: coordinate `k` is the fraction of the mass not yet assigned to
//! states `0..k` that goes to state `k`. The last state receives whatever
//! remains. Corners of the hypercube map to deterministic distributions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unit-hypercube coordinates of a joint distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypercubeParams {
    values: Vec<f64>,
}

impl HypercubeParams {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (index, &value) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::ParamOutOfRange { index, value });
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.values
    }
}

/// Decodes `row.len() - 1` stick coordinates into `row`.
pub(crate) fn decode_row(sticks: &[f64], row: &mut [f64]) {
    debug_assert_eq!(sticks.len() + 1, row.len());
    let mut remaining = 1.0;
    for (p, &t) in row.iter_mut().zip(sticks) {
        let t = t.clamp(0.0, 1.0);
        *p = remaining * t;
        remaining *= 1.0 - t;
    }
    row[sticks.len()] = remaining.max(0.0);
}

/// Encodes a normalized row into stick coordinates. Where no mass remains
/// the coordinate is undetermined; the uniform-row coordinate `1 / (m - k)`
/// is used so that zero-mass rows encode like the uniform row.
pub(crate) fn encode_row(row: &[f64], sticks: &mut [f64]) {
    debug_assert_eq!(sticks.len() + 1, row.len());
    let m = row.len();
    let mut remaining = 1.0;
    for (k, t) in sticks.iter_mut().enumerate() {
        *t = if remaining > 0.0 {
            (row[k] / remaining).clamp(0.0, 1.0)
        } else {
            1.0 / (m - k) as f64
        };
        remaining -= row[k];
        if remaining < 1e-300 {
            remaining = 0.0;
        }
    }
}

/// Stick coordinates of the uniform row over `m` states.
pub(crate) fn uniform_sticks(m: usize) -> Vec<f64> {
    (0..m - 1).map(|k| 1.0 / (m - k) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decode_corners_are_deterministic() {
        let mut row = [0.0; 3];
        decode_row(&[1.0, 0.3], &mut row);
        assert_eq!(row, [1.0, 0.0, 0.0]);
        decode_row(&[0.0, 1.0], &mut row);
        assert_eq!(row, [0.0, 1.0, 0.0]);
        decode_row(&[0.0, 0.0], &mut row);
        assert_eq!(row, [0.0, 0.0, 1.0]);
    }

    #[test]
    fn uniform_sticks_decode_to_uniform() {
        for m in 2..7 {
            let mut row = vec![0.0; m];
            decode_row(&uniform_sticks(m), &mut row);
            for p in row {
                assert!((p - 1.0 / m as f64).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn encode_inverts_decode() {
        let sticks = [0.2, 0.7, 0.4];
        let mut row = [0.0; 4];
        decode_row(&sticks, &mut row);
        let mut back = [0.0; 3];
        encode_row(&row, &mut back);
        for (a, b) in sticks.iter().zip(back) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(HypercubeParams::new(vec![0.5, 1.2]).is_err());
        assert!(HypercubeParams::new(vec![-0.1]).is_err());
        assert!(HypercubeParams::new(vec![0.0, 1.0]).is_ok());
    }
}
