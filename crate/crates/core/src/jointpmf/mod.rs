//! Dense joint probability mass functions over discrete variables.
//!
//! Joint states are stored row-major with the last variable varying fastest.
//! Every [`JointPmf`] is immutable once built; all operations return new
//! values.

mod io;
mod params;
mod perturb;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use params::HypercubeParams;
pub(crate) use params::{decode_row, encode_row, uniform_sticks};
pub use perturb::Perturbed;

/// Absolute tolerance on normalization.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Largest joint table accepted.
pub const MAX_STATES: usize = 1 << 26;

/// Joint distribution over `cardinalities.len()` discrete variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPmf", into = "RawPmf")]
pub struct JointPmf {
    cardinalities: Vec<usize>,
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawPmf {
    cardinalities: Vec<usize>,
    probs: Vec<f64>,
}

impl TryFrom<RawPmf> for JointPmf {
    type Error = Error;

    fn try_from(raw: RawPmf) -> Result<Self> {
        JointPmf::new(raw.cardinalities, raw.probs)
    }
}

impl From<JointPmf> for RawPmf {
    fn from(pmf: JointPmf) -> Self {
        RawPmf {
            cardinalities: pmf.cardinalities,
            probs: pmf.probs,
        }
    }
}

pub(crate) fn table_size(cardinalities: &[usize]) -> Result<usize> {
    if cardinalities.is_empty() {
        return Err(Error::EmptyCardinalities);
    }
    let mut size: u128 = 1;
    for (index, &cardinality) in cardinalities.iter().enumerate() {
        if cardinality < 2 {
            return Err(Error::CardinalityTooSmall { index, cardinality });
        }
        size = size.saturating_mul(cardinality as u128);
    }
    if size > MAX_STATES as u128 {
        return Err(Error::StateSpaceOverflow(size));
    }
    Ok(size as usize)
}

fn product(cardinalities: &[usize]) -> usize {
    cardinalities.iter().product()
}

/// Checks that `vars` are distinct indices below `num_vars`.
pub(crate) fn check_vars(vars: &[usize], num_vars: usize) -> Result<()> {
    for (i, &v) in vars.iter().enumerate() {
        if v >= num_vars {
            return Err(Error::IndexOutOfRange { index: v, num_vars });
        }
        if vars[..i].contains(&v) {
            return Err(Error::DuplicateIndex(v));
        }
    }
    Ok(())
}

pub(crate) fn check_disjoint(a: &[usize], b: &[usize]) -> Result<()> {
    match a.iter().find(|v| b.contains(v)) {
        Some(&v) => Err(Error::OverlappingSets(v)),
        None => Ok(()),
    }
}

impl JointPmf {
    /// Builds a distribution, validating shape, sign and normalization.
    pub fn new(cardinalities: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        let size = table_size(&cardinalities)?;
        if probs.len() != size {
            return Err(Error::LengthMismatch {
                what: "probs",
                expected: size,
                actual: probs.len(),
            });
        }
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(Error::InvalidProbabilities(format!(
                "entry {i} is {p}"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidProbabilities(format!(
                "entries sum to {total}"
            )));
        }
        Ok(Self {
            cardinalities,
            probs,
        })
    }

    /// Internal constructor for tables produced by arithmetic: clamps
    /// round-off negatives and renormalizes.
    pub(crate) fn from_raw(cardinalities: Vec<usize>, mut probs: Vec<f64>) -> Self {
        debug_assert_eq!(product(&cardinalities), probs.len());
        for p in probs.iter_mut() {
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total: f64 = probs.iter().sum();
        debug_assert!(total > 0.0);
        if (total - 1.0).abs() > 0.0 {
            for p in probs.iter_mut() {
                *p /= total;
            }
        }
        Self {
            cardinalities,
            probs,
        }
    }

    pub fn uniform(cardinalities: &[usize]) -> Result<Self> {
        let size = table_size(cardinalities)?;
        Ok(Self {
            cardinalities: cardinalities.to_vec(),
            probs: vec![1.0 / size as f64; size],
        })
    }

    /// Random distribution: every hypercube coordinate drawn uniformly on
    /// `[0, 1]`, then decoded.
    pub fn random(cardinalities: &[usize], seed: u64) -> Result<Self> {
        let size = table_size(cardinalities)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..size - 1).map(|_| rng.random::<f64>()).collect();
        Self::from_params(cardinalities, &HypercubeParams::new(values)?)
    }

    /// Number of hypercube coordinates for a table with these cardinalities.
    pub fn num_params(cardinalities: &[usize]) -> Result<usize> {
        Ok(table_size(cardinalities)? - 1)
    }

    /// Decodes the chained stick-breaking parameterization
    /// `Pr(X1), Pr(X2 | X1), Pr(X3 | X1, X2), ...`, conditional rows in
    /// lexicographic order of the conditioning states.
    pub fn from_params(cardinalities: &[usize], params: &HypercubeParams) -> Result<Self> {
        let size = table_size(cardinalities)?;
        if params.len() != size - 1 {
            return Err(Error::LengthMismatch {
                what: "hypercube params",
                expected: size - 1,
                actual: params.len(),
            });
        }
        let values = params.values();
        let mut probs = vec![1.0];
        let mut offset = 0;
        let mut row = Vec::new();
        for &m in cardinalities {
            let mut next = Vec::with_capacity(probs.len() * m);
            row.resize(m, 0.0);
            for &prefix in &probs {
                decode_row(&values[offset..offset + m - 1], &mut row);
                offset += m - 1;
                next.extend(row.iter().map(|r| prefix * r));
            }
            probs = next;
        }
        debug_assert_eq!(offset, size - 1);
        Ok(Self {
            cardinalities: cardinalities.to_vec(),
            probs,
        })
    }

    pub fn to_params(&self) -> HypercubeParams {
        let n = self.num_vars();
        let mut values = Vec::with_capacity(self.size() - 1);
        // prefix marginals Pr(X1..Xk) for k = 1..n
        let mut prefixes = vec![self.probs.clone()];
        for k in (1..n).rev() {
            let last = prefixes.last().unwrap();
            let m = self.cardinalities[k];
            let reduced: Vec<f64> = last.chunks(m).map(|c| c.iter().sum()).collect();
            prefixes.push(reduced);
        }
        prefixes.reverse();
        let mut parent = vec![1.0];
        for (k, table) in prefixes.iter().enumerate() {
            let m = self.cardinalities[k];
            let mut sticks = vec![0.0; m - 1];
            let mut row = vec![0.0; m];
            for (chunk, &mass) in table.chunks(m).zip(&parent) {
                if mass > 0.0 {
                    for (r, c) in row.iter_mut().zip(chunk) {
                        *r = c / mass;
                    }
                } else {
                    row.fill(1.0 / m as f64);
                }
                encode_row(&row, &mut sticks);
                values.extend_from_slice(&sticks);
            }
            parent = table.clone();
        }
        HypercubeParams::new(values).expect("stick coordinates lie in [0, 1]")
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cardinalities
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn num_vars(&self) -> usize {
        self.cardinalities.len()
    }

    pub fn size(&self) -> usize {
        self.probs.len()
    }

    /// Joint state digits of a flat index.
    pub fn state_of(&self, mut index: usize) -> Vec<usize> {
        let mut state = vec![0; self.num_vars()];
        for (digit, &m) in state.iter_mut().zip(&self.cardinalities).rev() {
            *digit = index % m;
            index /= m;
        }
        state
    }

    pub fn index_of(&self, state: &[usize]) -> usize {
        state
            .iter()
            .zip(&self.cardinalities)
            .fold(0, |acc, (&s, &m)| acc * m + s)
    }

    pub fn prob(&self, state: &[usize]) -> f64 {
        self.probs[self.index_of(state)]
    }

    /// For every joint state, its flat index in the marginal table over
    /// `vars` (in the given order). No validation.
    pub(crate) fn projection(&self, vars: &[usize]) -> Vec<usize> {
        let n = self.num_vars();
        let mut strides = vec![0usize; n];
        let mut stride = 1;
        for &v in vars.iter().rev() {
            strides[v] = stride;
            stride *= self.cardinalities[v];
        }
        let mut out = Vec::with_capacity(self.size());
        let mut digits = vec![0usize; n];
        let mut current = 0usize;
        for _ in 0..self.size() {
            out.push(current);
            // odometer increment, last variable fastest
            for k in (0..n).rev() {
                digits[k] += 1;
                current += strides[k];
                if digits[k] < self.cardinalities[k] {
                    break;
                }
                current -= strides[k] * digits[k];
                digits[k] = 0;
            }
        }
        out
    }

    /// Marginal table over `vars` without validation; empty `vars` yields `[1.0]`.
    pub(crate) fn marginal_probs(&self, vars: &[usize]) -> Vec<f64> {
        if vars.is_empty() {
            return vec![1.0];
        }
        let size: usize = vars.iter().map(|&v| self.cardinalities[v]).product();
        let mut out = vec![0.0; size];
        for (p, j) in self.probs.iter().zip(self.projection(vars)) {
            out[j] += p;
        }
        out
    }

    /// Marginal over `keep`, variables ordered as listed.
    pub fn marginal(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::EmptySet("keep"));
        }
        check_vars(keep, self.num_vars())?;
        let cards = keep.iter().map(|&v| self.cardinalities[v]).collect();
        Ok(Self::from_raw(cards, self.marginal_probs(keep)))
    }

    /// Reorders the variables: output variable `k` is input variable `order[k]`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.num_vars() {
            return Err(Error::LengthMismatch {
                what: "permutation",
                expected: self.num_vars(),
                actual: order.len(),
            });
        }
        self.marginal(order)
    }

    /// `Pr(target | given)`. Rows whose conditioning state has zero mass are
    /// uniform.
    pub fn condition(&self, target: &[usize], given: &[usize]) -> Result<ConditionalPmf> {
        if target.is_empty() {
            return Err(Error::EmptySet("target"));
        }
        check_vars(target, self.num_vars())?;
        check_vars(given, self.num_vars())?;
        check_disjoint(target, given)?;
        let both: Vec<usize> = given.iter().chain(target).copied().collect();
        let joint = self.marginal_probs(&both);
        let cols: usize = target.iter().map(|&v| self.cardinalities[v]).product();
        let mut table = joint;
        for row in table.chunks_mut(cols) {
            let mass: f64 = row.iter().sum();
            if mass > 0.0 {
                row.iter_mut().for_each(|p| *p /= mass);
            } else {
                row.fill(1.0 / cols as f64);
            }
        }
        Ok(ConditionalPmf {
            given_cardinalities: given.iter().map(|&v| self.cardinalities[v]).collect(),
            target_cardinalities: target.iter().map(|&v| self.cardinalities[v]).collect(),
            table,
        })
    }

    /// Appends the target variables of `cond`, which must be conditioned on
    /// all existing variables in order.
    pub fn append_variable(&self, cond: &ConditionalPmf) -> Result<Self> {
        if cond.given_cardinalities != self.cardinalities {
            return Err(Error::InvalidProbabilities(format!(
                "conditional is given {:?}, distribution has {:?}",
                cond.given_cardinalities, self.cardinalities
            )));
        }
        let cols = cond.num_cols();
        let mut cards = self.cardinalities.clone();
        cards.extend_from_slice(&cond.target_cardinalities);
        table_size(&cards)?;
        let mut probs = Vec::with_capacity(self.size() * cols);
        for (p, row) in self.probs.iter().zip(cond.table.chunks(cols)) {
            probs.extend(row.iter().map(|r| p * r));
        }
        Ok(Self::from_raw(cards, probs))
    }

    /// Appends `Pr(new | vars)` where `cond` is given exactly the variables
    /// `vars` (in order), lifted to a conditional on all variables.
    pub fn append_conditioned_on(&self, vars: &[usize], cond: &ConditionalPmf) -> Result<Self> {
        check_vars(vars, self.num_vars())?;
        let expected: Vec<usize> = vars.iter().map(|&v| self.cardinalities[v]).collect();
        if cond.given_cardinalities != expected {
            return Err(Error::InvalidProbabilities(format!(
                "conditional is given {:?}, selected variables have {:?}",
                cond.given_cardinalities, expected
            )));
        }
        let cols = cond.num_cols();
        let mut table = Vec::with_capacity(self.size() * cols);
        for row in self.projection(vars) {
            table.extend_from_slice(cond.row(row));
        }
        let lifted = ConditionalPmf {
            given_cardinalities: self.cardinalities.clone(),
            target_cardinalities: cond.target_cardinalities.clone(),
            table,
        };
        self.append_variable(&lifted)
    }

    /// Appends a variable with `out_cardinality` states computed
    /// deterministically from the full joint state.
    pub fn append_redundant<F>(&self, out_cardinality: usize, f: F) -> Result<Self>
    where
        F: Fn(&[usize]) -> usize,
    {
        if out_cardinality < 2 {
            return Err(Error::CardinalityTooSmall {
                index: self.num_vars(),
                cardinality: out_cardinality,
            });
        }
        let mut table = vec![0.0; self.size() * out_cardinality];
        for i in 0..self.size() {
            let out = f(&self.state_of(i));
            if out >= out_cardinality {
                return Err(Error::InvalidProbabilities(format!(
                    "map produced state {out} for cardinality {out_cardinality}"
                )));
            }
            table[i * out_cardinality + out] = 1.0;
        }
        let cond = ConditionalPmf {
            given_cardinalities: self.cardinalities.clone(),
            target_cardinalities: vec![out_cardinality],
            table,
        };
        self.append_variable(&cond)
    }

    /// Appends a uniformly random deterministic function of `inputs` with
    /// `out_cardinality` states.
    pub fn append_random_redundant(
        &self,
        inputs: &[usize],
        out_cardinality: usize,
        seed: u64,
    ) -> Result<Self> {
        check_vars(inputs, self.num_vars())?;
        let rows: usize = inputs.iter().map(|&v| self.cardinalities[v]).product();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let map: Vec<usize> = (0..rows).map(|_| rng.random_range(0..out_cardinality)).collect();
        let given: Vec<usize> = inputs.iter().map(|&v| self.cardinalities[v]).collect();
        let cond = ConditionalPmf::deterministic(&given, out_cardinality, &map)?;
        self.append_conditioned_on(inputs, &cond)
    }
}

/// `Pr(target | given)` as a dense table: one row per joint `given` state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalPmf {
    given_cardinalities: Vec<usize>,
    target_cardinalities: Vec<usize>,
    table: Vec<f64>,
}

impl ConditionalPmf {
    pub fn new(
        given_cardinalities: Vec<usize>,
        target_cardinalities: Vec<usize>,
        table: Vec<f64>,
    ) -> Result<Self> {
        let cols = table_size(&target_cardinalities)?;
        let rows = product(&given_cardinalities);
        if table.len() != rows * cols {
            return Err(Error::LengthMismatch {
                what: "conditional table",
                expected: rows * cols,
                actual: table.len(),
            });
        }
        for (r, row) in table.chunks(cols).enumerate() {
            if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(Error::InvalidProbabilities(format!("row {r} has a negative entry")));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::InvalidProbabilities(format!("row {r} sums to {total}")));
            }
        }
        Ok(Self {
            given_cardinalities,
            target_cardinalities,
            table,
        })
    }

    /// Single target variable that is a function of the given state.
    pub fn deterministic(given_cardinalities: &[usize], out_cardinality: usize, map: &[usize]) -> Result<Self> {
        let rows = product(given_cardinalities);
        if map.len() != rows {
            return Err(Error::LengthMismatch {
                what: "deterministic map",
                expected: rows,
                actual: map.len(),
            });
        }
        let mut table = vec![0.0; rows * out_cardinality];
        for (r, &s) in map.iter().enumerate() {
            if s >= out_cardinality {
                return Err(Error::InvalidProbabilities(format!(
                    "map sends row {r} to state {s} of {out_cardinality}"
                )));
            }
            table[r * out_cardinality + s] = 1.0;
        }
        Self::new(given_cardinalities.to_vec(), vec![out_cardinality], table)
    }

    pub(crate) fn from_rows_unchecked(
        given_cardinalities: Vec<usize>,
        target_cardinalities: Vec<usize>,
        table: Vec<f64>,
    ) -> Self {
        Self {
            given_cardinalities,
            target_cardinalities,
            table,
        }
    }

    pub fn given_cardinalities(&self) -> &[usize] {
        &self.given_cardinalities
    }

    pub fn target_cardinalities(&self) -> &[usize] {
        &self.target_cardinalities
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn num_rows(&self) -> usize {
        product(&self.given_cardinalities)
    }

    pub fn num_cols(&self) -> usize {
        product(&self.target_cardinalities)
    }

    pub fn row(&self, given_index: usize) -> &[f64] {
        let cols = self.num_cols();
        &self.table[given_index * cols..(given_index + 1) * cols]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn xor_joint() -> JointPmf {
        JointPmf::uniform(&[2, 2])
            .unwrap()
            .append_redundant(2, |s| s[0] ^ s[1])
            .unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn uniform_tables() {
        assert!(close(JointPmf::uniform(&[2, 2]).unwrap().probs(), &[0.25; 4], 0.0));
        assert!(close(JointPmf::uniform(&[3, 3]).unwrap().probs(), &[1.0 / 9.0; 9], 0.0));
        assert!(close(JointPmf::uniform(&[2]).unwrap().probs(), &[0.5, 0.5], 0.0));
    }

    #[test]
    fn uniform_rejects_bad_cardinalities() {
        assert!(matches!(JointPmf::uniform(&[]), Err(Error::EmptyCardinalities)));
        assert!(matches!(
            JointPmf::uniform(&[2, 1]),
            Err(Error::CardinalityTooSmall { index: 1, .. })
        ));
    }

    #[test]
    fn new_validates() {
        assert!(JointPmf::new(vec![2], vec![0.5, 0.6]).is_err());
        assert!(JointPmf::new(vec![2], vec![1.5, -0.5]).is_err());
        assert!(JointPmf::new(vec![2, 2], vec![0.5, 0.5]).is_err());
        assert!(JointPmf::new(vec![2], vec![0.25, 0.75]).is_ok());
    }

    #[test]
    fn random_is_deterministic_and_normalized() {
        let a = JointPmf::random(&[2, 2, 2], 17).unwrap();
        let b = JointPmf::random(&[2, 2, 2], 17).unwrap();
        assert_eq!(a, b);
        let c = JointPmf::random(&[2, 2], 99).unwrap();
        assert!((c.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert_ne!(a, JointPmf::random(&[2, 2, 2], 18).unwrap());
    }

    #[test]
    fn half_params_decode_to_uniform() {
        let params = HypercubeParams::new(vec![0.5; 3]).unwrap();
        let pmf = JointPmf::from_params(&[2, 2], &params).unwrap();
        assert!(close(pmf.probs(), &[0.25; 4], 1e-15));
    }

    #[test]
    fn boundary_param_gives_point_mass() {
        let params = HypercubeParams::new(vec![1.0]).unwrap();
        let pmf = JointPmf::from_params(&[2], &params).unwrap();
        assert_eq!(pmf.probs(), &[1.0, 0.0]);
    }

    #[test]
    fn from_params_rejects_wrong_length() {
        let params = HypercubeParams::new(vec![0.5; 2]).unwrap();
        assert!(matches!(
            JointPmf::from_params(&[2, 2], &params),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn params_round_trip_on_random_pmf() {
        let pmf = JointPmf::random(&[3, 3], 5).unwrap();
        let params = pmf.to_params();
        let back = JointPmf::from_params(&[3, 3], &params).unwrap();
        assert!(close(pmf.probs(), back.probs(), 1e-12));
        assert!(close(back.to_params().values(), params.values(), 1e-12));
    }

    #[test]
    fn marginal_of_xor_output_is_fair() {
        let xor = xor_joint();
        assert!(close(xor.marginal(&[2]).unwrap().probs(), &[0.5, 0.5], 1e-15));
        assert_eq!(xor.marginal(&[0, 1, 2]).unwrap(), xor);
        let u = JointPmf::uniform(&[2, 2]).unwrap();
        assert!(close(u.marginal(&[0]).unwrap().probs(), &[0.5, 0.5], 0.0));
    }

    #[test]
    fn marginal_respects_order() {
        let pmf = JointPmf::random(&[2, 3], 3).unwrap();
        let swapped = pmf.marginal(&[1, 0]).unwrap();
        assert_eq!(swapped.cardinalities(), &[3, 2]);
        for a in 0..2 {
            for b in 0..3 {
                assert_eq!(pmf.prob(&[a, b]), swapped.prob(&[b, a]));
            }
        }
    }

    #[test]
    fn marginal_validates_indices() {
        let pmf = JointPmf::uniform(&[2, 2]).unwrap();
        assert!(matches!(pmf.marginal(&[2]), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(pmf.marginal(&[0, 0]), Err(Error::DuplicateIndex(0))));
    }

    #[test]
    fn condition_reads_xor_truth_table() {
        let xor = xor_joint();
        let cond = xor.condition(&[2], &[0, 1]).unwrap();
        // row for X1 = 0, X2 = 1
        assert!(close(cond.row(1), &[0.0, 1.0], 0.0));
        assert!(close(cond.row(3), &[1.0, 0.0], 0.0));
    }

    #[test]
    fn condition_on_nothing_is_marginal() {
        let pmf = JointPmf::random(&[3, 2], 8).unwrap();
        let cond = pmf.condition(&[0], &[]).unwrap();
        assert!(close(cond.row(0), pmf.marginal(&[0]).unwrap().probs(), 1e-15));
    }

    #[test]
    fn condition_on_independent_bits_has_equal_rows() {
        let pmf = JointPmf::uniform(&[2, 2]).unwrap();
        let cond = pmf.condition(&[1], &[0]).unwrap();
        assert_eq!(cond.row(0), cond.row(1));
    }

    #[test]
    fn zero_mass_rows_are_uniform() {
        let pmf = JointPmf::new(vec![2, 3], vec![0.2, 0.3, 0.5, 0.0, 0.0, 0.0]).unwrap();
        let cond = pmf.condition(&[1], &[0]).unwrap();
        assert!(close(cond.row(1), &[1.0 / 3.0; 3], 1e-15));
    }

    #[test]
    fn condition_rejects_overlap() {
        let pmf = JointPmf::uniform(&[2, 2]).unwrap();
        assert!(matches!(pmf.condition(&[0], &[0]), Err(Error::OverlappingSets(0))));
    }

    #[test]
    fn append_xor_gives_truth_table() {
        let xor = xor_joint();
        assert_eq!(xor.cardinalities(), &[2, 2, 2]);
        for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert_eq!(xor.prob(&[a, b, a ^ b]), 0.25);
            assert_eq!(xor.prob(&[a, b, 1 - (a ^ b)]), 0.0);
        }
    }

    #[test]
    fn append_then_marginalize_is_identity() {
        let pmf = JointPmf::random(&[3, 2], 11).unwrap();
        let cond = JointPmf::random(&[3, 2, 4], 12).unwrap().condition(&[2], &[0, 1]).unwrap();
        let grown = pmf.append_variable(&cond).unwrap();
        let back = grown.marginal(&[0, 1]).unwrap();
        assert!(close(back.probs(), pmf.probs(), 1e-15));
    }

    #[test]
    fn append_checks_given_shape() {
        let pmf = JointPmf::uniform(&[2, 2]).unwrap();
        let cond = ConditionalPmf::deterministic(&[3], 2, &[0, 1, 0]).unwrap();
        assert!(pmf.append_variable(&cond).is_err());
    }

    #[test]
    fn append_redundant_rejects_out_of_range_map() {
        let pmf = JointPmf::uniform(&[2]).unwrap();
        assert!(pmf.append_redundant(2, |_| 2).is_err());
    }

    #[test]
    fn conditional_new_validates_rows() {
        assert!(ConditionalPmf::new(vec![2], vec![2], vec![0.5, 0.5, 0.2, 0.7]).is_err());
        assert!(ConditionalPmf::new(vec![2], vec![2], vec![0.5, 0.5]).is_err());
        assert!(ConditionalPmf::new(vec![2], vec![2], vec![0.5, 0.5, 0.3, 0.7]).is_ok());
    }

    #[test]
    fn projection_matches_state_digits() {
        let pmf = JointPmf::uniform(&[2, 3, 2]).unwrap();
        let proj = pmf.projection(&[2, 0]);
        for (i, &j) in proj.iter().enumerate() {
            let s = pmf.state_of(i);
            assert_eq!(j, s[2] * 2 + s[0]);
        }
    }

    #[test]
    fn hypercube_generator_marginal_means() {
        // Monte-Carlo oracle for the stick-breaking generator: with uniform
        // coordinates the first stick has mean 1/2 and each later state
        // takes half of the remaining mean mass, for X1 and (by independence
        // of the conditional rows) for X2 as well.
        let expected = [0.5, 0.25, 0.25];
        let trials = 1000;
        let mut sums = [[0.0; 3]; 2];
        for seed in 0..trials {
            let pmf = JointPmf::random(&[3, 3], seed).unwrap();
            for (v, sum) in sums.iter_mut().enumerate() {
                for (s, p) in sum.iter_mut().zip(pmf.marginal(&[v]).unwrap().probs()) {
                    *s += p;
                }
            }
        }
        for sum in sums {
            for (s, e) in sum.iter().zip(expected) {
                assert!((s / trials as f64 - e).abs() < 0.05, "{s} vs {e}");
            }
        }
    }
}
