//! The synergy measure over a sequence of independent SRVs.
//!
//! Synergistic information of inputs `X` about a target `Y` is the sum of
//! `I(Y : S_i)` over a sequence of mutually independent SRVs `S_i`,
//! maximized over sequences. Numerically found SRVs leak a little
//! information about individual inputs, so each term is corrected:
//!
//! ```text
//! lower = Σ_i max(0, I(S_i : Y) - Σ_j I(S_i : X_j))
//! upper = Σ_i max(0, I(S_i : Y) - max_j I(S_i : X_j))
//! mid   = (lower + upper) / 2
//! relative_error = Σ_i (Σ_j I(S_i : X_j) - max_j I(S_i : X_j)) / mid
//! ```

use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::{clamp_info, mutual_info, raw_entropy, Bits};
use crate::jointpmf::{check_disjoint, check_vars, JointPmf};
use crate::srv::{maximize_ordering, OsrvSequence, SearchConfig};

/// Per-SRV ingredients of the estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SrvTerm {
    pub mi_with_target: Bits,
    pub leakage_sum: Bits,
    pub leakage_max: Bits,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynergyEstimate {
    pub lower: Bits,
    pub upper: Bits,
    pub mid: Bits,
    /// `None` when `mid` is zero but the leakage corrections are not.
    pub relative_error: Option<f64>,
    pub per_srv_terms: Vec<SrvTerm>,
}

impl SynergyEstimate {
    pub fn empty() -> Self {
        Self {
            lower: 0.0,
            upper: 0.0,
            mid: 0.0,
            relative_error: Some(0.0),
            per_srv_terms: Vec::new(),
        }
    }

    /// `Σ_i I(S_i : Y)` without leakage corrections.
    pub fn raw_sum(&self) -> Bits {
        self.per_srv_terms.iter().map(|t| t.mi_with_target).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("estimate serializes")
    }
}

/// Evaluates the estimate for `sequence`, whose SRVs must be variables of
/// `pmf_with_srvs` (normally `sequence.base_pmf` or an extension of it).
pub fn synergy_terms(pmf_with_srvs: &JointPmf, target: &[usize], sequence: &OsrvSequence) -> Result<SynergyEstimate> {
    if target.is_empty() {
        return Err(Error::EmptySet("target"));
    }
    let n = pmf_with_srvs.num_vars();
    check_vars(target, n)?;
    if sequence.srvs.len() != sequence.srv_indices.len() {
        return Err(Error::SequenceMismatch("one index per SRV required".into()));
    }
    for (srv, &idx) in sequence.srvs.iter().zip(&sequence.srv_indices) {
        if idx >= n {
            return Err(Error::SequenceMismatch(format!("SRV variable {idx} missing from a {n}-variable distribution")));
        }
        if pmf_with_srvs.cardinalities()[idx] != srv.cond.num_cols() {
            return Err(Error::SequenceMismatch(format!("variable {idx} does not have the SRV's cardinality")));
        }
    }
    check_vars(&sequence.inputs, n)?;
    check_disjoint(&sequence.srv_indices, target)?;

    let mut terms = Vec::with_capacity(sequence.len());
    for &idx in &sequence.srv_indices {
        let mi_with_target = mutual_info(pmf_with_srvs, &[idx], target)?;
        let leaks = sequence
            .inputs
            .iter()
            .map(|&x| mutual_info(pmf_with_srvs, &[idx], &[x]))
            .collect::<Result<Vec<_>>>()?;
        terms.push(SrvTerm {
            mi_with_target,
            leakage_sum: leaks.iter().sum(),
            leakage_max: leaks.iter().copied().fold(0.0, f64::max),
        });
    }
    let lower: f64 = terms.iter().map(|t| (t.mi_with_target - t.leakage_sum).max(0.0)).sum();
    let upper: f64 = terms.iter().map(|t| (t.mi_with_target - t.leakage_max).max(0.0)).sum();
    let mid = 0.5 * (lower + upper);
    let spread: f64 = terms.iter().map(|t| t.leakage_sum - t.leakage_max).sum();
    let relative_error = if mid > 0.0 {
        Some(spread / mid)
    } else if spread <= 0.0 {
        Some(0.0)
    } else {
        None
    };
    Ok(SynergyEstimate { lower, upper, mid, relative_error, per_srv_terms: terms })
}

/// Synergistic information of `inputs` about `target`.
pub fn estimate_synergy(pmf: &JointPmf, inputs: &[usize], target: &[usize], config: &SearchConfig) -> Result<SynergyEstimate> {
    if inputs.is_empty() {
        return Err(Error::EmptySet("inputs"));
    }
    if target.is_empty() {
        return Err(Error::EmptySet("target"));
    }
    check_vars(inputs, pmf.num_vars())?;
    check_vars(target, pmf.num_vars())?;
    check_disjoint(inputs, target)?;
    let sequence = maximize_ordering(pmf, inputs, target, config)?;
    synergy_terms(&sequence.base_pmf, target, &sequence)
}

/// Largest `I(X : S)` any SRV of `inputs` can have:
/// `H(X_1, ..., X_n) - max_i H(X_i)`.
pub fn srv_upper_bound(pmf: &JointPmf, inputs: &[usize]) -> Result<Bits> {
    if inputs.is_empty() {
        return Err(Error::EmptySet("inputs"));
    }
    check_vars(inputs, pmf.num_vars())?;
    let joint = raw_entropy(pmf, inputs);
    let largest = inputs.iter().map(|&v| raw_entropy(pmf, &[v])).fold(0.0, f64::max);
    clamp_info("SRV upper bound", joint - largest)
}

/// `I(X : Y) - Σ_i I(X_i : Y)`. Negative under redundancy.
pub fn whole_minus_sum(pmf: &JointPmf, inputs: &[usize], target: &[usize]) -> Result<Bits> {
    let whole = mutual_info(pmf, inputs, target)?;
    let parts = inputs
        .iter()
        .map(|&v| mutual_info(pmf, &[v], target))
        .sum::<Result<f64>>()?;
    Ok(whole - parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::cond_entropy;
    use crate::jointpmf::ConditionalPmf;
    use crate::srv::{find_osrv_sequence, SrvResult};

    fn xor() -> JointPmf {
        JointPmf::uniform(&[2, 2]).unwrap().append_redundant(2, |s| s[0] ^ s[1]).unwrap()
    }

    fn exact_sequence(pmf: &JointPmf, inputs: &[usize], maps: &[Vec<usize>]) -> OsrvSequence {
        let given: Vec<usize> = inputs.iter().map(|&v| pmf.cardinalities()[v]).collect();
        let mut base = pmf.clone();
        let mut srvs = Vec::new();
        let mut srv_indices = Vec::new();
        for map in maps {
            let cond = ConditionalPmf::deterministic(&given, 2, map).unwrap();
            base = base.append_conditioned_on(inputs, &cond).unwrap();
            srv_indices.push(base.num_vars() - 1);
            srvs.push(SrvResult {
                cond,
                mi_with_x: 1.0,
                leakage: vec![0.0; inputs.len()],
                mi_with_prior_srvs: 0.0,
                relative_error: 0.0,
                succeeded: true,
                score: 1.0,
            });
        }
        OsrvSequence { inputs: inputs.to_vec(), srvs, srv_indices, base_pmf: base }
    }

    #[test]
    fn exact_srv_bounds_coincide() {
        let seq = exact_sequence(&xor(), &[0, 1], &[vec![0, 1, 1, 0]]);
        let est = synergy_terms(&seq.base_pmf, &[2], &seq).unwrap();
        assert!((est.lower - 1.0).abs() < 1e-12);
        assert_eq!(est.lower, est.upper);
        assert_eq!(est.mid, est.raw_sum());
        assert_eq!(est.relative_error, Some(0.0));
    }

    #[test]
    fn empty_sequence_is_zero() {
        let pmf = xor();
        let seq = OsrvSequence { inputs: vec![0, 1], srvs: vec![], srv_indices: vec![], base_pmf: pmf.clone() };
        let est = synergy_terms(&pmf, &[2], &seq).unwrap();
        assert_eq!(est, SynergyEstimate::empty());
    }

    #[test]
    fn mismatched_sequence_is_rejected() {
        let seq = exact_sequence(&xor(), &[0, 1], &[vec![0, 1, 1, 0]]);
        assert!(matches!(synergy_terms(&xor(), &[2], &seq), Err(Error::SequenceMismatch(_))));
    }

    #[test]
    fn leaky_terms_clamp_at_zero() {
        // S = X1 itself: all of I(S : Y) is leakage
        let pmf = JointPmf::random(&[2, 2, 2], 3).unwrap();
        let seq = exact_sequence(&pmf, &[0, 1], &[vec![0, 0, 1, 1]]);
        let est = synergy_terms(&seq.base_pmf, &[2], &seq).unwrap();
        assert_eq!(est.lower, 0.0);
        assert!(est.lower <= est.mid && est.mid <= est.upper);
    }

    #[test]
    fn xor_estimate() {
        let cfg = SearchConfig { num_restarts: 3, ..SearchConfig::default() };
        let est = estimate_synergy(&xor(), &[0, 1], &[2], &cfg).unwrap();
        assert!((est.mid - 1.0).abs() < 0.05, "{est:?}");
    }

    #[test]
    fn single_input_target_has_no_synergy() {
        let pmf = JointPmf::random(&[3, 3], 12).unwrap().append_redundant(3, |s| s[0]).unwrap();
        let cfg = SearchConfig { num_restarts: 3, ..SearchConfig::default() };
        let est = estimate_synergy(&pmf, &[0, 1], &[2], &cfg).unwrap();
        assert!(est.mid.abs() < 0.03, "{est:?}");
    }

    #[test]
    fn upper_bound_examples() {
        let two = JointPmf::uniform(&[2, 2]).unwrap();
        assert_eq!(srv_upper_bound(&two, &[0, 1]).unwrap(), 1.0);
        for n in 2..6 {
            let bits = JointPmf::uniform(&vec![2; n]).unwrap();
            let all: Vec<usize> = (0..n).collect();
            assert!((srv_upper_bound(&bits, &all).unwrap() - (n as f64 - 1.0)).abs() < 1e-12);
        }
        let copy = JointPmf::random(&[3], 2).unwrap().append_redundant(3, |s| s[0]).unwrap();
        assert!(srv_upper_bound(&copy, &[0, 1]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn upper_bound_two_inputs_is_min_conditional_entropy() {
        for seed in 0..20 {
            let pmf = JointPmf::random(&[3, 4], seed).unwrap();
            let bound = srv_upper_bound(&pmf, &[0, 1]).unwrap();
            let alt = cond_entropy(&pmf, &[1], &[0]).unwrap().min(cond_entropy(&pmf, &[0], &[1]).unwrap());
            assert!((bound - alt).abs() < 1e-12);
        }
    }

    #[test]
    fn wms_examples() {
        assert!((whole_minus_sum(&xor(), &[0, 1], &[2]).unwrap() - 1.0).abs() < 1e-12);
        let copy = JointPmf::uniform(&[2, 2]).unwrap().append_redundant(2, |s| s[0]).unwrap();
        assert!(whole_minus_sum(&copy, &[0, 1], &[2]).unwrap().abs() < 1e-12);
        let triple = JointPmf::uniform(&[2])
            .unwrap()
            .append_redundant(2, |s| s[0])
            .unwrap()
            .append_redundant(2, |s| s[0])
            .unwrap();
        assert!((whole_minus_sum(&triple, &[0, 1], &[2]).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn sequence_terms_match_sequence_inputs() {
        let pmf = JointPmf::random(&[3, 3, 3], 40).unwrap();
        let cfg = SearchConfig { num_restarts: 2, ..SearchConfig::default() };
        let seq = find_osrv_sequence(&pmf, &[0, 1], &cfg).unwrap();
        let est = synergy_terms(&seq.base_pmf, &[2], &seq).unwrap();
        assert_eq!(est.per_srv_terms.len(), seq.len());
        for (t, s) in est.per_srv_terms.iter().zip(&seq.srvs) {
            assert!((t.leakage_sum - s.leakage_sum()).abs() < 1e-9);
        }
    }
}
