//! Brute-force ground truth on small state spaces.
//!
//! Deterministic SRVs are enumerated as restricted growth strings over the
//! joint input states: label 0 goes to the first input state, and every
//! later state either reuses a label or takes the next unused one. Each
//! relabeling class of maps is visited exactly once.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::{cond_entropy, entropy, entropy_of, mutual_info, raw_entropy, Bits};
use crate::jointpmf::{check_vars, ConditionalPmf, JointPmf};

/// Largest number of candidate maps (`k^n`) the enumeration accepts.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

const EXACT_TOL: f64 = 1e-12;

/// A deterministic function of the joint input state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DeterministicSrv {
    /// Output state for each joint input state, in row-major order.
    pub map: Vec<usize>,
    pub cardinality: usize,
}

impl DeterministicSrv {
    /// Relabels outputs by first occurrence and drops unused labels.
    pub fn canonical(map: &[usize]) -> Self {
        let mut relabel: Vec<Option<usize>> = Vec::new();
        let mut next = 0;
        let map = map
            .iter()
            .map(|&s| {
                if s >= relabel.len() {
                    relabel.resize(s + 1, None);
                }
                *relabel[s].get_or_insert_with(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect();
        Self { map, cardinality: next.max(1) }
    }

    pub fn to_conditional(&self, input_cardinalities: &[usize]) -> Result<ConditionalPmf> {
        ConditionalPmf::deterministic(input_cardinalities, self.cardinality, &self.map)
    }

    /// Appends this SRV as a new variable computed from `inputs`.
    pub fn append_to(&self, pmf: &JointPmf, inputs: &[usize]) -> Result<JointPmf> {
        check_vars(inputs, pmf.num_vars())?;
        let cards: Vec<usize> = inputs.iter().map(|&v| pmf.cardinalities()[v]).collect();
        let joint: usize = cards.iter().product();
        if joint != self.map.len() {
            return Err(Error::LengthMismatch { what: "SRV map", expected: joint, actual: self.map.len() });
        }
        let map = &self.map;
        pmf.append_redundant(self.cardinality, |state| {
            let idx = inputs.iter().zip(&cards).fold(0, |acc, (&v, &c)| acc * c + state[v]);
            map[idx]
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnumeratedSrv {
    pub srv: DeterministicSrv,
    /// `I(S : X)`, which equals `H(S)` for a deterministic map.
    pub mi_with_x: Bits,
    pub leakage: Vec<Bits>,
}

struct InputTable {
    p_x: Vec<f64>,
    /// Per input: its state for each joint input state, and its cardinality.
    digits: Vec<(Vec<usize>, usize)>,
}

impl InputTable {
    fn new(pmf: &JointPmf, inputs: &[usize]) -> Self {
        let cards: Vec<usize> = inputs.iter().map(|&v| pmf.cardinalities()[v]).collect();
        let p_x = pmf.marginal_probs(inputs);
        let mut digits: Vec<(Vec<usize>, usize)> = cards.iter().map(|&c| (Vec::with_capacity(p_x.len()), c)).collect();
        for idx in 0..p_x.len() {
            let mut rest = idx;
            for (i, &c) in cards.iter().enumerate().rev() {
                digits[i].0.push(rest % c);
                rest /= c;
            }
        }
        Self { p_x, digits }
    }

    fn evaluate(&self, map: &[usize], k: usize, leak_tol: f64) -> Option<EnumeratedSrv> {
        let mut p_s = vec![0.0; k];
        for (&s, &p) in map.iter().zip(&self.p_x) {
            p_s[s] += p;
        }
        let h_s = entropy_of(&p_s);
        if h_s <= leak_tol {
            return None;
        }
        let mut leakage = Vec::with_capacity(self.digits.len());
        for (digit, c) in &self.digits {
            let mut joint = vec![0.0; c * k];
            let mut p_i = vec![0.0; *c];
            for ((&s, &p), &d) in map.iter().zip(&self.p_x).zip(digit) {
                joint[d * k + s] += p;
                p_i[d] += p;
            }
            let leak = (h_s + entropy_of(&p_i) - entropy_of(&joint)).max(0.0);
            if leak > leak_tol {
                return None;
            }
            leakage.push(leak);
        }
        Some(EnumeratedSrv {
            srv: DeterministicSrv { map: map.to_vec(), cardinality: k },
            mi_with_x: h_s,
            leakage,
        })
    }
}

fn extend(table: &InputTable, map: &mut Vec<usize>, used: usize, k: usize, n: usize, leak_tol: f64, out: &mut Vec<EnumeratedSrv>) {
    if map.len() == n {
        if let Some(found) = table.evaluate(map, used, leak_tol) {
            out.push(found);
        }
        return;
    }
    for s in 0..(used + 1).min(k) {
        map.push(s);
        extend(table, map, used.max(s + 1), k, n, leak_tol, out);
        map.pop();
    }
}

/// All deterministic SRVs of `inputs` with at most `out_cardinality`
/// output states, one per relabeling class, in lexicographic map order.
///
/// A map qualifies when every `I(S : X_i) <= leak_tol` and
/// `I(S : X) > leak_tol`. Each result's `cardinality` is the number of
/// labels it uses.
pub fn enumerate_srvs(pmf: &JointPmf, inputs: &[usize], out_cardinality: usize, leak_tol: f64) -> Result<Vec<EnumeratedSrv>> {
    if inputs.is_empty() {
        return Err(Error::EmptySet("inputs"));
    }
    check_vars(inputs, pmf.num_vars())?;
    if out_cardinality < 2 {
        return Err(Error::CardinalityTooSmall { index: 0, cardinality: out_cardinality });
    }
    if !(leak_tol >= 0.0) {
        return Err(Error::InvalidConfig(format!("leak_tol {leak_tol} must be non-negative")));
    }
    let n: usize = inputs.iter().map(|&v| pmf.cardinalities()[v]).product();
    let budget = (out_cardinality as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if budget > ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge { budget, limit: ENUMERATION_LIMIT });
    }
    if inputs.len() == 1 {
        return Ok(Vec::new());
    }
    let table = InputTable::new(pmf, inputs);

    // split the search tree on short prefixes and walk the subtrees in parallel
    let depth = n.min(4);
    let mut prefixes = Vec::new();
    let mut stack = vec![(vec![0usize], 1usize)];
    while let Some((prefix, used)) = stack.pop() {
        if prefix.len() == depth {
            prefixes.push((prefix, used));
            continue;
        }
        for s in (0..(used + 1).min(out_cardinality)).rev() {
            let mut p = prefix.clone();
            p.push(s);
            stack.push((p, used.max(s + 1)));
        }
    }
    let found: Vec<Vec<EnumeratedSrv>> = prefixes
        .into_par_iter()
        .map(|(mut prefix, used)| {
            let mut out = Vec::new();
            extend(&table, &mut prefix, used, out_cardinality, n, leak_tol, &mut out);
            out
        })
        .collect();
    Ok(found.into_iter().flatten().collect())
}

/// One `(n - 1 -> 1)` split of an SRV group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CliqueSplit {
    /// Position in the group of the SRV on the receiving end.
    pub target: usize,
    /// `I(rest : S_target)`.
    pub mi: Bits,
    /// Value implied by the reference split.
    pub predicted: Bits,
}

#[derive(Debug, Clone, Serialize)]
pub struct CliqueReport {
    /// `I(S_1..S_{n-1} : S_n)`, the split with the last SRV as target.
    pub d: Bits,
    pub pairwise_mi: Vec<Vec<Bits>>,
    pub pairwise_independent: bool,
    pub splits: Vec<CliqueSplit>,
    pub max_deviation: Bits,
    pub holds: bool,
}

/// Checks that synergy among SRVs forms a clique: every `(n - 1 -> 1)`
/// split carries the same information `d` when the SRVs are pairwise
/// independent. For three SRVs with pairwise dependence the splits differ
/// by `I(S_i : S_j) - I(S_i : S_k)`, which is used as the prediction.
pub fn verify_clique(pmf_with_srvs: &JointPmf, srv_sets: &[Vec<usize>], tol: Bits) -> Result<CliqueReport> {
    let n = srv_sets.len();
    if n < 2 {
        return Err(Error::InvalidConfig("a clique needs at least two SRVs".into()));
    }
    for (i, s) in srv_sets.iter().enumerate() {
        if s.is_empty() {
            return Err(Error::EmptySet("SRV set"));
        }
        check_vars(s, pmf_with_srvs.num_vars())?;
        for other in &srv_sets[..i] {
            crate::jointpmf::check_disjoint(s, other)?;
        }
    }
    let rest = |k: usize| -> Vec<usize> {
        srv_sets
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .flat_map(|(_, s)| s.iter().copied())
            .collect()
    };
    let mut pairwise_mi = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                pairwise_mi[i][j] = mutual_info(pmf_with_srvs, &srv_sets[i], &srv_sets[j])?;
            }
        }
    }
    let pairwise_independent = pairwise_mi.iter().flatten().all(|&v| v <= tol);
    let reference = n - 1;
    let d = mutual_info(pmf_with_srvs, &rest(reference), &srv_sets[reference])?;
    let mut splits = Vec::with_capacity(n);
    for k in 0..n {
        let mi = mutual_info(pmf_with_srvs, &rest(k), &srv_sets[k])?;
        let predicted = if n == 3 && k != reference {
            // the remaining member j: I(S_j : S_k) - I(S_j : S_ref)
            let j = 3 - k - reference;
            d + pairwise_mi[j][k] - pairwise_mi[j][reference]
        } else {
            d
        };
        splits.push(CliqueSplit { target: k, mi, predicted });
    }
    let max_deviation = splits.iter().map(|s| (s.mi - s.predicted).abs()).fold(0.0, f64::max);
    Ok(CliqueReport {
        d,
        pairwise_mi,
        pairwise_independent,
        holds: max_deviation <= tol && (n == 3 || pairwise_independent),
        splits,
        max_deviation,
    })
}

/// Name of a binary map over bits when it is a parity of a subset of them
/// (or its complement), e.g. `X1⊕X3`.
pub fn parity_name(map: &[usize], num_bits: usize) -> Option<String> {
    if map.len() != 1 << num_bits {
        return None;
    }
    for subset in 1usize..(1 << num_bits) {
        // bit i of the state index is input variable num_bits - 1 - i
        let parity = |x: usize| ((x & subset).count_ones() % 2) as usize;
        let same = (0..map.len()).all(|x| map[x] == parity(x));
        let flipped = (0..map.len()).all(|x| map[x] == 1 - parity(x));
        if same || flipped {
            let names: Vec<String> = (0..num_bits)
                .filter(|&v| subset & (1 << (num_bits - 1 - v)) != 0)
                .map(|v| format!("X{}", v + 1))
                .collect();
            return Some(names.join("⊕"));
        }
    }
    None
}

#[derive(Debug, Clone, Serialize)]
pub struct CensusClass {
    pub map: Vec<usize>,
    pub cardinality: usize,
    pub mi_with_x: Bits,
    pub name: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThreeBitCensus {
    /// Largest output cardinality enumerated.
    pub max_out_cardinality: usize,
    /// Every deterministic SRV class found, over all enumerated cardinalities.
    pub num_classes: usize,
    /// Classes attaining the largest `I(S : X)` among binary SRVs.
    pub maximal_binary: Vec<CensusClass>,
    /// A largest family of maximal binary classes that is pairwise independent.
    pub pairwise_independent_family: Vec<CensusClass>,
    pub family_pairwise_mi: Vec<Vec<Bits>>,
    pub family_joint_entropy: Bits,
    pub pairwise_xors_found: bool,
    /// `H(X1⊕X2, X2⊕X3, X1⊕X3)`.
    pub pairwise_xor_joint_entropy: Bits,
    /// `H(X1⊕X3 | X1⊕X2, X2⊕X3)`.
    pub pairwise_xor_redundancy: Bits,
    /// `Σ I(Y : S_i)` with `Y = X` over a mutually independent ordering of
    /// the family; redundant members contribute nothing.
    pub synergy_about_self: Bits,
}

fn xor_map(a: usize, b: usize) -> Vec<usize> {
    (0..8)
        .map(|x| {
            let bit = |v: usize| (x >> (2 - v)) & 1;
            bit(a) ^ bit(b)
        })
        .collect()
}

/// Enumerates the deterministic SRVs of three independent uniform bits.
pub fn three_bit_msrv_census(max_out_cardinality: usize) -> Result<ThreeBitCensus> {
    let bits = JointPmf::uniform(&[2, 2, 2])?;
    let inputs = [0, 1, 2];
    let mut num_classes = 0;
    let mut binary = Vec::new();
    for k in 2..=max_out_cardinality.max(2) {
        let found = enumerate_srvs(&bits, &inputs, k, EXACT_TOL)?;
        // classes using exactly k labels; smaller ones were counted already
        num_classes += found.iter().filter(|f| f.srv.cardinality == k).count();
        if k == 2 {
            binary = found;
        }
    }
    let best = binary.iter().map(|f| f.mi_with_x).fold(0.0, f64::max);
    let maximal: Vec<&EnumeratedSrv> = binary.iter().filter(|f| f.mi_with_x >= best - EXACT_TOL).collect();
    let class = |f: &EnumeratedSrv| CensusClass {
        map: f.srv.map.clone(),
        cardinality: f.srv.cardinality,
        mi_with_x: f.mi_with_x,
        name: parity_name(&f.srv.map, 3),
    };

    // pairwise independence graph over the maximal classes
    let mut with_all = bits.clone();
    for f in &maximal {
        with_all = f.srv.append_to(&with_all, &inputs)?;
    }
    let m = maximal.len();
    let mut independent = vec![vec![false; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let mi = mutual_info(&with_all, &[3 + i], &[3 + j])?;
            independent[i][j] = mi <= EXACT_TOL;
            independent[j][i] = independent[i][j];
        }
    }
    let family = largest_clique(&independent);
    let family_vars: Vec<usize> = family.iter().map(|&i| 3 + i).collect();
    let mut family_pairwise_mi = vec![vec![0.0; family.len()]; family.len()];
    for (a, &va) in family_vars.iter().enumerate() {
        for (b, &vb) in family_vars.iter().enumerate() {
            if a != b {
                family_pairwise_mi[a][b] = mutual_info(&with_all, &[va], &[vb])?;
            }
        }
    }
    let family_joint_entropy = if family_vars.is_empty() { 0.0 } else { entropy(&with_all, &family_vars)? };

    // greedy mutually independent ordering, then Y = copy of X
    let mut chosen: Vec<usize> = Vec::new();
    for &v in &family_vars {
        if chosen.is_empty() || mutual_info(&with_all, &[v], &chosen)? <= EXACT_TOL {
            chosen.push(v);
        }
    }
    let with_y = with_all.append_redundant(8, |s| 4 * s[0] + 2 * s[1] + s[2])?;
    let y = with_y.num_vars() - 1;
    let synergy_about_self = chosen.iter().map(|&v| mutual_info(&with_y, &[v], &[y])).sum::<Result<Bits>>()?;

    let xors = [xor_map(0, 1), xor_map(1, 2), xor_map(0, 2)];
    let pairwise_xors_found = xors
        .iter()
        .all(|x| maximal.iter().any(|f| f.srv.map == DeterministicSrv::canonical(x).map));
    let mut with_xors = bits.clone();
    for x in &xors {
        with_xors = DeterministicSrv::canonical(x).append_to(&with_xors, &inputs)?;
    }
    Ok(ThreeBitCensus {
        max_out_cardinality: max_out_cardinality.max(2),
        num_classes,
        maximal_binary: maximal.iter().map(|f| class(f)).collect(),
        pairwise_independent_family: family.iter().map(|&i| class(maximal[i])).collect(),
        family_pairwise_mi,
        family_joint_entropy,
        pairwise_xors_found,
        pairwise_xor_joint_entropy: raw_entropy(&with_xors, &[3, 4, 5]),
        pairwise_xor_redundancy: cond_entropy(&with_xors, &[5], &[3, 4])?,
        synergy_about_self,
    })
}

/// Largest set of mutually adjacent vertices, ties broken by the
/// lexicographically smallest vertex list.
fn largest_clique(adjacent: &[Vec<bool>]) -> Vec<usize> {
    fn grow(adjacent: &[Vec<bool>], current: &mut Vec<usize>, start: usize, best: &mut Vec<usize>) {
        if current.len() > best.len() {
            *best = current.clone();
        }
        for v in start..adjacent.len() {
            if current.iter().all(|&u| adjacent[u][v]) {
                current.push(v);
                grow(adjacent, current, v + 1, best);
                current.pop();
            }
        }
    }
    let mut best = Vec::new();
    grow(adjacent, &mut Vec::new(), 0, &mut best);
    best
}
