//! Numerical search for synergistic random variables (SRVs).
//!
//! An SRV `S` of inputs `X = (X_1, ..., X_n)` is a variable computed from
//! `X` through a conditional `Pr(S | X)` with `I(S : X) > 0` and
//! `I(S : X_i) = 0` for every individual input. The search optimizes the
//! stick-breaking coordinates of `Pr(S | X)` to maximize the penalized score
//!
//! ```text
//! I(S : X) - λ (Σ_i I(S : X_i) + I(S : S_1, ..., S_{k-1}))
//! ```
//!
//! where the last term only appears when earlier SRVs `S_1..S_{k-1}` are
//! already part of the distribution. A sequence of mutually independent
//! SRVs is grown one variable at a time until no further SRV is found.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{entropy_of, Bits};
use crate::jointpmf::{check_disjoint, check_vars, decode_row, uniform_sticks, ConditionalPmf, JointPmf};
use crate::optim::{minimize_unit_box, BoxOptions};
use crate::seeds::sub_seed;
use crate::synergy;

fn default_penalty() -> f64 {
    100.0
}
fn default_restarts() -> usize {
    10
}
fn default_max_iters() -> usize {
    20_000
}
fn default_success() -> f64 {
    0.10
}
fn default_independence() -> f64 {
    0.01
}
fn default_stop_gain() -> f64 {
    0.01
}
fn default_max_len() -> usize {
    12
}

/// Settings of the SRV search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    /// State count of each SRV; the input cardinality when absent.
    #[serde(default)]
    pub srv_cardinality: Option<usize>,
    #[serde(default = "default_penalty")]
    pub penalty_weight: f64,
    #[serde(default = "default_restarts")]
    pub num_restarts: usize,
    /// Objective evaluations per local optimization.
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_success")]
    pub success_threshold: f64,
    #[serde(default = "default_independence")]
    pub independence_tol: Bits,
    #[serde(default = "default_stop_gain")]
    pub stop_gain: Bits,
    /// Hard cap on the number of SRVs in one sequence.
    #[serde(default = "default_max_len")]
    pub max_sequence_len: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            srv_cardinality: None,
            penalty_weight: default_penalty(),
            num_restarts: default_restarts(),
            max_iters: default_max_iters(),
            success_threshold: default_success(),
            independence_tol: default_independence(),
            stop_gain: default_stop_gain(),
            max_sequence_len: default_max_len(),
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if let Some(k) = self.srv_cardinality {
            if k < 2 {
                return bad(format!("srv_cardinality {k} must be at least 2"));
            }
        }
        if !(self.penalty_weight > 0.0) || !self.penalty_weight.is_finite() {
            return bad(format!("penalty_weight {} must be positive", self.penalty_weight));
        }
        if self.num_restarts == 0 {
            return bad("num_restarts must be positive".into());
        }
        if self.max_iters == 0 {
            return bad("max_iters must be positive".into());
        }
        if !(self.success_threshold > 0.0 && self.success_threshold < 1.0) {
            return bad(format!("success_threshold {} must lie in (0, 1)", self.success_threshold));
        }
        if !(self.independence_tol > 0.0) {
            return bad(format!("independence_tol {} must be positive", self.independence_tol));
        }
        if !(self.stop_gain > 0.0) {
            return bad(format!("stop_gain {} must be positive", self.stop_gain));
        }
        if self.max_sequence_len == 0 {
            return bad("max_sequence_len must be positive".into());
        }
        Ok(())
    }

    pub(crate) fn local_options(&self) -> BoxOptions {
        BoxOptions {
            max_evals: self.max_iters,
            ..BoxOptions::default()
        }
    }
}

/// One SRV found by the search.
#[derive(Debug, Clone, Serialize)]
pub struct SrvResult {
    /// `Pr(S | X)` over the joint input states.
    pub cond: ConditionalPmf,
    pub mi_with_x: Bits,
    /// `I(S : X_i)` per input, in input order.
    pub leakage: Vec<Bits>,
    pub mi_with_prior_srvs: Bits,
    /// `Σ_i I(S : X_i) / I(S : X)`; infinite when `I(S : X) = 0`.
    pub relative_error: f64,
    pub succeeded: bool,
    /// Penalized score the restarts were ranked by.
    pub score: f64,
}

impl SrvResult {
    pub fn leakage_sum(&self) -> Bits {
        self.leakage.iter().sum()
    }

    pub fn leakage_max(&self) -> Bits {
        self.leakage.iter().copied().fold(0.0, f64::max)
    }
}

/// SRVs found one after another, each constrained to be independent of the
/// ones before it.
#[derive(Debug, Clone, Serialize)]
pub struct OsrvSequence {
    pub inputs: Vec<usize>,
    pub srvs: Vec<SrvResult>,
    /// Variable index of each SRV in `base_pmf`.
    pub srv_indices: Vec<usize>,
    /// The input distribution with every SRV appended.
    pub base_pmf: JointPmf,
}

impl OsrvSequence {
    pub fn len(&self) -> usize {
        self.srvs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.srvs.is_empty()
    }
}

#[derive(Debug, Clone)]
struct Metrics {
    mi: f64,
    leakage: Vec<f64>,
    prior_mi: f64,
}

/// Precomputed tables for scoring candidate conditionals `Pr(S | X)`.
struct SrvProblem {
    k: usize,
    /// `Pr(x)` over joint input states.
    p_x: Vec<f64>,
    /// Per input variable: its state for each joint input state, its cardinality.
    digits: Vec<(Vec<usize>, usize)>,
    /// `Pr(x, sp)` row-major with `sp` fastest, and the number of `sp` states.
    p_x_prior: Vec<f64>,
    n_prior: usize,
}

fn mi_from_joint(joint: &[f64], rows: usize, cols: usize) -> f64 {
    let mut pr = vec![0.0; rows];
    let mut pc = vec![0.0; cols];
    for r in 0..rows {
        for c in 0..cols {
            let p = joint[r * cols + c];
            pr[r] += p;
            pc[c] += p;
        }
    }
    entropy_of(&pr) + entropy_of(&pc) - entropy_of(joint)
}

impl SrvProblem {
    fn new(pmf: &JointPmf, inputs: &[usize], priors: &[usize], k: usize) -> Self {
        let cards: Vec<usize> = inputs.iter().map(|&v| pmf.cardinalities()[v]).collect();
        let n_x: usize = cards.iter().product();
        let p_x = pmf.marginal_probs(inputs);
        let digits = cards
            .iter()
            .enumerate()
            .map(|(i, &m)| {
                let stride: usize = cards[i + 1..].iter().product();
                ((0..n_x).map(|x| (x / stride) % m).collect(), m)
            })
            .collect();
        let n_prior: usize = priors.iter().map(|&v| pmf.cardinalities()[v]).product();
        let both: Vec<usize> = inputs.iter().chain(priors).copied().collect();
        let p_x_prior = pmf.marginal_probs(&both);
        Self { k, p_x, digits, p_x_prior, n_prior }
    }

    fn n_x(&self) -> usize {
        self.p_x.len()
    }

    fn dim(&self) -> usize {
        self.n_x() * (self.k - 1)
    }

    fn decode(&self, params: &[f64]) -> Vec<f64> {
        let k = self.k;
        let mut q = vec![0.0; self.n_x() * k];
        for (x, row) in q.chunks_mut(k).enumerate() {
            decode_row(&params[x * (k - 1)..(x + 1) * (k - 1)], row);
        }
        q
    }

    fn metrics(&self, q: &[f64]) -> Metrics {
        let k = self.k;
        let mut joint = vec![0.0; self.n_x() * k];
        for (x, (&px, row)) in self.p_x.iter().zip(q.chunks(k)).enumerate() {
            for s in 0..k {
                joint[x * k + s] = px * row[s];
            }
        }
        let mi = mi_from_joint(&joint, self.n_x(), k);
        let leakage = self
            .digits
            .iter()
            .map(|(digit, m)| {
                let mut marg = vec![0.0; m * k];
                for (x, &d) in digit.iter().enumerate() {
                    for s in 0..k {
                        marg[d * k + s] += joint[x * k + s];
                    }
                }
                mi_from_joint(&marg, *m, k).max(0.0)
            })
            .collect();
        let prior_mi = if self.n_prior > 1 {
            let mut marg = vec![0.0; self.n_prior * k];
            for x in 0..self.n_x() {
                let row = &q[x * k..(x + 1) * k];
                for sp in 0..self.n_prior {
                    let p = self.p_x_prior[x * self.n_prior + sp];
                    if p > 0.0 {
                        for s in 0..k {
                            marg[sp * k + s] += p * row[s];
                        }
                    }
                }
            }
            mi_from_joint(&marg, self.n_prior, k).max(0.0)
        } else {
            0.0
        };
        Metrics { mi: mi.max(0.0), leakage, prior_mi }
    }

    fn score(&self, m: &Metrics, lambda: f64) -> f64 {
        m.mi - lambda * (m.leakage.iter().sum::<f64>() + m.prior_mi)
    }

    /// Orthogonal projection of `q` onto the conditionals with
    /// `Pr(s, sp) = Pr(s) Pr(sp)` and unit row sums, pulled towards the
    /// uniform conditional just far enough to be non-negative. The uniform
    /// conditional satisfies both constraint sets, so the result is exactly
    /// independent of the prior SRVs.
    fn project_independent(&self, q: &[f64]) -> Vec<f64> {
        let k = self.k;
        let n_x = self.n_x();
        let np = self.n_prior;
        let cols = n_x * k;
        let p_sp: Vec<f64> = (0..np)
            .map(|sp| (0..n_x).map(|x| self.p_x_prior[x * np + sp]).sum())
            .collect();
        let rows = np * k + n_x;
        let mut c = DMatrix::<f64>::zeros(rows, cols);
        let mut d = vec![0.0; rows];
        for sp in 0..np {
            for s in 0..k {
                let r = sp * k + s;
                for x in 0..n_x {
                    c[(r, x * k + s)] = self.p_x_prior[x * np + sp] - p_sp[sp] * self.p_x[x];
                }
            }
        }
        for x in 0..n_x {
            let r = np * k + x;
            for s in 0..k {
                c[(r, x * k + s)] = 1.0;
            }
            d[r] = 1.0;
        }
        let q0 = nalgebra::DVector::from_column_slice(q);
        let residual = &c * &q0 - nalgebra::DVector::from_vec(d);
        let Ok(pinv) = c.pseudo_inverse(1e-12) else {
            return q.to_vec();
        };
        let projected = q0 - pinv * residual;
        let uniform = 1.0 / k as f64;
        let alpha = projected
            .iter()
            .filter(|&&v| v < 0.0)
            .map(|&v| -v / (uniform - v))
            .fold(0.0, f64::max);
        projected
            .iter()
            .map(|&v| ((1.0 - alpha) * v + alpha * uniform).max(0.0))
            .collect::<Vec<f64>>()
            .chunks(k)
            .flat_map(|row| {
                let total: f64 = row.iter().sum();
                row.iter().map(move |v| v / total).collect::<Vec<f64>>()
            })
            .collect()
    }
}

fn srv_cardinality(pmf: &JointPmf, inputs: &[usize], config: &SearchConfig) -> usize {
    config
        .srv_cardinality
        .unwrap_or_else(|| inputs.iter().map(|&v| pmf.cardinalities()[v]).max().unwrap_or(2))
}

fn build_result(problem: &SrvProblem, q: Vec<f64>, given: Vec<usize>, config: &SearchConfig) -> SrvResult {
    let metrics = problem.metrics(&q);
    let score = problem.score(&metrics, config.penalty_weight);
    let leak: f64 = metrics.leakage.iter().sum();
    let relative_error = if metrics.mi > 0.0 { leak / metrics.mi } else { f64::INFINITY };
    SrvResult {
        cond: ConditionalPmf::from_rows_unchecked(given, vec![problem.k], q),
        mi_with_x: metrics.mi,
        leakage: metrics.leakage,
        mi_with_prior_srvs: metrics.prior_mi,
        relative_error,
        succeeded: relative_error < config.success_threshold,
        score,
    }
}

fn check_inputs(pmf: &JointPmf, inputs: &[usize]) -> Result<()> {
    if inputs.is_empty() {
        return Err(Error::EmptySet("inputs"));
    }
    check_vars(inputs, pmf.num_vars())
}

/// Best SRV of `inputs` over all restarts.
pub fn find_srv(pmf: &JointPmf, inputs: &[usize], config: &SearchConfig) -> Result<SrvResult> {
    find_srv_with_priors(pmf, inputs, &[], config)
}

/// Best SRV of `inputs` that is also independent of the variables `priors`
/// (earlier SRVs already appended to `pmf`).
pub fn find_srv_with_priors(pmf: &JointPmf, inputs: &[usize], priors: &[usize], config: &SearchConfig) -> Result<SrvResult> {
    config.validate()?;
    check_inputs(pmf, inputs)?;
    check_vars(priors, pmf.num_vars())?;
    check_disjoint(inputs, priors)?;
    let k = srv_cardinality(pmf, inputs, config);
    let given: Vec<usize> = inputs.iter().map(|&v| pmf.cardinalities()[v]).collect();
    let rows: usize = given.iter().product();
    crate::jointpmf::table_size(&[rows, k])?;
    let problem = SrvProblem::new(pmf, inputs, priors, k);

    if inputs.len() == 1 {
        // a single variable has no synergy: every candidate is pure leakage
        let q = vec![1.0 / k as f64; rows * k];
        return Ok(build_result(&problem, q, given, config));
    }

    let options = config.local_options();
    let lambda = config.penalty_weight;
    let dim = problem.dim();
    let uniform_start: Vec<f64> = (0..rows).flat_map(|_| uniform_sticks(k)).collect();
    let runs: Vec<(f64, Vec<f64>)> = (0..config.num_restarts)
        .into_par_iter()
        .map(|r| {
            let x0 = if r == 0 {
                uniform_start.clone()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(config.seed, r as u64));
                (0..dim).map(|_| rng.random::<f64>()).collect()
            };
            let objective = |params: &[f64]| {
                let q = problem.decode(params);
                -problem.score(&problem.metrics(&q), lambda)
            };
            let found = minimize_unit_box(objective, &x0, &options);
            (-found.value, found.x)
        })
        .collect();
    // highest score wins; ties go to the lowest restart index
    let (_, best) = runs
        .into_iter()
        .enumerate()
        .fold(None, |acc: Option<(f64, Vec<f64>)>, (_, (score, x))| match acc {
            Some((s, _)) if s >= score => acc,
            _ => Some((score, x)),
        })
        .expect("at least one restart");
    let mut q = problem.decode(&best);
    if !priors.is_empty() {
        q = problem.project_independent(&q);
    }
    Ok(build_result(&problem, q, given, config))
}

/// Grows a sequence of mutually independent SRVs of `inputs`.
///
/// Stops when the next SRV carries less than `stop_gain` bits about the
/// inputs, fails the success threshold, or is not independent of its
/// predecessors within `independence_tol`.
pub fn find_osrv_sequence(pmf: &JointPmf, inputs: &[usize], config: &SearchConfig) -> Result<OsrvSequence> {
    config.validate()?;
    check_inputs(pmf, inputs)?;
    let mut base = pmf.clone();
    let mut srvs = Vec::new();
    let mut srv_indices = Vec::new();
    if inputs.len() >= 2 {
        while srvs.len() < config.max_sequence_len {
            let step = SearchConfig {
                seed: sub_seed(config.seed, 1_000_003 + srvs.len() as u64),
                ..config.clone()
            };
            let found = find_srv_with_priors(&base, inputs, &srv_indices, &step)?;
            if found.mi_with_x < config.stop_gain
                || !found.succeeded
                || found.mi_with_prior_srvs > config.independence_tol
            {
                break;
            }
            base = base.append_conditioned_on(inputs, &found.cond)?;
            srv_indices.push(base.num_vars() - 1);
            srvs.push(found);
        }
    }
    Ok(OsrvSequence {
        inputs: inputs.to_vec(),
        srvs,
        srv_indices,
        base_pmf: base,
    })
}

/// Runs the sequence search from `num_restarts` different seeds and keeps
/// the sequence whose synergy about `target` is largest (ties: lowest
/// restart). The first restart uses `config.seed` unchanged.
pub fn maximize_ordering(pmf: &JointPmf, inputs: &[usize], target: &[usize], config: &SearchConfig) -> Result<OsrvSequence> {
    config.validate()?;
    check_inputs(pmf, inputs)?;
    if target.is_empty() {
        return Err(Error::EmptySet("target"));
    }
    check_vars(target, pmf.num_vars())?;
    check_disjoint(inputs, target)?;
    let candidates: Vec<Result<(f64, OsrvSequence)>> = (0..config.num_restarts)
        .into_par_iter()
        .map(|r| {
            let seed = if r == 0 { config.seed } else { sub_seed(config.seed, 2_000_003 + r as u64) };
            let cfg = SearchConfig { seed, ..config.clone() };
            let seq = find_osrv_sequence(pmf, inputs, &cfg)?;
            let est = synergy::synergy_terms(&seq.base_pmf, target, &seq)?;
            Ok((est.mid, seq))
        })
        .collect();
    let mut best: Option<(f64, OsrvSequence)> = None;
    for candidate in candidates {
        let (mid, seq) = candidate?;
        if best.as_ref().is_none_or(|(b, _)| mid > *b) {
            best = Some((mid, seq));
        }
    }
    Ok(best.expect("at least one restart").1)
}
