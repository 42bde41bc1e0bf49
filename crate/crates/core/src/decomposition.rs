//! Orthogonal decomposition of a variable `B` relative to `A` into a part
//! `B⊥` independent of `A` and a part `B∥` carrying exactly `I(A : B)`.
//!
//! A decomposition must satisfy
//!
//! | condition          | requirement                 |
//! |--------------------|-----------------------------|
//! | sufficiency        | `I(B⊥, B∥ : B) = H(B)`      |
//! | orthogonality      | `I(B⊥ : A) = 0`             |
//! | parallelism        | `I(B∥ : A) = I(B : A)`      |
//! | non-spuriousness   | `I(B∥ : A | B) = 0`         |
//! | parsimony          | `I(B∥ : B) = I(B : A)`      |
//!
//! and, as a consequence of the above, `I(B⊥ : B∥) = 0`. The numerical
//! solver searches `Pr(B⊥ | B) Pr(B∥ | B)` (or the full `Pr(B⊥, B∥ | B)`)
//! and reports how far its best candidate is from each condition. Not converging is inconclusive in general; for
//! binary `A`, `B` with `Pr(B = A) ≠ 1/2` no decomposition exists.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{cond_mutual_info, entropy_of, mutual_info, raw_entropy, Bits};
use crate::jointpmf::{check_disjoint, check_vars, decode_row, ConditionalPmf, JointPmf};
use crate::optim::{minimize_unit_box, BoxOptions};
use crate::seeds::sub_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecompositionConfig {
    /// State counts of `B⊥` and `B∥`; the joint cardinality of `B` when absent.
    pub perp_cardinality: Option<usize>,
    pub parallel_cardinality: Option<usize>,
    /// Search `Pr(B⊥ | B) Pr(B∥ | B)` instead of the full `Pr(B⊥, B∥ | B)`.
    pub product_form: bool,
    /// A candidate is converged when every residual is at most this.
    pub tol: Bits,
    pub num_restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for DecompositionConfig {
    fn default() -> Self {
        Self {
            perp_cardinality: None,
            parallel_cardinality: None,
            product_form: true,
            tol: 1e-3,
            num_restarts: 10,
            max_iters: 40_000,
            seed: 0,
        }
    }
}

impl DecompositionConfig {
    pub fn validate(&self) -> Result<()> {
        for k in [self.perp_cardinality, self.parallel_cardinality].into_iter().flatten() {
            if k < 2 {
                return Err(Error::InvalidConfig(format!("part cardinality {k} must be at least 2")));
            }
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!("tol {} must be positive", self.tol)));
        }
        if self.num_restarts == 0 || self.max_iters == 0 {
            return Err(Error::InvalidConfig("num_restarts and max_iters must be positive".into()));
        }
        Ok(())
    }
}

/// Distance from each decomposition condition, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub sufficiency: Bits,
    pub orthogonality: Bits,
    pub parallelism: Bits,
    pub non_spuriousness: Bits,
    pub parsimony: Bits,
    pub independence: Bits,
}

impl Residuals {
    pub fn as_array(&self) -> [Bits; 6] {
        [
            self.sufficiency,
            self.orthogonality,
            self.parallelism,
            self.non_spuriousness,
            self.parsimony,
            self.independence,
        ]
    }

    pub fn max(&self) -> Bits {
        self.as_array().into_iter().fold(0.0, f64::max)
    }

    fn sum_squares(&self) -> f64 {
        self.as_array().iter().map(|r| r * r).sum()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionResult {
    /// `Pr(B⊥ | A, B)`.
    pub perp_cond: ConditionalPmf,
    /// `Pr(B∥ | A, B)`.
    pub parallel_cond: ConditionalPmf,
    pub residuals: Residuals,
    pub independence_residual: Bits,
    pub converged: bool,
    /// Input distribution with `B⊥` and `B∥` appended, in that order.
    #[serde(skip)]
    pub pmf_with_parts: JointPmf,
}

/// Residuals of a candidate `(B⊥, B∥)` already present in the distribution.
pub fn verify_decomposition(pmf: &JointPmf, a: &[usize], b: &[usize], b_perp: &[usize], b_parallel: &[usize]) -> Result<Residuals> {
    let sets = [a, b, b_perp, b_parallel];
    for (i, s) in sets.iter().enumerate() {
        if s.is_empty() {
            return Err(Error::EmptySet("decomposition variable set"));
        }
        check_vars(s, pmf.num_vars())?;
        for other in &sets[..i] {
            check_disjoint(s, other)?;
        }
    }
    let parts: Vec<usize> = b_perp.iter().chain(b_parallel).copied().collect();
    let h_b = raw_entropy(pmf, b);
    let i_ab = mutual_info(pmf, a, b)?;
    Ok(Residuals {
        sufficiency: (mutual_info(pmf, &parts, b)? - h_b).abs(),
        orthogonality: mutual_info(pmf, b_perp, a)?,
        parallelism: (mutual_info(pmf, b_parallel, a)? - i_ab).abs(),
        non_spuriousness: cond_mutual_info(pmf, b_parallel, a, b)?,
        parsimony: (mutual_info(pmf, b_parallel, b)? - i_ab).abs(),
        independence: mutual_info(pmf, b_perp, b_parallel)?,
    })
}

/// Fast residual evaluation for candidates `Pr(B⊥, B∥ | B)` on a fixed
/// `Pr(A, B)` table. Axes: A, B, B⊥, B∥.
struct Problem {
    na: usize,
    nb: usize,
    kp: usize,
    kl: usize,
    p_ab: Vec<f64>,
    h_b: f64,
    h_a: f64,
    h_ab: f64,
    i_ab: f64,
    product: bool,
}

impl Problem {
    fn dim(&self) -> usize {
        if self.product {
            self.nb * (self.kp - 1 + self.kl - 1)
        } else {
            self.nb * (self.kp * self.kl - 1)
        }
    }

    fn decode(&self, params: &[f64]) -> Vec<f64> {
        let width = self.kp * self.kl;
        let mut r = vec![0.0; self.nb * width];
        if self.product {
            let per = self.kp - 1 + self.kl - 1;
            let mut rp = vec![0.0; self.kp];
            let mut rl = vec![0.0; self.kl];
            for (b, row) in r.chunks_mut(width).enumerate() {
                let x = &params[b * per..(b + 1) * per];
                decode_row(&x[..self.kp - 1], &mut rp);
                decode_row(&x[self.kp - 1..], &mut rl);
                for p in 0..self.kp {
                    for l in 0..self.kl {
                        row[p * self.kl + l] = rp[p] * rl[l];
                    }
                }
            }
        } else {
            for (b, row) in r.chunks_mut(width).enumerate() {
                decode_row(&params[b * (width - 1)..(b + 1) * (width - 1)], row);
            }
        }
        r
    }

    fn residuals(&self, r: &[f64]) -> Residuals {
        let (na, nb, kp, kl) = (self.na, self.nb, self.kp, self.kl);
        let width = kp * kl;
        let mut a_p = vec![0.0; na * kp];
        let mut a_l = vec![0.0; na * kl];
        let mut b_l = vec![0.0; nb * kl];
        let mut b_pl = vec![0.0; nb * width];
        let mut pl = vec![0.0; width];
        let mut a_b_l = vec![0.0; na * nb * kl];
        for a in 0..na {
            for b in 0..nb {
                let pab = self.p_ab[a * nb + b];
                if pab == 0.0 {
                    continue;
                }
                for p in 0..kp {
                    for l in 0..kl {
                        let v = pab * r[b * width + p * kl + l];
                        a_p[a * kp + p] += v;
                        a_l[a * kl + l] += v;
                        b_l[b * kl + l] += v;
                        b_pl[b * width + p * kl + l] += v;
                        pl[p * kl + l] += v;
                        a_b_l[(a * nb + b) * kl + l] += v;
                    }
                }
            }
        }
        let marg = |t: &[f64], rows: usize, cols: usize| -> (Vec<f64>, Vec<f64>) {
            let mut r = vec![0.0; rows];
            let mut c = vec![0.0; cols];
            for i in 0..rows {
                for j in 0..cols {
                    r[i] += t[i * cols + j];
                    c[j] += t[i * cols + j];
                }
            }
            (r, c)
        };
        let (_, p_marg) = marg(&a_p, na, kp);
        let (_, l_marg) = marg(&a_l, na, kl);
        let (p_only, l_only) = marg(&pl, kp, kl);
        let h_p = entropy_of(&p_marg);
        let h_l = entropy_of(&l_marg);
        let h_pl = entropy_of(&pl);
        let h_bpl = entropy_of(&b_pl);
        let h_bl = entropy_of(&b_l);
        let h_abl = entropy_of(&a_b_l);
        debug_assert!((entropy_of(&p_only) - h_p).abs() < 1e-9 && (entropy_of(&l_only) - h_l).abs() < 1e-9);
        let i_pl_b = h_pl + self.h_b - h_bpl;
        let i_p_a = h_p + self.h_a - entropy_of(&a_p);
        let i_l_a = h_l + self.h_a - entropy_of(&a_l);
        let i_l_a_given_b = h_bl + self.h_ab - h_abl - self.h_b;
        let i_l_b = h_l + self.h_b - h_bl;
        let i_p_l = h_p + h_l - h_pl;
        Residuals {
            sufficiency: (i_pl_b - self.h_b).abs(),
            orthogonality: i_p_a.max(0.0),
            parallelism: (i_l_a - self.i_ab).abs(),
            non_spuriousness: i_l_a_given_b.max(0.0),
            parsimony: (i_l_b - self.i_ab).abs(),
            independence: i_p_l.max(0.0),
        }
    }
}

/// Searches a decomposition of `b` relative to `a`.
///
/// The parts are generated from `B` alone, `Pr(B⊥, B∥ | B)`, so the
/// non-spuriousness condition holds by construction; the solver minimizes
/// the sum of squared residuals of the remaining conditions plus the
/// independence of the two parts.
pub fn decompose(pmf: &JointPmf, b: &[usize], a: &[usize], config: &DecompositionConfig) -> Result<DecompositionResult> {
    config.validate()?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet("decomposition variable set"));
    }
    check_vars(a, pmf.num_vars())?;
    check_vars(b, pmf.num_vars())?;
    check_disjoint(a, b)?;
    let na: usize = a.iter().map(|&v| pmf.cardinalities()[v]).product();
    let nb: usize = b.iter().map(|&v| pmf.cardinalities()[v]).product();
    let kp = config.perp_cardinality.unwrap_or(nb);
    let kl = config.parallel_cardinality.unwrap_or(nb);
    let ab: Vec<usize> = a.iter().chain(b).copied().collect();
    let p_ab = pmf.marginal_probs(&ab);
    let h_a = raw_entropy(pmf, a);
    let h_b = raw_entropy(pmf, b);
    let h_ab = entropy_of(&p_ab);
    let problem = Problem { na, nb, kp, kl, p_ab, h_b, h_a, h_ab, i_ab: (h_a + h_b - h_ab).max(0.0), product: config.product_form };

    let dim = problem.dim();
    let options = BoxOptions { max_evals: config.max_iters, f_tol: 1e-16, ..BoxOptions::default() };
    let runs: Vec<(f64, Vec<f64>)> = (0..config.num_restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(config.seed, r as u64));
            let x0: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
            let objective = |x: &[f64]| problem.residuals(&problem.decode(x)).sum_squares();
            let found = minimize_unit_box(objective, &x0, &options);
            (found.value, found.x)
        })
        .collect();
    let (_, best) = runs
        .into_iter()
        .fold(None, |acc: Option<(f64, Vec<f64>)>, (v, x)| match acc {
            Some((bv, _)) if bv <= v => acc,
            _ => Some((v, x)),
        })
        .expect("at least one restart");

    let table = problem.decode(&best);
    let cond = ConditionalPmf::new(
        b.iter().map(|&v| pmf.cardinalities()[v]).collect(),
        vec![kp, kl],
        table,
    )
    .or_else(|_| {
        // renormalize round-off before validation
        let width = kp * kl;
        let mut t = problem.decode(&best);
        for row in t.chunks_mut(width) {
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v /= s);
        }
        ConditionalPmf::new(b.iter().map(|&v| pmf.cardinalities()[v]).collect(), vec![kp, kl], t)
    })?;
    let with_parts = pmf.append_conditioned_on(b, &cond)?;
    let n = with_parts.num_vars();
    let (perp, parallel) = ([n - 2], [n - 1]);
    let residuals = verify_decomposition(&with_parts, a, b, &perp, &parallel)?;
    Ok(DecompositionResult {
        perp_cond: with_parts.condition(&perp, &ab)?,
        parallel_cond: with_parts.condition(&parallel, &ab)?,
        independence_residual: residuals.independence,
        converged: residuals.max() <= config.tol,
        residuals,
        pmf_with_parts: with_parts,
    })
}

/// The binary channel family `Pr(A = 1) = p_a`, `Pr(B = x | A = x) = p_b`,
/// `Pr(B⊥ = x | B = x) = p_c^x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinaryChannelParams {
    pub p_a: f64,
    pub p_b: f64,
    pub p_c0: f64,
    pub p_c1: f64,
}

impl BinaryChannelParams {
    /// Joint distribution over `(A, B, B⊥)`.
    pub fn joint(&self) -> Result<JointPmf> {
        for (name, v) in [("p_a", self.p_a), ("p_b", self.p_b), ("p_c0", self.p_c0), ("p_c1", self.p_c1)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!("{name} = {v} outside [0, 1]")));
            }
        }
        let p_a = [1.0 - self.p_a, self.p_a];
        let p_c = [self.p_c0, self.p_c1];
        let mut probs = Vec::with_capacity(8);
        for a in 0..2 {
            for b in 0..2 {
                let pb = if a == b { self.p_b } else { 1.0 - self.p_b };
                for c in 0..2 {
                    let pc = if c == b { p_c[b] } else { 1.0 - p_c[b] };
                    probs.push(p_a[a] * pb * pc);
                }
            }
        }
        Ok(JointPmf::from_raw(vec![2, 2, 2], probs))
    }

    pub fn binary_joint_ab(p_a: f64, p_b: f64) -> Result<JointPmf> {
        Ok(Self { p_a, p_b, p_c0: 1.0, p_c1: 1.0 }.joint()?.marginal(&[0, 1])?.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub p_c0: f64,
    pub p_c1: f64,
    /// `I(B⊥ : A)`.
    pub mi_perp_a: Bits,
    /// `I(B⊥ : B)`.
    pub mi_perp_b: Bits,
}

#[derive(Debug, Clone, Serialize)]
pub struct ImpossibilityScan {
    pub p_a: f64,
    pub p_b: f64,
    pub grid: Vec<ScanPoint>,
    /// Points on the line `p_c1 = 1 - p_c0`.
    pub line: Vec<ScanPoint>,
    pub line_max_mi_perp_b: Bits,
    /// Whether every grid point orthogonal to `A` (within 1e-9) also has
    /// `I(B⊥ : B) <= 1e-9`.
    pub orthogonal_implies_uninformative: bool,
    /// A grid point with `I(B⊥ : A) <= 1e-9` but `I(B⊥ : B) > 1e-9`.
    pub counterexample: Option<ScanPoint>,
}

const SCAN_ZERO: f64 = 1e-9;

fn scan_point(p_a: f64, p_b: f64, p_c0: f64, p_c1: f64) -> Result<ScanPoint> {
    let pmf = BinaryChannelParams { p_a, p_b, p_c0, p_c1 }.joint()?;
    Ok(ScanPoint {
        p_c0,
        p_c1,
        mi_perp_a: mutual_info(&pmf, &[2], &[0])?,
        mi_perp_b: mutual_info(&pmf, &[2], &[1])?,
    })
}

/// Evaluates the binary family on a `grid x grid` lattice over
/// `(p_c0, p_c1) ∈ [0, 1]^2` and on the line `p_c1 = 1 - p_c0`.
pub fn binary_impossibility_scan(p_a: f64, p_b: f64, grid: usize) -> Result<ImpossibilityScan> {
    if !(p_a > 0.0 && p_a < 1.0 && p_b > 0.0 && p_b < 1.0) {
        return Err(Error::InvalidConfig(format!("p_a = {p_a} and p_b = {p_b} must lie in (0, 1)")));
    }
    if grid < 2 {
        return Err(Error::InvalidConfig("grid needs at least 2 points per axis".into()));
    }
    let step = |i: usize| i as f64 / (grid - 1) as f64;
    let mut points = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        for j in 0..grid {
            points.push(scan_point(p_a, p_b, step(i), step(j))?);
        }
    }
    let line = (0..grid)
        .map(|i| scan_point(p_a, p_b, step(i), 1.0 - step(i)))
        .collect::<Result<Vec<_>>>()?;
    let line_max_mi_perp_b = line.iter().map(|p| p.mi_perp_b).fold(0.0, f64::max);
    let counterexample = points
        .iter()
        .find(|p| p.mi_perp_a <= SCAN_ZERO && p.mi_perp_b > SCAN_ZERO)
        .copied();
    Ok(ImpossibilityScan {
        p_a,
        p_b,
        grid: points,
        line,
        line_max_mi_perp_b,
        orthogonal_implies_uninformative: counterexample.is_none(),
        counterexample,
    })
}

/// Premises and conclusions of the common-variable check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WynerReport {
    /// `|I(W : A, B) - I(A : B)|`.
    pub premise_common: Bits,
    /// `I(A : B | W)`.
    pub premise_conditional: Bits,
    pub applicable: bool,
    /// `I(W : A | B)`.
    pub non_spuriousness: Bits,
    /// `I(W : B | A)`.
    pub converse_non_spuriousness: Bits,
    /// `|I(A : W) - I(A : B)|`.
    pub parallelism: Bits,
    /// `|I(B : W) - I(A : B)|`.
    pub parsimony: Bits,
    /// `None` when the premises do not hold.
    pub conclusions_hold: Option<bool>,
}

/// If `W` makes `A` and `B` conditionally independent and carries exactly
/// `I(A : B)` about `(A, B)`, it satisfies the three decomposition
/// conditions on `B∥` relative to `A`.
pub fn wyner_condition_check(pmf: &JointPmf, a: &[usize], b: &[usize], w: &[usize], tol: Bits) -> Result<WynerReport> {
    for (i, s) in [a, b, w].iter().enumerate() {
        if s.is_empty() {
            return Err(Error::EmptySet("variable set"));
        }
        check_vars(s, pmf.num_vars())?;
        for other in &[a, b, w][..i] {
            check_disjoint(s, other)?;
        }
    }
    let ab: Vec<usize> = a.iter().chain(b).copied().collect();
    let i_ab = mutual_info(pmf, a, b)?;
    let premise_common = (mutual_info(pmf, w, &ab)? - i_ab).abs();
    let premise_conditional = cond_mutual_info(pmf, a, b, w)?;
    let applicable = premise_common <= tol && premise_conditional <= tol;
    let non_spuriousness = cond_mutual_info(pmf, w, a, b)?;
    let converse_non_spuriousness = cond_mutual_info(pmf, w, b, a)?;
    let parallelism = (mutual_info(pmf, a, w)? - i_ab).abs();
    let parsimony = (mutual_info(pmf, b, w)? - i_ab).abs();
    let conclusions_hold = applicable.then(|| non_spuriousness.max(parallelism).max(parsimony) <= tol);
    Ok(WynerReport {
        premise_common,
        premise_conditional,
        applicable,
        non_spuriousness,
        converse_non_spuriousness,
        parallelism,
        parsimony,
        conclusions_hold,
    })
}

/// `A = (W, X)`, `B = (W', Y)` with `W' = W` and `W, X, Y` independent
/// uniform bits. Variables: W, X, W', Y.
pub fn shared_bit_fixture() -> JointPmf {
    JointPmf::uniform(&[2, 2])
        .expect("valid cardinalities")
        .append_redundant(2, |s| s[0])
        .expect("copy of W")
        .marginal(&[0, 1, 2])
        .expect("valid")
        .append_variable(&ConditionalPmf::new(vec![2, 2, 2], vec![2], vec![0.5; 16]).expect("uniform rows"))
        .expect("independent Y")
}
