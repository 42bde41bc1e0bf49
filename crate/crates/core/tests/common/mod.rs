//! Reference computations for tests, written against the raw probability
//! table only.

#![allow(dead_code)]

use std::collections::HashMap;

use synergist::JointPmf;

/// Entropy in bits of the marginal over `vars`, by grouping full states.
pub fn h(pmf: &JointPmf, vars: &[usize]) -> f64 {
    let mut marginal: HashMap<Vec<usize>, f64> = HashMap::new();
    for (i, &p) in pmf.probs().iter().enumerate() {
        let state = pmf.state_of(i);
        let key: Vec<usize> = vars.iter().map(|&v| state[v]).collect();
        *marginal.entry(key).or_insert(0.0) += p;
    }
    marginal.values().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

pub fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().chain(b).copied().collect()
}

pub fn mi(pmf: &JointPmf, a: &[usize], b: &[usize]) -> f64 {
    h(pmf, a) + h(pmf, b) - h(pmf, &union(a, b))
}

pub fn cmi(pmf: &JointPmf, a: &[usize], b: &[usize], c: &[usize]) -> f64 {
    h(pmf, &union(a, c)) + h(pmf, &union(b, c)) - h(pmf, &union(&union(a, b), c)) - h(pmf, c)
}

/// Upper-tail probability of a chi-square variable with one degree of
/// freedom, `erfc(sqrt(x / 2))`, by composite Simpson quadrature of the
/// Gaussian density.
pub fn chi2_sf_1dof(x: f64) -> f64 {
    let z = (x / 2.0).sqrt();
    let upper = z + 12.0;
    let n = 200_000;
    let step = (upper - z) / n as f64;
    let f = |t: f64| (-t * t).exp();
    let mut sum = f(z) + f(upper);
    for i in 1..n {
        let t = z + i as f64 * step;
        sum += if i % 2 == 1 { 4.0 * f(t) } else { 2.0 * f(t) };
    }
    2.0 / std::f64::consts::PI.sqrt() * sum * step / 3.0
}
