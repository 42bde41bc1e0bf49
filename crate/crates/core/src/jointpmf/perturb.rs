//! Perturbations of a joint distribution in hypercube coordinates.
//!
//! A local perturbation moves the stick coordinates of one variable's
//! marginal and keeps every other variable's conditional distribution given
//! it. A non-local perturbation moves the coordinates of `Pr(B | A)` while
//! keeping the marginals of `A` and `B`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{check_vars, decode_row, encode_row, ConditionalPmf, JointPmf};
use crate::error::{Error, Result};

const NONLOCAL_RETRIES: usize = 100;
const IPF_MAX_SWEEPS: usize = 10_000;

/// A perturbed distribution with the length of the coordinate step that was
/// actually applied after clipping into the hypercube.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbed {
    pub pmf: JointPmf,
    pub realized_norm: f64,
}

fn gaussian(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| StandardNormal.sample(rng)).collect()
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn scale_to(v: &mut [f64], length: f64) -> bool {
    let n = norm2(v);
    if n < 1e-12 {
        return false;
    }
    v.iter_mut().for_each(|x| *x *= length / n);
    true
}

fn step_clipped(origin: &[f64], delta: &[f64]) -> (Vec<f64>, f64) {
    let moved: Vec<f64> = origin
        .iter()
        .zip(delta)
        .map(|(o, d)| (o + d).clamp(0.0, 1.0))
        .collect();
    let realized = moved
        .iter()
        .zip(origin)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    (moved, realized)
}

fn others(pmf: &JointPmf, excluded: &[usize]) -> Vec<usize> {
    (0..pmf.num_vars()).filter(|v| !excluded.contains(v)).collect()
}

/// Recombines `Pr(head)` with `Pr(rest | head)` into a joint in the
/// original variable order.
fn recombine(pmf: &JointPmf, head: &[usize], head_probs: &[f64], rest: &[usize], rest_given_head: Option<&ConditionalPmf>) -> JointPmf {
    let head_idx = pmf.projection(head);
    let probs = match rest_given_head {
        None => head_idx.iter().map(|&h| head_probs[h]).collect(),
        Some(cond) => {
            let rest_idx = pmf.projection(rest);
            let cols = cond.num_cols();
            head_idx
                .iter()
                .zip(rest_idx)
                .map(|(&h, r)| head_probs[h] * cond.table()[h * cols + r])
                .collect()
        }
    };
    JointPmf::from_raw(pmf.cardinalities().to_vec(), probs)
}

impl JointPmf {
    /// Moves the marginal coordinates of `var` by a random Gaussian direction
    /// of length `norm`, clipped into the hypercube.
    pub fn perturb_local(&self, var: usize, norm: f64, seed: u64) -> Result<Perturbed> {
        check_vars(&[var], self.num_vars())?;
        if !(norm >= 0.0) {
            return Err(Error::InvalidConfig(format!("perturbation norm {norm} is negative")));
        }
        if norm == 0.0 {
            return Ok(Perturbed { pmf: self.clone(), realized_norm: 0.0 });
        }
        let dim = self.cardinalities()[var] - 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut delta = gaussian(&mut rng, dim);
        while !scale_to(&mut delta, norm) {
            delta = gaussian(&mut rng, dim);
        }
        self.perturb_local_along(var, &delta)
    }

    /// Local perturbation along an explicit coordinate step.
    pub fn perturb_local_along(&self, var: usize, delta: &[f64]) -> Result<Perturbed> {
        check_vars(&[var], self.num_vars())?;
        let m = self.cardinalities()[var];
        if delta.len() != m - 1 {
            return Err(Error::LengthMismatch { what: "perturbation", expected: m - 1, actual: delta.len() });
        }
        let marginal = self.marginal_probs(&[var]);
        let mut sticks = vec![0.0; m - 1];
        encode_row(&marginal, &mut sticks);
        let (moved, realized_norm) = step_clipped(&sticks, delta);
        let mut new_marginal = vec![0.0; m];
        decode_row(&moved, &mut new_marginal);

        let rest = others(self, &[var]);
        let cond = if rest.is_empty() { None } else { Some(self.condition(&rest, &[var])?) };
        let pmf = recombine(self, &[var], &new_marginal, &rest, cond.as_ref());
        Ok(Perturbed { pmf, realized_norm })
    }

    /// Moves the coordinates of `Pr(var_b | var_a)` by a direction of length
    /// `norm` chosen so that the marginal of `var_b` stays within `tol`
    /// (total variation) of the original. The marginal of `var_a` and the
    /// conditional of all other variables given both are untouched.
    pub fn perturb_nonlocal(&self, var_a: usize, var_b: usize, norm: f64, seed: u64, tol: f64) -> Result<Perturbed> {
        check_vars(&[var_a, var_b], self.num_vars())?;
        if !(norm >= 0.0) {
            return Err(Error::InvalidConfig(format!("perturbation norm {norm} is negative")));
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidConfig(format!("marginal tolerance {tol} must be positive")));
        }
        if norm == 0.0 {
            return Ok(Perturbed { pmf: self.clone(), realized_norm: 0.0 });
        }
        let ma = self.cardinalities()[var_a];
        let mb = self.cardinalities()[var_b];
        let p_a = self.marginal_probs(&[var_a]);
        let p_b = self.marginal_probs(&[var_b]);
        let q = self.condition(&[var_b], &[var_a])?;
        let mut sticks = vec![0.0; ma * (mb - 1)];
        for a in 0..ma {
            encode_row(q.row(a), &mut sticks[a * (mb - 1)..(a + 1) * (mb - 1)]);
        }
        let basis = orthonormal_rows(&marginal_jacobian(&p_a, &sticks, mb));

        let decode = |theta: &[f64]| -> Vec<f64> {
            let mut joint = vec![0.0; ma * mb];
            for a in 0..ma {
                let row = &mut joint[a * mb..(a + 1) * mb];
                decode_row(&theta[a * (mb - 1)..(a + 1) * (mb - 1)], row);
                row.iter_mut().for_each(|x| *x *= p_a[a]);
            }
            joint
        };
        let deviation = |joint: &[f64]| -> f64 {
            let mut col = vec![0.0; mb];
            for (i, p) in joint.iter().enumerate() {
                col[i % mb] += p;
            }
            0.5 * col.iter().zip(&p_b).map(|(x, y)| (x - y).abs()).sum::<f64>()
        };

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best: Option<(f64, Vec<f64>)> = None;
        for _ in 0..NONLOCAL_RETRIES {
            let mut delta = gaussian(&mut rng, sticks.len());
            project_out(&mut delta, &basis);
            if !scale_to(&mut delta, norm) {
                continue;
            }
            let (theta, _) = step_clipped(&sticks, &delta);
            let joint = decode(&theta);
            let dev = deviation(&joint);
            if dev <= tol {
                return self.finish_nonlocal(var_a, var_b, &sticks, joint);
            }
            if best.as_ref().is_none_or(|(d, _)| dev < *d) {
                best = Some((dev, joint));
            }
        }
        let Some((_, joint)) = best else {
            return Err(Error::FailsToConverge(
                "no direction preserves the marginal to first order".into(),
            ));
        };
        let fitted = fit_marginals(joint, &p_a, &p_b);
        if deviation(&fitted) <= tol {
            return self.finish_nonlocal(var_a, var_b, &sticks, fitted);
        }
        Err(Error::FailsToConverge(format!(
            "marginal of variable {var_b} could not be held within {tol}"
        )))
    }

    fn finish_nonlocal(&self, var_a: usize, var_b: usize, original: &[f64], joint_ab: Vec<f64>) -> Result<Perturbed> {
        let ma = self.cardinalities()[var_a];
        let mb = self.cardinalities()[var_b];
        let mut theta = vec![0.0; original.len()];
        let mut row = vec![0.0; mb];
        for a in 0..ma {
            let chunk = &joint_ab[a * mb..(a + 1) * mb];
            let mass: f64 = chunk.iter().sum();
            if mass > 0.0 {
                row.iter_mut().zip(chunk).for_each(|(r, c)| *r = c / mass);
            } else {
                row.fill(1.0 / mb as f64);
            }
            encode_row(&row, &mut theta[a * (mb - 1)..(a + 1) * (mb - 1)]);
        }
        let realized_norm = theta.iter().zip(original).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
        let head = [var_a, var_b];
        let rest = others(self, &head);
        let cond = if rest.is_empty() { None } else { Some(self.condition(&rest, &head)?) };
        let pmf = recombine(self, &head, &joint_ab, &rest, cond.as_ref());
        Ok(Perturbed { pmf, realized_norm })
    }
}

/// Jacobian of `Pr(B = k) = sum_a Pr(a) q_a(k)` with respect to the stick
/// coordinates of every row `q_a`. One row per state `k`.
fn marginal_jacobian(p_a: &[f64], sticks: &[f64], mb: usize) -> Vec<Vec<f64>> {
    let width = mb - 1;
    let mut jac = vec![vec![0.0; sticks.len()]; mb];
    for (a, &pa) in p_a.iter().enumerate() {
        let t = &sticks[a * width..(a + 1) * width];
        for (k, jrow) in jac.iter_mut().enumerate() {
            for j in 0..width {
                // d q(k) / d t_j with q(k) = t_k prod_{l<k} (1 - t_l), q(m-1) = prod_l (1 - t_l)
                let d = if k < width {
                    if j == k {
                        (0..k).map(|l| 1.0 - t[l]).product::<f64>()
                    } else if j < k {
                        -t[k] * (0..k).filter(|&l| l != j).map(|l| 1.0 - t[l]).product::<f64>()
                    } else {
                        0.0
                    }
                } else {
                    -(0..width).filter(|&l| l != j).map(|l| 1.0 - t[l]).product::<f64>()
                };
                jrow[a * width + j] += pa * d;
            }
        }
    }
    jac
}

fn orthonormal_rows(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for row in rows {
        let mut v = row.clone();
        project_out(&mut v, &basis);
        let n = norm2(&v);
        if n > 1e-10 {
            v.iter_mut().for_each(|x| *x /= n);
            basis.push(v);
        }
    }
    basis
}

fn project_out(v: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
        v.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
    }
}

/// Alternating row/column rescaling of an `ma x mb` joint towards the given
/// marginals.
fn fit_marginals(mut joint: Vec<f64>, p_a: &[f64], p_b: &[f64]) -> Vec<f64> {
    let mb = p_b.len();
    for _ in 0..IPF_MAX_SWEEPS {
        for (a, &target) in p_a.iter().enumerate() {
            let row = &mut joint[a * mb..(a + 1) * mb];
            let mass: f64 = row.iter().sum();
            if mass > 0.0 {
                row.iter_mut().for_each(|x| *x *= target / mass);
            }
        }
        let mut worst: f64 = 0.0;
        for (b, &target) in p_b.iter().enumerate() {
            let mass: f64 = joint.iter().skip(b).step_by(mb).sum();
            if mass > 0.0 {
                joint.iter_mut().skip(b).step_by(mb).for_each(|x| *x *= target / mass);
            }
            worst = worst.max((mass - target).abs());
        }
        if worst < 1e-14 {
            break;
        }
    }
    joint
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info;

    #[test]
    fn zero_norm_is_identity() {
        let pmf = JointPmf::random(&[3, 3, 2], 4).unwrap();
        assert_eq!(pmf.perturb_local(1, 0.0, 9).unwrap().pmf, pmf);
        assert_eq!(pmf.perturb_nonlocal(0, 1, 0.0, 9, 1e-6).unwrap().pmf, pmf);
    }

    #[test]
    fn binary_marginal_step() {
        let pmf = JointPmf::uniform(&[2, 2]).unwrap();
        let out = pmf.perturb_local_along(0, &[0.1]).unwrap();
        let marginal = out.pmf.marginal(&[0]).unwrap();
        assert!((marginal.probs()[0] - 0.6).abs() < 1e-15);
        assert!((out.realized_norm - 0.1).abs() < 1e-15);
    }

    #[test]
    fn clipping_shrinks_realized_norm() {
        let pmf = JointPmf::new(vec![2], vec![0.95, 0.05]).unwrap();
        let out = pmf.perturb_local_along(0, &[0.1]).unwrap();
        assert!((out.realized_norm - 0.05).abs() < 1e-12);
        assert_eq!(out.pmf.probs()[0], 1.0);
    }

    #[test]
    fn local_keeps_conditionals_of_others() {
        let pmf = JointPmf::random(&[3, 2, 3], 21).unwrap();
        let out = pmf.perturb_local(1, 0.1, 5).unwrap();
        assert!(out.realized_norm <= 0.1 + 1e-12);
        let before = pmf.condition(&[0, 2], &[1]).unwrap();
        let after = out.pmf.condition(&[0, 2], &[1]).unwrap();
        for (x, y) in before.table().iter().zip(after.table()) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!((out.pmf.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn nonlocal_on_independent_bits_keeps_marginals() {
        let pmf = JointPmf::uniform(&[2, 2]).unwrap();
        let tol = 1e-9;
        let out = pmf.perturb_nonlocal(0, 1, 0.1, 3, tol).unwrap();
        for v in 0..2 {
            let m = out.pmf.marginal(&[v]).unwrap();
            assert!((m.probs()[0] - 0.5).abs() <= tol);
        }
        assert!((out.realized_norm - 0.1).abs() < 1e-12);
        let mi = info::mutual_info(&out.pmf, &[0], &[1]).unwrap();
        assert!(mi > 1e-4, "mutual information did not move: {mi}");
    }

    #[test]
    fn nonlocal_keeps_named_marginals_and_rest() {
        let pmf = JointPmf::random(&[3, 3, 3], 8).unwrap();
        let tol = 1e-6;
        let out = pmf.perturb_nonlocal(0, 1, 0.1, 11, tol).unwrap();
        for v in 0..2 {
            let before = pmf.marginal(&[v]).unwrap();
            let after = out.pmf.marginal(&[v]).unwrap();
            let tv: f64 = 0.5 * before.probs().iter().zip(after.probs()).map(|(a, b)| (a - b).abs()).sum::<f64>();
            assert!(tv <= tol, "tv {tv}");
        }
        let before = pmf.condition(&[2], &[0, 1]).unwrap();
        let after = out.pmf.condition(&[2], &[0, 1]).unwrap();
        for (x, y) in before.table().iter().zip(after.table()) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(out.pmf != pmf);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let p_a = [0.3, 0.7];
        let sticks = [0.2, 0.6, 0.5, 0.1];
        let mb = 3;
        let jac = marginal_jacobian(&p_a, &sticks, mb);
        let marginal = |theta: &[f64]| {
            let mut out = vec![0.0; mb];
            let mut row = vec![0.0; mb];
            for a in 0..2 {
                decode_row(&theta[a * 2..a * 2 + 2], &mut row);
                for k in 0..mb {
                    out[k] += p_a[a] * row[k];
                }
            }
            out
        };
        let h = 1e-6;
        for j in 0..sticks.len() {
            let mut up = sticks.to_vec();
            up[j] += h;
            let mut down = sticks.to_vec();
            down[j] -= h;
            let (fu, fd) = (marginal(&up), marginal(&down));
            for k in 0..mb {
                let fd_est = (fu[k] - fd[k]) / (2.0 * h);
                assert!((fd_est - jac[k][j]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let pmf = JointPmf::uniform(&[2, 2]).unwrap();
        assert!(pmf.perturb_local(0, -1.0, 0).is_err());
        assert!(pmf.perturb_nonlocal(0, 0, 0.1, 0, 1e-3).is_err());
        assert!(pmf.perturb_nonlocal(0, 1, 0.1, 0, 0.0).is_err());
    }
}
