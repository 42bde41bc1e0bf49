//! Shannon quantities over a [`JointPmf`], in bits.
//!
//! Variable sets are slices of variable indices. `0 log 0` is taken as 0.
//! Mutual informations that come out negative by less than
//! [`NEGATIVE_FLOOR`] are clamped to zero; anything more negative is an
//! error.

use crate::error::{Error, Result};
use crate::jointpmf::{check_disjoint, check_vars, JointPmf};

/// Information in bits.
pub type Bits = f64;

pub const NEGATIVE_FLOOR: f64 = 1e-9;

/// `-sum p log2 p` of a probability vector.
pub fn entropy_of(probs: &[f64]) -> Bits {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

pub(crate) fn clamp_info(quantity: &'static str, value: f64) -> Result<Bits> {
    if value >= 0.0 {
        Ok(value)
    } else if value > -NEGATIVE_FLOOR {
        Ok(0.0)
    } else {
        Err(Error::InconsistentInformation { quantity, value })
    }
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().chain(b).copied().collect()
}

/// Joint entropy of an index set; the empty set has entropy 0.
pub(crate) fn raw_entropy(pmf: &JointPmf, vars: &[usize]) -> Bits {
    if vars.is_empty() {
        0.0
    } else {
        entropy_of(&pmf.marginal_probs(vars))
    }
}

pub fn entropy(pmf: &JointPmf, vars: &[usize]) -> Result<Bits> {
    if vars.is_empty() {
        return Err(Error::EmptySet("vars"));
    }
    check_vars(vars, pmf.num_vars())?;
    Ok(raw_entropy(pmf, vars))
}

/// `H(target | given) = H(target, given) - H(given)`.
pub fn cond_entropy(pmf: &JointPmf, target: &[usize], given: &[usize]) -> Result<Bits> {
    if target.is_empty() {
        return Err(Error::EmptySet("target"));
    }
    check_vars(target, pmf.num_vars())?;
    check_vars(given, pmf.num_vars())?;
    check_disjoint(target, given)?;
    let value = raw_entropy(pmf, &union(target, given)) - raw_entropy(pmf, given);
    clamp_info("conditional entropy", value)
}

/// `I(a : b) = H(a) + H(b) - H(a, b)`.
pub fn mutual_info(pmf: &JointPmf, a: &[usize], b: &[usize]) -> Result<Bits> {
    cond_mutual_info(pmf, a, b, &[])
}

/// `I(a : b | c) = H(a, c) + H(b, c) - H(a, b, c) - H(c)`.
pub fn cond_mutual_info(pmf: &JointPmf, a: &[usize], b: &[usize], c: &[usize]) -> Result<Bits> {
    if a.is_empty() {
        return Err(Error::EmptySet("a"));
    }
    if b.is_empty() {
        return Err(Error::EmptySet("b"));
    }
    let n = pmf.num_vars();
    check_vars(a, n)?;
    check_vars(b, n)?;
    check_vars(c, n)?;
    check_disjoint(a, b)?;
    check_disjoint(a, c)?;
    check_disjoint(b, c)?;
    let ac = union(a, c);
    let bc = union(b, c);
    let abc = union(&ac, b);
    let value = raw_entropy(pmf, &ac) + raw_entropy(pmf, &bc) - raw_entropy(pmf, &abc) - raw_entropy(pmf, c);
    clamp_info("mutual information", value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xor() -> JointPmf {
        JointPmf::uniform(&[2, 2]).unwrap().append_redundant(2, |s| s[0] ^ s[1]).unwrap()
    }

    fn mod3() -> JointPmf {
        JointPmf::uniform(&[3, 3])
            .unwrap()
            .append_redundant(3, |s| (2 + 3 - s[0] + s[1]) % 3)
            .unwrap()
            .append_redundant(3, |s| (s[0] + s[1]) % 3)
            .unwrap()
    }

    #[test]
    fn entropy_examples() {
        let bit = JointPmf::uniform(&[2]).unwrap();
        assert_eq!(entropy(&bit, &[0]).unwrap(), 1.0);
        let trit = JointPmf::uniform(&[3]).unwrap();
        assert!((entropy(&trit, &[0]).unwrap() - 3f64.log2()).abs() < 1e-12);
        assert!((entropy(&trit, &[0]).unwrap() - 1.58496).abs() < 1e-5);
        let fixed = JointPmf::new(vec![2], vec![1.0, 0.0]).unwrap();
        assert_eq!(entropy(&fixed, &[0]).unwrap(), 0.0);
    }

    #[test]
    fn xor_quantities() {
        let p = xor();
        assert!(mutual_info(&p, &[0], &[2]).unwrap().abs() < 1e-12);
        assert!(mutual_info(&p, &[1], &[2]).unwrap().abs() < 1e-12);
        assert!((mutual_info(&p, &[0, 1], &[2]).unwrap() - 1.0).abs() < 1e-12);
        assert!(cond_entropy(&p, &[2], &[0, 1]).unwrap().abs() < 1e-12);
        assert!((cond_mutual_info(&p, &[1], &[2], &[0]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conditioning_on_nothing() {
        let p = JointPmf::random(&[3, 2, 2], 1).unwrap();
        assert_eq!(cond_entropy(&p, &[1], &[]).unwrap(), entropy(&p, &[1]).unwrap());
        assert_eq!(cond_mutual_info(&p, &[0], &[2], &[]).unwrap(), mutual_info(&p, &[0], &[2]).unwrap());
    }

    #[test]
    fn independent_bits() {
        let p = JointPmf::uniform(&[2, 2]).unwrap();
        assert!((cond_entropy(&p, &[1], &[0]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mod3_example() {
        let p = mod3();
        assert!(mutual_info(&p, &[2], &[3]).unwrap().abs() < 1e-12);
        // brute force over the 9 equiprobable rows of (X1, X2, S2)
        let rows: Vec<(usize, usize, usize)> =
            (0..9).map(|i| (i / 3, i % 3, (i / 3 + i % 3) % 3)).collect();
        let pr = |f: &dyn Fn(&(usize, usize, usize)) -> bool| {
            rows.iter().filter(|r| f(r)).count() as f64 / 9.0
        };
        let mut brute = 0.0;
        for r in &rows {
            let p_all = pr(&|q| q == r);
            let p_x1 = pr(&|q| q.0 == r.0);
            let p_x1_s2 = pr(&|q| q.0 == r.0 && q.2 == r.2);
            let p_x1_x2 = pr(&|q| q.0 == r.0 && q.1 == r.1);
            brute += p_all * (p_all * p_x1 / (p_x1_s2 * p_x1_x2)).log2();
        }
        let value = cond_mutual_info(&p, &[3], &[1], &[0]).unwrap();
        assert!((value - brute).abs() < 1e-12);
        assert!((value - 3f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn copy_shares_full_entropy() {
        let p = JointPmf::random(&[3, 2], 6).unwrap();
        let with_copy = p.append_redundant(3, |s| s[0]).unwrap();
        let h = entropy(&with_copy, &[0]).unwrap();
        assert!((mutual_info(&with_copy, &[0], &[2]).unwrap() - h).abs() < 1e-12);
    }

    #[test]
    fn cond_entropy_matches_double_sum() {
        let p = JointPmf::random(&[3, 4], 13).unwrap();
        let mut explicit = 0.0;
        for x in 0..3 {
            let px: f64 = (0..4).map(|y| p.prob(&[x, y])).sum();
            for y in 0..4 {
                let pxy = p.prob(&[x, y]);
                if pxy > 0.0 {
                    explicit -= pxy * (pxy / px).log2();
                }
            }
        }
        assert!((cond_entropy(&p, &[1], &[0]).unwrap() - explicit).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_sets() {
        let p = JointPmf::uniform(&[2, 2]).unwrap();
        assert!(entropy(&p, &[]).is_err());
        assert!(mutual_info(&p, &[0], &[0]).is_err());
        assert!(cond_mutual_info(&p, &[0], &[1], &[1]).is_err());
        assert!(mutual_info(&p, &[0], &[5]).is_err());
    }

    #[test]
    fn clamping() {
        assert_eq!(clamp_info("x", -1e-12).unwrap(), 0.0);
        assert!(clamp_info("x", -1e-6).is_err());
    }
}
