//! Local and non-local perturbations of a random distribution.

use synergist::info::mutual_info;
use synergist::JointPmf;

fn main() -> synergist::Result<()> {
    let pmf = JointPmf::random(&[3, 3], 11)?;
    let local = pmf.perturb_local(0, 0.1, 1)?;
    let nonlocal = pmf.perturb_nonlocal(0, 1, 0.1, 1, 1e-9)?;
    for (name, p) in [("original", &pmf), ("local", &local.pmf), ("non-local", &nonlocal.pmf)] {
        println!(
            "{name:>9}: P(X1) = {:.3?}  P(X2) = {:.3?}  I(X1:X2) = {:.4}",
            p.marginal(&[0])?.probs(),
            p.marginal(&[1])?.probs(),
            mutual_info(p, &[0], &[1])?
        );
    }
    println!("realized step lengths: {:.3} {:.3}", local.realized_norm, nonlocal.realized_norm);
    Ok(())
}
