//! A variable that makes A and B conditionally independent while carrying
//! only their shared information satisfies the parallel-part conditions.

use synergist::decomposition::{shared_bit_fixture, wyner_condition_check};

fn main() -> synergist::Result<()> {
    // W copied: variables W, X, W', Y, and the candidate common part
    let pmf = shared_bit_fixture().append_redundant(2, |s| s[0])?;
    let report = wyner_condition_check(&pmf, &[0, 1], &[2, 3], &[4], 1e-9)?;
    println!("{report:#?}");

    // a noisy copy breaks the premises
    let noisy = shared_bit_fixture().append_variable(&synergist::ConditionalPmf::new(
        vec![2, 2, 2, 2],
        vec![2],
        (0..16).flat_map(|i| if i & 8 == 0 { [0.9, 0.1] } else { [0.1, 0.9] }).collect(),
    )?)?;
    let report = wyner_condition_check(&noisy, &[0, 1], &[2, 3], &[4], 1e-9)?;
    println!("noisy copy: applicable = {}", report.applicable);
    Ok(())
}
