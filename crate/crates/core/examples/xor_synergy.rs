//! XOR: the output carries one bit about the pair and nothing about either
//! input alone.

use synergist::info::mutual_info;
use synergist::srv::SearchConfig;
use synergist::synergy::{estimate_synergy, whole_minus_sum};
use synergist::JointPmf;

fn main() -> synergist::Result<()> {
    let pmf = JointPmf::uniform(&[2, 2])?.append_redundant(2, |s| s[0] ^ s[1])?;
    println!("I(X1:Y)    = {:.6}", mutual_info(&pmf, &[0], &[2])?);
    println!("I(X2:Y)    = {:.6}", mutual_info(&pmf, &[1], &[2])?);
    println!("I(X1,X2:Y) = {:.6}", mutual_info(&pmf, &[0, 1], &[2])?);
    println!("WMS        = {:.6}", whole_minus_sum(&pmf, &[0, 1], &[2])?);

    let estimate = estimate_synergy(&pmf, &[0, 1], &[2], &SearchConfig::default())?;
    println!(
        "I_syn      = {:.4}  (bounds {:.4} .. {:.4}, {} SRV(s))",
        estimate.mid,
        estimate.lower,
        estimate.upper,
        estimate.per_srv_terms.len()
    );
    Ok(())
}
