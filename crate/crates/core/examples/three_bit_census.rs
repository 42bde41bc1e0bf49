//! Deterministic SRVs of three independent bits, and the synergy of the
//! bits about themselves.

use synergist::oracle::three_bit_msrv_census;
use synergist::srv::SearchConfig;
use synergist::synergy::estimate_synergy;
use synergist::JointPmf;

fn main() -> synergist::Result<()> {
    let census = three_bit_msrv_census(2)?;
    println!("{} binary SRV classes of maximal information:", census.maximal_binary.len());
    for c in &census.maximal_binary {
        println!("  {:?} {}", c.map, c.name.as_deref().unwrap_or("-"));
    }
    let names: Vec<_> = census
        .pairwise_independent_family
        .iter()
        .map(|c| c.name.clone().unwrap_or_else(|| format!("{:?}", c.map)))
        .collect();
    println!("pairwise independent family: {}", names.join(", "));
    println!("H(family) = {:.3}", census.family_joint_entropy);
    println!("H(three pairwise XORs) = {:.3}", census.pairwise_xor_joint_entropy);
    println!("H(X1⊕X3 | X1⊕X2, X2⊕X3) = {:.3}", census.pairwise_xor_redundancy);
    println!("exact synergy about a copy of X = {:.3}", census.synergy_about_self);

    // the same quantity through the numerical search
    let pmf = JointPmf::uniform(&[2, 2, 2])?.append_redundant(8, |s| 4 * s[0] + 2 * s[1] + s[2])?;
    let estimate = estimate_synergy(&pmf, &[0, 1, 2], &[3], &SearchConfig::default())?;
    println!("numerical I_syn(X -> X) = {:.3}", estimate.mid);
    Ok(())
}
