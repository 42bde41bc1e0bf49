//! Random pair of ternary inputs, an appended output computed
//! deterministically from them, and the synergy of the inputs about it.

use synergist::info::mutual_info;
use synergist::srv::SearchConfig;
use synergist::synergy::estimate_synergy;
use synergist::JointPmf;

fn main() -> synergist::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let p_ab = JointPmf::random(&[3, 3], seed)?;
    let p_abc = p_ab.append_random_redundant(&[0, 1], 3, seed)?;
    let mi = mutual_info(&p_abc, &[0, 1], &[2])?;
    let estimate = estimate_synergy(&p_abc, &[0, 1], &[2], &SearchConfig::default().with_seed(seed))?;
    println!("I(A,B:C) = {mi:.4}");
    println!("I_syn(A,B -> C) = {:.4} (relative error {:?})", estimate.mid, estimate.relative_error);
    Ok(())
}
