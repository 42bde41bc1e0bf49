//! Two uniform ternary inputs have two independent maximal SRVs, the sum and
//! a twisted difference modulo 3. The exhaustive oracle lists them and the
//! numerical search recovers an orthogonal pair of the same size.

use synergist::info::mutual_info;
use synergist::oracle::enumerate_srvs;
use synergist::srv::{find_osrv_sequence, SearchConfig};
use synergist::JointPmf;

fn main() -> synergist::Result<()> {
    let pmf = JointPmf::uniform(&[3, 3])?;
    let found = enumerate_srvs(&pmf, &[0, 1], 3, 1e-12)?;
    let best = found.iter().map(|f| f.mi_with_x).fold(0.0, f64::max);
    println!("{} deterministic SRV classes, best I(S:X) = {best:.6} (log2 3 = {:.6})", found.len(), 3f64.log2());
    for f in found.iter().filter(|f| f.mi_with_x > best - 1e-12) {
        println!("  map {:?}", f.srv.map);
    }

    let seq = find_osrv_sequence(&pmf, &[0, 1], &SearchConfig::default())?;
    println!("numerical sequence of {} SRV(s):", seq.len());
    for s in &seq.srvs {
        println!("  I(S:X) = {:.4}  leakage = {:.2e}", s.mi_with_x, s.leakage_sum());
    }
    if seq.srv_indices.len() >= 2 {
        let (a, b) = (seq.srv_indices[0], seq.srv_indices[1]);
        println!("  I(S1:S2) = {:.2e}", mutual_info(&seq.base_pmf, &[a], &[b])?);
        println!("  I(S1,S2:X1) = {:.4}", mutual_info(&seq.base_pmf, &[a, b], &[0])?);
    }
    Ok(())
}
