//! For correlated bits, every candidate orthogonal part that is independent
//! of A is also independent of B, so it cannot carry B's private entropy.

use synergist::decomposition::binary_impossibility_scan;

fn main() -> synergist::Result<()> {
    for p_b in [0.6, 0.8, 0.5] {
        let scan = binary_impossibility_scan(0.5, p_b, 101)?;
        println!(
            "p_b = {p_b}: max I(B⊥:B) on the orthogonal line = {:.1e}, orthogonal implies uninformative = {}",
            scan.line_max_mi_perp_b, scan.orthogonal_implies_uninformative
        );
        if let Some(c) = scan.counterexample {
            println!("  e.g. p_c0 = {:.2}, p_c1 = {:.2}: I(B⊥:A) = {:.1e}, I(B⊥:B) = {:.3}", c.p_c0, c.p_c1, c.mi_perp_a, c.mi_perp_b);
        }
    }
    Ok(())
}
