//! Orthogonal decomposition of B relative to A: works when A and B share a
//! copied bit, fails for correlated bits.

use synergist::decomposition::{decompose, shared_bit_fixture, BinaryChannelParams, DecompositionConfig};

fn main() -> synergist::Result<()> {
    let config = DecompositionConfig::default();

    // A = (W, X), B = (W, Y)
    let shared = decompose(&shared_bit_fixture(), &[2, 3], &[0, 1], &config)?;
    println!("shared bit:      converged = {}  max residual = {:.2e}", shared.converged, shared.residuals.max());
    println!("  {:?}", shared.residuals);

    let correlated = BinaryChannelParams::binary_joint_ab(0.5, 0.8)?;
    let failed = decompose(&correlated, &[1], &[0], &config)?;
    println!("correlated bits: converged = {}  max residual = {:.2e}", failed.converged, failed.residuals.max());
    println!("  {:?}", failed.residuals);
    Ok(())
}
