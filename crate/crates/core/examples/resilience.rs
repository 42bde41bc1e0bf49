//! Relative change of I(X1,X2:Y) under small local and non-local
//! perturbations, for random outputs and for SRV outputs.

use synergist::experiments::{cmd_fig4, ResilienceConfig};

fn main() -> synergist::Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    let report = cmd_fig4(&ResilienceConfig { trials, ..ResilienceConfig::default() })?;
    print!("{}", report.to_csv());
    println!("runtime {:.1}s", report.runtime_seconds);
    Ok(())
}
