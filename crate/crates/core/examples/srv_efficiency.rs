//! Success rate of the SRV search and the information a single SRV captures
//! relative to the upper bound, per number of input states.

use synergist::experiments::{cmd_fig2, cmd_fig3, SrvExperimentConfig};

fn main() -> synergist::Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let config = SrvExperimentConfig { trials, ..SrvExperimentConfig::default() };
    let success = cmd_fig2(&config)?;
    print!("{}", success.to_csv());
    let efficiency = cmd_fig3(&config)?;
    print!("{}", efficiency.to_csv());
    Ok(())
}
