pub mod decomposition;
pub mod error;
pub mod experiments;
pub mod info;
pub mod jointpmf;
pub mod optim;
pub mod oracle;
pub mod seeds;
pub mod srv;
pub mod stats;
pub mod synergy;

pub use error::{Error, Result};
pub use jointpmf::{ConditionalPmf, HypercubeParams, JointPmf, Perturbed};
