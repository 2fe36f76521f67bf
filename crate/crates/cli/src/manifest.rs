use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cli::Command;

/// Everything needed to regenerate an output file byte for byte.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub parameters: Command,
    pub seed: u64,
    pub output: String,
    /// `sha256:<hex>` of the output bytes.
    pub digest: String,
}

impl RunManifest {
    pub fn new(parameters: &Command, seed: u64, output: String, bytes: &[u8]) -> Self {
        Self {
            tool: env!("CARGO_BIN_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: parameters.name(),
            parameters: parameters.clone(),
            seed,
            output,
            digest: digest(bytes),
        }
    }
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

impl Command {
    pub fn name(&self) -> String {
        use crate::cli::{Exact, Experiment, Simulate};
        let s = match self {
            Command::Simulate(Simulate::Golf(_)) => "simulate golf",
            Command::Simulate(Simulate::Parking(_)) => "simulate parking",
            Command::Simulate(Simulate::Line(_)) => "simulate line",
            Command::Exact(Exact::Cycle { .. }) => "exact cycle",
            Command::Exact(Exact::Parking { .. }) => "exact parking",
            Command::Exact(Exact::Multiball { .. }) => "exact multiball",
            Command::Exact(Exact::Zlaw { .. }) => "exact zlaw",
            Command::Exact(Exact::Zgeneral { .. }) => "exact zgeneral",
            Command::Exact(Exact::Sparse { .. }) => "exact sparse",
            Command::Verify(_) => "verify",
            Command::Experiment(Experiment::Phase(_)) => "experiment phase",
            Command::Experiment(Experiment::Sparse(_)) => "experiment sparse",
            Command::Experiment(Experiment::Parking(_)) => "experiment parking",
            Command::Replay { .. } => "replay",
        };
        s.to_string()
    }
}
