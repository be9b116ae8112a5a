//! Seed expansion into independent per-stage random streams.
//!
//! Every random choice in the pipeline is drawn from a ChaCha8 stream keyed
//! by `(seed, stage)`, so one user-facing seed determines all outputs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Name of the generator backing every stream, recorded in output metadata.
pub const RNG_NAME: &str = "rand_chacha::ChaCha8Rng";

/// Pipeline stages that consume randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Generate,
    Louvain,
    Wsbm,
}

impl Stage {
    fn stream_base(self) -> u64 {
        match self {
            Stage::Generate => 0,
            Stage::Louvain => 1 << 32,
            Stage::Wsbm => 2 << 32,
        }
    }
}

/// Random stream for `stage`; `substream` separates e.g. WSBM restarts.
pub fn stream(seed: u64, stage: Stage, substream: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stage.stream_base() + u64::from(substream));
    rng
}

/// Metadata describing how randomness was derived for an output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RngInfo {
    pub generator: &'static str,
    pub seed: u64,
    pub stage: Stage,
}

impl RngInfo {
    pub fn new(seed: u64, stage: Stage) -> Self {
        Self {
            generator: RNG_NAME,
            seed,
            stage,
        }
    }
}
