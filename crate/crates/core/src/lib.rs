//! Learned vector representations of soccer teams from match results.
//!
//! Each team gets a winner and a loser representation, trained so that teams
//! which draw each other, or beat the same opponents, end up close together.
//! The crate covers the whole workflow:
//!
//! - [`match_data`]: CSV ingestion and the training quadruples
//! - [`trainer`]: season-weighted mini-batch Adam training
//! - [`analytics`]: nearest-neighbor search and round-robin ranking
//! - [`baseline`]: count-based season statistics
//! - [`valuation`]: market-value regression/classification under 5-fold CV
//! - [`model_file`]: versioned JSON persistence

pub mod analytics;
pub mod baseline;
pub mod error;
pub mod match_data;
pub mod model_file;
pub mod synthetic;
pub mod trainer;
pub mod valuation;

pub use error::{Error, Result};
pub use match_data::{Dataset, MatchQuad, RawMatch, TeamId, TeamRegistry};
pub use trainer::{EmbeddingModel, TrainConfig};

/// Derives an independent sub-seed for pipeline stage `stage` (splitmix64).
pub fn derive_seed(seed: u64, stage: u64) -> u64 {
    let mut z = seed ^ stage.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
