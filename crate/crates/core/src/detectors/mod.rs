//! Detectors for G(2,1) constellations.

pub mod glrt;
pub mod kdtree;
pub mod rough;
pub mod zopt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::manifold::{normalize_received, Constellation};

pub use glrt::glrt_detect;
pub use kdtree::{NearestNeighborIndex, DEFAULT_LEAF_SIZE};
pub use rough::{rough_estimate, ReceivedBlock};
pub use zopt::{zopt_detect, zopt_region_i, zopt_region_j, ZOptDetectorState};

/// Decision with the work spent on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionResult {
    pub index: usize,
    pub distance_evals: usize,
    pub comparisons: usize,
}

/// Nearest Bloch point to the normalized rough estimate.
pub fn sopt_detect(y: &ReceivedBlock, nn: &NearestNeighborIndex) -> Result<DetectionResult> {
    let z = normalize_received(rough_estimate(y)?)?;
    let r = nn.nearest(z.bloch().coords());
    Ok(DetectionResult {
        index: r.index,
        distance_evals: r.distance_evals,
        comparisons: r.comparisons,
    })
}

/// Builds the S-Opt search tree for any constellation.
pub fn sopt_index(x: &Constellation, leaf_size: usize) -> Result<NearestNeighborIndex> {
    NearestNeighborIndex::build(&x.bloch_points(), leaf_size)
}
