use num_complex::Complex64;

use super::{rough::ReceivedBlock, DetectionResult};
use crate::error::{Error, Result};
use crate::manifold::Constellation;

/// Exhaustive detector: maximizes the received energy `‖Yᴴ x‖²` over all
/// codewords, lowest index on ties.
pub fn glrt_detect(y: &ReceivedBlock, x: &Constellation) -> Result<DetectionResult> {
    if x.is_empty() {
        return Err(Error::invalid("empty constellation"));
    }
    let mut best = (0usize, f64::NEG_INFINITY);
    let mut comparisons = 0;
    for (k, c) in x.codewords().iter().enumerate() {
        let (c0, c1) = (c.c0(), c.c1());
        let energy: f64 = y
            .columns()
            .iter()
            .map(|[y0, y1]| {
                let p: Complex64 = y0.conj() * c0 + y1.conj() * c1;
                p.norm_sqr()
            })
            .sum();
        comparisons += 1;
        if energy > best.1 {
            best = (k, energy);
        }
    }
    Ok(DetectionResult {
        index: best.0,
        distance_evals: x.len(),
        comparisons,
    })
}
