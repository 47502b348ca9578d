//! Constellations read off sphere packings, and the numerically optimized
//! baseline that shares the same machinery.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::manifold::{angles_to_codeword, Codeword, Constellation, Method};
use crate::packing::{optimize_packing, PackingOptimizerConfig, PackingSet};

/// Maps every packing point to its codeword through its spherical angles.
pub fn build_s_opt(packing: &PackingSet) -> Result<Constellation> {
    let codewords = packing
        .points()
        .iter()
        .map(|p| angles_to_codeword(p.angles()))
        .collect();
    Constellation::new(Method::SOpt, codewords)
}

/// Maximin-optimized constellation of `count` codewords.
///
/// On G(2,1) the chordal distance is half the Bloch-sphere distance, so
/// maximizing the minimum chordal distance over codewords is the same
/// problem as the spherical packing one.
pub fn build_man_opt(count: usize, seed: u64, config: &PackingOptimizerConfig) -> Result<Constellation> {
    let packing = optimize_packing(count, seed, config)?;
    Ok(build_s_opt(&packing)?.with_method(Method::ManOpt))
}

/// Smoothed maximin objective over codeword pairs:
/// `log Σ_{i<j} exp(|x_iᴴ x_j| / ε)`, evaluated with a max shift.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothedObjective {
    pub value: f64,
    /// Pairwise correlations evaluated (always `C (C - 1) / 2`).
    pub pair_evals: usize,
}

pub fn smoothed_max_correlation(codewords: &[Codeword], smoothing: f64) -> Result<SmoothedObjective> {
    if codewords.len() < 2 {
        return Err(Error::invalid("at least two codewords required"));
    }
    if !(smoothing > 0.0 && smoothing.is_finite()) {
        return Err(Error::InvalidConfig(format!("smoothing must be positive, got {smoothing}")));
    }
    let mut corr = Vec::with_capacity(codewords.len() * (codewords.len() - 1) / 2);
    for (i, a) in codewords.iter().enumerate() {
        for b in &codewords[i + 1..] {
            let ip: Complex64 = a.c0().conj() * b.c0() + a.c1().conj() * b.c1();
            corr.push(ip.norm() / smoothing);
        }
    }
    let top = corr.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = corr.iter().map(|c| (c - top).exp()).sum();
    Ok(SmoothedObjective {
        value: top + sum.ln(),
        pair_evals: corr.len(),
    })
}

/// Real optimization variables of a free-form codebook of `count` lines
/// in C², one complex amplitude pair per codeword.
pub fn free_form_variable_count(count: usize) -> usize {
    2 * count
}
