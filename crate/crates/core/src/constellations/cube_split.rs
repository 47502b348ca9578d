//! Cube-Split constellations for two-dimensional signals.
//!
//! The line space is split into the two Voronoi cells of the canonical basis
//! vectors. A uniform grid on the unit square is pushed through a Gaussian
//! quantile and a radial compression into the unit disc, and each disc point
//! `t` becomes `(1, t)` or `(t, 1)` depending on the cell.

use num_complex::Complex64;

use super::quantile::standard_normal_quantile;
use crate::error::{Error, Result};
use crate::manifold::{Codeword, Constellation, Method};

/// Bits spent on the two real grid dimensions after one cell bit.
pub fn grid_bits(total_bits: u32) -> (u32, u32) {
    let rest = total_bits.saturating_sub(1);
    (rest.div_ceil(2), rest / 2)
}

/// Grid coordinates `(2k + 1) / 2^{bits + 1}` for `k < 2^bits`.
pub fn grid_axis(bits: u32) -> Vec<f64> {
    let n = 1u64 << bits;
    let denom = (2 * n) as f64;
    (0..n).map(|k| (2 * k + 1) as f64 / denom).collect()
}

/// Disc point for one grid point.
pub fn cube_split_disc_point(a1: f64, a2: f64) -> Result<Complex64> {
    let w = Complex64::new(standard_normal_quantile(a1)?, standard_normal_quantile(a2)?);
    let r = w.norm();
    if r == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let e = (-r * r / 2.0).exp();
    Ok(((1.0 - e) / (1.0 + e)).sqrt() * w / r)
}

/// Codeword of grid point `(a1, a2)` in cell `cell ∈ {1, 2}`.
pub fn cube_split_codeword(cell: usize, a1: f64, a2: f64) -> Result<Codeword> {
    let t = cube_split_disc_point(a1, a2)?;
    let scale = 1.0 / (1.0 + t.norm_sqr()).sqrt();
    let one = Complex64::new(scale, 0.0);
    match cell {
        1 => Ok(Codeword::canonicalize(one, t * scale)),
        2 => Ok(Codeword::canonicalize(t * scale, one)),
        _ => Err(Error::invalid(format!("cell must be 1 or 2, got {cell}"))),
    }
}

/// All `2^total_bits` codewords, cell-major then first grid axis.
pub fn build_cube_split(total_bits: u32) -> Result<Constellation> {
    if total_bits == 0 || total_bits > 20 {
        return Err(Error::Unsupported(format!("Cube-Split is built for 1 <= B <= 20, got {total_bits}")));
    }
    let (b1, b2) = grid_bits(total_bits);
    let (ax1, ax2) = (grid_axis(b1), grid_axis(b2));
    let mut codewords = Vec::with_capacity(1 << total_bits);
    for cell in 1..=2 {
        for &a1 in &ax1 {
            for &a2 in &ax2 {
                codewords.push(cube_split_codeword(cell, a1, a2)?);
            }
        }
    }
    Constellation::new(Method::CubeSplit, codewords)
}
