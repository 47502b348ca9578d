//! Grass-Lattice constellations for two-dimensional signals.
//!
//! A uniform grid in the open unit square is mapped to a complex Gaussian
//! sample, then to the unit disc by a measure-preserving radial map, and
//! finally lifted to a line in C².

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quantile::half_variance_quantile;
use crate::error::{Error, Result};
use crate::manifold::{Codeword, Constellation, Method};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GrassLatticeConfig {
    /// Distance of the outermost grid points from the cube faces.
    pub alpha: f64,
}

impl Default for GrassLatticeConfig {
    fn default() -> Self {
        Self { alpha: 1e-2 }
    }
}

/// Grid coordinates `α + p (1 − 2α) / (2^bits − 1)`.
pub fn lattice_axis(bits_per_dim: u32, alpha: f64) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::InvalidConfig(format!("alpha must lie in (0, 0.5), got {alpha}")));
    }
    if bits_per_dim == 0 {
        return Err(Error::invalid("at least one bit per dimension required"));
    }
    let top = ((1u64 << bits_per_dim) - 1) as f64;
    Ok((0..=(1u64 << bits_per_dim) - 1)
        .map(|p| alpha + p as f64 * (1.0 - 2.0 * alpha) / top)
        .collect())
}

/// Radial factor `sqrt(1 − e^{−t²}) / t`, continuous at zero.
pub fn radial_factor(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        // sqrt(1 - e^{-t²}) / t = 1 - t²/4 + 5t⁴/96 - …
        let t2 = t * t;
        1.0 - t2 / 4.0 + 5.0 * t2 * t2 / 96.0
    } else {
        (-(-t * t).exp_m1()).sqrt() / t
    }
}

pub fn grass_lattice_codeword(a: f64, b: f64) -> Result<Codeword> {
    let z = Complex64::new(half_variance_quantile(a)?, half_variance_quantile(b)?);
    let w = z * radial_factor(z.norm());
    let head = (1.0 - w.norm_sqr()).max(0.0).sqrt();
    Ok(Codeword::canonicalize(Complex64::new(head, 0.0), w))
}

/// `2^{2 bits_per_dim}` codewords, first grid axis major.
pub fn build_grass_lattice(bits_per_dim: u32, config: &GrassLatticeConfig) -> Result<Constellation> {
    if bits_per_dim > 10 {
        return Err(Error::Unsupported(format!(
            "Grass-Lattice is built for up to 10 bits per dimension, got {bits_per_dim}"
        )));
    }
    let axis = lattice_axis(bits_per_dim, config.alpha)?;
    let mut codewords = Vec::with_capacity(axis.len() * axis.len());
    for &a in &axis {
        for &b in &axis {
            codewords.push(grass_lattice_codeword(a, b)?);
        }
    }
    Constellation::new(Method::GrassLattice, codewords)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_values() {
        assert_eq!(lattice_axis(1, 0.25).unwrap(), vec![0.25, 0.75]);
        let a = lattice_axis(2, 0.01).unwrap();
        assert_eq!(a.len(), 4);
        assert!((a[3] - 0.99).abs() < 1e-15);
        for bad in [0.0, 0.5, -0.1, 0.7] {
            assert!(matches!(lattice_axis(1, bad), Err(Error::InvalidConfig(_))));
        }
    }

    #[test]
    fn radial_factor_small_argument() {
        let t: f64 = 1e-8;
        let f = radial_factor(t);
        assert!(f.is_finite());
        assert!((f - (1.0 - t * t / 4.0)).abs() < 1e-15);
        // Series and closed form agree where both are accurate.
        for t in [1e-4f64, 2e-4, 1e-3] {
            let closed = (-(-t * t).exp_m1()).sqrt() / t;
            let series = 1.0 - t * t / 4.0 + 5.0 * t.powi(4) / 96.0;
            assert!((closed - series).abs() < 1e-12);
        }
        // Maps |z| to a radius inside the unit disc with the uniform-disc law.
        for t in [0.3f64, 1.0, 2.5] {
            let r = t * radial_factor(t);
            assert!((r * r - (1.0 - (-t * t).exp())).abs() < 1e-15);
        }
    }

    #[test]
    fn codewords_are_canonical() {
        let x = build_grass_lattice(1, &GrassLatticeConfig { alpha: 0.25 }).unwrap();
        assert_eq!(x.len(), 4);
        for b in 1..=4 {
            let x = build_grass_lattice(b, &GrassLatticeConfig::default()).unwrap();
            assert_eq!(x.len(), 1 << (2 * b));
            for c in x.codewords() {
                let [c0, c1] = c.amplitudes();
                assert!(c0.im == 0.0 && c0.re > 0.0);
                assert!((c0.norm_sqr() + c1.norm_sqr() - 1.0).abs() < 1e-12);
            }
        }
    }
}
