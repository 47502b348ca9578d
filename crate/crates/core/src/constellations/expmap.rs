//! Exponential-map constellations from complex symbol sets.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::manifold::{min_chordal_distance_of, Codeword, Constellation, Method};

/// Codeword of one symbol: `(cos ρ, -(sin ρ / ρ) v)` with `ρ = |v|`.
pub fn exp_map_codeword(v: Complex64) -> Result<Codeword> {
    let rho = v.norm();
    if !rho.is_finite() || rho >= FRAC_PI_2 {
        return Err(Error::Domain(format!("exponential map is not invertible at |v| = {rho}")));
    }
    let sinc = if rho < 1e-8 { 1.0 - rho * rho / 6.0 } else { rho.sin() / rho };
    Ok(Codeword::canonicalize(Complex64::new(rho.cos(), 0.0), -sinc * v))
}

pub fn build_exp_map(symbols: &[Complex64]) -> Result<Constellation> {
    let codewords = symbols
        .iter()
        .map(|&v| exp_map_codeword(v))
        .collect::<Result<Vec<_>>>()?;
    Constellation::new(Method::ExpMap, codewords)
}

/// `n` symbols on a circle of radius `radius`.
pub fn psk_symbols(n: usize, radius: f64) -> Vec<Complex64> {
    (0..n)
        .map(|k| Complex64::from_polar(radius, TAU * k as f64 / n as f64))
        .collect()
}

/// `nx × ny` rectangular grid centred at the origin with the given spacings.
pub fn qam_symbols(nx: usize, ny: usize, dx: f64, dy: f64) -> Vec<Complex64> {
    let cx = (nx as f64 - 1.0) / 2.0;
    let cy = (ny as f64 - 1.0) / 2.0;
    let mut out = Vec::with_capacity(nx * ny);
    for a in 0..nx {
        for b in 0..ny {
            out.push(Complex64::new((a as f64 - cx) * dx, (b as f64 - cy) * dy));
        }
    }
    out
}

fn min_distance_of_symbols(symbols: &[Complex64]) -> f64 {
    match symbols
        .iter()
        .map(|&v| exp_map_codeword(v))
        .collect::<Result<Vec<_>>>()
    {
        Ok(cw) => min_chordal_distance_of(&cw).unwrap_or(0.0),
        Err(_) => 0.0,
    }
}

/// Golden-section refinement of a unimodal-near-optimum 1-D objective.
fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..iters {
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        }
    }
    if fa >= fb {
        a
    } else {
        b
    }
}

/// PSK radius maximizing the minimum chordal distance: a coarse sweep over
/// `(0, π/2)` followed by golden-section refinement around the best sample.
pub fn optimal_psk_radius(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid("PSK needs at least two symbols"));
    }
    let f = |r: f64| min_distance_of_symbols(&psk_symbols(n, r));
    let steps = 400;
    let h = FRAC_PI_2 / steps as f64;
    let best = (1..steps)
        .map(|k| k as f64 * h)
        .max_by(|a, b| f(*a).total_cmp(&f(*b)))
        .expect("non-empty sweep");
    Ok(golden_max(f, (best - h).max(1e-9), (best + h).min(FRAC_PI_2 - 1e-12), 80))
}

/// Grid spacings `(dx, dy)` maximizing the minimum chordal distance of an
/// `nx × ny` grid inside the invertibility disc.
///
/// The grid corner is parametrized by its radius fraction `u` and angle
/// `ψ`; a coarse 2-D sweep is followed by shrinking local sweeps.
pub fn optimal_qam_spacing(nx: usize, ny: usize) -> Result<(f64, f64)> {
    if nx < 2 || ny < 2 {
        return Err(Error::invalid("QAM grid needs at least two levels per axis"));
    }
    let half = |k: usize| (k as f64 - 1.0) / 2.0;
    let spacing = |u: f64, psi: f64| {
        let r = u * FRAC_PI_2;
        (r * psi.cos() / half(nx), r * psi.sin() / half(ny))
    };
    let f = |u: f64, psi: f64| {
        let (dx, dy) = spacing(u, psi);
        min_distance_of_symbols(&qam_symbols(nx, ny, dx, dy))
    };
    let (mut u0, mut p0, mut best) = (0.5, std::f64::consts::FRAC_PI_4, f64::NEG_INFINITY);
    let mut hu = 0.5;
    let mut hp = std::f64::consts::FRAC_PI_4;
    let k = 8;
    for _round in 0..6 {
        let (cu, cp) = (u0, p0);
        for a in -k..=k {
            for b in -k..=k {
                let u = cu + hu * a as f64 / k as f64;
                let p = cp + hp * b as f64 / k as f64;
                if !(u > 0.0 && u < 1.0 - 1e-12 && p > 0.0 && p < FRAC_PI_2) {
                    continue;
                }
                let v = f(u, p);
                if v > best {
                    best = v;
                    u0 = u;
                    p0 = p;
                }
            }
        }
        hu /= k as f64 / 2.0;
        hp /= k as f64 / 2.0;
    }
    Ok(spacing(u0, p0))
}

/// Exp-Map constellation with `2^bits` codewords: PSK for `bits <= 2`,
/// otherwise the squarest rectangular QAM grid.
pub fn build_exp_map_default(bits: u32) -> Result<Constellation> {
    if bits == 0 || bits > 16 {
        return Err(Error::Unsupported(format!("Exp-Map is built for 1 <= B <= 16, got {bits}")));
    }
    let n = 1usize << bits;
    let symbols = if bits <= 2 {
        psk_symbols(n, optimal_psk_radius(n)?)
    } else {
        let nx = 1usize << bits.div_ceil(2);
        let ny = n / nx;
        let (dx, dy) = optimal_qam_spacing(nx, ny)?;
        qam_symbols(nx, ny, dx, dy)
    };
    build_exp_map(&symbols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::min_chordal_distance;

    #[test]
    fn codeword_examples() {
        let c = exp_map_codeword(Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!((c.c0().re, c.c1().norm()), (1.0, 0.0));
        let c = exp_map_codeword(Complex64::new(1.0, 0.0)).unwrap();
        assert!((c.c0().re - 0.5403023).abs() < 1e-7);
        assert!((c.c1() - Complex64::new(-0.8414710, 0.0)).norm() < 1e-7);
        assert!(exp_map_codeword(Complex64::new(0.0, FRAC_PI_2)).is_err());
        let tiny = exp_map_codeword(Complex64::new(1e-12, 0.0)).unwrap();
        assert!((tiny.c1().re + 1e-12).abs() < 1e-24);
    }

    #[test]
    fn psk4_radius_matches_grid_oracle() {
        let r = optimal_psk_radius(4).unwrap();
        let mut best = (0.0, f64::NEG_INFINITY);
        let mut k = 1;
        while (k as f64) * 1e-3 < FRAC_PI_2 {
            let rr = k as f64 * 1e-3;
            let d = min_distance_of_symbols(&psk_symbols(4, rr));
            if d > best.1 {
                best = (rr, d);
            }
            k += 1;
        }
        assert!((r - best.0).abs() <= 1e-3, "{r} vs {}", best.0);
        assert!(min_distance_of_symbols(&psk_symbols(4, r)) >= best.1 - 1e-9);
    }

    #[test]
    fn bpsk_reaches_antipodal() {
        let x = build_exp_map_default(1).unwrap();
        assert!((min_chordal_distance(&x).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn qam_sizes_and_domain() {
        for b in 3..=6 {
            let x = build_exp_map_default(b).unwrap();
            assert_eq!(x.len(), 1 << b);
            assert!(min_chordal_distance(&x).unwrap() > 0.0);
        }
        assert!(build_exp_map(&[Complex64::new(2.0, 0.0)]).is_err());
    }
}
