//! Rank-one front end: the dominant left singular vector of a 2×N block.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Received block with two rows and `N` columns, stored column-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ReceivedBlock {
    columns: Vec<[Complex64; 2]>,
}

impl ReceivedBlock {
    pub fn new(columns: Vec<[Complex64; 2]>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::invalid("received block needs at least one column"));
        }
        if columns.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("received block contains non-finite entries"));
        }
        Ok(Self { columns })
    }

    pub fn columns(&self) -> &[[Complex64; 2]] {
        &self.columns
    }

    pub fn antennas(&self) -> usize {
        self.columns.len()
    }

    /// Entries of the Hermitian matrix `Y Yᴴ`: `(a, b, d)` for `[[a, b], [b*, d]]`.
    pub fn gram(&self) -> (f64, Complex64, f64) {
        let mut a = 0.0;
        let mut d = 0.0;
        let mut b = Complex64::new(0.0, 0.0);
        for [y0, y1] in &self.columns {
            a += y0.norm_sqr();
            d += y1.norm_sqr();
            b += y0 * y1.conj();
        }
        (a, b, d)
    }
}

/// Dominant left singular vector of `Y` (not normalized).
///
/// With a single antenna the column itself is returned. Otherwise the top
/// eigenvector of `Y Yᴴ` comes from the closed-form 2×2 eigenproblem. When
/// both eigenvalues coincide the first basis vector is returned.
pub fn rough_estimate(y: &ReceivedBlock) -> Result<[Complex64; 2]> {
    let zero = Complex64::new(0.0, 0.0);
    if y.antennas() == 1 {
        let col = y.columns[0];
        if col[0] == zero && col[1] == zero {
            return Err(Error::Degenerate("received block is zero".into()));
        }
        return Ok(col);
    }
    let (a, b, d) = y.gram();
    if a + d == 0.0 {
        return Err(Error::Degenerate("received block is zero".into()));
    }
    if b == zero {
        let one = Complex64::new(1.0, 0.0);
        return Ok(if a >= d { [one, zero] } else { [zero, one] });
    }
    let half = 0.5 * (a - d);
    let lambda = 0.5 * (a + d) + (half * half + b.norm_sqr()).sqrt();
    // Pick the better-conditioned of the two equivalent eigenvector forms.
    Ok(if a >= d {
        [Complex64::new(lambda - d, 0.0), b.conj()]
    } else {
        [b, Complex64::new(lambda - a, 0.0)]
    })
}
