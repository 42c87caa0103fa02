//! DFT beam codebooks and complementary per-BS phase sets.

use std::cmp::Ordering;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::num::{from_usize, wrap_phase, Real};

/// Columns of the `n`-point DFT matrix, each with unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamCodebook<T> {
    pub beams: Vec<Vec<Complex<T>>>,
}

impl<T: Real> BeamCodebook<T> {
    pub fn len(&self) -> usize {
        self.beams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beams.is_empty()
    }

    pub fn beam(&self, m: usize) -> &[Complex<T>] {
        &self.beams[m]
    }

    /// `G[m][m'] = beams[m]^H beams[m']`.
    pub fn gram(&self) -> Vec<Vec<Complex<T>>> {
        gram(&self.beams)
    }
}

fn gram<T: Real>(rows: &[Vec<Complex<T>>]) -> Vec<Vec<Complex<T>>> {
    rows.iter()
        .map(|a| {
            rows.iter()
                .map(|b| {
                    a.iter()
                        .zip(b)
                        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| {
                            acc + x.conj() * y
                        })
                })
                .collect()
        })
        .collect()
}

/// Beam `m`, entry `k`: `exp(i2πkm/n)/√n`.
pub fn dft_codebook<T: Real>(n: usize) -> Result<BeamCodebook<T>> {
    if n == 0 {
        return Err(Error::invalid("n", "codebook size must be >= 1"));
    }
    let nf = from_usize::<T>(n);
    let norm = nf.sqrt().recip();
    let beams = (0..n)
        .map(|m| {
            (0..n)
                .map(|k| {
                    // reduce k·m mod n first so large products keep full precision
                    let idx = from_usize::<T>((k * m) % n);
                    Complex::from_polar(norm, T::TAU() * idx / nf)
                })
                .collect()
        })
        .collect();
    Ok(BeamCodebook { beams })
}

/// Per-BS phase tuples whose unit-modulus rows are mutually orthogonal.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseBook<T> {
    pub rows: Vec<Vec<T>>,
}

impl<T: Real> PhaseBook<T> {
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Width of each row (number of BSs).
    pub fn width(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// `exp(iθ)` for every entry.
    pub fn amplitudes(&self) -> Vec<Vec<Complex<T>>> {
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&t| Complex::from_polar(T::one(), t))
                    .collect()
            })
            .collect()
    }

    /// `G[r][r'] = Σ_b exp(i(θ_b^{(r')} − θ_b^{(r)}))`; `b·I` for a valid book.
    pub fn gram(&self) -> Vec<Vec<Complex<T>>> {
        gram(&self.amplitudes())
    }
}

/// Complementary phase set for `b` cooperating BSs.
///
/// Orders 1, 2 and 4 use the phase patterns of the Sylvester Hadamard matrix;
/// every other order uses DFT rows `θ_j^{(r)} = 2π·r·j/b`. Rows are sorted
/// lexicographically and the first BS always has phase 0.
pub fn make_phase_book<T: Real>(b: usize) -> Result<PhaseBook<T>> {
    if b == 0 {
        return Err(Error::invalid("b", "phase book order must be >= 1"));
    }
    let mut rows: Vec<Vec<T>> = if matches!(b, 1 | 2 | 4) {
        // H_{2^k}[r][j] = (−1)^{popcount(r & j)}
        (0..b)
            .map(|r| {
                (0..b)
                    .map(|j| {
                        if (r & j).count_ones() % 2 == 0 {
                            T::zero()
                        } else {
                            T::PI()
                        }
                    })
                    .collect()
            })
            .collect()
    } else {
        let bf = from_usize::<T>(b);
        (0..b)
            .map(|r| {
                (0..b)
                    .map(|j| wrap_phase(T::TAU() * from_usize::<T>((r * j) % b) / bf))
                    .collect()
            })
            .collect()
    };
    rows.sort_by(|x, y| {
        x.iter()
            .zip(y)
            .map(|(a, c)| a.partial_cmp(c).unwrap_or(Ordering::Equal))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    });
    Ok(PhaseBook { rows })
}
