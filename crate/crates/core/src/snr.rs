//! SNR expressions for joint and independent SSB transmission.
//!
//! All quantities here are linear (mW, mW/mW); conversion to dB happens only at
//! the presentation layer. The per-BS "term" of a beam is its received power
//! `ρ_b·|h_b^H f_b|²`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::channel::{ChannelField, ChannelVector};
use crate::error::{Error, Result};
use crate::num::{from_usize, to_db, Real};
use crate::phasebook::{BeamCodebook, PhaseBook};
use crate::scenario::{Grid, NetworkScenario};

/// One joint transmission: a beam per BS plus a phase per BS.
#[derive(Debug, Clone, PartialEq)]
pub struct JointConfig<T> {
    pub beam_indices: Vec<usize>,
    pub phase_row: Vec<T>,
}

/// Transmission resources on each side of the joint/independent comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceBudget {
    pub num_bs: usize,
    /// Beams swept per BS in independent transmission.
    pub n_ind: usize,
    /// Joint beam tuples.
    pub n_joint: usize,
}

impl ResourceBudget {
    pub fn new(num_bs: usize, n_ind: usize, n_joint: usize) -> Result<Self> {
        for (name, v) in [("num_bs", num_bs), ("n_ind", n_ind), ("n_joint", n_joint)] {
            if v == 0 {
                return Err(Error::invalid(name, "must be >= 1"));
            }
        }
        Ok(Self {
            num_bs,
            n_ind,
            n_joint,
        })
    }

    /// Repetitions `R = B·N_joint/N_ind` that give independent transmission the
    /// same number of SSB slots as the joint scheme.
    pub fn repetitions_ind<T: Real>(&self) -> T {
        from_usize::<T>(self.num_bs * self.n_joint) / from_usize(self.n_ind)
    }

    /// `10·log10(N_ind/N_joint)`.
    pub fn penalty_db<T: Real>(&self) -> T {
        to_db(from_usize::<T>(self.n_ind) / from_usize(self.n_joint))
    }
}

fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            found,
        })
    }
}

fn check_inputs<T: Real>(
    channels: &[ChannelVector<T>],
    powers_mw: &[T],
    codebook: &BeamCodebook<T>,
    beam_indices: &[usize],
) -> Result<()> {
    let b = channels.len();
    check_len("powers", b, powers_mw.len())?;
    check_len("beam indices", b, beam_indices.len())?;
    for h in channels {
        if let Some(beam) = codebook.beams.first() {
            check_len("channel length", beam.len(), h.coeffs.len())?;
        }
    }
    for &m in beam_indices {
        if m >= codebook.len() {
            return Err(Error::OutOfRange {
                what: "beam",
                index: m,
                len: codebook.len(),
            });
        }
    }
    Ok(())
}

/// `√ρ_b·h_b^H f_b` for every BS.
fn amplitudes<T: Real>(
    channels: &[ChannelVector<T>],
    powers_mw: &[T],
    codebook: &BeamCodebook<T>,
    beam_indices: &[usize],
) -> Vec<Complex<T>> {
    channels
        .iter()
        .zip(powers_mw)
        .zip(beam_indices)
        .map(|((h, &p), &m)| h.project(codebook.beam(m)) * p.sqrt())
        .collect()
}

/// Per-BS received powers `ρ_b·|h_b^H f_b|²` for a beam tuple.
pub fn joint_terms<T: Real>(
    channels: &[ChannelVector<T>],
    powers_mw: &[T],
    codebook: &BeamCodebook<T>,
    beam_indices: &[usize],
) -> Result<Vec<T>> {
    check_inputs(channels, powers_mw, codebook, beam_indices)?;
    Ok(amplitudes(channels, powers_mw, codebook, beam_indices)
        .iter()
        .map(Complex::norm_sqr)
        .collect())
}

/// SNR of a single joint transmission: `|Σ_b √ρ_b h_b^H f_b e^{iθ_b}|² / N_0`.
pub fn snr_joint<T: Real>(
    channels: &[ChannelVector<T>],
    powers_mw: &[T],
    codebook: &BeamCodebook<T>,
    config: &JointConfig<T>,
    noise_mw: T,
) -> Result<T> {
    check_inputs(channels, powers_mw, codebook, &config.beam_indices)?;
    check_len("phase row", channels.len(), config.phase_row.len())?;
    let amps = amplitudes(channels, powers_mw, codebook, &config.beam_indices);
    Ok(coherent_power(&amps, &config.phase_row) / noise_mw)
}

fn coherent_power<T: Real>(amps: &[Complex<T>], phases: &[T]) -> T {
    amps.iter()
        .zip(phases)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (a, &t)| {
            acc + a * Complex::from_polar(T::one(), t)
        })
        .norm_sqr()
}

/// SNR after the UE coherently sums the repetitions of one beam tuple sent with
/// every row of `book`.
pub fn snr_joint_combined<T: Real>(
    channels: &[ChannelVector<T>],
    powers_mw: &[T],
    codebook: &BeamCodebook<T>,
    beam_indices: &[usize],
    book: &PhaseBook<T>,
    noise_mw: T,
) -> Result<T> {
    check_inputs(channels, powers_mw, codebook, beam_indices)?;
    check_len("phase book width", channels.len(), book.width())?;
    let amps = amplitudes(channels, powers_mw, codebook, beam_indices);
    let total = book
        .rows
        .iter()
        .fold(T::zero(), |acc, row| acc + coherent_power(&amps, row));
    Ok(total / noise_mw)
}

/// Closed form of [`snr_joint_combined`] for an orthogonal phase book with
/// `b_effective` rows: `b_effective·Σ_b ρ_b|h_b^H f_b|² / N_0`.
pub fn snr_joint_closed<T: Real>(
    channels: &[ChannelVector<T>],
    powers_mw: &[T],
    codebook: &BeamCodebook<T>,
    beam_indices: &[usize],
    b_effective: usize,
    noise_mw: T,
) -> Result<T> {
    let terms = joint_terms(channels, powers_mw, codebook, beam_indices)?;
    let sum = terms.iter().fold(T::zero(), |a, &t| a + t);
    Ok(from_usize::<T>(b_effective) * sum / noise_mw)
}

/// Codebook beam with the largest `|h^H f|²`; ties go to the lowest index.
pub fn best_beam<T: Real>(channel: &ChannelVector<T>, codebook: &BeamCodebook<T>) -> (usize, T) {
    let mut best = (0, T::neg_infinity());
    for (m, f) in codebook.beams.iter().enumerate() {
        let g = channel.project(f).norm_sqr();
        if g > best.1 {
            best = (m, g);
        }
    }
    best
}

/// SNR of independent transmission from one BS repeated `repetitions` times.
pub fn snr_independent<T: Real>(
    channel: &ChannelVector<T>,
    power_mw: T,
    beam: &[Complex<T>],
    repetitions: T,
    noise_mw: T,
) -> Result<T> {
    check_len("beam length", channel.coeffs.len(), beam.len())?;
    if repetitions.is_nan() || repetitions <= T::zero() {
        return Err(Error::invalid("repetitions", "must be positive"));
    }
    Ok(repetitions * power_mw * channel.project(beam).norm_sqr() / noise_mw)
}

/// Relative gain of joint over independent transmission, dB:
/// `10·log10(1 + Σ_{b≠k} term_b / term_k) + 10·log10(N_ind/N_joint)`.
pub fn delta_snr<T: Real>(terms: &[T], closest: usize, budget: &ResourceBudget) -> Result<T> {
    if closest >= terms.len() {
        return Err(Error::OutOfRange {
            what: "bs",
            index: closest,
            len: terms.len(),
        });
    }
    let own = terms[closest];
    if own.is_nan() || own <= T::zero() {
        return Err(Error::DegenerateClosest);
    }
    let others = terms
        .iter()
        .enumerate()
        .filter(|&(b, _)| b != closest)
        .fold(T::zero(), |acc, (_, &t)| acc + t);
    Ok(to_db(T::one() + others / own) + budget.penalty_db())
}

/// Received power `ρ_b·|h_b^H f_m|²` for every BS `b`, beam `m` and grid cell `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamGainTable<T> {
    num_bs: usize,
    num_beams: usize,
    num_cells: usize,
    /// index `(b·num_beams + m)·num_cells + g`
    terms: Vec<T>,
}

impl<T: Real> BeamGainTable<T> {
    /// Builds the table from precomputed channels.
    pub fn from_field(
        field: &ChannelField<T>,
        codebook: &BeamCodebook<T>,
        powers_mw: &[T],
    ) -> Result<Self> {
        check_len("powers", field.num_bs(), powers_mw.len())?;
        check_len(
            "codebook length",
            field.num_antennas(),
            codebook.beams[0].len(),
        )?;
        let (b, nb, g) = (field.num_bs(), codebook.len(), field.num_cells());
        let terms = (0..b * nb)
            .into_par_iter()
            .flat_map_iter(|bm| {
                let (bs, m) = (bm / nb, bm % nb);
                let beam = codebook.beam(m);
                let p = powers_mw[bs];
                (0..g).map(move |cell| {
                    let h = field.get(bs, cell);
                    let proj = h
                        .iter()
                        .zip(beam)
                        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, f)| {
                            acc + x.conj() * f
                        });
                    p * proj.norm_sqr()
                })
            })
            .collect();
        Ok(Self {
            num_bs: b,
            num_beams: nb,
            num_cells: g,
            terms,
        })
    }

    /// Builds the table from explicit channels, `channels[cell][b]`.
    pub fn from_cell_channels(
        channels: &[Vec<ChannelVector<T>>],
        codebook: &BeamCodebook<T>,
        powers_mw: &[T],
    ) -> Result<Self> {
        if channels.is_empty() {
            return Err(Error::EmptyInput("channels"));
        }
        let (b, nb, g) = (powers_mw.len(), codebook.len(), channels.len());
        let mut terms = vec![T::zero(); b * nb * g];
        for (cell, hs) in channels.iter().enumerate() {
            check_len("channels per cell", b, hs.len())?;
            for (bs, h) in hs.iter().enumerate() {
                check_len("codebook length", h.coeffs.len(), codebook.beams[0].len())?;
                for (m, beam) in codebook.beams.iter().enumerate() {
                    terms[(bs * nb + m) * g + cell] = powers_mw[bs] * h.project(beam).norm_sqr();
                }
            }
        }
        Ok(Self {
            num_bs: b,
            num_beams: nb,
            num_cells: g,
            terms,
        })
    }

    /// Builds the table for a scenario with its DFT codebook, evaluating channels on
    /// the fly instead of storing them.
    pub fn compute(
        scenario: &NetworkScenario<T>,
        grid: &Grid<T>,
        codebook: &BeamCodebook<T>,
    ) -> Result<Self> {
        let (b, nb, g) = (scenario.num_bs(), codebook.len(), grid.len());
        let powers = scenario.powers_mw();
        let per_cell: Vec<Vec<T>> = grid
            .cells
            .par_iter()
            .map(|&cell| {
                let mut out = Vec::with_capacity(b * nb);
                for (bs, &p) in powers.iter().enumerate() {
                    let h = crate::channel::los_channel(scenario, bs, cell)?;
                    check_len("codebook length", h.coeffs.len(), codebook.beams[0].len())?;
                    for beam in &codebook.beams {
                        out.push(p * h.project(beam).norm_sqr());
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        let mut terms = vec![T::zero(); b * nb * g];
        for (cell, row) in per_cell.iter().enumerate() {
            for (bm, &t) in row.iter().enumerate() {
                terms[bm * g + cell] = t;
            }
        }
        Ok(Self {
            num_bs: b,
            num_beams: nb,
            num_cells: g,
            terms,
        })
    }

    pub fn num_bs(&self) -> usize {
        self.num_bs
    }

    pub fn num_beams(&self) -> usize {
        self.num_beams
    }

    pub fn num_cells(&self) -> usize {
        self.num_cells
    }

    #[inline]
    pub fn term(&self, b: usize, m: usize, g: usize) -> T {
        self.terms[(b * self.num_beams + m) * self.num_cells + g]
    }

    /// Terms of BS `b`, beam `m` over all cells.
    pub fn beam_row(&self, b: usize, m: usize) -> &[T] {
        let start = (b * self.num_beams + m) * self.num_cells;
        &self.terms[start..start + self.num_cells]
    }

    /// Per-BS terms of `tuple` at cell `g`.
    pub fn tuple_terms(&self, tuple: &[usize], g: usize) -> Vec<T> {
        tuple
            .iter()
            .enumerate()
            .map(|(b, &m)| self.term(b, m, g))
            .collect()
    }

    /// `Σ_b term_b` for `tuple` at `g`.
    #[inline]
    pub fn tuple_power(&self, tuple: &[usize], g: usize) -> T {
        tuple
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (b, &m)| acc + self.term(b, m, g))
    }

    /// Strongest beam of BS `b` at cell `g`; ties go to the lowest index.
    pub fn best_beam(&self, b: usize, g: usize) -> (usize, T) {
        let mut best = (0, T::neg_infinity());
        for m in 0..self.num_beams {
            let t = self.term(b, m, g);
            if t > best.1 {
                best = (m, t);
            }
        }
        best
    }
}

/// `b_effective·Σ_b term_b / N_0`.
#[inline]
pub fn closed_from_terms<T: Real>(terms_sum: T, b_effective: usize, noise_mw: T) -> T {
    from_usize::<T>(b_effective) * terms_sum / noise_mw
}
