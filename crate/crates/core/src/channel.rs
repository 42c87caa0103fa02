//! Line-of-sight channel from a BS uniform linear array to a single-antenna UE.
//!
//! Element `n` of the channel is `√g(d)·exp(−i2π·d_n/λ')` with the Friis gain
//! `g(d) = (λ'/(4πd))²` and `d` clamped to the scenario's minimum distance.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::num::{from_usize, lit, Real};
use crate::scenario::{Grid, NetworkScenario, Point};

/// How per-element path lengths are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseModel {
    /// Planar wavefront: `d_n = d − n·Δ·λ'·sin φ`.
    #[default]
    FarField,
    /// Exact distance from each element position to the location.
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector<T> {
    pub coeffs: Vec<Complex<T>>,
    /// Zero-based BS index.
    pub bs_index: usize,
    pub location: Point<T>,
}

impl<T: Real> ChannelVector<T> {
    pub fn norm_sqr(&self) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |acc, c| acc + c.norm_sqr())
    }

    /// `h^H f`.
    pub fn project(&self, beam: &[Complex<T>]) -> Complex<T> {
        self.coeffs
            .iter()
            .zip(beam)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (h, f)| {
                acc + h.conj() * f
            })
    }
}

/// Free-space power gain `(λ/(4πd))²`.
pub fn friis_gain<T: Real>(wavelength: T, distance: T) -> T {
    let r = wavelength / (lit::<T>(4.0) * T::PI() * distance);
    r * r
}

/// LoS channel from BS `bs_index` (zero-based) to `location`.
pub fn los_channel<T: Real>(
    scenario: &NetworkScenario<T>,
    bs_index: usize,
    location: Point<T>,
) -> Result<ChannelVector<T>> {
    los_channel_with(scenario, bs_index, location, PhaseModel::FarField)
}

pub fn los_channel_with<T: Real>(
    scenario: &NetworkScenario<T>,
    bs_index: usize,
    location: Point<T>,
    model: PhaseModel,
) -> Result<ChannelVector<T>> {
    let b = scenario.num_bs();
    if bs_index >= b {
        return Err(Error::OutOfRange {
            what: "bs",
            index: bs_index,
            len: b,
        });
    }
    if !scenario.area.contains(&location) {
        return Err(Error::LocationOutsideArea {
            x: location.x.to_f64().unwrap_or(f64::NAN),
            y: location.y.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(ChannelVector {
        coeffs: element_response(scenario, bs_index, &location, model),
        bs_index,
        location,
    })
}

fn element_response<T: Real>(
    scenario: &NetworkScenario<T>,
    bs_index: usize,
    location: &Point<T>,
    model: PhaseModel,
) -> Vec<Complex<T>> {
    let origin = scenario.bs_positions[bs_index];
    let boresight = scenario.bs_boresight[bs_index];
    let lambda = scenario.wavelength();
    let pitch = scenario.antenna_spacing_wavelengths * lambda;
    let d = origin.distance(location).max(scenario.min_distance_m);
    let amplitude = friis_gain(lambda, d).sqrt();
    let k = T::TAU() / lambda;

    // bearing is undefined at the array itself; treat it as broadside
    let phi = if origin == *location {
        T::zero()
    } else {
        origin.bearing_to(location) - boresight
    };
    let sin_phi = phi.sin();
    let axis = boresight + T::FRAC_PI_2();
    let (ax, ay) = (axis.cos(), axis.sin());

    (0..scenario.num_antennas)
        .map(|n| {
            let offset = from_usize::<T>(n) * pitch;
            let dn = match model {
                PhaseModel::FarField => d - offset * sin_phi,
                PhaseModel::Exact => {
                    let element = Point::new(origin.x + offset * ax, origin.y + offset * ay);
                    element.distance(location).max(scenario.min_distance_m)
                }
            };
            Complex::from_polar(amplitude, -k * dn)
        })
        .collect()
}

/// Precomputed channels for every (BS, cell) pair, stored BS-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelField<T> {
    num_bs: usize,
    num_cells: usize,
    num_antennas: usize,
    coeffs: Vec<Complex<T>>,
}

/// Default memory ceiling for [`channel_field`]: 1 GiB.
pub const DEFAULT_CHANNEL_BUDGET_BYTES: usize = 1 << 30;

impl<T: Real> ChannelField<T> {
    pub fn num_bs(&self) -> usize {
        self.num_bs
    }

    pub fn num_cells(&self) -> usize {
        self.num_cells
    }

    pub fn num_antennas(&self) -> usize {
        self.num_antennas
    }

    /// Channel coefficients from BS `b` to cell `g`.
    pub fn get(&self, b: usize, g: usize) -> &[Complex<T>] {
        let start = (b * self.num_cells + g) * self.num_antennas;
        &self.coeffs[start..start + self.num_antennas]
    }
}

/// Evaluates [`los_channel`] for every BS and grid cell.
///
/// Fails with [`Error::ResourceLimit`] when the table would exceed `budget_bytes`;
/// callers can then evaluate channels on the fly instead.
pub fn channel_field<T: Real>(
    scenario: &NetworkScenario<T>,
    grid: &Grid<T>,
    budget_bytes: usize,
) -> Result<ChannelField<T>> {
    let b = scenario.num_bs();
    let n = scenario.num_antennas;
    let g = grid.len();
    let required = b
        .saturating_mul(g)
        .saturating_mul(n)
        .saturating_mul(std::mem::size_of::<Complex<T>>());
    if required > budget_bytes {
        return Err(Error::ResourceLimit {
            required,
            budget: budget_bytes,
        });
    }
    let coeffs: Vec<Complex<T>> = (0..b * g)
        .into_par_iter()
        .flat_map_iter(|idx| {
            let (bs, cell) = (idx / g, idx % g);
            element_response(scenario, bs, &grid.cells[cell], PhaseModel::FarField)
        })
        .collect();
    Ok(ChannelField {
        num_bs: b,
        num_cells: g,
        num_antennas: n,
        coeffs,
    })
}
