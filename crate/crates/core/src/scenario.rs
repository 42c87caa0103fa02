//! Simulation world: base-station layout, radio constants and the evaluation grid.
//!
//! A scenario is read from a TOML document ([`ScenarioConfig`]), validated and
//! converted into a [`NetworkScenario`] over the chosen scalar type. Every key is
//! optional except `bs_positions`; omitted keys take the defaults documented on
//! [`ScenarioConfig`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{dbm_to_mw, from_db, lit, Real, SPEED_OF_LIGHT};

/// Cartesian point in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point<T>) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Bearing of `other` seen from `self`, radians.
    pub fn bearing_to(&self, other: &Point<T>) -> T {
        (other.y - self.y).atan2(other.x - self.x)
    }
}

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Area<T> {
    pub x_min: T,
    pub y_min: T,
    pub x_max: T,
    pub y_max: T,
}

impl<T: Real> Area<T> {
    pub fn width(&self) -> T {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> T {
        self.y_max - self.y_min
    }

    pub fn centroid(&self) -> Point<T> {
        let two = lit::<T>(2.0);
        Point::new(
            (self.x_min + self.x_max) / two,
            (self.y_min + self.y_max) / two,
        )
    }

    /// Closed-rectangle membership with a small absolute slack for rounding.
    pub fn contains(&self, p: &Point<T>) -> bool {
        let slack = lit::<T>(1e-9) * (T::one() + self.width().abs().max(self.height().abs()));
        p.x >= self.x_min - slack
            && p.x <= self.x_max + slack
            && p.y >= self.y_min - slack
            && p.y <= self.y_max + slack
    }
}

/// On-disk configuration. All fields are optional except `bs_positions`.
///
/// | key | default |
/// |---|---|
/// | `bs_powers_dbm` | 0 dBm for every BS |
/// | `num_antennas` | 4 |
/// | `carrier_freq_hz` | 7.5e9 |
/// | `wavelength_scale` | 100 |
/// | `noise_power_dbm` | -95 |
/// | `area` | bounding box of `bs_positions` |
/// | `grid_step_m` | λ'/4 |
/// | `antenna_spacing_wavelengths` | 0.5 |
/// | `bs_boresight` | each array facing the area centroid |
/// | `min_distance_m` | 1.0 |
/// | `snr_offset_db` | 0 |
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub bs_positions: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bs_powers_dbm: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub num_antennas: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub carrier_freq_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wavelength_scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_power_dbm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_step_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub antenna_spacing_wavelengths: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bs_boresight: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_distance_m: Option<f64>,
    /// Global calibration offset added to every SNR, dB.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snr_offset_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub area: Option<Area<f64>>,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario config is always representable as TOML")
    }

    /// Configuration used for the four-corner evaluation: 4 BSs on the corners of a
    /// 100 m square, 4-element arrays, 7.5 GHz scaled ×100, 0 dBm, −95 dBm noise.
    pub fn four_corners() -> Self {
        ScenarioConfig {
            bs_positions: Some(vec![[0.0, 0.0], [100.0, 0.0], [0.0, 100.0], [100.0, 100.0]]),
            bs_powers_dbm: Some(vec![0.0; 4]),
            num_antennas: Some(4),
            carrier_freq_hz: Some(7.5e9),
            wavelength_scale: Some(100.0),
            noise_power_dbm: Some(-95.0),
            grid_step_m: Some(1.0),
            area: Some(Area {
                x_min: 0.0,
                y_min: 0.0,
                x_max: 100.0,
                y_max: 100.0,
            }),
            ..Default::default()
        }
    }
}

/// Validated simulation world.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkScenario<T> {
    pub bs_positions: Vec<Point<T>>,
    pub bs_powers_dbm: Vec<T>,
    pub num_antennas: usize,
    pub carrier_freq_hz: T,
    pub wavelength_scale: T,
    pub noise_power_dbm: T,
    pub area: Area<T>,
    pub grid_step_m: T,
    pub antenna_spacing_wavelengths: T,
    pub bs_boresight: Vec<T>,
    pub min_distance_m: T,
    pub snr_offset_db: T,
}

fn finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::invalid(name, format!("{v} is not finite")))
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    let v = finite(name, v)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::invalid(name, format!("{v} must be > 0")))
    }
}

/// Scaled wavelength λ' = scale·c/f.
pub fn scaled_wavelength(carrier_freq_hz: f64, wavelength_scale: f64) -> f64 {
    wavelength_scale * SPEED_OF_LIGHT / carrier_freq_hz
}

/// Validates a configuration document and fills defaults.
pub fn build_scenario<T: Real>(config: &ScenarioConfig) -> Result<NetworkScenario<T>> {
    let positions = config
        .bs_positions
        .as_ref()
        .ok_or_else(|| Error::MissingField("bs_positions".into()))?;
    if positions.is_empty() {
        return Err(Error::invalid(
            "bs_positions",
            "at least one BS is required",
        ));
    }
    for p in positions {
        finite("bs_positions", p[0])?;
        finite("bs_positions", p[1])?;
    }
    let b = positions.len();

    let powers = config.bs_powers_dbm.clone().unwrap_or_else(|| vec![0.0; b]);
    if powers.len() != b {
        return Err(Error::invalid(
            "bs_powers_dbm",
            format!("expected {b} entries, found {}", powers.len()),
        ));
    }
    for &p in &powers {
        finite("bs_powers_dbm", p)?;
    }

    let num_antennas = config.num_antennas.unwrap_or(4);
    if num_antennas < 1 {
        return Err(Error::invalid(
            "num_antennas",
            format!("{num_antennas} must be >= 1"),
        ));
    }
    let carrier = positive("carrier_freq_hz", config.carrier_freq_hz.unwrap_or(7.5e9))?;
    let scale = positive("wavelength_scale", config.wavelength_scale.unwrap_or(100.0))?;
    let noise = finite("noise_power_dbm", config.noise_power_dbm.unwrap_or(-95.0))?;
    let spacing = positive(
        "antenna_spacing_wavelengths",
        config.antenna_spacing_wavelengths.unwrap_or(0.5),
    )?;
    let min_distance = positive("min_distance_m", config.min_distance_m.unwrap_or(1.0))?;
    let offset = finite("snr_offset_db", config.snr_offset_db.unwrap_or(0.0))?;

    let area = match config.area {
        Some(a) => a,
        None => {
            let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
            for p in positions {
                x0 = x0.min(p[0]);
                y0 = y0.min(p[1]);
                x1 = x1.max(p[0]);
                y1 = y1.max(p[1]);
            }
            Area {
                x_min: x0,
                y_min: y0,
                x_max: x1,
                y_max: y1,
            }
        }
    };
    for v in [area.x_min, area.y_min, area.x_max, area.y_max] {
        finite("area", v)?;
    }
    if !(area.x_max > area.x_min && area.y_max > area.y_min) {
        return Err(Error::invalid(
            "area",
            "area must have positive width and height",
        ));
    }

    let lambda = scaled_wavelength(carrier, scale);
    let step = match config.grid_step_m {
        Some(s) => positive("grid_step_m", s)?,
        None => lambda / 4.0,
    };
    if step >= lambda {
        return Err(Error::invalid(
            "grid_step_m",
            format!("{step} m must be smaller than the scaled wavelength {lambda} m"),
        ));
    }

    for p in positions {
        if p[0] < area.x_min || p[0] > area.x_max || p[1] < area.y_min || p[1] > area.y_max {
            return Err(Error::invalid(
                "bs_positions",
                format!("({}, {}) lies outside the area", p[0], p[1]),
            ));
        }
    }

    let centroid = (
        (area.x_min + area.x_max) / 2.0,
        (area.y_min + area.y_max) / 2.0,
    );
    let boresight = match &config.bs_boresight {
        Some(v) => {
            if v.len() != b {
                return Err(Error::invalid(
                    "bs_boresight",
                    format!("expected {b} entries, found {}", v.len()),
                ));
            }
            for &x in v {
                finite("bs_boresight", x)?;
            }
            v.clone()
        }
        None => positions
            .iter()
            .map(|p| {
                let (dx, dy) = (centroid.0 - p[0], centroid.1 - p[1]);
                if dx == 0.0 && dy == 0.0 {
                    0.0
                } else {
                    dy.atan2(dx)
                }
            })
            .collect(),
    };

    Ok(NetworkScenario {
        bs_positions: positions
            .iter()
            .map(|p| Point::new(lit(p[0]), lit(p[1])))
            .collect(),
        bs_powers_dbm: powers.iter().map(|&p| lit(p)).collect(),
        num_antennas: num_antennas as usize,
        carrier_freq_hz: lit(carrier),
        wavelength_scale: lit(scale),
        noise_power_dbm: lit(noise),
        area: Area {
            x_min: lit(area.x_min),
            y_min: lit(area.y_min),
            x_max: lit(area.x_max),
            y_max: lit(area.y_max),
        },
        grid_step_m: lit(step),
        antenna_spacing_wavelengths: lit(spacing),
        bs_boresight: boresight.iter().map(|&x| lit(x)).collect(),
        min_distance_m: lit(min_distance),
        snr_offset_db: lit(offset),
    })
}

/// Parses and validates a TOML scenario document.
pub fn parse_scenario<T: Real>(text: &str) -> Result<NetworkScenario<T>> {
    build_scenario(&ScenarioConfig::from_toml_str(text)?)
}

impl<T: Real> NetworkScenario<T> {
    pub fn num_bs(&self) -> usize {
        self.bs_positions.len()
    }

    /// λ' = scale·c/f, meters.
    pub fn wavelength(&self) -> T {
        self.wavelength_scale * lit(SPEED_OF_LIGHT) / self.carrier_freq_hz
    }

    pub fn powers_mw(&self) -> Vec<T> {
        self.bs_powers_dbm.iter().map(|&p| dbm_to_mw(p)).collect()
    }

    /// Noise power in mW with the calibration offset folded in, so that every SNR
    /// computed against it is shifted by `snr_offset_db`.
    pub fn effective_noise_mw(&self) -> T {
        dbm_to_mw(self.noise_power_dbm) / from_db(self.snr_offset_db)
    }

    /// Index of the nearest BS; ties go to the lowest index.
    pub fn closest_bs(&self, location: &Point<T>) -> usize {
        let mut best = 0;
        let mut best_d = self.bs_positions[0].distance(location);
        for (i, p) in self.bs_positions.iter().enumerate().skip(1) {
            let d = p.distance(location);
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best
    }

    /// Full configuration document that rebuilds this scenario.
    pub fn to_config(&self) -> ScenarioConfig {
        let f = |v: T| v.to_f64().expect("finite scalar");
        ScenarioConfig {
            bs_positions: Some(self.bs_positions.iter().map(|p| [f(p.x), f(p.y)]).collect()),
            bs_powers_dbm: Some(self.bs_powers_dbm.iter().map(|&p| f(p)).collect()),
            num_antennas: Some(self.num_antennas as i64),
            carrier_freq_hz: Some(f(self.carrier_freq_hz)),
            wavelength_scale: Some(f(self.wavelength_scale)),
            noise_power_dbm: Some(f(self.noise_power_dbm)),
            grid_step_m: Some(f(self.grid_step_m)),
            antenna_spacing_wavelengths: Some(f(self.antenna_spacing_wavelengths)),
            bs_boresight: Some(self.bs_boresight.iter().map(|&x| f(x)).collect()),
            min_distance_m: Some(f(self.min_distance_m)),
            snr_offset_db: Some(f(self.snr_offset_db)),
            area: Some(Area {
                x_min: f(self.area.x_min),
                y_min: f(self.area.y_min),
                x_max: f(self.area.x_max),
                y_max: f(self.area.y_max),
            }),
        }
    }
}

/// Cell centers of the discretized area, row-major (`y` outer, `x` inner).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    pub cells: Vec<Point<T>>,
    /// Requested step, meters.
    pub step: T,
    pub nx: usize,
    pub ny: usize,
    /// Realized spacing along each axis. Equals `step` whenever it divides the area.
    pub step_x: T,
    pub step_y: T,
}

impl<T: Real> Grid<T> {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }
}

fn cells_along<T: Real>(extent: T, step: T) -> usize {
    let ratio = (extent / step).to_f64().expect("finite ratio");
    // ratios within rounding of an integer are not rounded up to an extra cell
    let nearest = ratio.round();
    let n = if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        ratio.ceil()
    };
    (n as usize).max(1)
}

/// Discretizes the scenario area into `⌈w/step⌉·⌈h/step⌉` cells that tile it exactly.
pub fn make_grid<T: Real>(scenario: &NetworkScenario<T>) -> Grid<T> {
    let area = &scenario.area;
    let step = scenario.grid_step_m;
    let nx = cells_along(area.width(), step);
    let ny = cells_along(area.height(), step);
    let step_x = area.width() / crate::num::from_usize(nx);
    let step_y = area.height() / crate::num::from_usize(ny);
    let half = lit::<T>(0.5);
    let mut cells = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        let y = area.y_min + (crate::num::from_usize::<T>(iy) + half) * step_y;
        for ix in 0..nx {
            let x = area.x_min + (crate::num::from_usize::<T>(ix) + half) * step_x;
            cells.push(Point::new(x, y));
        }
    }
    Grid {
        cells,
        step,
        nx,
        ny,
        step_x,
        step_y,
    }
}
