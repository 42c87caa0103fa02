use crate::channel::{channel_field, DEFAULT_CHANNEL_BUDGET_BYTES};
use crate::error::{Error, Result};
use crate::num::Real;
use crate::phasebook::{dft_codebook, BeamCodebook};
use crate::scenario::{make_grid, Grid, NetworkScenario};
use crate::snr::{BeamGainTable, ResourceBudget};

/// Everything derived once from a scenario: grid, codebook, per-beam gains and the
/// closest BS of every cell.
#[derive(Debug, Clone)]
pub struct Simulation<T> {
    pub scenario: NetworkScenario<T>,
    pub grid: Grid<T>,
    pub codebook: BeamCodebook<T>,
    pub gains: BeamGainTable<T>,
    pub closest: Vec<usize>,
    pub noise_mw: T,
}

impl<T: Real> Simulation<T> {
    pub fn new(scenario: NetworkScenario<T>) -> Result<Self> {
        Self::with_channel_budget(scenario, DEFAULT_CHANNEL_BUDGET_BYTES)
    }

    /// Uses a precomputed channel table when it fits in `budget_bytes`, otherwise
    /// evaluates channels cell by cell.
    pub fn with_channel_budget(scenario: NetworkScenario<T>, budget_bytes: usize) -> Result<Self> {
        let grid = make_grid(&scenario);
        let codebook = dft_codebook(scenario.num_antennas)?;
        let gains = match channel_field(&scenario, &grid, budget_bytes) {
            Ok(field) => BeamGainTable::from_field(&field, &codebook, &scenario.powers_mw())?,
            Err(Error::ResourceLimit { .. }) => {
                BeamGainTable::compute(&scenario, &grid, &codebook)?
            }
            Err(e) => return Err(e),
        };
        let closest = grid.cells.iter().map(|c| scenario.closest_bs(c)).collect();
        let noise_mw = scenario.effective_noise_mw();
        Ok(Self {
            scenario,
            grid,
            codebook,
            gains,
            closest,
            noise_mw,
        })
    }

    pub fn num_bs(&self) -> usize {
        self.scenario.num_bs()
    }

    /// Codebook size, which is also the number of beams each BS sweeps on its own.
    pub fn n_ind(&self) -> usize {
        self.codebook.len()
    }

    /// Budget with `N_joint = N_ind`.
    pub fn matched_budget(&self) -> ResourceBudget {
        ResourceBudget {
            num_bs: self.num_bs(),
            n_ind: self.n_ind(),
            n_joint: self.n_ind(),
        }
    }
}
