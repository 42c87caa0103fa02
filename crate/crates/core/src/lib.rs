//! Coverage simulation for jointly transmitted synchronization signal blocks.
//!
//! Several base stations send the same SSB beam tuple repeatedly, each repetition
//! with a different row of a complementary phase book. A UE that sums the
//! repetitions sees the per-BS powers add up regardless of where it is, since the
//! cross terms cancel. The crate models the LoS channels, builds DFT codebooks and
//! phase books, picks beam tuples greedily for coverage, and compares the result
//! against independent per-BS beam sweeping at equal transmission budgets.
//!
//! Numeric code is generic over [`Real`] (`f32`/`f64`); the aliases at the crate
//! root fix it to `f64`.

pub mod channel;
pub mod coverage;
pub mod error;
pub mod num;
pub mod oracle;
pub mod phasebook;
pub mod scenario;
pub mod selection;
pub mod simulation;
pub mod snr;

pub use channel::{channel_field, los_channel, ChannelField, ChannelVector, PhaseModel};
pub use coverage::{
    calibrate_offset, coverage_probability, delta_field, snr_field, threshold_sweep,
    CoverageReport, Scheme, SnrField,
};
pub use error::{Error, Result};
pub use num::Real;
pub use phasebook::{dft_codebook, make_phase_book, BeamCodebook, PhaseBook};
pub use scenario::{
    build_scenario, make_grid, parse_scenario, Area, Grid, NetworkScenario, Point, ScenarioConfig,
};
pub use selection::{
    dominant_set, enhanced_plan, greedy_select, DominantSet, EnhancedPlan, GreedyOutcome,
    JointBeamPlan,
};
pub use simulation::Simulation;
pub use snr::{
    delta_snr, joint_terms, snr_independent, snr_joint, snr_joint_closed, snr_joint_combined,
    BeamGainTable, JointConfig, ResourceBudget,
};

pub type Scenario = NetworkScenario<f64>;
pub type Scenario32 = NetworkScenario<f32>;
pub type Sim = Simulation<f64>;
pub type Sim32 = Simulation<f32>;
pub type Field = SnrField<f64>;
pub type Channel = ChannelVector<f64>;
pub type Codebook = BeamCodebook<f64>;
pub type Phases = PhaseBook<f64>;
