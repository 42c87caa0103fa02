//! Per-cell SNR maps, coverage probability and relative-gain maps.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::num::{from_usize, to_db, Real};
use crate::selection::{EnhancedPlan, JointBeamPlan};
use crate::simulation::Simulation;
use crate::snr::ResourceBudget;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Independent,
    JointFixed,
    JointEnhanced,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Independent => "independent",
            Scheme::JointFixed => "joint_fixed",
            Scheme::JointEnhanced => "joint_enhanced",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// SNR in dB for every grid cell, in grid order. Cells with no signal hold `-inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrField<T> {
    pub scheme: Scheme,
    pub values_db: Vec<T>,
    pub budget: ResourceBudget,
}

impl<T: Real> SnrField<T> {
    pub fn len(&self) -> usize {
        self.values_db.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values_db.is_empty()
    }

    pub fn min_db(&self) -> T {
        self.values_db.iter().fold(T::infinity(), |m, &v| m.min(v))
    }

    pub fn max_db(&self) -> T {
        self.values_db
            .iter()
            .fold(T::neg_infinity(), |m, &v| m.max(v))
    }
}

/// Best combined SNR over the plan's tuples at every cell.
fn joint_fixed_values<T: Real>(sim: &Simulation<T>, plan: &JointBeamPlan) -> Vec<T> {
    (0..sim.grid.len())
        .into_par_iter()
        .map(|g| {
            let best = (0..plan.n_joint())
                .map(|i| plan.combined_snr(&sim.gains, i, g, sim.noise_mw))
                .fold(T::zero(), T::max);
            to_db(best)
        })
        .collect()
}

/// Combined SNR of the serving tuple at every cell, with its reduced book.
fn joint_enhanced_values<T: Real>(sim: &Simulation<T>, enhanced: &EnhancedPlan<T>) -> Vec<T> {
    (0..sim.grid.len())
        .into_par_iter()
        .map(|g| {
            to_db(
                enhanced
                    .plan
                    .combined_snr(&sim.gains, enhanced.serving[g], g, sim.noise_mw),
            )
        })
        .collect()
}

/// Closest-BS, best-beam SNR with `reps(g)` repetitions.
fn independent_values<T: Real>(sim: &Simulation<T>, reps: impl Fn(usize) -> T + Sync) -> Vec<T> {
    (0..sim.grid.len())
        .into_par_iter()
        .map(|g| {
            let k = sim.closest[g];
            let (_, term) = sim.gains.best_beam(k, g);
            to_db(reps(g) * term / sim.noise_mw)
        })
        .collect()
}

/// SNR field of `scheme`.
///
/// Joint schemes take the plan's best tuple per cell (the enhanced scheme uses the
/// tuple serving the cell). The independent scheme is matched to the enhanced plan
/// when one is given, and to `B·N_joint/N_ind` repetitions otherwise.
pub fn snr_field<T: Real>(
    sim: &Simulation<T>,
    plan: &JointBeamPlan,
    enhanced: Option<&EnhancedPlan<T>>,
    scheme: Scheme,
) -> Result<SnrField<T>> {
    if plan.n_joint() == 0 {
        return Err(Error::EmptyInput("joint beam plan"));
    }
    let budget = ResourceBudget::new(sim.num_bs(), sim.n_ind(), plan.n_joint())?;
    let values_db = match scheme {
        Scheme::JointFixed => joint_fixed_values(sim, plan),
        Scheme::JointEnhanced => {
            let e = enhanced
                .ok_or_else(|| Error::invalid("scheme", "joint_enhanced needs an enhanced plan"))?;
            joint_enhanced_values(sim, e)
        }
        Scheme::Independent => match enhanced {
            None => {
                let r = budget.repetitions_ind::<T>();
                independent_values(sim, |_| r)
            }
            Some(e) => {
                // same slot count as the serving tuple, scaled by N_joint/N_ind
                let scale = from_usize::<T>(budget.n_joint) / from_usize(budget.n_ind);
                independent_values(sim, |g| {
                    from_usize::<T>(e.plan.reps_per_tuple[e.serving[g]]) * scale
                })
            }
        },
    };
    Ok(SnrField {
        scheme,
        values_db,
        budget,
    })
}

/// Fraction of cells with `γ(g) ≥ γ_ref`.
pub fn coverage_probability<T: Real>(field: &SnrField<T>, gamma_ref_db: T) -> T {
    if field.is_empty() {
        return T::zero();
    }
    let hit = field
        .values_db
        .iter()
        .filter(|&&v| v >= gamma_ref_db)
        .count();
    from_usize::<T>(hit) / from_usize(field.len())
}

/// Per-cell `γ_joint − γ_ind`, dB.
pub fn delta_field<T: Real>(joint: &SnrField<T>, independent: &SnrField<T>) -> Result<Vec<T>> {
    if joint.len() != independent.len() {
        return Err(Error::GridMismatch);
    }
    if joint.budget != independent.budget {
        return Err(Error::invalid(
            "budget",
            "fields use different resource budgets",
        ));
    }
    Ok(joint
        .values_db
        .iter()
        .zip(&independent.values_db)
        .map(|(&j, &i)| j - i)
        .collect())
}

/// Coverage fraction against a list of thresholds, one curve per field.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport<T> {
    /// Ascending.
    pub thresholds_db: Vec<T>,
    pub curves: Vec<(Scheme, Vec<T>)>,
}

impl<T: Real> CoverageReport<T> {
    pub fn curve(&self, scheme: Scheme) -> Option<&[T]> {
        self.curves
            .iter()
            .find(|(s, _)| *s == scheme)
            .map(|(_, c)| c.as_slice())
    }
}

/// Coverage curves of every field; thresholds are reported in ascending order.
pub fn threshold_sweep<T: Real>(
    fields: &[&SnrField<T>],
    thresholds_db: &[T],
) -> Result<CoverageReport<T>> {
    if fields.is_empty() {
        return Err(Error::EmptyInput("fields"));
    }
    if thresholds_db.is_empty() {
        return Err(Error::EmptyInput("thresholds"));
    }
    if thresholds_db.iter().any(|t| t.is_nan()) {
        return Err(Error::invalid("thresholds", "NaN threshold"));
    }
    let mut thresholds = thresholds_db.to_vec();
    thresholds.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));

    let curves = fields
        .iter()
        .map(|f| {
            let mut sorted = f.values_db.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
            let n = sorted.len();
            let curve = thresholds
                .iter()
                .map(|&t| {
                    // cells below t form a prefix of the sorted values
                    let below = sorted.partition_point(|&v| v < t);
                    if n == 0 {
                        T::zero()
                    } else {
                        from_usize::<T>(n - below) / from_usize(n)
                    }
                })
                .collect();
            (f.scheme, curve)
        })
        .collect();
    Ok(CoverageReport {
        thresholds_db: thresholds,
        curves,
    })
}

/// SNR offset (dB) that puts the lowest independent-transmission SNR at `knee_db`,
/// so both coverage curves stay at 100% up to that threshold.
///
/// The independent field does not depend on beam selection, so the offset is
/// fixed by geometry alone. Any offset already present in `sim` is accounted for.
pub fn calibrate_offset<T: Real>(sim: &Simulation<T>, knee_db: T) -> T {
    let budget = sim.matched_budget();
    let r = budget.repetitions_ind::<T>();
    let field_min = independent_values(sim, |_| r)
        .into_iter()
        .fold(T::infinity(), T::min);
    sim.scenario.snr_offset_db + knee_db - field_min
}
