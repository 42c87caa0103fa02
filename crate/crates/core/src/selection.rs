//! Joint beam selection.
//!
//! [`greedy_select`] picks beam tuples one at a time, each maximizing the number
//! of still-uncovered cells it brings above the reference SNR. [`enhanced_plan`]
//! then trims each tuple's phase repetitions down to the BSs that actually matter
//! in the region the tuple serves.
//!
//! Complexity of the greedy pass is `O(n_select · N^B · |G|)` on top of a
//! `O(N^B · |G| · B)` precomputation.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::num::{to_db, Real};
use crate::phasebook::{make_phase_book, PhaseBook};
use crate::snr::{closed_from_terms, BeamGainTable};

/// Selected beam tuples with their repetition counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointBeamPlan {
    /// One beam index per BS for each selected tuple.
    pub tuples: Vec<Vec<usize>>,
    /// Phase-book order used for each tuple.
    pub reps_per_tuple: Vec<usize>,
    /// BSs transmitting each tuple, ascending.
    pub active_bs: Vec<Vec<usize>>,
}

impl JointBeamPlan {
    /// Plan where every tuple is sent by all BSs with a full phase book.
    pub fn fixed(tuples: Vec<Vec<usize>>, num_bs: usize) -> Self {
        let n = tuples.len();
        Self {
            tuples,
            reps_per_tuple: vec![num_bs; n],
            active_bs: vec![(0..num_bs).collect(); n],
        }
    }

    pub fn n_joint(&self) -> usize {
        self.tuples.len()
    }

    pub fn total_transmissions(&self) -> usize {
        self.reps_per_tuple.iter().sum()
    }

    /// Phase rows of tuple `i` over all BSs; inactive BSs are `None`.
    pub fn phase_rows<T: Real>(&self, i: usize) -> Result<Vec<Vec<Option<T>>>> {
        let active = &self.active_bs[i];
        let book: PhaseBook<T> = make_phase_book(active.len())?;
        let width = self.tuples[i].len();
        Ok(book
            .rows
            .iter()
            .map(|row| {
                let mut full = vec![None; width];
                for (&b, &theta) in active.iter().zip(row) {
                    full[b] = Some(theta);
                }
                full
            })
            .collect())
    }

    /// Linear SNR of tuple `i` at cell `g` after combining its repetitions.
    pub fn combined_snr<T: Real>(
        &self,
        table: &BeamGainTable<T>,
        i: usize,
        g: usize,
        noise_mw: T,
    ) -> T {
        let tuple = &self.tuples[i];
        let power = self.active_bs[i]
            .iter()
            .fold(T::zero(), |acc, &b| acc + table.term(b, tuple[b], g));
        closed_from_terms(power, self.reps_per_tuple[i], noise_mw)
    }
}

/// Result of [`greedy_select`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyOutcome {
    pub plan: JointBeamPlan,
    /// Newly covered cells contributed by each pick, in selection order.
    pub marginal_gains: Vec<usize>,
}

impl GreedyOutcome {
    pub fn covered_cells(&self) -> usize {
        self.marginal_gains.iter().sum()
    }
}

/// Beam tuple with lexicographic rank `index` (BS 0 most significant).
pub fn tuple_from_index(mut index: usize, num_bs: usize, num_beams: usize) -> Vec<usize> {
    let mut t = vec![0; num_bs];
    for slot in t.iter_mut().rev() {
        *slot = index % num_beams;
        index /= num_beams;
    }
    t
}

pub fn tuple_count(num_bs: usize, num_beams: usize) -> Option<usize> {
    num_beams.checked_pow(u32::try_from(num_bs).ok()?)
}

/// Coverage masks of every tuple, under the full-cooperation phase-combined SNR.
fn coverage_masks<T: Real>(
    table: &BeamGainTable<T>,
    noise_mw: T,
    gamma_ref_db: T,
    total: usize,
) -> Vec<Vec<bool>> {
    let (b, n, g) = (table.num_bs(), table.num_beams(), table.num_cells());
    (0..total)
        .into_par_iter()
        .map(|idx| {
            let tuple = tuple_from_index(idx, b, n);
            let rows: Vec<&[T]> = tuple
                .iter()
                .enumerate()
                .map(|(bs, &m)| table.beam_row(bs, m))
                .collect();
            (0..g)
                .map(|cell| {
                    let power = rows.iter().fold(T::zero(), |acc, r| acc + r[cell]);
                    to_db(closed_from_terms(power, b, noise_mw)) >= gamma_ref_db
                })
                .collect()
        })
        .collect()
}

/// Greedy maximum-coverage selection of `n_select` beam tuples.
///
/// Every tuple in `F_1 × … × F_B` not yet chosen is scored by the number of
/// uncovered cells whose combined SNR reaches `gamma_ref_db`; the best one is
/// taken (ties to the lexicographically smallest) and its cells are marked
/// covered. The loop always runs `n_select` times, even once gains reach zero.
pub fn greedy_select<T: Real>(
    table: &BeamGainTable<T>,
    noise_mw: T,
    gamma_ref_db: T,
    n_select: usize,
) -> Result<GreedyOutcome> {
    if !gamma_ref_db.is_finite() {
        return Err(Error::invalid("gamma_ref_db", "must be finite"));
    }
    let (b, n, g) = (table.num_bs(), table.num_beams(), table.num_cells());
    let total = tuple_count(b, n)
        .ok_or_else(|| Error::invalid("n_select", "tuple space does not fit in memory"))?;
    if n_select == 0 || n_select > total {
        return Err(Error::invalid(
            "n_select",
            format!("must lie in 1..={total}, got {n_select}"),
        ));
    }

    let masks = coverage_masks(table, noise_mw, gamma_ref_db, total);
    let mut uncovered = vec![true; g];
    let mut chosen = vec![false; total];
    let mut tuples = Vec::with_capacity(n_select);
    let mut gains = Vec::with_capacity(n_select);

    for _ in 0..n_select {
        let counts: Vec<Option<usize>> = masks
            .par_iter()
            .enumerate()
            .map(|(idx, mask)| {
                (!chosen[idx]).then(|| {
                    mask.iter()
                        .zip(&uncovered)
                        .filter(|(&c, &u)| c && u)
                        .count()
                })
            })
            .collect();
        // sequential scan keeps the lexicographic tie-break independent of thread count
        let mut best: Option<(usize, usize)> = None;
        for (idx, c) in counts.iter().enumerate() {
            if let Some(c) = *c {
                if best.is_none_or(|(_, bc)| c > bc) {
                    best = Some((idx, c));
                }
            }
        }
        let (idx, gain) = best.expect("n_select <= tuple count leaves a candidate");
        chosen[idx] = true;
        for (u, &c) in uncovered.iter_mut().zip(&masks[idx]) {
            if c {
                *u = false;
            }
        }
        tuples.push(tuple_from_index(idx, b, n));
        gains.push(gain);
    }

    Ok(GreedyOutcome {
        plan: JointBeamPlan::fixed(tuples, b),
        marginal_gains: gains,
    })
}

/// BSs whose term is within a factor `alpha` of the strongest one.
#[derive(Debug, Clone, PartialEq)]
pub struct DominantSet<T> {
    pub members: Vec<usize>,
    pub alpha: T,
}

fn check_alpha<T: Real>(alpha: T) -> Result<()> {
    if alpha > T::zero() && alpha <= T::one() {
        Ok(())
    } else {
        Err(Error::invalid(
            "alpha",
            format!("{alpha} is outside (0, 1]"),
        ))
    }
}

/// `{ b : term_b ≥ α·max_j term_j }`.
pub fn dominant_set<T: Real>(terms: &[T], alpha: T) -> Result<DominantSet<T>> {
    check_alpha(alpha)?;
    let max = terms.iter().fold(T::zero(), |m, &t| m.max(t));
    if max.is_nan() || max <= T::zero() {
        return Err(Error::AllZeroTerms);
    }
    let cut = alpha * max;
    Ok(DominantSet {
        members: terms
            .iter()
            .enumerate()
            .filter(|&(_, &t)| t >= cut)
            .map(|(b, _)| b)
            .collect(),
        alpha,
    })
}

/// Index of the plan tuple giving the highest combined SNR at each cell; ties go
/// to the earliest tuple.
pub fn serving_tuples<T: Real>(table: &BeamGainTable<T>, plan: &JointBeamPlan) -> Vec<usize> {
    (0..table.num_cells())
        .into_par_iter()
        .map(|g| {
            let mut best = (0, T::neg_infinity());
            for i in 0..plan.n_joint() {
                let s = plan.combined_snr(table, i, g, T::one());
                if s > best.1 {
                    best = (i, s);
                }
            }
            best.0
        })
        .collect()
}

/// Fixed plan reduced to the dominant BSs of each tuple's service region.
#[derive(Debug, Clone, PartialEq)]
pub struct EnhancedPlan<T> {
    pub plan: JointBeamPlan,
    pub alpha: T,
    /// Serving tuple of every cell (assigned under the base plan).
    pub serving: Vec<usize>,
    /// Tuples that serve no cell; each keeps a single transmission.
    pub empty_regions: Vec<usize>,
}

/// Trims `base` to the dominant BSs of each tuple's region.
///
/// A tuple's region is the set of cells it serves under `base`. The tuple keeps
/// the BSs that are dominant at some cell of the region and sends one repetition
/// per kept BS, using a phase book of that order over the kept BSs so cross terms
/// still cancel everywhere in the region.
pub fn enhanced_plan<T: Real>(
    table: &BeamGainTable<T>,
    base: &JointBeamPlan,
    alpha: T,
) -> Result<EnhancedPlan<T>> {
    check_alpha(alpha)?;
    let b = table.num_bs();
    let serving = serving_tuples(table, base);
    let mut regions: Vec<Vec<usize>> = vec![Vec::new(); base.n_joint()];
    for (g, &i) in serving.iter().enumerate() {
        regions[i].push(g);
    }

    let mut plan = base.clone();
    let mut empty_regions = Vec::new();
    for (i, cells) in regions.iter().enumerate() {
        let tuple = &base.tuples[i];
        let mut keep = vec![false; b];
        let mut any = false;
        for &g in cells {
            let terms: Vec<T> = base.active_bs[i]
                .iter()
                .map(|&bs| table.term(bs, tuple[bs], g))
                .collect();
            match dominant_set(&terms, alpha) {
                Ok(d) => {
                    for m in d.members {
                        keep[base.active_bs[i][m]] = true;
                        any = true;
                    }
                }
                Err(Error::AllZeroTerms) => {}
                Err(e) => return Err(e),
            }
        }
        if !any {
            empty_regions.push(i);
            // strongest BS of the tuple over the whole grid keeps the single slot
            let strongest = base.active_bs[i]
                .iter()
                .copied()
                .map(|bs| {
                    let s = table
                        .beam_row(bs, tuple[bs])
                        .iter()
                        .fold(T::zero(), |a, &t| a + t);
                    (bs, s)
                })
                .fold((base.active_bs[i][0], T::neg_infinity()), |acc, x| {
                    if x.1 > acc.1 {
                        x
                    } else {
                        acc
                    }
                })
                .0;
            plan.active_bs[i] = vec![strongest];
            plan.reps_per_tuple[i] = 1;
            continue;
        }
        let active: Vec<usize> = (0..b).filter(|&bs| keep[bs]).collect();
        plan.reps_per_tuple[i] = active.len();
        plan.active_bs[i] = active;
    }

    Ok(EnhancedPlan {
        plan,
        alpha,
        serving,
        empty_regions,
    })
}
