//! Brute-force reference computations used to cross-check the SNR and beam
//! selection code.
//!
//! Everything here is written with `(re, im)` tuples and explicit loops and
//! deliberately shares nothing with [`crate::snr`] or [`crate::selection`]. It is
//! slow and only meant for tests and acceptance runs.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::ChannelVector;
use crate::scenario::Point;

/// Complex number as `(re, im)`.
pub type Cx = (f64, f64);

fn cmul(a: Cx, b: Cx) -> Cx {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn conj(a: Cx) -> Cx {
    (a.0, -a.1)
}

fn abs2(a: Cx) -> f64 {
    a.0 * a.0 + a.1 * a.1
}

fn expi(theta: f64) -> Cx {
    (theta.cos(), theta.sin())
}

/// Entry `k` of DFT beam `m` for an `n`-element array.
pub fn dft_entry(n: usize, k: usize, m: usize) -> Cx {
    let s = 1.0 / (n as f64).sqrt();
    let (c, d) = expi(2.0 * std::f64::consts::PI * (k * m) as f64 / n as f64);
    (s * c, s * d)
}

/// DFT phase rows `θ_j^{(r)} = 2πrj/b`; orthogonal for every order.
pub fn dft_phase_rows(b: usize) -> Vec<Vec<f64>> {
    (0..b)
        .map(|r| {
            (0..b)
                .map(|j| 2.0 * std::f64::consts::PI * (r * j) as f64 / b as f64)
                .collect()
        })
        .collect()
}

/// `h^H f` by explicit summation.
pub fn inner(h: &[Cx], f: &[Cx]) -> Cx {
    let mut acc = (0.0, 0.0);
    for (hk, fk) in h.iter().zip(f) {
        let p = cmul(conj(*hk), *fk);
        acc.0 += p.0;
        acc.1 += p.1;
    }
    acc
}

/// Seeded random single-location instance.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCase {
    pub seed: u64,
    pub num_bs: usize,
    pub num_antennas: usize,
    /// `channels[b][k]`.
    pub channels: Vec<Vec<Cx>>,
    pub powers_mw: Vec<f64>,
    pub beam_indices: Vec<usize>,
    pub phase_rows: Vec<Vec<f64>>,
    pub noise_mw: f64,
}

impl OracleCase {
    pub fn random(seed: u64, num_bs: usize, num_antennas: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let channels = (0..num_bs)
            .map(|_| {
                // magnitudes spread over 60 dB so weak and strong BSs both occur
                let scale = 10f64.powf(rng.gen_range(-3.0..0.0));
                (0..num_antennas)
                    .map(|_| {
                        (
                            scale * rng.gen_range(-1.0..1.0),
                            scale * rng.gen_range(-1.0..1.0),
                        )
                    })
                    .collect()
            })
            .collect();
        let powers_mw = (0..num_bs)
            .map(|_| 10f64.powf(rng.gen_range(-1.0..1.0)))
            .collect();
        let beam_indices = (0..num_bs)
            .map(|_| rng.gen_range(0..num_antennas))
            .collect();
        Self {
            seed,
            num_bs,
            num_antennas,
            channels,
            powers_mw,
            beam_indices,
            phase_rows: dft_phase_rows(num_bs),
            noise_mw: 10f64.powf(rng.gen_range(-12.0..-9.0)),
        }
    }

    /// Same instance with every channel zeroed.
    pub fn zeroed(mut self) -> Self {
        for h in &mut self.channels {
            for c in h.iter_mut() {
                *c = (0.0, 0.0);
            }
        }
        self
    }

    fn beamformed(&self, b: usize) -> Cx {
        let f: Vec<Cx> = (0..self.num_antennas)
            .map(|k| dft_entry(self.num_antennas, k, self.beam_indices[b]))
            .collect();
        let p = inner(&self.channels[b], &f);
        let s = self.powers_mw[b].sqrt();
        (s * p.0, s * p.1)
    }
}

/// Single-transmission joint SNR for one phase row.
pub fn oracle_snr_single(case: &OracleCase, phases: &[f64]) -> f64 {
    let mut acc = (0.0, 0.0);
    for (b, &theta) in phases.iter().enumerate().take(case.num_bs) {
        let t = cmul(case.beamformed(b), expi(theta));
        acc.0 += t.0;
        acc.1 += t.1;
    }
    abs2(acc) / case.noise_mw
}

/// SNR after the UE sums the transmissions of every phase row.
pub fn oracle_snr_sum(case: &OracleCase) -> f64 {
    case.phase_rows
        .iter()
        .map(|row| oracle_snr_single(case, row))
        .sum()
}

fn to_channel(h: &[Cx], bs_index: usize) -> ChannelVector<f64> {
    ChannelVector {
        coeffs: h.iter().map(|&(re, im)| Complex::new(re, im)).collect(),
        bs_index,
        location: Point::new(0.0, 0.0),
    }
}

impl OracleCase {
    /// The same channels as library values, for feeding the code under test.
    pub fn channel_vectors(&self) -> Vec<ChannelVector<f64>> {
        self.channels
            .iter()
            .enumerate()
            .map(|(b, h)| to_channel(h, b))
            .collect()
    }
}

/// Multi-cell instance for checking the first greedy pick.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallInstance {
    pub num_bs: usize,
    pub num_antennas: usize,
    /// `channels[cell][b][k]`.
    pub channels: Vec<Vec<Vec<Cx>>>,
    pub powers_mw: Vec<f64>,
    pub noise_mw: f64,
    pub gamma_ref_db: f64,
}

impl SmallInstance {
    /// Seeded instance with `num_cells` random cells. The threshold sits halfway
    /// between two neighbouring per-cell SNRs of tuple `(0, …, 0)`, so no cell lies
    /// on the boundary.
    pub fn random(seed: u64, num_bs: usize, num_antennas: usize, num_cells: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let channels: Vec<Vec<Vec<Cx>>> = (0..num_cells)
            .map(|_| {
                (0..num_bs)
                    .map(|_| {
                        let scale = 10f64.powf(rng.gen_range(-1.5..0.0));
                        (0..num_antennas)
                            .map(|_| {
                                (
                                    scale * rng.gen_range(-1.0..1.0),
                                    scale * rng.gen_range(-1.0..1.0),
                                )
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let powers_mw = (0..num_bs)
            .map(|_| 10f64.powf(rng.gen_range(-0.5..0.5)))
            .collect();
        let mut inst = Self {
            num_bs,
            num_antennas,
            channels,
            powers_mw,
            noise_mw: 1e-2,
            gamma_ref_db: 0.0,
        };
        let mut snrs: Vec<f64> = (0..num_cells)
            .map(|c| 10.0 * inst.cell_snr(c, &vec![0; num_bs]).log10())
            .collect();
        snrs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let k = rng.gen_range(1..num_cells.max(2));
        inst.gamma_ref_db = if num_cells < 2 {
            snrs[0] - 1.0
        } else {
            0.5 * (snrs[k - 1] + snrs[k])
        };
        inst
    }

    /// Library channels, `[cell][b]`.
    pub fn channel_vectors(&self) -> Vec<Vec<ChannelVector<f64>>> {
        self.channels
            .iter()
            .map(|cell| {
                cell.iter()
                    .enumerate()
                    .map(|(b, h)| to_channel(h, b))
                    .collect()
            })
            .collect()
    }

    fn cell_snr(&self, cell: usize, tuple: &[usize]) -> f64 {
        let rows = dft_phase_rows(self.num_bs);
        let mut snr = 0.0;
        for row in &rows {
            let mut acc = (0.0, 0.0);
            for b in 0..self.num_bs {
                let f: Vec<Cx> = (0..self.num_antennas)
                    .map(|k| dft_entry(self.num_antennas, k, tuple[b]))
                    .collect();
                let p = inner(&self.channels[cell][b], &f);
                let t = cmul(p, expi(row[b]));
                let s = self.powers_mw[b].sqrt();
                acc.0 += s * t.0;
                acc.1 += s * t.1;
            }
            snr += abs2(acc) / self.noise_mw;
        }
        snr
    }
}

fn for_each_tuple(
    num_bs: usize,
    n: usize,
    prefix: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if prefix.len() == num_bs {
        visit(prefix);
        return;
    }
    for m in 0..n {
        prefix.push(m);
        for_each_tuple(num_bs, n, prefix, visit);
        prefix.pop();
    }
}

/// Number of cells whose phase-combined SNR reaches the threshold under `tuple`.
pub fn oracle_tuple_coverage(inst: &SmallInstance, tuple: &[usize]) -> usize {
    (0..inst.channels.len())
        .filter(|&c| 10.0 * inst.cell_snr(c, tuple).log10() >= inst.gamma_ref_db)
        .count()
}

/// Exhaustive argmax of single-tuple coverage; ties go to the lexicographically
/// smallest tuple. Returns the tuple and its coverage count.
pub fn oracle_greedy_first_pick(inst: &SmallInstance) -> (Vec<usize>, usize) {
    let mut best: Option<(Vec<usize>, usize)> = None;
    for_each_tuple(inst.num_bs, inst.num_antennas, &mut Vec::new(), &mut |t| {
        let c = oracle_tuple_coverage(inst, t);
        if best.as_ref().is_none_or(|(_, bc)| c > *bc) {
            best = Some((t.to_vec(), c));
        }
    });
    best.expect("at least one tuple")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_channel_gives_zero() {
        let case = OracleCase::random(3, 4, 4).zeroed();
        assert_eq!(oracle_snr_sum(&case), 0.0);
    }

    #[test]
    fn equal_terms_constructive() {
        let mut case = OracleCase::random(1, 2, 1);
        case.channels = vec![vec![(0.5, 0.0)], vec![(0.5, 0.0)]];
        case.powers_mw = vec![1.0, 1.0];
        case.noise_mw = 1.0;
        case.beam_indices = vec![0, 0];
        assert!((oracle_snr_single(&case, &[0.0, 0.0]) - 1.0).abs() < 1e-15);
        assert!(oracle_snr_single(&case, &[0.0, std::f64::consts::PI]) < 1e-30);
    }

    #[test]
    fn seed_determines_case() {
        assert_eq!(OracleCase::random(9, 3, 4), OracleCase::random(9, 3, 4));
        assert_ne!(OracleCase::random(9, 3, 4), OracleCase::random(10, 3, 4));
    }

    fn flat_instance(gamma_ref_db: f64) -> SmallInstance {
        // every cell sees the same single-element channel from both BSs
        SmallInstance {
            num_bs: 2,
            num_antennas: 2,
            channels: vec![vec![vec![(1.0, 0.0), (1.0, 0.0)]; 2]; 4],
            powers_mw: vec![1.0, 1.0],
            noise_mw: 1.0,
            gamma_ref_db,
        }
    }

    #[test]
    fn first_pick_tie_rules() {
        // beam 0 collects |1+1|²/2 = 2 per BS; combined 2·(2+2) = 8 ≈ 9.03 dB
        let (t, c) = oracle_greedy_first_pick(&flat_instance(9.0));
        assert_eq!((t, c), (vec![0, 0], 4));
        // nothing reaches 40 dB, so the smallest tuple wins the tie
        let (t, c) = oracle_greedy_first_pick(&flat_instance(40.0));
        assert_eq!((t, c), (vec![0, 0], 0));
    }
}
