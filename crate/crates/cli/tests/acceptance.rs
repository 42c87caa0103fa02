//! End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit if
//! any criterion fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use ssbjt_cli::{cmd_compare, cmd_fringe, RunContext};
use ssbjt_core::coverage::Scheme;
use ssbjt_core::oracle::{oracle_greedy_first_pick, OracleCase, SmallInstance};
use ssbjt_core::snr::best_beam;
use ssbjt_core::{
    delta_field, dft_codebook, enhanced_plan, greedy_select, los_channel, make_phase_book,
    parse_scenario, snr_field, snr_joint_closed, snr_joint_combined, threshold_sweep,
    BeamGainTable, Point, Scenario, Sim,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn corner_sim() -> Sim {
    let text = fs::read_to_string(configs_dir().join("four_corners.toml")).unwrap();
    let s: Scenario = parse_scenario(&text).unwrap();
    Sim::new(s).unwrap()
}

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn cross_term_cancellation() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for seed in 0..1000u64 {
        let b = 1 + (seed % 4) as usize;
        let n = [1, 2, 4, 8][(seed / 4 % 4) as usize];
        let case = OracleCase::random(10_000 + seed, b, n);
        let hs = case.channel_vectors();
        let cb = dft_codebook::<f64>(n).unwrap();
        let book = make_phase_book::<f64>(b).unwrap();
        let comb = snr_joint_combined(
            &hs,
            &case.powers_mw,
            &cb,
            &case.beam_indices,
            &book,
            case.noise_mw,
        )
        .unwrap();
        let closed = snr_joint_closed(
            &hs,
            &case.powers_mw,
            &cb,
            &case.beam_indices,
            b,
            case.noise_mw,
        )
        .unwrap();
        worst = worst.max(rel_err(comb, closed));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-9 && secs < 5.0,
        format!("1000 instances, max rel err {worst:.2e}, {secs:.2} s"),
    )
}

fn phase_book_orthogonality() -> Outcome {
    let mut worst: f64 = 0.0;
    for b in 1..=8 {
        let g = make_phase_book::<f64>(b).unwrap().gram();
        for (r, row) in g.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                let want = if r == c { b as f64 } else { 0.0 };
                worst = worst.max((v.re - want).abs()).max(v.im.abs());
            }
        }
    }
    outcome(
        worst <= 1e-12,
        format!("orders 1..8, max deviation {worst:.2e}"),
    )
}

struct Pipeline {
    sim: Sim,
    delta: Vec<f64>,
    secs: f64,
}

fn pipeline() -> Pipeline {
    let start = Instant::now();
    let sim = corner_sim();
    let plan = greedy_select(&sim.gains, sim.noise_mw, 10.0, sim.n_ind())
        .unwrap()
        .plan;
    let joint = snr_field(&sim, &plan, None, Scheme::JointFixed).unwrap();
    let ind = snr_field(&sim, &plan, None, Scheme::Independent).unwrap();
    let delta = delta_field(&joint, &ind).unwrap();
    Pipeline {
        sim,
        delta,
        secs: start.elapsed().as_secs_f64(),
    }
}

fn delta_nonnegative(p: &Pipeline) -> Outcome {
    let min = p.delta.iter().copied().fold(f64::INFINITY, f64::min);
    outcome(
        p.delta.len() == 10_000 && min >= -1e-9,
        format!("{} cells, min {min:.3e} dB", p.delta.len()),
    )
}

fn peak_gain(p: &Pipeline) -> Outcome {
    let (g, max) = p
        .delta
        .iter()
        .copied()
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |a, (i, v)| if v > a.1 { (i, v) } else { a },
        );
    let at = p.sim.grid.cells[g];
    let central = (25.0..=75.0).contains(&at.x) && (25.0..=75.0).contains(&at.y);
    outcome(
        (max - 6.0206).abs() <= 0.5 && central && p.secs < 60.0,
        format!(
            "max {max:.3} dB at ({}, {}), pipeline {:.2} s",
            at.x, at.y, p.secs
        ),
    )
}

fn coverage_curves(sim: &Sim) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let plan = greedy_select(&sim.gains, sim.noise_mw, 10.0, sim.n_ind())
        .unwrap()
        .plan;
    let joint = snr_field(sim, &plan, None, Scheme::JointFixed).unwrap();
    let ind = snr_field(sim, &plan, None, Scheme::Independent).unwrap();
    let t: Vec<f64> = (0..=40).map(|i| i as f64 * 0.5).collect();
    let r = threshold_sweep(&[&ind, &joint], &t).unwrap();
    (
        t,
        r.curve(Scheme::Independent).unwrap().to_vec(),
        r.curve(Scheme::JointFixed).unwrap().to_vec(),
    )
}

fn coverage_knee_and_reference(sim: &Sim) -> Outcome {
    let (t, ci, cj) = coverage_curves(sim);
    let at = |v: f64| t.iter().position(|&x| x == v).unwrap();
    let full = t
        .iter()
        .enumerate()
        .filter(|(_, &x)| x <= 4.0)
        .all(|(i, _)| ci[i] == 1.0 && cj[i] == 1.0);
    let i10 = at(10.0);
    let ok = full && (ci[i10] - 0.66).abs() <= 0.08 && (cj[i10] - 0.94).abs() <= 0.05;
    outcome(
        ok,
        format!(
            "<=4 dB full coverage: {full}; at 10 dB independent {:.4}, joint {:.4}",
            ci[i10], cj[i10]
        ),
    )
}

fn coverage_high_thresholds(sim: &Sim) -> Outcome {
    let (t, ci, cj) = coverage_curves(sim);
    let mut worst = 0.0f64;
    let mut ok = true;
    for (i, &x) in t.iter().enumerate() {
        if x >= 18.0 {
            for v in [ci[i], cj[i]] {
                ok &= (v - 0.16).abs() <= 0.06;
                worst = worst.max((v - 0.16).abs());
            }
        }
    }
    let i18 = t.iter().position(|&x| x == 18.0).unwrap();
    let i20 = t.len() - 1;
    outcome(
        ok,
        format!(
            ">=18 dB: independent {:.4}..{:.4}, joint {:.4}..{:.4}, worst |err| {worst:.4} vs 0.06",
            ci[i18], ci[i20], cj[i18], cj[i20]
        ),
    )
}

fn fringe(tmp: &Path) -> Outcome {
    let cfg = configs_dir().join("two_bs_fringe.toml");
    let ctx = RunContext {
        threads: None,
        timestamp: 0,
    };
    cmd_fringe(&cfg, tmp, &ctx).unwrap();
    let text = fs::read_to_string(tmp.join("fringe.csv")).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    let len = rows.last().unwrap()[0];
    // interference ripple away from the near-field ends
    let middle: Vec<&Vec<f64>> = rows
        .iter()
        .filter(|r| r[0] >= 0.25 * len && r[0] <= 0.75 * len)
        .collect();
    let ripple = |col: usize| {
        let max = middle
            .iter()
            .map(|r| r[col])
            .fold(f64::NEG_INFINITY, f64::max);
        let min = middle.iter().map(|r| r[col]).fold(f64::INFINITY, f64::min);
        max - min
    };
    let (r0, r1) = (ripple(1), ripple(2));

    let s: Scenario = parse_scenario(&fs::read_to_string(&cfg).unwrap()).unwrap();
    let cb = dft_codebook::<f64>(s.num_antennas).unwrap();
    let book = make_phase_book::<f64>(2).unwrap();
    let a = s.bs_positions[0];
    let b = s.bs_positions[1];
    let d = a.distance(&b);
    let mid = Point::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
    let beams: Vec<usize> = (0..2)
        .map(|k| best_beam(&los_channel(&s, k, mid).unwrap(), &cb).0)
        .collect();
    let mut worst: f64 = 0.0;
    for r in &rows {
        let u = r[0] / d;
        let p = Point::new(a.x + u * (b.x - a.x), a.y + u * (b.y - a.y));
        let hs = vec![
            los_channel(&s, 0, p).unwrap(),
            los_channel(&s, 1, p).unwrap(),
        ];
        let noise = s.effective_noise_mw();
        let comb = snr_joint_combined(&hs, &s.powers_mw(), &cb, &beams, &book, noise).unwrap();
        let closed = snr_joint_closed(&hs, &s.powers_mw(), &cb, &beams, 2, noise).unwrap();
        worst = worst.max(rel_err(comb, closed));
    }
    outcome(
        r0 >= 20.0 && r1 >= 20.0 && worst <= 1e-9,
        format!(
            "{} samples, ripple {r0:.1}/{r1:.1} dB, combined vs closed max rel err {worst:.2e}",
            rows.len()
        ),
    )
}

fn greedy_oracle() -> Outcome {
    let mut mismatches = 0;
    let mut increasing = 0;
    for seed in 0..50u64 {
        let cells = 16 + (seed % 21) as usize;
        let inst = SmallInstance::random(500 + seed, 2, 2, cells);
        let cb = dft_codebook::<f64>(2).unwrap();
        let table =
            BeamGainTable::from_cell_channels(&inst.channel_vectors(), &cb, &inst.powers_mw)
                .unwrap();
        let (want, count) = oracle_greedy_first_pick(&inst);
        let out = greedy_select(&table, inst.noise_mw, inst.gamma_ref_db, 4).unwrap();
        if out.plan.tuples[0] != want || out.marginal_gains[0] != count {
            mismatches += 1;
        }
        if out.marginal_gains.windows(2).any(|w| w[1] > w[0]) {
            increasing += 1;
        }
    }
    outcome(
        mismatches == 0 && increasing == 0,
        format!(
            "50 instances, {mismatches} first-pick mismatches, {increasing} with increasing gains"
        ),
    )
}

fn enhanced(sim: &Sim) -> Outcome {
    let plan = greedy_select(&sim.gains, sim.noise_mw, 10.0, sim.n_ind())
        .unwrap()
        .plan;
    let e = enhanced_plan(&sim.gains, &plan, 0.1).unwrap();
    let jf = snr_field(sim, &plan, None, Scheme::JointFixed).unwrap();
    let inf = snr_field(sim, &plan, None, Scheme::Independent).unwrap();
    let je = snr_field(sim, &plan, Some(&e), Scheme::JointEnhanced).unwrap();
    let ie = snr_field(sim, &plan, Some(&e), Scheme::Independent).unwrap();
    let df = delta_field(&jf, &inf).unwrap();
    let de = delta_field(&je, &ie).unwrap();
    let mut violations = 0;
    for g in 0..sim.grid.len() {
        let i = e.serving[g];
        let tuple = &plan.tuples[i];
        let k = sim.closest[g];
        let excluded: f64 = (0..sim.num_bs())
            .filter(|b| !e.plan.active_bs[i].contains(b))
            .map(|b| sim.gains.term(b, tuple[b], g))
            .sum();
        let bound = 10.0 * (1.0 + excluded / sim.gains.term(k, tuple[k], g)).log10();
        if (de[g] - df[g]).abs() > bound + 1e-9 {
            violations += 1;
        }
    }
    let total = e.plan.total_transmissions();
    outcome(
        total < 16 && violations == 0,
        format!("alpha 0.1: {total} transmissions (fixed 16), {violations} bound violations"),
    )
}

fn determinism(tmp: &Path) -> Outcome {
    let cfg = configs_dir().join("four_corners.toml");
    let run = |dir: &Path, threads| {
        let ctx = RunContext {
            threads: Some(threads),
            timestamp: 1_700_000_000,
        };
        cmd_compare(&cfg, dir, Some(0.1), 10.0, &ctx).unwrap()
    };
    let a = run(&tmp.join("a"), 1);
    let b = run(&tmp.join("b"), 1);
    let c = run(&tmp.join("c"), 4);
    let mut differing = Vec::new();
    for ((pa, pb), pc) in a.iter().zip(&b).zip(&c) {
        let ba = fs::read(pa).unwrap();
        if ba != fs::read(pb).unwrap() || ba != fs::read(pc).unwrap() {
            differing.push(pa.file_name().unwrap().to_string_lossy().into_owned());
        }
    }
    outcome(
        differing.is_empty() && a.len() == b.len() && a.len() == c.len(),
        format!(
            "{} files compared over 3 runs (threads 1, 1, 4); differing: {differing:?}",
            a.len()
        ),
    )
}

fn main() {
    let tmp = tempfile::tempdir().unwrap();
    let p = pipeline();
    let results = vec![
        ("1 cross-term cancellation", cross_term_cancellation()),
        ("2 phase-book orthogonality", phase_book_orthogonality()),
        ("3 relative gain nonnegative", delta_nonnegative(&p)),
        ("4 peak relative gain", peak_gain(&p)),
        (
            "5a coverage knee and 10 dB point",
            coverage_knee_and_reference(&p.sim),
        ),
        ("5b coverage at >= 18 dB", coverage_high_thresholds(&p.sim)),
        ("6 fringe elimination", fringe(tmp.path())),
        ("7 greedy oracle equivalence", greedy_oracle()),
        ("8 enhanced scheme", enhanced(&p.sim)),
        ("9 determinism", determinism(tmp.path())),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!(
            "{} criterion {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass {
            failed += 1;
        }
    }
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
