use ssbjt_core::oracle::{oracle_greedy_first_pick, SmallInstance};
use ssbjt_core::{
    build_scenario, dft_codebook, enhanced_plan, greedy_select, BeamGainTable, Scenario,
    ScenarioConfig, Sim,
};

fn table(inst: &SmallInstance) -> BeamGainTable<f64> {
    let cb = dft_codebook::<f64>(inst.num_antennas).unwrap();
    BeamGainTable::from_cell_channels(&inst.channel_vectors(), &cb, &inst.powers_mw).unwrap()
}

#[test]
fn first_pick_matches_brute_force() {
    for seed in 0..20 {
        let inst = SmallInstance::random(seed, 2, 2, 25);
        let (want, count) = oracle_greedy_first_pick(&inst);
        let out = greedy_select(&table(&inst), inst.noise_mw, inst.gamma_ref_db, 1).unwrap();
        assert_eq!(out.plan.tuples[0], want, "seed {seed}");
        assert_eq!(out.marginal_gains[0], count, "seed {seed}");
    }
}

#[test]
fn marginal_gains_never_increase() {
    for seed in 0..20 {
        let inst = SmallInstance::random(100 + seed, 3, 2, 30);
        let out = greedy_select(&table(&inst), inst.noise_mw, inst.gamma_ref_db, 8).unwrap();
        assert_eq!(out.plan.n_joint(), 8);
        assert!(
            out.marginal_gains.windows(2).all(|w| w[1] <= w[0]),
            "{:?}",
            out.marginal_gains
        );
        assert!(out.covered_cells() <= 30);
    }
}

#[test]
fn too_many_picks_rejected() {
    let inst = SmallInstance::random(5, 2, 2, 9);
    assert!(greedy_select(&table(&inst), inst.noise_mw, inst.gamma_ref_db, 5).is_err());
    assert!(greedy_select(&table(&inst), inst.noise_mw, inst.gamma_ref_db, 0).is_err());
    assert!(greedy_select(&table(&inst), inst.noise_mw, f64::NAN, 1).is_err());
}

#[test]
fn single_bs_returns_every_beam() {
    let mut cfg = ScenarioConfig::four_corners();
    cfg.bs_positions = Some(vec![[0.0, 0.0]]);
    cfg.bs_powers_dbm = None;
    cfg.grid_step_m = Some(2.5);
    let sim = Sim::new(build_scenario::<f64>(&cfg).unwrap()).unwrap();
    let out = greedy_select(&sim.gains, sim.noise_mw, 20.0, 4).unwrap();
    let mut beams: Vec<usize> = out.plan.tuples.iter().map(|t| t[0]).collect();
    beams.sort();
    assert_eq!(beams, vec![0, 1, 2, 3]);

    let e = enhanced_plan(&sim.gains, &out.plan, 0.1).unwrap();
    assert!(e.plan.reps_per_tuple.iter().all(|&r| r == 1));
}

fn corner_sim(step: f64) -> Sim {
    let mut cfg = ScenarioConfig::four_corners();
    cfg.grid_step_m = Some(step);
    cfg.snr_offset_db = Some(-53.33);
    let s: Scenario = build_scenario(&cfg).unwrap();
    Sim::new(s).unwrap()
}

#[test]
fn tiny_alpha_keeps_every_bs() {
    let sim = corner_sim(2.5);
    let out = greedy_select(&sim.gains, sim.noise_mw, 10.0, 4).unwrap();
    let e = enhanced_plan(&sim.gains, &out.plan, 1e-12).unwrap();
    assert_eq!(e.plan, out.plan);
    assert!(e.empty_regions.is_empty());
}

#[test]
fn larger_alpha_never_adds_transmissions() {
    let sim = corner_sim(2.5);
    let out = greedy_select(&sim.gains, sim.noise_mw, 10.0, 4).unwrap();
    let mut last = usize::MAX;
    for alpha in [0.01, 0.05, 0.1, 0.3, 1.0] {
        let t = enhanced_plan(&sim.gains, &out.plan, alpha)
            .unwrap()
            .plan
            .total_transmissions();
        assert!(t <= last, "alpha {alpha}: {t} > {last}");
        assert!(t >= out.plan.n_joint());
        last = t;
    }
}

#[test]
fn selection_is_independent_of_thread_count() {
    let sim = corner_sim(2.0);
    let run = |n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap()
            .install(|| greedy_select(&sim.gains, sim.noise_mw, 10.0, 4).unwrap())
    };
    assert_eq!(run(1), run(4));
}
