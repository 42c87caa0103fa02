use proptest::prelude::*;

use ssbjt_core::oracle::OracleCase;
use ssbjt_core::{
    delta_snr, dft_codebook, joint_terms, make_phase_book, snr_independent, snr_joint,
    snr_joint_closed, snr_joint_combined, JointConfig, ResourceBudget,
};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn shape() -> impl Strategy<Value = (u64, usize, usize)> {
    (
        any::<u64>(),
        1usize..=6,
        prop_oneof![Just(1usize), Just(2), Just(4), Just(8)],
    )
}

proptest! {
    #[test]
    fn cross_terms_cancel((seed, b, n) in shape()) {
        let case = OracleCase::random(seed, b, n);
        let hs = case.channel_vectors();
        let cb = dft_codebook::<f64>(n).unwrap();
        let book = make_phase_book::<f64>(b).unwrap();
        let comb = snr_joint_combined(&hs, &case.powers_mw, &cb, &case.beam_indices, &book, case.noise_mw).unwrap();
        let closed = snr_joint_closed(&hs, &case.powers_mw, &cb, &case.beam_indices, b, case.noise_mw).unwrap();
        prop_assert!(close(comb, closed, 1e-9), "{comb} vs {closed}");
    }

    #[test]
    fn global_phase_does_not_matter((seed, b, n) in shape(), shift in -10.0f64..10.0) {
        let case = OracleCase::random(seed, b, n);
        let hs = case.channel_vectors();
        let cb = dft_codebook::<f64>(n).unwrap();
        let book = make_phase_book::<f64>(b).unwrap();
        for row in &book.rows {
            let shifted: Vec<f64> = row.iter().map(|t| t + shift).collect();
            let a = snr_joint(&hs, &case.powers_mw, &cb, &JointConfig { beam_indices: case.beam_indices.clone(), phase_row: row.clone() }, case.noise_mw).unwrap();
            let s = snr_joint(&hs, &case.powers_mw, &cb, &JointConfig { beam_indices: case.beam_indices.clone(), phase_row: shifted }, case.noise_mw).unwrap();
            prop_assert!(close(a, s, 1e-9));
        }
    }

    #[test]
    fn snr_scales_with_power((seed, b, n) in shape(), scale in 0.01f64..100.0) {
        let case = OracleCase::random(seed, b, n);
        let hs = case.channel_vectors();
        let cb = dft_codebook::<f64>(n).unwrap();
        let book = make_phase_book::<f64>(b).unwrap();
        let p2: Vec<f64> = case.powers_mw.iter().map(|p| p * scale).collect();
        let a = snr_joint_combined(&hs, &case.powers_mw, &cb, &case.beam_indices, &book, case.noise_mw).unwrap();
        let s = snr_joint_combined(&hs, &p2, &cb, &case.beam_indices, &book, case.noise_mw).unwrap();
        prop_assert!(close(s, scale * a, 1e-9));
    }

    #[test]
    fn independent_snr_linear_in_repetitions((seed, n) in (any::<u64>(), 1usize..=8), reps in 1u32..32) {
        let case = OracleCase::random(seed, 1, n);
        let h = &case.channel_vectors()[0];
        let cb = dft_codebook::<f64>(n).unwrap();
        let beam = cb.beam(case.beam_indices[0]);
        let one = snr_independent(h, case.powers_mw[0], beam, 1.0, case.noise_mw).unwrap();
        let many = snr_independent(h, case.powers_mw[0], beam, reps as f64, case.noise_mw).unwrap();
        prop_assert!(close(many, reps as f64 * one, 1e-12));
    }

    #[test]
    fn relative_gain_nonnegative_at_matched_budget((seed, b, n) in shape(), k in 0usize..6) {
        let case = OracleCase::random(seed, b, n);
        let cb = dft_codebook::<f64>(n).unwrap();
        let terms = joint_terms(&case.channel_vectors(), &case.powers_mw, &cb, &case.beam_indices).unwrap();
        let closest = k % b;
        prop_assume!(terms[closest] > 0.0);
        let budget = ResourceBudget::new(b, n, n).unwrap();
        let d = delta_snr(&terms, closest, &budget).unwrap();
        prop_assert!(d >= -1e-12);
        if b == 1 {
            prop_assert!(d.abs() < 1e-12);
        }
    }
}
