mod common;

use common::{identity_error, max_abs_diff, random_instance, rng, vec_diff, DirectPda};
use nalgebra::DVector;
use rand::Rng;
use stbc_pda::pda::{decode, PdaConfig, PdaState};
use stbc_pda::stbc::StbcParams;

fn cases() -> Vec<(StbcParams, usize, usize)> {
    vec![
        (StbcParams::ill(2), 4, 2),
        (StbcParams::ill(2), 16, 3),
        (StbcParams::fd_ill(2), 64, 2),
        (StbcParams::ill(3), 4, 3),
        (StbcParams::fd_ill(4), 4, 4),
        (StbcParams::ill(4), 4, 6),
    ]
}

#[test]
fn conditional_quantities_match_direct_evaluation() {
    let mut r = rng(101);
    let cfg = PdaConfig::default();
    for (params, order, nr) in cases() {
        let inst = random_instance(params, order, nr, r.random_range(0.0..15.0), &mut r);
        let m = &inst.model;
        let bits = m.h.ncols();
        let pplus: Vec<f64> = (0..bits).map(|_| r.random_range(0.02..0.98)).collect();
        let state = PdaState::with_probabilities(m, pplus.clone()).unwrap();
        let direct = DirectPda::from_probabilities(pplus, cfg.llr_clamp);

        assert!(vec_diff(state.u(), &direct.interference_mean(m)) < 1e-12);
        assert!(identity_error(state.dinv(), &direct.full_cov(m)) < 1e-9);
        for col in 0..bits {
            let (fp, fm) = state.bit_means(m, col);
            let (dp, dm) = direct.means(m, col);
            assert!(vec_diff(&fp, &dp) < 1e-12);
            assert!(vec_diff(&fm, &dm) < 1e-12);

            let fast = state.conditional_cov_inverse(m, col, &cfg).unwrap();
            let slow = direct.conditional_cov_inverse(m, col);
            let scale = slow.amax().max(1.0);
            assert!(max_abs_diff(&fast, &slow) / scale < 1e-9, "col {col}");

            let lf = state.bit_log_likelihood_ratio(m, col);
            let ld = direct.log_beta(m, col);
            assert!((lf - ld).abs() <= 1e-9 * ld.abs().max(1.0), "{lf} vs {ld}");
        }
    }
}

#[test]
fn bit_updates_track_direct_state() {
    let mut r = rng(202);
    let cfg = PdaConfig::default();
    for (params, order, nr) in cases() {
        let inst = random_instance(params, order, nr, 8.0, &mut r);
        let m = &inst.model;
        let mut fast = PdaState::initialize(m).unwrap();
        let mut direct = DirectPda::new(m.h.ncols(), cfg.llr_clamp);
        for _ in 0..2 {
            for col in 0..m.h.ncols() {
                let upd = fast.update_bit(m, col, &cfg).unwrap();
                let lb = direct.update_bit(m, col);
                assert!((upd.log_beta - lb).abs() <= 1e-8 * lb.abs().max(1.0));
                assert!((upd.pplus_new - direct.pplus[col]).abs() < 1e-9);
                assert!(vec_diff(fast.u(), &direct.interference_mean(m)) < 1e-10);
                assert!(identity_error(fast.dinv(), &direct.full_cov(m)) < 1e-8);
            }
        }
    }
}

#[test]
fn probabilities_stay_complementary_and_bounded() {
    let mut r = rng(303);
    let cfg = PdaConfig::default();
    for (params, order, nr) in cases() {
        let inst = random_instance(params, order, nr, 20.0, &mut r);
        let mut s = PdaState::initialize(&inst.model).unwrap();
        for _ in 0..cfg.num_iter {
            s.sweep(&inst.model, &cfg).unwrap();
            for (col, &p) in s.pplus().iter().enumerate() {
                assert!((0.0..=1.0).contains(&p));
                assert!((p + s.pminus(col) - 1.0).abs() < 1e-15);
                assert!(s.llr()[col].abs() <= cfg.llr_clamp);
            }
        }
    }
}

#[test]
fn full_decode_matches_direct_decode() {
    let mut r = rng(404);
    let cfg = PdaConfig::default();
    let mut agree = 0;
    let total = 60;
    for t in 0..total {
        let (params, order, nr) = cases()[t % 6];
        let inst = random_instance(params, order, nr, r.random_range(4.0..16.0), &mut r);
        let fast = decode(&inst.model, &cfg).unwrap().hard_bits;
        let slow = DirectPda::decode(&inst.model, cfg.num_iter, cfg.llr_clamp);
        agree += usize::from(fast == slow);
    }
    // round-off can only flip decisions sitting on a tie
    assert!(agree >= total - 1, "{agree}/{total}");
}

#[test]
fn noiseless_small_code_is_decoded_exactly() {
    let mut r = rng(505);
    let cfg = PdaConfig::default();
    let mut ok = 0;
    for _ in 0..1000 {
        let inst = random_instance(StbcParams::ill(2), 4, 2, 0.0, &mut r);
        let b = DVector::from_iterator(inst.bits.len(), inst.bits.iter().map(|&x| f64::from(x)));
        let mut quiet = inst.model.with_y(&inst.model.h * b).unwrap();
        quiet.sigma2 = 1e-6;
        ok += usize::from(decode(&quiet, &cfg).unwrap().hard_bits == inst.bits);
    }
    assert!(ok >= 999, "{ok}/1000");
}

#[test]
fn decode_is_deterministic() {
    let mut r = rng(707);
    let inst = random_instance(StbcParams::fd_ill(4), 4, 4, 6.0, &mut r);
    let cfg = PdaConfig::default();
    assert_eq!(decode(&inst.model, &cfg).unwrap(), decode(&inst.model, &cfg).unwrap());
}
