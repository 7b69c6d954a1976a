//! Acceptance suite. Runs each criterion in turn, prints one PASS/FAIL line
//! per criterion and exits nonzero if any fails.

mod common;

use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::Rng;
use stbc_pda::baselines::{ergodic_capacity, ml_decode, snr_db_for_ber, CapacityQuery};
use stbc_pda::channel::ChannelModel;
use stbc_pda::pda::{decode, PdaConfig, PdaState};
use stbc_pda::sim::{run_experiment, trial_rng, write_csv_to, BerRecord, Csir, DecoderKind, ExperimentSpec};
use stbc_pda::stbc::StbcParams;

use common::{identity_error, random_instance, records_le, DirectPda};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fmt_rec(r: &BerRecord) -> String {
    format!("{:.3e}±{:.1e}", r.ber, r.std_error())
}

fn sweep(spec: ExperimentSpec) -> Vec<BerRecord> {
    run_experiment(&spec).expect("experiment runs")
}

fn fixed(trials: u64, spec: ExperimentSpec) -> ExperimentSpec {
    ExperimentSpec {
        min_errors: u64::MAX,
        max_trials: trials,
        record_wall_time: false,
        ..spec
    }
}

fn capacity_anchor() -> Outcome {
    let q = CapacityQuery { nt: 12, nr: 12, gamma_db: 4.3, trials: 2000, target_rate: 0.0 };
    let c = ergodic_capacity(&q, &mut common::rng(2024));
    check((c - 18.0).abs() <= 0.5, format!("C(12x12, 4.3 dB) = {c:.3} bps/Hz over {} draws", q.trials))
}

fn ml_oracle_suite() -> Outcome {
    let base = ExperimentSpec {
        code: StbcParams::ill(2),
        qam: 4,
        nr: 2,
        snr_db: vec![6.0, 10.0, 14.0],
        seed: 77,
        ..Default::default()
    };
    let run = |d| sweep(fixed(10_000, ExperimentSpec { decoder: d, ..base.clone() }));
    let (ml, pda, mmse) = (run(DecoderKind::Ml), run(DecoderKind::Pda), run(DecoderKind::Mmse));
    let mut ok = true;
    let mut detail = Vec::new();
    for i in 0..3 {
        ok &= records_le(&ml[i], &pda[i]) && records_le(&pda[i], &mmse[i]);
        detail.push(format!(
            "{} dB ml {} pda {} mmse {}",
            ml[i].snr_db,
            fmt_rec(&ml[i]),
            fmt_rec(&pda[i]),
            fmt_rec(&mmse[i])
        ));
    }

    let cfg = PdaConfig::default();
    let trials = 10_000u64;
    let mut agree = 0u64;
    for t in 0..trials {
        let mut r = trial_rng(991, t);
        let inst = random_instance(StbcParams::ill(2), 4, 2, 14.0, &mut r);
        let a = ml_decode(&inst.model).unwrap();
        let b = decode(&inst.model, &cfg).unwrap().hard_bits;
        agree += u64::from(a == b);
    }
    let rate = agree as f64 / trials as f64;
    ok &= rate >= 0.90;
    detail.push(format!("PDA = ML on {:.2}% of trials at 14 dB", 100.0 * rate));
    check(ok, detail.join("; "))
}

fn fast_vs_direct() -> Outcome {
    let cfg = PdaConfig::default();
    let shapes = [(2, 4), (2, 16), (2, 64), (3, 4), (4, 4)];
    let mut r = common::rng(31337);
    let mut worst_p: f64 = 0.0;
    let mut worst_i: f64 = 0.0;
    for k in 0..20 {
        let (n, order) = shapes[k % shapes.len()];
        let params = if k % 2 == 0 { StbcParams::ill(n) } else { StbcParams::fd_ill(n) };
        let nr = r.random_range(1..=6);
        let snr = r.random_range(0.0..20.0);
        let inst = random_instance(params, order, nr, snr, &mut r);
        let m = &inst.model;
        assert!(m.h.ncols() <= 32);

        let mut fast = PdaState::initialize(m).unwrap();
        fast.sweep(m, &cfg).unwrap();
        let mut direct = DirectPda::new(m.h.ncols(), cfg.llr_clamp);
        direct.sweep(m);

        for (a, b) in fast.pplus().iter().zip(&direct.pplus) {
            worst_p = worst_p.max((a - b).abs());
        }
        worst_i = worst_i.max(identity_error(fast.dinv(), &direct.full_cov(m)));
    }
    check(
        worst_p <= 1e-9 && worst_i <= 1e-7,
        format!("20 instances: max |dp+| = {worst_p:.2e}, max |Dinv D - I| = {worst_i:.2e}"),
    )
}

fn large_dimension() -> Outcome {
    let target_db = snr_db_for_ber(4, 1e-3);
    let spec = |n: usize, snr: Vec<f64>| ExperimentSpec {
        code: StbcParams::ill(n),
        qam: 4,
        nr: n,
        snr_db: snr,
        seed: 8,
        ..Default::default()
    };
    let at_target = &sweep(fixed(1000, spec(8, vec![target_db])))[0];
    let mut ok = at_target.ber <= 1e-2;
    let mut detail = vec![format!("8x8 at {target_db:.2} dB: {}", fmt_rec(at_target))];

    // equal bit counts per point: 4x4 carries a quarter of the bits per trial
    let grid = vec![8.0, 10.0, 12.0];
    let big = sweep(fixed(500, spec(8, grid.clone())));
    let small = sweep(fixed(2000, spec(4, grid)));
    for (b, s) in big.iter().zip(&small) {
        ok &= records_le(b, s);
        detail.push(format!("{} dB 8x8 {} 4x4 {}", b.snr_db, fmt_rec(b), fmt_rec(s)));
    }
    check(ok, detail.join("; "))
}

fn complexity_scaling() -> Outcome {
    let cfg = PdaConfig::default();
    let n = 4;
    let mut pts = Vec::new();
    for nr in [8usize, 16, 32] {
        let mut r = common::rng(nr as u64);
        let inst = random_instance(StbcParams::ill(n), 4, nr, 10.0, &mut r);
        let m = &inst.model;
        let fresh = PdaState::initialize(m).unwrap();
        let bits = m.h.ncols() as f64;
        let mut best = f64::INFINITY;
        for _ in 0..5 {
            let mut reps = 0u32;
            let mut spent = 0.0;
            while spent < 0.1 {
                let mut s = fresh.clone();
                let t0 = Instant::now();
                s.sweep(m, &cfg).unwrap();
                spent += t0.elapsed().as_secs_f64();
                reps += 1;
            }
            best = best.min(spent / (reps as f64 * bits));
        }
        pts.push(((nr * n) as f64, best));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let alpha = sxy / sxx;
    let times: Vec<String> = pts.iter().map(|(x, t)| format!("{x}: {:.2} us", t * 1e6)).collect();
    check(
        (1.7..=2.3).contains(&alpha),
        format!("per-bit update {}; slope {alpha:.3}", times.join(", ")),
    )
}

fn estimation_ordering() -> Outcome {
    let base = ExperimentSpec {
        code: StbcParams::ill(4),
        qam: 4,
        nr: 4,
        snr_db: vec![10.0],
        seed: 6,
        ..Default::default()
    };
    let est = |nd: usize, frames: u64| {
        sweep(fixed(frames, ExperimentSpec { csir: Csir::Estimated, nd, est_iters: 2, ..base.clone() })).remove(0)
    };
    let one = est(1, 4000);
    let eight = est(8, 500);
    let perfect = sweep(fixed(4000, base.clone())).remove(0);
    let ok = records_le(&eight, &one) && records_le(&perfect, &eight) && records_le(&perfect, &one);
    check(
        ok,
        format!("10 dB: Nd=1 {} Nd=8 {} perfect {}", fmt_rec(&one), fmt_rec(&eight), fmt_rec(&perfect)),
    )
}

fn correlation_ordering() -> Outcome {
    let spec = |nr| ExperimentSpec {
        code: StbcParams::ill(4),
        qam: 16,
        nr,
        channel: ChannelModel::Kronecker { rho_t: 0.7, rho_r: 0.7 },
        snr_db: vec![18.0],
        seed: 7,
        ..Default::default()
    };
    let four = sweep(fixed(1500, spec(4))).remove(0);
    let six = sweep(fixed(1500, spec(6))).remove(0);
    check(records_le(&six, &four), format!("18 dB: Nr=4 {} Nr=6 {}", fmt_rec(&four), fmt_rec(&six)))
}

fn determinism() -> Outcome {
    let specs = [
        ExperimentSpec {
            code: StbcParams::ill(4),
            qam: 4,
            nr: 4,
            snr_db: vec![4.0, 8.0],
            min_errors: 300,
            max_trials: 5000,
            seed: 99,
            record_wall_time: false,
            ..Default::default()
        },
        ExperimentSpec {
            code: StbcParams::ill(2),
            qam: 16,
            nr: 3,
            csir: Csir::Estimated,
            nd: 3,
            snr_db: vec![12.0],
            min_errors: 150,
            max_trials: 5000,
            seed: 100,
            record_wall_time: false,
            ..Default::default()
        },
    ];
    for spec in specs {
        let mut outs = Vec::new();
        for workers in [1, 2] {
            let mut buf = Vec::new();
            write_csv_to(&sweep(ExperimentSpec { workers, ..spec.clone() }), &mut buf).unwrap();
            outs.push(buf);
        }
        if outs[0] != outs[1] {
            return Err(format!("library CSV differs for {}", spec.decoder_label()));
        }
    }

    let mut outs = Vec::new();
    for workers in ["1", "2"] {
        let out = Command::new(env!("CARGO_BIN_EXE_stbc-sim"))
            .args([
                "sweep", "--code-n", "3", "--qam", "4", "--nr", "3", "--snr-db", "2,6", "--min-errors", "200",
                "--seed", "42", "--no-timing", "--workers", workers,
            ])
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(String::from_utf8_lossy(&out.stderr).into_owned());
        }
        outs.push(out.stdout);
    }
    check(outs[0] == outs[1], "workers 1 vs 2: library and CLI CSV byte-identical".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("capacity anchor", capacity_anchor),
        ("ML oracle ordering", ml_oracle_suite),
        ("fast path equals direct path", fast_vs_direct),
        ("large-dimension behavior", large_dimension),
        ("complexity scaling", complexity_scaling),
        ("channel-estimation ordering", estimation_ordering),
        ("correlation ordering", correlation_ordering),
        ("determinism across workers", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} [{}] {name} ({:.1}s): {detail}", i + 1, t0.elapsed().as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
