//! Trial engine.
//!
//! Every trial draws from its own ChaCha stream keyed by `(root seed, trial
//! index)`, so a trial's channel, data and noise do not depend on which
//! worker runs it. Trials are evaluated in fixed-size batches and the
//! stopping rule is applied to the in-order prefix of results, which makes
//! the reported counts independent of the worker count.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{Csir, DecoderKind, ExperimentSpec};
use super::output::BerRecord;
use crate::baselines::{ml_decode, mmse_detect};
use crate::channel::{apply_channel, ChannelModel, ChannelRealization, KroneckerChannel, SnrSpec};
use crate::error::{Error, Result};
use crate::estimation::{iterative_decode_estimate, make_pilot, FrameConfig, FrameSignals};
use crate::pda::decode;
use crate::stbc::{
    bits_to_symbol_vector, linearize, realify_received, QamSpec, StbcCode,
};
use crate::{Bit, CMatrix};

/// Trials evaluated per scheduling round.
pub const TRIAL_BATCH: u64 = 64;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrialOutcome {
    pub bits: u64,
    pub errors: u64,
}

/// Generator for trial `trial` under root seed `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&trial.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

struct Engine<'a> {
    spec: &'a ExperimentSpec,
    code: StbcCode,
    qam: QamSpec,
    kronecker: Option<KroneckerChannel>,
    pilot: CMatrix,
}

fn random_bits(n: usize, rng: &mut impl rand::Rng) -> Vec<Bit> {
    (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect()
}

fn count_errors(sent: &[Bit], got: &[Bit]) -> u64 {
    sent.iter().zip(got).filter(|(a, b)| a != b).count() as u64
}

impl<'a> Engine<'a> {
    fn new(spec: &'a ExperimentSpec) -> Result<Self> {
        let code = StbcCode::new(spec.code);
        let qam = spec.qam_spec()?;
        let kronecker = match spec.channel {
            ChannelModel::Iid => None,
            ChannelModel::Kronecker { rho_t, rho_r } => {
                Some(KroneckerChannel::new(spec.nr, spec.code.n, rho_t, rho_r)?)
            }
        };
        let pilot = make_pilot(spec.code.n, qam.es());
        Ok(Self {
            spec,
            code,
            qam,
            kronecker,
            pilot,
        })
    }

    fn bits_per_matrix(&self) -> usize {
        2 * self.qam.bits_per_dim() * self.code.n() * self.code.n()
    }

    fn draw_channel(&self, rng: &mut ChaCha8Rng) -> ChannelRealization {
        match &self.kronecker {
            Some(k) => k.sample(rng),
            None => crate::channel::sample_iid_channel(self.spec.nr, self.code.n(), rng),
        }
    }

    fn transmit(&self, hc: &CMatrix, snr: &SnrSpec, rng: &mut ChaCha8Rng) -> Result<(Vec<Bit>, CMatrix)> {
        let bits = random_bits(self.bits_per_matrix(), rng);
        let x = self.code.encode(&bits_to_symbol_vector(&bits, &self.qam)?)?;
        let y = apply_channel(&x, hc, snr, rng)?;
        Ok((bits, y))
    }

    fn trial(&self, snr: &SnrSpec, index: u64) -> Result<TrialOutcome> {
        let mut rng = trial_rng(self.spec.seed, index);
        let hc = self.draw_channel(&mut rng).hc;
        match self.spec.csir {
            Csir::Perfect => {
                let (sent, y) = self.transmit(&hc, snr, &mut rng)?;
                let eff = linearize(&hc, &self.code, &self.qam)?;
                let model = eff.model(realify_received(&y), snr.sigma2())?;
                let got = match self.spec.decoder {
                    DecoderKind::Pda => decode(&model, &self.spec.pda)?.hard_bits,
                    DecoderKind::Mmse => mmse_detect(&model)?,
                    DecoderKind::Ml => ml_decode(&model)?,
                };
                Ok(TrialOutcome {
                    bits: sent.len() as u64,
                    errors: count_errors(&sent, &got),
                })
            }
            Csir::Estimated => {
                let y_pilot = apply_channel(&self.pilot, &hc, snr, &mut rng)?;
                let mut sent = Vec::with_capacity(self.spec.nd);
                let mut y_data = Vec::with_capacity(self.spec.nd);
                for _ in 0..self.spec.nd {
                    let (b, y) = self.transmit(&hc, snr, &mut rng)?;
                    sent.push(b);
                    y_data.push(y);
                }
                let frame = FrameSignals {
                    pilot: self.pilot.clone(),
                    y_pilot,
                    y_data,
                    sigma2: snr.sigma2(),
                };
                let cfg = FrameConfig::new(self.spec.nd, self.code.n(), self.spec.est_iters)?;
                let decision =
                    iterative_decode_estimate(&frame, &self.code, &self.qam, &cfg, &self.spec.pda)?;
                let mut out = TrialOutcome::default();
                for (s, g) in sent.iter().zip(&decision.bits) {
                    out.bits += s.len() as u64;
                    out.errors += count_errors(s, g);
                }
                Ok(out)
            }
        }
    }
}

/// Runs the sweep and returns one record per SNR point, in grid order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<BerRecord>> {
    spec.validate()?;
    let engine = Engine::new(spec)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| Error::InvalidSpec {
            field: "workers".into(),
            reason: e.to_string(),
        })?;
    let label = spec.decoder_label();

    let mut records = Vec::with_capacity(spec.snr_db.len());
    for &snr_db in &spec.snr_db {
        let started = Instant::now();
        let snr = SnrSpec::from_db(snr_db, engine.qam.es(), spec.code.n)?;
        let mut acc = TrialOutcome::default();
        let mut trials = 0u64;
        'sweep: while trials < spec.max_trials {
            let end = (trials + TRIAL_BATCH).min(spec.max_trials);
            let batch: Vec<Result<TrialOutcome>> = pool.install(|| {
                (trials..end)
                    .into_par_iter()
                    .map(|i| engine.trial(&snr, i))
                    .collect()
            });
            for outcome in batch {
                let o = outcome?;
                acc.bits += o.bits;
                acc.errors += o.errors;
                trials += 1;
                if acc.errors >= spec.min_errors {
                    break 'sweep;
                }
            }
        }
        records.push(BerRecord {
            snr_db,
            trials,
            bits_simulated: acc.bits,
            bit_errors: acc.errors,
            ber: acc.errors as f64 / acc.bits as f64,
            decoder: label.clone(),
            seed: spec.seed,
            wall_time: if spec.record_wall_time {
                started.elapsed().as_secs_f64()
            } else {
                0.0
            },
        });
    }
    Ok(records)
}
