//! Experiment description and its flat `key = value` text form.
//!
//! Recognised keys (dashes and underscores are interchangeable):
//!
//! | key | value |
//! |-----|-------|
//! | `code-n` | code dimension = transmit antennas |
//! | `code` | `ill`, `fd-ill` (`t = e^j`) or `fd-ill-conj` (`t = e^-j`) |
//! | `normalize` | `true`/`false`, scale code matrices by `1/sqrt(n)` |
//! | `qam` | square QAM order |
//! | `nr` | receive antennas |
//! | `snr-db` | comma separated SNR grid in dB |
//! | `decoder` | `pda`, `mmse` or `ml` |
//! | `pda-iters`, `llr-clamp`, `eta-eps`, `refresh-every`, `early-stop` | PDA knobs |
//! | `min-errors`, `max-trials` | stopping rule per SNR point |
//! | `seed`, `workers` | root seed and thread count |
//! | `csir` | `perfect` or `estimated` |
//! | `nd`, `est-iters` | frame layout for estimated CSIR |
//! | `corr-rho` | Kronecker correlation on both ends; `corr-rho-t`/`corr-rho-r` set one end |
//! | `record-wall-time` | `false` writes zero timings |
//!
//! Blank lines and `#` comments are ignored.

use std::str::FromStr;

use num_complex::Complex64;

use crate::channel::ChannelModel;
use crate::error::{Error, Result};
use crate::pda::PdaConfig;
use crate::baselines::ML_MAX_BITS as ML_BITS_GUARD;
use crate::stbc::{QamSpec, StbcParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderKind {
    Pda,
    Mmse,
    Ml,
}

impl DecoderKind {
    pub fn name(&self) -> &'static str {
        match self {
            DecoderKind::Pda => "pda",
            DecoderKind::Mmse => "mmse",
            DecoderKind::Ml => "ml",
        }
    }
}

impl FromStr for DecoderKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pda" => Ok(DecoderKind::Pda),
            "mmse" => Ok(DecoderKind::Mmse),
            "ml" => Ok(DecoderKind::Ml),
            other => Err(format!("unknown decoder `{other}` (pda, mmse, ml)")),
        }
    }
}

/// Receiver channel knowledge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Csir {
    Perfect,
    /// Pilot-aided estimation with the frame layout in
    /// [`ExperimentSpec::nd`] and [`ExperimentSpec::est_iters`].
    Estimated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub code: StbcParams,
    pub qam: usize,
    pub nr: usize,
    pub channel: ChannelModel,
    pub decoder: DecoderKind,
    pub pda: PdaConfig,
    pub csir: Csir,
    /// Data matrices per frame (estimated CSIR).
    pub nd: usize,
    /// Decode/estimate rounds per frame (estimated CSIR).
    pub est_iters: usize,
    pub snr_db: Vec<f64>,
    pub min_errors: u64,
    /// Trials per SNR point; a trial is one code matrix (perfect CSIR) or
    /// one frame (estimated CSIR).
    pub max_trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub record_wall_time: bool,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            code: StbcParams::ill(4),
            qam: 4,
            nr: 4,
            channel: ChannelModel::Iid,
            decoder: DecoderKind::Pda,
            pda: PdaConfig::default(),
            csir: Csir::Perfect,
            nd: 1,
            est_iters: 2,
            snr_db: vec![10.0],
            min_errors: 200,
            max_trials: 1_000_000,
            seed: 1,
            workers: 1,
            record_wall_time: true,
        }
    }
}

fn invalid(field: &str, reason: impl Into<String>) -> Error {
    Error::InvalidSpec {
        field: field.to_string(),
        reason: reason.into(),
    }
}

fn parse_num<T: FromStr>(field: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e: T::Err| invalid(field, format!("`{value}`: {e}")))
}

fn parse_bool(field: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        other => Err(invalid(field, format!("`{other}` is not a boolean"))),
    }
}

/// Splits `key = value` lines; keys come back lower-case with `_`.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| invalid(&format!("line {}", lineno + 1), "expected `key = value`"))?;
        out.push((normalize_key(key), value.trim().to_string()));
    }
    Ok(out)
}

fn normalize_key(key: &str) -> String {
    key.trim().trim_start_matches("--").to_ascii_lowercase().replace('-', "_")
}

impl ExperimentSpec {
    /// Applies one setting by key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = normalize_key(key);
        let field = key.as_str();
        match field {
            "code_n" => self.code.n = parse_num(field, value)?,
            "code" => {
                let n = self.code.n;
                let normalize = self.code.normalize;
                self.code = match value.trim().to_ascii_lowercase().as_str() {
                    "ill" => StbcParams::ill(n),
                    "fd_ill" | "fd-ill" => StbcParams::fd_ill(n),
                    "fd_ill_conj" | "fd-ill-conj" => {
                        StbcParams::fd_ill(n).with_t(Complex64::from_polar(1.0, -1.0))
                    }
                    other => return Err(invalid(field, format!("unknown code `{other}`"))),
                }
                .with_normalize(normalize);
            }
            "normalize" => self.code.normalize = parse_bool(field, value)?,
            "qam" => self.qam = parse_num(field, value)?,
            "nr" => self.nr = parse_num(field, value)?,
            "snr_db" => {
                self.snr_db = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| parse_num(field, s))
                    .collect::<Result<_>>()?
            }
            "decoder" => self.decoder = value.parse().map_err(|e: String| invalid(field, e))?,
            "pda_iters" => self.pda.num_iter = parse_num(field, value)?,
            "llr_clamp" => self.pda.llr_clamp = parse_num(field, value)?,
            "eta_eps" => self.pda.eta_eps = parse_num(field, value)?,
            "refresh_every" => self.pda.refresh_every = parse_num(field, value)?,
            "early_stop" => {
                let eps: f64 = parse_num(field, value)?;
                self.pda.early_stop = (eps > 0.0).then_some(eps);
            }
            "min_errors" => self.min_errors = parse_num(field, value)?,
            "max_trials" => self.max_trials = parse_num::<f64>(field, value)? as u64,
            "seed" => self.seed = parse_num(field, value)?,
            "workers" => self.workers = parse_num(field, value)?,
            "csir" => {
                self.csir = match value.trim().to_ascii_lowercase().as_str() {
                    "perfect" => Csir::Perfect,
                    "estimated" => Csir::Estimated,
                    other => return Err(invalid(field, format!("unknown CSIR mode `{other}`"))),
                }
            }
            "nd" => self.nd = parse_num(field, value)?,
            "est_iters" => self.est_iters = parse_num(field, value)?,
            "corr_rho" | "corr_rho_t" | "corr_rho_r" => {
                let rho: f64 = parse_num(field, value)?;
                let (mut rho_t, mut rho_r) = match self.channel {
                    ChannelModel::Kronecker { rho_t, rho_r } => (rho_t, rho_r),
                    ChannelModel::Iid => (0.0, 0.0),
                };
                if field != "corr_rho_r" {
                    rho_t = rho;
                }
                if field != "corr_rho_t" {
                    rho_r = rho;
                }
                self.channel = ChannelModel::Kronecker { rho_t, rho_r };
            }
            "record_wall_time" => self.record_wall_time = parse_bool(field, value)?,
            _ => return Err(invalid(field, "unknown key")),
        }
        Ok(())
    }

    /// Settings from a config file body, applied in order.
    pub fn from_config(text: &str) -> Result<Self> {
        let mut spec = Self::default();
        for (k, v) in parse_config(text)? {
            spec.set(&k, &v)?;
        }
        Ok(spec)
    }

    pub fn qam_spec(&self) -> Result<QamSpec> {
        QamSpec::new(self.qam).map_err(|e| invalid("qam", e.to_string()))
    }

    /// Label written to the `decoder` column.
    pub fn decoder_label(&self) -> String {
        match self.csir {
            Csir::Perfect => self.decoder.name().to_string(),
            Csir::Estimated => {
                format!("{}-est-nd{}-it{}", self.decoder.name(), self.nd, self.est_iters)
            }
        }
    }

    /// Checks every field, naming the first offending one.
    pub fn validate(&self) -> Result<()> {
        if self.code.n == 0 {
            return Err(invalid("code_n", "must be at least 1"));
        }
        StbcParams::new(self.code.n, self.code.delta, self.code.t, self.code.normalize)
            .map_err(|e| invalid("code", e.to_string()))?;
        let qam = self.qam_spec()?;
        if self.nr == 0 {
            return Err(invalid("nr", "must be at least 1"));
        }
        if self.snr_db.is_empty() {
            return Err(invalid("snr_db", "grid is empty"));
        }
        if let Some(bad) = self.snr_db.iter().find(|s| !s.is_finite()) {
            return Err(invalid("snr_db", format!("{bad} is not finite")));
        }
        if self.min_errors == 0 {
            return Err(invalid("min_errors", "must be at least 1"));
        }
        if self.max_trials == 0 {
            return Err(invalid("max_trials", "must be at least 1"));
        }
        if self.workers == 0 {
            return Err(invalid("workers", "must be at least 1"));
        }
        if let ChannelModel::Kronecker { rho_t, rho_r } = self.channel {
            for (name, rho) in [("corr_rho_t", rho_t), ("corr_rho_r", rho_r)] {
                if !(0.0..1.0).contains(&rho) {
                    return Err(invalid(name, format!("{rho} outside [0, 1)")));
                }
            }
        }
        self.pda
            .validate()
            .map_err(|e| invalid("pda", e.to_string()))?;
        let bits = 2 * qam.bits_per_dim() * self.code.n * self.code.n;
        if self.decoder == DecoderKind::Ml && bits > ML_BITS_GUARD {
            return Err(invalid(
                "decoder",
                format!("ml needs at most {ML_BITS_GUARD} bits per code matrix, this code has {bits}"),
            ));
        }
        if self.csir == Csir::Estimated {
            if self.nd == 0 {
                return Err(invalid("nd", "must be at least 1"));
            }
            if self.est_iters == 0 {
                return Err(invalid("est_iters", "must be at least 1"));
            }
            if self.decoder != DecoderKind::Pda {
                return Err(invalid("decoder", "estimated CSIR runs the PDA decoder only"));
            }
        }
        Ok(())
    }
}
