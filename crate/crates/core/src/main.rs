//! `stbc-sim`: BER sweeps and capacity references from the command line.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stbc_pda::baselines::{ergodic_capacity, min_snr_for_rate, siso_awgn_ber, CapacityQuery};
use stbc_pda::channel::db_to_linear;
use stbc_pda::sim::{format_table, run_experiment, write_csv, write_csv_to, ExperimentSpec};

#[derive(Parser)]
#[command(name = "stbc-sim", version, about = "CDA space-time codes with PDA decoding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo BER sweep over an SNR grid
    Sweep(Box<SweepArgs>),
    /// Ergodic capacity of the i.i.d. Rayleigh channel, or the SNR needed for a rate
    Capacity(CapacityArgs),
    /// Gray-mapped square QAM BER on a SISO AWGN channel
    Awgn {
        #[arg(long, default_value_t = 4)]
        qam: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        snr_db: Vec<f64>,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// Flat `key = value` file; flags below override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Code dimension (= transmit antennas = time slots)
    #[arg(long)]
    code_n: Option<String>,
    /// ill, fd-ill or fd-ill-conj
    #[arg(long)]
    code: Option<String>,
    /// Scale code matrices by 1/sqrt(n)
    #[arg(long)]
    normalize: Option<String>,
    #[arg(long)]
    qam: Option<String>,
    #[arg(long)]
    nr: Option<String>,
    /// Comma separated SNR grid, dB
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<String>,
    /// pda, mmse or ml
    #[arg(long)]
    decoder: Option<String>,
    #[arg(long)]
    pda_iters: Option<String>,
    #[arg(long)]
    llr_clamp: Option<String>,
    #[arg(long)]
    refresh_every: Option<String>,
    #[arg(long)]
    min_errors: Option<String>,
    #[arg(long)]
    max_trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    /// perfect or estimated
    #[arg(long)]
    csir: Option<String>,
    /// Data matrices per frame with estimated CSIR
    #[arg(long)]
    nd: Option<String>,
    #[arg(long)]
    est_iters: Option<String>,
    /// Kronecker exponential correlation at both ends
    #[arg(long)]
    corr_rho: Option<String>,
    #[arg(long)]
    corr_rho_t: Option<String>,
    #[arg(long)]
    corr_rho_r: Option<String>,
    /// Write zero in the wall_time_s column
    #[arg(long)]
    no_timing: bool,
    /// CSV destination (a summary table is printed); CSV goes to stdout otherwise
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SweepArgs {
    fn overrides(&self) -> Vec<(&'static str, &String)> {
        let pairs: [(&'static str, &Option<String>); 20] = [
            ("code_n", &self.code_n),
            ("code", &self.code),
            ("normalize", &self.normalize),
            ("qam", &self.qam),
            ("nr", &self.nr),
            ("snr_db", &self.snr_db),
            ("decoder", &self.decoder),
            ("pda_iters", &self.pda_iters),
            ("llr_clamp", &self.llr_clamp),
            ("refresh_every", &self.refresh_every),
            ("min_errors", &self.min_errors),
            ("max_trials", &self.max_trials),
            ("seed", &self.seed),
            ("workers", &self.workers),
            ("csir", &self.csir),
            ("nd", &self.nd),
            ("est_iters", &self.est_iters),
            ("corr_rho", &self.corr_rho),
            ("corr_rho_t", &self.corr_rho_t),
            ("corr_rho_r", &self.corr_rho_r),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k, v)))
            .collect()
    }
}

#[derive(Args)]
struct CapacityArgs {
    #[arg(long)]
    nt: usize,
    #[arg(long)]
    nr: usize,
    /// SNR points to evaluate, dB
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr_db: Vec<f64>,
    /// Report the minimum SNR for this rate (bps/Hz) instead
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long, default_value_t = 2000)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn sweep(args: SweepArgs) -> Result<()> {
    let mut spec = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let mut spec = ExperimentSpec::default();
            for (k, v) in stbc_pda::sim::parse_config(&text)? {
                if k == "out" {
                    continue;
                }
                spec.set(&k, &v)?;
            }
            spec
        }
        None => ExperimentSpec::default(),
    };
    for (k, v) in args.overrides() {
        spec.set(k, v)?;
    }
    if args.no_timing {
        spec.record_wall_time = false;
    }
    spec.validate()?;

    let records = run_experiment(&spec)?;
    match &args.out {
        Some(path) => {
            print!("{}", format_table(&records));
            write_csv(&records, path).with_context(|| format!("writing {}", path.display()))?
        }
        None => write_csv_to(&records, std::io::stdout())?,
    }
    Ok(())
}

fn capacity(args: CapacityArgs) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let base = CapacityQuery {
        nt: args.nt,
        nr: args.nr,
        gamma_db: 0.0,
        trials: args.trials,
        target_rate: args.rate.unwrap_or(0.0),
    };
    if let Some(rate) = args.rate {
        let db = min_snr_for_rate(&base, &mut rng);
        println!("min SNR for {rate} bps/Hz ({}x{}): {db:.3} dB", args.nt, args.nr);
        return Ok(());
    }
    anyhow::ensure!(!args.snr_db.is_empty(), "pass --snr-db or --rate");
    println!("snr_db,capacity_bps_hz");
    for db in args.snr_db {
        let c = ergodic_capacity(&CapacityQuery { gamma_db: db, ..base }, &mut rng);
        println!("{db},{c:.6}");
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Sweep(args) => sweep(*args),
        Command::Capacity(args) => capacity(args),
        Command::Awgn { qam, snr_db } => {
            println!("snr_db,ber");
            for db in snr_db {
                println!("{db},{:e}", siso_awgn_ber(qam, db_to_linear(db)));
            }
            Ok(())
        }
    }
}
