//! Monte Carlo BER sweeps: experiment description, the trial engine and
//! CSV output.

mod config;
mod output;
mod run;

pub use config::{parse_config, Csir, DecoderKind, ExperimentSpec};
pub use output::{format_table, read_csv, write_csv, write_csv_to, BerRecord, CSV_HEADER};
pub use run::{run_experiment, trial_rng, TrialOutcome, TRIAL_BATCH};
