use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const CSV_HEADER: &str = "snr_db,trials,bits,errors,ber,decoder,seed,wall_time_s";

/// One SNR point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerRecord {
    pub snr_db: f64,
    pub trials: u64,
    #[serde(rename = "bits")]
    pub bits_simulated: u64,
    #[serde(rename = "errors")]
    pub bit_errors: u64,
    pub ber: f64,
    pub decoder: String,
    pub seed: u64,
    #[serde(rename = "wall_time_s")]
    pub wall_time: f64,
}

impl BerRecord {
    /// Binomial standard error of the BER estimate.
    pub fn std_error(&self) -> f64 {
        if self.bits_simulated == 0 {
            return 0.0;
        }
        (self.ber * (1.0 - self.ber) / self.bits_simulated as f64).sqrt()
    }
}

fn sorted(records: &[BerRecord]) -> Vec<&BerRecord> {
    let mut rows: Vec<&BerRecord> = records.iter().collect();
    rows.sort_by(|a, b| a.snr_db.total_cmp(&b.snr_db));
    rows
}

/// Writes the header and one row per record, ascending in SNR.
pub fn write_csv_to<W: io::Write>(records: &[BerRecord], writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    w.write_record(CSV_HEADER.split(','))?;
    for r in sorted(records) {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(records: &[BerRecord], path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv_to(records, io::BufWriter::new(file))
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<BerRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    let rows = r.deserialize().collect::<std::result::Result<Vec<BerRecord>, _>>()?;
    Ok(rows)
}

/// Human-readable table for the terminal.
pub fn format_table(records: &[BerRecord]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>8} {:>10} {:>12} {:>10} {:>12} {:>10} {:>9}",
        "snr_db", "trials", "bits", "errors", "ber", "std_err", "time_s"
    );
    for r in sorted(records) {
        let _ = writeln!(
            s,
            "{:>8.2} {:>10} {:>12} {:>10} {:>12.4e} {:>10.2e} {:>9.2}",
            r.snr_db,
            r.trials,
            r.bits_simulated,
            r.bit_errors,
            r.ber,
            r.std_error(),
            r.wall_time
        );
    }
    s
}
