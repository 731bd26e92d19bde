//! Self-describing experiment records.
//!
//! Every record carries enough context to re-run itself: the experiment tag,
//! energy E and shell size N_E, curve kind and length, the trial index (or
//! an aggregate flag with the exact trial count), the derived seed, a
//! timestamp label, and the code version. Results live in a flat map of
//! named reals.
//!
//! Two exports are provided: line-delimited JSON (append-safe, one record
//! per line, reals written with 17 significant digits so every f64
//! round-trips exactly) and a flat CSV whose columns are the fixed fields
//! followed by the union of payload keys.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::OpenOptions;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

/// Version stamp written into every record.
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One experiment result: a single trial, a deterministic computation, or an
/// aggregate over trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    /// Experiment tag.
    pub experiment: String,
    /// Energy E (0 for records not tied to one energy, e.g. cross-energy
    /// slope fits and decay fits).
    pub energy: i64,
    /// Shell size N_E (0 when no shell is involved).
    pub shell_count: usize,
    /// Curve kind tag ("none" for curve-free experiments).
    pub curve: String,
    /// Curve length L (0 for curve-free experiments).
    pub length: f64,
    /// Trial index for per-trial records, absent for aggregates.
    pub trial: Option<u64>,
    /// True for aggregate (and deterministic) records.
    pub aggregate: bool,
    /// Exact number of Monte Carlo trials an aggregate summarizes
    /// (Some(0) for deterministic computations and rejections).
    pub trials: Option<u64>,
    /// Named real results.
    pub payload: BTreeMap<String, f64>,
    /// Seed that reproduces this record (trial seed, energy seed, or master).
    pub seed: u64,
    /// Timestamp label (injectable; fixed in tests, wall clock in the CLI).
    pub timestamp: String,
    /// Code version that produced the record.
    pub version: String,
}

impl ExperimentRecord {
    fn assert_finite(&self) {
        assert!(self.length.is_finite(), "record length must be finite");
        for (key, value) in &self.payload {
            assert!(value.is_finite(), "payload entry {key:?} = {value} is not finite");
        }
    }

    /// A per-trial record.
    #[allow(clippy::too_many_arguments)]
    pub fn per_trial(
        experiment: &str,
        energy: i64,
        shell_count: usize,
        curve: &str,
        length: f64,
        trial: u64,
        payload: BTreeMap<String, f64>,
        seed: u64,
        timestamp: &str,
    ) -> Self {
        let record = ExperimentRecord {
            experiment: experiment.to_string(),
            energy,
            shell_count,
            curve: curve.to_string(),
            length,
            trial: Some(trial),
            aggregate: false,
            trials: None,
            payload,
            seed,
            timestamp: timestamp.to_string(),
            version: CODE_VERSION.to_string(),
        };
        record.assert_finite();
        record
    }

    /// An aggregate over `trials` Monte Carlo trials (0 for deterministic
    /// computations and rejection records).
    #[allow(clippy::too_many_arguments)]
    pub fn aggregate(
        experiment: &str,
        energy: i64,
        shell_count: usize,
        curve: &str,
        length: f64,
        trials: u64,
        payload: BTreeMap<String, f64>,
        seed: u64,
        timestamp: &str,
    ) -> Self {
        let record = ExperimentRecord {
            experiment: experiment.to_string(),
            energy,
            shell_count,
            curve: curve.to_string(),
            length,
            trial: None,
            aggregate: true,
            trials: Some(trials),
            payload,
            seed,
            timestamp: timestamp.to_string(),
            version: CODE_VERSION.to_string(),
        };
        record.assert_finite();
        record
    }
}

/// JSON formatter writing every real with 17 significant digits
/// (`{:.16e}`), enough to reconstruct the exact f64 bits.
struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes one record as a single JSON line (no trailing newline).
pub fn to_json_line(record: &ExperimentRecord) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    record
        .serialize(&mut ser)
        .expect("record serialization is infallible");
    String::from_utf8(buf).expect("serialized record is UTF-8")
}

/// Writes records as line-delimited JSON.
pub fn write_jsonl<W: Write>(records: &[ExperimentRecord], mut writer: W) -> io::Result<()> {
    for record in records {
        writeln!(writer, "{}", to_json_line(record))?;
    }
    writer.flush()
}

/// Appends records to a line-delimited JSON file, creating it if needed.
pub fn append_jsonl(path: &Path, records: &[ExperimentRecord]) -> io::Result<()> {
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    write_jsonl(records, BufWriter::new(file))
}

/// Reads back a line-delimited JSON record file.
pub fn read_jsonl(path: &Path) -> io::Result<Vec<ExperimentRecord>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .filter(|line| !line.trim().is_empty())
        .map(|line| {
            serde_json::from_str(line).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
        })
        .collect()
}

/// Writes records as CSV: fixed columns, then the sorted union of payload
/// keys, with empty cells where a record lacks a key. Reals use 17
/// significant digits.
pub fn write_csv<W: Write>(records: &[ExperimentRecord], writer: W) -> io::Result<()> {
    let payload_keys: BTreeSet<&str> = records
        .iter()
        .flat_map(|r| r.payload.keys().map(String::as_str))
        .collect();

    let mut csv = csv::Writer::from_writer(writer);
    let mut header = vec![
        "experiment",
        "energy",
        "shell_count",
        "curve",
        "length",
        "trial",
        "aggregate",
        "trials",
        "seed",
        "timestamp",
        "version",
    ];
    header.extend(payload_keys.iter().copied());
    csv.write_record(&header)?;

    for record in records {
        let mut row: Vec<String> = vec![
            record.experiment.clone(),
            record.energy.to_string(),
            record.shell_count.to_string(),
            record.curve.clone(),
            format!("{:.16e}", record.length),
            record.trial.map(|t| t.to_string()).unwrap_or_default(),
            record.aggregate.to_string(),
            record.trials.map(|t| t.to_string()).unwrap_or_default(),
            record.seed.to_string(),
            record.timestamp.clone(),
            record.version.clone(),
        ];
        for key in &payload_keys {
            row.push(
                record
                    .payload
                    .get(*key)
                    .map(|v| format!("{v:.16e}"))
                    .unwrap_or_default(),
            );
        }
        csv.write_record(&row)?;
    }
    csv.flush()
}
