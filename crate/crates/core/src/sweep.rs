//! Seeded sample sweeps across a range of lattice sizes, and the CSV
//! row format they persist to.
//!
//! Determinism contract: the record list depends only on the config, not
//! on the execution strategy. Every sample draws from its own child
//! stream and rows are emitted sorted by (n, replicate).

use crate::lattice::LatticeSize;
use crate::lers::LersSampler;
use crate::par::{map_indexed, Parallelism};
use crate::seed::child_seed;
use crate::stats::SizeTable;
use crate::ust::UstError;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SweepError {
    #[error("n_min must be at least 1")]
    ZeroNMin,
    #[error("n_step must be at least 1")]
    ZeroStep,
    #[error("n_max {n_max} is below n_min {n_min}")]
    EmptyRange { n_min: u32, n_max: u32 },
    #[error("reps must be at least 1")]
    ZeroReps,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("CSV line {line}: {message}")]
pub struct CsvError {
    /// 1-based line number, counting the header.
    pub line: usize,
    pub message: String,
}

/// A full sweep specification; `master_seed` and the range determine
/// every sample.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub n_min: u32,
    pub n_max: u32,
    pub n_step: u32,
    pub reps: u32,
    pub master_seed: u64,
    pub strategy: Parallelism,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), SweepError> {
        if self.n_min < 1 {
            return Err(SweepError::ZeroNMin);
        }
        if self.n_step < 1 {
            return Err(SweepError::ZeroStep);
        }
        if self.n_max < self.n_min {
            return Err(SweepError::EmptyRange {
                n_min: self.n_min,
                n_max: self.n_max,
            });
        }
        if self.reps < 1 {
            return Err(SweepError::ZeroReps);
        }
        Ok(())
    }

    pub fn n_values(&self) -> Vec<u32> {
        (self.n_min..=self.n_max)
            .step_by(self.n_step as usize)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleStatus {
    Ok,
    /// The covering walk hit its step cap; size is recorded as 0 and the
    /// row is excluded from analysis.
    StepCap,
}

impl SampleStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SampleStatus::Ok => "ok",
            SampleStatus::StepCap => "stepcap",
        }
    }
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleRecord {
    pub n: u32,
    pub replicate: u32,
    pub seed: u64,
    pub size: u64,
    pub steps: u64,
    pub status: SampleStatus,
}

/// Runs every (n, replicate) cell of the sweep. Row order is
/// (n, replicate) ascending; failures become `stepcap` rows and the
/// sweep continues.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SampleRecord>, SweepError> {
    config.validate()?;
    let mut records = Vec::with_capacity(config.n_values().len() * config.reps as usize);
    for n in config.n_values() {
        let sampler = LersSampler::new(LatticeSize::new(n).expect("validated range"));
        let mut rows = map_indexed(config.strategy, config.reps as usize, |replicate| {
            let seed = child_seed(config.master_seed, n, replicate as u32);
            match sampler.sample(seed) {
                Ok(sample) => SampleRecord {
                    n,
                    replicate: replicate as u32,
                    seed,
                    size: sample.size as u64,
                    steps: sample.steps,
                    status: SampleStatus::Ok,
                },
                Err(UstError::StepCapExceeded { cap }) => SampleRecord {
                    n,
                    replicate: replicate as u32,
                    seed,
                    size: 0,
                    steps: cap,
                    status: SampleStatus::StepCap,
                },
                Err(other) => unreachable!("sampler cannot fail with {other}"),
            }
        });
        records.append(&mut rows);
    }
    Ok(records)
}

pub const CSV_HEADER: &str = "n,replicate,seed,size,steps,status";

/// Serializes records in the stable CSV format: integers, no quoting,
/// LF line endings.
pub fn records_to_csv(records: &[SampleRecord]) -> String {
    let mut out = String::with_capacity(32 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n,
            r.replicate,
            r.seed,
            r.size,
            r.steps,
            r.status.as_str()
        ));
    }
    out
}

/// Strict parser for the sweep CSV format. Rejects the first malformed
/// row with its 1-based line number.
pub fn parse_csv(text: &str) -> Result<Vec<SampleRecord>, CsvError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        Some((_, header)) => {
            return Err(CsvError {
                line: 1,
                message: format!("expected header `{CSV_HEADER}`, found `{header}`"),
            })
        }
        None => {
            return Err(CsvError {
                line: 1,
                message: "empty file".into(),
            })
        }
    }
    let mut records = Vec::new();
    for (index, row) in lines {
        let line = index + 1;
        if row.is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 6 {
            return Err(CsvError {
                line,
                message: format!("expected 6 fields, found {}", fields.len()),
            });
        }
        let int = |field: &str, name: &str| -> Result<u64, CsvError> {
            field.parse().map_err(|_| CsvError {
                line,
                message: format!("{name} `{field}` is not an unsigned integer"),
            })
        };
        let status = match fields[5] {
            "ok" => SampleStatus::Ok,
            "stepcap" => SampleStatus::StepCap,
            other => {
                return Err(CsvError {
                    line,
                    message: format!("unknown status `{other}`"),
                })
            }
        };
        records.push(SampleRecord {
            n: int(fields[0], "n")? as u32,
            replicate: int(fields[1], "replicate")? as u32,
            seed: int(fields[2], "seed")?,
            size: int(fields[3], "size")?,
            steps: int(fields[4], "steps")?,
            status,
        });
    }
    Ok(records)
}

/// Collects successful rows into the analysis table.
pub fn size_table_from_records(records: &[SampleRecord]) -> SizeTable {
    let mut table = SizeTable::new();
    for r in records {
        if r.status == SampleStatus::Ok {
            table.insert(r.n, r.size as f64);
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(strategy: Parallelism) -> SweepConfig {
        SweepConfig {
            n_min: 1,
            n_max: 3,
            n_step: 2,
            reps: 4,
            master_seed: 2024,
            strategy,
        }
    }

    #[test]
    fn config_validation() {
        let mut c = small_config(Parallelism::Sequential);
        assert_eq!(c.validate(), Ok(()));
        c.n_min = 0;
        assert_eq!(c.validate(), Err(SweepError::ZeroNMin));
        c.n_min = 5;
        c.n_max = 4;
        assert_eq!(
            c.validate(),
            Err(SweepError::EmptyRange { n_min: 5, n_max: 4 })
        );
        c.n_max = 5;
        c.reps = 0;
        assert_eq!(c.validate(), Err(SweepError::ZeroReps));
        c.reps = 1;
        c.n_step = 0;
        assert_eq!(c.validate(), Err(SweepError::ZeroStep));
    }

    #[test]
    fn n_values_step_through_the_range() {
        let c = SweepConfig {
            n_min: 5,
            n_max: 10,
            n_step: 5,
            reps: 1,
            master_seed: 0,
            strategy: Parallelism::Sequential,
        };
        assert_eq!(c.n_values(), vec![5, 10]);
        assert_eq!(small_config(Parallelism::Sequential).n_values(), vec![1, 3]);
    }

    #[test]
    fn sweep_rows_are_sorted_and_seeded() {
        let records = run_sweep(&small_config(Parallelism::Sequential)).unwrap();
        assert_eq!(records.len(), 8);
        for (i, r) in records.iter().enumerate() {
            assert_eq!(r.status, SampleStatus::Ok);
            assert_eq!(r.seed, child_seed(2024, r.n, r.replicate));
            if i > 0 {
                let prev = &records[i - 1];
                assert!((prev.n, prev.replicate) < (r.n, r.replicate));
            }
        }
    }

    #[test]
    fn strategy_does_not_change_the_records() {
        let sequential = run_sweep(&small_config(Parallelism::Sequential)).unwrap();
        let threads = run_sweep(&small_config(Parallelism::Threads(3))).unwrap();
        let default = run_sweep(&small_config(Parallelism::Default)).unwrap();
        assert_eq!(sequential, threads);
        assert_eq!(sequential, default);
        assert_eq!(
            records_to_csv(&sequential),
            records_to_csv(&threads),
            "serialized bytes must match too"
        );
    }

    #[test]
    fn csv_round_trip() {
        let records = run_sweep(&small_config(Parallelism::Sequential)).unwrap();
        let csv = records_to_csv(&records);
        assert!(csv.starts_with("n,replicate,seed,size,steps,status\n"));
        assert!(!csv.contains('\r'), "LF endings only");
        assert_eq!(parse_csv(&csv).unwrap(), records);
    }

    #[test]
    fn parser_reports_line_numbers() {
        assert_eq!(parse_csv("").unwrap_err().line, 1);
        let bad_header = "wrong\n1,0,5,1,10,ok\n";
        assert_eq!(parse_csv(bad_header).unwrap_err().line, 1);
        let bad_row = format!("{CSV_HEADER}\n1,0,5,1,10,ok\n1,1,bad,1,10,ok\n");
        let err = parse_csv(&bad_row).unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("seed"));
        let bad_status = format!("{CSV_HEADER}\n1,0,5,1,10,meh\n");
        let err = parse_csv(&bad_status).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("status"));
        let short_row = format!("{CSV_HEADER}\n1,0,5\n");
        assert_eq!(parse_csv(&short_row).unwrap_err().line, 2);
    }

    #[test]
    fn size_table_skips_failed_rows() {
        let records = vec![
            SampleRecord {
                n: 2,
                replicate: 0,
                seed: 1,
                size: 8,
                steps: 100,
                status: SampleStatus::Ok,
            },
            SampleRecord {
                n: 2,
                replicate: 1,
                seed: 2,
                size: 0,
                steps: 999,
                status: SampleStatus::StepCap,
            },
        ];
        let table = size_table_from_records(&records);
        assert_eq!(table.samples(2), &[8.0]);
    }
}
