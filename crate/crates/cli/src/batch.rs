//! CSV batch decisions. Rows are decided in parallel and written back in
//! input order.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use rayon::prelude::*;
use serde::Serialize;

use rp2_core::rational::parse_rational;
use rp2_core::{admits_lagrangian_rp2, Certificate, Verdict};

pub const THREADS_VAR: &str = "RP2_TRIANGLE_THREADS";

#[derive(Debug, Clone)]
pub struct BatchRow {
    pub line: u64,
    pub id: Option<String>,
    pub mu: [String; 3],
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum BatchEntry {
    Decided {
        row: u64,
        #[serde(skip_serializing_if = "Option::is_none")]
        id: Option<String>,
        #[serde(flatten)]
        certificate: Certificate,
    },
    Failed {
        row: u64,
        #[serde(skip_serializing_if = "Option::is_none")]
        id: Option<String>,
        error: String,
    },
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub yes: usize,
    pub no: usize,
    pub error: usize,
}

/// Reads the whole file; a missing or unreadable file, or a header without
/// mu1, mu2, mu3, is an error. Bad rows become `Err` entries.
pub fn read_rows(path: &Path) -> anyhow::Result<Vec<Result<BatchRow, (u64, String)>>> {
    let file = File::open(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers = reader
        .headers()
        .with_context(|| format!("cannot read header of {}", path.display()))?
        .clone();
    let column = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (Some(c1), Some(c2), Some(c3)) = (column("mu1"), column("mu2"), column("mu3")) else {
        bail!("header must contain mu1, mu2, mu3 (found {:?})", headers.iter().collect::<Vec<_>>());
    };
    let id_col = column("id");

    let mut rows = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let row = k as u64 + 1;
        let parsed = record.map_err(|e| (row, e.to_string())).and_then(|r| {
            let get = |c: usize| {
                r.get(c)
                    .map(str::to_string)
                    .ok_or_else(|| (row, format!("missing column {}", headers.get(c).unwrap_or("?"))))
            };
            Ok(BatchRow {
                line: row,
                id: id_col.and_then(|c| r.get(c)).map(str::to_string),
                mu: [get(c1)?, get(c2)?, get(c3)?],
            })
        });
        rows.push(parsed);
    }
    Ok(rows)
}

pub fn decide_row(row: &BatchRow) -> BatchEntry {
    let fail = |error: String| BatchEntry::Failed {
        row: row.line,
        id: row.id.clone(),
        error,
    };
    let mut mu = Vec::with_capacity(3);
    for s in &row.mu {
        match parse_rational(s) {
            Ok(q) => mu.push(q),
            Err(e) => return fail(format!("cannot parse {s:?}: {e}")),
        }
    }
    let mu: [_; 3] = mu.try_into().expect("three values");
    match admits_lagrangian_rp2(&mu) {
        Ok(certificate) => BatchEntry::Decided {
            row: row.line,
            id: row.id.clone(),
            certificate,
        },
        Err(e) => fail(e.to_string()),
    }
}

pub fn thread_cap() -> anyhow::Result<Option<usize>> {
    match std::env::var(THREADS_VAR) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(anyhow!("{THREADS_VAR}: {e}")),
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => bail!("{THREADS_VAR} must be a positive integer, got {raw:?}"),
        },
    }
}

pub fn decide_all(
    rows: Vec<Result<BatchRow, (u64, String)>>,
    threads: Option<usize>,
) -> anyhow::Result<Vec<BatchEntry>> {
    let work = || -> Vec<BatchEntry> {
        rows.par_iter()
            .map(|r| match r {
                Ok(row) => decide_row(row),
                Err((row, error)) => BatchEntry::Failed {
                    row: *row,
                    id: None,
                    error: error.clone(),
                },
            })
            .collect()
    };
    match threads {
        None => Ok(work()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            Ok(pool.install(work))
        }
    }
}

pub fn count(entries: &[BatchEntry]) -> Counts {
    let mut c = Counts::default();
    for e in entries {
        match e {
            BatchEntry::Decided { certificate, .. } => match certificate.verdict {
                Verdict::Yes => c.yes += 1,
                Verdict::No => c.no += 1,
            },
            BatchEntry::Failed { .. } => c.error += 1,
        }
    }
    c
}

pub fn cmd_batch(
    input: &Path,
    output: Option<&Path>,
    json: bool,
    out: &mut Vec<u8>,
) -> anyhow::Result<i32> {
    let rows = read_rows(input)?;
    let entries = decide_all(rows, thread_cap()?)?;
    let counts = count(&entries);
    let mut body = serde_json::to_vec_pretty(&entries)?;
    body.push(b'\n');

    match output {
        Some(p) if p != Path::new("-") => {
            let mut f = File::create(p).with_context(|| format!("cannot write {}", p.display()))?;
            f.write_all(&body)?;
            if json {
                serde_json::to_writer_pretty(&mut *out, &counts)?;
                out.push(b'\n');
            } else {
                writeln!(out, "YES: {}, NO: {}, errors: {}", counts.yes, counts.no, counts.error)?;
            }
        }
        _ => out.extend_from_slice(&body),
    }
    Ok(crate::EXIT_OK)
}
