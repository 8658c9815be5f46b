//! Result files. Every writer is deterministic: the same results always
//! serialize to the same bytes.
//!
//! | file                    | contents                                         |
//! |-------------------------|--------------------------------------------------|
//! | `metrics.jsonl`         | one object per (replicate, evaluation point)     |
//! | `aggregate.csv`         | `t,err_mean,err_std,loss_mean,loss_std,queries_mean` |
//! | `summary.json`          | final-round means, query fraction, config        |
//! | `sweep.csv`             | one row per mu                                   |
//! | `compare.csv`           | one row per replicate, SMD-AMA vs QBB            |

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::experiment::{Comparison, ExperimentConfig, ExperimentResult, SweepResult};
use crate::error::{Error, Result};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn create(dir: &Path, name: &str) -> Result<(BufWriter<File>, std::path::PathBuf)> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(name);
    let f = File::create(&path).map_err(io_err(&path))?;
    Ok((BufWriter::new(f), path))
}

fn write_jsonl<'a, T: Serialize + 'a>(dir: &Path, name: &str, rows: impl IntoIterator<Item = &'a T>) -> Result<()> {
    let (mut w, path) = create(dir, name)?;
    for row in rows {
        serde_json::to_writer(&mut w, row).map_err(|e| io_err(&path)(e.into()))?;
        w.write_all(b"\n").map_err(io_err(&path))?;
    }
    w.flush().map_err(io_err(&path))
}

fn write_csv<'a, T: Serialize + 'a>(dir: &Path, name: &str, rows: impl IntoIterator<Item = &'a T>) -> Result<()> {
    let (w, path) = create(dir, name)?;
    let mut out = csv::Writer::from_writer(w);
    let to_io = |e: csv::Error| io_err(&path)(std::io::Error::other(e));
    for row in rows {
        out.serialize(row).map_err(to_io)?;
    }
    out.flush().map_err(io_err(&path))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let (mut w, path) = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| io_err(&path)(e.into()))?;
    w.write_all(b"\n").map_err(io_err(&path))?;
    w.flush().map_err(io_err(&path))
}

#[derive(Serialize)]
struct WithConfig<'a, T> {
    config: &'a ExperimentConfig,
    #[serde(flatten)]
    body: &'a T,
}

pub fn write_run(dir: &Path, cfg: &ExperimentConfig, res: &ExperimentResult) -> Result<()> {
    write_jsonl(dir, "metrics.jsonl", res.replicates.iter().flat_map(|r| &r.metrics))?;
    write_csv(dir, "aggregate.csv", &res.aggregate)?;
    write_json(
        dir,
        "summary.json",
        &WithConfig {
            config: cfg,
            body: &res.summary,
        },
    )
}

#[derive(Serialize)]
struct SweepReplicate {
    mu: f64,
    replicate: usize,
    queries: u64,
    sum_p_query: f64,
    epsilon_floor: f64,
    test_error: f64,
    test_loss: f64,
}

pub fn write_sweep(dir: &Path, cfg: &ExperimentConfig, sweep: &SweepResult) -> Result<()> {
    write_csv(dir, "sweep.csv", &sweep.rows)?;
    let per_rep: Vec<SweepReplicate> = sweep
        .rows
        .iter()
        .zip(&sweep.runs)
        .flat_map(|(row, run)| {
            run.replicates.iter().map(move |r| SweepReplicate {
                mu: row.mu,
                replicate: r.replicate,
                queries: r.queries,
                sum_p_query: r.sum_p_query,
                epsilon_floor: r.epsilon_floor,
                test_error: r.final_record().test_error,
                test_loss: r.final_record().test_loss,
            })
        })
        .collect();
    write_jsonl(dir, "sweep_replicates.jsonl", &per_rep)?;
    #[derive(Serialize)]
    struct Table<'a> {
        rows: &'a [super::experiment::SweepRow],
    }
    write_json(
        dir,
        "summary.json",
        &WithConfig {
            config: cfg,
            body: &Table { rows: &sweep.rows },
        },
    )
}

pub fn write_comparison(dir: &Path, cfg: &ExperimentConfig, cmp: &Comparison) -> Result<()> {
    write_csv(dir, "compare.csv", &cmp.rows)?;
    write_json(
        dir,
        "summary.json",
        &WithConfig {
            config: cfg,
            body: &cmp.summary,
        },
    )
}
