//! CSV and JSON renderings of traces, classes, distributions and samples.

use std::io::Write;

use serde::Serialize;

use crate::error::{KnotError, Result};
use crate::names::NameTable;
use crate::oracle::Distribution;
use crate::rational::KnotClass;
use crate::sampler::{Comparison, EmpiricalDistribution};
use crate::word::ReductionTrace;

#[derive(Debug, Clone, Serialize)]
pub struct StepRecord {
    pub kind: &'static str,
    pub position: usize,
    pub result: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceRecord {
    pub initial: String,
    pub steps: Vec<StepRecord>,
    #[serde(rename = "final")]
    pub fin: String,
}

impl From<&ReductionTrace> for TraceRecord {
    fn from(t: &ReductionTrace) -> Self {
        TraceRecord {
            initial: t.initial.to_string(),
            steps: t
                .steps
                .iter()
                .map(|s| StepRecord {
                    kind: s.mv.kind_name(),
                    position: s.mv.start(s.from_len),
                    result: s.result.to_string(),
                })
                .collect(),
            fin: t.fin.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KnotClassRecord {
    pub alpha: String,
    pub beta: String,
    pub name: Option<String>,
}

impl KnotClassRecord {
    pub fn new(k: &KnotClass, names: &NameTable) -> Self {
        KnotClassRecord {
            alpha: k.alpha.to_string(),
            beta: k.beta.to_string(),
            name: names.name(k).map(str::to_string),
        }
    }
}

fn csv_err(e: impl std::fmt::Display) -> KnotError {
    KnotError::InvalidArgument(format!("writing CSV: {e}"))
}

/// Header `alpha,beta,name,count,n`, rows sorted by `(alpha, beta)`.
pub fn write_distribution_csv(d: &Distribution, names: &NameTable, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["alpha", "beta", "name", "count", "n"])
        .map_err(csv_err)?;
    for (k, c) in &d.counts {
        w.write_record([
            k.alpha.to_string(),
            k.beta.to_string(),
            names.name(k).unwrap_or("").to_string(),
            c.to_string(),
            d.n.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(csv_err)
}

/// Distribution columns plus `trials,seed,phat,z`. Classes that were never
/// observed appear with count 0.
pub fn write_sample_csv(e: &EmpiricalDistribution, cmp: &Comparison, names: &NameTable, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["alpha", "beta", "name", "count", "n", "trials", "seed", "phat", "z"])
        .map_err(csv_err)?;
    for r in &cmp.rows {
        w.write_record([
            r.knot.alpha.to_string(),
            r.knot.beta.to_string(),
            names.name(&r.knot).unwrap_or("").to_string(),
            r.count.to_string(),
            e.n.to_string(),
            e.trials.to_string(),
            e.seed.to_string(),
            format!("{:.6}", r.phat),
            format!("{:.3}", r.z),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(csv_err)
}
