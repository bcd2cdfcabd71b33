//! Text formats: scored pairs, raw pair costs, cluster labels.
//!
//! All formats are comma-separated UTF-8 with one record per line. Blank
//! lines and lines starting with `#` are ignored. A line holding a single id
//! declares an observation without pairs.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use thiserror::Error;

use crate::colgen::Clustering;
use crate::error::InstanceError;
use crate::instance::{Instance, ObsId};
use crate::metrics::LabeledPartition;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: pair ({a}, {b}) given more than once")]
    DuplicatePair { line: usize, a: String, b: String },
    #[error("line {line}: probability {value} outside [0, 1]")]
    ProbabilityOutOfRange { line: usize, value: f64 },
    #[error("line {line}: unknown id `{id}`")]
    UnknownId { line: usize, id: String },
    #[error("no label for id `{0}`")]
    MissingLabel(String),
}

/// External string ids of the observations, in first-appearance order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdTable {
    names: Vec<String>,
    index: HashMap<String, ObsId>,
}

impl IdTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// `o0, o1, ...`
    pub fn numbered(n: usize) -> Self {
        let mut t = Self::new();
        for i in 0..n {
            t.intern(&format!("o{i}"));
        }
        t
    }

    pub fn intern(&mut self, name: &str) -> ObsId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn get(&self, name: &str) -> Option<ObsId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: ObsId) -> &str {
        &self.names[id]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

fn open(path: &Path) -> Result<BufReader<File>, IngestError> {
    File::open(path).map(BufReader::new).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn io_err(source: std::io::Error) -> IngestError {
    IngestError::Io { path: "<stream>".into(), source }
}

/// Non-blank, non-comment lines with their 1-based numbers, split on commas.
fn records<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, Vec<String>), IngestError>> {
    reader.lines().enumerate().filter_map(|(i, line)| match line {
        Err(e) => Some(Err(io_err(e))),
        Ok(line) => {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                None
            } else {
                Some(Ok((i + 1, trimmed.split(',').map(|f| f.trim().to_string()).collect())))
            }
        }
    })
}

#[derive(Clone, Copy)]
enum Value {
    Probability { bias: f64 },
    Theta,
}

fn read_weighted<R: BufRead>(reader: R, value: Value) -> Result<(Instance, IdTable), IngestError> {
    let mut ids = IdTable::new();
    let mut triples: Vec<(ObsId, ObsId, f64, usize)> = Vec::new();
    let mut first = true;
    for rec in records(reader) {
        let (line, fields) = rec?;
        let is_first = std::mem::replace(&mut first, false);
        match fields.as_slice() {
            [id] if !id.is_empty() => {
                ids.intern(id);
            }
            [a, b, v] => {
                let parsed: Result<f64, _> = v.parse();
                let x = match parsed {
                    Ok(x) => x,
                    Err(_) if is_first => continue,
                    Err(_) => {
                        return Err(IngestError::Parse { line, message: format!("`{v}` is not a number") })
                    }
                };
                if a.is_empty() || b.is_empty() {
                    return Err(IngestError::Parse { line, message: "empty id".into() });
                }
                if a == b {
                    return Err(IngestError::Parse { line, message: format!("self pair on `{a}`") });
                }
                let theta = match value {
                    Value::Probability { bias } => {
                        if !(0.0..=1.0).contains(&x) {
                            return Err(IngestError::ProbabilityOutOfRange { line, value: x });
                        }
                        bias - x
                    }
                    Value::Theta => {
                        if !x.is_finite() {
                            return Err(IngestError::Parse { line, message: "cost must be finite".into() });
                        }
                        x
                    }
                };
                let ia = ids.intern(a);
                let ib = ids.intern(b);
                triples.push((ia, ib, theta, line));
            }
            _ => {
                return Err(IngestError::Parse {
                    line,
                    message: format!("expected `id,id,value`, got {} fields", fields.len()),
                })
            }
        }
    }
    let mut instance = Instance::new(ids.len());
    for (a, b, theta, line) in triples {
        instance.insert_pair(a, b, theta).map_err(|e| match e {
            InstanceError::DuplicatePair { .. } => IngestError::DuplicatePair {
                line,
                a: ids.name(a).to_string(),
                b: ids.name(b).to_string(),
            },
            other => IngestError::Parse { line, message: other.to_string() },
        })?;
    }
    Ok((instance, ids))
}

/// Reads `id1,id2,p` records; `theta = bias - p`.
pub fn read_pairs<R: BufRead>(reader: R, bias: f64) -> Result<(Instance, IdTable), IngestError> {
    read_weighted(reader, Value::Probability { bias })
}

pub fn ingest_pairs(path: &Path, bias: f64) -> Result<(Instance, IdTable), IngestError> {
    read_pairs(open(path)?, bias)
}

/// Reads `id1,id2,theta` records.
pub fn read_theta<R: BufRead>(reader: R) -> Result<(Instance, IdTable), IngestError> {
    read_weighted(reader, Value::Theta)
}

pub fn ingest_theta(path: &Path) -> Result<(Instance, IdTable), IngestError> {
    read_theta(open(path)?)
}

/// Reads `id,label` records covering every id of `ids`. A first line whose
/// id is literally `id` is taken as a header.
pub fn read_truth<R: BufRead>(reader: R, ids: &IdTable) -> Result<LabeledPartition, IngestError> {
    let mut labels: Vec<Option<String>> = vec![None; ids.len()];
    let mut first = true;
    for rec in records(reader) {
        let (line, fields) = rec?;
        let is_first = std::mem::replace(&mut first, false);
        let [id, label] = fields.as_slice() else {
            return Err(IngestError::Parse {
                line,
                message: format!("expected `id,label`, got {} fields", fields.len()),
            });
        };
        if is_first && id.eq_ignore_ascii_case("id") && ids.get(id).is_none() {
            continue;
        }
        let Some(d) = ids.get(id) else {
            return Err(IngestError::UnknownId { line, id: id.clone() });
        };
        if labels[d].replace(label.clone()).is_some() {
            return Err(IngestError::Parse { line, message: format!("id `{id}` labeled twice") });
        }
    }
    let labels: Vec<String> = labels
        .into_iter()
        .enumerate()
        .map(|(d, l)| l.ok_or_else(|| IngestError::MissingLabel(ids.name(d).to_string())))
        .collect::<Result<_, _>>()?;
    Ok(LabeledPartition::from_labels(&labels))
}

pub fn ingest_truth(path: &Path, ids: &IdTable) -> Result<LabeledPartition, IngestError> {
    read_truth(open(path)?, ids)
}

/// Reads `id,label` records, interning ids in order of appearance.
pub fn read_labels<R: BufRead>(reader: R) -> Result<(IdTable, LabeledPartition), IngestError> {
    let mut ids = IdTable::new();
    let mut labels: Vec<String> = Vec::new();
    let mut first = true;
    for rec in records(reader) {
        let (line, fields) = rec?;
        let is_first = std::mem::replace(&mut first, false);
        let [id, label] = fields.as_slice() else {
            return Err(IngestError::Parse {
                line,
                message: format!("expected `id,label`, got {} fields", fields.len()),
            });
        };
        if is_first && id.eq_ignore_ascii_case("id") {
            continue;
        }
        if ids.get(id).is_some() {
            return Err(IngestError::Parse { line, message: format!("id `{id}` labeled twice") });
        }
        ids.intern(id);
        labels.push(label.clone());
    }
    Ok((ids, LabeledPartition::from_labels(&labels)))
}

pub fn ingest_labels(path: &Path) -> Result<(IdTable, LabeledPartition), IngestError> {
    read_labels(open(path)?)
}

/// Writes `id1,id2,p` with `p = bias - theta`, pairs in id order, after a
/// declaration line for every observation.
pub fn write_pairs<W: Write>(mut w: W, instance: &Instance, ids: &IdTable, bias: f64) -> std::io::Result<()> {
    write_declarations(&mut w, ids)?;
    for (a, b, theta) in sorted_pairs(instance) {
        writeln!(w, "{},{},{}", ids.name(a), ids.name(b), bias - theta)?;
    }
    Ok(())
}

/// Writes `id1,id2,theta`; reading it back gives the same instance exactly.
pub fn write_theta<W: Write>(mut w: W, instance: &Instance, ids: &IdTable) -> std::io::Result<()> {
    write_declarations(&mut w, ids)?;
    for (a, b, theta) in sorted_pairs(instance) {
        writeln!(w, "{},{},{}", ids.name(a), ids.name(b), theta)?;
    }
    Ok(())
}

fn write_declarations<W: Write>(w: &mut W, ids: &IdTable) -> std::io::Result<()> {
    for d in 0..ids.len() {
        writeln!(w, "{}", ids.name(d))?;
    }
    Ok(())
}

fn sorted_pairs(instance: &Instance) -> Vec<(ObsId, ObsId, f64)> {
    let mut pairs: Vec<_> = instance.pairs().map(|(a, b, t)| (a.min(b), a.max(b), t)).collect();
    pairs.sort_by_key(|&(a, b, _)| (a, b));
    pairs
}

/// `id,cluster_label` for every observation in id order, with a header.
pub fn write_clusters<W: Write>(mut w: W, clustering: &Clustering, ids: &IdTable) -> std::io::Result<()> {
    writeln!(w, "id,cluster_label")?;
    for (d, label) in clustering.labels().into_iter().enumerate() {
        writeln!(w, "{},{}", ids.name(d), label)?;
    }
    Ok(())
}

/// `id,cluster_label` from a label per observation.
pub fn write_labels<W: Write>(mut w: W, labels: &[usize], ids: &IdTable) -> std::io::Result<()> {
    writeln!(w, "id,cluster_label")?;
    for (d, label) in labels.iter().enumerate() {
        writeln!(w, "{},{}", ids.name(d), label)?;
    }
    Ok(())
}
