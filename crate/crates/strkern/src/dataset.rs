//! Corpus ingestion: labeled strings from TSV (`label<TAB>string`) or
//! FASTA (`>id label=0|1` headers, sequence lines concatenated).

use crate::{Error, Result};
use std::path::Path;

/// Input layouts understood by [`ingest`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Tsv,
    Fasta,
}

impl std::str::FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tsv" => Ok(InputFormat::Tsv),
            "fasta" => Ok(InputFormat::Fasta),
            other => Err(Error::InvalidArgument(format!(
                "unknown input format {other:?}, expected tsv or fasta"
            ))),
        }
    }
}

/// One corpus entry: ordinal id, binary class label, raw byte payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusRecord {
    pub id: usize,
    pub label: u8,
    pub payload: Vec<u8>,
}

/// All records plus the observed alphabet (sorted distinct payload bytes).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledDataset {
    records: Vec<CorpusRecord>,
    alphabet: Vec<u8>,
}

impl LabeledDataset {
    fn from_records(records: Vec<CorpusRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut alphabet: Vec<u8> = records
            .iter()
            .flat_map(|r| r.payload.iter().copied())
            .collect();
        alphabet.sort_unstable();
        alphabet.dedup();
        Ok(Self { records, alphabet })
    }

    pub fn records(&self) -> &[CorpusRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn alphabet(&self) -> &[u8] {
        &self.alphabet
    }

    pub fn labels(&self) -> Vec<u8> {
        self.records.iter().map(|r| r.label).collect()
    }

    pub fn payloads(&self) -> Vec<&[u8]> {
        self.records.iter().map(|r| r.payload.as_slice()).collect()
    }

    pub fn positives(&self) -> usize {
        self.records.iter().filter(|r| r.label == 1).count()
    }

    pub fn max_len(&self) -> usize {
        self.records.iter().map(|r| r.payload.len()).max().unwrap_or(0)
    }
}

/// Read and parse a corpus file.
pub fn ingest(path: &Path, format: InputFormat) -> Result<LabeledDataset> {
    let text = std::fs::read_to_string(path)?;
    match format {
        InputFormat::Tsv => from_tsv_str(&text),
        InputFormat::Fasta => from_fasta_str(&text),
    }
}

fn parse_label(s: &str, line: usize) -> Result<u8> {
    match s {
        "0" => Ok(0),
        "1" => Ok(1),
        other => Err(Error::Parse {
            line,
            msg: format!("label must be exactly 0 or 1, got {other:?}"),
        }),
    }
}

/// One record per line: `label<TAB>string`. Blank lines are skipped.
pub fn from_tsv_str(text: &str) -> Result<LabeledDataset> {
    let mut records = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        if raw.is_empty() {
            continue;
        }
        let (label, payload) = raw.split_once('\t').ok_or_else(|| Error::Parse {
            line,
            msg: "expected label<TAB>string".into(),
        })?;
        let label = parse_label(label, line)?;
        if payload.is_empty() {
            return Err(Error::Parse {
                line,
                msg: "empty payload".into(),
            });
        }
        records.push(CorpusRecord {
            id: records.len(),
            label,
            payload: payload.as_bytes().to_vec(),
        });
    }
    LabeledDataset::from_records(records)
}

/// FASTA with a strict two-token header `>id label=0|1`; sequence lines
/// until the next header are concatenated into one payload.
pub fn from_fasta_str(text: &str) -> Result<LabeledDataset> {
    let mut records: Vec<CorpusRecord> = Vec::new();
    let mut open: Option<(usize, u8, Vec<u8>)> = None; // header line, label, payload

    fn close(open: Option<(usize, u8, Vec<u8>)>, records: &mut Vec<CorpusRecord>) -> Result<()> {
        if let Some((header_line, label, payload)) = open {
            if payload.is_empty() {
                return Err(Error::Parse {
                    line: header_line,
                    msg: "record has no sequence lines".into(),
                });
            }
            records.push(CorpusRecord {
                id: records.len(),
                label,
                payload,
            });
        }
        Ok(())
    }

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        if raw.is_empty() {
            continue;
        }
        if let Some(header) = raw.strip_prefix('>') {
            close(open.take(), &mut records)?;
            let tokens: Vec<&str> = header.split_whitespace().collect();
            if tokens.len() != 2 || tokens[0].is_empty() {
                return Err(Error::Parse {
                    line,
                    msg: "header must be exactly `>id label=0|1`".into(),
                });
            }
            let label = tokens[1].strip_prefix("label=").ok_or_else(|| Error::Parse {
                line,
                msg: format!("expected label=0|1, got {:?}", tokens[1]),
            })?;
            let label = parse_label(label, line)?;
            open = Some((line, label, Vec::new()));
        } else {
            match open.as_mut() {
                Some((_, _, payload)) => payload.extend_from_slice(raw.trim_end().as_bytes()),
                None => {
                    return Err(Error::Parse {
                        line,
                        msg: "sequence line before any header".into(),
                    })
                }
            }
        }
    }
    close(open, &mut records)?;
    LabeledDataset::from_records(records)
}
