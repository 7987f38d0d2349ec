//! Sparse nonnegative feature vectors shared by both embedding backends.

use crate::{Error, Result};
use std::collections::BTreeMap;

/// Sparse vector over feature ids `0..dim` with strictly positive values.
///
/// Entries are kept sorted by ascending index, which makes every downstream
/// reduction (L1 distances, Fourier projections) bit-deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicVector {
    entries: Vec<(u64, f64)>,
    dim: u64,
}

impl CharacteristicVector {
    /// Build from entries already sorted by strictly ascending index.
    pub fn from_sorted(entries: Vec<(u64, f64)>, dim: u64) -> Result<Self> {
        for (k, &(idx, val)) in entries.iter().enumerate() {
            if idx >= dim {
                return Err(Error::IndexOutOfRange { index: idx, dim });
            }
            if k > 0 && entries[k - 1].0 >= idx {
                return Err(Error::InvalidArgument(format!(
                    "indices not strictly ascending at entry {k}"
                )));
            }
            if !(val > 0.0) || !val.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "value {val} at index {idx} must be positive and finite"
                )));
            }
        }
        Ok(Self { entries, dim })
    }

    /// Count occurrences of each id in `ids`.
    pub fn from_counts<I: IntoIterator<Item = u64>>(ids: I, dim: u64) -> Result<Self> {
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for id in ids {
            *counts.entry(id).or_insert(0) += 1;
        }
        Self::from_sorted(
            counts.into_iter().map(|(i, c)| (i, c as f64)).collect(),
            dim,
        )
    }

    pub fn dim(&self) -> u64 {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(u64, f64)] {
        &self.entries
    }

    /// Value at `idx`, zero when absent.
    pub fn value(&self, idx: u64) -> f64 {
        match self.entries.binary_search_by_key(&idx, |e| e.0) {
            Ok(k) => self.entries[k].1,
            Err(_) => 0.0,
        }
    }

    /// Sum of all stored values.
    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }
}
