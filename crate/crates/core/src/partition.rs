//! Splitting the coordinates of `G^d` into a constrained block `g*` and a free block `g_*`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coordinates `{0..d}` split into `constrained` (the `g*` block, `d - m` of them)
/// and `free` (the `g_*` block, `m` of them). Coordinates are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PartitionJson", into = "PartitionJson")]
pub struct Partition {
    d: usize,
    constrained: Vec<usize>,
    free: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartitionJson {
    d: usize,
    free: Vec<usize>,
}

impl TryFrom<PartitionJson> for Partition {
    type Error = Error;

    fn try_from(p: PartitionJson) -> Result<Self> {
        Partition::new(p.d, &p.free)
    }
}

impl From<Partition> for PartitionJson {
    fn from(p: Partition) -> Self {
        PartitionJson { d: p.d, free: p.free }
    }
}

impl Partition {
    /// `free` lists the `g_*` coordinates; at least one coordinate must stay constrained.
    pub fn new(d: usize, free: &[usize]) -> Result<Self> {
        let mut sorted = free.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != free.len() {
            return Err(Error::Malformed("repeated coordinate in partition".into()));
        }
        if let Some(&j) = sorted.iter().find(|&&j| j >= d) {
            return Err(Error::Malformed(format!("coordinate {j} out of range for d = {d}")));
        }
        if sorted.len() + 1 > d {
            return Err(Error::Malformed(format!(
                "m = {} free coordinates leave nothing constrained in d = {d}",
                sorted.len()
            )));
        }
        let constrained = (0..d).filter(|j| !sorted.contains(j)).collect();
        Ok(Partition {
            d,
            constrained,
            free: sorted,
        })
    }

    /// The partition whose last `m` coordinates are free.
    pub fn trailing(d: usize, m: usize) -> Result<Self> {
        Partition::new(d, &(d.saturating_sub(m)..d).collect::<Vec<_>>())
    }

    /// No free coordinates.
    pub fn full(d: usize) -> Self {
        Partition::new(d, &[]).expect("d >= 1")
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// `m`, the number of free coordinates.
    pub fn m(&self) -> usize {
        self.free.len()
    }

    pub fn constrained(&self) -> &[usize] {
        &self.constrained
    }

    pub fn free(&self) -> &[usize] {
        &self.free
    }

    pub fn is_free(&self, j: usize) -> bool {
        self.free.contains(&j)
    }
}
