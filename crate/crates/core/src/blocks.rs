//! Splitting a dataset into equal-size disjoint blocks.

use std::ops::Range;

use crate::data::{Dataset, Sample};
use crate::error::{Error, Result};

/// m disjoint contiguous index blocks of common size N = ⌊n/m⌋.
///
/// Blocks are contiguous in input order; the trailing n − m·N indices are
/// discarded. For i.i.d. data any fixed assignment is equivalent in law, and
/// contiguity keeps runs reproducible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    m: usize,
    block_size: usize,
}

impl BlockPartition {
    pub fn block_count(&self) -> usize {
        self.m
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    /// Index range of block `j`, 0-based.
    pub fn block_range(&self, j: usize) -> Range<usize> {
        assert!(j < self.m, "block index out of range");
        j * self.block_size..(j + 1) * self.block_size
    }

    pub fn ranges(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        (0..self.m).map(|j| self.block_range(j))
    }

    /// Borrow the samples of block `j` from a dataset this partition was
    /// built for.
    pub fn block_slice<'a>(&self, dataset: &'a Dataset, j: usize) -> &'a [Sample] {
        &dataset.samples()[self.block_range(j)]
    }

    /// Number of indices kept across all blocks (m·⌊n/m⌋).
    pub fn used(&self) -> usize {
        self.m * self.block_size
    }
}

/// Split `n` indices into `m` blocks of size ⌊n/m⌋ each.
pub fn split_blocks(n: usize, m: usize) -> Result<BlockPartition> {
    if m == 0 {
        return Err(Error::invalid("block count must be at least 1"));
    }
    if m > n {
        return Err(Error::invalid(format!(
            "block count {m} exceeds sample count {n}"
        )));
    }
    Ok(BlockPartition {
        m,
        block_size: n / m,
    })
}
