use super::{GroundModel, Partition, UPSet};
use crate::error::{Error, Result};

pub const DEFAULT_ENUMERATION_LIMIT: usize = 12;

/// Bell number by the triangle recurrence.
pub fn bell_number(n: usize) -> u128 {
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for v in &row {
            let last = *next.last().unwrap();
            next.push(last + v);
        }
        row = next;
    }
    row[0]
}

/// Set partitions of the elements of a bit mask, as block masks.
///
/// Walks restricted growth strings in lexicographic order, so every partition
/// appears exactly once.
pub struct MaskPartitions {
    elems: Vec<u32>,
    rgs: Vec<usize>,
    max_blocks: usize,
    done: bool,
}

impl MaskPartitions {
    pub fn new(mask: u64) -> Self {
        Self::with_max_blocks(mask, usize::MAX)
    }

    pub fn with_max_blocks(mask: u64, max_blocks: usize) -> Self {
        let elems: Vec<u32> = (0..64).filter(|i| mask >> i & 1 == 1).collect();
        let n = elems.len();
        MaskPartitions {
            elems,
            rgs: vec![0; n],
            max_blocks: max_blocks.max(1),
            done: false,
        }
    }

    fn advance(&mut self) -> bool {
        let n = self.rgs.len();
        let mut prefix_max = vec![0usize; n];
        for i in 1..n {
            prefix_max[i] = prefix_max[i - 1].max(self.rgs[i - 1]);
        }
        for i in (1..n).rev() {
            let bound = prefix_max[i] + 1;
            if self.rgs[i] < bound && self.rgs[i] + 1 < self.max_blocks {
                self.rgs[i] += 1;
                for x in &mut self.rgs[i + 1..] {
                    *x = 0;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for MaskPartitions {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        if self.done {
            return None;
        }
        let k = self.rgs.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks = vec![0u64; k];
        for (e, &b) in self.elems.iter().zip(&self.rgs) {
            blocks[b] |= 1 << e;
        }
        if !self.advance() {
            self.done = true;
        }
        Some(blocks)
    }
}

/// Every set partition of a finite ground, optionally with at most
/// `max_blocks` blocks.
pub fn enumerate_partitions(
    ground: GroundModel,
    max_blocks: Option<usize>,
    limit: usize,
) -> Result<impl Iterator<Item = Partition>> {
    let n = match ground {
        GroundModel::Finite(n) => n,
        GroundModel::Omega => {
            return Err(Error::UnsupportedGround(
                "partition enumeration needs a finite ground".into(),
            ))
        }
    };
    if n > limit || n > 63 {
        return Err(Error::LimitExceeded { n, limit });
    }
    let full = (1u64 << n) - 1;
    let carrier = ground.full_set();
    Ok(
        MaskPartitions::with_max_blocks(full, max_blocks.unwrap_or(usize::MAX)).map(move |bs| {
            let blocks = bs.into_iter().map(UPSet::from_mask).collect();
            Partition::from_valid(ground, carrier.clone(), blocks, None)
        }),
    )
}
