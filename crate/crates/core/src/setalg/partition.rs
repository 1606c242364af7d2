use serde::{Deserialize, Serialize};

use super::{GroundModel, UPSet};
use crate::error::{Error, Result};

/// A partition of a carrier set `A ⊆ T` (usually `A = T`).
///
/// Explicit blocks are non-empty, pairwise disjoint and sorted by their
/// minimum element. The optional tail `D` contributes the block `{d}` for each
/// `d ∈ D`; it is only kept when `D` is infinite, and then it absorbs every
/// explicit singleton so that equal partitions compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    ground: GroundModel,
    carrier: UPSet,
    blocks: Vec<UPSet>,
    tail: Option<UPSet>,
}

/// Ways of refining one block of a partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitStrategy {
    /// Split a block of period `p` by residues modulo `k·p`.
    ByResidue(usize),
    /// Split off the `j` smallest elements of a block.
    SplitOffFinite(usize),
    /// Split an infinite block into `k` infinite pieces by element index.
    IntoKInfinite(usize),
}

impl Partition {
    /// A finite partition of the whole ground.
    pub fn new(ground: GroundModel, blocks: Vec<UPSet>) -> Result<Self> {
        Self::of_set(ground, ground.full_set(), blocks)
    }

    /// A finite partition of `carrier`.
    pub fn of_set(ground: GroundModel, carrier: UPSet, blocks: Vec<UPSet>) -> Result<Self> {
        let union = Self::validate_blocks(&ground, &carrier, &blocks)?;
        if union != carrier {
            return Err(Error::InvalidSpec(format!(
                "blocks cover {union}, expected {carrier}"
            )));
        }
        Ok(Self::from_valid(ground, carrier, blocks, None))
    }

    /// Explicit blocks plus the singletons of everything they leave uncovered.
    pub fn with_singleton_tail(
        ground: GroundModel,
        carrier: UPSet,
        blocks: Vec<UPSet>,
    ) -> Result<Self> {
        let union = Self::validate_blocks(&ground, &carrier, &blocks)?;
        let rest = carrier.difference(&union);
        Ok(Self::from_valid(ground, carrier, blocks, Some(rest)))
    }

    /// `{A}`; the empty carrier has the empty partition.
    pub fn trivial(ground: GroundModel, carrier: UPSet) -> Result<Self> {
        ground.check(&carrier)?;
        let blocks = if carrier.is_empty() {
            Vec::new()
        } else {
            vec![carrier.clone()]
        };
        Ok(Self::from_valid(ground, carrier, blocks, None))
    }

    /// The all-singletons partition of `carrier`.
    pub fn singletons(ground: GroundModel, carrier: UPSet) -> Result<Self> {
        ground.check(&carrier)?;
        Ok(Self::from_valid(
            ground,
            carrier.clone(),
            Vec::new(),
            Some(carrier),
        ))
    }

    fn validate_blocks(ground: &GroundModel, carrier: &UPSet, blocks: &[UPSet]) -> Result<UPSet> {
        ground.check(carrier)?;
        let mut union = UPSet::empty();
        for b in blocks {
            if b.is_empty() {
                return Err(Error::InvalidSpec("partition block is empty".into()));
            }
            if !b.is_subset(carrier) {
                return Err(Error::InvalidSpec(format!("block {b} leaves the carrier")));
            }
            if !b.is_disjoint(&union) {
                return Err(Error::InvalidSpec(format!(
                    "block {b} overlaps another block"
                )));
            }
            union = union.union(b);
        }
        Ok(union)
    }

    /// Canonicalizes blocks that are already known to be valid.
    pub(crate) fn from_valid(
        ground: GroundModel,
        carrier: UPSet,
        mut blocks: Vec<UPSet>,
        tail: Option<UPSet>,
    ) -> Self {
        let tail = match tail {
            Some(d) if d.is_empty() => None,
            Some(d) if d.is_finite() => {
                blocks.extend(d.iter().map(UPSet::singleton));
                None
            }
            Some(mut d) => {
                blocks.retain(|b| match b.cardinality() {
                    Some(1) => {
                        d = d.union(b);
                        false
                    }
                    _ => true,
                });
                Some(d)
            }
            None => None,
        };
        blocks.sort_by_key(|b| b.min_element());
        Partition {
            ground,
            carrier,
            blocks,
            tail,
        }
    }

    pub fn ground(&self) -> GroundModel {
        self.ground
    }

    pub fn carrier(&self) -> &UPSet {
        &self.carrier
    }

    pub fn blocks(&self) -> &[UPSet] {
        &self.blocks
    }

    pub fn tail(&self) -> Option<&UPSet> {
        self.tail.as_ref()
    }

    pub fn is_finite(&self) -> bool {
        self.tail.is_none()
    }

    /// Number of blocks of a finite partition.
    pub fn block_count(&self) -> Option<usize> {
        self.is_finite().then_some(self.blocks.len())
    }

    /// Index of the explicit block holding `n`.
    pub fn block_index_of(&self, n: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(n))
    }

    /// `P ∧ Q`: all non-empty intersections of blocks; tails merge.
    pub fn common_refinement(&self, other: &Partition) -> Result<Partition> {
        self.ground.same_as(&other.ground)?;
        if self.carrier != other.carrier {
            return Err(Error::GroundMismatch(format!(
                "partitions of different sets: {} vs {}",
                self.carrier, other.carrier
            )));
        }
        let mut blocks = Vec::new();
        for a in &self.blocks {
            for b in &other.blocks {
                let c = a.intersection(b);
                if !c.is_empty() {
                    blocks.push(c);
                }
            }
        }
        let tail = match (&self.tail, &other.tail) {
            (None, None) => None,
            (Some(d), None) | (None, Some(d)) => Some(d.clone()),
            (Some(d1), Some(d2)) => Some(d1.union(d2)),
        };
        Ok(Self::from_valid(
            self.ground,
            self.carrier.clone(),
            blocks,
            tail,
        ))
    }

    /// `self ≥ coarse`: every block of `self` lies inside a block of `coarse`.
    pub fn is_refinement_of(&self, coarse: &Partition) -> bool {
        if self.ground != coarse.ground || self.carrier != coarse.carrier {
            return false;
        }
        self.blocks.iter().all(|b| {
            let Some(m) = b.min_element() else {
                return true;
            };
            if let Some(i) = coarse.block_index_of(m) {
                return b.is_subset(&coarse.blocks[i]);
            }
            // m lies in a tail singleton of `coarse`
            b.cardinality() == Some(1)
        })
    }

    /// Pieces of one block under `strategy`, if it splits into at least two.
    pub fn split_block_pieces(block: &UPSet, strategy: SplitStrategy) -> Option<Vec<UPSet>> {
        let pieces = match strategy {
            SplitStrategy::ByResidue(k) => {
                if k < 2 {
                    return None;
                }
                let (n, p) = (block.prefix_len(), block.period());
                let modulus = k * p;
                let mut pieces: Vec<(Vec<bool>, bool)> = vec![(vec![false; n], false); modulus];
                for x in (0..n).filter(|&x| block.contains(x)) {
                    pieces[x % modulus].0[x] = true;
                }
                for (r, piece) in pieces.iter_mut().enumerate() {
                    piece.1 = block.pattern()[r % p];
                }
                pieces
                    .into_iter()
                    .enumerate()
                    .filter(|(_, (pre, tail))| *tail || pre.contains(&true))
                    .map(|(r, (pre, tail))| {
                        if tail {
                            let mut pattern = vec![false; modulus];
                            pattern[r] = true;
                            UPSet::from_parts(pre, pattern)
                        } else {
                            UPSet::from_parts(pre, vec![false])
                        }
                    })
                    .collect::<Vec<_>>()
            }
            SplitStrategy::SplitOffFinite(j) => {
                if j == 0 {
                    return None;
                }
                if let Some(c) = block.cardinality() {
                    if c <= j {
                        return None;
                    }
                }
                let head = UPSet::from_elements(block.first_k(j));
                let rest = block.difference(&head);
                vec![head, rest]
            }
            SplitStrategy::IntoKInfinite(k) => {
                if k < 2 || block.is_finite() {
                    return None;
                }
                block.split_by_index(k)
            }
        };
        (pieces.len() >= 2).then_some(pieces)
    }

    /// Replaces block `index` by `pieces`, which must partition it.
    pub(crate) fn replace_block(&self, index: usize, pieces: Vec<UPSet>) -> Partition {
        let mut blocks = self.blocks.clone();
        blocks.remove(index);
        blocks.extend(pieces);
        Self::from_valid(self.ground, self.carrier.clone(), blocks, self.tail.clone())
    }

    /// One refinement per block that admits `strategy`.
    pub fn split_moves(&self, strategy: SplitStrategy) -> Result<Vec<Partition>> {
        let moves: Vec<Partition> = self
            .blocks
            .iter()
            .enumerate()
            .filter_map(|(i, b)| {
                Self::split_block_pieces(b, strategy).map(|pieces| self.replace_block(i, pieces))
            })
            .collect();
        if moves.is_empty() {
            return Err(Error::NotApplicable(format!(
                "{strategy:?} applies to no block"
            )));
        }
        Ok(moves)
    }

    /// Tags each explicit block with its minimum element.
    pub fn with_min_tags(self) -> TaggedPartition {
        let tags = self
            .blocks
            .iter()
            .map(|b| b.min_element().expect("blocks are non-empty"))
            .collect();
        TaggedPartition {
            partition: self,
            tags,
        }
    }

    pub fn to_json(&self) -> PartitionJson {
        PartitionJson {
            carrier: self.carrier.to_string(),
            blocks: self.blocks.iter().map(|b| b.to_string()).collect(),
            tail: self.tail.as_ref().map(|d| d.to_string()),
        }
    }
}

/// Serialized partition: set literals for the carrier, blocks and tail.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionJson {
    pub carrier: String,
    pub blocks: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<String>,
}

/// A partition with one tag per explicit block; tail singletons are tagged
/// by their own element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaggedPartition {
    partition: Partition,
    tags: Vec<usize>,
}

impl TaggedPartition {
    pub fn new(partition: Partition, tags: Vec<usize>) -> Result<Self> {
        if tags.len() != partition.blocks.len() {
            return Err(Error::InvalidSpec(format!(
                "{} tags for {} blocks",
                tags.len(),
                partition.blocks.len()
            )));
        }
        for (b, &t) in partition.blocks.iter().zip(&tags) {
            if !b.contains(t) {
                return Err(Error::InvalidSpec(format!("tag {t} is not in block {b}")));
            }
        }
        Ok(TaggedPartition { partition, tags })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn tags(&self) -> &[usize] {
        &self.tags
    }

    /// Explicit blocks paired with their tags.
    pub fn tagged_blocks(&self) -> impl Iterator<Item = (&UPSet, usize)> {
        self.partition.blocks.iter().zip(self.tags.iter().copied())
    }
}
