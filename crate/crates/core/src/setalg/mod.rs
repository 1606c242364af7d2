//! Ground sets, finitely described subsets, partitions and refinement.
//!
//! Sets on `ℕ` are ultimately periodic ([`UPSet`]); sets on a finite ground
//! `{0, .., n-1}` use the same type restricted to elements below `n`.
//! Countable partitions are limited to a finite list of explicit blocks plus
//! an optional tail of singletons. Engines quantifying over partitions say
//! which of these shapes they use.

mod enumerate;
mod partition;
mod upset;

use serde::{Deserialize, Serialize};

pub use enumerate::{bell_number, enumerate_partitions, MaskPartitions, DEFAULT_ENUMERATION_LIMIT};
pub use partition::{Partition, SplitStrategy, TaggedPartition};
pub use upset::UPSet;

use crate::error::{Error, Result};

/// The ground set `T`; the σ-algebra is always the full power set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroundModel {
    /// `{0, .., n-1}` with `n >= 1`.
    Finite(usize),
    /// The naturals.
    Omega,
}

impl GroundModel {
    pub fn finite(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec("finite ground needs n >= 1".into()));
        }
        Ok(GroundModel::Finite(n))
    }

    pub fn full_set(&self) -> UPSet {
        match *self {
            GroundModel::Finite(n) => UPSet::range(0, n),
            GroundModel::Omega => UPSet::all(),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, GroundModel::Finite(_))
    }

    /// Number of elements of a finite ground.
    pub fn size(&self) -> Option<usize> {
        match *self {
            GroundModel::Finite(n) => Some(n),
            GroundModel::Omega => None,
        }
    }

    pub fn contains_set(&self, a: &UPSet) -> bool {
        match *self {
            GroundModel::Finite(n) => a.is_finite() && a.prefix_len() <= n,
            GroundModel::Omega => true,
        }
    }

    pub fn check(&self, a: &UPSet) -> Result<()> {
        if self.contains_set(a) {
            Ok(())
        } else {
            Err(Error::GroundMismatch(format!(
                "{a} is not a subset of {self}"
            )))
        }
    }

    pub fn complement(&self, a: &UPSet) -> UPSet {
        self.full_set().difference(a)
    }

    pub fn same_as(&self, other: &GroundModel) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GroundMismatch(format!("{self} vs {other}")))
        }
    }
}

impl std::fmt::Display for GroundModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GroundModel::Finite(n) => write!(f, "finite({n})"),
            GroundModel::Omega => f.write_str("omega"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_ground_requires_an_element() {
        assert!(GroundModel::finite(0).is_err());
        assert_eq!(
            GroundModel::finite(3).unwrap().full_set().cardinality(),
            Some(3)
        );
    }

    #[test]
    fn membership_check() {
        let g = GroundModel::Finite(3);
        assert!(g.check(&UPSet::from_elements([0, 2])).is_ok());
        assert!(g.check(&UPSet::from_elements([3])).is_err());
        assert!(g.check(&UPSet::evens()).is_err());
        assert!(GroundModel::Omega.check(&UPSet::evens()).is_ok());
        assert_eq!(
            g.complement(&UPSet::from_elements([1])),
            UPSet::from_elements([0, 2])
        );
    }
}
