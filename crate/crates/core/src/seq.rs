//! Eventually periodic rational sequences on ℕ.

use num::{Signed, Zero};

use crate::exact::{lcm, Q};
use crate::setalg::UPSet;

/// `a(n) = prefix[n]` for `n < prefix.len()`, otherwise `cycle[n % cycle.len()]`.
///
/// An empty cycle means the sequence is zero past the prefix. The cycle is
/// indexed by the absolute position `n`, like [`UPSet`] patterns, so
/// pointwise operations line up without shifting.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EPSeq {
    prefix: Vec<Q>,
    cycle: Vec<Q>,
}

impl EPSeq {
    pub fn new(mut prefix: Vec<Q>, mut cycle: Vec<Q>) -> Self {
        if cycle.iter().all(Zero::is_zero) {
            cycle.clear();
        } else {
            let p = cycle.len();
            let d = (1..=p)
                .filter(|d| p % d == 0)
                .find(|&d| (d..p).all(|i| cycle[i] == cycle[i % d]))
                .unwrap_or(p);
            cycle.truncate(d);
        }
        while let Some(last) = prefix.last() {
            let n = prefix.len() - 1;
            let tail = if cycle.is_empty() {
                Q::zero()
            } else {
                cycle[n % cycle.len()].clone()
            };
            if *last == tail {
                prefix.pop();
            } else {
                break;
            }
        }
        EPSeq { prefix, cycle }
    }

    pub fn finite(values: Vec<Q>) -> Self {
        Self::new(values, Vec::new())
    }

    pub fn constant(c: Q) -> Self {
        Self::new(Vec::new(), vec![c])
    }

    pub fn zero() -> Self {
        Self::new(Vec::new(), Vec::new())
    }

    pub fn indicator(a: &UPSet) -> Self {
        let one = || Q::from_integer(1.into());
        let b = |x: bool| if x { one() } else { Q::zero() };
        Self::new(
            a.prefix_bits().iter().map(|&x| b(x)).collect(),
            a.pattern().iter().map(|&x| b(x)).collect(),
        )
    }

    pub fn at(&self, n: usize) -> Q {
        if n < self.prefix.len() {
            self.prefix[n].clone()
        } else if self.cycle.is_empty() {
            Q::zero()
        } else {
            self.cycle[n % self.cycle.len()].clone()
        }
    }

    pub fn prefix(&self) -> &[Q] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[Q] {
        &self.cycle
    }

    pub fn start(&self) -> usize {
        self.prefix.len()
    }

    pub fn period(&self) -> usize {
        self.cycle.len().max(1)
    }

    pub fn is_zero(&self) -> bool {
        self.prefix.is_empty() && self.cycle.is_empty()
    }

    /// Zero from some point on.
    pub fn is_finitely_supported(&self) -> bool {
        self.cycle.is_empty()
    }

    pub fn sup_abs(&self) -> Q {
        self.prefix
            .iter()
            .chain(&self.cycle)
            .map(Signed::abs)
            .max()
            .unwrap_or_else(Q::zero)
    }

    pub fn support(&self) -> UPSet {
        let pattern = if self.cycle.is_empty() {
            vec![false]
        } else {
            self.cycle.iter().map(|x| !x.is_zero()).collect()
        };
        UPSet::from_parts(self.prefix.iter().map(|x| !x.is_zero()).collect(), pattern)
    }

    pub fn map(&self, f: impl Fn(&Q) -> Q) -> EPSeq {
        let zero_img = f(&Q::zero());
        let cycle = if self.cycle.is_empty() {
            vec![zero_img]
        } else {
            self.cycle.iter().map(&f).collect()
        };
        EPSeq::new(self.prefix.iter().map(&f).collect(), cycle)
    }

    pub fn zip_with(&self, other: &EPSeq, f: impl Fn(&Q, &Q) -> Q) -> EPSeq {
        let n = self.start().max(other.start());
        let p = lcm(self.period(), other.period());
        let prefix = (0..n).map(|i| f(&self.at(i), &other.at(i))).collect();
        // absolute indexing: position j of the cycle stands for every n ≡ j (mod p), n >= n0
        let cycle = (0..p)
            .map(|j| {
                let x = n + (j + p - n % p) % p;
                f(&self.at(x), &other.at(x))
            })
            .collect();
        EPSeq::new(prefix, cycle)
    }

    pub fn abs(&self) -> EPSeq {
        self.map(Signed::abs)
    }

    pub fn mul_indicator(&self, a: &UPSet) -> EPSeq {
        self.zip_with(&EPSeq::indicator(a), |x, y| x * y)
    }
}
