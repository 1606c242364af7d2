use std::fmt;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::exact::lcm;

/// An ultimately periodic subset of ℕ.
///
/// Membership of `n < prefix_len` is read from the prefix bits; membership of
/// `n >= prefix_len` is `pattern[n % period]`. The representation is kept in
/// canonical form (minimal period first, then minimal prefix), so two values
/// are equal exactly when they describe the same set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UPSet {
    prefix: Vec<bool>,
    pattern: Vec<bool>,
}

impl UPSet {
    /// Builds the set with the given prefix bits, period and residues.
    pub fn new(prefix: Vec<bool>, period: usize, residues: &[usize]) -> Result<Self> {
        if period == 0 {
            return Err(Error::InvalidSpec("period must be at least 1".into()));
        }
        let mut pattern = vec![false; period];
        for &r in residues {
            if r >= period {
                return Err(Error::InvalidSpec(format!(
                    "residue {r} out of range for period {period}"
                )));
            }
            pattern[r] = true;
        }
        Ok(Self::from_parts(prefix, pattern))
    }

    /// Canonicalizes a prefix and a non-empty residue pattern.
    pub fn from_parts(mut prefix: Vec<bool>, mut pattern: Vec<bool>) -> Self {
        assert!(!pattern.is_empty(), "empty residue pattern");
        let p = pattern.len();
        let d = (1..=p)
            .filter(|d| p % d == 0)
            .find(|&d| (d..p).all(|i| pattern[i] == pattern[i % d]))
            .unwrap_or(p);
        pattern.truncate(d);
        while let Some(&last) = prefix.last() {
            let n = prefix.len() - 1;
            if last == pattern[n % d] {
                prefix.pop();
            } else {
                break;
            }
        }
        UPSet { prefix, pattern }
    }

    pub fn empty() -> Self {
        UPSet {
            prefix: Vec::new(),
            pattern: vec![false],
        }
    }

    pub fn all() -> Self {
        UPSet {
            prefix: Vec::new(),
            pattern: vec![true],
        }
    }

    pub fn evens() -> Self {
        Self::residue_class(2, 0)
    }

    pub fn odds() -> Self {
        Self::residue_class(2, 1)
    }

    /// `{n : n ≡ r (mod modulus)}`.
    pub fn residue_class(modulus: usize, r: usize) -> Self {
        assert!(modulus >= 1 && r < modulus);
        let mut pattern = vec![false; modulus];
        pattern[r] = true;
        Self::from_parts(Vec::new(), pattern)
    }

    /// `[k, ∞)`.
    pub fn tail(k: usize) -> Self {
        Self::from_parts(vec![false; k], vec![true])
    }

    /// `[a, b)`.
    pub fn range(a: usize, b: usize) -> Self {
        let mut prefix = vec![false; b.max(a)];
        for bit in prefix.iter_mut().take(b).skip(a) {
            *bit = true;
        }
        Self::from_parts(prefix, vec![false])
    }

    pub fn singleton(n: usize) -> Self {
        Self::from_elements([n])
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(elems: I) -> Self {
        let mut prefix = Vec::new();
        for e in elems {
            if e >= prefix.len() {
                prefix.resize(e + 1, false);
            }
            prefix[e] = true;
        }
        Self::from_parts(prefix, vec![false])
    }

    pub fn from_mask(mask: u64) -> Self {
        Self::from_elements((0..64).filter(|i| mask >> i & 1 == 1))
    }

    /// Bit mask of a finite set whose elements are all below 64.
    pub fn to_mask(&self) -> Option<u64> {
        if !self.is_finite() || self.prefix.len() > 64 {
            return None;
        }
        Some(
            self.prefix
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .fold(0u64, |m, (i, _)| m | 1 << i),
        )
    }

    pub fn contains(&self, n: usize) -> bool {
        if n < self.prefix.len() {
            self.prefix[n]
        } else {
            self.pattern[n % self.pattern.len()]
        }
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn prefix_bits(&self) -> &[bool] {
        &self.prefix
    }

    pub fn period(&self) -> usize {
        self.pattern.len()
    }

    pub fn pattern(&self) -> &[bool] {
        &self.pattern
    }

    pub fn residues(&self) -> Vec<usize> {
        (0..self.period()).filter(|&i| self.pattern[i]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.pattern.iter().all(|b| !b)
    }

    pub fn is_empty(&self) -> bool {
        self.is_finite() && self.prefix.iter().all(|b| !b)
    }

    pub fn cardinality(&self) -> Option<usize> {
        self.is_finite()
            .then(|| self.prefix.iter().filter(|&&b| b).count())
    }

    pub fn min_element(&self) -> Option<usize> {
        self.iter().next()
    }

    /// Largest element of a non-empty finite set.
    pub fn max_element(&self) -> Option<usize> {
        if !self.is_finite() {
            return None;
        }
        self.prefix.iter().rposition(|&b| b)
    }

    /// Elements in ascending order; infinite for infinite sets.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let bound = if self.is_finite() {
            self.prefix.len()
        } else {
            usize::MAX
        };
        (0..bound).filter(move |&n| self.contains(n))
    }

    /// The `i`-th smallest element.
    pub fn nth(&self, i: usize) -> Option<usize> {
        self.iter().nth(i)
    }

    pub fn first_k(&self, k: usize) -> Vec<usize> {
        self.iter().take(k).collect()
    }

    fn combine(&self, other: &UPSet, op: impl Fn(bool, bool) -> bool) -> UPSet {
        let n = self.prefix_len().max(other.prefix_len());
        let p = lcm(self.period(), other.period());
        let prefix = (0..n)
            .map(|i| op(self.contains(i), other.contains(i)))
            .collect();
        let pattern = (0..p)
            .map(|i| {
                let x = n + (i + p - n % p) % p;
                op(self.contains(x), other.contains(x))
            })
            .collect();
        UPSet::from_parts(prefix, pattern)
    }

    pub fn union(&self, other: &UPSet) -> UPSet {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &UPSet) -> UPSet {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &UPSet) -> UPSet {
        self.combine(other, |a, b| a && !b)
    }

    /// Complement in ℕ.
    pub fn complement(&self) -> UPSet {
        UPSet {
            prefix: self.prefix.iter().map(|b| !b).collect(),
            pattern: self.pattern.iter().map(|b| !b).collect(),
        }
    }

    pub fn is_subset(&self, other: &UPSet) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_disjoint(&self, other: &UPSet) -> bool {
        self.intersection(other).is_empty()
    }

    /// Splits an infinite set into `k` infinite pieces by the position of each
    /// element in the ascending enumeration: piece `j` holds the elements whose
    /// index is `≡ j (mod k)`.
    pub fn split_by_index(&self, k: usize) -> Vec<UPSet> {
        assert!(k >= 1);
        assert!(!self.is_finite(), "index split needs an infinite set");
        let n = self.prefix_len();
        let p = self.period();
        let per_period = self.pattern.iter().filter(|&&b| b).count();
        let big = p * (k / num::integer::gcd(per_period, k));
        let mut prefixes = vec![vec![false; n]; k];
        let mut patterns = vec![vec![false; big]; k];
        let mut idx = 0usize;
        for x in 0..n + big {
            if self.contains(x) {
                let j = idx % k;
                if x < n {
                    prefixes[j][x] = true;
                } else {
                    patterns[j][x % big] = true;
                }
                idx += 1;
            }
        }
        prefixes
            .into_iter()
            .zip(patterns)
            .map(|(pre, pat)| UPSet::from_parts(pre, pat))
            .collect()
    }
}

impl fmt::Debug for UPSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UPSet({self})")
    }
}

/// Canonical literal: `finite:[..]` for finite sets, `upset:..` otherwise.
impl fmt::Display for UPSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_finite() {
            let elems: Vec<String> = self.iter().map(|e| e.to_string()).collect();
            write!(f, "finite:[{}]", elems.join(","))
        } else {
            let bits: String = self
                .prefix
                .iter()
                .map(|&b| if b { '1' } else { '0' })
                .collect();
            let res: Vec<String> = self.residues().iter().map(|r| r.to_string()).collect();
            write!(
                f,
                "upset:N={};prefix={};p={};R={{{}}}",
                self.prefix_len(),
                bits,
                self.period(),
                res.join(",")
            )
        }
    }
}
