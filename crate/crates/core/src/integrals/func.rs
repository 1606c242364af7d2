use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{to_f64, Q};
use crate::seq::EPSeq;
use crate::setalg::{GroundModel, UPSet};

/// A bounded `f: T → ℝ^d`, one eventually periodic sequence per coordinate.
///
/// On a finite ground only the values on `0..n` are kept, so equal
/// functions compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FuncSpec {
    ground: GroundModel,
    comps: Vec<EPSeq>,
}

impl FuncSpec {
    pub fn from_comps(ground: GroundModel, comps: Vec<EPSeq>) -> Result<Self> {
        if comps.is_empty() {
            return Err(Error::InvalidSpec("function needs dimension >= 1".into()));
        }
        let comps = match ground {
            GroundModel::Finite(n) => comps
                .iter()
                .map(|c| EPSeq::finite((0..n).map(|i| c.at(i)).collect()))
                .collect(),
            GroundModel::Omega => comps,
        };
        Ok(FuncSpec { ground, comps })
    }

    /// Explicit values `rows[t]` on `finite(rows.len())`.
    pub fn table(rows: Vec<Vec<Q>>) -> Result<Self> {
        let ground = GroundModel::finite(rows.len())?;
        let d = check_rows(&rows, None)?;
        let comps = (0..d)
            .map(|i| EPSeq::finite(rows.iter().map(|r| r[i].clone()).collect()))
            .collect();
        Self::from_comps(ground, comps)
    }

    /// `f(n) = prefix[n]` for `n < N`, then `f(N + k) = cycle[k mod q]`.
    pub fn periodic(prefix: Vec<Vec<Q>>, cycle: Vec<Vec<Q>>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::InvalidSpec(
                "periodic function needs a non-empty cycle".into(),
            ));
        }
        let d = check_rows(&cycle, None)?;
        if !prefix.is_empty() {
            check_rows(&prefix, Some(d))?;
        }
        let (n0, q) = (prefix.len(), cycle.len());
        let comps = (0..d)
            .map(|i| {
                // store the cycle by absolute residue: position j holds f(n) for n ≡ j mod q
                let abs: Vec<Q> = (0..q)
                    .map(|j| cycle[(j + q - n0 % q) % q][i].clone())
                    .collect();
                EPSeq::new(prefix.iter().map(|r| r[i].clone()).collect(), abs)
            })
            .collect();
        Self::from_comps(GroundModel::Omega, comps)
    }

    pub fn constant(ground: GroundModel, v: Vec<Q>) -> Self {
        Self::from_comps(ground, v.into_iter().map(EPSeq::constant).collect()).expect("non-empty")
    }

    pub fn zero(ground: GroundModel, dim: usize) -> Self {
        Self::constant(ground, vec![Q::zero(); dim])
    }

    pub fn indicator(ground: GroundModel, a: &UPSet) -> Self {
        Self::from_comps(ground, vec![EPSeq::indicator(a)]).expect("non-empty")
    }

    pub fn ground(&self) -> GroundModel {
        self.ground
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn comps(&self) -> &[EPSeq] {
        &self.comps
    }

    pub fn at(&self, n: usize) -> Vec<Q> {
        self.comps.iter().map(|c| c.at(n)).collect()
    }

    pub fn at_f64(&self, n: usize) -> Vec<f64> {
        self.comps.iter().map(|c| to_f64(&c.at(n))).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(EPSeq::is_zero)
    }

    /// `‖f‖_∞` with the max-norm on `ℝ^d`.
    pub fn sup_norm(&self) -> Q {
        self.comps
            .iter()
            .map(EPSeq::sup_abs)
            .max()
            .unwrap_or_else(Q::zero)
    }

    pub fn support(&self) -> UPSet {
        self.comps
            .iter()
            .fold(UPSet::empty(), |acc, c| acc.union(&c.support()))
    }

    fn compatible(&self, other: &FuncSpec) -> Result<()> {
        self.ground.same_as(&other.ground)?;
        if self.dim() != other.dim() {
            return Err(Error::InvalidSpec(format!(
                "dimension {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }

    fn zip(&self, other: &FuncSpec, op: impl Fn(&Q, &Q) -> Q + Copy) -> Result<FuncSpec> {
        self.compatible(other)?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.zip_with(b, op))
            .collect();
        Self::from_comps(self.ground, comps)
    }

    pub fn add(&self, other: &FuncSpec) -> Result<FuncSpec> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &FuncSpec) -> Result<FuncSpec> {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, k: &Q) -> FuncSpec {
        let comps = self.comps.iter().map(|c| c.map(|x| x * k)).collect();
        Self::from_comps(self.ground, comps).expect("non-empty")
    }

    /// `f·χ_A`.
    pub fn mul_indicator(&self, a: &UPSet) -> Result<FuncSpec> {
        self.ground.check(a)?;
        let comps = self.comps.iter().map(|c| c.mul_indicator(a)).collect();
        Self::from_comps(self.ground, comps)
    }

    /// Every coordinate of `g − f` is non-negative everywhere.
    pub fn le_pointwise(&self, g: &FuncSpec) -> Result<bool> {
        Ok(g.sub(self)?.is_nonneg())
    }

    pub fn is_nonneg(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.prefix().iter().chain(c.cycle()).all(|x| !x.is_negative()))
    }

    /// `(prefix rows, cycle rows)` with the cycle starting at `n = N`.
    pub fn to_rows(&self) -> (Vec<Vec<Q>>, Vec<Vec<Q>>) {
        let n0 = self.comps.iter().map(EPSeq::start).max().unwrap_or(0);
        let n0 = match self.ground {
            GroundModel::Finite(n) => n,
            GroundModel::Omega => n0,
        };
        let q = self
            .comps
            .iter()
            .map(EPSeq::period)
            .fold(1, crate::exact::lcm);
        let prefix = (0..n0).map(|n| self.at(n)).collect();
        let cycle = if self.ground.is_finite() {
            Vec::new()
        } else {
            (0..q).map(|k| self.at(n0 + k)).collect()
        };
        (prefix, cycle)
    }
}

fn check_rows(rows: &[Vec<Q>], expect: Option<usize>) -> Result<usize> {
    let d = expect.or_else(|| rows.first().map(Vec::len)).unwrap_or(0);
    if d == 0 {
        return Err(Error::InvalidSpec(
            "function values need dimension >= 1".into(),
        ));
    }
    if rows.iter().any(|r| r.len() != d) {
        return Err(Error::InvalidSpec("inconsistent value dimensions".into()));
    }
    Ok(d)
}
