//! Non-negative set functions with `m(∅) = 0`.
//!
//! A [`MeasureSpec`] is either an explicit table over the subsets of a finite
//! ground or one of a few rule families that make sense on `ℕ` as well:
//! weighted point masses with a geometric tail, cardinality-class functions
//! and concave distortions of a point-mass measure. Sums and non-negative
//! multiples compose them.

mod atoms;
mod properties;
mod series;
mod variation;

use num::{One, Signed, Zero};

pub use atoms::{ae_zero_set, atoms, is_atom, AeZero, ATOM_LIST_LIMIT};
pub use properties::{
    check_properties, PropVerdict, Property, PropertyReport, Witness, WitnessKind, EXHAUSTIVE_LIMIT,
};
pub use series::{singleton_series, DivergenceCert, SeriesSum, SeriesValue};
pub use variation::{mtilde, variation, variation_dp, VARIATION_DP_LIMIT};

use crate::error::{Error, Result};
use crate::exact::{pow, sqrt_enclosure, to_f64, Real, Q};
use crate::setalg::{GroundModel, UPSet};

/// Largest finite ground accepted by explicit tables.
pub const TABLE_LIMIT: usize = 20;

/// Geometric tail `w_n = c·r^n` for `n` past the explicit weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeomTail {
    pub c: Q,
    pub r: Q,
}

/// σ-additive measure given by point weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointMass {
    pub weights: Vec<Q>,
    pub tail: Option<GeomTail>,
}

impl PointMass {
    pub fn explicit(weights: Vec<Q>) -> Self {
        PointMass {
            weights,
            tail: None,
        }
    }

    /// `w_n = c·r^n` for every `n`.
    pub fn geometric(c: Q, r: Q) -> Self {
        PointMass {
            weights: Vec::new(),
            tail: Some(GeomTail { c, r }),
        }
    }

    pub fn weight(&self, n: usize) -> Q {
        if let Some(w) = self.weights.get(n) {
            return w.clone();
        }
        match &self.tail {
            Some(t) => &t.c * pow(&t.r, n),
            None => Q::zero(),
        }
    }

    /// Index from which the weights follow the geometric rule.
    pub fn explicit_len(&self) -> usize {
        self.weights.len()
    }

    /// `μ(A)` in closed form.
    pub fn mass(&self, a: &UPSet) -> Q {
        let nw = self.weights.len();
        let mut total: Q = self
            .weights
            .iter()
            .enumerate()
            .filter(|(i, _)| a.contains(*i))
            .map(|(_, w)| w.clone())
            .sum();
        let Some(t) = &self.tail else {
            return total;
        };
        if t.c.is_zero() {
            return total;
        }
        if a.is_finite() {
            for n in a.iter().filter(|&n| n >= nw) {
                total += &t.c * pow(&t.r, n);
            }
            return total;
        }
        let start = nw.max(a.prefix_len());
        for n in (nw..start).filter(|&n| a.contains(n)) {
            total += &t.c * pow(&t.r, n);
        }
        let period = a.period();
        let mut s = Q::zero();
        let mut rj = Q::one();
        for j in 0..period {
            if a.contains(start + j) {
                s += &rj;
            }
            rj *= &t.r;
        }
        // rj == r^period here
        total += &t.c * pow(&t.r, start) * s / (Q::one() - rj);
        total
    }

    pub fn mass_f64(&self, a: &UPSet) -> f64 {
        let nw = self.weights.len();
        let mut total: f64 = self
            .weights
            .iter()
            .enumerate()
            .filter(|(i, _)| a.contains(*i))
            .map(|(_, w)| to_f64(w))
            .sum();
        let Some(t) = &self.tail else {
            return total;
        };
        let (c, r) = (to_f64(&t.c), to_f64(&t.r));
        if c == 0.0 {
            return total;
        }
        if a.is_finite() {
            for n in a.iter().filter(|&n| n >= nw) {
                total += c * r.powi(n as i32);
            }
            return total;
        }
        let start = nw.max(a.prefix_len());
        for n in (nw..start).filter(|&n| a.contains(n)) {
            total += c * r.powi(n as i32);
        }
        let period = a.period();
        let mut s = 0.0;
        let mut rj = 1.0;
        for j in 0..period {
            if a.contains(start + j) {
                s += rj;
            }
            rj *= r;
        }
        total + c * r.powi(start as i32) * s / (1.0 - rj)
    }

    /// Upper bound on `Σ_{n >= k} w_n`.
    pub fn tail_mass_from(&self, k: usize) -> Q {
        let nw = self.weights.len();
        let mut total: Q = self.weights.iter().skip(k).cloned().sum();
        if let Some(t) = &self.tail {
            let from = k.max(nw);
            total += &t.c * pow(&t.r, from) / (Q::one() - &t.r);
        }
        total
    }

    fn validate(&self, ground: &GroundModel) -> Result<()> {
        if self.weights.iter().any(|w| w.is_negative()) {
            return Err(Error::InvalidSpec("negative point weight".into()));
        }
        match ground {
            GroundModel::Finite(n) => {
                if self.weights.len() != *n || self.tail.is_some() {
                    return Err(Error::InvalidSpec(format!(
                        "point masses on finite({n}) need exactly {n} weights and no tail"
                    )));
                }
            }
            GroundModel::Omega => {
                if let Some(t) = &self.tail {
                    if t.c.is_negative() || t.r.is_negative() || t.r >= Q::one() {
                        return Err(Error::InvalidSpec(
                            "geometric tail needs c >= 0 and 0 <= r < 1".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `m(A) = θ(|A|)`, with finite cardinalities above `K` mapped to `θ(K)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CardClass {
    /// `θ(0), θ(1), .., θ(K)`.
    pub finite: Vec<Q>,
    pub infinite: Q,
}

impl CardClass {
    pub fn cap(&self) -> usize {
        self.finite.len() - 1
    }

    pub fn theta(&self, card: Option<usize>) -> &Q {
        match card {
            Some(k) => &self.finite[k.min(self.cap())],
            None => &self.infinite,
        }
    }

    /// The separating example on `ℕ`: 0 on finite sets, 1 on infinite ones.
    pub fn finite_null() -> Self {
        CardClass {
            finite: vec![Q::zero()],
            infinite: Q::one(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.finite.is_empty() || !self.finite[0].is_zero() {
            return Err(Error::InvalidSpec(
                "cardinality class needs θ(0) = 0".into(),
            ));
        }
        if self
            .finite
            .iter()
            .chain([&self.infinite])
            .any(|v| v.is_negative())
        {
            return Err(Error::InvalidSpec("negative θ value".into()));
        }
        Ok(())
    }
}

/// Monotone concave `g` with `g(0) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Concave {
    Sqrt,
    /// `g(x) = min_i (a_i·x + b_i)` with `a_i, b_i >= 0` and `min b_i = 0`.
    MinAffine(Vec<(Q, Q)>),
}

impl Concave {
    pub fn identity() -> Self {
        Concave::MinAffine(vec![(Q::one(), Q::zero())])
    }

    /// `min(x, c)`.
    pub fn cap(c: Q) -> Self {
        Concave::MinAffine(vec![(Q::one(), Q::zero()), (Q::zero(), c)])
    }

    pub fn eval(&self, x: &Q) -> Real {
        match self {
            Concave::Sqrt => sqrt_enclosure(x),
            Concave::MinAffine(lines) => Real::exact(
                lines
                    .iter()
                    .map(|(a, b)| a * x + b)
                    .min()
                    .expect("validated non-empty"),
            ),
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        match self {
            Concave::Sqrt => x.max(0.0).sqrt(),
            Concave::MinAffine(lines) => lines
                .iter()
                .map(|(a, b)| to_f64(a) * x + to_f64(b))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Slope `s` with `g(x) <= s·x`, when finite.
    pub fn slope_at_zero(&self) -> Option<Q> {
        match self {
            Concave::Sqrt => None,
            Concave::MinAffine(lines) => lines
                .iter()
                .filter(|(_, b)| b.is_zero())
                .map(|(a, _)| a.clone())
                .min(),
        }
    }

    /// `g ≡ 0`.
    pub fn is_zero(&self) -> bool {
        match self {
            Concave::Sqrt => false,
            Concave::MinAffine(_) => self.slope_at_zero().is_some_and(|s| s.is_zero()),
        }
    }

    /// `g(x) = s·x` on `[0, upto]`; returns the slope.
    pub fn linear_on(&self, upto: &Q) -> Option<Q> {
        match self {
            Concave::Sqrt => upto.is_zero().then(Q::zero),
            Concave::MinAffine(lines) => {
                let s = self.slope_at_zero()?;
                lines
                    .iter()
                    .all(|(a, b)| (a - &s) * upto + b >= Q::zero())
                    .then_some(s)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if let Concave::MinAffine(lines) = self {
            if lines.is_empty() {
                return Err(Error::InvalidSpec(
                    "min-affine distortion needs a line".into(),
                ));
            }
            if lines
                .iter()
                .any(|(a, b)| a.is_negative() || b.is_negative())
            {
                return Err(Error::InvalidSpec(
                    "distortion lines need non-negative slope and intercept".into(),
                ));
            }
            if !lines.iter().any(|(_, b)| b.is_zero()) {
                return Err(Error::InvalidSpec("distortion needs g(0) = 0".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// Values indexed by subset bit mask.
    Table(Vec<Q>),
    PointMass(PointMass),
    CardinalityClass(CardClass),
    Distortion {
        g: Concave,
        base: PointMass,
    },
    Sum(Box<Family>, Box<Family>),
    Scale(Q, Box<Family>),
}

impl Family {
    fn validate(&self, ground: &GroundModel) -> Result<()> {
        match self {
            Family::Table(values) => {
                let GroundModel::Finite(n) = *ground else {
                    return Err(Error::InvalidSpec("tables need a finite ground".into()));
                };
                if n > TABLE_LIMIT {
                    return Err(Error::LimitExceeded {
                        n,
                        limit: TABLE_LIMIT,
                    });
                }
                if values.len() != 1 << n {
                    return Err(Error::InvalidSpec(format!(
                        "table on finite({n}) needs {} values, got {}",
                        1usize << n,
                        values.len()
                    )));
                }
                if !values[0].is_zero() {
                    return Err(Error::InvalidSpec("table needs m(∅) = 0".into()));
                }
                if values.iter().any(|v| v.is_negative()) {
                    return Err(Error::InvalidSpec("negative table value".into()));
                }
                Ok(())
            }
            Family::PointMass(pm) => pm.validate(ground),
            Family::CardinalityClass(cc) => cc.validate(),
            Family::Distortion { g, base } => {
                g.validate()?;
                base.validate(ground)
            }
            Family::Sum(a, b) => {
                a.validate(ground)?;
                b.validate(ground)
            }
            Family::Scale(k, inner) => {
                if k.is_negative() {
                    return Err(Error::InvalidSpec("negative scale factor".into()));
                }
                inner.validate(ground)
            }
        }
    }

    fn eval(&self, a: &UPSet) -> Real {
        match self {
            Family::Table(values) => {
                let mask = a.to_mask().expect("checked against the ground");
                Real::exact(values[mask as usize].clone())
            }
            Family::PointMass(pm) => Real::exact(pm.mass(a)),
            Family::CardinalityClass(cc) => Real::exact(cc.theta(a.cardinality()).clone()),
            Family::Distortion { g, base } => g.eval(&base.mass(a)),
            Family::Sum(x, y) => x.eval(a) + y.eval(a),
            Family::Scale(k, inner) => {
                if k.is_zero() {
                    Real::zero()
                } else {
                    inner.eval(a).scale(k)
                }
            }
        }
    }

    fn eval_f64(&self, a: &UPSet) -> f64 {
        match self {
            Family::Table(values) => to_f64(&values[a.to_mask().expect("finite") as usize]),
            Family::PointMass(pm) => pm.mass_f64(a),
            Family::CardinalityClass(cc) => to_f64(cc.theta(a.cardinality())),
            Family::Distortion { g, base } => g.eval_f64(base.mass_f64(a)),
            Family::Sum(x, y) => x.eval_f64(a) + y.eval_f64(a),
            Family::Scale(k, inner) => to_f64(k) * inner.eval_f64(a),
        }
    }
}

/// A non-negative set function on a ground model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasureSpec {
    ground: GroundModel,
    family: Family,
}

impl MeasureSpec {
    pub fn new(ground: GroundModel, family: Family) -> Result<Self> {
        family.validate(&ground)?;
        Ok(MeasureSpec { ground, family })
    }

    pub fn table(n: usize, values: Vec<Q>) -> Result<Self> {
        Self::new(GroundModel::finite(n)?, Family::Table(values))
    }

    /// Table built from a function of the subset mask.
    pub fn table_from(n: usize, f: impl Fn(u64) -> Q) -> Result<Self> {
        Self::table(n, (0..1u64 << n).map(f).collect())
    }

    /// The cardinality-class measure that is 0 on finite and 1 on infinite sets.
    pub fn finite_null_example() -> Self {
        MeasureSpec {
            ground: GroundModel::Omega,
            family: Family::CardinalityClass(CardClass::finite_null()),
        }
    }

    pub fn ground(&self) -> GroundModel {
        self.ground
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn sum(&self, other: &MeasureSpec) -> Result<MeasureSpec> {
        self.ground.same_as(&other.ground)?;
        Ok(MeasureSpec {
            ground: self.ground,
            family: Family::Sum(
                Box::new(self.family.clone()),
                Box::new(other.family.clone()),
            ),
        })
    }

    pub fn scale(&self, k: Q) -> Result<MeasureSpec> {
        Self::new(self.ground, Family::Scale(k, Box::new(self.family.clone())))
    }

    /// `m(A)`; exact except for irrational distortions.
    pub fn eval(&self, a: &UPSet) -> Result<Real> {
        self.ground.check(a)?;
        Ok(self.family.eval(a))
    }

    pub fn eval_f64(&self, a: &UPSet) -> f64 {
        self.family.eval_f64(a)
    }

    pub fn singleton(&self, n: usize) -> Real {
        self.family.eval(&UPSet::singleton(n))
    }

    /// All values on a finite ground, indexed by subset mask.
    pub fn tabulate(&self) -> Option<Vec<Real>> {
        let n = self.ground.size()?;
        if n > TABLE_LIMIT {
            return None;
        }
        if let Family::Table(values) = &self.family {
            return Some(values.iter().cloned().map(Real::exact).collect());
        }
        Some(
            (0..1u64 << n)
                .map(|mask| self.family.eval(&UPSet::from_mask(mask)))
                .collect(),
        )
    }

    /// Exact values on a finite ground, if every value is rational.
    pub fn tabulate_exact(&self) -> Option<Vec<Q>> {
        let t = self.tabulate()?;
        t.iter()
            .all(Real::is_exact)
            .then(|| t.into_iter().map(|r| r.mid().clone()).collect())
    }
}

/// `m(A)` as an extended value; see [`MeasureSpec::eval`].
pub fn eval_measure(m: &MeasureSpec, a: &UPSet) -> Result<crate::exact::ExtValue> {
    m.eval(a).map(crate::exact::ExtValue::Finite)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qi};

    #[test]
    fn example_measure_values() {
        let m = MeasureSpec::finite_null_example();
        assert_eq!(m.eval(&UPSet::evens()).unwrap(), Real::exact(Q::one()));
        assert_eq!(
            m.eval(&UPSet::from_elements([0, 1, 2])).unwrap(),
            Real::zero()
        );
        assert_eq!(m.eval(&UPSet::empty()).unwrap(), Real::zero());
    }

    #[test]
    fn geometric_point_mass_total_is_one() {
        // w_n = 2^-(n+1) = (1/2)(1/2)^n
        let pm = PointMass::geometric(q(1, 2), q(1, 2));
        let m = MeasureSpec::new(GroundModel::Omega, Family::PointMass(pm.clone())).unwrap();
        assert_eq!(m.eval(&UPSet::all()).unwrap(), Real::exact(Q::one()));
        assert_eq!(m.eval(&UPSet::evens()).unwrap(), Real::exact(q(2, 3)));
        assert_eq!(m.eval(&UPSet::odds()).unwrap(), Real::exact(q(1, 3)));
        // oracle: direct partial sum of the series for a set with a prefix
        let s = UPSet::new(vec![true, false, false, true, true], 3, &[1]).unwrap();
        let direct: Q = (0..200)
            .filter(|&n| s.contains(n))
            .map(|n| pm.weight(n))
            .sum();
        let exact = pm.mass(&s);
        assert!(exact >= direct);
        assert!(&exact - &direct < pm.tail_mass_from(200));
        assert!((pm.mass_f64(&s) - to_f64(&exact)).abs() < 1e-15);
    }

    #[test]
    fn every_family_vanishes_on_empty() {
        let fams = vec![
            Family::PointMass(PointMass::geometric(q(1, 3), q(1, 2))),
            Family::CardinalityClass(CardClass {
                finite: vec![Q::zero(), q(1, 2), Q::one()],
                infinite: qi(2),
            }),
            Family::Distortion {
                g: Concave::Sqrt,
                base: PointMass::geometric(q(1, 4), q(1, 4)),
            },
            Family::Sum(
                Box::new(Family::CardinalityClass(CardClass::finite_null())),
                Box::new(Family::PointMass(PointMass::explicit(vec![Q::one()]))),
            ),
            Family::Scale(
                qi(3),
                Box::new(Family::CardinalityClass(CardClass::finite_null())),
            ),
        ];
        for f in fams {
            let m = MeasureSpec::new(GroundModel::Omega, f).unwrap();
            assert!(m.eval(&UPSet::empty()).unwrap().is_zero());
        }
    }

    #[test]
    fn validation_errors() {
        assert!(MeasureSpec::table(2, vec![Q::one(), Q::one(), Q::one(), Q::one()]).is_err());
        assert!(MeasureSpec::table(2, vec![Q::zero(), Q::one()]).is_err());
        assert!(MeasureSpec::new(
            GroundModel::Omega,
            Family::PointMass(PointMass::geometric(Q::one(), Q::one()))
        )
        .is_err());
        assert!(MeasureSpec::new(
            GroundModel::Omega,
            Family::CardinalityClass(CardClass {
                finite: vec![Q::one()],
                infinite: Q::one()
            })
        )
        .is_err());
        assert!(MeasureSpec::new(GroundModel::Omega, Family::Table(vec![Q::zero()])).is_err());
        let m = MeasureSpec::finite_null_example();
        assert!(m.scale(qi(-1)).is_err());
        let fin = MeasureSpec::table(1, vec![Q::zero(), Q::one()]).unwrap();
        assert!(matches!(m.sum(&fin), Err(Error::GroundMismatch(_))));
        assert!(matches!(
            fin.eval(&UPSet::evens()),
            Err(Error::GroundMismatch(_))
        ));
    }

    #[test]
    fn distortion_sqrt_of_geometric() {
        let m = MeasureSpec::new(
            GroundModel::Omega,
            Family::Distortion {
                g: Concave::Sqrt,
                base: PointMass::geometric(q(1, 4), q(1, 4)),
            },
        )
        .unwrap();
        // μ({n}) = 4^-(n+1), sqrt = 2^-(n+1)
        assert_eq!(m.singleton(3), Real::exact(q(1, 16)));
        // μ(ℕ) = 1/3
        let v = m.eval(&UPSet::all()).unwrap();
        assert!(v.lower() * v.lower() <= q(1, 3) && v.upper() * v.upper() >= q(1, 3));
    }

    #[test]
    fn min_affine_linearity() {
        let g = Concave::cap(q(1, 2));
        assert_eq!(g.linear_on(&q(1, 2)), Some(Q::one()));
        assert_eq!(g.linear_on(&Q::one()), None);
        assert_eq!(g.eval(&Q::one()), Real::exact(q(1, 2)));
        assert!(Concave::MinAffine(vec![(Q::zero(), Q::zero())]).is_zero());
    }
}
