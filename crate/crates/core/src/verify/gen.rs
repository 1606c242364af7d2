use std::fmt;
use std::str::FromStr;

use num::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Scenario;
use crate::error::{Error, Result};
use crate::exact::{qi, Q};
use crate::integrals::FuncSpec;
use crate::measures::{CardClass, Concave, Family, MeasureSpec, PointMass};
use crate::seq::EPSeq;
use crate::setalg::{GroundModel, UPSet};

/// Bumped whenever a generator changes the scenarios it draws.
pub const GENERATOR_VERSION: u32 = 1;

/// Largest finite ground a profile may ask for.
pub const MAX_PROFILE_N: usize = 8;

/// Scenario families. Finite profiles draw the ground size from `1..=n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Profile {
    /// Any table, including non-monotone ones.
    Finite(usize),
    FiniteMonotone(usize),
    /// Maxima of additive measures, optionally capped: monotone and subadditive.
    FiniteSubadditive(usize),
    FiniteAdditive(usize),
    /// `m ≤ m2`, `0 ≤ f ≤ g` and monotone `m`, for the order theorems.
    FiniteOrdered(usize),
    Omega,
    OmegaPointMass,
    OmegaDistortion,
    OmegaCardClass,
    /// `f` is supported on an `m̃`-null set and `h − g = f`.
    NullSupport,
}

impl Profile {
    pub const NAMES: [&'static str; 10] = [
        "finite:n",
        "finite-monotone:n",
        "finite-subadditive:n",
        "finite-additive:n",
        "finite-ordered:n",
        "omega",
        "omega-pointmass",
        "omega-distortion",
        "omega-cardclass",
        "null-support",
    ];
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Finite(n) => write!(f, "finite:{n}"),
            Profile::FiniteMonotone(n) => write!(f, "finite-monotone:{n}"),
            Profile::FiniteSubadditive(n) => write!(f, "finite-subadditive:{n}"),
            Profile::FiniteAdditive(n) => write!(f, "finite-additive:{n}"),
            Profile::FiniteOrdered(n) => write!(f, "finite-ordered:{n}"),
            Profile::Omega => f.write_str("omega"),
            Profile::OmegaPointMass => f.write_str("omega-pointmass"),
            Profile::OmegaDistortion => f.write_str("omega-distortion"),
            Profile::OmegaCardClass => f.write_str("omega-cardclass"),
            Profile::NullSupport => f.write_str("null-support"),
        }
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, n) = match s.split_once(':') {
            Some((name, n)) => {
                let n: usize = n
                    .parse()
                    .map_err(|_| Error::Parse(format!("profile size {n:?}")))?;
                if n == 0 || n > MAX_PROFILE_N {
                    return Err(Error::Parse(format!(
                        "profile size must be in 1..={MAX_PROFILE_N}, got {n}"
                    )));
                }
                (name, Some(n))
            }
            None => (s, None),
        };
        let sized = |mk: fn(usize) -> Profile| Ok(mk(n.unwrap_or(6)));
        let plain = |p: Profile| match n {
            None => Ok(p),
            Some(_) => Err(Error::Parse(format!("profile {name} takes no size"))),
        };
        match name {
            "finite" => sized(Profile::Finite),
            "finite-monotone" => sized(Profile::FiniteMonotone),
            "finite-subadditive" => sized(Profile::FiniteSubadditive),
            "finite-additive" => sized(Profile::FiniteAdditive),
            "finite-ordered" => sized(Profile::FiniteOrdered),
            "omega" => plain(Profile::Omega),
            "omega-pointmass" => plain(Profile::OmegaPointMass),
            "omega-distortion" => plain(Profile::OmegaDistortion),
            "omega-cardclass" => plain(Profile::OmegaCardClass),
            "null-support" => plain(Profile::NullSupport),
            _ => Err(Error::Parse(format!(
                "unknown profile {s:?}; expected one of {}",
                Profile::NAMES.join(", ")
            ))),
        }
    }
}

/// `count` scenarios of `profile`; scenario `i` depends only on
/// `(profile, seed, i)`.
pub fn gen_scenarios(profile: Profile, count: usize, seed: u64) -> Vec<Scenario> {
    (0..count).map(|i| gen_one(profile, seed, i)).collect()
}

pub fn gen_one(profile: Profile, seed: u64, index: usize) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let mut g = Gen { rng: &mut rng };
    let parts = match profile {
        Profile::Finite(n) => g.finite_generic(n),
        Profile::FiniteMonotone(n) => g.finite_with(n, |g, k| g.monotone_table(k)),
        Profile::FiniteSubadditive(n) => g.finite_with(n, |g, k| g.subadditive_table(k)),
        Profile::FiniteAdditive(n) => g.finite_with(n, |g, k| g.additive_table(k)),
        Profile::FiniteOrdered(n) => g.finite_ordered(n),
        Profile::Omega => g.omega_mixed(),
        Profile::OmegaPointMass => g.omega_with(|g| Family::PointMass(g.point_mass())),
        Profile::OmegaDistortion => g.omega_with(|g| g.distortion()),
        Profile::OmegaCardClass => g.omega_with(|g| g.cardclass()),
        Profile::NullSupport => g.null_support(),
    };
    Scenario {
        index,
        seed,
        profile: profile.to_string(),
        m: parts.m,
        m2: parts.m2,
        f: parts.f,
        g: parts.g,
        h: parts.h,
        alpha: parts.alpha,
        beta: parts.beta,
        a: parts.a,
        b: parts.b,
    }
}

struct Parts {
    m: MeasureSpec,
    m2: Option<MeasureSpec>,
    f: FuncSpec,
    g: FuncSpec,
    h: FuncSpec,
    alpha: Q,
    beta: Q,
    a: UPSet,
    b: UPSet,
}

struct Gen<'r> {
    rng: &'r mut ChaCha8Rng,
}

impl Gen<'_> {
    fn rq(&mut self, lo: i64, hi: i64, den: i64) -> Q {
        let n = self.rng.gen_range(lo..=hi);
        let d = self.rng.gen_range(1..=den);
        Q::new(n.into(), d.into())
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn nonzero(&mut self) -> Q {
        loop {
            let x = self.rq(-4, 4, 3);
            if !x.is_zero() {
                return x;
            }
        }
    }

    // finite grounds

    fn size(&mut self, max_n: usize) -> usize {
        self.rng.gen_range(1..=max_n)
    }

    fn table(n: usize, values: Vec<Q>) -> MeasureSpec {
        MeasureSpec::table(n, values).expect("generated tables are valid")
    }

    fn arbitrary_table(&mut self, n: usize) -> MeasureSpec {
        let mut v: Vec<Q> = (0..1usize << n).map(|_| self.rq(0, 6, 3)).collect();
        v[0] = Q::zero();
        Self::table(n, v)
    }

    /// `m(A) = max_{i∈A} m(A∖{i}) + r(A)` with `r ≥ 0`.
    fn monotone_table(&mut self, n: usize) -> MeasureSpec {
        let size = 1usize << n;
        let mut v = vec![Q::zero(); size];
        let mut order: Vec<usize> = (1..size).collect();
        order.sort_by_key(|m| m.count_ones());
        for s in order {
            let base = (0..n)
                .filter(|i| s >> i & 1 == 1)
                .map(|i| v[s ^ (1 << i)].clone())
                .max()
                .unwrap_or_else(Q::zero);
            let bump = if self.chance(0.6) {
                self.rq(0, 3, 2)
            } else {
                Q::zero()
            };
            v[s] = base + bump;
        }
        Self::table(n, v)
    }

    fn weights(&mut self, n: usize, zero_p: f64) -> Vec<Q> {
        (0..n)
            .map(|_| {
                if self.chance(zero_p) {
                    Q::zero()
                } else {
                    self.rq(1, 5, 4)
                }
            })
            .collect()
    }

    fn additive_values(w: &[Q]) -> Vec<Q> {
        (0..1usize << w.len())
            .map(|s| {
                (0..w.len())
                    .filter(|i| s >> i & 1 == 1)
                    .map(|i| w[i].clone())
                    .sum()
            })
            .collect()
    }

    fn additive_table(&mut self, n: usize) -> MeasureSpec {
        let w = self.weights(n, 0.2);
        Self::table(n, Self::additive_values(&w))
    }

    /// Pointwise maximum of additive measures, sometimes capped.
    fn subadditive_table(&mut self, n: usize) -> MeasureSpec {
        let k = self.rng.gen_range(1..=3);
        let tables: Vec<Vec<Q>> = (0..k)
            .map(|_| Self::additive_values(&self.weights(n, 0.3)))
            .collect();
        let cap = self.chance(0.3).then(|| self.rq(1, 6, 2));
        let v = (0..1usize << n)
            .map(|s| {
                let x = tables.iter().map(|t| t[s].clone()).max().expect("k >= 1");
                match &cap {
                    Some(c) if &x > c => c.clone(),
                    _ => x,
                }
            })
            .collect();
        Self::table(n, v)
    }

    fn finite_cardclass(&mut self, n: usize) -> MeasureSpec {
        let k = self.rng.gen_range(1..=3);
        let mut finite = vec![Q::zero()];
        finite.extend((0..k).map(|_| self.rq(0, 4, 2)));
        MeasureSpec::new(
            GroundModel::Finite(n),
            Family::CardinalityClass(CardClass {
                finite,
                infinite: Q::zero(),
            }),
        )
        .expect("valid cardinality class")
    }

    fn any_finite_measure(&mut self, n: usize) -> MeasureSpec {
        match self.rng.gen_range(0..5) {
            0 => self.arbitrary_table(n),
            1 => self.monotone_table(n),
            2 => self.subadditive_table(n),
            3 => self.additive_table(n),
            _ => self.finite_cardclass(n),
        }
    }

    fn finite_func(&mut self, n: usize, d: usize, nonneg: bool) -> FuncSpec {
        let rows = (0..n)
            .map(|_| {
                (0..d)
                    .map(|_| {
                        if nonneg {
                            self.rq(0, 4, 3)
                        } else {
                            self.rq(-4, 4, 3)
                        }
                    })
                    .collect()
            })
            .collect();
        FuncSpec::table(rows).expect("generated rows are valid")
    }

    fn finite_sets(&mut self, n: usize) -> (UPSet, UPSet) {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for i in 0..n {
            match self.rng.gen_range(0..3) {
                0 => a.push(i),
                1 => b.push(i),
                _ => {}
            }
        }
        (UPSet::from_elements(a), UPSet::from_elements(b))
    }

    /// `g` plus a random perturbation on a random subset.
    fn perturb(&mut self, g: &FuncSpec, support: &UPSet) -> FuncSpec {
        let comps = g
            .comps()
            .iter()
            .map(|_| {
                let shift = self.nonzero();
                EPSeq::indicator(support).map(|x| x * &shift)
            })
            .collect();
        let p = FuncSpec::from_comps(g.ground(), comps).expect("same dimension");
        g.add(&p).expect("same ground and dimension")
    }

    fn finite_parts(&mut self, n: usize, m: MeasureSpec, d: usize) -> Parts {
        let f = self.finite_func(n, d, false);
        let g = self.finite_func(n, d, false);
        let (a, b) = self.finite_sets(n);
        let bump = if self.chance(0.5) {
            a.clone()
        } else {
            UPSet::from_elements([self.rng.gen_range(0..n)])
        };
        let h = self.perturb(&g, &bump);
        let m2 = Some(self.any_finite_measure(n));
        Parts {
            m,
            m2,
            f,
            g,
            h,
            alpha: self.rq(-3, 3, 2),
            beta: self.rq(-3, 3, 2),
            a,
            b,
        }
    }

    fn finite_generic(&mut self, max_n: usize) -> Parts {
        let n = self.size(max_n);
        let m = self.any_finite_measure(n);
        let d = self.rng.gen_range(1..=2);
        self.finite_parts(n, m, d)
    }

    fn finite_with(&mut self, max_n: usize, mk: fn(&mut Self, usize) -> MeasureSpec) -> Parts {
        let n = self.size(max_n);
        let m = mk(self, n);
        let d = self.rng.gen_range(1..=2);
        self.finite_parts(n, m, d)
    }

    fn finite_ordered(&mut self, max_n: usize) -> Parts {
        let n = self.size(max_n);
        let m = self.monotone_table(n);
        let extra = self.monotone_table(n);
        let m2 = Self::table(
            n,
            m.tabulate_exact()
                .expect("exact table")
                .into_iter()
                .zip(extra.tabulate_exact().expect("exact table"))
                .map(|(x, y)| x + y)
                .collect(),
        );
        let f = self.finite_func(n, 1, true);
        let gap = self.finite_func(n, 1, true);
        let g = f.add(&gap).expect("same shape");
        let (a, b) = self.finite_sets(n);
        let h = g.clone();
        Parts {
            m,
            m2: Some(m2),
            f,
            g,
            h,
            alpha: self.rq(0, 3, 2),
            beta: self.rq(0, 3, 2),
            a,
            b,
        }
    }

    // ℕ

    fn ratio(&mut self) -> Q {
        let (n, d) = *[(1, 4), (1, 3), (1, 2), (2, 3), (3, 4)]
            .choose(self.rng)
            .expect("non-empty");
        Q::new(n.into(), d.into())
    }

    fn point_mass(&mut self) -> PointMass {
        let len = self.rng.gen_range(0..=3);
        let weights = self.weights(len, 0.25);
        let tail = self.chance(0.85) || len == 0;
        let mut pm = if tail {
            let c = self.rq(1, 3, 4);
            let r = self.ratio();
            PointMass::geometric(c, r)
        } else {
            PointMass::explicit(Vec::new())
        };
        pm.weights = weights;
        pm
    }

    fn distortion(&mut self) -> Family {
        let g = match self.rng.gen_range(0..3) {
            0 => Concave::Sqrt,
            1 => Concave::cap(self.rq(1, 3, 4)),
            _ => {
                let a1 = self.rq(1, 3, 1);
                let a2 = self.rq(0, 1, 2);
                let b2 = self.rq(1, 2, 4);
                Concave::MinAffine(vec![(a1, Q::zero()), (a2, b2)])
            }
        };
        let mut base = self.point_mass();
        if base.tail.is_none() {
            base.tail = Some(crate::measures::GeomTail {
                c: Q::new(1.into(), 2.into()),
                r: Q::new(1.into(), 2.into()),
            });
        }
        Family::Distortion { g, base }
    }

    fn cardclass(&mut self) -> Family {
        if self.chance(0.25) {
            return Family::CardinalityClass(CardClass::finite_null());
        }
        let k = self.rng.gen_range(1..=3);
        let mut finite = vec![Q::zero()];
        finite.extend((0..k).map(|_| {
            if self.chance(0.3) {
                Q::zero()
            } else {
                self.rq(0, 3, 2)
            }
        }));
        let infinite = self.rq(0, 4, 2);
        Family::CardinalityClass(CardClass { finite, infinite })
    }

    fn omega_func(&mut self, d: usize) -> FuncSpec {
        let pre = self.rng.gen_range(0..=3);
        let cyc = self.rng.gen_range(1..=3);
        let row = |g: &mut Self| (0..d).map(|_| g.rq(-4, 4, 3)).collect::<Vec<Q>>();
        let prefix = (0..pre).map(|_| row(self)).collect();
        let cycle = (0..cyc).map(|_| row(self)).collect();
        FuncSpec::periodic(prefix, cycle).expect("generated rows are valid")
    }

    fn omega_set_pair(&mut self) -> (UPSet, UPSet) {
        let n = self.rng.gen_range(0..=3);
        let p = self.rng.gen_range(1..=4);
        let mut pa = (vec![false; n], vec![false; p]);
        let mut pb = pa.clone();
        for i in 0..n + p {
            let which = self.rng.gen_range(0..3);
            let (sa, sb) = if i < n {
                (&mut pa.0[i], &mut pb.0[i])
            } else {
                (&mut pa.1[i - n], &mut pb.1[i - n])
            };
            match which {
                0 => *sa = true,
                1 => *sb = true,
                _ => {}
            }
        }
        (UPSet::from_parts(pa.0, pa.1), UPSet::from_parts(pb.0, pb.1))
    }

    fn omega_parts(&mut self, m: Family, m2: Family, constant: bool) -> Parts {
        let omega = GroundModel::Omega;
        let m = MeasureSpec::new(omega, m).expect("generated measure is valid");
        let m2 = MeasureSpec::new(omega, m2).expect("generated measure is valid");
        let d = if constant {
            1
        } else {
            self.rng.gen_range(1..=2)
        };
        let f = if constant {
            FuncSpec::constant(omega, vec![self.nonzero()])
        } else {
            self.omega_func(d)
        };
        let g = self.omega_func(d);
        let (a, b) = self.omega_set_pair();
        let bump = if self.chance(0.5) {
            a.clone()
        } else {
            UPSet::singleton(self.rng.gen_range(0..4))
        };
        let h = self.perturb(&g, &bump);
        Parts {
            m,
            m2: Some(m2),
            f,
            g,
            h,
            alpha: self.rq(-3, 3, 2),
            beta: self.rq(-3, 3, 2),
            a,
            b,
        }
    }

    fn omega_with(&mut self, mk: fn(&mut Self) -> Family) -> Parts {
        let m = mk(self);
        let m2 = mk(self);
        self.omega_parts(m, m2, false)
    }

    fn omega_mixed(&mut self) -> Parts {
        let pick = |g: &mut Self| match g.rng.gen_range(0..3) {
            0 => Family::PointMass(g.point_mass()),
            1 => g.distortion(),
            _ => g.cardclass(),
        };
        if self.chance(0.15) {
            let m2 = pick(self);
            return self.omega_parts(Family::CardinalityClass(CardClass::finite_null()), m2, true);
        }
        let m = pick(self);
        let m2 = pick(self);
        self.omega_parts(m, m2, false)
    }

    /// `f` lives on a set of `m̃`-measure zero: a finite set under the
    /// finite-null example, or zero-weight points of a point mass.
    fn null_support(&mut self) -> Parts {
        match self.rng.gen_range(0..3) {
            0 => {
                let len = self.rng.gen_range(1..=5);
                let prefix = (0..len).map(|_| vec![self.rq(-4, 4, 3)]).collect();
                let f = FuncSpec::periodic(prefix, vec![vec![Q::zero()]]).expect("valid rows");
                self.null_parts(MeasureSpec::finite_null_example(), f)
            }
            1 => {
                let mut pm = self.point_mass();
                let len = self.rng.gen_range(3..=6);
                pm.weights = self.weights(len, 0.4);
                let z = self.rng.gen_range(0..len);
                pm.weights[z] = Q::zero();
                let f = self.on_zeros(&pm.weights, GroundModel::Omega);
                let m = MeasureSpec::new(GroundModel::Omega, Family::PointMass(pm)).expect("valid");
                self.null_parts(m, f)
            }
            _ => {
                let n = self.rng.gen_range(2..=6);
                let mut w = self.weights(n, 0.4);
                let z = self.rng.gen_range(0..n);
                w[z] = Q::zero();
                let f = self.on_zeros(&w, GroundModel::Finite(n));
                let m = Self::table(n, Self::additive_values(&w));
                self.null_parts(m, f)
            }
        }
    }

    fn on_zeros(&mut self, w: &[Q], ground: GroundModel) -> FuncSpec {
        let vals: Vec<Q> = w
            .iter()
            .map(|x| {
                if x.is_zero() {
                    self.nonzero()
                } else {
                    Q::zero()
                }
            })
            .collect();
        FuncSpec::from_comps(ground, vec![EPSeq::finite(vals)]).expect("one coordinate")
    }

    fn null_parts(&mut self, m: MeasureSpec, f: FuncSpec) -> Parts {
        let ground = m.ground();
        let g = match ground {
            GroundModel::Finite(n) => self.finite_func(n, 1, false),
            GroundModel::Omega => self.omega_func(1),
        };
        let h = g.add(&f).expect("same shape");
        let (a, b) = match ground {
            GroundModel::Finite(n) => self.finite_sets(n),
            GroundModel::Omega => self.omega_set_pair(),
        };
        Parts {
            m2: None,
            m,
            f,
            g,
            h,
            alpha: Q::one(),
            beta: qi(-1),
            a,
            b,
        }
    }
}
