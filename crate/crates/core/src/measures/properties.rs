use std::collections::BTreeMap;

use num::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CardClass, Concave, Family, MeasureSpec, PointMass};
use crate::exact::{decimal, Real, Q};
use crate::setalg::{GroundModel, UPSet};

/// Finite grounds up to this size are decided by exhaustive enumeration.
pub const EXHAUSTIVE_LIMIT: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Monotone,
    Subadditive,
    SigmaSubadditive,
    NullAdditive,
    FinitelyAdditive,
    SigmaAdditive,
    Exhaustive,
    OContinuous,
    PropertySigma,
    Submeasure,
}

impl Property {
    pub const ALL: [Property; 10] = [
        Property::Monotone,
        Property::Subadditive,
        Property::SigmaSubadditive,
        Property::NullAdditive,
        Property::FinitelyAdditive,
        Property::SigmaAdditive,
        Property::Exhaustive,
        Property::OContinuous,
        Property::PropertySigma,
        Property::Submeasure,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Monotone => "monotone",
            Property::Subadditive => "subadditive",
            Property::SigmaSubadditive => "sigma-subadditive",
            Property::NullAdditive => "null-additive",
            Property::FinitelyAdditive => "finitely-additive",
            Property::SigmaAdditive => "sigma-additive",
            Property::Exhaustive => "exhaustive",
            Property::OContinuous => "o-continuous",
            Property::PropertySigma => "property-sigma",
            Property::Submeasure => "submeasure",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    /// `sets = [A, B]`, `A ⊆ B`, `m(A) > m(B)`.
    NotMonotone,
    /// `sets = [A, B]` disjoint, `m(A ∪ B) > m(A) + m(B)`.
    NotSubadditive,
    /// `sets = [A, B]` disjoint, `m(A ∪ B) ≠ m(A) + m(B)`.
    NotAdditive,
    /// `sets = [A, B]`, `m(B) = 0`, `m(A ∪ B) ≠ m(A)`.
    NotNullAdditive,
    /// Every listed set is null, their union is not.
    NullUnionNotNull,
    /// `sets = [A]`; `A` splits into consecutive runs of `chunk` elements,
    /// all null, while `m(A) > 0`.
    CountableNullCover,
    /// Pairwise disjoint sets, each with `m >= floor > 0` (first members of
    /// an infinite sequence built the same way).
    DisjointBounded,
    /// A decreasing chain with empty intersection and `m >= floor > 0`.
    DecreasingBounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub kind: WitnessKind,
    pub sets: Vec<UPSet>,
    pub chunk: Option<usize>,
    pub floor: Option<Q>,
}

impl Witness {
    fn pair(kind: WitnessKind, a: UPSet, b: UPSet) -> Self {
        Witness {
            kind,
            sets: vec![a, b],
            chunk: None,
            floor: None,
        }
    }

    /// Re-evaluates the witness against `m`.
    ///
    /// Sequence witnesses are checked on their listed members; null covers on
    /// their first 32 runs.
    pub fn recheck(&self, m: &MeasureSpec) -> bool {
        let ev = |s: &UPSet| m.eval(s).ok();
        let s = &self.sets;
        let pair = || -> Option<(Real, Real, Real)> {
            Some((ev(&s[0])?, ev(&s[1])?, ev(&s[0].union(&s[1]))?))
        };
        match self.kind {
            WitnessKind::NotMonotone => {
                s.len() == 2
                    && s[0].is_subset(&s[1])
                    && matches!(pair(), Some((a, b, _)) if b.certainly_lt(&a))
            }
            WitnessKind::NotSubadditive => {
                s.len() == 2
                    && s[0].is_disjoint(&s[1])
                    && matches!(pair(), Some((a, b, u)) if (&a + &b).certainly_lt(&u))
            }
            WitnessKind::NotAdditive => {
                s.len() == 2
                    && s[0].is_disjoint(&s[1])
                    && matches!(pair(), Some((a, b, u)) if (&a + &b).certainly_ne(&u))
            }
            WitnessKind::NotNullAdditive => {
                s.len() == 2
                    && matches!(pair(), Some((a, b, u)) if b.is_zero() && u.certainly_ne(&a))
            }
            WitnessKind::NullUnionNotNull => {
                let union = s.iter().fold(UPSet::empty(), |acc, x| acc.union(x));
                !s.is_empty()
                    && s.iter().all(|x| ev(x).is_some_and(|v| v.is_zero()))
                    && ev(&union).is_some_and(|v| v.certainly_positive())
            }
            WitnessKind::CountableNullCover => {
                let (Some(chunk), [a]) = (self.chunk, s.as_slice()) else {
                    return false;
                };
                if chunk == 0 || a.is_finite() || !ev(a).is_some_and(|v| v.certainly_positive()) {
                    return false;
                }
                let elems = a.first_k(32 * chunk);
                elems.chunks(chunk).all(|run| {
                    ev(&UPSet::from_elements(run.iter().copied())).is_some_and(|v| v.is_zero())
                })
            }
            WitnessKind::DisjointBounded | WitnessKind::DecreasingBounded => {
                let Some(floor) = self.floor.as_ref().filter(|f| f.is_positive()) else {
                    return false;
                };
                let shape = if self.kind == WitnessKind::DisjointBounded {
                    s.iter()
                        .enumerate()
                        .all(|(i, x)| s[i + 1..].iter().all(|y| x.is_disjoint(y)))
                } else {
                    s.windows(2).all(|w| w[1].is_subset(&w[0]))
                };
                let floor = Real::exact(floor.clone());
                shape
                    && s.len() >= 2
                    && s.iter()
                        .all(|x| ev(x).is_some_and(|v| floor.certainly_le(&v)))
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut obj = serde_json::json!({
            "kind": self.kind,
            "sets": self.sets.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        });
        if let Some(c) = self.chunk {
            obj["chunk"] = c.into();
        }
        if let Some(f) = &self.floor {
            obj["floor"] = crate::exact::q_to_json(f);
        }
        obj
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PropVerdict {
    Proved { reason: String },
    Refuted { witness: Witness },
    Probed { count: usize },
}

impl PropVerdict {
    fn proved(reason: impl Into<String>) -> Self {
        PropVerdict::Proved {
            reason: reason.into(),
        }
    }

    fn refuted(w: Witness) -> Self {
        PropVerdict::Refuted { witness: w }
    }

    pub fn is_proved(&self) -> bool {
        matches!(self, PropVerdict::Proved { .. })
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, PropVerdict::Refuted { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            PropVerdict::Refuted { witness } => Some(witness),
            _ => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            PropVerdict::Proved { reason } => {
                serde_json::json!({"verdict": "proved", "reason": reason})
            }
            PropVerdict::Refuted { witness } => {
                serde_json::json!({"verdict": "refuted", "witness": witness.to_json()})
            }
            PropVerdict::Probed { count } => {
                serde_json::json!({"verdict": "probed-no-counterexample", "probes": count})
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyReport {
    verdicts: BTreeMap<Property, PropVerdict>,
}

impl PropertyReport {
    pub fn get(&self, p: Property) -> &PropVerdict {
        &self.verdicts[&p]
    }

    pub fn proved(&self, p: Property) -> bool {
        self.get(p).is_proved()
    }

    pub fn refuted(&self, p: Property) -> bool {
        self.get(p).is_refuted()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Property, &PropVerdict)> {
        self.verdicts.iter().map(|(p, v)| (*p, v))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .verdicts
            .iter()
            .map(|(p, v)| (p.name().to_string(), v.to_json()))
            .collect();
        serde_json::Value::Object(map)
    }
}

type Partial = BTreeMap<Property, PropVerdict>;

/// Decides or probes every property in [`Property::ALL`].
pub fn check_properties(m: &MeasureSpec) -> PropertyReport {
    let ground = m.ground();
    let mut verdicts = match ground.size() {
        Some(n) if n <= EXHAUSTIVE_LIMIT => match m.tabulate_exact() {
            Some(v) => exhaustive(n, &v),
            None => certify(m.family(), ground),
        },
        _ => certify(m.family(), ground),
    };
    let missing: Vec<Property> = Property::ALL
        .iter()
        .copied()
        .filter(|p| *p != Property::Submeasure && !verdicts.contains_key(p))
        .collect();
    if !missing.is_empty() {
        probe(m, &missing, &mut verdicts);
    }
    verdicts.insert(
        Property::Submeasure,
        conjunction(
            &verdicts[&Property::Monotone],
            &verdicts[&Property::Subadditive],
        ),
    );
    PropertyReport { verdicts }
}

fn conjunction(a: &PropVerdict, b: &PropVerdict) -> PropVerdict {
    match (a, b) {
        (PropVerdict::Refuted { .. }, _) => a.clone(),
        (_, PropVerdict::Refuted { .. }) => b.clone(),
        (PropVerdict::Proved { .. }, PropVerdict::Proved { .. }) => {
            PropVerdict::proved("monotone and subadditive")
        }
        (PropVerdict::Probed { count: x }, PropVerdict::Probed { count: y }) => {
            PropVerdict::Probed { count: *x.max(y) }
        }
        (PropVerdict::Probed { count }, _) | (_, PropVerdict::Probed { count }) => {
            PropVerdict::Probed { count: *count }
        }
    }
}

fn mask_set(mask: usize) -> UPSet {
    UPSet::from_mask(mask as u64)
}

fn exhaustive(n: usize, v: &[Q]) -> Partial {
    let full = (1usize << n) - 1;
    let reason = format!("exhaustive check over all subsets of finite({n})");
    let mut out = Partial::new();

    let monotone = (0..=full)
        .flat_map(|s| {
            (0..n)
                .filter(move |i| s >> i & 1 == 0)
                .map(move |i| (s, s | 1 << i))
        })
        .find(|&(a, b)| v[a] > v[b])
        .map(|(a, b)| Witness::pair(WitnessKind::NotMonotone, mask_set(a), mask_set(b)));
    out.insert(
        Property::Monotone,
        monotone.map_or_else(|| PropVerdict::proved(&reason), PropVerdict::refuted),
    );

    let mut sub = None;
    'outer: for s in 1..=full {
        let mut a = (s - 1) & s;
        while a > 0 {
            let b = s ^ a;
            if a < b && v[s] > &v[a] + &v[b] {
                sub = Some(Witness::pair(
                    WitnessKind::NotSubadditive,
                    mask_set(a),
                    mask_set(b),
                ));
                break 'outer;
            }
            a = (a - 1) & s;
        }
    }
    let sub_verdict = sub.map_or_else(|| PropVerdict::proved(&reason), PropVerdict::refuted);
    out.insert(Property::Subadditive, sub_verdict.clone());
    out.insert(
        Property::SigmaSubadditive,
        match sub_verdict {
            PropVerdict::Proved { .. } => {
                PropVerdict::proved(format!("{reason}; countable covers of a finite ground have finitely many non-empty members"))
            }
            other => other,
        },
    );

    let singles = |s: usize| -> Q {
        (0..n)
            .filter(|i| s >> i & 1 == 1)
            .map(|i| v[1 << i].clone())
            .sum()
    };
    let additive = (1..=full).find(|&s| v[s] != singles(s)).map(|mut s| loop {
        let a = s & s.wrapping_neg();
        let b = s ^ a;
        if v[s] != &v[a] + &v[b] {
            break Witness::pair(WitnessKind::NotAdditive, mask_set(a), mask_set(b));
        }
        s = b;
    });
    let add_verdict = additive.map_or_else(|| PropVerdict::proved(&reason), PropVerdict::refuted);
    out.insert(Property::FinitelyAdditive, add_verdict.clone());
    out.insert(Property::SigmaAdditive, add_verdict);

    let nulls: Vec<usize> = (0..=full).filter(|&s| v[s].is_zero()).collect();
    let null_add = nulls
        .iter()
        .flat_map(|&b| (0..=full).map(move |a| (a, b)))
        .find(|&(a, b)| v[a | b] != v[a])
        .map(|(a, b)| Witness::pair(WitnessKind::NotNullAdditive, mask_set(a), mask_set(b)));
    out.insert(
        Property::NullAdditive,
        null_add.map_or_else(|| PropVerdict::proved(&reason), PropVerdict::refuted),
    );

    let sigma = nulls
        .iter()
        .flat_map(|&a| nulls.iter().map(move |&b| (a, b)))
        .find(|&(a, b)| !v[a | b].is_zero())
        .map(|(a, b)| Witness::pair(WitnessKind::NullUnionNotNull, mask_set(a), mask_set(b)));
    out.insert(
        Property::PropertySigma,
        sigma.map_or_else(
            || {
                PropVerdict::proved(format!(
                    "{reason}; countable unions of subsets of a finite ground are finite unions"
                ))
            },
            PropVerdict::refuted,
        ),
    );

    let limit = "decreasing chains and disjoint sequences in a finite ground are eventually empty";
    out.insert(Property::Exhaustive, PropVerdict::proved(limit));
    out.insert(Property::OContinuous, PropVerdict::proved(limit));
    out
}

fn certify(fam: &Family, ground: GroundModel) -> Partial {
    match fam {
        Family::Table(_) => Partial::new(),
        Family::PointMass(_) => all_proved("point masses form a σ-additive measure"),
        Family::CardinalityClass(cc) => cardclass(cc, ground),
        Family::Distortion { g, base } => distortion(g, base, ground),
        Family::Scale(k, inner) => {
            if k.is_zero() {
                all_proved("zero set function")
            } else {
                certify(inner, ground)
            }
        }
        Family::Sum(a, b) => {
            let (pa, pb) = (certify(a, ground), certify(b, ground));
            let mut out = Partial::new();
            for p in Property::ALL {
                let (Some(va), Some(vb)) = (pa.get(&p), pb.get(&p)) else {
                    if let Some(w) = limit_witness(p, pa.get(&p), pb.get(&p)) {
                        out.insert(p, w);
                    }
                    continue;
                };
                if va.is_proved() && vb.is_proved() {
                    out.insert(
                        p,
                        PropVerdict::proved(format!("both summands are {}", p.name())),
                    );
                } else if let Some(w) = limit_witness(p, Some(va), Some(vb)) {
                    out.insert(p, w);
                }
            }
            out
        }
    }
}

/// A summand's bounded-below sequence also bounds the sum from below.
fn limit_witness(
    p: Property,
    a: Option<&PropVerdict>,
    b: Option<&PropVerdict>,
) -> Option<PropVerdict> {
    if !matches!(p, Property::Exhaustive | Property::OContinuous) {
        return None;
    }
    [a, b]
        .into_iter()
        .flatten()
        .find(|v| v.is_refuted())
        .cloned()
}

fn all_proved(reason: &str) -> Partial {
    Property::ALL
        .iter()
        .filter(|p| **p != Property::Submeasure)
        .map(|p| (*p, PropVerdict::proved(reason)))
        .collect()
}

fn range(a: usize, b: usize) -> UPSet {
    UPSet::range(a, b)
}

/// `A_k = {n : n ≡ 2^k − 1 mod 2^{k+1}}`: pairwise disjoint and infinite.
fn dyadic_disjoint(count: usize) -> Vec<UPSet> {
    (0..count)
        .map(|k| UPSet::residue_class(1 << (k + 1), (1 << k) - 1))
        .collect()
}

fn cardclass(cc: &CardClass, ground: GroundModel) -> Partial {
    let k = cc.cap();
    let th = |j: usize| cc.theta(Some(j));
    let omega = !ground.is_finite();
    // largest finite cardinality that needs checking
    let top = ground.size().unwrap_or(k + 1);
    let inf = &cc.infinite;
    let mut out = Partial::new();

    let mono = (0..top)
        .find(|&j| th(j) > th(j + 1))
        .map(|j| Witness::pair(WitnessKind::NotMonotone, range(0, j), range(0, j + 1)))
        .or_else(|| {
            (omega && th(top) > inf)
                .then(|| Witness::pair(WitnessKind::NotMonotone, range(0, top), UPSet::all()))
        });
    out.insert(
        Property::Monotone,
        mono.map_or_else(
            || PropVerdict::proved("θ is non-decreasing"),
            PropVerdict::refuted,
        ),
    );

    let pairs = || (1..=top).flat_map(move |a| (1..=top).map(move |b| (a, b)));
    let fits = |a: usize, b: usize| omega || a + b <= top;
    let sub = pairs()
        .filter(|&(a, b)| fits(a, b))
        .find(|&(a, b)| th(a + b) > &(th(a) + th(b)))
        .map(|(a, b)| Witness::pair(WitnessKind::NotSubadditive, range(0, a), range(a, a + b)));
    let null_run = (1..=k.max(1).min(top)).find(|&j| th(j).is_zero());
    match sub {
        Some(w) => {
            out.insert(Property::Subadditive, PropVerdict::refuted(w.clone()));
            out.insert(Property::SigmaSubadditive, PropVerdict::refuted(w));
        }
        None => {
            out.insert(
                Property::Subadditive,
                PropVerdict::proved("θ(a+b) <= θ(a) + θ(b) for all cardinalities"),
            );
            let sigma = match null_run {
                Some(j) if omega && inf.is_positive() => PropVerdict::refuted(Witness {
                    kind: WitnessKind::CountableNullCover,
                    sets: vec![UPSet::all()],
                    chunk: Some(j),
                    floor: None,
                }),
                _ if omega => PropVerdict::proved(
                    "subadditive, and infinite covers either have infinitely many non-null members or a null union",
                ),
                _ => PropVerdict::proved("subadditive on a finite ground"),
            };
            out.insert(Property::SigmaSubadditive, sigma);
        }
    }

    let add = pairs()
        .filter(|&(a, b)| fits(a, b))
        .find(|&(a, b)| th(a + b) != &(th(a) + th(b)))
        .map(|(a, b)| Witness::pair(WitnessKind::NotAdditive, range(0, a), range(a, a + b)))
        .or_else(|| {
            (omega && inf.is_positive())
                .then(|| Witness::pair(WitnessKind::NotAdditive, UPSet::evens(), UPSet::odds()))
        });
    let add = add.map_or_else(
        || PropVerdict::proved("θ is additive in the cardinality"),
        PropVerdict::refuted,
    );
    out.insert(Property::FinitelyAdditive, add.clone());
    out.insert(Property::SigmaAdditive, add);

    // null-additivity over every cardinality profile |A|, |B|, |A ∪ B|
    let mut null_add = None;
    'na: for b in (1..=top).filter(|&b| th(b).is_zero()) {
        for a in 0..=top {
            let hi = if omega { a + b } else { (a + b).min(top) };
            for c in a.max(b)..=hi {
                if th(c) != th(a) {
                    let overlap = a + b - c;
                    null_add = Some(Witness::pair(
                        WitnessKind::NotNullAdditive,
                        range(0, a),
                        range(a - overlap, a - overlap + b),
                    ));
                    break 'na;
                }
            }
        }
    }
    if null_add.is_none() && omega && inf.is_zero() {
        null_add = (0..=top)
            .find(|&a| !th(a).is_zero())
            .map(|a| Witness::pair(WitnessKind::NotNullAdditive, range(0, a), UPSet::tail(a)));
    }
    out.insert(
        Property::NullAdditive,
        null_add.map_or_else(
            || PropVerdict::proved("null cardinalities never change θ"),
            PropVerdict::refuted,
        ),
    );

    let sigma = match null_run {
        None if omega => PropVerdict::proved("the null sets are ∅ and possibly the infinite sets"),
        None => PropVerdict::proved("only the empty set is null"),
        Some(j0) => match (j0..=top).find(|&c| !th(c).is_zero()) {
            Some(c) => PropVerdict::refuted(Witness {
                kind: WitnessKind::NullUnionNotNull,
                sets: (0..=c - j0).map(|i| range(i, i + j0)).collect(),
                chunk: None,
                floor: None,
            }),
            None if omega && inf.is_positive() => PropVerdict::refuted(Witness {
                kind: WitnessKind::CountableNullCover,
                sets: vec![UPSet::all()],
                chunk: Some(j0),
                floor: None,
            }),
            None => PropVerdict::proved(
                "θ vanishes on every cardinality from the least non-zero null one",
            ),
        },
    };
    out.insert(Property::PropertySigma, sigma);

    if !omega {
        let limit =
            "decreasing chains and disjoint sequences in a finite ground are eventually empty";
        out.insert(Property::Exhaustive, PropVerdict::proved(limit));
        out.insert(Property::OContinuous, PropVerdict::proved(limit));
        return out;
    }
    let exhaustive = if inf.is_positive() {
        PropVerdict::refuted(Witness {
            kind: WitnessKind::DisjointBounded,
            sets: dyadic_disjoint(8),
            chunk: None,
            floor: Some(inf.clone()),
        })
    } else if let Some(j) = (1..=k).find(|&j| th(j).is_positive()) {
        PropVerdict::refuted(Witness {
            kind: WitnessKind::DisjointBounded,
            sets: (0..8).map(|i| range(i * j, (i + 1) * j)).collect(),
            chunk: None,
            floor: Some(th(j).clone()),
        })
    } else {
        PropVerdict::proved("θ ≡ 0")
    };
    out.insert(Property::Exhaustive, exhaustive);
    let ocont = if inf.is_positive() {
        PropVerdict::refuted(Witness {
            kind: WitnessKind::DecreasingBounded,
            sets: (0..8).map(|i| UPSet::tail(1 << i)).collect(),
            chunk: None,
            floor: Some(inf.clone()),
        })
    } else {
        PropVerdict::proved("θ(∞) = 0 and decreasing chains of finite sets reach ∅")
    };
    out.insert(Property::OContinuous, ocont);
    out
}

fn distortion(g: &Concave, base: &PointMass, ground: GroundModel) -> Partial {
    let mut out = all_proved(
        "g is monotone, concave, continuous with g(0) = 0 and vanishes on (0, ∞) only if g ≡ 0, composed with a σ-additive measure",
    );
    out.remove(&Property::FinitelyAdditive);
    out.remove(&Property::SigmaAdditive);
    let full = ground.full_set();
    let total = base.mass(&full);
    let scan = ground.size().unwrap_or(base.explicit_len() + 2);
    let support: Vec<usize> = (0..scan)
        .filter(|&i| base.weight(i).is_positive())
        .take(2)
        .collect();
    let verdict = if g.is_zero() {
        PropVerdict::proved("g ≡ 0")
    } else if support.len() < 2 {
        PropVerdict::proved("the base measure has at most one atom, so m is a multiple of it")
    } else if let Some(s) = g.linear_on(&total) {
        PropVerdict::proved(format!("g(x) = {}·x on [0, μ(T)]", decimal(&s)))
    } else {
        // strict concavity on [0, μ(T)] splits T into two positive-mass pieces
        let a = UPSet::singleton(support[0]);
        let b = full.difference(&a);
        PropVerdict::refuted(Witness::pair(WitnessKind::NotAdditive, a, b))
    };
    out.insert(Property::FinitelyAdditive, verdict.clone());
    out.insert(Property::SigmaAdditive, verdict);
    out
}

fn pool(ground: GroundModel) -> Vec<UPSet> {
    match ground {
        GroundModel::Omega => {
            let mut v = vec![UPSet::empty()];
            v.extend((0..4).map(UPSet::singleton));
            v.extend([
                UPSet::range(0, 2),
                UPSet::range(0, 4),
                UPSet::range(2, 6),
                UPSet::evens(),
                UPSet::odds(),
                UPSet::residue_class(3, 0),
                UPSet::residue_class(3, 1),
                UPSet::residue_class(3, 2),
                UPSet::residue_class(4, 0),
                UPSet::tail(1),
                UPSet::tail(4),
                UPSet::all(),
            ]);
            v
        }
        GroundModel::Finite(n) if n <= EXHAUSTIVE_LIMIT => {
            (0..1u64 << n).map(UPSet::from_mask).collect()
        }
        GroundModel::Finite(n) => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            let full = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
            let mut v = vec![UPSet::empty(), UPSet::range(0, n)];
            v.extend((0..n).map(UPSet::singleton));
            v.extend((0..48).map(|_| UPSet::from_mask(rng.gen::<u64>() & full)));
            v
        }
    }
}

fn probe(m: &MeasureSpec, missing: &[Property], out: &mut Partial) {
    let sets = pool(m.ground());
    let vals: Vec<Real> = sets
        .iter()
        .map(|s| m.eval(s).expect("pool inside the ground"))
        .collect();
    let mut found: BTreeMap<Property, Witness> = BTreeMap::new();
    let mut count = 0usize;
    let want = |p: Property| missing.contains(&p);
    for i in 0..sets.len() {
        for j in 0..sets.len() {
            count += 1;
            let (a, b) = (&sets[i], &sets[j]);
            let (va, vb) = (&vals[i], &vals[j]);
            let union = a.union(b);
            let vu = m.eval(&union).expect("pool inside the ground");
            let mut note = |p: Property, kind: WitnessKind| {
                if want(p) && !found.contains_key(&p) {
                    found.insert(p, Witness::pair(kind, a.clone(), b.clone()));
                }
            };
            if a.is_subset(b) && vb.certainly_lt(va) {
                note(Property::Monotone, WitnessKind::NotMonotone);
            }
            if a.is_disjoint(b) {
                let s = va + vb;
                if s.certainly_lt(&vu) {
                    note(Property::Subadditive, WitnessKind::NotSubadditive);
                }
                if s.certainly_ne(&vu) {
                    note(Property::FinitelyAdditive, WitnessKind::NotAdditive);
                }
            }
            if vb.is_zero() && vu.certainly_ne(va) {
                note(Property::NullAdditive, WitnessKind::NotNullAdditive);
            }
            if va.is_zero() && vb.is_zero() && vu.certainly_positive() {
                note(Property::PropertySigma, WitnessKind::NullUnionNotNull);
            }
        }
    }
    let derived = [
        (Property::SigmaSubadditive, Property::Subadditive),
        (Property::SigmaAdditive, Property::FinitelyAdditive),
    ];
    for (p, from) in derived {
        if want(p) && !found.contains_key(&p) {
            let w = found
                .get(&from)
                .cloned()
                .or_else(|| out.get(&from).and_then(|v| v.witness().cloned()));
            if let Some(w) = w {
                found.insert(p, w);
            }
        }
    }
    for &p in missing {
        let v = match found.remove(&p) {
            Some(w) => PropVerdict::refuted(w),
            None => PropVerdict::Probed { count },
        };
        out.insert(p, v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qi};
    use crate::measures::GeomTail;
    use num::One;

    fn omega(f: Family) -> MeasureSpec {
        MeasureSpec::new(GroundModel::Omega, f).unwrap()
    }

    fn assert_witnesses_recheck(m: &MeasureSpec, r: &PropertyReport) {
        for (p, v) in r.iter() {
            if let Some(w) = v.witness() {
                assert!(
                    w.recheck(m),
                    "{} witness {:?} does not recheck",
                    p.name(),
                    w
                );
            }
        }
    }

    #[test]
    fn non_monotone_table() {
        // m({0}) = 2 > m({0,1}) = 1
        let m = MeasureSpec::table_from(3, |s| match s {
            0 => Q::zero(),
            0b001 => qi(2),
            _ => Q::one(),
        })
        .unwrap();
        let r = check_properties(&m);
        let w = r.get(Property::Monotone).witness().expect("refuted");
        assert_eq!(w.sets[0], UPSet::from_elements([0]));
        assert_eq!(w.sets[1], UPSet::from_elements([0, 1]));
        assert!(r.refuted(Property::Submeasure));
        assert_witnesses_recheck(&m, &r);
    }

    #[test]
    fn point_mass_is_sigma_additive() {
        let m = omega(Family::PointMass(PointMass::geometric(q(1, 2), q(1, 2))));
        let r = check_properties(&m);
        assert!(r.proved(Property::SigmaAdditive));
        assert!(r.proved(Property::Submeasure));
    }

    #[test]
    fn example_measure_lattice() {
        let m = MeasureSpec::finite_null_example();
        let r = check_properties(&m);
        assert!(r.proved(Property::Monotone));
        assert!(r.proved(Property::Subadditive));
        assert!(r.proved(Property::NullAdditive));
        let w = r.get(Property::FinitelyAdditive).witness().unwrap();
        assert_eq!(w.sets, vec![UPSet::evens(), UPSet::odds()]);
        for p in [
            Property::SigmaSubadditive,
            Property::SigmaAdditive,
            Property::Exhaustive,
            Property::OContinuous,
            Property::PropertySigma,
        ] {
            assert!(r.refuted(p), "{}", p.name());
        }
        assert_witnesses_recheck(&m, &r);
    }

    #[test]
    fn cardclass_rules_match_exhaustive_on_finite_ground() {
        // same θ on finite(6), once as a rule and once as a table
        let thetas = [
            vec![0, 1, 1, 2],
            vec![0, 2, 1],
            vec![0, 0, 1, 1],
            vec![0, 1, 3],
            vec![0, 1, 2, 3, 4],
            vec![0, 0, 0],
        ];
        for th in thetas {
            let cc = CardClass {
                finite: th.iter().map(|&x| qi(x)).collect(),
                infinite: Q::zero(),
            };
            let g = GroundModel::Finite(6);
            let rule = certify(&Family::CardinalityClass(cc.clone()), g);
            let table =
                MeasureSpec::table_from(6, |s| cc.theta(Some(s.count_ones() as usize)).clone())
                    .unwrap();
            let r = check_properties(&table);
            let rule_m = MeasureSpec::new(g, Family::CardinalityClass(cc.clone())).unwrap();
            for (p, v) in rule {
                assert_eq!(v.is_proved(), r.proved(p), "θ = {th:?}, {}", p.name());
                if let Some(w) = v.witness() {
                    assert!(w.recheck(&rule_m), "θ = {th:?}, {}", p.name());
                }
            }
        }
    }

    #[test]
    fn cardclass_omega_witnesses_recheck() {
        let thetas: Vec<(Vec<i64>, i64)> = vec![
            (vec![0, 1, 1], 1),
            (vec![0, 0, 1], 1),
            (vec![0, 2, 1], 3),
            (vec![0, 1], 0),
            (vec![0, 0], 0),
            (vec![0, 1, 3], 2),
        ];
        for (fin, inf) in thetas {
            let m = omega(Family::CardinalityClass(CardClass {
                finite: fin.iter().map(|&x| qi(x)).collect(),
                infinite: qi(inf),
            }));
            let r = check_properties(&m);
            assert_witnesses_recheck(&m, &r);
        }
    }

    #[test]
    fn sqrt_distortion_is_submeasure_not_additive() {
        let m = omega(Family::Distortion {
            g: Concave::Sqrt,
            base: PointMass::geometric(q(1, 4), q(1, 4)),
        });
        let r = check_properties(&m);
        assert!(r.proved(Property::Submeasure));
        assert!(r.proved(Property::SigmaSubadditive));
        assert!(r.refuted(Property::FinitelyAdditive));
        assert_witnesses_recheck(&m, &r);
    }

    #[test]
    fn capped_distortion_linear_below_the_cap() {
        let base = PointMass {
            weights: vec![],
            tail: Some(GeomTail {
                c: q(1, 2),
                r: q(1, 2),
            }),
        };
        let lin = omega(Family::Distortion {
            g: Concave::cap(qi(2)),
            base: base.clone(),
        });
        assert!(check_properties(&lin).proved(Property::SigmaAdditive));
        let capped = omega(Family::Distortion {
            g: Concave::cap(q(1, 2)),
            base,
        });
        let r = check_properties(&capped);
        assert!(r.refuted(Property::FinitelyAdditive));
        assert_witnesses_recheck(&capped, &r);
    }

    #[test]
    fn sum_with_example_measure() {
        let pm = Family::PointMass(PointMass::geometric(q(1, 2), q(1, 2)));
        let m = omega(Family::Sum(
            Box::new(pm),
            Box::new(Family::CardinalityClass(CardClass::finite_null())),
        ));
        let r = check_properties(&m);
        assert!(r.proved(Property::Monotone));
        assert!(r.proved(Property::Subadditive));
        assert!(r.refuted(Property::FinitelyAdditive));
        assert!(r.refuted(Property::OContinuous));
        assert_witnesses_recheck(&m, &r);
    }

    #[test]
    fn zero_scale_is_additive() {
        let m = omega(Family::Scale(
            Q::zero(),
            Box::new(Family::CardinalityClass(CardClass::finite_null())),
        ));
        assert!(check_properties(&m).proved(Property::SigmaAdditive));
    }

    #[test]
    fn corrupted_witness_fails_recheck() {
        let m = MeasureSpec::finite_null_example();
        let w = Witness::pair(WitnessKind::NotAdditive, UPSet::evens(), UPSet::evens());
        assert!(!w.recheck(&m));
        let w = Witness::pair(
            WitnessKind::NotAdditive,
            UPSet::singleton(0),
            UPSet::singleton(1),
        );
        assert!(!w.recheck(&m));
    }
}
