use num::{Signed, Zero};

use super::properties::{check_properties, Property};
use super::series::{singleton_series, SeriesSum};
use super::{CardClass, Family, MeasureSpec};
use crate::error::{Error, Result};
use crate::exact::{ExtValue, Real, Q};
use crate::seq::EPSeq;
use crate::setalg::{GroundModel, UPSet};

/// Largest finite set handled by the subset DP (`3^k` work).
pub const VARIATION_DP_LIMIT: usize = 12;

/// Tolerance for numerically summed singleton series.
const SERIES_TOL: (i64, i64) = (1, 1_000_000_000_000);

/// `m̄(E)`, the supremum of `Σ m(A_i)` over finite disjoint families in `E`.
///
/// Finite `E` with exact values uses the partition DP. Otherwise the value
/// comes from a rule: for σ-subadditive `m` it is the singleton series
/// `Σ_{n∈E} m({n})`; cardinality classes and sums/multiples have their own
/// rules. Anything else is reported as unsupported.
pub fn variation(m: &MeasureSpec, e: &UPSet) -> Result<ExtValue> {
    m.ground().check(e)?;
    if let Some(k) = e.cardinality() {
        if k <= VARIATION_DP_LIMIT {
            let elems: Vec<usize> = e.iter().collect();
            if let Some(v) = variation_dp(|mask| exact_value(m, &elems, mask), k) {
                return Ok(ExtValue::finite(v));
            }
        }
    }
    by_rule(m, e)
}

/// `m̃(A) = inf { m̄(B) : B ⊇ A }`, which is `m̄(A)` because `m̄` is monotone
/// and every subset is measurable.
pub fn mtilde(m: &MeasureSpec, a: &UPSet) -> Result<ExtValue> {
    variation(m, a)
}

fn exact_value(m: &MeasureSpec, elems: &[usize], mask: usize) -> Option<Q> {
    let set = UPSet::from_elements(
        elems
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, e)| *e),
    );
    let v = m.eval(&set).ok()?;
    v.is_exact().then(|| v.mid().clone())
}

/// `v(S) = max(m(S), max_{∅ ≠ S' ⊊ S} v(S') + v(S ∖ S'))` over the subsets of
/// a `k`-element set, with `value(mask)` giving `m`. Returns `v(full)`, or
/// `None` if some value is unavailable.
pub fn variation_dp(value: impl Fn(usize) -> Option<Q>, k: usize) -> Option<Q> {
    let size = 1usize << k;
    let mut v: Vec<Q> = Vec::with_capacity(size);
    v.push(Q::zero());
    for s in 1..size {
        let mut best = value(s)?;
        let low = s & s.wrapping_neg();
        let rest = s ^ low;
        // sub-masks containing the lowest bit, excluding s itself
        let mut sub = rest;
        loop {
            let a = sub | low;
            if a != s {
                let cand = &v[a] + &v[s ^ a];
                if cand > best {
                    best = cand;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        v.push(best);
    }
    v.pop()
}

fn by_rule(m: &MeasureSpec, e: &UPSet) -> Result<ExtValue> {
    if e.is_empty() {
        return Ok(ExtValue::finite(Q::zero()));
    }
    if let Some(v) = family_rule(m.family(), m.ground(), e)? {
        return Ok(v);
    }
    if check_properties(m).proved(Property::SigmaSubadditive) {
        return singleton_variation(m, e);
    }
    Err(Error::UnsupportedFamily(format!(
        "no variation rule for this measure on {e}"
    )))
}

/// For σ-subadditive `m`, splitting blocks never lowers `Σ m(A_i)`, and
/// singletons of a finite subset plus a remainder approach the full series.
fn singleton_variation(m: &MeasureSpec, e: &UPSet) -> Result<ExtValue> {
    let tol = Q::new(SERIES_TOL.0.into(), SERIES_TOL.1.into());
    match singleton_series(m, &EPSeq::indicator(e), &tol)? {
        SeriesSum::Converges(v) => Ok(ExtValue::Finite(nonneg(v.value))),
        SeriesSum::Diverges(_) => Ok(ExtValue::Infinite),
    }
}

/// Clamps an enclosure of a non-negative quantity at zero.
fn nonneg(r: Real) -> Real {
    if r.lower().is_negative() && !r.is_exact() {
        let hi = r.upper();
        let two = Q::from_integer(2.into());
        Real::with_radius(&hi / &two, &hi / &two)
    } else {
        r
    }
}

fn family_rule(fam: &Family, ground: GroundModel, e: &UPSet) -> Result<Option<ExtValue>> {
    Ok(match fam {
        Family::PointMass(pm) => Some(ExtValue::finite(pm.mass(e))),
        Family::CardinalityClass(cc) if !ground.is_finite() => Some(cardclass_variation(cc, e)),
        Family::Scale(k, inner) => {
            if k.is_zero() {
                Some(ExtValue::finite(Q::zero()))
            } else {
                let inner_m = MeasureSpec::new(ground, (**inner).clone())?;
                Some(variation(&inner_m, e)?.scale(k))
            }
        }
        Family::Sum(a, b) => {
            // m̄ of a sum is at least each summand's m̄
            let ma = MeasureSpec::new(ground, (**a).clone())?;
            let mb = MeasureSpec::new(ground, (**b).clone())?;
            let inf = |m: &MeasureSpec| matches!(variation(m, e), Ok(ExtValue::Infinite));
            (inf(&ma) || inf(&mb)).then_some(ExtValue::Infinite)
        }
        _ => None,
    })
}

/// Cardinality classes on ℕ. An infinite `E` holds infinitely many disjoint
/// `j`-element subsets and infinitely many disjoint infinite subsets, so any
/// positive `θ` makes `m̄(E)` infinite. A finite `E` only depends on `|E|`.
fn cardclass_variation(cc: &CardClass, e: &UPSet) -> ExtValue {
    match e.cardinality() {
        None => {
            let any = cc.infinite.is_positive() || cc.finite.iter().any(Signed::is_positive);
            if any {
                ExtValue::Infinite
            } else {
                ExtValue::finite(Q::zero())
            }
        }
        Some(k) => {
            let mut v: Vec<Q> = vec![Q::zero()];
            for size in 1..=k {
                let mut best = cc.theta(Some(size)).clone();
                for a in 1..size {
                    let cand = &v[a] + &v[size - a];
                    if cand > best {
                        best = cand;
                    }
                }
                v.push(best);
            }
            ExtValue::finite(v[k].clone())
        }
    }
}
