//! Weighted singleton series `Σ c(n)·m({n})` with rigorous tail bounds.

use num::{One, Signed, Zero};

use super::{Concave, Family, MeasureSpec, PointMass};
use crate::error::{Error, Result};
use crate::exact::{pow, sqrt_enclosure, to_f64, Real, Q};
use crate::seq::EPSeq;
use crate::setalg::GroundModel;

/// Value of a convergent singleton series together with its absolute series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesValue {
    pub value: Real,
    pub abs: Real,
}

/// Why the absolute series diverges: past `start`, every block of `period`
/// consecutive indices adds at least `increment > 0` to `Σ |c(n)|·m({n})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivergenceCert {
    pub start: usize,
    pub period: usize,
    pub increment: Q,
    /// `(n, Σ_{k<n} c(k)m({k}), Σ_{k<n} |c(k)|m({k}))` at a few checkpoints.
    pub checkpoints: Vec<(usize, Q, Q)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeriesSum {
    Converges(SeriesValue),
    Diverges(DivergenceCert),
}

impl SeriesSum {
    fn zero() -> Self {
        SeriesSum::Converges(SeriesValue {
            value: Real::zero(),
            abs: Real::zero(),
        })
    }

    pub fn value(&self) -> Option<&Real> {
        match self {
            SeriesSum::Converges(v) => Some(&v.value),
            SeriesSum::Diverges(_) => None,
        }
    }
}

/// `Σ_{n ∈ T} c(n)·m({n})`. Numeric tails are cut once their contribution is
/// at most `tol / 2`; the bound is added to the radius.
pub fn singleton_series(m: &MeasureSpec, c: &EPSeq, tol: &Q) -> Result<SeriesSum> {
    series(m.family(), m.ground(), c, tol)
}

fn series(fam: &Family, ground: GroundModel, c: &EPSeq, tol: &Q) -> Result<SeriesSum> {
    if c.is_zero() {
        return Ok(SeriesSum::zero());
    }
    if let GroundModel::Finite(n) = ground {
        let mut value = Real::zero();
        let mut abs = Real::zero();
        for i in 0..n {
            let ci = c.at(i);
            if ci.is_zero() {
                continue;
            }
            let w = fam_singleton(fam, i);
            value = value + w.scale(&ci);
            abs = abs + w.scale(&ci.abs());
        }
        return Ok(SeriesSum::Converges(SeriesValue { value, abs }));
    }
    match fam {
        Family::Table(_) => Err(Error::UnsupportedGround(
            "tables live on finite grounds".into(),
        )),
        Family::PointMass(pm) => Ok(SeriesSum::Converges(SeriesValue {
            value: Real::exact(point_mass_sum(pm, c)),
            abs: Real::exact(point_mass_sum(pm, &c.abs())),
        })),
        Family::CardinalityClass(cc) => {
            let th1 = cc.theta(Some(1));
            if th1.is_zero() || c.is_finitely_supported() {
                let s: Q = c.prefix().iter().sum();
                let a: Q = c.prefix().iter().map(Signed::abs).sum();
                return Ok(SeriesSum::Converges(SeriesValue {
                    value: Real::exact(th1 * s),
                    abs: Real::exact(th1 * a),
                }));
            }
            let period = c.period();
            let start = c.start();
            let increment: Q = c.cycle().iter().map(Signed::abs).sum::<Q>() * th1;
            let mut checkpoints = Vec::new();
            let (mut s, mut a) = (Q::zero(), Q::zero());
            let mut n = 0;
            for k in 1..=8 {
                let upto = start + k * period;
                while n < upto {
                    let cn = c.at(n);
                    s += &cn * th1;
                    a += cn.abs() * th1;
                    n += 1;
                }
                checkpoints.push((upto, s.clone(), a.clone()));
            }
            Ok(SeriesSum::Diverges(DivergenceCert {
                start,
                period,
                increment,
                checkpoints,
            }))
        }
        Family::Distortion { g, base } => distortion_sum(g, base, c, tol).map(SeriesSum::Converges),
        Family::Sum(a, b) => {
            let half = tol / Q::from_integer(2.into());
            match (series(a, ground, c, &half)?, series(b, ground, c, &half)?) {
                (SeriesSum::Converges(x), SeriesSum::Converges(y)) => {
                    Ok(SeriesSum::Converges(SeriesValue {
                        value: x.value + y.value,
                        abs: x.abs + y.abs,
                    }))
                }
                (SeriesSum::Diverges(d), _) | (_, SeriesSum::Diverges(d)) => {
                    Ok(SeriesSum::Diverges(d))
                }
            }
        }
        Family::Scale(k, inner) => {
            if k.is_zero() {
                return Ok(SeriesSum::zero());
            }
            match series(inner, ground, c, &(tol / k))? {
                SeriesSum::Converges(v) => Ok(SeriesSum::Converges(SeriesValue {
                    value: v.value.scale(k),
                    abs: v.abs.scale(k),
                })),
                SeriesSum::Diverges(mut d) => {
                    d.increment *= k;
                    for cp in &mut d.checkpoints {
                        cp.1 *= k;
                        cp.2 *= k;
                    }
                    Ok(SeriesSum::Diverges(d))
                }
            }
        }
    }
}

fn fam_singleton(fam: &Family, n: usize) -> Real {
    match fam {
        Family::Table(v) => Real::exact(v[1usize << n].clone()),
        Family::PointMass(pm) => Real::exact(pm.weight(n)),
        Family::CardinalityClass(cc) => Real::exact(cc.theta(Some(1)).clone()),
        Family::Distortion { g, base } => g.eval(&base.weight(n)),
        Family::Sum(a, b) => fam_singleton(a, n) + fam_singleton(b, n),
        Family::Scale(k, inner) => fam_singleton(inner, n).scale(k),
    }
}

/// Closed form of `Σ c(n)·w_n`.
fn point_mass_sum(pm: &PointMass, c: &EPSeq) -> Q {
    let start = c.start().max(pm.explicit_len());
    let mut total: Q = (0..start).map(|n| c.at(n) * pm.weight(n)).sum();
    let Some(t) = &pm.tail else {
        return total;
    };
    if c.is_finitely_supported() || t.c.is_zero() {
        return total;
    }
    let period = c.period();
    let mut s = Q::zero();
    let mut rj = Q::one();
    for j in 0..period {
        s += c.at(start + j) * &rj;
        rj *= &t.r;
    }
    total += &t.c * pow(&t.r, start) * s / (Q::one() - rj);
    total
}

/// Upper bound on `Σ_{n >= k} g(w_n)` for `k` past the explicit weights.
fn distortion_tail(g: &Concave, base: &PointMass, k: usize) -> Result<Q> {
    let Some(t) = &base.tail else {
        return Ok(Q::zero());
    };
    if t.c.is_zero() {
        return Ok(Q::zero());
    }
    let wk = &t.c * pow(&t.r, k);
    match g {
        Concave::Sqrt => {
            let root_r = sqrt_enclosure(&t.r).upper();
            let denom = Q::one() - root_r;
            if !denom.is_positive() {
                return Err(Error::UnsupportedFamily("tail ratio too close to 1".into()));
            }
            Ok(sqrt_enclosure(&wk).upper() / denom)
        }
        Concave::MinAffine(_) => {
            let s0 = g.slope_at_zero().expect("validated");
            Ok(s0 * wk / (Q::one() - &t.r))
        }
    }
}

fn distortion_sum(g: &Concave, base: &PointMass, c: &EPSeq, tol: &Q) -> Result<SeriesValue> {
    let bound = c.sup_abs();
    let half = tol / Q::from_integer(2.into());
    let mut k = c.start().max(base.explicit_len());
    if c.is_finitely_supported() || base.tail.is_none() {
        let k = if c.is_finitely_supported() {
            c.start()
        } else {
            base.explicit_len()
        };
        return Ok(head(g, base, c, k, Q::zero()));
    }
    // jump close to the cut with an f64 estimate, then confirm exactly
    let t = base.tail.as_ref().expect("checked");
    let ratio = match g {
        Concave::Sqrt => to_f64(&t.r).sqrt(),
        Concave::MinAffine(_) => to_f64(&t.r),
    };
    let t0 = to_f64(&distortion_tail(g, base, k)?) * to_f64(&bound);
    if t0 > 0.0 && ratio > 0.0 && ratio < 1.0 {
        let target = to_f64(&half);
        let steps = ((target / t0).ln() / ratio.ln()).ceil();
        if steps.is_finite() && steps > 0.0 {
            k += steps as usize;
        }
    }
    let mut rad = &bound * distortion_tail(g, base, k)?;
    while rad > half {
        k += 1 + k / 8;
        rad = &bound * distortion_tail(g, base, k)?;
    }
    Ok(head(g, base, c, k, rad))
}

fn head(g: &Concave, base: &PointMass, c: &EPSeq, k: usize, tail_rad: Q) -> SeriesValue {
    let mut value = Real::zero();
    let mut abs = Real::zero();
    let mut w = base.weight(base.explicit_len().min(k));
    let ratio = base.tail.as_ref().map(|t| t.r.clone());
    for n in 0..k {
        let wn = if n < base.explicit_len() {
            base.weight(n)
        } else {
            let cur = w.clone();
            if let Some(r) = &ratio {
                w *= r;
            }
            cur
        };
        let cn = c.at(n);
        if cn.is_zero() {
            continue;
        }
        let gn = g.eval(&wn);
        value = value + gn.scale(&cn);
        abs = abs + gn.scale(&cn.abs());
    }
    SeriesValue {
        value: value.widen(&tail_rad),
        abs: abs.widen(&tail_rad),
    }
}
