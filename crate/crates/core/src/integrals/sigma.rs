use num::Zero;

use super::{series_tol, FuncSpec};
use crate::error::{Error, Result};
use crate::exact::Real;
use crate::measures::{singleton_series, MeasureSpec, SeriesSum};
use crate::setalg::TaggedPartition;

/// `σ(P)` together with whether the countable part converged absolutely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaSum {
    pub value: Vec<Real>,
    pub abs_convergent: bool,
}

/// `σ(P) = Σ_B f(t_B)·m(B)`, including the singleton tail `Σ_{d∈D} f(d)·m({d})`.
pub fn sigma_sum(f: &FuncSpec, tp: &TaggedPartition, m: &MeasureSpec) -> Result<SigmaSum> {
    let mut value = sigma_finite(f, tp, m)?;
    if let Some(d) = tp.partition().tail() {
        let tol = series_tol();
        for (i, comp) in f.comps().iter().enumerate() {
            match singleton_series(m, &comp.mul_indicator(d), &tol)? {
                SeriesSum::Converges(s) => value[i] = &value[i] + &s.value,
                SeriesSum::Diverges(cert) => {
                    return Err(Error::TailDivergent(format!(
                        "coordinate {i}: |c(n)|·m({{n}}) adds at least {} every {} indices past {}",
                        cert.increment, cert.period, cert.start
                    )))
                }
            }
        }
    }
    Ok(SigmaSum {
        value,
        abs_convergent: true,
    })
}

/// `σ` over the explicit blocks only.
pub(crate) fn sigma_finite(
    f: &FuncSpec,
    tp: &TaggedPartition,
    m: &MeasureSpec,
) -> Result<Vec<Real>> {
    f.ground().same_as(&m.ground())?;
    f.ground().same_as(&tp.partition().ground())?;
    let mut value = vec![Real::zero(); f.dim()];
    for (block, tag) in tp.tagged_blocks() {
        let mb = m.eval(block)?;
        if mb.is_zero() {
            continue;
        }
        for (v, ft) in value.iter_mut().zip(f.at(tag)) {
            if !ft.is_zero() {
                *v = &*v + &mb.scale(&ft);
            }
        }
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Q;
    use crate::exact::{q, qi};
    use crate::measures::{Family, PointMass};
    use crate::setalg::{GroundModel, Partition, UPSet};
    use num::One;

    const OMEGA: GroundModel = GroundModel::Omega;

    fn one() -> FuncSpec {
        FuncSpec::constant(OMEGA, vec![Q::one()])
    }

    #[test]
    fn three_infinite_classes_under_example_measure() {
        let m = MeasureSpec::finite_null_example();
        let p = Partition::new(OMEGA, UPSet::all().split_by_index(3)).unwrap();
        let s = sigma_sum(&one(), &p.with_min_tags(), &m).unwrap();
        assert_eq!(s.value, vec![Real::exact(qi(3))]);
    }

    #[test]
    fn all_singletons_under_example_measure() {
        let m = MeasureSpec::finite_null_example();
        let p = Partition::singletons(OMEGA, UPSet::all()).unwrap();
        let s = sigma_sum(&one(), &p.with_min_tags(), &m).unwrap();
        assert_eq!(s.value, vec![Real::zero()]);
        assert!(s.abs_convergent);
    }

    #[test]
    fn constant_over_finite_partition_of_point_mass() {
        let pm = PointMass::geometric(q(1, 2), q(1, 2));
        let m = MeasureSpec::new(OMEGA, Family::PointMass(pm.clone())).unwrap();
        let c = q(5, 3);
        let f = FuncSpec::constant(OMEGA, vec![c.clone()]);
        let blocks = vec![
            UPSet::range(0, 3),
            UPSet::residue_class(3, 0).difference(&UPSet::range(0, 3)),
            UPSet::tail(3).difference(&UPSet::residue_class(3, 0)),
        ];
        let p = Partition::new(OMEGA, blocks).unwrap();
        let s = sigma_sum(&f, &p.with_min_tags(), &m).unwrap();
        // oracle: direct partial sum of w_n
        let direct: Q = (0..300).map(|n| pm.weight(n)).sum();
        let v = s.value[0].mid().clone();
        assert!((&v - &c * direct) < q(1, 1_000_000_000));
        assert_eq!(v, c);
    }

    #[test]
    fn divergent_tail_is_an_error() {
        let m = MeasureSpec::new(
            OMEGA,
            Family::CardinalityClass(crate::measures::CardClass {
                finite: vec![Q::zero(), Q::one()],
                infinite: Q::one(),
            }),
        )
        .unwrap();
        let p = Partition::singletons(OMEGA, UPSet::all()).unwrap();
        assert!(matches!(
            sigma_sum(&one(), &p.with_min_tags(), &m),
            Err(Error::TailDivergent(_))
        ));
    }
}
