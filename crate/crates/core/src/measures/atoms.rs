use super::variation::mtilde;
use super::MeasureSpec;
use crate::error::{Error, Result};
use crate::exact::ExtValue;
use crate::integrals::FuncSpec;
use crate::setalg::UPSet;

/// Largest finite ground on which [`atoms`] lists every atom.
pub const ATOM_LIST_LIMIT: usize = 12;

/// `m(A) > 0` and every `B ⊆ A` has `m(B) = 0` or `m(A ∖ B) = 0`.
pub fn is_atom(m: &MeasureSpec, a: &UPSet) -> Result<bool> {
    if !m.ground().is_finite() {
        return Err(Error::UnsupportedGround(
            "atoms are only decided on finite grounds".into(),
        ));
    }
    if !m.eval(a)?.certainly_positive() {
        return Ok(false);
    }
    let elems: Vec<usize> = a.iter().collect();
    let full = (1usize << elems.len()) - 1;
    let pick = |mask: usize| {
        UPSet::from_elements(
            elems
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, e)| *e),
        )
    };
    for mask in 1..full {
        let b = m.eval(&pick(mask))?;
        let rest = m.eval(&pick(full ^ mask))?;
        if !b.is_zero() && !rest.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every atom of `m`, as subsets in mask order.
pub fn atoms(m: &MeasureSpec) -> Result<Vec<UPSet>> {
    let n = m.ground().size().ok_or_else(|| {
        Error::UnsupportedGround("atoms are only decided on finite grounds".into())
    })?;
    if n > ATOM_LIST_LIMIT {
        return Err(Error::LimitExceeded {
            n,
            limit: ATOM_LIST_LIMIT,
        });
    }
    let mut out = Vec::new();
    for mask in 1..1u64 << n {
        let a = UPSet::from_mask(mask);
        if is_atom(m, &a)? {
            out.push(a);
        }
    }
    Ok(out)
}

/// Outcome of [`ae_zero_set`]: the support of `f` and its `m̃`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AeZero {
    pub holds: bool,
    pub support: UPSet,
    pub mtilde: ExtValue,
}

/// Whether `f = 0` m-almost everywhere, i.e. `m̃({t : f(t) ≠ 0}) = 0`.
pub fn ae_zero_set(f: &FuncSpec, m: &MeasureSpec) -> Result<AeZero> {
    f.ground().same_as(&m.ground())?;
    let support = f.support();
    let mt = mtilde(m, &support)?;
    let holds = matches!(&mt, ExtValue::Finite(v) if v.is_zero());
    Ok(AeZero {
        holds,
        support,
        mtilde: mt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qi, Q};
    use crate::measures::{Family, PointMass};
    use crate::setalg::GroundModel;
    use num::{One, Zero};

    #[test]
    fn point_mass_at_two() {
        let m = MeasureSpec::table_from(3, |s| if s & 0b100 != 0 { Q::one() } else { Q::zero() })
            .unwrap();
        assert!(is_atom(&m, &UPSet::singleton(2)).unwrap());
        assert!(is_atom(&m, &UPSet::range(0, 3)).unwrap());
        assert!(!is_atom(&m, &UPSet::singleton(1)).unwrap());
    }

    #[test]
    fn containing_zero_is_an_atom_of_the_whole_ground() {
        let m =
            MeasureSpec::table_from(3, |s| if s & 1 != 0 { Q::one() } else { Q::zero() }).unwrap();
        assert!(is_atom(&m, &UPSet::range(0, 3)).unwrap());
        // oracle: every subset B either contains 0 or T∖B does
        for b in 0..8u64 {
            let (x, y) = (b & 1 != 0, (7 ^ b) & 1 != 0);
            assert!(x ^ y);
        }
    }

    #[test]
    fn zero_measure_has_no_atoms() {
        let m = MeasureSpec::table(2, vec![Q::zero(); 4]).unwrap();
        assert!(atoms(&m).unwrap().is_empty());
        assert!(is_atom(&MeasureSpec::finite_null_example(), &UPSet::all()).is_err());
    }

    #[test]
    fn two_point_uniform_atoms_are_singletons() {
        let m = MeasureSpec::new(
            GroundModel::Finite(2),
            Family::PointMass(PointMass::explicit(vec![qi(1), qi(1)])),
        )
        .unwrap();
        assert_eq!(
            atoms(&m).unwrap(),
            vec![UPSet::singleton(0), UPSet::singleton(1)]
        );
    }

    #[test]
    fn ae_zero_examples() {
        let ex = MeasureSpec::finite_null_example();
        let zero = FuncSpec::constant(GroundModel::Omega, vec![Q::zero()]);
        assert!(ae_zero_set(&zero, &ex).unwrap().holds);
        let ind = FuncSpec::indicator(GroundModel::Omega, &UPSet::from_elements([0, 1]));
        assert!(ae_zero_set(&ind, &ex).unwrap().holds);
        let pm = MeasureSpec::new(
            GroundModel::Omega,
            Family::PointMass(PointMass::geometric(q(1, 2), q(1, 2))),
        )
        .unwrap();
        let evens = FuncSpec::indicator(GroundModel::Omega, &UPSet::evens());
        let r = ae_zero_set(&evens, &pm).unwrap();
        assert!(!r.holds);
        assert_eq!(r.mtilde, ExtValue::finite(q(2, 3)));
    }
}
