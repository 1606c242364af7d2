use super::{rl_integrate, FuncSpec, IntegralVerdict};
use crate::error::{Error, Result};
use crate::measures::MeasureSpec;
use crate::setalg::UPSet;

/// `I_f(A) = ∫_A f dm` for an `f` integrable on the whole ground.
#[derive(Clone, Debug)]
pub struct IndefiniteIntegral {
    f: FuncSpec,
    m: MeasureSpec,
}

impl IndefiniteIntegral {
    pub fn f(&self) -> &FuncSpec {
        &self.f
    }

    pub fn m(&self) -> &MeasureSpec {
        &self.m
    }

    pub fn eval(&self, a: &UPSet) -> Result<IntegralVerdict> {
        rl_integrate(&self.f, &self.m, a)
    }
}

pub fn indefinite(f: &FuncSpec, m: &MeasureSpec) -> Result<IndefiniteIntegral> {
    let whole = rl_integrate(f, m, &m.ground().full_set())?;
    if whole.value().is_none() {
        return Err(Error::NotIntegrable(format!(
            "the integral over the ground is {}",
            whole.status()
        )));
    }
    Ok(IndefiniteIntegral {
        f: f.clone(),
        m: m.clone(),
    })
}
