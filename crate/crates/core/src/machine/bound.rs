use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

/// Largest result size, in bits, that [`kexp_eval`] will materialize.
pub const KEXP_BIT_BUDGET: u64 = 1 << 24;

/// The iterated exponential `kexp(level, argument)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResourceBound {
    pub level: u32,
    pub argument: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("kexp({level}, {argument}) exceeds the {budget}-bit budget")]
pub struct BudgetExceeded {
    pub level: u32,
    pub argument: u64,
    pub budget: u64,
}

impl ResourceBound {
    pub fn eval(&self) -> Result<BigUint, BudgetExceeded> {
        kexp_eval(self.level, self.argument)
    }
}

/// `kexp(0, t) = t`, `kexp(k, t) = 2^kexp(k-1, t)`.
pub fn kexp_eval(level: u32, argument: u64) -> Result<BigUint, BudgetExceeded> {
    let over = || BudgetExceeded { level, argument, budget: KEXP_BIT_BUDGET };
    let mut value = BigUint::from(argument);
    for _ in 0..level {
        let exponent = value.to_u64().filter(|&e| e < KEXP_BIT_BUDGET).ok_or_else(over)?;
        value = BigUint::one() << exponent;
    }
    Ok(value)
}
