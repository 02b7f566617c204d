//! Valuations and norm bounds on the log_q scale.
//!
//! Absolute values in C∞ are powers of q with rational exponents; all
//! norm bookkeeping therefore happens on exact rationals. `NormBound`
//! is an upper bound |x| <= q^v, with -∞ for exact zero.

use num_rational::Ratio;
use num_traits::{Signed, Zero};

/// log_q of an absolute value: |x| = q^Exp.
pub type Exp = Ratio<i128>;

pub fn exp_int(v: i64) -> Exp {
    Ratio::from_integer(v as i128)
}

pub fn exp_frac(num: i64, den: i64) -> Exp {
    Ratio::new(num as i128, den as i128)
}

/// Exp from a k/e exponent pair.
pub fn rat_pair(num: i64, den: i64) -> Exp {
    Ratio::new(num as i128, den as i128)
}

/// Checked narrowing of an Exp to an (i64, i64) pair.
pub fn exp_to_i64_pair(x: Exp) -> (i64, i64) {
    (
        i64::try_from(*x.numer()).expect("exponent numerator fits i64"),
        i64::try_from(*x.denom()).expect("exponent denominator fits i64"),
    )
}

/// Upper bound on an absolute value, on the log_q scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormBound {
    /// The value is exactly zero.
    NegInf,
    /// |x| <= q^v.
    Le(Exp),
}

impl NormBound {
    pub fn zero() -> Self {
        NormBound::NegInf
    }

    pub fn of(v: Exp) -> Self {
        NormBound::Le(v)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, NormBound::NegInf)
    }

    pub fn exp(&self) -> Option<Exp> {
        match self {
            NormBound::NegInf => None,
            NormBound::Le(v) => Some(*v),
        }
    }

    /// Bound for a sum: ultrametric max.
    pub fn max(self, other: NormBound) -> NormBound {
        match (self, other) {
            (NormBound::NegInf, b) => b,
            (a, NormBound::NegInf) => a,
            (NormBound::Le(a), NormBound::Le(b)) => NormBound::Le(a.max(b)),
        }
    }

    /// Bound for a product.
    pub fn mul(self, other: NormBound) -> NormBound {
        match (self, other) {
            (NormBound::Le(a), NormBound::Le(b)) => NormBound::Le(a + b),
            _ => NormBound::NegInf,
        }
    }

    pub fn pow(self, k: i64) -> NormBound {
        match self {
            NormBound::NegInf => NormBound::NegInf,
            NormBound::Le(a) => NormBound::Le(a * exp_int(k)),
        }
    }

    pub fn le(&self, other: &NormBound) -> bool {
        match (self, other) {
            (NormBound::NegInf, _) => true,
            (_, NormBound::NegInf) => false,
            (NormBound::Le(a), NormBound::Le(b)) => a <= b,
        }
    }
}

/// q^k as an exact i128 (k small enough that this cannot overflow in
/// any use here).
pub fn qpow_i128(q: u32, k: u32) -> i128 {
    (q as i128).pow(k)
}

/// Ceil of x to a dyadic with denominator 1024; an upper bound on x.
pub fn ceil_dyadic(x: Exp) -> Exp {
    let scaled = x * Ratio::from_integer(1024i128);
    let c = scaled.ceil().to_integer();
    Ratio::new(c, 1024)
}

/// max over a window, None for empty.
pub fn max_exp(iter: impl IntoIterator<Item = Exp>) -> Option<Exp> {
    iter.into_iter().reduce(|a, b| a.max(b))
}

pub fn is_nonneg(x: &Exp) -> bool {
    !x.is_negative() || x.is_zero()
}
