use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the engine is generic over (`f32` or `f64`).
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts from `f64`, saturating to infinity outside the type's range.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(|| {
            if v.is_sign_negative() {
                Self::neg_infinity()
            } else {
                Self::infinity()
            }
        })
    }

    #[inline]
    fn of_usize(v: usize) -> Self {
        Self::of(v as f64)
    }

    #[inline]
    fn of_isize(v: isize) -> Self {
        Self::of(v as f64)
    }

    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Smallest linear weight kept in linear form by the partition sweeps.
    /// Anything below lives in the log encoding. Chosen as
    /// `min_positive / eps^2` so that sums of up to ~1/eps such values stay
    /// well clear of the subnormal range.
    #[inline]
    fn tiny() -> Self {
        let eps = Self::epsilon();
        Self::min_positive_value() / (eps * eps)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `ln(e^a + e^b + e^c)` with `-inf` treated as an absent term.
#[inline]
pub(crate) fn log_sum_exp3<F: Scalar>(a: F, b: F, c: F) -> F {
    let m = a.max(b).max(c);
    if m == F::neg_infinity() {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp() + (c - m).exp()).ln()
}

/// Streaming log-sum-exp accumulator.
#[derive(Clone, Copy, Debug)]
pub(crate) struct LogAcc<F> {
    max: F,
    sum: F,
}

impl<F: Scalar> LogAcc<F> {
    pub(crate) fn new() -> Self {
        Self {
            max: F::neg_infinity(),
            sum: F::zero(),
        }
    }

    #[inline]
    pub(crate) fn push(&mut self, v: F) {
        if v == F::neg_infinity() {
            return;
        }
        if v <= self.max {
            self.sum = self.sum + (v - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - v).exp() + F::one();
            self.max = v;
        }
    }

    pub(crate) fn value(&self) -> F {
        if self.max == F::neg_infinity() {
            F::neg_infinity()
        } else {
            self.max + self.sum.ln()
        }
    }
}
