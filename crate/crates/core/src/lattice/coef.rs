//! Coefficient arithmetic for the hot loops.
//!
//! Inner loops run on machine integers with checked arithmetic and report
//! [`Overflow`] instead of wrapping; callers then redo the work over
//! `BigInt`. Results are identical either way, only the speed differs.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Overflow;

pub(crate) type Checked<T> = std::result::Result<T, Overflow>;

pub(crate) trait Coef: Clone + Ord + Debug + Send + Sync {
    fn zero() -> Self;
    fn from_big(x: &BigInt) -> Checked<Self>;
    fn to_big(&self) -> BigInt;
    fn add(&self, o: &Self) -> Checked<Self>;
    fn sub(&self, o: &Self) -> Checked<Self>;
    fn mul(&self, o: &Self) -> Checked<Self>;
    fn sign(&self) -> Ordering;
    /// `floor(self / o)` for `self >= 0`, `o > 0`.
    fn div_nonneg(&self, o: &Self) -> Self;
    /// Saturating conversion of a non-negative value.
    fn to_u64_saturating(&self) -> u64;

    fn is_pos(&self) -> bool {
        self.sign() == Ordering::Greater
    }
    fn is_neg(&self) -> bool {
        self.sign() == Ordering::Less
    }
    fn is_zero(&self) -> bool {
        self.sign() == Ordering::Equal
    }
    fn neg(&self) -> Checked<Self> {
        Self::zero().sub(self)
    }
}

impl Coef for i64 {
    fn zero() -> Self {
        0
    }
    fn from_big(x: &BigInt) -> Checked<Self> {
        // keep headroom so a single add/sub of two stored values cannot wrap
        // before the checked op notices
        x.to_i64().filter(|v| v.unsigned_abs() < (1 << 62)).ok_or(Overflow)
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn add(&self, o: &Self) -> Checked<Self> {
        self.checked_add(*o).ok_or(Overflow)
    }
    fn sub(&self, o: &Self) -> Checked<Self> {
        self.checked_sub(*o).ok_or(Overflow)
    }
    fn mul(&self, o: &Self) -> Checked<Self> {
        self.checked_mul(*o).ok_or(Overflow)
    }
    fn sign(&self) -> Ordering {
        self.cmp(&0)
    }
    fn div_nonneg(&self, o: &Self) -> Self {
        self / o
    }
    fn to_u64_saturating(&self) -> u64 {
        u64::try_from(*self).unwrap_or(0)
    }
}

impl Coef for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn from_big(x: &BigInt) -> Checked<Self> {
        Ok(x.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn add(&self, o: &Self) -> Checked<Self> {
        Ok(self + o)
    }
    fn sub(&self, o: &Self) -> Checked<Self> {
        Ok(self - o)
    }
    fn mul(&self, o: &Self) -> Checked<Self> {
        Ok(self * o)
    }
    fn div_nonneg(&self, o: &Self) -> Self {
        self / o
    }
    fn to_u64_saturating(&self) -> u64 {
        self.to_u64().unwrap_or(if self.is_negative() { 0 } else { u64::MAX })
    }
    fn sign(&self) -> Ordering {
        if self.is_positive() {
            Ordering::Greater
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
}

pub(crate) fn to_coefs<T: Coef>(v: &[BigInt]) -> Checked<Vec<T>> {
    v.iter().map(T::from_big).collect()
}

pub(crate) fn from_coefs<T: Coef>(v: &[T]) -> Vec<BigInt> {
    v.iter().map(Coef::to_big).collect()
}

pub(crate) fn dot<T: Coef>(a: &[T], b: &[T]) -> Checked<T> {
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc = acc.add(&x.mul(y)?)?;
        }
    }
    Ok(acc)
}

pub(crate) fn sub_vec<T: Coef>(a: &[T], b: &[T]) -> Checked<Vec<T>> {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

pub(crate) fn add_vec<T: Coef>(a: &[T], b: &[T]) -> Checked<Vec<T>> {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

pub(crate) fn neg_vec<T: Coef>(a: &[T]) -> Checked<Vec<T>> {
    a.iter().map(Coef::neg).collect()
}

/// Positive and negative supports folded into 64 bits. Folding keeps subset
/// relations necessary (never sufficient) for dimensions above 64.
pub(crate) fn sign_masks<T: Coef>(v: &[T]) -> (u64, u64) {
    let (mut pos, mut neg) = (0u64, 0u64);
    for (i, x) in v.iter().enumerate() {
        match x.sign() {
            Ordering::Greater => pos |= 1 << (i & 63),
            Ordering::Less => neg |= 1 << (i & 63),
            Ordering::Equal => {}
        }
    }
    (pos, neg)
}

/// Runs `f` over `i64` when every input fits, else (or on overflow) over
/// `BigInt`.
pub(crate) fn with_fallback<R>(fast: impl FnOnce() -> Checked<R>, slow: impl FnOnce() -> Checked<R>) -> R {
    match fast() {
        Ok(r) => r,
        Err(Overflow) => slow().expect("BigInt arithmetic does not overflow"),
    }
}
