use std::fmt;
use std::ops::{Add, Index, Neg, Sub};

use indexmap::IndexSet;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::Deserializer;
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::json::JsonInt;

/// Dense vector of arbitrary-precision integers with a fixed dimension.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IntVector(Vec<BigInt>);

impl IntVector {
    pub fn new(entries: Vec<BigInt>) -> Self {
        IntVector(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        IntVector(vec![BigInt::zero(); dim])
    }

    /// The `k`-th standard unit vector of dimension `dim`.
    pub fn unit(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[k] = BigInt::from(1);
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<BigInt> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BigInt> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|x| !x.is_negative())
    }

    /// Dot product. Panics on dimension mismatch; use [`IntVector::checked_dot`]
    /// on unvalidated input.
    pub fn dot(&self, other: &IntVector) -> BigInt {
        assert_eq!(self.dim(), other.dim(), "dot product of vectors with different dimensions");
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn checked_dot(&self, other: &IntVector) -> Result<BigInt> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.dot(other))
    }

    pub fn checked_add(&self, other: &IntVector) -> Result<IntVector> {
        check_dim(self.dim(), other.dim())?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &IntVector) -> Result<IntVector> {
        check_dim(self.dim(), other.dim())?;
        Ok(self - other)
    }

    /// Componentwise `self <= other`.
    pub fn le_componentwise(&self, other: &IntVector) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Index of the first nonzero entry.
    pub fn leading_index(&self) -> Option<usize> {
        self.0.iter().position(|x| !x.is_zero())
    }

    /// Representative of `{v, -v}` whose first nonzero entry is positive.
    pub fn sign_normalized(&self) -> IntVector {
        match self.leading_index() {
            Some(i) if self.0[i].is_negative() => -self,
            _ => self.clone(),
        }
    }

    pub fn sign_split(&self) -> SignSplit {
        sign_split(self)
    }

    /// Returns the vector with coordinate `j` negated.
    pub fn with_flipped(&self, j: usize) -> Result<IntVector> {
        if j >= self.dim() {
            return Err(Error::IndexOutOfRange { index: j, dim: self.dim() });
        }
        let mut out = self.clone();
        out.0[j] = -&out.0[j];
        Ok(out)
    }

    /// Sum of absolute values.
    pub fn norm1(&self) -> BigInt {
        self.0.iter().map(|x| x.abs()).sum()
    }

    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.0.iter().map(ToPrimitive::to_i64).collect()
    }
}

impl From<Vec<BigInt>> for IntVector {
    fn from(v: Vec<BigInt>) -> Self {
        IntVector(v)
    }
}

impl From<Vec<i64>> for IntVector {
    fn from(v: Vec<i64>) -> Self {
        IntVector(v.into_iter().map(BigInt::from).collect())
    }
}

impl From<&[i64]> for IntVector {
    fn from(v: &[i64]) -> Self {
        IntVector(v.iter().copied().map(BigInt::from).collect())
    }
}

impl<const N: usize> From<[i64; N]> for IntVector {
    fn from(v: [i64; N]) -> Self {
        IntVector(v.iter().copied().map(BigInt::from).collect())
    }
}

impl Index<usize> for IntVector {
    type Output = BigInt;
    fn index(&self, i: usize) -> &BigInt {
        &self.0[i]
    }
}

impl<'a> Add<&'a IntVector> for &'a IntVector {
    type Output = IntVector;
    fn add(self, rhs: &'a IntVector) -> IntVector {
        assert_eq!(self.dim(), rhs.dim(), "adding vectors with different dimensions");
        IntVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl<'a> Sub<&'a IntVector> for &'a IntVector {
    type Output = IntVector;
    fn sub(self, rhs: &'a IntVector) -> IntVector {
        assert_eq!(self.dim(), rhs.dim(), "subtracting vectors with different dimensions");
        IntVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &IntVector {
    type Output = IntVector;
    fn neg(self) -> IntVector {
        IntVector(self.0.iter().map(|a| -a).collect())
    }
}

impl Neg for IntVector {
    type Output = IntVector;
    fn neg(self) -> IntVector {
        IntVector(self.0.into_iter().map(|a| -a).collect())
    }
}

impl fmt::Debug for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

impl Serialize for IntVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for x in &self.0 {
            seq.serialize_element(&JsonInt(x.clone()))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for IntVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<JsonInt>::deserialize(deserializer)?;
        Ok(IntVector(raw.into_iter().map(|x| x.0).collect()))
    }
}

/// Positive and negative parts of a vector: `v = positive - negative`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignSplit {
    pub positive: IntVector,
    pub negative: IntVector,
}

pub fn sign_split(v: &IntVector) -> SignSplit {
    let zero = BigInt::zero();
    let positive = v.0.iter().map(|x| if x.is_positive() { x.clone() } else { zero.clone() }).collect();
    let negative = v.0.iter().map(|x| if x.is_negative() { -x } else { zero.clone() }).collect();
    SignSplit { positive: IntVector(positive), negative: IntVector(negative) }
}

/// Conformal order: `a ⊑ b` iff `a_i * b_i >= 0` and `|a_i| <= |b_i|` for all `i`.
pub fn conforms(a: &IntVector, b: &IntVector) -> Result<bool> {
    check_dim(a.dim(), b.dim())?;
    Ok(conforms_unchecked(a, b))
}

pub(crate) fn conforms_unchecked(a: &IntVector, b: &IntVector) -> bool {
    a.0.iter().zip(&b.0).all(|(x, y)| {
        if x.is_zero() {
            true
        } else if x.is_positive() {
            y >= x
        } else {
            y <= x
        }
    })
}

/// Insertion-ordered set of vectors without duplicates.
///
/// Equality is set equality; iteration follows insertion order so that
/// callers controlling the order (e.g. seeds for a completion) see it
/// preserved.
#[derive(Clone, Default)]
pub struct VectorSet(IndexSet<IntVector>);

impl VectorSet {
    pub fn new() -> Self {
        VectorSet(IndexSet::new())
    }

    /// Inserts `v`, returning `false` if it was already present.
    pub fn insert(&mut self, v: IntVector) -> bool {
        self.0.insert(v)
    }

    pub fn contains(&self, v: &IntVector) -> bool {
        self.0.contains(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> indexmap::set::Iter<'_, IntVector> {
        self.0.iter()
    }

    pub fn get(&self, i: usize) -> Option<&IntVector> {
        self.0.get_index(i)
    }

    pub fn to_vec(&self) -> Vec<IntVector> {
        self.0.iter().cloned().collect()
    }

    /// Elements in ascending lexicographic order.
    pub fn sorted(&self) -> Vec<IntVector> {
        let mut v = self.to_vec();
        v.sort();
        v
    }

    /// Sign-normalized representatives, deduplicated and sorted. Two sets that
    /// agree up to the orientation of each element map to the same list.
    pub fn normalized(&self) -> Vec<IntVector> {
        let mut v: Vec<IntVector> = self.0.iter().map(IntVector::sign_normalized).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Elements whose entries all lie in `[-bound, bound]`.
    pub fn restricted_to_box(&self, bound: &BigInt) -> VectorSet {
        self.0.iter().filter(|v| v.iter().all(|x| x.abs() <= *bound)).cloned().collect()
    }
}

impl PartialEq for VectorSet {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl Eq for VectorSet {}

impl fmt::Debug for VectorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

impl FromIterator<IntVector> for VectorSet {
    fn from_iter<I: IntoIterator<Item = IntVector>>(iter: I) -> Self {
        VectorSet(iter.into_iter().collect())
    }
}

impl IntoIterator for VectorSet {
    type Item = IntVector;
    type IntoIter = indexmap::set::IntoIter<IntVector>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a VectorSet {
    type Item = &'a IntVector;
    type IntoIter = indexmap::set::Iter<'a, IntVector>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl Serialize for VectorSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter())
    }
}

impl<'de> Deserialize<'de> for VectorSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Ok(Vec::<IntVector>::deserialize(deserializer)?.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(x: &[i64]) -> IntVector {
        IntVector::from(x)
    }

    #[test]
    fn sign_split_examples() {
        let s = sign_split(&v(&[2, -3, 0]));
        assert_eq!(s.positive, v(&[2, 0, 0]));
        assert_eq!(s.negative, v(&[0, 3, 0]));
        let s = sign_split(&v(&[0, 0]));
        assert_eq!((s.positive, s.negative), (v(&[0, 0]), v(&[0, 0])));
        let s = sign_split(&v(&[-1, -1]));
        assert_eq!((s.positive, s.negative), (v(&[0, 0]), v(&[1, 1])));
    }

    #[test]
    fn conformal_examples() {
        assert!(conforms(&v(&[1, -1]), &v(&[2, -1])).unwrap());
        assert!(!conforms(&v(&[1, 1]), &v(&[2, -1])).unwrap());
        assert!(conforms(&v(&[0, 0]), &v(&[-5, 3])).unwrap());
        assert!(matches!(conforms(&v(&[1]), &v(&[1, 2])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn flip_out_of_range() {
        assert!(v(&[1, 2]).with_flipped(2).is_err());
    }

    #[test]
    fn set_equality_ignores_order() {
        let a: VectorSet = [v(&[1, 0]), v(&[0, 1])].into_iter().collect();
        let b: VectorSet = [v(&[0, 1]), v(&[1, 0]), v(&[1, 0])].into_iter().collect();
        assert_eq!(a, b);
        assert_eq!(b.len(), 2);
    }

    #[test]
    fn serde_round_trip() {
        let x = v(&[3, -4, 0]);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, "[3,-4,0]");
        assert_eq!(serde_json::from_str::<IntVector>(&s).unwrap(), x);
    }

    proptest! {
        #[test]
        fn sign_split_reconstructs(xs in proptest::collection::vec(-50i64..50, 0..8)) {
            let x = v(&xs);
            let s = x.sign_split();
            prop_assert_eq!(&s.positive - &s.negative, x);
            for (p, n) in s.positive.iter().zip(s.negative.iter()) {
                prop_assert!(p.is_zero() || n.is_zero());
                prop_assert!(!p.is_negative() && !n.is_negative());
            }
        }

        #[test]
        fn flip_is_involution(xs in proptest::collection::vec(-50i64..50, 1..8), j in 0usize..8) {
            let x = v(&xs);
            let j = j % x.dim();
            prop_assert_eq!(x.with_flipped(j).unwrap().with_flipped(j).unwrap(), x);
        }
    }
}
