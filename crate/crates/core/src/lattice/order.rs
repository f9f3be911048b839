use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::vector::IntVector;
use crate::error::{check_dim, Error, Result};

/// Total order on non-negative integer vectors: compare `c·x` first, then
/// break ties lexicographically (the first differing coordinate decides,
/// larger entry is larger).
///
/// The tie-break normally reads coordinates left to right; elimination
/// orders move one coordinate to the front.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostOrder {
    cost: IntVector,
    priority: Vec<usize>,
}

impl CostOrder {
    /// Rejects costs with negative entries: only then is the order a
    /// well-ordering compatible with addition.
    pub fn new(cost: IntVector) -> Result<Self> {
        let priority = (0..cost.dim()).collect();
        Self::with_priority(cost, priority)
    }

    /// Cost order whose lexicographic tie-break inspects coordinates in the
    /// given sequence, which must be a permutation of `0..dim`.
    pub fn with_priority(cost: IntVector, priority: Vec<usize>) -> Result<Self> {
        if let Some(i) = cost.iter().position(|x| x.is_negative()) {
            return Err(Error::NegativeCost(i));
        }
        check_dim(cost.dim(), priority.len())?;
        let mut seen = vec![false; cost.dim()];
        for &p in &priority {
            if p >= cost.dim() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidInput(format!("tie-break priority {priority:?} is not a permutation")));
            }
        }
        Ok(CostOrder { cost, priority })
    }

    /// Order in which coordinate `j` dominates everything else: cost `e_j`,
    /// tie-break lexicographic with `j` moved to the front.
    pub fn eliminating(dim: usize, j: usize) -> Result<Self> {
        if j >= dim {
            return Err(Error::IndexOutOfRange { index: j, dim });
        }
        let priority = std::iter::once(j).chain((0..dim).filter(|&k| k != j)).collect();
        Self::with_priority(IntVector::unit(dim, j), priority)
    }

    pub fn cost(&self) -> &IntVector {
        &self.cost
    }

    pub fn dim(&self) -> usize {
        self.cost.dim()
    }

    pub fn priority(&self) -> &[usize] {
        &self.priority
    }

    /// Compares two non-negative vectors.
    pub fn compare(&self, u: &IntVector, v: &IntVector) -> Result<Ordering> {
        check_dim(self.dim(), u.dim())?;
        check_dim(self.dim(), v.dim())?;
        if !u.is_nonnegative() || !v.is_nonnegative() {
            return Err(Error::InvalidInput("cost order compares non-negative vectors only".into()));
        }
        Ok(self.sign_of(&(u - v)))
    }

    /// Sign of a difference `t = u - v` in this order: `Greater` iff `u >_c v`.
    /// Because the order is translation invariant this depends on `t` only.
    pub fn sign_of(&self, t: &IntVector) -> Ordering {
        match self.cost.dot(t).cmp(&BigInt::zero()) {
            Ordering::Equal => self.lex_sign(t),
            other => other,
        }
    }

    /// Sign of the first nonzero coordinate of `t` in tie-break sequence.
    pub fn lex_sign(&self, t: &IntVector) -> Ordering {
        for &k in &self.priority {
            let x = &t[k];
            if !x.is_zero() {
                return if x.is_positive() { Ordering::Greater } else { Ordering::Less };
            }
        }
        Ordering::Equal
    }

    /// `true` iff moving from `z` to `z - t` strictly decreases `z`.
    pub fn is_improving(&self, t: &IntVector) -> bool {
        self.sign_of(t) == Ordering::Greater
    }
}

/// Free-function form of [`CostOrder::compare`].
pub fn compare(order: &CostOrder, u: &IntVector, v: &IntVector) -> Result<Ordering> {
    order.compare(u, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(x: &[i64]) -> IntVector {
        IntVector::from(x)
    }

    #[test]
    fn compare_examples() {
        let o = CostOrder::new(v(&[1, 2, 3])).unwrap();
        assert_eq!(o.compare(&v(&[1, 0, 0]), &v(&[0, 1, 0])).unwrap(), Ordering::Less);
        let o = CostOrder::new(v(&[1, 1, 1])).unwrap();
        assert_eq!(o.compare(&v(&[1, 0, 1]), &v(&[0, 2, 0])).unwrap(), Ordering::Greater);
        assert_eq!(o.compare(&v(&[4, 0, 2]), &v(&[4, 0, 2])).unwrap(), Ordering::Equal);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(CostOrder::new(v(&[1, -1])), Err(Error::NegativeCost(1)));
        let o = CostOrder::new(v(&[1, 1])).unwrap();
        assert!(matches!(o.compare(&v(&[1]), &v(&[1, 1])), Err(Error::DimensionMismatch { .. })));
        assert!(o.compare(&v(&[-1, 0]), &v(&[1, 1])).is_err());
        assert!(CostOrder::with_priority(v(&[1, 1]), vec![0, 0]).is_err());
    }

    #[test]
    fn elimination_order_puts_coordinate_first() {
        let o = CostOrder::eliminating(3, 2).unwrap();
        // any positive power of x_2 beats everything without it
        assert_eq!(o.compare(&v(&[0, 0, 1]), &v(&[50, 50, 0])).unwrap(), Ordering::Greater);
        assert_eq!(o.compare(&v(&[1, 0, 0]), &v(&[0, 7, 0])).unwrap(), Ordering::Greater);
    }

    fn nonneg(n: usize) -> impl Strategy<Value = Vec<i64>> {
        proptest::collection::vec(0i64..6, n)
    }

    proptest! {
        #[test]
        fn total_order_axioms(c in nonneg(4), a in nonneg(4), b in nonneg(4), d in nonneg(4)) {
            let o = CostOrder::new(v(&c)).unwrap();
            let (a, b, d) = (v(&a), v(&b), v(&d));
            let ab = o.compare(&a, &b).unwrap();
            prop_assert_eq!(ab.reverse(), o.compare(&b, &a).unwrap());
            prop_assert_eq!(ab == Ordering::Equal, a == b);
            if ab == Ordering::Less && o.compare(&b, &d).unwrap() == Ordering::Less {
                prop_assert_eq!(o.compare(&a, &d).unwrap(), Ordering::Less);
            }
            if o.cost().dot(&a) > o.cost().dot(&b) {
                prop_assert_eq!(ab, Ordering::Greater);
            }
        }

        #[test]
        fn translation_invariant(c in nonneg(4), a in nonneg(4), b in nonneg(4), w in nonneg(4)) {
            let o = CostOrder::new(v(&c)).unwrap();
            let (a, b, w) = (v(&a), v(&b), v(&w));
            prop_assert_eq!(o.compare(&a, &b).unwrap(), o.compare(&(&a + &w), &(&b + &w)).unwrap());
        }
    }
}
