//! Augmentation along a test set, and Phase-I feasibility.

use num_bigint::BigInt;
use num_traits::Signed;

use crate::error::{check_dim, Error, Result};
use crate::groebner;
use crate::lattice::coef::{self, Checked, Coef};
use crate::lattice::{CostOrder, IntMatrix, IntVector, VectorSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentResult {
    pub solution: IntVector,
    /// `c · solution`
    pub value: BigInt,
    /// Number of unit moves `z <- z - t` taken.
    pub steps: u64,
}

/// Improves `z0` along `t` until no element of `t` applies. With a test set
/// for `(A, c)` the result is the optimum of `min c·z, Az = b, z >= 0` under
/// the lexicographic refinement.
///
/// Elements that do not improve the refined order are ignored, so `t` may be
/// an oriented Gröbner basis or a negation-closed Graver basis.
pub fn augment(z0: &IntVector, c: &IntVector, t: &VectorSet, a: &IntMatrix, b: &IntVector) -> Result<AugmentResult> {
    check_dim(a.cols(), z0.dim())?;
    check_dim(a.rows(), b.dim())?;
    if !z0.is_nonnegative() || a.mul_vec(z0)? != *b {
        return Err(Error::InfeasibleStart(format!("{z0} is not a non-negative solution of Az = b")));
    }
    if let Some(bad) = t.iter().find(|v| !a.annihilates(v)) {
        return Err(Error::Precondition(format!("{bad} is not in the kernel")));
    }
    let moves = MoveSet::new(t, CostOrder::new(c.clone())?)?;
    Ok(moves.augment(z0))
}

/// The improving part of a test set, prepared for repeated augmentation
/// under one cost order.
#[derive(Clone, Debug)]
pub struct MoveSet {
    order: CostOrder,
    dim: usize,
    fast: Option<Vec<Move<i64>>>,
    fast_cost: Option<Vec<i64>>,
    slow: Vec<Move<BigInt>>,
}

#[derive(Clone, Debug)]
struct Move<T> {
    /// Nonzero entries.
    entries: Vec<(usize, T)>,
    /// Positive entries, the only ones that can make `z - t` negative.
    positive: Vec<(usize, T)>,
}

impl<T: Coef> Move<T> {
    fn new(v: &IntVector) -> Checked<Self> {
        let mut entries = Vec::new();
        for (i, x) in v.iter().enumerate() {
            if !x.is_zero() {
                entries.push((i, T::from_big(x)?));
            }
        }
        let positive = entries.iter().filter(|(_, x)| x.is_pos()).cloned().collect();
        Ok(Move { entries, positive })
    }
}

impl MoveSet {
    /// Keeps the elements `t` with `c·t > 0`, or `c·t = 0` and `t`
    /// lexicographically positive, in their given order.
    pub fn new(t: &VectorSet, order: CostOrder) -> Result<Self> {
        let dim = order.dim();
        for v in t {
            check_dim(dim, v.dim())?;
        }
        let improving: Vec<&IntVector> = t.iter().filter(|v| order.is_improving(v)).collect();
        let slow = improving.iter().map(|v| Move::new(v).expect("BigInt")).collect();
        let fast = improving.iter().map(|v| Move::new(v)).collect::<Checked<Vec<_>>>().ok();
        let fast_cost = coef::to_coefs(order.cost().entries()).ok();
        Ok(MoveSet { order, dim, fast, fast_cost, slow })
    }

    pub fn order(&self) -> &CostOrder {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.slow.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slow.is_empty()
    }

    /// Augments from `z0`, assumed non-negative and feasible.
    ///
    /// The first applicable move (in stored order) is taken as many times as
    /// it stays applicable, then the scan restarts from the first move.
    pub fn augment(&self, z0: &IntVector) -> AugmentResult {
        assert_eq!(z0.dim(), self.dim, "start point dimension");
        let fast = || -> Checked<(Vec<BigInt>, u64)> {
            let moves = self.fast.as_ref().ok_or(coef::Overflow)?;
            let mut z = coef::to_coefs::<i64>(z0.entries())?;
            let steps = run(moves, &mut z)?;
            Ok((coef::from_coefs(&z), steps))
        };
        let slow = || -> Checked<(Vec<BigInt>, u64)> {
            let mut z = z0.entries().to_vec();
            let steps = run(&self.slow, &mut z)?;
            Ok((z, steps))
        };
        let (z, steps) = coef::with_fallback(fast, slow);
        let solution = IntVector::new(z);
        let value = self.order.cost().dot(&solution);
        AugmentResult { solution, value, steps }
    }

    /// Optimal value from a machine-integer start, augmenting `z` in place;
    /// `None` when some intermediate does not fit.
    pub(crate) fn optimal_value_i64(&self, z: &mut [i64]) -> Option<i64> {
        let (moves, cost) = (self.fast.as_ref()?, self.fast_cost.as_ref()?);
        run(moves, z).ok()?;
        coef::dot(cost, z).ok()
    }
}

fn run<T: Coef>(moves: &[Move<T>], z: &mut [T]) -> Checked<u64> {
    let mut steps = 0u64;
    'scan: loop {
        for m in moves {
            if m.positive.iter().any(|(i, x)| z[*i] < *x) {
                continue;
            }
            let mut k: Option<T> = None;
            for (i, x) in &m.positive {
                let q = z[*i].div_nonneg(x);
                k = Some(match k {
                    Some(k) if k <= q => k,
                    _ => q,
                });
            }
            let Some(k) = k else { continue };
            for (i, x) in &m.entries {
                z[*i] = z[*i].sub(&x.mul(&k)?)?;
            }
            steps = steps.saturating_add(k.to_u64_saturating());
            continue 'scan;
        }
        return Ok(steps);
    }
}

/// A starting point read off unit columns: for every row with `b_r != 0`
/// some column of `A` equals `sign(b_r) e_r`. Returns `None` when a row has
/// no such column.
pub fn unit_column_start(a: &IntMatrix, b: &IntVector) -> Option<IntVector> {
    if b.dim() != a.rows() {
        return None;
    }
    let mut z = vec![BigInt::zero(); a.cols()];
    for r in 0..a.rows() {
        let br = &b[r];
        if br.is_zero() {
            continue;
        }
        let target = if br.is_positive() { BigInt::from(1) } else { BigInt::from(-1) };
        let k = (0..a.cols())
            .find(|&k| (0..a.rows()).all(|i| if i == r { *a.get(i, k) == target } else { a.get(i, k).is_zero() }))?;
        z[k] = br.abs();
    }
    Some(IntVector::new(z))
}

/// Phase-I data for one matrix, reusable across right-hand sides.
///
/// The artificial system is `[A | I | -I] (z, p, q) = b` with cost on
/// `p` and `q`; `(0, b+, b-)` is always feasible, and `Az = b` has a
/// non-negative solution iff the optimum has `p = q = 0`.
#[derive(Clone, Debug)]
pub struct PhaseOne {
    a: IntMatrix,
    extended: IntMatrix,
    moves: MoveSet,
}

impl PhaseOne {
    pub fn new(a: &IntMatrix) -> Result<Self> {
        let (m, n) = (a.rows(), a.cols());
        let mut neg = IntMatrix::zeros(m, m);
        for i in 0..m {
            neg.set(i, i, BigInt::from(-1));
        }
        let extended = a.hstack(&IntMatrix::identity(m))?.hstack(&neg)?;
        let cost: Vec<i64> = (0..n + 2 * m).map(|k| i64::from(k >= n)).collect();
        let gb = groebner::test_set(&extended, &IntVector::from(cost), None)?;
        let moves = MoveSet::new(&gb.elements, gb.order.clone())?;
        Ok(PhaseOne { a: a.clone(), extended, moves })
    }

    /// A non-negative solution of `A z = b`, or `None` when there is none.
    pub fn feasible(&self, b: &IntVector) -> Result<Option<IntVector>> {
        check_dim(self.a.rows(), b.dim())?;
        let (m, n) = (self.a.rows(), self.a.cols());
        let mut start = vec![BigInt::zero(); n + 2 * m];
        for r in 0..m {
            if b[r].is_positive() {
                start[n + r] = b[r].clone();
            } else {
                start[n + m + r] = -&b[r];
            }
        }
        let start = IntVector::new(start);
        debug_assert_eq!(self.extended.mul_vec(&start).ok().as_ref(), Some(b));
        let out = self.moves.augment(&start);
        if out.value.is_zero() {
            Ok(Some(IntVector::new(out.solution.entries()[..n].to_vec())))
        } else {
            Ok(None)
        }
    }
}

/// One-shot Phase-I; see [`PhaseOne`].
pub fn phase_one_feasible(a: &IntMatrix, b: &IntVector) -> Result<Option<IntVector>> {
    PhaseOne::new(a)?.feasible(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graver::graver_basis;
    use crate::groebner::test_set;
    use crate::oracle::{fibers_in_box, solve_bruteforce, IpProblem};
    use proptest::prelude::*;

    fn v(x: &[i64]) -> IntVector {
        IntVector::from(x)
    }

    fn set(vs: &[&[i64]]) -> VectorSet {
        vs.iter().map(|x| v(x)).collect()
    }

    #[test]
    fn three_variable_walk() {
        let a = IntMatrix::from_rows(&[[1, 1, 1]]).unwrap();
        let t = set(&[&[-1, 1, 0], &[0, -1, 1]]);
        let out = augment(&v(&[0, 0, 3]), &v(&[1, 2, 3]), &t, &a, &v(&[3])).unwrap();
        assert_eq!(out.solution, v(&[3, 0, 0]));
        assert_eq!(out.value, BigInt::from(3));
        assert_eq!(out.steps, 6);
    }

    #[test]
    fn trivial_cases() {
        let a = IntMatrix::from_rows(&[[1, 1, 1]]).unwrap();
        let out = augment(&v(&[0, 2, 1]), &v(&[1, 2, 3]), &VectorSet::new(), &a, &v(&[3])).unwrap();
        assert_eq!((out.solution, out.steps), (v(&[0, 2, 1]), 0));
        let t = set(&[&[-1, 1, 0], &[0, -1, 1]]);
        let out = augment(&v(&[3, 0, 0]), &v(&[1, 2, 3]), &t, &a, &v(&[3])).unwrap();
        assert_eq!((out.solution, out.steps), (v(&[3, 0, 0]), 0));
    }

    #[test]
    fn rejects_bad_starts() {
        let a = IntMatrix::from_rows(&[[1, 1, 1]]).unwrap();
        let t = VectorSet::new();
        assert!(matches!(augment(&v(&[1, 1, 0]), &v(&[1, 1, 1]), &t, &a, &v(&[3])), Err(Error::InfeasibleStart(_))));
        assert!(matches!(augment(&v(&[4, -1, 0]), &v(&[1, 1, 1]), &t, &a, &v(&[3])), Err(Error::InfeasibleStart(_))));
        assert!(matches!(augment(&v(&[3, 0]), &v(&[1, 1, 1]), &t, &a, &v(&[3])), Err(Error::DimensionMismatch { .. })));
        assert!(augment(&v(&[3, 0, 0]), &v(&[1, 1, 1]), &set(&[&[1, 0, 0]]), &a, &v(&[3])).is_err());
    }

    #[test]
    fn phase_one_examples() {
        let a = IntMatrix::from_rows(&[[1, 1, 1]]).unwrap();
        let z = phase_one_feasible(&a, &v(&[3])).unwrap().unwrap();
        assert!(z.is_nonnegative());
        assert_eq!(a.mul_vec(&z).unwrap(), v(&[3]));
        assert_eq!(phase_one_feasible(&a, &v(&[0])).unwrap(), Some(v(&[0, 0, 0])));
        assert_eq!(phase_one_feasible(&IntMatrix::from_rows(&[[2]]).unwrap(), &v(&[3])).unwrap(), None);
        let a = IntMatrix::from_rows(&[[1, -1, 0], [0, 1, 1]]).unwrap();
        assert_eq!(phase_one_feasible(&a, &v(&[-2, 1])).unwrap(), None);
        let z = phase_one_feasible(&a, &v(&[-1, 3])).unwrap().unwrap();
        assert_eq!(a.mul_vec(&z).unwrap(), v(&[-1, 3]));
    }

    #[test]
    fn unit_columns() {
        let w = IntMatrix::from_rows(&[
            [1, 0, 1, 0, -1, 0, 0, 0],
            [0, 1, 0, 1, 0, -1, 0, 0],
            [2, 1, 0, 0, 0, 0, 1, 0],
            [1, 2, 0, 0, 0, 0, 0, 1],
        ])
        .unwrap();
        assert_eq!(unit_column_start(&w, &v(&[5, 7, 4, 6])), Some(v(&[0, 0, 5, 7, 0, 0, 4, 6])));
        assert_eq!(unit_column_start(&w, &v(&[-4, 7, 4, 6])), Some(v(&[0, 0, 0, 7, 4, 0, 4, 6])));
        assert_eq!(unit_column_start(&w, &v(&[1, 1, -1, 0])), None);
    }

    fn small_matrix() -> impl Strategy<Value = IntMatrix> {
        (1usize..=2, 3usize..=4).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(0i64..=3, c), r).prop_filter_map(
                "zero column",
                move |rows| {
                    let a = IntMatrix::from_rows(&rows).unwrap();
                    (0..c).all(|k| !a.column(k).is_zero()).then_some(a)
                },
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn reaches_oracle_optimum_from_every_start(a in small_matrix(), c in proptest::collection::vec(0i64..6, 4)) {
            let c = v(&c[..a.cols()]);
            let gb = test_set(&a, &c, None).unwrap();
            let graver = graver_basis(&a).unwrap();
            let by_gb = MoveSet::new(&gb.elements, gb.order.clone()).unwrap();
            let by_graver = MoveSet::new(&graver.elements, gb.order.clone()).unwrap();
            for fiber in fibers_in_box(&a, 4).unwrap() {
                let p = IpProblem::new(a.clone(), fiber.rhs.clone(), c.clone(), 4).unwrap();
                let best = solve_bruteforce(&p).unwrap().solution.unwrap();
                for z in &fiber.points {
                    prop_assert_eq!(&by_gb.augment(z).solution, &best);
                    prop_assert_eq!(&by_graver.augment(z).solution, &best);
                }
            }
        }
    }
}
