//! Buchberger completion on kernel vectors.
//!
//! A vector `g` stands for the binomial `x^{g+} - x^{g-}`; it is kept
//! oriented so that `g+` is the larger monomial in the cost order. Reducing
//! the leading monomial of `r` by `g` is `r - g` (common factors of the two
//! monomials cancel, which is harmless because lattice ideals are
//! saturated), and the S-vector of `g`, `h` is `h - g`.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::error::{check_dim, Error, Result};
use crate::lattice::coef::{self, Checked, Coef};
use crate::lattice::{CostOrder, IntMatrix, IntVector, VectorSet};
use crate::toric;

/// Reduced Gröbner basis of a lattice ideal for one cost order. Read as
/// vectors, its elements form a minimal test set for `min c·z, Az = b, z >= 0`
/// over all `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerBasis {
    /// The matrix whose kernel the basis lives in, when known.
    pub matrix: Option<IntMatrix>,
    pub order: CostOrder,
    /// Oriented (`g+ >_c g-`) and sorted.
    pub elements: VectorSet,
}

impl GroebnerBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &IntVector> {
        self.elements.iter()
    }
}

/// `v` or `-v`, whichever has its positive part on top.
pub fn orient(v: &IntVector, order: &CostOrder) -> Result<IntVector> {
    check_dim(order.dim(), v.dim())?;
    match order.sign_of(v) {
        Ordering::Equal => Err(Error::ZeroVector),
        Ordering::Greater => Ok(v.clone()),
        Ordering::Less => Ok(-v),
    }
}

/// Reduces the leading part of `v` by the leading parts of `g` until none
/// divides it. Returns the zero vector when `v` reduces away.
pub fn normal_form(v: &IntVector, g: &VectorSet, order: &CostOrder) -> Result<IntVector> {
    check_dim(order.dim(), v.dim())?;
    for h in g {
        check_dim(order.dim(), h.dim())?;
        if order.sign_of(h) != Ordering::Greater {
            return Err(Error::Precondition(format!("{h} is not oriented")));
        }
    }
    if v.is_zero() {
        return Ok(v.clone());
    }
    let v = orient(v, order)?;
    let engine = Engine::<num_bigint::BigInt>::new(order).expect("BigInt");
    let basis: Vec<Elem<_>> = g.iter().map(|h| Elem::new(h.entries().to_vec())).collect();
    let r = engine.reduce_lead(v.into_entries(), &basis).expect("BigInt");
    Ok(r.map(IntVector::new).unwrap_or_else(|| IntVector::zeros(order.dim())))
}

/// Completes `seed` to the reduced Gröbner basis of the lattice ideal it
/// generates. Zero vectors in the seed are ignored.
pub fn buchberger(seed: &VectorSet, order: &CostOrder) -> Result<GroebnerBasis> {
    for s in seed {
        check_dim(order.dim(), s.dim())?;
    }
    let seed: Vec<&IntVector> = seed.iter().filter(|s| !s.is_zero()).collect();
    let elements =
        coef::with_fallback(|| complete::<i64>(&seed, order), || complete::<num_bigint::BigInt>(&seed, order));
    Ok(GroebnerBasis {
        matrix: None,
        order: order.clone(),
        elements: elements.into_iter().map(IntVector::new).collect(),
    })
}

/// Minimal test set for the family `min c·z, Az = b, z >= 0`. Without a seed
/// the toric generating set of `A` is computed first.
pub fn test_set(a: &IntMatrix, c: &IntVector, seed: Option<&VectorSet>) -> Result<GroebnerBasis> {
    check_dim(a.cols(), c.dim())?;
    let order = CostOrder::new(c.clone())?;
    let mut gb = match seed {
        Some(s) => {
            if let Some(bad) = s.iter().find(|v| !a.annihilates(v)) {
                return Err(Error::Precondition(format!("seed vector {bad} is not in the kernel")));
            }
            buchberger(s, &order)?
        }
        None => buchberger(&toric::toric_generating_set(a).generators, &order)?,
    };
    gb.matrix = Some(a.clone());
    Ok(gb)
}

pub(crate) struct Elem<T> {
    pub(crate) v: Vec<T>,
    pub(crate) pos: u64,
    pub(crate) neg: u64,
}

impl<T: Coef> Elem<T> {
    pub(crate) fn new(v: Vec<T>) -> Self {
        let (pos, neg) = coef::sign_masks(&v);
        Elem { v, pos, neg }
    }
}

/// `g+ <= r+` componentwise.
fn lead_divides<T: Coef>(g: &Elem<T>, r: &[T], r_pos: u64) -> bool {
    g.pos & !r_pos == 0 && g.v.iter().zip(r).all(|(x, y)| !x.is_pos() || y >= x)
}

/// `h+ <= g-` componentwise.
fn lead_divides_trail<T: Coef>(h: &Elem<T>, g: &Elem<T>) -> bool {
    h.pos & !g.neg == 0 && h.v.iter().zip(&g.v).all(|(x, y)| !x.is_pos() || y.neg().is_ok_and(|ny| &ny >= x))
}

pub(crate) struct Engine<T> {
    cost: Vec<T>,
    priority: Vec<usize>,
}

impl<T: Coef> Engine<T> {
    pub(crate) fn new(order: &CostOrder) -> Checked<Self> {
        Ok(Engine { cost: coef::to_coefs(order.cost().entries())?, priority: order.priority().to_vec() })
    }

    fn sign(&self, v: &[T]) -> Checked<Ordering> {
        Ok(match coef::dot(&self.cost, v)?.sign() {
            Ordering::Equal => {
                self.priority.iter().map(|&k| v[k].sign()).find(|s| *s != Ordering::Equal).unwrap_or(Ordering::Equal)
            }
            s => s,
        })
    }

    /// `None` for the zero vector.
    fn orient(&self, v: Vec<T>) -> Checked<Option<Vec<T>>> {
        Ok(match self.sign(&v)? {
            Ordering::Equal => None,
            Ordering::Greater => Some(v),
            Ordering::Less => Some(coef::neg_vec(&v)?),
        })
    }

    /// Leading-part reduction of an oriented vector.
    fn reduce_lead(&self, mut r: Vec<T>, basis: &[Elem<T>]) -> Checked<Option<Vec<T>>> {
        loop {
            let (r_pos, _) = coef::sign_masks(&r);
            let Some(g) = basis.iter().find(|g| lead_divides(g, &r, r_pos)) else {
                return Ok(Some(r));
            };
            match self.orient(coef::sub_vec(&r, &g.v)?)? {
                Some(next) => r = next,
                None => return Ok(None),
            }
        }
    }

    /// Priority key of the monomial `max(g+, h+)`: cost first, then the
    /// tie-break sequence.
    fn lcm_key(&self, g: &[T], h: &[T]) -> Checked<(T, Vec<T>)> {
        let m: Vec<T> = g
            .iter()
            .zip(h)
            .map(|(x, y)| {
                let x = if x.is_pos() { x.clone() } else { T::zero() };
                let y = if y.is_pos() { y.clone() } else { T::zero() };
                x.max(y)
            })
            .collect();
        let c = coef::dot(&self.cost, &m)?;
        Ok((c, self.priority.iter().map(|&k| m[k].clone()).collect()))
    }
}

type PairKey<T> = Reverse<(T, Vec<T>, usize, usize)>;

fn complete<T: Coef>(seed: &[&IntVector], order: &CostOrder) -> Checked<Vec<Vec<num_bigint::BigInt>>> {
    let engine = Engine::<T>::new(order)?;
    let mut basis: Vec<Elem<T>> = Vec::new();
    let mut pairs: BinaryHeap<PairKey<T>> = BinaryHeap::new();

    let add = |basis: &mut Vec<Elem<T>>, pairs: &mut BinaryHeap<PairKey<T>>, v: Vec<T>| -> Checked<()> {
        let new = Elem::new(v);
        let j = basis.len();
        for (i, g) in basis.iter().enumerate() {
            // coprime leading monomials: the S-vector reduces to zero
            if g.pos & new.pos == 0 || g.v.iter().zip(&new.v).all(|(x, y)| !(x.is_pos() && y.is_pos())) {
                continue;
            }
            let (c, m) = engine.lcm_key(&g.v, &new.v)?;
            pairs.push(Reverse((c, m, i, j)));
        }
        basis.push(new);
        Ok(())
    };

    for s in seed {
        let v = engine.orient(coef::to_coefs(s.entries())?)?.expect("nonzero seed");
        if let Some(r) = engine.reduce_lead(v, &basis)? {
            add(&mut basis, &mut pairs, r)?;
        }
    }
    while let Some(Reverse((_, _, i, j))) = pairs.pop() {
        let Some(s) = engine.orient(coef::sub_vec(&basis[j].v, &basis[i].v)?)? else {
            continue;
        };
        if let Some(r) = engine.reduce_lead(s, &basis)? {
            add(&mut basis, &mut pairs, r)?;
        }
    }
    let reduced = interreduce(&engine, basis)?;
    let mut out: Vec<Vec<num_bigint::BigInt>> = reduced.iter().map(|e| coef::from_coefs(&e.v)).collect();
    out.sort();
    Ok(out)
}

/// Minimal leading parts, then fully reduced trailing parts: the unique
/// reduced basis.
fn interreduce<T: Coef>(engine: &Engine<T>, basis: Vec<Elem<T>>) -> Checked<Vec<Elem<T>>> {
    let n = basis.len();
    let mut keep = vec![true; n];
    for i in 0..n {
        for j in 0..n {
            if i == j || !keep[j] {
                continue;
            }
            let (gi, gj) = (&basis[i], &basis[j]);
            if lead_divides(gj, &gi.v, gi.pos) {
                let same = gj.pos == gi.pos && lead_divides(gi, &gj.v, gj.pos);
                // equal leading parts: keep the earlier element only
                if !same || j < i {
                    keep[i] = false;
                    break;
                }
            }
        }
    }
    let minimal: Vec<Elem<T>> = basis.into_iter().zip(keep).filter(|(_, k)| *k).map(|(e, _)| e).collect();
    let mut out = Vec::with_capacity(minimal.len());
    for (i, g) in minimal.iter().enumerate() {
        let mut cur = Elem::new(g.v.clone());
        while let Some(h) =
            minimal.iter().enumerate().find(|(k, h)| *k != i && lead_divides_trail(h, &cur)).map(|(_, h)| h)
        {
            cur = Elem::new(coef::add_vec(&cur.v, &h.v)?);
        }
        debug_assert_eq!(engine.sign(&cur.v)?, Ordering::Greater);
        out.push(cur);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(x: &[i64]) -> IntVector {
        IntVector::from(x)
    }

    fn order(c: &[i64]) -> CostOrder {
        CostOrder::new(v(c)).unwrap()
    }

    fn set(vs: &[&[i64]]) -> VectorSet {
        vs.iter().map(|x| v(x)).collect()
    }

    #[test]
    fn orient_examples() {
        assert_eq!(orient(&v(&[1, -1, 0]), &order(&[1, 2, 3])).unwrap(), v(&[-1, 1, 0]));
        assert_eq!(orient(&v(&[1, -1]), &order(&[3, 1])).unwrap(), v(&[1, -1]));
        let o = order(&[0, 0, 0]);
        let once = orient(&v(&[0, -2, 1]), &o).unwrap();
        assert_eq!(orient(&once, &o).unwrap(), once);
        assert_eq!(orient(&v(&[0, 0]), &order(&[1, 1])), Err(Error::ZeroVector));
    }

    #[test]
    fn normal_form_examples() {
        let o = order(&[1, 2, 3]);
        let g = set(&[&[-1, 1, 0]]);
        assert_eq!(normal_form(&v(&[-3, 3, 0]), &g, &o).unwrap(), v(&[0, 0, 0]));
        assert_eq!(normal_form(&v(&[-1, 0, 1]), &g, &o).unwrap(), v(&[-1, 0, 1]));
        assert_eq!(normal_form(&v(&[-1, 1, 0]), &g, &o).unwrap(), v(&[0, 0, 0]));
        assert!(normal_form(&v(&[1, -1, 0]), &set(&[&[1, -1, 0]]), &o).is_err());
    }

    #[test]
    fn buchberger_examples() {
        let o = order(&[1, 2, 3]);
        // the trailing x_2 of (0,-1,1) is reducible, so it becomes (-1,0,1)
        let gb = buchberger(&set(&[&[-1, 1, 0], &[0, -1, 1]]), &o).unwrap();
        assert_eq!(gb.elements.sorted(), vec![v(&[-1, 0, 1]), v(&[-1, 1, 0])]);
        let gb = buchberger(&set(&[&[2, -1, 0]]), &o).unwrap();
        assert_eq!(gb.elements.sorted(), vec![orient(&v(&[2, -1, 0]), &o).unwrap()]);
        assert!(buchberger(&set(&[&[1, 2]]), &o).is_err());
    }

    #[test]
    fn test_set_examples() {
        let gb = test_set(&IntMatrix::from_rows(&[[1, 1, 1]]).unwrap(), &v(&[1, 2, 3]), None).unwrap();
        assert_eq!(gb.elements.sorted(), vec![v(&[-1, 0, 1]), v(&[-1, 1, 0])]);
        assert!(test_set(&IntMatrix::identity(2), &v(&[4, 1]), None).unwrap().is_empty());
        let a = IntMatrix::from_rows(&[[1, 2]]).unwrap();
        let gb = test_set(&a, &v(&[1, 1]), None).unwrap();
        assert_eq!(gb.elements.sorted(), vec![v(&[2, -1])]);
        // every non-optimal point of every fiber b <= 10 can move
        for b in 0..=10i64 {
            let pts: Vec<IntVector> = (0..=b).filter(|y| 2 * y <= b).map(|y| v(&[b - 2 * y, y])).collect();
            let best = pts.iter().min_by_key(|p| (p.dot(&v(&[1, 1])), (*p).clone())).unwrap();
            for p in pts.iter().filter(|p| *p != best) {
                assert!(gb.iter().any(|t| (p - t).is_nonnegative()), "{p} stuck");
            }
        }
    }

    #[test]
    fn big_coefficients_fall_back() {
        let huge = 1i64 << 61;
        let a = IntMatrix::from_rows(&[[1, 2, 3]]).unwrap();
        let gb = test_set(&a, &v(&[huge, huge, 3]), None).unwrap();
        let fast = test_set(&a, &v(&[4, 4, 3]), None).unwrap();
        // the costs rank the same monomials identically
        assert_eq!(gb.elements.sorted(), fast.elements.sorted());
        for g in gb.iter() {
            assert!(a.annihilates(g));
            assert!(gb.order.is_improving(g));
        }
        assert!(!gb.is_empty());
    }

    #[test]
    fn reduced_and_oriented() {
        let a = IntMatrix::from_rows(&[[1, 2, 3, 4], [0, 1, 1, 2]]).unwrap();
        let gb = test_set(&a, &v(&[3, 0, 2, 1]), None).unwrap();
        let els = gb.elements.to_vec();
        for g in &els {
            assert!(a.annihilates(g));
            assert!(gb.order.is_improving(g));
            let gs = g.sign_split();
            for h in els.iter().filter(|h| *h != g) {
                let hp = h.sign_split().positive;
                assert!(!hp.le_componentwise(&gs.positive));
                assert!(!hp.le_componentwise(&gs.negative));
            }
        }
    }

    fn small_matrix() -> impl Strategy<Value = IntMatrix> {
        (1usize..=2, 3usize..=5).prop_flat_map(|(r, c)| {
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
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn seed_order_does_not_matter(a in small_matrix(), c in proptest::collection::vec(0i64..8, 5), seed in any::<u64>()) {
            let c = v(&c[..a.cols()]);
            let o = CostOrder::new(c).unwrap();
            let gens = toric::toric_generating_set(&a).generators.to_vec();
            let base = buchberger(&gens.iter().cloned().collect(), &o).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut shuffled = gens.clone();
            shuffled.shuffle(&mut rng);
            // negated seeds describe the same ideal
            let shuffled: VectorSet = shuffled.iter().enumerate().map(|(i, g)| if i % 2 == 0 { -g } else { g.clone() }).collect();
            prop_assert_eq!(buchberger(&shuffled, &o).unwrap().elements.sorted(), base.elements.sorted());
            for g in base.iter() {
                prop_assert!(a.annihilates(g));
                prop_assert!(o.cost().dot(g) >= num_bigint::BigInt::from(0));
                prop_assert!(o.is_improving(g));
            }
        }
    }
}
