//! Graver bases by completion, and the block decomposition for two-stage
//! stochastic programs.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::BigInt;

use crate::error::{check_dim, Error, Result};
use crate::groebner::GroebnerBasis;
use crate::lattice::coef::{self, Coef, Overflow};
use crate::lattice::{kernel_basis, IntMatrix, IntVector, VectorSet};

/// Default element cap for [`graver_basis`].
pub const DEFAULT_MAX_ELEMENTS: usize = 250_000;

/// The `⊑`-minimal nonzero kernel vectors of `matrix`, closed under
/// negation and sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraverBasis {
    pub matrix: IntMatrix,
    pub elements: VectorSet,
}

impl GraverBasis {
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

pub fn graver_basis(a: &IntMatrix) -> Result<GraverBasis> {
    graver_basis_capped(a, DEFAULT_MAX_ELEMENTS)
}

/// Completion procedure: starting from a lattice basis and its negation,
/// sums of pairs are reduced by conformal subtraction and every nonzero
/// remainder joins the set. The fixed point contains the Graver basis, which
/// is then cut out as the set of `⊑`-minimal elements.
///
/// Fails with [`Error::ResourceLimit`] once more than `max_elements`
/// intermediate vectors are held.
pub fn graver_basis_capped(a: &IntMatrix, max_elements: usize) -> Result<GraverBasis> {
    let basis = kernel_basis(a).to_vec();
    let elements = match complete::<i64>(&basis, max_elements) {
        Ok(v) => v,
        Err(Stop::Overflow) => match complete::<BigInt>(&basis, max_elements) {
            Ok(v) => v,
            Err(Stop::Overflow) => unreachable!("BigInt arithmetic does not overflow"),
            Err(Stop::Cap) => return Err(cap_error(max_elements)),
        },
        Err(Stop::Cap) => return Err(cap_error(max_elements)),
    };
    Ok(GraverBasis { matrix: a.clone(), elements: elements.into_iter().map(IntVector::new).collect() })
}

fn cap_error(max: usize) -> Error {
    Error::ResourceLimit(format!("Graver completion exceeded {max} elements"))
}

enum Stop {
    Overflow,
    Cap,
}

impl From<Overflow> for Stop {
    fn from(_: Overflow) -> Self {
        Stop::Overflow
    }
}

struct Elem<T> {
    v: Vec<T>,
    pos: u64,
    neg: u64,
    norm: T,
}

impl<T: Coef> Elem<T> {
    fn new(v: Vec<T>) -> std::result::Result<Self, Overflow> {
        let (pos, neg) = coef::sign_masks(&v);
        let mut norm = T::zero();
        for x in &v {
            norm = if x.is_neg() { norm.sub(x)? } else { norm.add(x)? };
        }
        Ok(Elem { v, pos, neg, norm })
    }

    /// `self ⊑ other`
    fn conforms_to(&self, other: &[T], pos: u64, neg: u64) -> bool {
        self.pos & !pos == 0
            && self.neg & !neg == 0
            && self.v.iter().zip(other).all(|(x, y)| match x.sign() {
                std::cmp::Ordering::Equal => true,
                std::cmp::Ordering::Greater => y >= x,
                std::cmp::Ordering::Less => y <= x,
            })
    }
}

/// Sums of sign-compatible vectors reduce to zero, so such pairs are skipped.
fn sign_compatible<T>(f: &Elem<T>, g: &Elem<T>) -> bool {
    f.pos & g.neg == 0 && f.neg & g.pos == 0
}

fn complete<T: Coef>(basis: &[IntVector], cap: usize) -> std::result::Result<Vec<Vec<BigInt>>, Stop> {
    let mut set: Vec<Elem<T>> = Vec::new();
    for b in basis {
        let v: Vec<T> = coef::to_coefs(b.entries())?;
        set.push(Elem::new(coef::neg_vec(&v)?)?);
        set.push(Elem::new(v)?);
    }
    let mut pairs: BinaryHeap<Reverse<(T, usize, usize)>> = BinaryHeap::new();
    for j in 0..set.len() {
        for i in 0..j {
            push_pair(&set, &mut pairs, i, j)?;
        }
    }
    while let Some(Reverse((_, i, j))) = pairs.pop() {
        let mut s = coef::add_vec(&set[i].v, &set[j].v)?;
        // conformal normal form
        loop {
            if s.iter().all(Coef::is_zero) {
                break;
            }
            let (pos, neg) = coef::sign_masks(&s);
            let Some(h) = set.iter().find(|h| h.conforms_to(&s, pos, neg)) else {
                break;
            };
            s = coef::sub_vec(&s, &h.v)?;
        }
        if s.iter().all(Coef::is_zero) {
            continue;
        }
        if set.len() >= cap {
            return Err(Stop::Cap);
        }
        set.push(Elem::new(s)?);
        let j = set.len() - 1;
        for i in 0..j {
            push_pair(&set, &mut pairs, i, j)?;
        }
    }
    Ok(minimal(set))
}

fn push_pair<T: Coef>(
    set: &[Elem<T>],
    pairs: &mut BinaryHeap<Reverse<(T, usize, usize)>>,
    i: usize,
    j: usize,
) -> std::result::Result<(), Overflow> {
    let (f, g) = (&set[i], &set[j]);
    if sign_compatible(f, g) {
        return Ok(());
    }
    pairs.push(Reverse((f.norm.add(&g.norm)?, i, j)));
    Ok(())
}

/// `⊑`-minimal members, sorted. Anything below a minimal element is
/// itself minimal, so scanning by increasing 1-norm against the kept
/// elements suffices.
fn minimal<T: Coef>(mut set: Vec<Elem<T>>) -> Vec<Vec<BigInt>> {
    set.sort_by(|a, b| a.norm.cmp(&b.norm));
    let mut kept: Vec<Elem<T>> = Vec::new();
    for e in set {
        if !kept.iter().any(|k| k.conforms_to(&e.v, e.pos, e.neg)) {
            kept.push(e);
        }
    }
    let mut out: Vec<Vec<BigInt>> = kept.iter().map(|e| coef::from_coefs(&e.v)).collect();
    out.sort();
    out
}

/// Whether every element of `g` lies in `graver` up to sign.
pub fn contains_groebner(g: &GroebnerBasis, graver: &GraverBasis) -> Result<bool> {
    if let Some(m) = &g.matrix {
        if m != &graver.matrix {
            return Err(Error::InvalidInput("Gröbner and Graver bases belong to different matrices".into()));
        }
    }
    for t in g.iter() {
        check_dim(graver.matrix.cols(), t.dim())?;
    }
    Ok(g.iter().all(|t| graver.elements.contains(t) || graver.elements.contains(&-t)))
}

/// Blocks of the two-stage matrix
///
/// ```text
/// A_N = [ A  0  0 ... 0 ]
///       [ T  W  0 ... 0 ]
///       [ T  0  W ... 0 ]
///       [ ...           ]
///       [ T  0  0 ... W ]
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SipBlockStructure {
    pub first_stage: IntMatrix,
    pub technology: IntMatrix,
    pub recourse: IntMatrix,
    pub scenarios: usize,
}

impl SipBlockStructure {
    pub fn new(first_stage: IntMatrix, technology: IntMatrix, recourse: IntMatrix, scenarios: usize) -> Result<Self> {
        check_dim(first_stage.cols(), technology.cols())?;
        check_dim(technology.rows(), recourse.rows())?;
        if scenarios == 0 {
            return Err(Error::InvalidInput("at least one scenario is required".into()));
        }
        Ok(SipBlockStructure { first_stage, technology, recourse, scenarios })
    }

    /// `A_N` for `n` scenario blocks.
    pub fn stacked_with(&self, n: usize) -> IntMatrix {
        let (a, t, w) = (&self.first_stage, &self.technology, &self.recourse);
        let mut out = IntMatrix::zeros(a.rows() + n * w.rows(), a.cols() + n * w.cols());
        out.place(0, 0, a);
        for k in 0..n {
            let r0 = a.rows() + k * w.rows();
            out.place(r0, 0, t);
            out.place(r0, a.cols() + k * w.cols(), w);
        }
        out
    }

    pub fn stacked(&self) -> IntMatrix {
        self.stacked_with(self.scenarios)
    }
}

/// Graver basis of `A_N` assembled from the Graver basis of `A_1`.
///
/// When `A` has trivial rational kernel every Graver element of `A_N` has
/// zero first-stage part and exactly one nonzero scenario block, and those
/// blocks are the recourse parts of the elements of `A_1`'s basis.
pub fn lift_sip_graver(gamma1: &GraverBasis, s: &SipBlockStructure) -> Result<GraverBasis> {
    let a = &s.first_stage;
    if a.rank() != a.cols() {
        return Err(Error::Precondition("first-stage matrix has a nontrivial kernel".into()));
    }
    if gamma1.matrix != s.stacked_with(1) {
        return Err(Error::Precondition("basis does not belong to the one-scenario matrix".into()));
    }
    let (d, m) = (a.cols(), s.recourse.cols());
    let mut out = Vec::new();
    for g in gamma1.iter() {
        if g.entries()[..d].iter().any(|x| x != &BigInt::from(0)) {
            return Err(Error::Precondition(format!("{g} has a nonzero first-stage part")));
        }
        for k in 0..s.scenarios {
            let mut v = vec![BigInt::from(0); d + s.scenarios * m];
            v[d + k * m..d + (k + 1) * m].clone_from_slice(&g.entries()[d..]);
            out.push(IntVector::new(v));
        }
    }
    out.sort();
    Ok(GraverBasis { matrix: s.stacked(), elements: out.into_iter().collect() })
}
