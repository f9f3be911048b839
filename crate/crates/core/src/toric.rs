//! Generating sets of toric ideals by sign reversal and elimination.
//!
//! Start from a lattice basis of `ker A` in which every vector lies in one
//! common orthant. Reversing the negative coordinates `J` makes the basis
//! non-negative, and for such a basis the binomials `x^b - 1` already
//! generate the lattice ideal. Each `j` in `J` is then undone by a Gröbner
//! basis under an order that eliminates `x_j`, followed by flipping
//! coordinate `j` back.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Result;
use crate::groebner;
use crate::lattice::{kernel_basis, CostOrder, IntMatrix, IntVector, VectorSet};

/// Kernel vectors whose binomials generate the toric ideal of `matrix`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricGenerators {
    pub matrix: IntMatrix,
    /// Sign-normalized, sorted.
    pub generators: VectorSet,
}

/// `v` with coordinate `j` negated.
pub fn flip_coordinate(v: &IntVector, j: usize) -> Result<IntVector> {
    v.with_flipped(j)
}

pub fn toric_generating_set(a: &IntMatrix) -> ToricGenerators {
    let n = a.cols();
    let basis: Vec<Vec<BigInt>> = kernel_basis(a).into_iter().map(IntVector::into_entries).collect();
    let basis = common_orthant(basis);

    let flipped: Vec<usize> = (0..n).filter(|&k| basis.iter().any(|b| b[k].is_negative())).collect();
    let mut gens: VectorSet = basis
        .into_iter()
        .map(|mut b| {
            for &k in &flipped {
                b[k] = -&b[k];
            }
            IntVector::new(b)
        })
        .collect();

    for &j in &flipped {
        let order = CostOrder::eliminating(n, j).expect("index in range");
        let gb = groebner::buchberger(&gens, &order).expect("dimensions agree");
        gens = gb.elements.iter().map(|g| g.with_flipped(j).expect("index in range")).collect();
    }

    let mut out: Vec<IntVector> = gens.iter().map(IntVector::sign_normalized).collect();
    out.sort();
    out.dedup();
    ToricGenerators { matrix: a.clone(), generators: out.into_iter().collect() }
}

/// Coordinates on which the basis has both signs.
fn mixed(basis: &[Vec<BigInt>]) -> usize {
    let n = basis.first().map_or(0, Vec::len);
    (0..n).filter(|&k| basis.iter().any(|b| b[k].is_positive()) && basis.iter().any(|b| b[k].is_negative())).count()
}

/// An equivalent basis with a common sign pattern.
///
/// Cheap unimodular moves are tried first. If mixed coordinates remain, the
/// basis is rebuilt around a lattice vector `w` with full support: `w` is
/// extended to a basis and every other member gets a large enough multiple
/// of `w` added, which pushes it into the orthant of `w`.
fn common_orthant(mut basis: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let k = basis.len();
    if k == 0 {
        return basis;
    }
    let mut best = mixed(&basis);
    let mut improved = true;
    while best > 0 && improved {
        improved = false;
        for i in 0..k {
            let negated: Vec<BigInt> = basis[i].iter().map(|x| -x).collect();
            let old = std::mem::replace(&mut basis[i], negated);
            let score = mixed(&basis);
            if score < best {
                best = score;
                improved = true;
            } else {
                basis[i] = old;
            }
            for l in (0..k).filter(|&l| l != i) {
                for s in [1i32, -1] {
                    let cand: Vec<BigInt> = basis[i].iter().zip(&basis[l]).map(|(x, y)| x + y * s).collect();
                    let old = std::mem::replace(&mut basis[i], cand);
                    let score = mixed(&basis);
                    if score < best {
                        best = score;
                        improved = true;
                    } else {
                        basis[i] = old;
                    }
                }
            }
        }
    }
    if best == 0 {
        return basis;
    }
    around_generic_vector(basis)
}

fn around_generic_vector(mut basis: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let k = basis.len();
    let n = basis[0].len();
    let support: Vec<usize> = (0..n).filter(|&c| basis.iter().any(|b| !b[c].is_zero())).collect();

    // w(t) = sum t^i b_i; each supported coordinate is a nonzero polynomial
    // of degree < k in t, so some t in 1..=k avoids all roots.
    let (mut lambda, w) = (1..=k as u64 + 1)
        .map(|t| {
            let t = BigInt::from(t);
            let mut lambda = Vec::with_capacity(k);
            let mut p = BigInt::one();
            for _ in 0..k {
                lambda.push(p.clone());
                p *= &t;
            }
            let w = combine(&basis, &lambda);
            (lambda, w)
        })
        .find(|(_, w)| support.iter().all(|&c| !w[c].is_zero()))
        .expect("a generic combination exists");

    // Euclid on lambda while keeping w = sum lambda_i b_i:
    // b_i += q b_l  <=>  lambda_l -= q lambda_i
    loop {
        let nonzero: Vec<usize> = (0..k).filter(|&i| !lambda[i].is_zero()).collect();
        if nonzero.len() == 1 {
            break;
        }
        let i = *nonzero.iter().min_by_key(|&&i| lambda[i].abs()).expect("nonempty");
        for &l in nonzero.iter().filter(|&&l| l != i) {
            let q = lambda[l].div_floor(&lambda[i]);
            let step = &q * &lambda[i];
            lambda[l] -= step;
            let bl = basis[l].clone();
            for (x, y) in basis[i].iter_mut().zip(&bl) {
                *x += &q * y;
            }
        }
    }
    let p = (0..k).find(|&i| !lambda[i].is_zero()).expect("lambda is primitive");
    debug_assert!(lambda[p].abs().is_one());

    // choose the orientation of w with fewer negative coordinates
    let w = if w.iter().filter(|x| x.is_negative()).count() * 2 > support.len() {
        w.iter().map(|x| -x).collect()
    } else {
        w
    };
    for (i, b) in basis.iter_mut().enumerate() {
        if i == p {
            continue;
        }
        let m = support
            .iter()
            .filter(|&&c| !b[c].is_zero() && b[c].is_negative() != w[c].is_negative())
            .map(|&c| b[c].abs().div_ceil(&w[c].abs()))
            .max()
            .unwrap_or_else(BigInt::zero);
        for (x, y) in b.iter_mut().zip(&w) {
            *x += &m * y;
        }
    }
    basis[p] = w;
    basis
}

fn combine(basis: &[Vec<BigInt>], lambda: &[BigInt]) -> Vec<BigInt> {
    let n = basis[0].len();
    let mut w = vec![BigInt::zero(); n];
    for (b, l) in basis.iter().zip(lambda) {
        for (x, y) in w.iter_mut().zip(b) {
            *x += l * y;
        }
    }
    w
}
