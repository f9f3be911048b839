//! Integer kernel lattices via unimodular column reduction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;
use super::vector::{IntVector, VectorSet};

/// Lattice basis of `{v in Z^n : A v = 0}`.
///
/// Column operations bring `A` to column echelon form while the same
/// operations are recorded on an `n x n` identity; the recorded columns that
/// end up opposite zero columns of `A` span the whole kernel lattice since
/// every operation is unimodular. The result is returned in a balanced
/// Hermite form so that equal lattices give equal bases.
pub fn kernel_basis(a: &IntMatrix) -> VectorSet {
    let (m, n) = (a.rows(), a.cols());
    // column-major copies
    let mut cols: Vec<Vec<BigInt>> = (0..n).map(|c| a.column(c).into_entries()).collect();
    let mut track: Vec<Vec<BigInt>> = (0..n).map(|c| IntVector::unit(n, c).into_entries()).collect();

    let mut pivot = 0;
    for r in 0..m {
        if pivot == n {
            break;
        }
        loop {
            // smallest nonzero magnitude in row r among the remaining columns
            let best = (pivot..n).filter(|&c| !cols[c][r].is_zero()).min_by_key(|&c| cols[c][r].abs());
            let Some(best) = best else { break };
            cols.swap(pivot, best);
            track.swap(pivot, best);
            let mut done = true;
            for c in pivot + 1..n {
                if cols[c][r].is_zero() {
                    continue;
                }
                let q = cols[c][r].div_floor(&cols[pivot][r]);
                axpy(&mut cols, c, pivot, &q);
                axpy(&mut track, c, pivot, &q);
                if !cols[c][r].is_zero() {
                    done = false;
                }
            }
            if done {
                pivot += 1;
                break;
            }
        }
    }

    let rows: Vec<Vec<BigInt>> = track.drain(pivot..).collect();
    hermite_rows(rows).into_iter().map(IntVector::new).collect()
}

/// `v[target] -= q * v[source]`
fn axpy(v: &mut [Vec<BigInt>], target: usize, source: usize, q: &BigInt) {
    let (t, s) = if target > source {
        let (lo, hi) = v.split_at_mut(target);
        (&mut hi[0], &lo[source])
    } else {
        let (lo, hi) = v.split_at_mut(source);
        (&mut lo[target], &hi[0])
    };
    for (x, y) in t.iter_mut().zip(s) {
        *x -= q * y;
    }
}

/// Row Hermite form of a full-rank row set: echelon, positive pivots, and
/// entries above each pivot reduced into the balanced range `(-p/2, p/2]`.
pub(crate) fn hermite_rows(mut rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let k = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..n {
        if r == k {
            break;
        }
        loop {
            let best = (r..k).filter(|&i| !rows[i][c].is_zero()).min_by_key(|&i| rows[i][c].abs());
            let Some(best) = best else { break };
            rows.swap(r, best);
            let mut done = true;
            for i in r + 1..k {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[r][c]);
                axpy(&mut rows, i, r, &q);
                if !rows[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                if rows[r][c].is_negative() {
                    rows[r].iter_mut().for_each(|x| *x = -&*x);
                }
                pivots.push((r, c));
                r += 1;
                break;
            }
        }
    }
    for &(pr, pc) in &pivots {
        let p = rows[pr][pc].clone();
        for i in 0..pr {
            let q = balanced_quotient(&rows[i][pc], &p);
            if !q.is_zero() {
                axpy(&mut rows, i, pr, &q);
            }
        }
    }
    rows.retain(|row| row.iter().any(|x| !x.is_zero()));
    rows
}

/// `q` such that `x - q p` lies in `(-p/2, p/2]`, for `p > 0`.
fn balanced_quotient(x: &BigInt, p: &BigInt) -> BigInt {
    let (q, rem) = x.div_mod_floor(p);
    if &rem * 2 > *p {
        q + BigInt::one()
    } else {
        q
    }
}
