//! Brute-force ground truth for small integer programs.
//!
//! Nothing here touches the Gröbner, Graver or augmentation code: the solver
//! is a depth-first enumeration of a box with interval pruning on the
//! constraint rows and on the objective. It is slow by construction and
//! refuses (with [`Error::ResourceLimit`]) rather than guessing when a search
//! grows past its node cap.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{check_dim, Error, Result};
use crate::lattice::{IntMatrix, IntVector, VectorSet};

pub const DEFAULT_NODE_CAP: u64 = 100_000_000;

/// Environment variable that overrides [`DEFAULT_NODE_CAP`].
pub const NODE_CAP_ENV: &str = "OPCOST_NODE_CAP";

/// Node cap taken from `OPCOST_NODE_CAP` when set and valid.
pub fn node_cap_from_env() -> u64 {
    std::env::var(NODE_CAP_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_NODE_CAP)
}

/// `min c·z` subject to `A z = b`, `0 <= z <= var_bound`.
#[derive(Clone, Debug)]
pub struct IpProblem {
    pub a: IntMatrix,
    pub b: IntVector,
    pub c: IntVector,
    pub var_bound: BigInt,
}

impl IpProblem {
    pub fn new(a: IntMatrix, b: IntVector, c: IntVector, var_bound: impl Into<BigInt>) -> Result<Self> {
        check_dim(a.cols(), c.dim())?;
        check_dim(a.rows(), b.dim())?;
        let var_bound = var_bound.into();
        if var_bound.is_negative() {
            return Err(Error::InvalidInput("variable bound must be non-negative".into()));
        }
        Ok(IpProblem { a, b, c, var_bound })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IpStatus {
    Optimal,
    InfeasibleInBox,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IpOutcome {
    pub status: IpStatus,
    pub solution: Option<IntVector>,
    pub value: Option<BigInt>,
}

impl IpOutcome {
    fn infeasible() -> Self {
        IpOutcome { status: IpStatus::InfeasibleInBox, solution: None, value: None }
    }
}

/// Solves with the node cap from the environment (default 10^8).
pub fn solve_bruteforce(p: &IpProblem) -> Result<IpOutcome> {
    solve_bruteforce_capped(p, node_cap_from_env())
}

/// Exhaustive search of the box. Among minimum-cost points the
/// lexicographically smallest one is returned, which is the minimum of the
/// cost order refined by the lexicographic tie-break.
pub fn solve_bruteforce_capped(p: &IpProblem, node_cap: u64) -> Result<IpOutcome> {
    let n = p.a.cols();
    let bounds = vec![(BigInt::zero(), p.var_bound.clone()); n];
    let mut search = BoxSearch::new(&p.a, &bounds);
    let cost = p.c.entries().to_vec();
    // smallest possible contribution of the variables k.. to the cost
    let mut cost_floor = vec![BigInt::zero(); n + 1];
    for k in (0..n).rev() {
        let lo = if cost[k].is_negative() { &cost[k] * &p.var_bound } else { BigInt::zero() };
        cost_floor[k] = &cost_floor[k + 1] + lo;
    }

    let mut best: Option<(BigInt, Vec<BigInt>)> = None;
    let mut z = Vec::with_capacity(n);
    let mut nodes = 0u64;
    let residual = p.b.entries().to_vec();
    dfs_optimize(
        &mut search,
        &cost,
        &cost_floor,
        0,
        &residual,
        &BigInt::zero(),
        &mut z,
        &mut best,
        &mut nodes,
        node_cap,
    )?;
    Ok(match best {
        Some((value, sol)) => {
            IpOutcome { status: IpStatus::Optimal, solution: Some(IntVector::new(sol)), value: Some(value) }
        }
        None => IpOutcome::infeasible(),
    })
}

#[allow(clippy::too_many_arguments)]
fn dfs_optimize(
    search: &mut BoxSearch,
    cost: &[BigInt],
    cost_floor: &[BigInt],
    k: usize,
    residual: &[BigInt],
    partial: &BigInt,
    z: &mut Vec<BigInt>,
    best: &mut Option<(BigInt, Vec<BigInt>)>,
    nodes: &mut u64,
    cap: u64,
) -> Result<()> {
    *nodes += 1;
    if *nodes > cap {
        return Err(Error::ResourceLimit(format!("brute-force search exceeded {cap} nodes")));
    }
    // points are visited in ascending lexicographic order, so an equal-cost
    // point found later never beats the incumbent
    if let Some((incumbent, _)) = best {
        if partial + &cost_floor[k] >= *incumbent {
            return Ok(());
        }
    }
    if k == search.n {
        if residual.iter().all(Zero::is_zero) {
            *best = Some((partial.clone(), z.clone()));
        }
        return Ok(());
    }
    let Some((lo, hi)) = search.range(k, residual) else {
        return Ok(());
    };
    let mut value = lo;
    while value <= hi {
        let next: Vec<BigInt> = residual.iter().zip(&search.columns[k]).map(|(r, a)| r - a * &value).collect();
        let next_partial = partial + &cost[k] * &value;
        z.push(value.clone());
        dfs_optimize(search, cost, cost_floor, k + 1, &next, &next_partial, z, best, nodes, cap)?;
        z.pop();
        value += 1;
    }
    Ok(())
}

/// Row-interval bookkeeping shared by the enumerators.
struct BoxSearch {
    n: usize,
    columns: Vec<Vec<BigInt>>,
    /// `tail_min[k][r]`, `tail_max[k][r]`: range of `sum_{j>=k} a_rj z_j`
    /// over the box.
    tail_min: Vec<Vec<BigInt>>,
    tail_max: Vec<Vec<BigInt>>,
    bounds: Vec<(BigInt, BigInt)>,
}

impl BoxSearch {
    fn new(a: &IntMatrix, bounds: &[(BigInt, BigInt)]) -> Self {
        let (m, n) = (a.rows(), a.cols());
        let columns: Vec<Vec<BigInt>> = (0..n).map(|k| a.column(k).into_entries()).collect();
        let mut tail_min = vec![vec![BigInt::zero(); m]; n + 1];
        let mut tail_max = vec![vec![BigInt::zero(); m]; n + 1];
        for k in (0..n).rev() {
            let (lo, hi) = &bounds[k];
            for r in 0..m {
                let x = &columns[k][r] * lo;
                let y = &columns[k][r] * hi;
                let (mn, mx) = if x <= y { (x, y) } else { (y, x) };
                tail_min[k][r] = &tail_min[k + 1][r] + mn;
                tail_max[k][r] = &tail_max[k + 1][r] + mx;
            }
        }
        BoxSearch { n, columns, tail_min, tail_max, bounds: bounds.to_vec() }
    }

    /// Values of `z_k` that keep every row satisfiable, or `None`.
    fn range(&self, k: usize, residual: &[BigInt]) -> Option<(BigInt, BigInt)> {
        let (mut lo, mut hi) = self.bounds[k].clone();
        for (r, res) in residual.iter().enumerate() {
            let a = &self.columns[k][r];
            let need_lo = res - &self.tail_max[k + 1][r];
            let need_hi = res - &self.tail_min[k + 1][r];
            if a.is_zero() {
                if need_lo.is_positive() || need_hi.is_negative() {
                    return None;
                }
                continue;
            }
            // need_lo <= a z <= need_hi
            let (l, h) = if a.is_positive() {
                (need_lo.div_ceil(a), need_hi.div_floor(a))
            } else {
                (need_hi.div_ceil(a), need_lo.div_floor(a))
            };
            if l > lo {
                lo = l;
            }
            if h < hi {
                hi = h;
            }
            if lo > hi {
                return None;
            }
        }
        Some((lo, hi))
    }

    /// Visits every box point with `A z = rhs`.
    fn for_each_solution(&self, rhs: &[BigInt], cap: u64, visit: &mut dyn FnMut(&[BigInt])) -> Result<()> {
        let mut nodes = 0u64;
        let mut z = Vec::with_capacity(self.n);
        self.walk(0, rhs, &mut z, &mut nodes, cap, visit)
    }

    fn walk(
        &self,
        k: usize,
        residual: &[BigInt],
        z: &mut Vec<BigInt>,
        nodes: &mut u64,
        cap: u64,
        visit: &mut dyn FnMut(&[BigInt]),
    ) -> Result<()> {
        *nodes += 1;
        if *nodes > cap {
            return Err(Error::ResourceLimit(format!("box enumeration exceeded {cap} nodes")));
        }
        if k == self.n {
            if residual.iter().all(Zero::is_zero) {
                visit(z);
            }
            return Ok(());
        }
        let Some((lo, hi)) = self.range(k, residual) else {
            return Ok(());
        };
        let mut value = lo;
        while value <= hi {
            let next: Vec<BigInt> = residual.iter().zip(&self.columns[k]).map(|(r, a)| r - a * &value).collect();
            z.push(value.clone());
            self.walk(k + 1, &next, z, nodes, cap, visit)?;
            z.pop();
            value += 1;
        }
        Ok(())
    }
}

fn conformal_le(a: &[BigInt], b: &[BigInt]) -> bool {
    a.iter().zip(b).all(|(x, y)| match x.sign() {
        num_bigint::Sign::NoSign => true,
        num_bigint::Sign::Plus => y >= x,
        num_bigint::Sign::Minus => y <= x,
    })
}

/// All nonzero kernel vectors of `A` in `[-bound, bound]^n` that are
/// minimal for the conformal order.
pub fn enumerate_graver_in_box(a: &IntMatrix, bound: u32) -> Result<VectorSet> {
    enumerate_graver_in_box_capped(a, bound, node_cap_from_env())
}

pub fn enumerate_graver_in_box_capped(a: &IntMatrix, bound: u32, cap: u64) -> Result<VectorSet> {
    if bound == 0 {
        return Err(Error::InvalidInput("box bound must be at least 1".into()));
    }
    let b = BigInt::from(bound);
    let bounds = vec![(-b.clone(), b); a.cols()];
    let search = BoxSearch::new(a, &bounds);
    let mut kernel: Vec<Vec<BigInt>> = Vec::new();
    let zero = vec![BigInt::zero(); a.rows()];
    search.for_each_solution(&zero, cap, &mut |z| {
        if z.iter().any(|x| !x.is_zero()) {
            kernel.push(z.to_vec());
        }
    })?;
    // Anything conformally below a box vector is itself in the box, so
    // minimality within the box is minimality in the whole kernel. Scanning
    // by increasing 1-norm, a vector is minimal iff no minimal vector found
    // so far lies conformally below it.
    kernel.sort_by_cached_key(|v| v.iter().map(|x| x.abs()).sum::<BigInt>());
    let mut minimal: Vec<(u64, u64, Vec<BigInt>)> = Vec::new();
    for v in kernel {
        let (pos, neg) = sign_masks(&v);
        let dominated = minimal.iter().any(|(p, q, u)| p & !pos == 0 && q & !neg == 0 && conformal_le(u, &v));
        if !dominated {
            minimal.push((pos, neg, v));
        }
    }
    let mut out: Vec<IntVector> = minimal.into_iter().map(|(_, _, v)| IntVector::new(v)).collect();
    out.sort();
    Ok(out.into_iter().collect())
}

fn sign_masks(v: &[BigInt]) -> (u64, u64) {
    let (mut pos, mut neg) = (0u64, 0u64);
    for (i, x) in v.iter().enumerate().take(64) {
        if x.is_positive() {
            pos |= 1 << i;
        } else if x.is_negative() {
            neg |= 1 << i;
        }
    }
    (pos, neg)
}

/// One right-hand side together with every non-negative solution of
/// `A z = b` (all of which lie in the enumeration box).
#[derive(Clone, Debug)]
pub struct Fiber {
    pub rhs: IntVector,
    pub points: Vec<IntVector>,
}

/// Groups the points of `[0, bound]^n` by `b = A z` and keeps the groups
/// whose complete solution set provably lies inside the box.
///
/// Requires `A >= 0` with no zero column: then `z_k <= b_r / a_rk` for any
/// row with `a_rk > 0`, which certifies containment.
pub fn fibers_in_box(a: &IntMatrix, bound: u32) -> Result<Vec<Fiber>> {
    let (m, n) = (a.rows(), a.cols());
    for k in 0..n {
        let col = a.column(k);
        if col.iter().any(Signed::is_negative) || col.is_zero() {
            return Err(Error::Precondition(
                "fiber enumeration needs a non-negative matrix without zero columns".into(),
            ));
        }
    }
    let bound_big = BigInt::from(bound);
    let mut groups: BTreeMap<IntVector, Vec<IntVector>> = BTreeMap::new();
    let mut cur = vec![0u32; n];
    loop {
        let z = IntVector::new(cur.iter().map(|&x| BigInt::from(x)).collect());
        let b = a.mul_vec(&z)?;
        groups.entry(b).or_default().push(z);
        let mut i = 0;
        while i < n && cur[i] == bound {
            cur[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
        cur[i] += 1;
    }
    let contained = |b: &IntVector| {
        (0..n).all(|k| (0..m).filter(|&r| a.get(r, k).is_positive()).any(|r| b[r].div_floor(a.get(r, k)) <= bound_big))
    };
    Ok(groups.into_iter().filter(|(b, _)| contained(b)).map(|(rhs, points)| Fiber { rhs, points }).collect())
}

/// Minimum of a finite point set under cost `c` with lexicographic tie-break.
pub fn best_point<'a>(points: &'a [IntVector], c: &IntVector) -> Option<&'a IntVector> {
    points.iter().min_by(|x, y| match x.dot(c).cmp(&y.dot(c)) {
        Ordering::Equal => x.cmp(y),
        other => other,
    })
}
