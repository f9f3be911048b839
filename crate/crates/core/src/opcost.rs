//! Opportunity cost matrices for two-stage stochastic integer programs.
//!
//! Entry `(i, j)` evaluates the decision made for scenario `i` under
//! scenario `j`: `γ·x_i + Q(x_i, ξ_j)` where
//! `Q(x, ξ) = min { c_ξ·y : W y = h_ξ - T_ξ x, y >= 0 }`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::OnceLock;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::augment::{unit_column_start, MoveSet, PhaseOne};
use crate::error::{check_dim, Error, Result};
use crate::graver::graver_basis;
use crate::groebner::buchberger;
use crate::json::JsonInt;
use crate::lattice::{CostOrder, IntMatrix, IntVector, VectorSet};
use crate::oracle::{solve_bruteforce, IpProblem, IpStatus};
use crate::toric::toric_generating_set;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FirstStageConstraints {
    #[serde(rename = "A")]
    pub a: IntMatrix,
    pub b: IntVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(with = "json_int")]
    pub p_num: BigInt,
    #[serde(with = "json_int")]
    pub p_den: BigInt,
    pub cost: IntVector,
    pub rhs: IntVector,
    /// Overrides the instance technology matrix for this scenario.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub technology: Option<IntMatrix>,
}

mod json_int {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::json::serialize_int(v, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
        crate::json::deserialize_int(d)
    }
}

/// A two-stage stochastic integer program with finitely many scenarios.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SipInstance {
    pub gamma: IntVector,
    pub technology: IntMatrix,
    pub recourse: IntMatrix,
    /// Upper bounds for the first-stage variables; empty when not declared.
    #[serde(default)]
    pub first_stage_bounds: Vec<JsonInt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_stage_constraints: Option<FirstStageConstraints>,
    pub scenarios: Vec<Scenario>,
}

impl SipInstance {
    pub fn first_stage_dim(&self) -> usize {
        self.gamma.dim()
    }

    pub fn recourse_dim(&self) -> usize {
        self.recourse.cols()
    }

    pub fn scenario_count(&self) -> usize {
        self.scenarios.len()
    }

    pub fn technology_for(&self, j: usize) -> &IntMatrix {
        self.scenarios[j].technology.as_ref().unwrap_or(&self.technology)
    }

    pub fn validate(&self) -> Result<()> {
        let (d, m) = (self.first_stage_dim(), self.recourse_dim());
        let rows = self.recourse.rows();
        check_dim(d, self.technology.cols())?;
        check_dim(rows, self.technology.rows())?;
        if self.gamma.iter().any(Signed::is_negative) {
            return Err(Error::InvalidInput("first-stage costs must be non-negative".into()));
        }
        if !self.first_stage_bounds.is_empty() {
            check_dim(d, self.first_stage_bounds.len())?;
            if self.first_stage_bounds.iter().any(|b| b.0.is_negative()) {
                return Err(Error::InvalidInput("first-stage bounds must be non-negative".into()));
            }
        }
        if let Some(fs) = &self.first_stage_constraints {
            check_dim(d, fs.a.cols())?;
            check_dim(fs.a.rows(), fs.b.dim())?;
        }
        if self.scenarios.is_empty() {
            return Err(Error::InvalidInput("instance has no scenarios".into()));
        }
        let mut den = BigInt::one();
        for s in &self.scenarios {
            check_dim(m, s.cost.dim())?;
            check_dim(rows, s.rhs.dim())?;
            if let Some(t) = &s.technology {
                check_dim(rows, t.rows())?;
                check_dim(d, t.cols())?;
            }
            if let Some(i) = s.cost.iter().position(Signed::is_negative) {
                return Err(Error::NegativeCost(i));
            }
            if !s.p_den.is_positive() || s.p_num.is_negative() {
                return Err(Error::InvalidInput("probabilities need p_num >= 0 and p_den > 0".into()));
            }
            den = den.lcm(&s.p_den);
        }
        let total: BigInt = self.scenarios.iter().map(|s| &s.p_num * (&den / &s.p_den)).sum();
        if total != den {
            return Err(Error::InvalidInput("scenario probabilities do not sum to 1".into()));
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let inst: SipInstance = serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn to_json(&self) -> String {
        crate::json::to_string_rows(&serde_json::to_value(self).expect("instance serializes"))
    }

    /// Declared bounds, or bounds implied by first-stage rows with
    /// non-negative coefficients.
    pub fn first_stage_upper_bounds(&self) -> Result<Vec<BigInt>> {
        if !self.first_stage_bounds.is_empty() {
            return Ok(self.first_stage_bounds.iter().map(|b| b.0.clone()).collect());
        }
        let unbounded = || Error::Precondition("first-stage variables are unbounded and no bounds are declared".into());
        let fs = self.first_stage_constraints.as_ref().ok_or_else(unbounded)?;
        (0..self.first_stage_dim())
            .map(|k| {
                (0..fs.a.rows())
                    .filter(|&r| fs.a.row(r).iter().all(|x| !x.is_negative()) && fs.a.get(r, k).is_positive())
                    .map(|r| fs.b[r].div_floor(fs.a.get(r, k)))
                    .min()
                    .ok_or_else(unbounded)
            })
            .collect()
    }

    /// Box size used by the brute-force oracle: twice the largest first-stage
    /// bound or right-hand side magnitude.
    pub fn oracle_bound(&self) -> Result<BigInt> {
        let mut m = self.first_stage_upper_bounds()?.into_iter().max().unwrap_or_default();
        for s in &self.scenarios {
            for x in s.rhs.iter() {
                m = m.max(x.abs());
            }
        }
        if let Some(fs) = &self.first_stage_constraints {
            for x in fs.b.iter() {
                m = m.max(x.abs());
            }
        }
        Ok(m * 2)
    }

    /// The one-scenario system `[[A, 0], [T_j, W]] (x, y) = (b, h_j)` with
    /// cost `(γ, c_j)`.
    pub fn one_scenario_system(&self, j: usize) -> Result<(IntMatrix, IntVector, IntVector)> {
        let (d, m) = (self.first_stage_dim(), self.recourse_dim());
        let s = self.scenarios.get(j).ok_or(Error::IndexOutOfRange { index: j, dim: self.scenario_count() })?;
        let fs_rows = self.first_stage_constraints.as_ref().map_or(0, |fs| fs.a.rows());
        let rows = self.recourse.rows();
        let mut a = IntMatrix::zeros(fs_rows + rows, d + m);
        let mut rhs = Vec::with_capacity(fs_rows + rows);
        if let Some(fs) = &self.first_stage_constraints {
            a.place(0, 0, &fs.a);
            rhs.extend(fs.b.iter().cloned());
        }
        a.place(fs_rows, 0, self.technology_for(j));
        a.place(fs_rows, d, &self.recourse);
        rhs.extend(s.rhs.iter().cloned());
        let cost = IntVector::new(self.gamma.iter().chain(s.cost.iter()).cloned().collect());
        Ok((a, IntVector::new(rhs), cost))
    }
}

/// `h_j - T_j x`
pub fn rhs(instance: &SipInstance, x: &IntVector, j: usize) -> Result<IntVector> {
    if j >= instance.scenario_count() {
        return Err(Error::IndexOutOfRange { index: j, dim: instance.scenario_count() });
    }
    let tx = instance.technology_for(j).mul_vec(x)?;
    Ok(&instance.scenarios[j].rhs - &tx)
}

/// First-stage decisions `x_1, ..., x_N`, one per scenario.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionList {
    pub decisions: Vec<IntVector>,
}

impl DecisionList {
    pub fn new(decisions: Vec<IntVector>) -> Self {
        DecisionList { decisions }
    }

    pub fn len(&self) -> usize {
        self.decisions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decisions.is_empty()
    }

    pub fn validate(&self, instance: &SipInstance) -> Result<()> {
        check_dim(instance.scenario_count(), self.len())?;
        for x in &self.decisions {
            check_dim(instance.first_stage_dim(), x.dim())?;
            if !x.is_nonnegative() {
                return Err(Error::InvalidInput(format!("decision {x} has a negative entry")));
            }
            if let Some(fs) = &instance.first_stage_constraints {
                if fs.a.mul_vec(x)? != fs.b {
                    return Err(Error::InvalidInput(format!("decision {x} violates the first-stage constraints")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Kernel,
    Graver,
    Oracle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Kernel => "kernel",
            Method::Graver => "graver",
            Method::Oracle => "oracle",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kernel" => Ok(Method::Kernel),
            "graver" => Ok(Method::Graver),
            "oracle" => Ok(Method::Oracle),
            _ => Err(Error::InvalidInput(format!("unknown method {s:?}"))),
        }
    }
}

/// Optimal first-stage part of each one-scenario problem, solved with the
/// given method. Ties are broken by the lexicographic refinement of the cost
/// order, so the list is deterministic.
pub fn single_scenario_decisions(instance: &SipInstance, method: Method) -> Result<DecisionList> {
    instance.validate()?;
    instance.first_stage_upper_bounds()?;
    let d = instance.first_stage_dim();
    let n = instance.scenario_count();
    let mut toric_cache: HashMap<IntMatrix, VectorSet> = HashMap::new();
    let mut graver_cache: HashMap<IntMatrix, VectorSet> = HashMap::new();
    let mut phase_one: HashMap<IntMatrix, PhaseOne> = HashMap::new();
    let bound = if method == Method::Oracle { Some(instance.oracle_bound()?) } else { None };
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let (a, b, c) = instance.one_scenario_system(j)?;
        let z = if let Some(bound) = &bound {
            let p = IpProblem::new(a, b, c, bound.clone())?;
            let res = solve_bruteforce(&p)?;
            res.solution.ok_or_else(|| Error::InvalidInput(format!("scenario {j} has no feasible point in the box")))?
        } else {
            let start = match unit_column_start(&a, &b) {
                Some(z) => z,
                None => {
                    if !phase_one.contains_key(&a) {
                        phase_one.insert(a.clone(), PhaseOne::new(&a)?);
                    }
                    phase_one[&a]
                        .feasible(&b)?
                        .ok_or_else(|| Error::InvalidInput(format!("scenario {j} is infeasible")))?
                }
            };
            let order = CostOrder::new(c)?;
            let moves = if method == Method::Kernel {
                if !toric_cache.contains_key(&a) {
                    toric_cache.insert(a.clone(), toric_generating_set(&a).generators);
                }
                let gb = buchberger(&toric_cache[&a], &order)?;
                MoveSet::new(&gb.elements, order)?
            } else {
                if !graver_cache.contains_key(&a) {
                    graver_cache.insert(a.clone(), graver_basis(&a)?.elements);
                }
                MoveSet::new(&graver_cache[&a], order)?
            };
            moves.augment(&start).solution
        };
        out.push(IntVector::new(z.entries()[..d].to_vec()));
    }
    Ok(DecisionList::new(out))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Ok,
    Infeasible,
}

/// Work counters for one matrix build.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub toric_runs: u64,
    /// Gröbner bases computed for scenario costs.
    pub buchberger_runs: u64,
    pub graver_runs: u64,
    pub phase_one_builds: u64,
    pub augmentations: u64,
    pub oracle_solves: u64,
}

#[derive(Default)]
struct Stats {
    toric_runs: AtomicU64,
    buchberger_runs: AtomicU64,
    graver_runs: AtomicU64,
    phase_one_builds: AtomicU64,
    augmentations: AtomicU64,
    oracle_solves: AtomicU64,
}

impl Stats {
    fn bump(c: &AtomicU64) {
        c.fetch_add(1, AtomicOrdering::Relaxed);
    }

    fn snapshot(&self) -> Counters {
        let g = |c: &AtomicU64| c.load(AtomicOrdering::Relaxed);
        Counters {
            toric_runs: g(&self.toric_runs),
            buchberger_runs: g(&self.buchberger_runs),
            graver_runs: g(&self.graver_runs),
            phase_one_builds: g(&self.phase_one_builds),
            augmentations: g(&self.augmentations),
            oracle_solves: g(&self.oracle_solves),
        }
    }
}

/// Wall time per phase in microseconds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timings {
    pub toric_us: u64,
    pub groebner_us: u64,
    pub graver_us: u64,
    pub augment_us: u64,
    pub oracle_us: u64,
    pub total_us: u64,
}

fn micros(t: Instant) -> u64 {
    u64::try_from(t.elapsed().as_micros()).unwrap_or(u64::MAX)
}

/// Sizes of the bases used by a build.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisSizes {
    pub toric: Option<usize>,
    /// One entry per scenario.
    pub groebner: Vec<usize>,
    pub graver: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpcostOptions {
    /// Report `Q(x_i, ξ_j)` instead of `γ·x_i + Q(x_i, ξ_j)`.
    pub q_only: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OppCostMatrix {
    pub n: usize,
    /// Row-major; `None` exactly when the cell is infeasible.
    pub values: Vec<Option<BigInt>>,
    pub decisions: DecisionList,
    pub method: Method,
    pub q_only: bool,
    pub timings: Timings,
    pub counters: Counters,
    pub basis_sizes: BasisSizes,
}

impl OppCostMatrix {
    pub fn get(&self, i: usize, j: usize) -> Option<&BigInt> {
        self.values[i * self.n + j].as_ref()
    }

    pub fn status(&self, i: usize, j: usize) -> CellStatus {
        if self.values[i * self.n + j].is_some() {
            CellStatus::Ok
        } else {
            CellStatus::Infeasible
        }
    }

    /// Same entries, regardless of method, timings and counters.
    pub fn same_values(&self, other: &OppCostMatrix) -> bool {
        self.n == other.n && self.values == other.values
    }

    /// Rows: decisions; columns: scenarios. Infeasible cells read
    /// `infeasible`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("decision");
        for j in 0..self.n {
            let _ = write!(out, ",s{j}");
        }
        out.push('\n');
        for i in 0..self.n {
            let _ = write!(out, "x{i}");
            for j in 0..self.n {
                match self.get(i, j) {
                    Some(v) => {
                        let _ = write!(out, ",{v}");
                    }
                    None => out.push_str(",infeasible"),
                }
            }
            out.push('\n');
        }
        out
    }

    /// Parses the values back from [`OppCostMatrix::to_csv`] output.
    pub fn values_from_csv(csv: &str) -> Result<Vec<Vec<Option<BigInt>>>> {
        let bad = |msg: &str| Error::InvalidInput(format!("matrix CSV: {msg}"));
        let mut lines = csv.lines();
        let header = lines.next().ok_or_else(|| bad("empty"))?;
        let n = header.split(',').count() - 1;
        lines
            .map(|line| {
                let cells: Vec<&str> = line.split(',').skip(1).collect();
                if cells.len() != n {
                    return Err(bad("ragged row"));
                }
                cells
                    .into_iter()
                    .map(|c| match c {
                        "infeasible" => Ok(None),
                        v => v.parse::<BigInt>().map(Some).map_err(|_| bad(v)),
                    })
                    .collect()
            })
            .collect()
    }

    /// Order-independent digest of the entries: wrapping sum of FNV-1a
    /// hashes of `"i,j,value"`.
    pub fn checksum(&self) -> u64 {
        let mut sum = 0u64;
        for i in 0..self.n {
            for j in 0..self.n {
                let cell = match self.get(i, j) {
                    Some(v) => format!("{i},{j},{v}"),
                    None => format!("{i},{j},infeasible"),
                };
                sum = sum.wrapping_add(fnv1a(cell.as_bytes()));
            }
        }
        sum
    }

    /// Metadata document: everything in the CSV plus decisions, method,
    /// timings and counters.
    pub fn to_json(&self, include_timings: bool) -> serde_json::Value {
        let values: Vec<Vec<serde_json::Value>> = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| match self.get(i, j) {
                        Some(v) => crate::json::int_to_value(v),
                        None => serde_json::Value::Null,
                    })
                    .collect()
            })
            .collect();
        let mut doc = serde_json::json!({
            "method": self.method,
            "n": self.n,
            "q_only": self.q_only,
            "values": values,
            "decisions": self.decisions.decisions,
            "counters": self.counters,
            "basis_sizes": self.basis_sizes,
            "checksum": format!("{:016x}", self.checksum()),
        });
        if include_timings {
            doc["timings_us"] = serde_json::to_value(self.timings).expect("timings serialize");
        }
        doc
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Feasible recourse starts: unit columns when available, Phase-I otherwise.
struct StartFinder<'a> {
    w: &'a IntMatrix,
    phase_one: OnceLock<Result<PhaseOne>>,
    stats: &'a Stats,
}

impl<'a> StartFinder<'a> {
    fn new(w: &'a IntMatrix, stats: &'a Stats) -> Self {
        StartFinder { w, phase_one: OnceLock::new(), stats }
    }

    fn find(&self, b: &IntVector) -> Result<Option<IntVector>> {
        if let Some(z) = unit_column_start(self.w, b) {
            return Ok(Some(z));
        }
        let p1 = self.phase_one.get_or_init(|| {
            Stats::bump(&self.stats.phase_one_builds);
            PhaseOne::new(self.w)
        });
        match p1 {
            Ok(p) => p.feasible(b),
            Err(e) => Err(e.clone()),
        }
    }
}

fn prepare(instance: &SipInstance, decisions: &DecisionList) -> Result<()> {
    instance.validate()?;
    decisions.validate(instance)
}

/// Machine-integer copies of the cell data, present when everything fits.
struct FastCells {
    /// Per row, the first column of `W` equal to `e_r` and to `-e_r`.
    unit: Vec<(Option<usize>, Option<usize>)>,
    technology: Vec<Vec<Vec<i64>>>,
    rhs: Vec<Vec<i64>>,
    decisions: Vec<Vec<i64>>,
    first_stage: Vec<i64>,
}

impl FastCells {
    fn new(instance: &SipInstance, decisions: &DecisionList) -> Option<Self> {
        let w = &instance.recourse;
        let is_unit = |k: usize, r: usize, s: i64| {
            (0..w.rows()).all(|i| *w.get(i, k) == BigInt::from(if i == r { s } else { 0 }))
        };
        let unit = (0..w.rows())
            .map(|r| ((0..w.cols()).find(|&k| is_unit(k, r, 1)), (0..w.cols()).find(|&k| is_unit(k, r, -1))))
            .collect();
        let small = |v: &[BigInt]| {
            v.iter().map(|x| i64::try_from(x).ok().filter(|x| x.unsigned_abs() < 1 << 31)).collect::<Option<Vec<i64>>>()
        };
        let technology = (0..instance.scenario_count())
            .map(|j| instance.technology_for(j).to_rows().iter().map(|r| small(r)).collect())
            .collect::<Option<Vec<Vec<_>>>>()?;
        let rhs = instance.scenarios.iter().map(|s| small(s.rhs.entries())).collect::<Option<Vec<_>>>()?;
        let xs = decisions.decisions.iter().map(|x| small(x.entries())).collect::<Option<Vec<_>>>()?;
        let first_stage = decisions
            .decisions
            .iter()
            .map(|x| i64::try_from(instance.gamma.dot(x)).ok())
            .collect::<Option<Vec<_>>>()?;
        Some(FastCells { unit, technology, rhs, decisions: xs, first_stage })
    }

    /// `None` defers the cell to the exact path. `z` is scratch space.
    fn value(&self, moves: &MoveSet, i: usize, j: usize, q_only: bool, z: &mut [i64]) -> Option<i64> {
        let x = &self.decisions[i];
        z.fill(0);
        for (r, t_row) in self.technology[j].iter().enumerate() {
            let tx: i64 = t_row.iter().zip(x).map(|(a, b)| a * b).sum();
            let b = self.rhs[j][r] - tx;
            if b != 0 {
                let k = if b > 0 { self.unit[r].0 } else { self.unit[r].1 }?;
                z[k] = b.abs();
            }
        }
        let q = moves.optimal_value_i64(z)?;
        if q_only {
            Some(q)
        } else {
            q.checked_add(self.first_stage[i])
        }
    }
}

/// Evaluates every cell with per-scenario move sets, one row per task.
fn fill_by_augmentation(
    instance: &SipInstance,
    decisions: &DecisionList,
    moves: &[MoveSet],
    stats: &Stats,
    options: OpcostOptions,
) -> Result<Vec<Option<BigInt>>> {
    let n = instance.scenario_count();
    let starts = StartFinder::new(&instance.recourse, stats);
    let fast = FastCells::new(instance, decisions);
    let rows = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = &decisions.decisions[i];
            let mut scratch = vec![0i64; instance.recourse_dim()];
            let mut row = Vec::with_capacity(n);
            for (j, m) in moves.iter().enumerate() {
                if let Some(v) = fast.as_ref().and_then(|f| f.value(m, i, j, options.q_only, &mut scratch)) {
                    row.push(Some(BigInt::from(v)));
                    continue;
                }
                let b = rhs(instance, x, j)?;
                row.push(match starts.find(&b)? {
                    Some(z0) => {
                        let q = m.augment(&z0).value;
                        Some(if options.q_only { q } else { instance.gamma.dot(x) + q })
                    }
                    None => None,
                });
            }
            stats.augmentations.fetch_add(n as u64, AtomicOrdering::Relaxed);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// Kernel method: one toric generating set for `W`, one Gröbner basis per
/// scenario, one augmentation per cell.
pub fn opcost_kernel(
    instance: &SipInstance,
    decisions: &DecisionList,
    options: OpcostOptions,
) -> Result<OppCostMatrix> {
    prepare(instance, decisions)?;
    let stats = Stats::default();
    let total = Instant::now();
    let mut timings = Timings::default();

    let t = Instant::now();
    Stats::bump(&stats.toric_runs);
    let gens = toric_generating_set(&instance.recourse).generators;
    timings.toric_us = micros(t);

    let t = Instant::now();
    let mut moves = Vec::with_capacity(instance.scenario_count());
    let mut sizes = Vec::with_capacity(instance.scenario_count());
    for s in &instance.scenarios {
        let order = CostOrder::new(s.cost.clone())?;
        Stats::bump(&stats.buchberger_runs);
        let gb = buchberger(&gens, &order)?;
        sizes.push(gb.len());
        moves.push(MoveSet::new(&gb.elements, order)?);
    }
    timings.groebner_us = micros(t);

    let t = Instant::now();
    let values = fill_by_augmentation(instance, decisions, &moves, &stats, options)?;
    timings.augment_us = micros(t);
    timings.total_us = micros(total);

    Ok(OppCostMatrix {
        n: instance.scenario_count(),
        values,
        decisions: decisions.clone(),
        method: Method::Kernel,
        q_only: options.q_only,
        timings,
        counters: stats.snapshot(),
        basis_sizes: BasisSizes { toric: Some(gens.len()), groebner: sizes, graver: None },
    })
}

/// Graver method: one Graver basis for `W`, shared by every cell.
pub fn opcost_graver(
    instance: &SipInstance,
    decisions: &DecisionList,
    options: OpcostOptions,
) -> Result<OppCostMatrix> {
    prepare(instance, decisions)?;
    let stats = Stats::default();
    let total = Instant::now();
    let mut timings = Timings::default();

    let t = Instant::now();
    Stats::bump(&stats.graver_runs);
    let graver = graver_basis(&instance.recourse)?;
    timings.graver_us = micros(t);

    let t = Instant::now();
    let moves = instance
        .scenarios
        .iter()
        .map(|s| MoveSet::new(&graver.elements, CostOrder::new(s.cost.clone())?))
        .collect::<Result<Vec<_>>>()?;
    let values = fill_by_augmentation(instance, decisions, &moves, &stats, options)?;
    timings.augment_us = micros(t);
    timings.total_us = micros(total);

    Ok(OppCostMatrix {
        n: instance.scenario_count(),
        values,
        decisions: decisions.clone(),
        method: Method::Graver,
        q_only: options.q_only,
        timings,
        counters: stats.snapshot(),
        basis_sizes: BasisSizes { toric: None, groebner: Vec::new(), graver: Some(graver.len()) },
    })
}

/// Every cell by brute force over the oracle box.
pub fn opcost_oracle(
    instance: &SipInstance,
    decisions: &DecisionList,
    options: OpcostOptions,
) -> Result<OppCostMatrix> {
    prepare(instance, decisions)?;
    let stats = Stats::default();
    let total = Instant::now();
    let bound = instance.oracle_bound()?;
    let n = instance.scenario_count();
    let values = (0..n * n)
        .into_par_iter()
        .map(|cell| {
            let (i, j) = (cell / n, cell % n);
            let x = &decisions.decisions[i];
            let b = rhs(instance, x, j)?;
            let p = IpProblem::new(instance.recourse.clone(), b, instance.scenarios[j].cost.clone(), bound.clone())?;
            Stats::bump(&stats.oracle_solves);
            let res = solve_bruteforce(&p)?;
            Ok(match res.status {
                IpStatus::Optimal => {
                    let q = res.value.expect("optimal outcome has a value");
                    Some(if options.q_only { q } else { instance.gamma.dot(x) + q })
                }
                IpStatus::InfeasibleInBox => None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let elapsed = micros(total);
    Ok(OppCostMatrix {
        n,
        values,
        decisions: decisions.clone(),
        method: Method::Oracle,
        q_only: options.q_only,
        timings: Timings { oracle_us: elapsed, total_us: elapsed, ..Timings::default() },
        counters: stats.snapshot(),
        basis_sizes: BasisSizes::default(),
    })
}

pub fn opcost(
    instance: &SipInstance,
    decisions: &DecisionList,
    method: Method,
    options: OpcostOptions,
) -> Result<OppCostMatrix> {
    match method {
        Method::Kernel => opcost_kernel(instance, decisions, options),
        Method::Graver => opcost_graver(instance, decisions, options),
        Method::Oracle => opcost_oracle(instance, decisions, options),
    }
}
