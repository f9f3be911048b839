//! Benchmark instance generators: a small two-stage production model with
//! slack variables, and stochastic network design on a directed graph.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};
use crate::json::JsonInt;
use crate::lattice::{IntMatrix, IntVector};
use crate::opcost::{FirstStageConstraints, Scenario, SipInstance};

pub const HS_GAMMA: [i64; 2] = [35, 40];
pub const HS_COST: [i64; 8] = [16, 19, 47, 54, 0, 0, 0, 0];
pub const HS_RECOURSE: [[i64; 8]; 4] =
    [[1, 0, 1, 0, -1, 0, 0, 0], [0, 1, 0, 1, 0, -1, 0, 0], [2, 1, 0, 0, 0, 0, 1, 0], [1, 2, 0, 0, 0, 0, 0, 1]];
pub const HS_TECHNOLOGY: [[i64; 2]; 4] = [[1, 0], [0, 1], [0, 0], [0, 0]];

pub const HS_DEFAULT_BOX: [(i64, i64); 4] = [(300, 12000), (300, 12000), (200, 12000), (200, 12000)];
pub const HS_SCALED_BOX: [(i64, i64); 4] = [(3, 12), (3, 12), (2, 12), (2, 12)];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HsConfig {
    pub scenarios: usize,
    pub seed: u64,
    /// Inclusive sampling intervals for `ξ1, ..., ξ4`.
    pub r#box: [(i64, i64); 4],
    /// Independent copies of the model placed block-diagonally; scales the
    /// variable count without changing the structure.
    pub blocks: usize,
}

impl HsConfig {
    pub fn new(scenarios: usize, seed: u64) -> Self {
        HsConfig { scenarios, seed, r#box: HS_DEFAULT_BOX, blocks: 1 }
    }

    pub fn scaled(scenarios: usize, seed: u64) -> Self {
        HsConfig { r#box: HS_SCALED_BOX, ..Self::new(scenarios, seed) }
    }

    pub fn with_blocks(mut self, blocks: usize) -> Self {
        self.blocks = blocks;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.scenarios == 0 || self.blocks == 0 {
            return Err(Error::InvalidInput("scenario and block counts must be positive".into()));
        }
        for (lo, hi) in self.r#box {
            if lo < 0 || lo > hi {
                return Err(Error::InvalidInput(format!("invalid sampling interval [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

fn block_diagonal<const R: usize, const C: usize>(block: &[[i64; C]; R], copies: usize) -> IntMatrix {
    let b = IntMatrix::from_rows(block).expect("constant block is rectangular");
    let mut m = IntMatrix::zeros(R * copies, C * copies);
    for k in 0..copies {
        m.place(k * R, k * C, &b);
    }
    m
}

fn repeated(v: &[i64], copies: usize) -> IntVector {
    IntVector::from(v.repeat(copies))
}

pub fn gen_hs(config: &HsConfig) -> Result<SipInstance> {
    config.validate()?;
    let k = config.blocks;
    let n = config.scenarios;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let scenarios = (0..n)
        .map(|_| {
            let xi: Vec<i64> = (0..k).flat_map(|_| config.r#box.map(|(lo, hi)| rng.gen_range(lo..=hi))).collect();
            Scenario {
                p_num: BigInt::from(1),
                p_den: BigInt::from(n),
                cost: repeated(&HS_COST, k),
                rhs: IntVector::from(xi),
                technology: None,
            }
        })
        .collect();
    let bounds = [config.r#box[0].1, config.r#box[1].1];
    Ok(SipInstance {
        gamma: repeated(&HS_GAMMA, k),
        technology: block_diagonal(&HS_TECHNOLOGY, k),
        recourse: block_diagonal(&HS_RECOURSE, k),
        first_stage_bounds: bounds.repeat(k).into_iter().map(|b| JsonInt(b.into())).collect(),
        first_stage_constraints: None,
        scenarios,
    })
}

/// A feasible recourse point for first stage `x` and data `ξ`: slacks absorb
/// the difference in the first two rows, the last two rows are met by their
/// own slacks.
pub fn hs_feasible(x: &IntVector, xi: &IntVector) -> Result<IntVector> {
    check_dim(2, x.dim())?;
    check_dim(4, xi.dim())?;
    if xi[2] < BigInt::from(0) || xi[3] < BigInt::from(0) {
        return Err(Error::Precondition("hs_feasible needs ξ3, ξ4 >= 0".into()));
    }
    let zero = BigInt::from(0);
    let pos = |v: BigInt| if v > zero { v } else { zero.clone() };
    Ok(IntVector::new(vec![
        zero.clone(),
        zero.clone(),
        pos(&xi[0] - &x[0]),
        pos(&xi[1] - &x[1]),
        pos(&x[0] - &xi[0]),
        pos(&x[1] - &xi[1]),
        xi[2].clone(),
        xi[3].clone(),
    ]))
}

/// Network design configuration. Every default lives here.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SndConfig {
    pub vertices: usize,
    pub arcs: Vec<(usize, usize)>,
    /// Origin and destination of each commodity.
    pub commodities: Vec<(usize, usize)>,
    pub scenarios: usize,
    pub seed: u64,
    /// Fixed cost of opening each arc.
    pub arc_costs: Vec<i64>,
    /// Per-unit flow cost, indexed `[arc][commodity]`.
    pub flow_costs: Vec<Vec<i64>>,
    pub capacities: Vec<i64>,
    /// Demands are sampled uniformly from `0..=max_demand`.
    pub max_demand: i64,
}

impl Default for SndConfig {
    fn default() -> Self {
        SndConfig {
            vertices: 3,
            arcs: vec![(0, 1), (1, 2), (2, 0)],
            commodities: vec![(0, 1)],
            scenarios: 2,
            seed: 0,
            arc_costs: vec![3, 2, 2],
            flow_costs: vec![vec![1], vec![1], vec![1]],
            capacities: vec![1, 1, 1],
            max_demand: 1,
        }
    }
}

impl SndConfig {
    pub fn new(scenarios: usize, seed: u64) -> Self {
        SndConfig { scenarios, seed, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        let arcs = self.arcs.len();
        check_dim(arcs, self.arc_costs.len())?;
        check_dim(arcs, self.flow_costs.len())?;
        check_dim(arcs, self.capacities.len())?;
        for row in &self.flow_costs {
            check_dim(self.commodities.len(), row.len())?;
        }
        let bad = |msg: &str| Err(Error::InvalidInput(msg.into()));
        if self.scenarios == 0 {
            return bad("scenario count must be positive");
        }
        if self.arcs.iter().chain(&self.commodities).any(|&(u, v)| u >= self.vertices || v >= self.vertices || u == v) {
            return bad("arcs and commodities need distinct endpoints among the vertices");
        }
        if self.max_demand < 0 || self.capacities.iter().any(|&u| u < 0) {
            return bad("demands and capacities must be non-negative");
        }
        if self.arc_costs.iter().chain(self.flow_costs.iter().flatten()).any(|&c| c < 0) {
            return bad("costs must be non-negative");
        }
        Ok(())
    }
}

/// Net outflow required at each vertex, indexed `[commodity][vertex]`.
pub type Demands = Vec<Vec<i64>>;

fn check_balanced(d: &Demands) -> Result<()> {
    if d.iter().any(|per_vertex| per_vertex.iter().sum::<i64>() != 0) {
        return Err(Error::InvalidInput("commodity demands do not balance".into()));
    }
    Ok(())
}

/// Variables: first stage `(x_a, s_a)` with `x_a + s_a = 1`; recourse
/// `(y_ac, w_a)` with flow conservation per (vertex, commodity) and
/// `Σ_c y_ac + w_a = u_a x_a` per arc.
pub fn gen_snd(config: &SndConfig) -> Result<SipInstance> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let demands = (0..config.scenarios)
        .map(|_| {
            config
                .commodities
                .iter()
                .map(|&(from, to)| {
                    let d = rng.gen_range(0..=config.max_demand);
                    let mut row = vec![0; config.vertices];
                    row[from] = d;
                    row[to] = -d;
                    row
                })
                .collect()
        })
        .collect::<Vec<Demands>>();
    snd_instance(config, &demands)
}

/// Builds the instance for explicit per-scenario demands.
pub fn snd_instance(config: &SndConfig, demands: &[Demands]) -> Result<SipInstance> {
    config.validate()?;
    check_dim(config.scenarios, demands.len())?;
    let (nv, na, nc) = (config.vertices, config.arcs.len(), config.commodities.len());
    let flow_vars = na * nc;
    let rows = nv * nc + na;
    let mut w = IntMatrix::zeros(rows, flow_vars + na);
    let mut t = IntMatrix::zeros(rows, 2 * na);
    for (a, &(from, to)) in config.arcs.iter().enumerate() {
        for c in 0..nc {
            let col = a * nc + c;
            w.set(c * nv + from, col, 1.into());
            w.set(c * nv + to, col, (-1).into());
            w.set(nv * nc + a, col, 1.into());
        }
        w.set(nv * nc + a, flow_vars + a, 1.into());
        t.set(nv * nc + a, a, (-config.capacities[a]).into());
    }
    let mut cost = Vec::with_capacity(flow_vars + na);
    for row in &config.flow_costs {
        cost.extend_from_slice(row);
    }
    cost.extend(std::iter::repeat_n(0, na));

    let n = demands.len();
    let scenarios = demands
        .iter()
        .map(|d| {
            check_dim(nc, d.len())?;
            for per_vertex in d {
                check_dim(nv, per_vertex.len())?;
            }
            check_balanced(d)?;
            let mut rhs: Vec<i64> = d.iter().flatten().copied().collect();
            rhs.extend(std::iter::repeat_n(0, na));
            Ok(Scenario {
                p_num: BigInt::from(1),
                p_den: BigInt::from(n),
                cost: IntVector::from(cost.clone()),
                rhs: IntVector::from(rhs),
                technology: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut fs = IntMatrix::zeros(na, 2 * na);
    for a in 0..na {
        fs.set(a, a, 1.into());
        fs.set(a, na + a, 1.into());
    }
    let mut gamma = config.arc_costs.clone();
    gamma.extend(std::iter::repeat_n(0, na));
    Ok(SipInstance {
        gamma: IntVector::from(gamma),
        technology: t,
        recourse: w,
        first_stage_bounds: vec![JsonInt(1.into()); 2 * na],
        first_stage_constraints: Some(FirstStageConstraints { a: fs, b: IntVector::from(vec![1; na]) }),
        scenarios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opcost::{
        opcost_graver, opcost_kernel, opcost_oracle, rhs, single_scenario_decisions, Method, OpcostOptions,
    };
    use proptest::prelude::*;

    fn v(x: &[i64]) -> IntVector {
        IntVector::from(x)
    }

    #[test]
    fn hs_coefficients_and_box() {
        let inst = gen_hs(&HsConfig::new(5, 7)).unwrap();
        assert_eq!(inst.gamma, v(&[35, 40]));
        assert_eq!(inst.scenarios[0].cost, v(&[16, 19, 47, 54, 0, 0, 0, 0]));
        assert_eq!(inst.recourse, IntMatrix::from_rows(&HS_RECOURSE).unwrap());
        assert_eq!(HS_DEFAULT_BOX, [(300, 12000), (300, 12000), (200, 12000), (200, 12000)]);
        for s in &inst.scenarios {
            for (k, (lo, hi)) in HS_DEFAULT_BOX.iter().enumerate() {
                assert!(s.rhs[k] >= BigInt::from(*lo) && s.rhs[k] <= BigInt::from(*hi));
            }
            assert_eq!((s.p_num.clone(), s.p_den.clone()), (1.into(), 5.into()));
        }
        assert_eq!(inst.first_stage_upper_bounds().unwrap(), vec![BigInt::from(12000); 2]);
        inst.validate().unwrap();
    }

    #[test]
    fn hs_is_deterministic() {
        let a = gen_hs(&HsConfig::scaled(2, 11)).unwrap();
        assert_eq!(a, gen_hs(&HsConfig::scaled(2, 11)).unwrap());
        assert_ne!(a, gen_hs(&HsConfig::scaled(2, 12)).unwrap());
    }

    #[test]
    fn hs_rejects_bad_box() {
        let mut cfg = HsConfig::scaled(2, 1);
        cfg.r#box[2] = (-1, 5);
        assert!(gen_hs(&cfg).is_err());
        cfg.r#box[2] = (6, 5);
        assert!(gen_hs(&cfg).is_err());
    }

    #[test]
    fn hs_rhs_examples() {
        let mut inst = gen_hs(&HsConfig::scaled(1, 0)).unwrap();
        inst.scenarios[0].rhs = v(&[5, 7, 4, 6]);
        assert_eq!(rhs(&inst, &v(&[0, 0]), 0).unwrap(), v(&[5, 7, 4, 6]));
        assert_eq!(rhs(&inst, &v(&[9, 0]), 0).unwrap(), v(&[-4, 7, 4, 6]));
    }

    #[test]
    fn hs_feasible_examples() {
        assert_eq!(hs_feasible(&v(&[0, 0]), &v(&[5, 7, 4, 6])).unwrap(), v(&[0, 0, 5, 7, 0, 0, 4, 6]));
        assert_eq!(hs_feasible(&v(&[9, 0]), &v(&[5, 7, 4, 6])).unwrap(), v(&[0, 0, 0, 7, 4, 0, 4, 6]));
        assert!(hs_feasible(&v(&[0, 0]), &v(&[5, 7, -1, 6])).is_err());
    }

    #[test]
    fn hs_blocks_replicate() {
        let inst = gen_hs(&HsConfig::scaled(3, 2).with_blocks(3)).unwrap();
        assert_eq!((inst.recourse.rows(), inst.recourse.cols()), (12, 24));
        assert_eq!(inst.gamma.dim(), 6);
        assert_eq!(inst.recourse.get(4, 8), &BigInt::from(1));
        assert_eq!(inst.recourse.get(0, 8), &BigInt::from(0));
        inst.validate().unwrap();
    }

    #[test]
    fn hs_matches_unit_column_start() {
        let inst = gen_hs(&HsConfig::scaled(4, 9)).unwrap();
        for (j, s) in inst.scenarios.iter().enumerate() {
            for x in [v(&[0, 0]), v(&[12, 3])] {
                let b = rhs(&inst, &x, j).unwrap();
                let z = crate::augment::unit_column_start(&inst.recourse, &b).unwrap();
                assert_eq!(z, hs_feasible(&x, &s.rhs).unwrap());
            }
        }
    }

    fn conservation_rows_cancel(inst: &SipInstance, cfg: &SndConfig) {
        let (nv, na, nc) = (cfg.vertices, cfg.arcs.len(), cfg.commodities.len());
        for c in 0..nc {
            for col in 0..na * nc {
                let s: BigInt = (0..nv).map(|v| inst.recourse.get(c * nv + v, col).clone()).sum();
                assert_eq!(s, BigInt::from(0));
            }
        }
    }

    #[test]
    fn snd_structure() {
        let cfg = SndConfig::new(4, 3);
        let inst = gen_snd(&cfg).unwrap();
        inst.validate().unwrap();
        assert_eq!((inst.recourse.rows(), inst.recourse.cols()), (6, 6));
        assert_eq!(inst.first_stage_upper_bounds().unwrap(), vec![BigInt::from(1); 6]);
        conservation_rows_cancel(&inst, &cfg);
        assert_eq!(inst, gen_snd(&cfg).unwrap());
    }

    #[test]
    fn snd_rejects_unbalanced_demand() {
        let cfg = SndConfig::new(1, 0);
        assert!(snd_instance(&cfg, &[vec![vec![1, 0, 0]]]).is_err());
        assert!(snd_instance(&cfg, &[vec![vec![1, -1, 0]]]).is_ok());
    }

    #[test]
    fn snd_zero_demand_gives_zero_matrix() {
        let cfg = SndConfig::new(2, 0);
        let inst = snd_instance(&cfg, &[vec![vec![0; 3]], vec![vec![0; 3]]]).unwrap();
        let dec = single_scenario_decisions(&inst, Method::Kernel).unwrap();
        assert!(dec.decisions.iter().all(|x| x.entries()[..3].iter().all(|e| *e == BigInt::from(0))));
        let m = opcost_kernel(&inst, &dec, OpcostOptions::default()).unwrap();
        assert!(m.values.iter().all(|x| x.as_ref() == Some(&BigInt::from(0))));
    }

    #[test]
    fn snd_unit_demand_matches_oracle() {
        let cfg = SndConfig::new(2, 0);
        let inst = snd_instance(&cfg, &[vec![vec![1, -1, 0]], vec![vec![0; 3]]]).unwrap();
        let dec = single_scenario_decisions(&inst, Method::Oracle).unwrap();
        assert_eq!(dec, single_scenario_decisions(&inst, Method::Kernel).unwrap());
        assert_eq!(dec, single_scenario_decisions(&inst, Method::Graver).unwrap());
        let opts = OpcostOptions::default();
        let o = opcost_oracle(&inst, &dec, opts).unwrap();
        assert!(o.same_values(&opcost_kernel(&inst, &dec, opts).unwrap()));
        assert!(o.same_values(&opcost_graver(&inst, &dec, opts).unwrap()));
        // opening arc (0,1) costs 3 plus one unit of flow
        assert_eq!(o.get(0, 0), Some(&BigInt::from(4)));
        // the closed network cannot route the demand
        assert_eq!(o.get(1, 0), None);
    }

    proptest! {
        #[test]
        fn hs_feasible_satisfies_rows(x1 in 0i64..40, x2 in 0i64..40, xi in prop::array::uniform4(0i64..40)) {
            let x = v(&[x1, x2]);
            let xi = IntVector::from(xi);
            let z = hs_feasible(&x, &xi).unwrap();
            prop_assert!(z.is_nonnegative());
            let w = IntMatrix::from_rows(&HS_RECOURSE).unwrap();
            let t = IntMatrix::from_rows(&HS_TECHNOLOGY).unwrap();
            prop_assert_eq!(w.mul_vec(&z).unwrap(), &xi - &t.mul_vec(&x).unwrap());
        }

        #[test]
        fn hs_samples_stay_in_box(seed in any::<u64>(), n in 1usize..6) {
            let inst = gen_hs(&HsConfig::scaled(n, seed)).unwrap();
            for s in &inst.scenarios {
                for (k, (lo, hi)) in HS_SCALED_BOX.iter().enumerate() {
                    prop_assert!(s.rhs[k] >= BigInt::from(*lo) && s.rhs[k] <= BigInt::from(*hi));
                }
            }
        }

        #[test]
        fn snd_conservation_cancels(seed in any::<u64>(), n in 1usize..4) {
            let mut cfg = SndConfig::new(n, seed);
            cfg.commodities = vec![(0, 1), (2, 1)];
            cfg.flow_costs = vec![vec![1, 2]; 3];
            cfg.max_demand = 2;
            let inst = gen_snd(&cfg).unwrap();
            conservation_rows_cancel(&inst, &cfg);
            for s in &inst.scenarios {
                for c in 0..2 {
                    let total: BigInt = (0..3).map(|v| s.rhs[c * 3 + v].clone()).sum();
                    prop_assert_eq!(total, BigInt::from(0));
                }
            }
        }
    }
}
