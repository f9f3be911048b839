use num_bigint::BigInt;
use proptest::prelude::*;
use toricopt::instances::{gen_hs, gen_snd, hs_feasible, HsConfig, SndConfig};
use toricopt::opcost::{
    opcost, opcost_kernel, rhs, single_scenario_decisions, DecisionList, Method, OpcostOptions, OppCostMatrix,
    SipInstance,
};
use toricopt::oracle::{solve_bruteforce, IpProblem};
use toricopt::IntVector;

fn opts() -> OpcostOptions {
    OpcostOptions::default()
}

#[test]
fn single_scenario_matches_deterministic_optimum() {
    let inst = gen_hs(&HsConfig::scaled(1, 21)).unwrap();
    let dec = single_scenario_decisions(&inst, Method::Kernel).unwrap();
    let (a, b, c) = inst.one_scenario_system(0).unwrap();
    let best = solve_bruteforce(&IpProblem::new(a, b, c, 24).unwrap()).unwrap();
    let m = opcost_kernel(&inst, &dec, opts()).unwrap();
    assert_eq!(m.get(0, 0), best.value.as_ref());
    assert_eq!(dec.decisions[0].entries(), &best.solution.unwrap().entries()[..2]);
}

#[test]
fn identical_scenarios_give_identical_decisions_and_constant_columns() {
    let mut inst = gen_hs(&HsConfig::scaled(3, 5)).unwrap();
    let s0 = inst.scenarios[0].clone();
    for s in &mut inst.scenarios {
        s.rhs = s0.rhs.clone();
    }
    let dec = single_scenario_decisions(&inst, Method::Graver).unwrap();
    assert!(dec.decisions.iter().all(|x| x == &dec.decisions[0]));
    let m = opcost(&inst, &dec, Method::Graver, opts()).unwrap();
    assert!(m.values.iter().all(|v| v == &m.values[0]));
}

#[test]
fn injective_recourse_has_fixed_cells() {
    // W = I: the recourse is forced to b, so nothing can be augmented
    let inst = SipInstance::from_json(
        r#"{"gamma":[1],"technology":[[1],[0]],"recourse":[[1,0],[0,1]],"first_stage_bounds":[4],
            "scenarios":[{"p_num":1,"p_den":2,"cost":[2,3],"rhs":[4,1]},
                         {"p_num":1,"p_den":2,"cost":[1,1],"rhs":[2,2]}]}"#,
    )
    .unwrap();
    let dec = DecisionList::new(vec![IntVector::from([1]), IntVector::from([3])]);
    let m = opcost(&inst, &dec, Method::Graver, opts()).unwrap();
    // x=1, scenario 0: y=(3,1) costs 9, plus 1
    assert_eq!(m.get(0, 0), Some(&BigInt::from(10)));
    // x=3, scenario 1: y=(-1,2) infeasible
    assert_eq!(m.get(1, 1), None);
    let o = opcost(&inst, &dec, Method::Oracle, opts()).unwrap();
    assert!(m.same_values(&o));
}

#[test]
fn permuting_scenarios_permutes_the_matrix() {
    let inst = gen_hs(&HsConfig::scaled(4, 8)).unwrap();
    let dec = single_scenario_decisions(&inst, Method::Kernel).unwrap();
    let perm = [2usize, 0, 3, 1];
    let mut p_inst = inst.clone();
    p_inst.scenarios = perm.iter().map(|&k| inst.scenarios[k].clone()).collect();
    let p_dec = DecisionList::new(perm.iter().map(|&k| dec.decisions[k].clone()).collect());
    for method in [Method::Kernel, Method::Oracle] {
        let m = opcost(&inst, &dec, method, opts()).unwrap();
        let pm = opcost(&p_inst, &p_dec, method, opts()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(pm.get(i, j), m.get(perm[i], perm[j]));
            }
        }
    }
}

#[test]
fn schedule_independence() {
    let inst = gen_hs(&HsConfig::scaled(12, 3)).unwrap();
    let dec = single_scenario_decisions(&inst, Method::Kernel).unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| opcost_kernel(&inst, &dec, opts()).unwrap())
    };
    let a = run(1);
    for threads in [2, 5, 8] {
        assert!(a.same_values(&run(threads)));
    }
}

#[test]
fn full_box_instance_runs_on_algebraic_methods() {
    let inst = gen_hs(&HsConfig::new(6, 2)).unwrap();
    let dec = single_scenario_decisions(&inst, Method::Kernel).unwrap();
    let k = opcost(&inst, &dec, Method::Kernel, opts()).unwrap();
    let g = opcost(&inst, &dec, Method::Graver, opts()).unwrap();
    assert!(k.same_values(&g));
    for j in 0..6 {
        let min = (0..6).map(|i| k.get(i, j).unwrap()).min().unwrap();
        assert_eq!(k.get(j, j).unwrap(), min);
    }
}

#[test]
fn huge_right_hand_sides_stay_exact() {
    let mut inst = gen_hs(&HsConfig::scaled(2, 1)).unwrap();
    let big = BigInt::from(1) << 70;
    for s in &mut inst.scenarios {
        s.rhs = IntVector::new(s.rhs.iter().map(|x| x + &big).collect());
    }
    inst.first_stage_bounds.iter_mut().for_each(|b| b.0 = &big * 2);
    let dec = DecisionList::new(vec![IntVector::from([0, 0]), IntVector::from([5, 5])]);
    let k = opcost(&inst, &dec, Method::Kernel, opts()).unwrap();
    let g = opcost(&inst, &dec, Method::Graver, opts()).unwrap();
    assert!(k.same_values(&g));
    // the covering rows force y1 + y3 >= ξ1, so the value is at least 16 ξ1
    assert!(k.get(0, 0).unwrap() > &(&big * 16));
    let reread = SipInstance::from_json(&inst.to_json()).unwrap();
    assert_eq!(reread, inst);
}

#[test]
fn snd_methods_agree() {
    let mut cfg = SndConfig::new(3, 4);
    cfg.max_demand = 2;
    cfg.capacities = vec![2, 2, 2];
    let inst = gen_snd(&cfg).unwrap();
    let dec = single_scenario_decisions(&inst, Method::Oracle).unwrap();
    assert_eq!(dec, single_scenario_decisions(&inst, Method::Kernel).unwrap());
    let o = opcost(&inst, &dec, Method::Oracle, opts()).unwrap();
    assert!(o.same_values(&opcost(&inst, &dec, Method::Kernel, opts()).unwrap()));
    assert!(o.same_values(&opcost(&inst, &dec, Method::Graver, opts()).unwrap()));
}

#[test]
fn csv_and_json_round_trip() {
    let inst = gen_hs(&HsConfig::scaled(3, 2)).unwrap();
    let dec = single_scenario_decisions(&inst, Method::Kernel).unwrap();
    let m = opcost_kernel(&inst, &dec, opts()).unwrap();
    let parsed = OppCostMatrix::values_from_csv(&m.to_csv()).unwrap();
    assert_eq!(parsed.into_iter().flatten().collect::<Vec<_>>(), m.values);
    let doc = m.to_json(false);
    assert_eq!(doc["method"], "kernel");
    assert_eq!(doc["checksum"], format!("{:016x}", m.checksum()));
    assert!(doc.get("timings_us").is_none());
    let decisions: DecisionList = serde_json::from_value(serde_json::json!({ "decisions": doc["decisions"] })).unwrap();
    assert_eq!(decisions, dec);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kernel_equals_oracle_on_random_decisions(
        seed in any::<u64>(),
        xs in prop::collection::vec((0i64..=12, 0i64..=12), 3),
    ) {
        let inst = gen_hs(&HsConfig::scaled(3, seed)).unwrap();
        let dec = DecisionList::new(xs.iter().map(|&(a, b)| IntVector::from([a, b])).collect());
        let k = opcost(&inst, &dec, Method::Kernel, opts()).unwrap();
        let o = opcost(&inst, &dec, Method::Oracle, opts()).unwrap();
        prop_assert!(k.same_values(&o));
        let q = opcost(&inst, &dec, Method::Graver, OpcostOptions { q_only: true }).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let first = inst.gamma.dot(&dec.decisions[i]);
                prop_assert_eq!(k.get(i, j).unwrap() - q.get(i, j).unwrap(), first);
            }
        }
    }

    #[test]
    fn hs_closed_form_start_is_feasible(seed in any::<u64>(), x1 in 0i64..=12, x2 in 0i64..=12) {
        let inst = gen_hs(&HsConfig::scaled(2, seed)).unwrap();
        let x = IntVector::from([x1, x2]);
        for j in 0..2 {
            let z = hs_feasible(&x, &inst.scenarios[j].rhs).unwrap();
            prop_assert_eq!(inst.recourse.mul_vec(&z).unwrap(), rhs(&inst, &x, j).unwrap());
        }
    }

    #[test]
    fn instance_json_round_trips(seed in any::<u64>(), n in 1usize..5, shift in 0u32..80) {
        let mut inst = gen_hs(&HsConfig::scaled(n, seed)).unwrap();
        for s in &mut inst.scenarios {
            s.rhs = IntVector::new(s.rhs.iter().map(|x| x << shift).collect());
        }
        let text = inst.to_json();
        let back = SipInstance::from_json(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(back.to_json(), text);
    }
}
