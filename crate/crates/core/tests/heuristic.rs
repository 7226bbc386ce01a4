mod common;

use std::collections::BTreeMap;
use std::time::Duration;

use common::{conflict_instance, single_path, tiny_instance};
use confl_core::heuristic::*;
use confl_core::instance::*;
use confl_core::*;
use confl_milp::{solve_mip, MipStatus};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One user and three fiber-capable facilities at zero network cost:
/// f0 opens for 1, f1 for 2, f2 has no core arc at all.
fn two_prices() -> Instance {
    let fac = |id, c| Facility { id, position: Position::new(id as f64, 0.0), open_cost: [c, 100.0, 100.0] };
    Instance {
        meta: Meta { name: "prices".into(), ..Meta::default() },
        users: vec![User { id: 0, weight: 1.0, position: Position::new(0.0, 1.0) }],
        facilities: vec![fac(0, 1.0), fac(1, 2.0), fac(2, 1.0)],
        central_offices: vec![CentralOffice { id: 0, position: Position::new(0.0, 2.0), open_cost: 0.0 }],
        steiner_nodes: vec![],
        core_arcs: (0..2)
            .map(|f| CoreArc { tail: CoreNode::CentralOffice(0), head: CoreNode::Facility(f), cost: 0.0 })
            .collect(),
        assignment_arcs: AssignmentArcs {
            fiber: (0..3).map(|f| AssignmentArc { facility: f, user: 0, cost: 0.0 }).collect(),
            ..AssignmentArcs::default()
        },
        coverage_thresholds: [1.0, 1.0, 0.0],
        wireless: Some(Wireless { p_min: 0.1, p_max: 1.0, delta: 2.0, noise: 0.05, fading: vec![vec![0.0]; 3] }),
    }
}

fn strong_of(inst: &Instance) -> (ConflModel, ConflModel) {
    let plain = build_3confl(inst).unwrap();
    let strong = strengthen(&plain, inst).unwrap();
    (plain, strong)
}

#[test]
fn tau_inverts_the_fixed_relaxation() {
    let (_, strong) = strong_of(&two_prices());
    let table = attractiveness_init(&strong).unwrap();
    assert!((table.root_bound - 1.0).abs() < 1e-9);
    assert!((table.get(0, Technology::Fiber) - 1.0).abs() < 1e-9);
    assert!((table.get(1, Technology::Fiber) - 0.5).abs() < 1e-9);
    // f2 cannot be connected to the root.
    assert_eq!(table.get(2, Technology::Fiber), EPS_TAU);
    assert_eq!(table.get(2, Technology::Wireless), EPS_TAU);
}

#[test]
fn posterior_examples() {
    let inst = two_prices();
    let (plain, _) = strong_of(&inst);
    let root = relaxation_value(&plain, &[]).unwrap().unwrap();
    let empty = Fos::new();
    assert!((posterior_attractiveness(&plain, root, &empty, (0, Technology::Fiber)).unwrap() - 1.0).abs() < 1e-9);
    assert!((posterior_attractiveness(&plain, root, &empty, (1, Technology::Fiber)).unwrap() - 0.5).abs() < 1e-9);
    let fos: Fos = [(0, Technology::Fiber)].into_iter().collect();
    assert_eq!(posterior_attractiveness(&plain, root, &fos, (2, Technology::Copper)).unwrap(), EPS_TAU);
}

#[test]
fn posterior_shrinks_under_nested_fixings() {
    for seed in 0..16 {
        let inst = tiny_instance(seed);
        let (plain, _) = strong_of(&inst);
        let Some(root) = relaxation_value(&plain, &[]).unwrap() else { continue };
        let nf = inst.facilities.len();
        for cand in 0..nf {
            for t in Technology::ALL {
                let base = posterior_attractiveness(&plain, root, &Fos::new(), (cand, t)).unwrap();
                for other in (0..nf).filter(|&f| f != cand) {
                    for s in Technology::ALL {
                        let fos: Fos = [(other, s)].into_iter().collect();
                        let nested = posterior_attractiveness(&plain, root, &fos, (cand, t)).unwrap();
                        assert!(nested <= base + 1e-9, "seed {seed}: {nested} > {base}");
                    }
                }
            }
        }
    }
}

/// Facility i reaches the single user on technology i only.
fn one_per_technology() -> Instance {
    let mut inst = conflict_instance();
    inst.users.truncate(1);
    inst.assignment_arcs = AssignmentArcs {
        fiber: vec![AssignmentArc { facility: 0, user: 0, cost: 0.0 }],
        copper: vec![AssignmentArc { facility: 1, user: 0, cost: 0.0 }],
        wireless: vec![AssignmentArc { facility: 2, user: 0, cost: 0.0 }],
    };
    inst.coverage_thresholds = [1.0, 1.0, 1.0];
    inst.wireless.as_mut().unwrap().fading = vec![vec![0.0], vec![0.0], vec![1.0]];
    inst.validate().unwrap();
    inst
}

fn fos_for(inst: &Instance, seed: u64) -> Result<Fos, HeuristicError> {
    let (plain, strong) = strong_of(inst);
    let table = attractiveness_init(&strong).unwrap();
    build_fos(inst, &plain, &table, &HeuristicParams::default(), &mut ChaCha8Rng::seed_from_u64(seed))
}

#[test]
fn forced_fos_is_built_deterministically() {
    let inst = one_per_technology();
    let expected: Fos = [(0, Technology::Fiber), (1, Technology::Copper), (2, Technology::Wireless)].into_iter().collect();
    for seed in 0..5 {
        assert_eq!(fos_for(&inst, seed).unwrap(), expected);
    }
}

#[test]
fn zero_thresholds_give_an_empty_fos() {
    let mut inst = one_per_technology();
    inst.coverage_thresholds = [0.0; 3];
    assert!(fos_for(&inst, 0).unwrap().is_empty());
}

#[test]
fn unreachable_threshold_cannot_be_completed() {
    let mut inst = one_per_technology();
    let (plain, strong) = strong_of(&inst);
    let table = attractiveness_init(&strong).unwrap();
    inst.coverage_thresholds = [1.0, 2.0, 2.0];
    let err = build_fos(&inst, &plain, &table, &HeuristicParams::default(), &mut ChaCha8Rng::seed_from_u64(0));
    assert!(matches!(err, Err(HeuristicError::NoCompletableFos { technology: Technology::Copper })));
}

#[test]
fn seeded_fos_construction_repeats() {
    for seed in 0..8 {
        let inst = tiny_instance(seed);
        let (plain, strong) = strong_of(&inst);
        let Ok(table) = attractiveness_init(&strong) else { continue };
        let params = HeuristicParams::default();
        let build = || build_fos_partial(&inst, &plain, &table, &params, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        let (a, b) = (build(), build());
        assert_eq!(a, b);
        if a.1.is_empty() {
            for t in Technology::ALL {
                assert!(is_complete(&a.0, &inst, t));
            }
        }
    }
}

fn wireless_fos(pairs: &[usize]) -> Fos {
    pairs.iter().map(|&f| (f, Technology::Wireless)).collect()
}

#[test]
fn conflict_free_fos_needs_no_repair() {
    let inst = conflict_instance();
    let plain = build_3confl(&inst).unwrap();
    let out = check_and_repair(&inst, &plain, &wireless_fos(&[0, 2]), &HeuristicParams::default()).unwrap();
    assert_eq!(out.status, OutcomeStatus::Optimal);
    assert!(!out.repaired);
    let x = out.solution.unwrap();
    assert!(verify_solution(&inst, &plain, &x).unwrap().feasible);
    for f in [0, 2] {
        assert!(x.get(plain.z_var(f, Technology::Wireless)) > 0.5);
    }
}

#[test]
fn conflicting_fos_is_repaired() {
    let inst = conflict_instance();
    let plain = build_3confl(&inst).unwrap();
    let fos = wireless_fos(&[0, 1]);
    let params = HeuristicParams::default();

    let fixings: BTreeMap<_, _> = fos_center(&plain, &fos).iter().map(|(&(f, t), &on)| (plain.z_var(f, t), on as u8 as f64)).collect();
    let fixed = solve_mip(&plain.model.apply_fixings(&fixings).unwrap(), Duration::from_secs(30)).unwrap();
    assert_eq!(fixed.status, MipStatus::Infeasible);

    let out = check_and_repair(&inst, &plain, &fos, &params).unwrap();
    assert!(out.repaired);
    let x = out.solution.unwrap();
    assert!(verify_solution(&inst, &plain, &x).unwrap().feasible);
    let flips = fos_center(&plain, &fos)
        .iter()
        .filter(|(&(f, t), &on)| (x.get(plain.z_var(f, t)) > 0.5) != on)
        .count();
    assert!(flips <= params.radius(inst.facilities.len()));
    // Office, two root-side arcs, f0 and f2 on wireless.
    assert!((out.objective - 7.0).abs() < 1e-9);
}

#[test]
fn wired_fos_needs_no_repair() {
    let inst = single_path();
    let plain = build_3confl(&inst).unwrap();
    let fos: Fos = [(0, Technology::Fiber)].into_iter().collect();
    let out = check_and_repair(&inst, &plain, &fos, &HeuristicParams::default()).unwrap();
    assert!(!out.repaired);
    assert!((out.objective - 17.5).abs() < 1e-9);
}

#[test]
fn zero_radius_equals_check_only() {
    let inst = conflict_instance();
    let plain = build_3confl(&inst).unwrap();
    let params = HeuristicParams { vlns_radius: Some(0), ..HeuristicParams::default() };
    for pick in [[0, 1], [0, 2], [1, 2]] {
        let fos = wireless_fos(&pick);
        let center = fos_center(&plain, &fos);
        let fixings = center.iter().map(|(&(f, t), &on)| (plain.z_var(f, t), on as u8 as f64)).collect();
        let check = solve_mip(&plain.model.apply_fixings(&fixings).unwrap(), Duration::from_secs(30)).unwrap();
        let ball = vlns(&inst, &plain, &center, &params, VlnsMode::Repair).unwrap();
        assert_eq!(check.status.has_solution(), ball.has_solution(), "{pick:?}");
        if ball.has_solution() {
            assert!((check.objective - ball.objective).abs() < 1e-9);
        }
    }
}

#[test]
fn wide_radius_equals_unrestricted_solve() {
    for seed in 0..10 {
        let inst = tiny_instance(seed);
        let plain = build_3confl(&inst).unwrap();
        let full = solve_mip(&plain.model, Duration::from_secs(60)).unwrap();
        let params = HeuristicParams { vlns_radius: Some(inst.facilities.len() * 3), ..HeuristicParams::default() };
        let center = plain.z.keys().map(|&k| (k, true)).collect();
        let ball = vlns(&inst, &plain, &center, &params, VlnsMode::Repair).unwrap();
        assert_eq!(full.status.has_solution(), ball.has_solution(), "seed {seed}");
        if ball.has_solution() {
            assert!((full.objective - ball.objective).abs() < 1e-6, "seed {seed}");
        }
    }
}

#[test]
fn improve_from_optimum_finds_nothing() {
    for seed in 0..10 {
        let inst = tiny_instance(seed);
        let plain = build_3confl(&inst).unwrap();
        let full = solve_mip(&plain.model, Duration::from_secs(60)).unwrap();
        let Some(x) = full.incumbent else { continue };
        let center = solution_center(&plain, &x);
        let params = HeuristicParams { vlns_radius: Some(inst.facilities.len() * 3), ..HeuristicParams::default() };
        let out = vlns(&inst, &plain, &center, &params, VlnsMode::Improve { incumbent: full.objective }).unwrap();
        assert!(!out.has_solution(), "seed {seed}: {}", out.objective);
    }
}

#[test]
fn forced_optimum_is_returned_with_its_gap() {
    let inst = single_path();
    let r = run(&inst, &HeuristicParams::test_mode(2, 0)).unwrap();
    assert_eq!(r.status, RunStatus::Solved);
    let v = r.objective.unwrap();
    assert!((v - 17.5).abs() < 1e-9);
    assert!((r.gap.unwrap() - ogap(v, r.lower_bound).unwrap()).abs() < 1e-12);
    let plain = build_3confl(&inst).unwrap();
    assert!(verify_solution(&inst, &plain, r.solution.as_ref().unwrap()).unwrap().feasible);
}

#[test]
fn seeded_runs_repeat() {
    for seed in [2, 5] {
        let inst = tiny_instance(seed);
        let params = HeuristicParams::test_mode(3, 9);
        assert_eq!(run(&inst, &params).unwrap(), run(&inst, &params).unwrap());
    }
}

#[test]
fn infeasible_instance_reports_no_solution() {
    let inst = tiny_instance(6);
    let r = run(&inst, &HeuristicParams::test_mode(2, 0)).unwrap();
    assert_eq!(r.status, RunStatus::NoSolution);
    assert!(r.solution.is_none() && r.gap.is_none());
}

#[test]
fn unattainable_threshold_is_rejected_up_front() {
    let mut inst = single_path();
    inst.coverage_thresholds = [0.0, 1.0, 1.0];
    inst.assignment_arcs.fiber.clear();
    match run(&inst, &HeuristicParams::test_mode(1, 0)) {
        Err(HeuristicError::NoCompletableFos { technology }) => assert_eq!(technology, Technology::Copper),
        other => panic!("{other:?}"),
    }
}

#[test]
fn invalid_params_are_rejected() {
    let params = HeuristicParams { alpha: 1.5, ..HeuristicParams::default() };
    assert!(matches!(run(&single_path(), &params), Err(HeuristicError::Params(_))));
    let params = HeuristicParams { sigma: 0, ..HeuristicParams::default() };
    assert!(matches!(run(&single_path(), &params), Err(HeuristicError::Params(_))));
}
