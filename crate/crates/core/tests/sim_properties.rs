mod support;

use proptest::prelude::*;
use scene_director::director::{parse_plan, Destination};
use scene_director::scene::{AgentSpec, ObjectSpec, Scene};
use scene_director::sim::{check_feasibility, simulate, ConflictPolicy, EventKind, SimError};
use scene_director::synth::{random_plan, random_scene};
use support::oracles::{check_trace, expected_arrivals};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn single_agent_arrivals_are_exact(seed in any::<u64>(), objects in 1usize..8) {
        let scene = random_scene(seed, 1, objects, 10.0);
        let plan = random_plan(&scene, seed.wrapping_add(1), 6);
        let trace = simulate(&scene, &plan, ConflictPolicy::Fail).unwrap();
        let agent = &scene.agents[0].id;
        let got: Vec<f64> = trace
            .events_for(agent)
            .filter(|e| e.kind == EventKind::Arrive)
            .map(|e| e.time)
            .collect();
        let want = expected_arrivals(&scene, &plan, agent);
        prop_assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).abs() <= 1e-9, "arrival {} vs oracle {}", g, w);
        }
        prop_assert!(check_trace(&scene, &plan, &trace).is_ok());
    }

    #[test]
    fn multi_agent_invariants(seed in any::<u64>(), agents in 2usize..6, objects in 1usize..10) {
        let scene = random_scene(seed, agents, objects, 6.0);
        let plan = random_plan(&scene, seed ^ 0x5eed, 4);
        let waited = simulate(&scene, &plan, ConflictPolicy::Wait).unwrap();
        if let Err(e) = check_trace(&scene, &plan, &waited) {
            prop_assert!(false, "wait policy: {}", e);
        }
        match simulate(&scene, &plan, ConflictPolicy::Fail) {
            Ok(trace) => {
                if let Err(e) = check_trace(&scene, &plan, &trace) {
                    prop_assert!(false, "fail policy: {}", e);
                }
                prop_assert!(trace.conflicts.is_empty());
            }
            Err(SimError::Conflict(record)) => prop_assert_eq!(record.agents.len(), 2),
            Err(other) => prop_assert!(false, "unexpected error {}", other),
        }
    }

    #[test]
    fn empty_prediction_means_fail_policy_succeeds(seed in any::<u64>(), agents in 1usize..5, objects in 1usize..10) {
        let scene = random_scene(seed, agents, objects, 8.0);
        let plan = random_plan(&scene, !seed, 3);
        if check_feasibility(&scene, &plan).is_empty() {
            prop_assert!(simulate(&scene, &plan, ConflictPolicy::Fail).is_ok());
        }
    }

    #[test]
    fn equal_inputs_give_equal_traces(seed in any::<u64>()) {
        let scene = random_scene(seed, 3, 6, 5.0);
        let plan = random_plan(&scene, seed, 4);
        let a = simulate(&scene, &plan, ConflictPolicy::Wait).unwrap();
        let b = simulate(&scene, &plan, ConflictPolicy::Wait).unwrap();
        prop_assert_eq!(a.to_jsonl(), b.to_jsonl());
    }
}

fn switch_scene(initial: bool) -> Scene {
    Scene {
        agents: vec![AgentSpec {
            name: "Guy".into(),
            id: "A_1".into(),
            tags: vec![],
            position: [0.0; 3],
        }],
        objects: vec![ObjectSpec {
            basic: true,
            initial_state: initial,
            ..ObjectSpec::plain("Obj_1", "Light Switch", [0.0, 0.0, 1.0])
        }],
    }
}

#[test]
fn toggling_is_an_involution() {
    for initial in [false, true] {
        for times in 1..=4usize {
            let scene = switch_scene(initial);
            let plan = scene_director::director::ActionPlan {
                entries: vec![scene_director::director::AgentQueue {
                    agent_id: "A_1".into(),
                    queue: vec![
                        Destination::new("Obj_1", true, 3.0, 1.0, false, false, true);
                        times
                    ],
                }],
            };
            let trace = simulate(&scene, &plan, ConflictPolicy::Fail).unwrap();
            assert_eq!(
                trace.object_state(&"Obj_1".into()),
                Some(initial ^ (times % 2 == 1))
            );
        }
    }
}

#[test]
fn carry_overlaps_compatible_hold() {
    let scene = Scene {
        agents: vec![AgentSpec {
            name: "Guy".into(),
            id: "A_1".into(),
            tags: vec![],
            position: [0.0; 3],
        }],
        objects: vec![
            ObjectSpec {
                grabbable: true,
                ..ObjectSpec::plain("Obj_1", "Book", [1.0, 0.0, 0.0])
            },
            ObjectSpec {
                stationary: true,
                stationary_compatible: true,
                ..ObjectSpec::plain("Obj_2", "Couch", [3.0, 0.0, 0.0])
            },
        ],
    };
    let plan = parse_plan("A_1 {Obj_1 (T, 2, 1, T, F, F), Obj_2 (T, 6, 2, F, T, F)}").unwrap();
    let trace = simulate(&scene, &plan, ConflictPolicy::Fail).unwrap();
    let at = |kind: EventKind, obj: &str| {
        trace
            .events
            .iter()
            .find(|e| e.kind == kind && e.object_id.as_ref().map(|o| o.as_str()) == Some(obj))
            .unwrap()
            .time
    };
    let carry = (
        at(EventKind::Attach, "Obj_1"),
        at(EventKind::DropDestroy, "Obj_1"),
    );
    let hold = (
        at(EventKind::InteractStart, "Obj_2"),
        at(EventKind::InteractEnd, "Obj_2"),
    );
    assert_eq!(carry, (1.0, 10.0));
    assert_eq!(hold, (4.0, 10.0));
    assert!(carry.0 < hold.1 && hold.0 < carry.1);
    assert!(!trace.events.iter().any(|e| e.detail.starts_with("warning")));
}
