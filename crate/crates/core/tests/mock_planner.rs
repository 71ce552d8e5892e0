use proptest::prelude::*;
use scene_director::benchmark::{build_scenario, ScenarioClass};
use scene_director::director::{parse_plan, validate_plan, Strictness};
use scene_director::gateway::mock_plan;
use scene_director::sim::{check_feasibility, simulate, ConflictPolicy};
use scene_director::synth::random_scene;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn mock_output_is_strict_valid_and_feasible(seed in any::<u64>(), layout in any::<u64>(), agents in 1usize..7, objects in 1usize..12) {
        let scene = random_scene(layout, agents, objects, 6.0);
        let text = mock_plan(&scene, seed);
        let plan = parse_plan(&text).unwrap();
        let report = validate_plan(&plan, &scene, Strictness::Strict);
        prop_assert!(report.violations.is_empty(), "{:?}", report.violations);
        prop_assert!(check_feasibility(&scene, &plan).is_empty());
        prop_assert!(simulate(&scene, &plan, ConflictPolicy::Fail).is_ok());
        prop_assert_eq!(text, mock_plan(&scene, seed));
        for entry in &plan.entries {
            prop_assert!((1..=3).contains(&entry.queue.len()));
        }
    }
}

#[test]
fn every_scenario_class_works_with_the_mock() {
    for class in ScenarioClass::all(0) {
        let scene = build_scenario(class);
        let plan = parse_plan(&mock_plan(&scene, 0)).unwrap();
        assert_eq!(plan.entries.len(), class.agent_count());
        assert!(validate_plan(&plan, &scene, Strictness::Strict).is_structurally_valid);
    }
}
