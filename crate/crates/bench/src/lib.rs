//! Fixed inputs shared by the benchmarks.

use scene_director::director::{emit_plan, ActionPlan};
use scene_director::synth::{random_plan, random_scene};
use scene_director::Scene;

/// A scene with `agents` agents and `objects` objects, plus a plan of up to
/// `queue` destinations per agent. Deterministic for a given size.
pub fn workload(agents: usize, objects: usize, queue: usize) -> (Scene, ActionPlan) {
    let seed = (agents as u64) << 32 | objects as u64;
    let scene = random_scene(seed, agents, objects, 10.0);
    let plan = random_plan(&scene, seed ^ queue as u64, queue);
    (scene, plan)
}

/// Canonical text of the plan in [`workload`].
pub fn plan_text(agents: usize, objects: usize, queue: usize) -> String {
    emit_plan(&workload(agents, objects, queue).1)
}

/// Sizes used across groups: (agents, objects, destinations per agent).
pub const SIZES: [(usize, usize, usize); 4] = [(1, 1, 2), (5, 10, 3), (20, 40, 8), (100, 200, 16)];
