//! Deterministic stand-in for a language model.
//!
//! Each agent, in scene order, gets one to three destinations. Interaction
//! type follows the object's capability; plain objects are walk-to visits.
//! A candidate is accepted only if its estimated interval (computed exactly as
//! [`schedule`](crate::sim::schedule) does) stays clear of every interval other
//! agents already hold on that object. When nothing fits, the agent walks to a
//! free object without interacting.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::director::{
    emit_plan, ActionPlan, AgentQueue, Destination, DestinationKind, BASIC_DURATION_TARGET,
    DURATION_RANGE, SPEED_RANGE,
};
use crate::scene::{Affordance, AgentId, ObjectId, ObjectSpec, Scene};
use crate::sim::{floor_point, PathProvider, StraightLine};

const CANDIDATE_TRIES: usize = 8;

/// Uniform draw from `range` on a half-second grid.
fn half_steps(rng: &mut ChaCha8Rng, range: (f64, f64)) -> f64 {
    let steps = ((range.1 - range.0) * 2.0).round() as u32;
    range.0 + f64::from(rng.random_range(0..=steps)) * 0.5
}

fn destination_for(
    rng: &mut ChaCha8Rng,
    object: &ObjectSpec,
    kind: DestinationKind,
) -> Destination {
    let speed = half_steps(rng, SPEED_RANGE);
    let duration = if kind == DestinationKind::Basic {
        half_steps(rng, BASIC_DURATION_TARGET)
    } else {
        half_steps(rng, DURATION_RANGE)
    };
    Destination::new(
        object.id.as_str(),
        kind != DestinationKind::Visit,
        duration,
        speed,
        kind == DestinationKind::Grab,
        kind == DestinationKind::Stationary,
        kind == DestinationKind::Basic,
    )
}

struct Ledger<'a> {
    /// Exclusive-use intervals already promised, per object.
    held: HashMap<&'a ObjectId, Vec<(&'a AgentId, f64, f64)>>,
    grabbed: HashSet<&'a ObjectId>,
    referenced: HashSet<&'a ObjectId>,
}

impl<'a> Ledger<'a> {
    fn clear(&self, object: &ObjectId, agent: &AgentId, arrive: f64, end: f64) -> bool {
        self.held.get(object).is_none_or(|uses| {
            uses.iter()
                .all(|(other, a, e)| *other == agent || !(arrive < *e && *a < end))
        })
    }
}

pub fn mock_plan_struct(scene: &Scene, seed: u64) -> ActionPlan {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ledger = Ledger {
        held: HashMap::new(),
        grabbed: HashSet::new(),
        referenced: HashSet::new(),
    };
    let mut entries = Vec::with_capacity(scene.agents.len());

    for agent in &scene.agents {
        let stops = rng.random_range(1..=3usize);
        let mut position = floor_point(&agent.position);
        let mut t = 0.0;
        let mut carrying = false;
        let mut queue = Vec::with_capacity(stops);

        for _ in 0..stops {
            let mut chosen = None;
            for _ in 0..CANDIDATE_TRIES {
                let object = &scene.objects[rng.random_range(0..scene.objects.len())];
                if ledger.grabbed.contains(&object.id) {
                    continue;
                }
                let kind = match object.affordance() {
                    Affordance::Grab => {
                        let free_after = scene
                            .objects
                            .iter()
                            .filter(|o| o.id != object.id && !ledger.grabbed.contains(&o.id))
                            .count();
                        if ledger.referenced.contains(&object.id) || free_after == 0 {
                            continue;
                        }
                        DestinationKind::Grab
                    }
                    Affordance::Stationary if carrying && !object.stationary_compatible => continue,
                    Affordance::Stationary => DestinationKind::Stationary,
                    Affordance::Basic => DestinationKind::Basic,
                    Affordance::Plain => DestinationKind::Visit,
                };
                let dest = destination_for(&mut rng, object, kind);
                let target = floor_point(&object.position);
                let arrive = t + StraightLine.distance(position, target) / dest.speed;
                let end = arrive + dest.duration;
                if kind.is_exclusive() && !ledger.clear(&object.id, &agent.id, arrive, end) {
                    continue;
                }
                chosen = Some((object, dest, arrive, end));
                break;
            }

            let (object, dest, arrive, end) = match chosen {
                Some(c) => c,
                None => {
                    let free: Vec<&ObjectSpec> = scene
                        .objects
                        .iter()
                        .filter(|o| !ledger.grabbed.contains(&o.id))
                        .collect();
                    let object = free[rng.random_range(0..free.len())];
                    let dest = destination_for(&mut rng, object, DestinationKind::Visit);
                    let target = floor_point(&object.position);
                    let arrive = t + StraightLine.distance(position, target) / dest.speed;
                    let end = arrive + dest.duration;
                    (object, dest, arrive, end)
                }
            };

            let kind = dest.kind();
            if kind.is_exclusive() {
                ledger
                    .held
                    .entry(&object.id)
                    .or_default()
                    .push((&agent.id, arrive, end));
            }
            if kind == DestinationKind::Grab {
                ledger.grabbed.insert(&object.id);
            }
            ledger.referenced.insert(&object.id);
            // A carry ends when the destination after the grab finishes.
            carrying = kind == DestinationKind::Grab;
            position = floor_point(&object.position);
            t = end;
            queue.push(dest);
        }
        entries.push(AgentQueue {
            agent_id: agent.id.clone(),
            queue,
        });
    }
    ActionPlan { entries }
}

/// SceneDirector text for `scene`, a pure function of `(scene, seed)`.
///
/// # Panics
///
/// Panics if the scene has no agents or no objects.
pub fn mock_plan(scene: &Scene, seed: u64) -> String {
    assert!(
        !scene.is_empty(),
        "mock_plan needs at least one agent and one object"
    );
    emit_plan(&mock_plan_struct(scene, seed))
}
