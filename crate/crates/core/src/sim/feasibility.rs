//! Static timeline estimate and predicted conflicts.
//!
//! Each agent's legs are laid end to end with no waiting:
//! `arrive = depart + distance / speed`, `end = arrive + duration`. This is
//! the same arithmetic the simulator performs, so an empty prediction means a
//! run under [`ConflictPolicy::Fail`](super::ConflictPolicy::Fail) cannot hit
//! a conflict.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{floor_point, PathProvider, StraightLine};
use crate::director::{ActionPlan, DestinationKind};
use crate::scene::{AgentId, ObjectId, Scene};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduledLeg {
    pub agent_id: AgentId,
    pub index: usize,
    pub object_id: ObjectId,
    pub kind: DestinationKind,
    pub depart: f64,
    pub arrive: f64,
    pub end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PredictedConflict {
    /// Two agents' estimated exclusive-use intervals on one object overlap.
    Overlap {
        object_id: ObjectId,
        agents: (AgentId, AgentId),
        interval: (f64, f64),
    },
    /// A grabbed (and therefore destroyed) object is referenced again.
    DestroyedReuse {
        object_id: ObjectId,
        agent_id: AgentId,
        index: usize,
    },
}

/// Estimated legs per plan entry. Unknown agents get no legs; destinations
/// naming unknown objects are skipped.
pub fn schedule<P: PathProvider>(
    scene: &Scene,
    plan: &ActionPlan,
    paths: &P,
) -> Vec<Vec<ScheduledLeg>> {
    plan.entries
        .iter()
        .map(|entry| {
            let Some(agent) = scene.agent(&entry.agent_id) else {
                return Vec::new();
            };
            let mut position = floor_point(&agent.position);
            let mut t = 0.0;
            let mut legs = Vec::with_capacity(entry.queue.len());
            for (index, dest) in entry.queue.iter().enumerate() {
                let Some(object) = scene.object(&dest.object_id) else {
                    continue;
                };
                let target = floor_point(&object.position);
                let arrive = t + paths.distance(position, target) / dest.speed;
                let end = arrive + dest.duration;
                legs.push(ScheduledLeg {
                    agent_id: entry.agent_id.clone(),
                    index,
                    object_id: dest.object_id.clone(),
                    kind: dest.kind(),
                    depart: t,
                    arrive,
                    end,
                });
                position = target;
                t = end;
            }
            legs
        })
        .collect()
}

pub fn check_feasibility(scene: &Scene, plan: &ActionPlan) -> Vec<PredictedConflict> {
    let legs = schedule(scene, plan, &StraightLine);
    let mut out = Vec::new();

    let mut by_object: HashMap<&ObjectId, Vec<&ScheduledLeg>> = HashMap::new();
    let mut objects_in_order: Vec<&ObjectId> = Vec::new();
    for leg in legs.iter().flatten().filter(|l| l.kind.is_exclusive()) {
        let slot = by_object.entry(&leg.object_id).or_default();
        if slot.is_empty() {
            objects_in_order.push(&leg.object_id);
        }
        slot.push(leg);
    }
    for object in objects_in_order {
        let uses = &by_object[object];
        for (i, a) in uses.iter().enumerate() {
            for b in &uses[i + 1..] {
                if a.agent_id != b.agent_id && a.arrive < b.end && b.arrive < a.end {
                    out.push(PredictedConflict::Overlap {
                        object_id: object.clone(),
                        agents: (a.agent_id.clone(), b.agent_id.clone()),
                        interval: (a.arrive.max(b.arrive), a.end.min(b.end)),
                    });
                }
            }
        }
    }

    let grabbed: HashSet<&ObjectId> = plan
        .entries
        .iter()
        .flat_map(|e| &e.queue)
        .filter(|d| d.grab)
        .map(|d| &d.object_id)
        .collect();
    let mut claimed = HashSet::new();
    for entry in &plan.entries {
        for (index, dest) in entry.queue.iter().enumerate() {
            if !grabbed.contains(&dest.object_id) {
                continue;
            }
            if dest.grab && claimed.insert(&dest.object_id) {
                continue;
            }
            out.push(PredictedConflict::DestroyedReuse {
                object_id: dest.object_id.clone(),
                agent_id: entry.agent_id.clone(),
                index,
            });
        }
    }
    out
}
