//! Discrete-event execution of action plans.
//!
//! Agents are points on the `(x, z)` floor plane and travel in straight lines
//! at `speed` units per second. Time advances from event to event, so every
//! timestamp is exact arithmetic over distances, speeds, and durations.
//!
//! Per destination kind:
//!
//! * visit (`interact = F`): walk, wait `duration`, move on.
//! * normal: walk, hold the object for `duration`.
//! * grab: walk, attach the object to the upper channel, interact for
//!   `duration`; the object is carried to the next destination and destroyed
//!   when that destination finishes (or at queue end).
//! * stationary: walk, sustain a hold on the lower channel for `duration`.
//!   A carried object stays attached only if the target is stationary-compatible.
//! * basic: walk, short contact that toggles the object's on/off state.
//!
//! Normal, stationary, and basic interactions hold their object exclusively.

mod engine;
mod feasibility;
mod timeline;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scene::{AgentId, ObjectId};

pub use engine::{simulate, simulate_with};
pub use feasibility::{check_feasibility, schedule, PredictedConflict, ScheduledLeg};
pub use timeline::{lanes, render_timeline, Lane, Span, SpanKind, TimelineFormat, UnknownFormat};

/// Planar point `(x, z)`.
pub type Point = [f64; 2];

pub fn floor_point(p: &crate::scene::Position) -> Point {
    [p[0], p[2]]
}

/// Supplies travel distances between points. Straight lines by default; a
/// navigation mesh could be plugged in here.
pub trait PathProvider {
    fn distance(&self, from: Point, to: Point) -> f64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StraightLine;

impl PathProvider for StraightLine {
    fn distance(&self, from: Point, to: Point) -> f64 {
        (to[0] - from[0]).hypot(to[1] - from[1])
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConflictPolicy {
    /// Queue behind the current holder.
    #[default]
    Wait,
    /// Abort the run on the first occupancy conflict.
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentMode {
    Idle,
    Moving,
    /// Waiting at a destination: a visit dwell or queued behind another agent.
    Waiting,
    Interacting,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub agent_id: AgentId,
    pub position: Point,
    pub mode: AgentMode,
    pub carried_object: Option<ObjectId>,
    /// Sustained stationary hold (lower body).
    pub lower_channel: Option<ObjectId>,
    /// Carry action (upper body).
    pub upper_channel: Option<ObjectId>,
    pub queue_cursor: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    MoveStart,
    Arrive,
    InteractStart,
    InteractEnd,
    Attach,
    DropDestroy,
    Toggle,
    Conflict,
    Idle,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        f.write_str(s.as_str().unwrap_or("?"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimEvent {
    pub time: f64,
    pub agent_id: Option<AgentId>,
    pub kind: EventKind,
    pub object_id: Option<ObjectId>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConflictRecord {
    pub object_id: ObjectId,
    /// Holder first, then the agent that wanted the object.
    pub agents: Vec<AgentId>,
    /// Overlap (policy fail) or waited interval (policy wait), seconds.
    pub interval: (f64, f64),
}

impl fmt::Display for ConflictRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let agents: Vec<&str> = self.agents.iter().map(|a| a.as_str()).collect();
        write!(
            f,
            "{} contested by {} over [{:.3}, {:.3}]",
            self.object_id,
            agents.join(" and "),
            self.interval.0,
            self.interval.1
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectState {
    pub object_id: ObjectId,
    pub on: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub events: Vec<SimEvent>,
    pub final_states: Vec<AgentState>,
    /// Final on/off state of every basic (toggleable) object, in scene order.
    pub object_states: Vec<ObjectState>,
    /// Destroyed objects in destruction order.
    pub destroyed_objects: Vec<ObjectId>,
    pub conflicts: Vec<ConflictRecord>,
}

impl SimTrace {
    pub fn object_state(&self, id: &ObjectId) -> Option<bool> {
        self.object_states
            .iter()
            .find(|s| &s.object_id == id)
            .map(|s| s.on)
    }

    pub fn events_for<'a>(&'a self, agent: &'a AgentId) -> impl Iterator<Item = &'a SimEvent> {
        self.events
            .iter()
            .filter(move |e| e.agent_id.as_ref() == Some(agent))
    }

    pub fn end_time(&self) -> f64 {
        self.events.last().map_or(0.0, |e| e.time)
    }

    /// One JSON object per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for event in &self.events {
            out.push_str(&serde_json::to_string(event).expect("event is serializable"));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("plan cannot run in this scene: {0}")]
    Precondition(String),
    #[error("{agent} references destroyed object {object} at t={time:.3}")]
    DestroyedObject {
        agent: AgentId,
        object: ObjectId,
        time: f64,
    },
    #[error("{agent} references {object} at t={time:.3} while {holder} carries it")]
    CarriedObject {
        agent: AgentId,
        object: ObjectId,
        holder: AgentId,
        time: f64,
    },
    #[error("occupancy conflict: {0}")]
    Conflict(ConflictRecord),
}
