//! The SceneDirector action-plan language.
//!
//! ```text
//! plan        := agent_block {"," agent_block} ;
//! agent_block := agent_id "{" dest {"," dest} "}" ;
//! dest        := object_id "(" flag "," number "," number "," flag "," flag "," flag ")" ;
//! flag        := "T" | "F" ;
//! agent_id    := "A_" digits ;
//! object_id   := "Obj_" digits ;
//! number      := digits ["." digits] ;
//! ```
//!
//! Whitespace is allowed between any two tokens. The parser also accepts a
//! trailing comma before a closing `}`, a trailing comma after the final agent
//! block, and a final `.`; [`emit_plan`] never produces them.
//!
//! Destination fields are, in order: interact, duration (seconds), speed
//! (multiplier), grab, stationary, basic.

mod parse;
mod validate;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scene::{AgentId, ObjectId};

pub use parse::{parse_plan, parse_plan_bytes, Expected, ParseError, ParseErrorKind};
pub use validate::{
    check_reply, validate_plan, Severity, Strictness, ValidityReport, Violation, ViolationCode,
    BASIC_DURATION_RANGE, BASIC_DURATION_TARGET, DURATION_RANGE, SPEED_RANGE,
};

/// One queued instruction: go to an object and (maybe) interact with it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Destination {
    pub object_id: ObjectId,
    pub interact: bool,
    /// Seconds.
    pub duration: f64,
    /// Movement speed in world units per second.
    pub speed: f64,
    pub grab: bool,
    pub stationary: bool,
    pub basic: bool,
}

/// How a destination is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DestinationKind {
    /// `interact = F`: walk there, wait, move on. Type flags are ignored.
    Visit,
    Normal,
    Grab,
    Stationary,
    Basic,
}

impl DestinationKind {
    /// Holds the target object exclusively while interacting.
    pub fn is_exclusive(self) -> bool {
        matches!(
            self,
            DestinationKind::Normal | DestinationKind::Stationary | DestinationKind::Basic
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DestinationError {
    #[error("more than one of grab, stationary, basic is set")]
    MultipleTypes,
    #[error("interact must be T when {0} is T")]
    InteractRequired(&'static str),
    #[error("duration must be a finite number > 0")]
    BadDuration,
    #[error("speed must be a finite number > 0")]
    BadSpeed,
}

impl Destination {
    pub fn new(
        object_id: impl Into<String>,
        interact: bool,
        duration: f64,
        speed: f64,
        grab: bool,
        stationary: bool,
        basic: bool,
    ) -> Self {
        Self {
            object_id: ObjectId::new(object_id),
            interact,
            duration,
            speed,
            grab,
            stationary,
            basic,
        }
    }

    pub fn kind(&self) -> DestinationKind {
        match (self.interact, self.grab, self.stationary, self.basic) {
            (false, ..) => DestinationKind::Visit,
            (true, true, _, _) => DestinationKind::Grab,
            (true, _, true, _) => DestinationKind::Stationary,
            (true, _, _, true) => DestinationKind::Basic,
            _ => DestinationKind::Normal,
        }
    }

    pub fn check(&self) -> Result<(), DestinationError> {
        let types = [self.grab, self.stationary, self.basic]
            .iter()
            .filter(|&&b| b)
            .count();
        if types > 1 {
            return Err(DestinationError::MultipleTypes);
        }
        if !self.interact {
            if self.grab {
                return Err(DestinationError::InteractRequired("grab"));
            }
            if self.stationary {
                return Err(DestinationError::InteractRequired("stationary"));
            }
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(DestinationError::BadDuration);
        }
        if !(self.speed.is_finite() && self.speed > 0.0) {
            return Err(DestinationError::BadSpeed);
        }
        Ok(())
    }
}

/// An agent and its ordered destination queue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentQueue {
    pub agent_id: AgentId,
    pub queue: Vec<Destination>,
}

/// A parsed SceneDirector string: per-agent destination queues in textual order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ActionPlan {
    pub entries: Vec<AgentQueue>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("agent {0} appears more than once")]
    DuplicateAgent(AgentId),
    #[error("agent {0} has an empty destination queue")]
    EmptyQueue(AgentId),
    #[error("agent {agent}, destination {index} ({object}): {reason}")]
    Destination {
        agent: AgentId,
        index: usize,
        object: ObjectId,
        reason: DestinationError,
    },
}

impl ActionPlan {
    pub fn queue(&self, agent: &AgentId) -> Option<&[Destination]> {
        self.entries
            .iter()
            .find(|e| &e.agent_id == agent)
            .map(|e| e.queue.as_slice())
    }

    pub fn destination_count(&self) -> usize {
        self.entries.iter().map(|e| e.queue.len()).sum()
    }

    /// Every type invariant violation, in plan order.
    pub fn check(&self) -> Vec<PlanError> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for entry in &self.entries {
            if !seen.insert(&entry.agent_id) {
                out.push(PlanError::DuplicateAgent(entry.agent_id.clone()));
            }
            if entry.queue.is_empty() {
                out.push(PlanError::EmptyQueue(entry.agent_id.clone()));
            }
            for (index, dest) in entry.queue.iter().enumerate() {
                if let Err(reason) = dest.check() {
                    out.push(PlanError::Destination {
                        agent: entry.agent_id.clone(),
                        index,
                        object: dest.object_id.clone(),
                        reason,
                    });
                }
            }
        }
        out
    }
}

fn flag(b: bool) -> char {
    if b {
        'T'
    } else {
        'F'
    }
}

impl fmt::Display for Destination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // f64 Display is the shortest text that parses back to the same value.
        write!(
            f,
            "{} ({}, {}, {}, {}, {}, {})",
            self.object_id,
            flag(self.interact),
            self.duration,
            self.speed,
            flag(self.grab),
            flag(self.stationary),
            flag(self.basic)
        )
    }
}

impl fmt::Display for ActionPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, entry) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{} {{", entry.agent_id)?;
            for (j, dest) in entry.queue.iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{dest}")?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

/// Canonical SceneDirector text for a plan.
pub fn emit_plan(plan: &ActionPlan) -> String {
    plan.to_string()
}

/// Strips surrounding whitespace and a Markdown code fence from a model reply.
/// Returns the cleaned text and whether a fence was removed.
pub fn strip_reply(raw: &str) -> (&str, bool) {
    let trimmed = raw.trim();
    if let Some(rest) = trimmed.strip_prefix("```") {
        if let Some(body) = rest.strip_suffix("```") {
            // Drop an info string such as ```text on the opening line.
            let body = match body.find('\n') {
                Some(nl) if !body[..nl].trim().contains(['{', '(']) => &body[nl + 1..],
                _ => body,
            };
            return (body.trim(), true);
        }
    }
    (trimmed, false)
}
