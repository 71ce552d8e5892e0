use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{parse_plan, strip_reply, ActionPlan, DestinationKind, ParseErrorKind, PlanError};
use crate::scene::{ObjectId, Scene};

pub const SPEED_RANGE: (f64, f64) = (1.0, 4.0);
pub const DURATION_RANGE: (f64, f64) = (2.0, 16.0);
/// Basic interactions keep the 5.00 s cap but share the general 2 s floor: the
/// prompt's own worked example flips a switch for 2 seconds.
pub const BASIC_DURATION_RANGE: (f64, f64) = (2.0, 5.0);
/// Window the prompt asks models to use for basic interactions.
pub const BASIC_DURATION_TARGET: (f64, f64) = (3.0, 5.0);

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strictness {
    Strict,
    /// Speed and duration range violations are warnings.
    #[default]
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

/// Stable machine-readable violation codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationCode {
    SyntaxError,
    DuplicateAgent,
    EmptyQueue,
    InvalidDestination,
    UnknownAgent,
    UnknownObject,
    SpeedRange,
    DurationRange,
    CapabilityMismatch,
    GrabReuse,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::SyntaxError => "syntax-error",
            ViolationCode::DuplicateAgent => "duplicate-agent",
            ViolationCode::EmptyQueue => "empty-queue",
            ViolationCode::InvalidDestination => "invalid-destination",
            ViolationCode::UnknownAgent => "unknown-agent",
            ViolationCode::UnknownObject => "unknown-object",
            ViolationCode::SpeedRange => "speed-range",
            ViolationCode::DurationRange => "duration-range",
            ViolationCode::CapabilityMismatch => "capability-mismatch",
            ViolationCode::GrabReuse => "grab-reuse",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub severity: Severity,
    pub code: ViolationCode,
    pub message: String,
    /// `byte <n>` for parse failures, `<agent>[<index>] <object>` for plan entries.
    pub location: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub parse_ok: bool,
    pub violations: Vec<Violation>,
    pub is_structurally_valid: bool,
    /// A Markdown code fence was removed from the reply before parsing.
    #[serde(default)]
    pub stripped_fence: bool,
}

impl ValidityReport {
    fn new(parse_ok: bool, violations: Vec<Violation>) -> Self {
        let is_structurally_valid =
            parse_ok && !violations.iter().any(|v| v.severity == Severity::Error);
        Self {
            parse_ok,
            violations,
            is_structurally_valid,
            stripped_fence: false,
        }
    }

    pub fn errors(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| v.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| v.severity == Severity::Warning)
    }

    pub fn has_code(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }
}

fn in_range(x: f64, (lo, hi): (f64, f64)) -> bool {
    (lo..=hi).contains(&x)
}

/// Checks a plan against the scene it is meant to run in. Never fails; all
/// findings are carried in the report.
pub fn validate_plan(plan: &ActionPlan, scene: &Scene, mode: Strictness) -> ValidityReport {
    let range_severity = match mode {
        Strictness::Strict => Severity::Error,
        Strictness::Lenient => Severity::Warning,
    };
    let mut out = Vec::new();
    let mut push = |severity, code, location: String, message: String| {
        out.push(Violation {
            severity,
            code,
            message,
            location,
        })
    };

    for err in plan.check() {
        let (code, location) = match &err {
            PlanError::DuplicateAgent(a) => (ViolationCode::DuplicateAgent, a.to_string()),
            PlanError::EmptyQueue(a) => (ViolationCode::EmptyQueue, a.to_string()),
            PlanError::Destination {
                agent,
                index,
                object,
                ..
            } => (
                ViolationCode::InvalidDestination,
                format!("{agent}[{index}] {object}"),
            ),
        };
        push(Severity::Error, code, location, err.to_string());
    }

    let grabbed: HashSet<&ObjectId> = plan
        .entries
        .iter()
        .flat_map(|e| &e.queue)
        .filter(|d| d.grab)
        .map(|d| &d.object_id)
        .collect();
    // The first grab of an object claims it; any other reference is reuse.
    let mut claimed: HashMap<&ObjectId, bool> = HashMap::new();
    let mut references: Vec<(String, &ObjectId, bool)> = Vec::new();

    for entry in &plan.entries {
        let agent = &entry.agent_id;
        if scene.agent(agent).is_none() {
            push(
                Severity::Error,
                ViolationCode::UnknownAgent,
                agent.to_string(),
                format!("agent {agent} is not in the scene"),
            );
        }
        for (index, dest) in entry.queue.iter().enumerate() {
            let loc = format!("{agent}[{index}] {}", dest.object_id);
            references.push((loc.clone(), &dest.object_id, dest.grab));

            if !in_range(dest.speed, SPEED_RANGE) {
                push(
                    range_severity,
                    ViolationCode::SpeedRange,
                    loc.clone(),
                    format!("speed {} is outside [1.0, 4.0]", dest.speed),
                );
            }
            let (range, label) = if dest.kind() == DestinationKind::Basic {
                (BASIC_DURATION_RANGE, "[2, 5.00] for basic interactions")
            } else {
                (DURATION_RANGE, "[2, 16]")
            };
            if !in_range(dest.duration, range) {
                push(
                    range_severity,
                    ViolationCode::DurationRange,
                    loc.clone(),
                    format!("duration {} is outside {label}", dest.duration),
                );
            }

            let Some(object) = scene.object(&dest.object_id) else {
                push(
                    Severity::Error,
                    ViolationCode::UnknownObject,
                    loc,
                    format!("object {} is not in the scene", dest.object_id),
                );
                continue;
            };
            for (wanted, capable, name) in [
                (dest.grab, object.grabbable, "grab"),
                (dest.stationary, object.stationary, "stationary"),
                (dest.basic, object.basic, "basic"),
            ] {
                if wanted && !capable {
                    push(
                        Severity::Error,
                        ViolationCode::CapabilityMismatch,
                        loc.clone(),
                        format!(
                            "{name} is set but {} ({}) does not support {name} interactions",
                            object.id, object.name
                        ),
                    );
                }
            }
        }
    }

    for (loc, object, is_grab) in references {
        if !grabbed.contains(object) {
            continue;
        }
        let first_grab = is_grab && !claimed.get(object).copied().unwrap_or(false);
        if first_grab {
            claimed.insert(object, true);
        } else {
            push(
                Severity::Error,
                ViolationCode::GrabReuse,
                loc,
                format!("{object} is grabbed in this plan and cannot be referenced again"),
            );
        }
    }

    ValidityReport::new(true, out)
}

/// Parses a model reply and validates it. Returns the plan when parsing succeeded.
///
/// Surrounding whitespace and a Markdown code fence are removed first; parse
/// error offsets refer to the stripped text.
pub fn check_reply(
    raw: &str,
    scene: &Scene,
    mode: Strictness,
) -> (Option<ActionPlan>, ValidityReport) {
    let (text, stripped_fence) = strip_reply(raw);
    if stripped_fence {
        log::info!("removed a Markdown code fence from the model reply");
    }
    let (plan, mut report) = check_stripped(text, scene, mode);
    report.stripped_fence = stripped_fence;
    (plan, report)
}

fn check_stripped(
    text: &str,
    scene: &Scene,
    mode: Strictness,
) -> (Option<ActionPlan>, ValidityReport) {
    match parse_plan(text) {
        Ok(plan) => {
            let report = validate_plan(&plan, scene, mode);
            (Some(plan), report)
        }
        Err(e) => {
            let code = match e.kind {
                ParseErrorKind::Syntax { .. } => ViolationCode::SyntaxError,
                ParseErrorKind::DuplicateAgent(_) => ViolationCode::DuplicateAgent,
                ParseErrorKind::InvalidDestination { .. } => ViolationCode::InvalidDestination,
            };
            let v = Violation {
                severity: Severity::Error,
                code,
                message: e.kind.to_string(),
                location: format!("byte {}", e.offset),
            };
            (None, ValidityReport::new(false, vec![v]))
        }
    }
}
