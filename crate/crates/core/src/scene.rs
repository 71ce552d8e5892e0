//! Scene model: agents, interactable objects, and the scenario-count estimate.
//!
//! A [`Scene`] is plain data. It can be built in memory with any field values
//! (including malformed ids) so that [`validate_scene`] can report every rule
//! a scene breaks. [`load_scene`] is the strict entry point and refuses any
//! scene that does not validate.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Position in world units, `[x, y, z]`. Simulation only uses the `(x, z)` floor plane.
pub type Position = [f64; 3];

macro_rules! id_newtype {
    ($name:ident, $prefix:literal) => {
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub const PREFIX: &'static str = $prefix;

            pub fn new(raw: impl Into<String>) -> Self {
                Self(raw.into())
            }

            /// Id for the given index, e.g. `A_3`.
            pub fn numbered(n: u64) -> Self {
                Self(format!("{}{}", $prefix, n))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }

            /// The numeric suffix if the id is well formed (`<prefix><n>`, n >= 1,
            /// no leading zeros).
            pub fn number(&self) -> Option<u64> {
                let digits = self.0.strip_prefix($prefix)?;
                if digits.is_empty()
                    || digits.starts_with('0')
                    || !digits.bytes().all(|b| b.is_ascii_digit())
                {
                    return None;
                }
                digits.parse().ok()
            }

            pub fn is_well_formed(&self) -> bool {
                self.number().is_some()
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }
    };
}

id_newtype!(AgentId, "A_");
id_newtype!(ObjectId, "Obj_");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub name: String,
    pub id: AgentId,
    #[serde(default)]
    pub tags: Vec<String>,
    pub position: Position,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSpec {
    pub id: ObjectId,
    pub name: String,
    #[serde(default)]
    pub grabbable: bool,
    #[serde(default)]
    pub stationary: bool,
    #[serde(default)]
    pub stationary_compatible: bool,
    #[serde(default)]
    pub basic: bool,
    #[serde(default)]
    pub tags: Vec<String>,
    pub position: Position,
    /// Device state for toggleable objects such as lights. Off unless stated.
    #[serde(default)]
    pub initial_state: bool,
}

/// The single interaction an object supports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Affordance {
    Grab,
    Stationary,
    Basic,
    /// No type flag set: a plain walk-to target.
    Plain,
}

impl ObjectSpec {
    /// Plain walk-to object with no interaction flags.
    pub fn plain(id: impl Into<String>, name: impl Into<String>, position: Position) -> Self {
        Self {
            id: ObjectId::new(id),
            name: name.into(),
            grabbable: false,
            stationary: false,
            stationary_compatible: false,
            basic: false,
            tags: Vec::new(),
            position,
            initial_state: false,
        }
    }

    pub fn affordance(&self) -> Affordance {
        if self.grabbable {
            Affordance::Grab
        } else if self.stationary {
            Affordance::Stationary
        } else if self.basic {
            Affordance::Basic
        } else {
            Affordance::Plain
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub agents: Vec<AgentSpec>,
    pub objects: Vec<ObjectSpec>,
}

impl Scene {
    pub fn agent(&self, id: &AgentId) -> Option<&AgentSpec> {
        self.agents.iter().find(|a| &a.id == id)
    }

    pub fn object(&self, id: &ObjectId) -> Option<&ObjectSpec> {
        self.objects.iter().find(|o| &o.id == id)
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty() || self.objects.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene is always serializable")
    }
}

/// Rule broken by a scene.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SceneRule {
    AgentIdPattern,
    ObjectIdPattern,
    DuplicateId,
    OneInteractionType,
    StationaryCompatibleGrabbable,
    TextField,
    NonFinitePosition,
}

impl SceneRule {
    pub fn code(self) -> &'static str {
        match self {
            SceneRule::AgentIdPattern => "agent-id-pattern",
            SceneRule::ObjectIdPattern => "object-id-pattern",
            SceneRule::DuplicateId => "duplicate-id",
            SceneRule::OneInteractionType => "one-interaction-type",
            SceneRule::StationaryCompatibleGrabbable => "stationary-compatible-grabbable",
            SceneRule::TextField => "text-field",
            SceneRule::NonFinitePosition => "non-finite-position",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SceneViolation {
    /// Id of the offending agent or object (raw text, may itself be malformed).
    pub entity: String,
    pub rule: SceneRule,
    pub message: String,
}

impl fmt::Display for SceneViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}]: {}",
            self.entity,
            self.rule.code(),
            self.message
        )
    }
}

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("cannot read scene file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("scene syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid scene: {0}")]
    Invalid(SceneViolation),
}

impl SceneError {
    pub fn violation(&self) -> Option<&SceneViolation> {
        match self {
            SceneError::Invalid(v) => Some(v),
            _ => None,
        }
    }
}

pub fn load_scene(path: impl AsRef<Path>) -> Result<Scene, SceneError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| SceneError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scene(&text)
}

/// Parses scene JSON text without checking the scene rules.
pub fn read_scene(text: &str) -> Result<Scene, SceneError> {
    serde_json::from_str(text).map_err(|e| SceneError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Parses and validates scene JSON text.
pub fn parse_scene(text: &str) -> Result<Scene, SceneError> {
    let scene = read_scene(text)?;
    match validate_scene(&scene).into_iter().next() {
        Some(v) => Err(SceneError::Invalid(v)),
        None => Ok(scene),
    }
}

fn check_text(entity: &str, field: &str, value: &str, out: &mut Vec<SceneViolation>) {
    if value.is_empty() || value.trim() != value || value.contains(['\n', '\r']) {
        out.push(SceneViolation {
            entity: entity.to_owned(),
            rule: SceneRule::TextField,
            message: format!("{field} {value:?} must be non-empty, trimmed, single-line text"),
        });
    }
}

fn check_tags(entity: &str, tags: &[String], out: &mut Vec<SceneViolation>) {
    for tag in tags {
        check_text(entity, "tag", tag, out);
        // Tags are rendered comma-separated in the scene description.
        if tag.contains(',') {
            out.push(SceneViolation {
                entity: entity.to_owned(),
                rule: SceneRule::TextField,
                message: format!("tag {tag:?} must not contain a comma"),
            });
        }
    }
}

fn check_position(entity: &str, p: &Position, out: &mut Vec<SceneViolation>) {
    if p.iter().any(|c| !c.is_finite()) {
        out.push(SceneViolation {
            entity: entity.to_owned(),
            rule: SceneRule::NonFinitePosition,
            message: format!("position {p:?} has a non-finite component"),
        });
    }
}

/// Every invariant the scene breaks, in scene order. Empty means valid.
pub fn validate_scene(scene: &Scene) -> Vec<SceneViolation> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();

    for agent in &scene.agents {
        let id = agent.id.as_str();
        if !agent.id.is_well_formed() {
            out.push(SceneViolation {
                entity: id.to_owned(),
                rule: SceneRule::AgentIdPattern,
                message: format!("agent id {id:?} does not match A_<n> with n >= 1"),
            });
        }
        if !seen.insert(id) {
            out.push(SceneViolation {
                entity: id.to_owned(),
                rule: SceneRule::DuplicateId,
                message: format!("id {id} is used more than once"),
            });
        }
        check_text(id, "name", &agent.name, &mut out);
        check_tags(id, &agent.tags, &mut out);
        check_position(id, &agent.position, &mut out);
    }

    for object in &scene.objects {
        let id = object.id.as_str();
        if !object.id.is_well_formed() {
            out.push(SceneViolation {
                entity: id.to_owned(),
                rule: SceneRule::ObjectIdPattern,
                message: format!("object id {id:?} does not match Obj_<n> with n >= 1"),
            });
        }
        if !seen.insert(id) {
            out.push(SceneViolation {
                entity: id.to_owned(),
                rule: SceneRule::DuplicateId,
                message: format!("id {id} is used more than once"),
            });
        }
        let kinds = [object.grabbable, object.stationary, object.basic]
            .iter()
            .filter(|&&b| b)
            .count();
        if kinds > 1 {
            out.push(SceneViolation {
                entity: id.to_owned(),
                rule: SceneRule::OneInteractionType,
                message:
                    "an object supports only one interaction type (grabbable, stationary, basic)"
                        .to_owned(),
            });
        }
        if object.stationary_compatible && object.grabbable {
            out.push(SceneViolation {
                entity: id.to_owned(),
                rule: SceneRule::StationaryCompatibleGrabbable,
                message: "a grabbable object cannot be stationary-compatible".to_owned(),
            });
        }
        check_text(id, "name", &object.name, &mut out);
        check_tags(id, &object.tags, &mut out);
        check_position(id, &object.position, &mut out);
    }
    out
}

/// Parameters of the scenario-count estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioParams {
    /// Interactable objects.
    pub m: u64,
    /// Spatial or contextual variants per object.
    pub v: u64,
    /// Duration or timing variations.
    pub d: u64,
    /// Agents.
    pub n: u32,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("scenario parameter {0} must be at least 1")]
pub struct InvalidParams(pub &'static str);

impl ScenarioParams {
    pub fn new(m: u64, v: u64, d: u64, n: u32) -> Result<Self, InvalidParams> {
        let p = Self { m, v, d, n };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<(), InvalidParams> {
        for (name, value) in [
            ("m", self.m),
            ("v", self.v),
            ("d", self.d),
            ("n", self.n as u64),
        ] {
            if value == 0 {
                return Err(InvalidParams(name));
            }
        }
        Ok(())
    }
}

/// Number of distinct interaction scenarios, `(m * v * d) ^ n`, computed exactly.
pub fn estimate_scenarios(params: ScenarioParams) -> BigUint {
    let base = BigUint::from(params.m) * params.v * params.d;
    base.pow(params.n)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn office_scene() -> Scene {
        Scene {
            agents: vec![AgentSpec {
                name: "Guy".into(),
                id: "A_1".into(),
                tags: vec![
                    "male".into(),
                    "college student".into(),
                    "casual".into(),
                    "claustrophobic".into(),
                ],
                position: [-0.36, 0.11, -6.12],
            }],
            objects: vec![
                ObjectSpec {
                    stationary: true,
                    tags: vec!["chair".into(), "sit".into(), "stay".into(), "relax".into()],
                    ..ObjectSpec::plain("Obj_5", "Chair", [-1.18, 0.23, -5.55])
                },
                ObjectSpec {
                    stationary: true,
                    tags: vec![
                        "work".into(),
                        "play games".into(),
                        "desktop".into(),
                        "office work".into(),
                    ],
                    ..ObjectSpec::plain("Obj_1", "Computer", [0.70, 0.26, -5.46])
                },
            ],
        }
    }

    #[test]
    fn office_scene_is_valid() {
        assert!(validate_scene(&office_scene()).is_empty());
    }

    #[test]
    fn json_file_loads() {
        let dir = tempfile_dir();
        let path = dir.join("scene.json");
        std::fs::write(&path, office_scene().to_json()).unwrap();
        let scene = load_scene(&path).unwrap();
        assert_eq!(scene.agents.len(), 1);
        assert_eq!(scene.objects.len(), 2);
        assert_eq!(scene, office_scene());
    }

    fn tempfile_dir() -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!("scene-model-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn empty_text_is_syntax_error() {
        match parse_scene("") {
            Err(SceneError::Syntax { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse_scene("{\n  \"agents\": [,]\n}").unwrap_err();
        match err {
            SceneError::Syntax { line, column, .. } => {
                assert_eq!(line, 2);
                assert!(column > 0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicate_object_id_is_named() {
        let mut scene = office_scene();
        scene.objects[0].id = "Obj_1".into();
        let err = parse_scene(&scene.to_json()).unwrap_err();
        let v = err.violation().unwrap();
        assert_eq!(v.rule, SceneRule::DuplicateId);
        assert_eq!(v.entity, "Obj_1");
    }

    #[test]
    fn two_interaction_flags_rejected() {
        let mut scene = office_scene();
        scene.objects[0] = ObjectSpec {
            grabbable: true,
            basic: true,
            ..ObjectSpec::plain("Obj_5", "Box", [0.0; 3])
        };
        let v = validate_scene(&scene);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, SceneRule::OneInteractionType);
    }

    #[test]
    fn bad_agent_id_pattern() {
        let mut scene = office_scene();
        scene.agents[0].id = "Agent7".into();
        let v = validate_scene(&scene);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, SceneRule::AgentIdPattern);
        assert_eq!(v[0].entity, "Agent7");
    }

    #[test]
    fn id_pattern_edges() {
        assert!(AgentId::from("A_1").is_well_formed());
        assert!(AgentId::from("A_42").is_well_formed());
        assert!(!AgentId::from("A_0").is_well_formed());
        assert!(!AgentId::from("A_01").is_well_formed());
        assert!(!AgentId::from("A_").is_well_formed());
        assert!(!AgentId::from("Obj_1").is_well_formed());
        assert!(ObjectId::from("Obj_10").is_well_formed());
        assert!(!ObjectId::from("Obj_x").is_well_formed());
    }

    #[test]
    fn agent_and_object_share_no_namespace() {
        let mut scene = office_scene();
        scene.objects[0].id = "A_1".into();
        let rules: Vec<_> = validate_scene(&scene).into_iter().map(|v| v.rule).collect();
        assert!(rules.contains(&SceneRule::ObjectIdPattern));
        assert!(rules.contains(&SceneRule::DuplicateId));
    }

    #[test]
    fn grabbable_cannot_be_stationary_compatible() {
        let mut scene = office_scene();
        scene.objects[0] = ObjectSpec {
            grabbable: true,
            stationary_compatible: true,
            ..ObjectSpec::plain("Obj_5", "Book", [0.0; 3])
        };
        let v = validate_scene(&scene);
        assert_eq!(v[0].rule, SceneRule::StationaryCompatibleGrabbable);
    }

    #[test]
    fn unknown_field_is_syntax_error() {
        let text = r#"{"agents": [], "objects": [], "lights": true}"#;
        assert!(matches!(parse_scene(text), Err(SceneError::Syntax { .. })));
    }

    #[test]
    fn initial_state_defaults_off() {
        let text = r#"{"agents": [], "objects": [{"id": "Obj_1", "name": "Light Switch", "basic": true, "position": [0, 0, 0]}]}"#;
        let scene = parse_scene(text).unwrap();
        assert!(!scene.objects[0].initial_state);
        assert_eq!(scene.objects[0].affordance(), Affordance::Basic);
    }

    #[test]
    fn estimate_examples() {
        let est = |m, v, d, n| estimate_scenarios(ScenarioParams::new(m, v, d, n).unwrap());
        assert_eq!(est(5, 1, 1, 1), BigUint::from(5u32));
        assert_eq!(est(5, 2, 3, 2), BigUint::from(900u32));
        assert_eq!(est(10, 4, 8, 5).to_string(), "3355443200000");
    }

    #[test]
    fn zero_param_rejected() {
        assert_eq!(ScenarioParams::new(0, 1, 1, 1), Err(InvalidParams("m")));
        assert_eq!(ScenarioParams::new(1, 1, 1, 0), Err(InvalidParams("n")));
    }
}
