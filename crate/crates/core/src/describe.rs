//! Plain-language scene description sent to the language model.
//!
//! Layout (LF line endings, one trailing newline):
//!
//! ```text
//! Scene Description:
//! ----------
//! Actors:
//! ----------
//! Name: Guy
//! ID: A_1
//! Tags: male, college student
//! Position: (-.36, .11, -6.12)
//! ----------
//! ----------
//! Interactable Objects:
//! ----------
//! Object ID: Obj_5
//! Name: Chair
//! Is Grabbable: No
//! Is Stationary: Yes
//! Is Stationary Compatible: No
//! Is Basic Interaction: No
//! Tags: chair, sit
//! Position: (-1.18, .23, -5.55)
//! ----------
//! ----------
//! END
//! ----------
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::scene::{validate_scene, Position, Scene, SceneViolation};

pub const RULE: &str = "----------";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SceneDescription {
    pub text: String,
}

impl SceneDescription {
    pub fn as_str(&self) -> &str {
        &self.text
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DescribeError {
    #[error("position component {0} is not finite")]
    NonFinite(f64),
    #[error("scene is invalid: {0}")]
    InvalidScene(SceneViolation),
}

fn format_component(c: f64) -> Result<String, DescribeError> {
    if !c.is_finite() {
        return Err(DescribeError::NonFinite(c));
    }
    let s = format!("{c:.2}");
    // Anything that rounds to zero (including -0.00) prints as a bare zero.
    if s.trim_start_matches('-') == "0.00" {
        return Ok("0".to_owned());
    }
    Ok(if let Some(rest) = s.strip_prefix("-0.") {
        format!("-.{rest}")
    } else if let Some(rest) = s.strip_prefix("0.") {
        format!(".{rest}")
    } else {
        s
    })
}

/// `(x, y, z)` with two decimals and the integer zero dropped: `(-.36, .11, -6.12)`.
pub fn format_position(p: &Position) -> Result<String, DescribeError> {
    Ok(format!(
        "({}, {}, {})",
        format_component(p[0])?,
        format_component(p[1])?,
        format_component(p[2])?
    ))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "Yes"
    } else {
        "No"
    }
}

fn tags_line(tags: &[String]) -> String {
    if tags.is_empty() {
        "Tags:".to_owned()
    } else {
        format!("Tags: {}", tags.join(", "))
    }
}

pub fn serialize_scene(scene: &Scene) -> Result<SceneDescription, DescribeError> {
    if let Some(v) = validate_scene(scene).into_iter().next() {
        return Err(DescribeError::InvalidScene(v));
    }

    let mut lines: Vec<String> = vec![
        "Scene Description:".into(),
        RULE.into(),
        "Actors:".into(),
        RULE.into(),
    ];
    for agent in &scene.agents {
        lines.push(format!("Name: {}", agent.name));
        lines.push(format!("ID: {}", agent.id));
        lines.push(tags_line(&agent.tags));
        lines.push(format!("Position: {}", format_position(&agent.position)?));
        lines.push(RULE.into());
    }
    lines.push(RULE.into());
    lines.push("Interactable Objects:".into());
    lines.push(RULE.into());
    for object in &scene.objects {
        lines.push(format!("Object ID: {}", object.id));
        lines.push(format!("Name: {}", object.name));
        lines.push(format!("Is Grabbable: {}", yes_no(object.grabbable)));
        lines.push(format!("Is Stationary: {}", yes_no(object.stationary)));
        lines.push(format!(
            "Is Stationary Compatible: {}",
            yes_no(object.stationary_compatible)
        ));
        lines.push(format!("Is Basic Interaction: {}", yes_no(object.basic)));
        lines.push(tags_line(&object.tags));
        lines.push(format!("Position: {}", format_position(&object.position)?));
        lines.push(RULE.into());
    }
    lines.push(RULE.into());
    lines.push("END".into());
    lines.push(RULE.into());

    let mut text = String::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
    for line in &lines {
        let _ = writeln!(text, "{line}");
    }
    Ok(SceneDescription { text })
}
