use crate::describe::SceneDescription;

/// Version tag of the bundled system prompt.
pub const SYSTEM_PROMPT_VERSION: &str = "v1";

/// Instructions sent as the system message on every request.
pub const SYSTEM_PROMPT: &str = include_str!("../../resources/system_prompt_v1.txt");

/// Returns `(system_text, user_text)`. The system text never depends on the scene.
pub fn build_prompt(description: &SceneDescription) -> (String, String) {
    (SYSTEM_PROMPT.to_owned(), description.as_str().to_owned())
}
