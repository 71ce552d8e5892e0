//! Headless pipeline for LLM-directed agent scenes.
//!
//! A [`Scene`] of tagged agents and objects is rendered to a plain-language
//! description, sent to a language model (or the deterministic mock planner),
//! and the returned SceneDirector string is parsed into an [`ActionPlan`],
//! validated, and executed by a discrete-event simulator.

pub mod benchmark;
pub mod describe;
pub mod director;
pub mod gateway;
pub mod scene;
pub mod sim;
pub mod synth;

pub use benchmark::{
    build_scenario, run_benchmark, summarize, BenchmarkRecord, BenchmarkStats, ScenarioClass,
    ScenarioLabel,
};
pub use describe::{format_position, serialize_scene, SceneDescription};
pub use director::{
    check_reply, emit_plan, parse_plan, validate_plan, ActionPlan, AgentQueue, Destination,
    DestinationKind, Strictness, ValidityReport,
};
pub use gateway::{
    build_prompt, generate, mock_plan, Gateway, GatewayError, GenerationResult, ProviderConfig,
    ProviderKind, ProviderSet,
};
pub use scene::{
    estimate_scenarios, load_scene, validate_scene, AgentId, AgentSpec, ObjectId, ObjectSpec,
    ScenarioParams, Scene,
};
pub use sim::{check_feasibility, render_timeline, simulate, ConflictPolicy, SimTrace};
