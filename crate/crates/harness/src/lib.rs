//! Drives one Steakhouse episode with two prompt-conditioned agents.
//!
//! Each agent is a loop around a chat-completion backend: the harness
//! renders the current state into a prompt, filters the high-level action
//! menu to what is possible right now, parses the reply into an action and
//! an optional message, and expands the action into low-level moves via the
//! planner. Agents are re-queried when an action completes or after five
//! timesteps of being idle or invalid.

pub mod actions;
pub mod backend;
pub mod episode;
pub mod log;
pub mod parse;
pub mod prompt;
pub mod scripted;

pub use actions::{available_actions, is_action_available};
pub use backend::{BackendError, HttpBackend, LLMBackend, SamplingParams};
pub use episode::{
    run_episode, world_seed, EpisodeConfig, EpisodeError, Personality, PromptList, Provenance,
};
pub use log::{
    CompletedRecord, EpisodeLog, HeaderRecord, LogError, LogRecord, MessageRecord, QueryRecord,
    StepRecord,
};
pub use parse::parse_response;
pub use prompt::{build_prompt, PromptContext, AGENT_NAMES};
pub use scripted::{scripted_policy, ScriptedBackend, ScriptedMutator};
