//! Quality-diversity search over agent personality prompts.
//!
//! The loop selects a stored prompt list as a stepping stone, samples a
//! random direction in measure space, asks a mutator backend to rewrite
//! each personality toward it, evaluates the child over repeated episodes,
//! and keeps it if it lands in an empty archive cell or beats the resident
//! elite. A random-mutation baseline shares the evaluation and archive
//! machinery but asks for unconditioned random personalities instead.

pub mod archive;
pub mod config;
pub mod direction;
pub mod mutate;
pub mod runner;

pub use archive::{
    bin_value, default_dimension, Archive, ArchiveConfig, DimensionConfig, Elite, EliteProvenance,
    InsertOutcome, RepeatResult,
};
pub use config::{BackendSpec, ConfigError, RunConfig, INITIAL_PROMPT};
pub use direction::{
    direction_to_instructions, sample_direction, AgentInstruction, MutationDirection,
};
pub use mutate::{mutate_prompts, mutation_prompt, random_mutation_prompt, request_random_personalities};
pub use runner::{
    archive_measures, evaluate, run_planqd, run_planqd_until, run_random_mutation, select_parent,
    Algorithm, EvalRecord, Evaluation, RunDir, RunError,
};
