//! Declarative run configuration with every experiment default embedded;
//! any field can be overridden from a TOML file or the CLI.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use steakhouse_harness::{
    EpisodeConfig, HttpBackend, LLMBackend, SamplingParams, ScriptedBackend, ScriptedMutator,
};
use steakhouse_measures::MeasureId;
use steakhouse_sim::layout::{builtin, parse_layout, Layout};

use crate::archive::ArchiveConfig;

/// The initial personality given to both agents at the start of a search.
pub const INITIAL_PROMPT: &str = include_str!("../../../prompts/initial_prompt.txt");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BackendSpec {
    /// Deterministic offline backend.
    Scripted { seed: u64 },
    /// OpenAI-compatible chat-completions endpoint. The API key is read
    /// from the named environment variable when set.
    Http {
        base_url: String,
        model: String,
        #[serde(default)]
        api_key_env: Option<String>,
    },
}

impl BackendSpec {
    /// Build the agent-side backend for this spec.
    pub fn build_agent(&self) -> Box<dyn LLMBackend> {
        match self {
            BackendSpec::Scripted { seed } => Box::new(ScriptedBackend::new(*seed)),
            BackendSpec::Http { base_url, model, api_key_env } => {
                let key = api_key_env.as_ref().and_then(|v| std::env::var(v).ok());
                Box::new(HttpBackend::new(base_url, model, key))
            }
        }
    }

    /// Build the mutator-side backend for this spec.
    pub fn build_mutator(&self, char_budget: usize) -> Box<dyn LLMBackend> {
        match self {
            BackendSpec::Scripted { seed } => {
                let mut mutator = ScriptedMutator::new(*seed);
                mutator.char_budget = char_budget;
                Box::new(mutator)
            }
            BackendSpec::Http { base_url, model, api_key_env } => {
                let key = api_key_env.as_ref().and_then(|v| std::env::var(v).ok());
                Box::new(HttpBackend::new(base_url, model, key))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Name of a shipped layout (open, ring, hallway, forced) or a path to
    /// a layout file.
    pub layout: String,
    pub comm_enabled: bool,
    pub iterations: u32,
    pub batch_size: u32,
    pub repeats: u32,
    pub horizon: u32,
    pub requery_timeout: u32,
    pub action_history: usize,
    pub message_history: usize,
    pub master_seed: u64,
    pub gamma: f64,
    pub personality_char_budget: usize,
    /// Override the built-in initial personality with a file.
    pub initial_prompt_path: Option<String>,
    /// Measure keys defining the archive dimensions.
    pub qd_measures: Vec<String>,
    pub temperature: f64,
    pub top_p: f64,
    pub max_tokens: u32,
    pub agent_backend: BackendSpec,
    pub mutator_backend: BackendSpec,
    /// Write every episode log under the run directory.
    pub persist_logs: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            layout: "open".to_string(),
            comm_enabled: false,
            iterations: 50,
            batch_size: 2,
            repeats: 4,
            horizon: 500,
            requery_timeout: 5,
            action_history: 2,
            message_history: 2,
            master_seed: 0,
            gamma: 1.0,
            personality_char_budget: 1200,
            initial_prompt_path: None,
            qd_measures: MeasureId::QD_DEFAULT.iter().map(|m| m.key().to_string()).collect(),
            temperature: 1.1,
            top_p: 1.0,
            max_tokens: 128,
            agent_backend: BackendSpec::Scripted { seed: 0 },
            mutator_backend: BackendSpec::Scripted { seed: 1 },
            persist_logs: true,
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unknown measure key {0:?}")]
    UnknownMeasure(String),
    #[error("unknown layout {0:?} (not a shipped name or readable file)")]
    UnknownLayout(String),
    #[error("invalid layout file: {0}")]
    Layout(#[from] steakhouse_sim::LayoutError),
}

impl RunConfig {
    pub fn from_toml_file(path: &std::path::Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(toml::from_str(&text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// The evaluation budget of a full run.
    pub fn budget(&self) -> u32 {
        self.iterations * self.batch_size
    }

    pub fn measures(&self) -> Result<Vec<MeasureId>, ConfigError> {
        self.qd_measures
            .iter()
            .map(|k| MeasureId::from_key(k).ok_or_else(|| ConfigError::UnknownMeasure(k.clone())))
            .collect()
    }

    pub fn archive_config(&self) -> Result<ArchiveConfig, ConfigError> {
        Ok(ArchiveConfig::from_measures(&self.measures()?))
    }

    /// Resolve the layout: a shipped name first, then a file path.
    pub fn load_layout(&self) -> Result<Layout, ConfigError> {
        if let Some(layout) = builtin::by_name(&self.layout) {
            return Ok(layout);
        }
        let path = std::path::Path::new(&self.layout);
        let text = std::fs::read_to_string(path)
            .map_err(|_| ConfigError::UnknownLayout(self.layout.clone()))?;
        let name = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("custom");
        Ok(parse_layout(&text, name)?)
    }

    pub fn initial_prompt(&self) -> Result<String, ConfigError> {
        match &self.initial_prompt_path {
            None => Ok(INITIAL_PROMPT.trim().to_string()),
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
                    path: path.clone(),
                    source,
                })?;
                Ok(text.trim().to_string())
            }
        }
    }

    pub fn sampling(&self) -> SamplingParams {
        SamplingParams {
            temperature: self.temperature,
            top_p: self.top_p,
            max_tokens: self.max_tokens,
            seed: None,
        }
    }

    pub fn episode_config(&self) -> EpisodeConfig {
        EpisodeConfig {
            horizon: self.horizon,
            requery_timeout: self.requery_timeout,
            action_history: self.action_history,
            message_history: self.message_history,
            comm_enabled: self.comm_enabled,
            sampling: self.sampling(),
            config_hash: self.config_hash(),
        }
    }

    /// Stable hash of the full configuration; written into every log header
    /// and checked on resume.
    pub fn config_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut hex = String::with_capacity(64);
        for byte in digest {
            hex.push_str(&format!("{:02x}", byte));
        }
        hex
    }
}
