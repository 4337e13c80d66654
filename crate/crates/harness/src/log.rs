//! Episode logs: a header followed by per-step records, sim events, raw
//! queries/completions, messages, and completed high-level actions, one
//! JSON record per line.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use steakhouse_sim::{ActionCategory, Event, HlaTemplate, ItemKind, LowLevelAction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeaderRecord {
    pub layout_name: String,
    pub layout_ascii: String,
    pub seed: u64,
    pub config_hash: String,
    pub comm_enabled: bool,
    pub horizon: u32,
    pub personalities: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: u32,
    pub actions: [LowLevelAction; 2],
    pub reward: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub t: u32,
    pub agent: usize,
    pub prompt: String,
    pub completion: String,
    /// Rendered string of the chosen action.
    pub action: String,
    pub action_index: Option<usize>,
    /// True when the reply matched nothing and Wait was substituted.
    pub fallback: bool,
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MessageRecord {
    pub t: u32,
    pub agent: usize,
    pub text: String,
}

/// A completed high-level action, with the lineage of the item it touched
/// so it can later be attributed to a delivered dish.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletedRecord {
    pub t: u32,
    pub agent: usize,
    pub action: String,
    pub template: HlaTemplate,
    pub category: ActionCategory,
    pub item: Option<ItemKind>,
    pub lineage: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LogRecord {
    Header(HeaderRecord),
    Step(StepRecord),
    Event(Event),
    Query(QueryRecord),
    Message(MessageRecord),
    Completed(CompletedRecord),
}

#[derive(Debug, Error)]
pub enum LogError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed log at line {line}: {source}")]
    Malformed {
        line: usize,
        source: serde_json::Error,
    },
    #[error("log has no header record")]
    MissingHeader,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub records: Vec<LogRecord>,
}

impl EpisodeLog {
    pub fn header(&self) -> Option<&HeaderRecord> {
        self.records.iter().find_map(|r| match r {
            LogRecord::Header(h) => Some(h),
            _ => None,
        })
    }

    pub fn events(&self) -> impl Iterator<Item = &Event> {
        self.records.iter().filter_map(|r| match r {
            LogRecord::Event(e) => Some(e),
            _ => None,
        })
    }

    pub fn completed(&self) -> impl Iterator<Item = &CompletedRecord> {
        self.records.iter().filter_map(|r| match r {
            LogRecord::Completed(c) => Some(c),
            _ => None,
        })
    }

    pub fn queries(&self) -> impl Iterator<Item = &QueryRecord> {
        self.records.iter().filter_map(|r| match r {
            LogRecord::Query(q) => Some(q),
            _ => None,
        })
    }

    pub fn messages(&self) -> impl Iterator<Item = &MessageRecord> {
        self.records.iter().filter_map(|r| match r {
            LogRecord::Message(m) => Some(m),
            _ => None,
        })
    }

    pub fn steps(&self) -> impl Iterator<Item = &StepRecord> {
        self.records.iter().filter_map(|r| match r {
            LogRecord::Step(s) => Some(s),
            _ => None,
        })
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for record in &self.records {
            out.push_str(&serde_json::to_string(record).expect("log records serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<EpisodeLog, LogError> {
        let mut records = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record = serde_json::from_str(line)
                .map_err(|source| LogError::Malformed { line: i + 1, source })?;
            records.push(record);
        }
        Ok(EpisodeLog { records })
    }

    pub fn write_file(&self, path: &Path) -> Result<(), LogError> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        file.write_all(self.to_jsonl().as_bytes())?;
        Ok(())
    }

    pub fn read_file(path: &Path) -> Result<EpisodeLog, LogError> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut records = Vec::new();
        for (i, line) in file.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let record = serde_json::from_str(&line)
                .map_err(|source| LogError::Malformed { line: i + 1, source })?;
            records.push(record);
        }
        Ok(EpisodeLog { records })
    }
}
