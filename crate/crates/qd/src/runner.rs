//! The search loop: parent selection, directed mutation, median-of-repeats
//! evaluation, archive insertion, and iteration-boundary checkpointing.
//!
//! Every random draw is derived from (master seed, iteration, slot), so
//! runs are bit-reproducible regardless of thread scheduling and resumable
//! from any completed iteration.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use steakhouse_harness::{
    run_episode, EpisodeLog, LLMBackend, Personality, PromptList, Provenance,
};
use steakhouse_measures::{measure_vector, median, median_row, MeasureId, MeasureRow};
use steakhouse_sim::seed::derive_seed;
use steakhouse_sim::Layout;

use crate::archive::{Archive, Elite, EliteProvenance, InsertOutcome, RepeatResult};
use crate::config::{ConfigError, RunConfig};
use crate::direction::{direction_to_instructions, sample_direction};
use crate::mutate::{mutate_prompts, request_random_personalities};

const ITER_TAG: u64 = 11;
const MUTATE_TAG: u64 = 12;
const EVAL_TAG: u64 = 13;
const RANDOM_TAG: u64 = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    PlanQd,
    RandomMutation,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::PlanQd => "planqd",
            Algorithm::RandomMutation => "random",
        }
    }
}

/// One evaluation of one prompt list: the complete record persisted to
/// `evals.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub index: u32,
    pub iteration: u32,
    pub slot: u32,
    pub algorithm: Algorithm,
    pub prompts: PromptList,
    pub parent_cell: Option<Vec<u32>>,
    pub direction: Option<Vec<i8>>,
    pub objective: f64,
    pub measures: MeasureRow,
    pub per_repeat: Vec<RepeatResult>,
    pub cell: Vec<u32>,
    pub outcome: InsertOutcome,
    pub log_files: Vec<String>,
    pub failed: bool,
    pub error: Option<String>,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("io error at {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("corrupt run state: {0}")]
    Corrupt(String),
    #[error("backend failure: {0}")]
    Backend(String),
    #[error(
        "run directory was produced by a different configuration \
         (expected hash {expected}, found {found})"
    )]
    ConfigMismatch { expected: String, found: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Uniform parent selection: an empty archive yields two copies of the
/// initial personality, otherwise a uniform draw over filled cells.
pub fn select_parent(
    archive: &Archive,
    initial: &str,
    rng: &mut impl Rng,
) -> (PromptList, Option<Vec<u32>>) {
    if archive.is_empty() {
        let p = Personality::initial(initial);
        return (PromptList([p.clone(), p]), None);
    }
    let index = rng.gen_range(0..archive.len());
    let elite = archive.elites().nth(index).expect("index in range");
    (elite.prompts.clone(), Some(elite.cell.clone()))
}

/// The outcome of evaluating one prompt list `repeats` times.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub objective: f64,
    pub measures: MeasureRow,
    pub per_repeat: Vec<RepeatResult>,
    pub logs: Vec<EpisodeLog>,
}

/// Run `repeats` independent episodes on derived seeds and aggregate with
/// the component-wise median.
pub fn evaluate(
    layout: &Layout,
    prompts: &PromptList,
    backend: &dyn LLMBackend,
    cfg: &RunConfig,
    eval_seed: u64,
) -> Result<Evaluation, String> {
    let episode_cfg = cfg.episode_config();
    let results: Vec<Result<(RepeatResult, EpisodeLog), String>> = (0..cfg.repeats)
        .into_par_iter()
        .map(|repeat| {
            let seed = derive_seed(eval_seed, &[repeat as u64]);
            let log = run_episode(layout, prompts, backend, &episode_cfg, seed)
                .map_err(|e| e.to_string())?;
            let measures = measure_vector(&log, cfg.gamma);
            Ok((
                RepeatResult {
                    seed,
                    objective: measures.fitness,
                    measures,
                },
                log,
            ))
        })
        .collect();

    let mut per_repeat = Vec::with_capacity(cfg.repeats as usize);
    let mut logs = Vec::with_capacity(cfg.repeats as usize);
    for r in results {
        let (repeat, log) = r?;
        per_repeat.push(repeat);
        logs.push(log);
    }
    let raw: Vec<_> = per_repeat.iter().map(|r| r.measures.clone()).collect();
    let objective = median(&per_repeat.iter().map(|r| r.objective).collect::<Vec<_>>());
    Ok(Evaluation {
        objective,
        measures: median_row(&raw),
        per_repeat,
        logs,
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct Checkpoint {
    algorithm: Algorithm,
    config_hash: String,
    completed_iterations: u32,
}

/// On-disk layout of a run directory.
pub struct RunDir {
    pub root: PathBuf,
}

impl RunDir {
    pub fn new(root: impl Into<PathBuf>) -> RunDir {
        RunDir { root: root.into() }
    }

    pub fn config_path(&self) -> PathBuf {
        self.root.join("config.toml")
    }

    pub fn archive_path(&self) -> PathBuf {
        self.root.join("archive.json")
    }

    pub fn evals_path(&self) -> PathBuf {
        self.root.join("evals.jsonl")
    }

    pub fn checkpoint_path(&self) -> PathBuf {
        self.root.join("checkpoint.json")
    }

    pub fn log_rel_path(&self, eval_index: u32, repeat: u32) -> String {
        format!("logs/eval_{:04}_rep{}.jsonl", eval_index, repeat)
    }

    pub fn read_evals(&self) -> Result<Vec<EvalRecord>, RunError> {
        let path = self.evals_path();
        let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                serde_json::from_str(l).map_err(|e| RunError::Corrupt(format!("eval record: {}", e)))
            })
            .collect()
    }

    pub fn read_archive(&self) -> Result<Archive, RunError> {
        let path = self.archive_path();
        let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
        Archive::from_json(&text).map_err(|e| RunError::Corrupt(format!("archive: {}", e)))
    }

    fn write_state(
        &self,
        algorithm: Algorithm,
        cfg_hash: &str,
        archive: &Archive,
        evals: &[EvalRecord],
        completed_iterations: u32,
    ) -> Result<(), RunError> {
        let path = self.archive_path();
        std::fs::write(&path, archive.to_json()).map_err(io_err(&path))?;
        let mut lines = String::new();
        for record in evals {
            lines.push_str(&serde_json::to_string(record).expect("record serializes"));
            lines.push('\n');
        }
        let path = self.evals_path();
        std::fs::write(&path, lines).map_err(io_err(&path))?;
        let checkpoint = Checkpoint {
            algorithm,
            config_hash: cfg_hash.to_string(),
            completed_iterations,
        };
        let path = self.checkpoint_path();
        std::fs::write(&path, serde_json::to_string_pretty(&checkpoint).unwrap())
            .map_err(io_err(&path))?;
        Ok(())
    }
}

struct RunState {
    archive: Archive,
    evals: Vec<EvalRecord>,
    completed_iterations: u32,
}

fn prepare(
    dir: &RunDir,
    cfg: &RunConfig,
    algorithm: Algorithm,
) -> Result<RunState, RunError> {
    std::fs::create_dir_all(&dir.root).map_err(io_err(&dir.root))?;
    let cfg_hash = cfg.config_hash();
    if dir.checkpoint_path().exists() {
        let path = dir.checkpoint_path();
        let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
        let checkpoint: Checkpoint = serde_json::from_str(&text)
            .map_err(|e| RunError::Corrupt(format!("checkpoint: {}", e)))?;
        if checkpoint.config_hash != cfg_hash {
            return Err(RunError::ConfigMismatch {
                expected: checkpoint.config_hash,
                found: cfg_hash,
            });
        }
        if checkpoint.algorithm != algorithm {
            return Err(RunError::Corrupt(format!(
                "run directory belongs to algorithm {:?}",
                checkpoint.algorithm
            )));
        }
        return Ok(RunState {
            archive: dir.read_archive()?,
            evals: dir.read_evals()?,
            completed_iterations: checkpoint.completed_iterations,
        });
    }
    let config_path = dir.config_path();
    std::fs::write(&config_path, cfg.to_toml()).map_err(io_err(&config_path))?;
    Ok(RunState {
        archive: Archive::new(cfg.archive_config()?),
        evals: Vec::new(),
        completed_iterations: 0,
    })
}

/// A mutated candidate waiting for evaluation.
struct Candidate {
    slot: u32,
    prompts: PromptList,
    parent_cell: Option<Vec<u32>>,
    direction: Option<Vec<i8>>,
    /// Mutation-stage failure, recorded before propagation.
    error: Option<String>,
}

/// Shared loop for both algorithms: evaluate a batch of candidates, insert
/// them in slot order, and checkpoint at the iteration boundary. `cfg` is
/// always the full-run configuration (its hash goes into the checkpoint);
/// `run_until` allows stopping early to exercise kill/resume.
fn run_iterations<F>(
    cfg: &RunConfig,
    run_until: u32,
    dir: &RunDir,
    algorithm: Algorithm,
    mut make_batch: F,
) -> Result<Archive, RunError>
where
    F: FnMut(u32, &Archive) -> Result<Vec<Candidate>, RunError>,
{
    let layout = cfg.load_layout()?;
    let agent_backend = cfg.agent_backend.build_agent();
    let cfg_hash = cfg.config_hash();
    let mut state = prepare(dir, cfg, algorithm)?;

    for iteration in state.completed_iterations..run_until.min(cfg.iterations) {
        let candidates = make_batch(iteration, &state.archive)?;

        // Evaluate the whole batch; episodes within it run in parallel.
        let outcomes: Vec<(Candidate, Result<Evaluation, String>)> = candidates
            .into_par_iter()
            .map(|candidate| {
                if candidate.error.is_some() {
                    let err = candidate.error.clone().unwrap();
                    return (candidate, Err(err));
                }
                let eval_index = iteration * cfg.batch_size + candidate.slot;
                let eval_seed = derive_seed(cfg.master_seed, &[EVAL_TAG, eval_index as u64]);
                let result = evaluate(&layout, &candidate.prompts, agent_backend.as_ref(), cfg, eval_seed);
                (candidate, result)
            })
            .collect();

        // Insert serially in slot order; persist logs and records.
        let mut hard_failure: Option<String> = None;
        for (candidate, result) in outcomes {
            let eval_index = iteration * cfg.batch_size + candidate.slot;
            let record = match result {
                Ok(evaluation) => {
                    let mut log_files = Vec::new();
                    if cfg.persist_logs {
                        for (repeat, log) in evaluation.logs.iter().enumerate() {
                            let rel = dir.log_rel_path(eval_index, repeat as u32);
                            let path = dir.root.join(&rel);
                            log.write_file(&path)
                                .map_err(|e| RunError::Corrupt(format!("log write: {}", e)))?;
                            log_files.push(rel);
                        }
                    }
                    let cell = state.archive.config.cell_index(&evaluation.measures);
                    let elite = Elite {
                        cell: cell.clone(),
                        prompts: candidate.prompts.clone(),
                        objective: evaluation.objective,
                        measures: evaluation.measures.clone(),
                        per_repeat: evaluation.per_repeat.clone(),
                        provenance: EliteProvenance {
                            algorithm: algorithm.name().to_string(),
                            iteration,
                            slot: candidate.slot,
                            parent_cell: candidate.parent_cell.clone(),
                            direction: candidate.direction.clone(),
                        },
                        log_files: log_files.clone(),
                    };
                    let outcome = state.archive.insert(elite);
                    EvalRecord {
                        index: eval_index,
                        iteration,
                        slot: candidate.slot,
                        algorithm,
                        prompts: candidate.prompts,
                        parent_cell: candidate.parent_cell,
                        direction: candidate.direction,
                        objective: evaluation.objective,
                        measures: evaluation.measures,
                        per_repeat: evaluation.per_repeat,
                        cell,
                        outcome,
                        log_files,
                        failed: false,
                        error: None,
                    }
                }
                Err(message) => {
                    // Failed candidates are discarded but still consume
                    // budget; the record carries the error.
                    hard_failure = Some(message.clone());
                    EvalRecord {
                        index: eval_index,
                        iteration,
                        slot: candidate.slot,
                        algorithm,
                        prompts: candidate.prompts,
                        parent_cell: candidate.parent_cell,
                        direction: candidate.direction,
                        objective: 0.0,
                        measures: MeasureRow {
                            fitness: 0.0,
                            avg_action_delay: 0.0,
                            percent_contribution: 0.0,
                            specialization: 0.0,
                            workload_diffs: [0.0; 9],
                        },
                        per_repeat: Vec::new(),
                        cell: Vec::new(),
                        outcome: InsertOutcome::Rejected,
                        log_files: Vec::new(),
                        failed: true,
                        error: Some(message),
                    }
                }
            };
            state.evals.push(record);
        }

        state.completed_iterations = iteration + 1;
        dir.write_state(
            algorithm,
            &cfg_hash,
            &state.archive,
            &state.evals,
            state.completed_iterations,
        )?;
        if let Some(message) = hard_failure {
            return Err(RunError::Backend(message));
        }
    }
    Ok(state.archive)
}

/// The full directed search. Resumable: re-running on the same directory
/// with the same configuration continues from the last completed
/// iteration.
pub fn run_planqd(cfg: &RunConfig, out_dir: &Path) -> Result<Archive, RunError> {
    run_planqd_until(cfg, out_dir, cfg.iterations)
}

/// As [`run_planqd`] but stopping after `stop_after` iterations; used to
/// exercise kill/resume behavior.
pub fn run_planqd_until(
    cfg: &RunConfig,
    out_dir: &Path,
    stop_after: u32,
) -> Result<Archive, RunError> {
    let dir = RunDir::new(out_dir);
    let layout_domain = steakhouse_harness::prompt::domain_knowledge(&cfg.load_layout()?);
    let mutator = cfg.mutator_backend.build_mutator(cfg.personality_char_budget);
    let initial = cfg.initial_prompt()?;
    let measures = cfg.measures()?;
    let sampling = cfg.sampling();
    let dims = measures.len();

    // Selection and mutation derive everything from (master seed,
    // iteration), so resumed runs replay identically.
    let master_seed = cfg.master_seed;
    let batch_size = cfg.batch_size;
    let char_budget = cfg.personality_char_budget;
    run_iterations(cfg, stop_after, &dir, Algorithm::PlanQd, move |iteration, archive| {
        let mut iter_rng =
            ChaCha8Rng::seed_from_u64(derive_seed(master_seed, &[ITER_TAG, iteration as u64]));
        let mut batch = Vec::new();
        for slot in 0..batch_size {
            let (parent, parent_cell) = select_parent(archive, &initial, &mut iter_rng);
            let direction = sample_direction(&mut iter_rng, dims);
            let instructions = direction_to_instructions(&direction, &measures);
            let mutate_seed =
                derive_seed(master_seed, &[MUTATE_TAG, iteration as u64, slot as u64]);
            match mutate_prompts(
                mutator.as_ref(),
                &layout_domain,
                &parent,
                &instructions,
                &direction,
                parent_cell.clone(),
                &sampling,
                char_budget,
                mutate_seed,
            ) {
                Ok(child) => batch.push(Candidate {
                    slot,
                    prompts: child,
                    parent_cell,
                    direction: Some(direction.0.clone()),
                    error: None,
                }),
                Err(e) => batch.push(Candidate {
                    slot,
                    prompts: parent,
                    parent_cell,
                    direction: Some(direction.0.clone()),
                    error: Some(e.to_string()),
                }),
            }
        }
        Ok(batch)
    })
}

/// The baseline: batches of random personalities from the same initial
/// prompt, no directions and no stepping stones, evaluated and archived
/// identically to the directed search.
pub fn run_random_mutation(cfg: &RunConfig, out_dir: &Path) -> Result<Archive, RunError> {
    let dir = RunDir::new(out_dir);
    let layout_domain = steakhouse_harness::prompt::domain_knowledge(&cfg.load_layout()?);
    let mutator = cfg.mutator_backend.build_mutator(cfg.personality_char_budget);
    let initial = cfg.initial_prompt()?;
    let sampling = cfg.sampling();
    let master_seed = cfg.master_seed;
    let batch_size = cfg.batch_size;
    let char_budget = cfg.personality_char_budget;

    run_iterations(cfg, cfg.iterations, &dir, Algorithm::RandomMutation, move |iteration, _archive| {
        let count = (batch_size * 2) as usize;
        let seed = derive_seed(master_seed, &[RANDOM_TAG, iteration as u64]);
        let personalities = match request_random_personalities(
            mutator.as_ref(),
            &layout_domain,
            &initial,
            count,
            &sampling,
            char_budget,
            seed,
        ) {
            Ok(p) => p,
            Err(e) => {
                // Whole batch fails: record per-slot failures.
                return Ok((0..batch_size)
                    .map(|slot| Candidate {
                        slot,
                        prompts: PromptList([
                            Personality::initial(&initial),
                            Personality::initial(&initial),
                        ]),
                        parent_cell: None,
                        direction: None,
                        error: Some(e.to_string()),
                    })
                    .collect());
            }
        };
        Ok((0..batch_size)
            .map(|slot| {
                let a = personalities[2 * slot as usize].clone();
                let b = personalities[2 * slot as usize + 1].clone();
                Candidate {
                    slot,
                    prompts: PromptList([
                        Personality::new(a, Provenance::RandomBaseline),
                        Personality::new(b, Provenance::RandomBaseline),
                    ]),
                    parent_cell: None,
                    direction: None,
                    error: None,
                }
            })
            .collect())
    })
}

/// Keys of the measures a run's archive was built over.
pub fn archive_measures(archive: &Archive) -> Vec<MeasureId> {
    archive.config.dims.iter().map(|d| d.measure).collect()
}
