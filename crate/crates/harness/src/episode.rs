//! The episode loop: query, plan, act, track completion and idleness,
//! re-query on completion or after the timeout.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use steakhouse_planner::{goal_for_action, plan_path, unstick, PlanError};
use steakhouse_sim::seed::derive_seed;
use steakhouse_sim::{
    init_state, step, Event, EventKind, HighLevelAction, HlaTemplate, Layout, LowLevelAction,
    PickupSource, PlaceTarget, WorldState, DEFAULT_HORIZON,
};

use crate::actions::{available_actions, is_action_available};
use crate::backend::{BackendError, LLMBackend, SamplingParams};
use crate::log::{
    CompletedRecord, EpisodeLog, HeaderRecord, LogRecord, MessageRecord, QueryRecord, StepRecord,
};
use crate::parse::parse_response;
use crate::prompt::{build_prompt, HistoryEntry, MessageEntry, PromptContext};

const WORLD_TAG: u64 = 1;
const EPISODE_TAG: u64 = 2;
const QUERY_TAG: u64 = 3;

/// The world seed derived from an episode seed; replay tooling re-simulates
/// a log by initializing the world exactly as `run_episode` did.
pub fn world_seed(episode_seed: u64) -> u64 {
    derive_seed(episode_seed, &[WORLD_TAG])
}

/// Where a personality came from; carried through archives and logs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Provenance {
    Initial,
    Mutated {
        parent_cell: Option<Vec<u32>>,
        direction: Vec<i8>,
    },
    RandomBaseline,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Personality {
    pub text: String,
    pub provenance: Provenance,
}

impl Personality {
    pub fn new(text: impl Into<String>, provenance: Provenance) -> Personality {
        let text = text.into();
        debug_assert!(!text.trim().is_empty(), "personalities must be non-empty");
        Personality { text, provenance }
    }

    pub fn initial(text: impl Into<String>) -> Personality {
        Personality::new(text, Provenance::Initial)
    }
}

/// The genome of the search: one personality per agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptList(pub [Personality; 2]);

impl PromptList {
    pub fn texts(&self) -> Vec<String> {
        self.0.iter().map(|p| p.text.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeConfig {
    pub horizon: u32,
    /// Ticks of idleness or invalidity before a forced re-query.
    pub requery_timeout: u32,
    /// Completed actions shown in the prompt.
    pub action_history: usize,
    /// Messages shown in the prompt.
    pub message_history: usize,
    pub comm_enabled: bool,
    pub sampling: SamplingParams,
    /// Hash of the run configuration, recorded in the log header.
    pub config_hash: String,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        EpisodeConfig {
            horizon: DEFAULT_HORIZON,
            requery_timeout: 5,
            action_history: 2,
            message_history: 2,
            comm_enabled: false,
            sampling: SamplingParams::default(),
            config_hash: String::new(),
        }
    }
}

#[derive(Debug, Error)]
pub enum EpisodeError {
    #[error("backend failure: {0}")]
    Backend(#[from] BackendError),
}

struct Controller {
    current: Option<Active>,
    needs_query: bool,
    /// Consecutive ticks without progress (blocked, no-op, or invalid).
    stall_ticks: u32,
    wait_remaining: u32,
    history: Vec<HistoryEntry>,
    query_count: u64,
}

struct Active {
    hla: HighLevelAction,
    rendered: String,
}

impl Controller {
    fn new() -> Controller {
        Controller {
            current: None,
            needs_query: true,
            stall_ticks: 0,
            wait_remaining: 0,
            history: Vec::new(),
            query_count: 0,
        }
    }

    fn is_waiting(&self) -> bool {
        self.current
            .as_ref()
            .is_some_and(|a| a.hla.template == HlaTemplate::Wait)
    }
}

/// Does `event` complete this high-level action?
fn completes(hla: &HighLevelAction, event: &EventKind) -> bool {
    use HlaTemplate::*;
    match (hla.template, event) {
        (PickUpFromCounter, EventKind::Pickup { item, from: PickupSource::Counter { cell, .. } }) => {
            hla.station == Some(*cell) && hla.item == Some(item.kind)
        }
        (PlaceOnNearestCounter, EventKind::Place { onto: PlaceTarget::Counter { shared, .. }, .. }) => {
            !shared
        }
        (PlaceOnSharedCounter, EventKind::Place { onto: PlaceTarget::Counter { cell, shared }, .. }) => {
            *shared && hla.station == Some(*cell)
        }
        (PickUpDirtyPlate, EventKind::Pickup { from: PickupSource::DirtyPlateDispenser { .. }, .. }) => true,
        (PlaceDirtyPlateInSink, EventKind::Place { onto: PlaceTarget::Sink { cell }, .. }) => {
            hla.station == Some(*cell)
        }
        (RinseDirtyPlate, EventKind::Rinse { sink, .. }) => hla.station == Some(*sink),
        (PickUpCleanPlate, EventKind::Pickup { from: PickupSource::Sink { cell }, .. }) => {
            hla.station == Some(*cell)
        }
        (PlateSteakFromGrill, EventKind::PlateSteak { grill, .. }) => hla.station == Some(*grill),
        (PickUpOnion, EventKind::Pickup { from: PickupSource::OnionDispenser { .. }, .. }) => true,
        (PlaceOnionOnBoard, EventKind::Place { onto: PlaceTarget::Board { cell }, .. }) => {
            hla.station == Some(*cell)
        }
        (ChopOnion, EventKind::Chop { board, .. }) => hla.station == Some(*board),
        (AddGarnish, EventKind::Garnish { board, .. }) => hla.station == Some(*board),
        (PickUpMeat, EventKind::Pickup { from: PickupSource::MeatDispenser { .. }, .. }) => true,
        (PlaceMeatOnGrill, EventKind::Place { onto: PlaceTarget::Grill { cell }, .. }) => {
            hla.station == Some(*cell)
        }
        (DeliverSteak, EventKind::Deliver { dish, .. }) => *dish == steakhouse_sim::DishKind::Steak,
        (DeliverSteakOnion, EventKind::Deliver { dish, .. }) => {
            *dish == steakhouse_sim::DishKind::SteakOnion
        }
        _ => false,
    }
}

fn event_lineage(event: &EventKind) -> Vec<u32> {
    match event {
        EventKind::Pickup { item, .. } | EventKind::Place { item, .. } => item.lineage.clone(),
        EventKind::Rinse { item, .. } | EventKind::Chop { item, .. } => item.lineage.clone(),
        EventKind::PlateSteak { dish, .. } | EventKind::Garnish { dish, .. } => dish.lineage.clone(),
        EventKind::Deliver { lineage, .. } => lineage.clone(),
        EventKind::Move { .. } | EventKind::Collide { .. } => Vec::new(),
    }
}

/// Run one full episode and return its complete log. At t=0 agents are
/// queried in a seed-shuffled order; afterwards re-queries fire in agent
/// order whenever an action completes or after `requery_timeout` ticks of
/// idleness or invalidity.
pub fn run_episode(
    layout: &Layout,
    prompts: &PromptList,
    backend: &dyn LLMBackend,
    config: &EpisodeConfig,
    seed: u64,
) -> Result<EpisodeLog, EpisodeError> {
    let mut state = init_state(layout, derive_seed(seed, &[WORLD_TAG]));
    state.horizon = config.horizon;
    let mut episode_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[EPISODE_TAG]));
    let mut log = EpisodeLog::default();
    log.records.push(LogRecord::Header(HeaderRecord {
        layout_name: layout.name.clone(),
        layout_ascii: layout.to_ascii(),
        seed,
        config_hash: config.config_hash.clone(),
        comm_enabled: config.comm_enabled,
        horizon: config.horizon,
        personalities: prompts.texts(),
    }));

    let mut controllers = [Controller::new(), Controller::new()];
    let mut messages: Vec<MessageEntry> = Vec::new();
    let mut blocked_last = [false, false];

    let first_order: [usize; 2] = if episode_rng.gen_bool(0.5) { [1, 0] } else { [0, 1] };

    for t in 0..config.horizon {
        let order = if t == 0 { first_order } else { [0, 1] };
        for &agent in &order {
            if !controllers[agent].needs_query {
                continue;
            }
            if let Some(text) = query_agent(
                layout,
                &state,
                prompts,
                backend,
                config,
                seed,
                agent,
                &mut controllers[agent],
                &messages,
                &mut log,
            )? {
                messages.push(MessageEntry { t, agent, text: text.clone() });
                log.records.push(LogRecord::Message(MessageRecord { t, agent, text }));
            }
        }

        // Resolve this tick's low-level actions.
        let unstick_draws = unstick(blocked_last, &mut episode_rng);
        let mut actions = [LowLevelAction::Stay; 2];
        let mut wanted_move = [false, false];
        let mut interacted = [false, false];
        for agent in 0..2 {
            if let Some(action) = unstick_draws[agent] {
                actions[agent] = action;
                wanted_move[agent] = action.move_direction().is_some();
                continue;
            }
            let Some(active) = &controllers[agent].current else {
                continue;
            };
            if active.hla.template == HlaTemplate::Wait {
                continue; // Stay.
            }
            if !is_action_available(layout, &state, agent, &active.hla) {
                continue; // Invalid this tick; counts as a stall below.
            }
            match goal_for_action(layout, &state, agent, &active.hla) {
                Err(PlanError::Unreachable) => {}
                Ok(goal) => match plan_path(layout, &state, agent, &goal) {
                    Err(PlanError::Unreachable) => {
                        // Other agent in the way; retry next tick.
                        wanted_move[agent] = true;
                    }
                    Ok(path) => {
                        actions[agent] = path[0];
                        wanted_move[agent] = path[0].move_direction().is_some();
                        interacted[agent] = path[0] == LowLevelAction::Interact;
                    }
                },
            }
        }

        let before = [state.agents[0].pos, state.agents[1].pos];
        let outcome = step(layout, &mut state, actions).expect("stepping within horizon");
        log.records.push(LogRecord::Step(StepRecord {
            t,
            actions,
            reward: outcome.reward,
        }));
        for event in &outcome.events {
            log.records.push(LogRecord::Event(event.clone()));
        }

        for agent in 0..2 {
            let moved = state.agents[agent].pos != before[agent];
            blocked_last[agent] = wanted_move[agent] && !moved;
            let controller = &mut controllers[agent];

            let completion = completion_for(controller, agent, t, interacted[agent], &outcome.events);
            if let Some(record) = completion {
                controller.history.push(HistoryEntry {
                    t,
                    rendered: record.action.clone(),
                });
                log.records.push(LogRecord::Completed(record));
                controller.current = None;
                controller.needs_query = true;
                controller.stall_ticks = 0;
                continue;
            }

            // No completion: progress resets the stall counter, anything
            // else (blocked move, no-op interact, invalid action) counts
            // toward the re-query timeout. Waiting is deliberate idleness.
            if moved {
                controller.stall_ticks = 0;
            } else if !controller.is_waiting() {
                controller.stall_ticks += 1;
            }
            if controller.stall_ticks >= config.requery_timeout {
                controller.current = None;
                controller.needs_query = true;
                controller.stall_ticks = 0;
            }
        }
    }

    Ok(log)
}

/// The completion record for this tick, if the agent's active action
/// finished (matching interact event, or the final tick of a Wait).
fn completion_for(
    controller: &mut Controller,
    agent: usize,
    t: u32,
    interacted: bool,
    events: &[Event],
) -> Option<CompletedRecord> {
    let active = controller.current.as_ref()?;
    if active.hla.template == HlaTemplate::Wait {
        controller.wait_remaining = controller.wait_remaining.saturating_sub(1);
        if controller.wait_remaining > 0 {
            return None;
        }
        let active = controller.current.as_ref().unwrap();
        return Some(CompletedRecord {
            t,
            agent,
            action: active.rendered.clone(),
            template: HlaTemplate::Wait,
            category: active.hla.category(),
            item: None,
            lineage: Vec::new(),
        });
    }
    if !interacted {
        return None;
    }
    let event = events
        .iter()
        .filter(|e| e.agent == agent)
        .find(|e| completes(&active.hla, &e.kind))?;
    Some(CompletedRecord {
        t,
        agent,
        action: active.rendered.clone(),
        template: active.hla.template,
        category: active.hla.category(),
        item: active.hla.item,
        lineage: event_lineage(&event.kind),
    })
}

#[allow(clippy::too_many_arguments)]
fn query_agent(
    layout: &Layout,
    state: &WorldState,
    prompts: &PromptList,
    backend: &dyn LLMBackend,
    config: &EpisodeConfig,
    seed: u64,
    agent: usize,
    controller: &mut Controller,
    messages: &[MessageEntry],
    log: &mut EpisodeLog,
) -> Result<Option<String>, EpisodeError> {
    let offered = available_actions(layout, state, agent);
    let ctx = PromptContext {
        agent,
        personality: &prompts.0[agent].text,
        comm_enabled: config.comm_enabled,
        history: &controller.history,
        messages,
        action_history: config.action_history,
        message_history: config.message_history,
    };
    let prompt = build_prompt(layout, state, &ctx, &offered);
    let qseed = derive_seed(
        seed,
        &[QUERY_TAG, state.timestep as u64, agent as u64, controller.query_count],
    );
    controller.query_count += 1;
    let completion = backend.complete(&prompt, &config.sampling.with_seed(qseed))?;
    let parsed = parse_response(&completion, layout, &offered, config.comm_enabled);
    let rendered = parsed.action.render(layout);

    log.records.push(LogRecord::Query(QueryRecord {
        t: state.timestep,
        agent,
        prompt,
        completion,
        action: rendered.clone(),
        action_index: parsed.index,
        fallback: parsed.fallback,
        message: parsed.message.clone(),
    }));

    controller.wait_remaining = if parsed.action.template == HlaTemplate::Wait {
        HighLevelAction::WAIT_TICKS
    } else {
        0
    };
    controller.current = Some(Active {
        hla: parsed.action,
        rendered,
    });
    controller.needs_query = false;
    controller.stall_ticks = 0;
    Ok(parsed.message)
}
