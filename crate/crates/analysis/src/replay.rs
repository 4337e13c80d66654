//! Textual replay of a persisted episode log: the header's layout, seed,
//! and recorded low-level actions deterministically re-simulate the world,
//! rendered one ASCII frame per timestep.

use thiserror::Error;

use steakhouse_harness::{world_seed, EpisodeLog, LogRecord};
use steakhouse_sim::layout::parse_layout;
use steakhouse_sim::{init_state, step, ApplianceState, ItemKind, Layout, WorldState};

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("malformed log: {0}")]
    MalformedLog(String),
}

fn item_char(kind: ItemKind) -> char {
    match kind {
        ItemKind::RawMeat => 'm',
        ItemKind::CookedMeat => 'c',
        ItemKind::RawOnion => 'o',
        ItemKind::ChoppedOnion => 'n',
        ItemKind::DirtyPlate => 'd',
        ItemKind::CleanPlate => 'p',
        ItemKind::SteakDish => 's',
        ItemKind::SteakOnionDish => 'S',
    }
}

fn render_frame(layout: &Layout, state: &WorldState, reward_total: u32) -> String {
    let mut grid: Vec<Vec<char>> = layout
        .to_ascii()
        .lines()
        .map(|l| l.chars().collect())
        .collect();
    // Spawn markers only matter at parse time; show floor during replay.
    for row in grid.iter_mut() {
        for ch in row.iter_mut() {
            if *ch == '1' || *ch == '2' {
                *ch = '.';
            }
        }
    }
    for c in layout.cells() {
        if let Some(item) = state.counter_item(c) {
            grid[c.y as usize][c.x as usize] = item_char(item.kind);
        }
    }
    for (i, agent) in state.agents.iter().enumerate() {
        grid[agent.pos.y as usize][agent.pos.x as usize] =
            if i == 0 { '1' } else { '2' };
    }
    let mut out = String::new();
    for row in grid {
        out.extend(row);
        out.push('\n');
    }
    out.push_str(&format!(
        "t={} score={} orders=[{}, {}]\n",
        state.timestep,
        reward_total,
        state.orders.0[0].display_name(),
        state.orders.0[1].display_name()
    ));
    for (i, agent) in state.agents.iter().enumerate() {
        let held = agent
            .held
            .as_ref()
            .map(|h| h.kind.display_name())
            .unwrap_or("nothing");
        out.push_str(&format!("agent {}: at {} holding {}\n", i + 1, agent.pos, held));
    }
    for c in layout.cells() {
        match state.appliance(c) {
            Some(ApplianceState::Grill { item, cook_timer }) => out.push_str(&format!(
                "grill {}: {} ({}/60)\n",
                c,
                item.kind.display_name(),
                cook_timer
            )),
            Some(ApplianceState::Sink { item, rinses }) => out.push_str(&format!(
                "sink {}: {} ({}/3 rinses)\n",
                c,
                item.kind.display_name(),
                rinses
            )),
            Some(ApplianceState::Board { item, chops }) => out.push_str(&format!(
                "board {}: {} ({}/2 chops)\n",
                c,
                item.kind.display_name(),
                chops
            )),
            None => {}
        }
    }
    out
}

/// All frames of the episode: the initial state plus one frame per step.
pub fn replay_frames(log: &EpisodeLog) -> Result<Vec<String>, ReplayError> {
    let header = log
        .header()
        .ok_or_else(|| ReplayError::MalformedLog("missing header record".into()))?;
    let layout = parse_layout(&header.layout_ascii, &header.layout_name)
        .map_err(|e| ReplayError::MalformedLog(format!("bad layout in header: {}", e)))?;
    let mut state = init_state(&layout, world_seed(header.seed));
    state.horizon = header.horizon;

    let mut frames = Vec::new();
    let mut reward_total = 0;
    frames.push(render_frame(&layout, &state, reward_total));
    for record in &log.records {
        let LogRecord::Step(s) = record else { continue };
        let outcome = step(&layout, &mut state, s.actions)
            .map_err(|e| ReplayError::MalformedLog(format!("log exceeds horizon: {}", e)))?;
        if outcome.reward != s.reward {
            return Err(ReplayError::MalformedLog(format!(
                "reward mismatch at t={} (log {}, replay {})",
                s.t, s.reward, outcome.reward
            )));
        }
        reward_total += outcome.reward;
        frames.push(render_frame(&layout, &state, reward_total));
    }
    Ok(frames)
}

/// The message transcript: (timestep, agent, text) in log order.
pub fn transcript(log: &EpisodeLog) -> Vec<(u32, usize, String)> {
    log.messages()
        .map(|m| (m.t, m.agent, m.text.clone()))
        .collect()
}
