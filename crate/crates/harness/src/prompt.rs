//! Renders the per-query agent prompt: identity, personality, environment
//! and rule descriptions, current state, histories, objective, and the
//! numbered action menu. Construction is a pure function of its inputs.

use std::fmt::Write;

use steakhouse_planner::station_distance;
use steakhouse_sim::{
    ApplianceState, Cell, HighLevelAction, ItemKind, Layout, TileKind, WorldState,
    GRILL_COOK_TICKS, REQUIRED_CHOPS, REQUIRED_RINSES,
};

pub const AGENT_NAMES: [&str; 2] = ["Alice", "Bob"];

/// One completed action shown in the Action History section.
#[derive(Debug, Clone)]
pub struct HistoryEntry {
    pub t: u32,
    pub rendered: String,
}

/// One chat message shown in the Message History section.
#[derive(Debug, Clone)]
pub struct MessageEntry {
    pub t: u32,
    pub agent: usize,
    pub text: String,
}

/// Everything the prompt renders besides the world itself.
pub struct PromptContext<'a> {
    pub agent: usize,
    pub personality: &'a str,
    pub comm_enabled: bool,
    /// Completed actions of this agent, oldest first; only the last
    /// `action_history` entries are shown.
    pub history: &'a [HistoryEntry],
    /// Messages from either agent, oldest first; only the last
    /// `message_history` entries are shown.
    pub messages: &'a [MessageEntry],
    pub action_history: usize,
    pub message_history: usize,
}

fn ago(now: u32, then: u32) -> String {
    let k = now.saturating_sub(then);
    if k == 1 {
        "1 timestep ago".to_string()
    } else {
        format!("{} timesteps ago", k)
    }
}

fn layout_description(layout: &Layout) -> String {
    let fixed = match layout.name.as_str() {
        "open" => Some(
            "The kitchen is one open room; both agents can reach every station.".to_string(),
        ),
        "ring" => Some(
            "The stations line the outer walls around a central counter island; the walkway \
             loops around the island, and the island's corner counters are shared counters."
                .to_string(),
        ),
        "hallway" => Some(
            "Two rooms are joined by a narrow hallway through the dividing wall; the shared \
             counters sit in that wall so items can be passed between the rooms."
                .to_string(),
        ),
        "forced" => Some(format!(
            "The kitchen is split into two sections that agents cannot walk between; the only \
             way to move items across is over the three shared counters. {}'s section has the \
             dispensers; {}'s section has the grill, sink, chopping board, and delivery.",
            AGENT_NAMES[0], AGENT_NAMES[1]
        )),
        _ => None,
    };
    fixed.unwrap_or_else(|| {
        "A kitchen with item dispensers, a grill, a sink, a chopping board, counters, and a \
         delivery location."
            .to_string()
    })
}

fn rules_text() -> String {
    format!(
        "The game has the following dishes: steak dish, steak onion dish. The agents are \
         provided with the current and next order required to make. Ingredients for these \
         dishes are obtained from dispensers.\n\
         The steak dish requires 2 items: 1 cooked meat (steak) and 1 clean plate.\n\
         The steak onion dish requires 3 items: 1 cooked meat (steak), 1 chopped onion, and 1 \
         clean plate.\n\
         Raw meat on the grill becomes cooked meat after {} timesteps. A dirty plate in the \
         sink becomes clean after {} rinses. A raw onion on the chopping board becomes chopped \
         after {} chops.\n\
         Counters each hold one item. Shared counters are designated for passing items to the \
         other agent; general counters are all other counters.\n\
         After the dish is complete, it must be delivered to a delivery location.",
        GRILL_COOK_TICKS, REQUIRED_RINSES, REQUIRED_CHOPS
    )
}

/// Shared domain text given verbatim to the mutator backend as well.
pub fn domain_knowledge(layout: &Layout) -> String {
    format!("{}\n\n{}", layout_description(layout), rules_text())
}

fn held_phrase(state: &WorldState, agent: usize) -> String {
    match &state.agents[agent].held {
        None => format!("{} is holding nothing.", AGENT_NAMES[agent]),
        Some(item) => format!(
            "{} is holding a {}.",
            AGENT_NAMES[agent],
            item.kind.display_name()
        ),
    }
}

fn station_phrase(layout: &Layout, cell: Cell) -> String {
    let kind = layout.tile(cell);
    if !kind.is_counter() && layout.cells_of_kind(kind).len() == 1 {
        format!("the {}", kind.station_name())
    } else {
        format!("the {} at {}", kind.station_name(), cell)
    }
}

fn appliance_status(layout: &Layout, state: &WorldState) -> String {
    let mut parts = Vec::new();
    for kind in [TileKind::Grill, TileKind::Sink, TileKind::ChoppingBoard] {
        for cell in layout.cells_of_kind(kind) {
            let name = station_phrase(layout, cell);
            let sentence = match state.appliance(cell) {
                None => format!("{} is empty.", capitalize(&name)),
                Some(ApplianceState::Grill { item, cook_timer }) => {
                    if item.kind == ItemKind::CookedMeat {
                        format!("{} has a cooked meat ready.", capitalize(&name))
                    } else {
                        format!(
                            "{} has a raw meat cooking ({} of {} timesteps).",
                            capitalize(&name),
                            cook_timer,
                            GRILL_COOK_TICKS
                        )
                    }
                }
                Some(ApplianceState::Sink { item, rinses }) => {
                    if item.kind == ItemKind::CleanPlate {
                        format!("{} has a clean plate ready.", capitalize(&name))
                    } else {
                        format!(
                            "{} has a dirty plate ({} of {} rinses done).",
                            capitalize(&name),
                            rinses,
                            REQUIRED_RINSES
                        )
                    }
                }
                Some(ApplianceState::Board { item, chops }) => {
                    if item.kind == ItemKind::ChoppedOnion {
                        format!("{} has a chopped onion ready.", capitalize(&name))
                    } else {
                        format!(
                            "{} has a raw onion ({} of {} chops done).",
                            capitalize(&name),
                            chops,
                            REQUIRED_CHOPS
                        )
                    }
                }
            };
            parts.push(sentence);
        }
    }
    let mut counter_items = Vec::new();
    for cell in layout.cells() {
        if layout.tile(cell).is_counter() {
            if let Some(item) = state.counter_item(cell) {
                counter_items.push(format!(
                    "a {} on {}",
                    item.kind.display_name(),
                    station_phrase(layout, cell)
                ));
            }
        }
    }
    if counter_items.is_empty() {
        parts.push("No items are on counters.".to_string());
    } else {
        parts.push(format!("Items on counters: {}.", counter_items.join("; ")));
    }
    parts.join(" ")
}

fn location_info(layout: &Layout, state: &WorldState, agent: usize) -> String {
    let from = state.agents[agent].pos;
    let mut parts = Vec::new();
    for kind in [
        TileKind::MeatDispenser,
        TileKind::OnionDispenser,
        TileKind::DirtyPlateDispenser,
        TileKind::Grill,
        TileKind::Sink,
        TileKind::ChoppingBoard,
        TileKind::Delivery,
    ] {
        if layout.cells_of_kind(kind).is_empty() {
            continue;
        }
        let sentence = match station_distance(layout, from, kind) {
            Some(d) => format!("The {} is {} units away.", kind.station_name(), d),
            None => format!(
                "The {} is not reachable from your position.",
                kind.station_name()
            ),
        };
        parts.push(sentence);
    }
    parts.join(" ")
}

/// Build the full prompt for one query.
pub fn build_prompt(
    layout: &Layout,
    state: &WorldState,
    ctx: &PromptContext<'_>,
    offered: &[HighLevelAction],
) -> String {
    let me = ctx.agent;
    let other = 1 - me;
    let now = state.timestep;
    let mut p = String::new();

    writeln!(
        p,
        "You are {}. Other agents are: {}.",
        AGENT_NAMES[me], AGENT_NAMES[other]
    )
    .unwrap();
    writeln!(p).unwrap();
    writeln!(p, "Personality: {}", ctx.personality).unwrap();
    writeln!(p).unwrap();
    writeln!(p, "Environment Details: {}", layout_description(layout)).unwrap();
    writeln!(p).unwrap();
    writeln!(p, "{}", rules_text()).unwrap();
    writeln!(p).unwrap();

    writeln!(
        p,
        "Inventory: {} {}",
        held_phrase(state, me),
        held_phrase(state, other)
    )
    .unwrap();
    writeln!(p).unwrap();
    writeln!(p, "Environment Details: {}", appliance_status(layout, state)).unwrap();
    writeln!(p).unwrap();
    writeln!(p, "Location Info: {}", location_info(layout, state, me)).unwrap();
    writeln!(p).unwrap();
    writeln!(
        p,
        "Order List: 1. {} 2. {}",
        state.orders.0[0].display_name(),
        state.orders.0[1].display_name()
    )
    .unwrap();
    writeln!(p).unwrap();

    let history_tail = ctx
        .history
        .iter()
        .rev()
        .take(ctx.action_history)
        .rev()
        .map(|h| format!("{} ({})", h.rendered, ago(now, h.t)))
        .collect::<Vec<_>>();
    if history_tail.is_empty() {
        writeln!(p, "Action History: (no completed actions yet)").unwrap();
    } else {
        writeln!(p, "Action History: {}", history_tail.join("; ")).unwrap();
    }

    if ctx.comm_enabled {
        writeln!(p).unwrap();
        let message_tail = ctx
            .messages
            .iter()
            .rev()
            .take(ctx.message_history)
            .rev()
            .map(|m| format!("[{}, {}]: {}", AGENT_NAMES[m.agent], ago(now, m.t), m.text))
            .collect::<Vec<_>>();
        if message_tail.is_empty() {
            writeln!(p, "Message History: (no messages yet)").unwrap();
        } else {
            writeln!(p, "Message History: {}", message_tail.join(" ")).unwrap();
        }
    }

    writeln!(p).unwrap();
    writeln!(
        p,
        "Your objective is to deliver all the dishes from the order list as quickly as \
         possible. Delivering dishes in the correct order of the order list gives $100, and \
         out of order gives $20."
    )
    .unwrap();
    writeln!(p).unwrap();
    writeln!(
        p,
        "First, choose an action from the list below. Reply with a line \"Action: <number>\"."
    )
    .unwrap();
    for (i, hla) in offered.iter().enumerate() {
        writeln!(p, "{}. {}", i, hla.render(layout)).unwrap();
    }
    if ctx.comm_enabled {
        writeln!(p).unwrap();
        writeln!(
            p,
            "Then, send a message to the other agent. Reply with a line \"Message: <text>\"."
        )
        .unwrap();
    }
    p
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}
