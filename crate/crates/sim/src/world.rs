use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::event::{Event, EventKind, PickupSource, PlaceTarget};
use crate::item::{DishKind, Item, ItemKind};
use crate::layout::{Cell, Direction, Layout, TileKind};

/// Timesteps on the grill before raw meat becomes cooked meat.
pub const GRILL_COOK_TICKS: u16 = 60;
/// Sink interacts needed to clean a dirty plate.
pub const REQUIRED_RINSES: u8 = 3;
/// Board interacts needed to chop a raw onion.
pub const REQUIRED_CHOPS: u8 = 2;
/// Default episode length in timesteps.
pub const DEFAULT_HORIZON: u32 = 500;

/// Points for delivering the dish at the head of the order list.
pub const IN_ORDER_REWARD: u32 = 100;
/// Points for delivering the second order out of turn.
pub const OUT_OF_ORDER_REWARD: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LowLevelAction {
    North,
    South,
    East,
    West,
    Stay,
    Interact,
}

impl LowLevelAction {
    pub fn move_direction(&self) -> Option<Direction> {
        match self {
            LowLevelAction::North => Some(Direction::North),
            LowLevelAction::South => Some(Direction::South),
            LowLevelAction::East => Some(Direction::East),
            LowLevelAction::West => Some(Direction::West),
            LowLevelAction::Stay | LowLevelAction::Interact => None,
        }
    }

    pub fn from_direction(dir: Direction) -> LowLevelAction {
        match dir {
            Direction::North => LowLevelAction::North,
            Direction::South => LowLevelAction::South,
            Direction::East => LowLevelAction::East,
            Direction::West => LowLevelAction::West,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub pos: Cell,
    pub orientation: Direction,
    pub held: Option<Item>,
}

/// Contents of one appliance tile. Each appliance holds at most one item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ApplianceState {
    Grill { item: Item, cook_timer: u16 },
    Sink { item: Item, rinses: u8 },
    Board { item: Item, chops: u8 },
}

/// The rolling order list; always exactly two visible orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderList(pub [DishKind; 2]);

impl OrderList {
    pub fn initial() -> OrderList {
        OrderList([DishKind::Steak, DishKind::SteakOnion])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorldState {
    pub agents: [AgentState; 2],
    /// Occupied appliance tiles only; an absent key means the appliance is empty.
    pub appliances: BTreeMap<(u16, u16), ApplianceState>,
    /// Occupied counter tiles only.
    pub counters: BTreeMap<(u16, u16), Item>,
    pub orders: OrderList,
    pub timestep: u32,
    pub horizon: u32,
    next_item_id: u32,
    next_dish_id: u32,
    rng: ChaCha8Rng,
}

fn key(c: Cell) -> (u16, u16) {
    (c.y, c.x)
}

impl WorldState {
    pub fn appliance(&self, c: Cell) -> Option<&ApplianceState> {
        self.appliances.get(&key(c))
    }

    pub fn counter_item(&self, c: Cell) -> Option<&Item> {
        self.counters.get(&key(c))
    }

    pub fn agent_at(&self, c: Cell) -> Option<usize> {
        self.agents.iter().position(|a| a.pos == c)
    }

    /// Total items held, on counters, and in appliances (dishes count as one).
    pub fn item_count(&self) -> usize {
        self.agents.iter().filter(|a| a.held.is_some()).count()
            + self.counters.len()
            + self.appliances.len()
    }

    /// Place an appliance state directly; test and scenario setup.
    pub fn put_appliance(&mut self, c: Cell, a: ApplianceState) {
        self.appliances.insert(key(c), a);
    }

    /// Place an item on a counter directly; test and scenario setup.
    pub fn put_counter_item(&mut self, c: Cell, item: Item) {
        self.counters.insert(key(c), item);
    }

    fn fresh_item(&mut self, kind: ItemKind) -> Item {
        let id = self.next_item_id;
        self.next_item_id += 1;
        Item::new(kind, id)
    }

    fn fresh_dish_id(&mut self) -> u32 {
        let id = self.next_dish_id;
        self.next_dish_id += 1;
        id
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("episode over: timestep {0} has reached the horizon")]
    EpisodeOver(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub reward: u32,
    pub events: Vec<Event>,
}

/// Fresh episode state: agents at their spawns with empty hands, all
/// appliances and counters empty, the fixed initial orders, timestep 0.
pub fn init_state(layout: &Layout, seed: u64) -> WorldState {
    WorldState {
        agents: [
            AgentState {
                pos: layout.spawns[0],
                orientation: Direction::South,
                held: None,
            },
            AgentState {
                pos: layout.spawns[1],
                orientation: Direction::South,
                held: None,
            },
        ],
        appliances: BTreeMap::new(),
        counters: BTreeMap::new(),
        orders: OrderList::initial(),
        timestep: 0,
        horizon: DEFAULT_HORIZON,
        next_item_id: 0,
        next_dish_id: 0,
        rng: ChaCha8Rng::seed_from_u64(seed),
    }
}

/// Advance the world by one timestep.
///
/// Grill timers tick first (so meat placed during this step starts at zero
/// and becomes cooked exactly `GRILL_COOK_TICKS` steps later), then
/// simultaneous movement is resolved, then interacts apply in agent order.
pub fn step(
    layout: &Layout,
    state: &mut WorldState,
    actions: [LowLevelAction; 2],
) -> Result<StepOutcome, SimError> {
    if state.timestep >= state.horizon {
        return Err(SimError::EpisodeOver(state.timestep));
    }
    let t = state.timestep;
    let mut events = Vec::new();

    for appliance in state.appliances.values_mut() {
        if let ApplianceState::Grill { item, cook_timer } = appliance {
            if item.kind == ItemKind::RawMeat {
                *cook_timer += 1;
                if *cook_timer >= GRILL_COOK_TICKS {
                    *item = item.transformed(ItemKind::CookedMeat);
                }
            }
        }
    }

    let moves = resolve_movement(layout, &state.agents, actions);
    for (i, agent) in state.agents.iter_mut().enumerate() {
        let from = agent.pos;
        agent.orientation = moves.orientations[i];
        agent.pos = moves.positions[i];
        if moves.moved[i] {
            events.push(Event {
                t,
                agent: i,
                kind: EventKind::Move { from, to: agent.pos },
            });
        } else if moves.collided[i] {
            events.push(Event {
                t,
                agent: i,
                kind: EventKind::Collide { at: from },
            });
        }
    }

    let mut reward = 0;
    for i in 0..2 {
        if actions[i] == LowLevelAction::Interact {
            if let Some(event) = apply_interact(layout, state, i, t) {
                if let EventKind::Deliver { reward: r, .. } = &event.kind {
                    reward += *r;
                }
                events.push(event);
            }
        }
    }

    state.timestep += 1;
    Ok(StepOutcome { reward, events })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MovementOutcome {
    pub positions: [Cell; 2],
    pub orientations: [Direction; 2],
    /// True if the agent changed cells this step.
    pub moved: [bool; 2],
    /// True if the agent attempted a passable move blocked by the other
    /// agent or a simultaneous-move conflict (walls never count).
    pub collided: [bool; 2],
}

/// Resolve simultaneous movement. A move into a passable, unoccupied cell
/// succeeds; both agents targeting the same cell stay put, position swaps
/// are forbidden, and an agent may enter a cell the other vacates this
/// step. Orientation always follows the attempted move direction.
pub fn resolve_movement(
    layout: &Layout,
    agents: &[AgentState; 2],
    actions: [LowLevelAction; 2],
) -> MovementOutcome {
    let p = [agents[0].pos, agents[1].pos];
    let mut orientations = [agents[0].orientation, agents[1].orientation];
    let mut targets: [Option<Cell>; 2] = [None, None];
    for i in 0..2 {
        if let Some(dir) = actions[i].move_direction() {
            orientations[i] = dir;
            targets[i] = p[i].step(dir).filter(|c| layout.is_floor(*c));
        }
    }

    let mut positions = p;
    let mut collided = [false, false];
    let same_target = targets[0].is_some() && targets[0] == targets[1];
    let swap = targets[0] == Some(p[1]) && targets[1] == Some(p[0]);
    if same_target || swap {
        collided = [targets[0].is_some(), targets[1].is_some()];
    } else {
        let other = [1, 0];
        for i in 0..2 {
            if let Some(tgt) = targets[i] {
                // Entering the other agent's cell requires that the other
                // agent is itself moving out this step.
                if tgt != p[other[i]] || targets[other[i]].is_some() {
                    positions[i] = tgt;
                } else {
                    collided[i] = true;
                }
            }
        }
    }

    MovementOutcome {
        positions,
        orientations,
        moved: [positions[0] != p[0], positions[1] != p[1]],
        collided,
    }
}

/// Apply one agent's interact against the tile it faces. Exactly one
/// transition fires, keyed on (tile kind, held item, station contents);
/// anything else is a silent no-op.
pub fn apply_interact(
    layout: &Layout,
    state: &mut WorldState,
    agent: usize,
    t: u32,
) -> Option<Event> {
    let pos = state.agents[agent].pos;
    let faced = pos.step(state.agents[agent].orientation)?;
    if !layout.in_bounds(faced) {
        return None;
    }
    let tile = layout.tile(faced);
    let held = state.agents[agent].held.clone();
    let k = key(faced);

    let kind = match tile {
        TileKind::MeatDispenser | TileKind::OnionDispenser | TileKind::DirtyPlateDispenser => {
            if held.is_some() {
                return None;
            }
            let (item_kind, source) = match tile {
                TileKind::MeatDispenser => {
                    (ItemKind::RawMeat, PickupSource::MeatDispenser { cell: faced })
                }
                TileKind::OnionDispenser => {
                    (ItemKind::RawOnion, PickupSource::OnionDispenser { cell: faced })
                }
                _ => (
                    ItemKind::DirtyPlate,
                    PickupSource::DirtyPlateDispenser { cell: faced },
                ),
            };
            let item = state.fresh_item(item_kind);
            state.agents[agent].held = Some(item.clone());
            EventKind::Pickup { item, from: source }
        }
        TileKind::GeneralCounter | TileKind::SharedCounter => {
            let shared = tile == TileKind::SharedCounter;
            match (held, state.counters.contains_key(&k)) {
                (None, true) => {
                    let item = state.counters.remove(&k).unwrap();
                    state.agents[agent].held = Some(item.clone());
                    EventKind::Pickup {
                        item,
                        from: PickupSource::Counter { cell: faced, shared },
                    }
                }
                (Some(item), false) => {
                    state.agents[agent].held = None;
                    state.counters.insert(k, item.clone());
                    EventKind::Place {
                        item,
                        onto: PlaceTarget::Counter { cell: faced, shared },
                    }
                }
                _ => return None,
            }
        }
        TileKind::Grill => match (held, state.appliances.get(&k)) {
            (Some(item), None) if item.kind == ItemKind::RawMeat => {
                state.agents[agent].held = None;
                state.appliances.insert(
                    k,
                    ApplianceState::Grill {
                        item: item.clone(),
                        cook_timer: 0,
                    },
                );
                EventKind::Place {
                    item,
                    onto: PlaceTarget::Grill { cell: faced },
                }
            }
            (Some(plate), Some(ApplianceState::Grill { item, .. }))
                if plate.kind == ItemKind::CleanPlate && item.kind == ItemKind::CookedMeat =>
            {
                let dish = Item::merged(ItemKind::SteakDish, &plate, item);
                state.appliances.remove(&k);
                state.agents[agent].held = Some(dish.clone());
                EventKind::PlateSteak { grill: faced, dish }
            }
            _ => return None,
        },
        TileKind::Sink => match (held, state.appliances.get_mut(&k)) {
            (Some(plate), None) if plate.kind == ItemKind::DirtyPlate => {
                state.agents[agent].held = None;
                state.appliances.insert(
                    k,
                    ApplianceState::Sink {
                        item: plate.clone(),
                        rinses: 0,
                    },
                );
                EventKind::Place {
                    item: plate,
                    onto: PlaceTarget::Sink { cell: faced },
                }
            }
            (None, Some(ApplianceState::Sink { item, rinses })) => {
                if *rinses < REQUIRED_RINSES {
                    *rinses += 1;
                    if *rinses == REQUIRED_RINSES {
                        *item = item.transformed(ItemKind::CleanPlate);
                    }
                    let (rinses, item) = (*rinses, item.clone());
                    EventKind::Rinse { sink: faced, rinses, item }
                } else {
                    let Some(ApplianceState::Sink { item, .. }) = state.appliances.remove(&k)
                    else {
                        unreachable!()
                    };
                    state.agents[agent].held = Some(item.clone());
                    EventKind::Pickup {
                        item,
                        from: PickupSource::Sink { cell: faced },
                    }
                }
            }
            _ => return None,
        },
        TileKind::ChoppingBoard => match (held, state.appliances.get_mut(&k)) {
            (Some(onion), None) if onion.kind == ItemKind::RawOnion => {
                state.agents[agent].held = None;
                state.appliances.insert(
                    k,
                    ApplianceState::Board {
                        item: onion.clone(),
                        chops: 0,
                    },
                );
                EventKind::Place {
                    item: onion,
                    onto: PlaceTarget::Board { cell: faced },
                }
            }
            (None, Some(ApplianceState::Board { item, chops })) if *chops < REQUIRED_CHOPS => {
                *chops += 1;
                let completed = *chops == REQUIRED_CHOPS;
                if completed {
                    *item = item.transformed(ItemKind::ChoppedOnion);
                }
                let (chops, item) = (*chops, item.clone());
                EventKind::Chop {
                    board: faced,
                    chops,
                    completed,
                    item,
                }
            }
            (Some(dish), Some(ApplianceState::Board { item, .. }))
                if dish.kind == ItemKind::SteakDish && item.kind == ItemKind::ChoppedOnion =>
            {
                let garnished = Item::merged(ItemKind::SteakOnionDish, &dish, item);
                state.appliances.remove(&k);
                state.agents[agent].held = Some(garnished.clone());
                EventKind::Garnish {
                    board: faced,
                    dish: garnished,
                }
            }
            _ => return None,
        },
        TileKind::Delivery => {
            let dish_kind = held.as_ref().and_then(|i| DishKind::from_item(i.kind))?;
            let dish = state.agents[agent].held.take().unwrap();
            let mut orders = state.orders;
            let reward = score_delivery(&mut orders, dish_kind, &mut state.rng);
            state.orders = orders;
            EventKind::Deliver {
                dish: dish_kind,
                reward,
                dish_id: state.fresh_dish_id(),
                lineage: dish.lineage,
            }
        }
        TileKind::Floor => return None,
    };

    Some(Event { t, agent, kind })
}

/// Score a delivered dish against the order list. The dish is always
/// consumed: head of the list pays 100, the second order pays 20, and a
/// dish matching neither pays 0 and leaves the orders untouched. Every
/// fulfilled order is replaced by a uniform draw over the two recipes.
pub fn score_delivery(orders: &mut OrderList, dish: DishKind, rng: &mut impl Rng) -> u32 {
    let draw = |rng: &mut dyn rand::RngCore| DishKind::ALL[rng.gen_range(0..2usize)];
    if orders.0[0] == dish {
        orders.0 = [orders.0[1], draw(rng)];
        IN_ORDER_REWARD
    } else if orders.0[1] == dish {
        orders.0 = [orders.0[0], draw(rng)];
        OUT_OF_ORDER_REWARD
    } else {
        0
    }
}
