//! Deterministic two-agent Steakhouse kitchen simulation.
//!
//! The kitchen is a rectangular grid of tiles. Two agents move over floor
//! tiles, pick items from dispensers, process them on appliances (grill,
//! sink, chopping board), assemble dishes, and deliver them for points.
//! Every transition is a pure function of the previous state and the pair
//! of low-level actions, with all randomness drawn from a seedable
//! generator stored in the world state.

pub mod event;
pub mod hla;
pub mod item;
pub mod layout;
pub mod seed;
pub mod subtask;
pub mod world;

pub use event::{Event, EventKind, PlaceTarget, PickupSource};
pub use subtask::{event_subtask, Subtask};
pub use hla::{ActionCategory, HighLevelAction, HlaTemplate};
pub use item::{DishKind, Item, ItemKind};
pub use layout::{Cell, Direction, Layout, LayoutError, TileKind};
pub use world::{
    init_state, resolve_movement, score_delivery, step, AgentState, ApplianceState, LowLevelAction,
    OrderList, SimError, StepOutcome, WorldState, DEFAULT_HORIZON, GRILL_COOK_TICKS,
    REQUIRED_CHOPS, REQUIRED_RINSES,
};
