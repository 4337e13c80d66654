use serde::{Deserialize, Serialize};

use crate::item::{DishKind, Item};
use crate::layout::Cell;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PickupSource {
    MeatDispenser { cell: Cell },
    OnionDispenser { cell: Cell },
    DirtyPlateDispenser { cell: Cell },
    Counter { cell: Cell, shared: bool },
    Sink { cell: Cell },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlaceTarget {
    Counter { cell: Cell, shared: bool },
    Grill { cell: Cell },
    Sink { cell: Cell },
    Board { cell: Cell },
}

/// What happened in one timestep, attributed to one agent. Every interact
/// that changes state emits exactly one event; movement emits `Move`, and
/// blocked simultaneous moves emit `Collide`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: u32,
    pub agent: usize,
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EventKind {
    Pickup {
        item: Item,
        from: PickupSource,
    },
    Place {
        item: Item,
        onto: PlaceTarget,
    },
    Rinse {
        sink: Cell,
        /// Rinses done after this interact (1..=3).
        rinses: u8,
        /// The plate being rinsed, after any transformation.
        item: Item,
    },
    Chop {
        board: Cell,
        /// Chops done after this interact (1..=2).
        chops: u8,
        /// True on the chop that turns the onion into a chopped onion.
        completed: bool,
        /// The onion being chopped, after any transformation.
        item: Item,
    },
    /// Clean plate in hand combined with the cooked meat on the grill.
    PlateSteak {
        grill: Cell,
        dish: Item,
    },
    /// Chopped onion from the board added to the steak dish in hand.
    Garnish {
        board: Cell,
        dish: Item,
    },
    Deliver {
        dish: DishKind,
        reward: u32,
        /// Unique id of this delivered dish instance.
        dish_id: u32,
        lineage: Vec<u32>,
    },
    Move {
        from: Cell,
        to: Cell,
    },
    /// A movement that was attempted but blocked by the other agent or a
    /// simultaneous-move conflict.
    Collide {
        at: Cell,
    },
}

impl EventKind {
    /// Interact events are everything except movement bookkeeping; these are
    /// the "non-movement actions" counted by the delay measure.
    pub fn is_interact(&self) -> bool {
        !matches!(self, EventKind::Move { .. } | EventKind::Collide { .. })
    }
}
