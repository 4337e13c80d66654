//! The nine tracked kitchen sub-tasks. Workload measures count, per player,
//! how often each sub-task happened; mutation directions are phrased in
//! terms of increasing or decreasing them.

use serde::{Deserialize, Serialize};

use crate::event::{EventKind, PlaceTarget};
use crate::item::ItemKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subtask {
    OnionsPicked,
    OnionsPlacedOnBoard,
    OnionsChopped,
    MeatPicked,
    MeatPlacedOnGrill,
    DirtyPlatesPicked,
    CleanPlatesPicked,
    PlatesPlacedInSink,
    DishesServed,
}

impl Subtask {
    /// Fixed order used everywhere workload counts are reported.
    pub const ALL: [Subtask; 9] = [
        Subtask::OnionsPicked,
        Subtask::OnionsPlacedOnBoard,
        Subtask::OnionsChopped,
        Subtask::MeatPicked,
        Subtask::MeatPlacedOnGrill,
        Subtask::DirtyPlatesPicked,
        Subtask::CleanPlatesPicked,
        Subtask::PlatesPlacedInSink,
        Subtask::DishesServed,
    ];

    pub fn index(&self) -> usize {
        Subtask::ALL.iter().position(|s| s == self).unwrap()
    }

    /// Stable snake_case key, used in measure ids and file columns.
    pub fn key(&self) -> &'static str {
        match self {
            Subtask::OnionsPicked => "onions_picked",
            Subtask::OnionsPlacedOnBoard => "onions_placed_on_board",
            Subtask::OnionsChopped => "onions_chopped",
            Subtask::MeatPicked => "meat_picked",
            Subtask::MeatPlacedOnGrill => "meat_placed_on_grill",
            Subtask::DirtyPlatesPicked => "dirty_plates_picked",
            Subtask::CleanPlatesPicked => "clean_plates_picked",
            Subtask::PlatesPlacedInSink => "plates_placed_in_sink",
            Subtask::DishesServed => "dishes_served",
        }
    }

    /// Phrase used in mutation directions, e.g. "increase number of meat
    /// put on grill".
    pub fn phrase(&self) -> &'static str {
        match self {
            Subtask::OnionsPicked => "number of onions picked",
            Subtask::OnionsPlacedOnBoard => "number of onions placed on the board",
            Subtask::OnionsChopped => "number of onions chopped",
            Subtask::MeatPicked => "number of meat picked",
            Subtask::MeatPlacedOnGrill => "number of meat put on grill",
            Subtask::DirtyPlatesPicked => "number of dirty plates picked",
            Subtask::CleanPlatesPicked => "number of clean plates picked",
            Subtask::PlatesPlacedInSink => "number of plates placed in the sink",
            Subtask::DishesServed => "number of dishes served",
        }
    }
}

/// The sub-task an event counts toward, if any. Pickups count regardless of
/// source (dispenser or counter); chopping counts on the completing chop.
pub fn event_subtask(kind: &EventKind) -> Option<Subtask> {
    match kind {
        EventKind::Pickup { item, .. } => match item.kind {
            ItemKind::RawOnion => Some(Subtask::OnionsPicked),
            ItemKind::RawMeat => Some(Subtask::MeatPicked),
            ItemKind::DirtyPlate => Some(Subtask::DirtyPlatesPicked),
            ItemKind::CleanPlate => Some(Subtask::CleanPlatesPicked),
            _ => None,
        },
        EventKind::Place { item, onto } => match (item.kind, onto) {
            (ItemKind::RawOnion, PlaceTarget::Board { .. }) => Some(Subtask::OnionsPlacedOnBoard),
            (ItemKind::RawMeat, PlaceTarget::Grill { .. }) => Some(Subtask::MeatPlacedOnGrill),
            (ItemKind::DirtyPlate, PlaceTarget::Sink { .. }) => Some(Subtask::PlatesPlacedInSink),
            _ => None,
        },
        EventKind::Chop { completed: true, .. } => Some(Subtask::OnionsChopped),
        EventKind::Deliver { .. } => Some(Subtask::DishesServed),
        _ => None,
    }
}
