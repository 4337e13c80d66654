//! High-level action vocabulary shared by the planner and the agent harness.
//!
//! Each action is one of 17 templates, optionally bound to a concrete item
//! kind and station cell. Rendering produces the exact menu strings shown
//! to the agents.

use serde::{Deserialize, Serialize};

use crate::item::ItemKind;
use crate::layout::{Cell, Layout, TileKind};

/// Menu category for a high-level action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ActionCategory {
    Counter,
    Plate,
    Onion,
    Meat,
    Miscellaneous,
}

impl ActionCategory {
    pub const ALL: [ActionCategory; 5] = [
        ActionCategory::Counter,
        ActionCategory::Plate,
        ActionCategory::Onion,
        ActionCategory::Meat,
        ActionCategory::Miscellaneous,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HlaTemplate {
    PickUpFromCounter,
    PlaceOnNearestCounter,
    PlaceOnSharedCounter,
    PickUpDirtyPlate,
    PlaceDirtyPlateInSink,
    RinseDirtyPlate,
    PickUpCleanPlate,
    PlateSteakFromGrill,
    PickUpOnion,
    PlaceOnionOnBoard,
    ChopOnion,
    AddGarnish,
    PickUpMeat,
    PlaceMeatOnGrill,
    DeliverSteak,
    DeliverSteakOnion,
    Wait,
}

impl HlaTemplate {
    pub fn category(&self) -> ActionCategory {
        use HlaTemplate::*;
        match self {
            PickUpFromCounter | PlaceOnNearestCounter | PlaceOnSharedCounter => {
                ActionCategory::Counter
            }
            PickUpDirtyPlate | PlaceDirtyPlateInSink | RinseDirtyPlate | PickUpCleanPlate
            | PlateSteakFromGrill => ActionCategory::Plate,
            PickUpOnion | PlaceOnionOnBoard | ChopOnion | AddGarnish => ActionCategory::Onion,
            PickUpMeat | PlaceMeatOnGrill | DeliverSteak | DeliverSteakOnion => {
                ActionCategory::Meat
            }
            Wait => ActionCategory::Miscellaneous,
        }
    }
}

/// A fully bound high-level action. `station` is the specific appliance,
/// counter, or delivery tile the action refers to; it is `None` for
/// dispenser pickups, "nearest general counter" placement, and waiting,
/// where the planner chooses the nearest qualifying tile.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HighLevelAction {
    pub template: HlaTemplate,
    pub item: Option<ItemKind>,
    pub station: Option<Cell>,
}

impl HighLevelAction {
    pub fn new(template: HlaTemplate) -> Self {
        HighLevelAction {
            template,
            item: None,
            station: None,
        }
    }

    pub fn with_item(mut self, item: ItemKind) -> Self {
        self.item = Some(item);
        self
    }

    pub fn with_station(mut self, station: Cell) -> Self {
        self.station = Some(station);
        self
    }

    pub fn wait() -> Self {
        HighLevelAction::new(HlaTemplate::Wait)
    }

    pub fn category(&self) -> ActionCategory {
        self.template.category()
    }

    /// Number of timesteps a Wait action spans.
    pub const WAIT_TICKS: u32 = 5;

    /// Render the menu string for this action. Station references name the
    /// station kind, qualified by its cell when the layout has more than one
    /// tile of that kind.
    pub fn render(&self, layout: &Layout) -> String {
        use HlaTemplate::*;
        let item = |k: Option<ItemKind>| k.map(|k| k.display_name().to_string()).unwrap_or_default();
        match self.template {
            PickUpFromCounter => format!(
                "Pick up {} from {}",
                article(item(self.item)),
                station_ref(layout, self.station)
            ),
            PlaceOnNearestCounter => format!(
                "Place {} on nearest general counter",
                article(item(self.item))
            ),
            PlaceOnSharedCounter => format!(
                "Place {} on {}",
                article(item(self.item)),
                station_ref(layout, self.station)
            ),
            PickUpDirtyPlate => "Pick up a dirty plate from the dirty plate dispenser".to_string(),
            PlaceDirtyPlateInSink => format!(
                "Place dirty plate in hand in {}",
                station_ref(layout, self.station)
            ),
            RinseDirtyPlate => format!(
                "Do one rinse of the dirty plate in {}",
                station_ref(layout, self.station)
            ),
            PickUpCleanPlate => format!(
                "Pick up the clean plate from {}",
                station_ref(layout, self.station)
            ),
            PlateSteakFromGrill => format!(
                "Use clean plate in hand to pick up steak from {}",
                station_ref(layout, self.station)
            ),
            PickUpOnion => "Pick up an onion from the onion dispenser".to_string(),
            PlaceOnionOnBoard => format!(
                "Put raw onion in hand on {}",
                station_ref(layout, self.station)
            ),
            ChopOnion => format!(
                "Do one chop of the onion on {}",
                station_ref(layout, self.station)
            ),
            AddGarnish => format!(
                "Add garnish from {} to the steak dish in hand",
                station_ref(layout, self.station)
            ),
            PickUpMeat => "Pick up a meat from the meat dispenser".to_string(),
            PlaceMeatOnGrill => format!(
                "Put raw meat in hand on {} to cook",
                station_ref(layout, self.station)
            ),
            DeliverSteak => format!(
                "Deliver the steak dish in hand to {}",
                station_ref(layout, self.station)
            ),
            DeliverSteakOnion => format!(
                "Deliver the steak onion dish in hand to {}",
                station_ref(layout, self.station)
            ),
            Wait => format!("Wait for {} timesteps", Self::WAIT_TICKS),
        }
    }
}

fn article(noun: String) -> String {
    if noun.is_empty() {
        return noun;
    }
    match noun.chars().next().unwrap() {
        'a' | 'e' | 'i' | 'o' | 'u' => format!("an {}", noun),
        _ => format!("a {}", noun),
    }
}

/// "the sink" when unique, "the sink at (x, y)" otherwise; counters are
/// always qualified by their cell.
fn station_ref(layout: &Layout, station: Option<Cell>) -> String {
    let Some(cell) = station else {
        return "the station".to_string();
    };
    let kind = layout.tile(cell);
    if kind.is_counter() {
        return format!("the {} at {}", kind.station_name(), cell);
    }
    if layout.cells_of_kind(kind).len() == 1 {
        format!("the {}", kind.station_name())
    } else {
        format!("the {} at {}", kind.station_name(), cell)
    }
}

/// The station tile kind a template operates on, when fixed by the template.
pub fn template_station_kind(template: HlaTemplate) -> Option<TileKind> {
    use HlaTemplate::*;
    match template {
        PickUpDirtyPlate => Some(TileKind::DirtyPlateDispenser),
        PickUpOnion => Some(TileKind::OnionDispenser),
        PickUpMeat => Some(TileKind::MeatDispenser),
        PlaceDirtyPlateInSink | RinseDirtyPlate | PickUpCleanPlate => Some(TileKind::Sink),
        PlaceOnionOnBoard | ChopOnion | AddGarnish => Some(TileKind::ChoppingBoard),
        PlaceMeatOnGrill | PlateSteakFromGrill => Some(TileKind::Grill),
        DeliverSteak | DeliverSteakOnion => Some(TileKind::Delivery),
        PlaceOnNearestCounter => Some(TileKind::GeneralCounter),
        PlaceOnSharedCounter => Some(TileKind::SharedCounter),
        PickUpFromCounter | Wait => None,
    }
}
