//! Filters the high-level action menu to what is possible in the current
//! state. Preconditions cover hand contents and station contents only;
//! spatial reachability is the planner's concern. "Wait for 5 timesteps"
//! is always offered.

use steakhouse_sim::{
    ApplianceState, HighLevelAction, HlaTemplate, ItemKind, Layout, TileKind, WorldState,
    REQUIRED_CHOPS, REQUIRED_RINSES,
};

pub fn available_actions(layout: &Layout, state: &WorldState, agent: usize) -> Vec<HighLevelAction> {
    let held = state.agents[agent].held.as_ref().map(|i| i.kind);
    let mut out = Vec::new();

    // Counter actions.
    if held.is_none() {
        for cell in all_counters(layout) {
            if let Some(item) = state.counter_item(cell) {
                out.push(
                    HighLevelAction::new(HlaTemplate::PickUpFromCounter)
                        .with_item(item.kind)
                        .with_station(cell),
                );
            }
        }
    }
    if let Some(kind) = held {
        let any_empty_general = layout
            .cells_of_kind(TileKind::GeneralCounter)
            .into_iter()
            .any(|c| state.counter_item(c).is_none());
        if any_empty_general {
            out.push(HighLevelAction::new(HlaTemplate::PlaceOnNearestCounter).with_item(kind));
        }
        for cell in layout.cells_of_kind(TileKind::SharedCounter) {
            if state.counter_item(cell).is_none() {
                out.push(
                    HighLevelAction::new(HlaTemplate::PlaceOnSharedCounter)
                        .with_item(kind)
                        .with_station(cell),
                );
            }
        }
    }

    // Plate actions.
    if held.is_none() {
        out.push(HighLevelAction::new(HlaTemplate::PickUpDirtyPlate));
    }
    for cell in layout.cells_of_kind(TileKind::Sink) {
        match (held, state.appliance(cell)) {
            (Some(ItemKind::DirtyPlate), None) => out.push(
                HighLevelAction::new(HlaTemplate::PlaceDirtyPlateInSink).with_station(cell),
            ),
            (None, Some(ApplianceState::Sink { rinses, .. })) => {
                if *rinses < REQUIRED_RINSES {
                    out.push(HighLevelAction::new(HlaTemplate::RinseDirtyPlate).with_station(cell));
                } else {
                    out.push(HighLevelAction::new(HlaTemplate::PickUpCleanPlate).with_station(cell));
                }
            }
            _ => {}
        }
    }
    if held == Some(ItemKind::CleanPlate) {
        for cell in layout.cells_of_kind(TileKind::Grill) {
            if let Some(ApplianceState::Grill { item, .. }) = state.appliance(cell) {
                if item.kind == ItemKind::CookedMeat {
                    out.push(
                        HighLevelAction::new(HlaTemplate::PlateSteakFromGrill).with_station(cell),
                    );
                }
            }
        }
    }

    // Onion actions.
    if held.is_none() {
        out.push(HighLevelAction::new(HlaTemplate::PickUpOnion));
    }
    for cell in layout.cells_of_kind(TileKind::ChoppingBoard) {
        match (held, state.appliance(cell)) {
            (Some(ItemKind::RawOnion), None) => {
                out.push(HighLevelAction::new(HlaTemplate::PlaceOnionOnBoard).with_station(cell))
            }
            (None, Some(ApplianceState::Board { chops, .. })) if *chops < REQUIRED_CHOPS => {
                out.push(HighLevelAction::new(HlaTemplate::ChopOnion).with_station(cell))
            }
            (Some(ItemKind::SteakDish), Some(ApplianceState::Board { item, .. }))
                if item.kind == ItemKind::ChoppedOnion =>
            {
                out.push(HighLevelAction::new(HlaTemplate::AddGarnish).with_station(cell))
            }
            _ => {}
        }
    }

    // Meat actions.
    if held.is_none() {
        out.push(HighLevelAction::new(HlaTemplate::PickUpMeat));
    }
    if held == Some(ItemKind::RawMeat) {
        for cell in layout.cells_of_kind(TileKind::Grill) {
            if state.appliance(cell).is_none() {
                out.push(HighLevelAction::new(HlaTemplate::PlaceMeatOnGrill).with_station(cell));
            }
        }
    }
    if held == Some(ItemKind::SteakDish) {
        for cell in layout.cells_of_kind(TileKind::Delivery) {
            out.push(HighLevelAction::new(HlaTemplate::DeliverSteak).with_station(cell));
        }
    }
    if held == Some(ItemKind::SteakOnionDish) {
        for cell in layout.cells_of_kind(TileKind::Delivery) {
            out.push(HighLevelAction::new(HlaTemplate::DeliverSteakOnion).with_station(cell));
        }
    }

    out.push(HighLevelAction::wait());
    out
}

/// Whether a previously chosen action instance is still available.
pub fn is_action_available(
    layout: &Layout,
    state: &WorldState,
    agent: usize,
    hla: &HighLevelAction,
) -> bool {
    hla.template == HlaTemplate::Wait || available_actions(layout, state, agent).contains(hla)
}

fn all_counters(layout: &Layout) -> Vec<steakhouse_sim::Cell> {
    let mut cells = layout.cells_of_kind(TileKind::GeneralCounter);
    cells.extend(layout.cells_of_kind(TileKind::SharedCounter));
    cells.sort_by_key(|c| c.row_major());
    cells
}
