use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ItemKind {
    RawMeat,
    CookedMeat,
    RawOnion,
    ChoppedOnion,
    DirtyPlate,
    CleanPlate,
    SteakDish,
    SteakOnionDish,
}

impl ItemKind {
    pub fn display_name(&self) -> &'static str {
        match self {
            ItemKind::RawMeat => "raw meat",
            ItemKind::CookedMeat => "cooked meat",
            ItemKind::RawOnion => "raw onion",
            ItemKind::ChoppedOnion => "chopped onion",
            ItemKind::DirtyPlate => "dirty plate",
            ItemKind::CleanPlate => "clean plate",
            ItemKind::SteakDish => "steak dish",
            ItemKind::SteakOnionDish => "steak onion dish",
        }
    }

    pub fn is_dish(&self) -> bool {
        matches!(self, ItemKind::SteakDish | ItemKind::SteakOnionDish)
    }
}

/// The two deliverable recipes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DishKind {
    Steak,
    SteakOnion,
}

impl DishKind {
    pub const ALL: [DishKind; 2] = [DishKind::Steak, DishKind::SteakOnion];

    pub fn display_name(&self) -> &'static str {
        match self {
            DishKind::Steak => "steak dish",
            DishKind::SteakOnion => "steak onion dish",
        }
    }

    pub fn item_kind(&self) -> ItemKind {
        match self {
            DishKind::Steak => ItemKind::SteakDish,
            DishKind::SteakOnion => ItemKind::SteakOnionDish,
        }
    }

    pub fn from_item(kind: ItemKind) -> Option<DishKind> {
        match kind {
            ItemKind::SteakDish => Some(DishKind::Steak),
            ItemKind::SteakOnionDish => Some(DishKind::SteakOnion),
            _ => None,
        }
    }
}

/// A concrete item instance. `lineage` is the sorted set of origin ids of
/// every dispenser-created item merged into this one; when a dish is
/// delivered, completed actions are attributed to it by intersecting
/// lineages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Item {
    pub kind: ItemKind,
    pub lineage: Vec<u32>,
}

impl Item {
    pub fn new(kind: ItemKind, origin: u32) -> Item {
        Item {
            kind,
            lineage: vec![origin],
        }
    }

    /// Transform in place (e.g. raw meat -> cooked meat), keeping lineage.
    pub fn transformed(&self, kind: ItemKind) -> Item {
        Item {
            kind,
            lineage: self.lineage.clone(),
        }
    }

    /// Merge two items into a new one (e.g. clean plate + cooked meat).
    pub fn merged(kind: ItemKind, a: &Item, b: &Item) -> Item {
        let mut lineage: Vec<u32> = a.lineage.iter().chain(b.lineage.iter()).copied().collect();
        lineage.sort_unstable();
        lineage.dedup();
        Item { kind, lineage }
    }
}
