use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One cell of the kitchen grid. `x` runs right, `y` runs down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub x: u16,
    pub y: u16,
}

impl Cell {
    pub fn new(x: u16, y: u16) -> Self {
        Cell { x, y }
    }

    /// Sort key for deterministic tie-breaking: row-major, top-left first.
    pub fn row_major(&self) -> (u16, u16) {
        (self.y, self.x)
    }

    pub fn step(&self, dir: Direction) -> Option<Cell> {
        let (dx, dy) = dir.delta();
        let x = self.x as i32 + dx;
        let y = self.y as i32 + dy;
        if x < 0 || y < 0 {
            None
        } else {
            Some(Cell::new(x as u16, y as u16))
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    North,
    South,
    East,
    West,
}

impl Direction {
    /// All directions in the fixed tie-break order used by the planner.
    pub const ALL: [Direction; 4] = [
        Direction::North,
        Direction::South,
        Direction::East,
        Direction::West,
    ];

    pub fn delta(&self) -> (i32, i32) {
        match self {
            Direction::North => (0, -1),
            Direction::South => (0, 1),
            Direction::East => (1, 0),
            Direction::West => (-1, 0),
        }
    }

    /// Direction pointing from `from` to an adjacent cell `to`.
    pub fn between(from: Cell, to: Cell) -> Option<Direction> {
        Direction::ALL
            .into_iter()
            .find(|d| from.step(*d) == Some(to))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TileKind {
    Floor,
    GeneralCounter,
    SharedCounter,
    MeatDispenser,
    OnionDispenser,
    DirtyPlateDispenser,
    Grill,
    Sink,
    ChoppingBoard,
    Delivery,
}

impl TileKind {
    /// Floor is the only passable tile kind.
    pub fn is_passable(&self) -> bool {
        matches!(self, TileKind::Floor)
    }

    pub fn is_counter(&self) -> bool {
        matches!(self, TileKind::GeneralCounter | TileKind::SharedCounter)
    }

    fn to_char(self) -> char {
        match self {
            TileKind::Floor => '.',
            TileKind::GeneralCounter => 'X',
            TileKind::SharedCounter => 'S',
            TileKind::MeatDispenser => 'M',
            TileKind::OnionDispenser => 'O',
            TileKind::DirtyPlateDispenser => 'P',
            TileKind::Grill => 'G',
            TileKind::Sink => 'W',
            TileKind::ChoppingBoard => 'B',
            TileKind::Delivery => 'T',
        }
    }

    /// Human-readable station name, used in prompts and action strings.
    pub fn station_name(&self) -> &'static str {
        match self {
            TileKind::Floor => "floor",
            TileKind::GeneralCounter => "counter",
            TileKind::SharedCounter => "shared counter",
            TileKind::MeatDispenser => "meat dispenser",
            TileKind::OnionDispenser => "onion dispenser",
            TileKind::DirtyPlateDispenser => "dirty plate dispenser",
            TileKind::Grill => "grill",
            TileKind::Sink => "sink",
            TileKind::ChoppingBoard => "chopping board",
            TileKind::Delivery => "delivery location",
        }
    }
}

const REQUIRED_STATIONS: [TileKind; 7] = [
    TileKind::MeatDispenser,
    TileKind::OnionDispenser,
    TileKind::DirtyPlateDispenser,
    TileKind::Grill,
    TileKind::Sink,
    TileKind::ChoppingBoard,
    TileKind::Delivery,
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LayoutError {
    #[error("malformed grid: {0}")]
    MalformedGrid(String),
    #[error("missing station: no {} tile", .0.station_name())]
    MissingStation(TileKind),
    #[error("bad spawn: {0}")]
    BadSpawn(String),
}

/// A static kitchen map: tile kinds plus the two agent spawn cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub name: String,
    pub width: u16,
    pub height: u16,
    tiles: Vec<TileKind>,
    pub spawns: [Cell; 2],
}

impl Layout {
    /// Build a layout from raw parts, checking shape and spawns but not
    /// station presence. Random planner-test grids go through here.
    pub fn from_tiles(
        name: &str,
        width: u16,
        height: u16,
        tiles: Vec<TileKind>,
        spawns: [Cell; 2],
    ) -> Result<Layout, LayoutError> {
        if width == 0 || height == 0 || tiles.len() != width as usize * height as usize {
            return Err(LayoutError::MalformedGrid(format!(
                "expected {}x{} = {} tiles, got {}",
                width,
                height,
                width as usize * height as usize,
                tiles.len()
            )));
        }
        let layout = Layout {
            name: name.to_string(),
            width,
            height,
            tiles,
            spawns,
        };
        for (i, s) in spawns.iter().enumerate() {
            if !layout.in_bounds(*s) || layout.tile(*s) != TileKind::Floor {
                return Err(LayoutError::BadSpawn(format!(
                    "spawn {} at {} is not a floor cell",
                    i + 1,
                    s
                )));
            }
        }
        if spawns[0] == spawns[1] {
            return Err(LayoutError::BadSpawn("spawns coincide".into()));
        }
        Ok(layout)
    }

    pub fn in_bounds(&self, c: Cell) -> bool {
        c.x < self.width && c.y < self.height
    }

    pub fn tile(&self, c: Cell) -> TileKind {
        self.tiles[c.y as usize * self.width as usize + c.x as usize]
    }

    pub fn is_floor(&self, c: Cell) -> bool {
        self.in_bounds(c) && self.tile(c).is_passable()
    }

    /// All cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.height).flat_map(move |y| (0..self.width).map(move |x| Cell::new(x, y)))
    }

    /// All cells of a given tile kind, in row-major order.
    pub fn cells_of_kind(&self, kind: TileKind) -> Vec<Cell> {
        self.cells().filter(|c| self.tile(*c) == kind).collect()
    }

    /// In-bounds 4-neighbors, in the fixed N,S,E,W order.
    pub fn neighbors(&self, c: Cell) -> impl Iterator<Item = Cell> + '_ {
        Direction::ALL
            .into_iter()
            .filter_map(move |d| c.step(d))
            .filter(|n| self.in_bounds(*n))
    }

    /// Floor cells adjacent to `station`, in row-major order.
    pub fn stand_cells(&self, station: Cell) -> Vec<Cell> {
        let mut cells: Vec<Cell> = self.neighbors(station).filter(|n| self.is_floor(*n)).collect();
        cells.sort_by_key(|c| c.row_major());
        cells
    }

    /// Checks the full layout contract: every required station present, and
    /// each spawn able to reach (over floor) a cell adjacent to a station.
    pub fn validate(&self) -> Result<(), LayoutError> {
        for kind in REQUIRED_STATIONS {
            if !self.cells().any(|c| self.tile(c) == kind) {
                return Err(LayoutError::MissingStation(kind));
            }
        }
        for (i, spawn) in self.spawns.iter().enumerate() {
            let mut seen = vec![false; self.tiles.len()];
            let mut queue = VecDeque::from([*spawn]);
            seen[spawn.y as usize * self.width as usize + spawn.x as usize] = true;
            let mut found = false;
            while let Some(c) = queue.pop_front() {
                if self.neighbors(c).any(|n| !self.tile(n).is_passable()) {
                    found = true;
                    break;
                }
                for n in self.neighbors(c) {
                    let idx = n.y as usize * self.width as usize + n.x as usize;
                    if self.is_floor(n) && !seen[idx] {
                        seen[idx] = true;
                        queue.push_back(n);
                    }
                }
            }
            if !found {
                return Err(LayoutError::BadSpawn(format!(
                    "spawn {} cannot reach any station",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// Render back to the ASCII format accepted by [`parse_layout`].
    pub fn to_ascii(&self) -> String {
        let mut out = String::with_capacity((self.width as usize + 1) * self.height as usize);
        for y in 0..self.height {
            for x in 0..self.width {
                let c = Cell::new(x, y);
                let ch = if c == self.spawns[0] {
                    '1'
                } else if c == self.spawns[1] {
                    '2'
                } else {
                    self.tile(c).to_char()
                };
                out.push(ch);
            }
            out.push('\n');
        }
        out
    }
}

/// Parse an ASCII layout. One character per cell:
/// `.` floor, `X` general counter, `S` shared counter, `M` meat dispenser,
/// `O` onion dispenser, `P` dirty plate dispenser, `G` grill, `W` sink,
/// `B` chopping board, `T` delivery, `1`/`2` agent spawns (on floor).
pub fn parse_layout(text: &str, name: &str) -> Result<Layout, LayoutError> {
    let lines: Vec<&str> = text
        .lines()
        .map(|l| l.trim_end_matches('\r'))
        .filter(|l| !l.trim().is_empty())
        .collect();
    if lines.is_empty() {
        return Err(LayoutError::MalformedGrid("empty layout".into()));
    }
    let width = lines[0].chars().count();
    let height = lines.len();
    if width > u16::MAX as usize || height > u16::MAX as usize {
        return Err(LayoutError::MalformedGrid("grid too large".into()));
    }
    let mut tiles = Vec::with_capacity(width * height);
    let mut spawn1 = None;
    let mut spawn2 = None;
    for (y, line) in lines.iter().enumerate() {
        if line.chars().count() != width {
            return Err(LayoutError::MalformedGrid(format!(
                "row {} has {} cells, expected {}",
                y,
                line.chars().count(),
                width
            )));
        }
        for (x, ch) in line.chars().enumerate() {
            let cell = Cell::new(x as u16, y as u16);
            let kind = match ch {
                '.' => TileKind::Floor,
                'X' => TileKind::GeneralCounter,
                'S' => TileKind::SharedCounter,
                'M' => TileKind::MeatDispenser,
                'O' => TileKind::OnionDispenser,
                'P' => TileKind::DirtyPlateDispenser,
                'G' => TileKind::Grill,
                'W' => TileKind::Sink,
                'B' => TileKind::ChoppingBoard,
                'T' => TileKind::Delivery,
                '1' => {
                    if spawn1.replace(cell).is_some() {
                        return Err(LayoutError::BadSpawn("duplicate spawn 1".into()));
                    }
                    TileKind::Floor
                }
                '2' => {
                    if spawn2.replace(cell).is_some() {
                        return Err(LayoutError::BadSpawn("duplicate spawn 2".into()));
                    }
                    TileKind::Floor
                }
                other => {
                    return Err(LayoutError::MalformedGrid(format!(
                        "unknown character {:?} at row {}, column {}",
                        other, y, x
                    )))
                }
            };
            tiles.push(kind);
        }
    }
    let (spawn1, spawn2) = match (spawn1, spawn2) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(LayoutError::BadSpawn("expected exactly 2 spawns".into())),
    };
    let layout = Layout::from_tiles(name, width as u16, height as u16, tiles, [spawn1, spawn2])?;
    layout.validate()?;
    Ok(layout)
}

/// The four kitchen layouts shipped with the repository, embedded so that
/// downstream crates and tests can load them without touching the filesystem.
pub mod builtin {
    use super::{parse_layout, Layout};

    pub const NAMES: [&str; 4] = ["open", "ring", "hallway", "forced"];

    fn load(text: &str, name: &str) -> Layout {
        parse_layout(text, name).expect("shipped layout must be valid")
    }

    pub fn open() -> Layout {
        load(include_str!("../../../layouts/open.layout"), "open")
    }

    pub fn ring() -> Layout {
        load(include_str!("../../../layouts/ring.layout"), "ring")
    }

    pub fn hallway() -> Layout {
        load(include_str!("../../../layouts/hallway.layout"), "hallway")
    }

    pub fn forced() -> Layout {
        load(include_str!("../../../layouts/forced.layout"), "forced")
    }

    pub fn by_name(name: &str) -> Option<Layout> {
        match name {
            "open" => Some(open()),
            "ring" => Some(ring()),
            "hallway" => Some(hallway()),
            "forced" => Some(forced()),
            _ => None,
        }
    }

    pub fn all() -> Vec<Layout> {
        vec![open(), ring(), hallway(), forced()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_floor_cell_cannot_hold_two_spawns() {
        let text = "XXX\nX1X\nXXX";
        assert!(matches!(
            parse_layout(text, "tiny"),
            Err(LayoutError::BadSpawn(_))
        ));
    }

    #[test]
    fn missing_sink_is_reported() {
        let text = "XMXGXTX\nX1...2X\nXOXBXPX";
        assert_eq!(
            parse_layout(text, "nosink"),
            Err(LayoutError::MissingStation(TileKind::Sink))
        );
    }

    #[test]
    fn ragged_rows_are_malformed() {
        let text = "XXX\nXX\nXXX";
        assert!(matches!(
            parse_layout(text, "ragged"),
            Err(LayoutError::MalformedGrid(_))
        ));
    }

    #[test]
    fn unknown_char_is_malformed() {
        let text = "XXX\nX?X\nXXX";
        assert!(matches!(
            parse_layout(text, "weird"),
            Err(LayoutError::MalformedGrid(_))
        ));
    }

    #[test]
    fn blocked_move_direction_helpers() {
        assert_eq!(Cell::new(0, 0).step(Direction::North), None);
        assert_eq!(Cell::new(0, 0).step(Direction::West), None);
        assert_eq!(Cell::new(3, 2).step(Direction::East), Some(Cell::new(4, 2)));
        assert_eq!(
            Direction::between(Cell::new(1, 1), Cell::new(1, 0)),
            Some(Direction::North)
        );
    }
}
