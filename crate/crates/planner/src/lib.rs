//! Converts a chosen high-level action into a positional goal and a stream
//! of per-timestep low-level actions.
//!
//! Search is breadth-first over floor cells with the other agent treated as
//! a static obstacle, replanned every timestep. All tie-breaking is fixed
//! (row-major goals, N,S,E,W move order) so plans are reproducible.

use rand::Rng;
use thiserror::Error;

use steakhouse_sim::hla::{template_station_kind, HighLevelAction, HlaTemplate};
use steakhouse_sim::{Cell, Direction, Layout, LowLevelAction, TileKind, WorldState};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlanError {
    #[error("no reachable standing cell for the requested station")]
    Unreachable,
}

/// Where an agent must stand, which way it must face, and whether the plan
/// ends with an interact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Goal {
    /// Floor cell to stand on.
    pub target: Cell,
    /// Direction from `target` toward the station tile.
    pub facing: Direction,
    /// True when the plan should finish with an Interact.
    pub interact: bool,
}

/// An agent's active plan: its goal plus the queued actions toward it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanState {
    pub goal: Goal,
    pub queued: Vec<LowLevelAction>,
    pub idle_ticks: u32,
}

/// Breadth-first distances from `start` over floor cells. `block`, when
/// given, is treated as impassable (the other agent's cell).
pub fn bfs_distances(layout: &Layout, start: Cell, block: Option<Cell>) -> Vec<Option<u32>> {
    let mut dist = vec![None; layout.width as usize * layout.height as usize];
    let idx = |c: Cell| c.y as usize * layout.width as usize + c.x as usize;
    if !layout.is_floor(start) || Some(start) == block {
        return dist;
    }
    dist[idx(start)] = Some(0);
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        let d = dist[idx(c)].unwrap();
        for dir in Direction::ALL {
            let Some(n) = c.step(dir) else { continue };
            if layout.is_floor(n) && Some(n) != block && dist[idx(n)].is_none() {
                dist[idx(n)] = Some(d + 1);
                queue.push_back(n);
            }
        }
    }
    dist
}

/// Distance from an agent to the nearest standing cell adjacent to a tile
/// of `kind`, ignoring the other agent. Used for prompt location info.
pub fn station_distance(layout: &Layout, from: Cell, kind: TileKind) -> Option<u32> {
    let dist = bfs_distances(layout, from, None);
    let idx = |c: Cell| c.y as usize * layout.width as usize + c.x as usize;
    layout
        .cells_of_kind(kind)
        .iter()
        .flat_map(|s| layout.stand_cells(*s))
        .filter_map(|c| dist[idx(c)])
        .min()
}

/// Station tiles that can satisfy `hla` right now. Bound actions name their
/// tile; unbound ones enumerate every qualifying tile (empty general
/// counters for "nearest general counter" placement).
fn candidate_stations(layout: &Layout, state: &WorldState, hla: &HighLevelAction) -> Vec<Cell> {
    if let Some(cell) = hla.station {
        return vec![cell];
    }
    match template_station_kind(hla.template) {
        Some(TileKind::GeneralCounter) => layout
            .cells_of_kind(TileKind::GeneralCounter)
            .into_iter()
            .filter(|c| state.counter_item(*c).is_none())
            .collect(),
        Some(kind) => layout.cells_of_kind(kind),
        None => Vec::new(),
    }
}

/// Resolve a high-level action to the nearest goal: the closest floor cell
/// (by current shortest path, ties row-major) adjacent to a qualifying
/// station. Reachability here ignores the other agent; transient blocking
/// is `plan_path`'s concern.
pub fn goal_for_action(
    layout: &Layout,
    state: &WorldState,
    agent: usize,
    hla: &HighLevelAction,
) -> Result<Goal, PlanError> {
    if hla.template == HlaTemplate::Wait {
        return Ok(Goal {
            target: state.agents[agent].pos,
            facing: state.agents[agent].orientation,
            interact: false,
        });
    }
    let stations = candidate_stations(layout, state, hla);
    let dist = bfs_distances(layout, state.agents[agent].pos, None);
    let idx = |c: Cell| c.y as usize * layout.width as usize + c.x as usize;

    let mut best: Option<(u32, Cell, Cell)> = None;
    for station in stations {
        for stand in layout.stand_cells(station) {
            let Some(d) = dist[idx(stand)] else { continue };
            let candidate = (d, stand, station);
            let better = match &best {
                None => true,
                Some((bd, bs, bst)) => {
                    (d, stand.row_major(), station.row_major())
                        < (*bd, bs.row_major(), bst.row_major())
                }
            };
            if better {
                best = Some(candidate);
            }
        }
    }
    let (_, stand, station) = best.ok_or(PlanError::Unreachable)?;
    Ok(Goal {
        target: stand,
        facing: Direction::between(stand, station).expect("stand cell is adjacent"),
        interact: true,
    })
}

/// Shortest action sequence to the goal, treating the other agent's current
/// cell as an obstacle: moves, then a reorienting step if needed, then one
/// Interact. Replanned every timestep by the caller.
pub fn plan_path(
    layout: &Layout,
    state: &WorldState,
    agent: usize,
    goal: &Goal,
) -> Result<Vec<LowLevelAction>, PlanError> {
    let start = state.agents[agent].pos;
    let other = state.agents[1 - agent].pos;
    let idx = |c: Cell| c.y as usize * layout.width as usize + c.x as usize;

    let mut actions = Vec::new();
    if start != goal.target {
        // BFS with parent pointers; neighbor order N,S,E,W fixes ties.
        let mut parent: Vec<Option<(Cell, Direction)>> =
            vec![None; layout.width as usize * layout.height as usize];
        let mut seen = vec![false; parent.len()];
        seen[idx(start)] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        let mut found = false;
        'search: while let Some(c) = queue.pop_front() {
            for dir in Direction::ALL {
                let Some(n) = c.step(dir) else { continue };
                if !layout.is_floor(n) || n == other || seen[idx(n)] {
                    continue;
                }
                seen[idx(n)] = true;
                parent[idx(n)] = Some((c, dir));
                if n == goal.target {
                    found = true;
                    break 'search;
                }
                queue.push_back(n);
            }
        }
        if !found {
            return Err(PlanError::Unreachable);
        }
        let mut c = goal.target;
        let mut rev = Vec::new();
        while c != start {
            let (prev, dir) = parent[idx(c)].unwrap();
            rev.push(LowLevelAction::from_direction(dir));
            c = prev;
        }
        rev.reverse();
        actions = rev;
    }

    // Orientation after the last move; a mismatch costs one blocked move
    // into the station tile, which only turns the agent.
    let final_dir = actions
        .last()
        .and_then(|a| a.move_direction())
        .unwrap_or(state.agents[agent].orientation);
    if goal.interact {
        if final_dir != goal.facing {
            actions.push(LowLevelAction::from_direction(goal.facing));
        }
        actions.push(LowLevelAction::Interact);
    }
    Ok(actions)
}

/// Collision resolution: when every agent failed to move in the previous
/// timestep, each stuck agent takes one uniformly random action from
/// {North, South, East, West, Stay} drawn from the episode rng, agent 0
/// first. Returns `None` per agent when the trigger condition is not met.
pub fn unstick(stuck: [bool; 2], rng: &mut impl Rng) -> [Option<LowLevelAction>; 2] {
    const CHOICES: [LowLevelAction; 5] = [
        LowLevelAction::North,
        LowLevelAction::South,
        LowLevelAction::East,
        LowLevelAction::West,
        LowLevelAction::Stay,
    ];
    if !(stuck[0] && stuck[1]) {
        return [None, None];
    }
    [
        Some(CHOICES[rng.gen_range(0..CHOICES.len())]),
        Some(CHOICES[rng.gen_range(0..CHOICES.len())]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use steakhouse_sim::init_state;
    use steakhouse_sim::layout::{builtin, parse_layout};

    #[test]
    fn goal_at_current_cell_plans_single_interact() {
        let layout = builtin::open();
        let mut state = init_state(&layout, 0);
        // Stand beside the grill at (4,0), facing it.
        state.agents[0].pos = Cell::new(4, 1);
        state.agents[0].orientation = Direction::North;
        let hla = HighLevelAction::new(HlaTemplate::PlaceMeatOnGrill).with_station(Cell::new(4, 0));
        let goal = goal_for_action(&layout, &state, 0, &hla).unwrap();
        assert_eq!(goal.target, Cell::new(4, 1));
        assert_eq!(goal.facing, Direction::North);
        let path = plan_path(&layout, &state, 0, &goal).unwrap();
        assert_eq!(path, vec![LowLevelAction::Interact]);
    }

    #[test]
    fn reorient_costs_one_blocked_move() {
        let layout = builtin::open();
        let mut state = init_state(&layout, 0);
        state.agents[0].pos = Cell::new(4, 1);
        state.agents[0].orientation = Direction::South;
        let hla = HighLevelAction::new(HlaTemplate::PlaceMeatOnGrill).with_station(Cell::new(4, 0));
        let goal = goal_for_action(&layout, &state, 0, &hla).unwrap();
        let path = plan_path(&layout, &state, 0, &goal).unwrap();
        assert_eq!(path, vec![LowLevelAction::North, LowLevelAction::Interact]);
    }

    #[test]
    fn corridor_of_length_four_plans_five_actions() {
        // Vertical corridor: spawn at the bottom, delivery at the top.
        let layout = parse_layout(
            "XTXXXXX\nX.XXXXX\nX.XXXXX\nX.XXXXX\nX.XMGWX\nX1X2..X\nXXXOPBX",
            "corridor",
        )
        .unwrap();
        let state = init_state(&layout, 0);
        let hla = HighLevelAction::new(HlaTemplate::DeliverSteak).with_station(Cell::new(1, 0));
        let goal = goal_for_action(&layout, &state, 0, &hla).unwrap();
        assert_eq!(goal.target, Cell::new(1, 1));
        let path = plan_path(&layout, &state, 0, &goal).unwrap();
        // Last move already faces the station, so no reorient step.
        assert_eq!(path.len(), 5);
        assert_eq!(path[..4], [LowLevelAction::North; 4]);
        assert_eq!(path[4], LowLevelAction::Interact);
    }

    #[test]
    fn nearest_of_two_sinks_wins() {
        // Sinks at path distances 3 and 7 from the agent.
        let layout = parse_layout(
            "XWXXXXXXXXXWX\nX...1.....2.X\nXMOPGBTXXXXXX",
            "twosinks",
        )
        .unwrap();
        let state = init_state(&layout, 0);
        let hla = HighLevelAction::new(HlaTemplate::PlaceDirtyPlateInSink);
        let goal = goal_for_action(&layout, &state, 0, &hla).unwrap();
        assert_eq!(goal.target, Cell::new(1, 1));
        assert_eq!(goal.facing, Direction::North);
    }

    #[test]
    fn walled_off_station_is_unreachable() {
        let layout = parse_layout("XMXXWXX\nX1.X.2X\nXOPXGBX\nXTXXXXX", "walled").unwrap();
        // Agent 0 is sealed in the left chamber; the grill is on the right.
        let state = init_state(&layout, 0);
        let hla = HighLevelAction::new(HlaTemplate::PlaceMeatOnGrill).with_station(Cell::new(4, 2));
        assert_eq!(goal_for_action(&layout, &state, 0, &hla), Err(PlanError::Unreachable));
    }

    #[test]
    fn blocking_agent_makes_path_unreachable_this_tick() {
        let layout = parse_layout("XMXXXWX\nX1...2X\nXOPGBTX", "corridor").unwrap();
        let mut state = steakhouse_sim::init_state(&layout, 0);
        state.agents[1].pos = Cell::new(3, 1); // plugs the only corridor
        let hla = HighLevelAction::new(HlaTemplate::PlaceDirtyPlateInSink)
            .with_station(Cell::new(5, 0));
        let goal = goal_for_action(&layout, &state, 0, &hla).unwrap();
        assert_eq!(plan_path(&layout, &state, 0, &goal), Err(PlanError::Unreachable));
    }

    #[test]
    fn unstick_triggers_only_when_all_are_stuck() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(unstick([true, false], &mut rng), [None, None]);
        assert_eq!(unstick([false, false], &mut rng), [None, None]);
        let drawn = unstick([true, true], &mut rng);
        assert!(drawn[0].is_some() && drawn[1].is_some());
    }

    #[test]
    fn unstick_is_deterministic_per_seed() {
        let seq = |seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..32).map(|_| unstick([true, true], &mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(seq(7), seq(7));
        assert_ne!(seq(7), seq(8));
    }
}
