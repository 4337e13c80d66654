//! 10,000-case fuzz of every measure against an independent
//! straight-from-the-formula oracle, plus range, label-swap, and
//! time-shift properties.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use steakhouse_harness::{CompletedRecord, EpisodeLog, HeaderRecord, LogRecord};
use steakhouse_measures::*;
use steakhouse_sim::{
    Cell, DishKind, Event, EventKind, HlaTemplate, Item, ItemKind, PickupSource, PlaceTarget,
};

// ---------------------------------------------------------------------
// Independent oracle: every formula recomputed from raw records with its
// own tables, no shared helpers with the implementation.
// ---------------------------------------------------------------------

fn oracle_fitness(log: &EpisodeLog, gamma: f64) -> f64 {
    let mut total = 0.0;
    for r in &log.records {
        if let LogRecord::Event(e) = r {
            if let EventKind::Deliver { reward, .. } = e.kind {
                total += reward as f64 * gamma.powi(e.t as i32);
            }
        }
    }
    total
}

fn oracle_delay(log: &EpisodeLog, horizon: u32) -> f64 {
    let mut times = Vec::new();
    for r in &log.records {
        if let LogRecord::Event(e) = r {
            let interact = matches!(
                e.kind,
                EventKind::Pickup { .. }
                    | EventKind::Place { .. }
                    | EventKind::Rinse { .. }
                    | EventKind::Chop { .. }
                    | EventKind::PlateSteak { .. }
                    | EventKind::Garnish { .. }
                    | EventKind::Deliver { .. }
            );
            if interact {
                times.push(e.t);
            }
        }
    }
    times.sort();
    if times.len() < 2 {
        return horizon as f64;
    }
    let mut gaps = Vec::new();
    for i in 1..times.len() {
        gaps.push((times[i] - times[i - 1]) as f64);
    }
    gaps.iter().sum::<f64>() / gaps.len() as f64
}

fn oracle_contribution(log: &EpisodeLog) -> f64 {
    let mut dish_values = Vec::new();
    for r in &log.records {
        let LogRecord::Event(e) = r else { continue };
        let EventKind::Deliver { lineage, .. } = &e.kind else { continue };
        let mut n = [0.0f64; 2];
        for r2 in &log.records {
            let LogRecord::Completed(c) = r2 else { continue };
            if c.template == HlaTemplate::Wait {
                continue;
            }
            if c.lineage.iter().any(|x| lineage.contains(x)) {
                n[c.agent] += 1.0;
            }
        }
        if n[0] + n[1] > 0.0 {
            dish_values.push(n[0].min(n[1]) / (n[0] + n[1]));
        } else {
            dish_values.push(0.0);
        }
    }
    if dish_values.is_empty() {
        0.0
    } else {
        dish_values.iter().sum::<f64>() / dish_values.len() as f64
    }
}

/// Independent copy of the group table: 0 ingredient, 1 plate, 2 dish
/// creation, 3 delivery.
fn oracle_group(c: &CompletedRecord) -> Option<usize> {
    Some(match c.template {
        HlaTemplate::Wait => return None,
        HlaTemplate::PickUpMeat
        | HlaTemplate::PickUpOnion
        | HlaTemplate::PlaceMeatOnGrill
        | HlaTemplate::PlaceOnionOnBoard
        | HlaTemplate::ChopOnion => 0,
        HlaTemplate::PickUpDirtyPlate
        | HlaTemplate::PlaceDirtyPlateInSink
        | HlaTemplate::RinseDirtyPlate
        | HlaTemplate::PickUpCleanPlate => 1,
        HlaTemplate::PlateSteakFromGrill | HlaTemplate::AddGarnish => 2,
        HlaTemplate::DeliverSteak | HlaTemplate::DeliverSteakOnion => 3,
        HlaTemplate::PickUpFromCounter
        | HlaTemplate::PlaceOnNearestCounter
        | HlaTemplate::PlaceOnSharedCounter => match c.item {
            Some(ItemKind::DirtyPlate) | Some(ItemKind::CleanPlate) => 1,
            Some(ItemKind::SteakDish) | Some(ItemKind::SteakOnionDish) => 2,
            _ => 0,
        },
    })
}

fn oracle_specialization(log: &EpisodeLog) -> f64 {
    let mut sum = 0.0;
    for player in 0..2 {
        let mut groups = [0.0f64; 4];
        for r in &log.records {
            let LogRecord::Completed(c) = r else { continue };
            if c.agent != player {
                continue;
            }
            if let Some(g) = oracle_group(c) {
                groups[g] += 1.0;
            }
        }
        let total: f64 = groups.iter().sum();
        sum += if total == 0.0 {
            0.25
        } else {
            groups.iter().cloned().fold(0.0, f64::max) / total
        };
    }
    sum / 2.0
}

/// Independent event-to-sub-task table, in the fixed measure order.
fn oracle_diffs(log: &EpisodeLog) -> [i64; 9] {
    let mut counts = [[0i64; 9]; 2];
    for r in &log.records {
        let LogRecord::Event(e) = r else { continue };
        let slot: Option<usize> = match &e.kind {
            EventKind::Pickup { item, .. } => match item.kind {
                ItemKind::RawOnion => Some(0),
                ItemKind::RawMeat => Some(3),
                ItemKind::DirtyPlate => Some(5),
                ItemKind::CleanPlate => Some(6),
                _ => None,
            },
            EventKind::Place { item, onto } => match (item.kind, onto) {
                (ItemKind::RawOnion, PlaceTarget::Board { .. }) => Some(1),
                (ItemKind::RawMeat, PlaceTarget::Grill { .. }) => Some(4),
                (ItemKind::DirtyPlate, PlaceTarget::Sink { .. }) => Some(7),
                _ => None,
            },
            EventKind::Chop { completed, .. } => completed.then_some(2),
            EventKind::Deliver { .. } => Some(8),
            _ => None,
        };
        if let Some(s) = slot {
            counts[e.agent][s] += 1;
        }
    }
    let mut out = [0i64; 9];
    for i in 0..9 {
        out[i] = counts[0][i] - counts[1][i];
    }
    out
}

// ---------------------------------------------------------------------
// Random log generation.
// ---------------------------------------------------------------------

const HORIZON: u32 = 500;

fn random_item(rng: &mut ChaCha8Rng) -> Item {
    let kinds = [
        ItemKind::RawMeat,
        ItemKind::CookedMeat,
        ItemKind::RawOnion,
        ItemKind::ChoppedOnion,
        ItemKind::DirtyPlate,
        ItemKind::CleanPlate,
        ItemKind::SteakDish,
        ItemKind::SteakOnionDish,
    ];
    let mut lineage: Vec<u32> = (0..rng.gen_range(1..4)).map(|_| rng.gen_range(0..12)).collect();
    lineage.sort_unstable();
    lineage.dedup();
    Item {
        kind: kinds[rng.gen_range(0..kinds.len())],
        lineage,
    }
}

fn random_event(rng: &mut ChaCha8Rng) -> Event {
    let t = rng.gen_range(0..HORIZON);
    let agent = rng.gen_range(0..2);
    let cell = Cell::new(rng.gen_range(0..8), rng.gen_range(0..8));
    let kind = match rng.gen_range(0..9) {
        0 => EventKind::Pickup {
            item: random_item(rng),
            from: match rng.gen_range(0..5) {
                0 => PickupSource::MeatDispenser { cell },
                1 => PickupSource::OnionDispenser { cell },
                2 => PickupSource::DirtyPlateDispenser { cell },
                3 => PickupSource::Sink { cell },
                _ => PickupSource::Counter { cell, shared: rng.gen_bool(0.5) },
            },
        },
        1 => EventKind::Place {
            item: random_item(rng),
            onto: match rng.gen_range(0..4) {
                0 => PlaceTarget::Grill { cell },
                1 => PlaceTarget::Sink { cell },
                2 => PlaceTarget::Board { cell },
                _ => PlaceTarget::Counter { cell, shared: rng.gen_bool(0.5) },
            },
        },
        2 => EventKind::Rinse { sink: cell, rinses: rng.gen_range(1..4), item: random_item(rng) },
        3 => EventKind::Chop {
            board: cell,
            chops: rng.gen_range(1..3),
            completed: rng.gen_bool(0.5),
            item: random_item(rng),
        },
        4 => EventKind::PlateSteak { grill: cell, dish: random_item(rng) },
        5 => EventKind::Garnish { board: cell, dish: random_item(rng) },
        6 => EventKind::Deliver {
            dish: if rng.gen_bool(0.5) { DishKind::Steak } else { DishKind::SteakOnion },
            reward: [0, 20, 100][rng.gen_range(0..3)],
            dish_id: rng.gen_range(0..50),
            lineage: random_item(rng).lineage,
        },
        7 => EventKind::Move { from: cell, to: Cell::new(cell.x + 1, cell.y) },
        _ => EventKind::Collide { at: cell },
    };
    Event { t, agent, kind }
}

fn random_completed(rng: &mut ChaCha8Rng) -> CompletedRecord {
    let templates = [
        HlaTemplate::PickUpFromCounter,
        HlaTemplate::PlaceOnNearestCounter,
        HlaTemplate::PlaceOnSharedCounter,
        HlaTemplate::PickUpDirtyPlate,
        HlaTemplate::PlaceDirtyPlateInSink,
        HlaTemplate::RinseDirtyPlate,
        HlaTemplate::PickUpCleanPlate,
        HlaTemplate::PlateSteakFromGrill,
        HlaTemplate::PickUpOnion,
        HlaTemplate::PlaceOnionOnBoard,
        HlaTemplate::ChopOnion,
        HlaTemplate::AddGarnish,
        HlaTemplate::PickUpMeat,
        HlaTemplate::PlaceMeatOnGrill,
        HlaTemplate::DeliverSteak,
        HlaTemplate::DeliverSteakOnion,
        HlaTemplate::Wait,
    ];
    let template = templates[rng.gen_range(0..templates.len())];
    let item = random_item(rng);
    CompletedRecord {
        t: rng.gen_range(0..HORIZON),
        agent: rng.gen_range(0..2),
        action: "fuzz".into(),
        template,
        category: template.category(),
        item: rng.gen_bool(0.8).then_some(item.kind),
        lineage: item.lineage,
    }
}

fn random_log(rng: &mut ChaCha8Rng) -> EpisodeLog {
    let mut records = vec![LogRecord::Header(HeaderRecord {
        layout_name: "fuzz".into(),
        layout_ascii: String::new(),
        seed: 0,
        config_hash: String::new(),
        comm_enabled: false,
        horizon: HORIZON,
        personalities: vec!["a".into(), "b".into()],
    })];
    for _ in 0..rng.gen_range(0..=20) {
        records.push(LogRecord::Event(random_event(rng)));
    }
    for _ in 0..rng.gen_range(0..=20) {
        records.push(LogRecord::Completed(random_completed(rng)));
    }
    EpisodeLog { records }
}

fn swap_labels(log: &EpisodeLog) -> EpisodeLog {
    let records = log
        .records
        .iter()
        .map(|r| match r {
            LogRecord::Event(e) => LogRecord::Event(Event {
                agent: 1 - e.agent,
                ..e.clone()
            }),
            LogRecord::Completed(c) => LogRecord::Completed(CompletedRecord {
                agent: 1 - c.agent,
                ..c.clone()
            }),
            other => other.clone(),
        })
        .collect();
    EpisodeLog { records }
}

fn shift_times(log: &EpisodeLog, delta: u32) -> EpisodeLog {
    let records = log
        .records
        .iter()
        .map(|r| match r {
            LogRecord::Event(e) => LogRecord::Event(Event { t: e.t + delta, ..e.clone() }),
            LogRecord::Completed(c) => {
                LogRecord::Completed(CompletedRecord { t: c.t + delta, ..c.clone() })
            }
            other => other.clone(),
        })
        .collect();
    EpisodeLog { records }
}

#[test]
fn ten_thousand_fuzzed_logs_match_the_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xFADE);
    for case in 0..10_000 {
        let log = random_log(&mut rng);
        let gamma = if case % 3 == 0 { 0.99 } else { 1.0 };
        let v = measure_vector(&log, gamma);

        assert_eq!(v.fitness, oracle_fitness(&log, gamma), "case {}", case);
        assert_eq!(v.avg_action_delay, oracle_delay(&log, HORIZON), "case {}", case);
        assert_eq!(v.percent_contribution, oracle_contribution(&log), "case {}", case);
        assert_eq!(v.specialization, oracle_specialization(&log), "case {}", case);
        assert_eq!(v.workload_diffs, oracle_diffs(&log), "case {}", case);

        // Ranges hold on every fuzzed log.
        assert!(
            (0.0..=0.5).contains(&v.percent_contribution),
            "case {}: contribution {}",
            case,
            v.percent_contribution
        );
        assert!(
            (0.25..=1.0).contains(&v.specialization),
            "case {}: specialization {}",
            case,
            v.specialization
        );

        // Swapping player labels negates every diff and fixes the rest.
        let swapped = measure_vector(&swap_labels(&log), gamma);
        assert_eq!(swapped.fitness, v.fitness);
        assert_eq!(swapped.avg_action_delay, v.avg_action_delay);
        assert_eq!(swapped.percent_contribution, v.percent_contribution);
        assert_eq!(swapped.specialization, v.specialization);
        for i in 0..9 {
            assert_eq!(swapped.workload_diffs[i], -v.workload_diffs[i]);
        }

        // Shifting all timestamps leaves the delay unchanged.
        let shifted = measure_vector(&shift_times(&log, 37), 1.0);
        assert_eq!(shifted.avg_action_delay, v.avg_action_delay);
    }
}
