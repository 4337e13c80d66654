//! Mutation directions: random vectors over the archive's measure
//! dimensions, turned into per-agent language directives plus mutator
//! context.

use rand::Rng;
use serde::{Deserialize, Serialize};

use steakhouse_measures::MeasureId;

/// A direction in measure space: one of {-1, 0, +1} per dimension, never
/// all zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutationDirection(pub Vec<i8>);

/// Sample each component i.i.d. uniform over {-1, 0, +1}, rejecting the
/// all-zero vector.
pub fn sample_direction(rng: &mut impl Rng, dims: usize) -> MutationDirection {
    assert!(dims >= 1);
    loop {
        let v: Vec<i8> = (0..dims).map(|_| rng.gen_range(-1i8..=1)).collect();
        if v.iter().any(|c| *c != 0) {
            return MutationDirection(v);
        }
    }
}

/// What one agent's mutator query must contain: the language direction and
/// the per-measure guidance on how to achieve it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentInstruction {
    pub direction_text: String,
    pub context_text: String,
}

fn signed_phrase(measure: MeasureId, increase: bool) -> String {
    let verb = if increase { "increase" } else { "decrease" };
    let noun = match measure.subtask() {
        Some(subtask) => subtask.phrase().to_string(),
        None => match measure {
            MeasureId::AvgActionDelay => "average action delay".to_string(),
            MeasureId::PercentContribution => "percent contribution".to_string(),
            MeasureId::Specialization => "specialization".to_string(),
            MeasureId::Fitness => "fitness".to_string(),
            _ => unreachable!(),
        },
    };
    format!("{} {}", verb, noun)
}

fn context(measure: MeasureId, increase: bool) -> String {
    use MeasureId::*;
    let focus = |what: &str| format!("Encourage the agent to focus on {}.", what);
    let avoid = |what: &str| format!("Encourage the agent to avoid {}.", what);
    match measure {
        DiffOnionsPicked => {
            let what = "picking up onions from the onion dispenser";
            if increase { focus(what) } else { avoid(what) }
        }
        DiffOnionsPlacedOnBoard => {
            let what = "putting raw onions on the chopping board";
            if increase { focus(what) } else { avoid(what) }
        }
        DiffOnionsChopped => {
            let what = "chopping onions on the chopping board";
            if increase { focus(what) } else { avoid(what) }
        }
        DiffMeatPicked => {
            let what = "picking up raw meats from the meat dispenser";
            if increase { focus(what) } else { avoid(what) }
        }
        DiffMeatPlacedOnGrill => {
            let what = "picking up raw meats and putting them on the grill to cook";
            if increase { focus(what) } else { avoid(what) }
        }
        DiffDirtyPlatesPicked => {
            let what = "picking up dirty plates from the dirty plate dispenser";
            if increase { focus(what) } else { avoid(what) }
        }
        DiffCleanPlatesPicked => {
            let what = "rinsing plates and collecting clean plates from the sink";
            if increase { focus(what) } else { avoid(what) }
        }
        DiffPlatesPlacedInSink => {
            let what = "putting dirty plates in the sink";
            if increase { focus(what) } else { avoid(what) }
        }
        DiffDishesServed => {
            let what = "assembling finished dishes and delivering them";
            if increase { focus(what) } else { avoid(what) }
        }
        AvgActionDelay => {
            if increase {
                "Encourage the agent to take its time between actions.".to_string()
            } else {
                "Encourage the agent to act as frequently as possible.".to_string()
            }
        }
        PercentContribution => {
            if increase {
                "Encourage the agent to work more collaboratively with other agents.".to_string()
            } else {
                "Encourage the agent to complete dishes on its own.".to_string()
            }
        }
        Specialization => {
            if increase {
                "Encourage the agent to stick to a single type of task.".to_string()
            } else {
                "Encourage the agent to spread its work across all types of tasks.".to_string()
            }
        }
        Fitness => {
            if increase {
                "Encourage the agent to deliver as many dishes as possible.".to_string()
            } else {
                "Encourage the agent to slow down.".to_string()
            }
        }
    }
}

/// Turn a direction into per-agent instructions. Workload-difference
/// measures mirror across the agents (+1 means agent 1 up, agent 2 down);
/// team-level measures give both agents the same directive. Components
/// concatenate in dimension order.
pub fn direction_to_instructions(
    direction: &MutationDirection,
    measures: &[MeasureId],
) -> [AgentInstruction; 2] {
    assert_eq!(direction.0.len(), measures.len());
    let mut directions: [Vec<String>; 2] = [Vec::new(), Vec::new()];
    let mut contexts: [Vec<String>; 2] = [Vec::new(), Vec::new()];
    for (component, measure) in direction.0.iter().zip(measures) {
        if *component == 0 {
            continue;
        }
        let increase = *component > 0;
        if measure.subtask().is_some() {
            // Difference measure: mirrored signs.
            directions[0].push(signed_phrase(*measure, increase));
            directions[1].push(signed_phrase(*measure, !increase));
            contexts[0].push(context(*measure, increase));
            contexts[1].push(context(*measure, !increase));
        } else {
            for agent in 0..2 {
                directions[agent].push(signed_phrase(*measure, increase));
                contexts[agent].push(context(*measure, increase));
            }
        }
    }
    [0, 1].map(|agent| AgentInstruction {
        direction_text: directions[agent].join(" and "),
        context_text: contexts[agent].join(" "),
    })
}
