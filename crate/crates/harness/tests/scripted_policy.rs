//! Frequency and determinism checks for the scripted agent policy and the
//! scripted mutator.

use std::collections::BTreeMap;

use steakhouse_harness::*;
use steakhouse_sim::layout::builtin;
use steakhouse_sim::seed::derive_seed;
use steakhouse_sim::init_state;

/// Rendered fresh-kitchen menu: one pickup per dispenser plus Wait.
fn fresh_menu() -> Vec<String> {
    let layout = builtin::open();
    let state = init_state(&layout, 0);
    available_actions(&layout, &state, 0)
        .iter()
        .map(|a| a.render(&layout))
        .collect()
}

fn category_of(action: &str) -> &'static str {
    if action.contains("meat") {
        "meat"
    } else if action.contains("onion") {
        "onion"
    } else if action.contains("plate") {
        "plate"
    } else {
        "misc"
    }
}

fn sample_counts(personality: &str, n: u64) -> BTreeMap<&'static str, u32> {
    let menu = fresh_menu();
    let mut counts = BTreeMap::new();
    for i in 0..n {
        let reply = scripted_policy(personality, &menu, false, derive_seed(0, &[i]));
        let idx: usize = reply.trim_start_matches("Action: ").trim().parse().unwrap();
        *counts.entry(category_of(&menu[idx])).or_insert(0) += 1;
    }
    counts
}

#[test]
fn meat_emphasis_dominates_choice_frequency() {
    let personality = "You only grill meat. Only grill meat. Grill meat, always meat.";
    let counts = sample_counts(personality, 100);
    let meat = counts["meat"];
    for (cat, n) in &counts {
        if *cat != "meat" {
            assert!(
                meat > *n,
                "meat category ({}) must dominate {} ({})",
                meat,
                cat,
                n
            );
        }
    }
}

#[test]
fn neutral_personality_samples_categories_near_uniform() {
    let counts = sample_counts("You are a balanced cook.", 1000);
    assert_eq!(counts.len(), 4, "fresh kitchen offers four categories");
    for (cat, n) in &counts {
        let freq = *n as f64 / 1000.0;
        assert!(
            (freq - 0.25).abs() <= 0.025,
            "category {} frequency {} strays more than 10% from uniform",
            cat,
            freq
        );
    }
}

#[test]
fn directive_shifts_action_distribution() {
    let neutral = sample_counts("You are a balanced cook.", 500);
    let directed = sample_counts(
        "You are a cook. You must increase number of meat picked. You must increase number of \
         meat picked. You must increase number of meat picked.",
        500,
    );
    assert!(
        directed["meat"] > neutral["meat"] * 2,
        "directed {} vs neutral {}",
        directed["meat"],
        neutral["meat"]
    );
}

#[test]
fn identical_inputs_give_identical_output() {
    let menu = fresh_menu();
    let a = scripted_policy("You chop onions.", &menu, true, 99);
    let b = scripted_policy("You chop onions.", &menu, true, 99);
    assert_eq!(a, b);
    let c = scripted_policy("You chop onions.", &menu, true, 100);
    // Different seeds are allowed to differ (and here they do not collide).
    let _ = c;
}

fn mutation_prompt(personality: &str, direction: &str) -> String {
    format!(
        "Some domain text.\n\nThe agent currently has the following personality:\n\n{}\n\n\
         Transform the personality to force the agent to play the game optimally with {}. \
         Encourage the agent accordingly. Ensure the new personality is in second person. \
         Keep the new personality brief and to the point. Only return the transformed \
         personality.",
        personality, direction
    )
}

#[test]
fn directed_mutation_appends_directive_verbatim() {
    let mutator = ScriptedMutator::new(5);
    let direction = "increase number of meat put on grill and decrease number of onions chopped";
    let prompt = mutation_prompt("You are focused.", direction);
    let child = mutator
        .complete(&prompt, &SamplingParams::default().with_seed(1))
        .unwrap();
    assert!(child.starts_with("You are focused."));
    assert!(child.contains(direction));
}

#[test]
fn over_budget_mutation_drops_oldest_directives() {
    let mut mutator = ScriptedMutator::new(5);
    mutator.char_budget = 90;
    let parent = "You are focused. You must increase number of onions picked.";
    let prompt = mutation_prompt(parent, "increase number of dishes served");
    let child = mutator
        .complete(&prompt, &SamplingParams::default().with_seed(1))
        .unwrap();
    assert!(child.len() <= 90);
    assert!(child.contains("increase number of dishes served"));
    assert!(!child.contains("onions picked"), "oldest directive must be dropped: {}", child);
}

#[test]
fn random_batch_is_parseable_and_seed_dependent() {
    let mutator = ScriptedMutator::new(5);
    let prompt = "Some domain text.\n\nThe agent currently has the following personality:\n\n\
                  You are focused.\n\nCreate 4 random personalities for the agent to play the \
                  game optimally with a random strategy. Ensure the new personality is in \
                  second person. Keep the new personalities brief and to the point.";
    let a = mutator.complete(prompt, &SamplingParams::default().with_seed(1)).unwrap();
    let b = mutator.complete(prompt, &SamplingParams::default().with_seed(1)).unwrap();
    let c = mutator.complete(prompt, &SamplingParams::default().with_seed(2)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines.len(), 4);
    for (i, line) in lines.iter().enumerate() {
        assert!(line.starts_with(&format!("{}. ", i + 1)), "line {:?}", line);
        assert!(line.len() > 8);
    }
}
