//! Deterministic offline substitutes for the agent LLM and the mutator LLM.
//!
//! The agent policy hashes keyword occurrences in the personality text into
//! per-category and per-sub-task preference weights, then samples one of
//! the offered actions. Personalities that emphasize a sub-task ("increase
//! number of meat put on grill") measurably shift the frequency of actions
//! contributing to it. Output is a well-formed "Action:"/"Message:" reply,
//! identical for identical (prompt, seed) pairs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use steakhouse_sim::seed::{derive_seed, hash_str};
use steakhouse_sim::Subtask;

use crate::backend::{BackendError, LLMBackend, SamplingParams};

/// Multiplicative weight per net directive mention of a sub-task.
const DIRECTIVE_FACTOR: f64 = 3.0;
/// Multiplicative category weight per bare keyword occurrence.
const KEYWORD_FACTOR: f64 = 1.4;
/// Net directive counts are clamped to this magnitude.
const NET_CAP: i64 = 4;
const KEYWORD_CAP: u32 = 6;
/// Bonus for finishing work already in the pipeline (rinsing the plate in
/// the sink, plating the cooked steak) over starting something new. These
/// actions are only offered mid-pipeline, so a fresh kitchen is unaffected.
const FINISH_BONUS: f64 = 2.2;
/// Smaller bonus for loading an appliance the agent already has the item for.
const ADVANCE_BONUS: f64 = 1.6;

/// Menu category inferred from the rendered action string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Category {
    Counter,
    Plate,
    Onion,
    Meat,
    Misc,
}

const CATEGORIES: [Category; 5] = [
    Category::Counter,
    Category::Plate,
    Category::Onion,
    Category::Meat,
    Category::Misc,
];

/// How strongly counter transfers inherit their item's sub-task tags;
/// parking an item must not outcompete actually processing it.
const TRANSFER_STRENGTH: f64 = 0.4;

/// Classify a rendered action string into its menu category, the sub-tasks
/// it contributes toward (including enabling steps of the chain), and the
/// strength of that contribution.
fn classify(action: &str) -> (Category, Vec<Subtask>, f64) {
    use Subtask::*;
    let a = action.to_lowercase();
    if a.starts_with("wait for") {
        return (Category::Misc, vec![], 1.0);
    }
    if a.contains("meat dispenser") {
        return (Category::Meat, vec![MeatPicked, MeatPlacedOnGrill], 1.0);
    }
    if a.starts_with("put raw meat") {
        return (Category::Meat, vec![MeatPlacedOnGrill], 1.0);
    }
    if a.starts_with("deliver the") {
        return (Category::Meat, vec![DishesServed], 1.0);
    }
    if a.contains("onion dispenser") {
        return (
            Category::Onion,
            vec![OnionsPicked, OnionsPlacedOnBoard, OnionsChopped],
            1.0,
        );
    }
    if a.starts_with("put raw onion") {
        return (Category::Onion, vec![OnionsPlacedOnBoard, OnionsChopped], 1.0);
    }
    if a.starts_with("do one chop") {
        return (Category::Onion, vec![OnionsChopped], 1.0);
    }
    if a.starts_with("add garnish") {
        return (Category::Onion, vec![DishesServed], 1.0);
    }
    if a.contains("dirty plate dispenser") {
        return (
            Category::Plate,
            vec![DirtyPlatesPicked, PlatesPlacedInSink, CleanPlatesPicked],
            1.0,
        );
    }
    if a.starts_with("place dirty plate") {
        return (Category::Plate, vec![PlatesPlacedInSink, CleanPlatesPicked], 1.0);
    }
    if a.starts_with("do one rinse") {
        return (Category::Plate, vec![CleanPlatesPicked], 1.0);
    }
    if a.starts_with("pick up the clean plate") {
        return (Category::Plate, vec![CleanPlatesPicked, DishesServed], 1.0);
    }
    if a.contains("pick up steak") {
        return (Category::Plate, vec![DishesServed], 1.0);
    }
    // Counter transfers: tag by the item moved so boosted roles keep
    // flowing, but at reduced strength. Picking up from a counter is real
    // progress; placing onto one is parking.
    if a.contains("counter") {
        let tags = if a.contains("raw meat") {
            vec![MeatPicked, MeatPlacedOnGrill]
        } else if a.contains("raw onion") || a.contains("chopped onion") {
            vec![OnionsPicked, OnionsPlacedOnBoard, OnionsChopped]
        } else if a.contains("dirty plate") {
            vec![DirtyPlatesPicked, PlatesPlacedInSink]
        } else if a.contains("clean plate") {
            vec![CleanPlatesPicked, DishesServed]
        } else if a.contains("dish") || a.contains("cooked meat") {
            vec![DishesServed]
        } else {
            vec![]
        };
        let strength = if a.starts_with("pick up") { 0.8 } else { TRANSFER_STRENGTH };
        return (Category::Counter, tags, strength);
    }
    (Category::Misc, vec![], 1.0)
}

/// Signed directive counts per sub-task parsed from a personality, plus the
/// text with directive phrases blanked out (so bare-keyword counting does
/// not see them).
fn parse_directives(personality: &str) -> ([i64; 9], String) {
    let mut lower = personality.to_lowercase();
    let mut net = [0i64; 9];
    for (i, subtask) in Subtask::ALL.iter().enumerate() {
        for (marker, sign) in [("increase ", 1i64), ("decrease ", -1i64)] {
            let phrase = format!("{}{}", marker, subtask.phrase());
            let mut count = 0;
            while let Some(pos) = lower.find(&phrase) {
                lower.replace_range(pos..pos + phrase.len(), &" ".repeat(phrase.len()));
                count += 1;
            }
            net[i] += sign * count;
        }
        net[i] = net[i].clamp(-NET_CAP, NET_CAP);
    }
    (net, lower)
}

/// Prior toward advancing the pipeline independent of any personality.
fn progress_bonus(action: &str) -> f64 {
    let a = action.to_lowercase();
    if a.starts_with("do one rinse")
        || a.starts_with("do one chop")
        || a.starts_with("pick up the clean plate")
        || a.contains("pick up steak")
        || a.starts_with("add garnish")
        || a.starts_with("deliver the")
    {
        FINISH_BONUS
    } else if a.starts_with("place dirty plate")
        || a.starts_with("put raw meat")
        || a.starts_with("put raw onion")
    {
        ADVANCE_BONUS
    } else {
        1.0
    }
}

fn count_occurrences(text: &str, needle: &str) -> u32 {
    let mut count = 0;
    let mut pos = 0;
    while let Some(found) = text[pos..].find(needle) {
        count += 1;
        pos += found + needle.len();
    }
    count.min(KEYWORD_CAP)
}

/// Deterministic action selection over the offered menu. `offered` holds
/// the rendered action strings in menu order.
pub fn scripted_policy(
    personality: &str,
    offered: &[String],
    wants_message: bool,
    seed: u64,
) -> String {
    if offered.is_empty() {
        return "Action: 0".to_string();
    }
    let (net, remainder) = parse_directives(personality);

    let mut cat_factor = [1.0f64; 5];
    for (keyword, cat) in [
        ("meat", Category::Meat),
        ("plate", Category::Plate),
        ("onion", Category::Onion),
        ("deliver", Category::Meat),
        ("help", Category::Counter),
        ("pass", Category::Counter),
        ("share", Category::Counter),
    ] {
        let c = count_occurrences(&remainder, keyword);
        if c > 0 {
            let idx = CATEGORIES.iter().position(|x| *x == cat).unwrap();
            cat_factor[idx] *= KEYWORD_FACTOR.powi(c as i32);
        }
    }

    let classified: Vec<(Category, f64)> = offered
        .iter()
        .map(|a| {
            let (cat, tags, strength) = classify(a);
            // An action is at most as attractive as its strongest single
            // directive; otherwise multi-tag enabler actions (dispenser
            // pickups) dwarf the single-tag chain steps (rinsing, chopping)
            // they feed, and the chain never finishes.
            let contributions: Vec<f64> = tags
                .iter()
                .map(|t| net[t.index()] as f64 * strength)
                .collect();
            let cap = contributions
                .iter()
                .map(|c| c.abs())
                .fold(0.0, f64::max)
                .min(NET_CAP as f64);
            let exponent = contributions.iter().sum::<f64>().clamp(-cap, cap);
            (cat, DIRECTIVE_FACTOR.powf(exponent) * progress_bonus(a))
        })
        .collect();

    // Category first (uniform across present categories when neutral), then
    // an action within it, both weighted. A category is as attractive as
    // its best action so boosts are not diluted by category size.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cat_weights = Vec::new();
    for (ci, cat) in CATEGORIES.iter().enumerate() {
        let members: Vec<f64> = classified
            .iter()
            .filter(|(c, _)| c == cat)
            .map(|(_, w)| *w)
            .collect();
        if members.is_empty() {
            continue;
        }
        let best = members.iter().cloned().fold(f64::MIN, f64::max);
        cat_weights.push((*cat, cat_factor[ci] * best));
    }
    let chosen_cat = weighted_choice(&mut rng, &cat_weights);
    let choices: Vec<(usize, f64)> = classified
        .iter()
        .enumerate()
        .filter(|(_, (c, _))| *c == chosen_cat)
        .map(|(i, (_, w))| (i, *w))
        .collect();
    let index = weighted_choice(&mut rng, &choices);

    if wants_message {
        format!(
            "Action: {}\nMessage: I am going to: {}.",
            index, offered[index]
        )
    } else {
        format!("Action: {}", index)
    }
}

fn weighted_choice<T: Copy>(rng: &mut impl Rng, items: &[(T, f64)]) -> T {
    let total: f64 = items.iter().map(|(_, w)| w.max(0.0)).sum();
    if total <= 0.0 {
        return items[0].0;
    }
    let mut draw = rng.gen_range(0.0..total);
    for (item, w) in items {
        draw -= w.max(0.0);
        if draw <= 0.0 {
            return *item;
        }
    }
    items.last().unwrap().0
}

/// Pull the numbered action menu out of a prompt.
fn extract_offered(prompt: &str) -> Vec<String> {
    let mut out = Vec::new();
    for line in prompt.lines() {
        let line = line.trim();
        let Some(dot) = line.find(". ") else { continue };
        if line[..dot].chars().all(|c| c.is_ascii_digit()) && !line[..dot].is_empty() {
            if line[..dot].parse::<usize>() == Ok(out.len()) {
                out.push(line[dot + 2..].to_string());
            }
        }
    }
    out
}

fn extract_personality(prompt: &str) -> &str {
    for line in prompt.lines() {
        if let Some(rest) = line.strip_prefix("Personality: ") {
            return rest;
        }
    }
    prompt
}

/// Offline agent backend: parses its own prompt back into a menu and plays
/// the keyword-weighted policy.
pub struct ScriptedBackend {
    pub seed: u64,
}

impl ScriptedBackend {
    pub fn new(seed: u64) -> Self {
        ScriptedBackend { seed }
    }
}

impl LLMBackend for ScriptedBackend {
    fn complete(&self, prompt: &str, params: &SamplingParams) -> Result<String, BackendError> {
        let offered = extract_offered(prompt);
        let personality = extract_personality(prompt);
        let wants_message = prompt.contains("send a message");
        let seed = derive_seed(
            self.seed,
            &[params.seed.unwrap_or_else(|| hash_str(prompt)), hash_str(prompt)],
        );
        Ok(scripted_policy(personality, &offered, wants_message, seed))
    }
}

/// Sentences the random-personality generator samples from. Signed
/// sub-task directives plus a few neutral styles, so random personalities
/// influence the scripted policy about as strongly as one mutation step.
fn random_phrase_pool() -> Vec<String> {
    let mut pool = Vec::new();
    for subtask in Subtask::ALL {
        pool.push(format!("You must increase {}.", subtask.phrase()));
        pool.push(format!("You must decrease {}.", subtask.phrase()));
    }
    pool.push("You help your partner by passing items over the counters.".to_string());
    pool.push("You keep moving and never idle.".to_string());
    pool.push("You prioritize whatever the current order needs.".to_string());
    pool.push("You split the work evenly with your partner.".to_string());
    pool
}

/// Offline mutator backend. Directed mutation prompts get the parent
/// personality with the directive appended verbatim; random-personality
/// prompts get a numbered batch of seeded random personalities.
pub struct ScriptedMutator {
    pub seed: u64,
    /// Personalities are trimmed to this many characters by dropping their
    /// oldest directive sentences.
    pub char_budget: usize,
}

impl ScriptedMutator {
    pub fn new(seed: u64) -> Self {
        ScriptedMutator {
            seed,
            char_budget: 1200,
        }
    }

    fn mutate_directed(&self, prompt: &str) -> String {
        let parent = extract_between(prompt, "following personality:", "Transform the personality")
            .unwrap_or("")
            .trim();
        let direction = extract_between(prompt, "optimally with ", ".")
            .unwrap_or("a balanced strategy")
            .trim();
        let mut child = format!("{} You must {}.", parent, direction);
        // Respect the personality budget by forgetting the oldest directives.
        while child.len() > self.char_budget {
            let Some(start) = child.find("You must ") else { break };
            let end = child[start..]
                .find('.')
                .map(|e| start + e + 1)
                .unwrap_or(child.len());
            child.replace_range(start..end, "");
            child = child.split_whitespace().collect::<Vec<_>>().join(" ");
        }
        if child.len() > self.char_budget {
            child.truncate(floor_char_boundary(&child, self.char_budget));
        }
        child.trim().to_string()
    }

    fn random_batch(&self, prompt: &str, params: &SamplingParams) -> String {
        let count = extract_between(prompt, "Create ", " random")
            .and_then(|n| n.trim().parse::<usize>().ok())
            .unwrap_or(4);
        let seed = derive_seed(
            self.seed,
            &[params.seed.unwrap_or_else(|| hash_str(prompt)), hash_str(prompt)],
        );
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool = random_phrase_pool();
        let mut lines = Vec::new();
        for i in 0..count {
            let n_phrases = rng.gen_range(1..=3usize);
            let mut picks: Vec<usize> = Vec::new();
            while picks.len() < n_phrases {
                let p = rng.gen_range(0..pool.len());
                if !picks.contains(&p) {
                    picks.push(p);
                }
            }
            let text: Vec<&str> = picks.iter().map(|p| pool[*p].as_str()).collect();
            lines.push(format!("{}. {}", i + 1, text.join(" ")));
        }
        lines.join("\n")
    }
}

impl LLMBackend for ScriptedMutator {
    fn complete(&self, prompt: &str, params: &SamplingParams) -> Result<String, BackendError> {
        if prompt.contains("random personalities") {
            Ok(self.random_batch(prompt, params))
        } else if prompt.contains("Transform the personality") {
            Ok(self.mutate_directed(prompt))
        } else {
            Ok("You are focused on the objective.".to_string())
        }
    }
}

fn extract_between<'a>(text: &'a str, start: &str, end: &str) -> Option<&'a str> {
    let s = text.find(start)? + start.len();
    let e = text[s..].find(end)? + s;
    Some(&text[s..e])
}

fn floor_char_boundary(s: &str, mut i: usize) -> usize {
    if i >= s.len() {
        return s.len();
    }
    while !s.is_char_boundary(i) {
        i -= 1;
    }
    i
}
