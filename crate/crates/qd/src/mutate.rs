//! Mutator-LLM queries: the directed mutation prompt, the random-personality
//! prompt, and the retry/fallback rules around them.

use steakhouse_harness::{BackendError, LLMBackend, Personality, PromptList, Provenance, SamplingParams};
use steakhouse_sim::seed::derive_seed;

use crate::direction::{AgentInstruction, MutationDirection};

pub const MUTATE_RETRIES: u32 = 3;

/// Directed mutation query: domain knowledge, the current personality, the
/// language direction, and its context.
pub fn mutation_prompt(domain: &str, personality: &str, instruction: &AgentInstruction) -> String {
    format!(
        "{}\n\nThe agent currently has the following personality:\n\n{}\n\n\
         Transform the personality to force the agent to play the game optimally with {}. {} \
         Ensure the new personality is in second person. Keep the new personality brief and to \
         the point. Only return the transformed personality.",
        domain, personality, instruction.direction_text, instruction.context_text
    )
}

/// Random-personality query used by the baseline.
pub fn random_mutation_prompt(domain: &str, initial: &str, count: usize) -> String {
    format!(
        "{}\n\nThe agent currently has the following personality:\n\n{}\n\n\
         Create {} random personalities for the agent to play the game optimally with a random \
         strategy. Ensure the new personality is in second person. Keep the new personalities \
         brief and to the point.",
        domain, initial, count
    )
}

fn acceptable(text: &str, char_budget: usize) -> bool {
    let trimmed = text.trim();
    !trimmed.is_empty() && trimmed.len() <= char_budget
}

/// Mutate each personality independently via one mutator query per agent.
/// Empty or over-budget completions are retried up to [`MUTATE_RETRIES`]
/// times; if they keep failing, the parent's personality is kept for that
/// agent. Hard backend errors propagate.
pub fn mutate_prompts(
    mutator: &dyn LLMBackend,
    domain: &str,
    parent: &PromptList,
    instructions: &[AgentInstruction; 2],
    direction: &MutationDirection,
    parent_cell: Option<Vec<u32>>,
    sampling: &SamplingParams,
    char_budget: usize,
    seed: u64,
) -> Result<PromptList, BackendError> {
    let mut children = Vec::with_capacity(2);
    for agent in 0..2 {
        let prompt = mutation_prompt(domain, &parent.0[agent].text, &instructions[agent]);
        let mut text = None;
        for attempt in 0..=MUTATE_RETRIES {
            let params = sampling.with_seed(derive_seed(seed, &[agent as u64, attempt as u64]));
            let completion = mutator.complete(&prompt, &params)?;
            if acceptable(&completion, char_budget) {
                text = Some(completion.trim().to_string());
                break;
            }
        }
        let provenance = Provenance::Mutated {
            parent_cell: parent_cell.clone(),
            direction: direction.0.clone(),
        };
        children.push(match text {
            Some(text) => Personality::new(text, provenance),
            // Keep the parent's prompt for this agent.
            None => Personality::new(parent.0[agent].text.clone(), provenance),
        });
    }
    let second = children.pop().unwrap();
    let first = children.pop().unwrap();
    Ok(PromptList([first, second]))
}

/// Parse a numbered batch of personalities out of a completion.
fn parse_personalities(completion: &str, count: usize) -> Vec<String> {
    let mut out = Vec::new();
    for line in completion.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        // Strip a leading "N." or "N)" marker when present.
        let stripped = line
            .split_once(". ")
            .filter(|(n, _)| n.chars().all(|c| c.is_ascii_digit()) && !n.is_empty())
            .map(|(_, rest)| rest)
            .or_else(|| {
                line.split_once(") ")
                    .filter(|(n, _)| n.chars().all(|c| c.is_ascii_digit()) && !n.is_empty())
                    .map(|(_, rest)| rest)
            })
            .unwrap_or(line);
        if !stripped.trim().is_empty() {
            out.push(stripped.trim().to_string());
        }
        if out.len() == count {
            break;
        }
    }
    out
}

/// Request `count` random personalities from the mutator. Short batches are
/// retried; any remaining shortfall is padded with the initial personality
/// so the evaluation budget is still consumed.
pub fn request_random_personalities(
    mutator: &dyn LLMBackend,
    domain: &str,
    initial: &str,
    count: usize,
    sampling: &SamplingParams,
    char_budget: usize,
    seed: u64,
) -> Result<Vec<String>, BackendError> {
    let prompt = random_mutation_prompt(domain, initial, count);
    let mut best: Vec<String> = Vec::new();
    for attempt in 0..=MUTATE_RETRIES {
        let params = sampling.with_seed(derive_seed(seed, &[attempt as u64]));
        let completion = mutator.complete(&prompt, &params)?;
        let parsed: Vec<String> = parse_personalities(&completion, count)
            .into_iter()
            .filter(|p| acceptable(p, char_budget))
            .collect();
        if parsed.len() > best.len() {
            best = parsed;
        }
        if best.len() == count {
            break;
        }
    }
    while best.len() < count {
        best.push(initial.to_string());
    }
    Ok(best)
}
