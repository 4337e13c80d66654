//! Lenient parsing of model replies into a chosen action and an optional
//! message. Never fails: anything unparseable falls back to waiting.

use steakhouse_sim::{HighLevelAction, Layout};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedResponse {
    pub action: HighLevelAction,
    /// Index into the offered list, when one matched.
    pub index: Option<usize>,
    /// True when nothing matched and the Wait action was substituted.
    pub fallback: bool,
    pub message: Option<String>,
}

/// Extract the chosen action: (1) explicit index, else (2) unique
/// case-insensitive substring match of an offered action string, else fall
/// back to "Wait for 5 timesteps". The trailing "Message:" text, when
/// present and communication is enabled, becomes the message.
pub fn parse_response(
    raw: &str,
    layout: &Layout,
    offered: &[HighLevelAction],
    comm_enabled: bool,
) -> ParsedResponse {
    let lower = raw.to_lowercase();
    // Split off the message so action matching cannot hit message text.
    let (action_part, message) = match lower.find("message:") {
        Some(pos) => {
            let text = raw[pos + "message:".len()..].trim();
            let msg = (comm_enabled && !text.is_empty()).then(|| text.to_string());
            (&lower[..pos], msg)
        }
        None => (&lower[..], None),
    };

    if let Some(i) = explicit_index(action_part).filter(|i| *i < offered.len()) {
        return ParsedResponse {
            action: offered[i].clone(),
            index: Some(i),
            fallback: false,
            message,
        };
    }

    let rendered: Vec<String> = offered.iter().map(|a| a.render(layout).to_lowercase()).collect();
    let matches: Vec<usize> = rendered
        .iter()
        .enumerate()
        .filter(|(_, r)| action_part.contains(r.as_str()))
        .map(|(i, _)| i)
        .collect();
    if matches.len() == 1 {
        let i = matches[0];
        return ParsedResponse {
            action: offered[i].clone(),
            index: Some(i),
            fallback: false,
            message,
        };
    }

    let wait_index = offered.iter().position(|a| *a == HighLevelAction::wait());
    ParsedResponse {
        action: HighLevelAction::wait(),
        index: wait_index,
        fallback: true,
        message,
    }
}

/// First integer following an "action" marker, or a bare integer on the
/// first line.
fn explicit_index(text: &str) -> Option<usize> {
    if let Some(pos) = text.find("action") {
        let tail = &text[pos + "action".len()..];
        let digits: String = tail
            .chars()
            .take(12)
            .skip_while(|c| !c.is_ascii_digit())
            .take_while(|c| c.is_ascii_digit())
            .collect();
        if let Ok(i) = digits.parse() {
            return Some(i);
        }
    }
    text.lines()
        .next()
        .and_then(|l| l.trim().trim_end_matches('.').parse().ok())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::available_actions;
    use steakhouse_sim::layout::builtin;
    use steakhouse_sim::{init_state, HlaTemplate};

    fn setup() -> (Layout, Vec<HighLevelAction>) {
        let layout = builtin::open();
        let state = init_state(&layout, 0);
        let offered = available_actions(&layout, &state, 0);
        (layout, offered)
    }

    #[test]
    fn explicit_index_with_message() {
        let (layout, offered) = setup();
        let parsed = parse_response("Action: 3\nMessage: grab plates", &layout, &offered, true);
        assert_eq!(parsed.action, offered[3]);
        assert_eq!(parsed.message.as_deref(), Some("grab plates"));
        assert!(!parsed.fallback);
    }

    #[test]
    fn message_dropped_when_comm_disabled() {
        let (layout, offered) = setup();
        let parsed = parse_response("Action: 1\nMessage: hello", &layout, &offered, false);
        assert_eq!(parsed.action, offered[1]);
        assert_eq!(parsed.message, None);
    }

    #[test]
    fn verbatim_action_name_matches() {
        let (layout, offered) = setup();
        let parsed = parse_response(
            "I think I should Pick up a meat from the meat dispenser now.",
            &layout,
            &offered,
            true,
        );
        assert_eq!(parsed.action.template, HlaTemplate::PickUpMeat);
        assert!(!parsed.fallback);
    }

    #[test]
    fn garbage_falls_back_to_wait() {
        let (layout, offered) = setup();
        let parsed = parse_response("lorem ipsum dolor", &layout, &offered, true);
        assert_eq!(parsed.action, HighLevelAction::wait());
        assert!(parsed.fallback);
    }

    #[test]
    fn out_of_range_index_falls_back() {
        let (layout, offered) = setup();
        let parsed = parse_response("Action: 99", &layout, &offered, true);
        assert!(parsed.fallback);
    }
}
