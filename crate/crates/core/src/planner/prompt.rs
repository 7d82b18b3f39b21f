//! Prompt templates for text-completion backends.
//!
//! A prompt is a role header, role instructions, the full query as a fenced
//! JSON block, and the expected response shape. Responses must contain
//! exactly one fenced JSON `PlannerResponse`.

use super::query::{PlannerQuery, Role};

fn instructions(role: Role) -> &'static str {
    match role {
        Role::Follow => {
            "You operate a word processor. Pick exactly one candidate and bind all of its \
             required arguments so that the current instruction (or task) makes progress. \
             Answer `done` when the instruction is already satisfied."
        }
        Role::Explore => {
            "You explore a word processor to discover skills. Propose the next instruction \
             as a list of steps in the documented instruction grammar, preferring targets \
             not yet in the coverage log. Answer `stop` when the budget is exhausted or \
             everything is covered."
        }
        Role::Summarize => {
            "Summarize the observed trajectory as one reusable skill. List the logic steps \
             in order, each referencing the trajectory index it came from. Exclude failed \
             and irrelevant records."
        }
        Role::Generate => {
            "Write one skill in the skill DSL implementing the summary. Parameterize typed \
             text, reuse the offered skills with `use` where they fit, and document the skill \
             with a description, an `Example:` line and an `Effect:` checker line."
        }
        Role::Translate => {
            "Rewrite the skill so that every UI action with a documented API equivalent is \
             replaced by the API call. Keep UI actions that have no equivalent. Keep the \
             documentation accurate."
        }
        Role::ProposeTask => {
            "Propose a task that exercises the skill, the invocation that performs it, and a \
             checker expression over the document that holds when the task is done."
        }
        Role::Judge => "Decide whether the task is complete given the final document and the checker.",
    }
}

fn response_shape(role: Role) -> &'static str {
    match role {
        Role::Follow => {
            r#"{"type":"action","target":"<candidate>","args":{...},"cursor":0} | {"type":"done"}"#
        }
        Role::Explore => r#"{"type":"instruction","steps":["click Insert tab", ...],"target":"<id>"} | {"type":"stop"}"#,
        Role::Summarize => r#"{"type":"summary","summary":"...","steps":[{"index":0,"description":"..."}]}"#,
        Role::Generate | Role::Translate => r#"{"type":"source","source":"skill name(...) \"\"\"...\"\"\" { ... }"}"#,
        Role::ProposeTask => r#"{"type":"task","task":"...","invocation":"name(key: value)","checker":"..."}"#,
        Role::Judge => r#"{"type":"verdict","success":true,"rationale":"..."}"#,
    }
}

/// Renders the prompt for a query.
pub fn render(query: &PlannerQuery) -> String {
    let json = serde_json::to_string_pretty(query).expect("queries serialize");
    format!(
        "# role: {role}\n\n{instr}\n\nThe response must be at most {max} bytes.\n\n## query\n\n```json\n{json}\n```\n\n## response\n\nReply with one fenced json block of this shape:\n\n{shape}\n",
        role = query.role.as_str(),
        instr = instructions(query.role),
        max = query.budget.max_response_bytes,
        shape = response_shape(query.role),
    )
}

/// Body of the first ```json fenced block (or the first bare ``` block).
pub fn extract_fenced(text: &str) -> Option<&str> {
    let start = text.find("```")?;
    let after = &text[start + 3..];
    let body_start = after.find('\n')? + 1;
    let body = &after[body_start..];
    let end = body.find("```")?;
    Some(body[..end].trim_end())
}

/// Recovers the query embedded in a prompt.
pub fn query_of(prompt: &str) -> Option<PlannerQuery> {
    serde_json::from_str(extract_fenced(prompt)?).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::query::QueryContext;

    #[test]
    fn prompt_embeds_the_query() {
        let q = PlannerQuery::new(
            Role::Judge,
            QueryContext {
                checker: Some("tables.count == 1".into()),
                ..Default::default()
            },
        );
        let p = render(&q);
        assert!(p.starts_with("# role: judge"));
        assert_eq!(query_of(&p), Some(q));
    }

    #[test]
    fn fenced_extraction() {
        assert_eq!(extract_fenced("x\n```json\n{\"a\":1}\n```\ny"), Some("{\"a\":1}"));
        assert_eq!(extract_fenced("no fence"), None);
        assert_eq!(extract_fenced("```json\nunterminated"), None);
    }
}
