use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::value::{ArgType, Args};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionKind {
    Ui,
    Api,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArgSpec {
    pub key: String,
    #[serde(rename = "type")]
    pub ty: ArgType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSignature {
    pub name: String,
    pub kind: ActionKind,
    pub required_args: Vec<ArgSpec>,
    pub optional_args: Vec<ArgSpec>,
    pub description: String,
}

impl ActionSignature {
    pub fn arg_type(&self, key: &str) -> Option<ArgType> {
        self.required_args
            .iter()
            .chain(&self.optional_args)
            .find(|a| a.key == key)
            .map(|a| a.ty)
    }

    /// Exact key checking: every required key present, no unknown keys, and
    /// every value of the declared type.
    pub fn check(&self, args: &Args) -> Result<(), String> {
        for a in &self.required_args {
            if !args.contains_key(&a.key) {
                return Err(format!("{}: missing required argument `{}`", self.name, a.key));
            }
        }
        for (k, v) in args {
            match self.arg_type(k) {
                None => return Err(format!("{}: unexpected argument `{k}`", self.name)),
                Some(t) if t != v.arg_type() => {
                    return Err(format!(
                        "{}: argument `{k}` expects {t}, got {}",
                        self.name,
                        v.arg_type()
                    ))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Read-only table of every basic and API action.
#[derive(Debug, Clone)]
pub struct ActionRegistry {
    by_name: BTreeMap<String, ActionSignature>,
}

fn sig(
    name: &str,
    kind: ActionKind,
    required: &[(&str, ArgType)],
    optional: &[(&str, ArgType)],
    description: &str,
) -> ActionSignature {
    let specs = |xs: &[(&str, ArgType)]| {
        xs.iter()
            .map(|(k, t)| ArgSpec {
                key: k.to_string(),
                ty: *t,
            })
            .collect()
    };
    ActionSignature {
        name: name.to_string(),
        kind,
        required_args: specs(required),
        optional_args: specs(optional),
        description: description.to_string(),
    }
}

/// The six basic actions available to every agent.
pub const BASIC_ACTIONS: &[&str] = &[
    "click_input",
    "set_edit_text",
    "type_keys",
    "wheel_mouse_input",
    "select_text",
    "select_table",
];

impl ActionRegistry {
    pub fn standard() -> &'static ActionRegistry {
        static REG: OnceLock<ActionRegistry> = OnceLock::new();
        REG.get_or_init(Self::build)
    }

    fn build() -> Self {
        use ActionKind::*;
        use ArgType::*;
        let all = vec![
            sig(
                "click_input",
                Ui,
                &[("control_name", String)],
                &[("control_id", String), ("button", String), ("double", Boolean)],
                "Click a control element.",
            ),
            sig(
                "set_edit_text",
                Ui,
                &[("control_name", String), ("text", String)],
                &[("control_id", String)],
                "Set the text of an editable control.",
            ),
            sig(
                "type_keys",
                Ui,
                &[("text", String)],
                &[("control_id", String), ("control_name", String), ("newline", Boolean)],
                "Type keys or a key chord on a control, by default the document canvas.",
            ),
            sig(
                "wheel_mouse_input",
                Ui,
                &[("wheel_dist", Number)],
                &[("control_id", String), ("control_name", String)],
                "Scroll the mouse wheel over a control.",
            ),
            sig("select_text", Api, &[("text", String)], &[], "Select the first occurrence of the given text."),
            sig("select_table", Api, &[("number", Number)], &[], "Select the table with the given 1-based number."),
            sig("tables_add", Api, &[("rows", Number), ("cols", Number)], &[], "Append an empty table."),
            sig("set_alignment", Api, &[("alignment", String)], &[], "Align the selected paragraph."),
            sig("set_font", Api, &[], &[("name", String), ("size", Number)], "Set font name and/or size of the selected paragraph."),
            sig("set_heading_level", Api, &[("level", Number)], &[], "Set the heading level (0 is body text) of the selected paragraph."),
            sig("insert_header", Api, &[("text", String)], &[], "Set the page header text."),
            sig("insert_footer", Api, &[("text", String)], &[], "Set the page footer text."),
            sig("set_paper_size", Api, &[("size", String)], &[], "Set the paper size."),
            sig("set_text_direction", Api, &[("direction", String)], &[], "Set the text direction."),
            sig("add_watermark", Api, &[("kind", String)], &[], "Add a watermark."),
            sig(
                "insert_shape",
                Api,
                &[("kind", String), ("width", Number), ("height", Number), ("color", String)],
                &[],
                "Insert a shape with the given size in inches and fill color.",
            ),
            sig("get_selection_text", Api, &[], &[], "Return the selected text."),
            sig("set_selection_text", Api, &[("text", String)], &[], "Replace the selected text."),
            sig("insert_paragraph", Api, &[("text", String)], &[("index", Number)], "Insert a paragraph and select it."),
            sig("toggle_bold", Api, &[], &[], "Toggle bold on the selected paragraph."),
            sig("set_highlight", Api, &[("color", String)], &[], "Highlight the selected paragraph, or clear with \"none\"."),
        ];
        Self {
            by_name: all.into_iter().map(|s| (s.name.clone(), s)).collect(),
        }
    }

    pub fn get(&self, name: &str) -> Option<&ActionSignature> {
        self.by_name.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ActionSignature> {
        self.by_name.values()
    }

    pub fn basic(&self) -> Vec<&ActionSignature> {
        BASIC_ACTIONS.iter().filter_map(|n| self.get(n)).collect()
    }

    pub fn kind_of(&self, name: &str) -> Option<ActionKind> {
        self.get(name).map(|s| s.kind)
    }
}
