use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::document::{AppState, DocumentModel};
use super::EnvState;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueChange {
    pub before: Value,
    pub after: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldChange {
    pub field: String,
    pub before: Value,
    pub after: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum ItemChange {
    Added { index: usize, value: Value },
    Removed { index: usize, value: Value },
    Modified { index: usize, fields: Vec<FieldChange> },
}

/// Structured delta between two snapshots. Document and application
/// fields are "effects"; tab, menu and scroll are view state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ChangeSet {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub paragraphs: Vec<ItemChange>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tables: Vec<ItemChange>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub shapes: Vec<ItemChange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub header: Option<ValueChange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub footer: Option<ValueChange>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub page: Vec<FieldChange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selection: Option<ValueChange>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub app: Vec<FieldChange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active_tab: Option<ValueChange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub open_menu: Option<ValueChange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scroll: Option<ValueChange>,
}

impl ChangeSet {
    pub fn is_empty(&self) -> bool {
        !self.has_effect()
            && self.active_tab.is_none()
            && self.open_menu.is_none()
            && self.scroll.is_none()
    }

    /// True when document content or application toggles changed.
    pub fn has_effect(&self) -> bool {
        !(self.paragraphs.is_empty()
            && self.tables.is_empty()
            && self.shapes.is_empty()
            && self.header.is_none()
            && self.footer.is_none()
            && self.page.is_empty()
            && self.selection.is_none()
            && self.app.is_empty())
    }

    pub fn tables_added(&self) -> usize {
        self.tables
            .iter()
            .filter(|c| matches!(c, ItemChange::Added { .. }))
            .count()
    }

    /// Short verb phrases describing the effects, in a fixed order.
    pub fn phrases(&self) -> Vec<String> {
        let mut out = Vec::new();
        let item_phrases = |what: &str, changes: &[ItemChange], out: &mut Vec<String>| {
            for c in changes {
                match c {
                    ItemChange::Added { value, .. } => {
                        let kind = value.get("kind").and_then(Value::as_str);
                        out.push(match kind {
                            Some(k) => format!("insert {k} {what}"),
                            None => format!("insert {what}"),
                        });
                    }
                    ItemChange::Removed { .. } => out.push(format!("remove {what}")),
                    ItemChange::Modified { fields, .. } => {
                        for f in fields {
                            out.push(field_phrase(&f.field, &f.after));
                        }
                    }
                }
            }
        };
        item_phrases("paragraph", &self.paragraphs, &mut out);
        item_phrases("table", &self.tables, &mut out);
        item_phrases("shape", &self.shapes, &mut out);
        if self.header.is_some() {
            out.push("set header".into());
        }
        if self.footer.is_some() {
            out.push("set footer".into());
        }
        for f in &self.page {
            out.push(field_phrase(&f.field, &f.after));
        }
        if let Some(sel) = &self.selection {
            match sel.after.get("kind").and_then(Value::as_str) {
                Some("text") => out.push("select text".into()),
                Some("table") => out.push("select table".into()),
                _ => out.push("clear selection".into()),
            }
        }
        for f in &self.app {
            match f.field.as_str() {
                "dictation" => out.push("toggle dictation".into()),
                "search_query" => out.push("search help".into()),
                other => out.push(format!("set {other}")),
            }
        }
        out.dedup();
        out
    }
}

fn field_phrase(field: &str, after: &Value) -> String {
    let name = field.replace('_', " ");
    match after {
        Value::String(s) if s.len() <= 16 && !s.contains(' ') => format!("set {name} {s}"),
        Value::Bool(_) => format!("toggle {name}"),
        Value::Number(n) if field == "heading_level" => format!("set heading {n}"),
        _ => format!("set {name}"),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("model types always serialize")
}

fn field_changes(before: &Value, after: &Value) -> Vec<FieldChange> {
    let empty = serde_json::Map::new();
    let b = before.as_object().unwrap_or(&empty);
    let a = after.as_object().unwrap_or(&empty);
    let mut keys: Vec<&String> = b.keys().chain(a.keys()).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .filter_map(|k| {
            let bv = b.get(k).cloned().unwrap_or(Value::Null);
            let av = a.get(k).cloned().unwrap_or(Value::Null);
            (bv != av).then(|| FieldChange {
                field: k.clone(),
                before: bv,
                after: av,
            })
        })
        .collect()
}

/// Index-aligned list diff after trimming the common prefix and suffix, so
/// that a single insertion anywhere shows up as one `Added` entry.
fn diff_list<T: Serialize + PartialEq>(before: &[T], after: &[T]) -> Vec<ItemChange> {
    let prefix = before
        .iter()
        .zip(after)
        .take_while(|(b, a)| b == a)
        .count();
    let max_suffix = before.len().min(after.len()) - prefix;
    let suffix = before
        .iter()
        .rev()
        .zip(after.iter().rev())
        .take(max_suffix)
        .take_while(|(b, a)| b == a)
        .count();
    let mid_b = &before[prefix..before.len() - suffix];
    let mid_a = &after[prefix..after.len() - suffix];
    let mut out = Vec::new();
    for (i, (b, a)) in mid_b.iter().zip(mid_a).enumerate() {
        let fields = field_changes(&to_value(b), &to_value(a));
        if !fields.is_empty() {
            out.push(ItemChange::Modified {
                index: prefix + i,
                fields,
            });
        }
    }
    let common = mid_b.len().min(mid_a.len());
    for (i, a) in mid_a.iter().enumerate().skip(common) {
        out.push(ItemChange::Added {
            index: prefix + i,
            value: to_value(a),
        });
    }
    for (i, b) in mid_b.iter().enumerate().skip(common) {
        out.push(ItemChange::Removed {
            index: prefix + i,
            value: to_value(b),
        });
    }
    out
}

fn value_change<T: Serialize + PartialEq>(b: &T, a: &T) -> Option<ValueChange> {
    (b != a).then(|| ValueChange {
        before: to_value(b),
        after: to_value(a),
    })
}

/// Delta over content only (document and application toggles).
pub fn diff_content(
    before: &DocumentModel,
    before_app: &AppState,
    after: &DocumentModel,
    after_app: &AppState,
) -> ChangeSet {
    let selection = if before.selection != after.selection
        || before.selected_text() != after.selected_text()
    {
        Some(ValueChange {
            before: super::selection_view(before),
            after: super::selection_view(after),
        })
    } else {
        None
    };
    ChangeSet {
        paragraphs: diff_list(&before.paragraphs, &after.paragraphs),
        tables: diff_list(&before.tables, &after.tables),
        shapes: diff_list(&before.shapes, &after.shapes),
        header: value_change(&before.header, &after.header),
        footer: value_change(&before.footer, &after.footer),
        page: field_changes(&to_value(&before.page), &to_value(&after.page)),
        selection,
        app: field_changes(&to_value(before_app), &to_value(after_app)),
        ..Default::default()
    }
}

pub fn diff_states(before: &EnvState, after: &EnvState) -> ChangeSet {
    let mut cs = diff_content(&before.document, &before.app, &after.document, &after.app);
    cs.active_tab = value_change(&before.active_tab, &after.active_tab);
    cs.open_menu = value_change(&before.open_menu, &after.open_menu);
    cs.scroll = value_change(&before.scroll, &after.scroll);
    cs
}
