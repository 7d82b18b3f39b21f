//! Semantics of every basic and API action.

use crate::env::document::{
    parse_color, Alignment, DocumentModel, PaperSize, Paragraph, Selection, Shape, ShapeKind,
    Table, TextDirection, Watermark, MAX_HEADING_LEVEL,
};
use crate::env::ui::{ControlType, EditTarget, UiEffect};
use crate::env::{ControlView, EnvSession};

use super::value::{Args, Value};
use super::{ActionSignature, ExecError};

pub const MAX_TABLE_DIM: f64 = 63.0;

/// Finds the unique visible control by id, or by exact name when no id is given.
pub fn resolve_control(
    session: &EnvSession,
    control_id: Option<&str>,
    control_name: Option<&str>,
) -> Result<ControlView, ExecError> {
    let visible = session.ui().visible_controls();
    let not_found = || ExecError::ControlNotFound {
        id: control_id.map(str::to_string),
        name: control_name.map(str::to_string),
    };
    if let Some(id) = control_id {
        return visible
            .into_iter()
            .find(|c| c.control_id == id)
            .ok_or_else(not_found);
    }
    let name = control_name.ok_or_else(not_found)?;
    let mut hits = visible.into_iter().filter(|c| c.control_name == name);
    match (hits.next(), hits.next()) {
        (Some(c), None) => Ok(c),
        (Some(_), Some(_)) => Err(ExecError::Ambiguous(name.to_string())),
        _ => Err(not_found()),
    }
}

fn str_arg<'a>(args: &'a Args, key: &str) -> Option<&'a str> {
    args.get(key).and_then(Value::as_str)
}

fn num_arg(args: &Args, key: &str) -> Option<f64> {
    args.get(key).and_then(Value::as_f64)
}

fn precondition(msg: impl Into<String>) -> ExecError {
    ExecError::PreconditionFailed(msg.into())
}

fn bad_arg(msg: impl Into<String>) -> ExecError {
    ExecError::ArgError(msg.into())
}

fn int_in(v: f64, lo: f64, hi: f64, what: &str) -> Result<u32, ExecError> {
    if v.fract() != 0.0 || v < lo || v > hi {
        return Err(bad_arg(format!("{what} must be an integer in {lo}..={hi}, got {v}")));
    }
    Ok(v as u32)
}

fn positive(v: f64, what: &str) -> Result<f64, ExecError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(bad_arg(format!("{what} must be > 0, got {v}")))
    }
}

fn parse_number(text: &str, what: &str) -> Result<f64, ExecError> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| bad_arg(format!("{what} expects a number, got {text:?}")))?;
    positive(v, what)
}

fn color(name: &str) -> Result<&'static str, ExecError> {
    parse_color(name).ok_or_else(|| bad_arg(format!("unknown color {name:?}")))
}

fn selected_paragraph(doc: &mut DocumentModel) -> Result<&mut Paragraph, ExecError> {
    let i = doc
        .selected_paragraph()
        .ok_or_else(|| precondition("no text is selected"))?;
    Ok(&mut doc.paragraphs[i])
}

fn last_shape(doc: &mut DocumentModel) -> Result<&mut Shape, ExecError> {
    doc.shapes
        .last_mut()
        .ok_or_else(|| precondition("the document has no shape"))
}

/// Replaces the selected span, or inserts a new first paragraph when
/// nothing textual is selected. The written text ends up selected.
fn write_text(doc: &mut DocumentModel, text: &str) {
    match doc.selection {
        Selection::Text {
            paragraph,
            start,
            end,
        } => {
            let p = &mut doc.paragraphs[paragraph];
            let chars: Vec<char> = p.text.chars().collect();
            let mut out: String = chars[..start].iter().collect();
            out.push_str(text);
            out.extend(&chars[end..]);
            p.text = out;
            doc.selection = Selection::Text {
                paragraph,
                start,
                end: start + text.chars().count(),
            };
        }
        _ => insert_paragraph(doc, text, 0),
    }
}

fn insert_paragraph(doc: &mut DocumentModel, text: &str, index: usize) {
    doc.paragraphs.insert(index, Paragraph::new(text));
    doc.selection = Selection::Text {
        paragraph: index,
        start: 0,
        end: text.chars().count(),
    };
}

fn apply_effect(doc: &mut DocumentModel, session_app: &mut crate::env::AppState, effect: &UiEffect) -> Result<String, ExecError> {
    match effect {
        UiEffect::ToggleBold => {
            let p = selected_paragraph(doc)?;
            p.bold = !p.bold;
            Ok(format!("bold {}", if p.bold { "on" } else { "off" }))
        }
        UiEffect::Align(a) => {
            selected_paragraph(doc)?.alignment = *a;
            Ok(format!("aligned {}", a.as_str()))
        }
        UiEffect::Heading(level) => {
            selected_paragraph(doc)?.heading_level = *level;
            Ok(format!("heading level {level}"))
        }
        UiEffect::Highlight(c) => {
            selected_paragraph(doc)?.highlight = c.map(str::to_string);
            Ok(format!("highlight {}", c.unwrap_or("none")))
        }
        UiEffect::ToggleDictation => {
            session_app.dictation = !session_app.dictation;
            Ok(format!("dictation {}", if session_app.dictation { "on" } else { "off" }))
        }
        UiEffect::InsertTable { rows, cols } => {
            doc.tables.push(Table::empty(*rows, *cols));
            Ok(format!("inserted {rows}x{cols} table"))
        }
        UiEffect::InsertShape(kind) => {
            doc.shapes.push(Shape {
                kind: *kind,
                width: 1.0,
                height: 1.0,
                fill_color: "blue".into(),
            });
            Ok(format!("inserted {}", kind.as_str()))
        }
        UiEffect::ShapeFill(c) => {
            last_shape(doc)?.fill_color = c.to_string();
            Ok(format!("shape fill {c}"))
        }
        UiEffect::PaperSize(p) => {
            doc.page.paper_size = *p;
            Ok(format!("paper size {}", p.as_str()))
        }
        UiEffect::TextDirection(d) => {
            doc.page.text_direction = *d;
            Ok(format!("text direction {}", d.as_str()))
        }
        UiEffect::Watermark(w) => {
            doc.page.watermark = Some(*w);
            Ok(format!("watermark {}", w.as_str()))
        }
    }
}

fn apply_edit(session: &mut EnvSession, target: EditTarget, text: &str) -> Result<String, ExecError> {
    let doc = &mut session.document;
    match target {
        EditTarget::FontName => {
            let name = text.trim();
            if name.is_empty() {
                return Err(bad_arg("font name is empty"));
            }
            selected_paragraph(doc)?.font_name = name.to_string();
        }
        EditTarget::FontSize => {
            let size = parse_number(text, "font size")?;
            selected_paragraph(doc)?.font_size = size;
        }
        EditTarget::Header => doc.header = text.to_string(),
        EditTarget::Footer => doc.footer = text.to_string(),
        EditTarget::ShapeWidth => {
            let w = parse_number(text, "shape width")?;
            last_shape(doc)?.width = w;
        }
        EditTarget::ShapeHeight => {
            let h = parse_number(text, "shape height")?;
            last_shape(doc)?.height = h;
        }
        EditTarget::Search => session.app.search_query = text.to_string(),
        EditTarget::Document => write_text(doc, text),
    }
    Ok(format!("set text {text:?}"))
}

fn ui_target(
    session: &EnvSession,
    args: &Args,
    default_name: Option<&str>,
) -> Result<ControlView, ExecError> {
    let id = str_arg(args, "control_id");
    let name = str_arg(args, "control_name").or(if id.is_none() { default_name } else { None });
    resolve_control(session, id, name)
}

fn click(session: &mut EnvSession, args: &Args) -> Result<String, ExecError> {
    let ctrl = ui_target(session, args, None)?;
    match str_arg(args, "button").unwrap_or("left") {
        "left" => {}
        "right" | "middle" => return Ok(format!("{} click on {}", str_arg(args, "button").unwrap_or_default(), ctrl.control_name)),
        other => return Err(bad_arg(format!("unknown mouse button {other:?}"))),
    }
    let node = session.ui().node(&ctrl.control_id).expect("resolved control exists");
    let has_children = !node.children.is_empty();
    let ty = node.control_type;
    let effect = session.ui().effect(&ctrl.control_id).cloned();
    let msg = if ty == ControlType::TabItem {
        session.ui.mode.active_tab = ctrl.control_name.clone();
        session.ui.mode.open_menu = None;
        format!("switched to tab {}", ctrl.control_name)
    } else if has_children {
        let mode = &mut session.ui.mode;
        if mode.open_menu.as_deref() == Some(ctrl.control_id.as_str()) {
            mode.open_menu = None;
            format!("closed {}", ctrl.control_name)
        } else {
            mode.open_menu = Some(ctrl.control_id.clone());
            format!("opened {}", ctrl.control_name)
        }
    } else if let Some(effect) = effect {
        let msg = apply_effect(&mut session.document, &mut session.app, &effect)?;
        session.ui.mode.open_menu = None;
        msg
    } else if ty.is_editable() {
        format!("focused {}", ctrl.control_name)
    } else {
        session.ui.mode.open_menu = None;
        format!("clicked {}", ctrl.control_name)
    };
    Ok(msg)
}

fn set_edit_text(session: &mut EnvSession, args: &Args) -> Result<String, ExecError> {
    let ctrl = ui_target(session, args, None)?;
    let text = str_arg(args, "text").unwrap_or_default();
    let target = session
        .ui()
        .edit_target(&ctrl.control_id)
        .filter(|_| ctrl.control_type.is_editable())
        .ok_or_else(|| precondition(format!("{} is not editable", ctrl.control_name)))?;
    apply_edit(session, target, text)
}

/// Named chords understood by `type_keys`.
pub const CHORDS: &[&str] = &[
    "^a", "^b", "^e", "^l", "^r", "^j", "{ESC}", "{VK_CONTROL down}", "{VK_CONTROL up}",
];

fn type_keys(session: &mut EnvSession, args: &Args) -> Result<String, ExecError> {
    let ctrl = ui_target(session, args, Some("Document"))?;
    let text = str_arg(args, "text").unwrap_or_default();
    let doc = &mut session.document;
    let align = |a| UiEffect::Align(a);
    match text {
        "^a" => {
            let i = doc.selected_paragraph().unwrap_or(0);
            let Some(p) = doc.paragraphs.get(i) else {
                return Ok("nothing to select".into());
            };
            doc.selection = Selection::Text {
                paragraph: i,
                start: 0,
                end: p.char_len(),
            };
            return Ok("selected paragraph".into());
        }
        "^b" => return apply_effect(doc, &mut session.app, &UiEffect::ToggleBold),
        "^e" => return apply_effect(doc, &mut session.app, &align(Alignment::Center)),
        "^l" => return apply_effect(doc, &mut session.app, &align(Alignment::Left)),
        "^r" => return apply_effect(doc, &mut session.app, &align(Alignment::Right)),
        "^j" => return apply_effect(doc, &mut session.app, &align(Alignment::Justify)),
        "{ESC}" => {
            session.ui.mode.open_menu = None;
            return Ok("escape".into());
        }
        "{VK_CONTROL down}" | "{VK_CONTROL up}" => return Ok(text.to_string()),
        t if t.starts_with('^') || (t.starts_with('{') && t.ends_with('}')) => {
            return Err(bad_arg(format!("unsupported key chord {t:?}")))
        }
        _ => {}
    }
    let target = session
        .ui()
        .edit_target(&ctrl.control_id)
        .ok_or_else(|| precondition(format!("{} does not accept typing", ctrl.control_name)))?;
    if target == EditTarget::Document && args.get("newline").and_then(Value::as_bool) == Some(true) {
        let end = session.document.paragraphs.len();
        insert_paragraph(&mut session.document, text, end);
        return Ok(format!("typed {text:?} on a new line"));
    }
    apply_edit(session, target, text)?;
    Ok(format!("typed {text:?}"))
}

fn wheel(session: &mut EnvSession, args: &Args) -> Result<String, ExecError> {
    let dist = num_arg(args, "wheel_dist").unwrap_or_default();
    if !dist.is_finite() {
        return Err(bad_arg("wheel_dist must be finite"));
    }
    if args.contains_key("control_id") || args.contains_key("control_name") {
        ui_target(session, args, None)?;
    } else {
        return Err(bad_arg("wheel_mouse_input needs control_id or control_name"));
    }
    let mode = &mut session.ui.mode;
    mode.scroll = (mode.scroll - dist.round() as i64).max(0);
    Ok(format!("scrolled to {}", mode.scroll))
}

fn api(session: &mut EnvSession, name: &str, args: &Args) -> Result<String, ExecError> {
    let doc = &mut session.document;
    let s = |k| str_arg(args, k).unwrap_or_default();
    let n = |k| num_arg(args, k).unwrap_or_default();
    match name {
        "select_text" => {
            let text = s("text");
            let (paragraph, start, end) = doc
                .find_text(text)
                .ok_or_else(|| ExecError::TargetNotFound(format!("text {text:?}")))?;
            doc.selection = Selection::Text {
                paragraph,
                start,
                end,
            };
            Ok(format!("selected {text:?}"))
        }
        "select_table" => {
            let number = n("number");
            if number.fract() != 0.0 || number < 1.0 || number as usize > doc.tables.len() {
                return Err(ExecError::TargetNotFound(format!("table {number}")));
            }
            doc.selection = Selection::Table {
                index: number as usize - 1,
            };
            Ok(format!("selected table {number}"))
        }
        "tables_add" => {
            let rows = int_in(n("rows"), 1.0, MAX_TABLE_DIM, "rows")?;
            let cols = int_in(n("cols"), 1.0, MAX_TABLE_DIM, "cols")?;
            doc.tables.push(Table::empty(rows, cols));
            Ok(format!("inserted {rows}x{cols} table"))
        }
        "set_alignment" => {
            let a = Alignment::parse(s("alignment"))
                .ok_or_else(|| bad_arg(format!("unknown alignment {:?}", s("alignment"))))?;
            apply_effect(doc, &mut session.app, &UiEffect::Align(a))
        }
        "set_font" => {
            let name = str_arg(args, "name");
            let size = num_arg(args, "size");
            if name.is_none() && size.is_none() {
                return Err(bad_arg("set_font needs name or size"));
            }
            if let Some(nm) = name {
                if nm.trim().is_empty() {
                    return Err(bad_arg("font name is empty"));
                }
            }
            let size = size.map(|v| positive(v, "font size")).transpose()?;
            let p = selected_paragraph(doc)?;
            if let Some(nm) = name {
                p.font_name = nm.trim().to_string();
            }
            if let Some(sz) = size {
                p.font_size = sz;
            }
            Ok("font set".into())
        }
        "set_heading_level" => {
            let level = int_in(n("level"), 0.0, MAX_HEADING_LEVEL as f64, "level")?;
            apply_effect(doc, &mut session.app, &UiEffect::Heading(level as u8))
        }
        "insert_header" => {
            doc.header = s("text").to_string();
            Ok("header set".into())
        }
        "insert_footer" => {
            doc.footer = s("text").to_string();
            Ok("footer set".into())
        }
        "set_paper_size" => {
            let p = PaperSize::parse(s("size"))
                .ok_or_else(|| bad_arg(format!("unknown paper size {:?}", s("size"))))?;
            apply_effect(doc, &mut session.app, &UiEffect::PaperSize(p))
        }
        "set_text_direction" => {
            let d = TextDirection::parse(s("direction"))
                .ok_or_else(|| bad_arg(format!("unknown direction {:?}", s("direction"))))?;
            apply_effect(doc, &mut session.app, &UiEffect::TextDirection(d))
        }
        "add_watermark" => {
            let w = Watermark::parse(s("kind"))
                .ok_or_else(|| bad_arg(format!("unknown watermark {:?}", s("kind"))))?;
            apply_effect(doc, &mut session.app, &UiEffect::Watermark(w))
        }
        "insert_shape" => {
            let kind = ShapeKind::parse(s("kind"))
                .ok_or_else(|| bad_arg(format!("unknown shape {:?}", s("kind"))))?;
            let shape = Shape {
                kind,
                width: positive(n("width"), "width")?,
                height: positive(n("height"), "height")?,
                fill_color: color(s("color"))?.to_string(),
            };
            doc.shapes.push(shape);
            Ok(format!("inserted {}", kind.as_str()))
        }
        "get_selection_text" => doc
            .selected_text()
            .ok_or_else(|| precondition("no text is selected")),
        "set_selection_text" => {
            if doc.selected_paragraph().is_none() {
                return Err(precondition("no text is selected"));
            }
            write_text(doc, s("text"));
            Ok("selection replaced".into())
        }
        "insert_paragraph" => {
            let index = match num_arg(args, "index") {
                Some(i) => int_in(i, 0.0, doc.paragraphs.len() as f64, "index")? as usize,
                None => 0,
            };
            insert_paragraph(doc, s("text"), index);
            Ok("paragraph inserted".into())
        }
        "toggle_bold" => apply_effect(doc, &mut session.app, &UiEffect::ToggleBold),
        "set_highlight" => {
            let c = match s("color") {
                c if c.eq_ignore_ascii_case("none") => None,
                c => Some(color(c)?),
            };
            apply_effect(doc, &mut session.app, &UiEffect::Highlight(c))
        }
        other => Err(ExecError::UnknownAction(other.to_string())),
    }
}

/// Runs one action whose arguments already satisfy `sig`.
pub(crate) fn run(session: &mut EnvSession, sig: &ActionSignature, args: &Args) -> Result<String, ExecError> {
    let out = match sig.name.as_str() {
        "click_input" => click(session, args),
        "set_edit_text" => set_edit_text(session, args),
        "type_keys" => type_keys(session, args),
        "wheel_mouse_input" => wheel(session, args),
        other => api(session, other, args),
    };
    session.refresh();
    out
}
