//! Ground-truth content of the simulated word processor.
//!
//! Everything a skill can change lives here (plus the small [`AppState`]
//! for application toggles that are not document content). The JSON form
//! of these types is the seed-file schema.

use serde::{Deserialize, Serialize};

use super::EnvError;

pub const DEFAULT_FONT: &str = "Calibri";
pub const DEFAULT_FONT_SIZE: f64 = 11.0;
pub const MAX_HEADING_LEVEL: u8 = 9;

/// Color names accepted for shape fills and highlights.
pub const PALETTE: &[&str] = &[
    "black",
    "blue",
    "gray",
    "green",
    "orange",
    "purple",
    "red",
    "turquoise",
    "white",
    "yellow",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Alignment {
    #[default]
    Left,
    Center,
    Right,
    Justify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
pub enum PaperSize {
    #[default]
    Letter,
    Legal,
    A4,
    A5,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TextDirection {
    #[default]
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Watermark {
    Confidential1,
    Confidential2,
    #[serde(rename = "donotcopy1")]
    DoNotCopy1,
    Draft1,
    Urgent1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    Rectangle,
    Circle,
}

/// Lowercases and strips everything but ASCII alphanumerics, so that
/// "Confidential 1", "confidential1" and "CONFIDENTIAL-1" compare equal.
pub fn normalize_name(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

macro_rules! parse_by_name {
    ($ty:ty, [$($variant:expr),* $(,)?]) => {
        impl $ty {
            pub const ALL: &'static [$ty] = &[$($variant),*];

            /// Case- and punctuation-insensitive lookup by the serialized name.
            pub fn parse(s: &str) -> Option<Self> {
                let wanted = normalize_name(s);
                Self::ALL.iter().copied().find(|v| normalize_name(&v.as_str()) == wanted)
            }

            pub fn as_str(&self) -> String {
                match serde_json::to_value(self) {
                    Ok(serde_json::Value::String(s)) => s,
                    _ => unreachable!("unit enum serializes to a string"),
                }
            }
        }
    };
}

parse_by_name!(
    Alignment,
    [Alignment::Left, Alignment::Center, Alignment::Right, Alignment::Justify]
);
parse_by_name!(
    PaperSize,
    [PaperSize::Letter, PaperSize::Legal, PaperSize::A4, PaperSize::A5]
);
parse_by_name!(TextDirection, [TextDirection::Horizontal, TextDirection::Vertical]);
parse_by_name!(
    Watermark,
    [
        Watermark::Confidential1,
        Watermark::Confidential2,
        Watermark::DoNotCopy1,
        Watermark::Draft1,
        Watermark::Urgent1,
    ]
);
parse_by_name!(ShapeKind, [ShapeKind::Rectangle, ShapeKind::Circle]);

/// Returns the canonical palette name for `s`, if it is a known color.
pub fn parse_color(s: &str) -> Option<&'static str> {
    let wanted = normalize_name(s);
    PALETTE.iter().copied().find(|c| *c == wanted)
}

fn default_font() -> String {
    DEFAULT_FONT.to_string()
}

fn default_font_size() -> f64 {
    DEFAULT_FONT_SIZE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Paragraph {
    pub text: String,
    #[serde(default = "default_font")]
    pub font_name: String,
    #[serde(default = "default_font_size")]
    pub font_size: f64,
    #[serde(default)]
    pub alignment: Alignment,
    #[serde(default)]
    pub heading_level: u8,
    #[serde(default)]
    pub bold: bool,
    #[serde(default)]
    pub highlight: Option<String>,
}

impl Paragraph {
    pub fn new(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            font_name: default_font(),
            font_size: DEFAULT_FONT_SIZE,
            alignment: Alignment::Left,
            heading_level: 0,
            bold: false,
            highlight: None,
        }
    }

    pub fn char_len(&self) -> usize {
        self.text.chars().count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub rows: u32,
    pub cols: u32,
    pub cells: Vec<Vec<String>>,
}

impl Table {
    pub fn empty(rows: u32, cols: u32) -> Self {
        Self {
            rows,
            cols,
            cells: vec![vec![String::new(); cols as usize]; rows as usize],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shape {
    pub kind: ShapeKind,
    pub width: f64,
    pub height: f64,
    pub fill_color: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct PageSetup {
    #[serde(default)]
    pub paper_size: PaperSize,
    #[serde(default)]
    pub text_direction: TextDirection,
    #[serde(default)]
    pub watermark: Option<Watermark>,
}

/// Current selection. Text spans are in characters, end-exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Selection {
    #[default]
    None,
    Text {
        paragraph: usize,
        start: usize,
        end: usize,
    },
    Table {
        index: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct DocumentModel {
    #[serde(default)]
    pub paragraphs: Vec<Paragraph>,
    #[serde(default)]
    pub tables: Vec<Table>,
    #[serde(default)]
    pub header: String,
    #[serde(default)]
    pub footer: String,
    #[serde(default)]
    pub shapes: Vec<Shape>,
    #[serde(default)]
    pub page: PageSetup,
    #[serde(default)]
    pub selection: Selection,
}

impl DocumentModel {
    /// Checks every structural invariant and returns all violations.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, p) in self.paragraphs.iter().enumerate() {
            if !(p.font_size > 0.0 && p.font_size.is_finite()) {
                out.push(format!("paragraphs[{i}].font_size must be > 0"));
            }
            if p.heading_level > MAX_HEADING_LEVEL {
                out.push(format!("paragraphs[{i}].heading_level must be 0..=9"));
            }
            if p.font_name.trim().is_empty() {
                out.push(format!("paragraphs[{i}].font_name is empty"));
            }
            if let Some(h) = &p.highlight {
                if parse_color(h) != Some(h.as_str()) {
                    out.push(format!("paragraphs[{i}].highlight {h:?} is not a palette color"));
                }
            }
        }
        for (i, t) in self.tables.iter().enumerate() {
            if t.rows == 0 || t.cols == 0 {
                out.push(format!("tables[{i}] must have rows > 0 and cols > 0"));
            }
            if t.cells.len() != t.rows as usize
                || t.cells.iter().any(|r| r.len() != t.cols as usize)
            {
                out.push(format!(
                    "tables[{i}] cell grid does not match {}x{}",
                    t.rows, t.cols
                ));
            }
        }
        for (i, s) in self.shapes.iter().enumerate() {
            if !(s.width > 0.0 && s.width.is_finite()) || !(s.height > 0.0 && s.height.is_finite())
            {
                out.push(format!("shapes[{i}] width and height must be > 0"));
            }
            if parse_color(&s.fill_color) != Some(s.fill_color.as_str()) {
                out.push(format!("shapes[{i}].fill_color {:?} is not a palette color", s.fill_color));
            }
        }
        match self.selection {
            Selection::None => {}
            Selection::Text {
                paragraph,
                start,
                end,
            } => match self.paragraphs.get(paragraph) {
                None => out.push(format!("selection references missing paragraph {paragraph}")),
                Some(p) if start > end || end > p.char_len() => {
                    out.push(format!("selection span {start}..{end} out of range"))
                }
                _ => {}
            },
            Selection::Table { index } => {
                if index >= self.tables.len() {
                    out.push(format!("selection references missing table {index}"));
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(EnvError::InvalidDocument(v))
        }
    }

    /// The currently selected text, if the selection is a text span.
    pub fn selected_text(&self) -> Option<String> {
        match self.selection {
            Selection::Text {
                paragraph,
                start,
                end,
            } => self
                .paragraphs
                .get(paragraph)
                .map(|p| p.text.chars().skip(start).take(end - start).collect()),
            _ => None,
        }
    }

    /// Index of the paragraph under a text selection.
    pub fn selected_paragraph(&self) -> Option<usize> {
        match self.selection {
            Selection::Text { paragraph, .. } => Some(paragraph),
            _ => None,
        }
    }

    /// Finds the first occurrence of `needle` and returns (paragraph, start, end) in chars.
    pub fn find_text(&self, needle: &str) -> Option<(usize, usize, usize)> {
        if needle.is_empty() {
            return None;
        }
        self.paragraphs.iter().enumerate().find_map(|(i, p)| {
            p.text.find(needle).map(|byte| {
                let start = p.text[..byte].chars().count();
                (i, start, start + needle.chars().count())
            })
        })
    }
}

/// Application toggles observable in state but outside the document body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct AppState {
    #[serde(default)]
    pub dictation: bool,
    #[serde(default)]
    pub search_query: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_valid() {
        assert!(DocumentModel::default().violations().is_empty());
    }

    #[test]
    fn ragged_table_is_rejected() {
        let mut doc = DocumentModel::default();
        let mut t = Table::empty(2, 2);
        t.cells[1].pop();
        doc.tables.push(t);
        assert_eq!(doc.violations().len(), 1);
    }

    #[test]
    fn dangling_selection_is_rejected() {
        let doc = DocumentModel {
            selection: Selection::Table { index: 0 },
            ..Default::default()
        };
        assert!(doc.validate().is_err());
    }

    #[test]
    fn find_text_uses_char_offsets() {
        let doc = DocumentModel {
            paragraphs: vec![Paragraph::new("héllo wörld")],
            ..Default::default()
        };
        assert_eq!(doc.find_text("wörld"), Some((0, 6, 11)));
        let mut doc = doc;
        doc.selection = Selection::Text {
            paragraph: 0,
            start: 6,
            end: 11,
        };
        assert_eq!(doc.selected_text().as_deref(), Some("wörld"));
    }

    #[test]
    fn enum_names_parse_loosely() {
        assert_eq!(Watermark::parse("Confidential 1"), Some(Watermark::Confidential1));
        assert_eq!(PaperSize::parse("a4"), Some(PaperSize::A4));
        assert_eq!(Alignment::parse("Center"), Some(Alignment::Center));
        assert_eq!(ShapeKind::parse("Circle"), Some(ShapeKind::Circle));
        assert_eq!(parse_color("Red"), Some("red"));
        assert_eq!(Watermark::DoNotCopy1.as_str(), "donotcopy1");
    }
}
