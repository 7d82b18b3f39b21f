//! Ribbon UI model: the control tree, its visibility rules, and the
//! domain effect bound to each control.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::document::{
    Alignment, AppState, DocumentModel, PaperSize, ShapeKind, TextDirection, Watermark,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ControlType {
    Window,
    Pane,
    TabItem,
    Group,
    Button,
    SplitButton,
    MenuItem,
    Edit,
    ComboBox,
    Document,
    Grid,
    DataItem,
}

impl ControlType {
    /// Controls that accept `set_edit_text`.
    pub fn is_editable(self) -> bool {
        matches!(
            self,
            ControlType::Edit | ControlType::ComboBox | ControlType::Document
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Rect {
    pub left: i32,
    pub top: i32,
    pub right: i32,
    pub bottom: i32,
}

impl Rect {
    pub const fn new(left: i32, top: i32, right: i32, bottom: i32) -> Self {
        Self {
            left,
            top,
            right,
            bottom,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlNode {
    pub control_id: String,
    pub control_name: String,
    pub control_type: ControlType,
    #[serde(default)]
    pub rect: Rect,
    #[serde(default = "yes")]
    pub visible: bool,
    #[serde(default = "yes")]
    pub enabled: bool,
    #[serde(default)]
    pub selected: bool,
    #[serde(default)]
    pub api_enabled: bool,
    #[serde(default)]
    pub children: Vec<ControlNode>,
}

fn yes() -> bool {
    true
}

impl ControlNode {
    pub fn new(id: impl Into<String>, name: impl Into<String>, ty: ControlType) -> Self {
        Self {
            control_id: id.into(),
            control_name: name.into(),
            control_type: ty,
            rect: Rect::default(),
            visible: true,
            enabled: true,
            selected: false,
            api_enabled: false,
            children: Vec::new(),
        }
    }

    pub fn with_children(mut self, children: Vec<ControlNode>) -> Self {
        self.children = children;
        self
    }

    /// Pre-order traversal.
    pub fn walk(&self) -> Vec<&ControlNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(n.children.iter().rev());
        }
        out
    }

    pub fn count(&self) -> usize {
        1 + self.children.iter().map(ControlNode::count).sum::<usize>()
    }

    pub fn find(&self, id: &str) -> Option<&ControlNode> {
        self.walk().into_iter().find(|n| n.control_id == id)
    }

    pub fn find_by_name(&self, name: &str) -> Option<&ControlNode> {
        self.walk().into_iter().find(|n| n.control_name == name)
    }

    /// Ids that occur more than once in the tree.
    pub fn duplicate_ids(&self) -> Vec<String> {
        let mut seen = BTreeMap::<&str, usize>::new();
        for n in self.walk() {
            *seen.entry(n.control_id.as_str()).or_default() += 1;
        }
        seen.into_iter()
            .filter(|(_, c)| *c > 1)
            .map(|(id, _)| id.to_string())
            .collect()
    }
}

/// A flattened, visible control as reported by `state()`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlView {
    pub control_id: String,
    pub control_name: String,
    pub control_type: ControlType,
    pub rect: Rect,
    pub selected: bool,
    pub parent_id: Option<String>,
    pub depth: usize,
}

/// What clicking a control does beyond the structural default
/// (tab switch, menu toggle, focus).
#[derive(Debug, Clone, PartialEq)]
pub enum UiEffect {
    ToggleBold,
    Align(Alignment),
    Heading(u8),
    Highlight(Option<&'static str>),
    ToggleDictation,
    InsertTable { rows: u32, cols: u32 },
    InsertShape(ShapeKind),
    ShapeFill(&'static str),
    PaperSize(PaperSize),
    TextDirection(TextDirection),
    Watermark(Watermark),
}

/// What `set_edit_text` on an editable control writes to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditTarget {
    FontName,
    FontSize,
    Header,
    Footer,
    ShapeWidth,
    ShapeHeight,
    Search,
    Document,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UiMode {
    pub active_tab: String,
    pub open_menu: Option<String>,
    pub scroll: i64,
}

impl Default for UiMode {
    fn default() -> Self {
        Self {
            active_tab: "Home".to_string(),
            open_menu: None,
            scroll: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct UiModel {
    root: ControlNode,
    effects: BTreeMap<String, UiEffect>,
    edits: BTreeMap<String, EditTarget>,
    pub mode: UiMode,
}

/// Controls that only make sense once a shape exists.
const SHAPE_FORMAT: &[&str] = &["Shape Width", "Shape Height", "Shape Fill"];

impl UiModel {
    /// The standard ribbon: Home, Insert, Design and Layout tabs plus the
    /// search box and the document canvas.
    pub fn standard() -> Self {
        let mut b = TreeBuilder::default();
        let root = b.build();
        Self {
            root,
            effects: b.effects,
            edits: b.edits,
            mode: UiMode::default(),
        }
    }

    /// A model over an arbitrary tree with structural behaviour only.
    pub fn from_tree(root: ControlNode) -> Self {
        let active = root
            .children
            .iter()
            .find(|c| c.control_type == ControlType::TabItem)
            .map(|c| c.control_name.clone())
            .unwrap_or_default();
        Self {
            root,
            effects: BTreeMap::new(),
            edits: BTreeMap::new(),
            mode: UiMode {
                active_tab: active,
                ..UiMode::default()
            },
        }
    }

    pub fn root(&self) -> &ControlNode {
        &self.root
    }

    pub fn effect(&self, id: &str) -> Option<&UiEffect> {
        self.effects.get(id)
    }

    pub fn edit_target(&self, id: &str) -> Option<EditTarget> {
        self.edits.get(id).copied()
    }

    pub fn node(&self, id: &str) -> Option<&ControlNode> {
        self.root.find(id)
    }

    pub fn tab_names(&self) -> Vec<String> {
        self.root
            .walk()
            .into_iter()
            .filter(|n| n.control_type == ControlType::TabItem)
            .map(|n| n.control_name.clone())
            .collect()
    }

    /// Recomputes the visible/enabled/selected flags from the mode and content.
    pub fn refresh(&mut self, doc: &DocumentModel, app: &AppState) {
        let has_shapes = !doc.shapes.is_empty();
        let para = doc.selected_paragraph().and_then(|i| doc.paragraphs.get(i));
        let mode = self.mode.clone();
        let effects = &self.effects;
        fn visit(
            node: &mut ControlNode,
            parent_visible: bool,
            parent: Option<(&str, ControlType)>,
            ctx: &dyn Fn(&ControlNode) -> (bool, bool),
            mode: &UiMode,
        ) {
            let structurally_visible = match parent {
                None => true,
                Some((_, ControlType::Window)) => true,
                Some((pname, ControlType::TabItem)) => mode.active_tab == pname,
                Some(_) => false,
            };
            let (enabled, selected) = ctx(node);
            node.enabled = enabled;
            node.selected = selected;
            node.visible = parent_visible && structurally_visible;
            let id = node.control_id.clone();
            let name = node.control_name.clone();
            let ty = node.control_type;
            let menu_open = mode.open_menu.as_deref() == Some(id.as_str());
            for c in node.children.iter_mut() {
                let pv = node.visible && node.enabled;
                if ty == ControlType::TabItem || ty == ControlType::Window {
                    visit(c, pv, Some((&name, ty)), ctx, mode);
                } else {
                    visit(c, pv && menu_open, Some((&name, ControlType::Window)), ctx, mode);
                }
            }
        }
        let ctx = |n: &ControlNode| -> (bool, bool) {
            let enabled = if SHAPE_FORMAT.contains(&n.control_name.as_str()) {
                has_shapes
            } else {
                true
            };
            let selected = match (n.control_type, effects.get(&n.control_id)) {
                (ControlType::TabItem, _) => n.control_name == mode.active_tab,
                (_, Some(UiEffect::ToggleBold)) => para.map(|p| p.bold).unwrap_or(false),
                (_, Some(UiEffect::Align(a))) => para.map(|p| p.alignment == *a).unwrap_or(false),
                (_, Some(UiEffect::ToggleDictation)) => app.dictation,
                _ => mode.open_menu.as_deref() == Some(n.control_id.as_str()),
            };
            (enabled, selected)
        };
        visit(&mut self.root, true, None, &ctx, &mode);
    }

    /// Visible and enabled controls in document order.
    pub fn visible_controls(&self) -> Vec<ControlView> {
        let mut out = Vec::new();
        fn go(n: &ControlNode, parent: Option<&str>, depth: usize, out: &mut Vec<ControlView>) {
            if !n.visible {
                return;
            }
            if n.enabled {
                out.push(ControlView {
                    control_id: n.control_id.clone(),
                    control_name: n.control_name.clone(),
                    control_type: n.control_type,
                    rect: n.rect,
                    selected: n.selected,
                    parent_id: parent.map(str::to_string),
                    depth,
                });
            }
            for c in &n.children {
                go(c, Some(&n.control_id), depth + 1, out);
            }
        }
        go(&self.root, None, 0, &mut out);
        out
    }
}

#[derive(Default)]
struct TreeBuilder {
    next: u32,
    effects: BTreeMap<String, UiEffect>,
    edits: BTreeMap<String, EditTarget>,
}

enum Spec {
    Leaf(&'static str, ControlType, Option<UiEffect>),
    Field(&'static str, ControlType, EditTarget),
    Menu(&'static str, ControlType, Vec<Spec>),
    Owned(String, ControlType, Option<UiEffect>),
}

impl TreeBuilder {
    fn id(&mut self) -> String {
        let id = self.next.to_string();
        self.next += 1;
        id
    }

    fn make(&mut self, spec: Spec, rect: Rect, child_layout: Layout) -> ControlNode {
        let id = self.id();
        match spec {
            Spec::Leaf(name, ty, effect) => {
                if let Some(e) = effect {
                    self.effects.insert(id.clone(), e);
                }
                let mut n = ControlNode::new(id, name, ty);
                n.rect = rect;
                n
            }
            Spec::Owned(name, ty, effect) => {
                if let Some(e) = effect {
                    self.effects.insert(id.clone(), e);
                }
                let mut n = ControlNode::new(id, name, ty);
                n.rect = rect;
                n
            }
            Spec::Field(name, ty, target) => {
                self.edits.insert(id.clone(), target);
                let mut n = ControlNode::new(id, name, ty);
                n.rect = rect;
                n
            }
            Spec::Menu(name, ty, children) => {
                let mut n = ControlNode::new(id, name, ty);
                n.rect = rect;
                for (k, c) in children.into_iter().enumerate() {
                    let r = child_layout.place(rect, k);
                    let child = self.make(c, r, Layout::Dropdown);
                    n.children.push(child);
                }
                n
            }
        }
    }

    fn build(&mut self) -> ControlNode {
        use ControlType::*;
        use Spec::*;
        let colors = |names: &[&'static str], effect: fn(&'static str) -> UiEffect| -> Vec<Spec> {
            names
                .iter()
                .map(|n| Owned(n.to_string(), MenuItem, Some(effect(super::document::parse_color(n).unwrap_or("black")))))
                .collect()
        };
        let mut highlight = colors(&["Yellow", "Green", "Turquoise", "Red"], |c| {
            UiEffect::Highlight(Some(c))
        });
        highlight.push(Leaf("None", MenuItem, Some(UiEffect::Highlight(None))));

        let home = Menu(
            "Home",
            TabItem,
            vec![
                Leaf("Bold", Button, Some(UiEffect::ToggleBold)),
                Field("Font Name", ComboBox, EditTarget::FontName),
                Field("Font Size", ComboBox, EditTarget::FontSize),
                Menu("Highlight Color", SplitButton, highlight),
                Leaf("Left", Button, Some(UiEffect::Align(Alignment::Left))),
                Leaf("Center", Button, Some(UiEffect::Align(Alignment::Center))),
                Leaf("Right", Button, Some(UiEffect::Align(Alignment::Right))),
                Leaf("Justify", Button, Some(UiEffect::Align(Alignment::Justify))),
                Leaf("Normal", Button, Some(UiEffect::Heading(0))),
                Leaf("Heading 1", Button, Some(UiEffect::Heading(1))),
                Leaf("Heading 2", Button, Some(UiEffect::Heading(2))),
                Leaf("Heading 3", Button, Some(UiEffect::Heading(3))),
                Leaf("Dictate", Button, Some(UiEffect::ToggleDictation)),
            ],
        );

        let mut grid = Vec::new();
        for r in 1..=4u32 {
            for c in 1..=4u32 {
                grid.push(Owned(
                    format!("{r}x{c} Table"),
                    DataItem,
                    Some(UiEffect::InsertTable { rows: r, cols: c }),
                ));
            }
        }
        let insert = Menu(
            "Insert",
            TabItem,
            vec![
                Menu("Table", Button, grid),
                Menu(
                    "Shapes",
                    Button,
                    vec![
                        Leaf("Rectangle", MenuItem, Some(UiEffect::InsertShape(ShapeKind::Rectangle))),
                        Leaf("Circle", MenuItem, Some(UiEffect::InsertShape(ShapeKind::Circle))),
                    ],
                ),
                Field("Shape Width", Edit, EditTarget::ShapeWidth),
                Field("Shape Height", Edit, EditTarget::ShapeHeight),
                Menu(
                    "Shape Fill",
                    SplitButton,
                    colors(&["Red", "Yellow", "Green", "Blue", "Black"], UiEffect::ShapeFill),
                ),
                Menu("Header", Button, vec![Field("Header Edit", Edit, EditTarget::Header)]),
                Menu("Footer", Button, vec![Field("Footer Edit", Edit, EditTarget::Footer)]),
            ],
        );

        let design = Menu(
            "Design",
            TabItem,
            vec![Menu(
                "Watermark",
                Button,
                vec![
                    Leaf("Confidential 1", MenuItem, Some(UiEffect::Watermark(Watermark::Confidential1))),
                    Leaf("Confidential 2", MenuItem, Some(UiEffect::Watermark(Watermark::Confidential2))),
                    Leaf("Do Not Copy 1", MenuItem, Some(UiEffect::Watermark(Watermark::DoNotCopy1))),
                    Leaf("Draft 1", MenuItem, Some(UiEffect::Watermark(Watermark::Draft1))),
                    Leaf("Urgent 1", MenuItem, Some(UiEffect::Watermark(Watermark::Urgent1))),
                ],
            )],
        );

        let layout = Menu(
            "Layout",
            TabItem,
            vec![
                Menu(
                    "Size",
                    Button,
                    PaperSize::ALL
                        .iter()
                        .map(|p| Owned(p.as_str(), MenuItem, Some(UiEffect::PaperSize(*p))))
                        .collect(),
                ),
                Menu(
                    "Text Direction",
                    Button,
                    vec![
                        Leaf("Horizontal", MenuItem, Some(UiEffect::TextDirection(TextDirection::Horizontal))),
                        Leaf("Vertical", MenuItem, Some(UiEffect::TextDirection(TextDirection::Vertical))),
                    ],
                ),
            ],
        );

        let window_rect = Rect::new(0, 0, 1280, 800);
        let root_id = self.id();
        let mut root = ControlNode::new(root_id, "SimDoc", Window);
        root.rect = window_rect;
        for (i, tab) in [home, insert, design, layout].into_iter().enumerate() {
            let left = 10 + 80 * i as i32;
            let r = Rect::new(left, 30, left + 70, 54);
            let node = self.make(tab, r, Layout::Ribbon);
            root.children.push(node);
        }
        let search = self.make(
            Field("Search", Edit, EditTarget::Search),
            Rect::new(1000, 4, 1270, 26),
            Layout::Dropdown,
        );
        root.children.push(search);
        let canvas = self.make(
            Field("Document", Document, EditTarget::Document),
            Rect::new(10, 110, 1270, 790),
            Layout::Dropdown,
        );
        root.children.push(canvas);
        root
    }
}

#[derive(Clone, Copy)]
enum Layout {
    Ribbon,
    Dropdown,
}

impl Layout {
    fn place(self, parent: Rect, k: usize) -> Rect {
        let k = k as i32;
        match self {
            Layout::Ribbon => {
                let left = 10 + 84 * k;
                Rect::new(left, 60, left + 80, 100)
            }
            Layout::Dropdown => {
                let top = parent.bottom + 2 + 22 * k;
                Rect::new(parent.left, top, parent.left + 120, top + 20)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn refreshed() -> UiModel {
        let mut ui = UiModel::standard();
        ui.refresh(&DocumentModel::default(), &AppState::default());
        ui
    }

    #[test]
    fn ids_are_unique() {
        assert!(UiModel::standard().root().duplicate_ids().is_empty());
    }

    #[test]
    fn home_is_the_initial_tab() {
        let ui = refreshed();
        let names: Vec<_> = ui.visible_controls().into_iter().map(|c| c.control_name).collect();
        assert!(names.contains(&"Bold".to_string()));
        assert!(!names.contains(&"Table".to_string()));
        assert!(!names.contains(&"Yellow".to_string()));
    }

    #[test]
    fn hidden_parents_hide_descendants() {
        let ui = refreshed();
        fn check(n: &ControlNode) {
            if !n.visible {
                assert!(n.walk().iter().all(|d| !d.visible), "{} leaks", n.control_name);
            }
            n.children.iter().for_each(check);
        }
        check(ui.root());
    }

    #[test]
    fn open_menu_reveals_children() {
        let mut ui = refreshed();
        let id = ui.root().find_by_name("Highlight Color").unwrap().control_id.clone();
        ui.mode.open_menu = Some(id);
        ui.refresh(&DocumentModel::default(), &AppState::default());
        assert!(ui.visible_controls().iter().any(|c| c.control_name == "Yellow"));
    }

    #[test]
    fn shape_format_disabled_without_shapes() {
        let mut ui = refreshed();
        ui.mode.active_tab = "Insert".into();
        ui.refresh(&DocumentModel::default(), &AppState::default());
        assert!(!ui.visible_controls().iter().any(|c| c.control_name == "Shape Fill"));
    }
}
