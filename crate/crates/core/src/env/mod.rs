//! Deterministic simulated word processor exposing `state()` and `step()`.

pub mod canonical;
pub mod diff;
pub mod document;
pub mod ui;

use std::collections::BTreeMap;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::exec::{ExecutionTrace, Executor, SkillInvocation};
use crate::skill::SkillRegistry;

pub use diff::{diff_content, diff_states, ChangeSet};
pub use document::{AppState, DocumentModel, Selection};
pub use ui::{ControlNode, ControlType, ControlView, Rect, UiMode, UiModel};

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("invalid document: {}", .0.join("; "))]
    InvalidDocument(Vec<String>),
    #[error("unknown skill or action `{0}`")]
    UnknownTarget(String),
    #[error("seed `{0}` not found")]
    SeedNotFound(String),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parsing {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

/// Simulated cost of executing one atomic action, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub tau_ui: f64,
    pub tau_api: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        Self {
            tau_ui: 2.0,
            tau_api: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedFile {
    pub id: String,
    #[serde(default)]
    pub description: String,
    pub document: DocumentModel,
}

impl SeedFile {
    pub fn new(id: impl Into<String>, document: DocumentModel) -> Self {
        Self {
            id: id.into(),
            description: String::new(),
            document,
        }
    }

    pub fn from_json(path: &str, text: &str) -> Result<Self, EnvError> {
        let seed: SeedFile = serde_json::from_str(text).map_err(|source| EnvError::Json {
            path: path.to_string(),
            source,
        })?;
        seed.document.validate()?;
        Ok(seed)
    }
}

/// Loads every `*.json` seed in `dir`, keyed by id.
pub fn load_seed_dir(dir: &Path) -> Result<BTreeMap<String, SeedFile>, EnvError> {
    let io = |source| EnvError::Io {
        path: dir.display().to_string(),
        source,
    };
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    let mut out = BTreeMap::new();
    for p in paths {
        let text = std::fs::read_to_string(&p).map_err(|source| EnvError::Io {
            path: p.display().to_string(),
            source,
        })?;
        let seed = SeedFile::from_json(&p.display().to_string(), &text)?;
        out.insert(seed.id.clone(), seed);
    }
    Ok(out)
}

/// JSON view of the selection used by diffs and checker expressions.
pub fn selection_view(doc: &DocumentModel) -> Value {
    match doc.selection {
        Selection::None => json!({"kind": "none"}),
        Selection::Text {
            paragraph,
            start,
            end,
        } => json!({
            "kind": "text",
            "paragraph": paragraph,
            "start": start,
            "end": end,
            "text": doc.selected_text().unwrap_or_default(),
        }),
        Selection::Table { index } => json!({"kind": "table", "index": index}),
    }
}

/// Observation returned by [`EnvSession::state`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvState {
    pub controls: Vec<ControlView>,
    pub document: DocumentModel,
    pub app: AppState,
    pub active_tab: String,
    pub open_menu: Option<String>,
    pub scroll: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xml_view: Option<String>,
}

impl EnvState {
    /// Digest over the whole observation, UI mode included.
    pub fn digest(&self) -> String {
        canonical::digest_of(self)
    }

    /// Digest over document content and application toggles only.
    pub fn content_digest(&self) -> String {
        content_digest(&self.document, &self.app)
    }

    pub fn control_named(&self, name: &str) -> Option<&ControlView> {
        self.controls.iter().find(|c| c.control_name == name)
    }
}

pub fn content_digest(doc: &DocumentModel, app: &AppState) -> String {
    canonical::digest_of(&json!({"document": doc, "app": app}))
}

/// Restorable copy of everything a step can change.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSnapshot {
    pub document: DocumentModel,
    pub app: AppState,
    pub mode: UiMode,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepResult {
    pub ok: bool,
    pub message: String,
    pub change_set: ChangeSet,
    pub trace: ExecutionTrace,
}

/// One running instance of the simulated application.
#[derive(Debug, Clone)]
pub struct EnvSession {
    seed_id: String,
    pub(crate) document: DocumentModel,
    pub(crate) app: AppState,
    pub(crate) ui: UiModel,
    pub(crate) costs: CostModel,
    pub(crate) clock: f64,
    rng: ChaCha8Rng,
    include_xml: bool,
}

fn rng_for(seed_id: &str) -> ChaCha8Rng {
    let digest = canonical::sha256_hex(seed_id.as_bytes());
    let mut bytes = [0u8; 32];
    hex::decode_to_slice(&digest, &mut bytes).expect("sha256 hex is 32 bytes");
    ChaCha8Rng::from_seed(bytes)
}

impl EnvSession {
    pub fn load(seed: &SeedFile) -> Result<Self, EnvError> {
        Self::with_ui(seed, UiModel::standard())
    }

    pub fn with_ui(seed: &SeedFile, ui: UiModel) -> Result<Self, EnvError> {
        seed.document.validate()?;
        let mut s = Self {
            seed_id: seed.id.clone(),
            document: seed.document.clone(),
            app: AppState::default(),
            ui,
            costs: CostModel::default(),
            clock: 0.0,
            rng: rng_for(&seed.id),
            include_xml: true,
        };
        s.refresh();
        Ok(s)
    }

    /// A session resumed from a snapshot taken in another session.
    pub fn from_snapshot(seed_id: &str, snapshot: &SessionSnapshot) -> Self {
        let mut s = Self {
            seed_id: seed_id.to_string(),
            document: snapshot.document.clone(),
            app: snapshot.app.clone(),
            ui: UiModel::standard(),
            costs: CostModel::default(),
            clock: 0.0,
            rng: rng_for(seed_id),
            include_xml: true,
        };
        s.ui.mode = snapshot.mode.clone();
        s.refresh();
        s
    }

    pub fn with_costs(mut self, costs: CostModel) -> Self {
        self.costs = costs;
        self
    }

    pub fn without_xml(mut self) -> Self {
        self.include_xml = false;
        self
    }

    pub fn seed_id(&self) -> &str {
        &self.seed_id
    }

    pub fn document(&self) -> &DocumentModel {
        &self.document
    }

    pub fn app(&self) -> &AppState {
        &self.app
    }

    pub fn ui(&self) -> &UiModel {
        &self.ui
    }

    /// Simulated seconds spent on executed actions so far.
    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub(crate) fn refresh(&mut self) {
        self.ui.refresh(&self.document, &self.app);
    }

    pub fn snapshot(&self) -> SessionSnapshot {
        SessionSnapshot {
            document: self.document.clone(),
            app: self.app.clone(),
            mode: self.ui.mode.clone(),
        }
    }

    pub fn restore(&mut self, snapshot: &SessionSnapshot) {
        self.document = snapshot.document.clone();
        self.app = snapshot.app.clone();
        self.ui.mode = snapshot.mode.clone();
        self.refresh();
    }

    /// Delta from `snapshot` to the current state.
    pub fn diff_since(&self, snapshot: &SessionSnapshot) -> ChangeSet {
        let mut cs = diff_content(&snapshot.document, &snapshot.app, &self.document, &self.app);
        let mode = &self.ui.mode;
        let vc = |b: Value, a: Value| (b != a).then_some(diff::ValueChange { before: b, after: a });
        cs.active_tab = vc(json!(snapshot.mode.active_tab), json!(mode.active_tab));
        cs.open_menu = vc(json!(snapshot.mode.open_menu), json!(mode.open_menu));
        cs.scroll = vc(json!(snapshot.mode.scroll), json!(mode.scroll));
        cs
    }

    pub fn state(&self) -> EnvState {
        EnvState {
            controls: self.ui.visible_controls(),
            document: self.document.clone(),
            app: self.app.clone(),
            active_tab: self.ui.mode.active_tab.clone(),
            open_menu: self.ui.mode.open_menu.clone(),
            scroll: self.ui.mode.scroll,
            xml_view: self
                .include_xml
                .then(|| canonical::xml_view("document", &self.document)),
        }
    }

    /// Executes a registered skill or a basic/API action. Unknown targets are
    /// rejected without touching the session; failures roll back.
    pub fn step(
        &mut self,
        library: &SkillRegistry,
        invocation: &SkillInvocation,
    ) -> Result<StepResult, EnvError> {
        let executor = Executor::new(library);
        let before = self.snapshot();
        let outcome = if let Some(skill) = library.get(&invocation.target) {
            executor.execute_skill(self, skill, &invocation.args)
        } else if executor.actions().get(&invocation.target).is_some() {
            executor.execute_single(self, &invocation.target, &invocation.args)
        } else {
            return Err(EnvError::UnknownTarget(invocation.target.clone()));
        };
        Ok(match outcome {
            Ok(trace) => StepResult {
                ok: true,
                message: trace
                    .entries
                    .last()
                    .map(|e| e.message.clone())
                    .unwrap_or_default(),
                change_set: self.diff_since(&before),
                trace,
            },
            Err(failure) => {
                self.restore(&before);
                StepResult {
                    ok: false,
                    message: failure.error.to_string(),
                    change_set: ChangeSet::default(),
                    trace: failure.trace,
                }
            }
        })
    }
}
