//! The UI-to-API equivalence table: curated patterns standing in for API
//! documentation, each proven by running both sides from a canonical seed.
//!
//! Template strings may contain `{name}` placeholders. A placeholder binds
//! to a non-empty slice of the matched text, or to a whole `$param` when the
//! template is exactly one placeholder.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::env::{EnvError, EnvSession, SeedFile};
use crate::exec::{ActionRegistry, Args, SkillInvocation, Value};
use crate::skill::ast::{Arg, Expr, Statement, StmtKind};
use crate::skill::SkillRegistry;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepTemplate {
    pub action: String,
    #[serde(default)]
    pub args: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub optional: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiTemplate {
    pub action: String,
    #[serde(default)]
    pub args: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceEntry {
    pub id: String,
    pub doc_excerpt: String,
    pub ui_pattern: Vec<StepTemplate>,
    pub api_call: ApiTemplate,
    /// Placeholder values used to prove the entry.
    #[serde(default)]
    pub example: BTreeMap<String, String>,
    /// Actions run before either side during the proof.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub setup: Vec<SkillInvocation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceTable {
    pub canonical_seed: String,
    pub entries: Vec<EquivalenceEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryProof {
    pub id: String,
    pub ui_digest: String,
    pub api_digest: String,
    pub equal: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// A placeholder binding.
#[derive(Debug, Clone, PartialEq)]
pub enum Bound {
    Text(String),
    Param(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Piece<'a> {
    Lit(&'a str),
    Hole(&'a str),
}

fn pieces(tpl: &str) -> Vec<Piece<'_>> {
    let mut out = Vec::new();
    let mut rest = tpl;
    while let Some(open) = rest.find('{') {
        match rest[open..].find('}') {
            Some(close) => {
                if open > 0 {
                    out.push(Piece::Lit(&rest[..open]));
                }
                out.push(Piece::Hole(&rest[open + 1..open + close]));
                rest = &rest[open + close + 1..];
            }
            None => break,
        }
    }
    if !rest.is_empty() {
        out.push(Piece::Lit(rest));
    }
    out
}

/// The placeholder name when `tpl` is exactly `{name}`.
fn sole_hole(tpl: &str) -> Option<&str> {
    match pieces(tpl).as_slice() {
        [Piece::Hole(h)] => Some(h),
        _ => None,
    }
}

/// Matches `text` against `tpl`, extending `binds`. Backtracks over
/// placeholder extents; every placeholder takes at least one character.
pub fn match_text(tpl: &str, text: &str, binds: &mut BTreeMap<String, Bound>) -> bool {
    fn go(ps: &[Piece], text: &str, binds: &mut BTreeMap<String, Bound>) -> bool {
        match ps.split_first() {
            None => text.is_empty(),
            Some((Piece::Lit(l), rest)) => text.strip_prefix(l).is_some_and(|t| go(rest, t, binds)),
            Some((Piece::Hole(h), rest)) => {
                if let Some(prev) = binds.get(*h).cloned() {
                    return match prev {
                        Bound::Text(v) => text.strip_prefix(v.as_str()).is_some_and(|t| go(rest, t, binds)),
                        Bound::Param(_) => false,
                    };
                }
                let cuts: Vec<usize> = text.char_indices().map(|(i, _)| i).skip(1).chain([text.len()]).collect();
                for cut in cuts {
                    binds.insert(h.to_string(), Bound::Text(text[..cut].to_string()));
                    if go(rest, &text[cut..], binds) {
                        return true;
                    }
                }
                binds.remove(*h);
                false
            }
        }
    }
    let snapshot = binds.clone();
    let ok = go(&pieces(tpl), text, binds);
    if !ok {
        *binds = snapshot;
    }
    ok
}

/// Substitutes text bindings. `None` when a placeholder is unbound or bound
/// to a parameter.
pub fn fill(tpl: &str, binds: &BTreeMap<String, Bound>) -> Option<String> {
    let mut out = String::new();
    for p in pieces(tpl) {
        match p {
            Piece::Lit(l) => out.push_str(l),
            Piece::Hole(h) => match binds.get(h)? {
                Bound::Text(t) => out.push_str(t),
                Bound::Param(_) => return None,
            },
        }
    }
    Some(out)
}

fn match_step(step: &StepTemplate, st: &Statement, binds: &mut BTreeMap<String, Bound>) -> bool {
    if st.kind != StmtKind::Call || st.target != step.action {
        return false;
    }
    let args = st.args.as_deref().unwrap_or(&[]);
    if args.len() != step.args.len() || args.iter().any(|a| !step.args.contains_key(&a.key)) {
        return false;
    }
    let snapshot = binds.clone();
    for a in args {
        let tpl = &step.args[&a.key];
        let ok = match &a.value {
            Expr::Lit(v) => match_text(tpl, &v.render(), binds),
            Expr::Param(p) => match sole_hole(tpl) {
                Some(h) => match binds.get(h) {
                    Some(Bound::Param(q)) => q == p,
                    Some(Bound::Text(_)) => false,
                    None => {
                        binds.insert(h.to_string(), Bound::Param(p.clone()));
                        true
                    }
                },
                None => false,
            },
        };
        if !ok {
            *binds = snapshot;
            return false;
        }
    }
    true
}

impl EquivalenceEntry {
    /// Tries to match the pattern at the start of `stmts`. Returns the
    /// number of statements consumed and the bindings.
    pub fn match_at(&self, stmts: &[Statement]) -> Option<(usize, BTreeMap<String, Bound>)> {
        fn go(
            steps: &[StepTemplate],
            stmts: &[Statement],
            used: usize,
            binds: &mut BTreeMap<String, Bound>,
        ) -> Option<usize> {
            let Some((step, rest)) = steps.split_first() else {
                return Some(used);
            };
            if let Some(st) = stmts.get(used) {
                let snapshot = binds.clone();
                if match_step(step, st, binds) {
                    if let Some(n) = go(rest, stmts, used + 1, binds) {
                        return Some(n);
                    }
                }
                *binds = snapshot;
            }
            if step.optional {
                go(rest, stmts, used, binds)
            } else {
                None
            }
        }
        let mut binds = BTreeMap::new();
        let n = go(&self.ui_pattern, stmts, 0, &mut binds)?;
        (n > 0).then_some((n, binds))
    }

    /// The API statement for a set of bindings, with literals cast to the
    /// signature types. `None` when a cast fails.
    pub fn api_statement(&self, binds: &BTreeMap<String, Bound>) -> Option<Statement> {
        let sig = ActionRegistry::standard().get(&self.api_call.action)?;
        let mut args = Vec::new();
        for (key, tpl) in &self.api_call.args {
            let ty = sig.arg_type(key)?;
            let value = match sole_hole(tpl).and_then(|h| binds.get(h)) {
                Some(Bound::Param(p)) => Expr::Param(p.clone()),
                _ => Expr::Lit(Value::Str(fill(tpl, binds)?).cast(ty)?),
            };
            args.push(Arg {
                key: key.clone(),
                value,
            });
        }
        Some(Statement::call(&self.api_call.action, args))
    }

    fn binds_of(example: &BTreeMap<String, String>) -> BTreeMap<String, Bound> {
        example
            .iter()
            .map(|(k, v)| (k.clone(), Bound::Text(v.clone())))
            .collect()
    }

    fn instantiate(action: &str, args: &BTreeMap<String, String>, binds: &BTreeMap<String, Bound>) -> Result<SkillInvocation, String> {
        let sig = ActionRegistry::standard()
            .get(action)
            .ok_or_else(|| format!("unknown action `{action}`"))?;
        let mut out = Args::new();
        for (k, tpl) in args {
            let ty = sig.arg_type(k).ok_or_else(|| format!("`{action}` has no argument `{k}`"))?;
            let text = fill(tpl, binds).ok_or_else(|| format!("unbound placeholder in `{tpl}`"))?;
            let v = Value::Str(text.clone())
                .cast(ty)
                .ok_or_else(|| format!("`{text}` is not a {ty}"))?;
            out.insert(k.clone(), v);
        }
        Ok(SkillInvocation {
            target: action.to_string(),
            args: out,
        })
    }

    /// Both sides instantiated with the example bindings.
    pub fn example_sides(&self) -> Result<(Vec<SkillInvocation>, SkillInvocation), String> {
        self.sides_with(&self.example)
    }

    /// Both sides instantiated with explicit placeholder values.
    pub fn sides_with(&self, example: &BTreeMap<String, String>) -> Result<(Vec<SkillInvocation>, SkillInvocation), String> {
        let binds = Self::binds_of(example);
        let ui = self
            .ui_pattern
            .iter()
            .map(|s| Self::instantiate(&s.action, &s.args, &binds))
            .collect::<Result<Vec<_>, _>>()?;
        let api = Self::instantiate(&self.api_call.action, &self.api_call.args, &binds)?;
        Ok((ui, api))
    }

    /// Runs setup then each side from `seed` and compares content digests.
    pub fn prove(&self, seed: &SeedFile) -> EntryProof {
        self.prove_with(seed, &self.example)
    }

    /// [`prove`](Self::prove) with explicit placeholder values.
    pub fn prove_with(&self, seed: &SeedFile, example: &BTreeMap<String, String>) -> EntryProof {
        let fail = |e: String| EntryProof {
            id: self.id.clone(),
            ui_digest: String::new(),
            api_digest: String::new(),
            equal: false,
            error: Some(e),
        };
        let (ui, api) = match self.sides_with(example) {
            Ok(x) => x,
            Err(e) => return fail(e),
        };
        let run = |steps: &[SkillInvocation]| -> Result<String, String> {
            let lib = SkillRegistry::new();
            let mut s = EnvSession::load(seed).map_err(|e| e.to_string())?;
            for inv in self.setup.iter().chain(steps) {
                let r = s.step(&lib, inv).map_err(|e| e.to_string())?;
                if !r.ok {
                    return Err(format!("{}: {}", inv.render(), r.message));
                }
            }
            Ok(s.state().content_digest())
        };
        match (run(&ui), run(std::slice::from_ref(&api))) {
            (Ok(u), Ok(a)) => EntryProof {
                id: self.id.clone(),
                equal: u == a,
                ui_digest: u,
                api_digest: a,
                error: None,
            },
            (Err(e), _) | (_, Err(e)) => fail(e),
        }
    }
}

impl EquivalenceTable {
    pub fn load(path: &Path) -> Result<Self, EnvError> {
        let p = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| EnvError::Io { path: p.clone(), source })?;
        serde_json::from_str(&text).map_err(|source| EnvError::Json { path: p, source })
    }

    pub fn prove_all(&self, seed: &SeedFile) -> Vec<EntryProof> {
        self.entries.iter().map(|e| e.prove(seed)).collect()
    }

    /// Entries whose proof holds, in table order.
    pub fn validated(&self, seed: &SeedFile) -> Vec<EquivalenceEntry> {
        self.entries
            .iter()
            .filter(|e| e.prove(seed).equal)
            .cloned()
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn text(b: &BTreeMap<String, Bound>, k: &str) -> String {
        match &b[k] {
            Bound::Text(t) => t.clone(),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn grid_template() {
        let mut b = BTreeMap::new();
        assert!(match_text("{rows}x{cols} Table", "2x3 Table", &mut b));
        assert_eq!((text(&b, "rows"), text(&b, "cols")), ("2".into(), "3".into()));
        let mut b = BTreeMap::new();
        assert!(!match_text("{rows}x{cols} Table", "Table", &mut b));
        assert!(b.is_empty());
    }

    #[test]
    fn repeated_placeholder_must_agree() {
        let mut b = BTreeMap::new();
        assert!(match_text("{a}-{a}", "x-x", &mut b));
        let mut b = BTreeMap::new();
        assert!(!match_text("{a}-{a}", "x-y", &mut b));
    }

    fn click(name: &str) -> Statement {
        Statement::call(
            "click_input",
            vec![Arg {
                key: "control_name".into(),
                value: Expr::Lit(Value::from(name)),
            }],
        )
    }

    fn step(name: &str, optional: bool) -> StepTemplate {
        StepTemplate {
            action: "click_input".into(),
            args: [("control_name".to_string(), name.to_string())].into(),
            optional,
        }
    }

    fn table_entry() -> EquivalenceEntry {
        EquivalenceEntry {
            id: "table".into(),
            doc_excerpt: String::new(),
            ui_pattern: vec![step("Insert", true), step("Table", false), step("{rows}x{cols} Table", false)],
            api_call: ApiTemplate {
                action: "tables_add".into(),
                args: [("rows".to_string(), "{rows}".to_string()), ("cols".to_string(), "{cols}".to_string())].into(),
            },
            example: [("rows".to_string(), "2".to_string()), ("cols".to_string(), "2".to_string())].into(),
            setup: vec![],
        }
    }

    #[test]
    fn optional_tab_click() {
        let e = table_entry();
        let with_tab = [click("Insert"), click("Table"), click("2x2 Table")];
        let (n, b) = e.match_at(&with_tab).unwrap();
        assert_eq!(n, 3);
        let api = e.api_statement(&b).unwrap();
        assert_eq!(api.arg("rows"), Some(&Expr::Lit(Value::Num(2.0))));
        assert_eq!(e.match_at(&with_tab[1..]).unwrap().0, 2);
        assert!(e.match_at(&with_tab[2..]).is_none());
    }

    #[test]
    fn entry_proof_holds() {
        let seed = SeedFile::new("canonical", Default::default());
        let p = table_entry().prove(&seed);
        assert!(p.equal, "{p:?}");
    }
}
