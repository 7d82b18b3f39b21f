//! Trajectory recording and segmentation at instruction boundaries.

use std::collections::BTreeSet;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::env::{diff_content, ChangeSet, EnvSession, SeedFile, SessionSnapshot};
use crate::planner::{Candidate, Planner, PlannerError, QueryContext};
use crate::skill::SkillRegistry;

use super::trajectory::{Origin, RecordResult, Trajectory};

/// Cap on actions the follow role may take for one instruction step.
pub const MAX_ACTIONS_PER_STEP: usize = 4;

/// A trajectory plus the session snapshot at every record boundary:
/// `snapshots[i]` precedes record `i` and the last one follows the final
/// record.
#[derive(Debug, Clone)]
pub struct Recording {
    pub trajectory: Trajectory,
    pub snapshots: Vec<SessionSnapshot>,
    /// Instruction ids cut short by a planner abort; treated as failed.
    pub abandoned: BTreeSet<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    /// Record index range within the trajectory.
    pub records: Range<usize>,
    /// Content delta accumulated over the segment.
    pub change_set: ChangeSet,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome {
    Done { actions: usize },
    Failed { message: String },
    Aborted(PlannerError),
}

/// Drives one session, recording every executed action.
pub struct Recorder {
    session: EnvSession,
    recording: Recording,
    /// Actions are executed directly, never through library skills.
    bare: SkillRegistry,
}

impl Recorder {
    pub fn new(seed: &SeedFile, origin: Origin) -> Result<Self, crate::env::EnvError> {
        let session = EnvSession::load(seed)?.without_xml();
        let snapshot = session.snapshot();
        Ok(Self {
            recording: Recording {
                trajectory: Trajectory::new(origin, &seed.id),
                snapshots: vec![snapshot],
                abandoned: BTreeSet::new(),
            },
            session,
            bare: SkillRegistry::new(),
        })
    }

    pub fn session(&self) -> &EnvSession {
        &self.session
    }

    pub fn recording(&self) -> &Recording {
        &self.recording
    }

    pub fn abandon(&mut self, instruction_id: usize) {
        self.recording.abandoned.insert(instruction_id);
    }

    pub fn into_recording(self) -> Recording {
        self.recording
    }

    /// Runs one instruction step through the follow role.
    pub fn run_step(
        &mut self,
        planner: &mut Planner,
        instruction_id: usize,
        text: &str,
        candidates: &[Candidate],
    ) -> StepOutcome {
        let mut history = Vec::new();
        for _ in 0..MAX_ACTIONS_PER_STEP {
            let state = self.session.state();
            let ctx = QueryContext {
                env_digest: state.digest(),
                instruction: Some(text.to_string()),
                history: history.clone(),
                observation: Some((&state).into()),
                candidates: candidates.to_vec(),
                ..Default::default()
            };
            let choice = match planner.next_action(ctx) {
                Ok(Some(c)) => c,
                Ok(None) => return StepOutcome::Done { actions: history.len() },
                Err(e) => return StepOutcome::Aborted(e),
            };
            let invocation = choice.invocation();
            let pre = state.digest();
            let (result, change_set) = match self.session.step(&self.bare, &invocation) {
                Ok(r) => (
                    RecordResult {
                        ok: r.ok,
                        message: r.message,
                    },
                    r.change_set,
                ),
                Err(e) => (
                    RecordResult {
                        ok: false,
                        message: e.to_string(),
                    },
                    ChangeSet::default(),
                ),
            };
            let ok = result.ok;
            let message = result.message.clone();
            let post = self.session.state().digest();
            self.recording
                .trajectory
                .push(instruction_id, text, pre, invocation.clone(), result, change_set, post);
            self.recording.snapshots.push(self.session.snapshot());
            if !ok {
                return StepOutcome::Failed { message };
            }
            history.push(invocation);
        }
        StepOutcome::Done { actions: history.len() }
    }
}

/// Splits a recording into effectful segments. Records are grouped by
/// instruction id; a group containing a failed record abandons the segment
/// in progress; after each group the segment closes if its cumulative
/// content delta is non-empty. Trailing effect-free groups are dropped.
pub fn place_breakpoints(rec: &Recording) -> Vec<Segment> {
    let records = &rec.trajectory.records;
    let mut out = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < records.len() {
        let id = records[i].instruction_id;
        let mut end = i;
        while end < records.len() && records[end].instruction_id == id {
            end += 1;
        }
        if rec.abandoned.contains(&id) || records[i..end].iter().any(|r| !r.result.ok) {
            start = end;
        } else {
            let (a, b) = (&rec.snapshots[start], &rec.snapshots[end]);
            let cs = diff_content(&a.document, &a.app, &b.document, &b.app);
            if cs.has_effect() {
                out.push(Segment {
                    records: start..end,
                    change_set: cs,
                });
                start = end;
            }
        }
        i = end;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::DocumentModel;

    fn record(steps: &[(usize, &str)]) -> Recording {
        let seed = SeedFile::new("empty", DocumentModel::default());
        let mut r = Recorder::new(&seed, Origin::Follower).unwrap();
        let mut p = Planner::scripted(0);
        for (id, s) in steps {
            r.run_step(&mut p, *id, s, &Candidate::basic());
        }
        r.into_recording()
    }

    #[test]
    fn one_instruction_one_segment() {
        let rec = record(&[
            (0, "click Insert tab"),
            (0, "click Header"),
            (0, "type 'header'"),
            (0, "click Footer"),
            (0, "type 'footer'"),
        ]);
        assert_eq!(rec.trajectory.records.len(), 5);
        rec.trajectory.check_chain().unwrap();
        let segs = place_breakpoints(&rec);
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].records, 0..5);
    }

    #[test]
    fn two_effectful_instructions_two_segments() {
        let rec = record(&[
            (0, "click Insert tab"),
            (0, "click Header"),
            (0, "type 'a'"),
            (1, "click Footer"),
            (1, "type 'b'"),
        ]);
        let segs = place_breakpoints(&rec);
        assert_eq!(segs.iter().map(|s| s.records.clone()).collect::<Vec<_>>(), [0..3, 3..5]);
    }

    #[test]
    fn browsing_gives_no_segments() {
        let rec = record(&[(0, "click Insert tab"), (1, "click Design tab"), (2, "click Watermark")]);
        assert_eq!(rec.trajectory.records.len(), 3);
        assert!(place_breakpoints(&rec).is_empty());
    }

    #[test]
    fn failed_group_abandons_segment() {
        let rec = record(&[(0, "click Insert tab"), (1, "select text 'ghost'"), (2, "click Table"), (2, "click 2x2 Table")]);
        let segs = place_breakpoints(&rec);
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].records, 2..4);
    }
}
