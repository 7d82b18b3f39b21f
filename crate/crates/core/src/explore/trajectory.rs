use serde::{Deserialize, Serialize};

use crate::env::ChangeSet;
use crate::exec::SkillInvocation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Follower,
    Explorer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordResult {
    pub ok: bool,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub index: usize,
    /// Records sharing an id were produced for the same instruction.
    pub instruction_id: usize,
    pub instruction: String,
    pub pre_digest: String,
    pub invocation: SkillInvocation,
    pub result: RecordResult,
    pub change_set: ChangeSet,
    pub post_digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub origin: Origin,
    pub seed_id: String,
    pub records: Vec<TrajectoryRecord>,
}

impl Trajectory {
    pub fn new(origin: Origin, seed_id: &str) -> Self {
        Self {
            origin,
            seed_id: seed_id.to_string(),
            records: Vec::new(),
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn push(
        &mut self,
        instruction_id: usize,
        instruction: &str,
        pre_digest: String,
        invocation: SkillInvocation,
        result: RecordResult,
        change_set: ChangeSet,
        post_digest: String,
    ) {
        let index = self.records.len();
        self.records.push(TrajectoryRecord {
            index,
            instruction_id,
            instruction: instruction.to_string(),
            pre_digest,
            invocation,
            result,
            change_set,
            post_digest,
        });
    }

    /// Index contiguity and digest chaining.
    pub fn check_chain(&self) -> Result<(), String> {
        for (i, r) in self.records.iter().enumerate() {
            if r.index != i {
                return Err(format!("record {i} has index {}", r.index));
            }
            if i > 0 && self.records[i - 1].post_digest != r.pre_digest {
                return Err(format!("digest chain broken between records {} and {i}", i - 1));
            }
        }
        Ok(())
    }
}
