//! Skill discovery: follower and explorer agents, trajectory segmentation,
//! skill generation and UI-to-API translation.

mod breakpoints;
pub mod equivalence;
mod explorer;
mod follower;
pub mod generate;
mod helpdoc;
mod pipeline;
mod report;
pub mod reuse;
mod trajectory;
pub mod translate;

pub use breakpoints::{place_breakpoints, Recorder, Recording, Segment, StepOutcome, MAX_ACTIONS_PER_STEP};
pub use equivalence::{EntryProof, EquivalenceEntry, EquivalenceTable};
pub use explorer::{content_mode, explore, targets, ExploreBudget};
pub use follower::{follow_corpus, follow_document};
pub use helpdoc::{load_helpdocs, HelpDocScript};
pub use pipeline::Pipeline;
pub use report::{CoverageEntry, ExplorationReport, Rejection, SkillEntry, Stage, ValidationSummary};
pub use trajectory::{Origin, RecordResult, Trajectory, TrajectoryRecord};
