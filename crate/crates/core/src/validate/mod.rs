//! Static (structural) and dynamic (behavioural) skill validation.

pub mod checker;
mod dynamic;
mod static_rules;

pub use checker::{Checker, CheckerError};
pub use dynamic::{validate_dynamic, DynamicOutcome};
pub use static_rules::{validate_static, StaticFinding, StaticRule};
