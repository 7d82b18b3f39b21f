//! API-first skill exploration over a simulated word processor.

pub mod bench;
pub mod corpus;
pub mod env;
pub mod exec;
pub mod explore;
pub mod planner;
pub mod skill;
pub mod validate;
