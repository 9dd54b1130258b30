//! Tournament rules, their fairness and manipulability properties, and exact
//! linear programs over rule tables.
//!
//! Agents are 0-based in the API and 1-based in every printed form.

pub mod analysis;
pub mod bounds;
pub mod canon;
pub mod construct;
pub mod error;
pub mod linalg;
pub mod lp;
pub mod rational;
pub mod rules;
pub mod table;
pub mod tournament;

pub use error::{Error, Result};
pub use rational::Q;
pub use rules::{evaluate, RuleId, WinDistribution};
pub use table::RuleTable;
pub use tournament::{AgentSet, Tournament};

/// Largest supported tournament.
pub const MAX_AGENTS: usize = 16;
