//! Multi-goal path finding on sampled roadmaps.
//!
//! The planner grows a roadmap with informed samples, keeps a shortest-path
//! forest rooted at the terminals up to date as samples arrive, and maintains
//! a minimum spanning tree over the best-known terminal-to-terminal paths.
//! Doubling that tree yields a walk through all goals whose cost is within a
//! factor two of optimal once the roadmap has converged.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod informed;
pub mod instance;
mod kdtree;
pub mod oracle;
pub mod planner;
pub mod render;
pub mod ripple;
pub mod roadmap;
pub mod space;
pub mod terminal_graph;

pub use error::{Error, Result};
pub use informed::{add_samples, rotation_to_world, sample_informed, InformedSet, Rotation, SampleBatch};
pub use instance::generate_terminals;
pub use planner::{
    extract_path, Baseline, IstStar, MgpfPath, Planner, PlannerParams, PlannerTrace, TraceRow,
};
pub use render::Scene;
pub use ripple::{ripple, verify_forest, Forest, MeetRecord};
pub use roadmap::{connection_radius, NodeId, RadiusParams, RadiusRule, Roadmap};
pub use space::{heuristic, AaBox, Config, Env, PathSegment};
pub use terminal_graph::{ProbabilityTable, TerminalGraph, TerminalPair};
