//! Lower-bound instance families for exact hopsets and shortcut sets.
//!
//! The crate builds the layered instances, checks their structural
//! properties with exact integer arithmetic, and scores candidate edge sets
//! by the hop distances they leave between critical pairs.

pub mod adversary;
pub mod archive;
pub mod critical;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod hopset;
pub mod proposal;
pub mod reduce;
pub mod scaled;
pub mod shortcut;
pub mod stats;

pub use error::{Error, Result};
pub use geometry::{ConvexVectorSet, Vector2};
pub use graph::{Edge, GraphMode, LayeredGraph, NodeId, NodeLabel};
pub use scaled::{PathCount, ScaledRational};
pub use proposal::{EdgeSetProposal, ProposalKind};
pub use adversary::{AdversaryConfig, AdversaryKind};
pub use archive::Instance;
