//! Object-centric symbolic world: scene state, predicate grounding,
//! action primitives and continuous processes.

mod config;
mod manifest;
mod predicates;
mod primitives;
mod process;
mod state;

pub use config::{PrimitiveDurations, WorldConfig, CONFIG_VERSION};
pub use manifest::{FixedObjectSpec, RoomSpec, SceneManifest, MANIFEST_VERSION};
pub use predicates::{eval_atomic, logical_snapshot, snapshot_over, FactSet};
pub use primitives::{apply_primitive, Action, ActionParseError, PrimitiveFailure};
pub use process::step_processes;
pub use state::{
    distance, horizontal_distance, Aabb, AgentState, ExtendedState, Hand, ObjectId,
    ObjectInstance, Placement, Pose, SceneState, Thresholds, Vec3,
};

use crate::syntax::ConstantName;
use crate::taxonomy::TaxonomyError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WorldError {
    #[error("unknown object `{0}`")]
    UnknownObject(ObjectId),
    #[error("constant `{0}` is not bound to any scene object")]
    UnknownConstant(ConstantName),
    #[error("predicate `{0}` is not declared in the domain")]
    UnknownPredicate(String),
    #[error("predicate `{0}` has no grounding rule")]
    NoGrounding(String),
    #[error("wrong number or kind of arguments in {0}")]
    ArityMismatch(String),
    #[error("{0} is not ground")]
    NotGround(String),
    #[error("`{predicate}` does not apply to the arguments of {formula}")]
    Inapplicable { predicate: String, formula: String },
    #[error("unknown room `{0}`")]
    UnknownRoom(String),
    #[error("invalid scene manifest: {0}")]
    Manifest(String),
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
}
