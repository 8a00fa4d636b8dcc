//! Tents, Hausdorff content, capacity surrogates and Carleson-type condition
//! checkers for discrete measures on the upper half-space.

mod conditions;
mod embedding;
mod geometry;
mod hausdorff;

pub use conditions::{
    ball_condition, condition_v, condition_vi, minimizing_function, BallSearch, CapacityCase,
    CapacityParams, ConditionSup, MinimizingFunction, SetConditionSup,
};
pub use embedding::{
    embedding_test, extension_at_atoms, grid_tent_inclusion, tent_lower_bound, EmbeddingOutcome,
    TentInclusion,
};
pub use geometry::{tent_measure, Ball, BoxBounds, OpenSet, SetComponent, SetKind, TENT_SAMPLE_FACTOR};
pub use hausdorff::{
    ball_capacity_surrogate, ball_cost, hausdorff_content, hausdorff_content_with, radius_bin,
    ContentEstimate, MAX_DEPTH,
};
