//! Behavior-graph navigation in procedurally generated office worlds.
//!
//! The crate is organized around a pipeline:
//!
//! 1. [`floorplan`] generates connected office maps (offices, corridors,
//!    halls, doorways, one unique landmark per meaningful place) and
//!    inflated configuration-space occupancy grids.
//! 2. [`semgraph`] extracts a semantic triplet graph (`place --behavior-->
//!    place`) from a plan and answers minimum-hop routing queries on it.
//! 3. [`worldsim`] is a continuous 2D kinematic simulator producing per-tick
//!    observations: a depth raycast fan, a region descriptor grid, and a
//!    noisy place-type hint.
//! 4. [`behaviors`] holds the reactive navigational controllers (corridor
//!    follow, out-of-office, enter-office, cross-hall, change-corridor) and
//!    the place classifier, behind a policy interface.
//! 5. [`lmmemory`] is the key-value landmark memory: embedded descriptor
//!    keys scored by summed cosine similarity, softmax-with-unknown during
//!    training, hard max at detection, plus an Adam trainer for the two
//!    linear embedding maps.
//! 6. [`expert`] plans RRT* paths on the inflated grid, smooths them with a
//!    cubic spline, and exports imitation-learning datasets with heading
//!    jitter augmentation.
//! 7. [`executor`] runs missions by walking a plan triplet-by-triplet and
//!    switching behaviors on perceptual evidence.
//! 8. [`bench`] reproduces the per-behavior trial protocol and the
//!    100-map x 10-mission integration benchmark.

pub mod behaviors;
pub mod bench;
pub mod executor;
pub mod expert;
pub mod floorplan;
pub mod grid;
pub mod lmmemory;
pub mod places;
pub mod semgraph;
pub mod worldsim;

pub use floorplan::{generate_floorplan, inflate_cspace, validate_floorplan, FloorPlan, GenConfig};
pub use semgraph::{extract_graph, plan_route, Plan, SemanticGraph};
