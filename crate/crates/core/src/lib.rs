//! Engine for emotional animated word clouds: layout, keyframe animation,
//! emotion schemes coordinated by entropy and speed, and GIF export.

pub mod animated_gif;
pub mod animation;
pub mod descriptor;
pub mod engine;
pub mod fonts;
pub mod geometry;
pub mod grouping;
pub mod ingest;
pub mod layout;
pub mod render;
pub mod rng;
pub mod schemes;
