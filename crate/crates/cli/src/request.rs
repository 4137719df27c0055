//! Animation parameters as both front ends accept them, with the same defaults.

use emordle_core::fonts::DEFAULT_TYPEFACE;
use emordle_core::layout::Dimensions;
use emordle_core::render::DEFAULT_FPS;
use emordle_core::schemes::{EmordleSpec, StyleSpec, DEFAULT_PALETTE};

pub const DEFAULT_SCHEME: &str = "dance";
pub const DEFAULT_LEVEL: f64 = 0.5;
pub const DEFAULT_WIDTH: u32 = 800;
pub const DEFAULT_HEIGHT: u32 = 600;

#[derive(Debug, Clone, PartialEq)]
pub struct AnimationRequest {
    pub scheme: String,
    pub speed: f64,
    pub entropy: f64,
    pub seed: u64,
    pub width: u32,
    pub height: u32,
    pub fps: u32,
    pub palette: String,
    pub font: String,
}

impl Default for AnimationRequest {
    fn default() -> Self {
        Self {
            scheme: DEFAULT_SCHEME.to_string(),
            speed: DEFAULT_LEVEL,
            entropy: DEFAULT_LEVEL,
            seed: 0,
            width: DEFAULT_WIDTH,
            height: DEFAULT_HEIGHT,
            fps: DEFAULT_FPS,
            palette: DEFAULT_PALETTE.to_string(),
            font: DEFAULT_TYPEFACE.to_string(),
        }
    }
}

impl AnimationRequest {
    pub fn spec(&self) -> EmordleSpec {
        EmordleSpec {
            scheme_id: self.scheme.clone(),
            entropy: self.entropy,
            speed: self.speed,
            seed: self.seed,
            style: StyleSpec { palette: self.palette.clone(), typeface: self.font.clone() },
        }
    }

    /// Unchecked canvas; the engine validates it when laying out.
    pub fn canvas(&self) -> Dimensions {
        Dimensions { width: self.width, height: self.height }
    }
}
