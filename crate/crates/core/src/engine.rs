//! One entry point shared by the command line and the HTTP service, so both
//! produce identical documents for identical parameters.

use std::path::Path;

use thiserror::Error;

use crate::animated_gif::{encode_gif, GifError};
use crate::descriptor::{export_descriptor, AnimationDescriptor};
use crate::fonts::{FontError, FontRegistry};
use crate::grouping::GroupingError;
use crate::ingest::{IngestError, WordList};
use crate::layout::{compute_layout, Dimensions, LayoutError, LayoutParams, WordleLayout};
use crate::render::{palette, render_animation, RenderError, RenderStyle};
use crate::schemes::{instantiate_scheme, ClampWarning, EmordleSpec, SchemeError, SchemeRegistry};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Font(#[from] FontError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error(transparent)]
    Gif(#[from] GifError),
}

impl EngineError {
    /// Caused by the caller's input rather than by rendering or encoding.
    pub fn is_input_error(&self) -> bool {
        match self {
            EngineError::Ingest(_) | EngineError::Layout(_) | EngineError::Scheme(_) => true,
            EngineError::Font(e) | EngineError::Render(RenderError::Font(e)) => {
                matches!(e, FontError::UnknownTypeface(_) | FontError::MissingGlyph { .. })
            }
            EngineError::Render(e) => matches!(
                e,
                RenderError::InvalidFps(_)
                    | RenderError::UnknownPalette(_)
                    | RenderError::TypefaceMismatch { .. }
            ),
            EngineError::Gif(_) => false,
        }
    }
}

impl From<GroupingError> for EngineError {
    fn from(e: GroupingError) -> Self {
        EngineError::Scheme(SchemeError::Grouping(e))
    }
}

/// A finished animation with everything needed to export or render it.
#[derive(Debug, Clone)]
pub struct Animation {
    pub layout: WordleLayout,
    pub descriptor: AnimationDescriptor,
    pub warnings: Vec<ClampWarning>,
}

impl Animation {
    pub fn document(&self) -> Vec<u8> {
        export_descriptor(&self.descriptor, &self.layout)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Engine {
    pub fonts: FontRegistry,
    pub schemes: SchemeRegistry,
}

impl Engine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn load_font_dir(&mut self, dir: &Path) -> Result<usize, EngineError> {
        Ok(self.fonts.load_dir(dir)?)
    }

    pub fn load_scheme_file(&mut self, path: &Path) -> Result<String, EngineError> {
        Ok(self.schemes.load_file(path)?.id.clone())
    }

    pub fn layout(
        &self,
        list: &WordList,
        canvas: Dimensions,
        seed: u64,
        typeface: &str,
    ) -> Result<WordleLayout, EngineError> {
        let params =
            LayoutParams::new(Dimensions::new(canvas.width, canvas.height)?, seed).with_typeface(typeface);
        Ok(compute_layout(list, &params, &self.fonts)?)
    }

    pub fn animate(&self, layout: &WordleLayout, spec: &EmordleSpec) -> Result<Animation, EngineError> {
        let (clamped, warnings) = spec.clamped();
        if palette(&clamped.style.palette).is_none() {
            return Err(RenderError::UnknownPalette(clamped.style.palette).into());
        }
        let template = self.schemes.get(&clamped.scheme_id)?;
        let descriptor = instantiate_scheme(template, layout, &clamped)?;
        Ok(Animation { layout: layout.clone(), descriptor, warnings })
    }

    /// Layout plus animation; the layout uses the spec's seed and typeface.
    pub fn generate(
        &self,
        list: &WordList,
        canvas: Dimensions,
        spec: &EmordleSpec,
    ) -> Result<Animation, EngineError> {
        let layout = self.layout(list, canvas, spec.seed, &spec.style.typeface)?;
        self.animate(&layout, spec)
    }

    pub fn render_gif(&self, animation: &Animation, fps: u32) -> Result<(Vec<u8>, usize), EngineError> {
        let style = &animation.descriptor.spec.style;
        let style = RenderStyle::new(&style.palette, &style.typeface, fps);
        let frames = render_animation(&animation.descriptor, &animation.layout, &style, &self.fonts)?;
        let count = frames.len();
        Ok((encode_gif(&frames, fps)?, count))
    }
}
