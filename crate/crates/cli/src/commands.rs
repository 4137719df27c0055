use std::fs;
use std::path::{Path, PathBuf};

use emordle_core::engine::{Engine, EngineError};
use emordle_core::ingest::{parse_named, WordList};
use emordle_core::render::frame_count;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::request::AnimationRequest;

/// Speed and entropy levels of the stimuli grid.
pub const GRID_LEVELS: [f64; 3] = [0.0, 0.5, 1.0];

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Render(String),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Input(_) => 2,
            CommandError::Render(_) => 3,
        }
    }
}

impl From<EngineError> for CommandError {
    fn from(e: EngineError) -> Self {
        if e.is_input_error() {
            CommandError::Input(e.to_string())
        } else {
            CommandError::Render(e.to_string())
        }
    }
}

pub fn read_word_list(path: &Path) -> Result<WordList, CommandError> {
    let bytes =
        fs::read(path).map_err(|e| CommandError::Input(format!("cannot read {}: {e}", path.display())))?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    parse_named(&bytes, &name).map_err(|e| CommandError::Input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CommandError> {
    fs::write(path, bytes).map_err(|e| CommandError::Render(format!("cannot write {}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputKind {
    Gif,
    Descriptor,
}

impl OutputKind {
    pub fn for_path(path: &Path) -> Result<Self, CommandError> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("gif") => Ok(OutputKind::Gif),
            Some("descriptor") => Ok(OutputKind::Descriptor),
            _ => {
                Err(CommandError::Input(format!("output {} must end in .gif or .descriptor", path.display())))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerateReport {
    pub words: usize,
    pub groups: usize,
    pub duration: f64,
    pub frames: usize,
    pub warnings: Vec<String>,
}

impl std::fmt::Display for GenerateReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "words {}, groups {}, duration {} s, frames {}",
            self.words, self.groups, self.duration, self.frames
        )
    }
}

pub fn generate(
    engine: &Engine,
    list: &WordList,
    request: &AnimationRequest,
    out: &Path,
) -> Result<GenerateReport, CommandError> {
    let kind = OutputKind::for_path(out)?;
    let animation = engine.generate(list, request.canvas(), &request.spec())?;
    let desc = &animation.descriptor;
    let frames = match kind {
        OutputKind::Gif => {
            let (bytes, frames) = engine.render_gif(&animation, request.fps)?;
            write_file(out, &bytes)?;
            frames
        }
        OutputKind::Descriptor => {
            write_file(out, &animation.document())?;
            frame_count(desc.duration, request.fps)
        }
    };
    Ok(GenerateReport {
        words: desc.words.len(),
        groups: desc.groups.group_count,
        duration: desc.duration,
        frames,
        warnings: animation.warnings.iter().map(ToString::to_string).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridCondition {
    pub file: String,
    pub scheme: String,
    pub emotion_label: String,
    pub speed: f64,
    pub entropy: f64,
    pub groups: usize,
    pub duration: f64,
    pub cycles: u32,
    pub frames: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridManifest {
    pub source: String,
    pub seed: u64,
    pub width: u32,
    pub height: u32,
    pub fps: u32,
    pub palette: String,
    pub font: String,
    pub conditions: Vec<GridCondition>,
}

pub fn grid_file_name(scheme: &str, speed: f64, entropy: f64) -> String {
    format!("{scheme}_s{speed}_e{entropy}.gif")
}

/// Renders every scheme over the speed/entropy grid from one shared layout.
/// `base` supplies seed, canvas, fps and style; its scheme and levels are ignored.
pub fn stimuli_grid(
    engine: &Engine,
    list: &WordList,
    base: &AnimationRequest,
    schemes: Option<&[String]>,
    outdir: &Path,
) -> Result<GridManifest, CommandError> {
    let ids: Vec<String> = match schemes {
        Some(ids) => {
            for id in ids {
                engine.schemes.get(id).map_err(EngineError::from)?;
            }
            ids.to_vec()
        }
        None => engine.schemes.templates().iter().map(|t| t.id.clone()).collect(),
    };
    let layout = engine.layout(list, base.canvas(), base.seed, &base.font)?;
    fs::create_dir_all(outdir)
        .map_err(|e| CommandError::Render(format!("cannot create {}: {e}", outdir.display())))?;

    let jobs: Vec<AnimationRequest> = ids
        .iter()
        .flat_map(|id| {
            GRID_LEVELS.iter().flat_map(move |&speed| {
                GRID_LEVELS.iter().map(move |&entropy| AnimationRequest {
                    scheme: id.clone(),
                    speed,
                    entropy,
                    ..base.clone()
                })
            })
        })
        .collect();
    let conditions = jobs
        .par_iter()
        .map(|job| {
            let animation = engine.animate(&layout, &job.spec())?;
            let (bytes, frames) = engine.render_gif(&animation, job.fps)?;
            let file = grid_file_name(&job.scheme, job.speed, job.entropy);
            write_file(&outdir.join(&file), &bytes)?;
            let desc = &animation.descriptor;
            Ok(GridCondition {
                file,
                scheme: job.scheme.clone(),
                emotion_label: desc.emotion_label.clone(),
                speed: job.speed,
                entropy: job.entropy,
                groups: desc.groups.group_count,
                duration: desc.duration,
                cycles: desc.cycles,
                frames,
            })
        })
        .collect::<Result<Vec<_>, CommandError>>()?;

    let manifest = GridManifest {
        source: list.source_name.clone(),
        seed: base.seed,
        width: base.width,
        height: base.height,
        fps: base.fps,
        palette: base.palette.clone(),
        font: base.font.clone(),
        conditions,
    };
    let mut json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    json.push(b'\n');
    write_file(&manifest_path(outdir), &json)?;
    Ok(manifest)
}

pub fn manifest_path(outdir: &Path) -> PathBuf {
    outdir.join("manifest.json")
}
