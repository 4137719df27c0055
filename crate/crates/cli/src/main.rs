use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use emordle_cli::commands::{self, CommandError};
use emordle_cli::request::AnimationRequest;
use emordle_cli::service::{router, AppState};
use emordle_core::engine::Engine;
use emordle_core::ingest::{parse_named, WordList};
use emordle_core::schemes::write_scheme_file;

const LOREM: &[u8] = include_bytes!("../../../data/lorem.csv");
const DEFAULT_PORT: u16 = 8787;

#[derive(Parser)]
#[command(name = "emordle", version, about = "Animated word clouds that convey emotion")]
struct Cli {
    /// Directory of .ttf/.otf files added to the embedded typefaces (EMORDLE_FONT_DIR wins if set).
    #[arg(long, global = true)]
    font_dir: Option<PathBuf>,
    /// Extra scheme file to register; repeatable.
    #[arg(long = "scheme-file", global = true)]
    scheme_files: Vec<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct StyleArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = emordle_cli::request::DEFAULT_WIDTH)]
    width: u32,
    #[arg(long, default_value_t = emordle_cli::request::DEFAULT_HEIGHT)]
    height: u32,
    #[arg(long, default_value_t = emordle_core::render::DEFAULT_FPS)]
    fps: u32,
    #[arg(long, default_value = emordle_core::schemes::DEFAULT_PALETTE)]
    palette: String,
    #[arg(long, default_value = emordle_core::fonts::DEFAULT_TYPEFACE)]
    font: String,
}

#[derive(Subcommand)]
enum Command {
    /// Render one emordle to a .gif, or export its .descriptor document.
    Generate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = emordle_cli::request::DEFAULT_SCHEME)]
        scheme: String,
        #[arg(long, default_value_t = emordle_cli::request::DEFAULT_LEVEL, allow_negative_numbers = true)]
        speed: f64,
        #[arg(long, default_value_t = emordle_cli::request::DEFAULT_LEVEL, allow_negative_numbers = true)]
        entropy: f64,
        #[command(flatten)]
        style: StyleArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render every scheme on the 3x3 speed/entropy grid from one shared layout.
    StimuliGrid {
        /// Word list CSV; the bundled lorem list when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        outdir: PathBuf,
        /// Comma-separated scheme ids; all registered schemes when omitted.
        #[arg(long, value_delimiter = ',')]
        schemes: Option<Vec<String>>,
        #[command(flatten)]
        style: StyleArgs,
    },
    /// List registered schemes, or print one in scheme-file syntax.
    Schemes {
        #[arg(long)]
        dump: Option<String>,
    },
    /// Run the HTTP API.
    Serve {
        /// EMORDLE_PORT wins if set.
        #[arg(long, default_value_t = DEFAULT_PORT)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Where uploaded word lists persist (EMORDLE_DATA_DIR wins if set).
        #[arg(long)]
        data_dir: Option<PathBuf>,
        /// Concurrent GIF renders; further requests queue.
        #[arg(long, default_value_t = 2)]
        gif_workers: usize,
    },
}

fn env_path(name: &str) -> Option<PathBuf> {
    std::env::var_os(name).filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn build_engine(cli: &Cli) -> Result<Engine, CommandError> {
    let mut engine = Engine::new();
    if let Some(dir) = env_path("EMORDLE_FONT_DIR").or_else(|| cli.font_dir.clone()) {
        engine.load_font_dir(&dir).map_err(|e| CommandError::Input(e.to_string()))?;
    }
    for path in &cli.scheme_files {
        engine.load_scheme_file(path).map_err(|e| CommandError::Input(format!("{}: {e}", path.display())))?;
    }
    Ok(engine)
}

fn request(scheme: &str, speed: f64, entropy: f64, style: &StyleArgs) -> AnimationRequest {
    AnimationRequest {
        scheme: scheme.to_string(),
        speed,
        entropy,
        seed: style.seed,
        width: style.width,
        height: style.height,
        fps: style.fps,
        palette: style.palette.clone(),
        font: style.font.clone(),
    }
}

fn grid_input(input: Option<&Path>) -> Result<WordList, CommandError> {
    match input {
        Some(path) => commands::read_word_list(path),
        None => parse_named(LOREM, "lorem.csv").map_err(|e| CommandError::Input(e.to_string())),
    }
}

fn run(cli: &Cli) -> Result<(), CommandError> {
    let engine = build_engine(cli)?;
    match &cli.command {
        Command::Generate { input, scheme, speed, entropy, style, out } => {
            let list = commands::read_word_list(input)?;
            let report = commands::generate(&engine, &list, &request(scheme, *speed, *entropy, style), out)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            println!("{report}");
        }
        Command::StimuliGrid { input, outdir, schemes, style } => {
            let list = grid_input(input.as_deref())?;
            let base = request("", 0.0, 0.0, style);
            let manifest = commands::stimuli_grid(&engine, &list, &base, schemes.as_deref(), outdir)?;
            println!(
                "{} GIFs and {} in {}",
                manifest.conditions.len(),
                commands::manifest_path(outdir).display(),
                outdir.display()
            );
        }
        Command::Schemes { dump: Some(id) } => {
            let template = engine.schemes.get(id).map_err(|e| CommandError::Input(e.to_string()))?;
            print!("{}", write_scheme_file(template));
        }
        Command::Schemes { dump: None } => {
            for t in engine.schemes.templates() {
                println!(
                    "{:<10} {:<10} {:<10} varies {}",
                    t.id,
                    t.emotion_label,
                    t.strategy.name(),
                    t.varied_parameters().join(", ")
                );
            }
        }
        Command::Serve { port, host, data_dir, gif_workers } => {
            let port = match std::env::var("EMORDLE_PORT") {
                Ok(v) if !v.is_empty() => {
                    v.parse().map_err(|_| CommandError::Input(format!("EMORDLE_PORT {v:?} is not a port")))?
                }
                _ => *port,
            };
            let data_dir = env_path("EMORDLE_DATA_DIR").or_else(|| data_dir.clone());
            let addr: SocketAddr = format!("{host}:{port}")
                .parse()
                .map_err(|e| CommandError::Input(format!("bad address {host}:{port}: {e}")))?;
            let state = Arc::new(AppState::new(engine, data_dir, *gif_workers));
            serve(addr, state).map_err(|e| CommandError::Render(e.to_string()))?;
        }
    }
    Ok(())
}

#[tokio::main]
async fn serve(addr: SocketAddr, state: Arc<AppState>) -> anyhow::Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .init();
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(%addr, "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
