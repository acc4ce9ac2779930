use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use gridweave::bench::{run_matrix, write_outputs, BenchConfig, LambdaArg};
use gridweave::io::{self, load_layout, load_samples, report_to_json, save_layout};
use gridweave::render::{render_svg_with_samples, RenderStyle};
use gridweave::service::{serve, Session, SessionConfig};
use gridweave_core::measures::report;
use gridweave_core::pipeline::run_pipeline;
use gridweave_core::{GridSpec, PipelineConfig, PipelineId};
use serde_json::json;

#[derive(Parser)]
#[command(name = "gridweave", version, about = "Cluster-aware grid layouts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lay out a sample file on a grid.
    Layout {
        #[arg(long)]
        input: PathBuf,
        /// `WxH`, or a single number for a square grid.
        #[arg(long, value_parser = parse_grid)]
        grid: GridSpec,
        #[arg(long, default_value = "g-l-t")]
        pipeline: PipelineId,
        #[arg(long, default_value = "adaptive")]
        lambda: LambdaArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a layout against a reference layout of the same samples.
    Eval {
        #[arg(long)]
        layout: PathBuf,
        #[arg(long)]
        baseline: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw a layout file as SVG.
    Render {
        #[arg(long)]
        layout: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 16)]
        cell_px: u32,
        #[arg(long)]
        ids: bool,
    },
    /// Run the pipeline comparison described by a JSON config.
    Bench {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Serve layouts and zooms over HTTP on localhost.
    Serve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = parse_grid)]
        grid: GridSpec,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "g-l-t")]
        pipeline: PipelineId,
        #[arg(long, default_value = "adaptive")]
        lambda: LambdaArg,
    },
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let (w, h) = s.split_once(['x', 'X']).unwrap_or((s, s));
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("bad grid `{s}`, expected WxH"))
    };
    GridSpec::new(num(w)?, num(h)?).map_err(|e| e.to_string())
}

struct Failure {
    code: &'static str,
    detail: String,
}

impl From<io::IoError> for Failure {
    fn from(e: io::IoError) -> Self {
        Self {
            code: e.code(),
            detail: e.to_string(),
        }
    }
}

impl From<gridweave_core::Error> for Failure {
    fn from(e: gridweave_core::Error) -> Self {
        Self {
            code: "layout",
            detail: e.to_string(),
        }
    }
}

impl From<gridweave::bench::BenchError> for Failure {
    fn from(e: gridweave::bench::BenchError) -> Self {
        use gridweave::bench::BenchError;
        match e {
            BenchError::Io(e) => e.into(),
            BenchError::Core(e) => e.into(),
            e @ BenchError::Config(_) => Self {
                code: "config",
                detail: e.to_string(),
            },
            e @ BenchError::InvalidLayout { .. } => Self {
                code: "invalid_layout",
                detail: e.to_string(),
            },
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self {
            code: "io",
            detail: e.to_string(),
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("GRIDWEAVE_THREADS") else {
        return Ok(());
    };
    let threads: usize = value.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| Failure {
        code: "config",
        detail: format!("GRIDWEAVE_THREADS must be a positive integer, got `{value}`"),
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure {
            code: "config",
            detail: e.to_string(),
        })
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Layout {
            input,
            grid,
            pipeline,
            lambda,
            seed,
            out,
        } => {
            let samples = load_samples(&input)?;
            let result = run_pipeline(&samples, grid, pipeline, &PipelineConfig::new(lambda.0, seed))?;
            save_layout(&result.layout, &samples, &out)?;
            println!("{}", report_to_json(&result.report));
        }
        Command::Eval {
            layout,
            baseline,
            input,
            out,
        } => {
            let samples = load_samples(&input)?;
            let layout = load_layout(&layout, &samples)?;
            let baseline = load_layout(&baseline, &samples)?;
            io::write(&out, &report_to_json(&report(&layout, &baseline)?))?;
        }
        Command::Render {
            layout,
            out,
            cell_px,
            ids,
        } => {
            let style = RenderStyle::new(cell_px, 2.0, ids).ok_or_else(|| Failure {
                code: "config",
                detail: format!("--cell-px must be at least {}", RenderStyle::MIN_CELL_PX),
            })?;
            let (layout, samples) = io::load_layout_standalone(&layout)?;
            io::write(&out, &render_svg_with_samples(&layout, &samples, &style))?;
        }
        Command::Bench { config, out_dir } => {
            let cfg: BenchConfig = match config {
                None => BenchConfig::default(),
                Some(path) => {
                    let text = std::fs::read_to_string(&path)?;
                    serde_json::from_str(&text).map_err(|e| Failure {
                        code: "config",
                        detail: format!("{}: {e}", path.display()),
                    })?
                }
            };
            let rows = run_matrix(&cfg)?;
            for path in write_outputs(&cfg, &rows, &out_dir)? {
                println!("{}", path.display());
            }
        }
        Command::Serve {
            input,
            grid,
            port,
            seed,
            pipeline,
            lambda,
        } => {
            let samples = load_samples(&input)?;
            let session = Session::new(
                samples,
                SessionConfig {
                    spec: grid,
                    pipeline,
                    lambda,
                    seed,
                },
            )?;
            tokio::runtime::Runtime::new()?.block_on(serve(Arc::new(session), port))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", json!({"error": "usage", "detail": e.to_string()}));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", json!({"error": f.code, "detail": f.detail}));
            ExitCode::FAILURE
        }
    }
}
