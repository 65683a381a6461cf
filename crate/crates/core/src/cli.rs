//! Batch front end: print traces, export provenance links, write animation frames.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::eval::{reduction_trace, EvaluationContext, ReductionTrace, DEFAULT_MAX_STEPS};
use crate::morph::Morph;
use crate::player::DEFAULT_STEP_DURATION_MS;
use crate::render::{render_static, BoxStyle, CellGrid};
use crate::syntax::{parse, parse_all};

pub const EXIT_FIXPOINT: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_TRUNCATED: i32 = 2;

pub const FRAME_SEPARATOR: char = '\x0c';

#[derive(Debug, Parser)]
#[command(
    name = "boxstep",
    version,
    about = "Step through the reduction of a Scheme expression"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print every snapshot of the reduction
    Steps {
        #[command(flatten)]
        input: Input,
        /// Draw snapshots in box notation instead of source text
        #[arg(long)]
        render: bool,
        #[arg(long, value_enum, default_value_t = Style::Unicode)]
        style: Style,
    },
    /// Print the provenance links of each step as JSON lines
    Provenance {
        #[command(flatten)]
        input: Input,
    },
    /// Emit the morph animation between consecutive snapshots
    Frames {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = Style::Unicode)]
        style: Style,
        #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u32).range(1..))]
        fps: u32,
        #[arg(long = "duration-ms", default_value_t = DEFAULT_STEP_DURATION_MS)]
        duration_ms: u64,
        /// Write one file per frame into this directory
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
        /// Prefix each row with its per-cell intensity codes
        #[arg(long)]
        attributes: bool,
    },
}

#[derive(Debug, Args)]
pub struct Input {
    /// Expression text
    #[arg(
        short = 'e',
        long = "expr",
        required_unless_present = "file",
        conflicts_with = "file"
    )]
    pub expr: Option<String>,
    /// File holding the expression
    #[arg(short = 'f', long = "file")]
    pub file: Option<PathBuf>,
    /// File of top-level define forms
    #[arg(short = 'p', long = "prelude")]
    pub prelude: Option<PathBuf>,
    #[arg(long = "max-steps", default_value_t = DEFAULT_MAX_STEPS)]
    pub max_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Style {
    Unicode,
    Ascii,
}

impl From<Style> for BoxStyle {
    fn from(s: Style) -> Self {
        match s {
            Style::Unicode => BoxStyle::Unicode,
            Style::Ascii => BoxStyle::Ascii,
        }
    }
}

/// Frames per snapshot pair, both endpoints included.
pub fn frames_per_step(duration_ms: u64, fps: u32) -> usize {
    (duration_ms * u64::from(fps)).div_ceil(1000) as usize + 1
}

#[derive(Debug, Serialize, PartialEq, Eq)]
pub struct Link {
    pub child: Vec<usize>,
    pub parents: Vec<Vec<usize>>,
}

#[derive(Debug, Serialize, PartialEq, Eq)]
pub struct StepLinks {
    pub step: usize,
    pub links: Vec<Link>,
}

/// The links of snapshot `step` back into snapshot `step - 1`, as child-index paths.
/// Nodes that are simply their own origin are left out.
pub fn step_links(trace: &ReductionTrace, step: usize) -> StepLinks {
    let mut links = Vec::new();
    if step > 0 {
        let before = &trace.snapshots()[step - 1].expr;
        let after = &trace.snapshots()[step];
        let before_paths = before.paths();
        let after_paths = after.expr.paths();
        if let Some(store) = &after.provenance {
            for (child, origin) in store.origin_entries() {
                let Some(child_path) = after_paths.get(&child) else {
                    continue;
                };
                if origin == [child] {
                    continue;
                }
                let mut parents: Vec<Vec<usize>> = origin
                    .iter()
                    .filter_map(|p| before_paths.get(p).cloned())
                    .collect();
                parents.sort();
                parents.dedup();
                if !parents.is_empty() {
                    links.push(Link {
                        child: child_path.clone(),
                        parents,
                    });
                }
            }
        }
    }
    links.sort_by(|a, b| a.child.cmp(&b.child));
    StepLinks { step, links }
}

/// Parses arguments and runs a command. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_ERROR
            } else {
                EXIT_FIXPOINT
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli.command, out, err) {
        Ok(code) => code,
        Err(message) => {
            let _ = writeln!(err, "boxstep: {message}");
            EXIT_ERROR
        }
    }
}

fn execute(command: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, String> {
    let (Command::Steps { input, .. }
    | Command::Provenance { input }
    | Command::Frames { input, .. }) = command;
    let mut trace = load(input)?;
    trace.run_to_end();
    let written = match command {
        Command::Steps { render, style, .. } => write_steps(&trace, *render, (*style).into(), out),
        Command::Provenance { .. } => write_provenance(&trace, out),
        Command::Frames {
            style,
            fps,
            duration_ms,
            output,
            attributes,
            ..
        } => {
            let frames = frames(&trace, (*style).into(), frames_per_step(*duration_ms, *fps));
            match output {
                Some(dir) => write_frame_files(&frames, dir, *attributes),
                None => write_frame_stream(&frames, *attributes, out),
            }
        }
    };
    match written {
        // the reader went away, as with `| head`
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => finish(&trace, err),
        Err(e) => Err(format!("cannot write output: {e}")),
        Ok(()) => finish(&trace, err),
    }
}

fn load(input: &Input) -> Result<ReductionTrace, String> {
    let mut ctx = EvaluationContext::with_defaults();
    if let Some(path) = &input.prelude {
        let text = read(path)?;
        let forms = parse_all(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        ctx.load_prelude(&forms)
            .map_err(|e| format!("{}: {e}", path.display()))?;
    }
    let source = match (&input.expr, &input.file) {
        (Some(text), _) => text.clone(),
        (None, Some(path)) => read(path)?,
        (None, None) => return Err("no expression given".to_string()),
    };
    let expr = parse(&source)
        .map_err(|e| format!("parse error: {e}"))?
        .into_expr();
    Ok(reduction_trace(expr, &ctx, input.max_steps))
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn finish(trace: &ReductionTrace, err: &mut dyn Write) -> Result<i32, String> {
    if let Some(e) = trace.error() {
        return Err(format!("evaluation error at {e}"));
    }
    if trace.is_truncated() {
        let _ = writeln!(
            err,
            "boxstep: stopped after {} steps without reaching a normal form",
            trace.max_steps()
        );
        return Ok(EXIT_TRUNCATED);
    }
    Ok(EXIT_FIXPOINT)
}

fn write_steps(
    trace: &ReductionTrace,
    render: bool,
    style: BoxStyle,
    out: &mut dyn Write,
) -> io::Result<()> {
    for (i, snapshot) in trace.snapshots().iter().enumerate() {
        if i > 0 {
            writeln!(out)?;
        }
        let text = if render {
            render_static(&snapshot.expr, style).dump()
        } else {
            snapshot.expr.print()
        };
        writeln!(out, "{text}")?;
    }
    Ok(())
}

fn write_provenance(trace: &ReductionTrace, out: &mut dyn Write) -> io::Result<()> {
    for step in 0..trace.len() {
        let line = serde_json::to_string(&step_links(trace, step)).map_err(io::Error::other)?;
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Every frame, grouped by the snapshot the step starts from. A trace with a
/// single snapshot yields one still frame.
pub fn frames(trace: &ReductionTrace, style: BoxStyle, per_step: usize) -> Vec<Vec<CellGrid>> {
    let snapshots = trace.snapshots();
    if snapshots.len() == 1 {
        return vec![vec![render_static(&snapshots[0].expr, style)]];
    }
    snapshots
        .windows(2)
        .map(|pair| {
            let provenance = pair[1].provenance.clone().unwrap_or_default();
            let mut morph = Morph::new(pair[0].expr.clone(), pair[1].expr.clone(), provenance);
            (0..per_step)
                .map(|i| {
                    let progress = if per_step == 1 {
                        1.0
                    } else {
                        i as f64 / (per_step - 1) as f64
                    };
                    morph.set_progress(progress);
                    morph.frame(style)
                })
                .collect()
        })
        .collect()
}

/// A frame as text, without the blank rows a smaller endpoint leaves at the bottom.
pub fn frame_text(grid: &CellGrid, attributes: bool) -> String {
    let rows = if attributes {
        grid.attributed_rows()
    } else {
        grid.rows()
    };
    let blank = if attributes { "\t" } else { "" };
    let keep = rows.iter().rposition(|r| r != blank).map_or(0, |i| i + 1);
    rows[..keep].join("\n")
}

fn write_frame_stream(
    frames: &[Vec<CellGrid>],
    attributes: bool,
    out: &mut dyn Write,
) -> io::Result<()> {
    for (i, grid) in frames.iter().flatten().enumerate() {
        if i > 0 {
            write!(out, "{FRAME_SEPARATOR}")?;
        }
        writeln!(out, "{}", frame_text(grid, attributes))?;
    }
    Ok(())
}

fn write_frame_files(frames: &[Vec<CellGrid>], dir: &Path, attributes: bool) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    for (step, grids) in frames.iter().enumerate() {
        for (i, grid) in grids.iter().enumerate() {
            let path = dir.join(format!("frame-{step:04}-{i:04}.txt"));
            fs::write(path, frame_text(grid, attributes) + "\n")?;
        }
    }
    Ok(())
}

/// Splits a frame stream back into frames.
pub fn split_frames(stream: &str) -> Vec<&str> {
    stream
        .split(FRAME_SEPARATOR)
        .map(|f| f.strip_suffix('\n').unwrap_or(f))
        .collect()
}
