use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hudsal::compositor::MAX_GAIN;
use hudsal::Region;

#[derive(Debug, Parser)]
#[command(
    name = "hudsal",
    version,
    about = "Saliency interference between HUD content and the scene behind it"
)]
pub struct Cli {
    /// Worker threads (defaults to the number of processors).
    #[arg(long, global = true, env = "HUDSAL_JOBS", value_parser = parse_jobs)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one measured image against its HUD image.
    Evaluate(EvaluateArgs),
    /// Evaluate every case of a JSON manifest.
    Batch(BatchArgs),
    /// Compute and save the saliency map of one image.
    Saliency(SaliencyArgs),
    /// Add a HUD image onto a background.
    Composite(CompositeArgs),
    /// Render one glyph in several colours over a background and rank them.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Photograph of the full view, HUD included.
    #[arg(long)]
    pub measured: PathBuf,
    /// HUD content rendered on black.
    #[arg(long)]
    pub hud: PathBuf,
    /// HUD area inside the measured image.
    #[arg(long, value_name = "X,Y,W,H")]
    pub region: Region,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the intermediate saliency and difference maps.
    #[arg(long)]
    pub dump_maps: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// JSON file with saliency parameter overrides.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Case id used in the report.
    #[arg(long, default_value = "case")]
    pub id: String,
    /// Comparability group used in the report.
    #[arg(long, default_value = "default")]
    pub content_group: String,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    /// Manifest file; relative paths inside it resolve against its directory.
    pub manifest: PathBuf,
    /// Overrides the manifest's output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SaliencyArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Output PNG.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub params: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompositeArgs {
    #[arg(long)]
    pub background: PathBuf,
    #[arg(long)]
    pub hud: PathBuf,
    #[arg(long, value_name = "X,Y,W,H")]
    pub region: Region,
    /// Output PNG.
    #[arg(long)]
    pub out: PathBuf,
    /// HUD luminance gain, in (0, 4].
    #[arg(long, default_value_t = 1.0, value_parser = parse_gain, allow_negative_numbers = true)]
    pub gain: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub background: PathBuf,
    /// Glyph mask; any non-black pixel is part of the glyph.
    #[arg(long)]
    pub hud: PathBuf,
    #[arg(long, value_name = "X,Y,W,H")]
    pub region: Region,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1.0, value_parser = parse_gain, allow_negative_numbers = true)]
    pub gain: f64,
    /// Comma-separated RRGGBB colours.
    #[arg(long, value_delimiter = ',', value_parser = parse_hex_color, default_value = "FFFFFF,FF0000,00FF00,0000FF")]
    pub colors: Vec<[u8; 3]>,
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub dump_maps: bool,
}

fn parse_jobs(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("expected a positive integer, got {s:?}")),
    }
}

pub fn parse_gain(s: &str) -> Result<f64, String> {
    let g: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("{s:?} is not a number"))?;
    if g > 0.0 && g <= MAX_GAIN {
        Ok(g)
    } else {
        Err(format!("gain must be in (0, {MAX_GAIN}], got {s}"))
    }
}

pub fn parse_hex_color(s: &str) -> Result<[u8; 3], String> {
    let hex = s.trim().trim_start_matches('#');
    if hex.len() != 6 || !hex.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(format!("{s:?} is not an RRGGBB hex colour"));
    }
    let mut rgb = [0u8; 3];
    hex::decode_to_slice(hex, &mut rgb).map_err(|e| format!("{s:?}: {e}"))?;
    Ok(rgb)
}

pub fn hex_color(rgb: [u8; 3]) -> String {
    hex::encode_upper(rgb)
}
