use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Human,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "skillc",
    version,
    about = "Compile SKILL.md files into agent-specific skill documents"
)]
pub struct Cli {
    /// Configuration file. Missing is fine unless given explicitly.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output style for diagnostics and summaries.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile skills for every configured target.
    Build(BuildArgs),
    /// Run the front end and security passes without emitting documents.
    Check(CheckArgs),
    /// `check` with warnings promoted to interceptions.
    Validate(CheckArgs),
    /// Scaffold a new skill.
    Init(InitArgs),
    /// Show name, version and security level of each skill.
    List(PipelineArgs),
    /// Write only the routing manifests.
    Index(IndexArgs),
    /// Remove compiled artifacts from the output directory.
    Clean(CleanArgs),
}

/// Inputs and security configuration shared by every compiling command.
#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    /// Files or directories searched recursively for SKILL.md.
    pub inputs: Vec<PathBuf>,

    #[arg(long, env = "SKILLC_BASELINE", value_name = "PATH")]
    pub baseline: Option<PathBuf>,

    /// Extra or replacement injection rules.
    #[arg(long, env = "SKILLC_RULES", value_name = "PATH")]
    pub rules: Option<PathBuf>,

    /// Worker threads; defaults to the number of logical CPUs.
    #[arg(long, value_name = "N")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    #[arg(long, env = "SKILLC_OUT", value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TargetArgs {
    /// Comma-separated target ids.
    #[arg(
        long,
        env = "SKILLC_TARGETS",
        value_delimiter = ',',
        value_name = "IDS"
    )]
    pub targets: Option<Vec<String>>,
}

#[derive(Debug, Clone, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[command(flatten)]
    pub out: OutArgs,
    #[command(flatten)]
    pub targets: TargetArgs,
    #[arg(long)]
    pub strict: bool,
    /// Also write `<out>/ir/<name>.skir.json`.
    #[arg(long)]
    pub emit_ir: bool,
    /// Write per-skill size and timing reports as JSON.
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
    /// Leave the compile time out of build-info.json.
    #[arg(long)]
    pub no_timestamps: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[command(flatten)]
    pub out: OutArgs,
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub emit_ir: bool,
}

#[derive(Debug, Clone, Args)]
pub struct InitArgs {
    /// Lowercase kebab-case skill name.
    pub name: String,
    /// Parent directory of the new skill directory.
    #[arg(long, default_value = ".", value_name = "DIR")]
    pub dir: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct IndexArgs {
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[command(flatten)]
    pub out: OutArgs,
    #[command(flatten)]
    pub targets: TargetArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CleanArgs {
    #[command(flatten)]
    pub out: OutArgs,
    #[command(flatten)]
    pub targets: TargetArgs,
}
