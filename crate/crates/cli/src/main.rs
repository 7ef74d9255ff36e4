mod commands;
mod render;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

const ENV_HELP: &str = "\
Environment:
  ASYM_CAP            enumeration cap for every family (same as --cap)
  ASYM_MAX_ORDER      largest accepted series order or moment size (default 200)
  ASYM_OEIS_CACHE     b-file cache directory (default ~/.cache/asymmetry/oeis)
  ASYM_OEIS_ENDPOINT  OEIS base URL (default https://oeis.org)

Exit status: 0 ok, 1 verification failure, 2 usage error, 3 network or cache error.

Examples:
  asym gf balanced --order 5 --coeff t2,x2
  asym gf matchings --order 6 --set r=0,s=0,t=1
  asym hist balanced -n 3 --stats da
  asym bij zigzag --input 0011
  asym verify --suite all --json report.json
  asym moments compositions -n 20,40,60
  asym oeis check A047974 --against matchings-sym --offline";

#[derive(Parser, Debug)]
#[command(
    name = "asym",
    version,
    about = "Exact generating functions, enumeration and verification for degree-of-asymmetry statistics"
)]
#[command(after_help = ENV_HELP)]
pub struct Cli {
    /// Output format.
    #[arg(long, short = 'f', global = true, value_enum, default_value_t = Format::Plain)]
    pub format: Format,

    /// Enumeration cap applied to every family.
    #[arg(long, global = true, env = "ASYM_CAP")]
    pub cap: Option<usize>,

    /// Largest accepted series order.
    #[arg(long, global = true, env = "ASYM_MAX_ORDER", default_value_t = 200)]
    pub max_order: u32,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print a catalog generating function, or one coefficient of it.
    #[command(after_help = "\
Examples:
  asym gf balanced --order 5 --coeff t2,x2      # 4
  asym gf matchings --order 6 --set r=0,s=0,t=1 # counts 1,0,0,8,48,384,4480
  asym gf unimodal-brute --order 10
  asym gf comp-restricted --parts odd --order 8
  asym gf --list")]
    Gf(GfArgs),
    /// List every object of a family with the requested statistics.
    #[command(after_help = "\
Examples:
  asym enum trees -n 3 --stats da,ds
  asym enum words --m 3 -n 2 --stats da --format csv")]
    Enum(FamilyArgs),
    /// Joint histogram of statistics over one size class.
    #[command(after_help = "\
Examples:
  asym hist balanced -n 3 --stats da          # da 1: 12, da 3: 8
  asym hist matchings -n 2 --stats c,p
  asym hist compositions-with-parts --parts 1,2 -n 6 --stats da")]
    Hist(FamilyArgs),
    /// Apply a bijection to one object, or check it exhaustively.
    #[command(after_help = "\
Examples:
  asym bij phi --input 0111000010110110110001
  asym bij zigzag --input 0011                  # 0101
  asym bij unimodal-partition --input 1,2,1     # 3,1
  asym bij tree-reflect --input '[[null,null],null]'
  asym bij phi --check 6")]
    Bij(BijArgs),
    /// Exact moments and limit-law comparisons.
    #[command(after_help = "\
Examples:
  asym moments compositions -n 20,40,60
  asym moments trees -n 100 --format json
  asym moments words --m 3 -n 10,20")]
    Moments(MomentsArgs),
    /// Run the verification suite.
    #[command(after_help = "\
Examples:
  asym verify --suite all
  asym verify --suite bijection/ --suite constants/kt-corrected
  asym verify --json report.json
  asym verify --list")]
    Verify(VerifyArgs),
    /// Cross-check catalog entries against OEIS b-files.
    #[command(subcommand)]
    Oeis(OeisCommand),
}

#[derive(Args, Debug)]
pub struct GfArgs {
    /// Catalog entry.
    #[arg(required_unless_present = "list")]
    pub name: Option<String>,
    /// Truncation order in the size variable.
    #[arg(long, default_value_t = 50)]
    pub order: u32,
    /// Specialize auxiliary variables, e.g. `r=0,s=1/2`.
    #[arg(long, value_delimiter = ',')]
    pub set: Vec<String>,
    /// Print one coefficient, e.g. `t2,x2` or `t^2*x^2`.
    #[arg(long)]
    pub coeff: Option<String>,
    /// Alphabet size for `words`.
    #[arg(long)]
    pub m: Option<u32>,
    /// Allowed parts: `odd`, `even`, `all` or a list like `1,2`.
    #[arg(long)]
    pub parts: Option<String>,
    /// List catalog entries.
    #[arg(long)]
    pub list: bool,
}

#[derive(Args, Debug)]
pub struct FamilyArgs {
    /// Family name.
    pub family: String,
    /// Size (word length for `words`).
    #[arg(short = 'n', long)]
    pub n: usize,
    /// Comma separated statistics, e.g. `da,ds`.
    #[arg(long, value_delimiter = ',')]
    pub stats: Vec<String>,
    /// Alphabet size for `words`.
    #[arg(long)]
    pub m: Option<u32>,
    /// Allowed parts for `compositions-with-parts`.
    #[arg(long)]
    pub parts: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Bijection {
    Phi,
    Zigzag,
    UnimodalPartition,
    TreeReflect,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("what").required(true).args(["input", "check"]))]
pub struct BijArgs {
    pub name: Bijection,
    /// Object to map: a 0/1 word, a composition `1,2,1`, or a tree as nested JSON pairs.
    #[arg(long, allow_hyphen_values = true)]
    pub input: Option<String>,
    /// Apply the inverse map instead.
    #[arg(long, requires = "input")]
    pub inverse: bool,
    /// Check the bijection on every object up to this size.
    #[arg(long)]
    pub check: Option<usize>,
}

#[derive(Args, Debug)]
pub struct MomentsArgs {
    /// compositions, balanced, words, trees or matchings.
    pub family: String,
    /// Sizes, comma separated.
    #[arg(short = 'n', long, value_delimiter = ',', required = true)]
    pub n: Vec<u32>,
    /// Alphabet size for `words`.
    #[arg(long)]
    pub m: Option<u32>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Check ids, `group/` prefixes, or `all`.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    pub suite: Vec<String>,
    /// Also write the report as JSON here.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// List check ids.
    #[arg(long)]
    pub list: bool,
}

#[derive(Subcommand, Debug)]
pub enum OeisCommand {
    /// Compare a catalog entry with a b-file; without A-numbers, the whole manifest.
    #[command(after_help = "\
Examples:
  asym oeis check A047974 --against matchings-sym --offline
  asym oeis check --offline")]
    Check(OeisCheckArgs),
    /// Print the terms of a b-file.
    Fetch(OeisFetchArgs),
    /// List the manifest of cited sequences.
    List,
}

#[derive(Args, Debug)]
pub struct OeisSource {
    /// Use only the cache and the vendored fixtures.
    #[arg(long)]
    pub offline: bool,
    /// Cache directory.
    #[arg(long, env = "ASYM_OEIS_CACHE")]
    pub cache_dir: Option<PathBuf>,
    /// OEIS base URL.
    #[arg(long, env = "ASYM_OEIS_ENDPOINT")]
    pub endpoint: Option<String>,
}

#[derive(Args, Debug)]
pub struct OeisCheckArgs {
    pub a_numbers: Vec<String>,
    /// Catalog entry to compare against (defaults to the manifest pairing).
    #[arg(long)]
    pub against: Option<String>,
    #[command(flatten)]
    pub source: OeisSource,
}

#[derive(Args, Debug)]
pub struct OeisFetchArgs {
    pub a_number: String,
    #[command(flatten)]
    pub source: OeisSource,
}

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Environment(String),
    /// Stdout was closed by the reader, as in `asym ... | head`.
    Closed,
}

/// `Ok(false)` means the command ran but a check failed.
pub type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = commands::run(&cli, &mut out);
    let result = match (result, out.flush()) {
        (Ok(ok), Err(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(ok),
        (r, _) => r,
    };
    match result {
        Ok(true) | Err(Failure::Closed) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Environment(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
