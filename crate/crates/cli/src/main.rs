use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use smallcover::charmap::factor_compatible;
use smallcover::enumerate::{classify, Census};
use smallcover::hodge::hodge_analysis;
use smallcover::triangular::blockize;
use smallcover::{CharMatrix, Error, InstanceFile, PolygonProduct};

mod report;

use report::dims_text;

#[derive(Parser)]
#[command(name = "smallcover", version, about = "Invariants of small covers over products of polygons")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Check that every vertex minor is invertible.
    Validate { path: PathBuf },
    /// Orientability, factor-compatibility, obstructions and Betti numbers.
    Analyze { path: PathBuf },
    /// Hodge numbers of the projective model of a factor-compatible cover.
    Hodge { path: PathBuf },
    /// Block lower-triangular normal form and its tower of surface bundles.
    Blockize {
        path: PathBuf,
        /// Write the normal form as an instance file.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Classify every characteristic matrix over a product, e.g. `4,6`.
    Census {
        #[arg(value_delimiter = ',', required = true)]
        factors: Vec<usize>,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Only list factor-compatible classes.
        #[arg(long)]
        compatible_only: bool,
        /// Compare against (or create) a golden file in this directory.
        #[arg(long)]
        snapshot_dir: Option<PathBuf>,
    },
}

const EXIT_INPUT: u8 = 1;
const EXIT_NOT_CHARACTERISTIC: u8 = 2;
const EXIT_NOT_COMPATIBLE: u8 = 3;
const EXIT_SNAPSHOT: u8 = 4;

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotCharacteristic { .. } => EXIT_NOT_CHARACTERISTIC,
            Error::NotFactorCompatible(_) => EXIT_NOT_COMPATIBLE,
            _ => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

type Outcome = Result<String, Failure>;

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

fn load(path: &Path) -> Result<CharMatrix, Failure> {
    let inst = InstanceFile::read(path)?;
    Ok(inst.to_matrix()?)
}

fn load_valid(path: &Path) -> Result<CharMatrix, Failure> {
    Ok(load(path)?.validated()?)
}

fn cmd_validate(path: &Path, format: Format) -> Result<(String, u8), Failure> {
    let lambda = load(path)?;
    let r = report::validate_report(&lambda, &smallcover::charmap::validate(&lambda));
    let code = if r.valid { 0 } else { EXIT_NOT_CHARACTERISTIC };
    let text = match format {
        Format::Json => json(&r),
        Format::Table if r.valid => "valid\n".to_string(),
        Format::Table => format!(
            "not characteristic at vertex {:?} (facets {})\n",
            r.vertex.clone().unwrap_or_default(),
            r.facets.clone().unwrap_or_default().join(" ")
        ),
    };
    Ok((text, code))
}

fn cmd_analyze(path: &Path, format: Format) -> Outcome {
    let lambda = load_valid(path)?;
    let compat = factor_compatible(&lambda)?;
    let r = report::analyze_report(&lambda, &compat)?;
    Ok(match format {
        Format::Json => json(&r),
        Format::Table => {
            let mut s = String::new();
            let _ = writeln!(s, "factors            {:?}", r.factors);
            let _ = writeln!(s, "orientable         {}", r.orientable);
            let _ = writeln!(s, "factor-compatible  {}", r.factor_compatible);
            if let Some(why) = &r.refusal {
                let _ = writeln!(s, "refusal            {why}");
            }
            let _ = writeln!(s, "symplectic         {}", r.obstructions.symplectic);
            for f in &r.obstructions.findings {
                let _ = writeln!(s, "obstruction        {f}");
            }
            let _ = writeln!(s, "betti Q            {}", dims_text(&r.betti_q));
            let _ = writeln!(s, "betti F2           {}", dims_text(&r.betti_f2));
            let _ = writeln!(s, "Sq1 homology       {} ({})", dims_text(&r.betti_sq1), if r.sq1_agrees { "agrees" } else { "DISAGREES" });
            s
        }
    })
}

fn cmd_hodge(path: &Path, format: Format) -> Outcome {
    let lambda = load_valid(path)?;
    let analysis = hodge_analysis(&lambda)?;
    let r = report::hodge_report(&lambda, &analysis)?;
    Ok(match format {
        Format::Json => json(&r),
        Format::Table => {
            let mut s = String::new();
            for m in &r.multiplicities {
                let _ = writeln!(s, "factor {} (genus {})", m.factor, m.genus);
                for (rep, a) in m.characters.iter().filter(|(_, &a)| a > 0) {
                    let _ = writeln!(s, "  {rep}  {a}");
                }
            }
            for t in &r.t {
                let _ = writeln!(s, "t{:?} = {}", t.subset, t.value);
            }
            let _ = writeln!(s, "T = {:?}", r.big_t);
            let _ = writeln!(s, "{}", r.diamond_text);
            let _ = writeln!(s, "round trip: {}", if r.round_trip.ok() { "ok" } else { "FAILED" });
            s
        }
    })
}

fn cmd_blockize(path: &Path, output: Option<&Path>, format: Format) -> Outcome {
    let lambda = load_valid(path)?;
    let cert = factor_compatible(&lambda)?.into_certificate()?;
    let form = blockize(&cert)?;
    let r = report::blockize_report(&lambda, &form);
    if !r.verified {
        return Err(Failure { code: EXIT_INPUT, message: format!("normal form failed verification: {}", r.violations.join("; ")) });
    }
    if let Some(out) = output {
        std::fs::write(out, r.result.to_json())
            .map_err(|e| Failure { code: EXIT_INPUT, message: format!("{}: {e}", out.display()) })?;
    }
    Ok(match format {
        Format::Json => json(&r),
        Format::Table => {
            let mut s = String::new();
            let _ = writeln!(s, "factor order  {:?}", r.factor_order);
            let _ = writeln!(s, "columns       {:?}", r.colperm);
            for row in &r.result.rows {
                let _ = writeln!(s, "  {row}");
            }
            for f in &r.tower {
                let _ = writeln!(s, "fiber {}: genus {} over a {}-gon (factor {})", f.position, f.genus, f.sides, f.factor);
            }
            s
        }
    })
}

#[derive(Serialize)]
struct CensusOutput<'a> {
    generator: &'static str,
    #[serde(flatten)]
    census: &'a Census,
}

fn census_table(c: &Census) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# census over {:?}", c.factors);
    let _ = writeln!(
        s,
        "# classes {}  orientable {}  factor-compatible {}  triangle {}  all-odd {}  unknown {}",
        c.summary.classes,
        c.summary.orientable,
        c.summary.factor_compatible,
        c.summary.triangle_obstructed,
        c.summary.all_odd,
        c.summary.unknown
    );
    for r in &c.classes {
        let t = r.hodge.as_ref().map(|h| format!("{:?}", h.big_t)).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            s,
            "{:>5}  {}  orient={} compat={} Q={} F2={} T={}",
            r.index + 1,
            r.rows.join(" "),
            u8::from(r.orientable),
            u8::from(r.factor_compatible),
            dims_text(&r.betti_q),
            dims_text(&r.betti_f2),
            t
        );
    }
    s
}

fn cmd_census(factors: &[usize], jobs: usize, compatible_only: bool, snapshots: Option<&Path>, format: Format) -> Result<(String, u8), Failure> {
    let p = PolygonProduct::new(factors)?;
    let mut census = classify(&p, jobs)?;
    if compatible_only {
        census = census.compatible_only();
    }
    let text = match format {
        Format::Json => json(&CensusOutput { generator: concat!("smallcover ", env!("CARGO_PKG_VERSION")), census: &census }),
        Format::Table => census_table(&census),
    };
    let Some(dir) = snapshots else {
        return Ok((text, 0));
    };
    let stem: Vec<String> = factors.iter().map(ToString::to_string).collect();
    let name = format!(
        "census-{}{}.{}",
        stem.join("-"),
        if compatible_only { "-compatible" } else { "" },
        if format == Format::Json { "json" } else { "txt" }
    );
    let file = dir.join(name);
    let io = |e: std::io::Error| Failure { code: EXIT_INPUT, message: format!("{}: {e}", file.display()) };
    if file.exists() {
        let golden = std::fs::read_to_string(&file).map_err(io)?;
        if golden != text {
            eprintln!("census output differs from snapshot {}", file.display());
            return Ok((text, EXIT_SNAPSHOT));
        }
    } else {
        std::fs::create_dir_all(dir).map_err(io)?;
        std::fs::write(&file, &text).map_err(io)?;
        eprintln!("wrote snapshot {}", file.display());
    }
    Ok((text, 0))
}

fn run(cli: Cli) -> Result<(String, u8), Failure> {
    let f = cli.format;
    match &cli.command {
        Command::Validate { path } => cmd_validate(path, f),
        Command::Analyze { path } => cmd_analyze(path, f).map(|s| (s, 0)),
        Command::Hodge { path } => cmd_hodge(path, f).map(|s| (s, 0)),
        Command::Blockize { path, output } => cmd_blockize(path, output.as_deref(), f).map(|s| (s, 0)),
        Command::Census { factors, jobs, compatible_only, snapshot_dir } => {
            cmd_census(factors, *jobs, *compatible_only, snapshot_dir.as_deref(), f)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok((text, code)) => {
            print!("{text}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
