use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

mod commands;
mod range;
mod svg;
mod table;

use commands::{CommandKind, Family, Format, ScanSpec};
use range::{parse_ints, parse_reals};

/// Periodic orbits, stability scans and Birkhoff coefficients for the
/// annular billiard.
///
/// Parameter lists accept `v`, `a,b,c`, `start:stop:count` and
/// `start:stop:count:log`; integer lists accept `a,b` and inclusive `a:b`.
#[derive(Parser)]
#[command(name = "annular", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output encoding.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for every random choice (recorded in the output).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to one per core.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form against numeric monodromy trace over a table grid.
    Stability {
        #[arg(long, default_value = "3:10")]
        n: String,
        #[arg(long, default_value = "1")]
        k: String,
        /// Scatterer radii; by default `--samples` radii spread over each table's admissible range.
        #[arg(long = "R")]
        radius: Option<String>,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value = "0,0.01,0.05")]
        delta: String,
        /// Also scan tangent-scatterer orbits at these detunings.
        #[arg(long)]
        eps: Option<String>,
        /// Orbit families to include.
        #[arg(long, value_enum, default_value_t = Family::All)]
        config: Family,
        #[command(flatten)]
        common: Common,
    },
    /// Bifurcation and admissibility curves in the (δ, R) plane.
    Region {
        #[arg(long, default_value = "5,20")]
        n: String,
        #[arg(long, default_value = "1")]
        k: String,
        /// Displacements; by default 0 to 1.25 δ* for each table.
        #[arg(long)]
        delta: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// First Birkhoff coefficient of the tangent-scatterer orbit.
    Birkhoff {
        #[arg(long, default_value = "3,4,5,10,20,50,100,1000")]
        n: String,
        /// Detunings; by default a ladder scaled to each n's stability threshold.
        #[arg(long)]
        eps: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Collision sequence and drawing of periodic orbits.
    Orbit {
        #[arg(long, default_value = "4")]
        n: String,
        #[arg(long, default_value = "1")]
        k: String,
        /// Scatterer radii; by default half the admissible maximum.
        #[arg(long = "R")]
        radius: Option<String>,
        #[arg(long, default_value = "0")]
        delta: String,
        /// Tangent-scatterer orbits at these detunings.
        #[arg(long)]
        eps: Option<String>,
        /// Orbit families to include.
        #[arg(long, value_enum, default_value_t = Family::All)]
        config: Family,
        #[command(flatten)]
        common: Common,
    },
    /// Iterate seeds near the tangent orbit under the period map.
    Section {
        #[arg(long, default_value = "3")]
        n: String,
        #[arg(long, default_value = "0.02")]
        eps: String,
        /// Distance of the seeds from the periodic point.
        #[arg(long, default_value = "1e-4")]
        radius: String,
        #[arg(long, default_value_t = 10_000)]
        iterations: usize,
        /// Number of seeds, placed at random angles drawn from `--seed`.
        #[arg(long, default_value_t = 8)]
        seeds: usize,
        #[command(flatten)]
        common: Common,
    },
    /// The winding-number bound f(x) and the minimal periods n_k.
    Lemma {
        #[arg(long, default_value = "3:1e6:400:log")]
        x: String,
        #[arg(long, default_value = "2:7")]
        k: String,
        #[command(flatten)]
        common: Common,
    },
}

fn base(kind: CommandKind, c: &Common) -> ScanSpec {
    let out = c.out.as_ref().map(|p| p.display().to_string());
    ScanSpec::new(kind, c.format, out, c.seed, c.jobs)
}

fn positive(name: &str, v: Vec<f64>) -> Result<Vec<f64>> {
    if let Some(x) = v.iter().find(|x| **x < 0.0) {
        bail!("--{name} must be non-negative, got {x}");
    }
    Ok(v)
}

fn resolve(cmd: &Command) -> Result<(ScanSpec, &Common)> {
    let opt = |s: &Option<String>| s.as_deref().map(parse_reals).transpose();
    Ok(match cmd {
        Command::Stability { n, k, radius, samples, delta, eps, config, common } => {
            let mut s = base(CommandKind::Stability, common);
            s.n = Some(parse_ints(n)?);
            s.k = Some(parse_ints(k)?);
            s.radius = opt(radius)?;
            s.samples = Some(*samples);
            s.delta = Some(positive("delta", parse_reals(delta)?)?);
            s.eps = opt(eps)?;
            s.config = Some(*config);
            (s, common)
        }
        Command::Region { n, k, delta, common } => {
            let mut s = base(CommandKind::Region, common);
            s.n = Some(parse_ints(n)?);
            s.k = Some(parse_ints(k)?);
            s.delta = opt(delta)?.map(|d| positive("delta", d)).transpose()?;
            (s, common)
        }
        Command::Birkhoff { n, eps, common } => {
            let mut s = base(CommandKind::Birkhoff, common);
            s.n = Some(parse_ints(n)?);
            s.eps = opt(eps)?;
            (s, common)
        }
        Command::Orbit { n, k, radius, delta, eps, config, common } => {
            let mut s = base(CommandKind::Orbit, common);
            s.n = Some(parse_ints(n)?);
            s.k = Some(parse_ints(k)?);
            s.radius = opt(radius)?;
            s.delta = Some(positive("delta", parse_reals(delta)?)?);
            s.eps = opt(eps)?;
            s.config = Some(*config);
            (s, common)
        }
        Command::Section { n, eps, radius, iterations, seeds, common } => {
            let mut s = base(CommandKind::Section, common);
            s.n = Some(parse_ints(n)?);
            s.eps = Some(parse_reals(eps)?);
            s.island_radius = Some(positive("radius", parse_reals(radius)?)?);
            s.iterations = Some(*iterations);
            s.seeds = Some(*seeds);
            (s, common)
        }
        Command::Lemma { x, k, common } => {
            let mut s = base(CommandKind::Lemma, common);
            s.x = Some(parse_reals(x)?);
            s.k = Some(parse_ints(k)?);
            (s, common)
        }
    })
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let (spec, common) = resolve(&cli.command)?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = common.jobs {
        if j == 0 {
            bail!("--jobs must be at least 1");
        }
        pool = pool.num_threads(j);
    }
    let output = pool.build()?.install(|| commands::run(&spec))?;

    let sink: Box<dyn Write> = match &common.out {
        Some(path) => Box::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    match spec.format {
        Format::Csv => output.table.write_csv(&spec, &mut sink)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink, &output.table.to_json(&spec)?)?;
            writeln!(sink)?;
        }
        Format::Svg => match &output.svg {
            Some(svg) => sink.write_all(svg.as_bytes())?,
            None => bail!("this command has no SVG rendering"),
        },
    }
    sink.flush()?;
    Ok(())
}
