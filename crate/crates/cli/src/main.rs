mod fail;
mod io;
mod render;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use explograph_core::affine::Polytope;
use explograph_core::explosion::{
    explode_nc, refine, refine_by_fan, rend_components, tropical_completion, ExplodedComplex, NcConfiguration,
};
use explograph_core::gluing::{
    direct_count, enumerate_rigid_curves, ledger_entry, oracle_product, RigidCurve, CountingProblem, LatticeMultiplicity, ProblemSpec,
};
use explograph_core::rational::{parse_rational, rat};
use explograph_core::tropcurve::TropicalCurve;
use explograph_core::{Error, Rational};
use serde::Deserialize;

use fail::{CliResult, Failure, EXIT_MISMATCH, EXIT_NON_GENERIC};
use report::*;

#[derive(Parser)]
#[command(name = "explograph", version, about = "Exploded manifolds and tropical curve counts")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Explode a normal-crossing configuration or a fan file
    Explode {
        input: PathBuf,
        /// Re-validate a file (input or emitted report) instead
        #[arg(long)]
        check: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Refine a complex by per-cell subdivisions, or build one from a fan
    Refine {
        subdivision: PathBuf,
        /// Complex to refine; required unless the file holds a fan
        #[arg(long)]
        complex: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tropical completion of a complex at a point
    Complete {
        complex: PathBuf,
        /// Coordinates, comma separated, e.g. 1/2,0
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        at: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Components of the rend up to a contact order
    Rend {
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_order: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rigid plane curves through the problem's points
    Enumerate {
        problem: PathBuf,
        /// Seed for generated points when the problem gives none
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count curves directly, by gluing, or both
    Count {
        problem: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        mode: ModeArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SVG of a curve, or one SVG per type of a report (into a directory)
    Render {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(multiple = false)]
struct ModeArgs {
    #[arg(long)]
    glued: bool,
    #[arg(long)]
    direct: bool,
    #[arg(long)]
    both: bool,
}

impl ModeArgs {
    fn mode(&self) -> Mode {
        match (self.glued, self.direct) {
            (true, _) => Mode::Glued,
            (_, true) => Mode::Direct,
            _ => Mode::Both,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SubdivisionFile {
    subdivisions: Vec<Option<Vec<Polytope>>>,
}

fn load_complex(path: &Path) -> CliResult<ExplodedComplex> {
    let input = io::load(path)?;
    let ec = if input.schema().is_some() {
        input.parse::<ComplexFile>()?.complex
    } else {
        input.parse::<ExplodedComplex>()?
    };
    ec.validate()?;
    Ok(ec)
}

fn emit_complex(out: Option<&Path>, ec: ExplodedComplex) -> CliResult<()> {
    let n = ec.charts.len();
    io::emit(out, &io::to_json(&ComplexFile::new(ec)))?;
    if out.is_some() {
        eprintln!("{n} charts");
    }
    Ok(())
}

fn explode(input: &Path, check: bool, out: Option<&Path>) -> CliResult<()> {
    let file = io::load(input)?;
    if check {
        let kind = report::check(&file)?;
        println!("ok {kind}");
        return Ok(());
    }
    let ec = if file.has_key("fan") {
        refine_by_fan(&file.parse::<FanFile>()?.fan)?
    } else {
        explode_nc(&file.parse::<NcConfiguration>()?)?
    };
    emit_complex(out, ec)
}

fn refine_cmd(sub: &Path, complex: Option<&Path>, out: Option<&Path>) -> CliResult<()> {
    let file = io::load(sub)?;
    let ec = if file.has_key("fan") {
        refine_by_fan(&file.parse::<FanFile>()?.fan)?
    } else {
        let subs = file.parse::<SubdivisionFile>()?.subdivisions;
        let base = complex.ok_or_else(|| Failure::schema("--complex is required for a subdivision file"))?;
        refine(&load_complex(base)?, &subs)?
    };
    emit_complex(out, ec)
}

fn complete(complex: &Path, at: &[String], out: Option<&Path>) -> CliResult<()> {
    let x: Vec<Rational> = at.iter().map(|s| parse_rational(s)).collect::<Result<_, _>>()?;
    let ec = load_complex(complex)?;
    emit_complex(out, tropical_completion(&ec, &x)?)
}

fn rend(input: &Path, max_order: u64, out: Option<&Path>) -> CliResult<()> {
    let configuration: NcConfiguration = io::load(input)?.parse()?;
    let components = rend_components(&configuration, max_order)?;
    let f = RendFile { schema: REND.into(), tool: TOOL.into(), seed: None, max_order, configuration, components };
    io::emit(out, &io::to_json(&f))
}

/// The problem with its points, and the seed if it was used.
fn resolve(path: &Path, seed: u64) -> CliResult<(CountingProblem, Option<u64>, u32)> {
    let spec: ProblemSpec = io::load(path)?.parse()?;
    let seeded = spec.points.is_none();
    let (prob, reseeds) = spec.resolve(seed).map_err(|e| non_generic_hint(e, seeded.then_some(seed)))?;
    Ok((prob, seeded.then_some(seed), reseeds))
}

fn non_generic_hint(e: Error, seed: Option<u64>) -> Failure {
    let mut f = Failure::from(e);
    if f.code == EXIT_NON_GENERIC {
        match seed {
            Some(s) => f.msg.push_str(&format!("; suggested reseed: --seed {}", s + 1)),
            None => f.msg.push_str("; or drop \"points\" and pass --seed 1"),
        }
    }
    f
}

fn enumerate(problem: &Path, seed: u64, out: Option<&Path>) -> CliResult<()> {
    let (prob, seed, reseeds) = resolve(problem, seed)?;
    let curves: Vec<TypedCurve> = enumerate_rigid_curves(&prob)
        .map_err(|e| non_generic_hint(e, seed))?
        .into_iter()
        .map(TypedCurve::new)
        .collect();
    let f = EnumerationFile {
        schema: ENUMERATION.into(),
        tool: TOOL.into(),
        seed,
        reseeds,
        problem: prob,
        types: curves.len(),
        curves,
    };
    io::emit(out, &io::to_json(&f))
}

fn count(problem: &Path, seed: u64, mode: Mode, out: Option<&Path>) -> CliResult<()> {
    let (prob, seed, reseeds) = resolve(problem, seed)?;
    let oracle = LatticeMultiplicity;
    let rigid = enumerate_rigid_curves(&prob).map_err(|e| non_generic_hint(e, seed))?;
    let mut curves = Vec::with_capacity(rigid.len());
    let (mut direct, mut glued) = (None, None);
    if mode == Mode::Direct {
        direct = Some(direct_count(&prob, &oracle)?);
        for rc in rigid {
            let m = oracle_product(&rc.curve, &oracle)?;
            let mut tc = TypedCurve::new(rc);
            tc.multiplicity = Some(fmt_q(&m));
            curves.push(tc);
        }
    } else {
        let (mut d, mut g) = (rat(0), rat(0));
        for rc in rigid {
            let l = ledger_entry(&rc, &oracle)?;
            d += &l.direct;
            g += &l.contribution;
            let mut tc = TypedCurve::new(rc);
            tc.ledger = Some(l);
            curves.push(tc);
        }
        glued = Some(g);
        if mode == Mode::Both {
            direct = Some(d);
        }
    }
    let verdict = match (&direct, &glued) {
        (Some(d), Some(g)) => {
            let ok = d == g && curves.iter().all(|c| c.ledger.as_ref().is_some_and(|l| l.balanced()));
            Some(if ok { Verdict::Equal } else { Verdict::Mismatch })
        }
        _ => None,
    };
    let f = CountFile {
        schema: COUNT.into(),
        tool: TOOL.into(),
        seed,
        reseeds,
        problem: prob,
        mode,
        direct: direct.as_ref().map(fmt_q),
        glued: glued.as_ref().map(fmt_q),
        verdict,
        curves,
    };
    io::emit(out, &io::to_json(&f))?;
    let summary = [("direct", &f.direct), ("glued", &f.glued)]
        .iter()
        .filter_map(|(k, v)| v.as_ref().map(|v| format!("{k} {v}")))
        .collect::<Vec<_>>()
        .join(", ");
    match verdict {
        Some(Verdict::Mismatch) => Err(Failure::new(EXIT_MISMATCH, format!("pipelines disagree: {summary}"))),
        Some(Verdict::Equal) => {
            eprintln!("{summary}: EQUAL");
            Ok(())
        }
        None => {
            eprintln!("{summary}");
            Ok(())
        }
    }
}

fn render_cmd(input: &Path, out: Option<&Path>) -> CliResult<()> {
    let file = io::load(input)?;
    let typed: Vec<TypedCurve> = match file.schema() {
        Some(ENUMERATION) => file.parse::<EnumerationFile>()?.curves,
        Some(COUNT) => file.parse::<CountFile>()?.curves,
        Some(other) => return Err(Failure::schema(format!("cannot render a {other} file"))),
        None if file.has_key("marks") => {
            let rc: RigidCurve = file.parse()?;
            vec![TypedCurve::new(rc)]
        }
        None => {
            let curve: TropicalCurve = file.parse()?;
            let rc = RigidCurve { curve, marks: Vec::new() };
            vec![TypedCurve::new(rc)]
        }
    };
    if file.schema().is_none() {
        let c = &typed[0];
        return io::emit(out, &render::svg(&c.curve, &c.marks, &c.type_hash)?);
    }
    let dir = out.ok_or_else(|| Failure::schema("--out <directory> is required to render a report"))?;
    fs::create_dir_all(dir)?;
    for (i, c) in typed.iter().enumerate() {
        let svg = render::svg(&c.curve, &c.marks, &c.type_hash)?;
        io::write_atomic(&dir.join(format!("{i:03}-{}.svg", c.type_hash)), svg.as_bytes())?;
    }
    eprintln!("{} SVG files in {}", typed.len(), dir.display());
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.cmd {
        Cmd::Explode { input, check, out } => explode(&input, check, out.as_deref()),
        Cmd::Refine { subdivision, complex, out } => refine_cmd(&subdivision, complex.as_deref(), out.as_deref()),
        Cmd::Complete { complex, at, out } => complete(&complex, &at, out.as_deref()),
        Cmd::Rend { input, max_order, out } => rend(&input, max_order, out.as_deref()),
        Cmd::Enumerate { problem, seed, out } => enumerate(&problem, seed, out.as_deref()),
        Cmd::Count { problem, seed, mode, out } => count(&problem, seed, mode.mode(), out.as_deref()),
        Cmd::Render { input, out } => render_cmd(&input, out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code as u8)
        }
    }
}
