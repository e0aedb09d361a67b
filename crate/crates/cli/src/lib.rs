//! Command-line front end. [`run`] parses arguments, executes one command,
//! and returns the process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success; every verdict holds or is unresolved |
//! | 1 | bad input, failed precondition, or a violated verdict |
//! | 2 | resolution budget exceeded |

mod parse;
mod svg;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sinkchain::chain::{
    chain_report_with_budget, conjecture_scan, morse_dot, refine_resolution, BoxMapParams, Verdict,
    DEFAULT_BOX_BUDGET,
};
use sinkchain::game::{iterated_strict_dominance, load_game, zero_sum_interior_equilibrium};
use sinkchain::replicator::{integrate, kl_drift, trapping_certificate_with, IntegratorConfig};
use sinkchain::response::{
    build_response_graph, catalog, component_is_subgame, content, is_dag, pure_nash, scc_decomposition, to_dot,
};
use sinkchain::{Error, Game};

pub use parse::{parse_mixed, parse_shape, parse_subgame};
pub use svg::phase_portrait;

#[derive(Debug, Parser)]
#[command(name = "sinkchain", version, about = "Replicator dynamics, response graphs and sink chain components")]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Directory for output files and the run manifest.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct GameArgs {
    /// Built-in game (mp, rps, co, sd, dd, inner_diamond, outer_diamond, cmmp).
    #[arg(long, conflicts_with = "path")]
    pub catalog: Option<String>,

    /// Game file in JSON format.
    #[arg(value_name = "GAME")]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Response graph summary: components, sinks, contents, equilibria.
    Analyze {
        #[command(flatten)]
        game: GameArgs,
        /// Write the response graph in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Integrate the replicator flow from a start profile.
    Simulate {
        #[command(flatten)]
        game: GameArgs,
        /// Start profile, e.g. `0.9,0.1;0.5,0.5`, or `uniform`.
        #[arg(long, default_value = "uniform", allow_hyphen_values = true)]
        start: String,
        #[arg(long, default_value_t = 10.0)]
        time: f64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        /// Integrate the time-reversed field.
        #[arg(long)]
        reverse: bool,
        /// Write the trajectory as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Box map, Morse sets, and the sink correspondence report.
    Chain {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, default_value_t = 16)]
        kappa: usize,
        /// Flow time per box-map arc.
        #[arg(long = "T", alias = "t", default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        /// Lengthen the flow time (x5 per round) up to this value until
        /// sink components and sink Morse sets correspond.
        #[arg(long = "max-T", alias = "max-t")]
        max_t: Option<f64>,
        /// With `--max-T`: after the flow-time rounds, double kappa up to
        /// this value and repeat.
        #[arg(long, requires = "max_t")]
        max_kappa: Option<usize>,
        /// Random samples per box besides corners and center.
        #[arg(long, default_value_t = 8)]
        samples: usize,
        /// Padding radius (default: the box diameter).
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_BOX_BUDGET)]
        budget: usize,
        /// Report file (default `<game>.chain.json`).
        #[arg(long)]
        json: Option<PathBuf>,
        /// Write the Morse graph in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Trapping-region certificate for an attracting subgame.
    Certify {
        #[command(flatten)]
        game: GameArgs,
        /// Strategies per player, e.g. `0;0,1`.
        #[arg(long)]
        subgame: String,
        #[arg(long, default_value_t = 1000)]
        audit_samples: usize,
        /// Certificate file (default `<game>.certificate.json`).
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Tally correspondence verdicts over random games.
    Scan {
        /// Strategy counts, e.g. `2x3`.
        #[arg(long)]
        shape: String,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 12)]
        kappa: usize,
        #[arg(long = "T", alias = "t", default_value_t = 1.0)]
        t: f64,
    },
    /// SVG phase portrait of a 2x2 game with sink Morse boxes shaded.
    Plot {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, default_value_t = 16)]
        kappa: usize,
        /// Output file (default `<game>.svg`).
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Analyze { .. } => "analyze",
            Command::Simulate { .. } => "simulate",
            Command::Chain { .. } => "chain",
            Command::Certify { .. } => "certify",
            Command::Scan { .. } => "scan",
            Command::Plot { .. } => "plot",
        }
    }
}

/// Record of one run, written next to its outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    /// Arguments after the program name; re-running them reproduces the outputs.
    pub args: Vec<String>,
    pub seed: u64,
    pub parameters: serde_json::Value,
    pub outputs: Vec<PathBuf>,
    pub wall_seconds: f64,
}

/// Parses `args` (including the program name), runs the command, and
/// returns the exit code. Reports go to `out`, errors to stderr.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let argv = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(cli, argv, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

/// 2 for budget errors, 1 for everything else.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Budget { .. } | Error::ResolutionBudget { .. }) => 2,
        _ => 1,
    }
}

struct Run<'a> {
    dir: &'a Path,
    outputs: Vec<PathBuf>,
}

impl Run<'_> {
    fn write(&mut self, name: &Path, contents: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(path.clone());
        Ok(path)
    }
}

fn load(args: &GameArgs) -> Result<(Game, String)> {
    match (&args.catalog, &args.path) {
        (Some(name), _) => Ok((catalog(name)?, name.clone())),
        (None, Some(path)) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let game = load_game(&text).with_context(|| format!("loading {}", path.display()))?;
            let stem = path.file_stem().map_or("game".into(), |s| s.to_string_lossy().into_owned());
            Ok((game, stem))
        }
        (None, None) => bail!("give a game file or --catalog NAME"),
    }
}

pub fn execute(cli: Cli, argv: Vec<String>, out: &mut dyn Write) -> Result<u8> {
    let start = Instant::now();
    fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    let mut run = Run { dir: &cli.out, outputs: Vec::new() };
    let seed = cli.seed;
    let name = cli.command.name();
    let (code, parameters) = match &cli.command {
        Command::Analyze { game, dot } => analyze(game, dot.as_deref(), &mut run, out)?,
        Command::Simulate { game, start, time, dt, reverse, csv } => {
            simulate(game, start, *time, *dt, *reverse, csv.as_deref(), &mut run, out)?
        }
        Command::Chain { game, kappa, t, dt, max_t, max_kappa, samples, rho, budget, json, dot } => {
            let params = BoxMapParams { t: *t, dt: *dt, random_samples: *samples, rho: *rho, seed };
            let refine = max_t.map(|m| (m, max_kappa.unwrap_or(*kappa)));
            let files = (json.as_deref(), dot.as_deref());
            chain(game, *kappa, params, refine, *budget, files, &mut run, out)?
        }
        Command::Certify { game, subgame, audit_samples, json } => {
            certify(game, subgame, *audit_samples, seed, json.as_deref(), &mut run, out)?
        }
        Command::Scan { shape, count, kappa, t } => scan(shape, *count, *kappa, *t, seed, &mut run, out)?,
        Command::Plot { game, kappa, svg } => plot(game, *kappa, seed, svg.as_deref(), &mut run, out)?,
    };
    let manifest = RunManifest {
        command: name.to_string(),
        version: sinkchain::VERSION.to_string(),
        args: argv,
        seed,
        parameters,
        outputs: run.outputs.clone(),
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    let path = cli.out.join(format!("{name}.manifest.json"));
    fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(code)
}

#[derive(Serialize)]
struct ComponentSummary {
    id: usize,
    sink: bool,
    profiles: Vec<String>,
    subgame: Option<String>,
    content: Vec<String>,
}

#[derive(Serialize)]
struct Analysis {
    game: String,
    shape: Vec<usize>,
    strict: bool,
    dominance_survivors: String,
    components: Vec<ComponentSummary>,
    sinks: Vec<usize>,
    pure_nash: Option<Vec<String>>,
    dag: bool,
}

fn analyze(args: &GameArgs, dot: Option<&Path>, run: &mut Run, out: &mut dyn Write) -> Result<(u8, serde_json::Value)> {
    let (game, stem) = load(args)?;
    let rg = build_response_graph(&game);
    let scc = scc_decomposition(&rg);
    let profiles = |nodes: &[u32]| nodes.iter().map(|&v| rg.profile(v).to_string()).collect::<Vec<_>>();
    let components: Vec<ComponentSummary> = (0..scc.len())
        .map(|c| {
            let nodes = scc.component(c);
            let sink = scc.is_sink(c);
            ComponentSummary {
                id: c,
                sink,
                profiles: profiles(nodes),
                subgame: component_is_subgame(&rg, nodes).map(|y| y.to_string()),
                content: if sink { content(&rg, nodes).boxes.iter().map(ToString::to_string).collect() } else { vec![] },
            }
        })
        .collect();
    let analysis = Analysis {
        game: stem.clone(),
        shape: game.strategy_counts().to_vec(),
        strict: game.is_strict(),
        dominance_survivors: iterated_strict_dominance(&game).to_string(),
        sinks: scc.sink_components(),
        pure_nash: pure_nash(&rg).ok().map(|v| profiles(&v)),
        dag: is_dag(&rg),
        components,
    };

    writeln!(out, "game: {} ({})", stem, game.shape_string())?;
    writeln!(out, "strict: {}", analysis.strict)?;
    writeln!(out, "dominance survivors: {}", analysis.dominance_survivors)?;
    writeln!(out, "components: {} ({} sink)", scc.len(), analysis.sinks.len())?;
    for c in analysis.components.iter().filter(|c| c.sink) {
        writeln!(
            out,
            "  sink {} size {}: {}; subgame: {}; content: {}",
            c.id,
            c.profiles.len(),
            c.profiles.join(" "),
            c.subgame.as_deref().unwrap_or("no"),
            c.content.join(" | ")
        )?;
    }
    match &analysis.pure_nash {
        Some(ne) if ne.is_empty() => writeln!(out, "pure nash: none")?,
        Some(ne) => writeln!(out, "pure nash: {}", ne.join(" "))?,
        None => writeln!(out, "pure nash: not read off (game not strict)")?,
    }
    writeln!(out, "dag: {}", analysis.dag)?;

    run.write(Path::new(&format!("{stem}.analysis.json")), &(serde_json::to_string_pretty(&analysis)? + "\n"))?;
    if let Some(path) = dot {
        let p = run.write(path, &to_dot(&rg, &scc, &stem))?;
        writeln!(out, "wrote {}", p.display())?;
    }
    Ok((0, serde_json::json!({ "game": args, "dot": dot })))
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    args: &GameArgs,
    start: &str,
    time: f64,
    dt: f64,
    reverse: bool,
    csv: Option<&Path>,
    run: &mut Run,
    out: &mut dyn Write,
) -> Result<(u8, serde_json::Value)> {
    let (game, _) = load(args)?;
    let x0 = parse_mixed(start, game.strategy_counts()).context("invalid --start")?;
    let cfg = IntegratorConfig::new(dt, time)?;
    let traj = integrate(&game, &x0, &cfg, reverse)?;
    let end = traj.last();
    writeln!(out, "steps: {}", traj.len() - 1)?;
    writeln!(out, "endpoint: {end}")?;
    let drift = traj
        .states()
        .flat_map(|x| {
            let mut sums = Vec::new();
            let mut at = 0;
            for &c in game.strategy_counts() {
                sums.push((x[at..at + c].iter().sum::<f64>() - 1.0).abs());
                at += c;
            }
            sums
        })
        .fold(0.0, f64::max);
    writeln!(out, "simplex drift: {drift:.3e}")?;
    if let Ok(Some(xstar)) = zero_sum_interior_equilibrium(&game) {
        writeln!(out, "kl drift: {:.3e}", kl_drift(&traj, &xstar))?;
    }
    if let Some(path) = csv {
        let p = run.write(path, &traj.to_csv())?;
        writeln!(out, "wrote {}", p.display())?;
    }
    Ok((
        0,
        serde_json::json!({ "game": args, "start": start, "time": time, "dt": dt, "reverse": reverse, "csv": csv }),
    ))
}

#[allow(clippy::too_many_arguments)]
fn chain(
    args: &GameArgs,
    kappa: usize,
    params: BoxMapParams,
    refine: Option<(f64, usize)>,
    budget: usize,
    (json, dot): (Option<&Path>, Option<&Path>),
    run: &mut Run,
    out: &mut dyn Write,
) -> Result<(u8, serde_json::Value)> {
    let (game, stem) = load(args)?;
    let (report, _, md) = match refine {
        Some((max_t, max_kappa)) => refine_resolution(&game, kappa, params, max_t, max_kappa, budget)?,
        None => chain_report_with_budget(&game, kappa, params, budget)?,
    };
    let r = &report.resolution;
    writeln!(out, "game: {} ({})", stem, game.shape_string())?;
    writeln!(
        out,
        "kappa {} delta {} rho {} epsilon {} T {} dt {} samples/box {}",
        r.kappa, r.delta, r.rho, r.epsilon, r.t, r.dt, r.samples_per_box
    )?;
    writeln!(
        out,
        "boxes: {}, arcs: {}, morse sets: {} ({} sink), transient boxes: {}",
        report.num_boxes,
        report.num_arcs,
        report.morse_sets.len(),
        report.sink_morse_count,
        report.transient_boxes
    )?;
    for (k, c) in report.correspondence.iter().enumerate() {
        let set = c.morse_set.map_or("-".to_string(), |m| format!("M{m} ({} boxes)", c.morse_boxes));
        writeln!(
            out,
            "  sink component {k} [{}] -> {set}: existence {}, content {}/{} boxes {}, one-layer {}",
            c.profiles.join(" "),
            c.existence.as_str(),
            c.content_boxes_in_morse,
            c.content_boxes,
            c.content_containment.as_str(),
            c.conjecture2.as_str()
        )?;
    }
    writeln!(
        out,
        "sink components {} vs sink morse sets {}: {}",
        report.sink_scc_count,
        report.sink_morse_count,
        report.conjecture1.as_str()
    )?;
    if let Some(t) = &report.timing {
        writeln!(out, "time: {:.2}s (box map {:.2}s)", t.total_seconds, t.box_map_seconds)?;
    }
    let json = json.map_or_else(|| PathBuf::from(format!("{stem}.chain.json")), Path::to_path_buf);
    let p = run.write(&json, &(report.analytical_json() + "\n"))?;
    writeln!(out, "wrote {}", p.display())?;
    if let Some(path) = dot {
        let p = run.write(path, &morse_dot(&md, &stem))?;
        writeln!(out, "wrote {}", p.display())?;
    }
    let code = u8::from(report.overall() == Verdict::Violated);
    Ok((
        code,
        serde_json::json!({
            "game": args, "kappa": kappa, "box_map": params, "refine": refine.map(|(t, k)| serde_json::json!({ "max_t": t, "max_kappa": k })),
            "resolution": report.resolution, "budget": budget, "json": json, "dot": dot
        }),
    ))
}

fn certify(
    args: &GameArgs,
    subgame: &str,
    audit_samples: usize,
    seed: u64,
    json: Option<&Path>,
    run: &mut Run,
    out: &mut dyn Write,
) -> Result<(u8, serde_json::Value)> {
    let (game, stem) = load(args)?;
    let y = parse_subgame(subgame, game.strategy_counts())?;
    let cert = match trapping_certificate_with(&game, &y, audit_samples, seed) {
        Ok(cert) => cert,
        Err(e @ Error::NotAttracting { .. }) => {
            writeln!(out, "refused: {e}")?;
            return Err(e.into());
        }
        Err(e) => return Err(e.into()),
    };
    writeln!(out, "subgame {y}: M = {}", cert.m)?;
    for p in &cert.players {
        writeln!(out, "  player {}: Q = {}, L = {}", p.player, p.q, p.l)?;
    }
    writeln!(
        out,
        "audit: {} samples, {} violations",
        cert.audit.samples, cert.audit.violations
    )?;
    let json = json.map_or_else(|| PathBuf::from(format!("{stem}.certificate.json")), Path::to_path_buf);
    let p = run.write(&json, &(cert.to_json() + "\n"))?;
    writeln!(out, "wrote {}", p.display())?;
    Ok((
        0,
        serde_json::json!({ "game": args, "subgame": subgame, "audit_samples": audit_samples, "json": json }),
    ))
}

fn scan(
    shape: &str,
    count: usize,
    kappa: usize,
    t: f64,
    seed: u64,
    run: &mut Run,
    out: &mut dyn Write,
) -> Result<(u8, serde_json::Value)> {
    let dims = parse_shape(shape)?;
    let report = conjecture_scan(&dims, count, seed, kappa, t)?;
    writeln!(out, "scanned {} games ({} skipped as non-strict)", report.scanned, report.skipped_non_strict)?;
    for (label, c) in [
        ("sink correspondence", report.conjecture1),
        ("one-layer content", report.conjecture2),
        ("content containment", report.content_containment),
    ] {
        writeln!(
            out,
            "  {label}: holds {}, violated {}, unresolved-at-resolution {}",
            c.holds, c.violated, c.unresolved
        )?;
    }
    for f in &report.findings {
        let p = run.write(Path::new(&format!("scan-violation-{}.json", f.game_seed)), &f.game)?;
        writeln!(out, "violation: seed {} written to {}", f.game_seed, p.display())?;
    }
    run.write(Path::new("scan.json"), &(report.to_json() + "\n"))?;
    Ok((0, serde_json::json!({ "shape": dims, "count": count, "kappa": kappa, "t": t })))
}

fn plot(
    args: &GameArgs,
    kappa: usize,
    seed: u64,
    svg: Option<&Path>,
    run: &mut Run,
    out: &mut dyn Write,
) -> Result<(u8, serde_json::Value)> {
    let (game, stem) = load(args)?;
    if game.strategy_counts() != [2, 2] {
        bail!("plot needs a 2x2 game, got {}", game.shape_string());
    }
    let params = BoxMapParams { seed, ..BoxMapParams::default() };
    let (_, bmg, md) = chain_report_with_budget(&game, kappa, params, DEFAULT_BOX_BUDGET)?;
    let cover = &bmg.cover;
    let k = kappa as f64;
    let mut shaded = Vec::new();
    for m in md.sinks() {
        for &b in md.boxes(m) {
            let cells = cover.cells(b as u64);
            let (xl, xh) = cover.grid(0).lattice_bounds(cells[0]);
            let (yl, yh) = cover.grid(1).lattice_bounds(cells[1]);
            shaded.push((xl[0] as f64 / k, xh[0] as f64 / k, yl[0] as f64 / k, yh[0] as f64 / k));
        }
    }
    writeln!(out, "sink boxes shaded: {}", shaded.len())?;
    let svg = svg.map_or_else(|| PathBuf::from(format!("{stem}.svg")), Path::to_path_buf);
    let p = run.write(&svg, &phase_portrait(&game, &shaded))?;
    writeln!(out, "wrote {}", p.display())?;
    Ok((0, serde_json::json!({ "game": args, "kappa": kappa, "svg": svg })))
}
