//! `bubbletree` command line.
//!
//! Exit codes: 0 pass, 2 verification failure, 3 malformed input, 4 resource cap.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bubbletree::artifacts::{decomposition_json, fiber_point_json, neck_path_json, parse_fiber_point};
use bubbletree::bounds::{
    choose_lambda, intro_m_lambda, intro_n, mapspace_count, sphere_net_bound, thm316_count, BoundsError, GeometryConstants,
};
use bubbletree::bubbles::{associate_tree, verify_association, BubbleFile};
use bubbletree::curve_families::{
    all_regions, check_map_membership, decorate, in_compact_subset, neck_param, neck_path, CurveError, Region, SampledMap,
};
use bubbletree::metric_nets::{best_net, mapspace_cover, member_distance, sphere_net, FamilyMember, NetError};
use bubbletree::pipeline::{random_bubble_file, run_pipeline, PipelineError, PipelineOptions};
use bubbletree::svg::emit_svg;
use bubbletree::trees::{enumerate_stable_rooted, Marking};
use bubbletree::{CompactnessParams, FiniteMetricSpace, ModuliPoint, ThickThinDecomposition, TreeAssociation};
use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

const SEED_VAR: &str = "BUBBLETREE_SEED";

#[derive(Parser)]
#[command(name = "bubbletree", version, about = "Tree-modeled genus-0 curve families, bubble trees and covering bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stable rooted trees.
    Trees {
        #[command(subcommand)]
        action: TreesAction,
    },
    /// γ-net of the round sphere or of a finite metric space.
    Net {
        /// `sphere` or a metric space JSON file.
        #[arg(long)]
        space: String,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cover of a family of Lipschitz maps by small sets.
    Cover {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tree association of a bubble configuration.
    Associate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks an association against its configuration.
    VerifyAssociation {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        assoc: PathBuf,
    },
    /// Compact subset membership, and the map conditions when a sampled map is given.
    CheckMembership {
        #[arg(long)]
        point: PathBuf,
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Thick-thin decomposition, optionally drawn as SVG.
    Decompose {
        #[arg(long)]
        point: PathBuf,
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Marked points plus m decoration points.
    Decorate {
        #[arg(long)]
        point: PathBuf,
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        m: usize,
        /// JSON array of fiber points.
        #[arg(long)]
        marked: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Paths between random points of a neck.
    Paths {
        #[arg(long)]
        point: PathBuf,
        #[arg(long)]
        edge: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Explicit bounds.
    Bounds {
        #[arg(value_enum)]
        which: BoundKind,
        #[arg(long, default_value_t = 0)]
        ell: u64,
        #[arg(long = "A", default_value_t = 1.0)]
        energy: f64,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        /// Constants JSON file, or `default`.
        #[arg(long, default_value = "default")]
        consts: String,
        #[arg(long, default_value_t = 1)]
        nu_k: u64,
        #[arg(long, default_value_t = 0.125)]
        eps: f64,
        /// Overrides the λ chosen from ε.
        #[arg(long)]
        lambda: Option<f64>,
        /// μ for the cover count.
        #[arg(long, default_value_t = 3)]
        mu: usize,
        /// Λ for the cover count.
        #[arg(long = "big-lambda", default_value_t = 1.0)]
        big_lambda: f64,
        /// γ for the sphere net bound.
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        #[arg(long, default_value_t = 1)]
        nu_t: u64,
        #[arg(long, default_value_t = 1)]
        nu_w: u64,
        #[arg(long, default_value_t = 1)]
        nu_z: u64,
    },
    /// Full run from a bubble configuration to the bounds.
    Pipeline {
        #[arg(long, conflicts_with = "random_size", required_unless_present = "random_size")]
        config: Option<PathBuf>,
        #[arg(long)]
        random_size: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        corrupt_gamma: bool,
        #[arg(long, default_value = "default")]
        consts: String,
    },
}

#[derive(Subcommand)]
enum TreesAction {
    /// All stable rooted trees with n + 1 half edges.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundKind {
    /// m, ln Λ and N.
    #[value(name = "N")]
    N,
    /// λ from ε and the constants.
    Lambda,
    /// Size of the cover of the map space.
    Count,
    /// Sphere net size bound.
    Sphere,
    /// ν_T(1 + ν_W)^ν_Z.
    Mapspace,
}

enum Failure {
    Verification(String),
    Malformed(String),
    ResourceCap(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 2,
            Failure::Malformed(_) => 3,
            Failure::ResourceCap(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Verification(m) | Failure::Malformed(m) | Failure::ResourceCap(m) => m,
        }
    }
}

impl From<CurveError> for Failure {
    fn from(e: CurveError) -> Self {
        Failure::Malformed(e.to_string())
    }
}

impl From<BoundsError> for Failure {
    fn from(e: BoundsError) -> Self {
        Failure::Malformed(e.to_string())
    }
}

impl From<NetError> for Failure {
    fn from(e: NetError) -> Self {
        match e {
            NetError::ResourceCap(_) | NetError::TooLarge { .. } => Failure::ResourceCap(e.to_string()),
            _ => Failure::Malformed(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))
}

fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value");
    s.push('\n');
    s
}

fn write_file(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))
}

fn emit(v: &Value, out: Option<&Path>) -> Outcome {
    match out {
        Some(p) => write_file(p, &render(v)),
        None => {
            print!("{}", render(v));
            Ok(())
        }
    }
}

fn seed(flag: u64) -> Result<u64, Failure> {
    match std::env::var(SEED_VAR) {
        Ok(s) => s.trim().parse().map_err(|_| Failure::Malformed(format!("{SEED_VAR} = {s:?} is not an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}

fn load_consts(arg: &str) -> Result<GeometryConstants, Failure> {
    let g = if arg == "default" { GeometryConstants::default() } else { read_json(Path::new(arg))? };
    g.validate()?;
    Ok(g)
}

fn load_params(path: &Path) -> Result<CompactnessParams, Failure> {
    let c: CompactnessParams = read_json(path)?;
    c.validate()?;
    Ok(c)
}

fn load_point_and_params(point: &Path, params: &Path) -> Result<(ModuliPoint, CompactnessParams), Failure> {
    let p: ModuliPoint = read_json(point)?;
    let c = load_params(params)?;
    if c.alpha.len() != p.tree().n_vertices() {
        return Err(Failure::Malformed(format!("{} alpha values for {} vertices", c.alpha.len(), p.tree().n_vertices())));
    }
    Ok((p, c))
}

/// Requires membership in the compact subset, failing with its first violation.
fn require_member(p: &ModuliPoint, c: &CompactnessParams) -> Outcome {
    let r = in_compact_subset(p, c)?;
    match r.first() {
        None => Ok(()),
        Some(v) => Err(Failure::Verification(format!("not in the compact subset: {v:?}"))),
    }
}

fn trees_enumerate(n: usize, out: Option<&Path>) -> Outcome {
    let trees = enumerate_stable_rooted(n).map_err(|e| Failure::Malformed(e.to_string()))?;
    emit(&json!({ "n": n, "count": trees.len(), "trees": trees }), out)
}

fn net(space: &str, gamma: f64, out: Option<&Path>) -> Outcome {
    if space == "sphere" {
        let net = sphere_net::<f64>(gamma)?;
        let bound = (8.0 * std::f64::consts::PI / (gamma * gamma)).floor();
        let points: Vec<[f64; 3]> = net.points.iter().map(|p| p.to_sphere()).collect();
        let ok = (net.points.len() as f64) <= bound;
        emit(
            &json!({
                "space": "sphere",
                "gamma": gamma,
                "size": net.points.len(),
                "bound": bound,
                "band_sizes": net.band_sizes,
                "covering_radius": net.covering_radius,
                "points": points,
            }),
            out,
        )?;
        return if ok { Ok(()) } else { Err(Failure::Verification(format!("{} points exceed the bound {bound}", net.points.len()))) };
    }
    let space: FiniteMetricSpace = read_json(Path::new(space))?;
    let net = best_net(&space, gamma)?;
    let covering = space.covering_radius(&net.points);
    emit(&json!({ "gamma": gamma, "size": net.len(), "points": net.points, "covering_radius": covering }), out)
}

#[derive(Deserialize)]
struct CoverInstance {
    t: FiniteMetricSpace,
    z: FiniteMetricSpace,
    w: FiniteMetricSpace,
    family: Vec<FamilyMember>,
}

fn cover(instance: &Path, lambda: f64, delta: f64, out: Option<&Path>) -> Outcome {
    let inst: CoverInstance = read_json(instance)?;
    let cover = mapspace_cover(&inst.t, &inst.z, &inst.w, &inst.family, lambda, delta)?;
    let bound = mapspace_count(cover.net_t.len() as u64, cover.net_w.len() as u64, cover.net_z.len() as u64);
    let mut worst = 0.0f64;
    let mut covered = vec![false; inst.family.len()];
    for s in &cover.sets {
        for &i in &s.members {
            covered[i] = true;
        }
    }
    for s in &cover.sets {
        for (a, &i) in s.members.iter().enumerate() {
            for &j in &s.members[a + 1..] {
                worst = worst.max(member_distance(&inst.t, &inst.z, &inst.w, &inst.family[i], &inst.family[j]));
            }
        }
    }
    let ok = covered.iter().all(|&c| c) && worst < 4.0 * delta;
    emit(
        &json!({
            "lambda": lambda,
            "delta": delta,
            "gamma": cover.gamma,
            "net_t": cover.net_t,
            "net_z": cover.net_z,
            "net_w": cover.net_w,
            "set_count": cover.sets.len(),
            "index_count": cover.index_count.to_string(),
            "bound": bound.to_json(),
            "max_set_diameter": worst,
            "all_covered": covered.iter().all(|&c| c),
            "sets": cover.sets,
        }),
        out,
    )?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Verification(format!("cover check failed: max diameter {worst} against 4δ = {}", 4.0 * delta)))
    }
}

fn associate(config: &Path, out: Option<&Path>) -> Outcome {
    let file: BubbleFile = read_json(config)?;
    let cfg = file.config().map_err(|e| Failure::Malformed(e.to_string()))?;
    let a = associate_tree(&cfg, file.eps).map_err(|e| Failure::Malformed(e.to_string()))?;
    emit(&serde_json::to_value(&a).expect("association serializes"), out)
}

fn verify(config: &Path, assoc: &Path) -> Outcome {
    let file: BubbleFile = read_json(config)?;
    let cfg = file.config().map_err(|e| Failure::Malformed(e.to_string()))?;
    let a: TreeAssociation = read_json(assoc)?;
    let report = verify_association(&cfg, &a, file.eps);
    emit(&json!({ "passed": report.passed(), "report": report }), None)?;
    if report.passed() {
        return Ok(());
    }
    let mut failed = Vec::new();
    for (label, check) in [("(i)", &report.compact), ("(ii)", &report.bubbles), ("(iii)", &report.gamma)] {
        if !check.pass {
            failed.push(format!("{label} {}", check.detail.first().map_or("", String::as_str)));
        }
    }
    Err(Failure::Verification(failed.join("; ")))
}

#[derive(Deserialize)]
struct SampleJson {
    q: Value,
    value: usize,
}

#[derive(Deserialize)]
struct EnergyJson {
    region: Region,
    energy: f64,
}

/// A map sampled on one fiber together with the data of the map-space conditions.
#[derive(Deserialize)]
struct MapJson {
    target: FiniteMetricSpace,
    k: BTreeSet<usize>,
    eta: f64,
    lambda0: f64,
    /// Lipschitz constant used on every region.
    lambda: f64,
    #[serde(default)]
    marked: Vec<usize>,
    samples: Vec<SampleJson>,
    region_energy: Option<Vec<EnergyJson>>,
}

fn check_membership(point: &Path, params: &Path, map: Option<&Path>) -> Outcome {
    let (p, c) = load_point_and_params(point, params)?;
    let report = in_compact_subset(&p, &c)?;
    let Some(map) = map else {
        emit(&serde_json::to_value(&report).expect("report serializes"), None)?;
        return require_member(&p, &c);
    };
    let m: MapJson = read_json(map)?;
    let samples = m
        .samples
        .iter()
        .map(|s| Ok((parse_fiber_point(&s.q).map_err(Failure::Malformed)?, s.value)))
        .collect::<Result<Vec<_>, Failure>>()?;
    let region_energy = m.region_energy.map(|v| v.into_iter().map(|r| (r.region, r.energy)).collect());
    let lambda: BTreeMap<Region, f64> = all_regions(p.tree()).into_iter().map(|r| (r, m.lambda)).collect();
    let marking = Marking::new(p.tree().tree(), m.marked).map_err(|e| Failure::Malformed(e.to_string()))?;
    let sampled = SampledMap { samples, region_energy };
    let v = check_map_membership(&p, &c, &sampled, &m.target, &m.k, m.eta, &lambda, m.lambda0, &marking)?;
    emit(&json!({ "compact": report, "map": v }), None)?;
    if v.rejected() {
        return Err(Failure::Verification("sampled map violates a map-space condition".into()));
    }
    require_member(&p, &c)
}

fn decompose(point: &Path, params: &Path, svg: Option<&Path>, out: Option<&Path>) -> Outcome {
    let (p, c) = load_point_and_params(point, params)?;
    require_member(&p, &c)?;
    let d = ThickThinDecomposition::new(&p, &c)?;
    if let Some(path) = svg {
        emit_svg(&d, path).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))?;
    }
    emit(&decomposition_json(&d), out)
}

fn decorate_cmd(point: &Path, params: &Path, m: usize, marked: Option<&Path>, out: Option<&Path>) -> Outcome {
    let (p, c) = load_point_and_params(point, params)?;
    require_member(&p, &c)?;
    let marked = match marked {
        Some(path) => {
            let v: Vec<Value> = read_json(path)?;
            v.iter().map(parse_fiber_point).collect::<Result<Vec<_>, _>>().map_err(Failure::Malformed)?
        }
        None => Vec::new(),
    };
    let points = decorate(&p, &c, &marked, m)?;
    let pts: Vec<Value> = points.iter().map(fiber_point_json).collect();
    emit(&json!({ "m": m, "marked": marked.len(), "points": pts }), out)
}

fn paths(point: &Path, edge: usize, seed: u64, count: usize, out: Option<&Path>) -> Outcome {
    let p: ModuliPoint = read_json(point)?;
    let g = p.gamma(edge).ok_or(CurveError::NotFullEdge(edge))?;
    if !(g.norm() > 0.0 && g.norm() < 1.0) {
        return Err(CurveError::GammaOutOfRange(g.norm()).into());
    }
    let r = -0.5 * g.norm().ln();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut results = Vec::with_capacity(count);
    let mut violations = 0;
    for _ in 0..count {
        let mut end = || -> Result<_, Failure> {
            let (s, t) = (rng.gen_range(-r..=r), rng.gen_range(0.0..std::f64::consts::TAU));
            Ok(neck_param(&p, edge, s, t)?)
        };
        let (q1, q2) = (end()?, end()?);
        let path = neck_path(&p, edge, &q1, &q2)?;
        if path.round_length > path.bound {
            violations += 1;
        }
        let mut v = neck_path_json(&path);
        v["start"] = fiber_point_json(&q1);
        v["end"] = fiber_point_json(&q2);
        results.push(v);
    }
    emit(&json!({ "edge": edge, "seed": seed, "paths": results }), out)?;
    if violations == 0 {
        Ok(())
    } else {
        Err(Failure::Verification(format!("{violations} paths exceed 16π·dist_e")))
    }
}

#[allow(clippy::too_many_arguments)]
fn bounds(
    which: BoundKind,
    ell: u64,
    energy: f64,
    delta: f64,
    consts: &str,
    nu_k: u64,
    eps: f64,
    lambda: Option<f64>,
    mu: usize,
    big_lambda: f64,
    gamma: f64,
    nu: (u64, u64, u64),
) -> Outcome {
    let g = load_consts(consts)?;
    let choice = choose_lambda(eps, &g)?;
    let lam = lambda.unwrap_or(choice.lambda);
    let v = match which {
        BoundKind::N => {
            let size = intro_m_lambda(ell, energy, lam, g.c_abs)?;
            let n = intro_n(delta, &g, nu_k, size.log_lambda, size.m, ell)?;
            json!({
                "m": size.m,
                "logLambda": size.log_lambda,
                "log10N": n.log10(),
                "log10log10N": n.log10_log10(),
                "N": n.to_json(),
                "lambda": lam,
            })
        }
        BoundKind::Lambda => json!({ "eps": eps, "lambda": choice.lambda, "binding": choice.binding }),
        BoundKind::Count => {
            let c = thm316_count(delta, mu, big_lambda, &g, nu_k)?;
            json!({
                "count": c.count.to_json(),
                "base_net": c.base_net.to_json(),
                "fiber_net": c.fiber_net.to_json(),
                "pieces": c.pieces,
            })
        }
        BoundKind::Sphere => serde_json::to_value(sphere_net_bound(gamma)?).expect("bound serializes"),
        BoundKind::Mapspace => mapspace_count(nu.0, nu.1, nu.2).to_json(),
    };
    emit(&v, None)
}

fn pipeline(config: Option<&Path>, random_size: Option<usize>, out: &Path, seed: u64, corrupt: bool, consts: &str) -> Outcome {
    let consts = load_consts(consts)?;
    let malformed = |e: PipelineError| Failure::Malformed(e.to_string());
    let input = match (config, random_size) {
        (Some(path), _) => read_json(path)?,
        (None, Some(n)) => random_bubble_file(seed, n).map_err(malformed)?,
        (None, None) => return Err(Failure::Malformed("one of --config and --random-size is required".into())),
    };
    let opts = PipelineOptions { seed, consts, corrupt_gamma: corrupt, ..Default::default() };
    let run = run_pipeline(&input, &opts).map_err(malformed)?;
    fs::create_dir_all(out).map_err(|e| Failure::Malformed(format!("{}: {e}", out.display())))?;
    write_file(&out.join("input.json"), &render(&serde_json::to_value(&input).expect("input serializes")))?;
    for a in &run.artifacts {
        write_file(&out.join(&a.name), &a.contents)?;
    }
    write_file(&out.join("report.json"), &run.report_json())?;
    print!("{}", run.report_json());
    match run.report.failed_stage() {
        None => Ok(()),
        Some(s) => Err(Failure::Verification(s.diagnostic.clone().unwrap_or_else(|| s.name.clone()))),
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Trees { action: TreesAction::Enumerate { n, out } } => trees_enumerate(n, out.as_deref()),
        Command::Net { space, gamma, out } => net(&space, gamma, out.as_deref()),
        Command::Cover { instance, lambda, delta, out } => cover(&instance, lambda, delta, out.as_deref()),
        Command::Associate { config, out } => associate(&config, out.as_deref()),
        Command::VerifyAssociation { config, assoc } => verify(&config, &assoc),
        Command::CheckMembership { point, params, map } => check_membership(&point, &params, map.as_deref()),
        Command::Decompose { point, params, svg, out } => decompose(&point, &params, svg.as_deref(), out.as_deref()),
        Command::Decorate { point, params, m, marked, out } => {
            decorate_cmd(&point, &params, m, marked.as_deref(), out.as_deref())
        }
        Command::Paths { point, edge, seed: s, count, out } => paths(&point, edge, seed(s)?, count, out.as_deref()),
        Command::Bounds { which, ell, energy, delta, consts, nu_k, eps, lambda, mu, big_lambda, gamma, nu_t, nu_w, nu_z } => {
            bounds(which, ell, energy, delta, &consts, nu_k, eps, lambda, mu, big_lambda, gamma, (nu_t, nu_w, nu_z))
        }
        Command::Pipeline { config, random_size, out, seed: s, corrupt_gamma, consts } => {
            pipeline(config.as_deref(), random_size, &out, seed(s)?, corrupt_gamma, &consts)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
