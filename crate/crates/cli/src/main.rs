//! `netcap` command line.
//!
//! Exit status: 0 on success or full agreement, 1 when a verification finds a
//! counterexample, 2 on usage or input errors.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use netcap::cuts::{check_validity, cutset_inequality, mir_data, translate_to_bidirected, CutsetSpec};
use netcap::formulate::{add_flow_symmetry, build, equalize_directed};
use netcap::io::{parse_instance, parse_point, write_point, PointDocument};
use netcap::lpfile::write_model;
use netcap::projlab::{
    capacity_bound, project, render_capacity, verify_corollary, verify_triangle_remark, TrafficSampler, Variant,
    DEFAULT_BOX_LIMIT,
};
use netcap::solver::{solve_lp, solve_mip, SolveStatus};
use netcap::transform::{drop_to_undirected, lift_to_bidirected, redistribute, symmetrize};
use netcap::{FacilityMenu, Instance, MipModel, ModelKind, ModelPoint, Network, Rational};

#[derive(Parser)]
#[command(name = "netcap", version, about = "Exact capacity models for multicommodity network design")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a model in LP text format.
    Build {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve a model exactly and print the optimum.
    Solve {
        #[command(flatten)]
        model: ModelArgs,
        /// Solve the LP relaxation instead.
        #[arg(long)]
        relax: bool,
        /// Write the optimal point as a point file.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Map a feasible point between traffic matrices or models.
    Transform {
        #[command(subcommand)]
        op: TransformOp,
    },
    /// Generate a mixed-integer-rounding cut-set inequality.
    Cut(CutArgs),
    /// Minimal capacity vectors of a model's projection.
    Project {
        instance: PathBuf,
        #[arg(long, value_enum)]
        model: KindArg,
        #[arg(long, default_value = "plain")]
        variant: String,
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Check projection equalities by enumeration.
    Verify {
        #[arg(value_enum)]
        what: VerifyWhat,
        /// Instance to check; random triangles are generated when omitted.
        instance: Option<PathBuf>,
        #[arg(long, default_value_t = 25)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        bound: Option<u64>,
    },
}

#[derive(Args)]
struct ModelArgs {
    instance: PathBuf,
    #[arg(long, value_enum)]
    model: KindArg,
    /// Add the flow-symmetry equations.
    #[arg(long)]
    symmetric_flows: bool,
    /// Directed model only: equal capacity on both arcs of every edge.
    #[arg(long)]
    equalized: bool,
    /// Upper bound on every capacity variable.
    #[arg(long)]
    bound: Option<u64>,
}

#[derive(Subcommand)]
enum TransformOp {
    /// Move an undirected point to pairwise-similar traffic.
    Redistribute {
        instance: PathBuf,
        point: PathBuf,
        /// Instance carrying the target traffic.
        #[arg(long)]
        target: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Average a point with its mirror image; the traffic must be symmetric.
    Symmetrize {
        instance: PathBuf,
        point: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// `(x, y)` in the flow-symmetric undirected model to `(2x, y)` with doubled traffic.
    Lift {
        instance: PathBuf,
        point: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Inverse of `lift`.
    Drop {
        instance: PathBuf,
        point: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CutArgs {
    instance: PathBuf,
    /// Nodes on the U side, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    side_u: Vec<String>,
    /// Commodities such as `1>2` (or `12` with one-character ids), or `all`.
    #[arg(long, value_delimiter = ',', required = true)]
    commodities: Vec<String>,
    /// Arcs `i>j` from U to V.
    #[arg(long, value_delimiter = ',')]
    splus: Vec<String>,
    /// Arcs `i>j` from V to U.
    #[arg(long, value_delimiter = ',')]
    sminus: Vec<String>,
    /// 1-based facility index.
    #[arg(long, default_value_t = 1)]
    facility: usize,
    /// Translate the inequality to the bidirected model.
    #[arg(long)]
    bidirected: bool,
    /// Enumerate integer capacities and check the inequality on every feasible one.
    #[arg(long)]
    check: bool,
    #[arg(long)]
    bound: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Undirected,
    Bidirected,
    Directed,
}

impl From<KindArg> for ModelKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Undirected => ModelKind::Undirected,
            KindArg::Bidirected => ModelKind::Bidirected,
            KindArg::Directed => ModelKind::Directed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyWhat {
    Corollary,
    Triangle,
}

/// Outcome of a command that ran to completion.
enum Verdict {
    Ok,
    Failed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Verdict::Ok) => ExitCode::SUCCESS,
        Ok(Verdict::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn box_limit() -> Result<u64> {
    match std::env::var("NETCAP_MAX_BOX") {
        Ok(v) => v.trim().parse().with_context(|| format!("NETCAP_MAX_BOX={v} is not a positive integer")),
        Err(_) => Ok(DEFAULT_BOX_LIMIT),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_instance(path: &Path) -> Result<Instance> {
    parse_instance(&read(path)?).with_context(|| format!("parsing instance {}", path.display()))
}

fn load_point(path: &Path, network: &Network) -> Result<PointDocument> {
    parse_point(&read(path)?, network).with_context(|| format!("parsing point file {}", path.display()))
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<Verdict> {
    match cli.command {
        Command::Build { model, output } => {
            let (_, m) = model_from_args(&model)?;
            emit(output.as_deref(), &write_model(&m))?;
            Ok(Verdict::Ok)
        }
        Command::Solve { model, relax, output } => solve(&model, relax, output.as_deref()),
        Command::Transform { op } => transform(op),
        Command::Cut(args) => cut(&args),
        Command::Project { instance, model, variant, bound } => {
            let inst = load_instance(&instance)?;
            let variant: Variant = variant.parse()?;
            let set = project(&inst, model.into(), variant, bound, box_limit()?)?;
            println!("{} {} projection, box [0, {}]^{}", set.kind, set.variant, set.bound, set.components.len());
            for line in set.render(&inst.network) {
                println!("  {line}");
            }
            println!("{} minimal vectors ({} feasibility checks)", set.minimal.len(), set.lp_calls);
            Ok(Verdict::Ok)
        }
        Command::Verify { what, instance, trials, seed, bound } => {
            let instances: Vec<(String, Instance)> = match &instance {
                Some(path) => vec![(path.display().to_string(), load_instance(path)?)],
                None => random_triangles(trials, seed)?,
            };
            match what {
                VerifyWhat::Corollary => verify_corollaries(&instances, bound),
                VerifyWhat::Triangle => verify_triangles(&instances, bound),
            }
        }
    }
}

fn model_from_args(args: &ModelArgs) -> Result<(Instance, MipModel)> {
    let inst = load_instance(&args.instance)?;
    let kind: ModelKind = args.model.into();
    let mut model = build(&inst, kind)?;
    if let Some(b) = args.bound {
        model = model.with_capacity_bound(b);
    }
    if args.symmetric_flows {
        model = add_flow_symmetry(&model);
    }
    if args.equalized {
        model = equalize_directed(&model)?;
    }
    Ok((inst, model))
}

fn solve(args: &ModelArgs, relax: bool, output: Option<&Path>) -> Result<Verdict> {
    let (inst, mut model) = model_from_args(args)?;
    if !relax && args.bound.is_none() {
        model = model.with_capacity_bound(capacity_bound(&inst)?);
    }
    let (status, values, objective, nodes) = if relax {
        let sol = solve_lp(&model, true)?;
        (sol.status, sol.values, Some(sol.objective), None)
    } else {
        let r = solve_mip(&model)?;
        let values = r.incumbent.as_ref().map(ModelPoint::to_values).unwrap_or_default();
        (r.status, values, r.objective, Some(r.nodes))
    };
    let net = model.network();
    match status {
        SolveStatus::Optimal => {
            println!("status: optimal");
            println!("objective: {}", objective.unwrap_or_default());
        }
        SolveStatus::Infeasible => println!("status: infeasible"),
        SolveStatus::Unbounded => println!("status: unbounded"),
    }
    if let Some(n) = nodes {
        println!("branch-and-bound nodes: {n}");
    }
    for (v, x) in values.iter().filter(|(v, _)| v.is_capacity()) {
        println!("  {} = {x}", v.name(net));
    }
    if let (Some(path), SolveStatus::Optimal) = (output, status) {
        if relax {
            bail!("a relaxed solution has fractional capacities and cannot be written as a point file");
        }
        let point = ModelPoint::from_values(&values)?;
        emit(Some(path), &write_point(&PointDocument { kind: model.kind(), point }, net))?;
    }
    Ok(Verdict::Ok)
}

fn transform(op: TransformOp) -> Result<Verdict> {
    let (out_path, text) = match op {
        TransformOp::Redistribute { instance, point, target, output } => {
            let inst = load_instance(&instance)?;
            let goal = load_instance(&target)?;
            let doc = load_point(&point, &inst.network)?;
            require_kind(&doc, ModelKind::Undirected)?;
            let flow = redistribute(&inst.network, &doc.point.flow, &inst.traffic, &goal.traffic)?;
            let out = PointDocument { kind: doc.kind, point: ModelPoint { flow, capacity: doc.point.capacity } };
            (output, write_point(&out, &inst.network))
        }
        TransformOp::Symmetrize { instance, point, output } => {
            let inst = load_instance(&instance)?;
            let doc = load_point(&point, &inst.network)?;
            let flow = symmetrize(&inst.network, &doc.point.flow, &inst.traffic)?;
            let out = PointDocument { kind: doc.kind, point: ModelPoint { flow, capacity: doc.point.capacity } };
            (output, write_point(&out, &inst.network))
        }
        TransformOp::Lift { instance, point, output } => {
            let inst = load_instance(&instance)?;
            let doc = load_point(&point, &inst.network)?;
            require_kind(&doc, ModelKind::Undirected)?;
            let lifted = lift_to_bidirected(&inst, &doc.point)?;
            (output, write_point(&PointDocument { kind: ModelKind::Bidirected, point: lifted }, &inst.network))
        }
        TransformOp::Drop { instance, point, output } => {
            let inst = load_instance(&instance)?;
            let doc = load_point(&point, &inst.network)?;
            require_kind(&doc, ModelKind::Bidirected)?;
            let dropped = drop_to_undirected(&inst, &doc.point)?;
            (output, write_point(&PointDocument { kind: ModelKind::Undirected, point: dropped }, &inst.network))
        }
    };
    emit(out_path.as_deref(), &text)?;
    Ok(Verdict::Ok)
}

fn require_kind(doc: &PointDocument, kind: ModelKind) -> Result<()> {
    if doc.kind != kind {
        bail!("expected a {kind} point, got a {} point", doc.kind);
    }
    Ok(())
}

fn cut(args: &CutArgs) -> Result<Verdict> {
    let inst = load_instance(&args.instance)?;
    let net = &inst.network;
    let side_u = args.side_u.iter().map(|n| net.node(n.trim())).collect::<Result<BTreeSet<_>, _>>()?;
    let commodities: BTreeSet<usize> = if args.commodities.len() == 1 && args.commodities[0].trim() == "all" {
        (0..net.commodity_count()).collect()
    } else {
        args.commodities
            .iter()
            .map(|c| net.parse_commodity(c.trim()).map(|k| net.commodity_index(k)))
            .collect::<Result<_, _>>()?
    };
    let arcs = |list: &[String]| -> Result<BTreeSet<usize>> {
        Ok(list.iter().filter(|s| !s.trim().is_empty()).map(|s| net.parse_arc(s.trim())).collect::<Result<_, _>>()?)
    };
    if args.facility == 0 {
        bail!("--facility is 1-based");
    }
    let spec = CutsetSpec {
        side_u,
        commodities,
        s_plus: arcs(&args.splus)?,
        s_minus: arcs(&args.sminus)?,
        facility: args.facility - 1,
    };
    let mir = mir_data(&inst, &spec)?;
    println!("\\ b_Q = {}, b' = {}, r = {}, eta = {}", mir.b_q, mir.b_prime, mir.r, mir.eta);
    if mir.flipped {
        println!("\\ net demand was negative; U and V swapped, S+ and S- exchanged");
    }
    let mut ineq = cutset_inequality(&inst, &spec)?;
    let kind = if args.bidirected {
        ineq = translate_to_bidirected(&ineq, net)?;
        ModelKind::Bidirected
    } else {
        ModelKind::Directed
    };
    println!("{}", ineq.to_text(net));
    if !args.check {
        return Ok(Verdict::Ok);
    }
    let model = build(&inst, kind)?;
    let bound = match args.bound {
        Some(b) => b,
        None => capacity_bound(&inst)?,
    };
    let report = check_validity(&model, &ineq, bound, box_limit()?)?;
    if report.is_valid() {
        println!(
            "valid on {0}/{0} enumerated points ({1} capacity vectors in [0, {2}]^{3})",
            report.feasible_points,
            report.box_points,
            bound,
            model.capacity_vars().count()
        );
        Ok(Verdict::Ok)
    } else {
        println!("violated on {}/{} enumerated points", report.violations.len(), report.feasible_points);
        for (y, lhs) in report.violations.iter().take(5) {
            println!("  {}: min lhs {lhs} < {}", render_capacity(net, y), ineq.rhs);
        }
        Ok(Verdict::Failed)
    }
}

fn random_triangles(trials: u64, seed: u64) -> Result<Vec<(String, Instance)>> {
    let net = Network::complete(&["1", "2", "3"])?;
    (0..trials)
        .map(|i| {
            let mut sampler = TrafficSampler::new(seed.wrapping_add(i), Rational::from_integer(2));
            let traffic = sampler.dense(net.nodes());
            let inst = Instance::bare(net.clone(), FacilityMenu::single(1)?, traffic)?;
            Ok((format!("seed {}", seed.wrapping_add(i)), inst))
        })
        .collect()
}

fn verify_corollaries(instances: &[(String, Instance)], bound: Option<u64>) -> Result<Verdict> {
    let limit = box_limit()?;
    let mut failed = 0;
    for (label, inst) in instances {
        let report = verify_corollary(inst, bound, limit)?;
        if instances.len() > 1 {
            print!("{label}: ");
        }
        match &report.counterexample {
            None => println!("5 projections identical; {} minimal vectors", report.minimal_count()),
            Some((has, lacks, y)) => {
                failed += 1;
                println!(
                    "projections differ: {} is minimal in {has} but not in {lacks}",
                    render_capacity(&inst.network, y)
                );
            }
        }
        if instances.len() == 1 {
            for p in &report.projections {
                println!(
                    "  {:<9} {} minimal vectors, {} feasibility checks",
                    p.label,
                    p.set.minimal.len(),
                    p.set.lp_calls
                );
            }
        }
    }
    if instances.len() > 1 {
        println!("{}/{} instances agree", instances.len() - failed, instances.len());
    }
    Ok(if failed == 0 { Verdict::Ok } else { Verdict::Failed })
}

fn verify_triangles(instances: &[(String, Instance)], bound: Option<u64>) -> Result<Verdict> {
    let limit = box_limit()?;
    let mut failed = 0;
    for (label, inst) in instances {
        netcap::projlab::check_triangle_shape(inst)?;
        let bound = bound.unwrap_or(5);
        let r = verify_triangle_remark(&inst.traffic, bound, limit)?;
        let status = if r.passed() { "ok" } else { "FAILED" };
        println!(
            "{label}: {status}; {} disagreements on {} vectors; ceil(sum T*(i)/2) = {} >= ceil(theta) = {}; proj B(T*) {} proj U(T/2)",
            r.disagreements.len(),
            r.points,
            r.star_half_sum,
            r.star_theta_ceil,
            if r.projections_equal { "=" } else { "!=" },
        );
        for (y, lp) in r.disagreements.iter().take(3) {
            println!("  {}: LP says {}, closed form says {}", render_capacity(&inst.network, y), lp, !lp);
        }
        if !r.passed() {
            failed += 1;
        }
    }
    if instances.len() > 1 {
        println!("{}/{} instances agree", instances.len() - failed, instances.len());
    }
    Ok(if failed == 0 { Verdict::Ok } else { Verdict::Failed })
}
