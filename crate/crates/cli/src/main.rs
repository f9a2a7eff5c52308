//! `qtwist`: build and verify `U_q(g)` representations, decompose tensor
//! products, compute twist and associator blocks, and lift module-algebra
//! actions.
//!
//! Exit status: 0 when every reported residual passes, 1 when some residual
//! fails, 2 on any error.

mod config;
mod report;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qtwist::cgtwist::{associator_block, cg_decompose, solve_twist_block_tol, AssociatorBlock, TwistBlock};
use qtwist::liftalg::{lift_action, random_spins, roundtrip_instance, LiftConfig, LiftResult, ModuleAlgebraAction};
use qtwist::linalg::Scalar;
use qtwist::qnum::approx::set_precision;
use qtwist::qnum::{Cplx, QScalar};
use qtwist::repcore::{irrep_su2, tensor, vector_rep_sln, verify_relations, Rep};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use config::{GlobalArgs, RunConfig};
use report::Report;

#[derive(Parser)]
#[command(
    name = "qtwist",
    version,
    about = "Quantum group representations, twists and lifts of module-algebra actions"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Irreducible U_q(su(2))-module V_n of dimension n+1
    Irrep {
        #[arg(long)]
        n: u32,
    },
    /// Vector representation of U_q(sl_n)
    VectorRep {
        #[arg(long)]
        n: usize,
    },
    /// Check every defining relation of a representation file
    Verify { rep: std::path::PathBuf },
    /// Tensor product of two representation files
    Tensor {
        left: std::path::PathBuf,
        right: std::path::PathBuf,
    },
    /// Clebsch-Gordan decomposition of V_a ⊗ V_b (q = 1 allowed)
    Cg {
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
    },
    /// Twist block for (a, b), associator for (a, b, c), or a sweep over all
    /// blocks up to the cutoffs when a and b are omitted
    Twist {
        #[arg(long, requires = "b")]
        a: Option<u32>,
        #[arg(long, requires = "a")]
        b: Option<u32>,
        #[arg(long, requires = "a")]
        c: Option<u32>,
        /// Largest spin in the pair sweep [default: 4]
        #[arg(long)]
        max_spin: Option<u32>,
        /// Largest spin in the associator sweep [default: 3]
        #[arg(long)]
        max_triple: Option<u32>,
        /// Include associators in the sweep
        #[arg(long)]
        associators: bool,
    },
    /// Lift an action file, a round trip through the given spins, or
    /// random round trips
    Lift {
        #[arg(conflicts_with_all = ["roundtrip", "random"])]
        action: Option<std::path::PathBuf>,
        /// Comma-separated spins of the summands, e.g. 1,1
        #[arg(long, value_delimiter = ',', conflicts_with = "random")]
        roundtrip: Option<Vec<u32>>,
        /// Number of random round trips (up to 3 summands, spins up to max_spin)
        #[arg(long)]
        random: Option<usize>,
        /// Largest spin of random summands [default: 4]
        #[arg(long)]
        max_spin: Option<u32>,
    },
}

type CmdResult = Result<Report, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn write_artifact(cfg: &RunConfig, body: &str) -> Result<(), String> {
    if let Some(path) = &cfg.out {
        fs::write(path, body).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(())
}

fn to_pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn rep_report<S: Scalar>(command: &'static str, rep: &Rep<S>, cfg: &RunConfig) -> CmdResult {
    let mut report = Report::new(command, rep.q.pretty(), cfg.tol);
    report.push_relations("", &verify_relations(rep).map_err(err)?);
    Ok(report)
}

fn cmd_irrep(n: u32, cfg: &RunConfig) -> CmdResult {
    let rep = irrep_su2(n, &cfg.q).map_err(err)?;
    write_artifact(cfg, &rep.to_json())?;
    rep_report("irrep", &rep, cfg)
}

fn cmd_vector_rep(n: usize, cfg: &RunConfig) -> CmdResult {
    let rep = vector_rep_sln(n, &cfg.q).map_err(err)?;
    write_artifact(cfg, &rep.to_json())?;
    rep_report("vector-rep", &rep, cfg)
}

/// Exact files are read as rationals; anything else as decimals.
enum AnyRep {
    Exact(Rep),
    Approx(Rep<Cplx>),
}

fn load_rep(path: &Path) -> Result<AnyRep, String> {
    let text = read(path)?;
    match Rep::<QScalar>::from_json(&text) {
        Ok(r) => Ok(AnyRep::Exact(r)),
        Err(exact_err) => Rep::<Cplx>::from_json(&text)
            .map(AnyRep::Approx)
            .map_err(|_| format!("{}: {exact_err}", path.display())),
    }
}

fn cmd_verify(path: &Path, cfg: &RunConfig) -> CmdResult {
    let report = match load_rep(path)? {
        AnyRep::Exact(r) => rep_report("verify", &r, cfg)?,
        AnyRep::Approx(r) => rep_report("verify", &r, cfg)?,
    };
    write_artifact(cfg, &to_pretty(&report))?;
    Ok(report)
}

fn cmd_tensor(left: &Path, right: &Path, cfg: &RunConfig) -> CmdResult {
    match (load_rep(left)?, load_rep(right)?) {
        (AnyRep::Exact(a), AnyRep::Exact(b)) => {
            let t = tensor(&a, &b).map_err(err)?;
            write_artifact(cfg, &t.to_json())?;
            rep_report("tensor", &t, cfg)
        }
        (a, b) => {
            let lift = |r: AnyRep| match r {
                AnyRep::Exact(r) => r.to_orthonormal().map_err(err),
                AnyRep::Approx(r) => Ok(r),
            };
            let t = tensor(&lift(a)?, &lift(b)?).map_err(err)?;
            write_artifact(cfg, &t.to_json())?;
            rep_report("tensor", &t, cfg)
        }
    }
}

fn cmd_cg(a: u32, b: u32, cfg: &RunConfig) -> CmdResult {
    let cg = cg_decompose(a, b, &cfg.q).map_err(err)?;
    let mut report = Report::new("cg", cfg.q.pretty(), cfg.tol);
    let labels = cg.labels();
    let expected: Vec<u32> = (a.abs_diff(b)..=a + b).step_by(2).collect();
    let text: Vec<String> = labels.iter().map(u32::to_string).collect();
    report.push("labels", json!(text.join(" ")), labels == expected);
    report.push_residual("completeness", &cg.completeness);
    report.push_residual("intertwining", &cg.intertwining);
    report.push_residual("orthogonality", &cg.orthogonality);
    let components: Vec<_> = cg
        .components
        .iter()
        .map(|c| {
            json!({
                "c": c.c,
                "norm": c.norm.to_string(),
                "embedding": qtwist::linalg::mat_serde::to_json(&c.embedding),
            })
        })
        .collect();
    write_artifact(
        cfg,
        &to_pretty(&json!({"a": a, "b": b, "q": cfg.q, "components": components})),
    )?;
    Ok(report)
}

fn push_twist(report: &mut Report, t: &TwistBlock) {
    let name = format!("F({},{})", t.a, t.b);
    report.push_f64(format!("{name}.unitarity"), t.unitarity_residual);
    report.push_f64(format!("{name}.intertwining"), t.intertwine_residual);
}

fn push_associator(report: &mut Report, p: &AssociatorBlock) {
    let name = format!("Phi({},{},{})", p.a, p.b, p.c);
    report.push_f64(format!("{name}.commutation"), p.commutation_residual);
    report.push_f64(format!("{name}.unitarity"), p.unitarity_residual);
    if p.b == 0 {
        report.push_f64(format!("{name}.identity"), p.identity_residual);
    }
}

#[derive(Serialize)]
struct TwistArtifact {
    twists: Vec<TwistBlock>,
    associators: Vec<AssociatorBlock>,
}

fn cmd_twist(a: Option<u32>, b: Option<u32>, c: Option<u32>, associators: bool, cfg: &RunConfig) -> CmdResult {
    let q = &cfg.q;
    let mut report = Report::new("twist", q.pretty(), cfg.tol);
    let mut art = TwistArtifact {
        twists: Vec::new(),
        associators: Vec::new(),
    };
    // Internal failures are reported through residual rows, not as errors.
    let twist = |a, b| solve_twist_block_tol(a, b, q, f64::INFINITY).map_err(err);
    match (a, b, c) {
        (Some(a), Some(b), None) => art.twists.push(twist(a, b)?),
        (Some(a), Some(b), Some(c)) => art.associators.push(associator_block(a, b, c, q).map_err(err)?),
        _ => {
            for a in 0..=cfg.max_spin {
                for b in 0..=cfg.max_spin {
                    art.twists.push(twist(a, b)?);
                }
            }
            if associators {
                for a in 0..=cfg.max_triple {
                    for b in 0..=cfg.max_triple {
                        for c in 0..=cfg.max_triple {
                            art.associators.push(associator_block(a, b, c, q).map_err(err)?);
                        }
                    }
                }
            }
        }
    }
    for t in &art.twists {
        push_twist(&mut report, t);
    }
    for p in &art.associators {
        push_associator(&mut report, p);
    }
    write_artifact(cfg, &to_pretty(&art))?;
    Ok(report)
}

fn push_lift(report: &mut Report, prefix: &str, lift: &LiftResult) {
    for (name, value) in &lift.residuals {
        report.push_f64(format!("{prefix}{name}"), *value);
    }
}

fn cmd_lift(action: Option<&Path>, roundtrip: Option<&[u32]>, random: Option<usize>, cfg: &RunConfig) -> CmdResult {
    let lift_cfg = LiftConfig { tol: cfg.tol };
    let mut report = Report::new("lift", cfg.q.pretty(), cfg.tol);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    if let Some(path) = action {
        let text = read(path)?;
        let lift = match ModuleAlgebraAction::<QScalar>::from_json(&text) {
            Ok(a) => lift_action(&a, &lift_cfg),
            Err(_) => lift_action(&ModuleAlgebraAction::<Cplx>::from_json(&text).map_err(err)?, &lift_cfg),
        }
        .map_err(err)?;
        report.q = lift.q.pretty();
        push_lift(&mut report, "", &lift);
        write_artifact(cfg, &lift.to_json())?;
    } else if let Some(spins) = roundtrip {
        let rt = roundtrip_instance(spins, &cfg.q, &mut rng).map_err(err)?;
        let lift = lift_action(&rt.action, &lift_cfg).map_err(err)?;
        let blocks: Vec<String> = rt.blocks.iter().map(usize::to_string).collect();
        report.push("blocks", json!(blocks.join(" ")), true);
        push_lift(&mut report, "", &lift);
        write_artifact(cfg, &lift.to_json())?;
    } else {
        let count = random.unwrap_or(1);
        let mut lifts = Vec::with_capacity(count);
        for idx in 0..count {
            let spins = random_spins(3, cfg.max_spin, &mut rng);
            let rt = roundtrip_instance(&spins, &cfg.q, &mut rng).map_err(err)?;
            let prefix = format!("#{idx}.");
            let text: Vec<String> = spins.iter().map(u32::to_string).collect();
            report.push(format!("{prefix}spins"), json!(text.join(" ")), true);
            match lift_action(&rt.action, &lift_cfg) {
                Ok(lift) => {
                    push_lift(&mut report, &prefix, &lift);
                    lifts.push(lift);
                }
                Err(e) => report.push(format!("{prefix}error"), json!(e.to_string()), false),
            }
        }
        write_artifact(cfg, &to_pretty(&lifts))?;
    }
    Ok(report)
}

fn run(cli: Cli) -> Result<Report, String> {
    let (max_spin, max_triple) = match &cli.command {
        Command::Twist {
            max_spin, max_triple, ..
        } => (*max_spin, *max_triple),
        Command::Lift { max_spin, .. } => (*max_spin, None),
        _ => (None, None),
    };
    let cfg = RunConfig::resolve(&cli.global, max_spin, max_triple)?;
    set_precision(cfg.precision).map_err(err)?;
    match &cli.command {
        Command::Irrep { n } => cmd_irrep(*n, &cfg),
        Command::VectorRep { n } => cmd_vector_rep(*n, &cfg),
        Command::Verify { rep } => cmd_verify(rep, &cfg),
        Command::Tensor { left, right } => cmd_tensor(left, right, &cfg),
        Command::Cg { a, b } => cmd_cg(*a, *b, &cfg),
        Command::Twist {
            a, b, c, associators, ..
        } => cmd_twist(*a, *b, *c, *associators, &cfg),
        Command::Lift {
            action,
            roundtrip,
            random,
            ..
        } => cmd_lift(action.as_deref(), roundtrip.as_deref(), *random, &cfg),
    }
    .and_then(|report| {
        let mut stdout = std::io::stdout().lock();
        report.write(cfg.format, &mut stdout).map_err(err)?;
        Ok(report)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) if report.pass => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
