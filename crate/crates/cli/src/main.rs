//! Batch front end: JSON documents in, JSON documents and reports out.
//!
//! Exit codes: 0 ok, 2 precondition rejected, 3 internal verification
//! failed, 4 schema error.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use stressed_chains::balance::{
    balance, beams_boundary, force_systems_equal, solve_boundary, BeamTerm, Convention,
    ForceSystem,
};
use stressed_chains::decompose::{decompose_boundary, decompose_face};
use stressed_chains::fans::{
    check_four_spring_acute, check_inequality, fprime_at_zero, perpendicularity_audit, FanCase,
    SignConvention,
};
use stressed_chains::io::{DocKind, Document};
use stressed_chains::optimize::{minimize_truss, GroundStructure, TrussSolution};
use stressed_chains::stress::{
    boundary_stressed, mass_nuclear, mass_operator, stressed_currents_equal, StressedChain,
};
use stressed_chains::Error;

const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "stressed-chains", version, about = "stressed polyhedral chain tools")]
struct Cli {
    /// Tolerance used by verification checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for all randomized constructions.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Equilibrium convention for checks and preconditions.
    #[arg(long, global = true, value_enum, default_value_t = ConventionArg::Literal)]
    convention: ConventionArg,
    /// Spring sign convention for classification.
    #[arg(long, global = true, value_enum, default_value_t = SignArg::CompressPositive)]
    sign: SignArg,
    /// Output path (default: stdout).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Literal,
    Weighted,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Convention {
        match c {
            ConventionArg::Literal => Convention::Literal,
            ConventionArg::Weighted => Convention::Weighted,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SignArg {
    CompressPositive,
    StretchPositive,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum FormatArg {
    Json,
    Table,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical boundary of a stressed chain.
    Boundary { input: PathBuf },
    /// Stress/force split of a structural chain's boundary.
    Decompose { input: PathBuf },
    /// Balance a force system with structural beams.
    Balance { input: PathBuf },
    /// Construct a structural chain with the prescribed stressed boundary.
    Solve { input: PathBuf },
    /// Minimum-mass truss on a ground structure.
    Minimize { input: PathBuf },
    /// Verify the fan inequalities and derivative signs on a grid.
    FanCheck {
        #[arg(long, value_enum, default_value_t = CaseArg::Acute)]
        case: CaseArg,
        #[arg(long, default_value_t = 20)]
        resolution: usize,
    },
    /// Audit a truss solution for junction defects.
    Audit {
        /// Truss solution document.
        input: PathBuf,
        /// Ground structure document the solution refers to.
        #[arg(long)]
        ground: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        angle_tol: f64,
    },
    /// Nuclear and operator masses of a stressed chain.
    Mass { input: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    Acute,
    Right,
    Obtuse,
    FourSpring,
}

fn read_doc(path: &PathBuf) -> Result<Document, Error> {
    let mut text = String::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| Error::Schema(format!("cannot read {}: {e}", path.display())))?;
    Document::parse(&text)
}

fn typed_input<T: serde::de::DeserializeOwned>(path: &PathBuf, kind: DocKind) -> Result<T, Error> {
    let doc = read_doc(path)?;
    if doc.kind != kind {
        return Err(Error::Schema(format!(
            "expected a {:?} document, found {:?}",
            kind, doc.kind
        )));
    }
    doc.typed()
}

/// Writes atomically when an output path is given.
fn emit(cli: &Cli, text: &str) -> Result<(), Error> {
    match &cli.output {
        None => {
            println!("{text}");
            Ok(())
        }
        Some(path) => {
            let tmp = path.with_extension("tmp");
            std::fs::write(&tmp, text)
                .and_then(|_| std::fs::rename(&tmp, path))
                .map_err(|e| Error::Schema(format!("cannot write {}: {e}", path.display())))
        }
    }
}

fn report(cli: &Cli, body: serde_json::Value) -> serde_json::Value {
    json!({
        "tool_version": TOOL_VERSION,
        "seed": cli.seed,
        "convention": match cli.convention { ConventionArg::Literal => "literal", ConventionArg::Weighted => "weighted" },
        "sign": match cli.sign { SignArg::CompressPositive => "compress-positive", SignArg::StretchPositive => "stretch-positive" },
        "body": body,
    })
}

fn run(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Boundary { input } => {
            let chain: StressedChain = typed_input(input, DocKind::StressedChain)?;
            let b = boundary_stressed(&chain)?;
            let doc = Document::from_value(DocKind::StressedChain, &b)?;
            emit(cli, &doc.to_string_pretty()?)
        }
        Command::Decompose { input } => {
            let chain: StressedChain = typed_input(input, DocKind::StressedChain)?;
            let (s, f) = decompose_boundary(&chain)?;
            let recombined = {
                let b = boundary_stressed(&chain)?;
                s.add(&f).sub(&b).max_coeff() <= cli.tol.max(1e-9) * (1.0 + b.max_coeff())
            };
            let mut faces = Vec::new();
            for (a, sigma) in &chain.terms {
                for i in 0..=sigma.grade() {
                    let d = decompose_face(a, sigma, i)?;
                    faces.push(json!({
                        "face_index": i,
                        "face": d.frame.face,
                        "normal": d.frame.normal,
                        "f1": d.f1,
                        "f2": d.f2,
                        "external_force": d.external_force(),
                    }));
                }
            }
            let body = json!({
                "stress": Document::from_value(DocKind::StressedChain, &s)?,
                "force": Document::from_value(DocKind::StressedChain, &f)?,
                "faces": faces,
                "recombination_verified": recombined,
            });
            let doc = Document::new(DocKind::Report, report(cli, body));
            emit(cli, &doc.to_string_pretty()?)
        }
        Command::Balance { input } => {
            let fs: ForceSystem = typed_input(input, DocKind::ForceSystem)?;
            let beams = balance(&fs, cli.convention.into(), cli.seed)?;
            let got = beams_boundary(&beams, fs.dim, fs.grade + 1)?;
            let verified = force_systems_equal(&got, &fs, 8, cli.seed ^ 0xb00, cli.tol.max(1e-8))?;
            if !verified {
                return Err(Error::InternalVerification(
                    "balanced beams do not reproduce the input system".into(),
                ));
            }
            let beams_doc: Vec<BeamTerm> = beams;
            let body = json!({
                "beams": Document::from_value(DocKind::Beams, &beams_doc)?,
                "verification": {
                    "reproduces_forces": verified,
                    "beam_count": beams_doc.len(),
                },
            });
            let doc = Document::new(DocKind::Report, report(cli, body));
            emit(cli, &doc.to_string_pretty()?)
        }
        Command::Solve { input } => {
            let doc = read_doc(input)?;
            match doc.kind {
                DocKind::StressedChain => {
                    let q: StressedChain = doc.typed()?;
                    let p = solve_boundary(&q, cli.seed)?;
                    let back = boundary_stressed(&p)?;
                    let residual = back.sub(&q.canonicalize()).max_coeff();
                    let current_ok =
                        stressed_currents_equal(&back, &q, 8, cli.seed ^ 0x50, 1e-7)?;
                    let body = json!({
                        "chain": Document::from_value(DocKind::StressedChain, &p)?,
                        "verification": {
                            "boundary_residual": residual,
                            "currents_equal": current_ok,
                            "structural": p.is_structural(1e-7),
                        },
                    });
                    let out = Document::new(DocKind::Report, report(cli, body));
                    emit(cli, &out.to_string_pretty()?)
                }
                DocKind::ForceSystem => {
                    let fs: ForceSystem = doc.typed()?;
                    let beams = balance(&fs, cli.convention.into(), cli.seed)?;
                    let got = beams_boundary(&beams, fs.dim, fs.grade + 1)?;
                    let ok = force_systems_equal(&got, &fs, 8, cli.seed ^ 0x51, 1e-7)?;
                    if !ok {
                        return Err(Error::InternalVerification(
                            "beams do not reproduce the force system".into(),
                        ));
                    }
                    let body = json!({
                        "beams": Document::from_value(DocKind::Beams, &beams)?,
                        "verification": { "reproduces_forces": ok },
                    });
                    let out = Document::new(DocKind::Report, report(cli, body));
                    emit(cli, &out.to_string_pretty()?)
                }
                other => Err(Error::Schema(format!(
                    "solve expects a stressed_chain or force_system document, found {other:?}"
                ))),
            }
        }
        Command::Minimize { input } => {
            let gs: GroundStructure = typed_input(input, DocKind::GroundStructure)?;
            let ts = minimize_truss(&gs, cli.tol)?;
            if cli.format == FormatArg::Svg {
                return emit(cli, &render_svg(&gs, &ts));
            }
            let doc = Document::from_value(DocKind::TrussSolution, &ts)?;
            emit(cli, &doc.to_string_pretty()?)
        }
        Command::FanCheck { case, resolution } => {
            let body = fan_check(*case, *resolution, cli)?;
            if cli.format == FormatArg::Table {
                return emit(cli, &fan_table(&body));
            }
            let doc = Document::new(DocKind::Report, report(cli, body));
            emit(cli, &doc.to_string_pretty()?)
        }
        Command::Audit { input, ground, angle_tol } => {
            let ts: TrussSolution = typed_input(input, DocKind::TrussSolution)?;
            let gs: GroundStructure = typed_input(ground, DocKind::GroundStructure)?;
            let convention = match cli.sign {
                SignArg::CompressPositive => SignConvention::CompressPositive,
                SignArg::StretchPositive => SignConvention::StretchPositive,
            };
            let violations = perpendicularity_audit(&ts, &gs, *angle_tol, convention)?;
            let body = json!({ "violations": violations });
            let doc = Document::new(DocKind::Report, report(cli, body));
            emit(cli, &doc.to_string_pretty()?)
        }
        Command::Mass { input } => {
            let chain: StressedChain = typed_input(input, DocKind::StressedChain)?;
            let body = json!({
                "mass_nuclear": mass_nuclear(&chain)?,
                "mass_operator": mass_operator(&chain)?,
            });
            let doc = Document::new(DocKind::Report, report(cli, body));
            emit(cli, &doc.to_string_pretty()?)
        }
    }
}

fn fan_check(case: CaseArg, resolution: usize, cli: &Cli) -> Result<serde_json::Value, Error> {
    use std::f64::consts::FRAC_PI_2;
    let n = resolution.max(2);
    let mut cells = Vec::new();
    let mut all_hold = true;
    let mut all_negative = true;
    if let CaseArg::FourSpring = case {
        for j in 1..n {
            let beta = FRAC_PI_2 * j as f64 / n as f64;
            let (holds, margin) = check_four_spring_acute(beta)?;
            all_hold &= holds;
            cells.push(json!({"beta": beta, "margin": margin, "holds": holds}));
        }
        return Ok(json!({
            "case": "four_spring_acute",
            "all_hold": all_hold,
            "cells": cells,
        }));
    }
    let fan_case = match case {
        CaseArg::Acute => FanCase::Acute,
        CaseArg::Right => FanCase::Right,
        CaseArg::Obtuse => FanCase::Obtuse,
        CaseArg::FourSpring => unreachable!(),
    };
    for i in 1..n {
        for j in 1..n {
            let (alpha, beta) = match fan_case {
                FanCase::Acute => (FRAC_PI_2 * i as f64 / n as f64, FRAC_PI_2 * j as f64 / n as f64),
                FanCase::Right => {
                    if i > 1 {
                        continue;
                    }
                    (FRAC_PI_2, FRAC_PI_2 * j as f64 / n as f64)
                }
                FanCase::Obtuse => {
                    let a = FRAC_PI_2 * i as f64 / (2 * n) as f64;
                    let b = FRAC_PI_2 * j as f64 / (2 * n) as f64;
                    if a + b >= FRAC_PI_2 - 1e-12 {
                        continue;
                    }
                    (a, b)
                }
            };
            let (holds, margin) = check_inequality(fan_case, alpha, beta)?;
            let (fp, fp_err) = fprime_at_zero(fan_case, alpha, beta)?;
            all_hold &= holds;
            all_negative &= fp < 0.0;
            let consistent = (fp < 0.0) == (margin > 0.0);
            if !consistent {
                all_hold = false;
            }
            cells.push(json!({
                "alpha": alpha,
                "beta": beta,
                "margin": margin,
                "holds": holds,
                "fprime": fp,
                "fprime_error": fp_err,
                "sign_consistent": consistent,
            }));
        }
    }
    let _ = cli;
    Ok(json!({
        "case": format!("{fan_case:?}"),
        "all_hold": all_hold,
        "all_fprime_negative": all_negative,
        "cells": cells,
    }))
}

fn fan_table(body: &serde_json::Value) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "case {}  all_hold={} all_fprime_negative={}\n",
        body["case"],
        body["all_hold"],
        body.get("all_fprime_negative").unwrap_or(&json!("-"))
    ));
    out.push_str("alpha      beta       margin        fprime\n");
    if let Some(cells) = body["cells"].as_array() {
        for c in cells {
            out.push_str(&format!(
                "{:<10.5} {:<10.5} {:<13.6e} {}\n",
                c.get("alpha").and_then(|v| v.as_f64()).unwrap_or(f64::NAN),
                c.get("beta").and_then(|v| v.as_f64()).unwrap_or(f64::NAN),
                c.get("margin").and_then(|v| v.as_f64()).unwrap_or(f64::NAN),
                c.get("fprime")
                    .and_then(|v| v.as_f64())
                    .map(|v| format!("{v:.6e}"))
                    .unwrap_or_else(|| "-".into()),
            ));
        }
    }
    out
}

/// Planar truss rendering: stretched members red, compressed blue.
fn render_svg(gs: &GroundStructure, ts: &TrussSolution) -> String {
    let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for v in &gs.nodes {
        lo_x = lo_x.min(v[0]);
        hi_x = hi_x.max(v[0]);
        lo_y = lo_y.min(v[1]);
        hi_y = hi_y.max(v[1]);
    }
    let pad = 0.1 * ((hi_x - lo_x).max(hi_y - lo_y).max(1.0));
    let (w, h) = (640.0, 480.0);
    let sx = (w - 40.0) / (hi_x - lo_x + 2.0 * pad);
    let sy = (h - 40.0) / (hi_y - lo_y + 2.0 * pad);
    let s = sx.min(sy);
    let px = |x: f64| 20.0 + (x - lo_x + pad) * s;
    let py = |y: f64| h - 20.0 - (y - lo_y + pad) * s;
    let lam_max = ts.lambda.iter().map(|l| l.abs()).fold(1e-12, f64::max);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    );
    for (e, &(a, b)) in gs.candidate_edges.iter().enumerate() {
        let lam = ts.lambda[e];
        if lam.abs() < 1e-9 * lam_max {
            continue;
        }
        // λ in the node-force convention: λ > 0 pulls the ends together
        // (stretched, red); λ < 0 pushes them apart (compressed, blue)
        let color = if lam > 0.0 { "#cc2222" } else { "#2244cc" };
        let width = 1.0 + 4.0 * lam.abs() / lam_max;
        svg.push_str(&format!(
            "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{}\" stroke-width=\"{:.2}\"/>\n",
            px(gs.nodes[a][0]), py(gs.nodes[a][1]), px(gs.nodes[b][0]), py(gs.nodes[b][1]), color, width
        ));
    }
    for (i, v) in gs.nodes.iter().enumerate() {
        let fill = if gs.supports[i] { "#222222" } else { "#888888" };
        svg.push_str(&format!(
            "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"{}\"/>\n",
            px(v[0]),
            py(v[1]),
            fill
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Schema(_) => 4,
                Error::InternalVerification(_) | Error::Solver(_) => 3,
                Error::Precondition(_)
                | Error::DimensionMismatch(_)
                | Error::GradeMismatch(_)
                | Error::DegenerateSimplex(_) => 2,
            };
            ExitCode::from(code)
        }
    }
}
