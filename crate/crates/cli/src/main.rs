use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hessian_sym::classify::{characteristic_invariants_verify, TABLE3};
use hessian_sym::expr::{parse, print_decimal, Expr, FnBindings, DEFAULT_SEED};
use hessian_sym::flows::{
    flow_of, pushforward, sin_product_omega, tian_fixture, verify_case, ScalarFunctionHandle, CASES,
};
use hessian_sym::jet::{check_symmetry, CheckOptions};
use hessian_sym::lie::algebras::{g12, g8, principal};
use hessian_sym::lie::{adjoint, reduce_to_optimal, structure_table, AdjointMatrix, BaseSpace, VectorField};
use hessian_sym::report::{run_all, run_suite, SuiteOptions, SuiteReport, SUITES};

#[derive(Parser)]
#[command(name = "hessian-sym", about = "Symmetry analysis of the 3D 2-Hessian equation S2[u] = f")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, value_enum, default_value_t = Format::Md, global = true)]
    format: Format,
    #[arg(long, default_value_t = DEFAULT_SEED, global = true)]
    seed: u64,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    points: Option<usize>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Md,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Commutator table, and for g8 the adjoint matrices.
    Tables { algebra: String },
    /// Run a verification suite, or `all`.
    Verify {
        suite: String,
        /// Include wall-clock times (makes the output nondeterministic).
        #[arg(long)]
        timings: bool,
    },
    /// Reduce an element of g8 to its optimal-system representative.
    Reduce {
        /// Eight comma-separated coefficients.
        #[arg(allow_hyphen_values = true)]
        coeffs: String,
    },
    /// Check whether a vector field on (x, y, z, u) is a symmetry of S2[u] = f.
    CheckSymmetry {
        #[arg(long)]
        f: String,
        /// Coefficients of ∂x, ∂y, ∂z, ∂u separated by `;`.
        #[arg(long, allow_hyphen_values = true)]
        vf: String,
    },
    /// Transform a solution by one of the fifteen one-parameter groups.
    Transform {
        case: u8,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        /// Closed-form u(x, y, z).
        #[arg(long, conflicts_with = "fixture")]
        u: Option<String>,
        /// Fixture `tau1,tau2,tau3,eps`.
        #[arg(long, allow_hyphen_values = true)]
        fixture: Option<String>,
        /// Use ω = sin a sin b sin c in the fixture instead of ω = 0.
        #[arg(long)]
        sin_omega: bool,
        /// Parameter bindings such as `g=2` or `s=-1`.
        #[arg(long = "param", allow_hyphen_values = true)]
        params: Vec<String>,
    },
    /// Check candidate invariants of a classification representative.
    Invariants {
        /// Row id such as `A3` or `A11(a7=b3=0,g5!=0)`, or `A1`.
        representative: String,
        #[arg(long = "param", allow_hyphen_values = true)]
        params: Vec<String>,
        /// Candidate invariants; defaults to those of the row.
        #[arg(long = "invariant")]
        invariants: Vec<String>,
    },
}

type CmdResult = Result<(String, bool), String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Tables { algebra } => cmd_tables(&cli, algebra),
        Command::Verify { suite, timings } => cmd_verify(&cli, suite, *timings),
        Command::Reduce { coeffs } => cmd_reduce(&cli, coeffs),
        Command::CheckSymmetry { f, vf } => cmd_check_symmetry(&cli, f, vf),
        Command::Transform {
            case,
            t,
            u,
            fixture,
            sin_omega,
            params,
        } => cmd_transform(&cli, *case, *t, u.as_deref(), fixture.as_deref(), *sin_omega, params),
        Command::Invariants {
            representative,
            params,
            invariants,
        } => cmd_invariants(&cli, representative, params, invariants),
    };
    match result {
        Ok((text, ok)) => {
            if let Some(path) = &cli.out {
                if let Err(e) = fs::write(path, &text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{text}");
                if !text.ends_with('\n') {
                    println!();
                }
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}

fn cmd_tables(cli: &Cli, algebra: &str) -> CmdResult {
    let basis = match algebra {
        "g8" => g8(),
        "g12" => g12(),
        "principal" => principal(),
        other => return Err(format!("unknown algebra `{other}` (expected g8, g12 or principal)")),
    };
    let table = structure_table(&basis).map_err(|e| e.to_string())?;
    let mats: Vec<AdjointMatrix> = if algebra == "g8" {
        (0..table.len()).map(|i| adjoint(i, &table)).collect()
    } else {
        Vec::new()
    };
    let text = match cli.format {
        Format::Md => {
            let mut s = format!("### Commutators of {algebra}\n\n{}", table.to_markdown());
            if !mats.is_empty() {
                s.push_str("\n### Adjoint representation\n\n");
                s.push_str(&AdjointMatrix::table_markdown(&mats));
            }
            s
        }
        Format::Json => {
            let mut v = json!({ "algebra": algebra, "commutators": table.to_json() });
            if !mats.is_empty() {
                v["adjoint"] = Value::Array(mats.iter().map(|m| m.to_json()).collect());
            }
            pretty(&v)
        }
    };
    Ok((text, true))
}

fn cmd_verify(cli: &Cli, suite: &str, timings: bool) -> CmdResult {
    let opts = SuiteOptions {
        seed: cli.seed,
        tol: cli.tol,
        points: cli.points,
    };
    let mut reports: Vec<SuiteReport> = if suite == "all" {
        run_all(&opts)
    } else {
        vec![run_suite(suite, &opts)
            .ok_or_else(|| format!("unknown suite `{suite}` (expected all or one of {})", SUITES.join(", ")))?]
    };
    if !timings {
        for r in &mut reports {
            r.wall_time = None;
        }
    }
    let ok = reports.iter().all(|r| !r.failed());
    let text = match cli.format {
        Format::Md => reports.iter().map(|r| r.to_markdown()).collect::<Vec<_>>().join("\n"),
        Format::Json if reports.len() == 1 => pretty(&json!(reports[0])),
        Format::Json => pretty(&json!(reports)),
    };
    Ok((text, ok))
}

fn cmd_reduce(cli: &Cli, coeffs: &str) -> CmdResult {
    let a: Vec<f64> = coeffs
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| format!("bad coefficient `{s}`: {e}")))
        .collect::<Result<_, _>>()?;
    if a.len() != 8 {
        return Err(format!("expected 8 coefficients, got {}", a.len()));
    }
    let trace = reduce_to_optimal(&a, cli.tol.unwrap_or(1e-12)).map_err(|e| e.to_string())?;
    let text = match cli.format {
        Format::Json => pretty(&json!(trace)),
        Format::Md => {
            let mut s = format!("input: {:?}\n\n| step | case | action |\n|---|---|---|\n", trace.input);
            for (k, step) in trace.steps.iter().enumerate() {
                let action = serde_json::to_string(&step.kind).expect("steps serialize");
                s.push_str(&format!("| {} | {} | {} |\n", k + 1, step.case, action));
            }
            s.push_str(&format!("\nresult: {}\n", trace.pattern));
            s
        }
    };
    Ok((text, true))
}

fn cmd_check_symmetry(cli: &Cli, f: &str, vf: &str) -> CmdResult {
    let f = parse(f).map_err(|e| format!("f: {e}"))?;
    let parts: Vec<&str> = vf.split(';').collect();
    if parts.len() != 4 {
        return Err(format!("--vf needs four `;`-separated coefficients, got {}", parts.len()));
    }
    let pairs: Vec<(&str, &str)> = ["x", "y", "z", "u"].into_iter().zip(parts.iter().map(|s| s.trim())).collect();
    let v = VectorField::parse(BaseSpace::E4, &pairs).map_err(|e| format!("vf: {e}"))?;
    let mut opts = CheckOptions {
        seed: cli.seed,
        ..CheckOptions::default()
    };
    if let Some(n) = cli.points {
        opts.points = n;
    }
    if let Some(t) = cli.tol {
        opts.tol = t;
    }
    let r = check_symmetry(&v, &f, &FnBindings::new(), &opts).map_err(|e| e.to_string())?;
    let text = match cli.format {
        Format::Json => pretty(&json!({ "f": f.to_string(), "vf": v.to_string(), "report": r })),
        Format::Md => {
            let mut s = format!(
                "V = {v}\nf = {f}\n\nverdict: {}\nmax residual: {:.3e} over {} points\n",
                if r.pass { "pass" } else { "fail" },
                r.max_residual,
                r.points
            );
            if let Some(w) = &r.witness {
                s.push_str(&format!("witness: {}\n", serde_json::to_string(w).expect("witness serializes")));
            }
            s
        }
    };
    Ok((text, r.pass))
}

fn parse_params(params: &[String]) -> Result<BTreeMap<String, Expr>, String> {
    params
        .iter()
        .map(|p| {
            let (k, v) = p.split_once('=').ok_or_else(|| format!("parameter `{p}` is not name=value"))?;
            let e = parse(v.trim()).map_err(|e| format!("parameter {k}: {e}"))?;
            Ok((k.trim().to_string(), e))
        })
        .collect()
}

/// Decimal numbers as exact rationals for display.
fn num_expr(x: f64) -> Expr {
    parse(&format!("{:.12}", x)).unwrap_or_else(|_| Expr::int(x.round() as i64))
}

fn cmd_transform(
    cli: &Cli,
    case: u8,
    t: f64,
    u: Option<&str>,
    fixture: Option<&str>,
    sin_omega: bool,
    params: &[String],
) -> CmdResult {
    let spec = CASES
        .iter()
        .find(|c| c.number == case)
        .ok_or_else(|| format!("case {case} is not one of 1..15"))?;
    let mut b = spec.bindings().into_iter().next().unwrap_or_default();
    b.extend(parse_params(params)?);
    let handle = match (u, fixture) {
        (Some(text), _) => ScalarFunctionHandle::new(parse(text).map_err(|e| format!("u: {e}"))?),
        (None, Some(spec)) => {
            let v: Vec<f64> = spec
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|e| format!("fixture `{s}`: {e}")))
                .collect::<Result<_, _>>()?;
            if v.len() != 4 {
                return Err("fixture needs tau1,tau2,tau3,eps".into());
            }
            let omega = if sin_omega {
                sin_product_omega()
            } else {
                FnBindings::new().with("ω", |_: &[f64], _: &[usize]| Some(0.0))
            };
            tian_fixture([v[0], v[1], v[2]], v[3], omega).map_err(|e| e.to_string())?
        }
        (None, None) => return Err("give --u or --fixture".into()),
    };
    let report = verify_case(
        spec,
        &b,
        std::slice::from_ref(&handle),
        &[t],
        cli.points.unwrap_or(30),
        cli.tol.unwrap_or(1e-7),
        cli.seed,
    )
    .map_err(|e| e.to_string())?;
    let g = flow_of(&spec.generator(&b), t).map_err(|e| e.to_string())?;
    let image = pushforward(&g, &handle).map_err(|e| e.to_string())?;
    let exact: BTreeMap<String, Expr> = image.params.iter().map(|(k, v)| (k.clone(), num_expr(*v))).collect();
    let mut closed = image.expr.substitute(&exact);
    if !sin_omega {
        closed = closed.instantiate("ω", &["a", "b", "c"], &Expr::zero());
    }
    let rate = spec.weight_rate(&b).map_err(|e| e.to_string())?;
    let origin = [0.0; 3];
    let moved = g.apply([0.0, 0.0, 0.0, 0.0]);
    let s2_before = handle.s2_at(origin).map_err(|e| e.to_string())?;
    let s2_after = image.s2_at([moved[0], moved[1], moved[2]]).map_err(|e| e.to_string())?;
    let text = match cli.format {
        Format::Json => pretty(&json!({
            "case": case,
            "t": t,
            "bindings": b.iter().map(|(k, v)| (k.clone(), v.to_string())).collect::<BTreeMap<_, _>>(),
            "transformed": print_decimal(&closed, 10),
            "weight": (rate * t).exp(),
            "s2_origin": s2_before,
            "s2_image_of_origin": s2_after,
            "report": report,
        })),
        Format::Md => format!(
            "case {case}, t = {t}\nu~(x, y, z) = {}\nweight w(t) = {:.12}\nS2[u](0) = {s2_before:.12}, S2[u~](g.0) = {s2_after:.12}\n\nverdict: {}\ngroup law {:.3e}, generator {:.3e}, equivariance {:.3e}\n{}",
            print_decimal(&closed, 10),
            (rate * t).exp(),
            if report.pass { "pass" } else { "fail" },
            report.group_law_residual,
            report.generator_residual,
            report.equivariance_max_residual,
            report.flags.iter().map(|f| format!("note: {f}\n")).collect::<String>()
        ),
    };
    Ok((text, report.pass))
}

fn cmd_invariants(cli: &Cli, name: &str, params: &[String], invariants: &[String]) -> CmdResult {
    let overrides = parse_params(params)?;
    let (rep, mut candidates): (Vec<Expr>, Vec<Expr>) = if name == "A1" {
        let mut rep = vec![Expr::zero(); 8];
        rep[6] = Expr::one();
        (rep, ["x", "y", "z"].map(Expr::var).to_vec())
    } else {
        let row = TABLE3
            .iter()
            .find(|r| r.id == name)
            .or_else(|| TABLE3.iter().find(|r| r.id.split('(').next() == Some(name)))
            .ok_or_else(|| format!("unknown representative `{name}`"))?;
        let mut b = row.bindings().into_iter().next().unwrap_or_default();
        b.extend(overrides.clone());
        let inst = row.instantiate(&b);
        (inst.rep, inst.invariants)
    };
    if !invariants.is_empty() {
        candidates = invariants
            .iter()
            .map(|s| parse(s).map(|e| e.substitute(&overrides)).map_err(|e| format!("invariant: {e}")))
            .collect::<Result<_, _>>()?;
    }
    let z = g8().combine(&rep);
    let r = characteristic_invariants_verify(&z, &candidates).map_err(|e| e.to_string())?;
    let text = match cli.format {
        Format::Json => pretty(&json!({ "representative": name, "operator": z.to_string(), "report": r })),
        Format::Md => {
            let mut s = format!("Z = {z}\n\n| invariant | verdict |\n|---|---|\n");
            for (i, v) in &r.verdicts {
                s.push_str(&format!("| {i} | {v:?} |\n"));
            }
            s.push_str(if r.f_solvable {
                "\nf can be solved from the invariants\n"
            } else {
                "\nno invariant f: the invariants do not involve f\n"
            });
            s
        }
    };
    Ok((text, r.all_zero))
}
