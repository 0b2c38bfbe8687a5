//! Command-line front end: parse structure and chart files, run the graded
//! calculus, and emit deterministic text or JSON reports.
//!
//! Exit codes: 0 ok, 1 property violation, 2 parse error, 3 contract
//! violation (non-closed truncation, bad chart, failed star hypotheses).

mod verify;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use poisson_core::error::Error;
use poisson_core::exterior::DiffForm;
use poisson_core::homology::{
    casimir_distributions, casimir_space, h0_canonical, operator_by_name, operator_matrix,
    operator_report, star_matrix_identity, DistributionFunctional, Flavor, TruncationSpec,
};
use poisson_core::numeric::{
    flow, leaf_distribution_check, leaf_integrate_with_nodes, FlowSpec, LeafChart,
};
use poisson_core::parse::{parse_form, parse_multivector, parse_poly};
use poisson_core::poisson::{
    bracket, jacobi_check, parse_structure, JacobiStatus, PoissonStructure,
};

#[derive(Parser)]
#[command(
    name = "poisson",
    about = "Exact graded calculus for polynomial Poisson structures",
    version
)]
struct Cli {
    /// Emit machine-readable JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Seed for the randomized property suites
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Poisson bracket {f, g}
    Bracket {
        structure: PathBuf,
        f: String,
        g: String,
    },
    /// Print the Schouten bracket of two multivector expressions
    Schouten {
        /// Comma-separated variable names, e.g. x,y,z
        #[arg(long, value_delimiter = ',', required = true)]
        vars: Vec<String>,
        u: String,
        v: String,
    },
    /// Verify the Jacobi identity; prints a witness triple on failure
    Jacobi { structure: PathBuf },
    /// Run the full identity suite against the structure
    Verify {
        structure: PathBuf,
        /// Coefficient degree bound for the truncated-matrix suites
        #[arg(long, default_value_t = 2)]
        degree: usize,
        /// Randomized cases per suite
        #[arg(long, default_value_t = 25)]
        cases: usize,
    },
    /// Materialize a complex operator on a truncation; report rank/kernel
    Homology {
        structure: PathBuf,
        /// One of: d, delta, dp
        #[arg(long, default_value = "dp")]
        operator: String,
        /// One of: form, multivector, function
        #[arg(long, default_value = "function")]
        flavor: String,
        /// Object degree of the domain truncation
        #[arg(long, default_value_t = 0)]
        k: usize,
        /// Coefficient degree bound of the domain truncation
        #[arg(long)]
        degree: usize,
    },
    /// Basis of the truncated Casimir space
    Casimir {
        structure: PathBuf,
        #[arg(long)]
        degree: usize,
    },
    /// Casimir distributions: the annihilator of the truncated bracket space
    Distributions {
        structure: PathBuf,
        #[arg(long)]
        degree: usize,
    },
    /// Check the star-conjugation matrix identity on a form truncation
    StarCheck {
        structure: PathBuf,
        /// Form degree of the domain truncation
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Coefficient degree bound
        #[arg(long)]
        degree: usize,
        /// Reference top form (defaults to dx(1,...,n))
        #[arg(long)]
        top: Option<String>,
    },
    /// Integrate a Hamiltonian flow with fixed-step RK4
    Flow {
        structure: PathBuf,
        #[arg(long)]
        hamiltonian: String,
        /// Comma-separated start coordinates
        #[arg(long, value_delimiter = ',', required = true)]
        start: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        time: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
    },
    /// Leaf functionals over a chart: an integral or a bracket-pair check
    Leaf {
        structure: PathBuf,
        chart: PathBuf,
        /// Integrate this polynomial against the leaf functional
        #[arg(long, conflicts_with = "pair")]
        integrand: Option<String>,
        /// Check |<delta_N, {f,g}>| for a comma-separated pair f,g
        #[arg(long, value_delimiter = ',')]
        pair: Option<Vec<String>>,
        /// Override the chart's node counts, e.g. 64x64
        #[arg(long)]
        nodes: Option<String>,
    },
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::NotVerified(_) => 1,
        Error::NonClosedTruncation(_)
        | Error::ChartInvariant(_)
        | Error::HypothesisViolated(_)
        | Error::OutsideRange(_)
        | Error::Degenerate(_)
        | Error::NonFinite(_) => 3,
        _ => 2,
    }
}

/// 17 significant digits, reproducible across runs.
fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn read_file(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))
}

fn load_structure(path: &Path) -> Result<(Vec<String>, PoissonStructure), Error> {
    let text = read_file(path)?;
    let (vars, bivector) = parse_structure(&text)?;
    let p = jacobi_check(&bivector)?;
    Ok((vars, p))
}

fn parse_nodes(spec: &str) -> Result<Vec<usize>, Error> {
    spec.split('x')
        .map(|part| {
            part.parse::<usize>()
                .map_err(|e| Error::Invalid(format!("bad node count '{part}': {e}")))
        })
        .collect()
}

fn emit(json_mode: bool, value: serde_json::Value, text: String) {
    if json_mode {
        println!("{value}");
    } else {
        println!("{text}");
    }
}

fn rational_text(c: &poisson_core::Rational) -> String {
    let denom = c.denom().to_string();
    if denom == "1" {
        c.numer().to_string()
    } else {
        format!("{}/{denom}", c.numer())
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Bracket { structure, f, g } => {
            let (vars, p) = load_structure(&structure)?;
            let pf = parse_poly(&f, &vars)?;
            let pg = parse_poly(&g, &vars)?;
            let result = bracket(&p, &pf, &pg)?.display_with(&vars);
            emit(
                cli.json,
                json!({"schema": 1, "command": "bracket", "result": result}),
                result.clone(),
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Schouten { vars, u, v } => {
            let mu = parse_multivector(&u, &vars)?;
            let mv = parse_multivector(&v, &vars)?;
            let result = poisson_core::calculus::schouten(&mu, &mv)?.display_with(&vars);
            emit(
                cli.json,
                json!({"schema": 1, "command": "schouten", "result": result}),
                result.clone(),
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Jacobi { structure } => {
            let text = read_file(&structure)?;
            let (vars, bivector) = parse_structure(&text)?;
            let p = jacobi_check(&bivector)?;
            match p.status() {
                JacobiStatus::Verified => {
                    emit(
                        cli.json,
                        json!({"schema": 1, "command": "jacobi", "verified": true, "witness": null}),
                        "verified".to_string(),
                    );
                    Ok(ExitCode::SUCCESS)
                }
                JacobiStatus::Failed { witness, value } => {
                    let triple = [witness.0 + 1, witness.1 + 1, witness.2 + 1];
                    let rendered = value.display_with(&vars);
                    emit(
                        cli.json,
                        json!({
                            "schema": 1,
                            "command": "jacobi",
                            "verified": false,
                            "witness": {"triple": triple, "value": rendered}
                        }),
                        format!(
                            "failed: [p,p]({}, {}, {}) = {rendered}",
                            vars[witness.0], vars[witness.1], vars[witness.2]
                        ),
                    );
                    Ok(ExitCode::from(1))
                }
                JacobiStatus::Unchecked => unreachable!("jacobi_check always decides"),
            }
        }
        Command::Verify {
            structure,
            degree,
            cases,
        } => {
            let text = read_file(&structure)?;
            let (vars, bivector) = parse_structure(&text)?;
            let p = jacobi_check(&bivector)?;
            if let JacobiStatus::Failed { witness, value } = p.status() {
                let rendered = value.display_with(&vars);
                emit(
                    cli.json,
                    json!({
                        "schema": 1,
                        "command": "verify",
                        "seed": cli.seed,
                        "verified": false,
                        "witness": {
                            "triple": [witness.0 + 1, witness.1 + 1, witness.2 + 1],
                            "value": rendered
                        }
                    }),
                    format!(
                        "FAIL jacobi: [p,p]({}, {}, {}) = {rendered}",
                        vars[witness.0], vars[witness.1], vars[witness.2]
                    ),
                );
                return Ok(ExitCode::from(1));
            }
            let mut rng = poisson_core::sampling::rng(cli.seed);
            let outcomes = verify::identity_suites(&p, &vars, &mut rng, cases, degree);
            let failed = outcomes.iter().any(|o| o.failure.is_some());
            if cli.json {
                let suites: Vec<serde_json::Value> = outcomes
                    .iter()
                    .map(|o| {
                        json!({
                            "name": o.name,
                            "cases": o.cases,
                            "ok": o.failure.is_none(),
                            "failure": o.failure,
                        })
                    })
                    .collect();
                println!(
                    "{}",
                    json!({
                        "schema": 1,
                        "command": "verify",
                        "seed": cli.seed,
                        "verified": true,
                        "ok": !failed,
                        "suites": suites,
                    })
                );
            } else {
                println!("jacobi: verified");
                for o in &outcomes {
                    match &o.failure {
                        None => println!("ok: {} ({} cases)", o.name, o.cases),
                        Some(f) => println!(
                            "FAIL: {} after {} cases: {f} (seed {})",
                            o.name, o.cases, cli.seed
                        ),
                    }
                }
            }
            Ok(if failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Homology {
            structure,
            operator,
            flavor,
            k,
            degree,
        } => {
            let (vars, p) = load_structure(&structure)?;
            let flavor = Flavor::parse(&flavor)?;
            let spec = TruncationSpec::new(flavor, k, degree, p.num_vars());
            let op = operator_by_name(&operator, Some(&p))?;
            let matrix = operator_matrix(op.as_ref(), &spec)?;
            let report = operator_report(&matrix, &vars);
            if cli.json {
                println!("{report}");
            } else {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("serializable")
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Casimir { structure, degree } => {
            let (vars, p) = load_structure(&structure)?;
            let basis = casimir_space(&p, degree)?;
            let rendered: Vec<String> = basis.iter().map(|b| b.display_with(&vars)).collect();
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "schema": 1,
                        "command": "casimir",
                        "degree": degree,
                        "dimension": rendered.len(),
                        "basis": rendered,
                    })
                );
            } else {
                println!(
                    "dimension {} at coefficient degree <= {degree}",
                    rendered.len()
                );
                for b in &rendered {
                    println!("  {b}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Distributions { structure, degree } => {
            let (vars, p) = load_structure(&structure)?;
            let h0 = h0_canonical(&p, degree)?;
            let functionals = casimir_distributions(&p, degree)?;
            let representatives: Vec<String> = h0
                .representatives
                .iter()
                .map(|r| r.display_with(&vars))
                .collect();
            let monomials: Vec<String> = {
                let spec = TruncationSpec::new(Flavor::Function, 0, degree, p.num_vars());
                spec.basis()
                    .iter()
                    .map(|(m, _)| {
                        poisson_core::Poly::from_terms(
                            p.num_vars(),
                            [(m.clone(), poisson_core::Rational::from_integer(1.into()))],
                        )
                        .display_with(&vars)
                    })
                    .collect()
            };
            let coeff_rows: Vec<Vec<String>> = functionals
                .iter()
                .map(|f| match f {
                    DistributionFunctional::TruncatedDual { coeffs, .. } => {
                        coeffs.iter().map(rational_text).collect()
                    }
                    _ => unreachable!("annihilators are truncated duals"),
                })
                .collect();
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "schema": 1,
                        "command": "distributions",
                        "degree": degree,
                        "h0_dimension": h0.dimension,
                        "annihilator_dimension": functionals.len(),
                        "h0_representatives": representatives,
                        "dual_basis_monomials": monomials,
                        "functionals": coeff_rows,
                    })
                );
            } else {
                println!(
                    "canonical H0 dimension {} = annihilator dimension {} at degree <= {degree}",
                    h0.dimension,
                    functionals.len()
                );
                println!("H0 representatives: {}", representatives.join(", "));
                println!("dual basis monomials: {}", monomials.join(", "));
                for (i, row) in coeff_rows.iter().enumerate() {
                    println!("  functional {}: [{}]", i + 1, row.join(", "));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::StarCheck {
            structure,
            k,
            degree,
            top,
        } => {
            let (vars, p) = load_structure(&structure)?;
            let n = p.num_vars();
            let top_form: DiffForm = match top {
                Some(text) => parse_form(&text, &vars)?,
                None => DiffForm::basis(n, &(0..n).collect::<Vec<_>>())?,
            };
            let report = star_matrix_identity(&p, &top_form, k, degree)?;
            emit(
                cli.json,
                json!({
                    "schema": 1,
                    "command": "star-check",
                    "k": k,
                    "degree": degree,
                    "holds": report.holds,
                    "counterexample": report.counterexample,
                }),
                if report.holds {
                    format!("holds on the degree-{k} slice at coefficient degree <= {degree}")
                } else {
                    format!(
                        "FAILS at basis element {}",
                        report.counterexample.as_deref().unwrap_or("?")
                    )
                },
            );
            Ok(if report.holds {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Flow {
            structure,
            hamiltonian,
            start,
            time,
            steps,
        } => {
            let (vars, p) = load_structure(&structure)?;
            let h = parse_poly(&hamiltonian, &vars)?;
            let spec = FlowSpec {
                hamiltonian: h,
                start,
                duration: time,
                steps,
            };
            let trajectory = flow(&p, &spec)?;
            let end = trajectory.last().expect("trajectory has points");
            // report drift of the lowest nonconstant truncated Casimir when
            // one exists
            let casimir_drift = casimir_space(&p, 2)?
                .iter()
                .find(|c| c.total_degree().unwrap_or(0) > 0)
                .map(|c| {
                    let c0 = c.eval_f64(&trajectory[0]);
                    trajectory
                        .iter()
                        .map(|x| (c.eval_f64(x) - c0).abs())
                        .fold(0.0f64, f64::max)
                });
            let end_rendered: Vec<String> = end.iter().map(|v| fmt_float(*v)).collect();
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "schema": 1,
                        "command": "flow",
                        "steps": steps,
                        "time": fmt_float(time),
                        "final": end_rendered,
                        "casimir_drift": casimir_drift.map(fmt_float),
                    })
                );
            } else {
                println!("final: ({})", end_rendered.join(", "));
                if let Some(d) = casimir_drift {
                    println!("casimir drift: {}", fmt_float(d));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Leaf {
            structure,
            chart,
            integrand,
            pair,
            nodes,
        } => {
            let (vars, p) = load_structure(&structure)?;
            let chart = LeafChart::from_json(&read_file(&chart)?)?;
            let nodes_override = nodes.as_deref().map(parse_nodes).transpose()?;
            match (integrand, pair) {
                (Some(f_text), None) => {
                    let f = parse_poly(&f_text, &vars)?;
                    let value =
                        leaf_integrate_with_nodes(&p, &chart, &f, nodes_override.as_deref())?;
                    emit(
                        cli.json,
                        json!({
                            "schema": 1,
                            "command": "leaf",
                            "mode": "integrate",
                            "value": fmt_float(value),
                        }),
                        fmt_float(value),
                    );
                    Ok(ExitCode::SUCCESS)
                }
                (None, Some(pair_texts)) => {
                    if pair_texts.len() != 2 {
                        return Err(Error::Invalid(
                            "--pair needs exactly two comma-separated polynomials".into(),
                        ));
                    }
                    let f = parse_poly(&pair_texts[0], &vars)?;
                    let g = parse_poly(&pair_texts[1], &vars)?;
                    let residual =
                        leaf_distribution_check(&p, &chart, &f, &g, nodes_override.as_deref())?;
                    emit(
                        cli.json,
                        json!({
                            "schema": 1,
                            "command": "leaf",
                            "mode": "pair",
                            "residual": fmt_float(residual),
                        }),
                        fmt_float(residual),
                    );
                    Ok(ExitCode::SUCCESS)
                }
                _ => Err(Error::Invalid(
                    "exactly one of --integrand or --pair is required".into(),
                )),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
