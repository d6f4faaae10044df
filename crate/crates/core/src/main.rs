#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use awnev::asymptotics::{asym_check, asym_samples};
use awnev::awops::aw_diff_iterate;
use awnev::awpoly::{eigen_residual, orthogonality_check, rodrigues_residual, AWParams};
use awnev::expr::{compile, format_complex, parse_complex};
use awnev::funcrep::{Evaluate, FunctionExpr};
use awnev::kernel::{kernel_residual, kernel_solve, verify_identity, Identity, KernelTermSpec};
use awnev::nevanlinna::{admissible_grid_for, char_table, deficiencies, share_check, CharRow, ExtValue};
use awnev::{Error, QParam, Result, TruncationPolicy, C64};

#[derive(Parser)]
#[command(
    name = "awnev",
    version,
    about = "Askey-Wilson calculus and value distribution, numerically"
)]
struct Cli {
    /// Global q, a complex literal with 0 < |q| < 1.
    #[arg(long, global = true, default_value = "0.5", allow_hyphen_values = true)]
    q: String,
    /// Expression source, or @path to read it from a file.
    #[arg(long, global = true, allow_hyphen_values = true)]
    expr: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Pass/fail tolerance for residual-type commands.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum IdentityArg {
    Triple,
    Square,
    Addition,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolyMode {
    Eigen,
    Rodrigues,
    Ortho,
}

#[derive(Subcommand)]
enum Command {
    /// Value of the expression at x.
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// k-fold Askey-Wilson difference at x.
    Dq {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 1)]
        order: usize,
    },
    /// Characteristic table r, m, n, N, T (plus AW counts with --value).
    Char {
        #[arg(long)]
        rmin: f64,
        #[arg(long)]
        rmax: f64,
        #[arg(long)]
        points: usize,
        #[arg(long, allow_hyphen_values = true)]
        value: Option<String>,
    },
    /// Deficiencies for one or more values and the defect sum.
    Deficiency {
        #[arg(long, required = true, allow_hyphen_values = true)]
        value: Vec<String>,
        #[arg(long)]
        rmin: f64,
        #[arg(long)]
        rmax: f64,
        #[arg(long)]
        points: usize,
    },
    /// Whether the expression is annihilated by D_q.
    KernelCheck {
        #[arg(long, default_value_t = 40)]
        points: usize,
    },
    /// Rewrites a sum of kernel products as a single one.
    ///
    /// Terms are `C:a1,a2,...` separated by `/`, e.g. `2:0.3/1:0.45`.
    KernelSolve {
        /// Terms `C:a1,a2,...` joined by `/`
        #[arg(long, allow_hyphen_values = true)]
        terms: String,
    },
    /// Theta-function identities; --q is the nome.
    ThetaVerify {
        #[arg(long, value_enum)]
        identity: IdentityArg,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Askey-Wilson polynomial checks.
    Awpoly {
        #[arg(long)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long, allow_hyphen_values = true)]
        d: String,
        #[arg(long, value_enum, default_value_t = PolyMode::Eigen)]
        mode: PolyMode,
    },
    /// Asymptotic log-modulus formula against direct evaluation.
    AsymCheck {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Compares the AW counting functions of two expressions at one value.
    Share {
        #[arg(long, allow_hyphen_values = true)]
        expr2: String,
        #[arg(long, allow_hyphen_values = true)]
        value: String,
        #[arg(long, default_value_t = 10.0)]
        rmin: f64,
        #[arg(long, default_value_t = 1e6)]
        rmax: f64,
        #[arg(long, default_value_t = 12)]
        points: usize,
    },
}

/// Ordered rows plus summary values.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
    summary: Vec<(&'static str, Value)>,
}

impl Table {
    fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
            summary: Vec::new(),
        }
    }
}

fn cval(c: C64) -> Value {
    Value::String(format_complex(c))
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn read_source(s: &str) -> Result<String> {
    match s.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)
            .map(|t| t.trim().to_string())
            .map_err(|e| Error::InvalidParams(format!("cannot read {path}: {e}"))),
        None => Ok(s.to_string()),
    }
}

fn ext_value(s: &str) -> Result<ExtValue> {
    match s.trim() {
        "inf" | "infinity" => Ok(ExtValue::Infinity),
        t => parse_complex(t).map(ExtValue::Finite),
    }
}

fn parse_terms(spec: &str) -> Result<Vec<KernelTermSpec>> {
    spec.split('/')
        .map(|part| {
            let (c, gens) = part.split_once(':').ok_or_else(|| Error::Syntax {
                offset: 0,
                message: format!("term '{part}' needs C:a1,a2,..."),
            })?;
            Ok(KernelTermSpec {
                coefficient: parse_complex(c.trim())?,
                generators: gens
                    .split(',')
                    .map(|g| parse_complex(g.trim()))
                    .collect::<Result<_>>()?,
            })
        })
        .collect()
}

/// Deterministic spread of points in a strip around the real axis.
fn strip_samples(n: usize) -> Vec<C64> {
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let silver = 2f64.sqrt() - 1.0;
    (1..=n)
        .map(|k| {
            C64::new(
                3.0 * (k as f64 * golden).fract() - 1.5,
                0.8 * (k as f64 * silver).fract() - 0.4,
            )
        })
        .collect()
}

fn residual_gate(table: &mut Table, residual: f64, tol: f64) -> Result<()> {
    table.summary.push(("max_residual", json!(residual)));
    table.summary.push(("tolerance", json!(tol)));
    if !(residual <= tol) {
        return Err(Error::VerificationFailed { residual });
    }
    Ok(())
}

fn run(cli: &Cli, q: &QParam) -> Result<Table> {
    let expr = || -> Result<FunctionExpr> {
        let src = cli
            .expr
            .as_deref()
            .ok_or_else(|| Error::InvalidParams("--expr is required".into()))?;
        compile(&read_source(src)?, q)
    };
    match &cli.command {
        Command::Eval { x } => {
            let f = expr()?;
            let x = parse_complex(x)?;
            let mut t = Table::new(vec!["x", "value"]);
            t.rows.push(vec![cval(x), cval(f.eval(x)?)]);
            Ok(t)
        }
        Command::Dq { x, order } => {
            let f = expr()?;
            let x = parse_complex(x)?;
            let mut t = Table::new(vec!["x", "order", "value"]);
            t.rows
                .push(vec![cval(x), json!(order), cval(aw_diff_iterate(&f, *order, x, q)?)]);
            Ok(t)
        }
        Command::Char {
            rmin,
            rmax,
            points,
            value,
        } => {
            let f = expr()?;
            let grid = admissible_grid_for(&f, *rmin, *rmax, *points);
            let aw = match value {
                Some(v) => Some((ext_value(v)?, q)),
                None => None,
            };
            let mut t = Table::new(CharRow::CSV_HEADER.split(',').collect());
            for row in char_table(&f, &grid, aw)? {
                t.rows.push(vec![
                    json!(row.r),
                    json!(row.m),
                    json!(row.n),
                    json!(row.big_n),
                    json!(row.t),
                    row.n_aw.map_or(Value::Null, |v| json!(v)),
                    row.big_n_aw.map_or(Value::Null, |v| json!(v)),
                ]);
            }
            Ok(t)
        }
        Command::Deficiency {
            value,
            rmin,
            rmax,
            points,
        } => {
            let f = expr()?;
            let values = value.iter().map(|v| ext_value(v)).collect::<Result<Vec<_>>>()?;
            let grid = admissible_grid_for(&f, *rmin, *rmax, *points);
            let (reports, sum) = deficiencies(&f, &grid, &values, q)?;
            let mut t = Table::new(vec![
                "value",
                "delta",
                "vartheta_aw",
                "theta_aw",
                "r_min_used",
                "r_max_used",
            ]);
            for r in reports {
                let lo = r.r_used.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = r.r_used.iter().cloned().fold(0.0, f64::max);
                t.rows.push(vec![
                    json!(r.value.to_string()),
                    json!(r.delta),
                    json!(r.vartheta_aw),
                    json!(r.theta_aw),
                    json!(lo),
                    json!(hi),
                ]);
            }
            t.summary.push(("defect_sum", json!(sum)));
            Ok(t)
        }
        Command::KernelCheck { points } => {
            let f = expr()?;
            let grid: Vec<C64> = (0..*points)
                .map(|k| C64::from_polar(2.0 + 48.0 * k as f64 / *points as f64, 0.3 + 1.7 * k as f64))
                .collect();
            let residual = kernel_residual(&f, &grid, q)?;
            let tol = cli.tol.unwrap_or(1e-8);
            let mut t = Table::new(vec!["in_kernel", "max_residual", "tolerance"]);
            t.rows.push(vec![json!(residual < tol), json!(residual), json!(tol)]);
            Ok(t)
        }
        Command::KernelSolve { terms } => {
            let sol = kernel_solve(&parse_terms(terms)?, q)?;
            let mut t = Table::new(vec!["index", "c"]);
            for (i, c) in sol.c_generators.iter().enumerate() {
                t.rows.push(vec![json!(i + 1), cval(*c)]);
            }
            t.summary.push(("C", cval(sol.c)));
            t.summary.push(("residual", json!(sol.residual)));
            Ok(t)
        }
        Command::ThetaVerify { identity, samples } => {
            let (id, name, default_tol) = match identity {
                IdentityArg::Triple => (Identity::TripleProduct, "triple", 1e-12),
                IdentityArg::Square => (Identity::SquareSum, "square", 1e-10),
                IdentityArg::Addition => (Identity::Addition, "addition", 1e-10),
            };
            let pts = match id {
                // the triple product is checked in z, on and off the unit circle
                Identity::TripleProduct => strip_samples(*samples)
                    .into_iter()
                    .map(|w| C64::from_polar((2.0 * w.im).exp(), 2.0 * w.re))
                    .collect(),
                _ => strip_samples(*samples),
            };
            let residual = verify_identity(id, q, &pts)?;
            let mut t = Table::new(vec!["identity", "samples", "max_residual"]);
            t.rows.push(vec![json!(name), json!(pts.len()), json!(residual)]);
            residual_gate(&mut t, residual, cli.tol.unwrap_or(default_tol))?;
            Ok(t)
        }
        Command::Awpoly { n, a, b, c, d, mode } => {
            let p = AWParams::new(
                parse_complex(a)?,
                parse_complex(b)?,
                parse_complex(c)?,
                parse_complex(d)?,
                *q,
            );
            let grid = vec![
                C64::new(0.31, 0.0),
                C64::new(-0.62, 0.0),
                C64::new(0.2, 0.35),
                C64::new(1.3, -0.4),
                C64::new(-0.8, 0.7),
                C64::new(0.05, -0.9),
            ];
            match mode {
                PolyMode::Eigen => {
                    let mut t = Table::new(vec!["n", "residual"]);
                    let mut worst = 0.0f64;
                    for k in 0..=*n {
                        let r = eigen_residual(k, &p, &grid)?;
                        worst = worst.max(r);
                        t.rows.push(vec![json!(k), json!(r)]);
                    }
                    residual_gate(&mut t, worst, cli.tol.unwrap_or(1e-7))?;
                    Ok(t)
                }
                PolyMode::Rodrigues => {
                    let mut t = Table::new(vec!["n", "residual"]);
                    let mut worst = 0.0f64;
                    for k in 1..=(*n).max(1) {
                        let r = rodrigues_residual(k, &p, &grid)?;
                        worst = worst.max(r);
                        t.rows.push(vec![json!(k), json!(r)]);
                    }
                    residual_gate(&mut t, worst, cli.tol.unwrap_or(1e-6))?;
                    Ok(t)
                }
                PolyMode::Ortho => {
                    let size = *n as usize + 1;
                    let mut gram = vec![vec![C64::new(0.0, 0.0); size]; size];
                    for i in 0..size {
                        for j in i..size {
                            let v = orthogonality_check(i as u32, j as u32, &p, 40)?;
                            gram[i][j] = v;
                            gram[j][i] = v;
                        }
                    }
                    let mut t = Table::new(vec!["m", "n", "integral", "relative"]);
                    let mut worst = 0.0f64;
                    for i in 0..size {
                        for j in 0..size {
                            let rel = gram[i][j].norm() / (gram[i][i].norm() * gram[j][j].norm()).sqrt();
                            if i != j {
                                worst = worst.max(rel);
                            }
                            t.rows.push(vec![json!(i), json!(j), cval(gram[i][j]), json!(rel)]);
                        }
                    }
                    residual_gate(&mut t, worst, cli.tol.unwrap_or(1e-7))?;
                    Ok(t)
                }
            }
        }
        Command::AsymCheck { a, samples } => {
            let rep = asym_check(parse_complex(a)?, q, &asym_samples(*samples))?;
            let mut t = Table::new(vec!["x", "exact", "asymptotic", "error"]);
            for r in &rep.rows {
                t.rows
                    .push(vec![cval(r.x), json!(r.exact), json!(r.asymptotic), json!(r.error)]);
            }
            t.summary.push(("max_error", json!(rep.max_error)));
            t.summary.push(("bound", json!(rep.bound)));
            t.summary.push(("violations", json!(rep.violations)));
            if rep.violations > 0 {
                return Err(Error::VerificationFailed {
                    residual: rep.max_error,
                });
            }
            Ok(t)
        }
        Command::Share {
            expr2,
            value,
            rmin,
            rmax,
            points,
        } => {
            let f = expr()?;
            let g = compile(&read_source(expr2)?, q)?;
            let mut moduli_grid = admissible_grid_for(&f, *rmin, *rmax, *points);
            let g_grid = admissible_grid_for(&g, *rmin, *rmax, *points);
            moduli_grid.retain(|r| g_grid.iter().any(|s| (s / r - 1.0).abs() < 1e-12));
            let grid = if moduli_grid.len() >= 4 { moduli_grid } else { g_grid };
            let rep = share_check(&f, &g, ext_value(value)?, &grid, q)?;
            let mut t = Table::new(vec!["r", "n_aw_f", "n_aw_g", "diff"]);
            for r in &rep.rows {
                t.rows
                    .push(vec![json!(r.r), json!(r.n_aw_f), json!(r.n_aw_g), json!(r.diff)]);
            }
            t.summary.push(("alpha", json!(rep.alpha)));
            t.summary.push(("beta", json!(rep.beta)));
            t.summary.push(("shared", json!(rep.shared)));
            Ok(t)
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Eval { .. } => "eval",
        Command::Dq { .. } => "dq",
        Command::Char { .. } => "char",
        Command::Deficiency { .. } => "deficiency",
        Command::KernelCheck { .. } => "kernel-check",
        Command::KernelSolve { .. } => "kernel-solve",
        Command::ThetaVerify { .. } => "theta-verify",
        Command::Awpoly { .. } => "awpoly",
        Command::AsymCheck { .. } => "asym-check",
        Command::Share { .. } => "share",
    }
}

fn emit(cli: &Cli, q: &QParam, table: &Table) {
    match cli.format {
        Format::Csv => {
            println!("{}", table.columns.join(","));
            for row in &table.rows {
                println!("{}", row.iter().map(csv_cell).collect::<Vec<_>>().join(","));
            }
            for (k, v) in &table.summary {
                println!("# {k},{}", csv_cell(v));
            }
        }
        Format::Json => {
            let policy = TruncationPolicy::default();
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| {
                    Value::Object(
                        table
                            .columns
                            .iter()
                            .map(|c| c.to_string())
                            .zip(r.iter().cloned())
                            .collect(),
                    )
                })
                .collect();
            let summary: Map<String, Value> = table.summary.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
            let doc = json!({
                "meta": {
                    "command": command_name(&cli.command),
                    "q": format_complex(q.q()),
                    "expression": cli.expr,
                    "policy": { "abs_tol": policy.abs_tol, "max_terms": policy.max_terms },
                },
                "rows": rows,
                "summary": summary,
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = parse_complex(&cli.q).and_then(QParam::new).map(|q| {
        let t = run(&cli, &q);
        (q, t)
    });
    match outcome {
        Ok((q, Ok(table))) => {
            emit(&cli, &q, &table);
            ExitCode::SUCCESS
        }
        Ok((_, Err(e))) | Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
