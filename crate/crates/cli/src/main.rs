mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use quiver_bb::betti::{assemble_poincare, component_poincare, ComponentPoincare, PoincarePolynomial, ProviderOptions};
use quiver_bb::cells::{build_fixed_rep_auto, choose_complements, emit_cell_table, CellTable};
use quiver_bb::covering::{CoveringDimVector, WeightAssignment};
use quiver_bb::existence::{brute_force_stable_count_with, pg_order, CountOptions, DEFAULT_BUDGET};
use quiver_bb::kronecker::{self, Sign};
use quiver_bb::torus::{fixed_components, generic_normal_form_test, FixedComponent, FixedPointRun};
use quiver_bb::{DimensionVector, ErrorKind, Quiver, StabilityCondition};

use report::{render, Check, Format, Output, Table};

#[derive(Parser)]
#[command(name = "quiver-bb", version, about = "Torus fixed points and cell decompositions of quiver moduli")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fixed-point components with their tangent data.
    FixedPoints(RunArgs),
    /// Poincaré polynomial assembled from the fixed-point data.
    Poincare {
        #[command(flatten)]
        run: RunArgs,
        /// Skip point-count interpolation for non-isolated components.
        #[arg(long)]
        no_interpolate: bool,
    },
    /// Attractor dimensions per component.
    Attractors(RunArgs),
    /// Explicit attracting cells as coordinate patterns.
    Cells(RunArgs),
    /// The component with an open attractor, and its cell.
    NormalForm(RunArgs),
    /// Number of stable representations over finite fields, up to isomorphism.
    Count(RunArgs),
    /// Closed forms for K(l+1) with dimension vector (2, 2r+1).
    Kronecker(KroneckerArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Quiver as JSON: {"vertices": [...], "arrows": [{"name", "from", "to"}]}.
    #[arg(long)]
    quiver: Option<PathBuf>,
    /// Dimension vector, comma separated.
    #[arg(long)]
    dim: Option<String>,
    /// Stability weights, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Arrow weights as JSON: {"rank": n, "weights": {"a": [..]}}.
    #[arg(long, conflicts_with = "generic")]
    weights: Option<PathBuf>,
    /// Generic rank-one weights (the default).
    #[arg(long)]
    generic: bool,
    #[arg(long, value_enum, default_value = "on")]
    filter: Toggle,
    /// Field sizes for counting, comma separated.
    #[arg(long, value_delimiter = ',')]
    field: Vec<usize>,
    /// Largest number of representations enumerated per count.
    #[arg(long)]
    budget: Option<u128>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args, Clone)]
struct KroneckerArgs {
    /// The quiver is K(l+1).
    #[arg(long)]
    l: usize,
    /// The dimension vector is (2, 2r+1).
    #[arg(long)]
    r: usize,
    /// Also compare against the general fixed-point pipeline.
    #[arg(long)]
    check: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug)]
struct Failure {
    kind: ErrorKind,
    message: String,
    details: Vec<String>,
}

impl From<quiver_bb::Error> for Failure {
    fn from(e: quiver_bb::Error) -> Self {
        let details = match &e {
            quiver_bb::Error::PartialResult(parts) => parts.clone(),
            _ => Vec::new(),
        };
        Failure { kind: e.kind(), message: e.to_string(), details }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure { kind: ErrorKind::Validation, message: message.into(), details: Vec::new() }
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Validation => 2,
        ErrorKind::Unsupported => 3,
        ErrorKind::Inconsistency => 4,
    }
}

fn kind_name(kind: ErrorKind) -> &'static str {
    match kind {
        ErrorKind::Validation => "validation",
        ErrorKind::Unsupported => "unsupported",
        ErrorKind::Inconsistency => "inconsistency",
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Resolved inputs of a moduli-level command.
struct Setup {
    quiver: Quiver,
    dim: DimensionVector,
    theta: StabilityCondition,
    weights: WeightAssignment,
    filter: bool,
    fields: Vec<usize>,
    budget: u128,
    seed: u64,
}

impl Setup {
    fn load(args: &RunArgs) -> CliResult<Setup> {
        let path = args.quiver.as_ref().ok_or_else(|| invalid("--quiver is required"))?;
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        let quiver = Quiver::from_json(&text)?;
        let dim = DimensionVector::parse_csv(args.dim.as_deref().ok_or_else(|| invalid("--dim is required"))?)?;
        let theta =
            StabilityCondition::parse_csv(args.theta.as_deref().ok_or_else(|| invalid("--theta is required"))?)?;
        let weights = match &args.weights {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| invalid(format!("{}: {e}", p.display())))?;
                WeightAssignment::from_json(&quiver, &text)?
            }
            None => WeightAssignment::generic_rank_one(&quiver),
        };
        Ok(Setup {
            quiver,
            dim,
            theta,
            weights,
            filter: args.filter == Toggle::On,
            fields: if args.field.is_empty() { vec![2] } else { args.field.clone() },
            budget: args.budget.unwrap_or(DEFAULT_BUDGET),
            seed: args.seed,
        })
    }

    fn config(&self, command: &str) -> Value {
        json!({
            "command": command,
            "quiver": self.quiver.to_document(),
            "dim": self.dim.entries(),
            "theta": self.theta.weights(),
            "weights": self.weights.to_document(&self.quiver),
            "filter": self.filter,
            "fields": self.fields,
            "budget": self.budget.to_string(),
            "seed": self.seed,
        })
    }

    fn run(&self) -> CliResult<FixedPointRun> {
        Ok(fixed_components(&self.quiver, &self.weights, &self.dim, &self.theta, self.filter)?)
    }

    /// Labels when the input is the Kronecker family with generic weights.
    fn kronecker_labels(&self, components: &[FixedComponent]) -> Option<Vec<String>> {
        let q = &self.quiver;
        let shaped = q.vertex_count() == 2
            && q.arrows().iter().all(|a| a.source == 0 && a.target == 1)
            && self.dim.entries()[0] == 2
            && self.dim.entries()[1] % 2 == 1
            && self.theta.weights()[0] > self.theta.weights()[1]
            && self.weights == WeightAssignment::generic_rank_one(q);
        if !shaped || q.arrow_count() == 0 {
            return None;
        }
        let (l, r) = (q.arrow_count() - 1, (self.dim.entries()[1] / 2) as usize);
        components.iter().map(|c| kronecker::label_of(l, r, &self.weights, &c.beta).ok().flatten()).collect()
    }

    /// Rank-one weights with the same fixed points.
    fn rank_one(&self, run: &FixedPointRun) -> CliResult<WeightAssignment> {
        if self.weights.rank() == 1 {
            Ok(self.weights.clone())
        } else {
            Ok(self.weights.along(&run.lambda.exponents)?)
        }
    }
}

fn balance_checks(run: &FixedPointRun) -> Vec<Check> {
    let d = run.dimension;
    let balance = run.components.iter().all(|c| i64::from(c.att_plus + c.att_minus + c.dim_component) == d);
    let weights = run.components.iter().all(|c| i64::from(c.weight_table.values().sum::<u32>() + c.dim_component) == d);
    vec![Check::new("balance", balance), Check::new("weight-sum", weights)]
}

fn tangent_text(c: &FixedComponent) -> String {
    if c.weight_table.is_empty() {
        return "-".into();
    }
    c.weight_table
        .iter()
        .map(|(chi, m)| if *m == 1 { chi.to_string() } else { format!("{chi}^{m}") })
        .collect::<Vec<_>>()
        .join(" ")
}

fn component_json(idx: usize, c: &FixedComponent, quiver: &Quiver, label: Option<&String>) -> Value {
    json!({
        "index": idx,
        "label": label,
        "beta": c.beta.to_entries(quiver),
        "dim_component": c.dim_component,
        "att_plus": c.att_plus,
        "att_minus": c.att_minus,
        "isolated": c.isolated,
        "tangent": c.weight_table.iter().map(|(chi, m)| json!({"char": chi.0, "dim": m})).collect::<Vec<_>>(),
    })
}

fn cmd_fixed_points(s: &Setup) -> CliResult<Output> {
    let run = s.run()?;
    let labels = s.kronecker_labels(&run.components);
    let mut headers = vec!["index", "beta", "dim F", "att+", "att-", "tangent weights"];
    if labels.is_some() {
        headers.insert(1, "label");
    }
    let mut table = Table::new(headers);
    let mut rows = Vec::new();
    for (idx, c) in run.components.iter().enumerate() {
        let label = labels.as_ref().map(|l| &l[idx]);
        let mut row = vec![
            idx.to_string(),
            c.beta.describe(&s.quiver),
            c.dim_component.to_string(),
            c.att_plus.to_string(),
            c.att_minus.to_string(),
            tangent_text(c),
        ];
        if let Some(l) = label {
            row.insert(1, l.clone());
        }
        table.push(row);
        rows.push(component_json(idx, c, &s.quiver, label));
    }
    let mut out =
        Output::new(json!({"dimension": run.dimension, "lambda": run.lambda.exponents, "components": rows}), table);
    out.note("components", run.components.len().to_string());
    out.note("dimension", run.dimension.to_string());
    out.checks = balance_checks(&run);
    Ok(out)
}

fn cmd_attractors(s: &Setup) -> CliResult<Output> {
    let run = s.run()?;
    let labels = s.kronecker_labels(&run.components);
    let mut headers = vec!["index", "beta", "d+", "d-", "dim F"];
    if labels.is_some() {
        headers.insert(1, "label");
    }
    let mut table = Table::new(headers);
    let mut rows = Vec::new();
    for (idx, c) in run.components.iter().enumerate() {
        let mut row = vec![
            idx.to_string(),
            c.beta.describe(&s.quiver),
            c.att_plus.to_string(),
            c.att_minus.to_string(),
            c.dim_component.to_string(),
        ];
        if let Some(l) = &labels {
            row.insert(1, l[idx].clone());
        }
        table.push(row);
        rows.push(json!({
            "index": idx,
            "label": labels.as_ref().map(|l| &l[idx]),
            "att_plus": c.att_plus,
            "att_minus": c.att_minus,
            "dim_component": c.dim_component,
        }));
    }
    let mut out = Output::new(json!({"dimension": run.dimension, "components": rows}), table);
    out.checks = balance_checks(&run);
    Ok(out)
}

fn cmd_poincare(s: &Setup, interpolate: bool) -> CliResult<Output> {
    let run = s.run()?;
    let opts = ProviderOptions { interpolate, count: CountOptions { budget: s.budget, ..CountOptions::default() } };
    let parts: Vec<ComponentPoincare> =
        run.components.iter().map(|c| component_poincare(c, &s.quiver, &s.weights, &s.theta, &opts)).collect();
    let poly = assemble_poincare(run.components.iter().zip(&parts))?;
    let mut table = Table::new(["index", "beta", "att+", "provider", "P_F"]);
    for (idx, (c, p)) in run.components.iter().zip(&parts).enumerate() {
        table.push(vec![
            idx.to_string(),
            c.beta.describe(&s.quiver),
            c.att_plus.to_string(),
            provider_text(p),
            p.polynomial.as_ref().map_or("?".into(), PoincarePolynomial::to_text),
        ]);
    }
    let dim = usize::try_from(run.dimension).unwrap_or(0);
    let mut out = Output::new(
        json!({
            "dimension": run.dimension,
            "betti": poly.betti_numbers(),
            "polynomial": poly.to_text(),
            "components": parts,
        }),
        table,
    );
    out.text_body = Some(format!("{}\n", poly.to_text()));
    out.latex_body = Some(format!("$P(t) = {}$\n", poly.to_latex()));
    out.note("dimension", run.dimension.to_string());
    out.note("euler characteristic", poly.euler_characteristic().to_string());
    out.checks = balance_checks(&run);
    out.checks.push(Check::new("duality", poly.satisfies_duality(dim)));
    out.checks.push(Check::new("endpoints", poly.betti(0) == 1 && poly.betti(dim) == 1));
    Ok(out)
}

fn provider_text(p: &ComponentPoincare) -> String {
    use quiver_bb::betti::Provider;
    match &p.provider {
        Provider::Point => "point".into(),
        Provider::SubspaceStar { x } => format!("subspace star x={x}"),
        Provider::Interpolated { fields } => {
            format!("counts q={}", fields.iter().map(u64::to_string).collect::<Vec<_>>().join(","))
        }
        Provider::Unknown => "unknown".into(),
    }
}

fn chart_for(s: &Setup, w: &WeightAssignment, beta: &CoveringDimVector) -> CliResult<CellTable> {
    let rep = build_fixed_rep_auto(&s.quiver, w, beta, s.seed)?;
    let chart = choose_complements(&s.quiver, &rep)?;
    Ok(emit_cell_table(&s.quiver, &chart))
}

fn cells_output(s: &Setup, run: &FixedPointRun, picked: &[usize]) -> CliResult<Output> {
    let w = s.rank_one(run)?;
    let reduced =
        if s.weights.rank() == 1 { None } else { Some(fixed_components(&s.quiver, &w, &s.dim, &s.theta, s.filter)?) };
    let components = reduced.as_ref().map_or(&run.components, |r| &r.components);
    let labels = s.kronecker_labels(components);
    let mut table = Table::new(["index", "beta", "dim", "pattern"]);
    let mut text = String::new();
    let mut latex = String::from("\\begin{tabular}{ccc}\n$\\beta$ & dim & matrices \\\\\n\\hline\n");
    let mut docs = Vec::new();
    let mut consistent = true;
    for &idx in picked {
        let c = &components[idx];
        let cell = chart_for(s, &w, &c.beta)?;
        consistent &= cell.dimension == c.att_plus as usize;
        let name = labels.as_ref().map_or_else(|| cell.beta.clone(), |l| l[idx].clone());
        text.push_str(&format!("[{idx}] {}", cell.to_text()));
        text.push('\n');
        latex.push_str(&cell.to_latex().replacen(&cell.beta, &name, 1));
        latex.push('\n');
        let pattern = cell
            .matrices
            .iter()
            .map(|m| {
                let rows: Vec<String> = m.rows.iter().map(|r| r.join(" ")).collect();
                format!("{}=[{}]", m.arrow, rows.join("; "))
            })
            .collect::<Vec<_>>()
            .join(" ");
        table.push(vec![idx.to_string(), name.clone(), cell.dimension.to_string(), pattern]);
        docs.push(json!({"index": idx, "label": labels.as_ref().map(|l| &l[idx]), "table": cell}));
    }
    latex.push_str("\\end{tabular}\n");
    let mut out = Output::new(json!({"charts": docs}), table);
    out.text_body = Some(text);
    out.latex_body = Some(latex);
    out.checks = balance_checks(run);
    out.checks.push(Check::new("chart-dimension", consistent));
    Ok(out)
}

fn cmd_cells(s: &Setup) -> CliResult<Output> {
    let run = s.run()?;
    let all: Vec<usize> = (0..run.components.len()).collect();
    cells_output(s, &run, &all)
}

fn cmd_normal_form(s: &Setup) -> CliResult<Output> {
    let run = s.run()?;
    let w = s.rank_one(&run)?;
    let open: Vec<usize> =
        run.components.iter().enumerate().filter(|(_, c)| c.isolated && c.att_minus == 0).map(|(i, _)| i).collect();
    if s.weights.rank() == 1 {
        for &i in &open {
            if !generic_normal_form_test(&s.quiver, &w, &run.components[i].beta)? {
                return Err(Failure {
                    kind: ErrorKind::Inconsistency,
                    message: "open-attractor test disagrees with the fixed-point run".into(),
                    details: Vec::new(),
                });
            }
        }
    }
    let mut out = cells_output(s, &run, &open)?;
    out.checks.push(Check::new("unique", open.len() == 1));
    if let Some(&i) = open.first() {
        out.note("dimension", run.components[i].att_plus.to_string());
    }
    Ok(out)
}

fn cmd_count(s: &Setup) -> CliResult<Output> {
    let opts = CountOptions { budget: s.budget, ..CountOptions::default() };
    let expected = s.run().ok().and_then(|run| {
        let parts: Vec<_> = run
            .components
            .iter()
            .map(|c| {
                component_poincare(
                    c,
                    &s.quiver,
                    &s.weights,
                    &s.theta,
                    &ProviderOptions { interpolate: false, count: opts },
                )
            })
            .collect();
        assemble_poincare(run.components.iter().zip(&parts)).ok()
    });
    let mut table = Table::new(["q", "stable classes", "|PG_d|"]);
    let mut rows = Vec::new();
    let mut matches = true;
    for &q in &s.fields {
        let n = brute_force_stable_count_with(&s.quiver, &s.dim, &s.theta, q, &opts)?;
        table.push(vec![q.to_string(), n.to_string(), pg_order(q as u128, &s.dim).to_string()]);
        if let Some(p) = &expected {
            matches &= p.evaluate_q(q as u128) == n;
        }
        rows.push(json!({"q": q, "count": n.to_string()}));
    }
    let mut out = Output::new(json!({"counts": rows}), table);
    if let Some(p) = &expected {
        out.note("polynomial", p.to_text());
        out.checks.push(Check::new("matches-polynomial", matches));
    }
    Ok(out)
}

fn kronecker_config(a: &KroneckerArgs) -> Value {
    json!({"command": "kronecker", "l": a.l, "r": a.r, "check": a.check})
}

fn cmd_kronecker(a: &KroneckerArgs) -> CliResult<Output> {
    let (l, r) = (a.l, a.r);
    let poly = kronecker::kronecker_poincare(l, r)?;
    let dim = kronecker::kronecker_dimension(l, r);
    let mut table = Table::new(["label", "kind", "d+", "d-", "dim F"]);
    let mut rows = Vec::new();
    let type1 = kronecker::enumerate_type1(l, r)?;
    let type2 = kronecker::enumerate_type2(l, r)?;
    for label in &type1 {
        let (p, m) = (kronecker::d1_attractor(label, Sign::Plus), kronecker::d1_attractor(label, Sign::Minus));
        table.push(vec![label.code(), "1".into(), p.to_string(), m.to_string(), "0".into()]);
        rows.push(json!({"label": label.code(), "kind": 1, "att_plus": p}));
    }
    for label in &type2 {
        let x = label.x() as i64;
        let p = kronecker::d2_attractor(label);
        let minus = dim - i64::from(p) - (x - 3);
        table.push(vec![label.code(), "2".into(), p.to_string(), minus.to_string(), (x - 3).to_string()]);
        rows.push(json!({"label": label.code(), "kind": 2, "att_plus": p, "x": label.x()}));
    }
    let mut out = Output::new(
        json!({"l": l, "r": r, "dimension": dim, "betti": poly.betti_numbers(), "polynomial": poly.to_text(), "labels": rows}),
        table,
    );
    out.note("polynomial", poly.to_text());
    out.note("dimension", dim.to_string());
    let d = usize::try_from(dim).unwrap_or(0);
    out.checks.push(Check::new("duality", poly.satisfies_duality(d)));
    if r >= 1 {
        let nf = kronecker::generic_normal_form_label(l, r)?;
        out.note("open cell", nf.code());
        let zero: Vec<_> = type1.iter().filter(|t| kronecker::d1_attractor(t, Sign::Minus) == 0).collect();
        out.checks.push(Check::new("normal-form", zero.len() == 1 && *zero[0] == nf));
    }
    if a.check {
        let (q, dv, theta, w) = kronecker::kronecker_setup(l, r);
        let run = fixed_components(&q, &w, &dv, &theta, true)?;
        let parts: Vec<_> = run
            .components
            .iter()
            .map(|c| {
                component_poincare(c, &q, &w, &theta, &ProviderOptions { interpolate: false, ..Default::default() })
            })
            .collect();
        let general = assemble_poincare(run.components.iter().zip(&parts))?;
        out.checks.push(Check::new("pipeline", general == poly));
    }
    Ok(out)
}

fn fail(f: &Failure, format: Format) -> ExitCode {
    let code = exit_code(f.kind);
    if format == Format::Json {
        let doc = json!({"error": {"kind": kind_name(f.kind), "exit_code": code, "message": f.message, "details": f.details}});
        eprintln!("{}", serde_json::to_string_pretty(&doc).expect("diagnostic serializes"));
    } else {
        eprintln!("error ({}): {}", kind_name(f.kind), f.message);
        for d in &f.details {
            eprintln!("  missing: {d}");
        }
    }
    ExitCode::from(code)
}

fn finish(command: &str, config: &Value, out: CliResult<Output>, format: Format) -> ExitCode {
    match out {
        Ok(out) => {
            print!("{}", render(command, config, &out, format));
            if out.all_ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(exit_code(ErrorKind::Inconsistency))
            }
        }
        Err(f) => fail(&f, format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Kronecker(a) = &cli.command {
        return finish("kronecker", &kronecker_config(a), cmd_kronecker(a), a.format);
    }
    let (name, args, interpolate) = match &cli.command {
        Command::FixedPoints(a) => ("fixed-points", a, true),
        Command::Poincare { run, no_interpolate } => ("poincare", run, !no_interpolate),
        Command::Attractors(a) => ("attractors", a, true),
        Command::Cells(a) => ("cells", a, true),
        Command::NormalForm(a) => ("normal-form", a, true),
        Command::Count(a) => ("count", a, true),
        Command::Kronecker(_) => unreachable!(),
    };
    let setup = match Setup::load(args) {
        Ok(s) => s,
        Err(f) => return fail(&f, args.format),
    };
    let config = setup.config(name);
    let out = match name {
        "fixed-points" => cmd_fixed_points(&setup),
        "poincare" => cmd_poincare(&setup, interpolate),
        "attractors" => cmd_attractors(&setup),
        "cells" => cmd_cells(&setup),
        "normal-form" => cmd_normal_form(&setup),
        _ => cmd_count(&setup),
    };
    finish(name, &config, out, args.format)
}
