use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use bidiag_traces::oracle::{path_sum_g_with, path_sum_gtilde_with};
use bidiag_traces::{
    bound_report, check_monotone, diag_powers_subfree, diag_powers_subtractive, g_tables,
    gram_inverse_power, parse_inline, parse_matrix, relative_deviation, sigma_min_oracle,
    theta_from_trace, trace_identities_j2_j3, traces, unified_tables, verify_transforms,
    write_matrix, BidiagonalMatrix, Error, Method, ParseError, Side, TraceOptions, Variant,
    FACTORIAL_GUARD_ORDER,
};
use serde_json::{json, Map, Value};

use crate::args::{BenchArgs, CompareArgs, EngineArgs, GenArgs, InputArgs, OracleArgs, OutputArgs};
use crate::gen;
use crate::report::{Cell, Report, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: file not found", path.display())]
    FileNotFound { path: PathBuf },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{origin}: {source}")]
    Parse { origin: String, source: ParseError },
    #[error(transparent)]
    Numeric(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        if source.kind() == std::io::ErrorKind::NotFound {
            CliError::FileNotFound {
                path: path.to_owned(),
            }
        } else {
            CliError::Io {
                path: path.to_owned(),
                source,
            }
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// `(v^(m), w^(m))` for one order.
type DiagPair = (Vec<f64>, Vec<f64>);

fn load_matrix(input: &InputArgs) -> CliResult<(BidiagonalMatrix, String)> {
    if let Some(path) = &input.input {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let origin = path.display().to_string();
        let b = parse_matrix(&text).map_err(|source| CliError::Parse {
            origin: origin.clone(),
            source,
        })?;
        Ok((b, origin))
    } else {
        let spec = input.inline.as_deref().expect("clap enforces one input");
        let b = parse_inline(spec).map_err(|source| CliError::Parse {
            origin: "--inline".into(),
            source,
        })?;
        Ok((b, format!("inline:{spec}")))
    }
}

fn emit(report: &Report, output: &OutputArgs) -> CliResult<()> {
    let text = report.render(output.format);
    match &output.output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dedup(methods: &[Method], default: &[Method]) -> Vec<Method> {
    let source = if methods.is_empty() { default } else { methods };
    let mut out: Vec<Method> = Vec::new();
    for &m in source {
        if !out.contains(&m) {
            out.push(m);
        }
    }
    out
}

fn side_label(side: Side) -> &'static str {
    match side {
        Side::Upper => "upper",
        Side::Lower => "lower",
    }
}

fn base_config(command: &str, origin: &str, b: &BidiagonalMatrix) -> Map<String, Value> {
    let mut c = Map::new();
    c.insert("command".into(), json!(command));
    c.insert("input".into(), json!(origin));
    c.insert("n".into(), json!(b.n()));
    c
}

fn engine_config(
    command: &str,
    origin: &str,
    b: &BidiagonalMatrix,
    args: &EngineArgs,
    methods: &[Method],
) -> Map<String, Value> {
    let mut c = base_config(command, origin, b);
    c.insert(
        "methods".into(),
        json!(methods.iter().map(|m| m.label()).collect::<Vec<_>>()),
    );
    c.insert("max_order".into(), json!(args.max_order));
    c.insert(
        "side".into(),
        json!(args.side.map(|s| side_label(s.into()))),
    );
    c.insert(
        "z_direction".into(),
        json!(format!("{:?}", args.z_direction).to_lowercase()),
    );
    c
}

fn options(args: &EngineArgs) -> TraceOptions {
    TraceOptions {
        side: args.side.map(Into::into),
        z_direction: args.z_direction.into(),
    }
}

/// Traces up to the first failing order; later cells carry the failure.
struct PartialTraces {
    side: Side,
    values: Vec<Option<f64>>,
    notes: Vec<Option<String>>,
    warnings: Vec<String>,
}

fn partial_traces(
    b: &BidiagonalMatrix,
    method: Method,
    m_max: usize,
    opts: &TraceOptions,
) -> PartialTraces {
    let side = opts.side.unwrap_or_else(|| method.default_side());
    let mut values = vec![None; m_max];
    let mut notes = vec![None; m_max];
    let mut warnings = Vec::new();
    let mut limit = m_max;
    let mut failure: Option<(usize, Error)> = None;
    while limit >= 1 {
        match traces(b, method, limit, opts) {
            Ok(t) => {
                for (k, v) in t.values.iter().enumerate() {
                    values[k] = Some(*v);
                }
                for w in &t.warnings {
                    notes[w.order - 1] = Some("cancellation".into());
                    warnings.push(format!("{}: {w}", method.label()));
                }
                break;
            }
            Err(e @ (Error::Overflow { order, .. } | Error::FactorialOverflow { order }))
                if order >= 1 && order <= limit =>
            {
                if failure.is_none() {
                    failure = Some((order, e));
                }
                limit = order - 1;
            }
            Err(e) => {
                failure = Some((1, e));
                limit = 0;
            }
        }
    }
    if let Some((order, e)) = failure {
        warnings.push(format!("{}: {e}", method.label()));
        for note in &mut notes[order - 1..] {
            *note = Some(e.to_string());
        }
    }
    PartialTraces {
        side,
        values,
        notes,
        warnings,
    }
}

pub fn trace(args: &EngineArgs) -> CliResult<()> {
    let (b, origin) = load_matrix(&args.input)?;
    let methods = dedup(&args.methods, &[Method::Unified]);
    let opts = options(args);
    let mut report = Report {
        config: engine_config("trace", &origin, &b, args, &methods),
        ..Default::default()
    };
    let mut table =
        Table::new("trace", &["method", "side", "M", "J", "note"]).grouped(&["method", "side"]);
    for &method in &methods {
        let p = partial_traces(&b, method, args.max_order, &opts);
        for m in 1..=args.max_order {
            table.push(vec![
                method.label().into(),
                side_label(p.side).into(),
                m.into(),
                p.values[m - 1].into(),
                p.notes[m - 1].clone().into(),
            ]);
        }
        report.warnings.extend(p.warnings);
    }
    report.tables.push(table);
    emit(&report, &args.output)
}

pub fn diag(args: &EngineArgs) -> CliResult<()> {
    let (b, origin) = load_matrix(&args.input)?;
    let methods = dedup(&args.methods, &[Method::SubtractionFree]);
    if let Some(m) = methods.iter().find(|m| {
        !matches!(
            m,
            Method::Subtractive | Method::SubtractionFree | Method::Oracle
        )
    }) {
        return Err(CliError::Usage(format!(
            "diag supports kyn11, ykn12 and oracle, not {m}"
        )));
    }
    let mut report = Report {
        config: engine_config("diag", &origin, &b, args, &methods),
        ..Default::default()
    };
    let mut table =
        Table::new("diag", &["method", "M", "i", "v", "w", "note"]).grouped(&["method"]);
    let m_max = args.max_order;
    for &method in &methods {
        let rows: Result<Vec<DiagPair>, Error> = match method {
            Method::Subtractive => {
                diag_powers_subtractive(&b, m_max, args.z_direction.into()).map(|t| {
                    for w in &t.warnings {
                        report.warnings.push(format!("kyn11: {w}"));
                    }
                    (1..=m_max)
                        .map(|m| (t.v.order(m).to_vec(), t.w.order(m).to_vec()))
                        .collect()
                })
            }
            Method::SubtractionFree if m_max == 1 => g_tables(&b, 1).map(|g| vec![(g.v1, g.w1)]),
            Method::SubtractionFree => diag_powers_subfree(&b, m_max).map(|t| {
                (1..=m_max)
                    .map(|m| (t.v.order(m).to_vec(), t.w.order(m).to_vec()))
                    .collect()
            }),
            _ => (1..=m_max)
                .map(|m| {
                    Ok((
                        gram_inverse_power(&b, Side::Upper, m)?.diagonal(),
                        gram_inverse_power(&b, Side::Lower, m)?.diagonal(),
                    ))
                })
                .collect(),
        };
        match rows {
            Ok(rows) => {
                for (k, (v, w)) in rows.iter().enumerate() {
                    for i in 0..b.n() {
                        let note = (v[i] <= 0.0 || w[i] <= 0.0).then(|| "cancellation".to_owned());
                        table.push(vec![
                            method.label().into(),
                            (k + 1).into(),
                            (i + 1).into(),
                            v[i].into(),
                            w[i].into(),
                            note.into(),
                        ]);
                    }
                }
            }
            Err(e) => report.warnings.push(format!("{}: {e}", method.label())),
        }
    }
    report.tables.push(table);
    emit(&report, &args.output)
}

pub fn bounds(args: &EngineArgs) -> CliResult<()> {
    let (b, origin) = load_matrix(&args.input)?;
    let methods = dedup(&args.methods, &Method::ALL);
    let m_max = args.max_order;
    let summary = bound_report(&b, m_max, &methods)?;
    let mut report = Report {
        config: engine_config("bounds", &origin, &b, args, &methods),
        ..Default::default()
    };

    let mut table =
        Table::new("bounds", &["method", "M", "theta", "rel_gap", "note"]).grouped(&["method"]);
    for column in &summary.columns {
        let label = column.method.label();
        let (thetas, notes): (Vec<Option<f64>>, Vec<Option<String>>) = match &column.outcome {
            Ok(seq) => (
                seq.thetas.iter().map(|t| Some(*t)).collect(),
                vec![None; m_max],
            ),
            Err(e) => {
                report.warnings.push(format!("{label}: {e}"));
                let p = partial_traces(&b, column.method, m_max, &TraceOptions::default());
                let thetas: Vec<Option<f64>> = p
                    .values
                    .iter()
                    .enumerate()
                    .map(|(k, j)| j.map(|j| theta_from_trace(j, k + 1)))
                    .collect();
                let mut notes = p.notes;
                if let Err(Error::MonotonicityViolation { order, .. }) =
                    check_monotone(&thetas.iter().map_while(|t| *t).collect::<Vec<_>>())
                {
                    notes[order] = Some("decreases".into());
                }
                (thetas, notes)
            }
        };
        for m in 1..=m_max {
            let gap = thetas[m - 1]
                .zip(summary.sigma_min)
                .map(|(t, s)| (s - t) / s);
            table.push(vec![
                label.into(),
                m.into(),
                thetas[m - 1].into(),
                gap.into(),
                notes[m - 1].clone().into(),
            ]);
        }
    }
    report.tables.push(table);

    let mut reference = Table::new("reference", &["quantity", "value"]);
    reference.push(vec!["sigma_min".into(), summary.sigma_min.into()]);
    report.tables.push(reference);

    let mut agreement = Table::new("agreement", &["M", "max_rel_dev"]);
    for m in 1..=m_max {
        agreement.push(vec![m.into(), summary.max_cross_deviation(m).into()]);
    }
    report.tables.push(agreement);
    emit(&report, &args.output)
}

fn residual(table: &mut Table, check: &str, result: Result<f64, String>) {
    match result {
        Ok(v) => table.push(vec![check.into(), v.into(), Cell::Empty]),
        Err(note) => table.push(vec![check.into(), Cell::Empty, note.into()]),
    }
}

/// Largest relative deviation between the recurrence tables and the path sums.
fn path_sum_residuals(
    b: &BidiagonalMatrix,
    m_max: usize,
    budget: u64,
) -> Result<(f64, f64), Error> {
    let v = gram_inverse_power(b, Side::Upper, 1)?;
    let w = gram_inverse_power(b, Side::Lower, 1)?;
    let gt = unified_tables(b, m_max, Variant::Tilde)?;
    let gp = unified_tables(b, m_max, Variant::Plain)?;
    let (mut dt, mut dp) = (0.0f64, 0.0f64);
    for m in 2..=m_max {
        for i in 1..=b.n() {
            dt = dt.max(relative_deviation(
                gt.small.get(m, i - 1),
                path_sum_gtilde_with(&w, i, m, budget)?,
            ));
            dp = dp.max(relative_deviation(
                gp.small.get(m, i - 1),
                path_sum_g_with(&v, i, m, budget)?,
            ));
        }
    }
    Ok((dt, dp))
}

pub fn compare(args: &CompareArgs) -> CliResult<()> {
    let e = &args.engine;
    let methods = dedup(&e.methods, &Method::ALL);
    if methods.len() < 2 {
        return Err(CliError::Usage(
            "compare needs at least two distinct methods".into(),
        ));
    }
    let (b, origin) = load_matrix(&e.input)?;
    let m_max = e.max_order;
    let opts = options(e);
    let mut config = engine_config("compare", &origin, &b, e, &methods);
    config.insert("budget".into(), json!(args.budget));
    let mut report = Report {
        config,
        ..Default::default()
    };

    let results: Vec<PartialTraces> = methods
        .iter()
        .map(|&m| partial_traces(&b, m, m_max, &opts))
        .collect();
    let mut columns = vec!["M"];
    columns.extend(methods.iter().map(|m| m.label()));
    columns.push("max_rel_dev");
    let mut values = Table::new("values", &columns);
    let mut overall = 0.0f64;
    for m in 1..=m_max {
        let present: Vec<f64> = results.iter().filter_map(|r| r.values[m - 1]).collect();
        let mut dev = 0.0f64;
        for (k, a) in present.iter().enumerate() {
            for c in &present[k + 1..] {
                dev = dev.max(relative_deviation(*a, *c));
            }
        }
        overall = overall.max(dev);
        let mut row: Vec<Cell> = vec![m.into()];
        row.extend(results.iter().map(|r| Cell::from(r.values[m - 1])));
        row.push(if present.len() >= 2 {
            dev.into()
        } else {
            Cell::Empty
        });
        values.push(row);
    }
    for r in results {
        report.warnings.extend(r.warnings);
    }
    report.tables.push(values);

    let mut residuals = Table::new("residuals", &["check", "value", "note"]);
    residual(&mut residuals, "max_pairwise_rel_dev", Ok(overall));
    let transforms = if m_max < FACTORIAL_GUARD_ORDER {
        verify_transforms(&b, m_max).map_err(|e| e.to_string())
    } else {
        Err(format!("needs M < {FACTORIAL_GUARD_ORDER}"))
    };
    residual(
        &mut residuals,
        "h_vs_factorial_gtilde",
        transforms
            .as_ref()
            .map(|t| t.h_vs_gtilde)
            .map_err(Clone::clone),
    );
    residual(
        &mut residuals,
        "htilde_vs_factorial_g",
        transforms
            .as_ref()
            .map(|t| t.htilde_vs_g)
            .map_err(Clone::clone),
    );
    residual(
        &mut residuals,
        "H_vs_factorial_Gtilde",
        transforms
            .as_ref()
            .map(|t| t.big_h_vs_big_gtilde)
            .map_err(Clone::clone),
    );
    residual(
        &mut residuals,
        "Htilde_vs_factorial_G",
        transforms
            .as_ref()
            .map(|t| t.big_htilde_vs_big_g)
            .map_err(Clone::clone),
    );
    let ids = trace_identities_j2_j3(&b).map_err(|e| e.to_string());
    residual(
        &mut residuals,
        "j2_identity_dev",
        ids.as_ref().map(|i| i.j2_deviation()).map_err(Clone::clone),
    );
    residual(
        &mut residuals,
        "j3_identity_dev",
        ids.as_ref().map(|i| i.j3_deviation()).map_err(Clone::clone),
    );
    let paths = if m_max >= 2 {
        path_sum_residuals(&b, m_max, args.budget).map_err(|e| format!("skipped: {e}"))
    } else {
        Err("skipped: needs M >= 2".into())
    };
    residual(
        &mut residuals,
        "path_sum_gtilde_dev",
        paths.as_ref().map(|p| p.0).map_err(Clone::clone),
    );
    residual(
        &mut residuals,
        "path_sum_g_dev",
        paths.as_ref().map(|p| p.1).map_err(Clone::clone),
    );
    report.tables.push(residuals);
    emit(&report, &e.output)
}

fn reach(b: &BidiagonalMatrix, method: Method, limit: usize) -> (usize, bool) {
    match traces(b, method, limit, &TraceOptions::default()) {
        Ok(_) => (limit, false),
        Err(Error::Overflow { order, .. } | Error::FactorialOverflow { order }) => {
            (order - 1, true)
        }
        Err(_) => (0, true),
    }
}

pub fn bench(args: &BenchArgs) -> CliResult<()> {
    if args.sizes.is_empty() {
        return Err(CliError::Usage("bench needs a nonempty --n list".into()));
    }
    if args.sizes.contains(&0) {
        return Err(CliError::Usage(
            "matrix orders in --n must be at least 1".into(),
        ));
    }
    let methods = dedup(&args.methods, &Method::ENGINES);
    let mut config = Map::new();
    config.insert("command".into(), json!("bench"));
    config.insert("n".into(), json!(args.sizes));
    config.insert("m".into(), json!(args.orders));
    config.insert(
        "methods".into(),
        json!(methods.iter().map(|m| m.label()).collect::<Vec<_>>()),
    );
    config.insert("dist".into(), json!(args.dist.to_string()));
    config.insert("seed".into(), json!(args.seed));
    config.insert("reps".into(), json!(args.reps));
    config.insert("reach_limit".into(), json!(args.reach_limit));
    let mut report = Report {
        config,
        ..Default::default()
    };

    let mut rng = gen::rng(args.seed);
    let suites: Vec<Vec<BidiagonalMatrix>> = args
        .sizes
        .iter()
        .map(|&n| {
            (0..args.reps)
                .map(|_| args.dist.sample(n, &mut rng))
                .collect()
        })
        .collect();

    let mut timing = Table::new(
        "timing",
        &["method", "N", "M", "seconds", "J_first", "note"],
    );
    for (suite, &n) in suites.iter().zip(&args.sizes) {
        for &m in &args.orders {
            for &method in &methods {
                let mut elapsed = 0.0;
                let mut first = None;
                let mut note = None;
                for (k, b) in suite.iter().enumerate() {
                    let start = Instant::now();
                    let result = traces(b, method, m, &TraceOptions::default());
                    elapsed += start.elapsed().as_secs_f64();
                    match result {
                        Ok(t) if k == 0 => first = Some(t.values[m - 1]),
                        Ok(_) => {}
                        Err(e) => {
                            note.get_or_insert_with(|| e.to_string());
                        }
                    }
                }
                timing.push(vec![
                    method.label().into(),
                    n.into(),
                    m.into(),
                    (elapsed / suite.len() as f64).into(),
                    first.into(),
                    note.into(),
                ]);
            }
        }
    }
    report.tables.push(timing);

    let mut reach_table = Table::new("reach", &["method", "N", "max_order", "note"]);
    for (suite, &n) in suites.iter().zip(&args.sizes) {
        for &method in &methods {
            if method == Method::Oracle {
                reach_table.push(vec![
                    method.label().into(),
                    n.into(),
                    Cell::Empty,
                    "not measured".into(),
                ]);
                continue;
            }
            let (r, stopped) = reach(&suite[0], method, args.reach_limit);
            let note = (!stopped).then(|| "reached --reach-limit".to_owned());
            reach_table.push(vec![method.label().into(), n.into(), r.into(), note.into()]);
        }
    }
    report.tables.push(reach_table);
    emit(&report, &args.output)
}

pub fn oracle(args: &OracleArgs) -> CliResult<()> {
    let (b, origin) = load_matrix(&args.input)?;
    let mut config = base_config("oracle", &origin, &b);
    config.insert("max_order".into(), json!(args.max_order));
    config.insert("budget".into(), json!(args.budget));
    let mut report = Report {
        config,
        ..Default::default()
    };

    let mut t = Table::new("oracle", &["M", "J_upper", "J_lower", "theta"]);
    let upper = traces(
        &b,
        Method::Oracle,
        args.max_order,
        &TraceOptions {
            side: Some(Side::Upper),
            ..Default::default()
        },
    );
    let lower = traces(
        &b,
        Method::Oracle,
        args.max_order,
        &TraceOptions {
            side: Some(Side::Lower),
            ..Default::default()
        },
    );
    match (upper, lower) {
        (Ok(u), Ok(l)) => {
            for m in 1..=args.max_order {
                let ju = u.values[m - 1];
                t.push(vec![
                    m.into(),
                    ju.into(),
                    l.values[m - 1].into(),
                    theta_from_trace(ju, m).into(),
                ]);
            }
        }
        (Err(e), _) | (_, Err(e)) => report.warnings.push(format!("oracle: {e}")),
    }
    report.tables.push(t);

    let mut reference = Table::new("reference", &["quantity", "value"]);
    reference.push(vec!["sigma_min".into(), sigma_min_oracle(&b).ok().into()]);
    report.tables.push(reference);

    let mut paths = Table::new("path_sums", &["M", "i", "gtilde", "g"]);
    let v = gram_inverse_power(&b, Side::Upper, 1)?;
    let w = gram_inverse_power(&b, Side::Lower, 1)?;
    'outer: for m in 2..=args.max_order {
        for i in 1..=b.n() {
            match (
                path_sum_gtilde_with(&w, i, m, args.budget),
                path_sum_g_with(&v, i, m, args.budget),
            ) {
                (Ok(gt), Ok(g)) => paths.push(vec![m.into(), i.into(), gt.into(), g.into()]),
                (Err(e), _) | (_, Err(e)) => {
                    report
                        .warnings
                        .push(format!("path sums stopped at M = {m}: {e}"));
                    break 'outer;
                }
            }
        }
    }
    report.tables.push(paths);
    emit(&report, &args.output)
}

pub fn generate(args: &GenArgs) -> CliResult<()> {
    let mut rng = gen::rng(args.seed);
    let matrices: Vec<BidiagonalMatrix> = (0..args.count)
        .map(|_| args.dist.sample(args.n, &mut rng))
        .collect();
    let header = format!(
        "# generated: n={} dist={} seed={}\n",
        args.n, args.dist, args.seed
    );
    match (&args.output, args.count) {
        (None, 1) => {
            print!("{header}{}", write_matrix(&matrices[0]));
            Ok(())
        }
        (None, _) => Err(CliError::Usage(
            "--count above 1 needs --output naming a directory".into(),
        )),
        (Some(path), 1) => fs::write(path, format!("{header}{}", write_matrix(&matrices[0])))
            .map_err(|e| CliError::io(path, e)),
        (Some(dir), _) => {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            for (k, b) in matrices.iter().enumerate() {
                let path = dir.join(format!("matrix_{k:04}.txt"));
                fs::write(&path, format!("{header}{}", write_matrix(b)))
                    .map_err(|e| CliError::io(&path, e))?;
            }
            Ok(())
        }
    }
}
