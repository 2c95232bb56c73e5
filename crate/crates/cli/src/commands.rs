use std::fmt;

use walker_core::catalog::{self, CatalogEntry};
use walker_core::expr::{is_zero_symbolic, parse, Expr};
use walker_core::geometry::{build_metric, equivalence_probe, ricci};
use walker_core::jets::{negative_control, on_shell_samples, reduced_system, symmetry_check};
use walker_core::liealg::{
    adjoint_matrix, adjoint_numeric, generators, replay_all, select_convention, subalgebra_closed, AdConvention,
    CoeffVector, StructureConstants, Subalgebra, DIM,
};
use walker_core::suite::{
    einstein_expr, verify_entries, verify_entry, CheckRecord, Mode, Report, Verdict, VerifyOptions,
};

use crate::{Cli, Command, ConventionArg, MetricFormat, ModeArg, ReportFormat};

/// Residual the negative control must exceed somewhere.
const CONTROL_MIN: f64 = 1e-3;

#[derive(Debug)]
pub struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn usage(e: impl fmt::Display) -> UsageError {
    UsageError(e.to_string())
}

pub struct Output {
    pub text: String,
    pub code: u8,
}

fn entries(cli: &Cli) -> Result<Vec<CatalogEntry>, UsageError> {
    match &cli.global.catalog {
        Some(p) => catalog::load(p).map_err(usage),
        None => Ok(catalog::builtin()),
    }
}

fn entry(cli: &Cli, id: &str) -> Result<CatalogEntry, UsageError> {
    let all = entries(cli)?;
    catalog::find(&all, id).cloned().map_err(usage)
}

fn expr(text: &str) -> Result<Expr, UsageError> {
    parse(text).map_err(|e| usage(format!("`{text}`: {e}")))
}

fn options(cli: &Cli, mode: Mode) -> VerifyOptions {
    VerifyOptions { mode, seed: cli.global.seed, tol: cli.global.tol, samples: cli.global.samples }
}

fn check(id: &str, ok: bool, detail: impl Into<String>) -> CheckRecord {
    CheckRecord::new(id, if ok { Verdict::Pass } else { Verdict::Fail }, detail)
}

pub fn run(cli: &Cli) -> Result<Output, UsageError> {
    let report = match &cli.command {
        Command::Brackets => brackets(),
        Command::Adjoint { gen, s, convention, replay } => adjoint(*gen, s, *convention, *replay)?,
        Command::Subalgebra { gens, check_closed } => subalgebra(gens, *check_closed)?,
        Command::Symmetries => symmetries(cli)?,
        Command::Einstein { a, b, c, entry: id } => einstein(cli, a, b, c, id)?,
        Command::Verify { entry: id, all, mode } => {
            let mode = match mode {
                ModeArg::Symbolic => Mode::Symbolic,
                ModeArg::Numeric => Mode::Numeric,
            };
            let selected = if *all {
                entries(cli)?
            } else {
                vec![entry(cli, id.as_deref().expect("clap enforces --entry or --all"))?]
            };
            verify_entries(&selected, &options(cli, mode))
        }
        Command::Defect { entry: id } => filtered(cli, id, "defect", "/defect")?,
        Command::Reducibility { entry: id } => filtered(cli, id, "reducibility", "/reducibility")?,
        Command::EquivalenceProbe => probe(cli),
        Command::EmitMetric { entry: id, format } => return emit_metric(cli, id, *format),
        Command::Catalog { save } => {
            let all = entries(cli)?;
            if let Some(p) = save {
                catalog::save(&all, p).map_err(usage)?;
            }
            let mut r = Report::new("catalog");
            for e in &all {
                r.line(format!("{}  {}", e.id, e.provenance));
            }
            r
        }
    };
    let text = match cli.global.report {
        ReportFormat::Text => report.to_text(),
        ReportFormat::Json => report.to_json(),
    };
    Ok(Output { text, code: report.exit_code() as u8 })
}

fn brackets() -> Report {
    let mut r = Report::new("brackets");
    let computed = StructureConstants::compute(&generators());
    r.push(match &computed {
        Ok(_) => check("brackets/decompose", true, "all 49 brackets lie in the span of X1..X7"),
        Err(e) => check("brackets/decompose", false, e.to_string()),
    });
    let sc = StructureConstants::standard();
    for j in 1..=DIM {
        let row: Vec<String> = (1..=DIM)
            .map(|k| {
                let v = CoeffVector::from_rationals(sc.bracket_coeffs(j, k));
                format!("{:>16}", v.to_string())
            })
            .collect();
        r.line(format!("[X{j}, .] {}", row.join(" ")));
    }
    r.push(check("brackets/antisymmetry", sc.is_antisymmetric(), "[Xi, Xj] = -[Xj, Xi]"));
    let fails = sc.jacobi_failures();
    let mut c = check("brackets/jacobi", fails.is_empty(), "Jacobi identity on all 35 triples");
    c.witness = fails.first().map(|(i, j, k)| format!("triple (X{i}, X{j}, X{k})"));
    r.push(c);
    r
}

fn adjoint(gen: usize, s: &str, conv: Option<ConventionArg>, replay: bool) -> Result<Report, UsageError> {
    if !(1..=DIM).contains(&gen) {
        return Err(usage(format!("--gen must lie in 1..={DIM}")));
    }
    let sc = StructureConstants::standard();
    let conv = match conv {
        Some(ConventionArg::Plus) => AdConvention::Plus,
        Some(ConventionArg::Minus) => AdConvention::Minus,
        None => select_convention(sc),
    };
    let s_expr = expr(s)?;
    let m = adjoint_matrix(sc, gen, &s_expr, conv);
    let mut r = Report::new(format!("adjoint of X{gen} at s = {s} ({conv:?})"));
    for (i, row) in m.0.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|e| format!("{:>12}", e.to_string())).collect();
        r.line(format!("X{} | {}", i + 1, cells.join(" ")));
    }
    if let Ok(v) = s_expr.eval(&Default::default()) {
        let numeric = adjoint_numeric(sc, gen, v, conv);
        let mut worst = 0.0f64;
        for i in 0..DIM {
            for k in 0..DIM {
                let exact = m.0[i][k].eval(&Default::default()).unwrap_or(f64::NAN);
                worst = worst.max((exact - numeric[i][k]).abs());
            }
        }
        r.push(check(
            "adjoint/numeric",
            worst < 1e-10,
            format!("exact against matrix exponential: max difference {worst:.3e}"),
        ));
    }
    if replay {
        for o in replay_all(sc, conv) {
            r.push(check(&format!("replay/{}", o.label), o.passed, o.detail));
        }
    }
    Ok(r)
}

fn subalgebra(gens: &str, check_closed: bool) -> Result<Report, UsageError> {
    let parts: Vec<&str> = gens.split([';', ',']).map(str::trim).filter(|s| !s.is_empty()).collect();
    let h = Subalgebra::parse("cli", &parts).map_err(usage)?;
    let mut r = Report::new("subalgebra");
    r.line(h.to_string());
    for (p, d) in &h.params {
        r.line(format!("parameter {} in {d:?}", p.name()));
    }
    if check_closed {
        let c = subalgebra_closed(&h, StructureConstants::standard());
        let detail = c
            .witnesses
            .iter()
            .map(|w| {
                let case = if w.case.is_empty() { String::new() } else { format!("{}: ", w.case) };
                format!("{case}lambda = {}, mu = {}", w.lambda, w.mu)
            })
            .collect::<Vec<_>>()
            .join("; ");
        let mut rec = check("subalgebra/closed", c.closed, detail);
        rec.witness = c.reason;
        r.push(rec);
    }
    Ok(r)
}

fn symmetries(cli: &Cli) -> Result<Report, UsageError> {
    let points = on_shell_samples(cli.global.seed, cli.global.samples).map_err(usage)?;
    let sys = reduced_system();
    let mut r = Report::new(format!("symmetries at {} on-shell jets", points.len()));
    for (i, g) in generators().iter().enumerate() {
        let rep = symmetry_check(g, &sys, &points);
        let worst = rep.max_relative.iter().cloned().fold(0.0, f64::max);
        let mut c = check(&format!("symmetry/X{}", i + 1), rep.passed, format!("max relative residual {worst:.3e}"));
        if !rep.passed {
            c.witness = rep.worst.map(|w| format!("eq{} at {}: {:.3e}", w.equation, w.point, w.relative));
        }
        r.push(c);
    }
    let control = symmetry_check(&negative_control(), &sys, &points);
    let worst = control.max_relative.iter().cloned().fold(0.0, f64::max);
    r.push(check(
        "symmetry/control",
        worst > CONTROL_MIN,
        format!("x d/dx is rejected: max relative residual {worst:.3e}"),
    ));
    Ok(r)
}

fn einstein(
    cli: &Cli,
    a: &Option<String>,
    b: &Option<String>,
    c: &Option<String>,
    id: &Option<String>,
) -> Result<Report, UsageError> {
    let triples: Vec<(Expr, Expr, Expr)> = match (a, b, c, id) {
        (Some(a), Some(b), Some(c), None) => vec![(expr(a)?, expr(b)?, expr(c)?)],
        (None, None, None, Some(id)) => {
            let e = entry(cli, id)?;
            let t = e.triples();
            if t.is_empty() {
                return Err(usage(format!("entry {id} has no solution")));
            }
            t.into_iter().map(|s| (s.a, s.b, s.c)).collect()
        }
        _ => return Err(usage("give --a, --b and --c, or --entry")),
    };
    let test = options(cli, Mode::Symbolic).zero_test();
    let mut r = Report::new("einstein");
    for (i, (a, b, c)) in triples.iter().enumerate() {
        let g = build_metric(a, b, c);
        r.line(g.line_element());
        let flat = ricci(&g).ricci.iter().flatten().all(|e| is_zero_symbolic(e) == Some(true));
        r.line(if flat { "Ricci: identically zero" } else { "Ricci: not identically zero" });
        let mut rec = einstein_expr(a, b, c, &test);
        if triples.len() > 1 {
            rec.id = format!("einstein/{}", i + 1);
        }
        r.line(format!("Einstein: {}", if rec.verdict == Verdict::Pass { "yes" } else { "no" }));
        r.push(rec);
    }
    Ok(r)
}

fn filtered(cli: &Cli, id: &str, title: &str, suffix: &str) -> Result<Report, UsageError> {
    let e = entry(cli, id)?;
    if e.subalgebra.is_none() || e.solutions.is_empty() {
        return Err(usage(format!("entry {id} needs a subalgebra and a solution")));
    }
    let mut r = Report::new(format!("{title} of {id}"));
    r.extend(verify_entry(&e, &options(cli, Mode::Symbolic)).into_iter().filter(|c| c.id.ends_with(suffix)));
    if r.checks.is_empty() {
        r.line(format!("no {title} check applies to {id}"));
    }
    Ok(r)
}

fn probe(cli: &Cli) -> Report {
    let p = equivalence_probe(cli.global.seed, cli.global.samples);
    let mut r = Report::new(format!("equivalence probe at {} jets", p.samples));
    for c in &p.correspondence {
        let terms: Vec<String> = c.terms.iter().map(|(t, k)| format!("{k:+.6}*{t}")).collect();
        let rhs = if terms.is_empty() { "0".to_string() } else { terms.join(" ") };
        r.line(format!("{} = {rhs}   (fit residual {:.1e})", c.component, c.fit_residual));
    }
    r.push(check("probe/on-shell", p.on_shell_ok, format!("max |E| on shell {:.3e}", p.on_shell_max)));
    let mut off = check("probe/off-shell", p.off_shell_ok, format!("min max |E| off shell {:.3e}", p.off_shell_min));
    off.witness = p.counterexample.clone();
    r.push(off);
    r
}

fn emit_metric(cli: &Cli, id: &str, format: MetricFormat) -> Result<Output, UsageError> {
    let e = entry(cli, id)?;
    let s = e.triples().into_iter().next().ok_or_else(|| usage(format!("entry {id} has no solution")))?;
    let g = build_metric(&s.a, &s.b, &s.c);
    let text = match format {
        MetricFormat::Text => format!("{}\n", g.line_element()),
        MetricFormat::Latex => format!("{}\n", g.latex()),
        MetricFormat::Json => {
            let v = serde_json::json!({ "coordinates": ["x", "t", "y", "z"], "metric": g.json_matrix() });
            format!("{}\n", serde_json::to_string_pretty(&v).expect("metric serializes"))
        }
    };
    Ok(Output { text, code: 0 })
}
